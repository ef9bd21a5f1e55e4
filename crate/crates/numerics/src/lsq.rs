use crate::NumericsError;

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`. A fit with zero
    /// residual (including constant data) reports 1.
    pub r_squared: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn linear_least_squares(xs: &[f64], ys: &[f64]) -> Result<LinearFit, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::DimensionMismatch { expected: xs.len(), actual: ys.len() });
    }
    let n = xs.len();
    if n < 3 {
        return Err(NumericsError::TooFewPoints { needed: 3, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("least squares data"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let xscale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if sxx <= (f64::EPSILON * xscale).powi(2) * nf {
        return Err(NumericsError::DegenerateAbscissas);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(LinearFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-13);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn constant_ys() {
        let fit = linear_least_squares(&[1.0, 2.0, 3.0, 4.0], &[5.0; 4]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.intercept, 5.0);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        assert_eq!(linear_least_squares(&[1.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0]), Err(NumericsError::DegenerateAbscissas));
        assert!(matches!(linear_least_squares(&[1.0, 2.0], &[1.0, 2.0]), Err(NumericsError::TooFewPoints { .. })));
    }

    #[test]
    fn noisy_line_matches_closed_form() {
        // Box–Muller noise with unit variance around y = 3x.
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| 100.0 * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                3.0 * x + g
            })
            .collect();
        let fit = linear_least_squares(&xs, &ys).unwrap();
        assert!((fit.slope - 3.0).abs() < 0.01, "slope {}", fit.slope);

        // Closed form via the normal equations with raw sums.
        let nf = n as f64;
        let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
        let intercept = (sy - slope * sx) / nf;
        assert!((fit.slope - slope).abs() < 1e-9);
        assert!((fit.intercept - intercept).abs() < 1e-7);
        assert!(fit.r_squared > 0.99 && fit.r_squared <= 1.0);
    }
}
