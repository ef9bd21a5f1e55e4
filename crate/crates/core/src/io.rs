//! CSV emission and parsing for series, orbits and spectra.
//!
//! Reals are written with 17 significant digits so they reparse bit-exactly.
//! Lines starting with `#` are metadata and are skipped by the readers.

use std::io::{BufRead, Write};

use crate::error::{CoreError, Result};
use crate::kicked::{ClassicalOrbit, RotorPoint, TopPoint};
use crate::spectral::ExtentSpectrum;

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_series_csv<W: Write>(w: &mut W, values: &[f64]) -> Result<()> {
    writeln!(w, "t,fidelity")?;
    for (t, v) in values.iter().enumerate() {
        writeln!(w, "{t},{}", fmt_real(*v))?;
    }
    Ok(())
}

pub fn write_top_orbits_csv<W: Write>(w: &mut W, orbits: &[ClassicalOrbit<TopPoint>]) -> Result<()> {
    writeln!(w, "orbit_id,step,phi,theta")?;
    for (id, orbit) in orbits.iter().enumerate() {
        for (step, (phi, theta)) in orbit.angles().into_iter().enumerate() {
            writeln!(w, "{id},{step},{},{}", fmt_real(phi), fmt_real(theta))?;
        }
    }
    Ok(())
}

pub fn write_rotor_orbits_csv<W: Write>(w: &mut W, orbits: &[ClassicalOrbit<RotorPoint>]) -> Result<()> {
    writeln!(w, "orbit_id,step,q,p")?;
    for (id, orbit) in orbits.iter().enumerate() {
        for (step, pt) in orbit.points.iter().enumerate() {
            writeln!(w, "{id},{step},{},{}", fmt_real(pt.q), fmt_real(pt.p))?;
        }
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(w: &mut W, sp: &ExtentSpectrum) -> Result<()> {
    writeln!(w, "extent,amplitude")?;
    for e in &sp.entries {
        writeln!(w, "{},{}", fmt_real(e.extent), fmt_real(e.amplitude))?;
    }
    Ok(())
}

/// Reads a `t,fidelity` CSV. Rows must be consecutive from `t = 0`.
pub fn read_series_csv<R: BufRead>(r: R) -> Result<Vec<f64>> {
    let bad = |line: usize, msg: &str| CoreError::InvalidParameter(format!("series CSV line {line}: {msg}"));
    let mut values = Vec::new();
    let mut saw_header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "t,fidelity" {
                return Err(bad(i + 1, "expected header t,fidelity"));
            }
            saw_header = true;
            continue;
        }
        let (t, f) = line.split_once(',').ok_or_else(|| bad(i + 1, "expected two columns"))?;
        let t: usize = t.trim().parse().map_err(|_| bad(i + 1, "bad time"))?;
        let f: f64 = f.trim().parse().map_err(|_| bad(i + 1, "bad fidelity"))?;
        if t != values.len() {
            return Err(bad(i + 1, "times must run 0, 1, 2, ..."));
        }
        values.push(f);
    }
    if values.is_empty() {
        return Err(bad(0, "no data rows"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kicked::classical::{iterate, RotorMap};
    use crate::spectral::SpectrumEntry;

    #[test]
    fn series_round_trip_is_bit_exact() {
        let values = vec![1.0, 0.1 + 0.2, 1e-300, std::f64::consts::PI / 7.0, 0.0];
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &values).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,fidelity\n0,1.0000000000000000e0\n"));
        let back = read_series_csv(format!("# config: {{}}\n{text}").as_bytes()).unwrap();
        assert_eq!(back, values);
    }

    #[test]
    fn series_reader_rejects_gaps() {
        assert!(read_series_csv("t,fidelity\n0,1\n2,0.5\n".as_bytes()).is_err());
        assert!(read_series_csv("x,y\n0,1\n".as_bytes()).is_err());
        assert!(read_series_csv("t,fidelity\n".as_bytes()).is_err());
    }

    #[test]
    fn orbit_and_spectrum_headers() {
        let orbit = iterate(&RotorMap { k: 0.3 }, RotorPoint { q: -0.5, p: 0.1 }, 2);
        let mut buf = Vec::new();
        write_rotor_orbits_csv(&mut buf, &[orbit.clone(), orbit]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("orbit_id,step,q,p"));
        assert_eq!(text.lines().count(), 1 + 2 * 3);

        let sp = ExtentSpectrum { entries: vec![SpectrumEntry { extent: 2.5, amplitude: 1.0, multiplicity: 1 }], source: None };
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &sp).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "extent,amplitude\n2.5000000000000000e0,1.0000000000000000e0\n");
    }
}
