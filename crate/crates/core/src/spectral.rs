//! Floquet eigenanalysis and extent spectra of coherent states.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64 as C64;
use quasiecho_numerics::{eig_unitary, ComplexMatrix, EigenSystem};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};
use crate::kicked::FloquetOperator;
use crate::spin::{extent, extent_diagonal, SpinParameters};
use crate::state::QuantumState;

/// Eigenphases closer than this (on the circle) are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Largest accepted `||λ| − 1|` for an eigenvalue of the Floquet operator.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Hermitian observable whose standard deviation defines the extent.
#[derive(Debug, Clone)]
pub enum ExtentOperator {
    Diagonal(Vec<f64>),
    Dense(ComplexMatrix),
}

impl ExtentOperator {
    /// Accepts a Hermitian matrix; a matrix with no off-diagonal entries is
    /// stored by its diagonal.
    pub fn from_matrix(op: &ComplexMatrix) -> Result<Self> {
        if !op.is_square() {
            return Err(CoreError::DimensionMismatch { expected: op.rows(), actual: op.cols() });
        }
        let n = op.rows();
        let scale = op.max_abs().max(1.0);
        if op.hermitian_deviation() > 1e-12 * scale {
            return Err(invalid("extent operator must be Hermitian"));
        }
        let diagonal = (0..n).all(|r| op.row(r).iter().enumerate().all(|(c, z)| c == r || *z == C64::new(0.0, 0.0)));
        if diagonal {
            Ok(Self::Diagonal(op.diagonal().iter().map(|z| z.re).collect()))
        } else {
            Ok(Self::Dense(op.clone()))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.len(),
            Self::Dense(m) => m.rows(),
        }
    }

    pub fn extent_of(&self, amplitudes: &[C64]) -> Result<f64> {
        match self {
            Self::Diagonal(d) => extent_diagonal(amplitudes, d),
            Self::Dense(m) => extent(&QuantumState::from_amplitudes(amplitudes.to_vec())?, m),
        }
    }
}

/// Eigenbasis of a Floquet operator with the extent of every eigenvector.
#[derive(Debug, Clone)]
pub struct FloquetEigensystem {
    pub eigen: EigenSystem,
    pub extents: Vec<f64>,
    pub operator: ExtentOperator,
    /// Indices of eigenvectors sharing one eigenphase to within [`DEGENERACY_GAP`].
    pub degenerate_groups: Vec<Vec<usize>>,
}

impl FloquetEigensystem {
    pub fn from_parts(eigen: EigenSystem, operator: ExtentOperator) -> Result<Self> {
        let n = eigen.dim();
        if operator.dim() != n || eigen.eigenvectors.rows() != n || eigen.eigenvectors.cols() != n {
            return Err(CoreError::DimensionMismatch { expected: n, actual: operator.dim() });
        }
        if let Some(bad) = eigen.eigenvalues.iter().find(|l| (l.norm() - 1.0).abs() > UNIMODULAR_TOL) {
            return Err(invalid(format!("eigenvalue {bad} is not unimodular")));
        }
        let extents = (0..n).map(|j| operator.extent_of(&eigen.vector(j))).collect::<Result<Vec<_>>>()?;
        let degenerate_groups = degenerate_groups(&eigen.eigenvalues);
        Ok(Self { eigen, extents, operator, degenerate_groups })
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// `⟨φ_j|ψ⟩` for every eigenvector.
    pub fn overlaps(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if amplitudes.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n, actual: amplitudes.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (r, &psi) in amplitudes.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.eigen.eigenvectors.row(r)) {
                *o += v.conj() * psi;
            }
        }
        Ok(out)
    }
}

/// Groups eigenvalue indices whose phases are within [`DEGENERACY_GAP`]
/// of a neighbour, including across the branch cut at ±π.
fn degenerate_groups(eigenvalues: &[C64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    let phase = |i: usize| eigenvalues[i].arg();
    order.sort_by(|&a, &b| phase(a).total_cmp(&phase(b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if phase(i) - phase(*g.last().expect("groups are nonempty")) < DEGENERACY_GAP => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    if groups.len() > 1 {
        let first = phase(groups[0][0]);
        let last = phase(*groups.last().and_then(|g| g.last()).expect("groups are nonempty"));
        if first + 2.0 * std::f64::consts::PI - last < DEGENERACY_GAP {
            let tail = groups.pop().expect("more than one group");
            groups[0].extend(tail);
        }
    }
    groups
}

pub fn floquet_eigensystem(u: &FloquetOperator, extent_operator: &ComplexMatrix) -> Result<FloquetEigensystem> {
    floquet_eigensystem_with(u, ExtentOperator::from_matrix(extent_operator)?)
}

pub fn floquet_eigensystem_with(u: &FloquetOperator, operator: ExtentOperator) -> Result<FloquetEigensystem> {
    if operator.dim() != u.dim() {
        return Err(CoreError::DimensionMismatch { expected: u.dim(), actual: operator.dim() });
    }
    let eigen = eig_unitary(&u.materialize())?;
    FloquetEigensystem::from_parts(eigen, operator)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub extent: f64,
    pub amplitude: f64,
    /// Number of eigenvectors merged into this entry.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtentSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub source: Option<String>,
}

impl ExtentSpectrum {
    pub fn total_amplitude(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude).sum()
    }

    /// Entries ordered by decreasing amplitude.
    pub fn leading(&self, count: usize) -> Vec<SpectrumEntry> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
        e.truncate(count);
        e
    }
}

/// Amplitudes `|⟨φ_j|ψ⟩|²` paired with eigenstate extents, sorted by extent.
///
/// Degenerate eigenvectors are merged: their amplitudes add, and the extent
/// is that of the normalized projection of `ψ` onto the degenerate subspace,
/// so the result does not depend on the basis chosen inside it.
pub fn extent_spectrum(psi: &QuantumState, es: &FloquetEigensystem) -> Result<ExtentSpectrum> {
    let c = es.overlaps(psi.amplitudes())?;
    let mut entries = Vec::with_capacity(es.degenerate_groups.len());
    for group in &es.degenerate_groups {
        let amplitude: f64 = group.iter().map(|&j| c[j].norm_sqr()).sum();
        let extent = if group.len() == 1 {
            es.extents[group[0]]
        } else if amplitude > 0.0 {
            let mut proj = vec![C64::new(0.0, 0.0); es.dim()];
            for &j in group {
                for (p, v) in proj.iter_mut().zip(es.eigen.vector(j)) {
                    *p += c[j] * v;
                }
            }
            es.operator.extent_of(&proj)?
        } else {
            group.iter().map(|&j| es.extents[j]).sum::<f64>() / group.len() as f64
        };
        entries.push(SpectrumEntry { extent, amplitude, multiplicity: group.len() });
    }
    entries.sort_by(|a, b| a.extent.total_cmp(&b.extent));
    Ok(ExtentSpectrum { entries, source: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumShape {
    pub mean_extent: f64,
    pub extent_spread: f64,
    pub peak_amplitude: f64,
    pub participation_ratio: f64,
}

pub fn spectrum_shape_summary(sp: &ExtentSpectrum) -> Result<SpectrumShape> {
    let total = sp.total_amplitude();
    if sp.entries.is_empty() || total <= 0.0 {
        return Err(invalid("empty spectrum"));
    }
    let mean = sp.entries.iter().map(|e| e.amplitude * e.extent).sum::<f64>() / total;
    let var = sp.entries.iter().map(|e| e.amplitude * (e.extent - mean).powi(2)).sum::<f64>() / total;
    let peak = sp.entries.iter().map(|e| e.amplitude).fold(0.0, f64::max);
    let sum_sq: f64 = sp.entries.iter().map(|e| e.amplitude * e.amplitude).sum();
    Ok(SpectrumShape {
        mean_extent: mean,
        extent_spread: var.sqrt(),
        peak_amplitude: peak,
        participation_ratio: total * total / sum_sq,
    })
}

const CACHE_MAGIC: &[u8; 8] = b"QEEIGSYS";
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Kicked-top eigensystems keyed by `(J, k)`, optionally persisted to disk.
///
/// Counts every eigendecomposition it performs, so callers can verify that
/// a warm cache skips the solver.
#[derive(Debug, Default)]
pub struct EigenCache {
    dir: Option<PathBuf>,
    decompositions: AtomicUsize,
    hits: AtomicUsize,
}

impl EigenCache {
    /// A cache that never persists anything.
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir: Some(dir), ..Self::default() })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn decompositions(&self) -> usize {
        self.decompositions.load(Ordering::Relaxed)
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn path_for(&self, spin: SpinParameters, k: f64) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("qkt_2j{}_k{:016x}.eig", spin.twice_j(), k.to_bits())))
    }

    /// Loads the eigensystem of the kicked top at `(spin, k)` with `Jz` as
    /// extent operator, computing and storing it on a miss. Unreadable
    /// cache files count as misses and are overwritten.
    pub fn qkt_eigensystem(&self, spin: SpinParameters, k: f64) -> Result<FloquetEigensystem> {
        let operator = ExtentOperator::Diagonal(spin.jz_diagonal());
        let path = self.path_for(spin, k);
        if let Some(eigen) = path.as_deref().and_then(|p| read_cache(p, spin, k).ok()) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return FloquetEigensystem::from_parts(eigen, operator);
        }
        let u = crate::kicked::qkt_floquet(spin, k)?;
        self.decompositions.fetch_add(1, Ordering::Relaxed);
        let es = floquet_eigensystem_with(&u, operator)?;
        if let Some(p) = path {
            write_cache(&p, spin, k, &es.eigen)?;
        }
        Ok(es)
    }
}

fn write_cache(path: &Path, spin: SpinParameters, k: f64, eigen: &EigenSystem) -> Result<()> {
    let n = eigen.dim();
    let mut buf = Vec::with_capacity(48 + 16 * n * (n + 1));
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&spin.twice_j().to_le_bytes());
    buf.extend_from_slice(&k.to_bits().to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&eigen.residual_norm.to_le_bytes());
    for z in eigen.eigenvalues.iter().chain(eigen.eigenvectors.as_slice()) {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(&buf)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_cache(path: &Path, spin: SpinParameters, k: f64) -> Result<EigenSystem> {
    let bytes = fs::read(path)?;
    let bad = |what: &str| CoreError::CacheFormat(format!("{}: {what}", path.display()));
    let mut r = Reader { bytes: &bytes, pos: 0 };
    if r.take(8).ok_or_else(|| bad("truncated header"))? != CACHE_MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32().ok_or_else(|| bad("truncated header"))?;
    if version != CACHE_FORMAT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let twice_j = r.u32().ok_or_else(|| bad("truncated header"))?;
    let k_bits = r.u64().ok_or_else(|| bad("truncated header"))?;
    if twice_j != spin.twice_j() || k_bits != k.to_bits() {
        return Err(bad("key mismatch"));
    }
    let n = r.u64().ok_or_else(|| bad("truncated header"))? as usize;
    if n != spin.dim() {
        return Err(bad("dimension mismatch"));
    }
    let residual_norm = r.f64().ok_or_else(|| bad("truncated header"))?;
    let mut complex = |count: usize| -> Result<Vec<C64>> {
        (0..count)
            .map(|_| match (r.f64(), r.f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(bad("truncated body")),
            })
            .collect()
    };
    let eigenvalues = complex(n)?;
    let vectors = complex(n * n)?;
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    let eigenvectors = ComplexMatrix::from_row_major(n, n, vectors)?;
    Ok(EigenSystem { eigenvalues, eigenvectors, residual_norm })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + len)?;
        self.pos += len;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().expect("length 4")))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().expect("length 8")))
    }

    fn f64(&mut self) -> Option<f64> {
        self.u64().map(f64::from_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kicked::qkt_floquet;
    use crate::spin::{angular_momentum_operators, spin_coherent_state, GridIndex};
    use rand::{Rng, SeedableRng};

    fn top(j: f64, k: f64) -> (SpinParameters, FloquetEigensystem) {
        let spin = SpinParameters::new(j).unwrap();
        let es = EigenCache::disabled().qkt_eigensystem(spin, k).unwrap();
        (spin, es)
    }

    #[test]
    fn spin_half_rotation_eigenvectors() {
        // exp(−iπσy/4) has eigenvectors of σy, (1, ±i)/√2, where ⟨Jz⟩ = 0 and Δ|Jz| = 1/2.
        let (_, es) = top(0.5, 0.0);
        assert!(es.eigen.residual_norm < 1e-12);
        for &e in &es.extents {
            assert!((e - 0.5).abs() < 1e-12);
        }
        let phases: Vec<f64> = es.eigen.eigenvalues.iter().map(|l| l.arg()).collect();
        assert!((phases[0] + std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((phases[1] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn completeness_for_random_states() {
        let (_, es) = top(100.0, 1.1);
        assert!(es.eigen.residual_norm < 1e-8);
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..3 {
            let w: Vec<C64> = (0..es.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let psi = QuantumState::from_amplitudes(w).unwrap();
            let sp = extent_spectrum(&psi, &es).unwrap();
            assert!((sp.total_amplitude() - 1.0).abs() < 1e-8);
            assert!(sp.entries.windows(2).all(|w| w[0].extent <= w[1].extent));
            assert!(sp.entries.iter().all(|e| (0.0..=100.0).contains(&e.extent)));
        }
    }

    #[test]
    fn eigenstate_input_has_one_entry() {
        let (_, es) = top(10.0, 1.1);
        let k = 7;
        let psi = QuantumState::from_amplitudes(es.eigen.vector(k)).unwrap();
        let sp = extent_spectrum(&psi, &es).unwrap();
        let lead = sp.leading(2);
        assert!((lead[0].amplitude - 1.0).abs() < 1e-12);
        assert!((lead[0].extent - es.extents[k]).abs() < 1e-12);
        assert!(lead[1].amplitude < 1e-20);
        let shape = spectrum_shape_summary(&sp).unwrap();
        assert!((shape.participation_ratio - 1.0).abs() < 1e-10);
        assert!(shape.extent_spread < 1e-5);
    }

    #[test]
    fn global_phase_invariance() {
        let (spin, es) = top(20.0, 1.1);
        let psi = spin_coherent_state(spin, GridIndex::new(52).unwrap().location());
        // Both copies go through the same normalization so only the phase differs.
        let same = QuantumState::from_amplitudes(psi.amplitudes().to_vec()).unwrap();
        let a = extent_spectrum(&same, &es).unwrap();
        let i = QuantumState::from_amplitudes(psi.amplitudes().iter().map(|z| z * C64::i()).collect()).unwrap();
        assert_eq!(a, extent_spectrum(&i, &es).unwrap());
        let b = extent_spectrum(&psi.with_global_phase(0.77), &es).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.amplitude - y.amplitude).abs() < 1e-14 && (x.extent - y.extent).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_subspace_is_merged_and_gauge_free() {
        // Identity on a 3-dim space: one degenerate group whatever the basis.
        let n = 3;
        let basis = |mix: f64| {
            let (c, d) = (mix.cos(), mix.sin());
            let r = |x: f64| C64::new(x, 0.0);
            ComplexMatrix::from_row_major(n, n, vec![r(c), r(0.0), r(-d), r(0.0), r(1.0), r(0.0), r(d), r(0.0), r(c)]).unwrap()
        };
        let op = ExtentOperator::Diagonal(vec![-1.0, 0.0, 1.0]);
        let psi = QuantumState::from_amplitudes(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.8, 0.0)]).unwrap();
        let mut results = Vec::new();
        for mix in [0.0, 0.4] {
            let eigen = EigenSystem { eigenvalues: vec![C64::new(1.0, 0.0); n], eigenvectors: basis(mix), residual_norm: 0.0 };
            assert!(eigen.orthonormality_error() < 1e-14);
            let es = FloquetEigensystem::from_parts(eigen, op.clone()).unwrap();
            assert_eq!(es.degenerate_groups.len(), 1);
            let sp = extent_spectrum(&psi, &es).unwrap();
            assert_eq!(sp.entries.len(), 1);
            results.push(sp.entries[0]);
        }
        assert!((results[0].amplitude - 1.0).abs() < 1e-14);
        assert!((results[0].extent - results[1].extent).abs() < 1e-14);
        assert!((results[0].extent - 0.96).abs() < 1e-14);
    }

    #[test]
    fn groups_wrap_across_branch_cut() {
        let pi = std::f64::consts::PI;
        let ev = vec![C64::from_polar(1.0, -pi + 1e-12), C64::from_polar(1.0, 0.3), C64::from_polar(1.0, pi)];
        let g = degenerate_groups(&ev);
        assert_eq!(g.len(), 2);
        assert!(g.iter().any(|g| g.len() == 2));
    }

    #[test]
    fn uniform_spectrum_participation() {
        let sp = ExtentSpectrum {
            entries: (0..4).map(|i| SpectrumEntry { extent: i as f64, amplitude: 0.25, multiplicity: 1 }).collect(),
            source: None,
        };
        let shape = spectrum_shape_summary(&sp).unwrap();
        assert!((shape.participation_ratio - 4.0).abs() < 1e-14);
        assert!((shape.mean_extent - 1.5).abs() < 1e-14);
    }

    #[test]
    fn dense_and_diagonal_operators_agree() {
        let spin = SpinParameters::new(3.0).unwrap();
        let u = qkt_floquet(spin, 1.1).unwrap();
        let jz = angular_momentum_operators(spin).jz;
        let a = floquet_eigensystem(&u, &jz).unwrap();
        assert!(matches!(a.operator, ExtentOperator::Diagonal(_)));
        let b = FloquetEigensystem::from_parts(a.eigen.clone(), ExtentOperator::Dense(jz)).unwrap();
        for (x, y) in a.extents.iter().zip(&b.extents) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_cache_round_trip_skips_solver() {
        let dir = tempfile::tempdir().unwrap();
        let spin = SpinParameters::new(8.0).unwrap();
        let cold = EigenCache::on_disk(dir.path()).unwrap();
        let a = cold.qkt_eigensystem(spin, 1.1).unwrap();
        assert_eq!((cold.decompositions(), cold.hits()), (1, 0));
        let warm = EigenCache::on_disk(dir.path()).unwrap();
        let b = warm.qkt_eigensystem(spin, 1.1).unwrap();
        assert_eq!((warm.decompositions(), warm.hits()), (0, 1));
        assert_eq!(a.eigen.eigenvalues, b.eigen.eigenvalues);
        assert_eq!(a.eigen.eigenvectors.as_slice(), b.eigen.eigenvectors.as_slice());
        // A different k is a different key.
        warm.qkt_eigensystem(spin, 1.2).unwrap();
        assert_eq!(warm.decompositions(), 1);
    }

    #[test]
    fn corrupt_cache_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let spin = SpinParameters::new(2.0).unwrap();
        let cache = EigenCache::on_disk(dir.path()).unwrap();
        let path = cache.path_for(spin, 0.5).unwrap();
        fs::write(&path, b"QEEIGSYS garbage").unwrap();
        assert!(matches!(read_cache(&path, spin, 0.5), Err(CoreError::CacheFormat(_))));
        cache.qkt_eigensystem(spin, 0.5).unwrap();
        assert_eq!(cache.decompositions(), 1);
        assert!(read_cache(&path, spin, 0.5).is_ok());
    }
}
