//! Truncated Fock-space representation: ladder and quadrature operators,
//! state constructors, mixtures and spectral decompositions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::displacement::{displacement_matrix, ln_factorials};
use crate::error::{Error, Result};

/// Mass allowed outside the truncated space when a constructor accepts a dim.
pub const TAIL_TOL: f64 = 1e-10;
/// Mass allowed on the top three levels before commutator-based quantities
/// are refused.
pub const EDGE_TOL: f64 = 1e-8;
/// Tail target used when a dimension is chosen automatically.
pub const AUTO_TAIL: f64 = 1e-15;
/// Smallest automatically chosen dimension.
pub const MIN_AUTO_DIM: usize = 16;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_CLIP: f64 = 1e-10;
const MAX_WORKSPACE: usize = 1024;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Ladder and quadrature operators on the first `dim` Fock levels.
///
/// Quadratures are dimensionless: `Q = (a^+ + a)/sqrt 2`, `P = i(a^+ - a)/sqrt 2`.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub dim: usize,
    pub a: DMatrix<C64>,
    pub a_dag: DMatrix<C64>,
    pub q: DMatrix<C64>,
    pub p: DMatrix<C64>,
}

impl OperatorSet {
    pub fn number(&self) -> DMatrix<C64> {
        &self.a_dag * &self.a
    }

    /// `Q cos(theta) + P sin(theta)`.
    pub fn quadrature(&self, theta: f64) -> DMatrix<C64> {
        &self.q * c(theta.cos()) + &self.p * c(theta.sin())
    }
}

pub fn build_ladder(dim: usize) -> Result<OperatorSet> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    let a_dag = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a_dag + &a) * c(s);
    let p = (&a_dag - &a) * C64::new(0.0, s);
    Ok(OperatorSet { dim, a, a_dag, q, p })
}

/// A normalized pure state in the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("state norm {norm} differs from 1")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        StateVector::new(amplitudes.unscale(norm))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<psi|op|psi>`.
    pub fn expect(&self, op: &DMatrix<C64>) -> C64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::trusted(m)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates and wraps a matrix.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() {
            return Err(Error::Validation(format!(
                "density matrix must be square, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite entries".into()));
        }
        let dev = max_abs(&(&matrix - matrix.adjoint()));
        if dev > HERMITIAN_TOL {
            return Err(Error::Validation(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!("trace {tr} differs from 1")));
        }
        let herm = (&matrix + matrix.adjoint()) * c(0.5);
        let min_eig = SymmetricEigen::new(herm.clone()).eigenvalues.min();
        if min_eig < -EIGEN_CLIP {
            return Err(Error::Validation(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix { matrix: herm })
    }

    /// For matrices that are valid by construction.
    pub(crate) fn trusted(matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        let herm = (&matrix + matrix.adjoint()) * c(0.5);
        DensityMatrix { matrix: herm }
    }

    /// Diagonal state with the given Fock populations (must sum to one).
    pub fn from_populations(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Validation("populations must be nonnegative".into()));
        }
        let m = DMatrix::from_diagonal(&DVector::from_iterator(probs.len(), probs.iter().map(|p| c(*p))));
        DensityMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// `Tr(rho op)`.
    pub fn expect(&self, op: &DMatrix<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// Fock-basis photon-number distribution.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    /// Mass on the top `levels` Fock levels.
    pub fn edge_mass(&self, levels: usize) -> f64 {
        let d = self.dim();
        (d.saturating_sub(levels)..d).map(|n| self.matrix[(n, n)].re.max(0.0)).sum()
    }

    /// Fails with a truncation error when the top three levels carry more
    /// than [`EDGE_TOL`].
    pub fn check_edge(&self, what: &str) -> Result<()> {
        let mass = self.edge_mass(3);
        if mass > EDGE_TOL {
            return Err(Error::Truncation {
                what: what.to_string(),
                dim: self.dim(),
                tail: mass,
                suggested: self.dim() * 2,
            });
        }
        Ok(())
    }

    /// Copy embedded in a larger space (zero padding).
    pub fn padded(&self, dim: usize) -> Result<DensityMatrix> {
        if dim < self.dim() {
            return Err(Error::DimMismatch(dim, self.dim()));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.matrix);
        Ok(DensityMatrix { matrix: m })
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a density matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub probs: Vec<f64>,
    /// Column `i` is the eigenvector for `probs[i]`.
    pub vectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    /// Decomposes any Hermitian PSD matrix, refusing non-Hermitian input.
    pub fn from_hermitian(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Validation("matrix must be square".into()));
        }
        let dev = max_abs(&(m - m.adjoint()));
        if dev > HERMITIAN_TOL {
            return Err(Error::Validation(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let herm = (m + m.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mut probs = Vec::with_capacity(order.len());
        let mut vectors = DMatrix::zeros(m.nrows(), order.len());
        for (col, &i) in order.iter().enumerate() {
            let p = eig.eigenvalues[i];
            if p < -EIGEN_CLIP {
                return Err(Error::Validation(format!("negative eigenvalue {p:.3e}")));
            }
            probs.push(p.max(0.0));
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        Ok(SpectralDecomposition { probs, vectors })
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// `sum_i p_i |i><i|`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (i, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let v = self.vectors.column(i);
            out += (&v * v.adjoint()) * c(*p);
        }
        out
    }
}

pub fn spectral(rho: &DensityMatrix) -> SpectralDecomposition {
    SpectralDecomposition::from_hermitian(rho.matrix()).expect("validated density matrix")
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

// ---------------------------------------------------------------------------
// dimension selection

/// Suffix sums `tail[d] = sum_{n >= d} p_n`; `tail` has one extra trailing zero.
pub(crate) fn suffix_tails(probs: &[f64]) -> Vec<f64> {
    let mut tail = vec![0.0; probs.len() + 1];
    for n in (0..probs.len()).rev() {
        tail[n] = tail[n + 1] + probs[n].max(0.0);
    }
    tail
}

fn tail_at(tails: &[f64], d: usize) -> f64 {
    tails.get(d).copied().unwrap_or(0.0)
}

/// Smallest dimension the constructors accept for this distribution.
fn suggest_from_tails(tails: &[f64]) -> usize {
    (2..tails.len().max(3))
        .find(|&d| tail_at(tails, d) <= TAIL_TOL && tail_at(tails, d.saturating_sub(3)) <= EDGE_TOL)
        .unwrap_or(tails.len().max(2))
}

/// Automatic dimension: tail below [`AUTO_TAIL`], at least the
/// `n + 6 sigma + 10` heuristic and [`MIN_AUTO_DIM`].
fn auto_from_probs(probs: &[f64]) -> usize {
    let tails = suffix_tails(probs);
    let by_tail = (1..tails.len()).find(|&d| tails[d] <= AUTO_TAIL).unwrap_or(tails.len());
    let total: f64 = probs.iter().sum();
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / total;
    let var: f64 =
        probs.iter().enumerate().map(|(n, p)| (n as f64 - mean).powi(2) * p).sum::<f64>() / total;
    let heuristic = (mean + 6.0 * var.sqrt() + 10.0).ceil() as usize;
    by_tail.max(heuristic).max(MIN_AUTO_DIM)
}

fn check_tail(what: &str, probs: &[f64], dim: usize) -> Result<()> {
    let tails = suffix_tails(probs);
    let tail = tail_at(&tails, dim);
    if tail > TAIL_TOL {
        return Err(Error::Truncation {
            what: what.to_string(),
            dim,
            tail,
            suggested: suggest_from_tails(&tails),
        });
    }
    Ok(())
}

/// Poisson probabilities with mean `lambda`, far enough into the tail that
/// the remainder is below 1e-40.
fn poisson_probs(lambda: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return vec![1.0];
    }
    let mut out = Vec::new();
    // the product recurrence keeps relative errors at a few ulps; the log
    // form is only needed where e^{-lambda} underflows
    let direct = lambda < 700.0;
    let ln_l = lambda.ln();
    let mut ln_fact = 0.0;
    let mut p = (-lambda).exp();
    let mut n = 0usize;
    loop {
        if n > 0 {
            if direct {
                p *= lambda / n as f64;
            } else {
                ln_fact += (n as f64).ln();
                p = (-lambda + n as f64 * ln_l - ln_fact).exp();
            }
        } else if !direct {
            p = (-lambda).exp();
        }
        out.push(p);
        if n as f64 > lambda && p < 1e-40 {
            break;
        }
        n += 1;
    }
    out
}

pub(crate) fn geometric_probs(ratio: f64) -> Vec<f64> {
    if ratio == 0.0 {
        return vec![1.0];
    }
    let len = ((1e-40f64).ln() / ratio.ln()).ceil() as usize + 1;
    (0..len).map(|n| (1.0 - ratio) * ratio.powi(n as i32)).collect()
}

// ---------------------------------------------------------------------------
// pure states

fn coherent_amplitudes(alpha: C64, len: usize) -> DVector<C64> {
    let u = alpha.norm_sqr();
    let mut v = DVector::zeros(len);
    if u == 0.0 {
        v[0] = c(1.0);
        return v;
    }
    if u < 1400.0 {
        v[0] = c((-u / 2.0).exp());
        for n in 1..len {
            v[n] = v[n - 1] * alpha / (n as f64).sqrt();
        }
        return v;
    }
    let phase = alpha / alpha.norm();
    let ln_r = alpha.norm().ln();
    let lnf = ln_factorials(len);
    for n in 0..len {
        v[n] = phase.powu(n as u32) * (-u / 2.0 + n as f64 * ln_r - 0.5 * lnf[n]).exp();
    }
    v
}

pub fn coherent_state(alpha: C64, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    check_tail("coherent state", &poisson_probs(alpha.norm_sqr()), dim)?;
    StateVector::normalized(coherent_amplitudes(alpha, dim))
}

pub fn coherent_auto_dim(alpha: C64) -> usize {
    auto_from_probs(&poisson_probs(alpha.norm_sqr()))
}

pub fn fock_state(n: usize, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if n >= dim {
        return Err(Error::OutOfRange { n, dim });
    }
    let mut v = DVector::zeros(dim);
    v[n] = c(1.0);
    StateVector::new(v)
}

pub fn fock_auto_dim(n: usize) -> usize {
    (n + 4).max(MIN_AUTO_DIM)
}

/// `exp(z^*/2 a^2 - z/2 a^+2)` on a `work`-level space.
///
/// The generator only couples levels of equal parity, so the even and odd
/// blocks are exponentiated separately.
fn squeeze_operator(z: C64, work: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(work, work);
    for parity in 0..2 {
        let levels: Vec<usize> = (parity..work).step_by(2).collect();
        let m = levels.len();
        if m == 0 {
            continue;
        }
        let mut g = DMatrix::<C64>::zeros(m, m);
        for j in 0..m.saturating_sub(1) {
            let n = levels[j] as f64;
            // <n+2| a^+2 |n> = sqrt((n+1)(n+2)) and <n| a^2 |n+2> the same
            let amp = ((n + 1.0) * (n + 2.0)).sqrt();
            g[(j + 1, j)] = -z * (0.5 * amp);
            g[(j, j + 1)] = z.conj() * (0.5 * amp);
        }
        let e = g.exp();
        for (jr, &r) in levels.iter().enumerate() {
            for (jc, &cc) in levels.iter().enumerate() {
                out[(r, cc)] = e[(jr, jc)];
            }
        }
    }
    out
}

/// Levels where a squeezed vacuum with squeeze `r` keeps mass above 1e-24.
fn squeeze_extent(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        (1e-24f64).ln() / r.tanh().ln()
    }
}

fn edge_leak(probs: &[f64]) -> f64 {
    let len = probs.len();
    probs[len.saturating_sub(10)..].iter().sum()
}

/// Squeezed coherent amplitudes `D(alpha) S(z)|0>` on an adaptively sized
/// workspace whose edge carries negligible mass.
fn squeezed_workspace(alpha: C64, z: C64) -> Result<DVector<C64>> {
    let spread = (squeeze_extent(z.norm()) + 1.0).sqrt();
    let reach = alpha.norm() + spread;
    let mut work = (reach * reach + 10.0 * reach + 30.0).ceil() as usize;
    loop {
        let work_dim = work.min(MAX_WORKSPACE);
        let s = squeeze_operator(z, work_dim);
        let vac = s.column(0).into_owned();
        let v = if alpha.norm_sqr() > 0.0 {
            displacement_matrix(alpha, work_dim) * vac
        } else {
            vac
        };
        let probs: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
        if edge_leak(&probs) < 1e-22 {
            return Ok(v);
        }
        if work_dim == MAX_WORKSPACE {
            return Err(Error::Truncation {
                what: "squeezed state workspace".into(),
                dim: work_dim,
                tail: edge_leak(&probs),
                suggested: MAX_WORKSPACE,
            });
        }
        work *= 2;
    }
}

/// `D(alpha) S(z)|0>` with `S(z) = exp(z^*/2 a^2 - z/2 a^+2)`.
pub fn squeezed_state(alpha: C64, z: C64, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let v = squeezed_workspace(alpha, z)?;
    let probs: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
    check_tail("squeezed state", &probs, dim)?;
    let mut out = DVector::zeros(dim);
    let keep = dim.min(v.len());
    out.rows_mut(0, keep).copy_from(&v.rows(0, keep));
    StateVector::normalized(out)
}

pub fn squeezed_auto_dim(alpha: C64, z: C64) -> Result<usize> {
    let v = squeezed_workspace(alpha, z)?;
    let probs: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
    Ok(auto_from_probs(&probs))
}

/// `g~(q) = (1/N) sum_m g(m) e^{-2 pi i q m/N}` evaluated through its
/// equivalent positive series `e^{-|a|^2} sum_{n = q mod N} |a|^{2n}/n!`.
pub fn cat_gtilde(alpha0: C64, n_comp: usize, q: i64) -> f64 {
    let u = alpha0.norm_sqr();
    let r = q.rem_euclid(n_comp as i64) as usize;
    if u == 0.0 {
        return if r == 0 { 1.0 } else { 0.0 };
    }
    let probs = poisson_probs(u);
    probs.iter().skip(r).step_by(n_comp).sum()
}

/// The same quantity from the discrete transform of
/// `g(m) = exp(|a|^2 (e^{2 pi i m/N} - 1))`.
pub fn cat_gtilde_dft(alpha0: C64, n_comp: usize, q: i64) -> f64 {
    let u = alpha0.norm_sqr();
    let nf = n_comp as f64;
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..n_comp {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / nf);
        let g = (c(u) * (w - c(1.0))).exp();
        acc += g * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (q as f64) * m as f64 / nf);
    }
    acc.re / nf
}

fn cat_probs(alpha0: C64, n_comp: usize, q: i64) -> Result<Vec<f64>> {
    let g = cat_gtilde(alpha0, n_comp, q);
    if !(g > 1e-14) {
        return Err(Error::DegenerateCat { q, value: g });
    }
    let r = q.rem_euclid(n_comp as i64) as usize;
    let probs = poisson_probs(alpha0.norm_sqr());
    Ok(probs
        .iter()
        .enumerate()
        .map(|(n, p)| if n % n_comp == r { p / g } else { 0.0 })
        .collect())
}

/// Multi-component cat `|c_q>`: `N` coherent states at `alpha0 e^{-2 pi i m/N}`
/// with relative phases `e^{2 pi i m q/N}`. Its Fock support is the residue
/// class `n = q mod N`.
pub fn cat_state(alpha0: C64, n_comp: usize, q: i64, dim: usize) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if n_comp < 2 {
        return Err(Error::Validation(format!("cat needs N >= 2 components, got {n_comp}")));
    }
    let probs = cat_probs(alpha0, n_comp, q)?;
    check_tail("cat state", &probs, dim)?;
    let r = q.rem_euclid(n_comp as i64) as usize;
    let mut v = coherent_amplitudes(alpha0, dim);
    for n in 0..dim {
        if n % n_comp != r {
            v[n] = c(0.0);
        }
    }
    StateVector::normalized(v)
}

pub fn cat_auto_dim(alpha0: C64, n_comp: usize, q: i64) -> Result<usize> {
    Ok(auto_from_probs(&cat_probs(alpha0, n_comp.max(2), q)?))
}

// ---------------------------------------------------------------------------
// mixed states

fn thermal_ratio(nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::Validation(format!("mean photon number {nbar} must be >= 0")));
    }
    Ok(nbar / (nbar + 1.0))
}

/// Geometric photon distribution with mean `nbar`, renormalized on the
/// truncated space.
pub fn thermal_state(nbar: f64, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let x = thermal_ratio(nbar)?;
    check_tail("thermal state", &geometric_probs(x), dim)?;
    let raw: Vec<f64> = (0..dim).map(|n| x.powi(n as i32)).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
    DensityMatrix::from_populations(&probs)
}

pub fn thermal_auto_dim(nbar: f64) -> Result<usize> {
    Ok(auto_from_probs(&geometric_probs(thermal_ratio(nbar)?)))
}

/// Thermal distribution `p_n ~ e^{-beta n}` with the vacuum removed.
pub fn truncated_thermal_state(beta: f64, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Validation(format!("beta {beta} must be > 0")));
    }
    let x = (-beta).exp();
    let mut shifted = vec![0.0];
    shifted.extend(geometric_probs(x));
    check_tail("truncated thermal state", &shifted, dim)?;
    let raw: Vec<f64> = (0..dim).map(|n| if n == 0 { 0.0 } else { x.powi(n as i32) }).collect();
    let total: f64 = raw.iter().sum();
    DensityMatrix::from_populations(&raw.iter().map(|p| p / total).collect::<Vec<_>>())
}

pub fn truncated_thermal_auto_dim(beta: f64) -> Result<usize> {
    if !(beta > 0.0) {
        return Err(Error::Validation(format!("beta {beta} must be > 0")));
    }
    let mut shifted = vec![0.0];
    shifted.extend(geometric_probs((-beta).exp()));
    Ok(auto_from_probs(&shifted))
}

fn squeezed_thermal_workspace(nbar: f64, z: C64) -> Result<DMatrix<C64>> {
    let x = thermal_ratio(nbar)?;
    let thermal = geometric_probs(x);
    let n_th = thermal.iter().rposition(|p| *p > 1e-24).unwrap_or(0);
    let r = z.norm();
    let mut work =
        ((n_th as f64 + 1.0) * (2.0 * r).exp() + squeeze_extent(r) + 40.0).ceil() as usize;
    loop {
        let work_dim = work.min(MAX_WORKSPACE);
        let s = squeeze_operator(z, work_dim);
        let mut rho = DMatrix::<C64>::zeros(work_dim, work_dim);
        for (n, p) in thermal.iter().enumerate().take(work_dim) {
            if *p < 1e-30 {
                continue;
            }
            let col = s.column(n);
            rho += (&col * col.adjoint()) * c(*p);
        }
        let probs: Vec<f64> = (0..work_dim).map(|n| rho[(n, n)].re).collect();
        if edge_leak(&probs) < 1e-22 {
            return Ok(rho);
        }
        if work_dim == MAX_WORKSPACE {
            return Err(Error::Truncation {
                what: "squeezed thermal workspace".into(),
                dim: work_dim,
                tail: edge_leak(&probs),
                suggested: MAX_WORKSPACE,
            });
        }
        work *= 2;
    }
}

/// `S(z) rho_th(nbar) S(z)^+`.
pub fn squeezed_thermal_state(nbar: f64, z: C64, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let big = squeezed_thermal_workspace(nbar, z)?;
    let probs: Vec<f64> = (0..big.nrows()).map(|n| big[(n, n)].re).collect();
    check_tail("squeezed thermal state", &probs, dim)?;
    let keep = dim.min(big.nrows());
    let mut m = DMatrix::zeros(dim, dim);
    m.view_mut((0, 0), (keep, keep)).copy_from(&big.view((0, 0), (keep, keep)));
    let tr = m.trace().re;
    DensityMatrix::new(m * c(1.0 / tr))
}

pub fn squeezed_thermal_auto_dim(nbar: f64, z: C64) -> Result<usize> {
    let big = squeezed_thermal_workspace(nbar, z)?;
    let probs: Vec<f64> = (0..big.nrows()).map(|n| big[(n, n)].re).collect();
    Ok(auto_from_probs(&probs))
}

/// Either kind of state accepted by [`mix`].
#[derive(Debug, Clone)]
pub enum MixComponent {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl MixComponent {
    pub fn dim(&self) -> usize {
        match self {
            MixComponent::Pure(v) => v.dim(),
            MixComponent::Mixed(r) => r.dim(),
        }
    }

    fn to_matrix(&self) -> DMatrix<C64> {
        match self {
            MixComponent::Pure(v) => v.amplitudes() * v.amplitudes().adjoint(),
            MixComponent::Mixed(r) => r.matrix().clone(),
        }
    }
}

impl From<StateVector> for MixComponent {
    fn from(v: StateVector) -> Self {
        MixComponent::Pure(v)
    }
}

impl From<DensityMatrix> for MixComponent {
    fn from(r: DensityMatrix) -> Self {
        MixComponent::Mixed(r)
    }
}

/// Convex combination `sum_k w_k rho_k`.
pub fn mix(states: &[MixComponent], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(Error::Weights("empty mixture".into()));
    }
    if states.len() != weights.len() {
        return Err(Error::Weights(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::Weights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Weights(format!("weights sum to {total}, not 1")));
    }
    let dim = states[0].dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimMismatch(dim, bad.dim()));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (s, w) in states.iter().zip(weights) {
        if *w > 0.0 {
            m += s.to_matrix() * c(*w);
        }
    }
    Ok(DensityMatrix::trusted(m))
}

/// Equal-weight mixture of the listed Fock levels.
pub fn fock_mixture(levels: &[usize], dim: usize) -> Result<DensityMatrix> {
    if levels.is_empty() {
        return Err(Error::Weights("empty mixture".into()));
    }
    let mut probs = vec![0.0; dim];
    for &n in levels {
        if n >= dim {
            return Err(Error::OutOfRange { n, dim });
        }
        probs[n] += 1.0 / levels.len() as f64;
    }
    DensityMatrix::from_populations(&probs)
}
