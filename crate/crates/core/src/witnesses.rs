//! Classical witnesses: normally ordered moments and their Hankel
//! determinants, the Mandel parameter, the degree of squeezing, and the
//! quantum Fisher information macroscopicity `M_QFI`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{cat_gtilde, max_abs, spectral, DensityMatrix, OperatorSet, SpectralDecomposition};
use crate::ordsens::{self, NonclassicalityBounds, OrderingSensitivityResult, FLAG_TOL};

/// Determinants and squeezing below `-NEG_TOL * scale` count as negative.
pub const NEG_TOL: f64 = 1e-10;
/// QFI sums skip eigenvalue pairs with `p_i + p_j` at or below this.
pub const QFI_PAIR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    /// `m[l] = Tr rho (a^+)^l a^l`.
    pub m: Vec<f64>,
}

/// Normally ordered moments up to `l_max`.
///
/// `(a^+)^l a^l` is diagonal in the Fock basis with entries `n!/(n-l)!`, and
/// the truncation does not alter it, so the traces are exact.
pub fn moments(rho: &DensityMatrix, ops: &OperatorSet, l_max: usize) -> Result<MomentVector> {
    if ops.dim != rho.dim() {
        return Err(Error::DimMismatch(ops.dim, rho.dim()));
    }
    if l_max > rho.dim() / 4 {
        return Err(Error::MomentOrder { l_max, dim: rho.dim() });
    }
    let pops = rho.populations();
    let m = (0..=l_max)
        .map(|l| {
            pops.iter()
                .enumerate()
                .skip(l)
                .map(|(n, p)| p * ((n + 1 - l)..=n).map(|k| k as f64).product::<f64>())
                .sum()
        })
        .collect();
    Ok(MomentVector { m })
}

fn equilibrated_det(h: DMatrix<f64>) -> f64 {
    let n = h.nrows();
    let scale: Vec<f64> = (0..n).map(|i| h[(i, i)].abs().sqrt()).collect();
    if scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return h.determinant();
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| h[(i, j)] / (scale[i] * scale[j]));
    scaled.determinant() * scale.iter().map(|s| s * s).product::<f64>()
}

/// `m_{i+j}` Hankel matrix of order `n`.
fn hankel(m: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| m[i + j])
}

/// `[D_1, ..., D_{n_max}]`, `D_n` the determinant of `(m_{i+j})_{i,j<n}`.
pub fn moment_determinants(mv: &MomentVector, n_max: usize) -> Result<Vec<f64>> {
    let needed = (2 * n_max).saturating_sub(1);
    if mv.m.len() < needed {
        return Err(Error::InsufficientMoments { needed, have: mv.m.len() });
    }
    Ok((1..=n_max)
        .map(|n| {
            let h = hankel(&mv.m, n);
            if n >= 4 {
                equilibrated_det(h)
            } else {
                h.determinant()
            }
        })
        .collect())
}

/// Natural magnitude of `D_n`: product of the Hankel diagonal.
pub fn determinant_scale(mv: &MomentVector, n: usize) -> f64 {
    (0..n).map(|i| mv.m.get(2 * i).copied().unwrap_or(0.0).abs()).product()
}

fn gtilde_checked(alpha0: C64, n_comp: usize, q: i64) -> Result<f64> {
    let g = cat_gtilde(alpha0, n_comp, q);
    if !(g > 1e-14) {
        return Err(Error::DegenerateCat { q, value: g });
    }
    Ok(g)
}

/// `D_n(q) = |a|^{2n(n-1)} det G~(q) / g~(q)^n` with
/// `G~_{ij} = g~(q - i - j)`. Rows `i` and `i + N` coincide, so `D_n = 0`
/// for `n > N`.
pub fn cat_dn_closed(alpha0: C64, n_comp: usize, q: i64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Validation("determinant order must be >= 1".into()));
    }
    let g = gtilde_checked(alpha0, n_comp, q)?;
    if n > n_comp {
        return Ok(0.0);
    }
    let gt = DMatrix::from_fn(n, n, |i, j| cat_gtilde(alpha0, n_comp, q - (i + j) as i64) / g);
    let u = alpha0.norm_sqr();
    Ok(u.powi((n * (n - 1)) as i32) * gt.determinant())
}

/// Upper bound on `|D_n(q)|` from `g~ = 1/N + r` with `|r| <= rbar`.
pub fn cat_dn_bound(alpha0: C64, n_comp: usize, q: i64, n: usize) -> Result<f64> {
    let g = gtilde_checked(alpha0, n_comp, q)?;
    let nf = n_comp as f64;
    let x = 2.0 * PI / nf;
    let eta = 1.0 - x * x / 12.0;
    let u = alpha0.norm_sqr();
    let rbar = (nf - 1.0) / nf * (-0.5 * u * eta * x * x).exp();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(u.powi((n * (n - 1)) as i32) / g.powi(n as i32) * fact * rbar.powi(n as i32 - 1) * (rbar + n as f64 / nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mandel {
    /// `m_2 - m_1^2`.
    pub d2: f64,
    /// `d2 / <n>`, absent for the vacuum.
    pub q_normalized: Option<f64>,
}

impl Mandel {
    pub fn q(&self) -> Result<f64> {
        self.q_normalized
            .ok_or_else(|| Error::Undefined("Mandel Q is undefined for the vacuum".into()))
    }
}

pub fn mandel(rho: &DensityMatrix, ops: &OperatorSet) -> Result<Mandel> {
    let mv = moments(rho, ops, 2.min(rho.dim() / 4))?;
    let pops = rho.populations();
    let m1: f64 = pops.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let m2: f64 = pops.iter().enumerate().map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p).sum();
    debug_assert!(mv.m.len() < 2 || (mv.m[1] - m1).abs() <= 1e-12 * m1.max(1.0));
    let d2 = m2 - m1 * m1;
    let q_normalized = (m1 > 1e-14).then(|| d2 / m1);
    Ok(Mandel { d2, q_normalized })
}

struct QuadratureMoments {
    a: C64,
    a2: C64,
    n: f64,
}

fn quadrature_moments(rho: &DensityMatrix, ops: &OperatorSet) -> Result<QuadratureMoments> {
    if ops.dim != rho.dim() {
        return Err(Error::DimMismatch(ops.dim, rho.dim()));
    }
    Ok(QuadratureMoments {
        a: rho.expect(&ops.a),
        a2: rho.expect(&(&ops.a * &ops.a)),
        n: rho.expect(&ops.number()).re,
    })
}

/// `S(phi) = <:(a e^{i phi} + a^+ e^{-i phi})^2:> - <a e^{i phi} + a^+ e^{-i phi}>^2`.
pub fn squeezing_degree(rho: &DensityMatrix, ops: &OperatorSet, phi: f64) -> Result<f64> {
    let m = quadrature_moments(rho, ops)?;
    let e2 = C64::from_polar(1.0, 2.0 * phi);
    Ok(2.0 * (e2 * (m.a2 - m.a * m.a)).re + 2.0 * (m.n - m.a.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingMin {
    pub value: f64,
    pub phi: f64,
}

/// Exact minimum over `phi`: `S` is `2 Re(e^{2i phi} c) + const`.
pub fn squeezing_min(rho: &DensityMatrix, ops: &OperatorSet) -> Result<SqueezingMin> {
    let m = quadrature_moments(rho, ops)?;
    let c = m.a2 - m.a * m.a;
    let value = 2.0 * (m.n - m.a.norm_sqr()) - 2.0 * c.norm();
    let phi = (0.5 * (PI - c.arg())).rem_euclid(PI);
    Ok(SqueezingMin { value, phi })
}

/// Minimum of `S` over `steps` equally spaced angles in `[0, pi)`.
pub fn squeezing_scan(rho: &DensityMatrix, ops: &OperatorSet, steps: usize) -> Result<SqueezingMin> {
    let mut best = SqueezingMin { value: f64::INFINITY, phi: 0.0 };
    for k in 0..steps {
        let phi = PI * k as f64 / steps as f64;
        let value = squeezing_degree(rho, ops, phi)?;
        if value < best.value {
            best = SqueezingMin { value, phi };
        }
    }
    Ok(best)
}

fn qfi_weights(decomp: &SpectralDecomposition) -> DMatrix<f64> {
    let p = &decomp.probs;
    DMatrix::from_fn(p.len(), p.len(), |i, j| {
        let s = p[i] + p[j];
        if s > QFI_PAIR_FLOOR {
            2.0 * (p[i] - p[j]).powi(2) / s
        } else {
            0.0
        }
    })
}

fn in_eigenbasis(decomp: &SpectralDecomposition, a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if a.nrows() != decomp.dim() || a.ncols() != decomp.dim() {
        return Err(Error::DimMismatch(a.nrows(), decomp.dim()));
    }
    Ok(decomp.vectors.adjoint() * a * &decomp.vectors)
}

/// `F(rho, A) = 2 sum (p_i - p_j)^2/(p_i + p_j) |<i|A|j>|^2`.
pub fn qfi(decomp: &SpectralDecomposition, a: &DMatrix<C64>) -> Result<f64> {
    let dev = max_abs(&(a - a.adjoint()));
    if dev > 1e-12 * max_abs(a).max(1.0) {
        return Err(Error::Validation(format!("observable is not Hermitian (deviation {dev:.3e})")));
    }
    let b = in_eigenbasis(decomp, a)?;
    let w = qfi_weights(decomp);
    Ok(w.iter().zip(b.iter()).map(|(w, z)| w * z.norm_sqr()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub f_q: f64,
    pub f_p: f64,
    /// Cross term: `F(Q_theta) = F_Q cos^2 + F_P sin^2 + 2 F_QP sin cos`.
    pub f_qp: f64,
    /// `(1/4) max_theta F(Q_theta)`.
    pub m_qfi: f64,
    /// Maximizing angle in `[0, pi)`.
    pub theta_star: f64,
}

impl QfiResult {
    pub fn f_theta(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.f_q * c * c + self.f_p * s * s + 2.0 * self.f_qp * s * c
    }

    /// `(theta, F)` at `steps` equally spaced angles in `[0, pi)`.
    pub fn samples(&self, steps: usize) -> Vec<(f64, f64)> {
        (0..steps)
            .map(|k| {
                let t = PI * k as f64 / steps as f64;
                (t, self.f_theta(t))
            })
            .collect()
    }

    pub fn witness_flag(&self) -> bool {
        self.m_qfi > 0.5 + FLAG_TOL
    }
}

pub fn m_qfi(decomp: &SpectralDecomposition, ops: &OperatorSet) -> Result<QfiResult> {
    let q = in_eigenbasis(decomp, &ops.q)?;
    let p = in_eigenbasis(decomp, &ops.p)?;
    let w = qfi_weights(decomp);
    let (mut f_q, mut f_p, mut f_qp) = (0.0, 0.0, 0.0);
    for ((w, a), b) in w.iter().zip(q.iter()).zip(p.iter()) {
        if *w == 0.0 {
            continue;
        }
        f_q += w * a.norm_sqr();
        f_p += w * b.norm_sqr();
        f_qp += w * (a.conj() * b).re;
    }
    let mean = 0.5 * (f_q + f_p);
    let half_gap = 0.5 * (f_q - f_p);
    let top = mean + half_gap.hypot(f_qp);
    let theta_star = (0.5 * (2.0 * f_qp).atan2(f_q - f_p)).rem_euclid(PI);
    Ok(QfiResult { f_q, f_p, f_qp, m_qfi: 0.25 * top, theta_star })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// Highest moment determinant order.
    pub n_max: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { n_max: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFlags {
    pub so: bool,
    pub d_n: bool,
    pub mandel: bool,
    pub squeezing: bool,
    pub m_qfi: bool,
}

impl WitnessFlags {
    pub fn any(&self) -> bool {
        self.so || self.d_n || self.mandel || self.squeezing || self.m_qfi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub so: OrderingSensitivityResult,
    /// Largest pairwise disagreement between the commutator, K-matrix and
    /// characteristic-function routes.
    pub so_route_agreement: f64,
    pub bounds: NonclassicalityBounds,
    pub d_n: Vec<f64>,
    pub mandel: Mandel,
    pub squeezing: SqueezingMin,
    pub qfi: QfiResult,
    pub purity: f64,
    pub flags: WitnessFlags,
}

pub fn build_report(rho: &DensityMatrix, ops: &OperatorSet, config: &WitnessConfig) -> Result<WitnessReport> {
    let decomp = spectral(rho);
    let so = ordsens::so_commutator(rho, ops)?;
    let routes = [so.so, ordsens::so_kmatrix(&decomp, ops)?.so, ordsens::so_charfn(rho)?.so];
    let so_route_agreement = routes
        .iter()
        .flat_map(|a| routes.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    let n_max = config.n_max.min(rho.dim() / 8 + 1).max(1);
    let mv = moments(rho, ops, 2 * n_max - 2)?;
    let d_n = moment_determinants(&mv, n_max)?;
    let d_n_negative = d_n
        .iter()
        .enumerate()
        .any(|(i, d)| *d < -NEG_TOL * determinant_scale(&mv, i + 1).max(1.0));
    let mandel = mandel(rho, ops)?;
    let mean_n = rho.expect(&ops.number()).re;
    let squeezing = squeezing_min(rho, ops)?;
    let qfi = m_qfi(&decomp, ops)?;
    let flags = WitnessFlags {
        so: so.witness_flag,
        d_n: d_n_negative,
        mandel: mandel.d2 < -NEG_TOL * mean_n.max(1.0),
        squeezing: squeezing.value < -NEG_TOL * mean_n.max(1.0),
        m_qfi: qfi.witness_flag(),
    };
    Ok(WitnessReport {
        so,
        so_route_agreement,
        bounds: ordsens::nonclassicality_bounds(&so),
        d_n,
        mandel,
        squeezing,
        qfi,
        purity: crate::fock::purity(rho),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rho_nm(n: usize, m: usize) -> DensityMatrix {
        let levels: Vec<usize> = (n + 1..=n + m).collect();
        fock_mixture(&levels, n + m + 12).unwrap()
    }

    #[test]
    fn moment_examples() {
        let dim = 60;
        let ops = build_ladder(dim).unwrap();
        let alpha = C64::new(0.8, -0.6);
        let coh = coherent_state(alpha, dim).unwrap().to_density();
        let mv = moments(&coh, &ops, 6).unwrap();
        for (l, m) in mv.m.iter().enumerate() {
            assert_abs_diff_eq!(*m, alpha.norm_sqr().powi(l as i32), epsilon = 1e-12);
        }
        let f = fock_state(4, dim).unwrap().to_density();
        let mv = moments(&f, &ops, 6).unwrap();
        assert_eq!(mv.m, vec![1.0, 4.0, 12.0, 24.0, 24.0, 0.0, 0.0]);
        let a0 = C64::new(1.1, 0.7);
        let cat = cat_state(a0, 3, 2, dim).unwrap().to_density();
        let mv = moments(&cat, &ops, 6).unwrap();
        for (l, m) in mv.m.iter().enumerate() {
            let want = cat_gtilde(a0, 3, 2 - l as i64) / cat_gtilde(a0, 3, 2) * a0.norm_sqr().powi(l as i32);
            assert!((m - want).abs() < 1e-12 * want.max(1.0));
        }
        assert!(matches!(moments(&f, &ops, 16), Err(Error::MomentOrder { .. })));
    }

    #[test]
    fn moments_match_operator_traces() {
        let dim = 24;
        let ops = build_ladder(dim).unwrap();
        let rho = squeezed_state(c(0.3), C64::new(0.2, 0.1), dim).unwrap().to_density();
        let mv = moments(&rho, &ops, 4).unwrap();
        let mut op = DMatrix::identity(dim, dim);
        for l in 1..=4 {
            op = &ops.a_dag * &op * &ops.a;
            assert_abs_diff_eq!(rho.expect(&op).re, mv.m[l], epsilon = 1e-12);
            op = DMatrix::identity(dim, dim);
            for _ in 0..l {
                op = &ops.a_dag * &op;
            }
            for _ in 0..l {
                op = &op * &ops.a;
            }
        }
    }

    #[test]
    fn determinant_examples() {
        let ops = build_ladder(40).unwrap();
        let coh = coherent_state(c(1.0), 40).unwrap().to_density();
        let d = moment_determinants(&moments(&coh, &ops, 4).unwrap(), 2).unwrap();
        assert_eq!(d[0], 1.0);
        assert_abs_diff_eq!(d[1], 0.0, epsilon = 1e-12);
        let ops = build_ladder(120).unwrap();
        let th = thermal_state(1.0, 120).unwrap();
        let d = moment_determinants(&moments(&th, &ops, 4).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(d[1], 1.0, epsilon = 1e-10);
        let mv = MomentVector { m: vec![1.0, 2.0] };
        assert!(matches!(moment_determinants(&mv, 2), Err(Error::InsufficientMoments { .. })));
    }

    #[test]
    fn cat_determinant_routes_agree() {
        let a0 = c(2.0);
        let dim = 80;
        let ops = build_ladder(dim).unwrap();
        let rho = cat_state(a0, 2, 1, dim).unwrap().to_density();
        let d = moment_determinants(&moments(&rho, &ops, 2).unwrap(), 2).unwrap();
        let g = |q| cat_gtilde(a0, 2, q);
        let want = a0.norm_sqr().powi(2) * (g(1) * g(-1) - g(0) * g(0)) / (g(1) * g(1));
        assert_abs_diff_eq!(cat_dn_closed(a0, 2, 1, 2).unwrap(), want, epsilon = 1e-12);
        assert!((d[1] - want).abs() < 1e-10 * want.abs());

        let rho = cat_state(c(1.0), 2, 0, 40).unwrap().to_density();
        let ops = build_ladder(40).unwrap();
        let d = moment_determinants(&moments(&rho, &ops, 2).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(d[1], cat_dn_closed(c(1.0), 2, 0, 2).unwrap(), epsilon = 1e-10);
        assert_eq!(cat_dn_closed(c(1.0), 2, 0, 3).unwrap(), 0.0);
    }

    #[test]
    fn cat_bound_holds() {
        for &a in &[1.5, 2.0, 2.5] {
            for n_comp in 2..=4 {
                for q in 0..n_comp as i64 {
                    for n in 1..=n_comp {
                        let d = cat_dn_closed(c(a), n_comp, q, n).unwrap();
                        let b = cat_dn_bound(c(a), n_comp, q, n).unwrap();
                        assert!(d.abs() <= b * (1.0 + 1e-12), "a={a} N={n_comp} q={q} n={n}: {d} > {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn mandel_examples() {
        let ops = build_ladder(40).unwrap();
        let coh = coherent_state(C64::new(1.0, 0.5), 40).unwrap().to_density();
        let m = mandel(&coh, &ops).unwrap();
        assert_abs_diff_eq!(m.d2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.q().unwrap(), 0.0, epsilon = 1e-12);
        let r = rho_nm(0, 10);
        let ops = build_ladder(r.dim()).unwrap();
        let m = mandel(&r, &ops).unwrap();
        let want = (10.0 * 4.0 / 12.0 - 7.0 / 12.0) / 5.5;
        assert_abs_diff_eq!(m.q().unwrap(), want, epsilon = 1e-10);
        assert_abs_diff_eq!(want, 0.5, epsilon = 1e-12);
        let f3 = fock_state(3, 20).unwrap().to_density();
        let ops = build_ladder(20).unwrap();
        assert_abs_diff_eq!(mandel(&f3, &ops).unwrap().d2, -3.0, epsilon = 1e-12);
        let vac = fock_state(0, 20).unwrap().to_density();
        let m = mandel(&vac, &ops).unwrap();
        assert_eq!(m.d2, 0.0);
        assert!(matches!(m.q(), Err(Error::Undefined(_))));
    }

    #[test]
    fn squeezing_examples() {
        let dim = 60;
        let ops = build_ladder(dim).unwrap();
        let coh = coherent_state(C64::new(-0.9, 1.2), dim).unwrap().to_density();
        for phi in [0.0, 0.7, 2.0] {
            assert_abs_diff_eq!(squeezing_degree(&coh, &ops, phi).unwrap(), 0.0, epsilon = 1e-10);
        }
        let even = cat_state(c(1.5), 2, 0, dim).unwrap().to_density();
        let odd = cat_state(c(1.5), 2, 1, dim).unwrap().to_density();
        let se = squeezing_min(&even, &ops).unwrap();
        assert!(se.value < 0.0);
        let scan = squeezing_scan(&even, &ops, 720).unwrap();
        assert!(scan.value >= se.value - 1e-12 && scan.value - se.value < 1e-4);
        assert_abs_diff_eq!(squeezing_degree(&even, &ops, se.phi).unwrap(), se.value, epsilon = 1e-12);
        assert!(squeezing_min(&odd, &ops).unwrap().value > 0.0);
        // closed form for two components
        let g = |q| cat_gtilde(c(1.5), 2, q);
        for phi in [0.0f64, 0.4, 1.3] {
            let want = 2.0 * 2.25 * ((2.0 * phi).cos() + g(-1) / g(0));
            assert_abs_diff_eq!(squeezing_degree(&even, &ops, phi).unwrap(), want, epsilon = 1e-10);
        }
        for q in 0..3 {
            let cat = cat_state(C64::new(1.2, 0.4), 3, q, dim).unwrap().to_density();
            let a0 = C64::new(1.2, 0.4);
            let want = 2.0 * cat_gtilde(a0, 3, q - 1) / cat_gtilde(a0, 3, q) * a0.norm_sqr();
            for phi in [0.0, 1.0, 2.5] {
                assert_abs_diff_eq!(squeezing_degree(&cat, &ops, phi).unwrap(), want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn qfi_examples() {
        let dim = 60;
        let ops = build_ladder(dim).unwrap();
        let coh = coherent_state(C64::new(0.5, 0.5), dim).unwrap().to_density();
        assert_abs_diff_eq!(qfi(&spectral(&coh), &ops.q).unwrap(), 2.0, epsilon = 1e-10);
        let th = thermal_state(1.0, 120).unwrap();
        let ops120 = build_ladder(120).unwrap();
        let dth = spectral(&th);
        assert_abs_diff_eq!(qfi(&dth, &ops120.q).unwrap(), 2.0 / 3.0, epsilon = 1e-10);
        let r = m_qfi(&dth, &ops120).unwrap();
        assert_abs_diff_eq!(r.m_qfi, 1.0 / 6.0, epsilon = 1e-10);
        for (_, f) in r.samples(16) {
            assert_abs_diff_eq!(f, 2.0 / 3.0, epsilon = 1e-10);
        }
        let bad = &ops.a * c(1.0);
        assert!(matches!(qfi(&spectral(&coh), &bad), Err(Error::Validation(_))));
    }

    #[test]
    fn qfi_benchmark_families() {
        let r = rho_nm(0, 10);
        let ops = build_ladder(r.dim()).unwrap();
        assert_abs_diff_eq!(m_qfi(&spectral(&r), &ops).unwrap().m_qfi, 0.6, epsilon = 1e-10);
        for k in [10usize, 40] {
            let mstar = 0.3;
            let eps = mstar / k as f64;
            let mut probs = vec![0.0; k + 12];
            probs[0] = 1.0 - eps;
            probs[k] = eps;
            let rho = DensityMatrix::from_populations(&probs).unwrap();
            let ops = build_ladder(rho.dim()).unwrap();
            assert_abs_diff_eq!(m_qfi(&spectral(&rho), &ops).unwrap().m_qfi, 0.5 + mstar, epsilon = 1e-10);
        }
    }

    #[test]
    fn squeezed_thermal_qfi_axis() {
        let (nbar, r, phi) = (0.5, 0.4, 0.8);
        let z = C64::from_polar(r, phi);
        let dim = squeezed_thermal_auto_dim(nbar, z).unwrap();
        let rho = squeezed_thermal_state(nbar, z, dim).unwrap();
        let ops = build_ladder(dim).unwrap();
        let res = m_qfi(&spectral(&rho), &ops).unwrap();
        assert_abs_diff_eq!(res.m_qfi, (2.0 * r).exp() / (2.0 * (2.0 * nbar + 1.0)), epsilon = 1e-8);
        let want = (0.5 * (phi + PI)).rem_euclid(PI);
        let diff = (res.theta_star - want).rem_euclid(PI);
        assert!(diff.min(PI - diff) < 1e-6, "theta* {} vs {}", res.theta_star, want);
    }

    #[test]
    fn maximizer_beats_scan() {
        let dim = 40;
        let ops = build_ladder(dim).unwrap();
        let a = squeezed_state(c(0.4), C64::new(0.3, 0.5), dim).unwrap();
        let b = cat_state(c(1.0), 2, 0, dim).unwrap();
        let rho = mix(&[a.into(), b.into()], &[0.6, 0.4]).unwrap();
        let d = spectral(&rho);
        let res = m_qfi(&d, &ops).unwrap();
        for k in 0..64 {
            let t = PI * k as f64 / 64.0;
            let direct = qfi(&d, &ops.quadrature(t)).unwrap();
            assert_abs_diff_eq!(res.f_theta(t), direct, epsilon = 1e-9);
            assert!(res.m_qfi >= direct / 4.0 - 1e-12);
        }
    }

    #[test]
    fn report_examples() {
        let th = thermal_state(1.0, 120).unwrap();
        let ops = build_ladder(120).unwrap();
        let rep = build_report(&th, &ops, &WitnessConfig::default()).unwrap();
        assert!(!rep.flags.any());
        assert_abs_diff_eq!(rep.so.so, 1.0 / 3.0, epsilon = 1e-8);
        assert!(rep.so_route_agreement < 1e-8);

        let dim = truncated_thermal_auto_dim(0.6).unwrap();
        let tts = truncated_thermal_state(0.6, dim).unwrap();
        let ops = build_ladder(dim).unwrap();
        let rep = build_report(&tts, &ops, &WitnessConfig::default()).unwrap();
        assert!(rep.flags.so);
        assert!(!rep.flags.m_qfi);
        assert!(!rep.flags.mandel);
        assert!(rep.d_n[1] > 0.0);
        // third order sees the missing vacuum
        assert!(rep.d_n[2] < 0.0 && rep.flags.d_n);

        let z = c(0.6);
        let dim = squeezed_thermal_auto_dim(1.0, z).unwrap();
        let st = squeezed_thermal_state(1.0, z, dim).unwrap();
        let ops = build_ladder(dim).unwrap();
        let rep = build_report(&st, &ops, &WitnessConfig::default()).unwrap();
        assert!(rep.flags.m_qfi);
        assert!(!rep.flags.so);
        assert_abs_diff_eq!(rep.so.so, (1.2f64).cosh() / 3.0, epsilon = 1e-8);
    }
}

