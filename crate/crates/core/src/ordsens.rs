//! Ordering sensitivity `S_o`, the commutator inner product it derives from,
//! and the nonclassicality bounds it induces.
//!
//! `S_o(rho) = <rho~, rho~>` with `rho~ = rho / sqrt(Tr rho^2)` and
//!
//! ```text
//! <A, B> = 1/2 Tr([A^+, Q][Q, B] + [A^+, P][P, B]).
//! ```
//!
//! Classical states satisfy `S_o <= 1`, so `S_o > 1` witnesses
//! nonclassicality and `max(0, sqrt(S_o) - 1) <= N(rho) <= sqrt(S_o)` bounds the
//! distance to the classical set.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{purity, DensityMatrix, OperatorSet, SpectralDecomposition, StateVector};
use crate::quasiprob;

/// `S_o` above `1 + FLAG_TOL` raises the witness flag.
pub const FLAG_TOL: f64 = 1e-9;
/// Eigenvalues below this are dropped from the K-matrix.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Commutator,
    Kmatrix,
    Charfn,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingSensitivityResult {
    pub so: f64,
    /// `sqrt(so)`, the norm of the purity-normalized state.
    pub norm: f64,
    pub route: Route,
    pub witness_flag: bool,
}

impl OrderingSensitivityResult {
    pub fn new(so: f64, route: Route) -> Self {
        let so = so.max(0.0);
        OrderingSensitivityResult { so, norm: so.sqrt(), route, witness_flag: so > 1.0 + FLAG_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonclassicalityBounds {
    pub lower: f64,
    pub upper: f64,
}

impl NonclassicalityBounds {
    /// The upper bound is a usable point estimate once the relative gap
    /// between the bounds drops below a third.
    pub fn estimate(&self) -> Option<f64> {
        (self.upper > 3.0).then_some(self.upper)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    pub entries: DMatrix<f64>,
    /// Normalized weights `p / sqrt(sum p^2)` of the kept eigenvectors.
    pub weights: Vec<f64>,
}

impl KMatrix {
    pub fn size(&self) -> usize {
        self.weights.len()
    }

    /// `p~^T K p~`.
    pub fn quadratic_form(&self) -> f64 {
        let m = self.size();
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += self.weights[i] * self.entries[(i, j)] * self.weights[j];
            }
        }
        acc
    }
}

fn commutator(x: &DMatrix<C64>, y: &DMatrix<C64>) -> DMatrix<C64> {
    x * y - y * x
}

/// `Tr(X Y)` without forming the product.
fn trace_product(x: &DMatrix<C64>, y: &DMatrix<C64>) -> C64 {
    let n = x.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

/// Commutator inner product, linear in `b` and anti-linear in `a`.
pub fn hs_inner(a: &DMatrix<C64>, b: &DMatrix<C64>, ops: &OperatorSet) -> Result<C64> {
    for m in [a, b] {
        if m.nrows() != ops.dim || m.ncols() != ops.dim {
            return Err(Error::DimMismatch(m.nrows(), ops.dim));
        }
    }
    let ad = a.adjoint();
    let tq = trace_product(&commutator(&ad, &ops.q), &commutator(&ops.q, b));
    let tp = trace_product(&commutator(&ad, &ops.p), &commutator(&ops.p, b));
    Ok((tq + tp) * 0.5)
}

/// `|||A||| = sqrt(<A, A>)`.
pub fn hs_norm(a: &DMatrix<C64>, ops: &OperatorSet) -> Result<f64> {
    Ok(hs_inner(a, a, ops)?.re.max(0.0).sqrt())
}

/// `|||rho~ - sigma~|||`, the distance between two purity-normalized states.
pub fn normalized_distance(rho: &DensityMatrix, sigma: &DensityMatrix, ops: &OperatorSet) -> Result<f64> {
    let a = rho.matrix() / C64::new(purity(rho).sqrt(), 0.0);
    let b = sigma.matrix() / C64::new(purity(sigma).sqrt(), 0.0);
    hs_norm(&(a - b), ops)
}

fn check_dims(rho: &DensityMatrix, ops: &OperatorSet) -> Result<()> {
    if rho.dim() != ops.dim {
        return Err(Error::DimMismatch(rho.dim(), ops.dim));
    }
    Ok(())
}

pub fn so_commutator(rho: &DensityMatrix, ops: &OperatorSet) -> Result<OrderingSensitivityResult> {
    check_dims(rho, ops)?;
    rho.check_edge("ordering sensitivity")?;
    let pur = purity(rho);
    if !(pur > 1e-14) {
        return Err(Error::ZeroPurity(pur));
    }
    let m = rho.matrix();
    let cq = commutator(&ops.q, m);
    let cp = commutator(&ops.p, m);
    let num = -0.5 * (trace_product(&cq, &cq) + trace_product(&cp, &cp)).re;
    Ok(OrderingSensitivityResult::new(num / pur, Route::Commutator))
}

/// `2(<a^+ a> - |<a>|^2) + 1` for a pure state.
pub fn so_pure(state: &StateVector, ops: &OperatorSet) -> Result<OrderingSensitivityResult> {
    if state.dim() != ops.dim {
        return Err(Error::DimMismatch(state.dim(), ops.dim));
    }
    let a = state.expect(&ops.a);
    let amps = state.amplitudes();
    // <a^+ a> = |a psi|^2
    let n = (&ops.a * amps).norm_squared();
    Ok(OrderingSensitivityResult::new(2.0 * (n - a.norm_sqr()) + 1.0, Route::Commutator))
}

/// K-matrix over the eigenvectors with weight above [`EIGEN_FLOOR`].
pub fn kmatrix(decomp: &SpectralDecomposition, ops: &OperatorSet) -> Result<KMatrix> {
    if decomp.dim() != ops.dim {
        return Err(Error::DimMismatch(decomp.dim(), ops.dim));
    }
    let kept: Vec<usize> = (0..decomp.probs.len()).filter(|&i| decomp.probs[i] > EIGEN_FLOOR).collect();
    if kept.is_empty() {
        return Err(Error::ZeroPurity(0.0));
    }
    let mut v = DMatrix::<C64>::zeros(decomp.dim(), kept.len());
    for (col, &i) in kept.iter().enumerate() {
        v.set_column(col, &decomp.vectors.column(i));
    }
    let gram = v.adjoint() * &v;
    let ortho_dev = (&gram - DMatrix::<C64>::identity(kept.len(), kept.len()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if ortho_dev > 1e-8 {
        return Err(Error::Validation(format!("eigenvectors not orthonormal (deviation {ortho_dev:.3e})")));
    }
    let qv = &ops.q * &v;
    let pv = &ops.p * &v;
    let qm = v.adjoint() * &qv;
    let pm = v.adjoint() * &pv;
    let m = kept.len();
    let mut k = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let var_q = qv.column(i).norm_squared() - qm[(i, i)].re.powi(2);
        let var_p = pv.column(i).norm_squared() - pm[(i, i)].re.powi(2);
        k[(i, i)] = var_q + var_p;
        for j in 0..i {
            let off = -(qm[(i, j)].norm_sqr() + pm[(i, j)].norm_sqr());
            k[(i, j)] = off;
            k[(j, i)] = off;
        }
    }
    let probs: Vec<f64> = kept.iter().map(|&i| decomp.probs[i]).collect();
    let norm = probs.iter().map(|p| p * p).sum::<f64>().sqrt();
    Ok(KMatrix { entries: k, weights: probs.iter().map(|p| p / norm).collect() })
}

pub fn so_kmatrix(decomp: &SpectralDecomposition, ops: &OperatorSet) -> Result<OrderingSensitivityResult> {
    let k = kmatrix(decomp, ops)?;
    Ok(OrderingSensitivityResult::new(k.quadratic_form(), Route::Kmatrix))
}

/// `S_o = -H'(0)` from characteristic-function quadrature.
pub fn so_charfn(rho: &DensityMatrix) -> Result<OrderingSensitivityResult> {
    let h = quasiprob::entropy_derivative(rho, 0.0)?;
    Ok(OrderingSensitivityResult::new(-h, Route::Charfn))
}

pub fn nonclassicality_bounds(result: &OrderingSensitivityResult) -> NonclassicalityBounds {
    let upper = result.so.max(0.0).sqrt();
    NonclassicalityBounds { lower: (upper - 1.0).max(0.0), upper }
}

/// One sample of the classical-state bound `0 <= -(1-s) H'(s) <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub s: f64,
    pub value: f64,
}

impl BoundSample {
    /// Values above `1 + 1e-6` certify nonclassicality at this `s`.
    pub fn violates(&self) -> bool {
        self.value > 1.0 + 1e-6
    }
}

pub fn classical_bound_check(rho: &DensityMatrix, s_samples: &[f64]) -> Result<Vec<BoundSample>> {
    s_samples
        .iter()
        .map(|&s| {
            if s > 0.0 {
                return Err(Error::UnsupportedOrdering(s));
            }
            let hp = quasiprob::entropy_derivative(rho, s)?;
            Ok(BoundSample { s, value: -(1.0 - s) * hp })
        })
        .collect()
}
