//! Thermal bath modelled as a beam splitter mixing the mode with a thermal
//! ancilla, and the transport identities it induces for `S_o`.
//!
//! The splitter `U = exp(theta (a^+ b - a b^+))`, `lambda = cos^2 theta`,
//! conserves the total photon number, so it is block diagonal over sectors
//! `N = n_a + n_b` with real orthogonal blocks `B^(N)`. Tracing out the
//! ancilla gives Kraus operators `<m|K_{jk}|n> = B^(n+j)_{m,n}`,
//! `m = n + j - k`, for ancilla input `j` and output `k`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{geometric_probs, suffix_tails, thermal_auto_dim, DensityMatrix, TAIL_TOL};
use crate::ordsens::{self, OrderingSensitivityResult, Route};
use crate::quasiprob::{char_fn, entropy_derivative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// Transmissivity in `(0, 1]`.
    pub lambda: f64,
    /// Bath mean photon number.
    pub nbar: f64,
}

impl BathParams {
    pub fn new(lambda: f64, nbar: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Validation(format!("lambda = {lambda} must lie in (0, 1]")));
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::Validation(format!("bath nbar = {nbar} must be >= 0")));
        }
        Ok(BathParams { lambda, nbar })
    }

    /// `1 - (1 + 2 (1 - lambda) nbar) / lambda`.
    pub fn sbar(&self) -> f64 {
        1.0 - (1.0 + 2.0 * (1.0 - self.lambda) * self.nbar) / self.lambda
    }

    /// Smallest ancilla cutoff whose thermal tail is below 1e-10.
    pub fn ancilla_dim(&self) -> usize {
        let probs = geometric_probs(self.nbar / (self.nbar + 1.0));
        let tails = suffix_tails(&probs);
        tails.iter().position(|t| *t < TAIL_TOL).unwrap_or(probs.len()).max(1)
    }
}

/// `B^(N)` for `N = 0..=n_max`: the splitter on each total-photon sector in
/// the basis `|m, N - m>`.
fn sector_blocks(theta: f64, n_max: usize) -> Vec<DMatrix<f64>> {
    (0..=n_max)
        .map(|n| {
            let mut g = DMatrix::<f64>::zeros(n + 1, n + 1);
            for m in 0..n {
                let w = theta * (((m + 1) * (n - m)) as f64).sqrt();
                g[(m + 1, m)] = w;
                g[(m, m + 1)] = -w;
            }
            g.exp()
        })
        .collect()
}

/// Output of the bath channel on `out_dim` levels.
pub fn apply_bath_to(rho: &DensityMatrix, p: &BathParams, anc_dim: usize, out_dim: usize) -> Result<DensityMatrix> {
    let probs = geometric_probs(p.nbar / (p.nbar + 1.0));
    let tails = suffix_tails(&probs);
    let anc_tail = tails.get(anc_dim).copied().unwrap_or(0.0);
    if anc_tail >= TAIL_TOL {
        return Err(Error::Truncation {
            what: "thermal ancilla".into(),
            dim: anc_dim,
            tail: anc_tail,
            suggested: p.ancilla_dim(),
        });
    }
    if p.lambda == 1.0 {
        return rho.padded(out_dim.max(rho.dim()));
    }
    let dim = rho.dim();
    let anc: Vec<f64> = (0..anc_dim).map(|j| probs.get(j).copied().unwrap_or(0.0)).collect();
    let theta = p.lambda.sqrt().acos();
    let blocks = sector_blocks(theta, dim + anc_dim);
    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    let input = rho.matrix();
    let mut col = vec![0.0; dim];
    for (j, pj) in anc.iter().enumerate() {
        if *pj == 0.0 {
            continue;
        }
        for k in 0..dim + j {
            // K_{jk}|n> = B^(n+j)_{n+j-k, n} |n+j-k>
            let mut any = false;
            for (n, c) in col.iter_mut().enumerate() {
                *c = if n + j >= k { blocks[n + j][(n + j - k, n)] } else { 0.0 };
                any |= *c != 0.0;
            }
            if !any {
                continue;
            }
            for n in 0..dim {
                if n + j < k || n + j - k >= out_dim || col[n] == 0.0 {
                    continue;
                }
                let m = n + j - k;
                for n2 in 0..dim {
                    if n2 + j < k || n2 + j - k >= out_dim {
                        continue;
                    }
                    out[(m, n2 + j - k)] += input[(n, n2)] * (pj * col[n] * col[n2]);
                }
            }
        }
    }
    let deficit = 1.0 - out.trace().re;
    if deficit > TAIL_TOL {
        return Err(Error::Truncation {
            what: "channel output".into(),
            dim: out_dim,
            tail: deficit,
            suggested: output_dim(rho, p),
        });
    }
    DensityMatrix::new(out)
}

/// Output cutoff covering the input support plus the bath's added photons.
pub fn output_dim(rho: &DensityMatrix, p: &BathParams) -> usize {
    let added = thermal_auto_dim((1.0 - p.lambda) * p.nbar).unwrap_or(16);
    rho.dim() + added
}

/// Applies the bath with a thermal ancilla of `anc_dim` levels, keeping the
/// input cutoff. Fails if the output leaks past it.
pub fn apply_bath(rho: &DensityMatrix, p: &BathParams, anc_dim: usize) -> Result<DensityMatrix> {
    apply_bath_to(rho, p, anc_dim, rho.dim())
}

/// Applies the bath with automatically sized ancilla and output spaces.
pub fn apply_bath_auto(rho: &DensityMatrix, p: &BathParams) -> Result<DensityMatrix> {
    apply_bath_to(rho, p, p.ancilla_dim(), output_dim(rho, p))
}

/// `chi_s` of the output: `chi_1,out(xi) = chi_1,in(sqrt(lambda) xi) e^{-(1-lambda) nbar |xi|^2}`.
pub fn char_out(rho: &DensityMatrix, p: &BathParams, xi: C64, s: f64) -> C64 {
    let u = xi.norm_sqr();
    let chi1_in = char_fn(rho, xi * p.lambda.sqrt()) * (0.5 * p.lambda * u).exp();
    let chi1_out = chi1_in * (-(1.0 - p.lambda) * p.nbar * u).exp();
    chi1_out * (0.5 * (s - 1.0) * u).exp()
}

/// `S_o(rho_out) = -H'(sbar, rho_in) / lambda`.
pub fn so_out_identity(rho: &DensityMatrix, p: &BathParams) -> Result<f64> {
    Ok(-entropy_derivative(rho, p.sbar())? / p.lambda)
}

/// `S_o` of the explicit channel output by the commutator route.
pub fn so_out_explicit(rho: &DensityMatrix, p: &BathParams) -> Result<OrderingSensitivityResult> {
    let out = apply_bath_auto(rho, p)?;
    let ops = crate::fock::build_ladder(out.dim())?;
    ordsens::so_commutator(&out, &ops)
}

/// `lim_{lambda -> 1} S_o(rho_out) = -H'(-2 ebar, rho)`.
pub fn weak_coupling_limit(rho: &DensityMatrix, ebar: f64) -> Result<f64> {
    if !(ebar >= 0.0) {
        return Err(Error::Validation(format!("ebar = {ebar} must be >= 0")));
    }
    Ok(-entropy_derivative(rho, -2.0 * ebar)?)
}

/// One row of a channel sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub nbar: f64,
    pub so_in: f64,
    pub so_out: f64,
    /// Contraction bound `so_in / lambda`.
    pub bound: f64,
    /// Commutator route on the explicit output state.
    pub so_out_oracle: f64,
}

pub fn sweep_row(rho: &DensityMatrix, so_in: f64, p: &BathParams) -> Result<SweepRow> {
    let so_out = so_out_identity(rho, p)?;
    let oracle = so_out_explicit(rho, p)?;
    debug_assert_eq!(oracle.route, Route::Commutator);
    Ok(SweepRow {
        lambda: p.lambda,
        nbar: p.nbar,
        so_in,
        so_out,
        bound: so_in / p.lambda,
        so_out_oracle: oracle.so,
    })
}
