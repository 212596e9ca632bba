//! Closed-form Fock matrix elements of the displacement operator.
//!
//! Everything here is built on the normalized associated Laguerre functions
//!
//! ```text
//! l_n^(k)(u) = sqrt(n!/(n+k)!) u^(k/2) e^(-u/2) L_n^(k)(u)
//! ```
//!
//! which are the moduli of `<n+k|D(xi)|n>` at `u = |xi|^2`. They are bounded
//! by one and obey a forward three-term recurrence in `n` that stays well
//! scaled, so no factorials are ever formed explicitly.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// `ln(k!)` for `k < len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..len {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Fills `out[n] = l_n^(k)(u)` for `n < out.len()`.
pub(crate) fn laguerre_functions(k: usize, u: f64, ln_fact_k: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let kf = k as f64;
    let l0 = if u == 0.0 {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (0.5 * (kf * u.ln() - u - ln_fact_k)).exp()
    };
    out[0] = l0;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.0 + kf - u) * l0 / (kf + 1.0).sqrt();
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + 1.0 + kf - u) * out[n] - (nf * (nf + kf)).sqrt() * out[n - 1])
            / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
    }
}

/// Matrix of `D(xi) = exp(xi a^+ - xi^* a)` restricted to `dim` levels.
///
/// Each entry is the exact infinite-dimensional matrix element, so the
/// truncated matrix is not unitary but `D * v` is exact for any `v` supported
/// on the first `dim` levels, up to the mass it pushes past the cutoff.
pub fn displacement_matrix(xi: C64, dim: usize) -> DMatrix<C64> {
    let u = xi.norm_sqr();
    let phase = if u > 0.0 { xi / xi.norm() } else { C64::new(1.0, 0.0) };
    let lnf = ln_factorials(dim + 1);
    let mut out = DMatrix::zeros(dim, dim);
    let mut buf = vec![0.0; dim];
    for k in 0..dim {
        let len = dim - k;
        laguerre_functions(k, u, lnf[k], &mut buf[..len]);
        let pk = phase.powu(k as u32);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..len {
            // <n+k|D|n> and <n|D|n+k>
            out[(n + k, n)] = pk * buf[n];
            if k > 0 {
                out[(n, n + k)] = pk.conj() * (sign * buf[n]);
            }
        }
    }
    out
}

/// Angular Fourier modes of `Tr[rho D(xi)]`-type sums at fixed `u = |xi|^2`.
///
/// Returns `A_k = sum_n w_n rho[n, n+k] l_n^(k)(u)` for `k = 0..dim`, where
/// `w_n = (-1)^n` when `parity` is set and `1` otherwise.
pub(crate) fn radial_modes(rho: &DMatrix<C64>, u: f64, parity: bool, lnf: &[f64]) -> Vec<C64> {
    let dim = rho.nrows();
    let mut modes = vec![C64::new(0.0, 0.0); dim];
    let mut buf = vec![0.0; dim];
    for (k, mode) in modes.iter_mut().enumerate() {
        let len = dim - k;
        laguerre_functions(k, u, lnf[k], &mut buf[..len]);
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..len {
            let w = if parity && n % 2 == 1 { -buf[n] } else { buf[n] };
            acc += rho[(n, n + k)] * w;
        }
        *mode = acc;
    }
    modes
}

/// Sums `A_0 + 2 Re sum_{k>=1} e^{ik phi} A_k` given `e^{i phi}`.
pub(crate) fn real_fourier_sum(modes: &[C64], phase: C64) -> f64 {
    let mut acc = modes[0].re;
    let mut p = phase;
    for m in &modes[1..] {
        acc += 2.0 * (p * m).re;
        p *= phase;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    // direct power-series evaluation of L_n^(k), fine for small arguments
    fn laguerre_series(n: usize, k: usize, u: f64) -> f64 {
        (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * fact(n + k) / (fact(n - j) * fact(k + j) * fact(j)) * u.powi(j as i32)
            })
            .sum()
    }

    #[test]
    fn recurrence_matches_series() {
        let lnf = ln_factorials(20);
        for &u in &[0.0, 0.3, 1.7, 4.0] {
            for k in 0..5 {
                let mut buf = vec![0.0; 8];
                laguerre_functions(k, u, lnf[k], &mut buf);
                for (n, v) in buf.iter().enumerate() {
                    let want = (fact(n) / fact(n + k)).sqrt()
                        * u.powf(k as f64 / 2.0)
                        * (-u / 2.0).exp()
                        * laguerre_series(n, k, u);
                    assert!((v - want).abs() < 1e-12, "n={n} k={k} u={u}: {v} vs {want}");
                }
            }
        }
    }

    #[test]
    fn vacuum_column_is_coherent() {
        let alpha = C64::new(0.7, -1.1);
        let d = displacement_matrix(alpha, 30);
        for n in 0..30 {
            let want = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32) / fact(n).sqrt();
            assert!((d[(n, 0)] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn large_cutoff_is_nearly_unitary() {
        let d = displacement_matrix(C64::new(1.2, 0.4), 120);
        // low columns keep all their weight inside the cutoff
        let block = d.columns(0, 10).adjoint() * d.columns(0, 10);
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((block[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_is_adjoint_on_low_block() {
        let xi = C64::new(-0.5, 0.9);
        let dp = displacement_matrix(xi, 100);
        let dm = displacement_matrix(-xi, 100);
        for i in 0..15 {
            for j in 0..15 {
                assert!((dm[(i, j)] - dp[(j, i)].conj()).norm() < 1e-13);
            }
        }
    }
}
