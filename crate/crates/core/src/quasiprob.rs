//! Characteristic functions, s-ordered quasiprobabilities on phase-space
//! grids, and the s-ordered (Renyi-2) entropy `H(s) = -ln(pi ||W_s||^2)`.
//!
//! Pointwise values come from closed-form Fock matrix elements:
//! `W_0(alpha) = (2/pi) Tr[rho D(2 alpha) Pi]` (displaced parity) and
//! `chi_0(xi) = Tr[rho D(xi)]`. Both split into angular Fourier modes whose
//! radial coefficients depend on `|alpha|` only, so grids are evaluated one
//! radius at a time.
//!
//! The entropy and its derivative are integrals of `e^{s|xi|^2} |chi_0|^2`.
//! After the angular integral the radial integrand is `e^{-(1-s)u}` times a
//! polynomial in `u = |xi|^2` of degree below `2 dim`, which a Gauss-Laguerre
//! rule with `dim + 2` nodes integrates exactly.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::displacement::{laguerre_functions, ln_factorials, radial_modes, real_fourier_sum};
use crate::error::{Error, Result};
use crate::fock::DensityMatrix;

/// Closest approach to `s = 1` accepted by the entropy routines.
pub const S_MARGIN: f64 = 1e-6;

/// Square grid of cell centers `alpha = alpha1 + i alpha2` in `[-R, R]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub half_extent: f64,
    pub points: usize,
}

impl PhaseGrid {
    pub fn new(half_extent: f64, points: usize) -> Result<Self> {
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::Validation(format!("grid extent {half_extent} must be positive")));
        }
        if points < 4 || points % 2 != 0 {
            return Err(Error::Validation(format!("grid points {points} must be even and >= 4")));
        }
        Ok(PhaseGrid { half_extent, points })
    }

    /// Extent `2 sqrt(nbar + 1) + 4` with 256 points.
    pub fn default_for(nbar: f64) -> Self {
        PhaseGrid { half_extent: 2.0 * (nbar.max(0.0) + 1.0).sqrt() + 4.0, points: 256 }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index into row-major storage: `alpha1` selects the row.
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.points + i2
    }
}

/// Sampled `W_s` on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbGrid {
    pub s: f64,
    pub grid: PhaseGrid,
    /// Row-major, `values[grid.index(i1, i2)]`.
    pub values: Vec<f64>,
    /// Largest local wavenumber expected in the function, used to judge
    /// whether finite differences resolve it.
    pub wavenumber: f64,
}

impl QuasiProbGrid {
    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.index(i1, i2)]
    }

    /// `sum W h^2`.
    pub fn mass(&self) -> f64 {
        let h = self.grid.spacing();
        compensated_sum(self.values.iter().copied()) * h * h
    }

    /// `||W||^2` by midpoint quadrature.
    pub fn norm_sq(&self) -> f64 {
        let h = self.grid.spacing();
        compensated_sum(self.values.iter().map(|v| v * v)) * h * h
    }

    /// CSV with a `# s=.. R=.. n=..` header and `alpha1,alpha2,value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# s={} R={} n={}", fmt17(self.s), fmt17(self.grid.half_extent), self.grid.points)?;
        for i1 in 0..self.grid.points {
            let a1 = fmt17(self.grid.coord(i1));
            for i2 in 0..self.grid.points {
                writeln!(out, "{},{},{}", a1, fmt17(self.grid.coord(i2)), fmt17(self.at(i1, i2)))?;
            }
        }
        Ok(())
    }
}

/// Sampled `chi_s` on a grid over `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharGrid {
    pub s: f64,
    pub grid: PhaseGrid,
    pub values: Vec<C64>,
}

/// Seventeen significant digits, the round-trip precision of an `f64`.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return "nan".to_string();
    }
    format!("{:.16e}", x)
}

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in iter {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn chi_from_modes(modes: &[C64], phase: C64) -> C64 {
    let mut acc = modes[0];
    let mut p = phase;
    for (k, m) in modes.iter().enumerate().skip(1) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += p * m + p.conj() * m.conj() * sign;
        p *= phase;
    }
    acc
}

fn unit_phase(z: C64) -> C64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        C64::new(1.0, 0.0)
    }
}

/// `chi_0(xi) = Tr[rho D(xi)]`.
pub fn char_fn(rho: &DensityMatrix, xi: C64) -> C64 {
    let lnf = ln_factorials(rho.dim() + 1);
    let modes = radial_modes(rho.matrix(), xi.norm_sqr(), false, &lnf);
    chi_from_modes(&modes, unit_phase(xi))
}

/// Pointwise Wigner function via displaced parity.
pub fn wigner_at(rho: &DensityMatrix, alpha: C64) -> f64 {
    let lnf = ln_factorials(rho.dim() + 1);
    let modes = radial_modes(rho.matrix(), 4.0 * alpha.norm_sqr(), true, &lnf);
    2.0 / PI * real_fourier_sum(&modes, unit_phase(alpha))
}

/// Grid coordinates are odd multiples of `h/2`. Visits every pair of
/// positive odd offsets `a <= b` and the up-to-eight grid points sharing
/// that radius, in a fixed order.
fn octant_pairs(points: usize) -> Vec<(i64, i64)> {
    let half = points as i64 / 2;
    let mut pairs = Vec::with_capacity((half * (half + 1) / 2) as usize);
    for ia in 0..half {
        for ib in ia..half {
            pairs.push((2 * ia + 1, 2 * ib + 1));
        }
    }
    pairs
}

fn symmetric_images(a: i64, b: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(8);
    for &(x, y) in &[(a, b), (b, a)] {
        for &(sx, sy) in &[(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let p = (sx * x, sy * y);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn odd_to_index(o: i64, points: usize) -> usize {
    ((o + points as i64 - 1) / 2) as usize
}

/// Evaluates `f(modes, phase)` on every grid point, computing the radial
/// modes once per distinct `(a, b)` octant pair.
fn sweep_grid<T, F>(rho: &DensityMatrix, grid: &PhaseGrid, radial_scale: f64, parity: bool, eval: F) -> Vec<T>
where
    T: Copy + Default + Send,
    F: Fn(&[C64], C64, f64) -> T + Sync,
{
    let lnf = ln_factorials(rho.dim() + 1);
    let h = grid.spacing();
    let pairs = octant_pairs(grid.points);
    let blocks: Vec<Vec<(usize, T)>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let r2 = 0.25 * h * h * ((a * a + b * b) as f64);
            let modes = radial_modes(rho.matrix(), radial_scale * r2, parity, &lnf);
            symmetric_images(a, b)
                .into_iter()
                .map(|(x, y)| {
                    let z = C64::new(x as f64, y as f64);
                    let idx = grid.index(odd_to_index(x, grid.points), odd_to_index(y, grid.points));
                    (idx, eval(&modes, unit_phase(z), r2))
                })
                .collect()
        })
        .collect();
    let mut values = vec![T::default(); grid.len()];
    for block in blocks {
        for (idx, v) in block {
            values[idx] = v;
        }
    }
    values
}

/// Highest occupied Fock level (population above 1e-12).
fn top_level(rho: &DensityMatrix) -> usize {
    rho.populations().iter().rposition(|p| *p > 1e-12).unwrap_or(0)
}

fn wavenumber_for(rho: &DensityMatrix) -> f64 {
    4.0 * (top_level(rho) as f64 + 1.0).sqrt()
}

pub fn char_grid(rho: &DensityMatrix, s: f64, grid: &PhaseGrid) -> CharGrid {
    let values = sweep_grid(rho, grid, 1.0, false, |modes, phase, r2| {
        chi_from_modes(modes, phase) * (0.5 * s * r2).exp()
    });
    CharGrid { s, grid: *grid, values }
}

/// `W_0` on the grid; fails when the grid misses more than 1e-3 of the mass.
pub fn wigner_grid(rho: &DensityMatrix, grid: &PhaseGrid) -> Result<QuasiProbGrid> {
    let values = sweep_grid(rho, grid, 4.0, true, |modes, phase, _| 2.0 / PI * real_fourier_sum(modes, phase));
    let out = QuasiProbGrid { s: 0.0, grid: *grid, values, wavenumber: wavenumber_for(rho) };
    let mass = out.mass();
    if mass < 0.999 {
        return Err(Error::MassDeficit(mass));
    }
    Ok(out)
}

/// One-dimensional Gaussian taps `sqrt(2/(pi sigma)) e^{-2 x^2/sigma} h`.
fn heat_taps(sigma: f64, h: f64, max_offset: usize) -> Vec<f64> {
    let std = (sigma / 4.0).sqrt();
    let reach = ((9.0 * std / h).ceil() as usize).min(max_offset);
    let norm = (2.0 / (PI * sigma)).sqrt() * h;
    let mut taps: Vec<f64> = (0..=reach)
        .map(|j| {
            let x = j as f64 * h;
            norm * (-2.0 * x * x / sigma).exp()
        })
        .collect();
    if std < h {
        // kernel narrower than a cell: keep the discrete mass exact
        let total = taps[0] + 2.0 * taps[1..].iter().sum::<f64>();
        taps.iter_mut().for_each(|t| *t /= total);
    }
    taps
}

fn convolve_axis(values: &[f64], n: usize, taps: &[f64], along_rows: bool) -> Vec<f64> {
    let reach = taps.len() - 1;
    let lines: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|line| {
            let get = |i: usize| if along_rows { values[line * n + i] } else { values[i * n + line] };
            (0..n)
                .map(|i| {
                    let lo = i.saturating_sub(reach);
                    let hi = (i + reach).min(n - 1);
                    let mut acc = 0.0;
                    for j in lo..=hi {
                        acc += taps[i.abs_diff(j)] * get(j);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = vec![0.0; n * n];
    for (line, vals) in lines.into_iter().enumerate() {
        for (i, v) in vals.into_iter().enumerate() {
            if along_rows {
                out[line * n + i] = v;
            } else {
                out[i * n + line] = v;
            }
        }
    }
    out
}

/// Smooths a Wigner grid to `W_s`, `s < 0`, by the heat kernel solving
/// `d_s W = -(1/8) Laplacian W` backwards from `s = 0`.
pub fn smooth_to(w0: &QuasiProbGrid, s: f64) -> Result<QuasiProbGrid> {
    if s > 0.0 {
        return Err(Error::UnsupportedOrdering(s));
    }
    if w0.s != 0.0 {
        return Err(Error::Validation(format!("smoothing starts from s = 0, got s = {}", w0.s)));
    }
    if s == 0.0 {
        return Ok(w0.clone());
    }
    let n = w0.grid.points;
    let taps = heat_taps(-s, w0.grid.spacing(), n - 1);
    let rows = convolve_axis(&w0.values, n, &taps, true);
    let values = convolve_axis(&rows, n, &taps, false);
    Ok(QuasiProbGrid { s, grid: w0.grid, values, wavenumber: w0.wavenumber })
}

/// `W_s` for `s <= 0`.
pub fn ws_grid(rho: &DensityMatrix, s: f64, grid: &PhaseGrid) -> Result<QuasiProbGrid> {
    if s > 0.0 {
        return Err(Error::UnsupportedOrdering(s));
    }
    let w0 = wigner_grid(rho, grid)?;
    smooth_to(&w0, s)
}

/// Angular average of `W_0` at each radius `|alpha|`.
pub fn radial_profile(rho: &DensityMatrix, radii: &[f64]) -> Vec<f64> {
    let lnf = ln_factorials(rho.dim() + 1);
    radii
        .par_iter()
        .map(|r| 2.0 / PI * radial_modes(rho.matrix(), 4.0 * r * r, true, &lnf)[0].re)
        .collect()
}

// ---------------------------------------------------------------------------
// entropy

/// Gauss-Laguerre nodes `t_i` and scaled weights `w_i e^{t_i}`.
pub(crate) fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = 2.0 * i as f64 + 1.0;
        if i + 1 < n {
            jacobi[(i, i + 1)] = i as f64 + 1.0;
            jacobi[(i + 1, i)] = i as f64 + 1.0;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut buf = vec![0.0; n + 2];
    let nf = n as f64;
    let weights = nodes
        .iter_mut()
        .map(|t| {
            // polish the root of l_n and evaluate l_{n+1} there
            for _ in 0..3 {
                laguerre_functions(0, *t, 0.0, &mut buf);
                let deriv = nf * (buf[n] - buf[n - 1]) / *t - 0.5 * buf[n];
                if deriv != 0.0 {
                    *t -= buf[n] / deriv;
                }
            }
            laguerre_functions(0, *t, 0.0, &mut buf);
            *t / ((nf + 1.0).powi(2) * buf[n + 1] * buf[n + 1])
        })
        .collect();
    (nodes, weights)
}

/// `(int e^{s u} F du, int u e^{s u} F du)` with `F` the angle-integrated
/// `|chi_0|^2 / pi`.
fn chi_moments(rho: &DensityMatrix, s: f64) -> Result<(f64, f64)> {
    if !(s <= 1.0 - S_MARGIN) || !s.is_finite() {
        return Err(Error::Divergence(s));
    }
    let n = rho.dim() + 2;
    let (nodes, weights) = gauss_laguerre(n);
    let lnf = ln_factorials(rho.dim() + 1);
    let scale = 1.0 - s;
    let terms: Vec<(f64, f64)> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(t, w)| {
            let u = t / scale;
            let modes = radial_modes(rho.matrix(), u, false, &lnf);
            let f: f64 = modes[0].norm_sqr() + 2.0 * modes[1..].iter().map(|m| m.norm_sqr()).sum::<f64>();
            let g = w * (s * u).exp() * f / scale;
            (g, g * u)
        })
        .collect();
    let i0 = compensated_sum(terms.iter().map(|t| t.0));
    let i1 = compensated_sum(terms.iter().map(|t| t.1));
    if !(i0 > 0.0) || !i0.is_finite() || !i1.is_finite() {
        return Err(Error::Divergence(s));
    }
    Ok((i0, i1))
}

/// `H(s, rho) = -ln(pi ||W_s||^2)`.
pub fn entropy(rho: &DensityMatrix, s: f64) -> Result<f64> {
    Ok(-chi_moments(rho, s)?.0.ln())
}

/// `H'(s, rho)`, always `<= 0`.
pub fn entropy_derivative(rho: &DensityMatrix, s: f64) -> Result<f64> {
    let (i0, i1) = chi_moments(rho, s)?;
    Ok(-i1 / i0)
}

// ---------------------------------------------------------------------------
// gradient route

#[derive(Debug, Clone, PartialEq)]
pub struct GradRatio {
    /// `(1/4) ||grad W||^2 / ||W||^2`.
    pub value: f64,
    /// `||grad W||^2`.
    pub grad_norm_sq: f64,
    pub norm_sq: f64,
    /// Set when the spacing exceeds `pi / (4 k)` for the expected wavenumber `k`.
    pub warning: Option<String>,
}

/// Eighth-order central weights for offsets 1..=4.
const D1_W8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn derivative_1d(f: &dyn Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    if i >= 4 && i + 4 < n {
        D1_W8.iter().enumerate().map(|(k, w)| w * (f(i + k + 1) - f(i - k - 1))).sum::<f64>() / h
    } else if i >= 2 && i + 2 < n {
        (-f(i + 2) + 8.0 * f(i + 1) - 8.0 * f(i - 1) + f(i - 2)) / (12.0 * h)
    } else if i == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else {
        (f(i + 1) - f(i - 1)) / (2.0 * h)
    }
}

/// Squared gradient `|grad W|^2` at every cell, with the boundary mask.
pub fn gradient_sq(w: &QuasiProbGrid) -> (Vec<f64>, Vec<bool>) {
    let n = w.grid.points;
    let h = w.grid.spacing();
    let rows: Vec<Vec<(f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|i1| {
            (0..n)
                .map(|i2| {
                    let d1 = derivative_1d(&|k| w.at(k, i2), i1, n, h);
                    let d2 = derivative_1d(&|k| w.at(i1, k), i2, n, h);
                    let edge = i1 < 4 || i2 < 4 || i1 + 4 >= n || i2 + 4 >= n;
                    let keep = !edge || w.at(i1, i2).abs() >= 1e-12;
                    (d1 * d1 + d2 * d2, keep)
                })
                .collect()
        })
        .collect();
    let mut g = Vec::with_capacity(n * n);
    let mut mask = Vec::with_capacity(n * n);
    for row in rows {
        for (v, k) in row {
            g.push(v);
            mask.push(k);
        }
    }
    (g, mask)
}

/// Grid estimate of `S_o` for an `s = 0` grid.
pub fn grad_ratio(w: &QuasiProbGrid) -> Result<GradRatio> {
    if w.s != 0.0 {
        return Err(Error::Validation(format!("gradient ratio needs the Wigner grid, got s = {}", w.s)));
    }
    let h = w.grid.spacing();
    let (g, mask) = gradient_sq(w);
    let grad_norm_sq = compensated_sum(g.iter().zip(&mask).filter(|(_, k)| **k).map(|(v, _)| *v)) * h * h;
    let norm_sq = compensated_sum(w.values.iter().zip(&mask).filter(|(_, k)| **k).map(|(v, _)| v * v)) * h * h;
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroPurity(norm_sq));
    }
    let limit = PI / (4.0 * w.wavenumber);
    let warning = (h > limit).then(|| format!("grid spacing {h:.4} exceeds resolution limit {limit:.4}"));
    Ok(GradRatio { value: 0.25 * grad_norm_sq / norm_sq, grad_norm_sq, norm_sq, warning })
}

/// Maximum-norm residual of `d_s W + (1/8) Laplacian W` at `s`, using
/// central differences of width `delta` in `s` and a fourth-order Laplacian.
pub fn diffusion_residual(w0: &QuasiProbGrid, s: f64, delta: f64) -> Result<f64> {
    let plus = smooth_to(w0, s + delta)?;
    let minus = smooth_to(w0, s - delta)?;
    let mid = smooth_to(w0, s)?;
    let n = w0.grid.points;
    let h = w0.grid.spacing();
    let second = |f: &dyn Fn(usize) -> f64, i: usize| {
        (-f(i + 2) + 16.0 * f(i + 1) - 30.0 * f(i) + 16.0 * f(i - 1) - f(i - 2)) / (12.0 * h * h)
    };
    let mut worst: f64 = 0.0;
    for i1 in 2..n - 2 {
        for i2 in 2..n - 2 {
            let ds = (plus.at(i1, i2) - minus.at(i1, i2)) / (2.0 * delta);
            let lap = second(&|k| mid.at(k, i2), i1) + second(&|k| mid.at(i1, k), i2);
            worst = worst.max((ds + lap / 8.0).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn gauss_laguerre_is_exact_for_polynomials() {
        let n = 12;
        let (t, w) = gauss_laguerre(n);
        let mut fact = 1.0;
        for k in 0..2 * n {
            if k > 0 {
                fact *= k as f64;
            }
            let approx: f64 = t.iter().zip(&w).map(|(t, w)| w * (-t).exp() * t.powi(k as i32)).sum();
            assert!((approx / fact - 1.0).abs() < 1e-11, "k={k}: {approx} vs {fact}");
        }
    }

    #[test]
    fn char_fn_examples() {
        let th = thermal_state(1.0, 80).unwrap();
        assert!((char_fn(&th, c(0.0)) - c(1.0)).norm() < 1e-12);
        let vac = fock_state(0, 10).unwrap().to_density();
        assert_abs_diff_eq!(char_fn(&vac, c(1.0)).re, (-0.5f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(char_fn(&th, c(1.0)).re, (-1.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn char_fn_matches_matrix_trace() {
        let dim = 40;
        let a = coherent_state(C64::new(0.4, 0.8), dim).unwrap();
        let b = cat_state(c(1.2), 3, 1, dim).unwrap();
        let rho = mix(&[a.into(), b.into()], &[0.3, 0.7]).unwrap();
        for xi in [C64::new(0.3, -0.2), C64::new(-1.1, 0.5), C64::new(0.0, 2.0)] {
            let d = crate::displacement::displacement_matrix(xi, dim);
            let want = rho.expect(&d);
            assert!((char_fn(&rho, xi) - want).norm() < 1e-12);
            // chi(-xi) = chi(xi)^*
            assert!((char_fn(&rho, -xi) - want.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn char_grid_symmetries() {
        let rho = cat_state(c(1.0), 2, 1, 20).unwrap().to_density();
        let grid = PhaseGrid::new(3.0, 16).unwrap();
        let cg = char_grid(&rho, -0.5, &grid);
        let n = grid.points;
        for i in 0..n {
            for j in 0..n {
                let v = cg.values[grid.index(i, j)];
                let m = cg.values[grid.index(n - 1 - i, n - 1 - j)];
                assert!((v - m.conj()).norm() < 1e-9);
            }
        }
        let tiny = PhaseGrid::new(1e-6, 4).unwrap();
        let cg = char_grid(&rho, -0.5, &tiny);
        assert!((cg.values[0] - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn wigner_examples() {
        let vac = fock_state(0, 10).unwrap().to_density();
        assert_abs_diff_eq!(wigner_at(&vac, c(0.0)), 2.0 / PI, epsilon = 1e-14);
        let one = fock_state(1, 10).unwrap().to_density();
        assert_abs_diff_eq!(wigner_at(&one, c(0.0)), -2.0 / PI, epsilon = 1e-14);
        let grid = PhaseGrid::new(6.0, 128).unwrap();
        let w = wigner_grid(&vac, &grid).unwrap();
        assert_abs_diff_eq!(PI * w.norm_sq(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(w.mass(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn wigner_of_displaced_state() {
        let alpha = C64::new(0.7, -0.4);
        let rho = coherent_state(alpha, 30).unwrap().to_density();
        for z in [c(0.0), C64::new(0.5, 0.1), C64::new(-0.3, 0.9)] {
            let want = 2.0 / PI * (-2.0 * (z - alpha).norm_sqr()).exp();
            assert_abs_diff_eq!(wigner_at(&rho, z), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let rho = cat_state(C64::new(1.0, 0.5), 3, 0, 30).unwrap().to_density();
        let grid = PhaseGrid::new(5.0, 20).unwrap();
        let w = wigner_grid(&rho, &grid).unwrap();
        for (i1, i2) in [(0, 0), (3, 17), (10, 9), (19, 2)] {
            let z = C64::new(grid.coord(i1), grid.coord(i2));
            assert_abs_diff_eq!(w.at(i1, i2), wigner_at(&rho, z), epsilon = 1e-13);
        }
    }

    #[test]
    fn mass_deficit_detected() {
        let rho = coherent_state(c(3.0), 40).unwrap().to_density();
        let grid = PhaseGrid::new(2.0, 32).unwrap();
        assert!(matches!(wigner_grid(&rho, &grid), Err(Error::MassDeficit(_))));
    }

    #[test]
    fn husimi_examples() {
        let grid = PhaseGrid::new(6.0, 256).unwrap();
        let vac = fock_state(0, 10).unwrap().to_density();
        let q = ws_grid(&vac, -1.0, &grid).unwrap();
        // cell centers straddle the origin; compare against the exact value there
        let z = grid.coord(128);
        assert_abs_diff_eq!(q.at(128, 128), (-2.0 * z * z).exp() / PI, epsilon = 1e-5);
        assert_abs_diff_eq!(q.mass(), 1.0, epsilon = 1e-6);

        let th = thermal_state(1.0, 80).unwrap();
        let grid = PhaseGrid::default_for(1.0);
        let q = ws_grid(&th, -1.0, &grid).unwrap();
        let z = grid.coord(128);
        assert_abs_diff_eq!(q.at(128, 128), (-z * z).exp() / (2.0 * PI), epsilon = 1e-5);
        assert_abs_diff_eq!(q.mass(), 1.0, epsilon = 1e-5);
        assert!(matches!(ws_grid(&th, 0.5, &grid), Err(Error::UnsupportedOrdering(_))));
        let w0 = ws_grid(&th, 0.0, &grid).unwrap();
        assert_eq!(w0, wigner_grid(&th, &grid).unwrap());
    }

    #[test]
    fn entropy_examples() {
        let coh = coherent_state(C64::new(1.0, 1.0), 40).unwrap().to_density();
        assert_abs_diff_eq!(entropy(&coh, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        let th = thermal_state(1.0, 80).unwrap();
        assert_abs_diff_eq!(entropy(&th, 0.0).unwrap(), 3f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(entropy(&th, -1.0).unwrap(), 4f64.ln(), epsilon = 1e-10);
        assert!(matches!(entropy(&th, 1.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn entropy_derivative_examples() {
        let coh = coherent_state(C64::new(-0.8, 1.1), 40).unwrap().to_density();
        assert_abs_diff_eq!(entropy_derivative(&coh, -0.5).unwrap(), -2.0 / 3.0, epsilon = 1e-10);
        let th = thermal_state(1.0, 80).unwrap();
        assert_abs_diff_eq!(entropy_derivative(&th, -1.0).unwrap(), -0.25, epsilon = 1e-10);
        let one = fock_state(1, 10).unwrap().to_density();
        assert_abs_diff_eq!(entropy_derivative(&one, 0.0).unwrap(), -3.0, epsilon = 1e-10);
    }

    #[test]
    fn entropy_derivative_matches_finite_difference() {
        let rho = cat_state(c(1.5), 2, 0, 40).unwrap().to_density();
        for s in [-1.5, -0.7, 0.0, 0.4] {
            let d = 1e-5;
            let fd = (entropy(&rho, s + d).unwrap() - entropy(&rho, s - d).unwrap()) / (2.0 * d);
            assert_abs_diff_eq!(entropy_derivative(&rho, s).unwrap(), fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn grad_ratio_examples() {
        let vac = fock_state(0, 10).unwrap().to_density();
        let w = wigner_grid(&vac, &PhaseGrid::new(6.0, 256).unwrap()).unwrap();
        let g = grad_ratio(&w).unwrap();
        assert_abs_diff_eq!(g.value, 1.0, epsilon = 1e-3);
        assert!(g.warning.is_none());

        let three = fock_state(3, 10).unwrap().to_density();
        let w = wigner_grid(&three, &PhaseGrid::new(8.0, 512).unwrap()).unwrap();
        assert_abs_diff_eq!(grad_ratio(&w).unwrap().value, 7.0, epsilon = 1e-2);

        let coarse = wigner_grid(&three, &PhaseGrid::new(8.0, 32).unwrap()).unwrap();
        assert!(grad_ratio(&coarse).unwrap().warning.is_some());
    }

    #[test]
    fn csv_header_and_rows() {
        let vac = fock_state(0, 4).unwrap().to_density();
        let w = wigner_grid(&vac, &PhaseGrid::new(5.0, 4).unwrap());
        // 4 points cannot capture the mass, build a tiny grid by hand instead
        assert!(w.is_err());
        let grid = PhaseGrid::new(6.0, 64).unwrap();
        let w = wigner_grid(&vac, &grid).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# s=0 R=6.0000000000000000e0 n=64");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[0].parse::<f64>().unwrap(), grid.coord(0));
        assert_eq!(text.lines().count(), 1 + 64 * 64);
    }
}
