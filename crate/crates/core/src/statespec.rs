//! JSON state specifications.
//!
//! ```json
//! {"kind": "cat", "alpha0": 2.0, "N": 2, "q": 0, "dim": 60}
//! ```
//!
//! Complex parameters are either a number or a `[re, im]` pair. `dim` is
//! optional everywhere except for `raw`; without it the cutoff is chosen
//! from the state's photon-number tail.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(&self) -> C64 {
        match *self {
            ComplexInput::Real(x) => C64::new(x, 0.0),
            ComplexInput::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl Default for ComplexInput {
    fn default() -> Self {
        ComplexInput::Real(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Coherent {
        alpha: ComplexInput,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Fock {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    /// `D(alpha) S(r e^{i phi}) |0>`.
    Squeezed {
        #[serde(default)]
        alpha: ComplexInput,
        r: f64,
        #[serde(default)]
        phi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Cat {
        alpha0: ComplexInput,
        #[serde(rename = "N")]
        n_comp: usize,
        q: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Thermal {
        nbar: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    /// Thermal distribution with the vacuum removed.
    TruncatedThermal {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    SqueezedThermal {
        nbar: f64,
        r: f64,
        #[serde(default)]
        phi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Mixture {
        components: Vec<Component>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    /// Row-major `dim x dim` matrix of `[re, im]` entries.
    Raw { dim: usize, matrix: Vec<[f64; 2]> },
}

/// Chosen cutoff and whether it came from auto-sizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimChoice {
    pub dim: usize,
    pub auto: bool,
}

impl StateSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn explicit_dim(&self) -> Option<usize> {
        match self {
            StateSpec::Coherent { dim, .. }
            | StateSpec::Fock { dim, .. }
            | StateSpec::Squeezed { dim, .. }
            | StateSpec::Cat { dim, .. }
            | StateSpec::Thermal { dim, .. }
            | StateSpec::TruncatedThermal { dim, .. }
            | StateSpec::SqueezedThermal { dim, .. }
            | StateSpec::Mixture { dim, .. } => *dim,
            StateSpec::Raw { dim, .. } => Some(*dim),
        }
    }

    /// Cutoff chosen from the photon-number tail.
    pub fn auto_dim(&self) -> Result<usize> {
        Ok(match self {
            StateSpec::Coherent { alpha, .. } => coherent_auto_dim(alpha.value()),
            StateSpec::Fock { n, .. } => fock_auto_dim(*n),
            StateSpec::Squeezed { alpha, r, phi, .. } => squeezed_auto_dim(alpha.value(), C64::from_polar(*r, *phi))?,
            StateSpec::Cat { alpha0, n_comp, q, .. } => cat_auto_dim(alpha0.value(), *n_comp, *q)?,
            StateSpec::Thermal { nbar, .. } => thermal_auto_dim(*nbar)?,
            StateSpec::TruncatedThermal { beta, .. } => truncated_thermal_auto_dim(*beta)?,
            StateSpec::SqueezedThermal { nbar, r, phi, .. } => {
                squeezed_thermal_auto_dim(*nbar, C64::from_polar(*r, *phi))?
            }
            StateSpec::Mixture { components, .. } => {
                let mut best = MIN_AUTO_DIM;
                for c in components {
                    best = best.max(c.state.explicit_dim().map_or_else(|| c.state.auto_dim(), Ok)?);
                }
                best
            }
            StateSpec::Raw { dim, .. } => *dim,
        })
    }

    /// Resolves the cutoff: the override wins, then the spec's own `dim`,
    /// then auto-sizing.
    pub fn choose_dim(&self, override_dim: Option<usize>) -> Result<DimChoice> {
        if let Some(d) = override_dim {
            return Ok(DimChoice { dim: d, auto: false });
        }
        if let Some(d) = self.explicit_dim() {
            return Ok(DimChoice { dim: d, auto: false });
        }
        Ok(DimChoice { dim: self.auto_dim()?, auto: true })
    }

    /// Builds the density matrix on `dim` levels.
    pub fn build_at(&self, dim: usize) -> Result<DensityMatrix> {
        match self {
            StateSpec::Coherent { alpha, .. } => Ok(coherent_state(alpha.value(), dim)?.to_density()),
            StateSpec::Fock { n, .. } => Ok(fock_state(*n, dim)?.to_density()),
            StateSpec::Squeezed { alpha, r, phi, .. } => {
                Ok(squeezed_state(alpha.value(), C64::from_polar(*r, *phi), dim)?.to_density())
            }
            StateSpec::Cat { alpha0, n_comp, q, .. } => Ok(cat_state(alpha0.value(), *n_comp, *q, dim)?.to_density()),
            StateSpec::Thermal { nbar, .. } => thermal_state(*nbar, dim),
            StateSpec::TruncatedThermal { beta, .. } => truncated_thermal_state(*beta, dim),
            StateSpec::SqueezedThermal { nbar, r, phi, .. } => {
                squeezed_thermal_state(*nbar, C64::from_polar(*r, *phi), dim)
            }
            StateSpec::Mixture { components, .. } => {
                if components.is_empty() {
                    return Err(Error::Weights("mixture has no components".into()));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Weights(format!("weights sum to {total}, expected 1 within 1e-9")));
                }
                let weights: Vec<f64> = components.iter().map(|c| c.weight / total).collect();
                let states = components
                    .iter()
                    .map(|c| c.state.build_at(dim).map(MixComponent::from))
                    .collect::<Result<Vec<_>>>()?;
                mix(&states, &weights)
            }
            StateSpec::Raw { dim: raw_dim, matrix } => {
                if matrix.len() != raw_dim * raw_dim {
                    return Err(Error::Validation(format!(
                        "raw matrix has {} entries, expected {}",
                        matrix.len(),
                        raw_dim * raw_dim
                    )));
                }
                let m = nalgebra::DMatrix::from_row_iterator(
                    *raw_dim,
                    *raw_dim,
                    matrix.iter().map(|[re, im]| C64::new(*re, *im)),
                );
                let rho = DensityMatrix::new(m)?;
                if dim < *raw_dim {
                    return Err(Error::Validation(format!("dim {dim} is below the raw matrix size {raw_dim}")));
                }
                rho.padded(dim)
            }
        }
    }

    pub fn build(&self, override_dim: Option<usize>) -> Result<(DensityMatrix, DimChoice)> {
        let choice = self.choose_dim(override_dim)?;
        Ok((self.build_at(choice.dim)?, choice))
    }

    /// Raw spec reproducing `rho` exactly.
    pub fn raw_from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let dim = rho.dim();
        let mut matrix = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                matrix.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        StateSpec::Raw { dim, matrix }
    }
}
