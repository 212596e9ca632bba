//! Analysis orchestration and the JSON report document.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::fock::{build_ladder, spectral, DensityMatrix};
use crate::ordsens::{classical_bound_check, BoundSample, NonclassicalityBounds};
use crate::quasiprob::PhaseGrid;
use crate::statespec::{DimChoice, StateSpec};
use crate::witnesses::{build_report, qfi, WitnessConfig, WitnessFlags};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Grid half extent; defaults to `2 sqrt(<n> + 1) + 4`.
    pub extent: Option<f64>,
    pub points: usize,
    pub dim: Option<usize>,
    /// Orders at which `-(1-s) H'(s) <= 1` is checked.
    pub s_samples: Vec<f64>,
    /// Highest moment determinant order.
    pub n_max: usize,
    /// Angles in the QFI cross-check scan.
    pub theta_scan: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            extent: None,
            points: 256,
            dim: None,
            s_samples: vec![-1.0, -0.5, 0.0],
            n_max: 3,
            theta_scan: 64,
        }
    }
}

impl AnalysisConfig {
    pub fn grid_for(&self, rho: &DensityMatrix) -> Result<PhaseGrid> {
        let mean: f64 = rho.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let default = PhaseGrid::default_for(mean);
        PhaseGrid::new(self.extent.unwrap_or(default.half_extent), self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub d2: f64,
    /// Null for the vacuum.
    pub q_mandel: Option<f64>,
    pub d_n: Vec<f64>,
    pub squeezing_min: f64,
    pub squeezing_phi: f64,
    pub m_qfi: f64,
    pub theta_star: f64,
    /// Quarter of the largest `F(Q_theta)` over the sampled angles.
    pub m_qfi_scan: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub dim_auto: bool,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub state: Value,
    pub dim: usize,
    pub purity: f64,
    pub so: f64,
    pub so_route_agreement: f64,
    pub nonclassicality_bounds: NonclassicalityBounds,
    /// `sqrt(so)`, present only when the bounds are tight enough to quote it.
    pub estimate: Option<f64>,
    pub bound_samples: Vec<BoundSample>,
    pub witnesses: WitnessSection,
    pub flags: WitnessFlags,
    pub provenance: Provenance,
}

impl Report {
    pub fn any_flag(&self) -> bool {
        self.flags.any()
    }
}

/// Builds the state and evaluates every witness on it.
pub fn analyze(spec: &StateSpec, config: &AnalysisConfig) -> Result<(Report, DensityMatrix)> {
    let (rho, choice) = spec.build(config.dim)?;
    let report = analyze_state(&rho, serde_json::to_value(spec).unwrap_or(Value::Null), choice, config)?;
    Ok((report, rho))
}

pub fn analyze_state(rho: &DensityMatrix, state: Value, choice: DimChoice, config: &AnalysisConfig) -> Result<Report> {
    let ops = build_ladder(rho.dim())?;
    let w = build_report(rho, &ops, &WitnessConfig { n_max: config.n_max })?;
    let bound_samples = classical_bound_check(rho, &config.s_samples)?;
    let decomp = spectral(rho);
    let steps = config.theta_scan.max(1);
    let mut scan_max: f64 = 0.0;
    for k in 0..steps {
        let t = std::f64::consts::PI * k as f64 / steps as f64;
        scan_max = scan_max.max(qfi(&decomp, &ops.quadrature(t))?);
    }
    Ok(Report {
        state,
        dim: rho.dim(),
        purity: w.purity,
        so: w.so.so,
        so_route_agreement: w.so_route_agreement,
        nonclassicality_bounds: w.bounds,
        estimate: w.bounds.estimate(),
        bound_samples,
        witnesses: WitnessSection {
            d2: w.mandel.d2,
            q_mandel: w.mandel.q_normalized,
            d_n: w.d_n,
            squeezing_min: w.squeezing.value,
            squeezing_phi: w.squeezing.phi,
            m_qfi: w.qfi.m_qfi,
            theta_star: w.qfi.theta_star,
            m_qfi_scan: 0.25 * scan_max,
        },
        flags: w.flags,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            dim_auto: choice.auto,
            config: config.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_three_report() {
        let spec = StateSpec::from_json(r#"{"kind":"fock","n":3}"#).unwrap();
        let (rep, _) = analyze(&spec, &AnalysisConfig::default()).unwrap();
        assert_abs_diff_eq!(rep.so, 7.0, epsilon = 1e-10);
        assert!(rep.flags.so && rep.any_flag());
        assert!(rep.provenance.dim_auto);
        assert!(rep.witnesses.m_qfi >= rep.witnesses.m_qfi_scan - 1e-12);
    }

    #[test]
    fn thermal_report_is_quiet() {
        let spec = StateSpec::from_json(r#"{"kind":"thermal","nbar":1}"#).unwrap();
        let (rep, _) = analyze(&spec, &AnalysisConfig::default()).unwrap();
        assert_abs_diff_eq!(rep.so, 1.0 / 3.0, epsilon = 1e-8);
        assert!(!rep.any_flag());
        let json = serde_json::to_value(&rep).unwrap();
        for key in [
            "state",
            "dim",
            "purity",
            "so",
            "so_route_agreement",
            "nonclassicality_bounds",
            "witnesses",
            "flags",
            "provenance",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        for key in ["d2", "q_mandel", "d_n", "squeezing_min", "m_qfi", "theta_star"] {
            assert!(json["witnesses"].get(key).is_some(), "missing witnesses.{key}");
        }
    }

    #[test]
    fn vacuum_has_null_mandel_q() {
        let spec = StateSpec::from_json(r#"{"kind":"fock","n":0}"#).unwrap();
        let (rep, _) = analyze(&spec, &AnalysisConfig::default()).unwrap();
        assert!(rep.witnesses.q_mandel.is_none());
        assert!(!rep.any_flag());
    }
}
