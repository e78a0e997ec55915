//! Scripted device studies built on the geometry, mode-solver and FDTD
//! layers: the emitter beta-factor, the adiabatic-taper sweep, the Bragg
//! mirror spectrum, the grating out-coupler partition, and the chained
//! efficiency budget that ties the pieces together.
//!
//! Every study takes a plain serializable config, runs deterministically
//! (no RNG anywhere in this module), and returns a plain-data result that
//! renders to CSV or JSON. Sweep points are independent jobs; they run
//! concurrently and are re-assembled by parameter key, so thread count
//! never changes a result.

mod views;

pub mod beta;
pub mod bragg;
pub mod grating;
pub mod taper;

pub use beta::{beta_factor, BetaConfig, BetaResult};
pub use bragg::{bragg_spectrum, BraggConfig, BraggSpectrum};
pub use grating::{grating_extraction, GratingConfig, GratingPartition};
pub use taper::{taper_cascade_estimate, taper_sweep, TaperSweepConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fdtd::FdtdError;
use crate::geometry::GeometryError;
use crate::modesolver::ModeSolverError;

/// Full-3D reference values quoted alongside the 2D results in summaries.
/// They are context for the reader, not acceptance bounds.
pub const BETA_3D_REFERENCE: f64 = 0.85;
pub const TAPER_3D_REFERENCE: f64 = 0.401;
pub const GRATING_UP_3D_REFERENCE: f64 = 0.267;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    ModeSolver(#[from] ModeSolverError),
    #[error(transparent)]
    Fdtd(#[from] FdtdError),
    /// The beam guides more than one even-symmetry lateral mode, so "the
    /// fundamental mode" is ambiguous for an on-axis emitter.
    #[error("beam guides {count} even lateral modes at the band center; narrow it until one remains")]
    MultimodeBeam { count: usize },
    #[error("no guided lateral mode: {0}")]
    NoGuidedMode(String),
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid study config: {0}")]
    Invalid(String),
}

/// One swept efficiency curve: strictly increasing parameter values with
/// an efficiency and a convergence flag per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: Vec<f64>,
    pub efficiency: Vec<f64>,
    pub converged: Vec<bool>,
}

impl SweepResult {
    pub fn new(
        parameter: Vec<f64>,
        efficiency: Vec<f64>,
        converged: Vec<bool>,
    ) -> Result<Self, ExperimentError> {
        if parameter.is_empty() {
            return Err(ExperimentError::Invalid("empty sweep".into()));
        }
        if parameter.len() != efficiency.len() || parameter.len() != converged.len() {
            return Err(ExperimentError::Invalid(
                "sweep columns have mismatched lengths".into(),
            ));
        }
        if !parameter.windows(2).all(|w| w[0] < w[1]) {
            return Err(ExperimentError::Invalid(
                "sweep parameter must be strictly increasing".into(),
            ));
        }
        for &e in &efficiency {
            if !(0.0..=1.0).contains(&e) {
                return Err(ExperimentError::OutOfRange {
                    name: "efficiency",
                    value: e,
                });
            }
        }
        Ok(Self {
            parameter,
            efficiency,
            converged,
        })
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Efficiency at the point whose parameter matches `value` to a part in
    /// 10^9, if the sweep contains one.
    pub fn efficiency_at(&self, value: f64) -> Option<f64> {
        let scale = value.abs().max(1e-300);
        self.parameter
            .iter()
            .position(|&p| (p - value).abs() <= 1e-9 * scale.max(p.abs()))
            .map(|k| self.efficiency[k])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,efficiency,converged\n");
        for k in 0..self.parameter.len() {
            out.push_str(&format!(
                "{:.15e},{:.15e},{}\n",
                self.parameter[k], self.efficiency[k], self.converged[k]
            ));
        }
        out
    }
}

/// The chained efficiency budget of the device. Only the four input
/// fractions are stored; every derived quantity is recomputed on call so
/// it can never go stale.
///
/// The association order is fixed: `total_on_chip = beta * taper`, then
/// `ideal_collection = total_on_chip * grating`, then
/// `first_lens_predicted = ideal_collection * setup`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBudget {
    /// Emitter-to-guided-mode fraction.
    pub beta: f64,
    /// Beam-to-strip transfer fraction.
    pub taper: f64,
    /// Strip-to-free-space upward fraction.
    pub grating: f64,
    /// Collection-optics and detection-chain fraction.
    pub setup: f64,
}

impl EfficiencyBudget {
    pub fn new(beta: f64, taper: f64, grating: f64, setup: f64) -> Result<Self, ExperimentError> {
        let check = |name: &'static str, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(value)
            } else {
                Err(ExperimentError::OutOfRange { name, value })
            }
        };
        Ok(Self {
            beta: check("beta", beta)?,
            taper: check("taper", taper)?,
            grating: check("grating", grating)?,
            setup: check("setup", setup)?,
        })
    }

    /// Fraction of emitted photons delivered into the strip.
    pub fn total_on_chip(&self) -> f64 {
        self.beta * self.taper
    }

    /// Fraction leaving the chip toward the collection optics.
    pub fn ideal_collection(&self) -> f64 {
        self.total_on_chip() * self.grating
    }

    /// Fraction predicted at the first lens once setup losses apply.
    pub fn first_lens_predicted(&self) -> f64 {
        self.ideal_collection() * self.setup
    }

    /// Measured first-lens fraction over the ideal collection fraction:
    /// below 1 means unexplained excess loss somewhere in the chain.
    pub fn excess_loss_ratio(&self, first_lens_measured: f64) -> Result<f64, ExperimentError> {
        if !(0.0..=1.0).contains(&first_lens_measured) {
            return Err(ExperimentError::OutOfRange {
                name: "first_lens_measured",
                value: first_lens_measured,
            });
        }
        let ideal = self.ideal_collection();
        if ideal <= 0.0 {
            return Err(ExperimentError::Invalid(
                "ideal collection is zero; excess-loss ratio undefined".into(),
            ));
        }
        Ok(first_lens_measured / ideal)
    }

    /// All inputs plus the derived chain, recomputed now.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "beta": self.beta,
            "taper": self.taper,
            "grating": self.grating,
            "setup": self.setup,
            "total_on_chip": self.total_on_chip(),
            "ideal_collection": self.ideal_collection(),
            "first_lens_predicted": self.first_lens_predicted(),
        })
    }
}

/// Validate the four fractions and assemble the budget.
pub fn efficiency_budget(
    beta: f64,
    taper: f64,
    grating: f64,
    setup: f64,
) -> Result<EfficiencyBudget, ExperimentError> {
    EfficiencyBudget::new(beta, taper, grating, setup)
}
