use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("invalid input `{field}`: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    NonConvergence { achieved: f64, requested: f64 },

    #[error("scalar optimizer did not converge after {iterations} iterations")]
    OptimizerFailed { iterations: usize },

    #[error("amplitude model `{model}` cannot provide {needed}")]
    UnsupportedModel {
        model: &'static str,
        needed: &'static str,
    },

    #[error("unsupported unit conversion {from} -> {to}")]
    UnsupportedConversion { from: String, to: String },

    #[error(
        "N_sc*k*|f| = {product:.3e} is outside the linear superposition regime (limit 0.1); \
         pass an explicit override to proceed"
    )]
    SuperpositionBreakdown { product: f64 },
}

impl ScatterError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ScatterError::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerical failure rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            ScatterError::NonConvergence { .. } | ScatterError::OptimizerFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;

/// Non-fatal notes attached to a result when an approximation is stretched.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// k·|f| above the first-order threshold.
    FirstOrderValidity { k_times_f: f64, threshold: f64 },
    /// Probability outside [-eps, 1 + eps].
    ProbabilityOutOfRange { value: f64, budget: f64 },
    /// |δ_max·T| above the small-detuning expansion threshold.
    DetuningExpansion { delta_t: f64, threshold: f64 },
    /// k·d below the stationary-phase regime of the shadow integral.
    ShortPacket { k_times_d: f64, minimum: f64 },
    /// Fewer than one expected scattering event per interrogation.
    SubUnitEventCount { n_sc: f64 },
    /// |δ/Ω| above the small-detuning expansion of the Rabi line.
    RabiDetuning { ratio: f64, threshold: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::FirstOrderValidity {
                k_times_f,
                threshold,
            } => write!(
                f,
                "k|f| = {k_times_f:.3e} exceeds first-order threshold {threshold}"
            ),
            Warning::ProbabilityOutOfRange { value, budget } => write!(
                f,
                "probability {value:.6e} outside [-{budget:.3e}, 1+{budget:.3e}]"
            ),
            Warning::DetuningExpansion { delta_t, threshold } => write!(
                f,
                "|delta_max*T| = {delta_t:.3e} exceeds expansion threshold {threshold}"
            ),
            Warning::ShortPacket { k_times_d, minimum } => write!(
                f,
                "k*d = {k_times_d:.3e} below stationary-phase regime (>= {minimum})"
            ),
            Warning::SubUnitEventCount { n_sc } => write!(
                f,
                "expected event count N_sc = {n_sc:.3e} < 1; limit is an average-rate bound"
            ),
            Warning::RabiDetuning { ratio, threshold } => write!(
                f,
                "|delta/Omega| = {ratio:.3e} exceeds expansion threshold {threshold}"
            ),
        }
    }
}
