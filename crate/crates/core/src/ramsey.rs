//! Ramsey interrogation (two ideal π/2 pulses, free evolution T) with one
//! scattering event between the pulses.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Result, ScatterError, Warning};
use crate::optimize::bisect_root;
use crate::scattering::{forward_overlap_f12, AmplitudeModel, PartialWaveSet, WavePacket};

/// First-order validity threshold on k·|f|.
pub const FIRST_ORDER_KF: f64 = 0.1;
/// Warning threshold on |δ_max·T| for the small-detuning shift formula.
pub const DETUNING_EXPANSION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RamseyPhase {
    /// Laser phase at the second pulse, rad.
    Phi(f64),
    /// Detuning δ, rad/s; φ = δT.
    Detuning(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamseyConfig {
    t: f64,
    phase: RamseyPhase,
}

impl RamseyConfig {
    pub fn new(t: f64, phase: RamseyPhase) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(ScatterError::invalid("T", format!("must be > 0, got {t}")));
        }
        let value = match phase {
            RamseyPhase::Phi(v) | RamseyPhase::Detuning(v) => v,
        };
        if !value.is_finite() {
            return Err(ScatterError::invalid("phase", "must be finite"));
        }
        Ok(RamseyConfig { t, phase })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn phi(&self) -> f64 {
        match self.phase {
            RamseyPhase::Phi(phi) => phi,
            RamseyPhase::Detuning(delta) => delta * self.t,
        }
    }

    pub fn delta(&self) -> f64 {
        match self.phase {
            RamseyPhase::Phi(phi) => phi / self.t,
            RamseyPhase::Detuning(delta) => delta,
        }
    }
}

/// Detection probability with its first-order scattering correction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeValue {
    pub p2: f64,
    /// Taken as 1 − P2; no independent full-order P1 is derived.
    pub p1: f64,
    /// P2 minus the unperturbed fringe.
    pub correction: f64,
    pub warnings: Vec<Warning>,
}

pub(crate) fn range_warning(p: f64, correction: f64) -> Option<Warning> {
    let budget = 2.0 * correction.abs();
    (p < -budget || p > 1.0 + budget).then_some(Warning::ProbabilityOutOfRange { value: p, budget })
}

pub(crate) fn kf_warning(k: f64, f1: &AmplitudeModel, f2: &AmplitudeModel) -> Option<Warning> {
    let kf = k * f1.forward().norm().max(f2.forward().norm());
    (kf > FIRST_ORDER_KF).then_some(Warning::FirstOrderValidity {
        k_times_f: kf,
        threshold: FIRST_ORDER_KF,
    })
}

/// Full first-order P2, keeping the angular overlap F12 and Im f terms.
pub fn ramsey_p2_full(
    phi: f64,
    f1: &AmplitudeModel,
    f2: &AmplitudeModel,
    packet: &WavePacket,
) -> Result<FringeValue> {
    let (k, d) = (packet.k(), packet.d());
    let f12 = forward_overlap_f12(f1, f2)?;
    let (a1, a2) = (f1.forward(), f2.forward());
    let cos_term = f12.re / (4.0 * PI) - (a1 + a2).im / (2.0 * k);
    let sin_term = f12.im / (4.0 * PI) + (a1 - a2).re / (2.0 * k);
    let correction = (cos_term * phi.cos() + sin_term * phi.sin()) / (d * d);
    let p2 = 0.5 * (1.0 + phi.cos()) + correction;
    let warnings = kf_warning(k, f1, f2)
        .into_iter()
        .chain(range_warning(p2, correction))
        .collect();
    Ok(FringeValue {
        p2,
        p1: 1.0 - p2,
        correction,
        warnings,
    })
}

/// P2 ≈ ½(1 + cos φ) + Re[f1(0) − f2(0)]·sin φ/(2kd²).
pub fn ramsey_p2_simplified(phi: f64, re_df: f64, packet: &WavePacket) -> f64 {
    0.5 * (1.0 + phi.cos()) + 0.5 * re_df * packet.inverse_kd2() * phi.sin()
}

/// P1 ≈ ½(1 − cos φ) − Re[f1(0) − f2(0)]·sin φ/(2kd²).
pub fn ramsey_p1_simplified(phi: f64, re_df: f64, packet: &WavePacket) -> f64 {
    0.5 * (1.0 - phi.cos()) - 0.5 * re_df * packet.inverse_kd2() * phi.sin()
}

/// dP2/dφ of [`ramsey_p2_simplified`].
pub fn ramsey_p2_simplified_slope(phi: f64, re_df: f64, packet: &WavePacket) -> f64 {
    -0.5 * phi.sin() + 0.5 * re_df * packet.inverse_kd2() * phi.cos()
}

/// P2 from the partial-wave phases of both states (zero-padded to a
/// common ℓ_max), using the packet wavenumber.
pub fn ramsey_p2_partial_wave(
    phi: f64,
    set1: &PartialWaveSet,
    set2: &PartialWaveSet,
    packet: &WavePacket,
) -> f64 {
    let n = set1.phases().len().max(set2.phases().len());
    let (mut cos_sum, mut sin_sum) = (0.0, 0.0);
    for l in 0..n {
        let diff = set1.phase(l) - set2.phase(l);
        let w = 2.0 * l as f64 + 1.0;
        cos_sum += w * diff.sin().powi(2);
        sin_sum += w * (2.0 * diff).sin();
    }
    let kd2 = (packet.k() * packet.d()).powi(2);
    0.5 * (1.0 + phi.cos()) - cos_sum * phi.cos() / (2.0 * kd2) + sin_sum * phi.sin() / (4.0 * kd2)
}

/// Central-fringe shift δ_max = Re[f1(0) − f2(0)]/(k d² T), rad/s.
pub fn ramsey_shift(re_df: f64, packet: &WavePacket, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(ScatterError::invalid("T", format!("must be > 0, got {t}")));
    }
    Ok(re_df * packet.inverse_kd2() / t)
}

/// Warning when |δ_max·T| leaves the small-detuning regime.
pub fn shift_validity(delta_max: f64, t: f64) -> Option<Warning> {
    let delta_t = (delta_max * t).abs();
    (delta_t > DETUNING_EXPANSION_LIMIT).then_some(Warning::DetuningExpansion {
        delta_t,
        threshold: DETUNING_EXPANSION_LIMIT,
    })
}

/// Position of the central maximum of [`ramsey_p2_simplified`] as a function
/// of δ (φ = δT), found as the bracketed zero of ∂P2/∂δ on
/// (−π/(2T), π/(2T)). The exact stationary point obeys
/// tan(δT) = Re Δf/(kd²).
pub fn ramsey_shift_numeric(re_df: f64, packet: &WavePacket, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(ScatterError::invalid("T", format!("must be > 0, got {t}")));
    }
    if !re_df.is_finite() {
        return Err(ScatterError::invalid("re_df", "must be finite"));
    }
    let edge = FRAC_PI_2 / t * (1.0 - 1e-12);
    let delta = bisect_root(|d| ramsey_p2_simplified_slope(d * t, re_df, packet), -edge, edge)
        .map_err(|_| ScatterError::OptimizerFailed { iterations: 0 })?;
    // The bracket only holds a maximum; confirm curvature.
    let curvature = -0.5 * (delta * t).cos() - 0.5 * re_df * packet.inverse_kd2() * (delta * t).sin();
    if curvature >= 0.0 {
        return Err(ScatterError::OptimizerFailed { iterations: 0 });
    }
    Ok(delta)
}
