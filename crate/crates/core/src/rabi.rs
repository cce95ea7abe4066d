//! Single-pulse Rabi interrogation with one collision at time t_c during
//! the pulse. The light phase at pulse start is zero.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError, Warning};
use crate::optimize::bisect_root;
use crate::ramsey::{kf_warning, range_warning, ramsey_shift, FringeValue};
use crate::scattering::{AmplitudeModel, WavePacket};

/// Tolerance on |ΩT − π| for the π-pulse shift formulas.
pub const PI_PULSE_TOL: f64 = 1e-9;
/// Small-detuning threshold for the expanded line shape.
pub const RABI_DETUNING_LIMIT: f64 = 0.1;
/// Half-width of the detuning window searched by [`rabi_shift_numeric`], in Ω.
pub const NUMERIC_WINDOW: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiConfig {
    omega: f64,
    t: f64,
    delta: f64,
    t_c: f64,
}

impl RabiConfig {
    pub fn new(omega: f64, t: f64, delta: f64, t_c: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ScatterError::invalid("omega", format!("must be > 0, got {omega}")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(ScatterError::invalid("T", format!("must be > 0, got {t}")));
        }
        if !delta.is_finite() {
            return Err(ScatterError::invalid("delta", "must be finite"));
        }
        if !(0.0..=t).contains(&t_c) {
            return Err(ScatterError::invalid("t_c", format!("must lie in [0, T], got {t_c}")));
        }
        Ok(RabiConfig { omega, t, delta, t_c })
    }

    /// π pulse on resonance: Ω = π/T.
    pub fn pi_pulse(t: f64, delta: f64, t_c: f64) -> Result<Self> {
        Self::new(PI / t, t, delta, t_c)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.omega, self.t, delta, self.t_c)
    }

    /// Off-resonant Rabi frequency Ω_r = √(Ω² + δ²).
    pub fn omega_r(&self) -> f64 {
        self.omega.hypot(self.delta)
    }

    pub fn sin_theta(&self) -> f64 {
        self.omega / self.omega_r()
    }

    pub fn cos_theta(&self) -> f64 {
        -self.delta / self.omega_r()
    }

    pub fn check_pi_pulse(&self) -> Result<()> {
        let gap = (self.omega * self.t - PI).abs();
        if gap > PI_PULSE_TOL {
            return Err(ScatterError::invalid(
                "omega",
                format!("pi-pulse formulas need |Omega*T - pi| <= {PI_PULSE_TOL:e}, got {gap:e}"),
            ));
        }
        Ok(())
    }
}

/// (c2, c1) of the unperturbed state at time `at`, starting from |1⟩.
pub fn rabi_state_amplitudes(cfg: &RabiConfig, at: f64) -> Result<(Complex64, Complex64)> {
    if !(0.0..=cfg.t).contains(&at) {
        return Err(ScatterError::invalid("at", format!("must lie in [0, T], got {at}")));
    }
    let half = 0.5 * cfg.omega_r() * at;
    let (s, c) = half.sin_cos();
    let phase = Complex64::from_polar(1.0, 0.5 * cfg.delta * at);
    let c2 = Complex64::new(0.0, -cfg.sin_theta() * s) * phase.conj();
    let c1 = phase * Complex64::new(c, cfg.cos_theta() * s);
    Ok((c2, c1))
}

/// Unperturbed Rabi line sin²θ·sin²(Ω_r T/2).
pub fn rabi_p2_unperturbed(cfg: &RabiConfig) -> f64 {
    let st = cfg.sin_theta();
    st * st * (0.5 * cfg.omega_r() * cfg.t).sin().powi(2)
}

/// P2 with the collision term S_c A_T S_T A_c·(2/kd²)·Re[f1 − f2]·sin Δα,
/// built from forward amplitudes only.
pub fn rabi_p2(
    cfg: &RabiConfig,
    f1: &AmplitudeModel,
    f2: &AmplitudeModel,
    packet: &WavePacket,
) -> Result<FringeValue> {
    let wr = cfg.omega_r();
    let cos_theta = cfg.cos_theta();
    let (s_c, c_c) = (0.5 * wr * cfg.t_c).sin_cos();
    let (s_t, c_t) = (0.5 * wr * (cfg.t - cfg.t_c)).sin_cos();
    let x_t = Complex64::new(c_t, -cos_theta * s_t);
    let x_c = Complex64::new(c_c, cos_theta * s_c);
    // A_T A_c sin(α_T − α_c) = Im(X_T X_c*).
    let phase_term = (x_t * x_c.conj()).im;
    let re_df = (f1.forward() - f2.forward()).re;
    let st2 = cfg.sin_theta().powi(2);
    let correction = st2 * s_c * s_t * phase_term * 2.0 * packet.inverse_kd2() * re_df;
    let p2 = rabi_p2_unperturbed(cfg) + correction;
    let warnings = kf_warning(packet.k(), f1, f2)
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

/// Small-detuning expansion around a π pulse:
/// 1 − δ²/Ω² + sin(Ωt_c)·Re Δf·(δ/Ω)/(kd²). The 2S_c²C_c²/sin(Ωt_c)
/// factor is carried in its regular product form sin(Ωt_c)/4, so t_c ∈ {0, T}
/// needs no special casing.
pub fn rabi_p2_expanded(cfg: &RabiConfig, re_df: f64, packet: &WavePacket) -> Result<FringeValue> {
    cfg.check_pi_pulse()?;
    let ratio = cfg.delta / cfg.omega;
    let correction = (cfg.omega * cfg.t_c).sin() * re_df * ratio * packet.inverse_kd2();
    let p2 = 1.0 - ratio * ratio + correction;
    let mut warnings: Vec<Warning> = range_warning(p2, correction).into_iter().collect();
    if ratio.abs() > RABI_DETUNING_LIMIT {
        warnings.push(Warning::RabiDetuning {
            ratio: ratio.abs(),
            threshold: RABI_DETUNING_LIMIT,
        });
    }
    Ok(FringeValue {
        p2,
        p1: 1.0 - p2,
        correction,
        warnings,
    })
}

fn check_collision_time(t_c: f64, t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(ScatterError::invalid("T", format!("must be > 0, got {t}")));
    }
    if !(0.0..=t).contains(&t_c) {
        return Err(ScatterError::invalid("t_c", format!("must lie in [0, T], got {t_c}")));
    }
    Ok(())
}

/// δ_max(t_c) = sin(Ωt_c)·(π/2)·Re Δf/(kd²T) for a π pulse (Ω = π/T).
pub fn rabi_shift(t_c: f64, re_df: f64, packet: &WavePacket, t: f64) -> Result<f64> {
    check_collision_time(t_c, t)?;
    let omega = PI / t;
    Ok((omega * t_c).sin() * FRAC_PI_2 * re_df * packet.inverse_kd2() / t)
}

/// Detuning maximizing [`rabi_p2`] within ±0.3Ω for a π pulse, located as
/// the bracketed zero of a central-difference slope of P2.
pub fn rabi_shift_numeric(t_c: f64, re_df: f64, packet: &WavePacket, t: f64) -> Result<f64> {
    check_collision_time(t_c, t)?;
    let base = RabiConfig::pi_pulse(t, 0.0, t_c)?;
    let omega = base.omega;
    let f1 = AmplitudeModel::forward_value(Complex64::new(re_df, 0.0))?;
    let f2 = AmplitudeModel::Forward(Complex64::new(0.0, 0.0));
    let p2 = |delta: f64| -> f64 {
        let cfg = RabiConfig { delta, ..base };
        rabi_p2(&cfg, &f1, &f2, packet).map(|v| v.p2).unwrap_or(f64::NAN)
    };
    let h = 1e-4 * omega;
    let slope = |delta: f64| (p2(delta + h) - p2(delta - h)) / (2.0 * h);
    let window = NUMERIC_WINDOW * omega;
    // A lost bracket means the peak left the search window.
    let delta = bisect_root(slope, -window, window).map_err(|_| ScatterError::OptimizerFailed { iterations: 0 })?;
    if !(p2(delta) >= p2(-window) && p2(delta) >= p2(window)) {
        return Err(ScatterError::OptimizerFailed { iterations: 0 });
    }
    Ok(delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub t_c_over_t: f64,
    pub rabi: f64,
    pub ramsey: f64,
}

/// Rabi and Ramsey shifts against collision time, in units of
/// Re[f1 − f2]/(kd²T).
pub fn fig1_curve(samples: usize, t: f64) -> Result<Vec<Fig1Row>> {
    if samples < 2 {
        return Err(ScatterError::invalid("samples", "need at least two samples"));
    }
    // Any packet works: choosing Re Δf = kd²T makes the unit exactly one.
    let packet = WavePacket::with_wavenumber(1.0, 1.0, 1.0)?;
    let unit_re_df = t;
    (0..samples)
        .map(|i| {
            let x = if i + 1 == samples {
                1.0
            } else {
                i as f64 / (samples - 1) as f64
            };
            Ok(Fig1Row {
                t_c_over_t: x,
                rabi: rabi_shift(x * t, unit_re_df, &packet, t)?,
                ramsey: ramsey_shift(unit_re_df, &packet, t)?,
            })
        })
        .collect()
}
