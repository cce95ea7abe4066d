use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::units::HBAR;

/// Gaussian wave packet of the relative (atom − scatterer) coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavePacket {
    k: f64,
    d: f64,
    v: f64,
    mu: f64,
}

fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ScatterError::invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

impl WavePacket {
    /// Packet from reduced mass and relative speed; k = μv/ħ.
    pub fn from_kinematics(mu: f64, v: f64, d: f64) -> Result<Self> {
        let mu = positive("mu", mu)?;
        let v = positive("v", v)?;
        let d = positive("d", d)?;
        Ok(WavePacket {
            k: mu * v / HBAR,
            d,
            v,
            mu,
        })
    }

    /// Packet from wavenumber and reduced mass; v = ħk/μ.
    pub fn with_wavenumber(k: f64, d: f64, mu: f64) -> Result<Self> {
        let k = positive("k", k)?;
        let d = positive("d", d)?;
        let mu = positive("mu", mu)?;
        Ok(WavePacket {
            k,
            d,
            v: HBAR * k / mu,
            mu,
        })
    }

    /// Fully specified packet; rejects inputs with |k − μv/ħ| > 1e-9·k.
    pub fn new(k: f64, d: f64, v: f64, mu: f64) -> Result<Self> {
        let p = WavePacket {
            k: positive("k", k)?,
            d: positive("d", d)?,
            v: positive("v", v)?,
            mu: positive("mu", mu)?,
        };
        let implied = mu * v / HBAR;
        if ((implied - k) / k).abs() > 1e-9 {
            return Err(ScatterError::invalid(
                "k",
                format!("inconsistent with mu*v/hbar = {implied:e}"),
            ));
        }
        Ok(p)
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// 1/(k d²), the scale of every first-order scattering correction (1/m).
    pub fn inverse_kd2(&self) -> f64 {
        1.0 / (self.k * self.d * self.d)
    }
}
