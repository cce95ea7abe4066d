//! Physical constants and the small set of unit conversions the sensitivity
//! estimates need. Everything is SI internally; natural-unit inputs (eV
//! masses, GeV/cm³ densities) are converted at the boundary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Exact SI / CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsRegistry {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Electron-volt, J.
    pub ev: f64,
    /// eV/c², kg.
    pub ev_mass: f64,
    /// Atomic mass constant, kg.
    pub dalton: f64,
}

pub const CONSTANTS: ConstantsRegistry = ConstantsRegistry {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    ev: 1.602_176_634e-19,
    ev_mass: 1.602_176_634e-19 / (299_792_458.0 * 299_792_458.0),
    dalton: 1.660_539_066_60e-27,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const C_LIGHT: f64 = CONSTANTS.c;

/// 1 GeV/cm³ expressed in eV/m³.
pub const GEV_PER_CM3_IN_EV_PER_M3: f64 = 1e15;

/// Mass of ¹³³Cs in kg.
pub const CS133_MASS_KG: f64 = 132.905_451_961 * CONSTANTS.dalton;
/// Mass of ⁸⁷Rb in kg.
pub const RB87_MASS_KG: f64 = 86.909_180_531 * CONSTANTS.dalton;

pub fn ev_to_kg(m_ev: f64) -> f64 {
    m_ev * CONSTANTS.ev_mass
}

pub fn kg_to_ev(m_kg: f64) -> f64 {
    m_kg / CONSTANTS.ev_mass
}

/// Number density (1/m³) of particles of mass `m_chi_ev` at mass density
/// `rho_gev_cm3`.
pub fn number_density(rho_gev_cm3: f64, m_chi_ev: f64) -> f64 {
    rho_gev_cm3 * GEV_PER_CM3_IN_EV_PER_M3 / m_chi_ev
}

/// Mass density in kg/m³.
pub fn mass_density_kg_m3(rho_gev_cm3: f64) -> f64 {
    rho_gev_cm3 * GEV_PER_CM3_IN_EV_PER_M3 * CONSTANTS.ev_mass
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "eV")]
    ElectronVolt,
    #[serde(rename = "kg")]
    Kilogram,
    #[serde(rename = "J")]
    Joule,
    #[serde(rename = "GeV/cm3")]
    GevPerCm3,
    #[serde(rename = "eV/m3")]
    EvPerM3,
    #[serde(rename = "kg/m3")]
    KgPerM3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Energy,
    Density,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::ElectronVolt | Unit::Kilogram | Unit::Joule => Dimension::Energy,
            Unit::GevPerCm3 | Unit::EvPerM3 | Unit::KgPerM3 => Dimension::Density,
        }
    }

    /// Factor taking one of this unit to the canonical unit of its
    /// dimension (eV for energy/mass, eV/m³ for density).
    fn to_canonical(self) -> f64 {
        match self {
            Unit::ElectronVolt => 1.0,
            Unit::Kilogram => 1.0 / CONSTANTS.ev_mass,
            Unit::Joule => 1.0 / CONSTANTS.ev,
            Unit::GevPerCm3 => GEV_PER_CM3_IN_EV_PER_M3,
            Unit::EvPerM3 => 1.0,
            Unit::KgPerM3 => 1.0 / CONSTANTS.ev_mass,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::ElectronVolt => "eV",
            Unit::Kilogram => "kg",
            Unit::Joule => "J",
            Unit::GevPerCm3 => "GeV/cm3",
            Unit::EvPerM3 => "eV/m3",
            Unit::KgPerM3 => "kg/m3",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eV" | "ev" => Unit::ElectronVolt,
            "kg" => Unit::Kilogram,
            "J" | "j" => Unit::Joule,
            "GeV/cm3" | "GeV/cm^3" => Unit::GevPerCm3,
            "eV/m3" | "eV/m^3" => Unit::EvPerM3,
            "kg/m3" | "kg/m^3" => Unit::KgPerM3,
            other => return Err(ScatterError::invalid("unit", format!("unknown unit `{other}`"))),
        })
    }
}

/// Convert `value` between two units of the same dimension.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.dimension() != to.dimension() {
        return Err(ScatterError::UnsupportedConversion {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    if from == to {
        return Ok(value);
    }
    Ok(value * from.to_canonical() / to.to_canonical())
}
