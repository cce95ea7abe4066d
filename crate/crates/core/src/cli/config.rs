//! Flat TOML run configuration. Every key carries its unit in the name and
//! unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ensemble::{ScattererPopulation, DEFAULT_INTERROGATION_TIME, DEFAULT_RHO_GEV_CM3};
use crate::scattering::{AmplitudeModel, PartialWaveSet, WavePacket};
use crate::sensitivity::{SensitivityScenario, Strategy, DEFAULT_MASSES_EV};
use crate::units::CS133_MASS_KG;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // Packet and amplitudes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_df_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases1_rad: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases2_rad: Option<Vec<f64>>,

    // Interrogation.
    #[serde(rename = "T_s", skip_serializing_if = "Option::is_none")]
    pub t_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_c_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    // Scatterer population.
    #[serde(rename = "m_chi_eV", skip_serializing_if = "Option::is_none")]
    pub m_chi_ev: Option<f64>,
    #[serde(rename = "rho_GeV_cm3", skip_serializing_if = "Option::is_none")]
    pub rho_gev_cm3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_per_m3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_m_s: Option<f64>,
    #[serde(rename = "r_A_m", skip_serializing_if = "Option::is_none")]
    pub r_a_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_a_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_chi_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_a_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_nonlinear: Option<bool>,

    // Sensitivity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_delta_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_a_rad_s: Option<f64>,
    #[serde(rename = "N_a", skip_serializing_if = "Option::is_none")]
    pub n_a: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k_zeeman: Option<f64>,
    #[serde(rename = "masses_eV", skip_serializing_if = "Option::is_none")]
    pub masses_ev: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_reduced_mass: Option<bool>,

    // Regime and Monte Carlo.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dv_a_max_m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn bad(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {reason}"))
}

fn check_positive(key: &str, value: Option<f64>) -> Result<(), CliError> {
    match value {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(bad(key, format!("must be finite and > 0, got {x}"))),
        _ => Ok(()),
    }
}

fn check_finite(key: &str, value: Option<f64>) -> Result<(), CliError> {
    match value {
        Some(x) if !x.is_finite() => Err(bad(key, "must be finite")),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks every present key against the invariants of the type it feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        for (key, v) in [
            ("k_per_m", self.k_per_m),
            ("d_m", self.d_m),
            ("T_s", self.t_s),
            ("omega_rad_s", self.omega_rad_s),
            ("m_chi_eV", self.m_chi_ev),
            ("rho_GeV_cm3", self.rho_gev_cm3),
            ("n_per_m3", self.n_per_m3),
            ("v_m_s", self.v_m_s),
            ("r_A_m", self.r_a_m),
            ("d_a_m", self.d_a_m),
            ("d_chi_m", self.d_chi_m),
            ("m_a_kg", self.m_a_kg),
            ("delta_delta_rad_s", self.delta_delta_rad_s),
            ("sigma_a_rad_s", self.sigma_a_rad_s),
            ("dv_a_max_m_s", self.dv_a_max_m_s),
        ] {
            check_positive(key, v)?;
        }
        for (key, v) in [
            ("re_df_m", self.re_df_m),
            ("sweep_start", self.sweep_start),
            ("sweep_stop", self.sweep_stop),
            ("K", self.k_zeeman),
        ] {
            check_finite(key, v)?;
        }
        if let Some(n_a) = self.n_a {
            if !(n_a >= 1.0 && n_a.is_finite()) {
                return Err(bad("N_a", format!("must be >= 1, got {n_a}")));
            }
        }
        if let Some(t_c) = self.t_c_s {
            if !(0.0..=self.interrogation_time()).contains(&t_c) {
                return Err(bad("t_c_s", format!("must lie in [0, T_s], got {t_c}")));
            }
        }
        if matches!(self.steps, Some(s) if s < 2) {
            return Err(bad("steps", "need at least 2"));
        }
        if matches!(self.samples, Some(s) if s < 2) {
            return Err(bad("samples", "need at least 2"));
        }
        if matches!(self.trials, Some(t) if t < 100) {
            return Err(bad("trials", "need at least 100"));
        }
        if let Some(masses) = &self.masses_ev {
            if masses.is_empty() {
                return Err(bad("masses_eV", "must not be empty"));
            }
            if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
                return Err(bad("masses_eV", format!("masses must be > 0, got {m}")));
            }
        }
        if self.phases1_rad.is_some() != self.phases2_rad.is_some() {
            return Err(bad("phases1_rad", "phases1_rad and phases2_rad must be given together"));
        }
        for (key, phases) in [("phases1_rad", &self.phases1_rad), ("phases2_rad", &self.phases2_rad)] {
            if let Some(p) = phases {
                PartialWaveSet::new(p.clone()).map_err(|e| bad(key, e))?;
            }
        }
        self.population().map_err(|e| bad("population", e))?;
        Ok(())
    }

    pub fn interrogation_time(&self) -> f64 {
        self.t_s.unwrap_or(DEFAULT_INTERROGATION_TIME)
    }

    /// Rabi frequency; defaults to a π pulse.
    pub fn omega(&self) -> f64 {
        self.omega_rad_s.unwrap_or(PI / self.interrogation_time())
    }

    pub fn collision_time(&self) -> f64 {
        self.t_c_s.unwrap_or(0.5 * self.interrogation_time())
    }

    pub fn m_chi(&self) -> f64 {
        self.m_chi_ev.unwrap_or(1.0)
    }

    pub fn population(&self) -> Result<ScattererPopulation, CliError> {
        let m = self.m_chi();
        let mut pop = match self.n_per_m3 {
            Some(n) => ScattererPopulation::from_number_density(n, m),
            None => ScattererPopulation::from_density(self.rho_gev_cm3.unwrap_or(DEFAULT_RHO_GEV_CM3), m),
        }?;
        if let Some(v) = self.v_m_s {
            pop = pop.with_velocity(v)?;
        }
        pop = pop.with_range(self.r_a_m)?;
        if let Some(d) = self.d_a_m {
            pop = pop.with_atom_width(d)?;
        }
        if let Some(d) = self.d_chi_m {
            pop = pop.with_scatterer_width(d)?;
        }
        if let Some(m_a) = self.m_a_kg {
            pop = pop.with_atom_mass(m_a)?;
        }
        Ok(pop.with_superposition_override(self.allow_nonlinear.unwrap_or(false)))
    }

    /// Packet of the relative motion: explicit k and d when given, otherwise
    /// from the population kinematics.
    pub fn packet(&self) -> Result<WavePacket, CliError> {
        let pop = self.population()?;
        let k = self.k_per_m.unwrap_or_else(|| pop.k());
        let d = self.d_m.unwrap_or_else(|| pop.d_eff());
        Ok(WavePacket::with_wavenumber(k, d, pop.mu())?)
    }

    /// Forward amplitudes of the two clock states. Without phase sets,
    /// f1(0) = re_df and f2(0) = 0.
    pub fn amplitudes(&self, packet: &WavePacket) -> Result<(AmplitudeModel, AmplitudeModel), CliError> {
        match (&self.phases1_rad, &self.phases2_rad) {
            (Some(p1), Some(p2)) => Ok((
                AmplitudeModel::partial_waves(PartialWaveSet::new(p1.clone())?, packet.k())?,
                AmplitudeModel::partial_waves(PartialWaveSet::new(p2.clone())?, packet.k())?,
            )),
            _ => Ok((
                AmplitudeModel::forward_value(num_complex::Complex64::new(self.re_df(), 0.0))?,
                AmplitudeModel::forward_value(num_complex::Complex64::new(0.0, 0.0))?,
            )),
        }
    }

    pub fn re_df(&self) -> f64 {
        self.re_df_m.unwrap_or(0.0)
    }

    pub fn masses(&self) -> Vec<f64> {
        self.masses_ev.clone().unwrap_or_else(|| DEFAULT_MASSES_EV.to_vec())
    }

    pub fn scenario(&self, strategy: Strategy, m_chi_ev: f64) -> SensitivityScenario {
        let mut s = SensitivityScenario::new(strategy, m_chi_ev);
        s.delta_delta = self.delta_delta_rad_s.unwrap_or(s.delta_delta);
        s.sigma_a = self.sigma_a_rad_s.unwrap_or(s.sigma_a);
        s.n_a = self.n_a.unwrap_or(s.n_a);
        s.k_zeeman = self.k_zeeman.unwrap_or(s.k_zeeman);
        s.rho_gev_cm3 = self.rho_gev_cm3.unwrap_or(s.rho_gev_cm3);
        s.t = self.interrogation_time();
        s.v = self.v_m_s.unwrap_or(s.v);
        s.exact_reduced_mass = self.exact_reduced_mass.unwrap_or(false);
        s
    }

    pub fn atom_mass(&self) -> f64 {
        self.m_a_kg.unwrap_or(CS133_MASS_KG)
    }
}
