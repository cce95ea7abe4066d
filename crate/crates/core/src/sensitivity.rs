//! Minimum detectable forward-amplitude differences for the clock-based
//! dark-matter search strategies, and the summary table built from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensemble::{
    event_count_warning, rabi_sigma_factor, ScattererPopulation, DEFAULT_INTERROGATION_TIME,
    DEFAULT_RHO_GEV_CM3, DEFAULT_VELOCITY,
};
use crate::error::{Result, ScatterError, Warning};
use crate::units::{ev_to_kg, HBAR};

/// Mass at which the scatterer packet width equals the atom width.
pub const CROSSOVER_MASS_EV: f64 = 1e4;
pub const DEFAULT_FREQUENCY_UNCERTAINTY: f64 = 1e-5;
pub const DEFAULT_SHOT_NOISE: f64 = 1e-3;
pub const DEFAULT_ATOM_NUMBER: f64 = 5e6;
pub const DEFAULT_ZEEMAN_K: f64 = 2.0;
/// Default mass grid for the table, eV.
pub const DEFAULT_MASSES_EV: [f64; 9] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Absolute frequency offset of the m_F = 0 clock transition.
    OffsetM0,
    /// Magnetically insensitive K·ν_Cs − ν_Rb combination.
    ZeemanFreeRbCs,
    /// Excess Rabi over Ramsey frequency noise.
    RabiVsRamsey,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityScenario {
    pub strategy: Strategy,
    /// Δδ, rad/s.
    pub delta_delta: f64,
    /// σ_a per cycle, rad/s.
    pub sigma_a: f64,
    pub n_a: f64,
    pub k_zeeman: f64,
    pub rho_gev_cm3: f64,
    pub m_chi_ev: f64,
    pub t: f64,
    pub v: f64,
    /// Use the exact reduced mass with ¹³³Cs instead of μ ≈ m_χ.
    pub exact_reduced_mass: bool,
}

impl SensitivityScenario {
    pub fn new(strategy: Strategy, m_chi_ev: f64) -> Self {
        SensitivityScenario {
            strategy,
            delta_delta: DEFAULT_FREQUENCY_UNCERTAINTY,
            sigma_a: DEFAULT_SHOT_NOISE,
            n_a: DEFAULT_ATOM_NUMBER,
            k_zeeman: DEFAULT_ZEEMAN_K,
            rho_gev_cm3: DEFAULT_RHO_GEV_CM3,
            m_chi_ev,
            t: DEFAULT_INTERROGATION_TIME,
            v: DEFAULT_VELOCITY,
            exact_reduced_mass: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("delta_delta", self.delta_delta),
            ("sigma_a", self.sigma_a),
            ("rho_chi", self.rho_gev_cm3),
            ("m_chi", self.m_chi_ev),
            ("T", self.t),
            ("v", self.v),
        ];
        for (field, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(ScatterError::invalid(field, format!("must be finite and > 0, got {x}")));
            }
        }
        if !(self.n_a >= 1.0) {
            return Err(ScatterError::invalid("N_a", format!("must be >= 1, got {}", self.n_a)));
        }
        if !self.k_zeeman.is_finite() {
            return Err(ScatterError::invalid("K", "must be finite"));
        }
        Ok(())
    }

    fn require(&self, strategy: Strategy) -> Result<()> {
        if self.strategy != strategy {
            return Err(ScatterError::invalid(
                "strategy",
                format!("expected {strategy:?}, got {:?}", self.strategy),
            ));
        }
        self.validate()
    }

    fn population(&self) -> Result<ScattererPopulation> {
        ScattererPopulation::from_density(self.rho_gev_cm3, self.m_chi_ev)?.with_velocity(self.v)
    }

    fn mu(&self, pop: &ScattererPopulation) -> f64 {
        if self.exact_reduced_mass {
            pop.mu()
        } else {
            ev_to_kg(self.m_chi_ev)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Limit {
    /// Minimum detectable amplitude difference, m.
    pub value: f64,
    pub n_sc: Option<f64>,
    pub warnings: Vec<Warning>,
}

/// Re Δf at which the ensemble Ramsey shift 2πnħ·Re Δf/μ equals `shift`.
fn offset_threshold(s: &SensitivityScenario, shift: f64) -> Result<f64> {
    let pop = s.population()?;
    Ok(shift * s.mu(&pop) / (2.0 * PI * pop.n() * HBAR))
}

pub fn offset_limit(s: &SensitivityScenario) -> Result<Limit> {
    s.require(Strategy::OffsetM0)?;
    Ok(Limit {
        value: offset_threshold(s, s.delta_delta)?,
        n_sc: None,
        warnings: Vec::new(),
    })
}

/// Threshold on K·Re Δf_Cs − Re Δf_Rb, measured with the same Δδ as the
/// m_F = 0 clock.
pub fn zeeman_free_limit(s: &SensitivityScenario) -> Result<Limit> {
    s.require(Strategy::ZeemanFreeRbCs)?;
    Ok(Limit {
        value: offset_threshold(s, s.delta_delta)?,
        n_sc: None,
        warnings: Vec::new(),
    })
}

/// K·Re Δf_Cs − Re Δf_Rb.
pub fn zeeman_free_combination(k: f64, re_df_cs: f64, re_df_rb: f64) -> f64 {
    k * re_df_cs - re_df_rb
}

/// Re Δf at which the averaged Rabi shift spread reaches σ_a, with N_sc
/// from the point-like event count.
pub fn rabi_vs_ramsey_limit(s: &SensitivityScenario) -> Result<Limit> {
    s.require(Strategy::RabiVsRamsey)?;
    let pop = s.population()?;
    let n_sc = pop.n_sc(s.t)?.short_range;
    let value = s.sigma_a * s.mu(&pop) * (s.n_a * n_sc).sqrt()
        / (2.0 * PI * rabi_sigma_factor() * pop.n() * HBAR);
    Ok(Limit {
        value,
        n_sc: Some(n_sc),
        warnings: event_count_warning(n_sc).into_iter().collect(),
    })
}

pub fn limit(s: &SensitivityScenario) -> Result<Limit> {
    match s.strategy {
        Strategy::OffsetM0 => offset_limit(s),
        Strategy::ZeemanFreeRbCs => zeeman_free_limit(s),
        Strategy::RabiVsRamsey => rabi_vs_ramsey_limit(s),
    }
}

/// Order-of-magnitude benchmark formulas the limits are compared against.
pub fn reference_limit(strategy: Strategy, m_chi_ev: f64, rho_gev_cm3: f64) -> f64 {
    let density = DEFAULT_RHO_GEV_CM3 / rho_gev_cm3;
    match strategy {
        Strategy::OffsetM0 | Strategy::ZeemanFreeRbCs => 1e-22 * density * m_chi_ev.powi(2),
        Strategy::RabiVsRamsey if m_chi_ev > CROSSOVER_MASS_EV => 1e-14 * density * m_chi_ev.powf(1.5),
        Strategy::RabiVsRamsey => 1e-10 * density * m_chi_ev.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub m_chi_ev: f64,
    pub offset: f64,
    pub zeeman_free: f64,
    pub rabi_vs_ramsey: f64,
    pub n_sc: f64,
    pub warnings: Vec<Warning>,
}

/// Log-log slopes per strategy; `None` when a branch has fewer than two
/// masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Exponents {
    pub offset: Option<f64>,
    pub zeeman_free: Option<f64>,
    pub rabi_heavy: Option<f64>,
    pub rabi_light: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub rho_gev_cm3: f64,
    pub rows: Vec<Table1Row>,
    pub exponents: Table1Exponents,
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn table1(masses: &[f64], rho_gev_cm3: f64) -> Result<Table1> {
    if masses.is_empty() {
        return Err(ScatterError::invalid("masses", "need at least one mass"));
    }
    let rows = masses
        .iter()
        .map(|&m| {
            let with = |strategy| SensitivityScenario {
                rho_gev_cm3,
                ..SensitivityScenario::new(strategy, m)
            };
            let rabi = rabi_vs_ramsey_limit(&with(Strategy::RabiVsRamsey))?;
            Ok(Table1Row {
                m_chi_ev: m,
                offset: offset_limit(&with(Strategy::OffsetM0))?.value,
                zeeman_free: zeeman_free_limit(&with(Strategy::ZeemanFreeRbCs))?.value,
                rabi_vs_ramsey: rabi.value,
                n_sc: rabi.n_sc.unwrap_or(f64::NAN),
                warnings: rabi.warnings,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let slope = |pick: fn(&Table1Row) -> f64, keep: fn(f64) -> bool| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| keep(r.m_chi_ev))
            .map(|r| (r.m_chi_ev, pick(r)))
            .collect();
        loglog_slope(&pts)
    };
    let exponents = Table1Exponents {
        offset: slope(|r| r.offset, |_| true),
        zeeman_free: slope(|r| r.zeeman_free, |_| true),
        rabi_heavy: slope(|r| r.rabi_vs_ramsey, |m| m >= CROSSOVER_MASS_EV),
        rabi_light: slope(|r| r.rabi_vs_ramsey, |m| m <= CROSSOVER_MASS_EV),
    };
    Ok(Table1 {
        rho_gev_cm3,
        rows,
        exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::ensemble_ramsey_shift;
    use approx::assert_relative_eq;

    fn scenario(strategy: Strategy, m: f64) -> SensitivityScenario {
        SensitivityScenario::new(strategy, m)
    }

    #[test]
    fn offset_examples() {
        let one = offset_limit(&scenario(Strategy::OffsetM0, 1.0)).unwrap().value;
        // Δδ·m²/(2πρħ), frozen from an independent evaluation.
        assert_relative_eq!(one, 6.725939668478189e-23, max_relative = 1e-9);
        let ten = offset_limit(&scenario(Strategy::OffsetM0, 10.0)).unwrap().value;
        assert_relative_eq!(ten / one, 100.0, max_relative = 1e-12);
        let dense = SensitivityScenario {
            rho_gev_cm3: 0.8,
            ..scenario(Strategy::OffsetM0, 1.0)
        };
        assert_relative_eq!(offset_limit(&dense).unwrap().value, one / 2.0, max_relative = 1e-12);
        assert!(offset_limit(&scenario(Strategy::RabiVsRamsey, 1.0)).is_err());
    }

    #[test]
    fn offset_closes_the_loop() {
        let s = scenario(Strategy::OffsetM0, 1.0);
        let re_df = offset_limit(&s).unwrap().value;
        let pop = ScattererPopulation::from_density(0.4, 1.0).unwrap();
        assert_relative_eq!(ensemble_ramsey_shift(&pop, re_df), 1e-5, max_relative = 1e-9);
        let exact = SensitivityScenario {
            exact_reduced_mass: true,
            ..s
        };
        let re_df = offset_limit(&exact).unwrap().value;
        assert_relative_eq!(ensemble_ramsey_shift(&pop, re_df), 1e-5, max_relative = 1e-14);
    }

    #[test]
    fn zeeman_free_examples() {
        let z = zeeman_free_limit(&scenario(Strategy::ZeemanFreeRbCs, 1.0)).unwrap().value;
        let o = offset_limit(&scenario(Strategy::OffsetM0, 1.0)).unwrap().value;
        assert_eq!(z, o);
        assert_eq!(zeeman_free_combination(2.0, 1e-20, 2e-20), 0.0);
        let heavy = zeeman_free_limit(&scenario(Strategy::ZeemanFreeRbCs, 30.0)).unwrap().value;
        assert_relative_eq!(heavy / z, 900.0, max_relative = 1e-12);
    }

    #[test]
    fn rabi_examples() {
        let light = rabi_vs_ramsey_limit(&scenario(Strategy::RabiVsRamsey, 1.0)).unwrap();
        assert_relative_eq!(light.value, 8.539616811e-11, max_relative = 1e-8);
        assert!(light.warnings.is_empty());
        let heavy = rabi_vs_ramsey_limit(&scenario(Strategy::RabiVsRamsey, 1e6)).unwrap();
        assert_relative_eq!(heavy.value, 8.539616811e-6, max_relative = 1e-8);
        assert!(matches!(heavy.warnings[..], [Warning::SubUnitEventCount { .. }]));

        let below = rabi_vs_ramsey_limit(&scenario(Strategy::RabiVsRamsey, CROSSOVER_MASS_EV * (1.0 - 1e-12))).unwrap();
        let above = rabi_vs_ramsey_limit(&scenario(Strategy::RabiVsRamsey, CROSSOVER_MASS_EV * (1.0 + 1e-12))).unwrap();
        assert_relative_eq!(below.value, above.value, max_relative = 1e-9);
    }

    #[test]
    fn monotone_in_density_and_precision() {
        for strategy in [Strategy::OffsetM0, Strategy::ZeemanFreeRbCs, Strategy::RabiVsRamsey] {
            for m in [1.0, 1e3, 1e6] {
                let base = limit(&scenario(strategy, m)).unwrap().value;
                let denser = SensitivityScenario {
                    rho_gev_cm3: 0.8,
                    ..scenario(strategy, m)
                };
                assert!(limit(&denser).unwrap().value < base);
                let sharper = SensitivityScenario {
                    delta_delta: 5e-6,
                    sigma_a: 5e-4,
                    ..scenario(strategy, m)
                };
                assert!(limit(&sharper).unwrap().value < base);
            }
        }
        // The Rabi limit scales as ρ^(-1/2) because N_sc grows with n.
        let r1 = rabi_vs_ramsey_limit(&scenario(Strategy::RabiVsRamsey, 10.0)).unwrap().value;
        let r4 = rabi_vs_ramsey_limit(&SensitivityScenario {
            rho_gev_cm3: 1.6,
            ..scenario(Strategy::RabiVsRamsey, 10.0)
        })
        .unwrap()
        .value;
        assert_relative_eq!(r1 / r4, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn longer_interrogation_helps_when_noise_scales_as_inverse_time() {
        let s = scenario(Strategy::RabiVsRamsey, 10.0);
        let long = SensitivityScenario {
            t: 4.0,
            sigma_a: s.sigma_a / 4.0,
            ..s
        };
        let ratio = rabi_vs_ramsey_limit(&s).unwrap().value / rabi_vs_ramsey_limit(&long).unwrap().value;
        assert_relative_eq!(ratio, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn table_exponents_and_reference_rows() {
        let t = table1(&DEFAULT_MASSES_EV, 0.4).unwrap();
        let e = t.exponents;
        assert!((e.offset.unwrap() - 2.0).abs() < 1e-9);
        assert!((e.zeeman_free.unwrap() - 2.0).abs() < 1e-9);
        assert!((e.rabi_heavy.unwrap() - 1.5).abs() < 1e-9);
        assert!((e.rabi_light.unwrap() - 0.5).abs() < 1e-9);
        for row in t.rows.iter().filter(|r| r.m_chi_ev == 1.0 || r.m_chi_ev == 1e6) {
            for (strategy, value) in [
                (Strategy::OffsetM0, row.offset),
                (Strategy::ZeemanFreeRbCs, row.zeeman_free),
                (Strategy::RabiVsRamsey, row.rabi_vs_ramsey),
            ] {
                let ratio = value / reference_limit(strategy, row.m_chi_ev, 0.4);
                assert!(ratio > 1.0 / 3.0 && ratio < 3.0, "{strategy:?} at {}: {ratio}", row.m_chi_ev);
            }
        }
        assert!(table1(&[], 0.4).is_err());
        assert_eq!(table1(&[5.0], 0.4).unwrap().exponents.offset, None);
    }
}
