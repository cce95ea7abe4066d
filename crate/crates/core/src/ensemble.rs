//! Many-scatterer estimates: expected event counts, ensemble frequency
//! shifts, and the spread of the Rabi shift over random collision times.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, ScatterError, Warning};
use crate::units::{ev_to_kg, number_density, C_LIGHT, CS133_MASS_KG, HBAR};

pub const DEFAULT_RHO_GEV_CM3: f64 = 0.4;
pub const DEFAULT_VELOCITY: f64 = 1e-3 * C_LIGHT;
/// Atom packet width for µK-class laser-cooled atoms.
pub const DEFAULT_ATOM_WIDTH: f64 = 1e-8;
pub const DEFAULT_INTERROGATION_TIME: f64 = 1.0;
/// Scatterer packet width at 1 eV; scales as 1/m.
pub const SCATTERER_WIDTH_AT_1EV: f64 = 1e-4;
/// N_sc·k·|f| at or above which the linear superposition of scattered
/// waves is refused.
pub const SUPERPOSITION_LIMIT: f64 = 0.1;
/// Name of the Monte Carlo generator, echoed in output metadata.
pub const RNG_NAME: &str = "ChaCha8Rng";
const MC_BATCH: usize = 1 << 16;

/// √(π²/8 − 1): RMS deviation of (π/2)·sin(Ωt_c) from its mean for
/// uniform collision times.
pub fn rabi_sigma_factor() -> f64 {
    (PI * PI / 8.0 - 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AtomCooling {
    MicroKelvin,
    Width(f64),
}

/// (d_a, d_chi) from the uncertainty principle and the atom temperature.
pub fn packet_widths(m_chi_ev: f64, cooling: AtomCooling) -> Result<(f64, f64)> {
    positive("m_chi", m_chi_ev)?;
    let d_a = match cooling {
        AtomCooling::MicroKelvin => DEFAULT_ATOM_WIDTH,
        AtomCooling::Width(w) => positive("d_a", w)?,
    };
    Ok((d_a, SCATTERER_WIDTH_AT_1EV / m_chi_ev))
}

fn positive(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(ScatterError::invalid(field, format!("must be finite and > 0, got {x}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScattererPopulation {
    n: f64,
    m_chi_ev: f64,
    m_a: f64,
    v: f64,
    r_a: Option<f64>,
    d_a: f64,
    d_chi: f64,
    allow_nonlinear: bool,
}

impl ScattererPopulation {
    /// Population with local mass density `rho_gev_cm3` of particles of
    /// mass `m_chi_ev`, with default speed, widths and point-like range.
    pub fn from_density(rho_gev_cm3: f64, m_chi_ev: f64) -> Result<Self> {
        positive("rho_chi", rho_gev_cm3)?;
        positive("m_chi", m_chi_ev)?;
        Self::from_number_density(number_density(rho_gev_cm3, m_chi_ev), m_chi_ev)
    }

    pub fn from_number_density(n: f64, m_chi_ev: f64) -> Result<Self> {
        positive("n", n)?;
        let (d_a, d_chi) = packet_widths(m_chi_ev, AtomCooling::MicroKelvin)?;
        Ok(ScattererPopulation {
            n,
            m_chi_ev,
            m_a: CS133_MASS_KG,
            v: DEFAULT_VELOCITY,
            r_a: None,
            d_a,
            d_chi,
            allow_nonlinear: false,
        })
    }

    pub fn with_velocity(mut self, v: f64) -> Result<Self> {
        self.v = positive("v", v)?;
        Ok(self)
    }

    /// Finite interaction range; `None` is the point-like limit r_A ≪ d.
    pub fn with_range(mut self, r_a: Option<f64>) -> Result<Self> {
        self.r_a = r_a.map(|r| positive("r_A", r)).transpose()?;
        Ok(self)
    }

    pub fn with_atom_width(mut self, d_a: f64) -> Result<Self> {
        self.d_a = positive("d_a", d_a)?;
        Ok(self)
    }

    pub fn with_scatterer_width(mut self, d_chi: f64) -> Result<Self> {
        self.d_chi = positive("d_chi", d_chi)?;
        Ok(self)
    }

    pub fn with_atom_mass(mut self, m_a: f64) -> Result<Self> {
        self.m_a = positive("m_a", m_a)?;
        Ok(self)
    }

    /// Permit N_sc·k·|f| ≥ 0.1, where multiple scattering is no longer
    /// negligible.
    pub fn with_superposition_override(mut self, allow: bool) -> Self {
        self.allow_nonlinear = allow;
        self
    }

    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn m_chi_ev(&self) -> f64 {
        self.m_chi_ev
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn r_a(&self) -> Option<f64> {
        self.r_a
    }
    pub fn d_a(&self) -> f64 {
        self.d_a
    }
    pub fn d_chi(&self) -> f64 {
        self.d_chi
    }

    pub fn d_eff(&self) -> f64 {
        self.d_a.max(self.d_chi)
    }

    /// Exact reduced mass of scatterer and atom, kg.
    pub fn mu(&self) -> f64 {
        let m = ev_to_kg(self.m_chi_ev);
        m * self.m_a / (m + self.m_a)
    }

    /// Relative wave number μv/ħ.
    pub fn k(&self) -> f64 {
        self.mu() * self.v / HBAR
    }

    pub fn n_sc(&self, t: f64) -> Result<EventCount> {
        positive("T", t)?;
        let d = self.d_eff();
        let flux = self.n * self.v * t;
        let short_range = 2.0 * PI * flux * d * d;
        let (value, long_range) = match self.r_a {
            None => (short_range, None),
            Some(r) => {
                let area = PI * r * r;
                let capture = -(-(r * r) / (2.0 * d * d)).exp_m1();
                (flux * area / capture, Some(flux * area))
            }
        };
        Ok(EventCount {
            value,
            long_range,
            short_range,
        })
    }

    /// Refuses N_sc·k·|f| ≥ 0.1 unless overridden; returns the product.
    pub fn check_superposition(&self, t: f64, f_abs: f64) -> Result<f64> {
        let product = self.n_sc(t)?.value * self.k() * f_abs.abs();
        if product >= SUPERPOSITION_LIMIT && !self.allow_nonlinear {
            return Err(ScatterError::SuperpositionBreakdown { product });
        }
        Ok(product)
    }
}

/// Expected scattering events per interrogation, with the long-range
/// (r_A ≫ d) and point-like (r_A ≪ d) closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventCount {
    pub value: f64,
    pub long_range: Option<f64>,
    pub short_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CollisionTimeDistribution {
    Uniform,
    /// Event rate dN/dt sampled at increasing times spanning [0, T].
    Tabulated { times: Vec<f64>, rates: Vec<f64> },
}

impl CollisionTimeDistribution {
    /// Tabulated rates proportional to `shape`, scaled so that they integrate
    /// to `n_sc` over the grid.
    pub fn normalized(times: Vec<f64>, shape: Vec<f64>, n_sc: f64) -> Result<Self> {
        check_table(&times, &shape)?;
        let total = trapezoid(&times, &shape);
        if total <= 0.0 {
            return Err(ScatterError::invalid("rates", "integral must be positive"));
        }
        let rates = shape.iter().map(|r| r * n_sc / total).collect();
        Ok(CollisionTimeDistribution::Tabulated { times, rates })
    }
}

fn check_table(times: &[f64], rates: &[f64]) -> Result<()> {
    if times.len() != rates.len() || times.len() < 2 {
        return Err(ScatterError::invalid("rates", "need at least two (time, rate) pairs of equal length"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ScatterError::invalid("times", "must be strictly increasing"));
    }
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(ScatterError::invalid("rates", "must be finite and non-negative"));
    }
    Ok(())
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// δ_max = 2π·n·ħ·Re Δf/μ, the same for every collision time.
pub fn ensemble_ramsey_shift(pop: &ScattererPopulation, re_df: f64) -> f64 {
    2.0 * PI * pop.n * HBAR * re_df / pop.mu()
}

/// [`ensemble_ramsey_shift`] after the superposition check for an
/// interrogation of length `t`, with |f| estimated by |Re Δf|.
pub fn ensemble_ramsey_shift_checked(pop: &ScattererPopulation, re_df: f64, t: f64) -> Result<f64> {
    pop.check_superposition(t, re_df)?;
    Ok(ensemble_ramsey_shift(pop, re_df))
}

/// Rabi shift summed over events distributed in time as `dist`, for a
/// π pulse (ΩT = π within 1e-9).
pub fn ensemble_rabi_shift(
    pop: &ScattererPopulation,
    re_df: f64,
    dist: &CollisionTimeDistribution,
    omega: f64,
    t: f64,
) -> Result<f64> {
    positive("omega", omega)?;
    positive("T", t)?;
    if (omega * t - PI).abs() > crate::rabi::PI_PULSE_TOL {
        return Err(ScatterError::invalid("omega", "ensemble Rabi shift needs Omega*T = pi"));
    }
    pop.check_superposition(t, re_df)?;
    let events = pop.n_sc(t)?.value;
    let prefactor = PI * PI * pop.n * HBAR * re_df / pop.mu();
    // ∫ (dN/dt) sin(Ωt) dt / N_sc
    let weight = match dist {
        CollisionTimeDistribution::Uniform => (1.0 - (omega * t).cos()) / (omega * t),
        CollisionTimeDistribution::Tabulated { times, rates } => {
            check_table(times, rates)?;
            let (t0, t1) = (times[0], times[times.len() - 1]);
            if t0.abs() > 1e-12 * t || (t1 - t).abs() > 1e-12 * t {
                return Err(ScatterError::invalid("times", "tabulated grid must span [0, T]"));
            }
            let total = trapezoid(times, rates);
            if ((total - events) / events).abs() > 1e-9 {
                return Err(ScatterError::invalid(
                    "rates",
                    format!("rate integral {total:.9e} does not match N_sc = {events:.9e}"),
                ));
            }
            let weighted: Vec<f64> = times
                .iter()
                .zip(rates)
                .map(|(&tc, &r)| r * (omega * tc).sin())
                .collect();
            trapezoid(times, &weighted) / events
        }
    };
    Ok(prefactor * weight)
}

/// σ of the single-event Rabi shift for uniform collision times.
pub fn rabi_sigma_analytic(pop: &ScattererPopulation, re_df: f64) -> f64 {
    ensemble_ramsey_shift(pop, re_df) * rabi_sigma_factor()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloStats {
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub sigma: f64,
    /// Standard error of `mean`.
    pub mean_standard_error: f64,
    /// Standard error of `sigma`.
    pub standard_error: f64,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    count: f64,
    // Power sums of x − 1, x = (π/2)·sin(Ωt_c); the shift keeps them small.
    s1: f64,
    s2: f64,
    s3: f64,
    s4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        let y = x - 1.0;
        let y2 = y * y;
        self.count += 1.0;
        self.s1 += y;
        self.s2 += y2;
        self.s3 += y2 * y;
        self.s4 += y2 * y2;
    }

    fn merge(self, o: Moments) -> Moments {
        Moments {
            count: self.count + o.count,
            s1: self.s1 + o.s1,
            s2: self.s2 + o.s2,
            s3: self.s3 + o.s3,
            s4: self.s4 + o.s4,
        }
    }
}

/// Samples t_c ~ U[0, T] and returns statistics of the single-event Rabi
/// shift. Trials are split into fixed-size batches, each drawn from its
/// own ChaCha8 stream of `seed`, and merged in batch order, so the result
/// does not depend on the thread count.
pub fn rabi_sigma_montecarlo(
    pop: &ScattererPopulation,
    re_df: f64,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloStats> {
    if trials < 100 {
        return Err(ScatterError::invalid("trials", format!("need at least 100, got {trials}")));
    }
    let batches = trials.div_ceil(MC_BATCH);
    let per_batch: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let size = MC_BATCH.min(trials - b * MC_BATCH);
            let mut m = Moments::default();
            for _ in 0..size {
                let u: f64 = rng.random();
                m.push(FRAC_PI_2 * (PI * u).sin());
            }
            m
        })
        .collect();
    let m = per_batch.into_iter().fold(Moments::default(), Moments::merge);

    let n = m.count;
    let mean_y = m.s1 / n;
    let raw2 = m.s2 / n;
    let raw3 = m.s3 / n;
    let raw4 = m.s4 / n;
    let var = (raw2 - mean_y * mean_y) * n / (n - 1.0);
    let central4 = raw4 - 4.0 * mean_y * raw3 + 6.0 * mean_y * mean_y * raw2 - 3.0 * mean_y.powi(4);
    let sd = var.sqrt();
    let var_of_var = (central4 - var * var).max(0.0) / n;

    let scale = ensemble_ramsey_shift(pop, re_df);
    Ok(MonteCarloStats {
        trials,
        seed,
        mean: scale * (1.0 + mean_y),
        sigma: scale.abs() * sd,
        mean_standard_error: scale.abs() * sd / n.sqrt(),
        standard_error: scale.abs() * var_of_var.sqrt() / (2.0 * sd),
    })
}

/// σ reduced by averaging over `n_a` atoms and `n_sc` events.
pub fn averaged_sigma(sigma_single: f64, n_a: f64, n_sc: f64) -> Result<f64> {
    if !(n_a >= 1.0) {
        return Err(ScatterError::invalid("N_a", format!("must be >= 1, got {n_a}")));
    }
    positive("N_sc", n_sc)?;
    Ok(sigma_single / (n_a * n_sc).sqrt())
}

/// Attaches a note when fewer than one event is expected per cycle.
pub fn event_count_warning(n_sc: f64) -> Option<Warning> {
    (n_sc < 1.0).then_some(Warning::SubUnitEventCount { n_sc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn light(m: f64) -> ScattererPopulation {
        ScattererPopulation::from_density(DEFAULT_RHO_GEV_CM3, m).unwrap()
    }

    #[test]
    fn widths() {
        assert_eq!(packet_widths(1.0, AtomCooling::MicroKelvin).unwrap(), (1e-8, 1e-4));
        let (d_a, d_chi) = packet_widths(1e4, AtomCooling::MicroKelvin).unwrap();
        assert_relative_eq!(d_chi, d_a, max_relative = 1e-15);
        assert_eq!(light(1e6).d_eff(), 1e-8);
        assert_eq!(packet_widths(1.0, AtomCooling::Width(3e-8)).unwrap().0, 3e-8);
        assert!(packet_widths(0.0, AtomCooling::MicroKelvin).is_err());
    }

    #[test]
    fn event_count_benchmarks() {
        // Frozen from 2π·n·d²·v·T with n = 4e14/m, v = 1e-3c.
        let heavy = light(1e5).with_velocity(3e5).unwrap().n_sc(1.0).unwrap();
        assert_relative_eq!(heavy.value, 0.7539822368615503, max_relative = 1e-12);
        assert_relative_eq!(heavy.value * 1e5, 7.539822368615503e4, max_relative = 1e-12);
        let one = light(1.0).with_velocity(3e5).unwrap().n_sc(1.0).unwrap();
        assert_relative_eq!(one.value, 7.539822368615503e12, max_relative = 1e-12);
        assert!(one.value / 1e13 > 0.5 && one.value / 1e13 < 2.0);
    }

    #[test]
    fn event_count_limits() {
        let p = light(1.0);
        let d = p.d_eff();
        let short = p.clone().with_range(Some(1e-3 * d)).unwrap().n_sc(1.0).unwrap();
        assert!((short.value / short.short_range - 1.0).abs() < 1e-6);
        let long = p.with_range(Some(1e3 * d)).unwrap().n_sc(1.0).unwrap();
        assert!((long.value / long.long_range.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ramsey_shift_examples() {
        let p = light(1.0);
        assert_eq!(ensemble_ramsey_shift(&p, 0.0), 0.0);
        assert_relative_eq!(p.n(), 4e14, max_relative = 1e-15);
        let shift = ensemble_ramsey_shift(&p, 6.7e-23);
        assert!((shift / 1e-5 - 1.0).abs() < 0.01, "{shift}");
        for (tf, vf) in [(0.1, 1.0), (10.0, 1.0), (1.0, 0.1), (1.0, 10.0)] {
            let q = p.clone().with_velocity(DEFAULT_VELOCITY * vf).unwrap();
            let a = ensemble_ramsey_shift_checked(&q, 6.7e-23, tf).unwrap();
            assert_relative_eq!(a, shift, max_relative = 1e-12);
        }
    }

    #[test]
    fn rabi_shift_uniform_matches_ramsey() {
        let p = light(1.0);
        let t = 0.8;
        let r = ensemble_rabi_shift(&p, 6.7e-23, &CollisionTimeDistribution::Uniform, PI / t, t).unwrap();
        assert_relative_eq!(r, ensemble_ramsey_shift(&p, 6.7e-23), max_relative = 1e-12);
        let zero = ensemble_rabi_shift(&p, 0.0, &CollisionTimeDistribution::Uniform, PI / t, t).unwrap();
        assert_eq!(zero, 0.0);
        assert!(ensemble_rabi_shift(&p, 1e-23, &CollisionTimeDistribution::Uniform, 1.0, t).is_err());
    }

    #[test]
    fn rabi_shift_spike_is_pi_over_two() {
        let p = light(1.0);
        let t = 1.0;
        let n = 200_001;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * t).collect();
        let width = 1e-3;
        let shape: Vec<f64> = times.iter().map(|&x| (-((x - 0.5) / width).powi(2) / 2.0).exp()).collect();
        let n_sc = p.n_sc(t).unwrap().value;
        let dist = CollisionTimeDistribution::normalized(times, shape, n_sc).unwrap();
        let r = ensemble_rabi_shift(&p, 1e-23, &dist, PI / t, t).unwrap();
        // Gaussian smearing reduces sin at the peak by ≈ (πw)²/2.
        assert_relative_eq!(r / ensemble_ramsey_shift(&p, 1e-23), FRAC_PI_2, max_relative = 1e-5);
    }

    #[test]
    fn tabulated_normalization_is_checked() {
        let p = light(1.0);
        let dist = CollisionTimeDistribution::Tabulated {
            times: vec![0.0, 0.5, 1.0],
            rates: vec![1.0, 1.0, 1.0],
        };
        assert!(matches!(
            ensemble_rabi_shift(&p, 1e-23, &dist, PI, 1.0),
            Err(ScatterError::InvalidInput { field: "rates", .. })
        ));
    }

    #[test]
    fn superposition_guard() {
        let p = light(1.0);
        assert!(matches!(
            ensemble_ramsey_shift_checked(&p, 1e-10, 1.0),
            Err(ScatterError::SuperpositionBreakdown { .. })
        ));
        let q = p.with_superposition_override(true);
        assert!(ensemble_ramsey_shift_checked(&q, 1e-10, 1.0).is_ok());
    }

    #[test]
    fn sigma_factor() {
        assert_relative_eq!(rabi_sigma_factor(), 0.483425847608679, max_relative = 1e-12);
        let p = light(3.0);
        assert_eq!(rabi_sigma_analytic(&p, 0.0), 0.0);
        assert_relative_eq!(
            rabi_sigma_analytic(&p, 2e-22) / ensemble_ramsey_shift(&p, 2e-22),
            rabi_sigma_factor(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn montecarlo_matches_analytic_and_is_deterministic() {
        let p = light(1.0);
        let mc = rabi_sigma_montecarlo(&p, 6.7e-23, 1_000_000, 7).unwrap();
        let mean = ensemble_ramsey_shift(&p, 6.7e-23);
        assert!((mc.mean - mean).abs() < 3.0 * mc.mean_standard_error);
        assert!((mc.sigma - rabi_sigma_analytic(&p, 6.7e-23)).abs() < 3.0 * mc.standard_error);
        let again = rabi_sigma_montecarlo(&p, 6.7e-23, 1_000_000, 7).unwrap();
        assert_eq!(mc, again);
        assert!(rabi_sigma_montecarlo(&p, 1e-23, 99, 7).is_err());
    }

    #[test]
    fn montecarlo_error_shrinks_as_inverse_sqrt() {
        let p = light(1.0);
        let exact = rabi_sigma_analytic(&p, 1e-22);
        let seeds = 32;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for trials in [10_000usize, 100_000, 1_000_000] {
            let mse: f64 = (0..seeds)
                .map(|s| {
                    let mc = rabi_sigma_montecarlo(&p, 1e-22, trials, 1000 + s).unwrap();
                    (mc.sigma - exact).powi(2)
                })
                .sum::<f64>()
                / seeds as f64;
            xs.push((trials as f64).log10());
            ys.push(mse.sqrt().log10());
        }
        let slope = (ys[2] - ys[0]) / (xs[2] - xs[0]);
        assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn averaging() {
        assert_eq!(averaged_sigma(2.0, 1.0, 1.0).unwrap(), 2.0);
        assert_relative_eq!(averaged_sigma(1.0, 5e6, 1e5).unwrap(), 1.0 / 5e11f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            averaged_sigma(1.0, 4e6, 7.0).unwrap() * 2.0,
            averaged_sigma(1.0, 1e6, 7.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(averaged_sigma(1.0, 0.5, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn linear_in_re_df_and_n(n in 1e10f64..1e20, a in -1e-20f64..1e-20, b in -1e-20f64..1e-20) {
            let p = ScattererPopulation::from_number_density(n, 10.0).unwrap();
            let q = ScattererPopulation::from_number_density(2.0 * n, 10.0).unwrap();
            let sum = ensemble_ramsey_shift(&p, a + b);
            let parts = ensemble_ramsey_shift(&p, a) + ensemble_ramsey_shift(&p, b);
            prop_assert!((sum - parts).abs() <= 1e-12 * (sum.abs() + parts.abs()) + 1e-300);
            let ratio = ensemble_ramsey_shift(&q, a) / ensemble_ramsey_shift(&p, a);
            prop_assert!(a == 0.0 || (ratio - 2.0).abs() < 1e-14);
        }

        #[test]
        fn event_count_between_limits(ratio in 1e-3f64..1e3) {
            let p = light(1.0);
            let r = ratio * p.d_eff();
            let c = p.with_range(Some(r)).unwrap().n_sc(1.0).unwrap();
            prop_assert!(c.value >= c.long_range.unwrap() * (1.0 - 1e-12));
            prop_assert!(c.value >= c.short_range * (1.0 - 1e-12));
        }
    }
}
