use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::format::{fmt_sig, Cell, Payload};
use super::{Cli, CliError, Command, FringeKind, Outcome, RunConfig, ShiftKind};
use crate::ensemble::{
    ensemble_rabi_shift, ensemble_ramsey_shift, ensemble_ramsey_shift_checked, rabi_sigma_analytic,
    rabi_sigma_factor, rabi_sigma_montecarlo, CollisionTimeDistribution,
};
use crate::error::Warning;
use crate::rabi::{fig1_curve, rabi_p2, rabi_shift, rabi_shift_numeric, RabiConfig};
use crate::ramsey::{ramsey_p2_full, ramsey_p2_partial_wave, ramsey_p2_simplified, ramsey_shift, ramsey_shift_numeric, shift_validity};
use crate::scattering::{
    classify_regime, interference_integral_oracle, optical_theorem_check, AmplitudeModel, InterferenceConfig,
    KinematicsInput, PartialWaveSet, WavePacket,
};
use crate::sensitivity::{limit, loglog_slope, reference_limit, Strategy, CROSSOVER_MASS_EV};
use crate::units::ev_to_kg;

const DEFAULT_TRIALS: usize = 1_000_000;
const DEFAULT_FIG1_SAMPLES: usize = 101;
const DEFAULT_STEPS: usize = 101;
const DEFAULT_DV_A_MAX: f64 = 1e-3;
const CHECK_CASES: usize = 1000;
const CHECK_TOLERANCE: f64 = 1e-12;
const CHECK_KD: [f64; 3] = [20.0, 50.0, 100.0];
const CHECK_S_WAVE_PHASE: f64 = 0.05;

pub(super) fn dispatch(command: &Command, cfg: &RunConfig, cli: &Cli) -> Result<Outcome, CliError> {
    match command {
        Command::Fringe { kind } => fringe(*kind, cfg),
        Command::Shift { kind } => shift(*kind, cfg),
        Command::Fig1 => fig1(cfg),
        Command::Nsc => nsc(cfg),
        Command::Table1 => table(cfg),
        Command::Mc => montecarlo(cfg, cli.seed.or(cfg.seed)),
        Command::Regime => regime(cfg),
        Command::Check => check(cli.seed.or(cfg.seed).unwrap_or(0), cli.slow),
    }
}

fn done(payload: Payload, notes: Vec<String>) -> Outcome {
    Outcome {
        payload,
        seed: None,
        notes,
        failed: false,
    }
}

fn notes(warnings: &[Warning]) -> Vec<String> {
    warnings.iter().map(|w| w.to_string()).collect()
}

fn sweep(cfg: &RunConfig, default_start: f64, default_stop: f64) -> Vec<f64> {
    let start = cfg.sweep_start.unwrap_or(default_start);
    let stop = cfg.sweep_stop.unwrap_or(default_stop);
    let steps = cfg.steps.unwrap_or(DEFAULT_STEPS);
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn forward_difference(f1: &AmplitudeModel, f2: &AmplitudeModel) -> f64 {
    (f1.forward() - f2.forward()).re
}

fn fringe(kind: FringeKind, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let packet = cfg.packet()?;
    let (f1, f2) = cfg.amplitudes(&packet)?;
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    match kind {
        FringeKind::Ramsey => {
            let partial_waves = cfg.phases1_rad.is_some();
            for phi in sweep(cfg, -PI, PI) {
                let p2 = if partial_waves {
                    let v = ramsey_p2_full(phi, &f1, &f2, &packet)?;
                    warnings.extend(v.warnings);
                    v.p2
                } else {
                    ramsey_p2_simplified(phi, cfg.re_df(), &packet)
                };
                rows.push(vec![Cell::Num(phi), Cell::Num(p2), Cell::Num(1.0 - p2)]);
            }
            Ok(done(Payload::table(&["phi_rad", "P2", "P1"], rows), notes(&warnings)))
        }
        FringeKind::Rabi => {
            let omega = cfg.omega();
            let base = RabiConfig::new(omega, cfg.interrogation_time(), 0.0, cfg.collision_time())?;
            for delta in sweep(cfg, -2.0 * omega, 2.0 * omega) {
                let v = rabi_p2(&base.with_delta(delta)?, &f1, &f2, &packet)?;
                warnings.extend(v.warnings);
                rows.push(vec![Cell::Num(delta), Cell::Num(v.p2)]);
            }
            Ok(done(Payload::table(&["delta_rad_s", "P2"], rows), notes(&warnings)))
        }
    }
}

fn numeric_check(analytic: f64, numeric: f64) -> Value {
    let deviation = if analytic == 0.0 {
        numeric.abs()
    } else {
        ((numeric - analytic) / analytic).abs()
    };
    json!({ "delta_max_rad_s": numeric, "relative_deviation": deviation })
}

fn shift(kind: ShiftKind, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = cfg.interrogation_time();
    let (name, analytic, check, warnings) = match kind {
        ShiftKind::Ramsey | ShiftKind::Rabi => {
            let packet = cfg.packet()?;
            let (f1, f2) = cfg.amplitudes(&packet)?;
            let re_df = forward_difference(&f1, &f2);
            if kind == ShiftKind::Ramsey {
                let a = ramsey_shift(re_df, &packet, t)?;
                let n = ramsey_shift_numeric(re_df, &packet, t)?;
                ("ramsey", a, numeric_check(a, n), shift_validity(a, t).into_iter().collect())
            } else {
                RabiConfig::new(cfg.omega(), t, 0.0, cfg.collision_time())?.check_pi_pulse()?;
                let a = rabi_shift(cfg.collision_time(), re_df, &packet, t)?;
                let n = rabi_shift_numeric(cfg.collision_time(), re_df, &packet, t)?;
                ("rabi", a, numeric_check(a, n), Vec::new())
            }
        }
        ShiftKind::EnsembleRamsey => {
            let pop = cfg.population()?;
            ("ensemble-ramsey", ensemble_ramsey_shift_checked(&pop, cfg.re_df(), t)?, Value::Null, Vec::new())
        }
        ShiftKind::EnsembleRabi => {
            let pop = cfg.population()?;
            let a = ensemble_rabi_shift(&pop, cfg.re_df(), &CollisionTimeDistribution::Uniform, cfg.omega(), t)?;
            ("ensemble-rabi", a, Value::Null, Vec::new())
        }
    };
    let payload = json!({
        "kind": name,
        "delta_max_rad_s": analytic,
        "numeric_check": check,
        "warnings": warnings,
    });
    Ok(done(Payload::Object(payload), notes(&warnings)))
}

fn fig1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = fig1_curve(cfg.samples.unwrap_or(DEFAULT_FIG1_SAMPLES), cfg.interrogation_time())?
        .into_iter()
        .map(|r| vec![Cell::Num(r.t_c_over_t), Cell::Num(r.rabi), Cell::Num(r.ramsey)])
        .collect();
    Ok(done(Payload::table(&["t_c_over_T", "rabi_shift", "ramsey_shift"], rows), Vec::new()))
}

fn order_of_magnitude(x: f64) -> String {
    if x > 0.0 {
        format!("1e{}", x.log10().round() as i64)
    } else {
        "0".to_string()
    }
}

fn nsc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pop = cfg.population()?;
    let t = cfg.interrogation_time();
    let count = pop.n_sc(t)?;
    let payload = json!({
        "m_chi_eV": pop.m_chi_ev(),
        "n_per_m3": pop.n(),
        "v_m_s": pop.v(),
        "d_eff_m": pop.d_eff(),
        "r_A_m": pop.r_a(),
        "T_s": t,
        "n_sc": count.value,
        "short_range_limit": count.short_range,
        "long_range_limit": count.long_range,
        "order_of_magnitude": order_of_magnitude(count.value),
    });
    let notes = crate::ensemble::event_count_warning(count.value)
        .map(|w| vec![w.to_string()])
        .unwrap_or_default();
    Ok(done(Payload::Object(payload), notes))
}

fn table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let masses = cfg.masses();
    let rho = cfg.scenario(Strategy::OffsetM0, 1.0).rho_gev_cm3;
    let rows: Vec<_> = masses
        .iter()
        .map(|&m| {
            let get = |strategy| limit(&cfg.scenario(strategy, m));
            Ok((
                m,
                get(Strategy::OffsetM0)?.value,
                get(Strategy::ZeemanFreeRbCs)?.value,
                get(Strategy::RabiVsRamsey)?,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    let slope = |pts: Vec<(f64, f64)>| loglog_slope(&pts);
    let offset_exp = slope(rows.iter().map(|r| (r.0, r.1)).collect());
    let zeeman_exp = slope(rows.iter().map(|r| (r.0, r.2)).collect());
    let heavy_exp = slope(rows.iter().filter(|r| r.0 >= CROSSOVER_MASS_EV).map(|r| (r.0, r.3.value)).collect());
    let light_exp = slope(rows.iter().filter(|r| r.0 <= CROSSOVER_MASS_EV).map(|r| (r.0, r.3.value)).collect());

    let mut header = vec![
        "strategy".to_string(),
        "branch".to_string(),
        "exponent".to_string(),
        "table_exponent".to_string(),
    ];
    header.extend(masses.iter().map(|m| format!("m_chi_eV={}", fmt_sig(*m))));
    let exp_cell = |e: Option<f64>| e.map(Cell::Num).unwrap_or(Cell::Empty);
    let mut out = Vec::new();
    let mut line = |name: &str, branch: &str, e: Option<f64>, table_e: f64, keep: &dyn Fn(f64) -> bool, pick: &dyn Fn(usize) -> f64| {
        let mut row = vec![Cell::Text(name.into()), Cell::Text(branch.into()), exp_cell(e), Cell::Num(table_e)];
        row.extend(masses.iter().enumerate().map(|(i, &m)| if keep(m) { Cell::Num(pick(i)) } else { Cell::Empty }));
        out.push(row);
    };
    line("offset_m0", "all", offset_exp, 2.0, &|_| true, &|i| rows[i].1);
    line("zeeman_free_rb_cs", "all", zeeman_exp, 2.0, &|_| true, &|i| rows[i].2);
    line("rabi_vs_ramsey", "m_chi>=1e4eV", heavy_exp, 1.5, &|m| m >= CROSSOVER_MASS_EV, &|i| rows[i].3.value);
    line("rabi_vs_ramsey", "m_chi<=1e4eV", light_exp, 0.5, &|m| m <= CROSSOVER_MASS_EV, &|i| rows[i].3.value);
    let mut reference = vec![Cell::Text("reference_rabi".into()), Cell::Text("table".into()), Cell::Empty, Cell::Empty];
    reference.extend(masses.iter().map(|&m| Cell::Num(reference_limit(Strategy::RabiVsRamsey, m, rho))));
    out.push(reference);
    let mut reference = vec![Cell::Text("reference_offset".into()), Cell::Text("table".into()), Cell::Empty, Cell::Empty];
    reference.extend(masses.iter().map(|&m| Cell::Num(reference_limit(Strategy::OffsetM0, m, rho))));
    out.push(reference);
    let mut events = vec![Cell::Text("n_sc".into()), Cell::Text("point_like".into()), Cell::Empty, Cell::Empty];
    events.extend(rows.iter().map(|r| Cell::Num(r.3.n_sc.unwrap_or(f64::NAN))));
    out.push(events);

    let notes = rows
        .iter()
        .flat_map(|r| r.3.warnings.iter().map(move |w| format!("m_chi = {} eV: {w}", fmt_sig(r.0))))
        .collect();
    Ok(done(Payload::Table { header, rows: out }, notes))
}

fn montecarlo(cfg: &RunConfig, seed: Option<u64>) -> Result<Outcome, CliError> {
    let seed = seed.ok_or_else(|| CliError::Config("mc requires --seed or the `seed` config key".into()))?;
    let pop = cfg.population()?;
    let re_df = cfg.re_df();
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let stats = rabi_sigma_montecarlo(&pop, re_df, trials, seed)?;
    let payload = json!({
        "trials": stats.trials,
        "seed": stats.seed,
        "rng": crate::ensemble::RNG_NAME,
        "mean_rad_s": stats.mean,
        "mean_standard_error_rad_s": stats.mean_standard_error,
        "sigma_rad_s": stats.sigma,
        "sigma_standard_error_rad_s": stats.standard_error,
        "analytic_mean_rad_s": ensemble_ramsey_shift(&pop, re_df),
        "analytic_sigma_rad_s": rabi_sigma_analytic(&pop, re_df),
        "sigma_factor": rabi_sigma_factor(),
    });
    Ok(Outcome {
        seed: Some(seed),
        ..done(Payload::Object(payload), Vec::new())
    })
}

fn regime(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pop = cfg.population()?;
    let input = KinematicsInput {
        m_a: cfg.atom_mass(),
        m_chi: ev_to_kg(pop.m_chi_ev()),
        v_chi_i: pop.v(),
        dv_a_max: cfg.dv_a_max_m_s.unwrap_or(DEFAULT_DV_A_MAX),
    };
    let report = classify_regime(&input)?;
    Ok(done(Payload::object(&json!({ "input": input, "report": report })), Vec::new()))
}

fn random_phases(rng: &mut ChaCha8Rng) -> PartialWaveSet {
    let len = rng.random_range(1..=9);
    let phases = (0..len).map(|_| rng.random_range(-0.3..=0.3)).collect();
    PartialWaveSet::new(phases).expect("non-empty phase list")
}

fn check(seed: u64, slow: bool) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut optical_gap: f64 = 0.0;
    let mut equivalence_gap: f64 = 0.0;
    for _ in 0..CHECK_CASES {
        let k = rng.random_range(0.5..5.0);
        let set1 = random_phases(&mut rng);
        let set2 = random_phases(&mut rng);
        optical_gap = optical_gap.max(optical_theorem_check(&set1, k)?.relative_gap());

        let packet = WavePacket::with_wavenumber(k, rng.random_range(1.0..10.0) / k, 1.0)?;
        let phi = rng.random_range(-PI / 2.0..PI / 2.0);
        let f1 = AmplitudeModel::partial_waves(set1.clone(), k)?;
        let f2 = AmplitudeModel::partial_waves(set2.clone(), k)?;
        let full = ramsey_p2_full(phi, &f1, &f2, &packet)?.p2;
        let pw = ramsey_p2_partial_wave(phi, &set1, &set2, &packet);
        equivalence_gap = equivalence_gap.max((full - pw).abs() / full.abs().max(pw.abs()));
    }
    let optical_ok = optical_gap <= CHECK_TOLERANCE;
    let equivalence_ok = equivalence_gap <= CHECK_TOLERANCE;

    let mut interference = Value::Null;
    let mut interference_ok = true;
    if slow {
        let phases = PartialWaveSet::s_wave(CHECK_S_WAVE_PHASE)?;
        let icfg = InterferenceConfig::default();
        let results = CHECK_KD
            .iter()
            .map(|&kd| {
                let packet = WavePacket::with_wavenumber(1.0, kd, 1.0)?;
                interference_integral_oracle(&packet, &phases, &icfg)
            })
            .collect::<Result<Vec<_>, _>>()?;
        interference_ok = results.iter().all(|r| r.within_tolerance);
        interference = serde_json::to_value(&results).expect("results serialize");
    }
    let pass = optical_ok && equivalence_ok && interference_ok;
    let payload = json!({
        "seed": seed,
        "cases": CHECK_CASES,
        "optical_theorem": { "max_relative_gap": optical_gap, "tolerance": CHECK_TOLERANCE, "pass": optical_ok },
        "partial_wave_equivalence": { "max_relative_gap": equivalence_gap, "tolerance": CHECK_TOLERANCE, "pass": equivalence_ok },
        "interference": interference,
        "pass": pass,
    });
    Ok(Outcome {
        payload: Payload::Object(payload),
        seed: Some(seed),
        notes: Vec::new(),
        failed: !pass,
    })
}
