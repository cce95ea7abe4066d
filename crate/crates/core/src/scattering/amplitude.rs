use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::quadrature::{gauss_legendre, integrate, QuadConfig};

/// Scattering amplitude in metres.
pub type ComplexAmplitude = Complex64;


/// Real phase shifts δ_ℓ for ℓ = 0..=ℓ_max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialWaveSet {
    phases: Vec<f64>,
}

impl PartialWaveSet {
    pub const DEFAULT_L_MAX: usize = 8;
    pub const L_MAX_CAP: usize = 64;

    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(ScatterError::invalid("phases", "phase list is empty"));
        }
        if phases.len() > Self::L_MAX_CAP + 1 {
            return Err(ScatterError::invalid(
                "phases",
                format!(
                    "l_max = {} exceeds the cap of {}; truncate explicitly",
                    phases.len() - 1,
                    Self::L_MAX_CAP
                ),
            ));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(ScatterError::invalid("phases", format!("non-finite phase {bad}")));
        }
        Ok(PartialWaveSet { phases })
    }

    /// Pure s-wave set.
    pub fn s_wave(delta0: f64) -> Result<Self> {
        Self::new(vec![delta0])
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn l_max(&self) -> usize {
        self.phases.len() - 1
    }

    /// δ_ℓ, zero beyond ℓ_max.
    pub fn phase(&self, l: usize) -> f64 {
        self.phases.get(l).copied().unwrap_or(0.0)
    }

    /// Keep ℓ ≤ `l_max` only.
    pub fn truncated(&self, l_max: usize) -> Self {
        let n = (l_max + 1).min(self.phases.len());
        PartialWaveSet {
            phases: self.phases[..n].to_vec(),
        }
    }

    /// Partial-wave coefficients (2ℓ+1)(e^{2iδ_ℓ} − 1)/(2ik), evaluated as
    /// (2ℓ+1)·e^{iδ}·sin δ/k to avoid cancellation at small δ.
    pub fn coefficients(&self, k: f64) -> Vec<Complex64> {
        self.phases
            .iter()
            .enumerate()
            .map(|(l, &delta)| {
                let two_l1 = 2.0 * l as f64 + 1.0;
                let (s, c) = delta.sin_cos();
                Complex64::new(c, s) * (two_l1 * s / k)
            })
            .collect()
    }
}

/// Σ c_ℓ P_ℓ(x) with the Legendre recurrence run inline.
pub(crate) fn legendre_series(coeffs: &[Complex64], x: f64) -> Complex64 {
    let mut sum = coeffs[0];
    if coeffs.len() == 1 {
        return sum;
    }
    let (mut p_prev, mut p) = (1.0, x);
    sum += coeffs[1] * p;
    for (l, c) in coeffs.iter().enumerate().skip(2) {
        let lf = (l - 1) as f64;
        let next = ((2.0 * lf + 1.0) * x * p - lf * p_prev) / (lf + 1.0);
        p_prev = p;
        p = next;
        sum += c * p;
    }
    sum
}

/// f(θ) tabulated on an ascending cos θ grid spanning [-1, 1], linearly
/// interpolated between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularTable {
    cos_grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl AngularTable {
    pub fn new(cos_grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if cos_grid.len() < 2 || cos_grid.len() != values.len() {
            return Err(ScatterError::invalid(
                "cos_grid",
                "need at least two nodes and one value per node",
            ));
        }
        if cos_grid[0] != -1.0 || *cos_grid.last().unwrap() != 1.0 {
            return Err(ScatterError::invalid("cos_grid", "grid must span [-1, 1]"));
        }
        if cos_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ScatterError::invalid("cos_grid", "grid must be strictly ascending"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ScatterError::invalid("values", "non-finite amplitude"));
        }
        Ok(AngularTable { cos_grid, values })
    }

    /// Sample `model` on a uniform cos θ grid with `nodes` points.
    pub fn sample(model: &AmplitudeModel, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(ScatterError::invalid("nodes", "need at least two nodes"));
        }
        let grid: Vec<f64> = (0..nodes)
            .map(|i| {
                if i + 1 == nodes {
                    1.0
                } else {
                    -1.0 + 2.0 * i as f64 / (nodes - 1) as f64
                }
            })
            .collect();
        let values = grid
            .iter()
            .map(|&u| model.at_cos(u))
            .collect::<Result<Vec<_>>>()?;
        AngularTable::new(grid, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.cos_grid
    }

    pub fn at_cos(&self, u: f64) -> Complex64 {
        let g = &self.cos_grid;
        let idx = match g.binary_search_by(|x| x.total_cmp(&u)) {
            Ok(i) => return self.values[i],
            Err(i) => i.clamp(1, g.len() - 1),
        };
        let (x0, x1) = (g[idx - 1], g[idx]);
        let t = (u - x0) / (x1 - x0);
        self.values[idx - 1] * (1.0 - t) + self.values[idx] * t
    }
}

/// Angular scattering amplitude of one internal clock state.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeModel {
    /// Forward value f(0) only.
    Forward(ComplexAmplitude),
    /// Partial-wave phases at wavenumber k.
    PartialWaves { phases: PartialWaveSet, k: f64 },
    /// f(θ) on a cos θ grid.
    Tabulated(AngularTable),
}

impl AmplitudeModel {
    pub fn forward_value(f0: ComplexAmplitude) -> Result<Self> {
        if !f0.is_finite() {
            return Err(ScatterError::invalid("f0", "non-finite amplitude"));
        }
        Ok(AmplitudeModel::Forward(f0))
    }

    pub fn partial_waves(phases: PartialWaveSet, k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(AmplitudeModel::PartialWaves { phases, k })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AmplitudeModel::Forward(_) => "forward",
            AmplitudeModel::PartialWaves { .. } => "partial-waves",
            AmplitudeModel::Tabulated(_) => "tabulated",
        }
    }

    /// f(θ = 0).
    pub fn forward(&self) -> ComplexAmplitude {
        match self {
            AmplitudeModel::Forward(f0) => *f0,
            AmplitudeModel::PartialWaves { phases, k } => {
                legendre_series(&phases.coefficients(*k), 1.0)
            }
            AmplitudeModel::Tabulated(t) => t.at_cos(1.0),
        }
    }

    /// f at cos θ = `u`.
    pub fn at_cos(&self, u: f64) -> Result<ComplexAmplitude> {
        match self {
            AmplitudeModel::Forward(f0) if u == 1.0 => Ok(*f0),
            AmplitudeModel::Forward(_) => Err(ScatterError::UnsupportedModel {
                model: self.name(),
                needed: "off-forward angles",
            }),
            AmplitudeModel::PartialWaves { phases, k } => {
                Ok(legendre_series(&phases.coefficients(*k), u))
            }
            AmplitudeModel::Tabulated(t) => Ok(t.at_cos(u)),
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(ScatterError::invalid("k", format!("wavenumber must be > 0, got {k}")))
    }
}

/// f(θ) = (1/2ik) Σ_ℓ (2ℓ+1)(e^{2iδ_ℓ} − 1) P_ℓ(cos θ).
pub fn partial_wave_amplitude(phases: &PartialWaveSet, k: f64, theta: f64) -> Result<ComplexAmplitude> {
    check_k(k)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(ScatterError::invalid("theta", format!("must lie in [0, pi], got {theta}")));
    }
    Ok(legendre_series(&phases.coefficients(k), theta.cos()))
}

/// F12 = ∫dΩ f1 f2* from the partial-wave orthogonality sum; the shorter
/// set is zero-padded.
pub fn f12_closed_form(set1: &PartialWaveSet, set2: &PartialWaveSet, k: f64) -> Result<Complex64> {
    check_k(k)?;
    let n = set1.phases.len().max(set2.phases.len());
    let (mut re, mut im) = (0.0, 0.0);
    for l in 0..n {
        let (d1, d2) = (set1.phase(l), set2.phase(l));
        let w = 2.0 * l as f64 + 1.0;
        let (s1, s2) = (d1.sin(), d2.sin());
        re += w * (s1 * s1 * s2 * s2 + (2.0 * d1).sin() * (2.0 * d2).sin() / 4.0);
        im += w * s1 * s2 * (d1 - d2).sin();
    }
    let scale = 4.0 * PI / (k * k);
    Ok(Complex64::new(scale * re, scale * im))
}

/// F12 by adaptive quadrature of 2π ∫_{-1}^{1} f1(u) f2*(u) du, with
/// breakpoints at every tabulation node.
pub fn f12_quadrature(f1: &AmplitudeModel, f2: &AmplitudeModel, cfg: &QuadConfig) -> Result<Complex64> {
    let mut breaks = vec![-1.0, 1.0];
    for model in [f1, f2] {
        match model {
            AmplitudeModel::Forward(_) => {
                return Err(ScatterError::UnsupportedModel {
                    model: model.name(),
                    needed: "the angular overlap F12",
                })
            }
            AmplitudeModel::Tabulated(t) => breaks.extend_from_slice(t.nodes()),
            AmplitudeModel::PartialWaves { .. } => {}
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let eval = |model: &AmplitudeModel, coeffs: &Option<Vec<Complex64>>, u: f64| match (model, coeffs) {
        (_, Some(c)) => legendre_series(c, u),
        (AmplitudeModel::Tabulated(t), None) => t.at_cos(u),
        _ => unreachable!("forward-only models rejected above"),
    };
    let coeffs = |model: &AmplitudeModel| match model {
        AmplitudeModel::PartialWaves { phases, k } => Some(phases.coefficients(*k)),
        _ => None,
    };
    let (c1, c2) = (coeffs(f1), coeffs(f2));

    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let piece = integrate(
            |u| eval(f1, &c1, u) * eval(f2, &c2, u).conj(),
            w[0],
            w[1],
            cfg,
        )?;
        total += piece.value;
    }
    Ok(2.0 * PI * total)
}

/// F12 ≡ ∫dΩ f1(θ) f2*(θ) (m²). Two partial-wave models at the same k use
/// the closed form; anything else with angular content uses quadrature.
pub fn forward_overlap_f12(f1: &AmplitudeModel, f2: &AmplitudeModel) -> Result<Complex64> {
    match (f1, f2) {
        (
            AmplitudeModel::PartialWaves { phases: p1, k: k1 },
            AmplitudeModel::PartialWaves { phases: p2, k: k2 },
        ) if k1 == k2 => f12_closed_form(p1, p2, *k1),
        _ => f12_quadrature(
            f1,
            f2,
            &QuadConfig {
                rel_tol: 1e-10,
                abs_tol: 0.0,
                max_subdivisions: 500,
            },
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalTheorem {
    /// ∫|f|² dΩ by Gauss–Legendre quadrature (m²).
    pub sigma_integrated: f64,
    /// (4π/k) Im f(0) (m²).
    pub sigma_forward: f64,
}

impl OpticalTheorem {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.sigma_integrated.abs().max(self.sigma_forward.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.sigma_integrated - self.sigma_forward).abs() / scale
        }
    }
}

/// Both sides of the optical theorem. |f|² is a polynomial of degree 2ℓ_max
/// in cos θ, so an (ℓ_max + 2)-point Gauss–Legendre rule integrates it exactly.
pub fn optical_theorem_check(phases: &PartialWaveSet, k: f64) -> Result<OpticalTheorem> {
    check_k(k)?;
    let coeffs = phases.coefficients(k);
    let (nodes, weights) = gauss_legendre(phases.l_max() + 2);
    let integral: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&u, &w)| w * legendre_series(&coeffs, u).norm_sqr())
        .sum();
    Ok(OpticalTheorem {
        sigma_integrated: 2.0 * PI * integral,
        sigma_forward: 4.0 * PI / k * legendre_series(&coeffs, 1.0).im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn set(p: &[f64]) -> PartialWaveSet {
        PartialWaveSet::new(p.to_vec()).unwrap()
    }

    #[test]
    fn s_wave_unitarity_limit() {
        let f = partial_wave_amplitude(&set(&[FRAC_PI_2]), 1.0, 0.0).unwrap();
        assert!(f.re.abs() < 1e-15);
        assert_relative_eq!(f.im, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn no_interaction_gives_zero() {
        for theta in [0.0, 0.4, PI] {
            let f = partial_wave_amplitude(&set(&[0.0, 0.0, 0.0]), 3.5, theta).unwrap();
            assert_eq!(f, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn two_wave_reference_value() {
        // Frozen from an independent 30-digit evaluation of the partial-wave sum.
        let f = partial_wave_amplitude(&set(&[0.1, 0.05]), 2.0, PI / 3.0).unwrap();
        assert_relative_eq!(f.re, 0.087_104_863_941_325_87, max_relative = 1e-13);
        assert_relative_eq!(f.im, 0.006_856_793_560_429_931, max_relative = 1e-13);
    }

    #[test]
    fn invalid_inputs() {
        assert!(PartialWaveSet::new(vec![]).is_err());
        assert!(PartialWaveSet::new(vec![f64::NAN]).is_err());
        assert!(PartialWaveSet::new(vec![0.1; 66]).is_err());
        assert!(PartialWaveSet::new(vec![0.1; 65]).is_ok());
        assert!(partial_wave_amplitude(&set(&[0.1]), 0.0, 0.0).is_err());
        assert!(partial_wave_amplitude(&set(&[0.1]), 1.0, -0.1).is_err());
        assert!(partial_wave_amplitude(&set(&[0.1]), 1.0, 3.2).is_err());
    }

    #[test]
    fn truncation_is_explicit() {
        let s = set(&[0.1; 20]);
        assert_eq!(s.truncated(PartialWaveSet::DEFAULT_L_MAX).l_max(), 8);
        assert_eq!(s.truncated(100).l_max(), 19);
    }

    #[test]
    fn f12_reference_value() {
        // Closed form and the (4π/k) Im f(0) identity agree; value frozen
        // from a 30-digit quadrature of ∫dΩ |f|².
        let s = set(&[0.3]);
        let f12 = f12_closed_form(&s, &s, 1.0).unwrap();
        assert_relative_eq!(f12.re, 1.097_448_698_087_066_5, max_relative = 1e-13);
        assert_eq!(f12.im, 0.0);
    }

    #[test]
    fn f12_zero_amplitudes() {
        let z = AmplitudeModel::partial_waves(set(&[0.0, 0.0]), 2.0).unwrap();
        assert_eq!(forward_overlap_f12(&z, &z).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn f12_requires_angular_content() {
        let f = AmplitudeModel::forward_value(Complex64::new(1e-12, 0.0)).unwrap();
        let err = forward_overlap_f12(&f, &f).unwrap_err();
        assert!(matches!(err, ScatterError::UnsupportedModel { .. }));
    }

    #[test]
    fn closed_form_and_quadrature_paths_agree() {
        let a = AmplitudeModel::partial_waves(set(&[0.2, -0.1, 0.05, 0.02]), 1.7).unwrap();
        let b = AmplitudeModel::partial_waves(set(&[-0.15, 0.12]), 1.7).unwrap();
        let closed = forward_overlap_f12(&a, &b).unwrap();
        let quad = f12_quadrature(&a, &b, &QuadConfig { rel_tol: 1e-12, ..Default::default() }).unwrap();
        assert!((closed - quad).norm() < 1e-12 * closed.norm());

        // Tabulated path: linear interpolation error is O(h²).
        let tab = AmplitudeModel::Tabulated(AngularTable::sample(&b, 4001).unwrap());
        let via_table = forward_overlap_f12(&a, &tab).unwrap();
        assert!((closed - via_table).norm() < 1e-5 * closed.norm());
    }

    #[test]
    fn table_interpolates_linearly() {
        let t = AngularTable::new(
            vec![-1.0, 0.0, 1.0],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)],
        )
        .unwrap();
        assert_eq!(t.at_cos(0.5), Complex64::new(2.0, 1.0));
        assert_eq!(t.at_cos(1.0), Complex64::new(3.0, 0.0));
        assert!(AngularTable::new(vec![-1.0, 0.5], vec![Complex64::default(); 2]).is_err());
    }

    #[test]
    fn optical_theorem_examples() {
        let ot = optical_theorem_check(&set(&[FRAC_PI_2]), 1.0).unwrap();
        assert_relative_eq!(ot.sigma_integrated, 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(ot.sigma_forward, 4.0 * PI, max_relative = 1e-14);

        let ot = optical_theorem_check(&set(&[0.0, 0.0]), 2.0).unwrap();
        assert_eq!((ot.sigma_integrated, ot.sigma_forward), (0.0, 0.0));

        // Both sides reduce to (4π/k²) Σ(2ℓ+1) sin²δ_ℓ.
        let ot = optical_theorem_check(&set(&[0.2, 0.1]), 3.0).unwrap();
        let direct = 4.0 * PI / 9.0 * (0.2f64.sin().powi(2) + 3.0 * 0.1f64.sin().powi(2));
        assert!(ot.relative_gap() < 1e-12);
        assert_relative_eq!(ot.sigma_forward, direct, max_relative = 1e-13);
    }

    fn phase_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.5f64..1.5, 1..=9)
    }

    proptest! {
        #[test]
        fn unitarity_identity(phases in phase_vec(), k in 0.01f64..1e3) {
            let ot = optical_theorem_check(&PartialWaveSet::new(phases).unwrap(), k).unwrap();
            prop_assert!(ot.relative_gap() < 1e-12, "gap {}", ot.relative_gap());
        }

        #[test]
        fn f12_hermitian(p1 in phase_vec(), p2 in phase_vec(), k in 0.1f64..10.0) {
            let (a, b) = (PartialWaveSet::new(p1).unwrap(), PartialWaveSet::new(p2).unwrap());
            let ab = f12_closed_form(&a, &b, k).unwrap();
            let ba = f12_closed_form(&b, &a, k).unwrap();
            prop_assert!((ab - ba.conj()).norm() <= 1e-12 * (1.0 + ab.norm()));
        }

        #[test]
        fn identical_sets_have_real_f12(p in phase_vec(), k in 0.1f64..10.0) {
            let s = PartialWaveSet::new(p).unwrap();
            let f = f12_closed_form(&s, &s, k).unwrap();
            prop_assert_eq!(f.im, 0.0);
            let ot = optical_theorem_check(&s, k).unwrap();
            prop_assert!((f.re - ot.sigma_forward).abs() <= 1e-12 * f.re.abs().max(1e-300));
        }

        #[test]
        fn amplitude_bound(p in phase_vec(), k in 0.1f64..10.0, theta in 0.0f64..=PI) {
            let s = PartialWaveSet::new(p).unwrap();
            let f = partial_wave_amplitude(&s, k, theta).unwrap();
            let bound: f64 = (0..=s.l_max()).map(|l| 2.0 * l as f64 + 1.0).sum::<f64>() / k;
            prop_assert!(f.norm() <= bound * (1.0 + 1e-12));
        }
    }
}
