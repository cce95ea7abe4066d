//! Scattering amplitudes, partial waves, the optical theorem, relative-motion
//! wave packets and the kinematic regime classifier.

mod amplitude;
mod interference;
mod packet;
mod regime;

pub use amplitude::{
    f12_closed_form, f12_quadrature, forward_overlap_f12, optical_theorem_check,
    partial_wave_amplitude, AmplitudeModel, AngularTable, ComplexAmplitude, OpticalTheorem,
    PartialWaveSet,
};
pub use interference::{interference_integral_oracle, InterferenceConfig, ShadowFraction};
pub use packet::WavePacket;
pub use regime::{classify_regime, KinematicsInput, Regime, RegimeReport, ThetaBound};
