//! Device and run parameters, in the scaled units used throughout the crate.
//!
//! Measurement outcomes are expressed in units of the per-quadrature noise
//! standard deviation, so sigma = 1 everywhere. Rates are angular (rad/s)
//! and times are seconds.

use std::f64::consts::PI;

use thiserror::Error;

/// A single heterodyne measurement outcome, scaled so the per-quadrature
/// standard deviation is 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Outcome {
    /// Scaled in-phase component `I_m / sigma`. Carries the z information.
    pub i: f64,
    /// Scaled quadrature component `Q_m / sigma`. Carries the phase kick.
    pub q: f64,
}

impl Outcome {
    pub fn new(i: f64, q: f64) -> Self {
        Self { i, q }
    }
}

/// Readout resonator parameters, angular rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityParams {
    /// Resonator linewidth kappa (rad/s).
    pub kappa: f64,
    /// Dispersive shift chi (rad/s).
    pub chi: f64,
}

impl CavityParams {
    /// Build from ordinary frequencies (Hz), i.e. kappa/2pi and chi/2pi.
    pub fn from_frequencies_hz(kappa_hz: f64, chi_hz: f64) -> Self {
        Self {
            kappa: 2.0 * PI * kappa_hz,
            chi: 2.0 * PI * chi_hz,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(ParamError::NonPositive("cavity.kappa"));
        }
        if !(self.chi > 0.0) || !self.chi.is_finite() {
            return Err(ParamError::NonPositive("cavity.chi"));
        }
        Ok(())
    }
}

/// Measurement drive parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    /// Mean intracavity photon number during the pulse.
    pub nbar: f64,
    /// Integration window T_m (s).
    pub t_m: f64,
    /// Digitizer sample period (s). Must divide `t_m`.
    pub dt: f64,
}

impl DriveParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return Err(ParamError::Negative("drive.nbar"));
        }
        if !(self.t_m > 0.0) || !self.t_m.is_finite() {
            return Err(ParamError::NonPositive("drive.t_m"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ParamError::NonPositive("drive.dt"));
        }
        if !divides(self.dt, self.t_m) {
            return Err(ParamError::NotDivisible {
                name: "drive.t_m/drive.dt",
                value: self.t_m / self.dt,
            });
        }
        Ok(())
    }

    /// Samples in one integration window.
    pub fn samples_per_window(&self) -> usize {
        (self.t_m / self.dt).round() as usize
    }
}

/// Amplification-chain parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmpParams {
    /// Quantum efficiency of the chain, in (0, 1].
    pub eta: f64,
    /// Ratio of the mean Q offset to the mean I displacement.
    pub q_ratio: f64,
}

impl AmpParams {
    pub fn new(eta: f64, q_ratio: f64) -> Self {
        Self { eta, q_ratio }
    }

    /// Efficiency with the q offset fixed by the two pointer-state phases,
    /// `q_ratio = cot(theta/2)` for dispersive angle theta.
    pub fn with_geometric_q_ratio(eta: f64, cavity: &CavityParams) -> Self {
        let theta = dispersive_angle(cavity);
        Self {
            eta,
            q_ratio: 1.0 / (theta / 2.0).tan(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(ParamError::OutOfRange {
                name: "amp.eta",
                value: self.eta,
                expected: "(0, 1]",
            });
        }
        if !self.q_ratio.is_finite() {
            return Err(ParamError::NotFinite("amp.q_ratio"));
        }
        Ok(())
    }
}

/// Qubit lifetime / protocol timing parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    /// Relaxation time T1 (s).
    pub t1: f64,
    /// Coherence time T2 (s).
    pub t2: f64,
    /// Equilibrium excited-state population.
    pub p_eq: f64,
    /// Protocol dead time tau (s): decoherence budget around the
    /// variable-strength window.
    pub tau: f64,
}

impl QubitParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.t1 > 0.0) || !self.t1.is_finite() {
            return Err(ParamError::NonPositive("qubit.t1"));
        }
        if !(self.t2 > 0.0) || self.t2 > 2.0 * self.t1 {
            return Err(ParamError::OutOfRange {
                name: "qubit.t2",
                value: self.t2,
                expected: "(0, 2*t1]",
            });
        }
        if !(self.p_eq >= 0.0 && self.p_eq < 0.5) {
            return Err(ParamError::OutOfRange {
                name: "qubit.p_eq",
                value: self.p_eq,
                expected: "[0, 0.5)",
            });
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(ParamError::Negative("qubit.tau"));
        }
        Ok(())
    }

    /// Equilibrium polarization `2 p_eq - 1`.
    pub fn z_eq(&self) -> f64 {
        2.0 * self.p_eq - 1.0
    }
}

/// Derived outcome statistics of one measurement window: the apparent
/// strength `s` (mean I displacement over sigma), the mean Q offset, and
/// the dispersive angle the pulse acquired.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrengthParams {
    /// Apparent measurement strength, `Ibar_m / sigma >= 0`.
    pub s: f64,
    /// Mean scaled Q offset, `Qbar_m / sigma`.
    pub qbar: f64,
    /// Dispersive angle (rad); 0 when constructed from bare scaled values.
    pub theta_disp: f64,
}

impl StrengthParams {
    /// Directly from scaled-unit values. `theta_disp` is left at zero since
    /// no cavity information is available.
    pub fn scaled(s: f64, qbar: f64) -> Self {
        Self {
            s,
            qbar,
            theta_disp: 0.0,
        }
    }

    /// Derive the window statistics from device parameters.
    pub fn from_physical(cavity: &CavityParams, drive: &DriveParams, amp: &AmpParams) -> Self {
        let theta = dispersive_angle(cavity);
        let s = apparent_strength(cavity, drive, amp.eta);
        Self {
            s,
            qbar: amp.q_ratio * s,
            theta_disp: theta,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(ParamError::Negative("strength.s"));
        }
        if !self.qbar.is_finite() {
            return Err(ParamError::NotFinite("strength.qbar"));
        }
        Ok(())
    }
}

/// Dispersive angle `2 atan(chi / kappa)`, in (0, pi).
pub fn dispersive_angle(cavity: &CavityParams) -> f64 {
    2.0 * (cavity.chi / cavity.kappa).atan()
}

/// Apparent measurement strength `sqrt(2 nbar eta kappa T_m) sin(theta/2)`.
///
/// Monotonically increasing in `nbar`, `eta` and `t_m`; zero at zero drive.
pub fn apparent_strength(cavity: &CavityParams, drive: &DriveParams, eta: f64) -> f64 {
    let theta = dispersive_angle(cavity);
    (2.0 * drive.nbar * eta * cavity.kappa * drive.t_m).sqrt() * (theta / 2.0).sin()
}

fn divides(step: f64, span: f64) -> bool {
    let n = span / step;
    (n - n.round()).abs() < 1e-9 * n.max(1.0)
}

/// Violation of a parameter-group invariant.
#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{0} must be > 0")]
    NonPositive(&'static str),
    #[error("{0} must be >= 0")]
    Negative(&'static str),
    #[error("{0} must be finite")]
    NotFinite(&'static str),
    #[error("{name} = {value} outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("{name} = {value} must be an integer")]
    NotDivisible { name: &'static str, value: f64 },
}

/// Device defaults used across the command-line tools: kappa/2pi = 5.8 MHz,
/// chi/2pi = 5.4 MHz, nbar = 5, T_m = 240 ns, dt = 20 ns, eta = 0.2,
/// Qbar/Ibar = 1.28, T1 = 2.8 us, T2 = 0.698 us, p_eq = 0.08, tau = 380 ns.
pub mod defaults {
    use super::*;

    pub const KAPPA_HZ: f64 = 5.8e6;
    pub const CHI_HZ: f64 = 5.4e6;
    pub const NBAR: f64 = 5.0;
    pub const T_M: f64 = 240e-9;
    pub const DT: f64 = 20e-9;
    pub const ETA: f64 = 0.2;
    pub const Q_RATIO: f64 = 1.28;
    pub const T1: f64 = 2.8e-6;
    pub const T2: f64 = 0.698e-6;
    pub const P_EQ: f64 = 0.08;
    pub const TAU: f64 = 380e-9;

    pub fn cavity() -> CavityParams {
        CavityParams::from_frequencies_hz(KAPPA_HZ, CHI_HZ)
    }

    pub fn drive() -> DriveParams {
        DriveParams {
            nbar: NBAR,
            t_m: T_M,
            dt: DT,
        }
    }

    pub fn amp() -> AmpParams {
        AmpParams::new(ETA, Q_RATIO)
    }

    pub fn qubit() -> QubitParams {
        QubitParams {
            t1: T1,
            t2: T2,
            p_eq: P_EQ,
            tau: TAU,
        }
    }
}
