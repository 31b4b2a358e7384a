//! Stochastic generation of measurement outcomes and qubit trajectories.
//!
//! Inefficiency is modeled physically: the measurement record splits into
//! an observed channel and a lost channel, two commuting partial
//! measurements whose squared strengths add. Sampling both and discarding
//! the lost outcome reproduces the eta-dependent back-action law as an
//! emergent result rather than by construction.

use rand::Rng;
use thiserror::Error;

use crate::params::{Outcome, QubitParams, StrengthParams};
use crate::rng::normal;

/// Observed/lost decomposition of a measurement window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSplit {
    pub s_obs: f64,
    pub s_lost: f64,
    pub qbar_obs: f64,
    pub qbar_lost: f64,
}

impl ChannelSplit {
    pub fn observed(&self) -> StrengthParams {
        StrengthParams::scaled(self.s_obs, self.qbar_obs)
    }

    pub fn lost(&self) -> StrengthParams {
        StrengthParams::scaled(self.s_lost, self.qbar_lost)
    }
}

/// Split a total measurement strength into observed and lost channels:
/// `s_obs = sqrt(eta) s_total`, `s_lost = sqrt(1-eta) s_total`, so that
/// `s_obs^2 + s_lost^2 = s_total^2`; the q offsets scale the same way.
pub fn split_strength(s_total: f64, qbar_total: f64, eta: f64) -> ChannelSplit {
    let root_obs = eta.sqrt();
    let root_lost = (1.0 - eta).max(0.0).sqrt();
    ChannelSplit {
        s_obs: root_obs * s_total,
        s_lost: root_lost * s_total,
        qbar_obs: root_obs * qbar_total,
        qbar_lost: root_lost * qbar_total,
    }
}

/// Draw a classical z label from a population coordinate: +1 with
/// probability `(1 + z) / 2`.
#[inline]
pub fn sample_label(z: f64, rng: &mut impl Rng) -> i8 {
    if rng.random::<f64>() < (1.0 + z) / 2.0 {
        1
    } else {
        -1
    }
}

/// Thermal-equilibrium label: excited with probability `p_eq`.
#[inline]
pub fn sample_thermal_label(p_eq: f64, rng: &mut impl Rng) -> i8 {
    sample_label(2.0 * p_eq - 1.0, rng)
}

/// Gaussian outcome of one window for a fixed qubit label:
/// `i ~ N(label * s, 1)`, `q ~ N(qbar, 1)`, independent.
#[inline]
pub fn sample_outcome(label: i8, sp: &StrengthParams, rng: &mut impl Rng) -> Outcome {
    Outcome {
        i: label as f64 * sp.s + normal(rng),
        q: sp.qbar + normal(rng),
    }
}

/// Ground-truth qubit trajectory: a piecewise-constant +-1 label sampled
/// at period `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelPath {
    pub labels: Vec<i8>,
    pub dt: f64,
}

impl LabelPath {
    pub fn duration(&self) -> f64 {
        self.labels.len() as f64 * self.dt
    }

    /// Time average of the labels over the whole path.
    pub fn mean(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        let sum: i64 = self.labels.iter().map(|&l| l as i64).sum();
        sum as f64 / self.labels.len() as f64
    }

    pub fn end_label(&self) -> i8 {
        *self.labels.last().expect("empty path")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("sample period {dt} too coarse for t1 {t1}; need dt < t1/10")]
    CoarseStep { dt: f64, t1: f64 },
    #[error("duration {duration} is not a multiple of dt {dt}")]
    BadDuration { duration: f64, dt: f64 },
}

/// Two-state Markov trajectory with downward rate `(1 - p_eq) / t1` and
/// upward rate `p_eq / t1`, so the relaxation time is `t1` and the
/// stationary excited fraction is `p_eq`. Per-step flip probabilities are
/// `1 - exp(-rate * dt)`.
pub fn sample_telegraph(
    qp: &QubitParams,
    initial: i8,
    duration: f64,
    dt: f64,
    rng: &mut impl Rng,
) -> Result<LabelPath, SamplerError> {
    if dt >= qp.t1 / 10.0 {
        return Err(SamplerError::CoarseStep { dt, t1: qp.t1 });
    }
    let steps_f = duration / dt;
    if (steps_f - steps_f.round()).abs() > 1e-9 * steps_f.max(1.0) {
        return Err(SamplerError::BadDuration { duration, dt });
    }
    let steps = steps_f.round() as usize;
    let p_down = 1.0 - (-(1.0 - qp.p_eq) / qp.t1 * dt).exp();
    let p_up = 1.0 - (-qp.p_eq / qp.t1 * dt).exp();

    let mut labels = Vec::with_capacity(steps);
    let mut current = if initial > 0 { 1i8 } else { -1i8 };
    for _ in 0..steps {
        labels.push(current);
        let r = rng.random::<f64>();
        if current > 0 {
            if r < p_down {
                current = -1;
            }
        } else if r < p_up {
            current = 1;
        }
    }
    Ok(LabelPath { labels, dt })
}

/// Window-integrated outcome of a trajectory: `i = s * mean(labels) + n`,
/// `q = qbar + n'`. A path constant at +1 reduces exactly to
/// [`sample_outcome`] with label +1.
#[inline]
pub fn integrated_outcome(path: &LabelPath, sp: &StrengthParams, rng: &mut impl Rng) -> Outcome {
    Outcome {
        i: sp.s * path.mean() + normal(rng),
        q: sp.qbar + normal(rng),
    }
}

/// Window average and end label of a telegraph trajectory, without
/// materializing the path. Draws the same per-step randomness as
/// [`sample_telegraph`], so the two agree for a shared stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSample {
    pub average: f64,
    pub end_label: i8,
}

#[inline]
pub fn sample_window(
    qp: &QubitParams,
    initial: i8,
    steps: usize,
    dt: f64,
    rng: &mut impl Rng,
) -> WindowSample {
    let p_down = 1.0 - (-(1.0 - qp.p_eq) / qp.t1 * dt).exp();
    let p_up = 1.0 - (-qp.p_eq / qp.t1 * dt).exp();
    let mut current: i8 = if initial > 0 { 1 } else { -1 };
    let mut sum = 0i64;
    for _ in 0..steps {
        sum += current as i64;
        let r = rng.random::<f64>();
        if current > 0 {
            if r < p_down {
                current = -1;
            }
        } else if r < p_up {
            current = 1;
        }
    }
    WindowSample {
        average: sum as f64 / steps as f64,
        end_label: current,
    }
}
