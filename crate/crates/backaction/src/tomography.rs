//! The three-phase back-action protocol — strong preparation readout,
//! variable-strength measurement, tomography — plus post-selection,
//! conditional binning, the closed-form summary curves, and the strong
//! single-shot readout histograms.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::bloch::{BlochVector, RotationAxis};
use crate::fit::{fit_gaussian_peak, GaussianPeak};
use crate::map::{ConditionalMap, Hist1D, MapGrid};
use crate::math::normal_cdf;
use crate::params::{Outcome, ParamError, QubitParams, StrengthParams};
use crate::rng::{SeedPlan, TrialRng};
use crate::sampler::{
    sample_label, sample_outcome, sample_thermal_label, sample_window, split_strength,
};
use crate::update::{deterministic_phase, update_general};

/// Tomography basis measured in one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TomoAxis {
    X,
    Y,
    Z,
}

/// Everything recorded about one protocol trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialResult {
    pub prep_outcome: Outcome,
    pub weak_outcome: Outcome,
    pub tomo_axis: TomoAxis,
    pub tomo_outcome: Outcome,
    /// Sign of the tomography outcome's i component.
    pub tomo_eigenvalue: i8,
}

/// Fixed configuration of the protocol.
#[derive(Clone, Debug)]
pub struct ProtocolSetup {
    /// Observed-channel statistics of the variable-strength window.
    pub sp_weak: StrengthParams,
    /// Statistics of the preparation and tomography windows.
    pub sp_strong: StrengthParams,
    pub qp: QubitParams,
    /// Quantum efficiency of the observed chain.
    pub eta: f64,
    /// Window length and sample period of the strong readouts.
    pub t_m: f64,
    pub dt: f64,
    /// Fraction of the dead time spent before the weak window (the rest
    /// follows it).
    pub tau_before_fraction: f64,
    /// Undo the deterministic phase offset left by the lost channel.
    pub phase_correction: bool,
    /// Tomography axis cycle, indexed by trial number.
    pub axes: Vec<TomoAxis>,
}

impl ProtocolSetup {
    pub fn new(sp_weak: StrengthParams, sp_strong: StrengthParams, qp: QubitParams, eta: f64) -> Self {
        Self {
            sp_weak,
            sp_strong,
            qp,
            eta,
            t_m: crate::params::defaults::T_M,
            dt: crate::params::defaults::DT,
            tau_before_fraction: 0.5,
            phase_correction: false,
            axes: vec![TomoAxis::X, TomoAxis::Y, TomoAxis::Z],
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        self.sp_weak.validate()?;
        self.sp_strong.validate()?;
        self.qp.validate()?;
        if self.sp_strong.s < 2.0 {
            return Err(ProtocolError::WeakPreparation {
                s: self.sp_strong.s,
            });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(ProtocolError::Param(ParamError::OutOfRange {
                name: "eta",
                value: self.eta,
                expected: "(0, 1]",
            }));
        }
        if !(0.0..=1.0).contains(&self.tau_before_fraction) {
            return Err(ProtocolError::Param(ParamError::OutOfRange {
                name: "tau_before_fraction",
                value: self.tau_before_fraction,
                expected: "[0, 1]",
            }));
        }
        let axes_ok = !self.axes.is_empty()
            && [TomoAxis::X, TomoAxis::Y, TomoAxis::Z]
                .iter()
                .all(|a| self.axes.contains(a));
        if !axes_ok {
            return Err(ProtocolError::BadAxisCycle);
        }
        let steps = self.t_m / self.dt;
        if (steps - steps.round()).abs() > 1e-9 || steps < 1.0 {
            return Err(ProtocolError::Param(ParamError::NotDivisible {
                name: "t_m/dt",
                value: steps,
            }));
        }
        Ok(())
    }

    fn window_steps(&self) -> usize {
        (self.t_m / self.dt).round() as usize
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("preparation readout too weak (s = {s}); need s >= 2")]
    WeakPreparation { s: f64 },
    #[error("tomography axis cycle must contain X, Y and Z")]
    BadAxisCycle,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Dead-time decoherence: relax z toward equilibrium with T1 and damp the
/// coherence with T2, both over the interval `t`.
fn decohere(state: BlochVector, qp: &QubitParams, t: f64) -> BlochVector {
    if t <= 0.0 {
        return state;
    }
    let e1 = (-t / qp.t1).exp();
    let e2 = (-t / qp.t2).exp();
    BlochVector {
        x: state.x * e2,
        y: state.y * e2,
        z: qp.z_eq() + (state.z - qp.z_eq()) * e1,
    }
}

/// Run a single protocol trial. Fully deterministic given the setup and
/// the trial's rng; the tomography axis comes from the setup's cycle.
pub fn simulate_trial(setup: &ProtocolSetup, trial_index: u64, rng: &mut TrialRng) -> TrialResult {
    let qp = &setup.qp;
    let steps = setup.window_steps();
    let axis = setup.axes[(trial_index % setup.axes.len() as u64) as usize];

    // Phase 1: thermal start, strong preparation readout with relaxation
    // during the window. The post-readout state is the pointer state of
    // the end label.
    let lab0 = sample_thermal_label(qp.p_eq, rng);
    let prep = sample_window(qp, lab0, steps, setup.dt, rng);
    let prep_outcome = Outcome {
        i: setup.sp_strong.s * prep.average + crate::rng::normal(rng),
        q: setup.sp_strong.qbar + crate::rng::normal(rng),
    };
    let mut state = BlochVector::pole(prep.end_label);

    // Phase 2: rotate to +y (for a ground-state qubit), wait, measure
    // weakly through both the observed and the lost channel, wait again.
    state = state.rotate(RotationAxis::X, FRAC_PI_2);
    let tau_before = qp.tau * setup.tau_before_fraction;
    state = decohere(state, qp, tau_before);

    let root_eta = setup.eta.sqrt();
    let split = split_strength(
        setup.sp_weak.s / root_eta,
        setup.sp_weak.qbar / root_eta,
        setup.eta,
    );
    let sp_obs = split.observed();
    let sp_lost = split.lost();
    let weak_label = sample_label(state.z, rng);
    let weak_outcome = sample_outcome(weak_label, &sp_obs, rng);
    let lost_outcome = sample_outcome(weak_label, &sp_lost, rng);
    state = update_general(state, weak_outcome, &sp_obs, 1.0);
    state = update_general(state, lost_outcome, &sp_lost, 1.0);
    if setup.phase_correction {
        state = state.rotate_z(deterministic_phase(&setup.sp_weak, setup.eta));
    }
    state = decohere(state, qp, qp.tau - tau_before);

    // Phase 3: basis pre-rotation, then a strong readout of z with
    // relaxation during the window.
    let rotated = match axis {
        TomoAxis::Z => state,
        TomoAxis::Y => state.rotate(RotationAxis::X, FRAC_PI_2),
        TomoAxis::X => state.rotate(RotationAxis::Y, -FRAC_PI_2),
    };
    let tomo_label = sample_label(rotated.z, rng);
    let tomo = sample_window(qp, tomo_label, steps, setup.dt, rng);
    let tomo_outcome = Outcome {
        i: setup.sp_strong.s * tomo.average + crate::rng::normal(rng),
        q: setup.sp_strong.qbar + crate::rng::normal(rng),
    };

    TrialResult {
        prep_outcome,
        weak_outcome,
        tomo_axis: axis,
        tomo_outcome,
        tomo_eigenvalue: if tomo_outcome.i >= 0.0 { 1 } else { -1 },
    }
}

/// Run `n_trials` sequentially under the given seed plan (stream = trial
/// index). For large runs prefer folding [`simulate_trial`] through
/// [`crate::runner::parallel_fold`].
pub fn run_protocol(
    setup: &ProtocolSetup,
    n_trials: u64,
    plan: SeedPlan,
) -> Result<Vec<TrialResult>, ProtocolError> {
    setup.validate()?;
    Ok((0..n_trials)
        .map(|t| simulate_trial(setup, t, &mut plan.stream(t).rng()))
        .collect())
}

/// Post-selection predicate: the preparation outcome must lie on the
/// ground side beyond the threshold and the tomography outcome must be
/// beyond the threshold on either side.
#[inline]
pub fn passes_post_selection(trial: &TrialResult, threshold: f64) -> bool {
    trial.prep_outcome.i < -threshold && trial.tomo_outcome.i.abs() > threshold
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostSelectReport {
    pub total: u64,
    pub retained: u64,
    /// Set when fewer than 1% of trials survive.
    pub low_retention: bool,
}

impl PostSelectReport {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.retained as f64 / self.total as f64
        }
    }
}

/// Filter a trial collection on the purity threshold (sigma units).
pub fn post_select(trials: &[TrialResult], threshold: f64) -> (Vec<TrialResult>, PostSelectReport) {
    let retained: Vec<TrialResult> = trials
        .iter()
        .filter(|t| passes_post_selection(t, threshold))
        .copied()
        .collect();
    let report = PostSelectReport {
        total: trials.len() as u64,
        retained: retained.len() as u64,
        low_retention: (retained.len() as f64) < 0.01 * trials.len() as f64,
    };
    (retained, report)
}

/// Conditional tomograms plus the outcome histogram, binned over the
/// weak-outcome plane. Merges associatively.
#[derive(Clone, Debug)]
pub struct Tomograms {
    pub x: ConditionalMap,
    pub y: ConditionalMap,
    pub z: ConditionalMap,
    /// Counts every retained trial (value 1 per entry).
    pub histogram: ConditionalMap,
}

impl Tomograms {
    pub fn new(grid: MapGrid) -> Self {
        Self {
            x: ConditionalMap::new(grid),
            y: ConditionalMap::new(grid),
            z: ConditionalMap::new(grid),
            histogram: ConditionalMap::new(grid),
        }
    }

    pub fn add(&mut self, trial: &TrialResult) {
        let (i, q) = (trial.weak_outcome.i, trial.weak_outcome.q);
        let v = trial.tomo_eigenvalue as f64;
        match trial.tomo_axis {
            TomoAxis::X => self.x.add(i, q, v),
            TomoAxis::Y => self.y.add(i, q, v),
            TomoAxis::Z => self.z.add(i, q, v),
        }
        self.histogram.add(i, q, 1.0);
    }

    pub fn merge(&mut self, other: &Self) {
        self.x.merge(&other.x);
        self.y.merge(&other.y);
        self.z.merge(&other.z);
        self.histogram.merge(&other.histogram);
    }

    pub fn retained(&self) -> u64 {
        self.histogram.total_entries()
    }
}

/// Bin retained trials into conditional maps.
pub fn bin_conditional(trials: &[TrialResult], grid: MapGrid) -> Tomograms {
    let mut maps = Tomograms::new(grid);
    for t in trials {
        maps.add(t);
    }
    maps
}

// --- Closed-form summary curves --------------------------------------------

/// Scaled z back-action transfer at the origin: `s exp(-tau/T1)`.
pub fn theory_slope_z(s: f64, qp: &QubitParams) -> f64 {
    s * (-qp.tau / qp.t1).exp()
}

/// Scaled x back-action transfer at the origin:
/// `s cos(qbar s (1-eta)/eta) exp(-s^2 (1-eta)/eta) exp(-tau/T2)`.
pub fn theory_slope_x(s: f64, qbar: f64, eta: f64, qp: &QubitParams) -> f64 {
    let loss = (1.0 - eta) / eta;
    s * (qbar * s * loss).cos() * (-s * s * loss).exp() * (-qp.tau / qp.t2).exp()
}

/// Unconditioned mean y after the protocol:
/// `exp(-s^2/eta) cos(s qbar / eta) exp(-tau/T2)`.
pub fn theory_y(s: f64, qbar: f64, eta: f64, qp: &QubitParams) -> f64 {
    (-s * s / eta).exp() * (s * qbar / eta).cos() * (-qp.tau / qp.t2).exp()
}

// --- Strong single-shot readout --------------------------------------------

/// Result of a strong-readout histogram run at one preparation angle.
#[derive(Clone, Debug)]
pub struct StrongReadout {
    pub theta: f64,
    pub histogram: Hist1D,
    /// Gaussian fitted to the ground-side / excited-side peak, when the
    /// corresponding mode is populated.
    pub mode_ground: Option<GaussianPeak>,
    pub mode_excited: Option<GaussianPeak>,
    /// Window-start label counts and misassignment fractions.
    pub n_ground: u64,
    pub n_excited: u64,
    pub mis_ground: f64,
    pub mis_excited: f64,
}

impl StrongReadout {
    /// Distance between the fitted mode means, in the scaled units (the
    /// noise sigma is 1 by construction).
    pub fn separation(&self) -> Option<f64> {
        Some(self.mode_excited?.mean - self.mode_ground?.mean)
    }

    /// Two-sided misassignment fidelity of the fitted modes at the
    /// threshold i = 0: `1 - P(i > 0 | ground mode) - P(i < 0 | excited
    /// mode)`. This is the separation-implied fidelity; relaxation during
    /// the window shows up through the fitted means and widths only.
    pub fn fidelity_fitted(&self) -> Option<f64> {
        let g = self.mode_ground?;
        let e = self.mode_excited?;
        let p_g_wrong = 1.0 - normal_cdf((0.0 - g.mean) / g.sigma);
        let p_e_wrong = normal_cdf((0.0 - e.mean) / e.sigma);
        Some(1.0 - p_g_wrong - p_e_wrong)
    }

    /// Empirical two-sided misassignment fidelity against the true
    /// window-start labels: `1 - P(i > 0 | g) - P(i < 0 | e)`. Includes
    /// relaxation during the readout window, so it is lower than the
    /// fitted-mode number whenever T1 is finite.
    pub fn fidelity_empirical(&self) -> Option<f64> {
        if self.n_ground == 0 || self.n_excited == 0 {
            return None;
        }
        Some(1.0 - self.mis_ground - self.mis_excited)
    }
}

/// Simulate the first integration window of a strong readout after a
/// rotation by `theta` from thermal-ground preparation, and histogram the
/// scaled i outcomes.
pub fn strong_histograms(
    theta: f64,
    n_trials: u64,
    setup: &StrongReadoutSetup,
    plan: SeedPlan,
) -> StrongReadout {
    let mut acc = StrongReadoutAccumulator::new(theta, setup.clone());
    for t in 0..n_trials {
        acc.add_trial(&mut plan.stream(t).rng());
    }
    acc.finish()
}

/// Configuration for [`strong_histograms`].
#[derive(Clone, Debug)]
pub struct StrongReadoutSetup {
    pub sp: StrengthParams,
    pub qp: QubitParams,
    pub t_m: f64,
    pub dt: f64,
}

impl StrongReadoutSetup {
    pub fn paper_strength(sp: StrengthParams, qp: QubitParams) -> Self {
        Self {
            sp,
            qp,
            t_m: crate::params::defaults::T_M,
            dt: crate::params::defaults::DT,
        }
    }
}

/// Streaming accumulator behind [`strong_histograms`]; mergeable for
/// parallel folds.
#[derive(Clone, Debug)]
pub struct StrongReadoutAccumulator {
    theta: f64,
    setup: StrongReadoutSetup,
    hist: Hist1D,
    n_ground: u64,
    n_excited: u64,
    wrong_ground: u64,
    wrong_excited: u64,
}

impl StrongReadoutAccumulator {
    pub fn new(theta: f64, setup: StrongReadoutSetup) -> Self {
        Self {
            theta,
            setup,
            hist: Hist1D::new(-8.0, 8.0, 320),
            n_ground: 0,
            n_excited: 0,
            wrong_ground: 0,
            wrong_excited: 0,
        }
    }

    pub fn add_trial(&mut self, rng: &mut TrialRng) {
        let qp = &self.setup.qp;
        let steps = (self.setup.t_m / self.setup.dt).round() as usize;
        let thermal = sample_thermal_label(qp.p_eq, rng);
        let state = BlochVector::pole(thermal).rotate(RotationAxis::X, self.theta);
        let start = sample_label(state.z, rng);
        let win = sample_window(qp, start, steps, self.setup.dt, rng);
        let i = self.setup.sp.s * win.average + crate::rng::normal(rng);
        self.hist.add(i);
        if start > 0 {
            self.n_excited += 1;
            if i < 0.0 {
                self.wrong_excited += 1;
            }
        } else {
            self.n_ground += 1;
            if i > 0.0 {
                self.wrong_ground += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.hist.merge(&other.hist);
        self.n_ground += other.n_ground;
        self.n_excited += other.n_excited;
        self.wrong_ground += other.wrong_ground;
        self.wrong_excited += other.wrong_excited;
    }

    pub fn finish(self) -> StrongReadout {
        let bins = self.hist.bins();
        let neg: Vec<(f64, f64)> = bins.iter().copied().filter(|(c, _)| *c < 0.0).collect();
        let pos: Vec<(f64, f64)> = bins.iter().copied().filter(|(c, _)| *c > 0.0).collect();
        let mode_ground = fit_gaussian_peak(&neg, 1.2).ok();
        let mode_excited = fit_gaussian_peak(&pos, 1.2).ok();
        StrongReadout {
            theta: self.theta,
            histogram: self.hist,
            mode_ground,
            mode_excited,
            n_ground: self.n_ground,
            n_excited: self.n_excited,
            mis_ground: if self.n_ground > 0 {
                self.wrong_ground as f64 / self.n_ground as f64
            } else {
                f64::NAN
            },
            mis_excited: if self.n_excited > 0 {
                self.wrong_excited as f64 / self.n_excited as f64
            } else {
                f64::NAN
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::defaults;

    fn ideal_qubit() -> QubitParams {
        QubitParams {
            t1: 1.0,
            t2: 1.0,
            p_eq: 0.0,
            tau: 0.0,
        }
    }

    fn setup_with(s_weak: f64, eta: f64, qp: QubitParams) -> ProtocolSetup {
        ProtocolSetup::new(
            StrengthParams::scaled(s_weak, 1.28 * s_weak),
            StrengthParams::scaled(2.4, 1.28 * 2.4),
            qp,
            eta,
        )
    }

    #[test]
    fn setup_validation() {
        let mut s = setup_with(0.5, 0.2, defaults::qubit());
        s.validate().unwrap();
        s.sp_strong = StrengthParams::scaled(1.0, 0.0);
        assert!(matches!(
            s.validate(),
            Err(ProtocolError::WeakPreparation { .. })
        ));
        let mut s = setup_with(0.5, 0.2, defaults::qubit());
        s.axes = vec![TomoAxis::X, TomoAxis::X];
        assert!(matches!(s.validate(), Err(ProtocolError::BadAxisCycle)));
    }

    #[test]
    fn eigenvalue_is_sign_of_tomo_outcome() {
        let setup = setup_with(1.0, 0.5, defaults::qubit());
        let trials = run_protocol(&setup, 300, SeedPlan::new(41)).unwrap();
        for t in &trials {
            assert_eq!(t.tomo_eigenvalue, if t.tomo_outcome.i >= 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn zero_strength_leaves_plus_y() {
        // s_weak = 0, eta = 1, tau = 0: tomograms flat at <X> = 0,
        // <Y> = 1, <Z> = 0 within binomial error.
        let setup = setup_with(0.0, 1.0, ideal_qubit());
        let trials = run_protocol(&setup, 30_000, SeedPlan::new(42)).unwrap();
        let (kept, report) = post_select(&trials, 1.5);
        assert!(!report.low_retention);
        let maps = bin_conditional(&kept, MapGrid::DEFAULT);
        let mx = maps.x.weighted_mean().unwrap();
        let my = maps.y.weighted_mean().unwrap();
        let mz = maps.z.weighted_mean().unwrap();
        let se = 4.0 / (maps.retained() as f64 / 3.0).sqrt();
        assert!(mx.abs() < se, "mean X = {mx}");
        assert!(my > 1.0 - 2.0 * se, "mean Y = {my}");
        assert!(mz.abs() < se, "mean Z = {mz}");
    }

    #[test]
    fn strong_measurement_projects() {
        // s_weak = 2.85: <Z>_c saturates for |i| > 2 while <X>, <Y>
        // vanish unconditionally.
        let setup = setup_with(2.85, 1.0, ideal_qubit());
        let trials = run_protocol(&setup, 60_000, SeedPlan::new(43)).unwrap();
        let (kept, _) = post_select(&trials, 1.5);
        let maps = bin_conditional(&kept, MapGrid::DEFAULT);
        let mut pos_z = (0.0, 0u64);
        for (bi, bq, n, mean) in maps.z.iter_filled() {
            let i = maps.z.grid.center(bi);
            let _ = bq;
            if i > 2.0 {
                pos_z.0 += mean * n as f64;
                pos_z.1 += n;
            }
        }
        let mean_pos = pos_z.0 / pos_z.1 as f64;
        assert!(mean_pos > 0.95, "conditional Z for i > 2: {mean_pos}");
        let mx = maps.x.weighted_mean().unwrap();
        let my = maps.y.weighted_mean().unwrap();
        let n_eff = (maps.retained() / 3) as f64;
        assert!(mx.abs() < 5.0 / n_eff.sqrt());
        assert!(my.abs() < 5.0 / n_eff.sqrt());
    }

    #[test]
    fn post_selection_thresholds() {
        let setup = setup_with(0.5, 0.5, defaults::qubit());
        let trials = run_protocol(&setup, 40_000, SeedPlan::new(44)).unwrap();

        // threshold 0: every ground-sign prep retained
        let (kept0, _) = post_select(&trials, 0.0);
        let manual = trials
            .iter()
            .filter(|t| t.prep_outcome.i < 0.0 && t.tomo_outcome.i.abs() > 0.0)
            .count();
        assert_eq!(kept0.len(), manual);

        // threshold 10: nothing survives, warning set
        let (kept10, report10) = post_select(&trials, 10.0);
        assert!(kept10.is_empty());
        assert!(report10.low_retention);

        // threshold 1.5 with an ideal qubit: the prep cut alone keeps
        // Phi(0.9) of ground-prepared trials (Gaussian-tail oracle).
        let ideal = setup_with(0.5, 0.5, ideal_qubit());
        let trials = run_protocol(&ideal, 40_000, SeedPlan::new(45)).unwrap();
        let n_prep_pass = trials
            .iter()
            .filter(|t| t.prep_outcome.i < -1.5)
            .count() as f64;
        let frac = n_prep_pass / trials.len() as f64;
        let phi09 = 0.8159398746532405;
        let se = (phi09 * (1.0 - phi09) / trials.len() as f64).sqrt();
        assert!((frac - phi09).abs() < 4.0 * se, "prep retention = {frac}");
    }

    #[test]
    fn histogram_counts_every_retained_trial() {
        let setup = setup_with(1.0, 0.2, defaults::qubit());
        let trials = run_protocol(&setup, 20_000, SeedPlan::new(46)).unwrap();
        let (kept, report) = post_select(&trials, 1.5);
        let maps = bin_conditional(&kept, MapGrid::DEFAULT);
        assert_eq!(maps.retained(), report.retained);
        assert_eq!(
            maps.x.total_entries() + maps.y.total_entries() + maps.z.total_entries(),
            report.retained
        );
    }

    #[test]
    fn theory_values() {
        let qp = defaults::qubit();
        // exp(-380/2800) = 0.8730920...
        assert!((theory_slope_z(1.0, &qp) - 0.8730920517276249).abs() < 1e-12);

        // cos(5.12) e^-4 times the T2 factor; frozen from direct
        // evaluation with T2 = 0.698 us, tau = 380 ns.
        let t2_factor = (-qp.tau / qp.t2).exp();
        assert!((t2_factor - 0.5801824781346383).abs() < 1e-12);
        let sx = theory_slope_x(1.0, 1.28, 0.2, &qp);
        assert!((sx - 0.00421249288695753).abs() < 1e-12, "slope_x = {sx}");

        // theory_y at s = 0 is exactly the T2 factor.
        assert!((theory_y(0.0, 0.0, 0.2, &qp) - t2_factor).abs() < 1e-15);
        let ty = theory_y(1.0, 1.28, 0.2, &qp);
        assert!((ty - 0.003882597007539028).abs() < 1e-12, "y = {ty}");
    }

    #[test]
    fn equal_modes_at_half_turn() {
        let setup = StrongReadoutSetup::paper_strength(
            StrengthParams::scaled(2.4, 1.28 * 2.4),
            ideal_qubit(),
        );
        let out = strong_histograms(FRAC_PI_2, 120_000, &setup, SeedPlan::new(47));
        let g = out.mode_ground.unwrap();
        let e = out.mode_excited.unwrap();
        assert!((g.mean + 2.4).abs() < 0.03, "ground mode at {}", g.mean);
        assert!((e.mean - 2.4).abs() < 0.03, "excited mode at {}", e.mean);
        let frac_pos = out.n_excited as f64 / (out.n_ground + out.n_excited) as f64;
        assert!((frac_pos - 0.5).abs() < 0.01);
        let f = out.fidelity_empirical().unwrap();
        assert!((f - 0.9836).abs() < 0.01, "fidelity = {f}");
    }

    #[test]
    fn thermal_population_shows_in_wrong_mode() {
        let setup = StrongReadoutSetup::paper_strength(
            StrengthParams::scaled(2.4, 1.28 * 2.4),
            defaults::qubit(),
        );
        let out = strong_histograms(0.0, 100_000, &setup, SeedPlan::new(48));
        // Minority excited population is visible: > 5% of outcomes land
        // above threshold even though the nominal preparation is ground.
        let pos: u64 = out
            .histogram
            .bins()
            .iter()
            .filter(|(c, _)| *c > 0.0)
            .map(|(_, n)| *n as u64)
            .sum();
        let frac = pos as f64 / out.histogram.total() as f64;
        assert!(frac > 0.05, "wrong-mode fraction = {frac}");
        assert!(frac < 0.15);
    }
}
