//! Outcome-conditioned measurement back-action on the qubit state.
//!
//! A finite-strength QND measurement of z with outcome `(i, q)` (scaled
//! units, sigma = 1) acts on the Bloch vector as
//!
//! * populations: Bayes update with likelihood ratio `exp(2 i s)`, i.e.
//!   `z -> (z + tanh(i s)) / (1 + z tanh(i s))`,
//! * coherence: shrink by `sech(i s) / (1 + z tanh(i s))`, rotate about z
//!   by `-(q s + qbar s (1-eta)/eta)`, and damp by
//!   `exp(-s^2 (1-eta)/eta)` for the unobserved fraction of the record.
//!
//! For a perfectly efficient chain (`eta = 1`) the extra phase and damping
//! factors are absent and pure states stay pure for every outcome.

use crate::bloch::BlochVector;
use crate::params::{Outcome, StrengthParams};

/// Beyond this value of `|i * s|` the hyperbolics are saturated: z is
/// pinned to +-1 and the coherence factor to 0, avoiding overflow in cosh.
pub const SATURATION_ARG: f64 = 30.0;

struct Factors {
    /// tanh(i s), the population pull.
    a: f64,
    /// sech(i s), the coherence shrink.
    sech: f64,
    /// Accumulated z-rotation angle.
    phase: f64,
    /// Inefficiency damping of the coherence.
    damp: f64,
}

fn factors(out: Outcome, sp: &StrengthParams, eta: f64) -> Factors {
    let u = out.i * sp.s;
    let (a, sech) = if u.abs() > SATURATION_ARG {
        (u.signum(), 0.0)
    } else {
        (u.tanh(), 1.0 / u.cosh())
    };
    let (phase, damp) = if eta >= 1.0 {
        (out.q * sp.s, 1.0)
    } else {
        let loss = (1.0 - eta) / eta;
        (
            out.q * sp.s + sp.qbar * sp.s * loss,
            (-sp.s * sp.s * loss).exp(),
        )
    };
    Factors {
        a,
        sech,
        phase,
        damp,
    }
}

/// Deterministic part of the phase kick, `qbar s (1-eta)/eta`.
///
/// This offset is outcome independent, so a data processor that knows the
/// window statistics may undo it in software; see
/// [`update_general_phase_corrected`].
pub fn deterministic_phase(sp: &StrengthParams, eta: f64) -> f64 {
    if eta >= 1.0 {
        0.0
    } else {
        sp.qbar * sp.s * (1.0 - eta) / eta
    }
}

/// Back-action of one measurement on a qubit prepared on the +y axis.
///
/// Returns the final Bloch vector
/// `( sech(is) sin(phi) d, sech(is) cos(phi) d, tanh(is) )` with
/// `phi = q s + qbar s (1-eta)/eta` and `d = exp(-s^2 (1-eta)/eta)`.
pub fn update_plus_y(out: Outcome, sp: &StrengthParams, eta: f64) -> BlochVector {
    let f = factors(out, sp, eta);
    BlochVector {
        x: f.sech * f.phase.sin() * f.damp,
        y: f.sech * f.phase.cos() * f.damp,
        z: f.a,
    }
}

/// Back-action of one measurement on an arbitrary initial state.
///
/// Reduces to [`update_plus_y`] bit for bit when `init` is the +y pole.
/// The z poles are fixed points for every outcome, and for `eta = 1` the
/// purity of the state is preserved exactly.
pub fn update_general(
    init: BlochVector,
    out: Outcome,
    sp: &StrengthParams,
    eta: f64,
) -> BlochVector {
    let f = factors(out, sp, eta);
    let denom = 1.0 + init.z * f.a;
    if denom == 0.0 {
        // Pole state met a perfectly contradicting outcome; the pole is
        // a fixed point of the map.
        return BlochVector::new(0.0, 0.0, init.z);
    }
    let z = (init.z + f.a) / denom;
    let coeff = f.sech / denom;
    let (sin_p, cos_p) = (f.phase.sin(), f.phase.cos());
    // Rotation by -phase about z, sign fixed by the +y reduction.
    let xr = init.x * cos_p + init.y * sin_p;
    let yr = -init.x * sin_p + init.y * cos_p;
    BlochVector {
        x: xr * coeff * f.damp,
        y: yr * coeff * f.damp,
        z,
    }
}

/// [`update_general`] followed by software removal of the deterministic
/// phase offset left by the lost channel.
pub fn update_general_phase_corrected(
    init: BlochVector,
    out: Outcome,
    sp: &StrengthParams,
    eta: f64,
) -> BlochVector {
    update_general(init, out, sp, eta).rotate_z(deterministic_phase(sp, eta))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn sp(s: f64, qbar: f64) -> StrengthParams {
        StrengthParams::scaled(s, qbar)
    }

    #[test]
    fn null_outcome_leaves_plus_y() {
        for s in [0.0, 0.5, 2.85] {
            let b = update_plus_y(Outcome::new(0.0, 0.0), &sp(s, 0.0), 1.0);
            assert_eq!((b.x, b.y, b.z), (0.0, 1.0, 0.0));
        }
    }

    #[test]
    fn efficient_update_matches_closed_form() {
        // s = 1, eta = 1, (i, q) = (1, 0.5); norm is exactly 1 via
        // sech^2 + tanh^2 = 1.
        let b = update_plus_y(Outcome::new(1.0, 0.5), &sp(1.0, 0.0), 1.0);
        assert!((b.x - 0.31069376919606384).abs() < TOL);
        assert!((b.y - 0.5687211297259573).abs() < TOL);
        assert!((b.z - 0.7615941559557649).abs() < TOL);
        assert!((b.purity() - 1.0).abs() < TOL);
    }

    #[test]
    fn inefficient_update_matches_closed_form() {
        // s = 1, eta = 0.5, qbar = 1.28: phase offset 1.28, damping e^-1.
        let b = update_plus_y(Outcome::new(1.0, 0.5), &sp(1.0, 1.28), 0.5);
        assert!((b.x - 0.23320778768727868).abs() < TOL);
        assert!((b.y - -0.04951236448049426).abs() < TOL);
        assert!((b.z - 0.7615941559557649).abs() < TOL);
    }

    #[test]
    fn strong_positive_outcome_projects_up() {
        let b = update_plus_y(Outcome::new(50.0, 0.0), &sp(1.0, 0.0), 1.0);
        assert_eq!((b.x, b.y, b.z), (0.0, 0.0, 1.0));
        let b = update_plus_y(Outcome::new(-50.0, 0.0), &sp(1.0, 0.0), 1.0);
        assert_eq!(b.z, -1.0);
    }

    #[test]
    fn general_reduces_to_plus_y_form() {
        let sp = sp(1.3, 1.28);
        for eta in [0.2, 0.5, 1.0] {
            for (i, q) in [(0.7, -1.1), (-2.0, 0.3), (0.0, 0.0), (4.0, 4.0)] {
                let a = update_plus_y(Outcome::new(i, q), &sp, eta);
                let b = update_general(BlochVector::PLUS_Y, Outcome::new(i, q), &sp, eta);
                assert_eq!(a.x.to_bits(), b.x.to_bits());
                assert_eq!(a.y.to_bits(), b.y.to_bits());
                assert_eq!(a.z.to_bits(), b.z.to_bits());
            }
        }
    }

    #[test]
    fn poles_are_fixed_points() {
        let sp = sp(2.4, 1.28);
        for z0 in [1.0, -1.0] {
            let init = BlochVector::new(0.0, 0.0, z0);
            for i in [-40.0, -3.0, 0.0, 0.4, 3.0, 40.0] {
                let b = update_general(init, Outcome::new(i, 0.7), &sp, 0.4);
                assert_eq!(b.z, z0, "i = {i}");
                assert_eq!((b.x, b.y), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn population_update_matches_two_hypothesis_bayes() {
        // Prior populations (0.75, 0.25); posterior odds multiply by
        // exp(2 i s).
        let init = BlochVector::new(0.0, 0.0, 0.5);
        let b = update_general(init, Outcome::new(1.0, 0.0), &sp(1.0, 0.0), 1.0);
        let w_e = 0.75 * (-(1.0f64 - 1.0) * (1.0 - 1.0) / 2.0).exp();
        let w_g = 0.25 * (-(1.0f64 + 1.0) * (1.0 + 1.0) / 2.0).exp();
        let oracle = (w_e - w_g) / (w_e + w_g);
        assert!((b.z - oracle).abs() < TOL);
        assert!((b.z - 0.9136709340400074).abs() < TOL);
    }

    #[test]
    fn efficient_general_update_preserves_purity() {
        let sp = sp(1.7, 0.9);
        let init = BlochVector::new(0.48, 0.6, 0.64); // unit norm
        for (i, q) in [(0.3, -0.4), (-1.9, 2.2), (5.0, -5.0)] {
            let b = update_general(init, Outcome::new(i, q), &sp, 1.0);
            assert!((b.purity() - 1.0).abs() < TOL, "({i}, {q}) -> {b:?}");
        }
    }

    #[test]
    fn damping_ratio_is_outcome_independent() {
        let sp = sp(1.2, 1.28);
        let eta = 0.3;
        let expected = (-sp.s * sp.s * (1.0 - eta) / eta).exp();
        for (i, q) in [(0.0, 0.0), (1.0, -2.0), (-0.7, 0.4)] {
            let full = update_plus_y(Outcome::new(i, q), &sp, 1.0);
            let lossy = update_plus_y(Outcome::new(i, q), &sp, eta);
            let c_full = (full.x * full.x + full.y * full.y).sqrt();
            let c_lossy = (lossy.x * lossy.x + lossy.y * lossy.y).sqrt();
            assert!((c_lossy / c_full - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_correction_undoes_deterministic_kick() {
        // With the offset removed, a (0, qbar) outcome of a lossy chain
        // leaves the state on the damped +y axis up to the random q kick.
        let sp = sp(0.8, 1.28);
        let eta = 0.25;
        let out = Outcome::new(0.0, 0.0);
        let b = update_general_phase_corrected(BlochVector::PLUS_Y, out, &sp, eta);
        assert!(b.x.abs() < 1e-12, "{b:?}");
        assert!(b.y > 0.0);
    }

    #[test]
    fn z_monotone_in_outcome() {
        let sp = sp(0.9, 0.0);
        let mut prev = -2.0;
        for k in 0..200 {
            let i = -8.0 + k as f64 * 0.08;
            let z = update_plus_y(Outcome::new(i, 0.0), &sp, 1.0).z;
            assert!(z > prev);
            prev = z;
        }
    }
}
