//! Two-dimensional invariant-plane form of Grover iterations.
//!
//! For a search space of `n` elements with `t` of them marked, every Grover
//! iteration (with any choice of oracle and diffusion phases) maps the plane
//! spanned by the two uniform superpositions
//!
//! * `|u>` — uniform over the unmarked elements,
//! * `|m>` — uniform over the marked elements,
//!
//! into itself. A state in this plane is a pair of complex amplitudes.
//! The standard iteration (both phases `pi`) acts on the plane as a rotation
//! by `theta`, where `cos(theta) = 1 - 2t/n`, so amplitudes stay real and the
//! state after `k` iterations is `(cos(theta0 + k*theta), sin(theta0 + k*theta))`
//! with `theta0 = theta / 2`. This module provides that closed form and the
//! generalized-phase 2x2 step used by exact schedules.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum tolerated squared-norm deviation for states fed into an iteration.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A search instance: `n_total` elements, `n_marked` of them marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchInstance {
    n_total: u64,
    n_marked: u64,
}

impl SearchInstance {
    /// Creates an instance; requires `n_total >= 1` and `n_marked <= n_total`.
    pub fn new(n_total: u64, n_marked: u64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::EmptySearchSpace);
        }
        if n_marked > n_total {
            return Err(Error::InvalidInstance {
                total: n_total,
                marked: n_marked,
            });
        }
        Ok(Self { n_total, n_marked })
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn n_marked(&self) -> u64 {
        self.n_marked
    }

    /// Fraction of marked elements `t / n`.
    pub fn fraction_marked(&self) -> f64 {
        self.n_marked as f64 / self.n_total as f64
    }

    /// True when every element is marked or none is; the invariant plane then
    /// degenerates to a single axis.
    pub fn is_degenerate(&self) -> bool {
        self.n_marked == 0 || self.n_marked == self.n_total
    }
}

/// Rotation angle of the standard iteration and the initial-state angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles {
    theta: f64,
    theta0: f64,
}

impl RotationAngles {
    /// Per-iteration rotation angle, in `[0, pi]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Angle of the uniform state against the unmarked axis; always `theta / 2`.
    pub fn theta0(&self) -> f64 {
        self.theta0
    }
}

/// Computes the rotation angles of an instance.
///
/// `theta` is recovered from `cos(theta) = 1 - 2t/n` and
/// `sin(theta) = 2*sqrt(t*(n-t))/n` via `atan2`, which keeps both identities
/// accurate to machine precision across the whole range, including `t = 0`
/// (`theta = 0`) and `t = n` (`theta = pi`).
pub fn rotation_angles(instance: SearchInstance) -> RotationAngles {
    let n = instance.n_total as f64;
    let t = instance.n_marked as f64;
    let cos_theta = 1.0 - 2.0 * t / n;
    let sin_theta = 2.0 * (t * (n - t)).sqrt() / n;
    let theta = sin_theta.atan2(cos_theta);
    RotationAngles {
        theta,
        theta0: theta / 2.0,
    }
}

/// Oracle and diffusion phases of one generalized iteration, in radians.
///
/// The oracle multiplies marked amplitudes by `e^{i*oracle}`; the diffusion
/// leaves the uniform state fixed and multiplies its orthogonal complement by
/// `e^{i*diffusion}`. Both phases equal to `pi` give the standard iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub oracle: f64,
    pub diffusion: f64,
}

impl PhasePair {
    /// Phases of the standard iteration: reflection oracle and reflection
    /// about the uniform state.
    pub const STANDARD: PhasePair = PhasePair {
        oracle: std::f64::consts::PI,
        diffusion: std::f64::consts::PI,
    };
}

/// Normalized state in the invariant plane: amplitudes along the uniform
/// unmarked and uniform marked directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceState {
    amp_unmarked: Complex64,
    amp_marked: Complex64,
}

impl SubspaceState {
    /// Builds a state from its two amplitudes; rejects squared-norm deviations
    /// beyond [`NORM_TOLERANCE`].
    pub fn new(amp_unmarked: Complex64, amp_marked: Complex64) -> Result<Self> {
        let state = Self {
            amp_unmarked,
            amp_marked,
        };
        state.check_norm()?;
        Ok(state)
    }

    pub fn amp_unmarked(&self) -> Complex64 {
        self.amp_unmarked
    }

    pub fn amp_marked(&self) -> Complex64 {
        self.amp_marked
    }

    /// Probability that measuring the state yields a marked element.
    pub fn success_probability(&self) -> f64 {
        self.amp_marked.norm_sqr()
    }

    fn norm_sqr(&self) -> f64 {
        self.amp_unmarked.norm_sqr() + self.amp_marked.norm_sqr()
    }

    fn check_norm(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// Real state at angle `alpha` against the unmarked axis.
    fn from_angle(alpha: f64) -> Self {
        Self {
            amp_unmarked: Complex64::new(alpha.cos(), 0.0),
            amp_marked: Complex64::new(alpha.sin(), 0.0),
        }
    }

    /// Zeroes the amplitude of a direction that does not exist for degenerate
    /// instances, renormalizing the surviving component to magnitude one.
    fn snap_degenerate(mut self, instance: SearchInstance) -> Self {
        if instance.n_marked == 0 {
            self.amp_marked = Complex64::new(0.0, 0.0);
            self.amp_unmarked /= self.amp_unmarked.norm();
        } else if instance.n_marked == instance.n_total {
            self.amp_unmarked = Complex64::new(0.0, 0.0);
            self.amp_marked /= self.amp_marked.norm();
        }
        self
    }
}

/// Uniform superposition over the whole search space, expressed in the plane:
/// `(cos(theta0), sin(theta0))` with both amplitudes real and nonnegative.
pub fn initial_state(instance: SearchInstance) -> SubspaceState {
    let angles = rotation_angles(instance);
    SubspaceState::from_angle(angles.theta0()).snap_degenerate(instance)
}

/// Closed-form state after `iterations` standard iterations:
/// `(cos(theta0 + k*theta), sin(theta0 + k*theta))`.
pub fn state_after(instance: SearchInstance, iterations: u64) -> SubspaceState {
    let angles = rotation_angles(instance);
    let alpha = angles.theta0() + iterations as f64 * angles.theta();
    SubspaceState::from_angle(alpha).snap_degenerate(instance)
}

/// Success probability of the closed-form state after `iterations` standard
/// iterations: `sin^2(theta0 + k*theta)`.
pub fn success_probability(instance: SearchInstance, iterations: u64) -> f64 {
    state_after(instance, iterations).success_probability()
}

/// Applies one generalized iteration (oracle phase, then diffusion) to a state
/// in the plane of the instance described by `angles`.
///
/// Writing `c = cos(theta0)`, `s = sin(theta0)`, the oracle is
/// `diag(1, e^{i*phi})` and the diffusion restricted to the plane is
/// `P + e^{i*chi} (I - P)` with `P` the projector onto `(c, s)`. The product
/// is unitary, so norms are preserved to machine precision. Inputs whose
/// squared norm deviates from one by more than [`NORM_TOLERANCE`] are
/// rejected.
pub fn apply_iteration(
    state: &SubspaceState,
    angles: &RotationAngles,
    phases: PhasePair,
) -> Result<SubspaceState> {
    state.check_norm()?;
    Ok(apply_iteration_unchecked(state, angles, phases))
}

pub(crate) fn apply_iteration_unchecked(
    state: &SubspaceState,
    angles: &RotationAngles,
    phases: PhasePair,
) -> SubspaceState {
    let c = angles.theta0().cos();
    let s = angles.theta0().sin();
    let eo = Complex64::from_polar(1.0, phases.oracle);
    let ed = Complex64::from_polar(1.0, phases.diffusion);
    let one = Complex64::new(1.0, 0.0);

    let m00 = c * c + ed * (s * s);
    let m01 = eo * (c * s) * (one - ed);
    let m10 = (c * s) * (one - ed);
    let m11 = eo * (s * s + ed * (c * c));

    SubspaceState {
        amp_unmarked: m00 * state.amp_unmarked + m01 * state.amp_marked,
        amp_marked: m10 * state.amp_unmarked + m11 * state.amp_marked,
    }
}
