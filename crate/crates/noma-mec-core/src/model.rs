//! Scenario description and physical-layer bookkeeping for the two-user
//! uplink.
//!
//! Conventions used across the crate:
//!
//! - Noise power and bandwidth are normalized to one, so rates are in
//!   nats per second and a received power `p * g` is already an SNR.
//! - User m transmits at fixed power `p_m` for the first `d_m` seconds.
//!   User n transmits at `p_n1` during those `d_m` seconds (superimposed on
//!   user m) and then alone at `p_n2` for a further `t_n <= d_n - d_m`
//!   seconds.
//! - Energy is accounted for user n only: `d_m * p_n1 + t_n * p_n2`.
//!
//! The decisive scalar almost everywhere is `p_m * g_m`, user m's received
//! power at the base station; see [`Scenario::um_received_power`]. The
//! closed-form regimes are separated by the exponential thresholds in
//! [`Thresholds`].

use core::fmt;

use crate::math;

/// Relative tolerance used when a scenario is compared against a regime
/// threshold. Keeps boundary scenarios (built, for example, by dividing a
/// threshold by a gain and multiplying back) on the branch the boundary
/// belongs to instead of letting the last rounding error pick one.
pub const FEASIBILITY_REL_TOL: f64 = 1e-12;

/// `a <= b` closed by [`FEASIBILITY_REL_TOL`].
pub(crate) fn le_rel(a: f64, b: f64) -> bool {
    a <= b + FEASIBILITY_REL_TOL * math::max(math::abs(a), math::abs(b))
}

/// Validation failure raised by the scenario constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    /// A channel gain was not a positive finite number.
    InvalidGain,
    /// The task size was not a positive finite number of nats.
    InvalidTaskSize,
    /// Deadlines must satisfy `0 < d_m < d_n`, both finite.
    InvalidDeadlines,
    /// User m's transmit power was negative or NaN/infinite.
    InvalidUmPower,
    /// A transmit power of user n was negative or NaN.
    InvalidPower,
    /// The second-phase duration was negative or NaN.
    InvalidDuration,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ModelError::InvalidGain => "channel gains must be positive and finite",
            ModelError::InvalidTaskSize => "task size must be a positive, finite nat count",
            ModelError::InvalidDeadlines => "deadlines must satisfy 0 < d_m < d_n, both finite",
            ModelError::InvalidUmPower => "user m power must be nonnegative and finite",
            ModelError::InvalidPower => "user n powers must be nonnegative and not NaN",
            ModelError::InvalidDuration => "second-phase duration must be nonnegative, not NaN",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

/// Channel power gains of the two uplinks, noise-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGains {
    g_m: f64,
    g_n: f64,
}

impl ChannelGains {
    /// Both gains must be positive and finite.
    pub fn new(g_m: f64, g_n: f64) -> Result<Self, ModelError> {
        if !(g_m.is_finite() && g_m > 0.0 && g_n.is_finite() && g_n > 0.0) {
            return Err(ModelError::InvalidGain);
        }
        Ok(Self { g_m, g_n })
    }

    /// Gain of user m's uplink.
    pub fn g_m(&self) -> f64 {
        self.g_m
    }

    /// Gain of user n's uplink.
    pub fn g_n(&self) -> f64 {
        self.g_n
    }
}

/// User n's offloading task: size and the two deadlines that bracket the
/// transmission phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskProfile {
    n_nats: f64,
    d_m: f64,
    d_n: f64,
}

impl TaskProfile {
    /// Requires `n_nats > 0` and `0 < d_m < d_n`, all finite.
    pub fn new(n_nats: f64, d_m: f64, d_n: f64) -> Result<Self, ModelError> {
        if !(n_nats.is_finite() && n_nats > 0.0) {
            return Err(ModelError::InvalidTaskSize);
        }
        if !(d_m.is_finite() && d_n.is_finite() && d_m > 0.0 && d_n > d_m) {
            return Err(ModelError::InvalidDeadlines);
        }
        Ok(Self { n_nats, d_m, d_n })
    }

    /// Nats user n must deliver.
    pub fn n_nats(&self) -> f64 {
        self.n_nats
    }

    /// User m's deadline; duration of the superimposed phase.
    pub fn d_m(&self) -> f64 {
        self.d_m
    }

    /// User n's deadline.
    pub fn d_n(&self) -> f64 {
        self.d_n
    }

    /// Longest time user n may transmit alone: `d_n - d_m`.
    pub fn second_phase_limit(&self) -> f64 {
        self.d_n - self.d_m
    }
}

/// A complete problem instance: channels, task, and user m's fixed power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    gains: ChannelGains,
    task: TaskProfile,
    p_m: f64,
}

impl Scenario {
    /// Requires `p_m >= 0`, finite.
    pub fn new(gains: ChannelGains, task: TaskProfile, p_m: f64) -> Result<Self, ModelError> {
        if !(p_m.is_finite() && p_m >= 0.0) {
            return Err(ModelError::InvalidUmPower);
        }
        Ok(Self { gains, task, p_m })
    }

    /// Convenience constructor from bare numbers.
    pub fn from_parts(
        n_nats: f64,
        d_m: f64,
        d_n: f64,
        p_m: f64,
        g_m: f64,
        g_n: f64,
    ) -> Result<Self, ModelError> {
        Scenario::new(
            ChannelGains::new(g_m, g_n)?,
            TaskProfile::new(n_nats, d_m, d_n)?,
            p_m,
        )
    }

    pub fn gains(&self) -> &ChannelGains {
        &self.gains
    }

    pub fn task(&self) -> &TaskProfile {
        &self.task
    }

    /// User m's transmit power.
    pub fn p_m(&self) -> f64 {
        self.p_m
    }

    pub fn g_m(&self) -> f64 {
        self.gains.g_m()
    }

    pub fn g_n(&self) -> f64 {
        self.gains.g_n()
    }

    pub fn n_nats(&self) -> f64 {
        self.task.n_nats()
    }

    pub fn d_m(&self) -> f64 {
        self.task.d_m()
    }

    pub fn d_n(&self) -> f64 {
        self.task.d_n()
    }

    /// `d_n - d_m`, the widest possible second phase.
    pub fn second_phase_limit(&self) -> f64 {
        self.task.second_phase_limit()
    }

    /// User m's received power `p_m * g_m`: the SNR user m would enjoy on a
    /// clean channel, and the scalar every regime threshold is compared
    /// against.
    pub fn um_received_power(&self) -> f64 {
        self.p_m * self.gains.g_m()
    }
}

/// SIC decoding order at the base station during the superimposed phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodingOrder {
    /// User n is decoded first, so user n's first-phase rate sees user m's
    /// signal as interference; user m is then decoded cleanly. The safe
    /// order: user m's rate never depends on user n's choices.
    UnFirst,
    /// User m is decoded first (while user n's signal interferes with it)
    /// and cancelled, so user n's first-phase rate is interference-free.
    /// Admissible only while user m's deadline still holds under the
    /// interference.
    UmFirst,
}

impl fmt::Display for DecodingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodingOrder::UnFirst => "un_first",
            DecodingOrder::UmFirst => "um_first",
        })
    }
}

/// Shape of a power schedule, by which constraints it keeps active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    /// No first-phase transmission: user n sends everything alone.
    Oma,
    /// Everything is delivered during the superimposed phase; the second
    /// phase is unused.
    PureNoma,
    /// First-phase power rides the interference cap that protects user m's
    /// deadline; the remainder is sent in the second phase.
    HybridConstrained,
    /// Equal power in both phases, the unconstrained optimum when user m's
    /// received power is large enough to tolerate it.
    HybridEqualPower,
    /// Baseline schedule under the safe decoding order (user n decoded
    /// first), with both phases in use.
    ExistingQosSic,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Oma => "oma",
            StrategyKind::PureNoma => "pure_noma",
            StrategyKind::HybridConstrained => "hybrid_constrained",
            StrategyKind::HybridEqualPower => "hybrid_equal_power",
            StrategyKind::ExistingQosSic => "existing_qos_sic",
        })
    }
}

/// User n's decision variables plus the decoding order they assume.
///
/// Powers must be nonnegative and not NaN. `+inf` is accepted and means the
/// scenario demands more power than `f64` can represent (deadlines so tight
/// that the required exponential overflows); energies computed from such an
/// allocation are `+inf` and render as `inf` downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub p_n1: f64,
    pub p_n2: f64,
    pub t_n: f64,
    pub order: DecodingOrder,
    pub kind: StrategyKind,
}

impl PowerAllocation {
    /// Rejects negative or NaN powers and a negative, NaN, or infinite
    /// duration. Whether `t_n` fits a particular scenario's window is
    /// checked by the solvers, not here.
    pub fn new(
        p_n1: f64,
        p_n2: f64,
        t_n: f64,
        order: DecodingOrder,
        kind: StrategyKind,
    ) -> Result<Self, ModelError> {
        if p_n1.is_nan() || p_n2.is_nan() || p_n1 < 0.0 || p_n2 < 0.0 {
            return Err(ModelError::InvalidPower);
        }
        if !(t_n.is_finite() && t_n >= 0.0) {
            return Err(ModelError::InvalidDuration);
        }
        Ok(Self {
            p_n1,
            p_n2,
            t_n,
            order,
            kind,
        })
    }
}

/// Why a solver declined to produce an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// User m's received power is at or below the floor a schedule needs;
    /// for the interference-cancelling order this means user m's deadline
    /// cannot survive any first-phase transmission by user n.
    UmPowerTooLow,
    /// User m's received power exceeds the band in which the requested
    /// closed form is valid (used both by the baseline schedule above its
    /// cap and by the constrained hybrid when the cap outruns the task).
    UmPowerTooHighForExisting,
    /// The second phase has zero duration, so a schedule that needs one
    /// cannot exist.
    EmptySecondPhase,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfeasibleReason::UmPowerTooLow => "um_power_too_low",
            InfeasibleReason::UmPowerTooHighForExisting => "um_power_too_high_for_existing",
            InfeasibleReason::EmptySecondPhase => "empty_second_phase",
        })
    }
}

/// Result of a solver: an allocation with its energy, or a typed refusal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverOutcome {
    Feasible {
        allocation: PowerAllocation,
        energy_joules: f64,
    },
    Infeasible(InfeasibleReason),
}

impl SolverOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolverOutcome::Feasible { .. })
    }

    /// Energy of a feasible outcome.
    pub fn energy(&self) -> Option<f64> {
        match self {
            SolverOutcome::Feasible { energy_joules, .. } => Some(*energy_joules),
            SolverOutcome::Infeasible(_) => None,
        }
    }

    /// Energy of a feasible outcome, `+inf` for an infeasible one. The
    /// natural scalar for "pick the cheaper branch" comparisons.
    pub fn energy_or_inf(&self) -> f64 {
        self.energy().unwrap_or(f64::INFINITY)
    }

    pub fn allocation(&self) -> Option<&PowerAllocation> {
        match self {
            SolverOutcome::Feasible { allocation, .. } => Some(allocation),
            SolverOutcome::Infeasible(_) => None,
        }
    }

    pub fn infeasible_reason(&self) -> Option<InfeasibleReason> {
        match self {
            SolverOutcome::Feasible { .. } => None,
            SolverOutcome::Infeasible(reason) => Some(*reason),
        }
    }
}

/// The exponential thresholds on `p_m * g_m` that separate the scheduling
/// regimes, all derived from the task alone.
///
/// With `e1 = e^{n/d_m} - 1` (the first-phase SNR that alone meets the task
/// within `d_m`):
///
/// - `theta1 = e1`: floor for any interference-cancelling schedule.
/// - `theta2 = e^{n/d_n} * e1`: ceiling of the constrained-hybrid band;
///   above it the equal-power schedule takes over.
/// - `theta3 = e^{n/d_m} * e1`: point at which the interference cap stops
///   binding even if the entire task is pushed into the first phase.
/// - `theta4 = e^{n/(d_n-d_m)} - 1`: ceiling of the baseline schedule's
///   band; above it the baseline degrades to single-phase transmission.
/// - `theta5`: the equal-power feasibility floor `e^{n/(d_m+t_n)} * e1`
///   evaluated at the full window `t_n = d_n - d_m`, where it coincides
///   with `theta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub theta5: f64,
}

/// User n's first-phase rate in nats/s under the given decoding order.
///
/// Decoded first, user n sees user m's received power as interference;
/// decoded second (after user m is cancelled) the channel is clean.
///
/// # Panics
///
/// Panics if `p_n1` is negative or NaN.
pub fn rate_first_phase(p_n1: f64, order: DecodingOrder, s: &Scenario) -> f64 {
    assert!(p_n1 >= 0.0, "first-phase power must be nonnegative");
    let own = p_n1 * s.g_n();
    match order {
        DecodingOrder::UnFirst => math::ln_1p(own / (1.0 + s.um_received_power())),
        DecodingOrder::UmFirst => math::ln_1p(own),
    }
}

/// User m's rate while user n's first-phase signal is still uncancelled,
/// i.e. the rate user m gets when it is decoded first.
///
/// # Panics
///
/// Panics if `p_n1` is negative or NaN.
pub fn um_rate_under_interference(p_n1: f64, s: &Scenario) -> f64 {
    assert!(p_n1 >= 0.0, "first-phase power must be nonnegative");
    math::ln_1p(s.um_received_power() / (1.0 + p_n1 * s.g_n()))
}

/// Nats user n delivers under `a`: first phase at the order-dependent rate
/// for `d_m` seconds, second phase alone for `t_n` seconds.
pub fn offloaded_nats(a: &PowerAllocation, s: &Scenario) -> f64 {
    let first = s.d_m() * rate_first_phase(a.p_n1, a.order, s);
    let second = if a.t_n > 0.0 {
        a.t_n * math::ln_1p(a.p_n2 * s.g_n())
    } else {
        0.0
    };
    first + second
}

/// User n's transmit energy under `a`: `d_m * p_n1 + t_n * p_n2`.
pub fn energy(a: &PowerAllocation, s: &Scenario) -> f64 {
    let second = if a.t_n > 0.0 { a.t_n * a.p_n2 } else { 0.0 };
    s.d_m() * a.p_n1 + second
}

/// The regime thresholds for `s`'s task. See [`Thresholds`].
pub fn feasibility_thresholds(s: &Scenario) -> Thresholds {
    let n = s.n_nats();
    let d_m = s.d_m();
    let d_n = s.d_n();
    let e1 = math::exp_m1(n / d_m);
    let theta2 = math::exp(n / d_n) * e1;
    Thresholds {
        theta1: e1,
        theta2,
        theta3: math::exp(n / d_m) * e1,
        theta4: math::exp_m1(n / s.second_phase_limit()),
        theta5: theta2,
    }
}
