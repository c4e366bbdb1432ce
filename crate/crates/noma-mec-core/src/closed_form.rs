//! Exact minimum-energy schedules for user n, for both SIC decoding orders,
//! and the selector that picks the cheaper order per scenario.
//!
//! All solvers fix the second phase at its widest, `t_n = d_n - d_m`:
//! lengthening the lone phase only ever lowers the energy bill, because
//! `x * (e^{a/x} - 1)` falls as `x` grows (see
//! [`oracle::verify_monotone_f`](crate::oracle::verify_monotone_f)).
//!
//! Under the safe order (user n decoded first, [`solve_existing`]) the
//! first-phase rate fights user m's interference. The schedule splits power
//! so the task constraint is tight; it is valid while `p_m * g_m` stays at
//! or below `theta4`, and degrades to single-phase [`solve_oma`] above
//! that.
//!
//! Under the cancelling order (user m decoded first, [`solve_lemma1`]) user
//! n's first phase is interference-free, but user n must cap `p_n1` so that
//! user m's deadline survives the uncancelled interference. With
//! `x = p_m * g_m`:
//!
//! - `x <= theta1`: no first-phase power is admissible at all.
//! - `theta1 < x <= theta2`: the cap binds; first phase rides it and the
//!   rest of the task goes to the second phase ([`StrategyKind::HybridConstrained`]).
//! - `x > theta2`: the cap is slack at the unconstrained optimum, which
//!   spends equal power in both phases ([`StrategyKind::HybridEqualPower`]).
//!
//! [`solve_hybrid_sic`] runs both orders and keeps the cheaper schedule,
//! preferring the safe order on ties so user m's service never depends on
//! user n's numerics.

use crate::math;
use crate::model::{
    energy, feasibility_thresholds, le_rel, DecodingOrder, InfeasibleReason, PowerAllocation,
    Scenario, SolverOutcome, StrategyKind,
};

/// Relative energy margin inside which the two decoding orders count as
/// tied and the safe order wins.
pub const ENERGY_TIE_REL_TOL: f64 = 1e-9;

/// The four stationary schedules of the cancelling order at a fixed
/// second-phase duration, each with its own validity band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSet {
    pub oma: SolverOutcome,
    pub hybrid_constrained: SolverOutcome,
    pub hybrid_equal_power: SolverOutcome,
    pub pure_noma: SolverOutcome,
}

/// Range of `p_m` (watts) over which the equal-power schedule is certified
/// to cost no more than the safe-order schedule: `[theta2/g_m, theta4/g_m]`.
/// Meaningful when `applicable` (the band is nonempty, i.e.
/// `theta2 <= theta4`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Band {
    pub applicable: bool,
    pub lower_pm: f64,
    pub upper_pm: f64,
}

fn feasible(
    p_n1: f64,
    p_n2: f64,
    t_n: f64,
    order: DecodingOrder,
    kind: StrategyKind,
    s: &Scenario,
) -> SolverOutcome {
    let allocation = PowerAllocation::new(p_n1, p_n2, t_n, order, kind)
        .expect("solver emitted a valid allocation");
    SolverOutcome::Feasible {
        allocation,
        energy_joules: energy(&allocation, s),
    }
}

/// Single-phase schedule: user n stays silent while user m transmits and
/// delivers everything alone in the full window. Always feasible; the
/// benchmark every multi-phase schedule must beat.
pub fn solve_oma(s: &Scenario) -> SolverOutcome {
    let window = s.second_phase_limit();
    let p_n2 = math::exp_m1(s.n_nats() / window) / s.g_n();
    feasible(
        0.0,
        p_n2,
        window,
        DecodingOrder::UnFirst,
        StrategyKind::Oma,
        s,
    )
}

/// Two-phase schedule under the safe decoding order at `t_n = d_n - d_m`.
///
/// Writing `a = 1 + p_m * g_m` for the interference floor, the task
/// constraint is kept tight and the energy-optimal split is
///
/// ```text
/// p_n1 = a * (e^q - 1) / g_n,   q = (n - (d_n - d_m) * ln a) / d_n,
/// p_n2 = (a * e^q - 1) / g_n.
/// ```
///
/// Valid while `p_m * g_m <= theta4`; beyond that the first phase is
/// useless against the interference and the schedule falls back to
/// [`solve_oma`]. Total: always returns a feasible outcome.
pub fn solve_existing(s: &Scenario) -> SolverOutcome {
    let th = feasibility_thresholds(s);
    let x = s.um_received_power();
    if !le_rel(x, th.theta4) {
        return solve_oma(s);
    }
    let n = s.n_nats();
    let d_n = s.d_n();
    let window = s.second_phase_limit();
    let ln_a = math::ln_1p(x);
    let q = (n - window * ln_a) / d_n;
    // q >= 0 inside the band; clamp the last-bit negative at the edge.
    let p_n1 = math::max(0.0, (1.0 + x) * math::exp_m1(q)) / s.g_n();
    let p_n2 = math::exp_m1(q + ln_a) / s.g_n();
    feasible(
        p_n1,
        p_n2,
        window,
        DecodingOrder::UnFirst,
        StrategyKind::ExistingQosSic,
        s,
    )
}

/// Two-phase schedule under the cancelling decoding order at
/// `t_n = d_n - d_m`, or a typed refusal when user m's received power
/// `x = p_m * g_m` cannot tolerate any first-phase transmission
/// (`x <= theta1`).
///
/// In the band `theta1 < x <= theta2` the interference cap binds:
///
/// ```text
/// beta = x / (e^{n/d_m} - 1),
/// p_n1 = (beta - 1) / g_n,
/// p_n2 = (e^{(n - d_m ln beta) / (d_n - d_m)} - 1) / g_n.
/// ```
///
/// Above `theta2` the cap is slack and equal power is optimal:
/// `p_n1 = p_n2 = (e^{n/d_n} - 1) / g_n`.
pub fn solve_lemma1(s: &Scenario) -> SolverOutcome {
    let th = feasibility_thresholds(s);
    let x = s.um_received_power();
    if le_rel(x, th.theta1) {
        return SolverOutcome::Infeasible(InfeasibleReason::UmPowerTooLow);
    }
    let n = s.n_nats();
    let g_n = s.g_n();
    let window = s.second_phase_limit();
    if le_rel(x, th.theta2) {
        let beta = x / th.theta1;
        let p_n1 = math::max(0.0, beta - 1.0) / g_n;
        let q = (n - s.d_m() * math::ln(beta)) / window;
        let p_n2 = math::max(0.0, math::exp_m1(q)) / g_n;
        feasible(
            p_n1,
            p_n2,
            window,
            DecodingOrder::UmFirst,
            StrategyKind::HybridConstrained,
            s,
        )
    } else {
        let p = math::exp_m1(n / s.d_n()) / g_n;
        feasible(
            p,
            p,
            window,
            DecodingOrder::UmFirst,
            StrategyKind::HybridEqualPower,
            s,
        )
    }
}

/// The four stationary schedules of the cancelling order at a supplied
/// second-phase duration `t_n`, each feasible only inside its own band of
/// `x = p_m * g_m`:
///
/// - `oma`: any `x`, needs `t_n > 0`.
/// - `hybrid_constrained`: `theta1 <= x <= theta3`, needs `t_n > 0`. At the
///   upper edge the second phase degenerates to zero power (clamped there;
///   above `theta3` the cap outruns the task and the shape is invalid).
/// - `hybrid_equal_power`: `x >= e^{n/(d_m+t_n)} * (e^{n/d_m} - 1)`, needs
///   `t_n > 0`.
/// - `pure_noma`: `x >= theta3`; valid for any `t_n` since the second phase
///   carries no power.
///
/// # Panics
///
/// Panics if `t_n` is NaN, negative, or exceeds `d_n - d_m`.
pub fn candidate_solutions(s: &Scenario, t_n: f64) -> CandidateSet {
    assert!(
        t_n >= 0.0 && le_rel(t_n, s.second_phase_limit()),
        "second-phase duration must lie in [0, d_n - d_m]"
    );
    let th = feasibility_thresholds(s);
    let x = s.um_received_power();
    let n = s.n_nats();
    let d_m = s.d_m();
    let g_n = s.g_n();
    let has_second_phase = t_n > 0.0;

    let oma = if !has_second_phase {
        SolverOutcome::Infeasible(InfeasibleReason::EmptySecondPhase)
    } else {
        let p_n2 = math::exp_m1(n / t_n) / g_n;
        feasible(0.0, p_n2, t_n, DecodingOrder::UnFirst, StrategyKind::Oma, s)
    };

    let hybrid_constrained = if !has_second_phase {
        SolverOutcome::Infeasible(InfeasibleReason::EmptySecondPhase)
    } else if !le_rel(th.theta1, x) {
        SolverOutcome::Infeasible(InfeasibleReason::UmPowerTooLow)
    } else if !le_rel(x, th.theta3) {
        SolverOutcome::Infeasible(InfeasibleReason::UmPowerTooHighForExisting)
    } else {
        let beta = math::max(1.0, x / th.theta1);
        let p_n1 = (beta - 1.0) / g_n;
        let q = (n - d_m * math::ln(beta)) / t_n;
        let p_n2 = math::max(0.0, math::exp_m1(q)) / g_n;
        feasible(
            p_n1,
            p_n2,
            t_n,
            DecodingOrder::UmFirst,
            StrategyKind::HybridConstrained,
            s,
        )
    };

    let hybrid_equal_power = if !has_second_phase {
        SolverOutcome::Infeasible(InfeasibleReason::EmptySecondPhase)
    } else {
        let floor = math::exp(n / (d_m + t_n)) * th.theta1;
        if !le_rel(floor, x) {
            SolverOutcome::Infeasible(InfeasibleReason::UmPowerTooLow)
        } else {
            let p = math::exp_m1(n / (d_m + t_n)) / g_n;
            feasible(
                p,
                p,
                t_n,
                DecodingOrder::UmFirst,
                StrategyKind::HybridEqualPower,
                s,
            )
        }
    };

    let pure_noma = if !le_rel(th.theta3, x) {
        SolverOutcome::Infeasible(InfeasibleReason::UmPowerTooLow)
    } else {
        feasible(
            th.theta1 / g_n,
            0.0,
            t_n,
            DecodingOrder::UmFirst,
            StrategyKind::PureNoma,
            s,
        )
    };

    CandidateSet {
        oma,
        hybrid_constrained,
        hybrid_equal_power,
        pure_noma,
    }
}

/// Solves both decoding orders and returns the cheaper schedule.
///
/// Always feasible: the safe order is total (it owns the single-phase
/// fallback). When the cancelling order is infeasible, or when the two
/// energies agree within [`ENERGY_TIE_REL_TOL`], the safe order's outcome
/// is returned, so ties never put user m's deadline at the mercy of user
/// n's rounding.
pub fn solve_hybrid_sic(s: &Scenario) -> SolverOutcome {
    let existing = solve_existing(s);
    let lemma1 = solve_lemma1(s);
    let e_existing = existing.energy_or_inf();
    let e_lemma1 = lemma1.energy_or_inf();
    if !lemma1.is_feasible() || math::rel_close(e_lemma1, e_existing, ENERGY_TIE_REL_TOL) {
        return existing;
    }
    if e_lemma1 < e_existing {
        lemma1
    } else {
        existing
    }
}

/// Range of `p_m` over which the equal-power schedule provably costs no
/// more than the safe-order schedule. Nonempty exactly when
/// `theta2 <= theta4`.
pub fn lemma2_band(s: &Scenario) -> Lemma2Band {
    let th = feasibility_thresholds(s);
    Lemma2Band {
        applicable: le_rel(th.theta2, th.theta4),
        lower_pm: th.theta2 / s.g_m(),
        upper_pm: th.theta4 / s.g_m(),
    }
}

/// The `(kind, order)` that [`solve_hybrid_sic`] selects for `s`.
///
/// Below `theta1` the thresholds alone decide (the cancelling order is
/// infeasible, so the safe order wins with its own band split at `theta4`);
/// elsewhere the two branch energies are compared exactly as the solver
/// compares them.
pub fn strategy_region(s: &Scenario) -> (StrategyKind, DecodingOrder) {
    let th = feasibility_thresholds(s);
    let x = s.um_received_power();
    if le_rel(x, th.theta1) {
        let kind = if le_rel(x, th.theta4) {
            StrategyKind::ExistingQosSic
        } else {
            StrategyKind::Oma
        };
        return (kind, DecodingOrder::UnFirst);
    }
    match solve_hybrid_sic(s) {
        SolverOutcome::Feasible { allocation, .. } => (allocation.kind, allocation.order),
        SolverOutcome::Infeasible(_) => unreachable!("selector is total"),
    }
}
