//! Independent audit machinery for the closed forms: a brute-force energy
//! minimizer that knows nothing about the solution formulas, and KKT
//! residual checks that certify a claimed optimum from first-order
//! conditions alone.
//!
//! The minimizer exploits only two structural facts, both part of the
//! problem statement rather than of any solution: at an optimum the task
//! constraint is tight (lowering `p_n2` is otherwise free money), which
//! eliminates `p_n2`; and the reduced one-dimensional objective in `p_n1`
//! is convex, so a bracketing grid plus golden-section refinement nails the
//! minimum of each `t_n` slice. Slices are swept over a uniform `t_n` grid
//! and the per-slice minima are reported as a curve.

use alloc::vec::Vec;

use crate::math;
use crate::model::{
    feasibility_thresholds, le_rel, offloaded_nats, DecodingOrder, InfeasibleReason,
    PowerAllocation, Scenario, StrategyKind,
};

/// Relative slack allowed by [`verify_monotone_f`] before two successive
/// samples count as increasing.
pub const MONOTONE_REL_TOL: f64 = 1e-12;

/// Resolution knobs for [`oracle_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Points in the first-phase power sweep of each slice.
    pub p1_grid_points: usize,
    /// Slices in the second-phase duration sweep over `(0, d_n - d_m]`.
    pub tn_grid_points: usize,
    /// Golden-section iterations refining each slice's bracketed minimum.
    pub refine_iters: usize,
    /// Relative energy agreement the oracle is expected to deliver.
    pub rel_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            p1_grid_points: 2001,
            tn_grid_points: 201,
            refine_iters: 80,
            rel_tol: 1e-6,
        }
    }
}

/// Outcome of a brute-force minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best schedule found; its `kind` is a descriptive label inferred from
    /// the power pattern, not a closed-form classification.
    pub best_allocation: PowerAllocation,
    pub best_energy: f64,
    /// Second-phase duration of the best slice.
    pub tn_at_optimum: f64,
    /// `(t_n, minimal energy at that t_n)` per slice, ascending in `t_n`.
    pub energy_curve: Vec<(f64, f64)>,
    /// One local step of the objective around the reported minimum (the
    /// larger of the adjacent-slice energy gap and the final refinement
    /// bracket's energy spread): an honest bound on how much grid
    /// resolution can still hide.
    pub grid_error_bound: f64,
}

/// Scaled first-order optimality report for an allocation.
///
/// Multipliers are recovered from the stationarity equations under the
/// active set implied by the allocation's `kind`, then every condition is
/// re-evaluated. All entries are scaled by the magnitude of the terms
/// involved, so a genuine optimum scores near machine epsilon in every
/// component regardless of the scenario's units:
///
/// - `stationarity_1`, `stationarity_2`: residuals of the two stationarity
///   equations (first and second phase power).
/// - `comp_slack`: complementary slackness of, in order, the task
///   constraint, the interference cap, `p_n1 >= 0`, and `p_n2 >= 0`.
/// - `dual_feas_violation`: most negative recovered multiplier, clipped at
///   zero (positive means the point cannot be optimal).
/// - `primal_violation`: worst constraint violation (zero for a feasible
///   point).
/// - `multipliers`: the recovered `[lambda1, lambda2, lambda3, lambda4]`
///   for `p_n1 >= 0`, `p_n2 >= 0`, the task constraint, and the
///   interference cap. The cap entry is identically zero under the safe
///   decoding order, which has no cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual {
    pub stationarity_1: f64,
    pub stationarity_2: f64,
    pub comp_slack: [f64; 4],
    pub dual_feas_violation: f64,
    pub primal_violation: f64,
    pub multipliers: [f64; 4],
}

impl KktResidual {
    /// Largest residual component: stationarity, complementary slackness,
    /// dual feasibility, and primal feasibility folded together.
    pub fn worst(&self) -> f64 {
        let mut worst = math::max(self.stationarity_1, self.stationarity_2);
        for c in self.comp_slack {
            worst = math::max(worst, c);
        }
        worst = math::max(worst, self.dual_feas_violation);
        math::max(worst, self.primal_violation)
    }
}

/// The reduced per-slice objective: first-phase power `p_n1` plus the
/// second-phase power that tops the task up to exactly `n` nats (clipped at
/// zero when the first phase already delivers everything).
struct SliceObjective<'a> {
    s: &'a Scenario,
    order: DecodingOrder,
    t_n: f64,
}

impl SliceObjective<'_> {
    fn second_phase_power(&self, p_n1: f64) -> f64 {
        let s = self.s;
        let first = s.d_m() * crate::model::rate_first_phase(p_n1, self.order, s);
        let remaining = s.n_nats() - first;
        if remaining <= 0.0 {
            0.0
        } else {
            math::exp_m1(remaining / self.t_n) / s.g_n()
        }
    }

    fn energy(&self, p_n1: f64) -> f64 {
        self.s.d_m() * p_n1 + self.t_n * self.second_phase_power(p_n1)
    }
}

/// Largest admissible first-phase power, independent of the slice: under
/// the safe order, the power that delivers the whole task in phase one;
/// under the cancelling order, the interference cap protecting user m.
fn p1_upper_bound(order: DecodingOrder, s: &Scenario) -> f64 {
    match order {
        DecodingOrder::UnFirst => {
            let bound =
                (1.0 + s.um_received_power()) * math::exp_m1(s.n_nats() / s.d_m()) / s.g_n();
            if bound.is_finite() {
                bound
            } else {
                f64::MAX / 4.0
            }
        }
        DecodingOrder::UmFirst => {
            let theta1 = feasibility_thresholds(s).theta1;
            (s.um_received_power() / theta1 - 1.0) / s.g_n()
        }
    }
}

/// First-phase power sweep: half the points uniform over `[0, hi]` so the
/// sweep is a genuine brute force, half geometric down to `hi * 1e-60` so a
/// minimizer many orders of magnitude below `hi` still lands inside a
/// narrow bracket.
fn p1_grid(hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(3);
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    let uniform = points / 2;
    for j in 1..=uniform {
        grid.push(hi * (j as f64) / (uniform as f64));
    }
    let geometric = points - uniform;
    let ln_span = math::ln(1e-60);
    for j in 0..geometric {
        let frac = if geometric > 1 {
            (geometric - 1 - j) as f64 / (geometric - 1) as f64
        } else {
            0.0
        };
        grid.push(hi * math::exp(ln_span * frac));
    }
    grid.sort_unstable_by(|a, b| a.partial_cmp(b).expect("grid points are never NaN"));
    grid.dedup();
    grid
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns the best `(x, f(x))` probed, which also covers the endpoints.
fn golden_refine(
    f: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
    mut best: (f64, f64),
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Descriptive label for a brute-force schedule, from its power pattern.
fn classify(order: DecodingOrder, p_n1: f64, p_n2: f64) -> StrategyKind {
    let scale = p_n1 + p_n2;
    if p_n1 <= 1e-9 * scale {
        return StrategyKind::Oma;
    }
    match order {
        DecodingOrder::UnFirst => StrategyKind::ExistingQosSic,
        DecodingOrder::UmFirst => {
            if p_n2 <= 1e-9 * scale {
                StrategyKind::PureNoma
            } else if math::abs(p_n1 - p_n2) <= 1e-6 * math::max(p_n1, p_n2) {
                StrategyKind::HybridEqualPower
            } else {
                StrategyKind::HybridConstrained
            }
        }
    }
}

/// Brute-force minimum-energy schedule for the given decoding order,
/// sweeping the second-phase duration over a uniform grid on
/// `(0, d_n - d_m]` and, per slice, the first-phase power over
/// `[0, p1_upper_bound]` with golden-section refinement around the
/// bracketed minimum.
///
/// Under the cancelling order the scenario must satisfy
/// `p_m * g_m > theta1`; otherwise no first-phase power is admissible and
/// the typed refusal [`InfeasibleReason::UmPowerTooLow`] is returned.
///
/// Ties along the duration grid resolve to the longer `t_n`, mirroring the
/// fact that the true per-slice minimum never increases with `t_n`.
///
/// # Panics
///
/// Panics if `cfg` has a zero grid dimension.
pub fn oracle_solve(
    order: DecodingOrder,
    s: &Scenario,
    cfg: &OracleConfig,
) -> Result<OracleResult, InfeasibleReason> {
    assert!(
        cfg.p1_grid_points >= 3 && cfg.tn_grid_points >= 1,
        "oracle grids must be nonempty"
    );
    if order == DecodingOrder::UmFirst {
        let th = feasibility_thresholds(s);
        if le_rel(s.um_received_power(), th.theta1) {
            return Err(InfeasibleReason::UmPowerTooLow);
        }
    }

    let window = s.second_phase_limit();
    let slices = cfg.tn_grid_points;
    let p1_hi = p1_upper_bound(order, s);
    let grid = p1_grid(p1_hi, cfg.p1_grid_points);

    let mut curve = Vec::with_capacity(slices);
    let mut best_energy = f64::INFINITY;
    let mut best_p1 = 0.0;
    let mut best_t = window;
    let mut best_slice = 0usize;
    let mut best_bracket_spread = 0.0;

    for i in 0..slices {
        let t_n = window * ((i + 1) as f64) / (slices as f64);
        let slice = SliceObjective { s, order, t_n };
        let f = |p1: f64| slice.energy(p1);

        let mut min_idx = 0usize;
        let mut min_val = f(grid[0]);
        for (j, &p1) in grid.iter().enumerate().skip(1) {
            let v = f(p1);
            if v < min_val {
                min_val = v;
                min_idx = j;
            }
        }
        let lo = if min_idx == 0 {
            grid[0]
        } else {
            grid[min_idx - 1]
        };
        let hi = if min_idx + 1 < grid.len() {
            grid[min_idx + 1]
        } else {
            grid[min_idx]
        };
        let (slice_p1, slice_energy) =
            golden_refine(&f, lo, hi, cfg.refine_iters, (grid[min_idx], min_val));
        let spread = if slice_energy.is_finite() {
            math::max(f(lo), f(hi)) - slice_energy
        } else {
            f64::INFINITY
        };

        curve.push((t_n, slice_energy));
        // `<=` so ties move toward the longer second phase.
        if slice_energy <= best_energy {
            best_energy = slice_energy;
            best_p1 = slice_p1;
            best_t = t_n;
            best_slice = i;
            best_bracket_spread = spread;
        }
    }

    let best_slice_obj = SliceObjective {
        s,
        order,
        t_n: best_t,
    };
    let best_p2 = best_slice_obj.second_phase_power(best_p1);
    let best_allocation = PowerAllocation::new(
        best_p1,
        best_p2,
        best_t,
        order,
        classify(order, best_p1, best_p2),
    )
    .expect("oracle emitted a valid allocation");

    let mut t_step_gap = 0.0;
    if best_slice > 0 {
        t_step_gap = math::abs(curve[best_slice - 1].1 - best_energy);
    }
    if best_slice + 1 < curve.len() {
        t_step_gap = math::max(t_step_gap, math::abs(curve[best_slice + 1].1 - best_energy));
    }
    let grid_error_bound = if best_energy.is_finite() {
        math::max(t_step_gap, best_bracket_spread)
    } else {
        f64::INFINITY
    };

    Ok(OracleResult {
        best_allocation,
        best_energy,
        tn_at_optimum: best_t,
        energy_curve: curve,
        grid_error_bound,
    })
}

/// Scaled residual of a stationarity equation `sum(terms) = 0`, relative to
/// the largest term magnitude.
fn scaled_residual(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for &t in terms {
        sum += t;
        scale = math::max(scale, math::abs(t));
    }
    math::abs(sum) / math::max(scale, 1.0)
}

/// Complementary-slackness score `|lambda * slack|` scaled so a tight
/// constraint with any multiplier, or a zero multiplier with any slack,
/// scores near zero.
fn comp_score(lambda: f64, slack: f64, slack_scale: f64) -> f64 {
    math::abs(lambda * slack) / math::max(1.0, math::abs(lambda) * slack_scale)
}

/// First-order optimality report for `a` on scenario `s`, under the KKT
/// system matching `a.order`. See [`KktResidual`] for scaling.
///
/// The multipliers are recovered per `a.kind`'s active set: the task
/// multiplier comes from the second-phase stationarity equation (or the
/// first-phase one for a pure first-phase schedule), and whichever of the
/// cap / nonnegativity multipliers that `kind` activates comes from the
/// remaining equation. Inactive multipliers are zero.
///
/// # Panics
///
/// Panics if `a.t_n <= 0` or a power is not finite.
pub fn kkt_residuals(a: &PowerAllocation, s: &Scenario) -> KktResidual {
    assert!(a.t_n > 0.0, "first-order report needs a live second phase");
    assert!(
        a.p_n1.is_finite() && a.p_n2.is_finite(),
        "first-order report needs finite powers"
    );

    let n = s.n_nats();
    let d_m = s.d_m();
    let t_n = a.t_n;
    let g_n = s.g_n();
    let delivered = offloaded_nats(a, s);

    // Gradient factors of the task constraint w.r.t. each power: the
    // first-phase one depends on the decoding order (interference floor
    // `1 + p_m g_m` under the safe order).
    let denom_1 = match a.order {
        DecodingOrder::UnFirst => 1.0 + s.um_received_power() + a.p_n1 * g_n,
        DecodingOrder::UmFirst => 1.0 + a.p_n1 * g_n,
    };
    let rate_grad_1 = d_m * g_n / denom_1;
    let rate_grad_2 = t_n * g_n / (1.0 + a.p_n2 * g_n);

    // Interference cap exists only under the cancelling order.
    let cap_bound = match a.order {
        DecodingOrder::UmFirst => s.um_received_power() / feasibility_thresholds(s).theta1 - 1.0,
        DecodingOrder::UnFirst => f64::INFINITY,
    };

    // lambda1: p_n1 >= 0, lambda2: p_n2 >= 0, lambda3: task, lambda4: cap.
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let l3;
    let mut l4 = 0.0;
    match (a.order, a.kind) {
        (DecodingOrder::UmFirst, StrategyKind::PureNoma) => {
            // Task multiplier from the first-phase equation; the second
            // phase is shut off by its nonnegativity multiplier.
            l3 = d_m / rate_grad_1;
            l2 = t_n - l3 * rate_grad_2;
        }
        (_, StrategyKind::Oma) => {
            l3 = t_n / rate_grad_2;
            l1 = d_m - l3 * rate_grad_1;
        }
        (DecodingOrder::UmFirst, StrategyKind::HybridConstrained) => {
            l3 = t_n / rate_grad_2;
            l4 = (l3 * rate_grad_1 - d_m) / g_n;
        }
        // Equal-power / baseline schedules keep only the task constraint
        // active among the multiplier-bearing ones.
        _ => {
            l3 = t_n / rate_grad_2;
        }
    }

    let stationarity_1 = scaled_residual(&[d_m, -(l3 * rate_grad_1), l4 * g_n, -l1]);
    let stationarity_2 = scaled_residual(&[t_n, -(l3 * rate_grad_2), -l2]);

    let task_slack = n - delivered;
    let cap_slack = a.p_n1 * g_n - cap_bound;
    let cap_scale = math::max(math::abs(cap_bound), a.p_n1 * g_n);
    let p_scale = math::max(a.p_n1, a.p_n2);
    let comp_slack = [
        comp_score(l3, task_slack, n),
        if cap_bound.is_finite() {
            comp_score(l4, cap_slack, cap_scale)
        } else {
            0.0
        },
        comp_score(l1, a.p_n1, p_scale),
        comp_score(l2, a.p_n2, p_scale),
    ];

    let mut most_negative = 0.0;
    for l in [l1, l2, l3, l4] {
        if l < most_negative {
            most_negative = l;
        }
    }
    let dual_feas_violation = -most_negative / math::max(1.0, math::abs(l3));

    let window = s.second_phase_limit();
    let mut primal_violation = math::max(0.0, task_slack / n);
    if cap_bound.is_finite() {
        primal_violation = math::max(
            primal_violation,
            math::max(0.0, cap_slack) / math::max(1.0, cap_scale),
        );
    }
    primal_violation = math::max(primal_violation, math::max(0.0, -a.p_n1));
    primal_violation = math::max(primal_violation, math::max(0.0, -a.p_n2));
    primal_violation = math::max(primal_violation, math::max(0.0, (t_n - window) / window));

    KktResidual {
        stationarity_1,
        stationarity_2,
        comp_slack,
        dual_feas_violation,
        primal_violation,
        multipliers: [l1, l2, l3, l4],
    }
}

/// True iff `f` never increases (beyond `rel_tol` of the larger magnitude)
/// across `samples` uniform points on `[x_lo, x_hi]`.
fn grid_nonincreasing(
    f: &dyn Fn(f64) -> f64,
    x_lo: f64,
    x_hi: f64,
    samples: usize,
    rel_tol: f64,
) -> bool {
    let mut prev = f(x_lo);
    for i in 1..samples {
        let x = x_lo + (x_hi - x_lo) * (i as f64) / ((samples - 1) as f64);
        let cur = f(x);
        if cur > prev + rel_tol * math::max(math::abs(cur), math::abs(prev)) {
            return false;
        }
        prev = cur;
    }
    true
}

/// Samples `x * (e^{a/x} - 1)` on `[x_lo, x_hi]` and confirms it never
/// increases (within [`MONOTONE_REL_TOL`]). This is the monotonicity that
/// lets every closed form pin the second phase at its widest: stretching
/// the transmission window never costs energy.
///
/// # Panics
///
/// Panics unless `0 < x_lo < x_hi` and `samples >= 2`.
pub fn verify_monotone_f(a: f64, x_lo: f64, x_hi: f64, samples: usize) -> bool {
    assert!(
        x_lo > 0.0 && x_hi > x_lo && samples >= 2,
        "need 0 < x_lo < x_hi and at least two samples"
    );
    grid_nonincreasing(
        &|x| x * math::exp_m1(a / x),
        x_lo,
        x_hi,
        samples,
        MONOTONE_REL_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{solve_existing, solve_lemma1, solve_oma};
    use crate::model::energy;

    fn setup_a(p_m: f64) -> Scenario {
        Scenario::from_parts(20.0, 40.0, 80.0, p_m, 1.0, 1.0).unwrap()
    }

    fn one_tn_step(s: &Scenario, cfg: &OracleConfig) -> f64 {
        s.second_phase_limit() / (cfg.tn_grid_points as f64)
    }

    #[test]
    fn brute_force_confirms_the_equal_power_schedule() {
        let s = setup_a(1.0);
        let cfg = OracleConfig::default();
        let r = oracle_solve(DecodingOrder::UmFirst, &s, &cfg).expect("feasible");
        assert!(
            math::rel_close(r.best_energy, 22.72203333501932, 1e-5),
            "brute force should land on the equal-power energy, got {}",
            r.best_energy
        );
        assert!(
            (r.tn_at_optimum - 40.0).abs() <= one_tn_step(&s, &cfg) + 1e-12,
            "optimum should sit at the widest second phase, got t_n = {}",
            r.tn_at_optimum
        );
        assert!(
            math::rel_close(r.best_allocation.p_n1, r.best_allocation.p_n2, 1e-3),
            "powers should be nearly equal: {} vs {}",
            r.best_allocation.p_n1,
            r.best_allocation.p_n2
        );
    }

    #[test]
    fn brute_force_confirms_the_safe_order_schedule() {
        let s = setup_a(0.5);
        let cfg = OracleConfig::default();
        let r = oracle_solve(DecodingOrder::UnFirst, &s, &cfg).expect("always feasible");
        assert!(
            math::rel_close(r.best_energy, 25.808283505980754, 1e-5),
            "brute force should land on the safe-order energy, got {}",
            r.best_energy
        );
        assert!(
            (r.tn_at_optimum - 40.0).abs() <= one_tn_step(&s, &cfg) + 1e-12,
            "optimum should sit at the widest second phase"
        );
    }

    #[test]
    fn brute_force_rides_the_interference_cap() {
        let s = setup_a(0.66);
        let cfg = OracleConfig::default();
        let r = oracle_solve(DecodingOrder::UmFirst, &s, &cfg).expect("feasible");
        let cap = p1_upper_bound(DecodingOrder::UmFirst, &s);
        assert!(
            math::rel_close(r.best_allocation.p_n1, cap, 1e-3),
            "first-phase power should sit on the cap: {} vs {}",
            r.best_allocation.p_n1,
            cap
        );
        let closed = solve_lemma1(&s).energy().expect("feasible");
        assert!(
            math::rel_close(r.best_energy, closed, 1e-5),
            "brute force should match the capped closed form: {} vs {closed}",
            r.best_energy
        );
    }

    #[test]
    fn brute_force_without_interference_matches_the_degenerate_split() {
        let s = setup_a(0.0);
        let r =
            oracle_solve(DecodingOrder::UnFirst, &s, &OracleConfig::default()).expect("feasible");
        assert!(
            math::rel_close(r.best_energy, 22.72203333501932, 1e-5),
            "interference-free safe order should cost the equal split, got {}",
            r.best_energy
        );
    }

    #[test]
    fn cancelling_order_is_refused_without_headroom() {
        let s = setup_a(0.6);
        assert_eq!(
            oracle_solve(DecodingOrder::UmFirst, &s, &OracleConfig::default()),
            Err(InfeasibleReason::UmPowerTooLow)
        );
    }

    #[test]
    fn slice_minima_never_increase_with_the_window() {
        let cfg = OracleConfig {
            p1_grid_points: 401,
            tn_grid_points: 41,
            refine_iters: 60,
            rel_tol: 1e-6,
        };
        for (order, p_m) in [(DecodingOrder::UnFirst, 0.5), (DecodingOrder::UmFirst, 0.8)] {
            let s = setup_a(p_m);
            let r = oracle_solve(order, &s, &cfg).expect("feasible");
            for w in r.energy_curve.windows(2) {
                assert!(
                    w[1].1 <= w[0].1 * (1.0 + 1e-9),
                    "slice minima must not increase: {} then {} (order {:?})",
                    w[0].1,
                    w[1].1,
                    order
                );
            }
        }
    }

    #[test]
    fn first_order_report_certifies_the_equal_power_optimum() {
        let s = setup_a(1.0);
        let a = *solve_lemma1(&s).allocation().expect("feasible");
        let r = kkt_residuals(&a, &s);
        assert!(
            r.worst() <= 1e-9,
            "closed-form optimum should certify, worst residual {}",
            r.worst()
        );
        // Task multiplier equals the water level 1 + p_n2 g_n over g_n.
        assert!(
            math::rel_close(r.multipliers[2], f64::exp(0.25), 1e-9),
            "task multiplier should be e^0.25, got {}",
            r.multipliers[2]
        );
        assert_eq!(r.multipliers[3], 0.0, "cap multiplier should be inactive");
    }

    #[test]
    fn first_order_report_certifies_the_capped_optimum() {
        let s = setup_a(0.7);
        let a = *solve_lemma1(&s).allocation().expect("feasible");
        let r = kkt_residuals(&a, &s);
        assert!(
            r.worst() <= 1e-9,
            "capped optimum should certify, worst residual {}",
            r.worst()
        );
        assert!(
            r.multipliers[3] > 0.0,
            "cap multiplier should be active, got {}",
            r.multipliers[3]
        );
    }

    #[test]
    fn first_order_report_certifies_the_safe_order_optima() {
        let inside = setup_a(0.5);
        let a = *solve_existing(&inside).allocation().expect("feasible");
        assert!(
            kkt_residuals(&a, &inside).worst() <= 1e-9,
            "safe-order optimum should certify"
        );
        // Above theta4 the single-phase schedule is the safe-order optimum
        // and its p_n1 multiplier turns genuinely nonnegative.
        let above = setup_a(0.7);
        let oma = *solve_oma(&above).allocation().expect("feasible");
        let r = kkt_residuals(&oma, &above);
        assert!(
            r.worst() <= 1e-9,
            "single-phase optimum should certify above theta4, worst {}",
            r.worst()
        );
        assert!(
            r.multipliers[0] > 0.0,
            "p_n1 multiplier should be positive, got {}",
            r.multipliers[0]
        );
    }

    #[test]
    fn first_order_report_flags_a_perturbed_schedule() {
        let s = setup_a(1.0);
        let mut a = *solve_lemma1(&s).allocation().expect("feasible");
        a.p_n1 *= 1.1;
        let r = kkt_residuals(&a, &s);
        assert_eq!(r.primal_violation, 0.0, "perturbation stays feasible");
        assert!(
            r.stationarity_1 > 1e-3,
            "a 10% power push must break stationarity, got {}",
            r.stationarity_1
        );
    }

    #[test]
    fn first_order_report_flags_dominated_schedules() {
        // Pure first-phase schedule with a live second phase: its shut-off
        // multiplier comes out negative, exposing it as non-optimal.
        let s = setup_a(1.2);
        let cs = crate::closed_form::candidate_solutions(&s, s.second_phase_limit());
        let pure = *cs.pure_noma.allocation().expect("feasible at high power");
        let r = kkt_residuals(&pure, &s);
        assert!(
            r.dual_feas_violation > 0.0,
            "pure first-phase schedule should be flagged, got {}",
            r.dual_feas_violation
        );
        // Single-phase schedule under the safe order while the two-phase
        // split is still affordable: also flagged.
        let below = setup_a(0.5);
        let oma = *solve_oma(&below).allocation().expect("feasible");
        let r2 = kkt_residuals(&oma, &below);
        assert!(
            r2.dual_feas_violation > 0.0,
            "single-phase schedule should be flagged below theta4, got {}",
            r2.dual_feas_violation
        );
    }

    #[test]
    fn oracle_energy_matches_its_own_allocation() {
        let s = setup_a(0.8);
        let r =
            oracle_solve(DecodingOrder::UmFirst, &s, &OracleConfig::default()).expect("feasible");
        assert!(
            math::rel_close(energy(&r.best_allocation, &s), r.best_energy, 1e-12),
            "reported energy must equal the allocation's energy"
        );
        // The bound is dominated by one duration-grid step times the
        // curve's end slope, a few hundredths here.
        assert!(
            r.grid_error_bound >= 0.0 && r.grid_error_bound < 0.05,
            "resolution bound should be one grid step's worth, got {}",
            r.grid_error_bound
        );
    }

    #[test]
    fn window_stretching_never_costs_energy() {
        assert!(verify_monotone_f(20.0, 40.0, 80.0, 1000));
        assert!(verify_monotone_f(1e-12, 1.0, 100.0, 100));
        assert!(
            !grid_nonincreasing(
                &|x| -(x * math::exp_m1(20.0 / x)),
                40.0,
                80.0,
                1000,
                MONOTONE_REL_TOL
            ),
            "sign-flipped objective must be rejected by the checker"
        );
    }
}
