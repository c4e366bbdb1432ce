//! One-variable parameter sweeps over the closed-form solvers, rendered as
//! CSV with a pinned header and number format so repeated runs are
//! byte-identical.

use std::fmt;
use std::io;

use noma_mec_core::closed_form::{solve_existing, solve_hybrid_sic, solve_lemma1, solve_oma};
use noma_mec_core::model::{DecodingOrder, PowerAllocation, Scenario, StrategyKind};

/// The scenario field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Pm,
    Dn,
    Nats,
    Gm,
    Gn,
}

impl SweepVar {
    /// Token used in the CSV `var` column and accepted by `--var`.
    pub fn token(self) -> &'static str {
        match self {
            SweepVar::Pm => "pm",
            SweepVar::Dn => "dn",
            SweepVar::Nats => "nats",
            SweepVar::Gm => "gm",
            SweepVar::Gn => "gn",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "pm" => Some(SweepVar::Pm),
            "dn" => Some(SweepVar::Dn),
            "nats" => Some(SweepVar::Nats),
            "gm" => Some(SweepVar::Gm),
            "gn" => Some(SweepVar::Gn),
            _ => None,
        }
    }
}

/// Rejected sweep definitions; these are usage errors, not I/O errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepError {
    /// `start`/`stop` not finite or not strictly increasing.
    BadRange,
    /// Fewer than two points requested.
    TooFewSteps,
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::BadRange => write!(f, "sweep range must be finite with start < stop"),
            SweepError::TooFewSteps => write!(f, "a sweep needs at least two steps"),
        }
    }
}

impl std::error::Error for SweepError {}

/// A validated sweep definition: `steps` evenly spaced points over
/// `[start, stop]` substituted into `base`'s swept field (whose base value
/// is ignored).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    variable: SweepVar,
    start: f64,
    stop: f64,
    steps: usize,
    base: Scenario,
}

impl SweepSpec {
    pub fn new(
        variable: SweepVar,
        start: f64,
        stop: f64,
        steps: usize,
        base: Scenario,
    ) -> Result<Self, SweepError> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(SweepError::BadRange);
        }
        if steps < 2 {
            return Err(SweepError::TooFewSteps);
        }
        Ok(Self {
            variable,
            start,
            stop,
            steps,
            base,
        })
    }

    pub fn variable(&self) -> SweepVar {
        self.variable
    }
}

/// All four branch energies plus the schedule the tie-aware selector picks
/// for one scenario. Infeasible branches carry `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedPoint {
    pub e_oma: f64,
    pub e_existing: f64,
    pub e_lemma1: f64,
    pub e_hybrid: f64,
    pub chosen: PowerAllocation,
}

/// Solve every branch for one scenario.
///
/// `e_hybrid` is the exact minimum of the two order-specific energies. On a
/// tie within the selector's tolerance the chosen schedule is the safe
/// order's, whose cost can exceed that minimum by up to one part in 1e9.
pub fn evaluate(s: &Scenario) -> SolvedPoint {
    let e_oma = solve_oma(s).energy_or_inf();
    let e_existing = solve_existing(s).energy_or_inf();
    let e_lemma1 = solve_lemma1(s).energy_or_inf();
    let chosen = *solve_hybrid_sic(s)
        .allocation()
        .expect("the order selector always yields a schedule");
    SolvedPoint {
        e_oma,
        e_existing,
        e_lemma1,
        e_hybrid: f64::min(e_existing, e_lemma1),
        chosen,
    }
}

/// One CSV row. `order` is `None` for sweep points whose parameters violate
/// the scenario invariants; such rows render `inf` numerics, the `oma`
/// placeholder kind, and the `invalid` order marker instead of being
/// silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub e_oma: f64,
    pub e_existing: f64,
    pub e_lemma1: f64,
    pub e_hybrid: f64,
    pub kind: StrategyKind,
    pub order: Option<DecodingOrder>,
    pub p_n1: f64,
    pub p_n2: f64,
    pub t_n: f64,
}

impl SweepRow {
    fn from_point(value: f64, p: &SolvedPoint) -> Self {
        Self {
            value,
            e_oma: p.e_oma,
            e_existing: p.e_existing,
            e_lemma1: p.e_lemma1,
            e_hybrid: p.e_hybrid,
            kind: p.chosen.kind,
            order: Some(p.chosen.order),
            p_n1: p.chosen.p_n1,
            p_n2: p.chosen.p_n2,
            t_n: p.chosen.t_n,
        }
    }

    fn invalid(value: f64) -> Self {
        Self {
            value,
            e_oma: f64::INFINITY,
            e_existing: f64::INFINITY,
            e_lemma1: f64::INFINITY,
            e_hybrid: f64::INFINITY,
            kind: StrategyKind::Oma,
            order: None,
            p_n1: f64::INFINITY,
            p_n2: f64::INFINITY,
            t_n: f64::INFINITY,
        }
    }
}

/// `base` with the swept field replaced by `value`.
fn scenario_at(base: &Scenario, variable: SweepVar, value: f64) -> Option<Scenario> {
    let mut parts = (
        base.n_nats(),
        base.d_m(),
        base.d_n(),
        base.p_m(),
        base.g_m(),
        base.g_n(),
    );
    match variable {
        SweepVar::Pm => parts.3 = value,
        SweepVar::Dn => parts.2 = value,
        SweepVar::Nats => parts.0 = value,
        SweepVar::Gm => parts.4 = value,
        SweepVar::Gn => parts.5 = value,
    }
    Scenario::from_parts(parts.0, parts.1, parts.2, parts.3, parts.4, parts.5).ok()
}

/// Evaluate the sweep: `steps` rows, endpoints included exactly, one row
/// per grid point whether or not the point is a valid scenario.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(spec.steps);
    for i in 0..spec.steps {
        let value = if i + 1 == spec.steps {
            spec.stop
        } else {
            spec.start + (spec.stop - spec.start) * (i as f64) / ((spec.steps - 1) as f64)
        };
        let row = match scenario_at(&spec.base, spec.variable, value) {
            Some(s) => SweepRow::from_point(value, &evaluate(&s)),
            None => SweepRow::invalid(value),
        };
        rows.push(row);
    }
    rows
}

/// The pinned CSV header.
pub const CSV_HEADER: &str =
    "var,value,e_oma,e_existing,e_lemma1,e_hybrid,kind,order,p_n1,p_n2,t_n";

/// Render a float with nine significant digits, or the `inf` sentinel.
///
/// ```
/// use noma_mec_cli::sweep::fmt_float;
///
/// assert_eq!(fmt_float(25.948850828005128), "2.59488508e1");
/// assert_eq!(fmt_float(f64::INFINITY), "inf");
/// ```
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{x:.8e}")
    }
}

fn fmt_order(order: Option<DecodingOrder>) -> String {
    match order {
        Some(o) => o.to_string(),
        None => "invalid".to_owned(),
    }
}

/// Write header plus one newline-terminated line per row.
pub fn emit_csv<W: io::Write>(w: &mut W, variable: SweepVar, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            variable.token(),
            fmt_float(r.value),
            fmt_float(r.e_oma),
            fmt_float(r.e_existing),
            fmt_float(r.e_lemma1),
            fmt_float(r.e_hybrid),
            r.kind,
            fmt_order(r.order),
            fmt_float(r.p_n1),
            fmt_float(r.p_n2),
            fmt_float(r.t_n),
        )?;
    }
    Ok(())
}

/// The machine-readable record for single-instance solving: the result
/// columns of a sweep row (everything but the swept value), keyed by the
/// same names. Non-finite numbers become JSON `null`.
pub fn solve_record(p: &SolvedPoint) -> serde_json::Value {
    fn num(x: f64) -> serde_json::Value {
        if x.is_finite() {
            serde_json::json!(x)
        } else {
            serde_json::Value::Null
        }
    }
    let mut map = serde_json::Map::new();
    map.insert("e_oma".into(), num(p.e_oma));
    map.insert("e_existing".into(), num(p.e_existing));
    map.insert("e_lemma1".into(), num(p.e_lemma1));
    map.insert("e_hybrid".into(), num(p.e_hybrid));
    map.insert("kind".into(), serde_json::json!(p.chosen.kind.to_string()));
    map.insert(
        "order".into(),
        serde_json::json!(p.chosen.order.to_string()),
    );
    map.insert("p_n1".into(), num(p.chosen.p_n1));
    map.insert("p_n2".into(), num(p.chosen.p_n2));
    map.insert("t_n".into(), num(p.chosen.t_n));
    serde_json::Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup_a(p_m: f64) -> Scenario {
        Scenario::from_parts(20.0, 40.0, 80.0, p_m, 1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_hits_both_endpoints_exactly() {
        let spec = SweepSpec::new(SweepVar::Pm, 0.3, 2.1, 7, setup_a(1.0)).unwrap();
        let rows = run_sweep(&spec);
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].value, 0.3);
        assert_eq!(rows[6].value, 2.1);
        for w in rows.windows(2) {
            assert!(w[0].value < w[1].value, "grid must be strictly increasing");
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        let base = setup_a(1.0);
        assert_eq!(
            SweepSpec::new(SweepVar::Pm, 2.0, 1.0, 5, base).unwrap_err(),
            SweepError::BadRange
        );
        assert_eq!(
            SweepSpec::new(SweepVar::Pm, 1.0, 2.0, 1, base).unwrap_err(),
            SweepError::TooFewSteps
        );
    }

    #[test]
    fn invalid_points_are_marked_not_dropped() {
        // Sweeping d_n across d_m = 40 makes the low points invalid.
        let spec = SweepSpec::new(SweepVar::Dn, 30.0, 80.0, 6, setup_a(1.0)).unwrap();
        let rows = run_sweep(&spec);
        assert_eq!(rows.len(), 6, "every grid point gets a row");
        for r in &rows {
            if r.value <= 40.0 {
                assert_eq!(r.order, None, "d_n = {} cannot be valid", r.value);
                assert_eq!(r.kind, StrategyKind::Oma, "placeholder kind");
                assert!(r.e_hybrid.is_infinite() && r.p_n1.is_infinite());
            } else {
                assert!(r.order.is_some(), "d_n = {} must be valid", r.value);
                assert!(r.e_hybrid.is_finite());
            }
        }
    }

    #[test]
    fn hybrid_column_is_the_exact_branch_minimum() {
        for p_m in [0.3, 0.5, 0.7, 0.9053634658067354, 1.0, 1.3, 2.0] {
            let p = evaluate(&setup_a(p_m));
            assert_eq!(p.e_hybrid, f64::min(p.e_existing, p.e_lemma1));
            assert!(
                p.e_hybrid <= p.e_oma * (1.0 + 1e-9),
                "selected energy must not exceed single-phase at p_m = {p_m}"
            );
        }
        // Below the cancellation floor the branch column carries inf and
        // the minimum falls back to the safe order.
        let p = evaluate(&setup_a(0.3));
        assert!(p.e_lemma1.is_infinite());
        assert_eq!(p.e_hybrid, p.e_existing);
        assert_eq!(p.chosen.order, DecodingOrder::UnFirst);
    }

    #[test]
    fn floats_render_nine_significant_digits() {
        assert_eq!(fmt_float(25.948850828005127), "2.59488508e1");
        assert_eq!(fmt_float(0.2840254166877415), "2.84025417e-1");
        assert_eq!(fmt_float(40.0), "4.00000000e1");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_bytes_are_pinned() {
        let spec = SweepSpec::new(SweepVar::Pm, 0.3, 1.0, 2, setup_a(1.0)).unwrap();
        let rows = run_sweep(&spec);
        let mut buf = Vec::new();
        emit_csv(&mut buf, spec.variable(), &rows).unwrap();
        let expected = "\
var,value,e_oma,e_existing,e_lemma1,e_hybrid,kind,order,p_n1,p_n2,t_n
pm,3.00000000e-1,2.59488508e1,2.51211380e1,inf,2.51211380e1,existing_qos_sic,un_first,1.64014225e-1,4.64014225e-1,4.00000000e1
pm,1.00000000e0,2.59488508e1,2.59488508e1,2.27220333e1,2.27220333e1,hybrid_equal_power,um_first,2.84025417e-1,2.84025417e-1,4.00000000e1
";
        assert_eq!(std::str::from_utf8(&buf).unwrap(), expected);
    }

    #[test]
    fn solve_record_has_the_pinned_keys_and_null_for_inf() {
        let record = solve_record(&evaluate(&setup_a(0.3)));
        let obj = record.as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            [
                "e_existing",
                "e_hybrid",
                "e_lemma1",
                "e_oma",
                "kind",
                "order",
                "p_n1",
                "p_n2",
                "t_n"
            ],
            "keys are alphabetical and fixed"
        );
        assert!(obj["e_lemma1"].is_null(), "infeasible branch renders null");
        assert_eq!(obj["order"], "un_first");
    }
}
