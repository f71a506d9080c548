//! Six-row guarantee summary: for each headline guarantee, the proven bound,
//! the worst ratio observed over a random suite, and an adversarial witness
//! showing the matching upper bound.

use num::Zero;

use crate::adversary::{nested_single_class, red_blue_usw};
use crate::audit::Alpha;
use crate::frac::{fr, one_minus_inv_e, tolerance, Frac};
use crate::harness::config::{AlgorithmId, AlgorithmSpec, AuditKind, HarnessError, TiePolicy};
use crate::harness::runner::{run_adversary, run_instance};
use crate::instance::Instance;

/// One row of the summary: a guarantee, its proven lower bound, the matching
/// upper bound, the worst suite ratio, and the witness value.
#[derive(Debug, Clone)]
pub struct TableRow {
    /// `indivisible` or `divisible`.
    pub setting: &'static str,
    /// The audited guarantee, named by its report key.
    pub guarantee: &'static str,
    pub algorithm: &'static str,
    /// Proven lower bound on the achievable ratio.
    pub bound: Frac,
    /// Matching impossibility bound no online algorithm can beat.
    pub upper_bound: Frac,
    /// Worst ratio observed over the random suite.
    pub suite_min: Alpha,
    /// Whether every suite run was non-wasteful (rows that promise it).
    pub suite_non_wasteful: bool,
    /// Ratio achieved on the adversarial witness.
    pub witness: Frac,
    /// Finite-size slack the witness construction needs above the bound.
    pub witness_slack: Frac,
    pub witness_source: &'static str,
    /// Suite minimum meets the proven bound.
    pub suite_pass: bool,
    /// Witness stays at or below the upper bound plus slack.
    pub witness_pass: bool,
}

impl TableRow {
    pub fn pass(&self) -> bool {
        self.suite_pass && self.witness_pass
    }
}

fn min_alpha(acc: &mut Alpha, next: Alpha) {
    *acc = acc.clone().min_with(next);
}

/// Suite-wide worst ratios for one algorithm.
struct SuiteMins {
    cef_like: Alpha,
    cmms: Alpha,
    cprop: Alpha,
    usw: Alpha,
    non_wasteful: bool,
}

fn sweep_suite(
    spec: &AlgorithmSpec,
    suite: &[Instance],
    kinds: &[AuditKind],
) -> Result<SuiteMins, HarnessError> {
    let mut mins = SuiteMins {
        cef_like: Alpha::Infinite,
        cmms: Alpha::Infinite,
        cprop: Alpha::Infinite,
        usw: Alpha::Infinite,
        non_wasteful: true,
    };
    for inst in suite {
        let run = run_instance(spec, inst, 0, kinds)?;
        let report = run.report;
        if let Some(a) = report.cef1 {
            min_alpha(&mut mins.cef_like, a.alpha);
        }
        if let Some(a) = report.cef {
            min_alpha(&mut mins.cef_like, a.alpha);
        }
        if let Some(a) = report.cmms {
            min_alpha(&mut mins.cmms, a.alpha);
        }
        if let Some(a) = report.cprop {
            min_alpha(&mut mins.cprop, a.alpha);
        }
        if let Some(a) = report.usw {
            min_alpha(&mut mins.usw, Alpha::Finite(a.alpha));
        }
        if let Some(nw) = report.nw {
            mins.non_wasteful &= nw.non_wasteful;
        }
    }
    Ok(mins)
}

fn finite_or_one(alpha: &Alpha) -> Frac {
    match alpha {
        Alpha::Finite(v) => v.clone(),
        Alpha::Infinite => Frac::from_integer(1.into()),
    }
}

/// `alpha >= bound`, allowing the fixed tolerance only for irrational bounds
/// represented by truncated decimals.
fn meets(alpha: &Alpha, bound: &Frac, irrational: bool) -> bool {
    let slack = if irrational { tolerance() } else { Frac::zero() };
    alpha.at_least(&(bound - slack))
}

fn witness_ok(witness: &Frac, upper: &Frac, slack: &Frac, irrational: bool) -> bool {
    let tol = if irrational { tolerance() } else { Frac::zero() };
    *witness <= upper + slack + tol
}

/// Reproduces the six-row summary over the given random suite.
pub fn reproduce_table(suite: &[Instance]) -> Result<Vec<TableRow>, HarnessError> {
    let half = fr(1, 2);
    let guarantee_e = one_minus_inv_e();

    // One sweep per algorithm serves all of its rows.
    let mas = AlgorithmSpec::plain(AlgorithmId::MatchAndShift);
    let mas_mins = sweep_suite(
        &mas,
        suite,
        &[AuditKind::Cef1, AuditKind::Cmms, AuditKind::Usw, AuditKind::Nw],
    )?;
    let ef = AlgorithmSpec::plain(AlgorithmId::EqualFilling);
    let ef_mins = sweep_suite(
        &ef,
        suite,
        &[AuditKind::Cef, AuditKind::Cprop, AuditKind::Usw, AuditKind::Nw],
    )?;

    // Witness runs: adversarial constructions that pin each upper bound.
    let mas_adversarial =
        AlgorithmSpec { ties: TiePolicy::Adversarial, ..AlgorithmSpec::plain(AlgorithmId::MatchAndShift) };
    let trap = run_adversary(
        &mas_adversarial,
        "cef1-half-trap",
        0,
        &[AuditKind::Cef1, AuditKind::Cmms],
    )?;
    let trap_cef1 = finite_or_one(&trap.report.cef1.as_ref().unwrap().alpha);
    let trap_cmms = finite_or_one(&trap.report.cmms.as_ref().unwrap().alpha);

    let usw_trap = run_adversary(&mas_adversarial, "usw-pair-trap", 0, &[AuditKind::Usw])?;
    let trap_usw = usw_trap.report.usw.as_ref().unwrap().alpha.clone();

    let divisible_trap = run_adversary(&ef, "divisible-cef-trap", 0, &[AuditKind::Cef])?;
    let trap_cef = finite_or_one(&divisible_trap.report.cef.as_ref().unwrap().alpha);

    let nested = nested_single_class(20);
    let nested_run = run_instance(&ef, &nested, 0, &[AuditKind::Cprop])?;
    let nested_cprop = finite_or_one(&nested_run.report.cprop.as_ref().unwrap().alpha);

    let red_blue = red_blue_usw(10);
    let red_blue_run = run_instance(&ef, &red_blue, 0, &[AuditKind::Usw])?;
    let red_blue_usw_alpha = red_blue_run.report.usw.as_ref().unwrap().alpha.clone();

    let row_envy_one = TableRow {
        setting: "indivisible",
        guarantee: "envy-up-to-one + non-wasteful",
        algorithm: "match-and-shift",
        suite_pass: meets(&mas_mins.cef_like, &half, false) && mas_mins.non_wasteful,
        witness_pass: witness_ok(&trap_cef1, &half, &Frac::zero(), false),
        suite_min: mas_mins.cef_like.clone(),
        suite_non_wasteful: mas_mins.non_wasteful,
        witness: trap_cef1,
        witness_slack: Frac::zero(),
        witness_source: "cef1-half-trap",
        bound: half.clone(),
        upper_bound: half.clone(),
    };
    let row_maximin = TableRow {
        setting: "indivisible",
        guarantee: "maximin share",
        algorithm: "match-and-shift",
        suite_pass: meets(&mas_mins.cmms, &half, false),
        witness_pass: witness_ok(&trap_cmms, &half, &Frac::zero(), false),
        suite_min: mas_mins.cmms.clone(),
        suite_non_wasteful: mas_mins.non_wasteful,
        witness: trap_cmms,
        witness_slack: Frac::zero(),
        witness_source: "cef1-half-trap",
        bound: half.clone(),
        upper_bound: half.clone(),
    };
    let row_welfare_ind = TableRow {
        setting: "indivisible",
        guarantee: "utilitarian welfare",
        algorithm: "match-and-shift",
        suite_pass: meets(&mas_mins.usw, &half, false),
        witness_pass: witness_ok(&trap_usw, &half, &Frac::zero(), false),
        suite_min: mas_mins.usw.clone(),
        suite_non_wasteful: mas_mins.non_wasteful,
        witness: trap_usw,
        witness_slack: Frac::zero(),
        witness_source: "usw-pair-trap",
        bound: half.clone(),
        upper_bound: half.clone(),
    };
    let row_envy_free = TableRow {
        setting: "divisible",
        guarantee: "envy-free + non-wasteful",
        algorithm: "equal-filling",
        suite_pass: meets(&ef_mins.cef_like, &guarantee_e, true) && ef_mins.non_wasteful,
        witness_pass: witness_ok(&trap_cef, &fr(3, 4), &Frac::zero(), false),
        suite_min: ef_mins.cef_like.clone(),
        suite_non_wasteful: ef_mins.non_wasteful,
        witness: trap_cef,
        witness_slack: Frac::zero(),
        witness_source: "divisible-cef-trap",
        bound: guarantee_e.clone(),
        upper_bound: fr(3, 4),
    };
    let row_prop = TableRow {
        setting: "divisible",
        guarantee: "proportionality",
        algorithm: "equal-filling",
        suite_pass: meets(&ef_mins.cprop, &guarantee_e, true),
        witness_pass: witness_ok(&nested_cprop, &guarantee_e, &fr(1, 20), true),
        suite_min: ef_mins.cprop.clone(),
        suite_non_wasteful: ef_mins.non_wasteful,
        witness: nested_cprop,
        witness_slack: fr(1, 20),
        witness_source: "single-class-nested-20",
        bound: guarantee_e.clone(),
        upper_bound: guarantee_e.clone(),
    };
    let row_welfare_div = TableRow {
        setting: "divisible",
        guarantee: "utilitarian welfare",
        algorithm: "equal-filling",
        suite_pass: meets(&ef_mins.usw, &half, false),
        witness_pass: witness_ok(&red_blue_usw_alpha, &guarantee_e, &Frac::zero(), true),
        suite_min: ef_mins.usw.clone(),
        suite_non_wasteful: ef_mins.non_wasteful,
        witness: red_blue_usw_alpha,
        witness_slack: Frac::zero(),
        witness_source: "red-blue-usw-10",
        bound: half,
        upper_bound: guarantee_e,
    };

    Ok(vec![row_envy_one, row_maximin, row_welfare_ind, row_envy_free, row_prop, row_welfare_div])
}

/// Renders a rational as a 30-digit decimal (truncated, not rounded), the
/// precision used for the irrational thresholds.
pub fn decimal_30(x: &Frac) -> String {
    decimal_digits(x, 30)
}

fn decimal_digits(x: &Frac, digits: usize) -> String {
    let negative = x < &Frac::zero();
    let x = if negative { -x.clone() } else { x.clone() };
    let whole = x.to_integer();
    let mut rest = x.fract();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    out.push('.');
    let ten = num::BigInt::from(10);
    for _ in 0..digits {
        rest *= Frac::from_integer(ten.clone());
        let digit = rest.to_integer();
        out.push_str(&digit.to_string());
        rest = rest.fract();
    }
    out
}

fn render_alpha(alpha: &Alpha) -> String {
    match alpha {
        Alpha::Finite(v) => format!("{} (~{})", crate::frac::format_ratio(v), decimal_digits(v, 6)),
        Alpha::Infinite => "inf".to_string(),
    }
}

fn render_frac(v: &Frac) -> String {
    format!("{} (~{})", crate::frac::format_ratio(v), decimal_digits(v, 6))
}

/// Fixed-width text rendering of the summary rows.
pub fn render_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<11} {:<29} {:<15} {:<34} {:<22} {:<22} {:<24} {:<6}\n",
        "setting", "guarantee", "algorithm", "bound", "suite-min", "witness", "witness-source", "pass"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<11} {:<29} {:<15} {:<34} {:<22} {:<22} {:<24} {:<6}\n",
            row.setting,
            row.guarantee,
            row.algorithm,
            decimal_30(&row.bound),
            render_alpha(&row.suite_min),
            render_frac(&row.witness),
            row.witness_source,
            if row.pass() { "yes" } else { "NO" },
        ));
    }
    out
}

/// CSV rendering of the summary rows.
pub fn table_to_csv(rows: &[TableRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "setting",
        "guarantee",
        "algorithm",
        "bound",
        "upper_bound",
        "suite_min",
        "suite_non_wasteful",
        "witness",
        "witness_slack",
        "witness_source",
        "pass",
    ])?;
    for row in rows {
        w.write_record([
            row.setting.to_string(),
            row.guarantee.to_string(),
            row.algorithm.to_string(),
            crate::frac::format_ratio(&row.bound),
            crate::frac::format_ratio(&row.upper_bound),
            match &row.suite_min {
                Alpha::Finite(v) => crate::frac::format_ratio(v),
                Alpha::Infinite => "inf".to_string(),
            },
            row.suite_non_wasteful.to_string(),
            crate::frac::format_ratio(&row.witness),
            crate::frac::format_ratio(&row.witness_slack),
            row.witness_source.to_string(),
            row.pass().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::BadReport(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::BadReport(e.to_string()))
}
