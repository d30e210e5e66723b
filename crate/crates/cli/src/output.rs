use std::fmt::Write as _;

use serde::Serialize;
use wgeig::analysis::{FittedOrder, StudyResult, StudyRow};

use crate::args::CommandKind;

pub const CSV_HEADER: &str =
    "problem,k,epsilon,H_level,h_level,index,lambda_exact,lambda_h,lambda_tilde,err_direct,err_sipg,energy_err,lower_bound,seconds";

/// Rounds to 10 significant digits, the precision of the CSV output.
pub fn round10(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.9e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round10)
}

/// The result with every real number rounded as in the CSV output.
pub fn rounded(result: &StudyResult) -> StudyResult {
    StudyResult {
        rows: result
            .rows
            .iter()
            .map(|r| StudyRow {
                epsilon: round10(r.epsilon),
                lambda_exact: round_opt(r.lambda_exact),
                lambda_h: round_opt(r.lambda_h),
                lambda_tilde: round_opt(r.lambda_tilde),
                err_direct: round_opt(r.err_direct),
                err_sipg: round_opt(r.err_sipg),
                energy_err: round_opt(r.energy_err),
                seconds: round_opt(r.seconds),
                ..r.clone()
            })
            .collect(),
        orders: result
            .orders
            .iter()
            .map(|o| FittedOrder {
                order: round10(o.order),
                ..o.clone()
            })
            .collect(),
    }
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.9e}")).unwrap_or_default()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv(result: &StudyResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let fields = [
            r.problem.clone(),
            r.k.to_string(),
            num(Some(r.epsilon)),
            opt(r.coarse_level),
            r.fine_level.to_string(),
            r.index.to_string(),
            num(r.lambda_exact),
            num(r.lambda_h),
            num(r.lambda_tilde),
            num(r.err_direct),
            num(r.err_sipg),
            num(r.energy_err),
            opt(r.lower_bound),
            num(r.seconds),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    columns: Vec<&'a str>,
    #[serde(flatten)]
    result: &'a StudyResult,
}

pub fn to_json(result: &StudyResult) -> String {
    let rounded = rounded(result);
    let doc = JsonDocument {
        columns: CSV_HEADER.split(',').collect(),
        result: &rounded,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("study rows serialize");
    s.push('\n');
    s
}

/// Scientific notation in the style of the published tables (`5.9045e-4`).
fn sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into())
}

fn frac(level: u32) -> String {
    format!("1/{}", 1u64 << level)
}

fn yes_no(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "yes",
        Some(false) => "NO",
        None => "-",
    }
}

fn push_warnings(out: &mut String, rows: &[StudyRow]) {
    for r in rows.iter().filter(|r| r.warning.is_some()) {
        let _ = writeln!(
            out,
            "warning: H={} h={} j={}: {}",
            r.coarse_level.map(frac).unwrap_or_else(|| "-".into()),
            frac(r.fine_level),
            r.index,
            r.warning.as_deref().unwrap_or("")
        );
    }
}

fn run_listing(out: &mut String, result: &StudyResult) {
    let _ = writeln!(
        out,
        "{:>6} {:>6} {:>3} {:>17} {:>17} {:>12} {:>12} {:>11} {:>5} {:>9}",
        "H", "h", "j", "lambda_h", "lambda~_h", "lam-lam_h", "lam-lam~_h", "energy", "lower", "seconds"
    );
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{:>6} {:>6} {:>3} {:>17} {:>17} {:>12} {:>12} {:>11} {:>5} {:>9}",
            r.coarse_level.map(frac).unwrap_or_else(|| "-".into()),
            frac(r.fine_level),
            r.index,
            r.lambda_h.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into()),
            r.lambda_tilde.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into()),
            sci(r.err_direct),
            sci(r.err_sipg),
            sci(r.energy_err),
            yes_no(r.lower_bound),
            r.seconds.map(|s| format!("{s:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    if !result.orders.is_empty() {
        let _ = writeln!(out, "\nfitted orders (|quantity| ~ h^p):");
        for o in &result.orders {
            let _ = writeln!(out, "  {:<10} j={:<2} p = {:.4}", o.quantity, o.index, o.order);
        }
    }
}

/// One block per fine level with coarse levels as columns, rows as in the
/// published tables.
fn paper_table(out: &mut String, result: &StudyResult) {
    let mut fines: Vec<u32> = result.rows.iter().map(|r| r.fine_level).collect();
    fines.dedup();
    for (b, fine) in fines.into_iter().enumerate() {
        let rows: Vec<&StudyRow> = result.rows.iter().filter(|r| r.fine_level == fine).collect();
        let mut coarse: Vec<u32> = rows.iter().filter_map(|r| r.coarse_level).collect();
        coarse.sort_unstable();
        coarse.dedup();
        let max_index = rows.iter().map(|r| r.index).max().unwrap_or(0);
        let cell = |c: u32, j: usize| rows.iter().find(|r| r.coarse_level == Some(c) && r.index == j);
        if b > 0 {
            out.push('\n');
        }
        let label_width = 26;
        let line = |out: &mut String, label: &str, cells: Vec<String>| {
            let _ = write!(out, "{label:<label_width$}");
            for c in cells {
                let _ = write!(out, " {c:>12}");
            }
            out.push('\n');
        };
        line(out, "H", coarse.iter().map(|&c| frac(c)).collect());
        line(out, "h", coarse.iter().map(|_| frac(fine)).collect());
        let biharmonic = rows.first().is_some_and(|r| r.problem == "biharmonic");
        if biharmonic {
            let exact = rows.first().and_then(|r| r.lambda_exact);
            line(out, "lambda", coarse.iter().map(|_| exact.map(|v| format!("{v:.6}")).unwrap_or("-".into())).collect());
            for j in 1..=max_index {
                line(
                    out,
                    &format!("lambda~_{j}"),
                    coarse
                        .iter()
                        .map(|&c| cell(c, j).and_then(|r| r.lambda_tilde).map(|v| format!("{v:.6}")).unwrap_or("-".into()))
                        .collect(),
                );
                line(
                    out,
                    &format!("lambda_{j} - lambda~_{j}"),
                    coarse.iter().map(|&c| sci(cell(c, j).and_then(|r| r.err_sipg))).collect(),
                );
            }
        } else {
            for j in 1..=max_index {
                line(
                    out,
                    &format!("lambda_{j} - lambda~_{j}"),
                    coarse.iter().map(|&c| sci(cell(c, j).and_then(|r| r.err_sipg))).collect(),
                );
            }
            out.push('\n');
            line(out, "H", coarse.iter().map(|&c| frac(c)).collect());
            line(out, "h", coarse.iter().map(|_| frac(fine)).collect());
            for j in 1..=max_index {
                line(
                    out,
                    &format!("|||Q_h u_{j} - u~_{j}|||"),
                    coarse.iter().map(|&c| sci(cell(c, j).and_then(|r| r.energy_err))).collect(),
                );
            }
        }
        let flips: Vec<String> = rows
            .iter()
            .filter(|r| r.lower_bound == Some(false))
            .map(|r| format!("H={} j={}", r.coarse_level.map(frac).unwrap_or_default(), r.index))
            .collect();
        if !flips.is_empty() {
            let _ = writeln!(out, "not a lower bound: {}", flips.join(", "));
        }
    }
}

pub fn to_human(command: CommandKind, result: &StudyResult) -> String {
    let mut out = String::new();
    if command == CommandKind::Table {
        paper_table(&mut out, result);
    } else {
        run_listing(&mut out, result);
    }
    push_warnings(&mut out, &result.rows);
    out
}
