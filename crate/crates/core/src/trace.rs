//! JSON-lines trace export.
//!
//! One object per iteration record, then a closing summary object carrying
//! the verdict. Reals are printed with 17 significant digits so that
//! re-parsing reproduces every `f64` bit for bit.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::solver::{IterationRecord, SolveOutcome, Verdict};
use crate::space::Vector;

/// 17-significant-digit scientific form; parses back to the same bits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_vector(out: &mut String, x: &Vector) {
    out.push('[');
    for (j, c) in x.as_slice().iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", format_float(*c));
    }
    out.push(']');
}

/// The per-step line: `{"k":..,"x":[..],"i":..,"f":..,"g":[..],"g_norm":..,
/// "alpha":..,"delta":..|null,"flags":[..]}`.
pub fn record_line(r: &IterationRecord) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"k\":{},\"x\":", r.k);
    push_vector(&mut out, &r.x);
    let _ = write!(out, ",\"i\":{},\"f\":{},\"g\":", r.i, format_float(r.f_value));
    push_vector(&mut out, &r.g);
    let _ = write!(
        out,
        ",\"g_norm\":{},\"alpha\":{},\"delta\":",
        format_float(r.g_norm),
        format_float(r.alpha)
    );
    match r.delta {
        Some(d) => out.push_str(&format_float(d)),
        None => out.push_str("null"),
    }
    out.push_str(",\"flags\":[");
    for (j, name) in r.flags.names().iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "\"{name}\"");
    }
    out.push_str("]}");
    out
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Feasible { .. } => "feasible",
        Verdict::BudgetExhausted { .. } => "budget_exhausted",
        Verdict::CycleDetected { .. } => "cycle_detected",
    }
}

/// The closing line: verdict, update count, final point, period (when
/// detected), and the a-priori bound the budget defaulted to.
pub fn summary_line(outcome: &SolveOutcome) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"verdict\":\"{}\",\"steps\":{},\"x\":",
        verdict_name(&outcome.verdict),
        outcome.verdict.steps()
    );
    push_vector(&mut out, outcome.verdict.final_point());
    if let Verdict::CycleDetected { period, .. } = &outcome.verdict {
        let _ = write!(out, ",\"period\":{period}");
    }
    out.push_str(",\"bound_used\":");
    match outcome.bound_used {
        Some(b) => {
            let _ = write!(out, "{b}");
        }
        None => out.push_str("null"),
    }
    let t = &outcome.flag_totals;
    let _ = write!(
        out,
        ",\"flag_totals\":{{\"one_step_estimate\":{},\"slater_margin\":{},\"subgrad_bound\":{},\"negative_delta\":{}}}}}",
        t.one_step_estimate, t.slater_margin, t.subgrad_bound, t.negative_delta
    );
    out
}

/// Writes the whole trace: every record line, then the summary line.
pub fn write_jsonl<W: Write>(mut w: W, outcome: &SolveOutcome) -> io::Result<()> {
    for r in &outcome.trace {
        writeln!(w, "{}", record_line(r))?;
    }
    writeln!(w, "{}", summary_line(outcome))?;
    Ok(())
}
