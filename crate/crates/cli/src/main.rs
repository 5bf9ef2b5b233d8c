//! `feas` — solve convex inequality systems from problem files, train the
//! perceptron on CSV datasets, and run the built-in reproduction scenarios.
//!
//! Exit codes: 0 feasible point found, 2 budget exhausted, 3 exact cycle
//! detected, 1 input or runtime error.

mod parse;
mod problem_file;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use feas_core::gen::separable_dataset_with;
use feas_core::perceptron::{
    build_problem, derive_certificate, estimate_margin, train_perceptron, LinearDataset,
};
use feas_core::repro::{run_example_2_7, run_example_3_1, run_remark_2_6, ReproReport};
use feas_core::schedules::iteration_bound;
use feas_core::solver::DEFAULT_CYCLE_WINDOW;
use feas_core::trace::{format_float, write_jsonl};
use feas_core::{solve, SolveOptions, SolveOutcome, StepSchedule, Vector, Verdict};

#[derive(Parser)]
#[command(name = "feas", version, about = "Subgradient solver for convex inequality systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and print a JSON summary.
    Solve(SolveArgs),
    /// Train the perceptron on a CSV dataset of linear constraints.
    Perceptron(PerceptronArgs),
    /// Run a named reproduction scenario and print its assertion report.
    Repro(ReproArgs),
    /// Generate a seeded separable dataset with a planted margin.
    GenDataset(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the JSON problem file.
    problem: PathBuf,
    /// Starting point, comma-separated (defaults to the origin).
    #[arg(long)]
    x0: Option<String>,
    /// Step schedule: constant:<a>, harmonic:<c>, explicit:<path>,
    /// normalized:<inner>.
    #[arg(long, default_value = "harmonic:1")]
    schedule: String,
    /// Selection rule: first-violated, most-violated, cyclic, random.
    #[arg(long, default_value = "first-violated")]
    select: String,
    /// Maximum updates (default: a-priori bound + 10 when computable,
    /// else 1000000; a `defaults.budget` in the file takes middle
    /// precedence).
    #[arg(long)]
    budget: Option<u64>,
    /// Feasibility tolerance (default: the file's, else 0).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON-lines trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Per-step descent monitors (certificate required): on or off.
    #[arg(long, default_value = "on")]
    monitors: String,
    /// Exact-cycle detection under constant steps: on or off.
    #[arg(long = "cycle-detection", default_value = "on")]
    cycle_detection: String,
    /// Largest cycle period searched for.
    #[arg(long = "cycle-window", default_value_t = DEFAULT_CYCLE_WINDOW)]
    cycle_window: usize,
    /// Seed for the random selection rule.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PerceptronArgs {
    /// Path to the CSV dataset (rows of reals; `#labeled` for labeled form).
    data: PathBuf,
    /// Step size.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Starting point (defaults to the origin).
    #[arg(long)]
    x0: Option<String>,
    /// Known strict separator, comma-separated; when absent one is
    /// estimated by training from the origin.
    #[arg(long)]
    z: Option<String>,
    /// Certificate scale for the derived certificate.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Selection rule among violated rows.
    #[arg(long, default_value = "first-violated")]
    select: String,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    /// Write the JSON-lines trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Seed for the random selection rule.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReproArgs {
    /// Case name: remark-2-6, example-2-7, or example-3-1.
    case: String,
    /// Steps to simulate (remark-2-6, example-2-7).
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// Constant step size (example-3-1).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Starting point in ]0, alpha[ (example-3-1).
    #[arg(long, default_value_t = 0.5)]
    x0: f64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 50)]
    rows: usize,
    /// Planted lower bound on margins along the hidden separator.
    #[arg(long, default_value_t = 0.2)]
    margin: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the labeled CSV form (points with a trailing +1/-1 label).
    #[arg(long)]
    labeled: bool,
    /// Output path; without it the CSV goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Perceptron(args) => cmd_perceptron(args),
        Command::Repro(args) => cmd_repro(args),
        Command::GenDataset(args) => cmd_gen_dataset(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn verdict_code(verdict: &Verdict) -> u8 {
    match verdict {
        Verdict::Feasible { .. } => 0,
        Verdict::BudgetExhausted { .. } => 2,
        Verdict::CycleDetected { .. } => 3,
    }
}

fn verdict_name(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Feasible { .. } => "feasible",
        Verdict::BudgetExhausted { .. } => "budget_exhausted",
        Verdict::CycleDetected { .. } => "cycle_detected",
    }
}

fn on_off(name: &str, value: &str) -> Result<bool> {
    match value {
        "on" => Ok(true),
        "off" => Ok(false),
        other => bail!("--{name} expects on or off, got `{other}`"),
    }
}

fn write_trace(path: &PathBuf, outcome: &SolveOutcome) -> Result<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create trace file {}", path.display()))?;
    write_jsonl(BufWriter::new(file), outcome)?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.problem)
        .with_context(|| format!("cannot read {}", args.problem.display()))?;
    let (problem, defaults) = problem_file::load_problem(&text)?;

    let x0 = match &args.x0 {
        Some(spec) => parse::parse_vector(spec)?,
        None => Vector::zeros(problem.dimension())?,
    };
    let sched = parse::parse_schedule(&args.schedule)?;
    let rule = parse::parse_selection(&args.select, args.seed)?;
    let opts = SolveOptions {
        tolerance: args.tolerance.or(defaults.tolerance).unwrap_or(0.0),
        budget: args.budget.or(defaults.budget),
        monitors: on_off("monitors", &args.monitors)?,
        cycle_detection: on_off("cycle-detection", &args.cycle_detection)?,
        cycle_window: args.cycle_window,
        record_trace: args.trace.is_some(),
    };

    let bound = match problem.slater() {
        Some(cert) => iteration_bound(&x0, cert, &sched)?,
        None => None,
    };
    let outcome = solve(&problem, &x0, rule, &sched, &opts)?;
    if let Some(path) = &args.trace {
        write_trace(path, &outcome)?;
    }

    let final_point = outcome.verdict.final_point();
    let residuals = problem.residual(final_point)?;
    let t = &outcome.flag_totals;
    let mut summary = json!({
        "verdict": verdict_name(&outcome.verdict),
        "steps": outcome.verdict.steps(),
        "x": final_point.as_slice(),
        "residuals": residuals,
        "flag_totals": {
            "one_step_estimate": t.one_step_estimate,
            "slater_margin": t.slater_margin,
            "subgrad_bound": t.subgrad_bound,
            "negative_delta": t.negative_delta,
        },
        "iteration_bound": bound,
        "tolerance": opts.tolerance,
    });
    if let Verdict::CycleDetected { period, .. } = &outcome.verdict {
        summary["period"] = json!(period);
    }
    println!("{summary}");
    Ok(verdict_code(&outcome.verdict))
}

fn cmd_perceptron(args: PerceptronArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("cannot read {}", args.data.display()))?;
    let ds = LinearDataset::parse_csv(&text)?;

    let x0 = match &args.x0 {
        Some(spec) => parse::parse_vector(spec)?,
        None => Vector::zeros(ds.dim())?,
    };
    let rule = parse::parse_selection(&args.select, args.seed)?;

    // A certificate needs a strict separator: the given one, or an
    // estimated one when the search succeeds.
    let (separator, separator_source) = match &args.z {
        Some(spec) => (Some(parse::parse_vector(spec)?), "given"),
        None => match estimate_margin(&ds)? {
            Some((z, _)) => (Some(z), "estimated"),
            None => (None, "none"),
        },
    };
    let certificate = separator
        .as_ref()
        .map(|z| derive_certificate(&ds, z, args.rho))
        .transpose()
        .context("the separator does not strictly separate the rows")?;
    let bound = certificate
        .as_ref()
        .map(|cert| iteration_bound(&x0, cert, &StepSchedule::constant(args.alpha)?))
        .transpose()?
        .flatten();

    let outcome = train_perceptron(&ds, &x0, args.alpha, args.budget, rule)?;
    if let Some(path) = &args.trace {
        write_trace(path, &outcome)?;
    }

    let final_point = outcome.verdict.final_point();
    let margins = ds.margins(final_point)?;
    let summary = json!({
        "verdict": verdict_name(&outcome.verdict),
        "mistakes": outcome.verdict.steps(),
        "x": final_point.as_slice(),
        "margins": margins,
        "separator_source": separator_source,
        "certificate": certificate.as_ref().map(|c| json!({
            "s": c.s.as_slice(),
            "sigma": c.sigma,
            "L": c.subgrad_bound,
        })),
        "iteration_bound": bound,
        "alpha": args.alpha,
        "rho": args.rho,
    });
    println!("{summary}");
    Ok(verdict_code(&outcome.verdict))
}

fn print_report(report: &ReproReport) -> u8 {
    println!("case {}:", report.case);
    for a in &report.assertions {
        let status = if a.passed { "ok  " } else { "FAIL" };
        println!("  {status} {} — {}", a.label, a.detail);
    }
    if report.passed() {
        println!("result: PASS");
        0
    } else {
        println!("result: FAIL");
        1
    }
}

fn cmd_repro(args: ReproArgs) -> Result<u8> {
    let report = match args.case.as_str() {
        "remark-2-6" => run_remark_2_6(args.steps)?,
        "example-2-7" => run_example_2_7(args.steps)?,
        "example-3-1" => run_example_3_1(args.alpha, args.x0)?,
        other => bail!(
            "unknown case `{other}` (expected remark-2-6, example-2-7, or example-3-1)"
        ),
    };
    Ok(print_report(&report))
}

fn cmd_gen_dataset(args: GenArgs) -> Result<u8> {
    let generated = separable_dataset_with(args.seed, args.dim, args.rows, args.margin)?;
    let ds = &generated.dataset;

    let mut csv = String::new();
    if args.labeled {
        // Random signs; the labeled reduction recovers the same rows.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed ^ 0x1abe1);
        csv.push_str("#labeled\n");
        for row in ds.rows() {
            let y: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let point = row.scale(y);
            let fields: Vec<String> =
                point.as_slice().iter().map(|&c| format_float(c)).collect();
            csv.push_str(&fields.join(","));
            csv.push_str(&format!(",{}\n", if y > 0.0 { "+1" } else { "-1" }));
        }
    } else {
        csv = ds.to_csv();
    }

    match &args.out {
        Some(path) => {
            let mut file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            file.write_all(csv.as_bytes())?;
            let summary = json!({
                "path": path.display().to_string(),
                "rows": ds.len(),
                "dim": ds.dim(),
                "planted_margin": generated.margin,
                "separator": generated.separator.as_slice(),
                "labeled": args.labeled,
            });
            println!("{summary}");
        }
        None => print!("{csv}"),
    }
    Ok(0)
}
