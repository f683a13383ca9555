//! Command line surface: verify / reconstruct / pipeline / solve / polygon.
//!
//! Exit codes: 0 success (all checks pass), 2 check failure, 3 parse or
//! usage error, 4 solver budget exhausted.

mod render;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use abeljac_core::expr::{parse_poly, print_poly};
use abeljac_core::grading::polygon_snapshot;
use abeljac_core::jacobian::{check_conditions, edpol_residual, reconstruct, EdpolInstance, MuVec};
use abeljac_core::param::Ctx;
use abeljac_core::pipeline::{run_pipeline, PipelineOptions};
use abeljac_core::rat::Rat;
use abeljac_core::solver::{generate_system_with, solve_system, SolveBudget, SolverStatus};
use abeljac_core::LaurentPoly;

use report::{print_error, RunReport};

#[derive(Parser)]
#[command(name = "abeljac", version, about = "Exact workbench for bracket systems on Laurent polynomial pairs")]
struct Cli {
    /// Seed for randomized self-checks; recorded in reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InstanceArgs {
    /// File with the polynomial A in the expression grammar.
    #[arg(long = "A")]
    a: PathBuf,
    /// File with the polynomial q1.
    #[arg(long = "q1")]
    q1: PathBuf,
    /// mu values as four comma-separated rationals, e.g. 2,0,0,2.
    #[arg(long)]
    mu: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the quadratic-equation residual and the side conditions.
    Verify(InstanceArgs),
    /// Rebuild the pair (P, Q) from (A, q1, mu).
    Reconstruct(InstanceArgs),
    /// Run the six-stage automorphism pipeline on a pair.
    Pipeline {
        #[arg(long = "P")]
        p: PathBuf,
        #[arg(long = "Q")]
        q: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        j: i64,
        /// mu vector for the shears when it differs from the pair's.
        #[arg(long = "map-mu")]
        map_mu: Option<String>,
        /// Record failing checks and continue instead of halting.
        #[arg(long)]
        audit: bool,
        /// Write the full stage trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write per-stage polygon SVGs into this directory.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve the coefficient system at one degree.
    Solve {
        #[arg(long)]
        deg: u32,
        /// Preset mu1 (restricted scan).
        #[arg(long)]
        mu1: Option<String>,
        /// Preset mu2 (restricted scan).
        #[arg(long)]
        mu2: Option<String>,
        /// Budget in seconds (precedence: flag, then ABELJAC_BUDGET_SECS, then 600).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print the support, hull and direction-labeled edges of a polynomial.
    Polygon {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value = "ascii")]
        format: String,
    },
}

fn parse_rat(text: &str) -> Result<Rat, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: i128 = num.parse().map_err(|_| format!("bad rational `{text}`"))?;
    let d: i128 = den.parse().map_err(|_| format!("bad rational `{text}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rat::new(n.into(), d.into()))
}

fn parse_mu(ctx: &Ctx, text: &str) -> Result<MuVec, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("--mu expects four comma-separated rationals, got `{text}`"));
    }
    let mut vals = Vec::new();
    for p in parts {
        vals.push(parse_rat(p)?);
    }
    Ok(MuVec::from_rats(ctx, [vals[0].clone(), vals[1].clone(), vals[2].clone(), vals[3].clone()]))
}

fn read_poly(ctx: &Ctx, path: &Path) -> Result<LaurentPoly, (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (3u8, format!("cannot read {}: {e}", path.display())))?;
    parse_poly(ctx, text.trim()).map_err(|e| (3u8, format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version go to stdout with success; usage errors exit 3
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(3);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let code = dispatch(cli);
    ExitCode::from(code)
}

fn dispatch(cli: Cli) -> u8 {
    let ctx = Ctx::standard();
    match cli.cmd {
        Cmd::Verify(args) => with_instance(&ctx, &args, |inst, inputs, t0| {
            let residual = match edpol_residual(inst) {
                Ok(r) => r,
                Err(e) => {
                    print_error("compute", &e.to_string());
                    return 2;
                }
            };
            let conditions = check_conditions(inst);
            let ok = residual.is_zero();
            RunReport::new(
                "verify",
                inputs,
                json!({
                    "residual": print_poly(&residual),
                    "residual_zero": ok,
                    "conditions": {
                        "a_at_zero": conditions[0],
                        "a_prime_at_zero": conditions[1],
                        "second_derivative_coupling": conditions[2],
                    },
                }),
                json!({ "residual_zero": ok, "conditions": conditions }),
                t0.elapsed().as_millis(),
            )
            .print();
            if ok { 0 } else { 2 }
        }),
        Cmd::Reconstruct(args) => with_instance(&ctx, &args, |inst, inputs, t0| {
            match reconstruct(inst) {
                Ok(rec) => {
                    let report = RunReport::new(
                        "reconstruct",
                        inputs,
                        json!({
                            "P": print_poly(&rec.p),
                            "Q": print_poly(&rec.q),
                            "flags": rec.flags,
                            "bracket": print_poly(&rec.bracket),
                            "bracket_matches_mu": rec.bracket_matches,
                        }),
                        json!({ "bracket_matches_mu": rec.bracket_matches }),
                        t0.elapsed().as_millis(),
                    );
                    report.print();
                    if rec.bracket_matches { 0 } else { 2 }
                }
                Err(e) => {
                    print_error("reconstruct", &e.to_string());
                    2
                }
            }
        }),
        Cmd::Pipeline {
            p,
            q,
            mu,
            j,
            map_mu,
            audit,
            trace,
            svg,
        } => run_pipeline_cmd(&ctx, &p, &q, &mu, j, map_mu.as_deref(), audit, trace, svg),
        Cmd::Solve { deg, mu1, mu2, budget } => run_solve(deg, mu1.as_deref(), mu2.as_deref(), budget),
        Cmd::Polygon { poly, format } => {
            let p = match read_poly(&ctx, &poly) {
                Ok(p) => p,
                Err((code, msg)) => {
                    print_error("parse", &msg);
                    return code;
                }
            };
            let snap = match polygon_snapshot(&p) {
                Ok(s) => s,
                Err(e) => {
                    print_error("polygon", &e.to_string());
                    return 2;
                }
            };
            match format.as_str() {
                "svg" => print!("{}", render::to_svg(&snap)),
                "ascii" => print!("{}", render::to_ascii(&snap)),
                other => {
                    print_error("usage", &format!("unknown format `{other}` (svg|ascii)"));
                    return 3;
                }
            }
            0
        }
    }
}

fn with_instance(
    ctx: &Ctx,
    args: &InstanceArgs,
    run: impl FnOnce(&EdpolInstance, serde_json::Value, Instant) -> u8,
) -> u8 {
    let t0 = Instant::now();
    let a = match read_poly(ctx, &args.a) {
        Ok(p) => p,
        Err((code, msg)) => {
            print_error("parse", &msg);
            return code;
        }
    };
    let q1 = match read_poly(ctx, &args.q1) {
        Ok(p) => p,
        Err((code, msg)) => {
            print_error("parse", &msg);
            return code;
        }
    };
    let mu = match parse_mu(ctx, &args.mu) {
        Ok(m) => m,
        Err(msg) => {
            print_error("usage", &msg);
            return 3;
        }
    };
    let inputs = json!({
        "A": print_poly(&a),
        "q1": print_poly(&q1),
        "mu": [
            abeljac_core::rat::fmt_rat(&mu.m(0).as_constant().unwrap()),
            abeljac_core::rat::fmt_rat(&mu.m(1).as_constant().unwrap()),
            abeljac_core::rat::fmt_rat(&mu.m(2).as_constant().unwrap()),
            abeljac_core::rat::fmt_rat(&mu.m(3).as_constant().unwrap()),
        ],
    });
    let inst = EdpolInstance { a, q1, mu };
    run(&inst, inputs, t0)
}

#[allow(clippy::too_many_arguments)]
fn run_pipeline_cmd(
    ctx: &Ctx,
    p_path: &Path,
    q_path: &Path,
    mu_text: &str,
    j: i64,
    map_mu: Option<&str>,
    audit: bool,
    trace: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> u8 {
    let t0 = Instant::now();
    let p = match read_poly(ctx, p_path) {
        Ok(p) => p,
        Err((code, msg)) => {
            print_error("parse", &msg);
            return code;
        }
    };
    let q = match read_poly(ctx, q_path) {
        Ok(p) => p,
        Err((code, msg)) => {
            print_error("parse", &msg);
            return code;
        }
    };
    let mu = match parse_mu(ctx, mu_text) {
        Ok(m) => m,
        Err(msg) => {
            print_error("usage", &msg);
            return 3;
        }
    };
    let map_mu = match map_mu {
        None => None,
        Some(text) => match parse_mu(ctx, text) {
            Ok(m) => Some(m),
            Err(msg) => {
                print_error("usage", &msg);
                return 3;
            }
        },
    };
    let options = PipelineOptions {
        audit,
        map_mu,
        max_corrections: 3,
    };
    match run_pipeline(&p, &q, &mu, j, options) {
        Ok(run) => {
            if let Some(dir) = svg {
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    print_error("io", &format!("cannot create {}: {e}", dir.display()));
                    return 2;
                }
                for stage in &run.stages {
                    for (tag, poly) in [("P", &stage.polygon_p), ("Q", &stage.polygon_q)] {
                        if let Some(snap) = poly {
                            let path = dir.join(format!("stage{}-{}-{}.svg", stage.index, stage.name, tag));
                            if let Err(e) = std::fs::write(&path, render::to_svg(snap)) {
                                print_error("io", &format!("cannot write {}: {e}", path.display()));
                                return 2;
                            }
                        }
                    }
                }
            }
            if let Some(path) = trace {
                if let Err(e) = std::fs::write(&path, run.to_json()) {
                    print_error("io", &format!("cannot write {}: {e}", path.display()));
                    return 2;
                }
            }
            let failed: Vec<String> = run
                .failed_checks()
                .iter()
                .map(|c| format!("{}: expected {}, got {}", c.name, c.expected, c.actual))
                .collect();
            RunReport::new(
                "pipeline",
                json!({
                    "P": print_poly(&p),
                    "Q": print_poly(&q),
                    "mu": run.mu,
                    "map_mu": run.map_mu,
                    "j": run.j,
                }),
                json!({
                    "report": run.report,
                    "scalars": run.scalars,
                    "stages": run.stages.len(),
                }),
                json!({ "all_checks_pass": run.all_checks_pass, "failed": failed }),
                t0.elapsed().as_millis(),
            )
            .print();
            if run.all_checks_pass && run.report.in_l {
                0
            } else {
                2
            }
        }
        Err(e) => {
            print_error("check", &e.to_string());
            2
        }
    }
}

fn run_solve(deg: u32, mu1: Option<&str>, mu2: Option<&str>, budget_flag: Option<u64>) -> u8 {
    let t0 = Instant::now();
    let mut presets: Vec<(&str, Rat)> = Vec::new();
    if let Some(text) = mu1 {
        match parse_rat(text) {
            Ok(r) => presets.push(("mu1", r)),
            Err(msg) => {
                print_error("usage", &msg);
                return 3;
            }
        }
    }
    if let Some(text) = mu2 {
        match parse_rat(text) {
            Ok(r) => presets.push(("mu2", r)),
            Err(msg) => {
                print_error("usage", &msg);
                return 3;
            }
        }
    }
    let env_budget = std::env::var("ABELJAC_BUDGET_SECS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok());
    let max_seconds = budget_flag.or(env_budget).unwrap_or(600);
    let budget = SolveBudget {
        max_seconds,
        max_branches: 4096,
    };
    let cs = match generate_system_with(deg, &presets) {
        Ok(cs) => cs,
        Err(e) => {
            print_error("usage", &e.to_string());
            return 3;
        }
    };
    match solve_system(&cs, &budget) {
        Ok(report) => {
            let exhausted = report.status == SolverStatus::BudgetExhausted;
            let mut inputs = BTreeMap::new();
            inputs.insert("deg".to_string(), json!(deg));
            inputs.insert("budget_secs".to_string(), json!(max_seconds));
            for (name, value) in &presets {
                inputs.insert(name.to_string(), json!(abeljac_core::rat::fmt_rat(value)));
            }
            RunReport::new(
                "solve",
                serde_json::to_value(inputs).unwrap(),
                report.to_json(),
                json!({
                    "complete": !exhausted,
                    "all_verified": report.solutions.iter().all(|s| s.verified),
                }),
                t0.elapsed().as_millis(),
            )
            .print();
            if exhausted {
                4
            } else {
                0
            }
        }
        Err(e) => {
            print_error("solve", &e.to_string());
            2
        }
    }
}
