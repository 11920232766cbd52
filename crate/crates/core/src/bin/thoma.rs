//! Command-line front end: evaluate spherical functions and run the check
//! suites.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use num_traits::ToPrimitive;
use serde_json::json;

use thoma::cocycle::{make_pair, parse_group_element, PairKind};
use thoma::fock::{roundoff_allowance, tail_bound, vacuum_coefficient, AffinePoint};
use thoma::perm::parse_permutation;
use thoma::thoma::{phi, ThomaParams};
use thoma::verify::{run_suite, Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "thoma", version, about = "Spherical functions of infinite symmetric group pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the Thoma spherical function Φ_{α,β}(σ, τ) exactly.
    EvalThoma {
        /// Comma-separated rationals, e.g. "1/2,1/4".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value = "e")]
        tau: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate ‖Ξ(g)‖² and exp(−½‖Ξ(g)‖²) for an affine construction.
    EvalConstruction {
        /// One of A, B, C, D.
        #[arg(long)]
        pair: String,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Group element, permutations joined by "|", e.g. "(1 2)|e".
        #[arg(long)]
        g: String,
        #[arg(long)]
        json: bool,
    },
    /// Vacuum coefficient of a translation in the truncated Fock space.
    EvalFock {
        /// Number of variables (defaults to the length of --v).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 10)]
        degree: u32,
        /// Comma-separated translation vector.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        json: bool,
    },
    /// Run one of the check suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// oracle | cocycle | kinv | pairA | product | psd | fock | sign
    suite: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Pair kinds, comma-separated (default: all four).
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    window: u32,
    /// Gram matrix size for the psd suite.
    #[arg(long, default_value_t = 40)]
    elements: usize,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 12)]
    degree: u32,
    #[arg(long)]
    json: bool,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Check,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Twelve decimals with trailing zeros dropped, for the human-readable tables.
fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json value serializes"));
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::EvalThoma { alpha, beta, sigma, tau, json } => {
            let params = ThomaParams::parse(&alpha, &beta)?;
            let s = parse_permutation(&sigma)?;
            let t = parse_permutation(&tau)?;
            let value = phi(&params, &s, &t)?;
            let approx = value.to_f64().unwrap_or(f64::NAN);
            let relative = s.compose(&t.inverse())?;
            if json {
                print_json(&json!({
                    "alpha": params.alpha().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "beta": params.beta().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "sigma": s.to_string(),
                    "tau": t.to_string(),
                    "cycle_type": relative.cycle_type(),
                    "value": value.to_string(),
                    "approx": approx.to_string(),
                }));
            } else {
                println!("params      {params}");
                println!("sigma tau^-1 {relative}  cycle type {:?}", relative.cycle_type());
                println!("phi         {value}  (~ {approx})");
            }
            Ok(())
        }
        Command::EvalConstruction { pair, s, t, g, json } => {
            let kind: PairKind = pair.parse()?;
            let spec = make_pair(kind, s, t)?;
            let element = parse_group_element(&g)?;
            let xi = spec.xi(&element)?;
            let norm = xi.norm_sq();
            let norm_value = norm.eval(s, t.unwrap_or(0.0));
            let spherical = spec.spherical(&element)?;
            if json {
                print_json(&json!({
                    "pair": kind.to_string(),
                    "g": element.to_string(),
                    "in_subgroup": spec.in_subgroup(&element)?,
                    "xi": xi.to_string(),
                    "norm_sq": norm.to_string(),
                    "norm_sq_value": norm_value.to_string(),
                    "spherical": spherical.to_string(),
                }));
            } else {
                println!("pair        {kind}  g = {element}");
                println!("in K        {}", spec.in_subgroup(&element)?);
                println!("xi          {xi}");
                println!("|xi|^2      {norm} = {}", short(norm_value));
                println!("spherical   exp(-{}) = {}", short(0.5 * norm_value), short(spherical));
            }
            Ok(())
        }
        Command::EvalFock { dim, degree, v, json } => {
            let v = v
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()?;
            let dim = dim.unwrap_or(v.len());
            if dim != v.len() {
                return Err(Failure::Usage(format!("--dim {dim} but --v has {} entries", v.len())));
            }
            let v = DVector::from_vec(v);
            let norm_sq = v.norm_squared();
            let value = vacuum_coefficient(&AffinePoint::translation(v), degree)?;
            let target = (-0.5 * norm_sq).exp();
            let err = (value.re - target).abs();
            let bound = tail_bound(norm_sq, degree);
            let pass = err <= bound + roundoff_allowance(target);
            if json {
                print_json(&json!({
                    "dim": dim,
                    "degree": degree,
                    "value": value.re.to_string(),
                    "target": target.to_string(),
                    "abs_err": err.to_string(),
                    "tail_bound": bound.to_string(),
                    "pass": pass,
                }));
            } else {
                println!("value       {}", value.re);
                println!("target      {target}");
                println!("abs error   {err:e}");
                println!("tail bound  {bound:e}");
            }
            if pass {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Verify(args) => verify(args),
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let suite: Suite = args.suite.parse()?;
    let params = match (&args.alpha, &args.beta) {
        (None, None) => None,
        (a, b) => Some(ThomaParams::parse(
            a.as_deref().unwrap_or(""),
            b.as_deref().unwrap_or(""),
        )?),
    };
    let pairs = match &args.pair {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<PairKind>, _>>()?,
    };
    let cfg = SuiteConfig {
        seed: args.seed,
        samples: args.samples,
        n: args.n,
        params,
        pairs,
        s: args.s,
        t: args.t,
        window: args.window,
        elements: args.elements,
        tol: args.tol,
        degree: args.degree,
    };
    let report = run_suite(suite, &cfg)?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        for check in report.failures().take(20) {
            println!(
                "FAIL {}: lhs={} rhs={} err={} tol={}",
                check.name, check.lhs, check.rhs, check.abs_err, check.tol
            );
        }
        println!(
            "suite {}: {} ({}/{} checks passed)",
            report.suite,
            if report.pass { "pass" } else { "FAIL" },
            report.passed(),
            report.checks.len()
        );
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
