//! Command-line front end: loads series specs, runs analyses, and emits
//! machine-readable JSON reports with full assumption audits.
//!
//! Exit codes: 0 = analysis completed (whatever the verdict), 1 = input
//! error, 2 = resource cap hit. Verdicts are data, never exit codes.

use irrcrit_cli::{analyses, report, spec};

use analyses::{parse_rat_flag, CliError, SearchBounds};
use clap::{Parser, Subcommand};
use irrcrit::exact::{parse_rat, Precision};
use irrcrit::seq::Window;
use std::path::PathBuf;
use std::time::Instant;

const PREC_ENV: &str = "IRRCRIT_PREC";

#[derive(Parser)]
#[command(name = "irrcrit", version, about = "Certified desk-scale checks of irrationality and transcendence criteria for series")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Enclosure width target (e.g. 1e-30, 1/1000); env IRRCRIT_PREC.
    #[arg(long, global = true)]
    prec: Option<String>,
    /// Iteration/term budget for refinements.
    #[arg(long, global = true)]
    max_work: Option<u64>,
    /// Worker threads for the q-sweep and the (B,N) witness search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enclose the series value.
    Eval {
        spec: PathBuf,
        /// Fixed truncation depth; omitted means adaptive.
        #[arg(long)]
        depth: Option<i64>,
    },
    /// Run a criterion checker against a spec file.
    Check {
        /// One of: erdos-straus, erdos-straus-cor, erdos-straus-refute,
        /// prime-series, hancl, hancl-cor2, hancl-refute, hancl-rucki-1,
        /// hancl-rucki-2.
        analysis: String,
        spec: PathBuf,
        /// Witness search bound on B.
        #[arg(long = "Bmax", default_value_t = 16)]
        b_max: u64,
        /// Witness search bound on the start index N.
        #[arg(long = "Nmax", default_value_t = 10)]
        n_max: i64,
        /// Witness window length.
        #[arg(long, default_value_t = 40)]
        len: usize,
        /// Window start (analysis-specific default when omitted).
        #[arg(long)]
        from: Option<i64>,
        /// Window end (analysis-specific default when omitted).
        #[arg(long)]
        to: Option<i64>,
        /// The root-limit constant A (hancl family).
        #[arg(long = "A")]
        a_limit: Option<String>,
        /// Start index s of the product inequality (hancl).
        #[arg(long, default_value_t = 1)]
        s: i64,
        /// Threshold index for the specialized bounds (hancl-cor2).
        #[arg(long, default_value_t = 6)]
        threshold: i64,
        /// Denominator sweep bound (refutation analyses).
        #[arg(long, default_value = "50")]
        qmax: String,
        /// Index budget for refutations.
        #[arg(long, default_value_t = 64)]
        nmax_refute: i64,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Start index of the root-gap requirement (hancl-rucki-2).
        #[arg(long, default_value_t = 1)]
        t: i64,
    },
    /// Materialize the two-branch counterexample family and audit the
    /// per-index claim at a given A.
    Counterexample {
        #[arg(long)]
        delta: String,
        #[arg(long, default_value = "2")]
        a1: String,
        #[arg(long = "A")]
        a_const: String,
        #[arg(long)]
        kmax: i64,
    },
    /// Prime diagnostics.
    Primes {
        #[command(subcommand)]
        sub: PrimesCmd,
    },
    /// Approximant exponents.
    Roth {
        #[command(subcommand)]
        sub: RothCmd,
    },
}

#[derive(Subcommand)]
enum PrimesCmd {
    /// Consecutive-ratio extrema and the double-gap check on a window.
    Diag {
        #[arg(long)]
        nmin: u64,
        #[arg(long)]
        nmax: u64,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
    },
}

#[derive(Subcommand)]
enum RothCmd {
    /// Partial-sum approximants with certified effective exponents.
    Exponent {
        spec: PathBuf,
        #[arg(long, default_value_t = 6)]
        kmax: i64,
    },
}

fn precision_from(cli_prec: &Option<String>, max_work: Option<u64>) -> Result<Precision, CliError> {
    let text = cli_prec
        .clone()
        .or_else(|| std::env::var(PREC_ENV).ok())
        .unwrap_or_else(|| "1e-30".to_string());
    let width = parse_rat(&text)
        .ok_or_else(|| CliError::input(format!("precision {text:?} is not a rational")))?;
    let prec = Precision::new(width, 1 << 20).map_err(|e| CliError::input(e.to_string()))?;
    Ok(match max_work {
        Some(mw) => prec.with_max_work(mw),
        None => prec,
    })
}

fn window_or(from: Option<i64>, to: Option<i64>, dflt: (i64, i64)) -> Result<Window, CliError> {
    Window::new(from.unwrap_or(dflt.0), to.unwrap_or(dflt.1)).map_err(CliError::input)
}

fn run(cli: Cli) -> Result<report::Report, CliError> {
    let prec = precision_from(&cli.prec, cli.max_work)?;
    match cli.cmd {
        Cmd::Eval { spec, depth } => {
            let loaded = spec::load_spec(&spec).map_err(|e| CliError::input(e.to_string()))?;
            analyses::eval(loaded, depth, &prec)
        }
        Cmd::Check {
            analysis,
            spec,
            b_max,
            n_max,
            len,
            from,
            to,
            a_limit,
            s,
            threshold,
            qmax,
            nmax_refute,
            delta,
            epsilon,
            t,
        } => {
            let loaded = spec::load_spec(&spec).map_err(|e| CliError::input(e.to_string()))?;
            let first = loaded.series.first_index();
            let a_limit_rat = |what: &str| -> Result<_, CliError> {
                let text = a_limit
                    .as_ref()
                    .ok_or_else(|| CliError::input(format!("{what} needs --A")))?;
                parse_rat_flag(text, "--A")
            };
            let delta_rat = |what: &str| -> Result<_, CliError> {
                let text = delta
                    .as_ref()
                    .ok_or_else(|| CliError::input(format!("{what} needs --delta")))?;
                parse_rat_flag(text, "--delta")
            };
            match analysis.as_str() {
                "erdos-straus" => analyses::check_erdos_straus(
                    loaded,
                    SearchBounds { b_max, n_max, len },
                    &prec,
                    cli.jobs,
                ),
                "erdos-straus-cor" => analyses::check_erdos_straus_cor(
                    loaded,
                    window_or(from, to, (first, first + 39))?,
                    &prec,
                ),
                "erdos-straus-refute" => {
                    let q = parse_rat_flag(&qmax, "--qmax")?;
                    analyses::check_erdos_straus_refute(
                        loaded,
                        analyses::rat_to_u64(&q, "--qmax")?,
                        nmax_refute,
                        &prec,
                        cli.jobs,
                    )
                }
                "prime-series" => analyses::check_prime_series(
                    loaded,
                    window_or(from, to, (1, 100))?,
                    &prec,
                ),
                "hancl" => analyses::check_hancl(
                    loaded,
                    a_limit_rat("hancl")?,
                    s,
                    window_or(from, to, (s.max(first), s.max(first) + 6))?,
                    &prec,
                ),
                "hancl-cor2" => analyses::check_hancl_cor2(
                    loaded,
                    a_limit_rat("hancl-cor2")?,
                    window_or(from, to, (threshold, threshold + 6))?,
                    threshold,
                    &prec,
                ),
                "hancl-refute" => {
                    let q = parse_rat_flag(&qmax, "--qmax")?;
                    if !q.is_integer() {
                        return Err(CliError::input("--qmax must be an integer"));
                    }
                    analyses::check_hancl_refute(loaded, q.to_integer(), nmax_refute, &prec)
                }
                "hancl-rucki-1" => analyses::check_hancl_rucki(
                    loaded,
                    false,
                    delta_rat("hancl-rucki-1")?,
                    None,
                    t,
                    window_or(from, to, (first, first + 7))?,
                    &prec,
                ),
                "hancl-rucki-2" => {
                    let eps = epsilon
                        .as_ref()
                        .ok_or_else(|| CliError::input("hancl-rucki-2 needs --epsilon"))?;
                    analyses::check_hancl_rucki(
                        loaded,
                        true,
                        delta_rat("hancl-rucki-2")?,
                        Some(parse_rat_flag(eps, "--epsilon")?),
                        t,
                        window_or(from, to, (first, first + 7))?,
                        &prec,
                    )
                }
                other => Err(CliError::input(format!(
                    "unknown analysis {other:?}; see --help for the list"
                ))),
            }
        }
        Cmd::Counterexample { delta, a1, a_const, kmax } => {
            let delta = parse_rat_flag(&delta, "--delta")?;
            let a1 = parse_rat_flag(&a1, "--a1")?;
            if !a1.is_integer() {
                return Err(CliError::input("--a1 must be an integer"));
            }
            let a_const = parse_rat_flag(&a_const, "--A")?;
            analyses::counterexample(delta, a1.to_integer(), a_const, kmax, &prec)
        }
        Cmd::Primes { sub } => match sub {
            PrimesCmd::Diag { nmin, nmax, epsilon } => {
                let eps = parse_rat_flag(&epsilon, "--epsilon")?;
                analyses::primes_diag(nmin, nmax, eps, &prec)
            }
        },
        Cmd::Roth { sub } => match sub {
            RothCmd::Exponent { spec, kmax } => {
                let loaded =
                    spec::load_spec(&spec).map_err(|e| CliError::input(e.to_string()))?;
                analyses::roth_exponent(loaded, kmax, &prec)
            }
        },
    }
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            report.runtime_ms = start.elapsed().as_millis();
            print!("{}", report.render());
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit_code);
        }
    }
}
