//! Command-line front end for the ring-dynamics laboratory.
//!
//! Exit codes: 0 = success / all checks passed, 1 = violations or
//! disagreements found, 2 = usage or runtime error.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ringflux::lab::{
    self, AdjudicatedRule, Predictor, RenderFormat, SweepMode, SweepResult, VerifyReport,
};
use ringflux::{
    analysis, dynamics, statesmith, FluxRule, InvariantTarget, Quantity, Rat, RingState,
};

#[derive(Parser)]
#[command(
    name = "ringflux",
    version,
    about = "Exact laboratory for binary conservation-form ring dynamics",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the space-time diagram of one trajectory.
    Evolve {
        /// Rule name (rule1|ex1|ex2) or "table:q15,...,q0".
        #[arg(long)]
        rule: FluxRule,
        /// Initial state as a bitstring, site 0 first (e.g. 01110000).
        #[arg(long)]
        init: RingState,
        /// Number of updates; the initial state is row one of steps+1 rows.
        #[arg(long)]
        steps: u64,
        /// Output encoding.
        #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
        format: FormatArg,
    },
    /// Run one state to its cycle and print the asymptotic report.
    Analyze {
        /// Rule name (rule1|ex1|ex2) or "table:q15,...,q0".
        #[arg(long)]
        rule: FluxRule,
        /// Initial state as a bitstring, site 0 first.
        #[arg(long)]
        init: RingState,
        /// Cap on distinct states visited before giving up.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Measure a diagram slice and write it as CSV (plus a plot script).
    Sweep(SweepArgs),
    /// Exhaustively check the full advertised structure of rule1.
    Verify {
        /// Rule to verify (the structural claims are rule1's).
        #[arg(long, default_value = "rule1")]
        rule: FluxRule,
        /// Smallest ring length to enumerate.
        #[arg(long)]
        lmin: u32,
        /// Largest ring length to enumerate.
        #[arg(long)]
        lmax: u32,
        /// Largest ring length this command will enumerate.
        #[arg(long, default_value_t = lab::DEFAULT_VERIFY_BOUND)]
        bound: u32,
        /// Write the findings file here (always written when checks fail).
        #[arg(long)]
        findings: Option<PathBuf>,
    },
    /// Compare a conjectured diagram against exhaustive measurement.
    Adjudicate {
        /// Which conjectured surface to adjudicate.
        #[arg(long, value_enum)]
        rule: AdjudicatedArg,
        /// Smallest ring length to enumerate.
        #[arg(long)]
        lmin: u32,
        /// Largest ring length to enumerate.
        #[arg(long)]
        lmax: u32,
        #[arg(long, default_value_t = lab::DEFAULT_ADJUDICATE_BOUND)]
        bound: u32,
        /// Write the findings file here (always written on disagreement).
        #[arg(long)]
        findings: Option<PathBuf>,
    },
    /// Certify single-step conservation of a quantity, exhaustively.
    Conserve {
        /// Rule name (rule1|ex1|ex2) or "table:q15,...,q0".
        #[arg(long)]
        rule: FluxRule,
        /// site-sum | odd-runs | one-star-zero | pattern:BITS (e.g. pattern:011).
        #[arg(long)]
        quantity: Quantity,
        /// Smallest ring length to enumerate.
        #[arg(long)]
        lmin: u32,
        /// Largest ring length to enumerate.
        #[arg(long)]
        lmax: u32,
        /// Largest ring length this command will enumerate.
        #[arg(long, default_value_t = analysis::DEFAULT_CERTIFY_BOUND)]
        bound: u32,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Rule name (rule1|ex1|ex2) or "table:q15,...,q0".
    #[arg(long)]
    rule: FluxRule,
    /// Ring length.
    #[arg(short = 'L', long = "length")]
    length: u32,
    /// How initial states are chosen.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Random mode: states drawn per occupation probability.
    #[arg(long, default_value_t = 100)]
    samples: u64,
    /// Stream seed for random and constructed modes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Predicted surface to record (rule1|ex1|ex2|none); default matches the rule.
    #[arg(long)]
    predictor: Option<Predictor>,
    /// CSV destination.
    #[arg(long)]
    out: PathBuf,
    /// Also write a plot script rendering the CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Random mode: comma-separated occupation probabilities (rationals);
    /// defaults to 1/20 .. 19/20.
    #[arg(
        long = "p-grid",
        value_delimiter = ',',
        default_values_t = default_p_grid(),
        hide_default_value = true
    )]
    p_grid: Vec<Rat>,
    /// Constructed mode: explicit targets like "L=60;ones=30;runs2=5"
    /// (repeatable); defaults to every feasible (ones, runs-of-2+) pair.
    #[arg(long = "target")]
    targets: Vec<InvariantTarget>,
    /// Constructed mode: states drawn per target.
    #[arg(long = "seeds-per-target", default_value_t = 1)]
    seeds_per_target: u64,
    /// Largest ring length exhaustive mode will enumerate.
    #[arg(long, default_value_t = statesmith::DEFAULT_EXHAUSTIVE_BOUND)]
    bound: u32,
    /// Cap on distinct states visited per trajectory.
    #[arg(long)]
    budget: Option<u64>,
}

fn default_p_grid() -> Vec<Rat> {
    (1..20).map(|n| Rat::new(n, 20)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Ascii,
    Pbm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
    Constructed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdjudicatedArg {
    Ex1,
    Ex2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Evolve {
            rule,
            init,
            steps,
            format,
        } => {
            let format = match format {
                FormatArg::Ascii => RenderFormat::Ascii,
                FormatArg::Pbm => RenderFormat::Pbm,
            };
            let art = lab::render_spacetime(&rule, &init, steps, format).map_err(stringify)?;
            emit(art);
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { rule, init, budget } => {
            let budget = budget.unwrap_or_else(|| dynamics::default_step_budget(init.len()));
            let report = analysis::analyze_with_budget(&rule, &init, budget).map_err(stringify)?;
            emitln(report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => sweep(args),
        Command::Verify {
            rule,
            lmin,
            lmax,
            bound,
            findings,
        } => {
            let report =
                lab::verify_rule1_with(&rule, lmin, lmax, bound).map_err(stringify)?;
            finish_report(report, findings, "verify-findings.txt")
        }
        Command::Adjudicate {
            rule,
            lmin,
            lmax,
            bound,
            findings,
        } => {
            let which = match rule {
                AdjudicatedArg::Ex1 => AdjudicatedRule::Ex1,
                AdjudicatedArg::Ex2 => AdjudicatedRule::Ex2,
            };
            let report =
                lab::adjudicate_with_bound(which, lmin, lmax, bound).map_err(stringify)?;
            let default_name = match which {
                AdjudicatedRule::Ex1 => "ex1-findings.txt",
                AdjudicatedRule::Ex2 => "ex2-findings.txt",
            };
            finish_report(report, findings, default_name)
        }
        Command::Conserve {
            rule,
            quantity,
            lmin,
            lmax,
            bound,
        } => {
            let report =
                analysis::certify_conserved_with_bound(&rule, &quantity, lmin, lmax, bound)
                    .map_err(stringify)?;
            emitln(&report);
            Ok(if report.conserved() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode, String> {
    let mode = match args.mode {
        ModeArg::Exhaustive => SweepMode::Exhaustive,
        ModeArg::Random => SweepMode::Random {
            p_grid: args.p_grid,
            samples_per_p: args.samples,
            seed: args.seed,
        },
        ModeArg::Constructed => {
            let targets = if args.targets.is_empty() {
                feasible_grid(args.length)
            } else {
                args.targets
            };
            SweepMode::Constructed {
                targets,
                seeds_per_target: args.seeds_per_target,
                seed: args.seed,
            }
        }
    };
    let predictor = args
        .predictor
        .unwrap_or_else(|| Predictor::for_rule(&args.rule));
    let budget = args
        .budget
        .unwrap_or_else(|| dynamics::default_step_budget(args.length));
    let result: SweepResult =
        lab::sweep_with(&args.rule, args.length, &mode, predictor, args.bound, budget)
            .map_err(stringify)?;
    for note in &result.notes {
        eprintln!("note: {note}");
    }
    lab::emit_csv(&result, &args.out).map_err(stringify)?;
    emitln(format_args!(
        "wrote {} point(s) to {}",
        result.points.len(),
        args.out.display()
    ));
    if let Some(plot) = args.plot {
        lab::emit_plot_script(&args.out, &plot).map_err(stringify)?;
        emitln(format_args!("wrote plot script to {}", plot.display()));
    }
    Ok(ExitCode::SUCCESS)
}

/// Every feasible (ones, runs-of-2-or-more) pair at this length.
fn feasible_grid(length: u32) -> Vec<InvariantTarget> {
    let mut targets = Vec::new();
    for ones in 0..=length {
        for runs2 in 0..=length / 2 {
            let t = InvariantTarget::new(length, ones, runs2);
            if t.feasible() {
                targets.push(t);
            }
        }
    }
    targets
}

/// Print a verification/adjudication report, write findings when asked or
/// when something failed, and turn the verdict into an exit code.
fn finish_report(
    report: VerifyReport,
    findings: Option<PathBuf>,
    default_name: &str,
) -> Result<ExitCode, String> {
    emitln(&report);
    let pass = report.pass();
    let destination = match findings {
        Some(path) => Some(path),
        None if !pass => Some(PathBuf::from(default_name)),
        None => None,
    };
    if let Some(path) = destination {
        lab::write_findings(&report, &path).map_err(stringify)?;
        eprintln!("findings written to {}", path.display());
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn stringify(e: ringflux::Error) -> String {
    e.to_string()
}

/// Write to stdout, leaving quietly if the reader has gone away
/// (e.g. `ringflux evolve ... | head`).
fn emit(text: impl Display) {
    let mut out = io::stdout().lock();
    let unwritable = write!(out, "{text}").and_then(|()| out.flush()).err();
    if let Some(e) = unwritable {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

/// [`emit`] with a trailing newline.
fn emitln(text: impl Display) {
    emit(format_args!("{text}\n"));
}
