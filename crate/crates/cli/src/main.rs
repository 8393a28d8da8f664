//! `mesd`: evaluate discrimination bounds, run the brute-force oracles and the
//! ontic property batch, and export the (θ, p) advantage map.
//!
//! Exit codes: 0 ok, 2 invalid arguments, 3 I/O failure, 4 oracle outside tolerance.

mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mesd_core::advantage::{scan, write_csv, write_json, MapConfig};
use mesd_core::analytic::{
    advantage_three, helstrom_two, nc_two_bound, quantum_three_with_branch, threshold_prior,
    MirrorEnsemble, TwoStateScenario, ADVANTAGE_THRESHOLD,
};
use mesd_core::ontic::run_property_batch;
use mesd_core::oracle::{
    optimize_two, ThreeStateSearch, DEFAULT_GRID_THREE, DEFAULT_GRID_TWO, DEFAULT_REFINE_THREE,
    DEFAULT_REFINE_TWO, DEFAULT_RESTARTS,
};
use mesd_core::qcore::PureState;

use record::Record;

const THREADS_VAR: &str = "MESD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mesd", version, about = "Minimum-error state discrimination: quantum vs noncontextual bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two states with priors (p, 1 − p) and confusability c.
    Two {
        #[arg(long)]
        prior: f64,
        #[arg(long)]
        overlap: f64,
        #[command(flatten)]
        output: RecordOutput,
    },
    /// Mirror-symmetric triple with priors (p, p, 1 − 2p).
    Three {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        prior: f64,
        #[command(flatten)]
        output: RecordOutput,
    },
    /// Advantage map over θ ∈ [0, π/2] and p ∈ [0, ½].
    Map {
        #[arg(long, default_value_t = 181)]
        theta_steps: usize,
        #[arg(long, default_value_t = 101)]
        prior_steps: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MapFormat::Csv)]
        format: MapFormat,
    },
    /// Compare the Helstrom formula with a brute-force measurement search.
    OracleTwo {
        /// Angle between the two states, radians.
        #[arg(long, conflicts_with = "sep_deg")]
        sep: Option<f64>,
        /// Angle between the two states, degrees.
        #[arg(long)]
        sep_deg: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        prior: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_TWO)]
        grid_n: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_TWO)]
        refine_iters: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        output: RecordOutput,
    },
    /// Compare the three-state closed form with a brute-force POVM search.
    OracleThree {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        prior: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_THREE)]
        grid_n: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_THREE)]
        refine_iters: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        output: RecordOutput,
    },
    /// Check the noncontextual-bound inequalities on random finite ontic models.
    OnticCheck {
        #[arg(long, default_value_t = 10_000)]
        num_models: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Print one line per model (always on for 10 models or fewer).
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        output: RecordOutput,
    },
}

#[derive(Debug, Args)]
struct ThetaArg {
    /// Mirror half-angle θ in radians.
    #[arg(long, conflicts_with = "theta_deg")]
    theta: Option<f64>,
    /// Mirror half-angle θ in degrees.
    #[arg(long)]
    theta_deg: Option<f64>,
}

impl ThetaArg {
    fn radians(&self, default_deg: Option<f64>) -> Result<f64, CliError> {
        match (self.theta, self.theta_deg.or(default_deg)) {
            (Some(rad), _) => Ok(rad),
            (None, Some(deg)) => Ok(deg.to_radians()),
            (None, None) => Err(CliError::Usage("one of --theta or --theta-deg is required".into())),
        }
    }
}

#[derive(Debug, Args)]
struct RecordOutput {
    #[arg(long, value_enum, default_value_t = RecordFormat::Text)]
    format: RecordFormat,
    /// Write the record to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RecordFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapFormat {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Tolerance(String),
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Tolerance(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<mesd_core::Error> for CliError {
    fn from(e: mesd_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    if !(lo..=hi).contains(&value) {
        return Err(CliError::Usage(format!("--{name} must lie in [{lo}, {hi}], got {value}")));
    }
    Ok(())
}

fn thread_override() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{THREADS_VAR}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn emit(record: &Record, output: &RecordOutput) -> Result<(), CliError> {
    let text = match output.format {
        RecordFormat::Text => record.to_text(),
        RecordFormat::Csv => record.to_csv(),
        RecordFormat::Json => record.to_json(),
    };
    let mut out = open_output(output.out.as_ref())?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = thread_override()? {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Two { prior, overlap, output } => {
            check_range("prior", prior, 0.0, 1.0)?;
            check_range("overlap", overlap, 0.0, 1.0)?;
            let s = TwoStateScenario::new(prior, overlap)?;
            let (q, nc) = (helstrom_two(&s), nc_two_bound(&s));
            let mut r = Record::new();
            r.num("prior", prior)
                .num("overlap", overlap)
                .num("helstrom", q)
                .num("nc_bound", nc)
                .num("gap", q - nc)
                .bool("advantage", q - nc > ADVANTAGE_THRESHOLD);
            emit(&r, &output)
        }
        Command::Three { theta, prior, output } => {
            let theta = theta.radians(None)?;
            check_range("theta", theta, 0.0, std::f64::consts::FRAC_PI_2)?;
            check_range("prior", prior, 0.0, 0.5)?;
            let e = MirrorEnsemble::new(theta, prior)?;
            let (_, branch) = quantum_three_with_branch(&e)?;
            let pair = advantage_three(&e)?;
            let mut r = Record::new();
            r.num("theta", theta)
                .num("prior", prior)
                .num("threshold_prior", threshold_prior(theta)?)
                .text("branch", branch.as_str())
                .num("s_quantum", pair.quantum)
                .num("s_nc_bound", pair.noncontextual)
                .num("gap", pair.gap)
                .bool("advantage", pair.has_advantage());
            emit(&r, &output)
        }
        Command::Map {
            theta_steps,
            prior_steps,
            out,
            format,
        } => {
            if theta_steps < 2 {
                return Err(CliError::Usage(format!("--theta-steps must be at least 2, got {theta_steps}")));
            }
            if prior_steps < 2 {
                return Err(CliError::Usage(format!("--prior-steps must be at least 2, got {prior_steps}")));
            }
            let config = MapConfig::new(theta_steps, prior_steps)?;
            let cells = scan(&config, thread_override()?)?;
            let mut sink = open_output(out.as_ref())?;
            match format {
                MapFormat::Csv => write_csv(&cells, &mut sink),
                MapFormat::Json => write_json(&config, &cells, &mut sink),
            }
            .map_err(|e| CliError::Io(e.to_string()))
        }
        Command::OracleTwo {
            sep,
            sep_deg,
            prior,
            grid_n,
            refine_iters,
            tol,
            output,
        } => {
            let separation = match (sep, sep_deg) {
                (Some(r), _) => r,
                (None, Some(d)) => d.to_radians(),
                (None, None) => return Err(CliError::Usage("one of --sep or --sep-deg is required".into())),
            };
            if !separation.is_finite() {
                return Err(CliError::Usage(format!("--sep must be finite, got {separation}")));
            }
            check_range("prior", prior, 0.0, 1.0)?;
            check_tol(tol)?;
            let s1 = PureState::zero();
            let s2 = PureState::new(separation)?;
            let c = mesd_core::qcore::confusability(&s1, &s2);
            let analytic = helstrom_two(&TwoStateScenario::new(prior, c)?);
            let found = optimize_two(&s1, &s2, prior, grid_n, refine_iters)?;
            oracle_report(analytic, found.success, found.evaluations, tol, &output)
        }
        Command::OracleThree {
            theta,
            prior,
            grid_n,
            refine_iters,
            restarts,
            seed,
            tol,
            output,
        } => {
            let theta = theta.radians(Some(60.0))?;
            check_range("theta", theta, 0.0, std::f64::consts::FRAC_PI_2)?;
            check_range("prior", prior, 0.0, 0.5)?;
            check_tol(tol)?;
            let e = MirrorEnsemble::new(theta, prior)?;
            let analytic = quantum_three_with_branch(&e)?.0;
            let search = ThreeStateSearch {
                grid_n,
                refine_iters,
                restarts,
                seed,
            };
            let found = search.run(&e)?;
            oracle_report(analytic, found.success, found.evaluations, tol, &output)
        }
        Command::OnticCheck {
            num_models,
            seed,
            verbose,
            output,
        } => {
            if num_models < 1 {
                return Err(CliError::Usage("--num-models must be at least 1".into()));
            }
            let (summary, cases) = run_property_batch(num_models, seed)?;
            if verbose || num_models <= 10 {
                for c in &cases {
                    eprintln!(
                        "model {}: |Λ|={} two-state S={:.9} bound={:.9} {} | three-state S={:.9} bound={:.9} {} identity residual={:.3e}",
                        c.index,
                        c.num_lambdas,
                        c.two_state.success,
                        c.two_state.bound,
                        pass_word(c.two_state.pass),
                        c.three_state.success,
                        c.three_state.bound,
                        pass_word(c.three_state.pass),
                        c.three_state.identity_residual,
                    );
                }
            }
            let mut r = Record::new();
            r.int("models", summary.models as u64)
                .int("seed", seed)
                .int("two_state_pass", summary.two_state_pass as u64)
                .int("three_state_pass", summary.three_state_pass as u64)
                .int("identity_pass", summary.identity_pass as u64)
                .int("posterior_pass", summary.posterior_pass as u64)
                .int("failures", summary.failures() as u64);
            emit(&r, &output)?;
            if summary.all_pass() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{} check(s) failed", summary.failures())))
            }
        }
    }
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be a non-negative number, got {tol}")));
    }
    Ok(())
}

fn oracle_report(analytic: f64, oracle: f64, evaluations: u64, tol: f64, output: &RecordOutput) -> Result<(), CliError> {
    let difference = (oracle - analytic).abs();
    let mut r = Record::new();
    r.num("analytic", analytic)
        .num("oracle", oracle)
        .num("difference", difference)
        .int("evaluations", evaluations)
        .num("tol", tol)
        .bool("within_tol", difference <= tol);
    emit(&r, output)?;
    if difference <= tol {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "oracle differs from closed form by {difference:e}, above --tol {tol:e}"
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
