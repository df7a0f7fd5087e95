//! The `dsm` command-line tool. Results go to standard output as one JSON
//! document (or CSV), diagnostics to standard error.

mod commands;
pub mod config;
pub mod envelope;
mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;
use envelope::{all_finite, Envelope, Failure, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "dsm", version, about = "Massieu functions, dual coordinates and divergences of data set models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Discrete,
    Qubit,
    Coherent,
    Regression,
    Sphere,
}

impl ModelName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::Discrete => "discrete",
            ModelName::Qubit => "qubit",
            ModelName::Coherent => "coherent",
            ModelName::Regression => "regression",
            ModelName::Sphere => "sphere",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Object,
    Csv,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// TOML file with one table per model.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fock truncation of the coherent model.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, value_enum, default_value = "object")]
    pub format: Format,
}

/// Data set given on the command line.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Probability vector (discrete), Bloch vector (qubit) or point (sphere).
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    pub x: Option<Vector>,
    /// Coherent-state amplitude "re,im".
    #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
    pub z: Option<Vector>,
    /// JSON file holding a Fock vector `{"nmax": N, "amplitudes": [re, im, ...]}`.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

impl DataArgs {
    fn is_given(&self) -> bool {
        self.x.is_some() || self.z.is_some() || self.state.is_some()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Φ(θ), U(θ), S(U) and the canonical residual.
    Massieu {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        theta: Vector,
        /// Canonical-identity tolerance; defaults by evaluation path.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// θ reproducing the target energies.
    Maxent {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        u: Vector,
    },
    /// Divergence of a data set from m_θ, or of m_θ from m_ζ.
    Divergence {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        theta: Vector,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        zeta: Option<Vector>,
    },
    /// Pythagorean relation for a data set or for three model points.
    Pythagoras {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Defaults to the parameters of μ(x) when a data set is given.
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        theta: Option<Vector>,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        zeta: Vector,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        xi: Option<Vector>,
        /// Builds ξ = ζ + step·w with w orthogonalized against U(θ) − U(ζ).
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        direction: Option<Vector>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        step: f64,
    },
    /// Quantities on a θ grid, one row per point in lexicographic order.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Axes "theta1=start:stop:step;theta2=value;…".
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Comma list of massieu, u, unorm, entropy, residual, metric, mineig.
        #[arg(long, default_value = "")]
        quantities: String,
        /// Values of the axes absent from the grid.
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        theta: Option<Vector>,
    },
    /// Answers and entropy of a data set.
    Answers {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Two-column CSV of regression pairs.
        #[arg(long)]
        data_file: Option<PathBuf>,
        /// Tolerance for the perfect-data test.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Runs the property suites; "all" or one of discrete, discrete3,
    /// qubit, coherent, regression, sphere.
    Verify {
        target: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 20240901)]
        seed: u64,
    },
}

/// Comma-separated numbers; an alias so clap parses one value per flag.
pub type Vector = Vec<f64>;

fn parse_vec(s: &str) -> Result<Vector, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

/// What a command produced.
pub enum Report {
    Document(Envelope, Format),
    Csv(String),
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, Failure> {
    match path {
        Some(p) => Config::load(p).map_err(|e| Failure::Usage(e.to_string())),
        None => Ok(Config::default()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Massieu { .. } => "massieu",
        Command::Maxent { .. } => "maxent",
        Command::Divergence { .. } => "divergence",
        Command::Pythagoras { .. } => "pythagoras",
        Command::Sweep { .. } => "sweep",
        Command::Answers { .. } => "answers",
        Command::Verify { .. } => "verify",
    }
}

fn render_csv(e: &Envelope) -> String {
    let cols = e.flat_outputs();
    let header: Vec<&str> = cols.iter().map(|(k, _)| k.as_str()).collect();
    let values: Vec<String> = cols
        .iter()
        .map(|(_, v)| match v.as_f64() {
            Some(x) => format!("{x:.12e}"),
            None => v.to_string(),
        })
        .collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let name = command_name(&cli.command);
    let result = match cli.command {
        Command::Verify { target, config, nmax, seed } => {
            load_config(config.as_ref()).and_then(|cfg| verify::command(&target, &cfg, nmax, seed))
        }
        Command::Sweep { model, grid, quantities, theta } => {
            sweep::command(&model, &grid, &quantities, theta.as_deref())
        }
        other => commands::dispatch(other),
    };
    match result {
        Ok(Report::Csv(text)) => {
            let _ = write!(out, "{text}");
            EXIT_OK
        }
        Ok(Report::Document(env, format)) => {
            if !all_finite(&env.outputs) {
                let f = Failure::Numeric(crate::Error::EvaluationDomain { point: Vec::new() });
                return emit_failure(name, &f, "non-finite result", out, err);
            }
            let failed = env.status != "ok";
            let text = match format {
                Format::Object => env.to_json() + "\n",
                Format::Csv => render_csv(&env),
            };
            let _ = write!(out, "{text}");
            if failed {
                let _ = writeln!(err, "dsm {name}: {}", env.status);
                envelope::EXIT_VERIFY
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let msg = f.message();
            emit_failure(name, &f, &msg, out, err)
        }
    }
}

fn emit_failure(name: &str, f: &Failure, msg: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut env = Envelope::new(name);
    env.status = format!("error:{}", f.category());
    env.diagnostic("message", msg);
    if let Failure::Numeric(crate::Error::NonConvergence { iterations, gradient_norm, best_value, best_point }) = f {
        env.diagnostic("iterations", iterations)
            .diagnostic("gradient_norm", gradient_norm)
            .diagnostic("best_value", best_value)
            .diagnostic("best_point", best_point);
    }
    let _ = writeln!(out, "{}", env.to_json());
    let _ = writeln!(err, "dsm {name}: {msg}");
    f.exit_code()
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
