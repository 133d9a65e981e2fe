mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] civec::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Usage(_) => "UsageError",
            CliError::Output(_) => "OutputError",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "civec", version, about = "Variational quantum chemistry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML config with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report wall time on stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnsatzKind {
    Uccsd,
    Kupccgsd,
    Puccd,
    Custom,
}

#[derive(Debug, Args)]
pub struct MoleculeArgs {
    #[arg(long)]
    fcidump: PathBuf,
    /// Active space as `n_elec,n_orb`.
    #[arg(long, value_parser = parse_pair)]
    active_space: Option<(usize, usize)>,
}

#[derive(Debug, Args)]
pub struct AnsatzArgs {
    #[arg(long, value_enum, default_value = "uccsd")]
    ansatz: AnsatzKind,
    /// Excitation list for `--ansatz custom`.
    #[arg(long)]
    ansatz_file: Option<PathBuf>,
    /// Layers of k-UpCCGSD.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pgtol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// UCC ground state from an FCIDUMP file.
    Vqe {
        #[command(flatten)]
        mol: MoleculeArgs,
        #[command(flatten)]
        ansatz: AnsatzArgs,
        /// Skip the exact reference.
        #[arg(long)]
        no_fci: bool,
    },
    /// Adaptive ansatz growth from the UCCSD pool.
    Adapt {
        #[command(flatten)]
        mol: MoleculeArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
    },
    /// Exact diagonalization in the determinant space.
    Fci {
        #[command(flatten)]
        mol: MoleculeArgs,
    },
    /// Hardware-efficient ansatz under CNOT depolarizing noise.
    Noisy {
        #[command(flatten)]
        mol: MoleculeArgs,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        /// Depolarizing probability after every CNOT.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Shots per Pauli term; exact expectations when absent.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Variational quantum dynamics with the McLachlan principle.
    Dynamics(DynamicsArgs),
    /// UCC on a one-dimensional Hubbard chain at half filling.
    Hubbard {
        #[command(flatten)]
        hub: HubbardArgs,
        #[command(flatten)]
        ansatz: AnsatzArgs,
    },
    /// Rewrites integrals as operators or another FCIDUMP.
    Convert {
        #[command(flatten)]
        mol: MoleculeArgs,
        #[arg(long, value_enum, default_value = "jw")]
        to: ConvertTarget,
    },
    /// One result row per point along a parameter axis.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct HubbardArgs {
    #[arg(long, default_value_t = 4)]
    sites: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 4.0)]
    u: f64,
    #[arg(long)]
    periodic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Fermion,
    Jw,
    Parity,
    ParityReduced,
    Fcidump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    SpinBoson,
    Marcus,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorKind {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingKind {
    Unary,
    Binary,
    Gray,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long, value_enum, default_value = "spin-boson")]
    model: ModelKind,
    #[arg(long, default_value_t = 8)]
    nbas: usize,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 10.0)]
    t_final: f64,
    #[arg(long, default_value_t = 0.02)]
    tau: f64,
    #[arg(long, value_enum, default_value = "rk4")]
    integrator: IntegratorKind,
    #[arg(long, value_enum, default_value = "gray")]
    encoding: EncodingKind,
    /// Spin-boson bias.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Spin-boson tunnelling.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Mode frequency; defaults to 1 (spin-boson) or 0.5 (Marcus).
    #[arg(long)]
    omega: Option<f64>,
    /// Coupling; defaults to 0.5 (spin-boson) or 1 (Marcus).
    #[arg(long)]
    g: Option<f64>,
    /// Marcus transfer integral.
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
    v: f64,
    /// Marcus driving force.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    dg: f64,
    /// Custom model term, `coeff symbol@dof ...`; repeatable.
    #[arg(long = "terms", allow_hyphen_values = true)]
    terms: Vec<String>,
    /// Custom basis entry, `dof half_spin` or `dof sho omega nbas`; repeatable.
    #[arg(long = "basis")]
    basis: Vec<String>,
    /// Add the exact-propagation reference column.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Bond scan over several FCIDUMP files.
    Bond,
    /// Hubbard U/t.
    U,
    /// CNOT depolarizing probability.
    NoiseP,
    /// Shots per term.
    Shots,
    /// Marcus driving force.
    Dg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    axis: Axis,
    /// Axis values, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Vec<f64>,
    #[arg(long)]
    fcidump: Vec<PathBuf>,
    /// Ansatz layers; several give one column block each.
    #[arg(long, value_delimiter = ',')]
    layers: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    repeats: usize,
    #[arg(long, default_value_t = 4)]
    sites: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 8)]
    nbas: usize,
    #[arg(long, default_value_t = 0.05)]
    tau: f64,
    #[arg(long, default_value_t = 8.0)]
    t_final: f64,
    /// Rates from exact propagation instead of the variational ansatz.
    #[arg(long)]
    exact: bool,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n_elec,n_orb")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("CIVEC_NUM_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("CIVEC_NUM_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage("CIVEC_NUM_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let start = Instant::now();
    let c = &cli.common;
    let (report, default_format) = match cli.command {
        Command::Vqe { mol, ansatz, no_fci } => (commands::vqe(&mol, &ansatz, no_fci, c)?, Format::Text),
        Command::Adapt {
            mol,
            epsilon,
            max_steps,
        } => (commands::adapt(&mol, epsilon, max_steps)?, Format::Text),
        Command::Fci { mol } => (commands::fci(&mol)?, Format::Text),
        Command::Noisy { mol, layers, p, shots } => (commands::noisy(&mol, layers, p, shots, c.seed)?, Format::Text),
        Command::Dynamics(d) => (commands::dynamics(&d)?, Format::Csv),
        Command::Hubbard { hub, ansatz } => (commands::hubbard(&hub, &ansatz, c)?, Format::Json),
        Command::Convert { mol, to } => (commands::convert(&mol, to)?, Format::Text),
        Command::Sweep(s) => (commands::sweep(&s, c.seed)?, Format::Csv),
    };
    let text = report.render(c.format.unwrap_or(default_format))?;
    match &c.output {
        Some(path) => std::fs::write(path, text).map_err(civec::Error::from)?,
        None => print!("{text}"),
    }
    if c.timing {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 })
        }
    }
}
