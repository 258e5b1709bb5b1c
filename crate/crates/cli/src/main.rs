use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use weylvm::measure::{
    lp_nu_norm, p_semivariation, semivariation, Field, NormedSpaceSpec, OptimizerConfig, PhaseSet, VectorMeasure,
};
use weylvm::random::Fixtures;
use weylvm::twisted::{bench_conv, twisted_convolve, ConvPath, DEFAULT_BENCH_CEILING};
use weylvm::verify::{self, SuiteSelection, Tolerances, VerifyConfig};
use weylvm::weyl::{weyl_transform, weyl_transform_fft};
use weylvm::{Exponent, FiniteAbelianGroup, PhaseFunction};

/// Weyl transforms, twisted convolution and vector measures on finite abelian groups.
#[derive(Parser)]
#[command(name = "weylvm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded JSON fixture.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Weyl transform of a phase function, as a row-major matrix of [re, im] pairs.
    Weyl {
        #[arg(long)]
        function: PathBuf,
        /// Use the FFT-based transform.
        #[arg(long)]
        fft: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twisted convolution f × g.
    Tconv {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value = "direct")]
        path: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms of a vector measure, as a JSON bracket.
    Vmeas {
        #[command(subcommand)]
        what: VmeasKind,
    },
    /// Run verification suites: core, vmeasure, vweyl, vtwisted or all.
    Verify(VerifyArgs),
    /// Time the three convolution paths and print CSV.
    Bench {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_BENCH_CEILING)]
        ceiling: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// Group JSON file, e.g. {"orders":[4,2]}.
    #[arg(long, conflicts_with = "orders")]
    group: Option<PathBuf>,
    /// Cyclic factor orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
}

impl GroupArgs {
    fn resolve(&self) -> Result<FiniteAbelianGroup, CliError> {
        match (&self.group, &self.orders) {
            (Some(path), _) => read_json(path),
            (None, Some(orders)) => Ok(FiniteAbelianGroup::new(orders.clone())?),
            (None, None) => Err(CliError::Usage("one of --group or --orders is required".into())),
        }
    }
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value = "real")]
    field: String,
    #[arg(long, default_value = "2")]
    lq: String,
}

impl SpaceArgs {
    fn resolve(&self) -> Result<NormedSpaceSpec, CliError> {
        let field: Field = self.field.parse()?;
        Ok(NormedSpaceSpec::new(self.dim, field, self.lq.parse()?)?)
    }
}

#[derive(Subcommand)]
enum GenKind {
    /// Group descriptor from its cyclic factors.
    Group {
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random phase function.
    Function {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random vector measure, one atom per phase point.
    Measure {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VmeasKind {
    /// Semivariation ‖ν‖(A); A is the whole phase space unless --set is given.
    Sv {
        #[arg(long)]
        measure: PathBuf,
        /// Phase-point indices of A, comma separated.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// p-semivariation ‖ν‖_{p,m}.
    Psv {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// L^p(ν) norm of a phase function.
    Norm {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        p: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial count for every check, overriding the tolerance file.
    #[arg(long)]
    trials: Option<usize>,
    /// Group orders, comma separated; repeat for several groups.
    #[arg(long, value_delimiter = ',', num_args = 1, action = clap::ArgAction::Append)]
    orders: Vec<String>,
    /// Group JSON files; repeatable.
    #[arg(long)]
    group: Vec<PathBuf>,
    /// Largest vector dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    lq: Option<String>,
    /// Alternative tolerance file.
    #[arg(long)]
    tolerances: Option<PathBuf>,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug)]
enum CliError {
    /// Bad arguments, unreadable input or invalid configuration.
    Usage(String),
    /// Verification ran and at least one check failed.
    Failed,
}

impl From<weylvm::Error> for CliError {
    fn from(e: weylvm::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn parse_exponent(s: &str) -> Result<Exponent, CliError> {
    Ok(s.parse::<Exponent>()?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { kind } => gen(kind),
        Command::Weyl { function, fft, out } => {
            let f: PhaseFunction = read_json(&function)?;
            let op = if fft { weyl_transform_fft(&f) } else { weyl_transform(&f) };
            emit(&to_json(&op.to_json()), out.as_deref())
        }
        Command::Tconv { f, g, path, out } => {
            let path: ConvPath = path.parse()?;
            let (f, g): (PhaseFunction, PhaseFunction) = (read_json(&f)?, read_json(&g)?);
            emit(&to_json(&twisted_convolve(&f, &g, path)?), out.as_deref())
        }
        Command::Vmeas { what } => vmeas(what),
        Command::Verify(args) => verify_cmd(args),
        Command::Bench { group, trials, ceiling, format, out } => {
            let report = bench_conv(&group.resolve()?, trials, ceiling)?;
            let text = match format {
                Format::Json => to_json(&report),
                Format::Csv | Format::Table => report.to_csv(),
            };
            emit(&text, out.as_deref())
        }
    }
}

fn gen(kind: GenKind) -> Result<(), CliError> {
    match kind {
        GenKind::Group { orders, out } => {
            let g = FiniteAbelianGroup::new(orders)?;
            emit(&format!("{}\n", serde_json::to_string(&g).expect("group serializes")), out.as_deref())
        }
        GenKind::Function { group, seed, out } => {
            let g = group.resolve()?;
            let f = Fixtures::stream(seed, "gen/function").phase_function(&g);
            emit(&to_json(&f), out.as_deref())
        }
        GenKind::Measure { group, space, seed, out } => {
            let g = group.resolve()?;
            let space = space.resolve()?;
            let nu = Fixtures::stream(seed, "gen/measure").measure(&g, &space);
            emit(&to_json(&nu), out.as_deref())
        }
    }
}

fn vmeas(what: VmeasKind) -> Result<(), CliError> {
    let cfg = OptimizerConfig::default();
    let bracket = match what {
        VmeasKind::Sv { measure, set } => {
            let nu: VectorMeasure = read_json(&measure)?;
            let set = match set {
                Some(idx) => PhaseSet::from_indices(nu.group(), idx)?,
                None => PhaseSet::all(nu.group()),
            };
            semivariation(&nu, &set, &cfg)?
        }
        VmeasKind::Psv { measure, p } => {
            let nu: VectorMeasure = read_json(&measure)?;
            p_semivariation(&nu, parse_exponent(&p)?.value(), &cfg)?
        }
        VmeasKind::Norm { measure, function, p } => {
            let nu: VectorMeasure = read_json(&measure)?;
            let f: PhaseFunction = read_json(&function)?;
            lp_nu_norm(&f, &nu, parse_exponent(&p)?.value(), &cfg)?
        }
    };
    emit(&to_json(&bracket), None)
}

fn verify_cmd(args: VerifyArgs) -> Result<(), CliError> {
    let selection: SuiteSelection = args.suite.parse()?;
    let tolerances = match &args.tolerances {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Tolerances::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => Tolerances::defaults(),
    };
    let mut groups = Vec::new();
    for spec in &args.orders {
        let orders = spec
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("--orders {spec:?}: {e}")))?;
        groups.push(FiniteAbelianGroup::new(orders)?);
    }
    for path in &args.group {
        groups.push(read_json(path)?);
    }
    if groups.is_empty() {
        groups = VerifyConfig::default_groups();
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        groups,
        trials: args.trials,
        max_dim: args.dim,
        field: args.field.as_deref().map(str::parse).transpose()?,
        lq: args.lq.as_deref().map(parse_exponent).transpose()?,
        tolerances,
    };
    let report = verify::run(selection, &cfg)?;
    if let Some(path) = &args.out {
        emit(&report.to_json(), Some(path))?;
    }
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
    };
    emit(&text, None)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
