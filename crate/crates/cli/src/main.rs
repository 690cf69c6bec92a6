use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perron::lacunary::LacunaryCertificate;
use perron::{SearchStrategy, Variant};
use perron_cli::report::report_schema;
use perron_cli::{run, write_outputs, CliError, CommandId, GeneratorConfig, Outputs, RunConfig};

/// Direction sets, Perron factors, witness searches and Kakeya blow experiments.
#[derive(Parser, Debug)]
#[command(name = "perron", version, about)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write the check table as CSV here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Write the generated sample as CSV here (`gen`).
    #[arg(long, global = true)]
    sample: Option<PathBuf>,
    /// Write the command's SVG figure here.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Write the command's PGM raster here (`blow`, `maxop`).
    #[arg(long, global = true)]
    pgm: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a direction sample.
    Gen(Params),
    /// Perron factor of a sample's inverse set or of explicit values.
    Factor(Params),
    /// Upper bound (and exact value when small) of the Perron capacity.
    Capacity(Params),
    /// Witness searches.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Statistical and property verifications.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Union areas and blow ratios of Perron trees.
    Blow(Params),
    /// Sampled maximal operator on a Perron tree.
    Maxop(Params),
    /// Verify a lacunary-order certificate.
    CertifyLacunary(Params),
    /// Print the JSON Schema of the report.
    Schema,
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    T1(Params),
    T2(Params),
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Prob(Params),
    P5(Params),
    Spacing(Params),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    CapacityForm,
    OrderedForm,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Greedy,
    SwapLocalSearch,
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Generator id: lin, lac, sin-lin, sin-lac, rand-lin, rand-lac.
    #[arg(long = "set")]
    set: Option<String>,
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Order N.
    #[arg(long = "n")]
    order: Option<u32>,
    #[arg(long)]
    a_max: Option<u64>,
    #[arg(long)]
    d_max: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Block range `LO HI` for the order-1 filling frequency (`witness t2`).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    d_range: Option<Vec<u64>>,
    /// Block index for `verify prob`; repeat for a d-independence check.
    #[arg(long = "d")]
    d_values: Vec<u64>,
    /// Pixels per unit.
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Also enumerate exactly (`capacity`).
    #[arg(long)]
    exact: bool,
    /// Tree depth J (2^J directions) for figures and `maxop`.
    #[arg(long)]
    j: Option<u32>,
    /// Largest J for `blow`.
    #[arg(long)]
    j_max: Option<u32>,
    /// Angular spread of the tree directions, in radians.
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    fraction: Option<f64>,
    /// Explicit comma-separated values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
    /// Certificate JSON file (`certify-lacunary`).
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Order at which to verify the certificate.
    #[arg(long)]
    lacunary_order: Option<u32>,
}

impl Params {
    fn into_config(self, command: CommandId) -> Result<RunConfig, CliError> {
        let generator = (self.set.is_some() || self.count.is_some())
            .then_some(GeneratorConfig { gen: self.set, count: self.count, seed: None });
        let certificate = match &self.certificate {
            Some(path) => {
                let text = read(path)?;
                Some(LacunaryCertificate::from_json(&text).map_err(|e| CliError::Config(format!("certificate: {e}")))?)
            }
            None => None,
        };
        let d_range = match self.d_range.as_deref() {
            Some(&[lo, hi]) => Some([lo, hi]),
            _ => None,
        };
        Ok(RunConfig {
            command: Some(command),
            generator,
            seed: self.seed,
            order: self.order,
            a_max: self.a_max,
            d_max: self.d_max,
            trials: self.trials,
            d_range,
            d_values: (!self.d_values.is_empty()).then_some(self.d_values),
            resolution: self.resolution,
            variant: self.variant.map(|v| match v {
                VariantArg::CapacityForm => Variant::CapacityForm,
                VariantArg::OrderedForm => Variant::OrderedForm,
            }),
            strategy: self.strategy.map(|s| match s {
                StrategyArg::Greedy => SearchStrategy::Greedy,
                StrategyArg::SwapLocalSearch => SearchStrategy::SwapLocalSearch,
            }),
            iterations: self.iterations,
            exact: self.exact.then_some(true),
            j: self.j,
            j_max: self.j_max,
            spread: self.spread,
            level: self.level,
            fraction: self.fraction,
            values: (!self.values.is_empty()).then_some(self.values),
            certificate,
            lacunary_order: self.lacunary_order,
            outputs: None,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn flags_config(cmd: Option<Cmd>) -> Result<RunConfig, CliError> {
    let Some(cmd) = cmd else {
        return Ok(RunConfig::default());
    };
    let (id, params) = match cmd {
        Cmd::Gen(p) => (CommandId::Gen, p),
        Cmd::Factor(p) => (CommandId::Factor, p),
        Cmd::Capacity(p) => (CommandId::Capacity, p),
        Cmd::Witness(WitnessCmd::T1(p)) => (CommandId::WitnessT1, p),
        Cmd::Witness(WitnessCmd::T2(p)) => (CommandId::WitnessT2, p),
        Cmd::Verify(VerifyCmd::Prob(p)) => (CommandId::VerifyProb, p),
        Cmd::Verify(VerifyCmd::P5(p)) => (CommandId::VerifyP5, p),
        Cmd::Verify(VerifyCmd::Spacing(p)) => (CommandId::VerifySpacing, p),
        Cmd::Blow(p) => (CommandId::Blow, p),
        Cmd::Maxop(p) => (CommandId::Maxop, p),
        Cmd::CertifyLacunary(p) => (CommandId::CertifyLacunary, p),
        Cmd::Schema => unreachable!("handled before"),
    };
    params.into_config(id)
}

fn main_inner(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::from_json(&read(path)?)?,
        None => RunConfig::default(),
    };
    let mut flags = flags_config(cli.command)?;
    let outputs = Outputs { report: cli.report, csv: cli.csv, sample: cli.sample, svg: cli.svg, pgm: cli.pgm };
    flags.outputs = Some(outputs);
    let result = run(file.overlay(flags), cli.workers)?;
    write_outputs(&result)?;
    if cli.json {
        print!("{}", result.report.to_json());
    } else {
        for line in &result.headline {
            println!("{line}");
        }
        for line in result.report.summary_lines() {
            println!("{line}");
        }
        println!("checksum {}", result.report.checksum);
    }
    Ok(result.report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.command, Some(Cmd::Schema)) {
        print!("{}", report_schema());
        return ExitCode::SUCCESS;
    }
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("perron: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
