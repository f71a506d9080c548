//! Command-line harness: replay algorithms over instances, audit matchings,
//! aggregate randomized replays, and reproduce the guarantee summary table.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use classfair::adversary::{adversary_names, all_fixtures, fixture, GeneratorBounds};
use classfair::frac::format_ratio;
use classfair::harness::{
    audit_matching, audit_report_to_csv, monte_carlo_to_csv, render_table, reproduce_table,
    run_monte_carlo, sweep, table_to_csv, AlgorithmId, AlgorithmSpec, AuditKind, HarnessError,
    InstanceSource, OutputFormat, RunConfig, SelectorId, SingleRun, TableRow, TiePolicy,
    WrapPolicy,
};
use classfair::jsonio;

#[derive(Parser)]
#[command(
    name = "classfair",
    version,
    about = "Online class-fair bipartite matching: algorithms, audits, experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay an algorithm over instances and emit audit reports.
    Run(RunArgs),
    /// Aggregate repeated replays of a randomized algorithm on one instance.
    Montecarlo(McArgs),
    /// List or export built-in fixtures and adaptive adversaries.
    Fixture(FixtureArgs),
    /// Reproduce the six-row guarantee summary; exits 1 if any row fails.
    Table1(TableArgs),
    /// Audit a matching JSON file against an instance JSON file.
    Audit(AuditArgs),
}

#[derive(Args)]
struct AlgoFlags {
    /// Algorithm to drive (required unless --config is given).
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmId>,
    /// Rounding selector for the correlated-selection algorithm.
    #[arg(long, value_enum, default_value = "independent")]
    selector: SelectorId,
    /// Tie-breaking among equally eligible agents.
    #[arg(long, value_enum, default_value = "lexicographic")]
    ties: TiePolicy,
    /// Optional non-wasteful wrapper around the algorithm.
    #[arg(long, value_enum, default_value = "none")]
    wrap: WrapPolicy,
}

impl AlgoFlags {
    fn to_spec(&self) -> Result<AlgorithmSpec, HarnessError> {
        let id = self.algorithm.ok_or_else(|| {
            HarnessError::BadConfig("--algorithm is required without --config".into())
        })?;
        Ok(AlgorithmSpec { id, selector: self.selector, ties: self.ties, wrap: self.wrap })
    }
}

#[derive(Args)]
#[group(id = "source", multiple = false)]
struct SourceFlags {
    /// Instance JSON file.
    #[arg(long, group = "source")]
    instance: Option<PathBuf>,
    /// Built-in fixture name (see `fixture list`).
    #[arg(long, group = "source")]
    fixture: Option<String>,
    /// Adaptive adversary name (see `fixture list`).
    #[arg(long, group = "source")]
    adversary: Option<String>,
    /// Generate this many seeded random instances.
    #[arg(long, group = "source")]
    random_suite: Option<usize>,
    /// Seed for random-suite generation.
    #[arg(long, default_value_t = 0)]
    suite_seed: u64,
    /// Cap on the number of classes in generated instances.
    #[arg(long, default_value_t = 3)]
    max_classes: usize,
    /// Cap on the number of agents in generated instances.
    #[arg(long, default_value_t = 9)]
    max_agents: usize,
    /// Cap on the number of items in generated instances.
    #[arg(long, default_value_t = 9)]
    max_items: usize,
}

impl SourceFlags {
    fn to_source(&self) -> Result<InstanceSource, HarnessError> {
        if let Some(path) = &self.instance {
            return Ok(InstanceSource::File { path: path.clone() });
        }
        if let Some(name) = &self.fixture {
            return Ok(InstanceSource::Fixture { name: name.clone() });
        }
        if let Some(name) = &self.adversary {
            return Ok(InstanceSource::Adversary { name: name.clone() });
        }
        if let Some(count) = self.random_suite {
            return Ok(InstanceSource::RandomSuite {
                seed: self.suite_seed,
                count,
                bounds: GeneratorBounds {
                    max_classes: self.max_classes,
                    max_agents: self.max_agents,
                    max_items: self.max_items,
                },
            });
        }
        Err(HarnessError::BadConfig(
            "choose an instance source: --instance, --fixture, --adversary, or --random-suite"
                .into(),
        ))
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; replaces the other flags entirely.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    algo: AlgoFlags,
    #[command(flatten)]
    source: SourceFlags,
    /// Base seed for tie-breaking and randomized algorithms.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Audit to run (repeatable); none selects all applicable audits.
    #[arg(long = "audit", value_enum)]
    audits: Vec<AuditKind>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

impl RunArgs {
    fn to_config(&self) -> Result<RunConfig, HarnessError> {
        if let Some(path) = &self.config {
            return RunConfig::load(path);
        }
        let mut config = RunConfig::new(self.algo.to_spec()?, self.source.to_source()?);
        config.seed = self.seed;
        config.audits = self.audits.clone();
        config.output = self.output.clone();
        config.format = self.format;
        Ok(config)
    }
}

#[derive(Args)]
struct McArgs {
    /// JSON run configuration; replaces the other flags entirely.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    algo: AlgoFlags,
    #[command(flatten)]
    source: SourceFlags,
    /// Number of independent replays.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Base seed; trial t replays with seed XOR splitmix64(t).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

impl McArgs {
    fn to_config(&self) -> Result<RunConfig, HarnessError> {
        if let Some(path) = &self.config {
            return RunConfig::load(path);
        }
        let mut config = RunConfig::new(self.algo.to_spec()?, self.source.to_source()?);
        config.trials = self.trials;
        config.seed = self.seed;
        config.output = self.output.clone();
        config.format = self.format;
        Ok(config)
    }
}

#[derive(Args)]
struct FixtureArgs {
    #[command(subcommand)]
    cmd: FixtureCmd,
}

#[derive(Subcommand)]
enum FixtureCmd {
    /// Print the names of built-in fixtures and adaptive adversaries.
    List,
    /// Emit a fixture's instance (and designated matching) as JSON.
    Export {
        name: String,
        /// Write `<name>.instance.json` (and `<name>.matching.json`) here
        /// instead of printing to stdout.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TableArgs {
    /// Number of random instances behind the suite-min column.
    #[arg(long, default_value_t = 500)]
    suite_count: usize,
    /// Seed of the random suite.
    #[arg(long, default_value_t = classfair::adversary::ACCEPTANCE_SUITE_SEED)]
    suite_seed: u64,
    #[arg(long, default_value_t = 3)]
    max_classes: usize,
    #[arg(long, default_value_t = 9)]
    max_agents: usize,
    #[arg(long, default_value_t = 9)]
    max_items: usize,
    /// Also write the rows here, encoded per --format.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct AuditArgs {
    /// Matching JSON file.
    matching: PathBuf,
    /// Instance JSON file.
    instance: PathBuf,
    /// Audit to run (repeatable); none selects all applicable audits.
    #[arg(long = "audit", value_enum)]
    audits: Vec<AuditKind>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

/// Prints to stdout, treating a closed pipe as a successful early exit.
fn print_stdout(text: &str) -> Result<(), HarnessError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let written = out.write_all(text.as_bytes()).and_then(|()| out.write_all(b"\n"));
    match written {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.into()),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), HarnessError> {
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => print_stdout(text),
    }
}

fn value_of(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("emitted JSON is well-formed")
}

fn run_to_json(run: &SingleRun) -> serde_json::Value {
    serde_json::json!({
        "algorithm": run.algorithm,
        "source": run.source,
        "notes": run.notes,
        "instance": value_of(&jsonio::instance_to_json(&run.instance)),
        "matching": value_of(&jsonio::matching_to_json(&run.matching)),
        "report": run.report.to_json(),
    })
}

fn cmd_run(args: &RunArgs) -> Result<(), HarnessError> {
    let config = args.to_config()?;
    let runs = sweep(&config)?;
    let text = match config.format {
        OutputFormat::Json => {
            let values: Vec<serde_json::Value> = runs.iter().map(run_to_json).collect();
            serde_json::to_string_pretty(&values).expect("reports serialize")
        }
        OutputFormat::Csv => {
            if runs.len() != 1 {
                return Err(HarnessError::BadConfig(
                    "csv covers a single run; use json for multi-instance sweeps".into(),
                ));
            }
            audit_report_to_csv(&runs[0].report)?
        }
    };
    emit(&config.output, &text)
}

fn cmd_montecarlo(args: &McArgs) -> Result<(), HarnessError> {
    let config = args.to_config()?;
    if config.source.is_adaptive() {
        return Err(HarnessError::BadConfig(
            "monte-carlo aggregates over one fixed instance; adaptive adversaries reveal a \
             different instance per run"
                .into(),
        ));
    }
    let instances = config.source.instances()?;
    let inst = instances
        .first()
        .ok_or_else(|| HarnessError::BadConfig("source yields no instances".into()))?;
    let report = run_monte_carlo(&config.algorithm, inst, config.trials, config.seed)?;
    let text = match config.format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        OutputFormat::Csv => monte_carlo_to_csv(&report)?,
    };
    emit(&config.output, &text)
}

fn cmd_fixture(args: &FixtureArgs) -> Result<(), HarnessError> {
    match &args.cmd {
        FixtureCmd::List => {
            let mut text = String::from("fixtures:\n");
            for fx in all_fixtures() {
                let designated = if fx.designated.is_some() { " [designated matching]" } else { "" };
                text.push_str(&format!("  {:<24} {}{designated}\n", fx.name, fx.description));
            }
            text.push_str("adversaries:");
            for name in adversary_names() {
                text.push_str(&format!("\n  {name}"));
            }
            print_stdout(&text)
        }
        FixtureCmd::Export { name, dir } => {
            let fx = fixture(name).ok_or_else(|| HarnessError::UnknownFixture(name.clone()))?;
            let instance_text = jsonio::instance_to_json(&fx.instance);
            let matching_text = fx.designated.as_ref().map(jsonio::matching_to_json);
            match dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let instance_path = dir.join(format!("{name}.instance.json"));
                    std::fs::write(&instance_path, &instance_text)?;
                    let mut text = format!("wrote {}", instance_path.display());
                    if let Some(matching) = matching_text {
                        let matching_path = dir.join(format!("{name}.matching.json"));
                        std::fs::write(&matching_path, matching)?;
                        text.push_str(&format!("\nwrote {}", matching_path.display()));
                    }
                    print_stdout(&text)
                }
                None => {
                    let value = serde_json::json!({
                        "name": fx.name,
                        "description": fx.description,
                        "instance": value_of(&instance_text),
                        "designated": matching_text.map(|t| value_of(&t)),
                    });
                    print_stdout(&serde_json::to_string_pretty(&value).expect("serializes"))
                }
            }
        }
    }
}

fn table_row_json(row: &TableRow) -> serde_json::Value {
    serde_json::json!({
        "setting": row.setting,
        "guarantee": row.guarantee,
        "algorithm": row.algorithm,
        "bound": format_ratio(&row.bound),
        "upperBound": format_ratio(&row.upper_bound),
        "suiteMin": row.suite_min.render(),
        "suiteNonWasteful": row.suite_non_wasteful,
        "witness": format_ratio(&row.witness),
        "witnessSlack": format_ratio(&row.witness_slack),
        "witnessSource": row.witness_source,
        "pass": row.pass(),
    })
}

fn cmd_table1(args: &TableArgs) -> Result<bool, HarnessError> {
    let bounds = GeneratorBounds {
        max_classes: args.max_classes,
        max_agents: args.max_agents,
        max_items: args.max_items,
    };
    let suite = classfair::adversary::random_suite(args.suite_seed, args.suite_count, &bounds);
    let rows = reproduce_table(&suite)?;
    print_stdout(render_table(&rows).trim_end())?;
    if args.output.is_some() {
        let text = match args.format {
            OutputFormat::Json => {
                let values: Vec<serde_json::Value> = rows.iter().map(table_row_json).collect();
                serde_json::to_string_pretty(&values).expect("rows serialize")
            }
            OutputFormat::Csv => table_to_csv(&rows)?,
        };
        emit(&args.output, &text)?;
    }
    Ok(rows.iter().all(TableRow::pass))
}

fn cmd_audit(args: &AuditArgs) -> Result<(), HarnessError> {
    let inst = jsonio::load_instance(&args.instance)?;
    let matching = jsonio::load_matching(&args.matching, &inst)?;
    let report = audit_matching(&matching, &inst, &args.audits)?;
    let text = match args.format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
        }
        OutputFormat::Csv => audit_report_to_csv(&report)?,
    };
    emit(&args.output, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args).map(|()| true),
        Cmd::Montecarlo(args) => cmd_montecarlo(args).map(|()| true),
        Cmd::Fixture(args) => cmd_fixture(args).map(|()| true),
        Cmd::Table1(args) => cmd_table1(args),
        Cmd::Audit(args) => cmd_audit(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
