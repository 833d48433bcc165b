mod source;
mod sweep;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mvbm_core::par::{configure_threads, Execution};
use mvbm_core::strategy::{analyze, AnalysisError, AnalysisOptions, AnalysisRecord, Check};
use mvbm_core::{
    fixture, run, solve_traced, FixtureId, Mechanism, MechanismKind, Mode, OracleError, RandomSpec,
    Report, SweepLimits, Value, ValueMode, DEFAULT_CAP,
};
use serde_json::json;

use source::{FixtureArgs, SourceArgs};
use sweep::{RowOptions, COLUMNS};

#[derive(Debug, Parser)]
#[command(
    name = "mvbm",
    version,
    about = "Vertex-weighted b-matching mechanisms and their strategic analysis"
)]
struct Cli {
    /// Worker threads; 1 runs everything sequentially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Largest number of strategies, profiles or assignments one search may enumerate.
    #[arg(long, global = true, env = "MVBM_CAP_DEFAULT", default_value_t = DEFAULT_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MechArgs {
    #[arg(long, default_value = "bfs")]
    mech: Mechanism,
    #[arg(long, default_value = "ems")]
    mode: Mode,
}

impl MechArgs {
    fn kind(&self) -> MechanismKind {
        MechanismKind::new(self.mech, self.mode)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a mechanism and print the matching, utilities and welfare.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        fixture: FixtureArgs,
        #[command(flatten)]
        mech: MechArgs,
        /// Declared report (JSON); truthful reports when absent.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Include every augmentation step.
        #[arg(long)]
        trace: bool,
    },
    /// Run strategic checks and print one record per check.
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        fixture: FixtureArgs,
        #[command(flatten)]
        mech: MechArgs,
        /// Checks to run; may be repeated.
        #[arg(long, required = true)]
        check: Vec<Check>,
        /// Largest coalition tried by `group-sp`.
        #[arg(long, default_value_t = 2)]
        max_coalition: usize,
        /// Profile tested by `ne` (report JSON); truthful when absent.
        #[arg(long, value_name = "FILE")]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Evaluate a batch of instances and print one row each.
    Sweep(SweepArgs),
    /// List or print the built-in instances.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Every small instance up to the given sizes.
    Exhaustive,
    /// Seeded random instances of one size.
    Random,
    /// The approximation tightness family, one row per epsilon.
    Thm3,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    family: Family,
    /// Agents: the maximum for `exhaustive`, the exact count for `random`.
    #[arg(short = 'n', long, default_value_t = 3)]
    agents: usize,
    /// Tasks: the maximum for `exhaustive`, the exact count for `random`.
    #[arg(short = 'm', long, default_value_t = 3)]
    tasks: usize,
    /// Largest capacity.
    #[arg(short = 'b', long, default_value_t = 2)]
    capacity: usize,
    /// Use only the value 1 in the exhaustive sweep.
    #[arg(long)]
    unit_values: bool,
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Seed of the first random instance; instance `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "0.5")]
    density: f64,
    /// `ties` draws from {1, 1/2, 1/4}; `distinct` makes all values differ.
    #[arg(long, default_value = "ties")]
    values: ValueMode,
    /// Epsilons for the `thm3` family.
    #[arg(long, value_delimiter = ',', default_value = "1/10,1/100,1/1000")]
    eps_list: Vec<Value>,
    /// Leave the poa, pos and truthful_ap columns empty.
    #[arg(long)]
    skip_strategic: bool,
    /// Mechanism and mode for the poa and pos columns (truthful_ap always uses ap).
    #[command(flatten)]
    mech: MechArgs,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
}

#[derive(Debug, Subcommand)]
enum FixturesAction {
    /// Names and short descriptions.
    List {
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
    },
    /// Print a fixture as instance JSON.
    Dump {
        id: FixtureId,
        #[command(flatten)]
        fixture: FixtureArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The reader went away (`mvbm ... | head`); not worth reporting.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|ce| {
                matches!(ce.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
            })
    })
}

/// 2 when an enumeration cap was hit, 1 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let cap_hit = e.chain().any(|c| {
        matches!(
            c.downcast_ref::<AnalysisError>(),
            Some(AnalysisError::CapExceeded { .. })
        ) || matches!(
            c.downcast_ref::<OracleError>(),
            Some(OracleError::CapExceeded { .. })
        )
    });
    if cap_hit {
        2
    } else {
        1
    }
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads(cli.jobs).map_err(anyhow::Error::msg)?;
    let exec = Execution::from_jobs(cli.jobs);
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Solve {
            source,
            fixture,
            mech,
            report,
            trace,
        } => cmd_solve(&mut out, &source, &fixture, mech.kind(), report, trace),
        Command::Analyze {
            source,
            fixture,
            mech,
            check,
            max_coalition,
            profile,
            out: format,
        } => {
            let profile = profile.map(|p| read_report(&p)).transpose()?;
            let options = AnalysisOptions {
                cap: cli.cap,
                max_coalition,
                exec,
                profile,
            };
            cmd_analyze(
                &mut out,
                &source,
                &fixture,
                mech.kind(),
                &check,
                &options,
                format,
            )
        }
        Command::Sweep(args) => cmd_sweep(&mut out, &args, cli.cap, exec),
        Command::Fixtures { action } => cmd_fixtures(&mut out, action),
    }
}

fn read_report(path: &PathBuf) -> Result<Report> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Report::from_json(&text).with_context(|| format!("invalid report {}", path.display()))
}

fn cmd_solve(
    out: &mut impl Write,
    source: &SourceArgs,
    fx: &FixtureArgs,
    kind: MechanismKind,
    report: Option<PathBuf>,
    trace: bool,
) -> Result<()> {
    let (inst, id) = source::load(source, fx)?;
    let report = match report {
        Some(path) => read_report(&path)?,
        None => Report::truthful(&inst, kind.mode),
    };
    let outcome = run(&inst, &report, kind)?;
    let pairs: Vec<[usize; 2]> = outcome
        .matching
        .pairs()
        .iter()
        .map(|(a, t)| [a.0, t.0])
        .collect();
    let mut doc = json!({
        "instance": id,
        "mechanism": kind.mechanism,
        "mode": kind.mode,
        "pairs": pairs,
        "utilities": outcome.utilities.per_agent,
        "welfare": outcome.utilities.welfare,
    });
    if trace {
        let caps = report.effective_capacities(&inst, kind.mode);
        let steps: Vec<_> = solve_traced(
            &report.edges,
            caps,
            inst.values(),
            kind.mechanism.search(),
        )
        .into_iter()
        .map(|s| {
            json!({
                "task": s.task,
                "path": s.path.map(|p| p.to_string()),
                "pairs": s.matching.pairs().iter().map(|(a, t)| [a.0, t.0]).collect::<Vec<_>>(),
            })
        })
        .collect();
        doc["trace"] = json!(steps);
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn cmd_analyze(
    out: &mut impl Write,
    source: &SourceArgs,
    fx: &FixtureArgs,
    kind: MechanismKind,
    checks: &[Check],
    options: &AnalysisOptions,
    format: OutFormat,
) -> Result<()> {
    let (inst, id) = source::load(source, fx)?;
    let records = checks
        .iter()
        .map(|&c| analyze(&inst, &id, kind, c, options))
        .collect::<Result<Vec<AnalysisRecord>, _>>()?;
    match format {
        OutFormat::Json if records.len() == 1 => {
            writeln!(out, "{}", serde_json::to_string_pretty(&records[0])?)?
        }
        OutFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&records)?)?,
        OutFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "check",
                "instance",
                "mechanism",
                "mode",
                "verdict",
                "poa",
                "pos",
            ])?;
            for r in &records {
                let (poa, pos) = r
                    .ratios
                    .as_ref()
                    .map(|x| (x.poa_ratio.to_string(), x.pos_ratio.to_string()))
                    .unwrap_or_default();
                w.write_record([
                    r.check.to_string(),
                    r.instance_id.clone(),
                    r.mechanism.to_string(),
                    r.mode.to_string(),
                    r.verdict.clone(),
                    poa,
                    pos,
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_sweep(out: &mut impl Write, args: &SweepArgs, cap: u64, exec: Execution) -> Result<()> {
    if !(args.density > 0.0 && args.density <= 1.0) {
        bail!("density must be in (0, 1]");
    }
    let opts = RowOptions {
        kind: args.mech.kind(),
        strategic: !args.skip_strategic,
        cap,
    };
    let rows = match args.family {
        Family::Exhaustive => {
            let mut limits = SweepLimits::new(args.agents, args.tasks, args.capacity);
            if args.unit_values {
                limits = limits.unit_values();
            }
            sweep::exhaustive(limits, &opts, exec)?
        }
        Family::Random => {
            if args.capacity == 0 && args.count > 0 {
                bail!("capacity must be at least 1");
            }
            let base = RandomSpec::new(args.seed, args.agents, args.tasks)
                .max_capacity(args.capacity.max(1))
                .density(args.density)
                .values(args.values);
            sweep::random(args.count, &base, &opts, exec)?
        }
        Family::Thm3 => sweep::thm3(&args.eps_list, &opts)?,
    };
    match args.out {
        OutFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for r in &rows {
                w.write_record(r.record())?;
            }
            w.flush()?;
        }
        OutFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
    }
    Ok(())
}

fn cmd_fixtures(out: &mut impl Write, action: FixturesAction) -> Result<()> {
    match action {
        FixturesAction::List { out: format } => match format {
            OutFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["id", "needs_eps", "family", "description"])?;
                for id in FixtureId::ALL {
                    w.write_record([
                        id.name(),
                        &id.needs_eps().to_string(),
                        &id.is_family().to_string(),
                        id.description(),
                    ])?;
                }
                w.flush()?;
            }
            OutFormat::Json => {
                let list: Vec<_> = FixtureId::ALL
                    .iter()
                    .map(|id| {
                        json!({
                            "id": id.name(),
                            "needs_eps": id.needs_eps(),
                            "family": id.is_family(),
                            "description": id.description(),
                        })
                    })
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&list)?)?;
            }
        },
        FixturesAction::Dump { id, fixture: fx } => {
            let inst = fixture(id, &fx.params())?;
            writeln!(out, "{}", inst.to_json())?;
        }
    }
    Ok(())
}
