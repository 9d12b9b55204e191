use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hedge_nash::campaign::{
    thread_limit_from_env, write_failing_witnesses, CampaignConfig, WITNESS_DIR,
};
use hedge_nash::io::{write_json, write_trajectory_csv};
use hedge_nash::{
    approximation_error, build_schedule, check_game, generate, mylove_bound, run_campaign,
    support_enumeration, CheckConfig, Family, GeneratorSpec, SymmetricGame, TrajectoryRunner,
};

/// Hedge dynamics on symmetric bimatrix games.
#[derive(Parser)]
#[command(name = "hedge-nash", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Hedge from the uniform start and write the trajectory.
    Run(RunArgs),
    /// Print the parameter schedule for a target error.
    Schedule(ScheduleArgs),
    /// Check every tracked statement on one game.
    Check(CheckArgs),
    /// Enumerate the symmetric equilibria of a small game.
    Oracle(OracleArgs),
    /// Run the full schedule campaign and write a Markdown report.
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct GameSource {
    /// Game JSON file: `{"n": .., "payoffs": [row-major n*n], "label": ..}`.
    #[arg(long, conflicts_with_all = ["family", "spec_json"])]
    game: Option<PathBuf>,
    /// Generator spec JSON file: `{"family": .., "n": .., "seed": ..}`.
    #[arg(long, conflicts_with = "family")]
    spec_json: Option<PathBuf>,
    #[arg(long, requires = "n")]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescale payoffs affinely into [0, 1] when loading a game file.
    #[arg(long)]
    normalize: bool,
}

impl GameSource {
    fn load(&self) -> anyhow::Result<SymmetricGame> {
        if let Some(path) = &self.game {
            let text = read(path)?;
            return Ok(SymmetricGame::from_json(&text, self.normalize)?);
        }
        let spec = if let Some(path) = &self.spec_json {
            serde_json::from_str::<GeneratorSpec>(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?
        } else if let (Some(family), Some(n)) = (self.family, self.n) {
            GeneratorSpec::new(family, n, self.seed)
        } else {
            bail!("no game given: use --game, --spec-json or --family with --n");
        };
        Ok(generate(&spec)?.with_label(spec.label()))
    }
}

#[derive(Args)]
struct Rates {
    #[arg(long, requires = "iterations", conflicts_with = "eps")]
    alpha: Option<f64>,
    /// Number of Hedge steps.
    #[arg(
        long = "K",
        visible_alias = "k",
        requires = "alpha",
        conflicts_with = "eps"
    )]
    iterations: Option<u64>,
    /// Target error; α and K come from the schedule.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: GameSource,
    #[command(flatten)]
    rates: Rates,
    /// Record every this many steps (default max(1, K/1000)); the last step is always recorded.
    #[arg(long)]
    observe_every: Option<u64>,
    #[arg(long, default_value = "hedge-nash-out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: GameSource,
    #[command(flatten)]
    rates: Rates,
    /// Random one-step samples.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
    /// Move this much mass inside the running average after the first step.
    #[arg(long)]
    inject_fault: Option<f64>,
    #[arg(long, default_value = "hedge-nash-out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: GameSource,
    #[arg(long, default_value = "hedge-nash-out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct CampaignArgs {
    /// One-step samples per instance.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value = "hedge-nash-out")]
    output_dir: PathBuf,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// `(α, K, target)` from explicit rates or the schedule.
fn resolve(
    rates: &Rates,
    n: usize,
    default: Option<(f64, u64)>,
) -> anyhow::Result<(f64, u64, Option<f64>)> {
    match (rates.alpha, rates.iterations, rates.eps) {
        (Some(a), Some(k), None) => Ok((a, k, None)),
        (None, None, Some(eps)) => {
            let s = build_schedule(n, eps)?;
            Ok((s.alpha, s.k, Some(eps)))
        }
        _ => match default {
            Some((a, k)) => Ok((a, k, None)),
            None => bail!("give either --alpha with --K, or --eps"),
        },
    }
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let game = args.source.load()?;
    let (alpha, iterations, target) = resolve(&args.rates, game.n(), None)?;
    let stride = args
        .observe_every
        .unwrap_or_else(|| hedge_nash::default_stride(iterations));
    if stride == 0 {
        bail!("--observe-every must be at least 1");
    }
    let mut runner = TrajectoryRunner::new(&game, alpha)?;
    let mut records = Vec::new();
    loop {
        let k = runner.state().k();
        if k % stride == 0 || k == iterations {
            records.push(runner.record());
        }
        if k == iterations {
            break;
        }
        runner.advance();
    }
    let dir = &args.output_dir;
    write_trajectory_csv(&dir.join("trajectory.csv"), &records)?;
    let report = approximation_error(&game, runner.state().average())?;
    write_json(&dir.join("report.json"), &report)?;
    if let Some(eps) = target {
        write_json(&dir.join("schedule.json"), &build_schedule(game.n(), eps)?)?;
    }
    let target_text = target.map_or_else(|| "n/a".to_string(), |e| e.to_string());
    println!(
        "final eps_average={} target={} bound={}",
        report.epsilon,
        target_text,
        mylove_bound(game.n(), alpha, iterations)?
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_schedule(args: &ScheduleArgs) -> anyhow::Result<ExitCode> {
    let s = build_schedule(args.n, args.eps)?;
    println!("{}", serde_json::to_string_pretty(&s)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &CheckArgs) -> anyhow::Result<ExitCode> {
    let game = args.source.load()?;
    let (alpha, iterations, _) = resolve(&args.rates, game.n(), Some((0.1, 1000)))?;
    let config = CheckConfig {
        alpha,
        iterations,
        samples: args.samples,
        seed: args.sample_seed,
        fault: args.inject_fault,
    };
    let outcome = check_game(&game, &config)?;
    let dir = &args.output_dir;
    write_json(&dir.join("reports.json"), &outcome)?;
    write_failing_witnesses(&dir.join(WITNESS_DIR), None, &outcome)?;
    for r in &outcome.reports {
        println!(
            "{} {} {} max_violation={:e}",
            r.lemma_id,
            if r.lemma_id.is_contested() {
                "contested"
            } else {
                "asserted"
            },
            if r.passed { "pass" } else { "FAIL" },
            r.max_violation
        );
    }
    Ok(if outcome.asserted_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_oracle(args: &OracleArgs) -> anyhow::Result<ExitCode> {
    let game = args.source.load()?;
    let set = support_enumeration(&game)?;
    let mut text = set.to_json();
    text.push('\n');
    hedge_nash::io::write_atomic(&args.output_dir.join("equilibria.json"), text.as_bytes())?;
    println!("{} equilibria", set.equilibria.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_campaign(args: &CampaignArgs) -> anyhow::Result<ExitCode> {
    let config = CampaignConfig {
        samples: args.samples,
        threads: thread_limit_from_env(),
        ..CampaignConfig::default()
    };
    let outcome = run_campaign(&config, &args.output_dir)?;
    let met = outcome.results.iter().filter(|r| r.target_met).count();
    println!(
        "instances={} target_met={} asserted={} report={}",
        outcome.results.len(),
        met,
        if outcome.asserted_pass() {
            "pass"
        } else {
            "FAIL"
        },
        outcome.report_path.display()
    );
    Ok(if outcome.asserted_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Campaign(a) => cmd_campaign(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
