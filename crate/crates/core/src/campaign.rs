//! Checker runs over one game and over the full experiment grid.
//!
//! A single-game check combines seeded one-step samples (convexity, secant
//! and log bounds, Slater chain) with a full trajectory audit. The campaign
//! runs the schedule end to end on a grid of games, checks every instance,
//! writes a witness file for every failing statement and renders a
//! Markdown report. Instances run in parallel and are merged in grid order,
//! so the report is byte-identical for any thread count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_convexity, check_step_inequalities, replay_witness, LemmaId, LemmaReport,
    LimitComparison, TrajectoryAudit,
};
use crate::error::{Error, Result};
use crate::game::SymmetricGame;
use crate::generators::{generate, Family, GeneratorSpec, Sampler};
use crate::hedge::TrajectoryRunner;
use crate::io::{write_atomic, write_witness};
use crate::schedule::{build_schedule, FptasSchedule};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "HEDGE_NASH_THREADS";

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_limit_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Rates at which the convexity of `α ↦ RE(Y, T_α(X))` is checked.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub alpha: f64,
    pub iterations: u64,
    /// Number of random `(X, Y, α)` samples for the one-step statements.
    pub samples: usize,
    pub seed: u64,
    /// Mass moved inside the running average right after the first step.
    pub fault: Option<f64>,
}

impl CheckConfig {
    pub fn new(alpha: f64, iterations: u64) -> Self {
        CheckConfig {
            alpha,
            iterations,
            samples: 200,
            seed: 0,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    /// One report per statement, in [`LemmaId`] order.
    pub reports: Vec<LemmaReport>,
    pub limit: LimitComparison,
}

impl CheckOutcome {
    pub fn report(&self, lemma: LemmaId) -> &LemmaReport {
        self.reports
            .iter()
            .find(|r| r.lemma_id == lemma)
            .expect("every statement is reported")
    }

    pub fn asserted_pass(&self) -> bool {
        self.reports
            .iter()
            .filter(|r| !r.lemma_id.is_contested())
            .all(|r| r.passed)
    }

    pub fn contested_pass(&self) -> bool {
        self.reports
            .iter()
            .filter(|r| r.lemma_id.is_contested())
            .all(|r| r.passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &LemmaReport> {
        self.reports.iter().filter(|r| !r.passed)
    }
}

pub fn check_game(game: &SymmetricGame, config: &CheckConfig) -> Result<CheckOutcome> {
    let n = game.n();
    let mut sample_reports: Vec<LemmaReport> = [
        LemmaId::Convexity,
        LemmaId::SecantBound,
        LemmaId::LogLowerBound,
        LemmaId::SlaterChain,
    ]
    .into_iter()
    .map(LemmaReport::empty)
    .collect();
    let grid = default_alpha_grid();
    let mut sampler = Sampler::new(config.seed);
    for s in 0..config.samples {
        let x = if s % 4 == 3 {
            sampler.boundary_strategy(n, 1e-9)
        } else {
            sampler.interior_strategy(n)
        };
        let y = if s % 2 == 0 {
            sampler.sparse_strategy(n)
        } else {
            sampler.interior_strategy(n)
        };
        let alpha = sampler.range(1e-3, 2.0);
        sample_reports[0].merge(check_convexity(game, &x, &y, &grid)?);
        for (slot, r) in sample_reports[1..]
            .iter_mut()
            .zip(check_step_inequalities(game, &x, &y, alpha)?)
        {
            slot.merge(r);
        }
    }
    for r in &mut sample_reports {
        if r.samples == 0 {
            r.max_violation = 0.0;
        }
    }

    let mut runner = TrajectoryRunner::new(game, config.alpha)?;
    let mut audit = TrajectoryAudit::new(game, config.alpha);
    audit.observe(&runner)?;
    for k in 0..config.iterations {
        runner.advance();
        if k == 0 {
            if let Some(delta) = config.fault {
                runner.inject_average_fault(delta);
            }
        }
        audit.observe(&runner)?;
    }
    let trajectory = audit.finish();

    let mut reports = sample_reports;
    reports.extend(trajectory.reports);
    reports.sort_by_key(|r| r.lemma_id);
    Ok(CheckOutcome {
        reports,
        limit: trajectory.limit,
    })
}

/// Writes one witness file per failing statement into `dir`, named after
/// the statement, optionally prefixed by `prefix`.
pub fn write_failing_witnesses(
    dir: &Path,
    prefix: Option<&str>,
    outcome: &CheckOutcome,
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for r in outcome.failing() {
        if let Some(w) = &r.witness {
            let stem = match prefix {
                Some(p) => format!("{p}-{}", r.lemma_id),
                None => r.lemma_id.to_string(),
            };
            paths.push(write_witness(dir, &stem, w)?);
        }
    }
    Ok(paths)
}

/// Which claim an instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    /// General random games under the schedule: measured, not guaranteed.
    Schedule,
    /// Families with an independent convergence guarantee.
    Guaranteed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub track: Track,
    pub spec: GeneratorSpec,
    pub eps: f64,
}

impl Instance {
    pub fn id(&self) -> String {
        format!("{}-eps{}", self.spec.label(), self.eps)
    }
}

/// The default grid: random games for `n ∈ {2,3,4}`, `ε ∈ {0.1, 0.2}`, ten
/// seeds each; then doubly symmetric and symmetric zero-sum games at
/// `ε = 0.2` for `n ∈ {3, 5}`, five seeds each.
pub fn default_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in [2, 3, 4] {
        for eps in [0.1, 0.2] {
            for seed in 0..10 {
                out.push(Instance {
                    track: Track::Schedule,
                    spec: GeneratorSpec::new(Family::RandomUniform, n, seed),
                    eps,
                });
            }
        }
    }
    for family in [Family::DoublySymmetric, Family::SymmetricZeroSum] {
        for n in [3, 5] {
            for seed in 0..5 {
                out.push(Instance {
                    track: Track::Guaranteed,
                    spec: GeneratorSpec::new(family, n, seed),
                    eps: 0.2,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub instances: Vec<Instance>,
    /// One-step samples per instance.
    pub samples: usize,
    pub threads: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            instances: default_instances(),
            samples: 50,
            threads: thread_limit_from_env(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance: Instance,
    pub schedule: FptasSchedule,
    pub eps_average: f64,
    pub target_met: bool,
    pub outcome: CheckOutcome,
    /// Witness files, relative to the campaign output directory.
    pub witness_files: Vec<String>,
    /// Every written witness reproduced its recorded violation.
    pub witnesses_replay: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutcome {
    pub results: Vec<InstanceResult>,
    pub report_path: PathBuf,
}

impl CampaignOutcome {
    pub fn asserted_pass(&self) -> bool {
        self.results.iter().all(|r| r.outcome.asserted_pass())
    }

    /// Every contested violation has a witness file that replays.
    pub fn contested_witnessed(&self) -> bool {
        self.results.iter().all(|r| {
            r.witnesses_replay
                && r.outcome
                    .failing()
                    .filter(|rep| rep.lemma_id.is_contested())
                    .all(|rep| {
                        let stem = format!("witnesses/{}-{}.json", r.instance.id(), rep.lemma_id);
                        r.witness_files.contains(&stem)
                    })
        })
    }
}

pub const REPORT_FILE: &str = "campaign_report.md";
pub const WITNESS_DIR: &str = "witnesses";

fn replays(w: &crate::analysis::Witness) -> bool {
    match replay_witness(w) {
        Ok(v) => (v - w.violation).abs() <= 1e-9 * w.violation.abs().max(1.0),
        Err(_) => false,
    }
}

fn run_instance(inst: &Instance, samples: usize, out_dir: &Path) -> Result<InstanceResult> {
    let game = generate(&inst.spec)?.with_label(inst.spec.label());
    let schedule = build_schedule(inst.spec.n, inst.eps)?;
    let mut config = CheckConfig::new(schedule.alpha, schedule.k);
    config.samples = samples;
    config.seed = inst.spec.seed;
    let outcome = check_game(&game, &config)?;
    let id = inst.id();
    let paths = write_failing_witnesses(&out_dir.join(WITNESS_DIR), Some(&id), &outcome)?;
    let witnesses_replay = outcome
        .failing()
        .filter_map(|r| r.witness.as_ref())
        .all(replays);
    let witness_files = paths
        .iter()
        .map(|p| format!("{WITNESS_DIR}/{}", p.file_name().unwrap().to_string_lossy()))
        .collect();
    let eps_average = outcome.limit.eps_average;
    Ok(InstanceResult {
        instance: inst.clone(),
        schedule,
        eps_average,
        target_met: eps_average <= inst.eps,
        outcome,
        witness_files,
        witnesses_replay,
    })
}

pub fn run_campaign(config: &CampaignConfig, out_dir: &Path) -> Result<CampaignOutcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<InstanceResult> = pool.install(|| {
        config
            .instances
            .par_iter()
            .map(|inst| run_instance(inst, config.samples, out_dir))
            .collect::<Result<_>>()
    })?;
    let report_path = out_dir.join(REPORT_FILE);
    write_atomic(&report_path, render_report(&results).as_bytes())?;
    Ok(CampaignOutcome {
        results,
        report_path,
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_report(results: &[InstanceResult]) -> String {
    let mut md = String::new();
    let asserted = results.iter().all(|r| r.outcome.asserted_pass());
    let contested_failures: usize = results
        .iter()
        .filter(|r| !r.outcome.contested_pass())
        .count();
    let target_met = results.iter().filter(|r| r.target_met).count();
    let _ = writeln!(md, "# Hedge schedule campaign\n");
    let _ = writeln!(md, "- instances: {}", results.len());
    let _ = writeln!(md, "- asserted statements: {}", verdict(asserted));
    let _ = writeln!(
        md,
        "- instances with a contested violation: {contested_failures}"
    );
    let _ = writeln!(
        md,
        "- instances meeting the target error: {target_met}/{}",
        results.len()
    );
    let _ = writeln!(md);

    for track in [Track::Schedule, Track::Guaranteed] {
        let rows: Vec<&InstanceResult> = results
            .iter()
            .filter(|r| r.instance.track == track)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let title = match track {
            Track::Schedule => "Random games under the schedule (measured)",
            Track::Guaranteed => "Families with a convergence guarantee",
        };
        let _ = writeln!(md, "## {title}\n");
        let _ = writeln!(
            md,
            "| instance | alpha | K | eps_average | target | met | four-term bound at K | inductive_LA | mylove_bound | asserted |"
        );
        let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|");
        for r in rows {
            let o = &r.outcome;
            let _ = writeln!(
                md,
                "| {} | {:.6e} | {} | {:.6e} | {} | {} | {:.6e} | {} | {} | {} |",
                r.instance.id(),
                r.schedule.alpha,
                r.schedule.k,
                r.eps_average,
                r.instance.eps,
                if r.target_met { "yes" } else { "no" },
                o.limit.bound_at_k,
                verdict(o.report(LemmaId::InductiveLa).passed),
                verdict(o.report(LemmaId::MyloveBound).passed),
                verdict(o.asserted_pass()),
            );
        }
        let _ = writeln!(md);
    }

    let _ = writeln!(md, "## Limit comparison\n");
    let _ = writeln!(
        md,
        "The claimed limit is `n(e^alpha - 1)`. `gap` is eps_average minus that value; \
         a negative gap is consistent with the limit read as an upper bound.\n"
    );
    let _ = writeln!(
        md,
        "| instance | claimed limit | gap | below claimed limit |"
    );
    let _ = writeln!(md, "|---|---|---|---|");
    for r in results {
        let l = &r.outcome.limit;
        let _ = writeln!(
            md,
            "| {} | {:.6e} | {:.6e} | {} |",
            r.instance.id(),
            l.claimed_limit,
            l.gap_to_claimed_limit,
            if l.within_claimed_limit { "yes" } else { "no" }
        );
    }
    let _ = writeln!(md);

    let _ = writeln!(md, "## Worst violation per statement\n");
    let _ = writeln!(
        md,
        "| statement | kind | samples | max violation | tolerance | failing instances |"
    );
    let _ = writeln!(md, "|---|---|---|---|---|---|");
    for id in LemmaId::ALL {
        let mut samples = 0u64;
        let mut worst = f64::NEG_INFINITY;
        let mut failing = 0usize;
        for r in results {
            let rep = r.outcome.report(id);
            samples += rep.samples;
            worst = worst.max(rep.max_violation);
            failing += usize::from(!rep.passed);
        }
        let _ = writeln!(
            md,
            "| {id} | {} | {samples} | {worst:.6e} | {:e} | {failing} |",
            if id.is_contested() {
                "contested"
            } else {
                "asserted"
            },
            id.tolerance()
        );
    }
    let _ = writeln!(md);

    let _ = writeln!(md, "## Witness files\n");
    let mut any = false;
    for r in results {
        for f in &r.witness_files {
            any = true;
            let _ = writeln!(md, "- `{f}` (replay: {})", verdict(r.witnesses_replay));
        }
    }
    if !any {
        let _ = writeln!(md, "None.");
    }
    md
}
