//! The six experiment commands.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::machine::builtins::succ_time_overhead;
use crate::machine::{enumerate_bb, BbTable, Labels, Program};
use crate::measures::{expected_local_synergy, read_cache_keys, Budgets, Estimator, PickedLabels};
use crate::network::{
    evaluate_population, find_central_node, run_isolated, run_networked, sample_population,
    CentralReport, NetworkAssembly, RunRecord, Selector,
};
use crate::tvg::{
    central_vertices, d_t, fmt_hops, gen_small_diameter, reverse_reach_all,
    temporal_diffusion_diameter, time_reachability_centrality, Tvg,
};

use super::{reference_output, ExpError, ExperimentConfig, Outcome, SelectorKind};

/// Sweep rows computed between two flushes of `sweep.csv`.
const SWEEP_CHUNK: usize = 64;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    fingerprint: String,
    outcome: Outcome,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Ctx<'a>, ExpError> {
        cfg.validate()?;
        fs::create_dir_all(&cfg.out)?;
        Ok(Ctx {
            cfg,
            fingerprint: cfg.fingerprint(),
            outcome: Outcome::default(),
        })
    }

    fn tags(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.cfg.seed.to_string()),
            ("config_fingerprint", self.fingerprint.clone()),
        ]
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.cfg.out.join(name);
        self.outcome.files.push(p.clone());
        p
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), ExpError> {
        let path = self.path(name);
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        fs::write(path, bytes)?;
        Ok(())
    }

    fn say(&mut self, line: String) {
        log::info!("{line}");
        self.outcome.lines.push(line);
    }
}

/// Configuration as recorded in output files: the output directory is left
/// out so that identical experiments produce identical bytes.
fn recorded(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.out = PathBuf::new();
    c
}

fn load_tvg(path: &Path) -> Result<Tvg, ExpError> {
    let f = File::open(path)
        .map_err(|e| ExpError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Tvg::read_from(BufReader::new(f))
        .map_err(|e| ExpError::Validation(format!("{}: {e}", path.display())))
}

fn trial_graph(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<Tvg, ExpError> {
    match &cfg.tvg_file {
        Some(p) => load_tvg(p),
        None => Ok(gen_small_diameter(cfg.family, n, seed)?),
    }
}

fn no_graph_file(cfg: &ExperimentConfig, command: &str) -> Result<(), ExpError> {
    if cfg.tvg_file.is_some() {
        return Err(ExpError::Validation(format!(
            "{command} sweeps population sizes and needs a generated graph"
        )));
    }
    Ok(())
}

/// Samples a population with `seed`, places it on `g` and runs it on `w`.
/// The record is scored when the reference answer is known.
fn run_trial(
    cfg: &ExperimentConfig,
    fingerprint: &str,
    g: Tvg,
    seed: u64,
    w: &Bitstring,
    selector: &Selector,
) -> Result<(NetworkAssembly, RunRecord), ExpError> {
    let n = g.n();
    let programs = sample_population(n, seed, cfg.max_program_bits);
    let assembly = NetworkAssembly::new(g, programs, (0..n).collect(), cfg.c_0, cfg.n_cycles)?;
    let mut record = run_networked(&assembly, w, &selector.head(), cfg.budget)?;
    record.seed = seed;
    record.config_fingerprint = fingerprint.to_string();
    if let Some(expected) = reference_output(selector, w, record.x_max, cfg.reference_budget)? {
        record.score(&expected);
    }
    Ok((assembly, record))
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = p + z * z / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    // the bounds touch 0 and 1 exactly at the extremes
    let lo = if k == 0.0 {
        0.0
    } else {
        (centre - half) / denom
    };
    let hi = if k == n { 1.0 } else { (centre + half) / denom };
    (lo, hi)
}

// ---------------------------------------------------------------- bb

pub fn cmd_bb(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    let table = enumerate_bb(cfg.bb.max_bits, cfg.bb.budget);
    let path = ctx.path("bb.csv");
    table.write_csv_tagged(BufWriter::new(File::create(path)?), &ctx.tags())?;
    for e in &table.entries {
        ctx.say(format!(
            "n={} bb={} unknown={}{}",
            e.n,
            e.value,
            e.unknown_count,
            if e.is_exact() { "" } else { " (lower bound)" }
        ));
    }
    Ok(ctx.outcome)
}

// ---------------------------------------------------------------- tvg

#[derive(Serialize)]
struct TvgSummary {
    seed: u64,
    config_fingerprint: String,
    source: String,
    n: usize,
    instants: usize,
    arcs: usize,
    diameter: String,
    central_vertices: Option<Vec<usize>>,
}

pub fn cmd_tvg(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    let g = trial_graph(cfg, cfg.n, cfg.seed)?;

    let path = ctx.path("tvg.txt");
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(
        f,
        "# seed={} config_fingerprint={}",
        cfg.seed, ctx.fingerprint
    )?;
    g.write_to(&mut f)?;
    f.flush()?;

    let rr = reverse_reach_all(&g, 0);
    let path = ctx.path("metrics.csv");
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    out.write_record([
        "vertex",
        "d_t",
        "reverse_reach",
        "centrality",
        "seed",
        "config_fingerprint",
    ])?;
    for u in 0..g.n() {
        let centrality = time_reachability_centrality(&g, 0, u)
            .map_or_else(|_| "undefined".to_string(), |c| c.to_string());
        out.write_record([
            u.to_string(),
            fmt_hops(d_t(&g, 0, u, 1.0)?),
            fmt_hops(rr[u]),
            centrality,
            cfg.seed.to_string(),
            ctx.fingerprint.clone(),
        ])?;
    }
    out.flush()?;

    let diameter = temporal_diffusion_diameter(&g, 0)?;
    let summary = TvgSummary {
        seed: cfg.seed,
        config_fingerprint: ctx.fingerprint.clone(),
        source: match &cfg.tvg_file {
            Some(p) => p.display().to_string(),
            None => cfg.family.name().to_string(),
        },
        n: g.n(),
        instants: g.instants(),
        arcs: g.arc_count(),
        diameter: fmt_hops(diameter),
        central_vertices: central_vertices(&g, 0).ok(),
    };
    ctx.write_json("tvg.json", &summary)?;
    ctx.say(format!(
        "N={} |T|={} D={}",
        g.n(),
        g.instants(),
        fmt_hops(diameter)
    ));
    Ok(ctx.outcome)
}

// ---------------------------------------------------------------- run

#[derive(Serialize)]
struct RunFile<'a> {
    seed: u64,
    config_fingerprint: &'a str,
    config: ExperimentConfig,
    record: &'a RunRecord,
    /// Output of each node run alone for the same number of cycles.
    isolated_outputs: Vec<Bitstring>,
}

pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    let selector = cfg.selector()?;
    let g = trial_graph(cfg, cfg.n, cfg.seed)?;
    let (assembly, record) = run_trial(cfg, &ctx.fingerprint, g, cfg.seed, &cfg.w, &selector)?;
    let isolated_outputs: Vec<Bitstring> = assembly
        .programs()
        .par_iter()
        .map(|p| run_isolated(p, &cfg.w, record.n_cycles, cfg.budget))
        .collect();
    let fp = ctx.fingerprint.clone();
    ctx.write_json(
        "run.json",
        &RunFile {
            seed: cfg.seed,
            config_fingerprint: &fp,
            config: recorded(cfg),
            record: &record,
            isolated_outputs,
        },
    )?;
    let path = ctx.path("nodes.csv");
    record.write_nodes_csv(BufWriter::new(File::create(path)?))?;
    let correct = record
        .nodes
        .iter()
        .filter(|n| n.correct == Some(true))
        .count();
    ctx.say(format!(
        "N={} cycles={} x_max={} expected={} correct={}/{}",
        record.n,
        record.n_cycles,
        record.x_max,
        record
            .expected
            .as_ref()
            .map_or_else(|| "unknown".to_string(), |e| format!("\"{e}\"")),
        correct,
        record.n
    ));
    Ok(ctx.outcome)
}

// ---------------------------------------------------------------- halting sweep

/// One trial of the halting sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub trial: usize,
    pub trial_seed: u64,
    pub w: Bitstring,
    /// `|p_+1 ∘ p_T ∘ w|`.
    pub l_w: usize,
    /// `BB(l_w)` from the table, `none` past its end.
    pub bb_value: String,
    pub bb_exact: u8,
    pub x_max: String,
    /// `x_max ≥ BB(l_w)` with an exact table entry.
    pub eligible: u8,
    /// Reference label, `none` when the reference decider gave up on `w`.
    pub expected: String,
    pub correct_nodes: usize,
    pub all_correct: u8,
    pub budget_exhausted: usize,
    pub seed: u64,
    pub config_fingerprint: String,
}

fn sweep_trial(
    cfg: &ExperimentConfig,
    fingerprint: &str,
    table: &BbTable,
    ws: &[Bitstring],
    n: usize,
    trial: usize,
) -> Result<SweepRow, ExpError> {
    let seed = cfg.seed ^ trial as u64;
    let w = &ws[trial % ws.len()];
    let selector = cfg.selector()?;
    let g = trial_graph(cfg, n, seed)?;
    let (_, record) = run_trial(cfg, fingerprint, g, seed, w, &selector)?;
    let l_w = succ_time_overhead() + w.len();
    let entry = table.get(l_w);
    let exact = entry.is_some_and(|e| e.is_exact());
    let correct_nodes = record
        .nodes
        .iter()
        .filter(|n| n.correct == Some(true))
        .count();
    Ok(SweepRow {
        n,
        trial,
        trial_seed: seed,
        w: w.clone(),
        l_w,
        bb_value: entry.map_or_else(|| "none".to_string(), |e| e.value.to_string()),
        bb_exact: u8::from(exact),
        x_max: record.x_max.to_string(),
        eligible: u8::from(exact && entry.is_some_and(|e| record.x_max >= e.value)),
        expected: record
            .expected
            .as_ref()
            .map_or_else(|| "none".to_string(), |e| e.to_string()),
        correct_nodes,
        all_correct: u8::from(record.expected.is_some() && correct_nodes == n),
        budget_exhausted: record.budget_exhausted,
        seed: cfg.seed,
        config_fingerprint: fingerprint.to_string(),
    })
}

/// Rows of an earlier run of the same configuration that match the plan.
fn resumable_rows(path: &Path, plan: &[(usize, usize)], fingerprint: &str) -> Vec<SweepRow> {
    let Ok(f) = File::open(path) else {
        return Vec::new();
    };
    let mut rows = Vec::new();
    for (row, &(n, trial)) in csv::Reader::from_reader(BufReader::new(f))
        .deserialize::<SweepRow>()
        .zip(plan)
    {
        match row {
            Ok(r) if r.n == n && r.trial == trial && r.config_fingerprint == fingerprint => {
                rows.push(r)
            }
            _ => break,
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SweepSummary {
    n: usize,
    trials: usize,
    all_correct: usize,
    fraction: f64,
    wilson_lo: f64,
    wilson_hi: f64,
    eligible: usize,
    eligible_all_correct: usize,
    unresolved: usize,
    seed: u64,
    config_fingerprint: String,
}

pub fn cmd_halting_sweep(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    no_graph_file(cfg, "halting-sweep")?;
    if cfg.selector != SelectorKind::PHalt {
        return Err(ExpError::Validation(
            "halting-sweep needs the p-halt selector".into(),
        ));
    }
    if cfg.budget < cfg.bb.budget {
        return Err(ExpError::Validation(
            "node budget must be at least the table budget for the correctness check".into(),
        ));
    }
    let ws = cfg.w_list();
    for w in &ws {
        Program::parse(w).map_err(|e| ExpError::Validation(format!("w = {w}: {e}")))?;
    }
    let longest = ws.iter().map(Bitstring::len).max().unwrap_or(0) + succ_time_overhead();
    let table = enumerate_bb(cfg.bb.max_bits.min(longest), cfg.bb.budget);

    let plan: Vec<(usize, usize)> = cfg
        .n_sweep
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let path = ctx.path("sweep.csv");
    let mut rows = resumable_rows(&path, &plan, &ctx.fingerprint);
    if !rows.is_empty() {
        ctx.say(format!(
            "resuming after {} of {} trials",
            rows.len(),
            plan.len()
        ));
    }
    // rewrite the kept prefix so a torn last line is dropped
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    for r in &rows {
        out.serialize(r)?;
    }
    out.flush()?;
    if rows.is_empty() {
        drop(out);
        out = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    } else {
        drop(out);
        out = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(BufWriter::new(OpenOptions::new().append(true).open(&path)?));
    }
    let start = rows.len();
    for chunk in plan[start..].chunks(SWEEP_CHUNK) {
        let fresh: Vec<SweepRow> = chunk
            .par_iter()
            .map(|&(n, t)| sweep_trial(cfg, &ctx.fingerprint, &table, &ws, n, t))
            .collect::<Result<_, _>>()?;
        for r in &fresh {
            out.serialize(r)?;
        }
        out.flush()?;
        rows.extend(fresh);
    }
    drop(out);

    let mut summaries = Vec::new();
    for &n in &cfg.n_sweep {
        let of_n: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
        let trials = of_n.len();
        let all_correct = of_n.iter().filter(|r| r.all_correct == 1).count();
        let (wilson_lo, wilson_hi) = wilson_interval(all_correct, trials);
        let s = SweepSummary {
            n,
            trials,
            all_correct,
            fraction: all_correct as f64 / trials as f64,
            wilson_lo,
            wilson_hi,
            eligible: of_n.iter().filter(|r| r.eligible == 1).count(),
            eligible_all_correct: of_n
                .iter()
                .filter(|r| r.eligible == 1 && r.all_correct == 1)
                .count(),
            unresolved: of_n.iter().filter(|r| r.expected == "none").count(),
            seed: cfg.seed,
            config_fingerprint: ctx.fingerprint.clone(),
        };
        ctx.say(format!(
            "N={} all-correct {}/{} = {:.3} [{:.3}, {:.3}]; eligible {} of which correct {}",
            s.n,
            s.all_correct,
            s.trials,
            s.fraction,
            s.wilson_lo,
            s.wilson_hi,
            s.eligible,
            s.eligible_all_correct
        ));
        summaries.push(s);
    }
    let path = ctx.path("summary.csv");
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for s in &summaries {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(ctx.outcome)
}

// ---------------------------------------------------------------- synergy

#[derive(Debug, Clone, Serialize)]
struct SynergyRun {
    trial: usize,
    trial_seed: u64,
    all_correct: bool,
    /// Expected local synergy, measured on correct runs only.
    mean: Option<f64>,
    sum: Option<i64>,
    passes: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
struct SynergyAtN {
    n: usize,
    trials: usize,
    correct_runs: usize,
    passing_runs: usize,
    /// `passing_runs / correct_runs`; absent without correct runs.
    fraction: Option<f64>,
    runs: Vec<SynergyRun>,
}

#[derive(Debug, Clone, Serialize)]
struct SynergyLevel {
    x: usize,
    /// Passing runs have mean synergy of at least `x - slack_constant`.
    required_mean: i64,
    picked: PickedLabels,
    per_n: Vec<SynergyAtN>,
}

#[derive(Debug, Clone, Serialize)]
struct SynergyFile {
    seed: u64,
    config_fingerprint: String,
    budgets: Budgets,
    c_copy: usize,
    slack_constant: usize,
    w: Bitstring,
    levels: Vec<SynergyLevel>,
}

fn synergy_at(
    cfg: &ExperimentConfig,
    fingerprint: &str,
    est: &Estimator,
    labels: &Labels,
    required: i64,
    slack: usize,
    n: usize,
) -> Result<SynergyAtN, ExpError> {
    let selector = Selector::PHalt {
        labels: labels.clone(),
    };
    let budgets = cfg.synergy.budgets();
    let runs: Vec<SynergyRun> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = cfg.seed ^ trial as u64;
            let g = trial_graph(cfg, n, seed)?;
            let (_, record) = run_trial(cfg, fingerprint, g, seed, &cfg.w, &selector)?;
            let all_correct = record.all_correct();
            let mut run = SynergyRun {
                trial,
                trial_seed: seed,
                all_correct,
                mean: None,
                sum: None,
                passes: None,
            };
            if let (true, Some(f_w)) = (all_correct, record.expected.as_ref()) {
                let report = expected_local_synergy(est, &record, f_w, budgets, slack, labels);
                run.passes =
                    Some(i128::from(report.sum) >= i128::from(required) * report.n as i128);
                run.mean = Some(report.mean);
                run.sum = Some(report.sum);
            }
            Ok(run)
        })
        .collect::<Result<_, ExpError>>()?;
    let correct_runs = runs.iter().filter(|r| r.all_correct).count();
    let passing_runs = runs.iter().filter(|r| r.passes == Some(true)).count();
    Ok(SynergyAtN {
        n,
        trials: runs.len(),
        correct_runs,
        passing_runs,
        fraction: (correct_runs > 0).then(|| passing_runs as f64 / correct_runs as f64),
        runs,
    })
}

pub fn cmd_synergy(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    no_graph_file(cfg, "synergy")?;
    if cfg.selector != SelectorKind::PHalt {
        return Err(ExpError::Validation(
            "synergy needs the p-halt selector".into(),
        ));
    }
    let est = Estimator::new();
    let budgets = cfg.synergy.budgets();
    let c_copy = est.c_copy(budgets);
    let slack = cfg.synergy.slack.unwrap_or(c_copy + 4);
    let mut levels = Vec::new();
    for &x in &cfg.synergy.xs {
        let picked = crate::measures::pick_labels(
            &est,
            x,
            slack,
            &cfg.synergy.w_min,
            budgets,
            cfg.seed ^ x as u64,
        )?;
        let required = x as i64 - slack as i64;
        let mut per_n = Vec::new();
        for &n in &cfg.n_sweep {
            let at = synergy_at(
                cfg,
                &ctx.fingerprint,
                &est,
                &picked.labels,
                required,
                slack,
                n,
            )?;
            ctx.say(format!(
                "x={x} N={n} correct={} passing={} fraction={}",
                at.correct_runs,
                at.passing_runs,
                at.fraction
                    .map_or_else(|| "undefined".to_string(), |f| format!("{f:.3}"))
            ));
            per_n.push(at);
        }
        levels.push(SynergyLevel {
            x,
            required_mean: required,
            picked,
            per_n,
        });
    }
    let file = SynergyFile {
        seed: cfg.seed,
        config_fingerprint: ctx.fingerprint.clone(),
        budgets,
        c_copy,
        slack_constant: slack,
        w: cfg.w.clone(),
        levels,
    };
    ctx.write_json("synergy.json", &file)?;

    let path = ctx.path("complexity_cache.csv");
    let existing = match File::open(&path) {
        Ok(f) => Some(read_cache_keys(BufReader::new(f))?),
        Err(_) => None,
    };
    let f = OpenOptions::new().create(true).append(true).open(&path)?;
    let added = est.append_cache_csv(
        existing.as_deref().unwrap_or(&[]),
        BufWriter::new(f),
        existing.is_none(),
        &ctx.tags(),
    )?;
    ctx.say(format!("{added} new complexity estimates cached"));
    Ok(ctx.outcome)
}

// ---------------------------------------------------------------- central

#[derive(Debug, Clone, Serialize)]
struct CentralTrial {
    trial: usize,
    trial_seed: u64,
    n: usize,
    instants: usize,
    expected: Option<Bitstring>,
    report: Option<CentralReport>,
    error: Option<String>,
    /// `c_min` is at most the cycle count of every qualifying node.
    c_min_is_least: bool,
    /// The central node's isolated output after `c_min - 1` cycles.
    isolated_before: Option<Bitstring>,
    isolated_differs: bool,
    verified: bool,
}

#[derive(Debug, Clone, Serialize)]
struct CentralFile {
    seed: u64,
    config_fingerprint: String,
    trials: usize,
    verified: usize,
    results: Vec<CentralTrial>,
}

fn central_trial(
    cfg: &ExperimentConfig,
    selector: &Selector,
    trial: usize,
) -> Result<CentralTrial, ExpError> {
    let seed = cfg.seed ^ trial as u64;
    let g = trial_graph(cfg, cfg.n, seed)?;
    let (n, instants) = (g.n(), g.instants());
    let programs = sample_population(n, seed, cfg.max_program_bits);
    let x_max = evaluate_population(&programs, &cfg.w, cfg.budget)?
        .iter()
        .map(|node| node.first_fitness)
        .max()
        .unwrap_or(0);
    let expected = reference_output(selector, &cfg.w, x_max, cfg.reference_budget)?;
    let mut out = CentralTrial {
        trial,
        trial_seed: seed,
        n,
        instants,
        expected: expected.clone(),
        report: None,
        error: None,
        c_min_is_least: false,
        isolated_before: None,
        isolated_differs: false,
        verified: false,
    };
    let Some(expected) = expected else {
        out.error = Some("reference answer unknown".into());
        return Ok(out);
    };
    let assembly = NetworkAssembly::new(g, programs, (0..n).collect(), cfg.c_0, None)?;
    match find_central_node(&assembly, &cfg.w, &selector.head(), &expected, cfg.budget) {
        Ok(report) => {
            out.c_min_is_least = report.qualifying.iter().all(|q| report.c_min <= q.cycles);
            let before = run_isolated(
                &assembly.programs()[report.node],
                &cfg.w,
                report.c_min - 1,
                cfg.budget,
            );
            out.isolated_differs = before != expected;
            out.isolated_before = Some(before);
            out.verified = out.c_min_is_least && out.isolated_differs;
            out.report = Some(report);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    Ok(out)
}

pub fn cmd_central(cfg: &ExperimentConfig) -> Result<Outcome, ExpError> {
    let mut ctx = Ctx::new(cfg)?;
    let selector = cfg.selector()?;
    let results: Vec<CentralTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| central_trial(cfg, &selector, t))
        .collect::<Result<_, _>>()?;
    let verified = results.iter().filter(|r| r.verified).count();
    ctx.say(format!(
        "central node verified in {verified}/{} graphs",
        results.len()
    ));
    let file = CentralFile {
        seed: cfg.seed,
        config_fingerprint: ctx.fingerprint.clone(),
        trials: results.len(),
        verified,
        results,
    };
    ctx.write_json("central.json", &file)?;
    Ok(ctx.outcome)
}
