//! Command-line front end: the full pipeline plus one subcommand per stage.

use anyhow::{bail, Context, Result};
use bayesmux::density::{Dataset, DensityOptions, LogDensityFn};
use bayesmux::dsl::{extract_blocks, parse_model, pretty_print, validate_model, ModelSource};
use bayesmux::ensemble::{snis_weights, weight_ess};
use bayesmux::evidence::{iw_elbo, moment_match, EvidenceConfig};
use bayesmux::mcmc::{diagnostics, sample_posterior, McmcConfig};
use bayesmux::pipeline::{run_pipeline, write_draws_csv, RunConfig, RunReport};
use bayesmux::proposer::{
    corpus_propose, filter_valid, llm_propose, parse_problem_file, ProposerConfig, ProposerMode,
};
use bayesmux::theory::{full_report, FiniteModelSpace, TheorySimConfig};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "bayesmux",
    version,
    about = "Evidence-weighted ensembles of generated probabilistic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: propose, filter, infer, weigh, and write a report.
    Run(RunArgs),
    /// Generate candidate sources and write one file per candidate.
    Propose(ProposeArgs),
    /// Parse and validate candidate files; print rejection statistics.
    Filter(FilterArgs),
    /// Sample one model's posterior; write a draws CSV and diagnostics.
    Infer(InferArgs),
    /// Evidence bound for one model against one dataset.
    Evidence(EvidenceArgs),
    /// Turn a file of evidence records into normalized weights.
    Weigh(WeighArgs),
    /// Summarize a finished run directory.
    Report(ReportArgs),
    /// Run every finite-model-space check on a space file.
    Theory(TheoryArgs),
}

#[derive(Args, Clone)]
struct ProposerFlags {
    /// corpus or llm
    #[arg(long)]
    mode: Option<String>,
    /// Directory of candidate files (corpus mode).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Take every corpus file exactly once instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Chat-completions endpoint URL (llm mode).
    #[arg(long)]
    endpoint: Option<String>,
    /// Environment variable holding the API key (never logged).
    #[arg(long)]
    api_key_env: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long)]
    model_name: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    /// Number of candidates to generate.
    #[arg(long)]
    n_candidates: Option<usize>,
    /// Directory with system_prompt.txt and fewshot/.
    #[arg(long)]
    resources: Option<PathBuf>,
}

impl ProposerFlags {
    fn apply(&self, cfg: &mut ProposerConfig) -> Result<()> {
        if let Some(mode) = &self.mode {
            cfg.mode = match mode.as_str() {
                "corpus" => ProposerMode::Corpus,
                "llm" => ProposerMode::Llm,
                other => bail!("unknown proposer mode `{other}` (corpus|llm)"),
            };
        }
        if let Some(d) = &self.corpus {
            cfg.corpus_dir = Some(d.clone());
        }
        if self.exhaustive {
            cfg.exhaustive = true;
        }
        if let Some(e) = &self.endpoint {
            cfg.endpoint_url = Some(e.clone());
        }
        if let Some(k) = &self.api_key_env {
            cfg.api_key_env = Some(k.clone());
        }
        if let Some(m) = &self.model_name {
            cfg.model_name = m.clone();
        }
        if let Some(t) = self.temperature {
            cfg.temperature = t;
        }
        if let Some(n) = self.n_candidates {
            cfg.n_candidates = n;
        }
        if let Some(r) = &self.resources {
            cfg.resources_dir = Some(r.clone());
        }
        Ok(())
    }
}

#[derive(Args, Clone)]
struct McmcFlags {
    #[arg(long)]
    chains: Option<usize>,
    /// Retained iterations per chain (after warmup).
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    target_accept: Option<f64>,
}

impl McmcFlags {
    fn apply(&self, cfg: &mut McmcConfig) {
        if let Some(c) = self.chains {
            cfg.chains = c;
        }
        if let Some(i) = self.iters {
            cfg.iterations = i;
        }
        if let Some(w) = self.warmup {
            cfg.warmup = w;
        }
        if let Some(t) = self.target_accept {
            cfg.target_accept = t;
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML file mirroring the run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem file (PROBLEM / DATA / GOAL blocks).
    #[arg(long)]
    problem: Option<PathBuf>,
    #[command(flatten)]
    proposer: ProposerFlags,
    #[command(flatten)]
    mcmc: McmcFlags,
    /// Inner samples of the importance-weighted bound.
    #[arg(short = 'K', long = "K")]
    k: Option<usize>,
    /// Outer repetitions of the importance-weighted bound.
    #[arg(short = 'R', long = "R")]
    r: Option<usize>,
    /// Master seed; everything derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Concurrent model pipelines.
    #[arg(long)]
    parallel_models: Option<usize>,
    /// Leave truncated priors unnormalized (matches samplers that ignore
    /// constraint mass).
    #[arg(long)]
    no_renormalize_truncation: bool,
    /// Output directory for report.json and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the pooled weighted-sample CSV.
    #[arg(long)]
    write_samples: bool,
}

#[derive(Args)]
struct ProposeArgs {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[command(flatten)]
    proposer: ProposerFlags,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving one <id>.txt per candidate.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    /// Directory of candidate files.
    #[arg(long)]
    dir: PathBuf,
    /// Write accepted models (canonical form) into this directory.
    #[arg(long)]
    write_accepted: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    /// Model file: either raw proposer output or bare model text.
    #[arg(long)]
    model: PathBuf,
    /// Dataset JSON file.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    mcmc: McmcFlags,
    #[arg(long)]
    seed: Option<u64>,
    /// Draws CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvidenceArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    mcmc: McmcFlags,
    #[arg(short = 'K', long = "K")]
    k: Option<usize>,
    #[arg(short = 'R', long = "R")]
    r: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct WeighArgs {
    /// JSON array of {"model_id": ..., "L": ...} records, or a report.json.
    #[arg(long)]
    records: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// A run output directory (containing report.json) or the file itself.
    #[arg(long)]
    dir: PathBuf,
}

#[derive(Args)]
struct TheoryArgs {
    /// Space description JSON: prior, log_evidence, kl, g, optional slack.
    #[arg(long)]
    space: PathBuf,
    /// Models per replication in the empirical variance check.
    #[arg(long, default_value_t = 200)]
    sim_n: usize,
    #[arg(long, default_value_t = 10_000)]
    sim_replications: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Propose(args) => cmd_propose(args),
        Command::Filter(args) => cmd_filter(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Evidence(args) => cmd_evidence(args),
        Command::Weigh(args) => cmd_weigh(args),
        Command::Report(args) => cmd_report(args),
        Command::Theory(args) => cmd_theory(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut cfg: RunConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(p) = &args.problem {
        cfg.problem_file = p.clone();
    }
    args.proposer.apply(&mut cfg.proposer)?;
    args.mcmc.apply(&mut cfg.mcmc);
    if let Some(k) = args.k {
        cfg.evidence.k = k;
    }
    if let Some(r) = args.r {
        cfg.evidence.r = r;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(p) = args.parallel_models {
        cfg.parallel_models = p;
    }
    if args.no_renormalize_truncation {
        cfg.renormalize_truncation = false;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = Some(o.clone());
    }
    if args.write_samples {
        cfg.write_samples = true;
    }
    if cfg.problem_file.as_os_str().is_empty() {
        bail!("--problem (or a config file with problem_file) is required");
    }

    let outcome = run_pipeline(&cfg)?;
    print_report_summary(&outcome.report);
    if let Some(path) = &outcome.manifest.report_file {
        eprintln!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_propose(args: ProposeArgs) -> Result<()> {
    let mut cfg = ProposerConfig::default();
    args.proposer.apply(&mut cfg)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let sources = match cfg.mode {
        ProposerMode::Corpus => corpus_propose(&cfg, cfg.n_candidates)?,
        ProposerMode::Llm => {
            let problem_path = args
                .problem
                .as_ref()
                .context("llm mode requires --problem")?;
            let text = std::fs::read_to_string(problem_path)?;
            let problem = parse_problem_file(stem(problem_path), &text)?;
            llm_propose(&cfg, &problem, cfg.n_candidates)?
        }
    };
    std::fs::create_dir_all(&args.out)?;
    for s in &sources {
        std::fs::write(args.out.join(format!("{}.txt", s.id)), &s.raw_text)?;
    }
    println!(
        "wrote {} candidate(s) to {}",
        sources.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_filter(args: FilterArgs) -> Result<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .with_context(|| format!("reading {}", args.dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let sources: Vec<ModelSource> = files
        .iter()
        .map(|p| Ok(ModelSource::new(stem(p), std::fs::read_to_string(p)?)))
        .collect::<Result<_>>()?;
    let outcome = filter_valid(&sources);
    if let Some(dir) = &args.write_accepted {
        std::fs::create_dir_all(dir)?;
        for am in &outcome.accepted {
            std::fs::write(
                dir.join(format!("{}.model", am.id)),
                pretty_print(&am.model),
            )?;
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "stats": outcome.stats,
            "rejections": outcome.rejections,
        }))?
    );
    Ok(())
}

fn load_model_and_data(model_path: &Path, data_path: &Path) -> Result<LogDensityFn> {
    let raw = std::fs::read_to_string(model_path)
        .with_context(|| format!("reading {}", model_path.display()))?;
    let model_text = extract_blocks(&raw).model.unwrap_or(raw);
    let model = parse_model(&model_text).map_err(|e| anyhow::anyhow!("{e}"))?;
    let report = validate_model(&model);
    if !report.accepted {
        let reasons: Vec<String> = report
            .errors
            .iter()
            .map(|i| format!("{}: {}", i.code.as_str(), i.message))
            .collect();
        bail!("model rejected: {}", reasons.join("; "));
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let data_text = std::fs::read_to_string(data_path)
        .with_context(|| format!("reading {}", data_path.display()))?;
    let dataset = Dataset::from_json_str(&data_text)?;
    Ok(LogDensityFn::compile(
        &model,
        &dataset,
        DensityOptions::default(),
    )?)
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    let f = load_model_and_data(&args.model, &args.data)?;
    let mut cfg = McmcConfig::default();
    args.mcmc.apply(&mut cfg);
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let samples = sample_posterior(&f, &cfg)?;
    let diag = diagnostics(&samples);
    if let Some(out) = &args.out {
        write_draws_csv(out, &samples)?;
        eprintln!("draws written to {}", out.display());
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "coordinates": samples.space.coordinate_names(),
            "accept_rate": samples.accept_rate,
            "split_rhat": diag.split_rhat,
            "ess": diag.ess,
            "passed": diag.passed,
        }))?
    );
    Ok(())
}

fn cmd_evidence(args: EvidenceArgs) -> Result<()> {
    let f = load_model_and_data(&args.model, &args.data)?;
    let mut mcmc_cfg = McmcConfig::default();
    args.mcmc.apply(&mut mcmc_cfg);
    if let Some(s) = args.seed {
        mcmc_cfg.seed = s;
    }
    let samples = sample_posterior(&f, &mcmc_cfg)?;
    let q = moment_match(&samples)?;
    let mut ev_cfg = EvidenceConfig {
        seed: mcmc_cfg.seed,
        ..Default::default()
    };
    if let Some(k) = args.k {
        ev_cfg.k = k;
    }
    if let Some(r) = args.r {
        ev_cfg.r = r;
    }
    let est = iw_elbo(&f, &q, &ev_cfg);
    println!(
        "L = {:.6} ± {:.6} (K={}, R={})",
        est.value, est.std_error, est.k, est.r
    );
    Ok(())
}

#[derive(serde::Deserialize)]
struct EvidenceRecordIn {
    model_id: String,
    #[serde(rename = "L")]
    l: f64,
}

fn cmd_weigh(args: WeighArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.records)
        .with_context(|| format!("reading {}", args.records.display()))?;
    // accept either a bare array of records or a run report
    let records: Vec<EvidenceRecordIn> = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(_) => {
            let report: RunReport = serde_json::from_str(&text)
                .context("records file is neither a record array nor a run report")?;
            report
                .per_model
                .iter()
                .filter(|m| m.accepted)
                .map(|m| EvidenceRecordIn {
                    model_id: m.id.clone(),
                    l: m.log_evidence_bound.unwrap_or(f64::NEG_INFINITY),
                })
                .collect()
        }
    };
    if records.is_empty() {
        bail!("no evidence records found");
    }
    let scores: Vec<f64> = records.iter().map(|r| r.l).collect();
    let w = snis_weights(&scores)?;
    let rows: Vec<serde_json::Value> = records
        .iter()
        .zip(w.weights.iter())
        .map(|(r, &wt)| serde_json::json!({"model_id": r.model_id, "L": r.l, "weight": wt}))
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "weights": rows,
            "weight_ess": weight_ess(&w),
        }))?
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let path = if args.dir.is_dir() {
        args.dir.join("report.json")
    } else {
        args.dir.clone()
    };
    let report: RunReport = serde_json::from_str(
        &std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?,
    )?;
    print_report_summary(&report);
    Ok(())
}

fn cmd_theory(args: TheoryArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.space)
        .with_context(|| format!("reading {}", args.space.display()))?;
    let space = FiniteModelSpace::from_json_str(&text)?;
    let report = full_report(
        &space,
        TheorySimConfig {
            n: args.sim_n,
            replications: args.sim_replications,
            seed: args.seed,
        },
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !report.all_checks_pass {
        bail!("one or more theory checks failed");
    }
    Ok(())
}

fn print_report_summary(report: &RunReport) {
    println!(
        "problem `{}`: {} generated, {} accepted ({} missing blocks, {} parse, {} validation), {} inference failures",
        report.problem_id,
        report.rejection.generated,
        report.rejection.accepted,
        report.rejection.missing_blocks,
        report.rejection.parse_failed,
        report.rejection.validation_failed,
        report.inference_failed,
    );
    println!("model       weight        L        se     rhat_max   ess_min");
    for m in &report.per_model {
        if m.accepted {
            println!(
                "{:<10} {:>7.4} {:>9.3} {:>8.4} {:>9.3} {:>9.0}",
                m.id,
                m.weight,
                m.log_evidence_bound.unwrap_or(f64::NAN),
                m.std_error.unwrap_or(f64::NAN),
                m.rhat_max.unwrap_or(f64::NAN),
                m.ess_min.unwrap_or(f64::NAN),
            );
        } else {
            println!(
                "{:<10} demoted: {}",
                m.id,
                m.demotion_reason.as_deref().unwrap_or("unknown")
            );
        }
    }
    println!("weight_ess = {:.3}", report.weight_ess);
    for (goal, stats) in &report.weighted_summary {
        for (i, s) in stats.iter().enumerate() {
            let name = if stats.len() == 1 {
                goal.clone()
            } else {
                format!("{goal}[{}]", i + 1)
            };
            let flat = report.flat_summary.get(goal).and_then(|f| f.get(i));
            println!(
                "goal {name}: weighted mean {:.4} sd {:.4} [q05 {:.4}, q50 {:.4}, q95 {:.4}]{}",
                s.mean,
                s.sd,
                s.q05,
                s.q50,
                s.q95,
                flat.map(|f| format!("  (flat mean {:.4})", f.mean))
                    .unwrap_or_default()
            );
        }
    }
}

fn stem(p: &Path) -> &str {
    p.file_stem().and_then(|s| s.to_str()).unwrap_or("input")
}
