//! End-to-end orchestration: propose, filter, per-model inference and
//! evidence, weighting, pooling, and report emission.
//!
//! Per-model work runs under a dedicated thread pool sized by
//! `parallel_models`, but every model's seed derives from
//! (master_seed, model index), so the parallelism degree never changes any
//! number in the report. A model whose inference fails (cannot initialize,
//! degenerate proposal) is demoted to rejected-with-reason and excluded from
//! the weight normalization; the other models' results are untouched.

use crate::density::{DensityOptions, LogDensityFn};
use crate::ensemble::{
    combine, flat_average, snis_weights, weight_ess, weighted_summary, EnsembleError,
    ModelPosterior, SummaryStats, WeightedPosterior,
};
use crate::evidence::{iw_elbo, moment_match, EvidenceConfig};
use crate::mcmc::{diagnostics, sample_posterior, McmcConfig, PosteriorSamples};
use crate::proposer::{
    corpus_propose, filter_valid, llm_propose, parse_problem_file, AcceptedModel, ProblemSpec,
    ProposerConfig, ProposerError, ProposerMode, RejectionStats,
};
use crate::seed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Full configuration of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub problem_file: PathBuf,
    pub proposer: ProposerConfig,
    pub mcmc: McmcConfig,
    pub evidence: EvidenceConfig,
    pub parallel_models: usize,
    pub master_seed: u64,
    /// Divide truncated priors by their retained mass (see density layer).
    pub renormalize_truncation: bool,
    pub output_dir: Option<PathBuf>,
    /// Also write the pooled weighted-sample CSV when an output dir is set.
    pub write_samples: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem_file: PathBuf::new(),
            proposer: ProposerConfig::default(),
            mcmc: McmcConfig::default(),
            evidence: EvidenceConfig::default(),
            parallel_models: 1,
            master_seed: 0,
            renormalize_truncation: true,
            output_dir: None,
            write_samples: false,
        }
    }
}

/// One row of the per-model report table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerModelRecord {
    pub id: String,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demotion_reason: Option<String>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub log_evidence_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub k: usize,
    pub r: usize,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhat_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess_min: Option<f64>,
    pub elapsed_ms: u64,
}

/// The run report written to `report.json`. Everything here except
/// `elapsed_ms` fields is a pure function of (inputs, RunConfig).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub problem_id: String,
    pub rejection: RejectionStats,
    pub inference_failed: usize,
    pub per_model: Vec<PerModelRecord>,
    pub weighted_summary: BTreeMap<String, Vec<SummaryStats>>,
    pub flat_summary: BTreeMap<String, Vec<SummaryStats>>,
    pub weight_ess: f64,
    pub seeds: SeedEcho,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedEcho {
    pub master_seed: u64,
    /// Derived per-model seeds, in accepted-model order.
    pub per_model: Vec<u64>,
}

/// Artifact inventory and timings, written next to the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub engine_version: String,
    pub problem_file: PathBuf,
    pub report_file: Option<PathBuf>,
    pub samples_file: Option<PathBuf>,
    pub rejection: RejectionStats,
    pub evidence_records: usize,
    pub wall_clock_ms: u64,
}

/// In-memory result of a run.
pub struct RunOutcome {
    pub report: RunReport,
    pub manifest: RunManifest,
    pub weighted: WeightedPosterior,
    pub flat: WeightedPosterior,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("E_NO_ACCEPTED_MODELS: no candidate survived filtering and inference")]
    NoAcceptedModels,
    #[error("proposer: {0}")]
    Proposer(#[from] ProposerError),
    #[error("ensemble: {0}")]
    Ensemble(#[from] EnsembleError),
    #[error("E_IO: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

struct ModelRun {
    record: PerModelRecord,
    fitted: Option<FittedModel>,
}

struct FittedModel {
    id: String,
    density: LogDensityFn,
    samples: PosteriorSamples,
}

fn infer_one(
    accepted: &AcceptedModel,
    problem: &ProblemSpec,
    cfg: &RunConfig,
    model_seed: u64,
) -> ModelRun {
    let started = Instant::now();
    let mut record = PerModelRecord {
        id: accepted.id.clone(),
        accepted: false,
        demotion_reason: None,
        log_evidence_bound: None,
        std_error: None,
        k: cfg.evidence.k,
        r: cfg.evidence.r,
        weight: 0.0,
        rhat_max: None,
        ess_min: None,
        elapsed_ms: 0,
    };
    let demote = |reason: String, record: &mut PerModelRecord| {
        record.demotion_reason = Some(reason);
        record.elapsed_ms = started.elapsed().as_millis() as u64;
    };

    let density = match LogDensityFn::compile(
        &accepted.model,
        &problem.dataset,
        DensityOptions {
            renormalize_truncation: cfg.renormalize_truncation,
        },
    ) {
        Ok(d) => d,
        Err(e) => {
            demote(e.to_string(), &mut record);
            return ModelRun {
                record,
                fitted: None,
            };
        }
    };

    let mcmc_cfg = McmcConfig {
        seed: seed::derive(model_seed, &["mcmc".into()]),
        ..cfg.mcmc.clone()
    };
    let samples = match sample_posterior(&density, &mcmc_cfg) {
        Ok(s) => s,
        Err(e) => {
            demote(e.to_string(), &mut record);
            return ModelRun {
                record,
                fitted: None,
            };
        }
    };
    let diag = diagnostics(&samples);
    record.rhat_max = diag
        .split_rhat
        .iter()
        .copied()
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    record.ess_min = diag.ess.iter().copied().fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.min(v)))
    });

    let proposal = match moment_match(&samples) {
        Ok(q) => q,
        Err(e) => {
            demote(e.to_string(), &mut record);
            return ModelRun {
                record,
                fitted: None,
            };
        }
    };
    let ev_cfg = EvidenceConfig {
        seed: seed::derive(model_seed, &["evidence".into()]),
        ..cfg.evidence.clone()
    };
    let estimate = iw_elbo(&density, &proposal, &ev_cfg);
    record.log_evidence_bound = Some(estimate.value);
    record.std_error = Some(estimate.std_error);
    record.accepted = true;
    record.elapsed_ms = started.elapsed().as_millis() as u64;

    ModelRun {
        record,
        fitted: Some(FittedModel {
            id: accepted.id.clone(),
            density,
            samples,
        }),
    }
}

/// Run the full pipeline for a problem file.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let wall_start = Instant::now();
    let problem_text =
        std::fs::read_to_string(&cfg.problem_file).map_err(|source| PipelineError::Io {
            path: cfg.problem_file.clone(),
            source,
        })?;
    let problem_id = cfg
        .problem_file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("problem")
        .to_string();
    let problem = parse_problem_file(&problem_id, &problem_text)?;

    let sources = match cfg.proposer.mode {
        ProposerMode::Corpus => corpus_propose(&cfg.proposer, cfg.proposer.n_candidates)?,
        ProposerMode::Llm => llm_propose(&cfg.proposer, &problem, cfg.proposer.n_candidates)?,
    };
    let outcome = filter_valid(&sources);
    if outcome.accepted.is_empty() {
        return Err(PipelineError::NoAcceptedModels);
    }

    let model_seeds: Vec<u64> = (0..outcome.accepted.len())
        .map(|i| seed::derive(cfg.master_seed, &["model".into(), (i as u64).into()]))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallel_models.max(1))
        .build()
        .expect("thread pool");
    let runs: Vec<ModelRun> = pool.install(|| {
        use rayon::prelude::*;
        outcome
            .accepted
            .par_iter()
            .zip(model_seeds.par_iter())
            .map(|(am, &ms)| infer_one(am, &problem, cfg, ms))
            .collect()
    });

    let mut records: Vec<PerModelRecord> = Vec::with_capacity(runs.len());
    let mut fitted: Vec<FittedModel> = Vec::new();
    for run in runs {
        records.push(run.record);
        if let Some(f) = run.fitted {
            fitted.push(f);
        }
    }
    let inference_failed = records.iter().filter(|r| !r.accepted).count();
    if fitted.is_empty() {
        return Err(PipelineError::NoAcceptedModels);
    }

    let survivor_scores: Vec<f64> = records
        .iter()
        .filter(|r| r.accepted)
        .map(|r| r.log_evidence_bound.expect("accepted record has a bound"))
        .collect();
    let weights = snis_weights(&survivor_scores)?;
    {
        let mut wi = 0;
        for r in records.iter_mut() {
            if r.accepted {
                r.weight = weights.weights[wi];
                wi += 1;
            }
        }
    }

    let posteriors: Vec<ModelPosterior<'_>> = fitted
        .iter()
        .map(|f| ModelPosterior {
            model_id: f.id.clone(),
            density: &f.density,
            samples: &f.samples,
        })
        .collect();
    let weighted = combine(&posteriors, &weights)?;
    let flat = flat_average(&posteriors)?;

    let mut weighted_map = BTreeMap::new();
    let mut flat_map = BTreeMap::new();
    for goal in &weighted.goal_names {
        if let Some(s) = weighted_summary(&weighted, goal) {
            weighted_map.insert(goal.clone(), s);
        }
        if let Some(s) = weighted_summary(&flat, goal) {
            flat_map.insert(goal.clone(), s);
        }
    }

    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        problem_id: problem.problem_id.clone(),
        rejection: outcome.stats,
        inference_failed,
        per_model: records,
        weighted_summary: weighted_map,
        flat_summary: flat_map,
        weight_ess: weight_ess(&weights),
        seeds: SeedEcho {
            master_seed: cfg.master_seed,
            per_model: model_seeds,
        },
        config: cfg.clone(),
    };

    let mut manifest = RunManifest {
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        problem_file: cfg.problem_file.clone(),
        report_file: None,
        samples_file: None,
        rejection: outcome.stats,
        evidence_records: fitted.len(),
        wall_clock_ms: 0,
    };

    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: dir.clone(),
            source,
        })?;
        let report_path = dir.join("report.json");
        write_json(&report_path, &report)?;
        manifest.report_file = Some(report_path);
        if cfg.write_samples {
            let samples_path = dir.join("weighted_samples.csv");
            write_samples_csv(&samples_path, &weighted)?;
            manifest.samples_file = Some(samples_path);
        }
        manifest.wall_clock_ms = wall_start.elapsed().as_millis() as u64;
        write_json(&dir.join("manifest.json"), &manifest)?;
    } else {
        manifest.wall_clock_ms = wall_start.elapsed().as_millis() as u64;
    }

    Ok(RunOutcome {
        report,
        manifest,
        weighted,
        flat,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    std::fs::write(path, text + "\n").map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Pooled weighted draws: `model_id,weight,<goal components...>`.
fn write_samples_csv(path: &Path, wp: &WeightedPosterior) -> Result<(), PipelineError> {
    let mut header = String::from("model_id,weight");
    for (g, &len) in wp.goal_names.iter().zip(wp.goal_lens.iter()) {
        if len == 1 {
            header.push_str(&format!(",{g}"));
        } else {
            for i in 1..=len {
                header.push_str(&format!(",{g}[{i}]"));
            }
        }
    }
    let mut out = header;
    out.push('\n');
    for m in &wp.models {
        for draw in &m.draws {
            out.push_str(&m.model_id);
            out.push_str(&format!(",{}", m.per_draw_weight));
            for goal_vals in draw {
                for v in goal_vals {
                    out.push_str(&format!(",{v}"));
                }
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-draw CSV for one model in constrained space:
/// `chain,iter,<parameter names...>`.
pub fn write_draws_csv(path: &Path, samples: &PosteriorSamples) -> Result<(), PipelineError> {
    let names = samples.space.coordinate_names();
    let mut out = String::from("chain,iter");
    for n in &names {
        out.push_str(&format!(",{n}"));
    }
    out.push('\n');
    for (chain, draws) in samples.constrained_draws.iter().enumerate() {
        for (iter, draw) in draws.iter().enumerate() {
            out.push_str(&format!("{chain},{iter}"));
            for v in draw {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}
