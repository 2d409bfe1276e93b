//! Candidate-model proposers and the rejection filter.
//!
//! Two sources of candidates share one output type: a deterministic corpus
//! sampler (files drawn uniformly with replacement, mirroring a generator
//! that emits duplicates) and a chat-completion HTTP client. Every raw
//! output then runs the extract -> parse -> validate gauntlet; failures are
//! counted, never fatal.

mod corpus;
mod filter;
mod llm;
mod problem;
mod prompt;

pub use corpus::corpus_propose;
pub use filter::{filter_valid, AcceptedModel, FilterOutcome, RejectionStats};
pub use llm::{llm_propose, ChatResponse, LlmClient};
pub use problem::{parse_problem_file, ProblemSpec};
pub use prompt::{assemble_prompt, Message};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

/// Where candidates come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposerMode {
    Corpus,
    Llm,
}

/// Proposer configuration; the corpus fields drive deterministic runs, the
/// endpoint fields drive live generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposerConfig {
    pub mode: ProposerMode,
    pub corpus_dir: Option<PathBuf>,
    pub endpoint_url: Option<String>,
    /// Name of the environment variable holding the API key; the key itself
    /// is never stored or logged.
    pub api_key_env: Option<String>,
    pub model_name: String,
    pub temperature: f64,
    pub n_candidates: usize,
    pub seed: u64,
    /// Corpus mode only: take every corpus file exactly once, in name order,
    /// instead of sampling with replacement. Useful when a run must hit each
    /// candidate exactly once (oracle comparisons); `n_candidates` is ignored.
    pub exhaustive: bool,
    /// Directory holding the system prompt and few-shot resources.
    pub resources_dir: Option<PathBuf>,
    /// Maximum in-flight requests in llm mode.
    pub concurrency: usize,
    /// Retries per request on 5xx or transport failures.
    pub max_retries: u32,
    /// Base backoff in milliseconds, doubled per retry.
    pub backoff_ms: u64,
}

impl Default for ProposerConfig {
    fn default() -> Self {
        ProposerConfig {
            mode: ProposerMode::Corpus,
            corpus_dir: None,
            endpoint_url: None,
            api_key_env: None,
            model_name: "default".into(),
            temperature: 1.0,
            n_candidates: 16,
            seed: 0,
            exhaustive: false,
            resources_dir: None,
            concurrency: 8,
            max_retries: 3,
            backoff_ms: 100,
        }
    }
}

impl ProposerConfig {
    pub fn validate(&self) -> Result<(), ProposerError> {
        if self.n_candidates < 1 {
            return Err(ProposerError::BadConfig(
                "n_candidates must be at least 1".into(),
            ));
        }
        if self.temperature < 0.0 {
            return Err(ProposerError::BadConfig(
                "temperature must be nonnegative".into(),
            ));
        }
        if self.concurrency < 1 {
            return Err(ProposerError::BadConfig(
                "concurrency must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ProposerError {
    #[error("E_EMPTY_CORPUS: no candidate files under {0}")]
    EmptyCorpus(PathBuf),
    #[error("E_MISSING_RESOURCE: {0}")]
    MissingResource(String),
    #[error("E_HTTP({status}) on request {request}: {message}")]
    Http {
        status: u16,
        request: usize,
        message: String,
    },
    #[error("E_TIMEOUT on request {request} after {attempts} attempts: {message}")]
    Timeout {
        request: usize,
        attempts: u32,
        message: String,
    },
    #[error("E_BAD_RESPONSE on request {request}: {message}")]
    BadResponse { request: usize, message: String },
    #[error("invalid problem file: {0}")]
    BadProblem(String),
    #[error("invalid proposer configuration: {0}")]
    BadConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
