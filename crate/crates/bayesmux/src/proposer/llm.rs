//! Chat-completion client: OpenAI-compatible wire shape, bounded request
//! concurrency, retries with exponential backoff on 5xx and transport
//! failures. All network access goes through [`LlmClient`], so tests drive
//! everything against a local mock server.

use super::{Message, ProblemSpec, ProposerConfig, ProposerError};
use crate::dsl::ModelSource;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
}

/// Decoded completion response (the fields this client reads).
#[derive(Debug, Clone, Deserialize)]
pub struct ChatResponse {
    pub choices: Vec<Choice>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Choice {
    pub message: ChoiceMessage,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChoiceMessage {
    pub content: Option<String>,
}

/// HTTP client for one endpoint.
pub struct LlmClient {
    agent: ureq::Agent,
    endpoint_url: String,
    api_key: Option<String>,
    model_name: String,
    temperature: f64,
    concurrency: usize,
    max_retries: u32,
    backoff_ms: u64,
}

impl LlmClient {
    /// Build from configuration. The API key is read from the environment
    /// variable named in the config and held only in memory.
    pub fn from_config(cfg: &ProposerConfig) -> Result<Self, ProposerError> {
        cfg.validate()?;
        let endpoint_url = cfg
            .endpoint_url
            .clone()
            .ok_or_else(|| ProposerError::BadConfig("llm mode requires endpoint_url".into()))?;
        let api_key = match &cfg.api_key_env {
            Some(var) => match std::env::var(var) {
                Ok(v) => Some(v),
                Err(_) => {
                    return Err(ProposerError::BadConfig(format!(
                        "API key environment variable `{var}` is not set"
                    )))
                }
            },
            None => None,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(LlmClient {
            agent,
            endpoint_url,
            api_key,
            model_name: cfg.model_name.clone(),
            temperature: cfg.temperature,
            concurrency: cfg.concurrency,
            max_retries: cfg.max_retries,
            backoff_ms: cfg.backoff_ms,
        })
    }

    fn one_request(
        &self,
        messages: &[Message],
        request_idx: usize,
    ) -> Result<String, ProposerError> {
        let body = ChatRequest {
            model: &self.model_name,
            messages,
            temperature: self.temperature,
        };
        let mut attempt = 0u32;
        loop {
            let mut req = self.agent.post(&self.endpoint_url);
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", &format!("Bearer {key}"));
            }
            let result = req.send_json(&body);
            match result {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if (200..300).contains(&status) {
                        let parsed: Result<ChatResponse, _> = resp.body_mut().read_json();
                        return match parsed {
                            Ok(cr) => {
                                match cr.choices.first().and_then(|c| c.message.content.clone()) {
                                    Some(content) => Ok(content),
                                    None => Err(ProposerError::BadResponse {
                                        request: request_idx,
                                        message: "no choices[0].message.content field".into(),
                                    }),
                                }
                            }
                            Err(e) => Err(ProposerError::BadResponse {
                                request: request_idx,
                                message: format!("undecodable body: {e}"),
                            }),
                        };
                    }
                    if status >= 500 && attempt < self.max_retries {
                        log::warn!("request {request_idx}: status {status}, retry {attempt}");
                        self.backoff(attempt);
                        attempt += 1;
                        continue;
                    }
                    return Err(ProposerError::Http {
                        status,
                        request: request_idx,
                        message: format!("after {attempt} retries"),
                    });
                }
                Err(e) => {
                    if attempt < self.max_retries {
                        log::warn!("request {request_idx}: transport error {e}, retry {attempt}");
                        self.backoff(attempt);
                        attempt += 1;
                        continue;
                    }
                    return Err(ProposerError::Timeout {
                        request: request_idx,
                        attempts: attempt + 1,
                        message: e.to_string(),
                    });
                }
            }
        }
    }

    fn backoff(&self, attempt: u32) {
        let ms = self
            .backoff_ms
            .saturating_mul(1u64 << attempt.min(6))
            .min(5_000);
        std::thread::sleep(Duration::from_millis(ms));
    }

    /// Issue `n` completions with bounded concurrency. Results come back
    /// ordered by request index regardless of completion order; the first
    /// failure (by index) aborts the batch.
    pub fn complete_n(&self, messages: &[Message], n: usize) -> Result<Vec<String>, ProposerError> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<String, ProposerError>>>> =
            Mutex::new((0..n).map(|_| None).collect());
        let workers = self.concurrency.min(n).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::SeqCst);
                    if idx >= n {
                        break;
                    }
                    let result = self.one_request(messages, idx);
                    slots.lock().unwrap()[idx] = Some(result);
                });
            }
        });
        let collected = slots.into_inner().unwrap();
        let mut out = Vec::with_capacity(n);
        for slot in collected {
            out.push(slot.expect("worker pool filled every slot")?);
        }
        Ok(out)
    }
}

/// Propose `n` candidates from a live endpoint.
pub fn llm_propose(
    cfg: &ProposerConfig,
    problem: &ProblemSpec,
    n: usize,
) -> Result<Vec<ModelSource>, ProposerError> {
    let resources = cfg
        .resources_dir
        .as_ref()
        .ok_or_else(|| ProposerError::BadConfig("llm mode requires resources_dir".into()))?;
    let messages = super::assemble_prompt(problem, resources)?;
    let client = LlmClient::from_config(cfg)?;
    let completions = client.complete_n(&messages, n)?;
    Ok(completions
        .into_iter()
        .enumerate()
        .map(|(i, raw)| ModelSource::new(format!("m{i:04}"), raw))
        .collect())
}
