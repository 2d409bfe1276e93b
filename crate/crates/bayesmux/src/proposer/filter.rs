//! The rejection gauntlet: block extraction, parsing, validation. Failures
//! land in counting buckets that always sum to the number of inputs.

use crate::dsl::{parse_model, validate_model, ModelSource, ParsedModel};
use serde::Serialize;

/// Where each candidate ended up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct RejectionStats {
    pub generated: usize,
    pub missing_blocks: usize,
    pub parse_failed: usize,
    pub validation_failed: usize,
    pub accepted: usize,
}

/// A candidate that survived the gauntlet.
#[derive(Debug, Clone)]
pub struct AcceptedModel {
    pub id: String,
    pub model: ParsedModel,
    pub warnings: Vec<String>,
}

/// One rejected candidate with the reason it fell out.
#[derive(Debug, Clone, Serialize)]
pub struct Rejection {
    pub id: String,
    pub stage: String,
    pub reason: String,
}

/// Full outcome of filtering a batch of sources.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub accepted: Vec<AcceptedModel>,
    pub stats: RejectionStats,
    pub rejections: Vec<Rejection>,
}

pub fn filter_valid(sources: &[ModelSource]) -> FilterOutcome {
    let mut stats = RejectionStats {
        generated: sources.len(),
        ..Default::default()
    };
    let mut accepted = Vec::new();
    let mut rejections = Vec::new();

    for s in sources {
        let model_text = match &s.model_text {
            Some(t) if !t.trim().is_empty() => t,
            _ => {
                stats.missing_blocks += 1;
                rejections.push(Rejection {
                    id: s.id.clone(),
                    stage: "extract".into(),
                    reason: "no MODEL block".into(),
                });
                continue;
            }
        };
        let parsed = match parse_model(model_text) {
            Ok(m) => m,
            Err(e) => {
                stats.parse_failed += 1;
                rejections.push(Rejection {
                    id: s.id.clone(),
                    stage: "parse".into(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let report = validate_model(&parsed);
        if !report.accepted {
            stats.validation_failed += 1;
            let reason = report
                .errors
                .iter()
                .map(|e| format!("{}: {}", e.code.as_str(), e.message))
                .collect::<Vec<_>>()
                .join("; ");
            rejections.push(Rejection {
                id: s.id.clone(),
                stage: "validate".into(),
                reason,
            });
            continue;
        }
        stats.accepted += 1;
        accepted.push(AcceptedModel {
            id: s.id.clone(),
            model: parsed,
            warnings: report.warnings,
        });
    }

    debug_assert_eq!(
        stats.generated,
        stats.missing_blocks + stats.parse_failed + stats.validation_failed + stats.accepted,
        "rejection buckets must account for every source"
    );
    FilterOutcome {
        accepted,
        stats,
        rejections,
    }
}
