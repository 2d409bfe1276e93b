//! Prompt assembly from on-disk resources.
//!
//! The system prompt and few-shot examples ship as data files so prompt
//! iteration needs no rebuild: `system_prompt.txt` plus a `fewshot/`
//! directory of `<name>_input.txt` / `<name>_output.txt` pairs, ordered by
//! file name. The user turn reproduces the problem-file layout.

use super::{ProblemSpec, ProposerError};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One chat message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message {
            role: "system".into(),
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: "user".into(),
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message {
            role: "assistant".into(),
            content: content.into(),
        }
    }
}

/// Build the message list: system prompt, few-shot pairs, then the problem.
/// Byte-stable given fixed resources.
pub fn assemble_prompt(
    p: &ProblemSpec,
    resources_dir: &Path,
) -> Result<Vec<Message>, ProposerError> {
    let system_path = resources_dir.join("system_prompt.txt");
    let system = std::fs::read_to_string(&system_path).map_err(|_| {
        ProposerError::MissingResource(format!(
            "system prompt not found at {}",
            system_path.display()
        ))
    })?;

    let mut messages = vec![Message::system(system.trim_end())];

    let fewshot_dir = resources_dir.join("fewshot");
    if fewshot_dir.is_dir() {
        let mut inputs: Vec<std::path::PathBuf> = std::fs::read_dir(&fewshot_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.ends_with("_input.txt"))
                    .unwrap_or(false)
            })
            .collect();
        inputs.sort();
        for input_path in inputs {
            let name = input_path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap()
                .trim_end_matches("_input.txt")
                .to_string();
            let output_path = fewshot_dir.join(format!("{name}_output.txt"));
            let input = std::fs::read_to_string(&input_path)?;
            let output = std::fs::read_to_string(&output_path).map_err(|_| {
                ProposerError::MissingResource(format!(
                    "few-shot example `{name}` has an input but no output file"
                ))
            })?;
            messages.push(Message::user(input.trim_end()));
            messages.push(Message::assistant(output.trim_end()));
        }
    }

    messages.push(Message::user(format!(
        "PROBLEM\n{}\nDATA\n{}\nGOAL\n{}",
        p.problem_text, p.data_text, p.goal_text
    )));
    Ok(messages)
}
