//! Problem files: plain text with `PROBLEM`, `DATA`, and `GOAL` marker lines
//! starting each block. The DATA body must be the JSON dataset.

use super::ProposerError;
use crate::density::Dataset;

/// One user problem: the three text blocks plus the parsed dataset.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub problem_id: String,
    pub problem_text: String,
    pub data_text: String,
    pub goal_text: String,
    pub dataset: Dataset,
}

pub fn parse_problem_file(problem_id: &str, text: &str) -> Result<ProblemSpec, ProposerError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Block {
        None,
        Problem,
        Data,
        Goal,
    }
    let mut current = Block::None;
    let mut problem: Vec<&str> = Vec::new();
    let mut data: Vec<&str> = Vec::new();
    let mut goal: Vec<&str> = Vec::new();
    for line in text.lines() {
        match line.trim() {
            "PROBLEM" => {
                current = Block::Problem;
                continue;
            }
            "DATA" => {
                current = Block::Data;
                continue;
            }
            "GOAL" => {
                current = Block::Goal;
                continue;
            }
            _ => {}
        }
        match current {
            Block::None => {}
            Block::Problem => problem.push(line),
            Block::Data => data.push(line),
            Block::Goal => goal.push(line),
        }
    }
    let problem_text = problem.join("\n").trim().to_string();
    let data_text = data.join("\n").trim().to_string();
    let goal_text = goal.join("\n").trim().to_string();
    if problem_text.is_empty() || data_text.is_empty() || goal_text.is_empty() {
        return Err(ProposerError::BadProblem(
            "PROBLEM, DATA, and GOAL blocks must all be present and non-empty".into(),
        ));
    }
    let dataset = Dataset::from_json_str(&data_text)
        .map_err(|e| ProposerError::BadProblem(format!("DATA block: {e}")))?;
    Ok(ProblemSpec {
        problem_id: problem_id.to_string(),
        problem_text,
        data_text,
        goal_text,
        dataset,
    })
}
