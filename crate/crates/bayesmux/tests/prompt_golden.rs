//! Prompt assembly against the shipped resources must be byte-stable; any
//! resource edit must show up as a deliberate snapshot update.

use bayesmux::proposer::{assemble_prompt, parse_problem_file};
use std::path::{Path, PathBuf};

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

#[test]
fn assembled_coin_prompt_matches_snapshot() {
    let problem_text = std::fs::read_to_string(repo_path("fixtures/problems/coin.txt")).unwrap();
    let problem = parse_problem_file("coin", &problem_text).unwrap();
    let msgs = assemble_prompt(&problem, &repo_path("resources")).unwrap();
    let rendered = serde_json::to_string_pretty(&msgs).unwrap() + "\n";
    let snapshot = std::fs::read_to_string(repo_path("fixtures/golden/prompt_coin.json")).unwrap();
    assert_eq!(
        rendered, snapshot,
        "assembled prompt diverged from fixtures/golden/prompt_coin.json"
    );
}

#[test]
fn assembly_is_deterministic() {
    let problem_text = std::fs::read_to_string(repo_path("fixtures/problems/coin.txt")).unwrap();
    let problem = parse_problem_file("coin", &problem_text).unwrap();
    let a = assemble_prompt(&problem, &repo_path("resources")).unwrap();
    let b = assemble_prompt(&problem, &repo_path("resources")).unwrap();
    assert_eq!(a, b);
    // system + three example pairs + the user problem
    assert_eq!(a.len(), 1 + 3 * 2 + 1);
}
