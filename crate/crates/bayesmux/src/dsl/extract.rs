//! Block extraction from raw proposer output.
//!
//! A line consisting solely of `THOUGHTS` or `MODEL` (ignoring surrounding
//! whitespace) begins the respective block. The thoughts block runs until the
//! next marker; the model block runs to end of input. Absent markers yield
//! absent blocks; rejection is the caller's job.

/// Extraction result.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Blocks {
    pub thoughts: Option<String>,
    pub model: Option<String>,
}

pub fn extract_blocks(raw_text: &str) -> Blocks {
    #[derive(PartialEq)]
    enum State {
        Outside,
        Thoughts,
        Model,
    }
    let mut state = State::Outside;
    let mut thoughts: Option<Vec<&str>> = None;
    let mut model: Option<Vec<&str>> = None;

    for line in raw_text.lines() {
        match line.trim() {
            "THOUGHTS" => {
                thoughts.get_or_insert_with(Vec::new);
                state = State::Thoughts;
                continue;
            }
            "MODEL" => {
                model.get_or_insert_with(Vec::new);
                state = State::Model;
                continue;
            }
            _ => {}
        }
        match state {
            State::Outside => {}
            State::Thoughts => thoughts.as_mut().unwrap().push(line),
            State::Model => model.as_mut().unwrap().push(line),
        }
    }

    Blocks {
        thoughts: thoughts.map(|ls| ls.join("\n")),
        model: model.map(|ls| ls.join("\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_thoughts_and_model() {
        let raw = "THOUGHTS\nuse a beta prior\nMODEL\nparams{...}";
        let b = extract_blocks(raw);
        assert_eq!(b.thoughts.as_deref(), Some("use a beta prior"));
        assert_eq!(b.model.as_deref(), Some("params{...}"));
    }

    #[test]
    fn missing_markers_yield_absent_blocks() {
        let b = extract_blocks("no markers at all");
        assert_eq!(b, Blocks::default());
    }

    #[test]
    fn model_block_runs_to_end_of_input() {
        let raw = "preamble\nMODEL\nline1\n\nline3\n";
        let b = extract_blocks(raw);
        assert_eq!(b.model.as_deref(), Some("line1\n\nline3"));
        assert!(b.thoughts.is_none());
    }

    #[test]
    fn marker_lines_tolerate_surrounding_whitespace() {
        let raw = "  THOUGHTS \t\r\nplan\n MODEL\ndata{}";
        let b = extract_blocks(raw);
        assert_eq!(b.thoughts.as_deref(), Some("plan"));
        assert_eq!(b.model.as_deref(), Some("data{}"));
    }

    #[test]
    fn model_only_output() {
        let b = extract_blocks("MODEL\ndata{int N;}");
        assert!(b.thoughts.is_none());
        assert_eq!(b.model.as_deref(), Some("data{int N;}"));
    }
}
