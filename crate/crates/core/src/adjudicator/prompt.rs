use super::AdjudicateError;
use crate::retriever::CandidatePath;

/// Fixed system instruction sent with every adjudication prompt.
pub const SYSTEM_PREAMBLE: &str =
    "You are a careful reasoner. Only use the provided KG reasoning paths as evidence. Cite the most relevant path(s) and answer concisely.";

/// Arrow between entities in a verbalized path, around the relation name.
const ARROW_OPEN: &str = " --";
const ARROW_CLOSE: &str = "--> ";

/// `e0 --r1--> e1 --r2--> e2`
pub fn verbalize_path(path: &CandidatePath) -> String {
    let mut out = path.entity_chain[0].clone();
    for (rel, ent) in path.schema.relations().iter().zip(&path.entity_chain[1..]) {
        out.push_str(ARROW_OPEN);
        out.push_str(rel);
        out.push_str(ARROW_CLOSE);
        out.push_str(ent);
    }
    out
}

/// Last entity of a verbalized path.
pub fn verbalized_terminal(path: &str) -> &str {
    path.rsplit(ARROW_CLOSE).next().unwrap_or(path).trim()
}

/// A rendered one-shot prompt and its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub question: String,
    /// Verbalized paths; item `i` is displayed as number `i + 1`.
    pub paths: Vec<String>,
    pub system: &'static str,
    /// Full prompt text, system part included.
    pub prompt: String,
}

/// Fill the adjudication template with a question and numbered paths.
pub fn render_prompt(question: &str, paths: &[String]) -> Result<PromptBundle, AdjudicateError> {
    if question.trim().is_empty() {
        return Err(AdjudicateError::EmptyQuestion);
    }
    if paths.is_empty() {
        return Err(AdjudicateError::NoPaths);
    }
    let mut prompt = String::new();
    prompt.push_str("System:\n");
    prompt.push_str(SYSTEM_PREAMBLE);
    prompt.push_str("\n\nUser:\n");
    prompt.push_str(&format!("Question: \"{question}\"\n\n"));
    prompt.push_str(&format!("Retrieved paths (Top-{}):\n", paths.len()));
    for (i, p) in paths.iter().enumerate() {
        prompt.push_str(&format!("{}. {}\n", i + 1, p));
    }
    prompt.push_str("\nAssistant (required format):\n");
    prompt.push_str("Answer: <short answer>\n");
    prompt.push_str("Supporting path(s): [indexes from the list above]\n");
    prompt.push_str("Rationale (1-2 sentences): why those paths imply the answer.\n");
    Ok(PromptBundle { question: question.to_string(), paths: paths.to_vec(), system: SYSTEM_PREAMBLE, prompt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::Schema;

    fn path(schema: &[&str], chain: &[&str]) -> CandidatePath {
        CandidatePath { schema: Schema::new(schema.iter().copied()), entity_chain: chain.iter().map(|s| s.to_string()).collect() }
    }

    #[test]
    fn verbalize_one_and_two_hops() {
        assert_eq!(verbalize_path(&path(&["r1"], &["a", "b"])), "a --r1--> b");
        let two = verbalize_path(&path(&["r1", "r2"], &["a", "b", "c"]));
        assert_eq!(two, "a --r1--> b --r2--> c");
        assert_eq!(two.matches("--> ").count(), 2);
        assert_eq!(verbalized_terminal(&two), "c");
    }

    #[test]
    fn numbered_items() {
        let paths: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let b = render_prompt("q?", &paths).unwrap();
        for i in 1..=3 {
            assert!(b.prompt.contains(&format!("\n{i}. ")));
        }
        assert!(!b.prompt.contains("\n4. "));
        assert!(b.prompt.contains(SYSTEM_PREAMBLE));
        assert_eq!(b.system, SYSTEM_PREAMBLE);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(render_prompt("q", &[]), Err(AdjudicateError::NoPaths)));
        assert!(matches!(render_prompt("  ", &["p".into()]), Err(AdjudicateError::EmptyQuestion)));
    }
}
