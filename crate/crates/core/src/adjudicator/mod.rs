//! Prompt rendering, the single language-model call, and response parsing.

mod client;
mod parse;
mod prompt;

pub use client::{mock_client, ClientContract, FilteringMock, HttpClient, LlmClient, MockClient, TransportError};
pub use parse::{parse_response, Adjudication, ParseError};
pub use prompt::{render_prompt, verbalize_path, verbalized_terminal, PromptBundle, SYSTEM_PREAMBLE};

use thiserror::Error;

use crate::retriever::ScoredCandidate;

#[derive(Debug, Error)]
pub enum AdjudicateError {
    #[error("prompt needs at least one path")]
    NoPaths,
    #[error("prompt needs a non-empty question")]
    EmptyQuestion,
    #[error("invalid client contract: {0}")]
    InvalidContract(String),
    #[error("{source} (after {attempts} attempts)")]
    Transport { attempts: u32, source: TransportError },
    #[error("unparseable response: {source}")]
    Parse { source: ParseError },
}

impl AdjudicateError {
    pub fn is_transport(&self) -> bool {
        matches!(self, AdjudicateError::Transport { .. })
    }
}

/// Parsed answer plus request accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub adjudication: Adjudication,
    /// Requests that returned a response. Always 1 on success.
    pub calls: u32,
    /// Requests sent, failed ones included.
    pub attempts: u32,
}

/// Send `bundle` once, retrying only on transport failure, and parse the reply.
pub fn adjudicate(client: &dyn LlmClient, bundle: &PromptBundle) -> Result<Outcome, AdjudicateError> {
    let mut attempts = 0;
    let text = loop {
        attempts += 1;
        match client.complete(bundle) {
            Ok(text) => break text,
            Err(e) if attempts > client.max_retries() => {
                return Err(AdjudicateError::Transport { attempts, source: e });
            }
            Err(e) => log::warn!("attempt {attempts} failed: {e}"),
        }
    };
    let adjudication = parse_response(&text, bundle.paths.len()).map_err(|source| AdjudicateError::Parse { source })?;
    if adjudication.has_warnings() {
        log::warn!("dropped out-of-range path indices {:?}", adjudication.dropped_indices);
    }
    Ok(Outcome { adjudication, calls: 1, attempts })
}

/// Verbalize candidates in rank order and render the prompt.
pub fn prompt_for(question: &str, candidates: &[ScoredCandidate]) -> Result<PromptBundle, AdjudicateError> {
    let paths: Vec<String> = candidates.iter().map(|c| verbalize_path(&c.path)).collect();
    render_prompt(question, &paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    fn bundle() -> PromptBundle {
        render_prompt("where?", &["a --r--> b".into(), "a --s--> c".into()]).unwrap()
    }

    struct Flaky {
        failures: u32,
        seen: AtomicU32,
        retries: u32,
        reply: &'static str,
    }

    impl LlmClient for Flaky {
        fn complete(&self, _: &PromptBundle) -> Result<String, TransportError> {
            if self.seen.fetch_add(1, Ordering::SeqCst) < self.failures {
                Err(TransportError("timeout".into()))
            } else {
                Ok(self.reply.into())
            }
        }
        fn max_retries(&self) -> u32 {
            self.retries
        }
    }

    #[test]
    fn mock_picks_path_one() {
        let b = bundle();
        let client = MockClient::new();
        let out = adjudicate(&client, &b).unwrap();
        assert_eq!(out.adjudication.answer, "b");
        assert_eq!(out.adjudication.supporting_indices, [1]);
        assert_eq!(out.calls, 1);
        assert_eq!(client.calls(), 1);
        assert_eq!(mock_client(&b), mock_client(&b));
    }

    #[test]
    fn filtering_mock_falls_back() {
        let b = bundle();
        let m = FilteringMock::new(|_: &PromptBundle, t: &str| t == "c");
        assert_eq!(adjudicate(&m, &b).unwrap().adjudication.answer, "c");
        let m = FilteringMock::new(|_: &PromptBundle, _: &str| false);
        assert_eq!(adjudicate(&m, &b).unwrap().adjudication.supporting_indices, [1]);
    }

    #[test]
    fn retries_only_transport() {
        let ok = Flaky { failures: 2, seen: AtomicU32::new(0), retries: 2, reply: "Answer: x" };
        let out = adjudicate(&ok, &bundle()).unwrap();
        assert_eq!((out.calls, out.attempts), (1, 3));

        let fail = Flaky { failures: 1, seen: AtomicU32::new(0), retries: 0, reply: "Answer: x" };
        let err = adjudicate(&fail, &bundle()).unwrap_err();
        assert!(err.is_transport());

        let garbled = Flaky { failures: 0, seen: AtomicU32::new(0), retries: 5, reply: "no idea" };
        assert!(matches!(adjudicate(&garbled, &bundle()), Err(AdjudicateError::Parse { .. })));
        assert_eq!(garbled.seen.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn unreachable_endpoint_is_transport_error() {
        let mut c = ClientContract::new("http://127.0.0.1:9/complete");
        c.timeout_secs = 1.0;
        let client = HttpClient::new(c).unwrap();
        assert!(adjudicate(&client, &bundle()).unwrap_err().is_transport());
    }

    #[test]
    fn contract_validation() {
        let mut c = ClientContract::new("http://x");
        c.timeout_secs = 0.0;
        assert!(c.validate().is_err());
        assert!(HttpClient::new(c).is_err());
    }
}
