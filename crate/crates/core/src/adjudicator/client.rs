use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;
use thiserror::Error;

use super::prompt::{verbalized_terminal, PromptBundle};
use super::AdjudicateError;

#[derive(Debug, Error)]
#[error("transport failure: {0}")]
pub struct TransportError(pub String);

/// Where and how to reach a completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientContract {
    pub endpoint: String,
    pub timeout_secs: f64,
    pub max_retries: u32,
    /// Name of the environment variable holding a bearer token.
    pub token_env: Option<String>,
    pub max_tokens: u32,
    pub temperature: f64,
}

impl ClientContract {
    pub fn new(endpoint: impl Into<String>) -> Self {
        ClientContract { endpoint: endpoint.into(), timeout_secs: 30.0, max_retries: 0, token_env: None, max_tokens: 256, temperature: 0.0 }
    }

    pub fn validate(&self) -> Result<(), AdjudicateError> {
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(AdjudicateError::InvalidContract(format!("timeout must be > 0, got {}", self.timeout_secs)));
        }
        if self.endpoint.trim().is_empty() {
            return Err(AdjudicateError::InvalidContract("empty endpoint".into()));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(AdjudicateError::InvalidContract(format!("bad temperature {}", self.temperature)));
        }
        Ok(())
    }
}

/// One request-response exchange with a language model.
///
/// Implementations are shared across threads; each `complete` call is one
/// independent request.
pub trait LlmClient: Send + Sync {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError>;

    /// Extra attempts allowed after a transport failure.
    fn max_retries(&self) -> u32 {
        0
    }
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

/// JSON-over-HTTP client: POST `{prompt, max_tokens, temperature}`, expect
/// `{text}` back.
pub struct HttpClient {
    contract: ClientContract,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(contract: ClientContract) -> Result<Self, AdjudicateError> {
        contract.validate()?;
        let config = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs_f64(contract.timeout_secs))).build();
        Ok(HttpClient { contract, agent: config.into() })
    }

    pub fn contract(&self) -> &ClientContract {
        &self.contract
    }
}

impl LlmClient for HttpClient {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError> {
        let body =
            CompletionRequest { prompt: &bundle.prompt, max_tokens: self.contract.max_tokens, temperature: self.contract.temperature };
        let mut req = self.agent.post(&self.contract.endpoint);
        if let Some(var) = &self.contract.token_env {
            let token = std::env::var(var).map_err(|_| TransportError(format!("token variable `{var}` is not set")))?;
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| TransportError(e.to_string()))?;
        let parsed: CompletionResponse = resp.body_mut().read_json().map_err(|e| TransportError(format!("bad response body: {e}")))?;
        Ok(parsed.text)
    }

    fn max_retries(&self) -> u32 {
        self.contract.max_retries
    }
}

/// Well-formed response choosing path 1 and its terminal entity.
pub fn mock_client(bundle: &PromptBundle) -> String {
    mock_response(bundle, 1)
}

fn mock_response(bundle: &PromptBundle, index: usize) -> String {
    let answer = verbalized_terminal(&bundle.paths[index - 1]);
    format!("Answer: {answer}\nSupporting path(s): [{index}]\nRationale: Path {index} leads from the question entity to {answer}.\n")
}

/// Offline client built on [`mock_client`]. Counts requests.
#[derive(Debug, Default)]
pub struct MockClient {
    calls: AtomicU64,
}

impl MockClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for MockClient {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(mock_client(bundle))
    }
}

/// Mock that cites the first listed path whose terminal entity passes
/// `accept`, falling back to path 1.
pub struct FilteringMock<F> {
    accept: F,
    calls: AtomicU64,
}

impl<F: Fn(&PromptBundle, &str) -> bool + Send + Sync> FilteringMock<F> {
    /// `accept(bundle, terminal)` decides whether a path's terminal fits.
    pub fn new(accept: F) -> Self {
        FilteringMock { accept, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<F: Fn(&PromptBundle, &str) -> bool + Send + Sync> LlmClient for FilteringMock<F> {
    fn complete(&self, bundle: &PromptBundle) -> Result<String, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let pick = bundle.paths.iter().position(|p| (self.accept)(bundle, verbalized_terminal(p))).map_or(1, |i| i + 1);
        Ok(mock_response(bundle, pick))
    }
}
