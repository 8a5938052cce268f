//! Provider adapters: one abstract completion request shape, per-provider
//! wire formats behind the trait.
//!
//! The mock provider answers "Yes" with a configured probability, derived
//! deterministically from (model, sentence, trial), so runs and resumed runs
//! of the same configuration give identical records.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("credential variable `{0}` is not set")]
    CredentialMissing(String),
    #[error("endpoint missing for model `{0}`")]
    EndpointMissing(String),
    #[error("transient: {0}")]
    Transient(String),
    #[error("permanent: {0}")]
    Permanent(String),
}

impl ProviderError {
    pub fn is_transient(&self) -> bool {
        matches!(self, ProviderError::Transient(_))
    }
}

#[derive(Debug, Clone)]
pub struct CompletionRequest {
    pub model_id: String,
    pub prompt: String,
    pub temperature: f64,
    /// None = uncapped (reasoning-token models).
    pub max_output_tokens: Option<u32>,
}

/// Identity of one trial, passed alongside the request. Real providers
/// ignore it; the mock derives its deterministic answer from it.
#[derive(Debug, Clone)]
pub struct TrialKey<'a> {
    pub sentence_id: &'a str,
    pub trial_index: u32,
}

pub trait Provider: Send + Sync {
    /// Pre-flight check; must not perform any network call.
    fn check_credentials(&self) -> Result<(), ProviderError>;
    fn complete(&self, req: &CompletionRequest, key: &TrialKey) -> Result<String, ProviderError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    /// Seeded offline mock.
    Mock,
    /// OpenAI-style chat completions JSON.
    OpenaiCompat,
    /// Anthropic messages JSON.
    Anthropic,
}

/// Stable 64-bit mix (splitmix64 over FNV-1a of the key) so mock responses
/// are a pure function of the trial key across processes.
fn stable_hash(parts: &[&str], seed: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    for p in parts {
        for b in p.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    let mut z = h.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mock LM endpoint: accepts with probability `p_yes`, keyed by
/// (model, sentence, trial) and `seed`.
pub struct MockProvider {
    pub p_yes: f64,
    pub seed: u64,
}

impl MockProvider {
    pub fn decide(&self, model_id: &str, sentence_id: &str, trial_index: u32) -> bool {
        let h = stable_hash(
            &[model_id, sentence_id, &trial_index.to_string()],
            self.seed,
        );
        // 53-bit uniform in [0,1).
        let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
        unit < self.p_yes
    }
}

impl Provider for MockProvider {
    fn check_credentials(&self) -> Result<(), ProviderError> {
        Ok(())
    }

    fn complete(&self, req: &CompletionRequest, key: &TrialKey) -> Result<String, ProviderError> {
        Ok(
            if self.decide(&req.model_id, key.sentence_id, key.trial_index) {
                "Yes".to_string()
            } else {
                "No".to_string()
            },
        )
    }
}

/// HTTP provider speaking the OpenAI-compatible chat-completions shape.
pub struct OpenAiCompatProvider {
    pub endpoint: String,
    pub env_key: String,
    client: reqwest::blocking::Client,
}

impl OpenAiCompatProvider {
    pub fn new(endpoint: String, env_key: String) -> Self {
        OpenAiCompatProvider {
            endpoint,
            env_key,
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("client builds"),
        }
    }
}

impl Provider for OpenAiCompatProvider {
    fn check_credentials(&self) -> Result<(), ProviderError> {
        if std::env::var(&self.env_key).is_err() {
            return Err(ProviderError::CredentialMissing(self.env_key.clone()));
        }
        Ok(())
    }

    fn complete(&self, req: &CompletionRequest, _key: &TrialKey) -> Result<String, ProviderError> {
        let key = std::env::var(&self.env_key)
            .map_err(|_| ProviderError::CredentialMissing(self.env_key.clone()))?;
        let mut body = json!({
            "model": req.model_id,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
        });
        if let Some(cap) = req.max_output_tokens {
            body["max_tokens"] = json!(cap);
        }
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(|e| ProviderError::Transient(e.to_string()))?;
        let status = resp.status();
        let text = resp
            .text()
            .map_err(|e| ProviderError::Transient(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(ProviderError::Transient(format!("{status}: {text}")));
        }
        if !status.is_success() {
            return Err(ProviderError::Permanent(format!("{status}: {text}")));
        }
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ProviderError::Permanent(format!("bad json: {e}")))?;
        v["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| ProviderError::Permanent("missing message content".into()))
    }
}

/// HTTP provider speaking the Anthropic messages shape.
pub struct AnthropicProvider {
    pub endpoint: String,
    pub env_key: String,
    client: reqwest::blocking::Client,
}

impl AnthropicProvider {
    pub fn new(endpoint: String, env_key: String) -> Self {
        AnthropicProvider {
            endpoint,
            env_key,
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("client builds"),
        }
    }
}

impl Provider for AnthropicProvider {
    fn check_credentials(&self) -> Result<(), ProviderError> {
        if std::env::var(&self.env_key).is_err() {
            return Err(ProviderError::CredentialMissing(self.env_key.clone()));
        }
        Ok(())
    }

    fn complete(&self, req: &CompletionRequest, _key: &TrialKey) -> Result<String, ProviderError> {
        let key = std::env::var(&self.env_key)
            .map_err(|_| ProviderError::CredentialMissing(self.env_key.clone()))?;
        let body = json!({
            "model": req.model_id,
            "max_tokens": req.max_output_tokens.unwrap_or(1024),
            "temperature": req.temperature,
            "messages": [{"role": "user", "content": req.prompt}],
        });
        let resp = self
            .client
            .post(&self.endpoint)
            .header("x-api-key", key)
            .header("anthropic-version", "2023-06-01")
            .json(&body)
            .send()
            .map_err(|e| ProviderError::Transient(e.to_string()))?;
        let status = resp.status();
        let text = resp
            .text()
            .map_err(|e| ProviderError::Transient(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(ProviderError::Transient(format!("{status}: {text}")));
        }
        if !status.is_success() {
            return Err(ProviderError::Permanent(format!("{status}: {text}")));
        }
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ProviderError::Permanent(format!("bad json: {e}")))?;
        v["content"][0]["text"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| ProviderError::Permanent("missing content text".into()))
    }
}
