//! Acceptability benchmark harness: the exact query prompt, trial running
//! with retries and resume, the append-only record store, and the human
//! questionnaire export.

pub mod provider;
pub mod questionnaire;
pub mod store;

pub use provider::{
    AnthropicProvider, CompletionRequest, MockProvider, OpenAiCompatProvider, Provider,
    ProviderError, ProviderKind, TrialKey,
};
pub use questionnaire::{export_questionnaire, QuestionnaireError, HUMAN_INSTRUCTION};
pub use store::{StoreError, TrialRecord, TrialStore};

use crate::generator::Sentence;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

/// The query instruction, byte-exact. `build_prompt` appends a newline and
/// the space-joined sentence.
pub const LM_INSTRUCTION: &str = "Disregarding any lack of punctuation or sensicality, please answer the following with only \"Yes\" or \"No\" : Is the sentence grammatically complete?";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("prompt requires a non-empty sentence")]
    EmptySentence,
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("unknown provider kind for model `{0}`")]
    UnknownProvider(String),
}

/// One model endpoint under test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: String,
    pub provider: ProviderKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Environment variable holding the credential (HTTP providers).
    #[serde(default)]
    pub env_key: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    /// None = uncapped (reasoning-token models run without a cap).
    #[serde(default = "default_max_tokens")]
    pub max_output_tokens: Option<u32>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    /// Mock provider acceptance probability.
    #[serde(default)]
    pub mock_p_yes: Option<f64>,
    /// Mock provider seed.
    #[serde(default)]
    pub mock_seed: Option<u64>,
    /// Max in-flight requests for this model's provider.
    #[serde(default = "default_concurrency")]
    pub concurrency: u32,
}

fn default_temperature() -> f64 {
    0.2
}
fn default_max_tokens() -> Option<u32> {
    Some(128)
}
fn default_trials() -> u32 {
    100
}
fn default_concurrency() -> u32 {
    4
}

impl ModelSpec {
    pub fn mock(model_id: &str, p_yes: f64, seed: u64, trials: u32) -> ModelSpec {
        ModelSpec {
            model_id: model_id.to_string(),
            provider: ProviderKind::Mock,
            endpoint: None,
            env_key: None,
            temperature: 0.2,
            max_output_tokens: Some(128),
            trials,
            mock_p_yes: Some(p_yes),
            mock_seed: Some(seed),
            concurrency: 4,
        }
    }

    pub fn build_provider(&self) -> Result<Arc<dyn Provider>, BenchError> {
        match self.provider {
            ProviderKind::Mock => Ok(Arc::new(MockProvider {
                p_yes: self.mock_p_yes.unwrap_or(1.0),
                seed: self.mock_seed.unwrap_or(0),
            })),
            ProviderKind::OpenaiCompat => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| ProviderError::EndpointMissing(self.model_id.clone()))?;
                let env_key = self
                    .env_key
                    .clone()
                    .unwrap_or_else(|| "OPENAI_API_KEY".to_string());
                Ok(Arc::new(OpenAiCompatProvider::new(endpoint, env_key)))
            }
            ProviderKind::Anthropic => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| ProviderError::EndpointMissing(self.model_id.clone()))?;
                let env_key = self
                    .env_key
                    .clone()
                    .unwrap_or_else(|| "ANTHROPIC_API_KEY".to_string());
                Ok(Arc::new(AnthropicProvider::new(endpoint, env_key)))
            }
        }
    }
}

/// The paper-exact prompt: instruction line, newline, space-joined sentence.
pub fn build_prompt(tokens: &[String]) -> Result<String, BenchError> {
    if tokens.is_empty() {
        return Err(BenchError::EmptySentence);
    }
    Ok(format!("{LM_INSTRUCTION}\n{}", tokens.join(" ")))
}

/// Normalize an LM reply to a verdict. Whitespace and surrounding
/// punctuation are trimmed and case is folded; the first word decides.
/// Anything else is unparseable (None) and excluded from statistics.
pub fn parse_response(raw: &str) -> Option<bool> {
    let first = raw
        .split_whitespace()
        .next()?
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    match first.as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

/// Retry/backoff and test-support knobs for a run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_retries: u32,
    pub retry_base: Duration,
    /// Stop after writing this many new records (used to exercise resume).
    pub record_limit: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_retries: 3,
            retry_base: Duration::from_millis(200),
            record_limit: None,
        }
    }
}

#[derive(Debug, Default, Clone, Serialize)]
pub struct RunSummary {
    pub completed: u64,
    pub failed: u64,
    pub unparseable: u64,
    pub skipped_resume: u64,
    pub retried: u64,
    /// True when a record limit stopped the run early.
    pub interrupted: bool,
}

struct Task {
    sentence_idx: usize,
    trial_index: u32,
}

/// Run every (model, sentence, trial) not yet in the store. Records are
/// appended (and flushed) one by one, so an aborted run resumes without
/// re-querying completed trials. Credentials are checked before any query.
pub fn run_bench(
    models: &[(ModelSpec, Arc<dyn Provider>)],
    sentences: &[Sentence],
    store: &mut TrialStore,
    opts: &RunOptions,
) -> Result<RunSummary, BenchError> {
    for (spec, provider) in models {
        provider
            .check_credentials()
            .map_err(|e| BenchError::Provider(map_credential(spec, e)))?;
    }

    let sentence_ids: Vec<String> = (0..sentences.len())
        .map(|i| sentence_id(&sentences[i], i))
        .collect();

    let summary = Arc::new(Mutex::new(RunSummary::default()));
    let store_mutex = Arc::new(Mutex::new(store));
    let written = Arc::new(Mutex::new(0usize));

    for (spec, provider) in models {
        // Collect this model's pending tasks (resume skips existing keys).
        let mut tasks: VecDeque<Task> = VecDeque::new();
        {
            let store = store_mutex.lock().unwrap();
            for (si, _) in sentences.iter().enumerate() {
                for trial in 0..spec.trials {
                    if store.contains(&spec.model_id, &sentence_ids[si], trial) {
                        summary.lock().unwrap().skipped_resume += 1;
                    } else {
                        tasks.push_back(Task {
                            sentence_idx: si,
                            trial_index: trial,
                        });
                    }
                }
            }
        }
        let tasks = Arc::new(Mutex::new(tasks));
        let workers = spec.concurrency.max(1).min(64) as usize;
        std::thread::scope(|scope| {
            for _ in 0..workers {
                let tasks = Arc::clone(&tasks);
                let summary = Arc::clone(&summary);
                let store_mutex = Arc::clone(&store_mutex);
                let written = Arc::clone(&written);
                let sentence_ids = &sentence_ids;
                let provider = Arc::clone(provider);
                scope.spawn(move || loop {
                    if let Some(limit) = opts.record_limit {
                        if *written.lock().unwrap() >= limit {
                            summary.lock().unwrap().interrupted = true;
                            return;
                        }
                    }
                    let task = match tasks.lock().unwrap().pop_front() {
                        Some(t) => t,
                        None => return,
                    };
                    let s = &sentences[task.sentence_idx];
                    let prompt = build_prompt(&s.tokens).expect("benchmark sentences non-empty");
                    let req = CompletionRequest {
                        model_id: spec.model_id.clone(),
                        prompt,
                        temperature: spec.temperature,
                        max_output_tokens: spec.max_output_tokens,
                    };
                    let key = TrialKey {
                        sentence_id: &sentence_ids[task.sentence_idx],
                        trial_index: task.trial_index,
                    };
                    let started = Instant::now();
                    let mut retries = 0u32;
                    let outcome = loop {
                        match provider.complete(&req, &key) {
                            Ok(text) => break Ok(text),
                            Err(e) if e.is_transient() && retries < opts.max_retries => {
                                retries += 1;
                                summary.lock().unwrap().retried += 1;
                                std::thread::sleep(opts.retry_base * 2u32.pow(retries - 1));
                            }
                            Err(e) => break Err(e),
                        }
                    };
                    let latency_ms = started.elapsed().as_millis() as u64;
                    let timestamp_ms = SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_millis() as u64)
                        .unwrap_or(0);
                    let rec = match outcome {
                        Ok(raw) => {
                            let accepted = parse_response(&raw);
                            let mut sum = summary.lock().unwrap();
                            sum.completed += 1;
                            if accepted.is_none() {
                                sum.unparseable += 1;
                            }
                            TrialRecord {
                                model_id: spec.model_id.clone(),
                                sentence_id: sentence_ids[task.sentence_idx].clone(),
                                grammar_id: s.provenance.grammar_id.clone(),
                                trial_index: task.trial_index,
                                raw_response: raw,
                                accepted,
                                failed: false,
                                timestamp_ms,
                                latency_ms,
                                retries,
                            }
                        }
                        Err(e) => {
                            summary.lock().unwrap().failed += 1;
                            TrialRecord {
                                model_id: spec.model_id.clone(),
                                sentence_id: sentence_ids[task.sentence_idx].clone(),
                                grammar_id: s.provenance.grammar_id.clone(),
                                trial_index: task.trial_index,
                                raw_response: format!("<error: {e}>"),
                                accepted: None,
                                failed: true,
                                timestamp_ms,
                                latency_ms,
                                retries,
                            }
                        }
                    };
                    let mut store = store_mutex.lock().unwrap();
                    let mut w = written.lock().unwrap();
                    if let Some(limit) = opts.record_limit {
                        if *w >= limit {
                            summary.lock().unwrap().interrupted = true;
                            return;
                        }
                    }
                    store.append(&rec).expect("store append");
                    *w += 1;
                });
            }
        });
    }

    let out = summary.lock().unwrap().clone();
    Ok(out)
}

fn map_credential(spec: &ModelSpec, e: ProviderError) -> ProviderError {
    match e {
        ProviderError::CredentialMissing(var) => ProviderError::CredentialMissing(format!(
            "{var} (required by model `{}`)",
            spec.model_id
        )),
        other => other,
    }
}

/// Stable sentence identifier: grammar id, position, and a content hash.
pub fn sentence_id(s: &Sentence, index: usize) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(s.tokens.join(" ").as_bytes());
    let digest = h.finalize();
    format!(
        "{}-{:03}-{}",
        s.provenance.grammar_id,
        index,
        hex_prefix(&digest, 4)
    )
}

fn hex_prefix(bytes: &[u8], n: usize) -> String {
    bytes.iter().take(n).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Provenance;
    use crate::trace::DerivationTrace;

    fn sentence(grammar: &str, text: &str) -> Sentence {
        Sentence {
            tokens: text.split_whitespace().map(|s| s.to_string()).collect(),
            provenance: Provenance {
                grammar_id: grammar.to_string(),
                seed: 0,
                trace: DerivationTrace::default(),
            },
        }
    }

    #[test]
    fn prompt_is_instruction_newline_sentence() {
        let tokens: Vec<String> = ["the", "dog", "sleeps"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let p = build_prompt(&tokens).unwrap();
        assert_eq!(p, format!("{LM_INSTRUCTION}\nthe dog sleeps"));
        assert_eq!(build_prompt(&tokens).unwrap(), p);
    }

    #[test]
    fn empty_sentence_is_precondition_error() {
        assert!(matches!(
            build_prompt(&[]),
            Err(BenchError::EmptySentence)
        ));
    }

    #[test]
    fn parse_response_cases() {
        assert_eq!(parse_response("Yes"), Some(true));
        assert_eq!(parse_response("  no."), Some(false));
        assert_eq!(parse_response("\"Yes\""), Some(true));
        assert_eq!(parse_response("NO!"), Some(false));
        assert_eq!(parse_response("The sentence is grammatical."), None);
        assert_eq!(parse_response(""), None);
    }

    #[test]
    fn constant_yes_mock_accepts_everything() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = TrialStore::open(dir.path()).unwrap();
        let spec = ModelSpec::mock("const-yes", 1.0, 0, 5);
        let provider = spec.build_provider().unwrap();
        let sentences = vec![sentence("cfg", "the dog sees the dogs"); 3];
        let summary = run_bench(
            &[(spec, provider)],
            &sentences,
            &mut store,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(summary.completed, 15);
        assert_eq!(summary.failed, 0);
        let records = TrialStore::read_all(dir.path()).unwrap();
        assert_eq!(records.len(), 15);
        assert!(records.iter().all(|r| r.accepted == Some(true)));
    }

    #[test]
    fn retry_contract_flaky_provider_yields_one_record() {
        use std::sync::atomic::{AtomicU32, Ordering};
        struct Flaky {
            calls: AtomicU32,
        }
        impl Provider for Flaky {
            fn check_credentials(&self) -> Result<(), ProviderError> {
                Ok(())
            }
            fn complete(
                &self,
                _req: &CompletionRequest,
                _key: &TrialKey,
            ) -> Result<String, ProviderError> {
                let n = self.calls.fetch_add(1, Ordering::SeqCst);
                if n < 2 {
                    Err(ProviderError::Transient("503".into()))
                } else {
                    Ok("Yes".into())
                }
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let mut store = TrialStore::open(dir.path()).unwrap();
        let mut spec = ModelSpec::mock("flaky", 1.0, 0, 1);
        spec.concurrency = 1;
        let provider: Arc<dyn Provider> = Arc::new(Flaky {
            calls: AtomicU32::new(0),
        });
        let sentences = vec![sentence("cfg", "the dog sees the dogs")];
        let opts = RunOptions {
            retry_base: Duration::from_millis(1),
            ..RunOptions::default()
        };
        let summary = run_bench(&[(spec, provider)], &sentences, &mut store, &opts).unwrap();
        assert_eq!(summary.completed, 1);
        assert_eq!(summary.retried, 2);
        let records = TrialStore::read_all(dir.path()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].retries, 2);
        assert_eq!(records[0].accepted, Some(true));
    }

    #[test]
    fn resume_never_duplicates_keys() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ModelSpec::mock("m", 0.5, 9, 10);
        let provider = spec.build_provider().unwrap();
        let sentences = vec![
            sentence("cfg", "the dog sees the dogs"),
            sentence("ixg", "the dogs see the dog"),
        ];
        // First run interrupted after 7 records.
        {
            let mut store = TrialStore::open(dir.path()).unwrap();
            let opts = RunOptions {
                record_limit: Some(7),
                ..RunOptions::default()
            };
            let s = run_bench(
                &[(spec.clone(), provider.clone())],
                &sentences,
                &mut store,
                &opts,
            )
            .unwrap();
            assert!(s.interrupted);
        }
        // Resume to completion.
        {
            let mut store = TrialStore::open(dir.path()).unwrap();
            assert_eq!(store.len(), 7);
            let s = run_bench(
                &[(spec.clone(), provider.clone())],
                &sentences,
                &mut store,
                &RunOptions::default(),
            )
            .unwrap();
            assert_eq!(s.skipped_resume, 7);
        }
        let records = TrialStore::read_all(dir.path()).unwrap();
        assert_eq!(records.len(), 20);
        let keys: std::collections::HashSet<_> = records.iter().map(|r| r.key()).collect();
        assert_eq!(keys.len(), 20, "no duplicate (model, sentence, trial) keys");
    }

    #[test]
    fn credential_missing_fails_preflight() {
        struct NeedsKey;
        impl Provider for NeedsKey {
            fn check_credentials(&self) -> Result<(), ProviderError> {
                Err(ProviderError::CredentialMissing("NO_SUCH_KEY".into()))
            }
            fn complete(
                &self,
                _req: &CompletionRequest,
                _key: &TrialKey,
            ) -> Result<String, ProviderError> {
                panic!("must not be called");
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let mut store = TrialStore::open(dir.path()).unwrap();
        let spec = ModelSpec::mock("m", 1.0, 0, 1);
        let provider: Arc<dyn Provider> = Arc::new(NeedsKey);
        let sentences = vec![sentence("cfg", "the dog sees the dogs")];
        let err = run_bench(
            &[(spec, provider)],
            &sentences,
            &mut store,
            &RunOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            BenchError::Provider(ProviderError::CredentialMissing(_))
        ));
        assert!(TrialStore::read_all(dir.path()).unwrap().is_empty());
    }
}
