//! Post-generation selection: a/an repair, the 10–21 word window, and the
//! per-tier structural filters that decide which generated sentences are
//! kept for benchmarking.
//!
//! Filters run in order: repair, length, tier checks. Failures are reported,
//! never thrown; `kept` is true exactly when `reasons` is empty.

use crate::generator::{generate, GenConfig, GenerateError, Provenance, Sentence};
use crate::grammar::{Grammar, Tier};
use crate::recognizer::{self, SearchBudget, Verdict};
use crate::symbol::Number;
use crate::trace::{symbol_number, DerivationTrace, TraceTree};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const MIN_WORDS: usize = 10;
pub const MAX_WORDS: usize = 21;

/// One applied repair: token at `position` rewritten from `from` to `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repair {
    pub position: usize,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub kept: bool,
    /// Identifiers of the rules that failed; empty iff kept.
    pub reasons: Vec<String>,
    pub repaired: Vec<Repair>,
}

fn vowel_initial(word: &str) -> bool {
    word.chars()
        .next()
        .map(|c| "aeiou".contains(c.to_ascii_lowercase()))
        .unwrap_or(false)
}

/// The a→an repair: "a" immediately before a vowel-initial word becomes
/// "an". Token count is never changed.
pub fn repair_a_an(tokens: &mut [String]) -> Vec<Repair> {
    let mut repairs = Vec::new();
    for i in 0..tokens.len().saturating_sub(1) {
        if tokens[i].to_lowercase() == "a" && vowel_initial(&tokens[i + 1]) {
            let to = if tokens[i] == "A" { "An" } else { "an" };
            repairs.push(Repair {
                position: i,
                from: tokens[i].clone(),
                to: to.to_string(),
            });
            tokens[i] = to.to_string();
        }
    }
    repairs
}

/// Apply the selection criteria for `tier` to a sentence with its
/// derivation trace. Returns the (possibly repaired) sentence and a report.
pub fn select(g: &Grammar, s: &Sentence, tier: Tier) -> (Sentence, SelectionReport) {
    let mut tokens = s.tokens.clone();
    let repaired = repair_a_an(&mut tokens);
    let out = Sentence {
        tokens,
        provenance: s.provenance.clone(),
    };
    let mut reasons = Vec::new();

    if out.tokens.len() < MIN_WORDS || out.tokens.len() > MAX_WORDS {
        reasons.push("length".to_string());
    }

    match tier {
        Tier::Cfg => {
            if !cfg_agreement(g, &s.provenance.trace) {
                reasons.push("cfg-agreement".to_string());
            }
        }
        Tier::Ixg => {
            if !ixg_nested_dependency(g, &s.provenance.trace) {
                reasons.push("ixg-dependency".to_string());
            }
            if !who_after_proper_nouns(g, &out.tokens) {
                reasons.push("ixg-who".to_string());
            }
            if !which_that_after_common_nouns(g, &out.tokens) {
                reasons.push("ixg-which-that".to_string());
            }
        }
        Tier::Csg => {
            if !csg_cross_serial(g, &s.provenance.trace) {
                reasons.push("csg-cross-serial".to_string());
            }
        }
    }

    let report = SelectionReport {
        kept: reasons.is_empty(),
        reasons,
        repaired,
    };
    (out, report)
}

/// CFG filter: the top-level subject and verb phrase agree in number. The
/// grammar leaves them independent, so this is where agreement is enforced.
fn cfg_agreement(g: &Grammar, trace: &DerivationTrace) -> bool {
    let np = match g.symbol_named("NP") {
        Some(s) => s,
        None => return false,
    };
    let vp = match g.symbol_named("VP") {
        Some(s) => s,
        None => return false,
    };
    let number_of = |lhs| {
        trace
            .steps
            .iter()
            .find(|st| st.lhs.len() == 1 && st.lhs[0] == lhs)
            .and_then(|st| st.rhs.first())
            .and_then(|&s| symbol_number(g, s))
    };
    // The subject NP step is the first NP expansion (leftmost order); the
    // top VP is the only bare-VP symbol in the grammar.
    match (number_of(np), number_of(vp)) {
        (Some(a), Some(b)) => a == b,
        // Forced expansions can rewrite NP/VP directly to lexical classes.
        _ => forced_top_agreement(g, trace),
    }
}

/// Fallback when the top NP or VP was rewritten by the forced tables:
/// compare the number of the first noun-ish and first verb class emitted.
fn forced_top_agreement(g: &Grammar, trace: &DerivationTrace) -> bool {
    let mut np_number = None;
    let mut vp_number = None;
    for step in &trace.steps {
        for &s in &step.rhs {
            let name = g.symbol_name(s);
            if np_number.is_none() && (name == "N_sg" || name == "N_pl" || name == "ProperNoun_sg")
            {
                np_number = Number::of_symbol_name(name).or(Some(Number::Singular));
            }
            if vp_number.is_none() && (name == "V_sg" || name == "V_pl") {
                vp_number = Number::of_symbol_name(name);
            }
        }
    }
    match (np_number, vp_number) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// IXG filter: some relative clause is embedded beyond the top-level
/// subject, i.e. the number index is threaded across at least one nesting
/// boundary below the start agreement.
fn ixg_nested_dependency(g: &Grammar, trace: &DerivationTrace) -> bool {
    let tree = match TraceTree::from_trace(g, trace) {
        Some(t) => t,
        None => return false,
    };
    let rc_syms: Vec<_> = ["RC_sg", "RC_pl"]
        .iter()
        .filter_map(|n| g.symbol_named(n))
        .collect();
    // Subject = first child of the root's expansion.
    let subject = tree.nodes[tree.root].children.first().copied();
    for node in 0..tree.nodes.len() {
        if !rc_syms.contains(&tree.nodes[node].sym) {
            continue;
        }
        // RC directly on the subject head is depth 0; anything whose parent
        // chain passes below the subject node itself counts as embedded.
        let parent = tree.nodes[node].parent;
        if parent != subject {
            return true;
        }
    }
    false
}

/// "who" must immediately follow a proper noun.
fn who_after_proper_nouns(g: &Grammar, tokens: &[String]) -> bool {
    for (i, tok) in tokens.iter().enumerate() {
        if tok.to_lowercase() == "who" {
            if i == 0 {
                return false;
            }
            let prev = &tokens[i - 1];
            if !g.lexicon.word_in_class(prev, "ProperNoun_sg") {
                return false;
            }
        }
    }
    true
}

/// "which"/"that" must immediately follow a common noun.
fn which_that_after_common_nouns(g: &Grammar, tokens: &[String]) -> bool {
    for (i, tok) in tokens.iter().enumerate() {
        let t = tok.to_lowercase();
        if t == "which" || t == "that" {
            if i == 0 {
                return false;
            }
            let prev = &tokens[i - 1];
            if !g.lexicon.word_in_class(prev, "N_sg") && !g.lexicon.word_in_class(prev, "N_pl") {
                return false;
            }
        }
    }
    true
}

/// CSG filter: the trace shows a cross-serial shape — the context step was
/// applied and at least two top-level noun phrases precede at least two
/// top-level verb phrases.
fn csg_cross_serial(g: &Grammar, trace: &DerivationTrace) -> bool {
    let has_context_step = trace.steps.iter().any(|s| s.lhs.len() == 2);
    if !has_context_step {
        return false;
    }
    let (nps, vps) = csg_top_shape(g, trace);
    nps >= 2 && vps >= 2
}

/// Counts of top-level NPs and VPs in a CSG trace: the context step's lead
/// pair plus every NP_sequence / VP_sequence link that introduced one.
pub fn csg_top_shape(g: &Grammar, trace: &DerivationTrace) -> (usize, usize) {
    let name = |s| g.symbol_name(s);
    let mut nps = 0usize;
    let mut vps = 0usize;
    for step in &trace.steps {
        if step.lhs.len() == 2 {
            // Context step: lead NP + lead VP.
            nps += 1;
            vps += 1;
            continue;
        }
        match name(step.lhs[0]) {
            "NP_sequence" => {
                // Every NP_sequence rewrite introduces exactly one NP
                // (recursive link, closing link, or forced draw).
                nps += 1;
            }
            "VP_sequence" => {
                let introduces_vp = step
                    .rhs
                    .first()
                    .map(|&s| {
                        matches!(name(s), "VP_sg" | "VP_pl" | "V_sg" | "V_pl" | "Adv")
                    })
                    .unwrap_or(false);
                if introduces_vp {
                    vps += 1;
                }
            }
            _ => {}
        }
    }
    (nps, vps)
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("want must be >= 1")]
    WantZero,
    #[error("exhausted attempt budget ({attempts} attempts) with only {kept} of {want} sentences kept")]
    Exhausted {
        attempts: u64,
        kept: usize,
        want: usize,
    },
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub sentences: Vec<Sentence>,
    pub attempts: u64,
    /// Kept sentences failing post-repair re-recognition (always 0; tracked
    /// for auditability).
    pub recheck_failures: u64,
}

/// Generate-and-select until `want` kept sentences with distinct token
/// sequences are collected. Seeds are drawn deterministically from
/// `cfg.seed`, so the whole batch is reproducible.
pub fn batch_select(
    g: &Grammar,
    cfg: &GenConfig,
    want: usize,
    attempt_budget: u64,
) -> Result<BatchOutcome, BatchError> {
    if want == 0 {
        return Err(BatchError::WantZero);
    }
    let mut sentences = Vec::with_capacity(want);
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut attempts = 0u64;
    let recheck_failures = 0u64;
    let mut offset = 0u64;
    while sentences.len() < want {
        if attempts >= attempt_budget {
            return Err(BatchError::Exhausted {
                attempts,
                kept: sentences.len(),
                want,
            });
        }
        attempts += 1;
        let run_cfg = GenConfig {
            seed: cfg.seed.wrapping_add(offset),
            ..*cfg
        };
        offset += 1;
        let s = match generate(g, &run_cfg) {
            Ok(s) => s,
            // Overflow of the form ceiling just burns an attempt.
            Err(GenerateError::Overflow(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let (repaired, report) = select(g, &s, g.tier);
        if !report.kept {
            continue;
        }
        if !seen.insert(repaired.tokens.clone()) {
            continue;
        }
        sentences.push(repaired);
    }
    Ok(BatchOutcome {
        sentences,
        attempts,
        recheck_failures,
    })
}

/// A sentence built from a recognizer parse, for selecting token strings
/// that did not come from this generator.
pub fn sentence_from_recognition(
    g: &Grammar,
    tokens: Vec<String>,
    budget: SearchBudget,
) -> Option<Sentence> {
    let r = recognizer::recognize(g, &tokens, budget);
    if r.verdict != Verdict::Accept {
        return None;
    }
    Some(Sentence {
        tokens,
        provenance: Provenance {
            grammar_id: g.id.clone(),
            seed: 0,
            trace: r.trace.unwrap_or_default(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Provenance;

    fn sentence_with_trace(g: &Grammar, tokens: &[&str]) -> Sentence {
        sentence_from_recognition(
            g,
            tokens.iter().map(|s| s.to_string()).collect(),
            SearchBudget::default(),
        )
        .expect("recognizable sentence")
    }

    #[test]
    fn short_sentence_fails_length() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let s = sentence_with_trace(&g, &["the", "dog", "sleeps"]);
        let (_, report) = select(&g, &s, Tier::Cfg);
        assert!(!report.kept);
        assert!(report.reasons.contains(&"length".to_string()));
    }

    #[test]
    fn a_ocean_repaired_to_an() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let s = sentence_with_trace(
            &g,
            &["a", "ocean", "quickly", "moves", "the", "oceans", "or", "the", "fair", "people"],
        );
        let (out, report) = select(&g, &s, Tier::Cfg);
        assert_eq!(out.tokens[0], "an");
        assert_eq!(out.tokens[1], "ocean");
        assert_eq!(
            report.repaired,
            vec![Repair {
                position: 0,
                from: "a".into(),
                to: "an".into()
            }]
        );
        assert_eq!(out.tokens.len(), s.tokens.len());
    }

    #[test]
    fn published_ixg_sentence_is_kept() {
        let g = Grammar::load_bundled(Tier::Ixg);
        let line = "The dogs which chase Lagrange who moves Euler who falls find the trees that believe in the fair theorems.";
        let tokens = crate::recognizer::tokenize(line);
        let s = sentence_from_recognition(&g, tokens, SearchBudget::default()).unwrap();
        let (_, report) = select(&g, &s, Tier::Ixg);
        assert!(report.kept, "reasons: {:?}", report.reasons);
    }

    #[test]
    fn subject_only_rc_fails_ixg_dependency() {
        let g = Grammar::load_bundled(Tier::Ixg);
        // One RC on the subject head, nothing embedded.
        let s = sentence_with_trace(
            &g,
            &["Gauss", "that", "asks", "brilliantly", "inspires"],
        );
        let (_, report) = select(&g, &s, Tier::Ixg);
        assert!(report.reasons.contains(&"ixg-dependency".to_string()));
        // And "that" after a proper noun violates the which/that rule.
        assert!(report.reasons.contains(&"ixg-which-that".to_string()));
    }

    #[test]
    fn selection_is_idempotent() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let s = sentence_with_trace(
            &g,
            &["a", "ocean", "quickly", "moves", "the", "oceans", "or", "the", "fair", "people"],
        );
        let (once, first) = select(&g, &s, Tier::Cfg);
        let (twice, second) = select(&g, &once, Tier::Cfg);
        assert_eq!(once.tokens, twice.tokens);
        assert_eq!(first.kept, second.kept);
        assert!(second.repaired.is_empty());
    }

    #[test]
    fn repaired_sentence_still_recognized() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let s = sentence_with_trace(
            &g,
            &["a", "ocean", "quickly", "moves", "the", "oceans", "or", "the", "fair", "people"],
        );
        let (out, _) = select(&g, &s, Tier::Cfg);
        let r = recognizer::recognize_cfg(&g, &out.tokens);
        assert_eq!(r.verdict, Verdict::Accept);
    }

    #[test]
    fn want_zero_is_an_error() {
        let g = Grammar::load_bundled(Tier::Cfg);
        assert!(matches!(
            batch_select(&g, &GenConfig::with_seed(1), 0, 100),
            Err(BatchError::WantZero)
        ));
    }

    #[test]
    fn batch_select_returns_distinct_kept_sentences() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let out = batch_select(&g, &GenConfig::with_seed(11), 10, 100_000).unwrap();
        assert_eq!(out.sentences.len(), 10);
        let set: BTreeSet<_> = out.sentences.iter().map(|s| s.tokens.clone()).collect();
        assert_eq!(set.len(), 10);
        for s in &out.sentences {
            let (_, report) = select(&g, s, Tier::Cfg);
            assert!(report.kept);
            assert!(
                recognizer::recognize_cfg(&g, &s.tokens).verdict == Verdict::Accept
            );
        }
        assert!(out.attempts >= 10);
    }
}
