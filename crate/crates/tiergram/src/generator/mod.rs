//! Stochastic top-down sentence generation with per-symbol expansion caps,
//! recursion-depth caps, and tier-specific forced terminal expansion.
//!
//! Expansion counts are shared within each top-level part of the start
//! expansion and reset between parts. For the CSG the context rule is
//! applied first, fixing number agreement before the four chain parts are
//! expanded recursively (each with fresh counts). Every rewrite is recorded
//! in a replayable [`DerivationTrace`].
//!
//! The PRNG is ChaCha8 seeded from `GenConfig::seed`; identical
//! configuration yields identical sentences.

mod forced;

pub use forced::ForcedError;

use crate::grammar::{Grammar, GrammarError, Tier};
use crate::symbol::SymbolId;
use crate::trace::{trace_from_records, trace_to_records, DerivationTrace, TraceStep, TraceStepRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_expansion_per_symbol: u32,
    pub max_recursion_depth: u32,
    /// Hard ceiling on sentential-form length; a non-termination guard
    /// beyond the two caps.
    pub max_symbols: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_expansion_per_symbol: 10,
            max_recursion_depth: 100_000,
            max_symbols: 500,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            ..GenConfig::default()
        }
    }

    /// Caps used for CSG selection runs: depth 10, expansion 20.
    pub fn csg_selection(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            max_expansion_per_symbol: 20,
            max_recursion_depth: 10,
            max_symbols: 500,
        }
    }

    /// Tier-appropriate defaults.
    pub fn for_tier(tier: Tier, seed: u64) -> GenConfig {
        match tier {
            Tier::Csg => GenConfig::csg_selection(seed),
            _ => GenConfig::with_seed(seed),
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        if self.max_expansion_per_symbol < 1 || self.max_recursion_depth < 1 {
            return Err(GenerateError::BadConfig(
                "both caps must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub grammar_id: String,
    pub seed: u64,
    #[serde(skip)]
    pub trace: DerivationTrace,
}

#[derive(Debug, Clone)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub provenance: Provenance,
}

impl Sentence {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Serialized sentence with provenance (JSON-lines).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub tokens: Vec<String>,
    pub grammar_id: String,
    pub seed: u64,
    pub trace: Vec<TraceStepRecord>,
}

impl SentenceRecord {
    pub fn from_sentence(g: &Grammar, s: &Sentence) -> SentenceRecord {
        SentenceRecord {
            tokens: s.tokens.clone(),
            grammar_id: s.provenance.grammar_id.clone(),
            seed: s.provenance.seed,
            trace: trace_to_records(g, &s.provenance.trace),
        }
    }

    pub fn into_sentence(self, g: &Grammar) -> Option<Sentence> {
        let trace = trace_from_records(g, &self.trace)?;
        Some(Sentence {
            tokens: self.tokens,
            provenance: Provenance {
                grammar_id: self.grammar_id,
                seed: self.seed,
                trace,
            },
        })
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generation config: {0}")]
    BadConfig(String),
    #[error("sentential form exceeded {0} symbols (generation overflow)")]
    Overflow(usize),
    #[error(transparent)]
    Forced(#[from] ForcedError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("lexical class `{0}` has an empty word list")]
    EmptyClass(String),
    #[error("non-lexical symbol `{0}` remained after expansion")]
    NonLexicalRemaining(String),
}

struct Run<'g, 'r> {
    g: &'g Grammar,
    cfg: GenConfig,
    rng: &'r mut ChaCha8Rng,
    steps: Vec<TraceStep>,
    /// Length of the full sentential form (emitted + pending symbols).
    form_len: usize,
    emitted: usize,
    out: Vec<SymbolId>,
}

impl<'g, 'r> Run<'g, 'r> {
    fn bump_form(&mut self, lhs_len: usize, rhs_len: usize) -> Result<(), GenerateError> {
        self.form_len = self.form_len + rhs_len - lhs_len;
        if self.form_len > self.cfg.max_symbols {
            return Err(GenerateError::Overflow(self.cfg.max_symbols));
        }
        Ok(())
    }

    /// Expand one frame (an alternative's symbols) depth-first, sharing
    /// `counts` across the whole part. When the current symbol's cap or the
    /// depth cap is hit, the remaining frame suffix goes through forced
    /// terminal expansion as one unit (preserving look-ahead guards).
    fn expand_frame(
        &mut self,
        frame: &[SymbolId],
        depth: u32,
        counts: &mut HashMap<SymbolId, u32>,
    ) -> Result<(), GenerateError> {
        let mut idx = 0;
        while idx < frame.len() {
            let sym = frame[idx];
            if !self.g.has_production(sym) {
                self.out.push(sym);
                self.emitted += 1;
                idx += 1;
                continue;
            }
            let count = counts.entry(sym).or_insert(0);
            if *count >= self.cfg.max_expansion_per_symbol || depth >= self.cfg.max_recursion_depth
            {
                let tail = frame[idx..].to_vec();
                let prev = self.out.last().copied();
                let produced = forced::forced_expand(
                    self.g,
                    self.g.tier,
                    tail,
                    prev,
                    self.rng,
                    &mut self.steps,
                    self.emitted,
                )?;
                self.form_len = self.emitted + produced.len()
                    + (self.form_len - self.emitted - (frame.len() - idx));
                if self.form_len > self.cfg.max_symbols {
                    return Err(GenerateError::Overflow(self.cfg.max_symbols));
                }
                for s in produced {
                    self.out.push(s);
                    self.emitted += 1;
                }
                return Ok(());
            }
            *count += 1;
            let alts = self.g.expansions_of(&[sym])?;
            let choice = self.rng.gen_range(0..alts.len());
            let rhs = alts[choice].clone();
            self.steps.push(TraceStep {
                position: self.emitted,
                lhs: vec![sym],
                rhs: rhs.clone(),
                alternative: Some(choice),
                forced: false,
            });
            self.bump_form(1, rhs.len())?;
            self.expand_frame(&rhs, depth + 1, counts)?;
            idx += 1;
        }
        Ok(())
    }
}

/// Pre-lexicalization expansion: returns the lexical-class string and trace.
pub fn expand(g: &Grammar, cfg: &GenConfig) -> Result<(Vec<SymbolId>, DerivationTrace), GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    expand_with_rng(g, cfg, &mut rng)
}

/// Expansion on a caller-owned PRNG stream (generation continues the same
/// stream into lexicalization).
pub fn expand_with_rng(
    g: &Grammar,
    cfg: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<SymbolId>, DerivationTrace), GenerateError> {
    cfg.validate()?;
    let mut run = Run {
        g,
        cfg: *cfg,
        rng,
        steps: Vec::new(),
        form_len: 1,
        emitted: 0,
        out: Vec::new(),
    };

    // Start expansion; for the CSG, the context rule is applied immediately
    // after so the number dependency is fixed before recursive expansion.
    let start_alts = run.g.expansions_of(&[run.g.start])?;
    let start_choice = run.rng.gen_range(0..start_alts.len());
    let parts: Vec<SymbolId> = start_alts[start_choice].clone();
    run.steps.push(TraceStep {
        position: 0,
        lhs: vec![run.g.start],
        rhs: parts.clone(),
        alternative: Some(start_choice),
        forced: false,
    });
    run.bump_form(1, parts.len())?;

    let parts: Vec<SymbolId> = if g.tier == Tier::Csg {
        let ctx = run.g.expansions_of(&parts)?;
        let ctx_choice = run.rng.gen_range(0..ctx.len());
        let chain = ctx[ctx_choice].clone();
        run.steps.push(TraceStep {
            position: 0,
            lhs: parts.clone(),
            rhs: chain.clone(),
            alternative: Some(ctx_choice),
            forced: false,
        });
        run.bump_form(parts.len(), chain.len())?;
        chain
    } else {
        parts
    };

    // Expansion counts are shared within a part and reset between parts.
    for &part in &parts {
        let mut counts: HashMap<SymbolId, u32> = HashMap::new();
        run.expand_frame(&[part], 0, &mut counts)?;
    }

    debug_assert_eq!(run.out.len(), run.emitted);
    let trace = DerivationTrace { steps: run.steps };
    debug_assert_eq!(trace.replay(g).as_ref().ok(), Some(&run.out));
    Ok((run.out, trace))
}

/// Map each lexical-class symbol to a uniformly chosen word of its class.
pub fn lexicalize(
    g: &Grammar,
    symbols: &[SymbolId],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<String>, GenerateError> {
    let mut tokens = Vec::with_capacity(symbols.len());
    for &sym in symbols {
        if !g.is_lexical(sym) {
            return Err(GenerateError::NonLexicalRemaining(
                g.symbol_name(sym).to_string(),
            ));
        }
        let class = g.symbol_name(sym);
        let words = g
            .lexicon
            .words_of(class)
            .filter(|w| !w.is_empty())
            .ok_or_else(|| GenerateError::EmptyClass(class.to_string()))?;
        let w = &words[rng.gen_range(0..words.len())];
        tokens.push(w.clone());
    }
    Ok(tokens)
}

/// Generate one sentence: expansion then lexicalization, on one seeded
/// PRNG stream.
pub fn generate(g: &Grammar, cfg: &GenConfig) -> Result<Sentence, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (symbols, trace) = expand_with_rng(g, cfg, &mut rng)?;
    let tokens = lexicalize(g, &symbols, &mut rng)?;
    Ok(Sentence {
        tokens,
        provenance: Provenance {
            grammar_id: g.id.clone(),
            seed: cfg.seed,
            trace,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Lexicon;
    use std::sync::Arc;

    fn single_choice_grammar() -> Grammar {
        let lexicon = Arc::new(
            Lexicon::parse("lexicon mini\nDet_sg: the\nN_sg: dog\nV_sg: barks\n").unwrap(),
        );
        Grammar::load(
            "grammar mini\ntier CFG\nstart S\nlexical Det_sg N_sg V_sg\nS -> NP VP\nNP -> Det_sg N_sg\nVP -> V_sg\n",
            lexicon,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_grammar_yields_unique_sentence_for_any_seed() {
        let g = single_choice_grammar();
        for seed in [0u64, 1, 7, 123
        ] {
            let s = generate(&g, &GenConfig::with_seed(seed)).unwrap();
            assert_eq!(s.tokens, vec!["the", "dog", "barks"]);
        }
    }

    #[test]
    fn trace_replays_to_symbol_string() {
        let g = Grammar::load_bundled(Tier::Cfg);
        for seed in 0..50u64 {
            let cfg = GenConfig::with_seed(seed);
            let (symbols, trace) = expand(&g, &cfg).unwrap();
            assert_eq!(trace.replay(&g).unwrap(), symbols, "seed {seed}");
        }
    }

    #[test]
    fn same_seed_same_sentence() {
        for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
            let g = Grammar::load_bundled(tier);
            let cfg = GenConfig::for_tier(tier, 42);
            let a = generate(&g, &cfg).unwrap();
            let b = generate(&g, &cfg).unwrap();
            assert_eq!(a.tokens, b.tokens);
        }
    }

    #[test]
    fn vocabulary_closure() {
        for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
            let g = Grammar::load_bundled(tier);
            for seed in 0..100u64 {
                let s = generate(&g, &GenConfig::for_tier(tier, seed)).unwrap();
                for tok in &s.tokens {
                    assert!(
                        !g.classes_of_word(tok).is_empty(),
                        "token {tok} outside lexicon (tier {tier}, seed {seed})"
                    );
                }
            }
        }
    }

    #[test]
    fn cap_one_marks_everything_after_start_forced() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let cfg = GenConfig {
            seed: 3,
            max_expansion_per_symbol: 1,
            ..GenConfig::default()
        };
        let (_, trace) = expand(&g, &cfg).unwrap();
        // With cap 1, each distinct symbol expands at most once per part;
        // everything beyond goes through the forced tables.
        assert!(trace.steps.iter().any(|s| s.forced));
        for step in trace.steps.iter().filter(|s| s.forced) {
            assert!(step.alternative.is_none());
        }
        // And the per-part counts still respect the cap.
        assert!(cap_respected(&g, &trace, 1));
    }

    #[test]
    fn caps_respected_at_defaults() {
        for tier in [Tier::Cfg, Tier::Ixg, Tier::Csg] {
            let g = Grammar::load_bundled(tier);
            for seed in 0..50u64 {
                let cfg = GenConfig::for_tier(tier, seed);
                let (_, trace) = expand(&g, &cfg).unwrap();
                assert!(
                    cap_respected(&g, &trace, cfg.max_expansion_per_symbol),
                    "tier {tier} seed {seed}"
                );
            }
        }
    }

    /// Non-forced expansion counts per part never exceed the cap. Part
    /// boundaries are where the trace position stops being covered by the
    /// previous part's subtree; counting per whole trace is a conservative
    /// overestimate, so allow parts x cap.
    fn cap_respected(g: &Grammar, trace: &DerivationTrace, cap: u32) -> bool {
        // Parts = rhs length of the top step (after context step for CSG).
        let top_parts = match g.tier {
            Tier::Csg => trace.steps[1].rhs.len() as u32,
            _ => trace.steps[0].rhs.len() as u32,
        };
        let mut counts: HashMap<SymbolId, u32> = HashMap::new();
        for step in trace.steps.iter().filter(|s| !s.forced && s.lhs.len() == 1) {
            *counts.entry(step.lhs[0]).or_insert(0) += 1;
        }
        counts
            .into_iter()
            .filter(|(sym, _)| *sym != g.start)
            .all(|(_, c)| c <= cap * top_parts)
    }

    #[test]
    fn csg_first_pair_agrees_in_trace() {
        let g = Grammar::load_bundled(Tier::Csg);
        for seed in 0..100u64 {
            let cfg = GenConfig::csg_selection(seed);
            let (_, trace) = expand(&g, &cfg).unwrap();
            let ctx = &trace.steps[1];
            assert_eq!(ctx.lhs.len(), 2, "context step second");
            let lead_np = g.symbol_name(ctx.rhs[0]);
            let lead_vp = g.symbol_name(ctx.rhs[2]);
            assert_eq!(
                lead_np.ends_with("_sg"),
                lead_vp.ends_with("_sg"),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn lexicalize_singleton_classes() {
        let g = single_choice_grammar();
        let syms = vec![
            g.symbol_named("Det_sg").unwrap(),
            g.symbol_named("N_sg").unwrap(),
            g.symbol_named("V_sg").unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            lexicalize(&g, &syms, &mut rng).unwrap(),
            vec!["the", "dog", "barks"]
        );
    }

    #[test]
    fn lexicalize_rejects_nonlexical() {
        let g = single_choice_grammar();
        let np = g.symbol_named("NP").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            lexicalize(&g, &[np], &mut rng),
            Err(GenerateError::NonLexicalRemaining(_))
        ));
    }

    #[test]
    fn overflow_guard_fires() {
        let lexicon = Arc::new(Lexicon::parse("lexicon mini\nN_sg: x\n").unwrap());
        let g = Grammar::load(
            "grammar pump\ntier CFG\nstart S\nlexical N_sg\nS -> A\nA -> A A | N_sg\n",
            lexicon,
        )
        .unwrap();
        let mut hit = false;
        for seed in 0..200u64 {
            let cfg = GenConfig {
                seed,
                max_expansion_per_symbol: 100_000,
                max_recursion_depth: 100_000,
                max_symbols: 64,
            };
            if matches!(generate(&g, &cfg), Err(GenerateError::Overflow(_))) {
                hit = true;
                break;
            }
        }
        assert!(hit, "pumping grammar should overflow the form ceiling");
    }
}
