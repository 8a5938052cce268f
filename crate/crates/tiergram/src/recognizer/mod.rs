//! Language-membership recognition for the three bundled grammar tiers, and
//! classification of strings by the set of grammars accepting them.
//!
//! - CFG and IXG: chart parsing (complete; never returns `Unknown`). The IXG
//!   is recognized over its rule skeleton with the number feature as the
//!   index annotation; accepted parses report the index pushes/pops threaded
//!   through relative clauses.
//! - CSG: bounded breadth-first derivation search (`Unknown` only on budget
//!   exhaustion).

pub mod brute;
mod csg;
mod earley;

pub use brute::{brute_force_membership, enumerate_language, BruteError, LanguageTable};
pub use csg::{max_erasures, min_terminal_lengths, SearchBudget};

use crate::grammar::{Grammar, Tier};
use crate::symbol::Number;
use crate::trace::{DerivationTrace, TraceTree};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Reject => f.write_str("reject"),
            Verdict::Unknown => f.write_str("unknown"),
        }
    }
}

/// Search-cost counters for one recognition call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cost {
    pub nodes_explored: u64,
    pub max_frontier: u64,
    pub elapsed: Duration,
}

/// Index-stack operation reported for IXG parses: the number feature pushed
/// when a relative clause opens and popped when its verb phrase resolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOp {
    Push(Number),
    Pop(Number),
}

#[derive(Debug)]
pub struct ParseResult {
    pub verdict: Verdict,
    /// Present iff verdict is Accept; replays to the input's class string.
    pub trace: Option<DerivationTrace>,
    pub cost: Cost,
    /// Diagnostic for rejects (e.g. a token outside every lexical class).
    pub note: Option<String>,
    /// IXG only: index operations of the accepted parse.
    pub index_ops: Vec<IndexOp>,
}

impl ParseResult {
    fn reject(note: Option<String>, cost: Cost) -> ParseResult {
        ParseResult {
            verdict: Verdict::Reject,
            trace: None,
            cost,
            note,
            index_ops: Vec::new(),
        }
    }
}

/// Tokens whose words all belong to at least one lexical class of `g`;
/// returns the offending token otherwise.
fn unknown_token(g: &Grammar, tokens: &[String]) -> Option<String> {
    tokens
        .iter()
        .find(|t| g.classes_of_word(t).is_empty())
        .cloned()
}

fn chart_recognize(g: &Grammar, tokens: &[String]) -> ParseResult {
    let started = Instant::now();
    if tokens.is_empty() {
        return ParseResult::reject(Some("empty token list".into()), Cost::default());
    }
    if let Some(tok) = unknown_token(g, tokens) {
        return ParseResult::reject(
            Some(format!(
                "token `{tok}` matches no lexical class used by grammar {}",
                g.id
            )),
            Cost {
                elapsed: started.elapsed(),
                ..Cost::default()
            },
        );
    }
    let parser = earley::Earley::new(g);
    let rec = parser.recognize(tokens);
    let cost = Cost {
        nodes_explored: rec.cost.items,
        max_frontier: rec.cost.max_set,
        elapsed: started.elapsed(),
    };
    if !rec.accepted {
        return ParseResult::reject(None, cost);
    }
    let trace = parser
        .derivation(&rec, tokens)
        .expect("accepted input yields a derivation");
    ParseResult {
        verdict: Verdict::Accept,
        trace: Some(trace),
        cost,
        note: None,
        index_ops: Vec::new(),
    }
}

/// Membership in L(g) for the context-free grammar. Complete.
pub fn recognize_cfg(g: &Grammar, tokens: &[String]) -> ParseResult {
    debug_assert_eq!(g.tier, Tier::Cfg);
    chart_recognize(g, tokens)
}

/// Membership in L(g) for the indexed grammar: chart parsing over the rule
/// skeleton with the number feature threaded as the index annotation.
/// Complete for this grammar family.
pub fn recognize_ixg(g: &Grammar, tokens: &[String]) -> ParseResult {
    debug_assert_eq!(g.tier, Tier::Ixg);
    let mut result = chart_recognize(g, tokens);
    if let Some(trace) = &result.trace {
        result.index_ops = index_operations(g, trace);
    }
    result
}

/// Membership for the context-sensitive grammar via bounded derivation
/// search. Sound always; complete within the node budget; `Unknown` when the
/// budget is exhausted.
pub fn recognize_csg(g: &Grammar, tokens: &[String], budget: SearchBudget) -> ParseResult {
    debug_assert_eq!(g.tier, Tier::Csg);
    let started = Instant::now();
    if tokens.is_empty() {
        return ParseResult::reject(Some("empty token list".into()), Cost::default());
    }
    if let Some(tok) = unknown_token(g, tokens) {
        return ParseResult::reject(
            Some(format!(
                "token `{tok}` matches no lexical class used by grammar {}",
                g.id
            )),
            Cost {
                elapsed: started.elapsed(),
                ..Cost::default()
            },
        );
    }
    let (outcome, stats) = csg::search(g, tokens, budget);
    let cost = Cost {
        nodes_explored: stats.nodes,
        max_frontier: stats.max_frontier,
        elapsed: started.elapsed(),
    };
    match outcome {
        csg::SearchOutcome::Accept(trace) => ParseResult {
            verdict: Verdict::Accept,
            trace: Some(trace),
            cost,
            note: None,
            index_ops: Vec::new(),
        },
        csg::SearchOutcome::Reject => ParseResult::reject(None, cost),
        csg::SearchOutcome::Unknown => ParseResult {
            verdict: Verdict::Unknown,
            trace: None,
            cost,
            note: Some("node budget exhausted".into()),
            index_ops: Vec::new(),
        },
    }
}

/// Recognize under whichever tier `g` declares.
pub fn recognize(g: &Grammar, tokens: &[String], budget: SearchBudget) -> ParseResult {
    match g.tier {
        Tier::Cfg => recognize_cfg(g, tokens),
        Tier::Ixg => recognize_ixg(g, tokens),
        Tier::Csg => recognize_csg(g, tokens, budget),
    }
}

/// Outcome of classifying one token string against a set of grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Grammar ids whose recognizer accepted.
    pub accepted: BTreeSet<String>,
    /// Grammar ids whose recognizer exhausted its budget (CSG only).
    pub unknown: BTreeSet<String>,
}

/// The set of grammars accepting `tokens`. The bundled grammars are not
/// nested, so the result is a set, not a single tier.
pub fn classify(grammars: &[Grammar], tokens: &[String], budget: SearchBudget) -> Classification {
    let mut accepted = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    for g in grammars {
        let r = recognize(g, tokens, budget);
        match r.verdict {
            Verdict::Accept => {
                accepted.insert(g.id.clone());
            }
            Verdict::Unknown => {
                unknown.insert(g.id.clone());
            }
            Verdict::Reject => {}
        }
    }
    Classification { accepted, unknown }
}

/// Index operations of an IXG derivation: Push(number) when a relative
/// clause with that number feature opens, Pop when its subtree closes.
pub fn index_operations(g: &Grammar, trace: &DerivationTrace) -> Vec<IndexOp> {
    let tree = match TraceTree::from_trace(g, trace) {
        Some(t) => t,
        None => return Vec::new(),
    };
    let mut ops = Vec::new();
    walk_index_ops(g, &tree, tree.root, &mut ops);
    ops
}

fn walk_index_ops(g: &Grammar, tree: &TraceTree, node: usize, ops: &mut Vec<IndexOp>) {
    let sym = tree.nodes[node].sym;
    let name = g.symbol_name(sym);
    let rc_number = match name {
        "RC_sg" => Some(Number::Singular),
        "RC_pl" => Some(Number::Plural),
        _ => None,
    };
    if let Some(num) = rc_number {
        ops.push(IndexOp::Push(num));
    }
    for &c in &tree.nodes[node].children {
        walk_index_ops(g, tree, c, ops);
    }
    if let Some(num) = rc_number {
        ops.push(IndexOp::Pop(num));
    }
}

/// Split a sentence line into recognizer tokens: whitespace-separated words
/// with sentence-final punctuation stripped. Case and the an→a alias are
/// handled at matching time, not here.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace()
        .map(|w| w.trim_matches(|c: char| ".,!?;:".contains(c)).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}
