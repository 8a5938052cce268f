//! Derivation traces: the replayable record of rule applications that turned
//! the start symbol into a lexical-class string.
//!
//! Both the generator and the recognizers emit traces in leftmost order; a
//! trace replays deterministically and is the basis for the selection
//! filters (agreement, nesting, cross-serial shape).

use crate::grammar::Grammar;
use crate::symbol::{Number, SymbolId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One rewrite: `lhs` (one symbol, or the adjacent pair for CSG context
/// rules) replaced by `rhs` at `position` in the sentential form.
/// `alternative` indexes the grammar production's RHS list; forced steps
/// come from the forced-terminal-expansion tables instead and carry `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub position: usize,
    pub lhs: Vec<SymbolId>,
    pub rhs: Vec<SymbolId>,
    pub alternative: Option<usize>,
    pub forced: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {step}: position {position} out of range (form length {form_len})")]
    PositionOutOfRange {
        step: usize,
        position: usize,
        form_len: usize,
    },
    #[error("step {step}: lhs mismatch at position {position}")]
    LhsMismatch { step: usize, position: usize },
}

impl DerivationTrace {
    /// Replay from the start symbol, returning the final symbol string.
    pub fn replay(&self, g: &Grammar) -> Result<Vec<SymbolId>, ReplayError> {
        let mut form = vec![g.start];
        for (i, step) in self.steps.iter().enumerate() {
            let end = step.position + step.lhs.len();
            if end > form.len() {
                return Err(ReplayError::PositionOutOfRange {
                    step: i,
                    position: step.position,
                    form_len: form.len(),
                });
            }
            if form[step.position..end] != step.lhs[..] {
                return Err(ReplayError::LhsMismatch {
                    step: i,
                    position: step.position,
                });
            }
            form.splice(step.position..end, step.rhs.iter().copied());
        }
        Ok(form)
    }
}

/// Serializable form of a trace step, with symbol names instead of ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepRecord {
    pub position: usize,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub alternative: Option<usize>,
    pub forced: bool,
}

pub fn trace_to_records(g: &Grammar, trace: &DerivationTrace) -> Vec<TraceStepRecord> {
    trace
        .steps
        .iter()
        .map(|s| TraceStepRecord {
            position: s.position,
            lhs: g.names(&s.lhs),
            rhs: g.names(&s.rhs),
            alternative: s.alternative,
            forced: s.forced,
        })
        .collect()
}

pub fn trace_from_records(
    g: &Grammar,
    records: &[TraceStepRecord],
) -> Option<DerivationTrace> {
    let mut steps = Vec::with_capacity(records.len());
    for r in records {
        let lhs = r
            .lhs
            .iter()
            .map(|n| g.symbol_named(n))
            .collect::<Option<Vec<_>>>()?;
        let rhs = r
            .rhs
            .iter()
            .map(|n| g.symbol_named(n))
            .collect::<Option<Vec<_>>>()?;
        steps.push(TraceStep {
            position: r.position,
            lhs,
            rhs,
            alternative: r.alternative,
            forced: r.forced,
        });
    }
    Some(DerivationTrace { steps })
}

/// Derivation tree rebuilt from a trace of single-symbol steps. CSG traces
/// (which contain a two-symbol context step) are analyzed directly on the
/// step list instead.
#[derive(Debug)]
pub struct TraceTree {
    pub nodes: Vec<TraceNode>,
    pub root: usize,
}

#[derive(Debug)]
pub struct TraceNode {
    pub sym: SymbolId,
    pub children: Vec<usize>,
    /// Index of the trace step that expanded this node (None for leaves).
    pub step: Option<usize>,
    pub parent: Option<usize>,
}

impl TraceTree {
    /// Rebuild the tree by replaying the trace. Fails on context (multi-lhs)
    /// steps or on a trace that does not replay.
    pub fn from_trace(g: &Grammar, trace: &DerivationTrace) -> Option<TraceTree> {
        let mut nodes = vec![TraceNode {
            sym: g.start,
            children: Vec::new(),
            step: None,
            parent: None,
        }];
        // Frontier of unexpanded node indices, mirroring the sentential form.
        let mut form: Vec<usize> = vec![0];
        for (i, step) in trace.steps.iter().enumerate() {
            if step.lhs.len() != 1 {
                return None;
            }
            let node_idx = *form.get(step.position)?;
            if nodes[node_idx].sym != step.lhs[0] {
                return None;
            }
            nodes[node_idx].step = Some(i);
            let mut child_ids = Vec::with_capacity(step.rhs.len());
            for &sym in &step.rhs {
                let id = nodes.len();
                nodes.push(TraceNode {
                    sym,
                    children: Vec::new(),
                    step: None,
                    parent: Some(node_idx),
                });
                child_ids.push(id);
            }
            nodes[node_idx].children = child_ids.clone();
            form.splice(step.position..=step.position, child_ids);
        }
        Some(TraceTree { nodes, root: 0 })
    }

    /// Walk ancestors of `node` (excluding itself), root last.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[node].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    pub fn nodes_with_symbol(&self, sym: SymbolId) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].sym == sym)
            .collect()
    }
}

/// Number feature of a symbol, via its `_sg`/`_pl` suffix.
pub fn symbol_number(g: &Grammar, sym: SymbolId) -> Option<Number> {
    Number::of_symbol_name(g.symbol_name(sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Tier;

    #[test]
    fn replay_detects_lhs_mismatch() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let np = g.symbol_named("NP").unwrap();
        let vp = g.symbol_named("VP").unwrap();
        let bad = DerivationTrace {
            steps: vec![TraceStep {
                position: 0,
                lhs: vec![np],
                rhs: vec![vp],
                alternative: Some(0),
                forced: false,
            }],
        };
        assert!(matches!(
            bad.replay(&g),
            Err(ReplayError::LhsMismatch { .. })
        ));
    }

    #[test]
    fn replay_applies_steps_in_order() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let s = g.start;
        let np = g.symbol_named("NP").unwrap();
        let vp = g.symbol_named("VP").unwrap();
        let np_sg = g.symbol_named("NP_sg").unwrap();
        let trace = DerivationTrace {
            steps: vec![
                TraceStep {
                    position: 0,
                    lhs: vec![s],
                    rhs: vec![np, vp],
                    alternative: Some(0),
                    forced: false,
                },
                TraceStep {
                    position: 0,
                    lhs: vec![np],
                    rhs: vec![np_sg],
                    alternative: Some(0),
                    forced: false,
                },
            ],
        };
        assert_eq!(trace.replay(&g).unwrap(), vec![np_sg, vp]);
    }
}
