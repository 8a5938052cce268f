//! Brute-force membership oracle: exhaustively enumerates every terminal
//! string the grammar derives up to a length cap, applying rules at all
//! positions of all reachable sentential forms. Deliberately independent of
//! the chart parser and of the leftmost-normalized search — it is the
//! cross-check for both.

use crate::grammar::Grammar;
use crate::recognizer::csg::{max_erasures, min_terminal_lengths};
use crate::symbol::SymbolId;
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BruteError {
    #[error("length cap {0} exceeds the supported maximum of {1}")]
    CapTooLarge(usize, usize),
    #[error("enumeration exceeded {0} sentential forms; reduce the cap or the lexicon")]
    Exploded(usize),
}

pub const MAX_CAP: usize = 10;
const MAX_FORMS: usize = 30_000_000;

/// The set of derivable lexical-class strings with length <= cap.
pub struct LanguageTable {
    strings: HashSet<Vec<SymbolId>>,
    pub forms_explored: usize,
}

/// Enumerate L(g) restricted to terminal strings of length <= `length_cap`.
pub fn enumerate_language(g: &Grammar, length_cap: usize) -> Result<LanguageTable, BruteError> {
    if length_cap > MAX_CAP {
        return Err(BruteError::CapTooLarge(length_cap, MAX_CAP));
    }
    let min_len = min_terminal_lengths(g);
    // Sentential forms stay within length_cap + the erasure slack.
    let max_form_len = length_cap + max_erasures(g, 8);
    let mut strings: HashSet<Vec<SymbolId>> = HashSet::new();
    let mut seen: HashSet<Vec<SymbolId>> = HashSet::new();
    let mut queue: VecDeque<Vec<SymbolId>> = VecDeque::new();
    queue.push_back(vec![g.start]);
    seen.insert(vec![g.start]);

    while let Some(form) = queue.pop_front() {
        if seen.len() > MAX_FORMS {
            return Err(BruteError::Exploded(MAX_FORMS));
        }
        if form.iter().all(|&s| g.is_lexical(s)) {
            if form.len() <= length_cap {
                strings.insert(form);
            }
            continue;
        }
        // Apply every rule at every position.
        for rule in g.rules() {
            let l = rule.lhs.len();
            if form.len() < l {
                continue;
            }
            for pos in 0..=(form.len() - l) {
                if form[pos..pos + l] != rule.lhs[..] {
                    continue;
                }
                for alt in &rule.alternatives {
                    let mut next: Vec<SymbolId> =
                        Vec::with_capacity(form.len() - l + alt.len());
                    next.extend_from_slice(&form[..pos]);
                    next.extend_from_slice(alt);
                    next.extend_from_slice(&form[pos + l..]);
                    if next.len() > max_form_len {
                        continue;
                    }
                    let need: usize = next.iter().map(|s| min_len[s.index()]).sum();
                    if need > length_cap {
                        continue;
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    Ok(LanguageTable {
        strings,
        forms_explored: seen.len(),
    })
}

impl LanguageTable {
    /// Membership of a token string under lexical-class matching: some
    /// class assignment of the tokens must be a derivable class string.
    pub fn contains_tokens(&self, g: &Grammar, tokens: &[String]) -> bool {
        let classes: Vec<Vec<SymbolId>> = tokens.iter().map(|t| g.classes_of_word(t)).collect();
        if classes.iter().any(|c| c.is_empty()) {
            return false;
        }
        let mut assignment: Vec<SymbolId> = Vec::with_capacity(tokens.len());
        self.try_assign(&classes, 0, &mut assignment)
    }

    fn try_assign(
        &self,
        classes: &[Vec<SymbolId>],
        idx: usize,
        acc: &mut Vec<SymbolId>,
    ) -> bool {
        if idx == classes.len() {
            return self.strings.contains(acc);
        }
        for &c in &classes[idx] {
            acc.push(c);
            if self.try_assign(classes, idx + 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

/// One-shot membership check; builds the table and queries it.
pub fn brute_force_membership(
    g: &Grammar,
    tokens: &[String],
    length_cap: usize,
) -> Result<bool, BruteError> {
    if tokens.len() > length_cap {
        return Ok(false);
    }
    let table = enumerate_language(g, length_cap)?;
    Ok(table.contains_tokens(g, tokens))
}
