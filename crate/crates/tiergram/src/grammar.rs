//! Grammar definitions: symbols, productions, lexicon, tiers, validation.
//!
//! A [`Grammar`] is immutable after load and safe to share across threads.
//! The three bundled grammars (`cfg`, `ixg`, `csg`) are compiled in from the
//! documents under `grammars/` and share one English lexicon. The document
//! format is described in `docs/grammar-format.md`.

use crate::symbol::{SymbolDef, SymbolId, SymbolKind};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub const BUNDLED_CFG: &str = include_str!("../grammars/cfg.grammar");
pub const BUNDLED_IXG: &str = include_str!("../grammars/ixg.grammar");
pub const BUNDLED_CSG: &str = include_str!("../grammars/csg.grammar");
pub const BUNDLED_LEXICON: &str = include_str!("../grammars/english.lexicon");

/// Grammar tier in the grammar-automata hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Cfg,
    Ixg,
    Csg,
}

impl Tier {
    pub fn parse(s: &str) -> Option<Tier> {
        match s.to_ascii_lowercase().as_str() {
            "cfg" => Some(Tier::Cfg),
            "ixg" => Some(Tier::Ixg),
            "csg" => Some(Tier::Csg),
            _ => None,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::Cfg => f.write_str("CFG"),
            Tier::Ixg => f.write_str("IXG"),
            Tier::Csg => f.write_str("CSG"),
        }
    }
}

/// Word lists per lexical class. Shared by all three bundled grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub id: String,
    entries: BTreeMap<String, Vec<String>>,
    /// folded word -> class names containing it
    by_word: HashMap<String, Vec<String>>,
}

/// Case-fold used for all word comparisons.
fn fold(w: &str) -> String {
    w.to_lowercase()
}

impl Lexicon {
    pub fn new(id: &str, entries: BTreeMap<String, Vec<String>>) -> Lexicon {
        let mut by_word: HashMap<String, Vec<String>> = HashMap::new();
        for (class, words) in &entries {
            for w in words {
                by_word.entry(fold(w)).or_default().push(class.clone());
            }
        }
        Lexicon {
            id: id.to_string(),
            entries,
            by_word,
        }
    }

    /// Parse a lexicon document (`lexicon <id>` header, then `Class: word word ...`).
    pub fn parse(text: &str) -> Result<Lexicon, DocumentError> {
        let mut id = None;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("lexicon ") {
                id = Some(rest.trim().to_string());
                continue;
            }
            let (class, words) = line.split_once(':').ok_or(DocumentError::Malformed {
                line: lineno + 1,
                reason: "expected `Class: word word ...`".into(),
            })?;
            let class = class.trim().to_string();
            let words: Vec<String> = words.split_whitespace().map(|w| w.to_string()).collect();
            if class.is_empty() || words.is_empty() {
                return Err(DocumentError::Malformed {
                    line: lineno + 1,
                    reason: "empty class name or word list".into(),
                });
            }
            if words.iter().any(|w| w.chars().any(char::is_whitespace)) {
                return Err(DocumentError::Malformed {
                    line: lineno + 1,
                    reason: "words must not contain whitespace".into(),
                });
            }
            if entries.insert(class.clone(), words).is_some() {
                return Err(DocumentError::Malformed {
                    line: lineno + 1,
                    reason: format!("duplicate class {class}"),
                });
            }
        }
        Ok(Lexicon::new(
            id.as_deref().unwrap_or("lexicon"),
            entries,
        ))
    }

    pub fn bundled() -> Arc<Lexicon> {
        Arc::new(Lexicon::parse(BUNDLED_LEXICON).expect("bundled lexicon parses"))
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn words_of(&self, class: &str) -> Option<&[String]> {
        self.entries.get(class).map(|v| v.as_slice())
    }

    /// True iff `word` belongs to `class`. Matching folds case, and the
    /// surface form "an" is an alias of the determiner "a".
    pub fn word_in_class(&self, word: &str, class: &str) -> bool {
        let w = fold(word);
        let words = match self.entries.get(class) {
            Some(ws) => ws,
            None => return false,
        };
        if words.iter().any(|x| fold(x) == w) {
            return true;
        }
        w == "an" && words.iter().any(|x| fold(x) == "a")
    }

    /// All classes containing `word` (after folding and an→a aliasing).
    pub fn classes_of(&self, word: &str) -> Vec<&str> {
        let w = fold(word);
        let mut out: Vec<&str> = self
            .by_word
            .get(&w)
            .map(|v| v.iter().map(|s| s.as_str()).collect())
            .unwrap_or_default();
        if w == "an" {
            if let Some(more) = self.by_word.get("a") {
                for c in more {
                    if !out.contains(&c.as_str()) {
                        out.push(c);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// One production: an LHS symbol string (length 1 except for context rules in
/// the CSG) and its ordered RHS alternatives. `[]` encodes the empty RHS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: Vec<SymbolId>,
    pub alternatives: Vec<Vec<SymbolId>>,
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub id: String,
    pub tier: Tier,
    symbols: Vec<SymbolDef>,
    by_name: HashMap<String, SymbolId>,
    rules: Vec<Production>,
    rule_by_lhs: HashMap<Vec<SymbolId>, usize>,
    pub start: SymbolId,
    pub lexicon: Arc<Lexicon>,
    erasable: BTreeSet<SymbolId>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("document error: {0}")]
    Document(#[from] DocumentError),
    #[error("grammar `{id}` failed validation:\n{}", render_diagnostics(.diagnostics))]
    Invalid {
        id: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("unknown lhs {0:?}")]
    UnknownLhs(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn render_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("  - {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One validation finding, with symbol/rule coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// A nonterminal is referenced but has no production.
    UndefinedNonterminal { symbol: String },
    /// Symbol not reachable from the start symbol.
    Unreachable { symbol: String },
    /// Nonterminal cannot derive any terminal string.
    Unproductive { symbol: String },
    /// Lexical class missing from the bound lexicon, or empty.
    MissingLexiconClass { class: String },
    /// Start symbol missing or without productions.
    BadStart { reason: String },
    /// CSG tier: rule shrinks the sentential form and its lhs is not
    /// whitelisted as erasable.
    Contraction { lhs: String, alternative: usize },
    /// Multi-symbol lhs outside the CSG tier.
    ContextRuleOutsideCsg { lhs: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndefinedNonterminal { symbol } => {
                write!(f, "undefined nonterminal `{symbol}` (referenced but has no production)")
            }
            Diagnostic::Unreachable { symbol } => {
                write!(f, "symbol `{symbol}` is unreachable from the start symbol")
            }
            Diagnostic::Unproductive { symbol } => {
                write!(f, "unproductive nonterminal `{symbol}` (derives no terminal string)")
            }
            Diagnostic::MissingLexiconClass { class } => {
                write!(f, "lexical class `{class}` is missing from the lexicon or empty")
            }
            Diagnostic::BadStart { reason } => write!(f, "start symbol: {reason}"),
            Diagnostic::Contraction { lhs, alternative } => write!(
                f,
                "contraction: alternative {alternative} of `{lhs}` shrinks the form and `{lhs}` is not erasable"
            ),
            Diagnostic::ContextRuleOutsideCsg { lhs } => {
                write!(f, "context rule `{lhs}` is only allowed in the CSG tier")
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl Grammar {
    /// Parse and validate a grammar document against a lexicon.
    pub fn load(text: &str, lexicon: Arc<Lexicon>) -> Result<Grammar, GrammarError> {
        let g = Grammar::parse_unchecked(text, lexicon)?;
        let diagnostics = g.validate();
        if diagnostics.is_empty() {
            Ok(g)
        } else {
            Err(GrammarError::Invalid {
                id: g.id,
                diagnostics,
            })
        }
    }

    /// Parse without validating. Used by `validate` tests and diagnostics tooling.
    pub fn parse_unchecked(text: &str, lexicon: Arc<Lexicon>) -> Result<Grammar, DocumentError> {
        let mut id: Option<String> = None;
        let mut tier: Option<Tier> = None;
        let mut start_name: Option<String> = None;
        let mut lexical: BTreeSet<String> = BTreeSet::new();
        let mut erasable_names: BTreeSet<String> = BTreeSet::new();
        let mut raw_rules: Vec<(usize, Vec<String>, Vec<Vec<String>>)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            if let Some(rest) = line.strip_prefix("grammar ") {
                id = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("tier ") {
                tier = Some(Tier::parse(rest.trim()).ok_or(DocumentError::Malformed {
                    line: lineno,
                    reason: format!("unknown tier `{}`", rest.trim()),
                })?);
            } else if let Some(rest) = line.strip_prefix("start ") {
                start_name = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("lexical ") {
                lexical.extend(rest.split_whitespace().map(|s| s.to_string()));
            } else if let Some(rest) = line.strip_prefix("erasable ") {
                erasable_names.extend(rest.split_whitespace().map(|s| s.to_string()));
            } else if let Some((lhs, rhs)) = line.split_once("->") {
                let lhs: Vec<String> = lhs.split_whitespace().map(|s| s.to_string()).collect();
                if lhs.is_empty() {
                    return Err(DocumentError::Malformed {
                        line: lineno,
                        reason: "empty lhs".into(),
                    });
                }
                let mut alternatives = Vec::new();
                for alt in rhs.split('|') {
                    let alt = alt.trim();
                    if alt == "[]" {
                        alternatives.push(Vec::new());
                    } else if alt.is_empty() {
                        return Err(DocumentError::Malformed {
                            line: lineno,
                            reason: "empty alternative (use [] for the empty string)".into(),
                        });
                    } else {
                        alternatives
                            .push(alt.split_whitespace().map(|s| s.to_string()).collect());
                    }
                }
                raw_rules.push((lineno, lhs, alternatives));
            } else {
                return Err(DocumentError::Malformed {
                    line: lineno,
                    reason: format!("unrecognized line `{line}`"),
                });
            }
        }

        let id = id.ok_or(DocumentError::MissingHeader("grammar"))?;
        let tier = tier.ok_or(DocumentError::MissingHeader("tier"))?;
        let start_name = start_name.ok_or(DocumentError::MissingHeader("start"))?;

        // Intern every mentioned name; lexical classes are the declared ones.
        let mut symbols: Vec<SymbolDef> = Vec::new();
        let mut by_name: HashMap<String, SymbolId> = HashMap::new();
        let intern = |name: &str, symbols: &mut Vec<SymbolDef>, by_name: &mut HashMap<String, SymbolId>| -> SymbolId {
            if let Some(&id) = by_name.get(name) {
                return id;
            }
            let kind = if lexical.contains(name) {
                SymbolKind::LexicalClass
            } else {
                SymbolKind::NonTerminal
            };
            let sid = SymbolId(symbols.len() as u32);
            symbols.push(SymbolDef {
                name: name.to_string(),
                kind,
            });
            by_name.insert(name.to_string(), sid);
            sid
        };

        let start = intern(&start_name, &mut symbols, &mut by_name);
        for class in &lexical {
            intern(class, &mut symbols, &mut by_name);
        }

        let mut rules: Vec<Production> = Vec::new();
        let mut rule_by_lhs: HashMap<Vec<SymbolId>, usize> = HashMap::new();
        for (lineno, lhs_names, alt_names) in raw_rules {
            let lhs: Vec<SymbolId> = lhs_names
                .iter()
                .map(|n| intern(n, &mut symbols, &mut by_name))
                .collect();
            let alternatives: Vec<Vec<SymbolId>> = alt_names
                .iter()
                .map(|alt| {
                    alt.iter()
                        .map(|n| intern(n, &mut symbols, &mut by_name))
                        .collect()
                })
                .collect();
            if let Some(&idx) = rule_by_lhs.get(&lhs) {
                let _ = idx;
                return Err(DocumentError::Malformed {
                    line: lineno,
                    reason: format!(
                        "duplicate production for `{}` (merge alternatives with |)",
                        lhs_names.join(" ")
                    ),
                });
            }
            rule_by_lhs.insert(lhs.clone(), rules.len());
            rules.push(Production { lhs, alternatives });
        }

        let erasable = erasable_names
            .iter()
            .map(|n| intern(n, &mut symbols, &mut by_name))
            .collect();

        Ok(Grammar {
            id,
            tier,
            symbols,
            by_name,
            rules,
            rule_by_lhs,
            start,
            lexicon,
            erasable,
        })
    }

    pub fn load_bundled(tier: Tier) -> Grammar {
        let lexicon = Lexicon::bundled();
        let text = match tier {
            Tier::Cfg => BUNDLED_CFG,
            Tier::Ixg => BUNDLED_IXG,
            Tier::Csg => BUNDLED_CSG,
        };
        Grammar::load(text, lexicon).expect("bundled grammar is valid")
    }

    /// All three bundled grammars, sharing one lexicon.
    pub fn bundled_all() -> Vec<Grammar> {
        let lexicon = Lexicon::bundled();
        [BUNDLED_CFG, BUNDLED_IXG, BUNDLED_CSG]
            .iter()
            .map(|text| Grammar::load(text, lexicon.clone()).expect("bundled grammar is valid"))
            .collect()
    }

    pub fn symbol(&self, id: SymbolId) -> &SymbolDef {
        &self.symbols[id.index()]
    }

    pub fn symbol_name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn symbol_named(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &SymbolDef)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, d)| (SymbolId(i as u32), d))
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_lexical(&self, id: SymbolId) -> bool {
        self.symbols[id.index()].kind == SymbolKind::LexicalClass
    }

    pub fn is_erasable(&self, id: SymbolId) -> bool {
        self.erasable.contains(&id)
    }

    pub fn rules(&self) -> &[Production] {
        &self.rules
    }

    /// Production for an lhs symbol string, if declared.
    pub fn production_for(&self, lhs: &[SymbolId]) -> Option<&Production> {
        self.rule_by_lhs.get(lhs).map(|&i| &self.rules[i])
    }

    pub fn has_production(&self, sym: SymbolId) -> bool {
        self.rule_by_lhs.contains_key(&[sym][..])
    }

    /// RHS alternatives of `lhs` in declaration order. Stable across calls.
    pub fn expansions_of(&self, lhs: &[SymbolId]) -> Result<&[Vec<SymbolId>], GrammarError> {
        self.production_for(lhs)
            .map(|p| p.alternatives.as_slice())
            .ok_or_else(|| {
                GrammarError::UnknownLhs(
                    lhs.iter().map(|&s| self.symbol_name(s).to_string()).collect(),
                )
            })
    }

    /// Convenience: expansions of a single symbol by name.
    pub fn expansions_of_named(&self, name: &str) -> Result<&[Vec<SymbolId>], GrammarError> {
        let sym = self
            .symbol_named(name)
            .ok_or_else(|| GrammarError::UnknownLhs(vec![name.to_string()]))?;
        self.expansions_of(&[sym])
    }

    /// Lexical classes of this grammar that contain `word`.
    pub fn classes_of_word(&self, word: &str) -> Vec<SymbolId> {
        self.lexicon
            .classes_of(word)
            .into_iter()
            .filter_map(|c| self.symbol_named(c))
            .filter(|&s| self.is_lexical(s))
            .collect()
    }

    /// Structural validation. Empty iff all grammar invariants hold.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();

        // Start symbol must have a production.
        if !self.has_production(self.start) {
            out.push(Diagnostic::BadStart {
                reason: format!("`{}` has no production", self.symbol_name(self.start)),
            });
        }

        // Lexical classes must exist (non-empty) in the lexicon.
        for (id, def) in self.symbols() {
            if self.is_lexical(id) {
                match self.lexicon.words_of(&def.name) {
                    Some(words) if !words.is_empty() => {}
                    _ => out.push(Diagnostic::MissingLexiconClass {
                        class: def.name.clone(),
                    }),
                }
            }
        }

        // Every nonterminal appearing anywhere must have a production.
        let mut referenced: BTreeSet<SymbolId> = BTreeSet::new();
        referenced.insert(self.start);
        for rule in &self.rules {
            for &s in &rule.lhs {
                referenced.insert(s);
            }
            for alt in &rule.alternatives {
                for &s in alt {
                    referenced.insert(s);
                }
            }
        }
        for &s in &referenced {
            if !self.is_lexical(s) && !self.has_production(s) {
                out.push(Diagnostic::UndefinedNonterminal {
                    symbol: self.symbol_name(s).to_string(),
                });
            }
        }

        // Reachability from the start symbol.
        let mut reachable: HashSet<SymbolId> = HashSet::new();
        let mut stack = vec![self.start];
        while let Some(s) = stack.pop() {
            if !reachable.insert(s) {
                continue;
            }
            for rule in &self.rules {
                // A rule fires if every lhs symbol is reachable (single-symbol
                // rules: the symbol itself; context rules: the whole tuple).
                if rule.lhs.contains(&s) && rule.lhs.iter().all(|l| reachable.contains(l) || *l == s)
                {
                    for alt in &rule.alternatives {
                        for &r in alt {
                            if !reachable.contains(&r) {
                                stack.push(r);
                            }
                        }
                    }
                }
            }
        }
        for (id, def) in self.symbols() {
            if !reachable.contains(&id) {
                out.push(Diagnostic::Unreachable {
                    symbol: def.name.clone(),
                });
            }
        }

        // Productivity: fixed point over "derives some terminal string".
        let mut productive: HashSet<SymbolId> = self
            .symbols()
            .filter(|(id, _)| self.is_lexical(*id))
            .map(|(id, _)| id)
            .collect();
        loop {
            let mut changed = false;
            for rule in &self.rules {
                let fires = rule
                    .alternatives
                    .iter()
                    .any(|alt| alt.iter().all(|s| productive.contains(s)));
                if fires {
                    for &l in &rule.lhs {
                        if productive.insert(l) {
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for (id, def) in self.symbols() {
            if !self.is_lexical(id) && !productive.contains(&id) && self.has_production(id) {
                out.push(Diagnostic::Unproductive {
                    symbol: def.name.clone(),
                });
            }
        }

        // Context rules only in the CSG; CSG must be non-contracting modulo
        // the erasable whitelist.
        for rule in &self.rules {
            if rule.lhs.len() > 1 && self.tier != Tier::Csg {
                out.push(Diagnostic::ContextRuleOutsideCsg {
                    lhs: self.lhs_names(rule),
                });
            }
            if self.tier == Tier::Csg {
                for (i, alt) in rule.alternatives.iter().enumerate() {
                    if alt.len() < rule.lhs.len()
                        && !rule.lhs.iter().all(|&l| self.is_erasable(l))
                    {
                        out.push(Diagnostic::Contraction {
                            lhs: self.lhs_names(rule),
                            alternative: i,
                        });
                    }
                }
            }
        }

        out
    }

    fn lhs_names(&self, rule: &Production) -> String {
        rule.lhs
            .iter()
            .map(|&s| self.symbol_name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Lexical classes reachable from the start symbol.
    pub fn reachable_lexical_classes(&self) -> BTreeSet<String> {
        let mut reachable: HashSet<SymbolId> = HashSet::new();
        let mut stack = vec![self.start];
        while let Some(s) = stack.pop() {
            if !reachable.insert(s) {
                continue;
            }
            for rule in &self.rules {
                if rule.lhs.contains(&s) {
                    for alt in &rule.alternatives {
                        for &r in alt {
                            if !reachable.contains(&r) {
                                stack.push(r);
                            }
                        }
                    }
                }
            }
        }
        reachable
            .into_iter()
            .filter(|&s| self.is_lexical(s))
            .map(|s| self.symbol_name(s).to_string())
            .collect()
    }

    /// Lexical classes actually used on some RHS (or as start).
    pub fn used_lexical_classes(&self) -> BTreeSet<String> {
        let mut used = BTreeSet::new();
        for rule in &self.rules {
            for alt in &rule.alternatives {
                for &s in alt {
                    if self.is_lexical(s) {
                        used.insert(self.symbol_name(s).to_string());
                    }
                }
            }
        }
        used
    }

    /// Render symbol ids as names (debugging and error messages).
    pub fn names(&self, syms: &[SymbolId]) -> Vec<String> {
        syms.iter().map(|&s| self.symbol_name(s).to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini_lexicon() -> Arc<Lexicon> {
        Arc::new(
            Lexicon::parse(
                "lexicon mini\nDet_sg: the a\nN_sg: dog\nV_sg: barks\nQ_class: q\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn bundled_grammars_validate_clean() {
        for g in Grammar::bundled_all() {
            assert_eq!(g.validate(), vec![], "grammar {} should be clean", g.id);
        }
    }

    #[test]
    fn bundled_cfg_has_expected_start_rule() {
        let g = Grammar::load_bundled(Tier::Cfg);
        assert_eq!(g.tier, Tier::Cfg);
        assert_eq!(g.symbol_name(g.start), "S");
        let alts = g.expansions_of(&[g.start]).unwrap();
        assert_eq!(alts.len(), 1);
        assert_eq!(g.names(&alts[0]), vec!["NP", "VP"]);
    }

    #[test]
    fn bundled_csg_has_context_rule_with_two_chains() {
        let g = Grammar::load_bundled(Tier::Csg);
        let np_seq = g.symbol_named("NP_sequence").unwrap();
        let vp_ph = g.symbol_named("VP_placeholder").unwrap();
        let alts = g.expansions_of(&[np_seq, vp_ph]).unwrap();
        assert_eq!(alts.len(), 2);
        assert_eq!(
            g.names(&alts[0]),
            vec!["NP_sg", "NP_sequence", "VP_sg", "VP_sequence"]
        );
        assert_eq!(
            g.names(&alts[1]),
            vec!["NP_pl", "NP_sequence", "VP_pl", "VP_sequence"]
        );
    }

    #[test]
    fn unknown_lhs_is_an_error() {
        let g = Grammar::load_bundled(Tier::Cfg);
        let err = g.expansions_of_named("ZZZ").unwrap_err();
        assert!(matches!(err, GrammarError::UnknownLhs(_)));
    }

    #[test]
    fn dangling_reference_is_reported_by_name() {
        let text = "grammar t\ntier CFG\nstart S\nlexical N_sg\nS -> XP N_sg\n";
        let g = Grammar::parse_unchecked(text, mini_lexicon()).unwrap();
        let diags = g.validate();
        assert!(diags.iter().any(|d| matches!(
            d,
            Diagnostic::UndefinedNonterminal { symbol } if symbol == "XP"
        )));
    }

    #[test]
    fn unproductive_nonterminal_is_reported() {
        let text = "grammar t\ntier CFG\nstart S\nlexical N_sg\nS -> N_sg | Q\nQ -> Q\n";
        let g = Grammar::parse_unchecked(text, mini_lexicon()).unwrap();
        let diags = g.validate();
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::Unproductive { symbol } if symbol == "Q")));
    }

    #[test]
    fn unlisted_erasing_rule_in_csg_is_contraction() {
        let text = "grammar t\ntier CSG\nstart S\nlexical N_sg\nS -> N_sg A\nA -> N_sg | []\n";
        let g = Grammar::parse_unchecked(text, mini_lexicon()).unwrap();
        let diags = g.validate();
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::Contraction { lhs, .. } if lhs == "A")));
        // Whitelisting the symbol clears the diagnostic.
        let text2 =
            "grammar t\ntier CSG\nstart S\nlexical N_sg\nerasable A\nS -> N_sg A\nA -> N_sg | []\n";
        let g2 = Grammar::parse_unchecked(text2, mini_lexicon()).unwrap();
        assert!(g2.validate().is_empty());
    }

    #[test]
    fn loading_same_document_twice_is_structurally_identical() {
        let lex = Lexicon::bundled();
        let a = Grammar::load(BUNDLED_IXG, lex.clone()).unwrap();
        let b = Grammar::load(BUNDLED_IXG, lex).unwrap();
        assert_eq!(a.id, b.id);
        assert_eq!(a.tier, b.tier);
        assert_eq!(a.start, b.start);
        assert_eq!(a.rules(), b.rules());
        let an: Vec<_> = a.symbols().map(|(_, d)| d.clone()).collect();
        let bn: Vec<_> = b.symbols().map(|(_, d)| d.clone()).collect();
        assert_eq!(an, bn);
    }

    #[test]
    fn closure_every_rhs_symbol_is_in_inventory() {
        for g in Grammar::bundled_all() {
            for rule in g.rules() {
                for alt in &rule.alternatives {
                    for &s in alt {
                        assert!(s.index() < g.symbol_count());
                    }
                }
            }
        }
    }

    #[test]
    fn reachable_lexical_classes_equal_used_classes() {
        for g in Grammar::bundled_all() {
            assert_eq!(
                g.reachable_lexical_classes(),
                g.used_lexical_classes(),
                "grammar {}",
                g.id
            );
        }
    }

    #[test]
    fn an_aliases_det_sg_a() {
        let lex = Lexicon::bundled();
        assert!(lex.word_in_class("an", "Det_sg"));
        assert!(lex.word_in_class("An", "Det_sg"));
        assert!(!lex.word_in_class("an", "Det_pl"));
        assert!(lex.classes_of("an").contains(&"Det_sg"));
    }
}
