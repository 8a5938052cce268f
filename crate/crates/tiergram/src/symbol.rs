//! Symbol inventory shared by grammars, generators, and recognizers.
//!
//! Symbols are interned per grammar: a [`SymbolId`] is an index into the
//! owning grammar's symbol table. Two kinds exist: nonterminals (rewritable)
//! and lexical classes (map directly to words through the [`crate::grammar::Lexicon`]).

use serde::{Deserialize, Serialize};
use std::fmt;

/// Index of a symbol inside one grammar's symbol table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolKind {
    NonTerminal,
    LexicalClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDef {
    pub name: String,
    pub kind: SymbolKind,
}

impl fmt::Display for SymbolDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Number feature carried by the `_sg` / `_pl` symbol families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Number {
    Singular,
    Plural,
}

impl Number {
    /// Number feature encoded in a symbol name, if any (`NP_sg` → Singular).
    pub fn of_symbol_name(name: &str) -> Option<Number> {
        if name.ends_with("_sg") {
            Some(Number::Singular)
        } else if name.ends_with("_pl") {
            Some(Number::Plural)
        } else {
            None
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Singular => f.write_str("sg"),
            Number::Plural => f.write_str("pl"),
        }
    }
}
