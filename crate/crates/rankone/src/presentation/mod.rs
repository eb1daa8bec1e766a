//! Finite presentations: parsing, deficiency bookkeeping, greedy Tietze
//! elimination, and the Magnus rewriting of 2-generator 1-relator
//! presentations into HNN data.

mod parse;
mod split;
mod tietze;

pub use parse::parse_presentation;
pub use split::{one_relator_hnn_split, zero_exponent_change, HnnSplitting, SplitKind};
pub use tietze::{tietze_simplify, TietzeStep, TietzeTrace};

use std::fmt;

use thiserror::Error;

use crate::freegroup::{Alphabet, FreeGroupError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("expected {expected}, found {found} (line {line}, column {col})")]
    Unexpected {
        expected: String,
        found: String,
        line: usize,
        col: usize,
    },
    #[error(transparent)]
    Word(#[from] FreeGroupError),
    #[error("{0}")]
    Precondition(String),
}

/// A finite presentation ⟨X | R⟩. Relators are kept cyclically reduced and
/// nonempty; identity relators are dropped at construction (counted in
/// `dropped_identities`), duplicates are kept as written.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Alphabet,
    relators: Vec<Word>,
    dropped_identities: usize,
}

impl Presentation {
    pub fn new(generators: Alphabet, relators: Vec<Word>) -> Self {
        let mut kept = Vec::new();
        let mut dropped = 0usize;
        for r in relators {
            assert!(
                r.alphabet().same_as(&generators),
                "relator alphabet mismatch"
            );
            let (core, _) = r.cyclic_reduce();
            if core.is_identity() {
                dropped += 1;
            } else {
                kept.push(core);
            }
        }
        Presentation {
            generators,
            relators: kept,
            dropped_identities: dropped,
        }
    }

    pub fn free(generators: Alphabet) -> Self {
        Presentation::new(generators, Vec::new())
    }

    pub fn generators(&self) -> &Alphabet {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn dropped_identities(&self) -> usize {
        self.dropped_identities
    }

    /// |X| − |R|, recomputed from the normalized presentation.
    pub fn deficiency(&self) -> i64 {
        self.generators.rank() as i64 - self.relators.len() as i64
    }

    /// Signed letter count of `gen` in each relator.
    pub fn exponent_sums(&self, gen: usize) -> Result<Vec<i64>, PresentationError> {
        if gen >= self.generators.rank() {
            return Err(PresentationError::UnknownGenerator(format!("#{gen}")));
        }
        Ok(self.relators.iter().map(|r| r.exponent_sum(gen)).collect())
    }

    pub fn exponent_sums_by_name(&self, name: &str) -> Result<Vec<i64>, PresentationError> {
        let gen = self
            .generators
            .index_of(name)
            .ok_or_else(|| PresentationError::UnknownGenerator(name.to_string()))?;
        self.exponent_sums(gen)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {}", self.generators.names().join(", "))?;
        write!(f, " | ")?;
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "{} >", rels.join(", "))
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bs(m: i64, n: i64) -> Presentation {
        parse_presentation(&format!("< t, a | t a^{m} t^-1 a^-{n} >")).unwrap()
    }

    #[test]
    fn deficiency_is_recomputed() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        assert_eq!(p.deficiency(), 1);
        let free = parse_presentation("< a | >").unwrap();
        assert_eq!(free.deficiency(), 1);
        assert_eq!(bs(1, 2).deficiency(), 1);
    }

    #[test]
    fn exponent_sum_examples() {
        let p = bs(1, 2);
        assert_eq!(p.exponent_sums_by_name("t").unwrap(), vec![0]);
        assert_eq!(p.exponent_sums_by_name("a").unwrap(), vec![-1]);
        let z2 = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        assert_eq!(z2.exponent_sums_by_name("a").unwrap(), vec![0]);
        assert!(p.exponent_sums_by_name("c").is_err());
    }

    #[test]
    fn identity_relators_are_dropped_duplicates_kept() {
        let a = Alphabet::new(["a"]).unwrap();
        let r = Word::parse(&a, "a^2").unwrap();
        let e = Word::parse(&a, "a a^-1").unwrap();
        let p = Presentation::new(a, vec![r.clone(), e, r]);
        assert_eq!(p.relators().len(), 2);
        assert_eq!(p.dropped_identities(), 1);
        assert_eq!(p.deficiency(), -1);
    }
}
