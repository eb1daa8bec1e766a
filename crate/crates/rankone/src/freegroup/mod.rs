//! Exact word algebra in finite-rank free groups: free reduction, cyclic
//! reduction, roots, conjugacy-to-a-power, primitivity via Whitehead moves,
//! and subgroup membership through folded graphs.

mod graph;
mod whitehead;
mod word;

pub use graph::{fold, SubgroupGraph};
pub use whitehead::{
    is_primitive, Automorphism, ElementaryAut, PrimitivityOutcome, WhiteheadMove, WhiteheadTrace,
};
pub use word::Word;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("generator index {0} out of range for alphabet of rank {1}")]
    UnknownGenerator(usize, usize),
    #[error("unknown generator name `{0}`")]
    UnknownName(String),
    #[error("operation requires a non-identity word")]
    IdentityInput,
    #[error("word `{0}` is not an element of the subgroup")]
    NotInSubgroup(String),
    #[error("alphabet mismatch: `{0}` vs `{1}`")]
    AlphabetMismatch(String, String),
    #[error("word syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
}

/// An ordered alphabet of generator names. The order is total and fixed;
/// words refer to generators by index.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

struct AlphabetInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, FreeGroupError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if n == "e" {
                return Err(FreeGroupError::BadAlphabet(
                    "`e` is reserved for the identity".into(),
                ));
            }
            if n.is_empty() {
                return Err(FreeGroupError::BadAlphabet("empty generator name".into()));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(FreeGroupError::BadAlphabet(format!(
                    "duplicate generator `{n}`"
                )));
            }
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { names, index }),
        })
    }

    /// Alphabet y1..ym, used for subgroup bases and rewritten presentations.
    pub fn standard(prefix: &str, rank: usize) -> Self {
        Alphabet::new((1..=rank).map(|i| format!("{prefix}{i}"))).expect("standard names are valid")
    }

    pub fn rank(&self) -> usize {
        self.inner.names.len()
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.inner.names[gen]
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.index.get(name).copied()
    }

    pub fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.names == other.inner.names
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Alphabet {}

impl std::hash::Hash for Alphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.names.hash(state);
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", self.inner.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_reserved() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["e"]).is_err());
        assert!(Alphabet::new(["a", "b"]).is_ok());
    }
}
