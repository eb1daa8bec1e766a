//! Finite-index subgroup machinery: bounded coset enumeration, low-index
//! subgroup search with containment constraints, Schreier transversals and
//! Reidemeister–Schreier rewriting.

mod enumerate;
mod low_index;
mod rewrite;

pub use enumerate::coset_enumerate;
pub use low_index::{low_index_subgroups, low_index_subgroups_with_budget};
pub use rewrite::{reidemeister_schreier, RewrittenPresentation};

use serde_json::json;
use thiserror::Error;

use crate::freegroup::Word;
use crate::presentation::Presentation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("coset enumeration exhausted its budget of {0} cosets")]
    Exhausted(usize),
    #[error("low-index search exhausted its node budget")]
    BudgetExhausted,
    #[error("incomplete or inconsistent coset table: {0}")]
    BadTable(String),
}

/// A complete finite-index coset table. Coset 0 is the subgroup; the
/// numbering is the BFS standard form, so equal tables mean equal
/// subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    parent: Presentation,
    /// action[g][c]: image of coset c under right multiplication by
    /// generator g. Each action[g] is a permutation of 0..index.
    action: Vec<Vec<usize>>,
    /// Generating words of the subgroup, when the table came from an
    /// enumeration over explicit generators.
    subgroup_generators: Option<Vec<Word>>,
}

impl CosetTable {
    /// Validates completeness, that every relator acts trivially, and that
    /// any recorded subgroup generators fix coset 0.
    pub fn new(
        parent: Presentation,
        action: Vec<Vec<usize>>,
        subgroup_generators: Option<Vec<Word>>,
    ) -> Result<Self, SubgroupError> {
        let rank = parent.generators().rank();
        if action.len() != rank {
            return Err(SubgroupError::BadTable("one column set per generator".into()));
        }
        let n = action.first().map_or(0, |col| col.len());
        if n == 0 {
            return Err(SubgroupError::BadTable("empty table".into()));
        }
        for col in &action {
            if col.len() != n {
                return Err(SubgroupError::BadTable("ragged action".into()));
            }
            let mut seen = vec![false; n];
            for &img in col {
                if img >= n || seen[img] {
                    return Err(SubgroupError::BadTable("action is not a permutation".into()));
                }
                seen[img] = true;
            }
        }
        let table = CosetTable {
            parent,
            action,
            subgroup_generators,
        };
        for c in 0..n {
            for r in table.parent.relators() {
                if table.trace(c, r) != c {
                    return Err(SubgroupError::BadTable(format!(
                        "relator {r} does not act trivially from coset {c}"
                    )));
                }
            }
        }
        if let Some(gens) = &table.subgroup_generators {
            for g in gens {
                if table.trace(0, g) != 0 {
                    return Err(SubgroupError::BadTable(format!(
                        "subgroup generator {g} does not fix coset 0"
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn parent(&self) -> &Presentation {
        &self.parent
    }

    pub fn index(&self) -> usize {
        self.action[0].len()
    }

    pub fn subgroup_generators(&self) -> Option<&[Word]> {
        self.subgroup_generators.as_deref()
    }

    pub fn apply(&self, coset: usize, gen: usize, sign: i64) -> usize {
        if sign > 0 {
            self.action[gen][coset]
        } else {
            self.action[gen]
                .iter()
                .position(|&img| img == coset)
                .expect("action is a permutation")
        }
    }

    pub fn trace(&self, from: usize, w: &Word) -> usize {
        let mut cur = from;
        for (g, s) in w.letters() {
            cur = self.apply(cur, g, s);
        }
        cur
    }

    /// Membership in the subgroup: the word fixes coset 0.
    pub fn contains(&self, w: &Word) -> bool {
        self.trace(0, w) == 0
    }

    /// BFS renumbering of the action with `base` as the new coset 0.
    /// Rebasing at a coset moves to a conjugate subgroup.
    pub fn rebased_action(&self, base: usize) -> Vec<Vec<usize>> {
        let n = self.index();
        let rank = self.action.len();
        let mut number = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        number[base] = 0;
        order.push(base);
        let mut head = 0usize;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for g in 0..rank {
                for s in [1i64, -1] {
                    let d = self.apply(c, g, s);
                    if number[d] == usize::MAX {
                        number[d] = order.len();
                        order.push(d);
                    }
                }
            }
        }
        let mut out = vec![vec![0usize; n]; rank];
        for g in 0..rank {
            for (new_c, &old_c) in order.iter().enumerate() {
                out[g][new_c] = number[self.action[g][old_c]];
            }
        }
        out
    }

    pub fn flattened(&self) -> Vec<usize> {
        let mut flat = Vec::with_capacity(self.action.len() * self.index());
        for c in 0..self.index() {
            for g in 0..self.action.len() {
                flat.push(self.action[g][c]);
            }
        }
        flat
    }

    /// Lexicographic key identifying the conjugacy class: the minimum, over
    /// all base cosets, of the flattened BFS-renumbered action.
    pub fn conjugacy_key(&self) -> Vec<usize> {
        let n = self.index();
        let rank = self.action.len();
        let mut best: Option<Vec<usize>> = None;
        for base in 0..n {
            let action = self.rebased_action(base);
            let mut flat = Vec::with_capacity(rank * n);
            for c in 0..n {
                for g in 0..rank {
                    flat.push(action[g][c]);
                }
            }
            if best.as_ref().map_or(true, |b| &flat < b) {
                best = Some(flat);
            }
        }
        best.expect("at least one coset")
    }

    /// Prefix-closed shortlex-BFS transversal; the representative of coset
    /// c carries coset 0 to c, and coset 0 gets the empty word.
    pub fn schreier_transversal(&self) -> Vec<Word> {
        let alphabet = self.parent.generators();
        let n = self.index();
        let mut reps: Vec<Option<Word>> = vec![None; n];
        reps[0] = Some(Word::identity(alphabet));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let rep = reps[c].clone().expect("visited");
            for g in 0..alphabet.rank() {
                for s in [1i64, -1] {
                    let d = self.apply(c, g, s);
                    if reps[d].is_none() {
                        reps[d] = Some(rep.mul(&Word::letter(alphabet, g, s).expect("in range")));
                        queue.push_back(d);
                    }
                }
            }
        }
        reps.into_iter().map(|r| r.expect("table is transitive")).collect()
    }

    /// Serialization per the table schema: 1-based action arrays.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "index": self.index(),
            "generators": self.parent.generators().names(),
            "action": self
                .parent
                .generators()
                .names()
                .iter()
                .enumerate()
                .map(|(g, name)| {
                    json!({
                        "generator": name,
                        "images": self.action[g].iter().map(|&c| c + 1).collect::<Vec<usize>>(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn table_validation_catches_bad_actions() {
        let p = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        // a swaps cosets, b fixes them: the relator holds
        let ok = CosetTable::new(p.clone(), vec![vec![1, 0], vec![0, 1]], None);
        assert!(ok.is_ok());
        // non-permutation column
        let bad = CosetTable::new(p.clone(), vec![vec![0, 0], vec![0, 1]], None);
        assert!(bad.is_err());
    }

    #[test]
    fn relator_action_is_verified() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        // t swaps 0,1; a fixes both: relator trace from 0: t->1, a->1, t^-1->0, a^-2->0 ok
        let t = CosetTable::new(p.clone(), vec![vec![1, 0], vec![0, 1]], None).unwrap();
        assert_eq!(t.index(), 2);
        // a transposing breaks the relator
        let bad = CosetTable::new(p, vec![vec![1, 0], vec![1, 0]], None);
        assert!(bad.is_err());
    }

    #[test]
    fn transversal_is_prefix_closed_and_shortlex() {
        let p = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        // subgroup <a, b^2>: b swaps the two cosets
        let t = CosetTable::new(p.clone(), vec![vec![0, 1], vec![1, 0]], None).unwrap();
        let reps = t.schreier_transversal();
        assert_eq!(reps.len(), 2);
        assert!(reps[0].is_identity());
        assert_eq!(reps[1], Word::parse(p.generators(), "b").unwrap());
    }

    #[test]
    fn index_one_transversal_is_identity() {
        let p = parse_presentation("< a | >").unwrap();
        let t = CosetTable::new(p, vec![vec![0]], None).unwrap();
        let reps = t.schreier_transversal();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].is_identity());
    }
}
