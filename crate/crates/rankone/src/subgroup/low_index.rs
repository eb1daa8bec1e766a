use std::collections::BTreeMap;

use crate::freegroup::Word;
use crate::presentation::Presentation;

use super::{CosetTable, SubgroupError};

/// All conjugacy-class representatives of subgroups of index <= max_index
/// whose coset table fixes coset 0 under every `must_contain` word, in
/// canonical order (index, then lexicographic flattened action).
///
/// Backtracking over partial tables in standard (BFS-forced) numbering with
/// relator-scan deduction, so every complete table found is one subgroup;
/// conjugates are grouped afterwards by rebasing.
pub fn low_index_subgroups(
    p: &Presentation,
    max_index: usize,
    must_contain: &[Word],
) -> Result<Vec<CosetTable>, SubgroupError> {
    low_index_subgroups_with_budget(p, max_index, must_contain, u64::MAX)
}

pub fn low_index_subgroups_with_budget(
    p: &Presentation,
    max_index: usize,
    must_contain: &[Word],
    node_budget: u64,
) -> Result<Vec<CosetTable>, SubgroupError> {
    let rank = p.generators().rank();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(word_slots).collect();
    let constraints: Vec<Vec<usize>> = must_contain
        .iter()
        .filter(|w| !w.is_identity())
        .map(word_slots)
        .collect();

    let mut search = Search {
        width: 2 * rank,
        max_index: max_index.max(1),
        relators,
        constraints,
        rows: vec![vec![None; 2 * rank]],
        trail: Vec::new(),
        found: Vec::new(),
        budget: node_budget,
    };
    search.run()?;

    // group by conjugacy class; keep the lexicographically least member
    let mut classes: BTreeMap<Vec<usize>, Vec<Vec<Vec<Option<usize>>>>> = BTreeMap::new();
    for rows in search.found {
        let table = rows_to_table(p, &rows, must_contain)?;
        classes
            .entry(table.conjugacy_key())
            .or_default()
            .push(rows);
    }
    let mut result = Vec::new();
    for (_, mut members) in classes {
        members.sort_by_key(|rows| flatten(rows));
        result.push(rows_to_table(p, &members[0], must_contain)?);
    }
    result.sort_by_key(|t| (t.index(), t.flattened()));
    Ok(result)
}

fn word_slots(w: &Word) -> Vec<usize> {
    w.letters()
        .map(|(g, s)| 2 * g + usize::from(s < 0))
        .collect()
}

fn flatten(rows: &[Vec<Option<usize>>]) -> Vec<usize> {
    rows.iter()
        .flat_map(|r| r.iter().map(|x| x.expect("complete")))
        .collect()
}

fn rows_to_table(
    p: &Presentation,
    rows: &[Vec<Option<usize>>],
    must_contain: &[Word],
) -> Result<CosetTable, SubgroupError> {
    let rank = p.generators().rank();
    let n = rows.len();
    let mut action = vec![vec![0usize; n]; rank];
    for c in 0..n {
        for g in 0..rank {
            action[g][c] = rows[c][2 * g].expect("complete table");
        }
    }
    let gens = if must_contain.is_empty() {
        None
    } else {
        Some(must_contain.to_vec())
    };
    CosetTable::new(p.clone(), action, gens)
}

struct Search {
    width: usize,
    max_index: usize,
    relators: Vec<Vec<usize>>,
    constraints: Vec<Vec<usize>>,
    rows: Vec<Vec<Option<usize>>>,
    /// (coset, slot) assignments to undo, plus row-creation markers.
    trail: Vec<TrailEntry>,
    found: Vec<Vec<Vec<Option<usize>>>>,
    budget: u64,
}

enum TrailEntry {
    Assign(usize, usize),
    NewRow,
}

impl Search {
    fn run(&mut self) -> Result<(), SubgroupError> {
        if !self.propagate()? {
            return Ok(());
        }
        self.dfs()
    }

    fn dfs(&mut self) -> Result<(), SubgroupError> {
        if self.budget == 0 {
            return Err(SubgroupError::BudgetExhausted);
        }
        self.budget -= 1;

        let Some((c, s)) = self.first_hole() else {
            self.found.push(self.rows.clone());
            return Ok(());
        };

        let existing = self.rows.len();
        for target in 0..=existing {
            if target == existing && existing >= self.max_index {
                break;
            }
            let mark = self.trail.len();
            let ok = self.try_assign(c, s, target)? && self.propagate()?;
            if ok {
                self.dfs()?;
            }
            self.unwind(mark);
        }
        Ok(())
    }

    fn first_hole(&self) -> Option<(usize, usize)> {
        for c in 0..self.rows.len() {
            for s in 0..self.width {
                if self.rows[c][s].is_none() {
                    return Some((c, s));
                }
            }
        }
        None
    }

    fn try_assign(&mut self, c: usize, s: usize, target: usize) -> Result<bool, SubgroupError> {
        if target == self.rows.len() {
            self.rows.push(vec![None; self.width]);
            self.trail.push(TrailEntry::NewRow);
        } else if self.rows[target][s ^ 1].is_some() {
            return Ok(false); // target already has an incoming edge of this label
        }
        self.assign(c, s, target);
        Ok(true)
    }

    fn assign(&mut self, c: usize, s: usize, d: usize) {
        debug_assert!(self.rows[c][s].is_none());
        self.rows[c][s] = Some(d);
        self.trail.push(TrailEntry::Assign(c, s));
        if self.rows[d][s ^ 1].is_none() {
            self.rows[d][s ^ 1] = Some(c);
            self.trail.push(TrailEntry::Assign(d, s ^ 1));
        }
    }

    fn unwind(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailEntry::Assign(c, s) => self.rows[c][s] = None,
                TrailEntry::NewRow => {
                    self.rows.pop();
                }
            }
        }
    }

    /// Scans every relator at every coset and every constraint at coset 0,
    /// applying forced deductions to a fixpoint. False on contradiction.
    fn propagate(&mut self) -> Result<bool, SubgroupError> {
        loop {
            let mut progress = false;
            for c in 0..self.rows.len() {
                for r in 0..self.relators.len() {
                    let word = std::mem::take(&mut self.relators[r]);
                    let res = self.scan(c, &word, &mut progress);
                    self.relators[r] = word;
                    if !res {
                        return Ok(false);
                    }
                }
            }
            for k in 0..self.constraints.len() {
                let word = std::mem::take(&mut self.constraints[k]);
                let res = self.scan(0, &word, &mut progress);
                self.constraints[k] = word;
                if !res {
                    return Ok(false);
                }
            }
            if !progress {
                return Ok(true);
            }
        }
    }

    /// One scan of `word` as a loop at `c`. Applies a deduction when only
    /// one edge is missing; reports false when the closed scan mismatches.
    fn scan(&mut self, c: usize, word: &[usize], progress: &mut bool) -> bool {
        let mut f = c;
        let mut i = 0usize;
        let mut b = c;
        let mut j = word.len();
        while i < j {
            match self.rows[f][word[i]] {
                Some(next) => {
                    f = next;
                    i += 1;
                }
                None => break,
            }
        }
        if i == j {
            return f == b;
        }
        while j > i {
            match self.rows[b][word[j - 1] ^ 1] {
                Some(prev) => {
                    b = prev;
                    j -= 1;
                }
                None => break,
            }
        }
        if j == i {
            return f == b;
        }
        if j == i + 1 {
            // deduction f --word[i]--> b; the forward slot is free, the
            // backward slot must be free or already matching
            match self.rows[b][word[i] ^ 1] {
                Some(existing) if existing != f => return false,
                Some(_) => {
                    // half-edge already present; complete the pair
                    self.rows[f][word[i]] = Some(b);
                    self.trail.push(TrailEntry::Assign(f, word[i]));
                }
                None => self.assign(f, word[i], b),
            }
            *progress = true;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn whole_group_only_at_index_one() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        let subs = low_index_subgroups(&p, 1, &[]).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].index(), 1);
    }

    #[test]
    fn free_group_rank_two_index_two() {
        // 3 subgroups of index 2 (one per surjection to Z/2), plus the group
        let p = parse_presentation("< a, b | >").unwrap();
        let subs = low_index_subgroups(&p, 2, &[]).unwrap();
        let index_two: Vec<_> = subs.iter().filter(|t| t.index() == 2).collect();
        assert_eq!(index_two.len(), 3);
        assert_eq!(subs.len(), 4);
    }

    #[test]
    fn bs12_has_unique_index_two_subgroup() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        let subs = low_index_subgroups(&p, 2, &[]).unwrap();
        let index_two: Vec<_> = subs.iter().filter(|t| t.index() == 2).collect();
        assert_eq!(index_two.len(), 1);
    }

    #[test]
    fn must_contain_constraints_are_respected() {
        let p = parse_presentation("< a, b | >").unwrap();
        let a = Word::parse(p.generators(), "a").unwrap();
        let subs = low_index_subgroups(&p, 2, &[a.clone()]).unwrap();
        for t in &subs {
            assert!(t.contains(&a));
        }
        // of the three index-2 subgroups, only <a, b^2, bab^-1> and ... contain a:
        // kernels of b->1 maps; exactly 1 of the 3 contains a
        let index_two: Vec<_> = subs.iter().filter(|t| t.index() == 2).collect();
        assert_eq!(index_two.len(), 1);
    }

    #[test]
    fn constraint_order_is_irrelevant() {
        let p = parse_presentation("< t, a | t a^2 t^-1 a^-3 >").unwrap();
        let u = Word::parse(p.generators(), "t").unwrap();
        let v = Word::parse(p.generators(), "a^2").unwrap();
        let one = low_index_subgroups(&p, 4, &[u.clone(), v.clone()]).unwrap();
        let two = low_index_subgroups(&p, 4, &[v, u]).unwrap();
        let one_keys: Vec<_> = one.iter().map(|t| t.flattened()).collect();
        let two_keys: Vec<_> = two.iter().map(|t| t.flattened()).collect();
        assert_eq!(one_keys, two_keys);
    }

    #[test]
    fn s3_subgroup_count() {
        // S3 has subgroup lattice: whole, A3 (index 2), three conjugate
        // order-2 subgroups (index 3, one class), trivial (index 6)
        let p = parse_presentation("< s, r | s^2, r^3, s r s r >").unwrap();
        let subs = low_index_subgroups(&p, 6, &[]).unwrap();
        let by_index = |i: usize| subs.iter().filter(|t| t.index() == i).count();
        assert_eq!(by_index(1), 1);
        assert_eq!(by_index(2), 1);
        assert_eq!(by_index(3), 1);
        assert_eq!(by_index(4), 0);
        assert_eq!(by_index(5), 0);
        assert_eq!(by_index(6), 1);
    }

    #[test]
    fn klein_bottle_low_index() {
        // the Klein bottle group surjects Z/2 x ... ; just exercise determinism
        let p = parse_presentation("< t, a | t a t^-1 a >").unwrap();
        let one = low_index_subgroups(&p, 3, &[]).unwrap();
        let two = low_index_subgroups(&p, 3, &[]).unwrap();
        let keys: Vec<_> = one.iter().map(|t| t.flattened()).collect();
        let keys2: Vec<_> = two.iter().map(|t| t.flattened()).collect();
        assert_eq!(keys, keys2);
        assert!(one.iter().all(|t| t.index() <= 3));
    }

    #[test]
    fn budget_aborts_cleanly() {
        let p = parse_presentation("< a, b | >").unwrap();
        let err = low_index_subgroups_with_budget(&p, 6, &[], 5).unwrap_err();
        assert!(matches!(err, SubgroupError::BudgetExhausted));
    }
}
