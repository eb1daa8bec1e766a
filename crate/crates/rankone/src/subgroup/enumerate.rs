use crate::freegroup::Word;
use crate::presentation::Presentation;

use super::{CosetTable, SubgroupError};

/// HLT coset enumeration: scans subgroup generators at coset 0, then every
/// relator at every live coset, defining new cosets to fill holes and
/// merging on coincidences. Completes with index <= max_cosets or reports
/// exhaustion; it never returns a wrong table.
pub fn coset_enumerate(
    p: &Presentation,
    subgroup_generators: &[Word],
    max_cosets: usize,
) -> Result<CosetTable, SubgroupError> {
    let rank = p.generators().rank();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(word_slots).collect();
    let subgens: Vec<Vec<usize>> = subgroup_generators.iter().map(word_slots).collect();

    let mut t = Table::new(2 * rank, max_cosets.max(1));
    for w in &subgens {
        if !w.is_empty() {
            t.scan_and_fill(0, w)?;
        }
    }
    let mut c = 0usize;
    while c < t.rows() {
        if t.live(c) {
            for r in &relators {
                if !t.live(c) {
                    break;
                }
                let root = t.rep(c);
                t.scan_and_fill(root, r)?;
            }
            if t.live(c) {
                for slot in 0..2 * rank {
                    if t.get(c, slot).is_none() {
                        t.define(c, slot)?;
                    }
                }
            }
        }
        c += 1;
    }

    let action = t.compress(rank);
    CosetTable::new(p.clone(), action, Some(subgroup_generators.to_vec()))
}

fn word_slots(w: &Word) -> Vec<usize> {
    w.letters()
        .map(|(g, s)| 2 * g + usize::from(s < 0))
        .collect()
}

struct Table {
    width: usize,
    max_rows: usize,
    rows: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
}

impl Table {
    fn new(width: usize, max_rows: usize) -> Self {
        Table {
            width,
            max_rows,
            rows: vec![vec![None; width]],
            parent: vec![0],
        }
    }

    fn rows(&self) -> usize {
        self.rows.len()
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = c;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn get(&self, c: usize, slot: usize) -> Option<usize> {
        self.rows[c][slot]
    }

    fn set(&mut self, c: usize, slot: usize, d: usize) {
        self.rows[c][slot] = Some(d);
        self.rows[d][slot ^ 1] = Some(c);
    }

    fn define(&mut self, c: usize, slot: usize) -> Result<usize, SubgroupError> {
        if self.rows.len() >= self.max_rows {
            return Err(SubgroupError::Exhausted(self.max_rows));
        }
        let fresh = self.rows.len();
        self.rows.push(vec![None; self.width]);
        self.parent.push(fresh);
        self.set(c, slot, fresh);
        Ok(fresh)
    }

    fn merge(&mut self, queue: &mut Vec<usize>, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (keep, gone) = (a.min(b), a.max(b));
            self.parent[gone] = keep;
            queue.push(gone);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(&mut queue, a, b);
        while let Some(dead) = queue.pop() {
            for slot in 0..self.width {
                let Some(target) = self.rows[dead][slot].take() else {
                    continue;
                };
                if self.rows[target][slot ^ 1] == Some(dead) {
                    self.rows[target][slot ^ 1] = None;
                }
                let mu = self.rep(dead);
                let nu = self.rep(target);
                if let Some(x) = self.rows[mu][slot] {
                    let x = self.rep(x);
                    self.merge(&mut queue, nu, x);
                } else if let Some(y) = self.rows[nu][slot ^ 1] {
                    let y = self.rep(y);
                    self.merge(&mut queue, mu, y);
                } else {
                    self.rows[mu][slot] = Some(nu);
                    self.rows[nu][slot ^ 1] = Some(mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, start: usize, word: &[usize]) -> Result<(), SubgroupError> {
        debug_assert!(!word.is_empty());
        let mut f = self.rep(start);
        let mut b = f;
        let mut i = 0usize;
        let mut j = word.len();
        loop {
            while i < j {
                match self.get(f, word[i]) {
                    Some(next) => {
                        f = self.rep(next);
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                // step backwards across word[j-1]
                match self.get(b, word[j - 1] ^ 1) {
                    Some(prev) => {
                        b = self.rep(prev);
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, word[i], b);
                return Ok(());
            }
            self.define(f, word[i])?;
            f = self.rep(f);
        }
    }

    /// Renumbers the live cosets into BFS standard form from coset 0.
    fn compress(&mut self, rank: usize) -> Vec<Vec<usize>> {
        let base = self.rep(0);
        let mut number = vec![usize::MAX; self.rows.len()];
        let mut order = vec![base];
        number[base] = 0;
        let mut head = 0usize;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for slot in 0..self.width {
                if let Some(d) = self.rows[c][slot] {
                    let d = self.rep(d);
                    if number[d] == usize::MAX {
                        number[d] = order.len();
                        order.push(d);
                    }
                }
            }
        }
        let n = order.len();
        let mut action = vec![vec![usize::MAX; n]; rank];
        for (new_c, &old_c) in order.iter().enumerate() {
            for g in 0..rank {
                let d = self.rows[old_c][2 * g].expect("table is complete");
                action[g][new_c] = number[self.rep(d)];
            }
        }
        action
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn words(p: &Presentation, texts: &[&str]) -> Vec<Word> {
        texts
            .iter()
            .map(|t| Word::parse(p.generators(), t).unwrap())
            .collect()
    }

    #[test]
    fn z2_mod_a_b2_has_index_two() {
        let p = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        let gens = words(&p, &["a", "b^2"]);
        let t = coset_enumerate(&p, &gens, 100).unwrap();
        assert_eq!(t.index(), 2);
        assert!(t.contains(&Word::parse(p.generators(), "b^2").unwrap()));
        assert!(!t.contains(&Word::parse(p.generators(), "b").unwrap()));
    }

    #[test]
    fn full_group_has_index_one() {
        let p = parse_presentation("< a, b | >").unwrap();
        let gens = words(&p, &["a", "b"]);
        let t = coset_enumerate(&p, &gens, 100).unwrap();
        assert_eq!(t.index(), 1);
    }

    #[test]
    fn bs12_t2_a_has_index_two() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        let gens = words(&p, &["t^2", "a"]);
        let t = coset_enumerate(&p, &gens, 200).unwrap();
        assert_eq!(t.index(), 2);
    }

    #[test]
    fn finite_quotient_enumerates_fully() {
        // symmetric group S3 = < s, r | s^2, r^3, (sr)^2 >, trivial subgroup
        let p = parse_presentation("< s, r | s^2, r^3, s r s r >").unwrap();
        let t = coset_enumerate(&p, &[], 100).unwrap();
        assert_eq!(t.index(), 6);
    }

    #[test]
    fn exhaustion_is_clean() {
        let p = parse_presentation("< a, b | >").unwrap();
        let err = coset_enumerate(&p, &[], 10).unwrap_err();
        assert!(matches!(err, SubgroupError::Exhausted(10)));
    }

    #[test]
    fn infinite_cyclic_cover_of_klein() {
        let p = parse_presentation("< t, a | t a t^-1 a >").unwrap();
        let gens = words(&p, &["a", "t^4"]);
        let t = coset_enumerate(&p, &gens, 200).unwrap();
        assert_eq!(t.index(), 4);
    }
}
