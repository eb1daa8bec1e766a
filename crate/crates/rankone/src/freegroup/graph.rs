use std::collections::VecDeque;

use super::{Alphabet, FreeGroupError, Word};

/// A folded core graph of a finitely generated subgroup of a free group.
/// Edge maps are deterministic and co-deterministic; the base vertex is 0
/// after canonical BFS renumbering.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    alphabet: Alphabet,
    /// out[v][g] = target of the g-labelled edge leaving v, if any.
    out: Vec<Vec<Option<usize>>>,
    /// inn[v][g] = source of the g-labelled edge entering v, if any.
    inn: Vec<Vec<Option<usize>>>,
    rank: usize,
}

/// Folds the wedge of loops labelled by `generators` into the subgroup
/// graph of ⟨generators⟩. Deterministic for a fixed input order; merges
/// use a worklist, smaller class into larger.
pub fn fold(alphabet: &Alphabet, generators: &[Word]) -> SubgroupGraph {
    Builder::new(alphabet).add_loops(generators).finish()
}

struct Builder {
    alphabet: Alphabet,
    parent: Vec<usize>,
    size: Vec<usize>,
    // slot 2g: read x_g forwards; slot 2g+1: read x_g backwards.
    slots: Vec<Vec<Option<usize>>>,
    queue: VecDeque<(usize, usize)>,
}

impl Builder {
    fn new(alphabet: &Alphabet) -> Self {
        let mut b = Builder {
            alphabet: alphabet.clone(),
            parent: Vec::new(),
            size: Vec::new(),
            slots: Vec::new(),
            queue: VecDeque::new(),
        };
        b.fresh(); // base vertex
        b
    }

    fn fresh(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.size.push(1);
        self.slots.push(vec![None; 2 * self.alphabet.rank()]);
        v
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Adds the half-edge pair for reading `slot` from u to v, folding on demand.
    fn connect(&mut self, u: usize, slot: usize, v: usize) {
        let u = self.find(u);
        let v = self.find(v);
        match self.slots[u][slot] {
            Some(w) => {
                let w = self.find(w);
                self.merge(v, w);
            }
            None => {
                self.slots[u][slot] = Some(v);
                let rev = slot ^ 1;
                match self.slots[v][rev] {
                    Some(w) => {
                        let w = self.find(w);
                        self.merge(u, w);
                    }
                    None => self.slots[v][rev] = Some(u),
                }
            }
        }
        self.drain();
    }

    fn merge(&mut self, a: usize, b: usize) {
        self.queue.push_back((a, b));
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.queue.pop_front() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let (keep, gone) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            self.size[keep] += self.size[gone];
            let moved = std::mem::take(&mut self.slots[gone]);
            for (slot, tgt) in moved.into_iter().enumerate() {
                let Some(tgt) = tgt else { continue };
                let tgt = self.find(tgt);
                match self.slots[keep][slot] {
                    Some(w) => {
                        let w = self.find(w);
                        if w != tgt {
                            self.queue.push_back((w, tgt));
                        }
                    }
                    None => {
                        self.slots[keep][slot] = Some(tgt);
                        let rev = slot ^ 1;
                        // Repoint the reverse half-edge at the survivor.
                        let prior = self.slots[tgt][rev];
                        self.slots[tgt][rev] = Some(keep);
                        if let Some(w) = prior {
                            let w = self.find(w);
                            if w != keep && w != gone {
                                self.queue.push_back((w, keep));
                            }
                        }
                    }
                }
            }
        }
    }

    fn add_loops(mut self, generators: &[Word]) -> Self {
        for g in generators {
            assert!(
                g.alphabet().same_as(&self.alphabet),
                "generator alphabet mismatch"
            );
            let letters: Vec<(usize, i64)> = g.letters().collect();
            if letters.is_empty() {
                continue;
            }
            let mut cur = 0usize;
            for (i, &(gen, sign)) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { 0 } else { self.fresh() };
                let slot = 2 * gen + usize::from(sign < 0);
                self.connect(cur, slot, next);
                cur = self.find(next);
            }
        }
        self
    }

    fn finish(mut self) -> SubgroupGraph {
        // trim non-base vertices of degree <= 1
        loop {
            let mut removed = false;
            for v in 0..self.parent.len() {
                if self.parent[v] != v || self.find(0) == v {
                    continue;
                }
                let defined: Vec<usize> = (0..self.slots[v].len())
                    .filter(|&s| self.slots[v][s].is_some())
                    .collect();
                if defined.len() <= 1 {
                    for s in defined {
                        let tgt = self.slots[v][s].unwrap();
                        let tgt = self.find(tgt);
                        self.slots[tgt][s ^ 1] = None;
                        self.slots[v][s] = None;
                    }
                    // mark v dead by unioning into a tombstone-free scheme:
                    // simply leave it isolated; BFS below ignores it.
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }

        // canonical BFS renumbering from the base
        let rank = self.alphabet.rank();
        let base = self.find(0);
        let mut number = vec![usize::MAX; self.parent.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        number[base] = 0;
        order.push(base);
        queue.push_back(base);
        while let Some(v) = queue.pop_front() {
            for slot in 0..2 * rank {
                if let Some(w) = self.slots[v][slot] {
                    let w = self.find(w);
                    if number[w] == usize::MAX {
                        number[w] = order.len();
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }

        let n = order.len();
        let mut out = vec![vec![None; rank]; n];
        let mut inn = vec![vec![None; rank]; n];
        let mut edges = 0usize;
        for (new_v, &old_v) in order.iter().enumerate() {
            for g in 0..rank {
                if let Some(w) = self.slots[old_v][2 * g] {
                    let w = self.find(w);
                    out[new_v][g] = Some(number[w]);
                    edges += 1;
                }
                if let Some(w) = self.slots[old_v][2 * g + 1] {
                    let w = self.find(w);
                    inn[new_v][g] = Some(number[w]);
                }
            }
        }
        let rank_val = edges + 1 - n;
        SubgroupGraph {
            alphabet: self.alphabet,
            out,
            inn,
            rank: rank_val,
        }
    }
}

impl SubgroupGraph {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().flatten().filter(|t| t.is_some()).count()
    }

    /// rank = E - V + 1 of the connected core.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> usize {
        0
    }

    fn step(&self, v: usize, gen: usize, sign: i64) -> Option<usize> {
        if sign > 0 {
            self.out[v][gen]
        } else {
            self.inn[v][gen]
        }
    }

    /// Reads the word from `from`; returns the endpoint if every edge exists.
    pub fn trace(&self, from: usize, w: &Word) -> Option<usize> {
        let mut cur = from;
        for (g, s) in w.letters() {
            cur = self.step(cur, g, s)?;
        }
        Some(cur)
    }

    /// Membership: w labels a base-to-base loop.
    pub fn contains(&self, w: &Word) -> bool {
        assert!(w.alphabet().same_as(&self.alphabet), "alphabet mismatch");
        self.trace(self.base(), w) == Some(self.base())
    }

    /// BFS spanning tree: for each vertex the reduced word labelling the
    /// tree path base -> v. Slot order makes this deterministic.
    fn tree_paths(&self) -> (Vec<Word>, Vec<Option<(usize, usize, i64)>>) {
        let n = self.vertex_count();
        let mut path = vec![Word::identity(&self.alphabet); n];
        let mut via: Vec<Option<(usize, usize, i64)>> = vec![None; n]; // (parent, gen, sign)
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        while let Some(v) = queue.pop_front() {
            for g in 0..self.alphabet.rank() {
                for sign in [1i64, -1] {
                    if let Some(w) = self.step(v, g, sign) {
                        if !seen[w] {
                            seen[w] = true;
                            via[w] = Some((v, g, sign));
                            path[w] = path[v]
                                .mul(&Word::letter(&self.alphabet, g, sign).expect("in range"));
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        (path, via)
    }

    /// Positive edges (u, g, v) outside the BFS tree, in canonical order.
    fn nontree_edges(&self) -> Vec<(usize, usize, usize)> {
        let (_, via) = self.tree_paths();
        let mut res = Vec::new();
        for u in 0..self.vertex_count() {
            for g in 0..self.alphabet.rank() {
                if let Some(v) = self.out[u][g] {
                    let is_tree = via[v] == Some((u, g, 1)) || via[u] == Some((v, g, -1));
                    if !is_tree {
                        res.push((u, g, v));
                    }
                }
            }
        }
        res
    }

    /// A free basis for the subgroup, one word per non-tree edge:
    /// path(base,u) · g · path(v,base).
    pub fn basis(&self) -> Vec<Word> {
        let (path, _) = self.tree_paths();
        self.nontree_edges()
            .into_iter()
            .map(|(u, g, v)| {
                path[u]
                    .mul(&Word::letter(&self.alphabet, g, 1).expect("in range"))
                    .mul(&path[v].inverse())
            })
            .collect()
    }

    /// Rewrites a subgroup element over the basis returned by `basis()`.
    /// The result lives in the standard alphabet y1..ym.
    pub fn express(&self, w: &Word) -> Result<Word, FreeGroupError> {
        let edges = self.nontree_edges();
        let target = Alphabet::standard("y", edges.len());
        let index = |u: usize, g: usize| edges.iter().position(|&(a, b, _)| (a, b) == (u, g));
        let mut runs = Vec::new();
        let mut cur = self.base();
        for (g, s) in w.letters() {
            let next = self
                .step(cur, g, s)
                .ok_or_else(|| FreeGroupError::NotInSubgroup(w.to_string()))?;
            let (src, tgt) = if s > 0 { (cur, next) } else { (next, cur) };
            debug_assert_eq!(self.out[src][g], Some(tgt));
            if let Some(i) = index(src, g) {
                runs.push((i, s));
            }
            cur = next;
        }
        if cur != self.base() {
            return Err(FreeGroupError::NotInSubgroup(w.to_string()));
        }
        Word::from_runs(&target, runs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn words(texts: &[&str]) -> Vec<Word> {
        texts.iter().map(|t| Word::parse(&f2(), t).unwrap()).collect()
    }

    #[test]
    fn fold_rank_examples() {
        let g = fold(&f2(), &words(&["a^2", "b"]));
        assert_eq!(g.rank(), 2);

        // redundant generator absorbed into the rose
        let g = fold(&f2(), &words(&["a", "b", "a b"]));
        assert_eq!(g.rank(), 2);
        assert_eq!(g.vertex_count(), 1);

        // Nielsen-reduced pair {a^2, ab} spans rank 2
        let g = fold(&f2(), &words(&["a^2", "a b"]));
        assert_eq!(g.rank(), 2);
    }

    #[test]
    fn contains_examples() {
        let g = fold(&f2(), &words(&["a^2", "b"]));
        assert!(g.contains(&Word::parse(&f2(), "a^2").unwrap()));
        assert!(!g.contains(&Word::parse(&f2(), "a").unwrap()));
        assert!(g.contains(&Word::parse(&f2(), "b a^2 b^-1").unwrap()));
    }

    #[test]
    fn basis_round_trip() {
        let g = fold(&f2(), &words(&["a", "b"]));
        let basis = g.basis();
        assert_eq!(
            basis,
            vec![Word::parse(&f2(), "a").unwrap(), Word::parse(&f2(), "b").unwrap()]
        );

        let g = fold(&f2(), &words(&["a^2", "b"]));
        let basis = g.basis();
        assert_eq!(basis.len(), 2);
        let refolded = fold(&f2(), &basis);
        assert_eq!(refolded.vertex_count(), g.vertex_count());
        assert_eq!(refolded.edge_count(), g.edge_count());
        for w in &basis {
            assert!(g.contains(w));
        }
    }

    #[test]
    fn index_two_kernel_has_rank_three() {
        // kernel of a -> 1, b -> 0 mod 2, generated by b, a^2, a b a^-1
        let g = fold(&f2(), &words(&["b", "a^2", "a b a^-1"]));
        assert_eq!(g.rank(), 3);
        assert_eq!(g.basis().len(), 3);
    }

    #[test]
    fn express_in_basis_examples() {
        let g = fold(&f2(), &words(&["a", "b"]));
        let w = Word::parse(&f2(), "a b").unwrap();
        let expr = g.express(&w).unwrap();
        let basis = g.basis();
        assert_eq!(expr.substitute(&basis), w);

        let g = fold(&f2(), &words(&["a^2", "b"]));
        let basis = g.basis();
        let w = Word::parse(&f2(), "a^2 b").unwrap();
        let expr = g.express(&w).unwrap();
        assert_eq!(expr.substitute(&basis), w);
        assert_eq!(expr.len(), 2);

        let w = Word::parse(&f2(), "b a^4 b^-1").unwrap();
        let expr = g.express(&w).unwrap();
        assert_eq!(expr.substitute(&basis), w);

        let outside = Word::parse(&f2(), "a").unwrap();
        assert!(g.express(&outside).is_err());
    }

    #[test]
    fn express_is_y2_y1sq_y2inv_for_conjugated_square() {
        // With basis ordered by the canonical edge order, <a^2, b> rewrites
        // b a^4 b^-1 as a length-4 word using only the a^2-edge and b-edge.
        let g = fold(&f2(), &words(&["a^2", "b"]));
        let basis = g.basis();
        let w = Word::parse(&f2(), "b a^4 b^-1").unwrap();
        let expr = g.express(&w).unwrap();
        // find which basis index is a^2 and which is b
        let a2 = basis
            .iter()
            .position(|x| *x == Word::parse(&f2(), "a^2").unwrap())
            .unwrap();
        let b = basis
            .iter()
            .position(|x| *x == Word::parse(&f2(), "b").unwrap())
            .unwrap();
        let y = expr.alphabet().clone();
        let expected =
            Word::from_runs(&y, [(b, 1), (a2, 2), (b, -1)]).unwrap();
        assert_eq!(expr, expected);
    }

    #[test]
    fn stem_graphs_fold_correctly() {
        // <a b a^-1> is cyclic; its graph keeps a stem to the base vertex.
        let g = fold(&f2(), &words(&["a b a^-1"]));
        assert_eq!(g.rank(), 1);
        assert!(g.contains(&Word::parse(&f2(), "a b^3 a^-1").unwrap()));
        assert!(!g.contains(&Word::parse(&f2(), "b").unwrap()));
    }

    #[test]
    fn fold_is_deterministic_for_fixed_input_order() {
        let g1 = fold(&f2(), &words(&["a b", "b a", "a^3"]));
        let g2 = fold(&f2(), &words(&["a b", "b a", "a^3"]));
        assert_eq!(format!("{g1:?}"), format!("{g2:?}"));
    }
}
