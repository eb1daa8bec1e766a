use crate::freegroup::{Alphabet, Word};
use crate::presentation::Presentation;

use super::CosetTable;

/// A subgroup presentation produced by Reidemeister–Schreier rewriting.
#[derive(Clone, Debug)]
pub struct RewrittenPresentation {
    pub presentation: Presentation,
    /// Defining word rep(s)·x·rep(s·x)^{-1} in the parent generators, one
    /// per new generator.
    pub origin: Vec<Word>,
    /// The exact rewrites of rep(s)·r·rep(s)^{-1}, freely reduced but not
    /// cyclically normalised, in parent-coset scan order.
    pub raw_relators: Vec<Word>,
    /// Number of identity generators discarded (the tree edges): index − 1.
    pub dropped: usize,
}

/// Rewrites the parent presentation over the Schreier generators
/// y = rep(s)·x·rep(s·x)^{-1} of the subgroup recorded by `table`.
/// Produces exactly index·|X| − (index−1) generators and index·|R|
/// relators; for free parents the relator list is empty.
pub fn reidemeister_schreier(p: &Presentation, table: &CosetTable) -> RewrittenPresentation {
    assert!(
        p == table.parent(),
        "table must belong to the presentation being rewritten"
    );
    let rank = p.generators().rank();
    let n = table.index();
    let reps = table.schreier_transversal();

    // pair (s, x) -> generator number; tree pairs excluded
    let mut gen_index: Vec<Vec<Option<usize>>> = vec![vec![None; rank]; n];
    let mut origin = Vec::new();
    let mut dropped = 0usize;
    for s in 0..n {
        for x in 0..rank {
            let target = table.apply(s, x, 1);
            let word = reps[s]
                .mul(&Word::letter(p.generators(), x, 1).expect("in range"))
                .mul(&reps[target].inverse());
            if word.is_identity() {
                dropped += 1;
            } else {
                gen_index[s][x] = Some(origin.len());
                origin.push(word);
            }
        }
    }
    debug_assert_eq!(dropped, n - 1, "tree edges are exactly the trivial pairs");

    let y = Alphabet::standard("y", origin.len());
    let mut raw_relators = Vec::new();
    for s in 0..n {
        for r in p.relators() {
            let mut runs: Vec<(usize, i64)> = Vec::new();
            let mut cur = s;
            for (g, sign) in r.letters() {
                if sign > 0 {
                    if let Some(k) = gen_index[cur][g] {
                        runs.push((k, 1));
                    }
                    cur = table.apply(cur, g, 1);
                } else {
                    let prev = table.apply(cur, g, -1);
                    if let Some(k) = gen_index[prev][g] {
                        runs.push((k, -1));
                    }
                    cur = prev;
                }
            }
            debug_assert_eq!(cur, s, "relators act trivially");
            let rewritten = Word::from_runs(&y, runs).expect("indices in range");
            assert!(
                !rewritten.is_identity(),
                "rewritten relator of a nonempty relator cannot vanish"
            );
            raw_relators.push(rewritten);
        }
    }

    let presentation = Presentation::new(y, raw_relators.clone());
    debug_assert_eq!(presentation.relators().len(), raw_relators.len());
    RewrittenPresentation {
        presentation,
        origin,
        raw_relators,
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;
    use crate::subgroup::{coset_enumerate, low_index_subgroups};

    #[test]
    fn index_two_kernel_in_free_group_is_nielsen_schreier() {
        let p = parse_presentation("< a, b | >").unwrap();
        // kernel of a -> 1, b -> 0 mod 2
        let gens = [
            Word::parse(p.generators(), "b").unwrap(),
            Word::parse(p.generators(), "a^2").unwrap(),
            Word::parse(p.generators(), "a b a^-1").unwrap(),
        ];
        let t = coset_enumerate(&p, &gens, 50).unwrap();
        assert_eq!(t.index(), 2);
        let rw = reidemeister_schreier(&p, &t);
        assert_eq!(rw.presentation.generators().rank(), 3);
        assert_eq!(rw.presentation.relators().len(), 0);
        assert_eq!(rw.dropped, 1);
    }

    #[test]
    fn deficiency_one_counts() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        for max in 2..=4 {
            for t in low_index_subgroups(&p, max, &[]).unwrap() {
                let i = t.index();
                let rw = reidemeister_schreier(&p, &t);
                assert_eq!(rw.presentation.generators().rank(), 2 * i - (i - 1));
                assert_eq!(rw.presentation.relators().len(), i);
                assert_eq!(rw.presentation.deficiency(), 1);
            }
        }
    }

    #[test]
    fn rewritten_relators_substitute_back_to_conjugates() {
        let p = parse_presentation("< t, a | t a^2 t^-1 a^-3 >").unwrap();
        let subs = low_index_subgroups(&p, 3, &[]).unwrap();
        for t in subs {
            let rw = reidemeister_schreier(&p, &t);
            let reps = t.schreier_transversal();
            let mut k = 0usize;
            for s in 0..t.index() {
                for r in p.relators() {
                    let back = rw.raw_relators[k].substitute(&rw.origin);
                    let expected = r.conjugate_by(&reps[s]);
                    assert_eq!(back, expected, "coset {s}");
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn origin_words_generate_the_subgroup() {
        let p = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        let gens = [
            Word::parse(p.generators(), "a").unwrap(),
            Word::parse(p.generators(), "b^2").unwrap(),
        ];
        let t = coset_enumerate(&p, &gens, 50).unwrap();
        let rw = reidemeister_schreier(&p, &t);
        for w in &rw.origin {
            assert!(t.contains(w), "{w} fixes coset 0");
        }
        // Z^2 index-2 subgroup: 3 Schreier generators, 2 relators
        assert_eq!(rw.presentation.generators().rank(), 3);
        assert_eq!(rw.presentation.relators().len(), 2);
    }
}
