use crate::freegroup::{Alphabet, Word};

use super::Presentation;

#[derive(Clone, Debug)]
pub enum TietzeStep {
    /// Removed `generator` using a relator in which it occurred exactly once;
    /// every other relator had `substitution` put in its place.
    Eliminate {
        generator: String,
        relator: Word,
        substitution: Word,
    },
    /// A relator became trivial after substitution and was removed.
    DropTrivialRelator { index: usize },
}

#[derive(Clone, Debug, Default)]
pub struct TietzeTrace {
    pub steps: Vec<TietzeStep>,
    pub budget_exhausted: bool,
}

/// Greedy elimination: repeatedly remove a generator occurring exactly once
/// (exponent ±1) in some relator, shortest relator first, ties by generator
/// order. Deterministic; never increases the generator count.
pub fn tietze_simplify(p: &Presentation, budget: usize) -> (Presentation, TietzeTrace) {
    let mut current = p.clone();
    let mut trace = TietzeTrace::default();
    for _ in 0..budget {
        match eliminate_once(&current, &mut trace) {
            Some(next) => current = next,
            None => return (current, trace),
        }
    }
    if eliminate_once(&current, &mut TietzeTrace::default()).is_some() {
        trace.budget_exhausted = true;
    }
    (current, trace)
}

fn eliminate_once(p: &Presentation, trace: &mut TietzeTrace) -> Option<Presentation> {
    let alphabet = p.generators();
    let mut order: Vec<usize> = (0..p.relators().len()).collect();
    order.sort_by_key(|&i| (p.relators()[i].len(), i));

    for &ri in &order {
        let relator = &p.relators()[ri];
        for gen in 0..alphabet.rank() {
            let occurrences: i64 = relator
                .runs()
                .iter()
                .filter(|&&(g, _)| g == gen)
                .map(|&(_, e)| e.abs())
                .sum();
            if occurrences != 1 {
                continue;
            }
            let substitution = solve_for(relator, gen);
            return Some(apply_elimination(p, ri, gen, substitution, trace));
        }
    }
    None
}

/// Rotates the cyclic relator so the unique `gen`-letter is last and solves
/// for it: r ~ w·gen^ε means gen = w^{-ε}.
fn solve_for(relator: &Word, gen: usize) -> Word {
    let letters: Vec<(usize, i64)> = relator.letters().collect();
    let pos = letters
        .iter()
        .position(|&(g, _)| g == gen)
        .expect("generator occurs");
    let sign = letters[pos].1;
    let n = letters.len();
    let rotated: Vec<(usize, i64)> = (0..n).map(|i| letters[(pos + 1 + i) % n]).collect();
    // rotated = w · gen^sign with the gen-letter at the end
    debug_assert_eq!(rotated[n - 1], (gen, sign));
    let w = Word::from_runs(relator.alphabet(), rotated[..n - 1].iter().copied())
        .expect("letters in range");
    if sign > 0 {
        w.inverse()
    } else {
        w
    }
}

fn apply_elimination(
    p: &Presentation,
    relator_index: usize,
    gen: usize,
    substitution: Word,
    trace: &mut TietzeTrace,
) -> Presentation {
    let alphabet = p.generators();
    let new_names: Vec<String> = alphabet
        .names()
        .iter()
        .enumerate()
        .filter(|&(g, _)| g != gen)
        .map(|(_, n)| n.clone())
        .collect();
    let new_alphabet = Alphabet::new(new_names).expect("remaining names stay valid");
    // old index -> new index (the eliminated generator never appears below)
    let perm: Vec<usize> = (0..alphabet.rank())
        .map(|g| if g < gen { g } else { g.saturating_sub(1) })
        .collect();

    let images: Vec<Word> = (0..alphabet.rank())
        .map(|g| {
            if g == gen {
                substitution.clone()
            } else {
                Word::letter(alphabet, g, 1).expect("in range")
            }
        })
        .collect();

    trace.steps.push(TietzeStep::Eliminate {
        generator: alphabet.name(gen).to_string(),
        relator: p.relators()[relator_index].clone(),
        substitution: substitution.clone(),
    });

    let mut new_relators = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        if i == relator_index {
            continue;
        }
        let substituted = r.substitute(&images);
        let relabeled = substituted.relabel(&new_alphabet, &perm);
        let (core, _) = relabeled.cyclic_reduce();
        if core.is_identity() {
            trace.steps.push(TietzeStep::DropTrivialRelator { index: i });
        } else {
            new_relators.push(core);
        }
    }
    Presentation::new(new_alphabet, new_relators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn eliminates_explicitly_defined_generator() {
        // b is defined by the first relator
        let p = parse_presentation("< t, a, b | t a t^-1 b^-1, b a b^-1 a >").unwrap();
        let (q, trace) = tietze_simplify(&p, 10);
        assert_eq!(q.generators().rank(), 2);
        assert_eq!(q.relators().len(), 1);
        assert_eq!(q.deficiency(), p.deficiency());
        assert!(!trace.budget_exhausted);
        assert!(matches!(trace.steps[0], TietzeStep::Eliminate { .. }));
    }

    #[test]
    fn chain_presentation_collapses_to_two_generators() {
        // a2 = t a1 t^-1, a1 picks up t a2 t^-1 = a1^d
        let p = parse_presentation(
            "< t, a1, a2 | t a1 t^-1 a2^-1, t a2 t^-1 a1^-3 >",
        )
        .unwrap();
        let (q, _) = tietze_simplify(&p, 10);
        assert_eq!(q.generators().rank(), 2);
        assert_eq!(q.relators().len(), 1);
        assert_eq!(q.deficiency(), 1);
        // the surviving relator is t^2 a1 t^-2 a1^-3 up to cyclic moves
        let expect = parse_presentation("< t, a1 | t^2 a1 t^-2 a1^-3 >").unwrap();
        assert!(q.relators()[0].is_conjugate(&expect.relators()[0])
            || q.relators()[0].inverse().is_conjugate(&expect.relators()[0]));
    }

    #[test]
    fn minimal_presentation_is_a_fixpoint() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        let (q, trace) = tietze_simplify(&p, 10);
        assert_eq!(q, p);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn budget_zero_flags_pending_work() {
        let p = parse_presentation("< t, a, b | t a t^-1 b^-1, b a b^-1 a >").unwrap();
        let (q, trace) = tietze_simplify(&p, 0);
        assert_eq!(q, p);
        assert!(trace.budget_exhausted);
    }
}
