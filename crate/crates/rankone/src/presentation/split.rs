use crate::freegroup::{fold, Alphabet, Word};

use super::{Presentation, PresentationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    /// One edge subgroup equals the vertex group, the other is proper.
    AscendingStrict,
    /// Both edge subgroups equal the vertex group (semidirect product).
    AscendingEqual,
    /// Both edge subgroups are proper in the vertex group.
    BothProper,
    /// No generator has zero exponent sum in the relator.
    NotFound,
}

/// HNN data read off a 2-generator 1-relator presentation by Magnus
/// rewriting over conjugates of the non-stable generator.
#[derive(Clone, Debug)]
pub struct HnnSplitting {
    pub kind: SplitKind,
    /// Index of the stable letter in the original generators.
    pub stable: Option<usize>,
    /// For ascending kinds: the ascent runs along t^{-1} instead of t.
    pub stable_inverted: bool,
    /// Magnus generators a_i = t^{m+i} a t^{-(m+i)} as words in the original
    /// generators (the vertex group of the splitting before any collapse).
    pub vertex_words: Vec<Word>,
    /// The relator rewritten over the Magnus alphabet a1..ak.
    pub rewritten_relator: Option<Word>,
    /// Letter counts of the extremal Magnus generators in the rewritten
    /// relator; a count of 1 is what makes an edge subgroup equal the vertex.
    pub extremal_counts: (usize, usize),
    /// For ascending kinds: images of the free vertex basis under
    /// conjugation by the (possibly inverted) stable letter.
    pub ascending_images: Option<Vec<Word>>,
    /// Alphabet of the free vertex basis for `ascending_images`.
    pub vertex_alphabet: Option<Alphabet>,
}

impl HnnSplitting {
    fn not_found() -> Self {
        HnnSplitting {
            kind: SplitKind::NotFound,
            stable: None,
            stable_inverted: false,
            vertex_words: Vec::new(),
            rewritten_relator: None,
            extremal_counts: (0, 0),
            ascending_images: None,
            vertex_alphabet: None,
        }
    }
}

/// Magnus rewriting of a 2-generator 1-relator presentation.
///
/// The stable letter is the first generator with zero exponent sum in the
/// relator. Writing a_i for its conjugates of the other generator, the
/// relator becomes a word over a_m..a_M; the edge subgroup ⟨a_m..a_{M-1}⟩
/// equals the vertex group exactly when a_M occurs once (then the vertex is
/// free on a_m..a_{M-1} by Tietze elimination), and symmetrically for a_m.
/// Equality is cross-checked by folding the resulting endomorphism images.
pub fn one_relator_hnn_split(p: &Presentation) -> Result<HnnSplitting, PresentationError> {
    if p.generators().rank() != 2 || p.relators().len() != 1 {
        return Err(PresentationError::Precondition(
            "splitting requires exactly 2 generators and 1 relator".into(),
        ));
    }
    let relator = &p.relators()[0];
    let sums = [relator.exponent_sum(0), relator.exponent_sum(1)];
    let Some(stable) = (0..2).find(|&g| sums[g] == 0) else {
        return Ok(HnnSplitting::not_found());
    };
    let moving = 1 - stable;
    let alphabet = p.generators();

    // heights of the moving-generator letters along the relator
    let mut height = 0i64;
    let mut occ: Vec<(i64, i64)> = Vec::new();
    for (g, s) in relator.letters() {
        if g == stable {
            height += s;
        } else {
            occ.push((height, s));
        }
    }
    debug_assert_eq!(height, 0);

    if occ.is_empty() {
        unreachable!("a nonempty cyclically reduced relator with zero stable sum has moving letters");
    }
    let min = occ.iter().map(|&(h, _)| h).min().unwrap();
    let max = occ.iter().map(|&(h, _)| h).max().unwrap();
    let span = (max - min) as usize + 1;
    let magnus = Alphabet::standard("a", span);
    let rewritten = Word::from_runs(
        &magnus,
        occ.iter().map(|&(h, s)| ((h - min) as usize, s)),
    )
    .expect("indices are in range");

    let vertex_words: Vec<Word> = (0..span)
        .map(|i| {
            let k = min + i as i64;
            let t = Word::letter(alphabet, stable, k).expect("in range");
            let a = Word::letter(alphabet, moving, 1).expect("in range");
            t.mul(&a).mul(&t.inverse())
        })
        .collect();

    if span == 1 {
        // relator is a power of a single Magnus generator
        let power = rewritten.exponent_sum(0).unsigned_abs();
        let kind = if power <= 1 {
            SplitKind::AscendingEqual
        } else {
            SplitKind::BothProper
        };
        return Ok(HnnSplitting {
            kind,
            stable: Some(stable),
            stable_inverted: false,
            vertex_words,
            rewritten_relator: Some(rewritten),
            extremal_counts: (power as usize, power as usize),
            ascending_images: None,
            vertex_alphabet: None,
        });
    }

    let top = span - 1;
    let count = |gen: usize| {
        rewritten
            .runs()
            .iter()
            .filter(|&&(g, _)| g == gen)
            .map(|&(_, e)| e.unsigned_abs() as usize)
            .sum::<usize>()
    };
    let low_count = count(0);
    let top_count = count(top);
    let up = top_count == 1;
    let down = low_count == 1;

    let mut splitting = HnnSplitting {
        kind: SplitKind::BothProper,
        stable: Some(stable),
        stable_inverted: false,
        vertex_words,
        rewritten_relator: Some(rewritten.clone()),
        extremal_counts: (low_count, top_count),
        ascending_images: None,
        vertex_alphabet: None,
    };

    if !up && !down {
        return Ok(splitting);
    }

    // Build the conjugation endomorphism on the free vertex basis.
    let (vertex, images, inverted) = if up {
        let vertex = Alphabet::standard("a", top);
        let solved = solve_extremal(&rewritten, top);
        let images: Vec<Word> = (0..top)
            .map(|i| {
                if i + 1 < top {
                    Word::letter(&vertex, i + 1, 1).expect("in range")
                } else {
                    restrict(&solved, &vertex)
                }
            })
            .collect();
        (vertex, images, false)
    } else {
        // ascend along t^{-1}: vertex a_1..a_top, conjugation lowers indices
        let vertex = Alphabet::standard("b", top);
        let solved = solve_extremal(&rewritten, 0);
        let images: Vec<Word> = (0..top)
            .map(|i| {
                if i >= 1 {
                    Word::letter(&vertex, i - 1, 1).expect("in range")
                } else {
                    // solved is over a_1..a_top; shift indices down by one
                    Word::from_runs(&vertex, solved.runs().iter().map(|&(g, e)| (g - 1, e)))
                        .expect("in range")
                }
            })
            .collect();
        (vertex, images, true)
    };

    let graph = fold(&vertex, &images);
    if graph.rank() != vertex.rank() {
        return Err(PresentationError::Precondition(format!(
            "vertex conjugation map is not injective (rank {} < {}); the splitting data is inconsistent",
            graph.rank(),
            vertex.rank()
        )));
    }
    let surjective = (0..vertex.rank()).all(|g| {
        graph.contains(&Word::letter(&vertex, g, 1).expect("in range"))
    });

    splitting.kind = if surjective {
        SplitKind::AscendingEqual
    } else {
        SplitKind::AscendingStrict
    };
    if surjective != (up && down) {
        return Err(PresentationError::Precondition(
            "fold surjectivity disagrees with extremal letter counts".into(),
        ));
    }
    splitting.stable_inverted = inverted && !(up && down);
    splitting.ascending_images = Some(images);
    splitting.vertex_alphabet = Some(vertex);
    Ok(splitting)
}

/// The extremal generator occurs exactly once; rotate the cyclic relator so
/// that occurrence is last and solve for it.
fn solve_extremal(rewritten: &Word, gen: usize) -> Word {
    let letters: Vec<(usize, i64)> = rewritten.letters().collect();
    let pos = letters
        .iter()
        .position(|&(g, _)| g == gen)
        .expect("extremal generator occurs");
    let sign = letters[pos].1;
    let n = letters.len();
    let rotated: Vec<(usize, i64)> = (0..n - 1).map(|i| letters[(pos + 1 + i) % n]).collect();
    let w = Word::from_runs(rewritten.alphabet(), rotated).expect("in range");
    if sign > 0 {
        w.inverse()
    } else {
        w
    }
}

fn restrict(w: &Word, smaller: &Alphabet) -> Word {
    Word::from_runs(smaller, w.runs().iter().copied()).expect("restricted word stays in range")
}

/// When both exponent sums are nonzero, Euclidean Nielsen substitutions on
/// the two generators produce an isomorphic presentation in which one
/// generator has zero exponent sum. Returns the presentation and the list
/// of substitutions applied.
pub fn zero_exponent_change(
    p: &Presentation,
) -> Result<(Presentation, Vec<String>), PresentationError> {
    if p.generators().rank() != 2 || p.relators().len() != 1 {
        return Err(PresentationError::Precondition(
            "change of generators requires exactly 2 generators and 1 relator".into(),
        ));
    }
    let alphabet = p.generators().clone();
    let mut relator = p.relators()[0].clone();
    let mut trace = Vec::new();
    loop {
        let s0 = relator.exponent_sum(0);
        let s1 = relator.exponent_sum(1);
        if s0 == 0 || s1 == 0 {
            break;
        }
        // substitute into the relator to shrink the larger sum
        let (target, by, q) = if s0.abs() >= s1.abs() {
            (0usize, 1usize, s0 / s1)
        } else {
            (1usize, 0usize, s1 / s0)
        };
        // replacing x_by by x_by · x_target^{-q} changes sum(target) by -q*sum(by)
        let images: Vec<Word> = (0..2)
            .map(|g| {
                if g == by {
                    Word::letter(&alphabet, by, 1)
                        .expect("in range")
                        .mul(&Word::letter(&alphabet, target, -q).expect("in range"))
                } else {
                    Word::letter(&alphabet, g, 1).expect("in range")
                }
            })
            .collect();
        trace.push(format!(
            "{} -> {} {}^{}",
            alphabet.name(by),
            alphabet.name(by),
            alphabet.name(target),
            -q
        ));
        relator = relator.substitute(&images);
        let (core, _) = relator.cyclic_reduce();
        relator = core;
    }
    Ok((Presentation::new(alphabet, vec![relator]), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    #[test]
    fn bs12_is_strictly_ascending() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::AscendingStrict);
        assert_eq!(s.stable, Some(0));
        assert!(!s.stable_inverted);
        let vertex = s.vertex_alphabet.unwrap();
        assert_eq!(vertex.rank(), 1);
        let images = s.ascending_images.unwrap();
        assert_eq!(images[0], Word::parse(&vertex, "a1^2").unwrap());
    }

    #[test]
    fn commuting_relator_is_semidirect() {
        let p = parse_presentation("< t, a | t a t^-1 a^-1 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::AscendingEqual);
        let images = s.ascending_images.unwrap();
        assert_eq!(images.len(), 1);
        assert_eq!(images[0].to_string(), "a1");
    }

    #[test]
    fn commutator_with_conjugate_is_both_proper() {
        // [a, t a t^-1]: vertex <a_0, a_1>, both edges proper
        let p = parse_presentation("< t, a | t a t^-1 a t a^-1 t^-1 a^-1 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::BothProper);
        assert_eq!(s.vertex_words.len(), 2);
        assert_eq!(s.extremal_counts, (2, 2));
    }

    #[test]
    fn descending_relator_uses_inverted_stable_letter() {
        // t a^2 t^-1 a^-1: a_1^2 a_0^-1, the lower generator occurs once
        let p = parse_presentation("< t, a | t a^2 t^-1 a^-1 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::AscendingStrict);
        assert!(s.stable_inverted);
        let vertex = s.vertex_alphabet.unwrap();
        let images = s.ascending_images.unwrap();
        assert_eq!(images[0], Word::parse(&vertex, "b1^2").unwrap());
    }

    #[test]
    fn torsion_like_relator_is_both_proper() {
        // relator a^3: G = Z/3 * Z, trivial edge groups
        let p = parse_presentation("< t, a | a^3 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::BothProper);
    }

    #[test]
    fn no_zero_sum_reports_not_found_and_change_fixes_it() {
        let p = parse_presentation("< t, a | t^2 a^3 >").unwrap();
        let s = one_relator_hnn_split(&p).unwrap();
        assert_eq!(s.kind, SplitKind::NotFound);

        let (q, trace) = zero_exponent_change(&p).unwrap();
        assert!(!trace.is_empty());
        let sums: Vec<i64> = (0..2).map(|g| q.relators()[0].exponent_sum(g)).collect();
        assert!(sums.contains(&0));
        assert!(one_relator_hnn_split(&q).unwrap().kind != SplitKind::NotFound);
    }

    #[test]
    fn wrong_shape_is_a_precondition_error() {
        let p = parse_presentation("< a, b, c | a b c >").unwrap();
        assert!(one_relator_hnn_split(&p).is_err());
    }
}
