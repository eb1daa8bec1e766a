use std::collections::{HashSet, VecDeque};

use super::{Alphabet, FreeGroupError, Word};

/// A Whitehead automorphism of the second kind, given by a multiplier
/// letter and a cut set of letters containing the multiplier but not its
/// inverse. Letters are encoded 2g (positive) / 2g+1 (negative).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WhiteheadMove {
    pub multiplier: usize,
    pub set: u32,
}

fn letter_inv(l: usize) -> usize {
    l ^ 1
}

impl WhiteheadMove {
    pub fn images(&self, alphabet: &Alphabet) -> Vec<Word> {
        let a_gen = self.multiplier / 2;
        let a_sign: i64 = if self.multiplier % 2 == 0 { 1 } else { -1 };
        (0..alphabet.rank())
            .map(|g| {
                if g == a_gen {
                    return Word::letter(alphabet, g, 1).expect("in range");
                }
                let pos = 2 * g;
                let neg = 2 * g + 1;
                let mut runs = Vec::new();
                if self.set & (1 << neg) != 0 {
                    runs.push((a_gen, -a_sign));
                }
                runs.push((g, 1));
                if self.set & (1 << pos) != 0 {
                    runs.push((a_gen, a_sign));
                }
                Word::from_runs(alphabet, runs).expect("in range")
            })
            .collect()
    }

    pub fn inverse(&self) -> WhiteheadMove {
        let a = self.multiplier;
        let set = (self.set & !(1 << a)) | (1 << letter_inv(a));
        WhiteheadMove {
            multiplier: letter_inv(a),
            set,
        }
    }

    /// All non-trivial Whitehead moves for the given rank. The conjugating
    /// moves (full cut set) act trivially on cyclic words and are skipped.
    pub fn enumerate(rank: usize) -> Vec<WhiteheadMove> {
        let letters = 2 * rank;
        let mut moves = Vec::new();
        for a in 0..letters {
            let others: Vec<usize> = (0..letters).filter(|&l| l != a && l != letter_inv(a)).collect();
            for mask in 0..(1u32 << others.len()) {
                let mut set = 1u32 << a;
                for (i, &l) in others.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        set |= 1 << l;
                    }
                }
                if set == 1 << a {
                    continue; // identity
                }
                if set.count_ones() as usize == letters - 1 {
                    continue; // inner automorphism: trivial on cyclic words
                }
                moves.push(WhiteheadMove { multiplier: a, set });
            }
        }
        moves.sort();
        moves
    }
}

/// Elementary free-group automorphisms with explicit inverses, so that
/// composites can be inverted exactly.
#[derive(Clone, Debug)]
pub enum ElementaryAut {
    Whitehead(WhiteheadMove),
    /// x ↦ c x c^{-1} for every basis letter.
    Inner(Word),
    InvertGen(usize),
    SwapGens(usize, usize),
    /// x_i ↦ x_i x_j^{±1} (i ≠ j).
    RightMult { gen: usize, by: usize, inv: bool },
}

impl ElementaryAut {
    pub fn images(&self, alphabet: &Alphabet) -> Vec<Word> {
        let letter = |g: usize, e: i64| Word::letter(alphabet, g, e).expect("in range");
        match self {
            ElementaryAut::Whitehead(m) => m.images(alphabet),
            ElementaryAut::Inner(c) => (0..alphabet.rank())
                .map(|g| letter(g, 1).conjugate_by(c))
                .collect(),
            ElementaryAut::InvertGen(i) => (0..alphabet.rank())
                .map(|g| letter(g, if g == *i { -1 } else { 1 }))
                .collect(),
            ElementaryAut::SwapGens(i, j) => (0..alphabet.rank())
                .map(|g| {
                    let tgt = if g == *i { *j } else if g == *j { *i } else { g };
                    letter(tgt, 1)
                })
                .collect(),
            ElementaryAut::RightMult { gen, by, inv } => (0..alphabet.rank())
                .map(|g| {
                    if g == *gen {
                        letter(g, 1).mul(&letter(*by, if *inv { -1 } else { 1 }))
                    } else {
                        letter(g, 1)
                    }
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> ElementaryAut {
        match self {
            ElementaryAut::Whitehead(m) => ElementaryAut::Whitehead(m.inverse()),
            ElementaryAut::Inner(c) => ElementaryAut::Inner(c.inverse()),
            ElementaryAut::InvertGen(i) => ElementaryAut::InvertGen(*i),
            ElementaryAut::SwapGens(i, j) => ElementaryAut::SwapGens(*i, *j),
            ElementaryAut::RightMult { gen, by, inv } => ElementaryAut::RightMult {
                gen: *gen,
                by: *by,
                inv: !inv,
            },
        }
    }
}

/// A composite automorphism, applied left to right.
#[derive(Clone, Debug)]
pub struct Automorphism {
    alphabet: Alphabet,
    moves: Vec<ElementaryAut>,
}

impl Automorphism {
    pub fn identity(alphabet: &Alphabet) -> Self {
        Automorphism {
            alphabet: alphabet.clone(),
            moves: Vec::new(),
        }
    }

    pub fn from_moves(alphabet: &Alphabet, moves: Vec<ElementaryAut>) -> Self {
        Automorphism {
            alphabet: alphabet.clone(),
            moves,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn push(&mut self, m: ElementaryAut) {
        self.moves.push(m);
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut cur = w.clone();
        for m in &self.moves {
            cur = cur.substitute(&m.images(&self.alphabet));
        }
        cur
    }

    pub fn images(&self) -> Vec<Word> {
        (0..self.alphabet.rank())
            .map(|g| self.apply(&Word::letter(&self.alphabet, g, 1).expect("in range")))
            .collect()
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            alphabet: self.alphabet.clone(),
            moves: self.moves.iter().rev().map(|m| m.inverse()).collect(),
        }
    }

    pub fn compose(&self, then: &Automorphism) -> Automorphism {
        let mut moves = self.moves.clone();
        moves.extend(then.moves.iter().cloned());
        Automorphism {
            alphabet: self.alphabet.clone(),
            moves,
        }
    }
}

/// Certificate for a primitivity decision.
#[derive(Clone, Debug)]
pub enum PrimitivityOutcome {
    /// Length-reducing Whitehead moves carrying the cyclic word to a single
    /// letter, with the intermediate cyclic cores.
    Primitive(WhiteheadTrace),
    /// The closed orbit of the minimal-length cyclic word under
    /// length-preserving moves; no member admits a reducing move.
    NotPrimitive {
        min_length: usize,
        orbit: Vec<Word>,
        orbit_complete: bool,
    },
}

#[derive(Clone, Debug)]
pub struct WhiteheadTrace {
    pub start: Word,
    pub steps: Vec<(WhiteheadMove, Word)>,
    pub final_letter: Word,
}

impl WhiteheadTrace {
    /// Replays every move and re-checks the strict length descent to 1.
    pub fn verify(&self) -> bool {
        let alphabet = self.start.alphabet();
        let mut cur = self.start.cyclic_reduce().0;
        for (mv, recorded) in &self.steps {
            let next = cur.substitute(&mv.images(alphabet)).cyclic_reduce().0;
            if next.len() >= cur.len() || &next != recorded {
                return false;
            }
            cur = next;
        }
        cur.len() == 1 && cur == self.final_letter
    }

    /// The moves as a composite automorphism (acting on straight words).
    pub fn automorphism(&self) -> Automorphism {
        Automorphism::from_moves(
            self.start.alphabet(),
            self.steps
                .iter()
                .map(|(m, _)| ElementaryAut::Whitehead(*m))
                .collect(),
        )
    }
}

const ORBIT_CAP: usize = 20_000;

/// Decides whether w is primitive (a member of some free basis), with a
/// machine-checkable certificate either way. Whitehead's peak reduction
/// guarantees the greedy descent reaches the orbit minimum.
pub fn is_primitive(w: &Word) -> Result<(bool, PrimitivityOutcome), FreeGroupError> {
    if w.is_identity() {
        return Err(FreeGroupError::IdentityInput);
    }
    let alphabet = w.alphabet().clone();
    if alphabet.rank() == 0 {
        return Err(FreeGroupError::IdentityInput);
    }
    let moves = WhiteheadMove::enumerate(alphabet.rank());
    let (mut cur, _) = w.cyclic_reduce();
    let start = cur.clone();
    let mut steps = Vec::new();
    loop {
        if cur.len() == 1 {
            let trace = WhiteheadTrace {
                start,
                steps,
                final_letter: cur,
            };
            debug_assert!(trace.verify());
            return Ok((true, PrimitivityOutcome::Primitive(trace)));
        }
        // lexicographically least strictly reducing move (multiplier, then set)
        let mut best: Option<(WhiteheadMove, Word)> = None;
        for mv in &moves {
            let next = cur.substitute(&mv.images(&alphabet)).cyclic_reduce().0;
            if next.len() < cur.len() {
                best = Some((*mv, next));
                break;
            }
        }
        match best {
            Some((mv, next)) => {
                cur = next.clone();
                steps.push((mv, next));
            }
            None => {
                let (orbit, complete) = min_orbit(&cur, &moves);
                return Ok((
                    false,
                    PrimitivityOutcome::NotPrimitive {
                        min_length: cur.len(),
                        orbit,
                        orbit_complete: complete,
                    },
                ));
            }
        }
    }
}

/// Closure of the minimal cyclic word under length-preserving Whitehead
/// moves, each member checked to admit no reducing move.
fn min_orbit(start: &Word, moves: &[WhiteheadMove]) -> (Vec<Word>, bool) {
    let alphabet = start.alphabet().clone();
    let len = start.len();
    let canon = start.cyclic_canonical();
    let mut seen = HashSet::new();
    let mut orbit = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(canon.clone());
    orbit.push(canon.clone());
    queue.push_back(canon);
    let mut complete = true;
    while let Some(v) = queue.pop_front() {
        if orbit.len() > ORBIT_CAP {
            complete = false;
            break;
        }
        for mv in moves {
            let next = v.substitute(&mv.images(&alphabet)).cyclic_reduce().0;
            debug_assert!(next.len() >= len, "orbit member admits a reducing move");
            if next.len() == len {
                let c = next.cyclic_canonical();
                if seen.insert(c.clone()) {
                    orbit.push(c.clone());
                    queue.push_back(c);
                }
            }
        }
    }
    (orbit, complete)
}
