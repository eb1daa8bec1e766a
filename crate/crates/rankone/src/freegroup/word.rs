use std::fmt;

use super::{Alphabet, FreeGroupError};

/// A freely reduced word, stored as a run-length sequence of signed
/// generator powers. Adjacent runs always have distinct generators and
/// nonzero exponents, so equality of reduced forms is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    runs: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity(alphabet: &Alphabet) -> Self {
        Word {
            alphabet: alphabet.clone(),
            runs: Vec::new(),
        }
    }

    pub fn letter(alphabet: &Alphabet, gen: usize, exp: i64) -> Result<Self, FreeGroupError> {
        Word::from_runs(alphabet, [(gen, exp)])
    }

    /// Free reduction of a raw signed-letter (or run) sequence.
    /// Idempotent; the unique reduced form of the product of the runs.
    pub fn from_runs(
        alphabet: &Alphabet,
        raw: impl IntoIterator<Item = (usize, i64)>,
    ) -> Result<Self, FreeGroupError> {
        let mut runs: Vec<(usize, i64)> = Vec::new();
        for (gen, exp) in raw {
            if gen >= alphabet.rank() {
                return Err(FreeGroupError::UnknownGenerator(gen, alphabet.rank()));
            }
            if exp == 0 {
                continue;
            }
            push_run(&mut runs, gen, exp);
        }
        Ok(Word {
            alphabet: alphabet.clone(),
            runs,
        })
    }

    /// Parses the word syntax: whitespace-separated terms `ident` or
    /// `ident^k` with nonzero decimal k; `e` denotes the identity.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self, FreeGroupError> {
        let mut runs = Vec::new();
        let mut col = 1usize;
        for token in text.split_whitespace() {
            let tok_col = find_col(text, token, col);
            col = tok_col + token.len();
            if token == "e" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, pow)) => {
                    let exp: i64 = pow.parse().map_err(|_| FreeGroupError::Syntax {
                        col: tok_col,
                        msg: format!("bad exponent `{pow}`"),
                    })?;
                    if exp == 0 {
                        return Err(FreeGroupError::Syntax {
                            col: tok_col,
                            msg: "zero exponent".into(),
                        });
                    }
                    (name, exp)
                }
            };
            let gen = alphabet
                .index_of(name)
                .ok_or_else(|| FreeGroupError::UnknownName(name.to_string()))?;
            runs.push((gen, exp));
        }
        Word::from_runs(alphabet, runs)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn runs(&self) -> &[(usize, i64)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Word length: the number of letters of the reduced form.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Expands the runs into single signed letters (gen, ±1).
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.runs.iter().flat_map(|&(g, e)| {
            let sign = e.signum();
            (0..e.unsigned_abs()).map(move |_| (g, sign))
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        assert!(
            self.alphabet.same_as(&other.alphabet),
            "alphabet mismatch in word multiplication"
        );
        let mut runs = self.runs.clone();
        for &(g, e) in &other.runs {
            push_run(&mut runs, g, e);
        }
        Word {
            alphabet: self.alphabet.clone(),
            runs,
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(&self.alphabet);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Conjugate g w g^{-1}.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.runs
            .iter()
            .filter(|&&(g, _)| g == gen)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Applies the homomorphism sending generator i to images[i].
    pub fn substitute(&self, images: &[Word]) -> Word {
        assert_eq!(images.len(), self.alphabet.rank(), "one image per generator");
        let target = if images.is_empty() {
            self.alphabet.clone()
        } else {
            images[0].alphabet.clone()
        };
        let mut out = Word::identity(&target);
        for &(g, e) in &self.runs {
            out = out.mul(&images[g].pow(e));
        }
        out
    }

    /// Renames generators: letter i becomes the letter perm[i] of `target`.
    pub fn relabel(&self, target: &Alphabet, perm: &[usize]) -> Word {
        let runs = self.runs.iter().map(|&(g, e)| (perm[g], e));
        Word::from_runs(target, runs).expect("relabel stays in range")
    }

    /// Splits w = c · core · c^{-1} with core cyclically reduced.
    /// The core is empty iff w is the identity.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let letters: Vec<(usize, i64)> = self.letters().collect();
        let mut lo = 0usize;
        let mut hi = letters.len();
        while hi - lo >= 2 {
            let (g1, s1) = letters[lo];
            let (g2, s2) = letters[hi - 1];
            if g1 == g2 && s1 == -s2 {
                lo += 1;
                hi -= 1;
            } else {
                break;
            }
        }
        let conj = Word::from_runs(&self.alphabet, letters[..lo].iter().copied())
            .expect("letters are in range");
        let core = Word::from_runs(&self.alphabet, letters[lo..hi].iter().copied())
            .expect("letters are in range");
        (core, conj)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.runs.first(), self.runs.last()) {
            (Some(&(g1, e1)), Some(&(g2, e2))) => {
                self.runs.len() == 1 || g1 != g2 || e1.signum() == e2.signum()
            }
            _ => true,
        }
    }

    /// Maximal root: w = u^k with k as large as possible; u not a proper power.
    pub fn root(&self) -> Result<(Word, u64), FreeGroupError> {
        if self.is_identity() {
            return Err(FreeGroupError::IdentityInput);
        }
        let (core, conj) = self.cyclic_reduce();
        let letters: Vec<(usize, i64)> = core.letters().collect();
        let n = letters.len();
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            if (d..n).all(|i| letters[i] == letters[i - d]) {
                let u = Word::from_runs(&self.alphabet, letters[..d].iter().copied())
                    .expect("letters in range");
                let root = u.conjugate_by(&conj);
                return Ok((root, (n / d) as u64));
            }
        }
        unreachable!("d = n always matches");
    }

    pub fn is_proper_power(&self) -> bool {
        match self.root() {
            Ok((_, k)) => k >= 2,
            Err(_) => false,
        }
    }

    /// Looks for (g, d), d != 0, with  self_conjugated: y = g x^d g^{-1}.
    /// Candidate |d| is forced by cyclic-core lengths, so at most two signs
    /// are tried; the returned pair is verified by free reduction.
    pub fn conjugate_power_witness(x: &Word, y: &Word) -> Result<Option<(Word, i64)>, FreeGroupError> {
        if x.is_identity() {
            return Err(FreeGroupError::IdentityInput);
        }
        let (cx, px) = x.cyclic_reduce();
        let (cy, py) = y.cyclic_reduce();
        if cy.is_identity() {
            return Ok(None);
        }
        let m = cx.len();
        let n = cy.len();
        if n % m != 0 {
            return Ok(None);
        }
        let q = (n / m) as i64;
        for d in [q, -q] {
            let target = cx.pow(d);
            let tl: Vec<(usize, i64)> = target.letters().collect();
            let yl: Vec<(usize, i64)> = cy.letters().collect();
            // cx^d is cyclically reduced of the same length as cy; match a rotation.
            for j in 0..m {
                if (0..n).all(|i| tl[(i + j) % n] == yl[i]) {
                    let s = Word::from_runs(x.alphabet(), tl[..j].iter().copied())
                        .expect("letters in range");
                    // cy = s^{-1} cx^d s, so y = (py s^{-1} px^{-1}) x^d (...)^{-1}.
                    let g = py.mul(&s.inverse()).mul(&px.inverse());
                    let check = x.pow(d).conjugate_by(&g);
                    debug_assert_eq!(&check, y, "witness must verify by reduction");
                    if &check == y {
                        return Ok(Some((g, d)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Shortlex-least representative of the cyclic word among all rotations
    /// of the core and of its inverse. Used to canonicalise conjugacy-class
    /// candidates.
    pub fn cyclic_canonical(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        if core.is_identity() {
            return core;
        }
        let mut best: Option<Vec<(usize, i64)>> = None;
        for w in [core.clone(), core.inverse()] {
            let letters: Vec<(usize, i64)> = w.letters().collect();
            let n = letters.len();
            for j in 0..n {
                let rot: Vec<(usize, i64)> = (0..n).map(|i| letters[(i + j) % n]).collect();
                if best.as_ref().map_or(true, |b| letter_cmp(&rot, b) == std::cmp::Ordering::Less) {
                    best = Some(rot);
                }
            }
        }
        Word::from_runs(&self.alphabet, best.unwrap()).expect("letters in range")
    }

    /// True iff the two words are conjugate (equal cyclic words up to rotation).
    pub fn is_conjugate(&self, other: &Word) -> bool {
        let (a, _) = self.cyclic_reduce();
        let (b, _) = other.cyclic_reduce();
        if a.len() != b.len() {
            return false;
        }
        if a.is_identity() {
            return true;
        }
        let al: Vec<(usize, i64)> = a.letters().collect();
        let bl: Vec<(usize, i64)> = b.letters().collect();
        let n = al.len();
        (0..n).any(|j| (0..n).all(|i| al[(i + j) % n] == bl[i]))
    }
}

fn letter_cmp(a: &[(usize, i64)], b: &[(usize, i64)]) -> std::cmp::Ordering {
    // shortlex with letter order x1 < x1^-1 < x2 < x2^-1 < ...
    let key = |&(g, s): &(usize, i64)| 2 * g + usize::from(s < 0);
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().map(key).cmp(b.iter().map(key)))
}

fn push_run(runs: &mut Vec<(usize, i64)>, gen: usize, exp: i64) {
    if exp == 0 {
        return;
    }
    match runs.last_mut() {
        Some((g, e)) if *g == gen => {
            *e += exp;
            if *e == 0 {
                runs.pop();
            }
        }
        _ => runs.push((gen, exp)),
    }
}

fn find_col(text: &str, token: &str, from: usize) -> usize {
    text.get(from.saturating_sub(1)..)
        .and_then(|rest| rest.find(token).map(|p| from + p))
        .unwrap_or(from)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for &(g, e) in &self.runs {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", self.alphabet.name(g))?;
            } else {
                write!(f, "{}^{}", self.alphabet.name(g), e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
