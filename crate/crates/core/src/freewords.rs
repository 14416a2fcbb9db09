//! Free-group word algebra.
//!
//! Words are sequences of signed generators kept freely reduced at all times.
//! Generator ids index into an alphabet owned by the caller (see
//! [`crate::symbols::Symbols`]); this module never needs the names.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum number of declared constant generators in one alphabet.
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeError {
    #[error("variable with id {0} has no assigned value")]
    Unassigned(u16),
    #[error("base word must be non-empty")]
    EmptyBase,
    #[error("base word is a proper power")]
    ProperPower,
    #[error("base word is not cyclically reduced")]
    NotCyclicallyReduced,
}

/// A generator or its inverse.
///
/// The derived ordering gives `a < a^-1 < b < b^-1 < ...` when ids follow the
/// declared alphabet order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    id: u16,
    inverse: bool,
}

impl Generator {
    pub const fn new(id: u16, sign: i8) -> Self {
        Generator {
            id,
            inverse: sign < 0,
        }
    }

    pub const fn pos(id: u16) -> Self {
        Generator { id, inverse: false }
    }

    pub const fn neg(id: u16) -> Self {
        Generator { id, inverse: true }
    }

    pub fn id(self) -> u16 {
        self.id
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn inv(self) -> Self {
        Generator {
            id: self.id,
            inverse: !self.inverse,
        }
    }

    pub fn cancels(self, other: Generator) -> bool {
        self.id == other.id && self.inverse != other.inverse
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}^-1", self.id)
        } else {
            write!(f, "g{}", self.id)
        }
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Generator>);

/// Freely reduces a raw sequence of generators.
pub fn reduce<I: IntoIterator<Item = Generator>>(raw: I) -> Word {
    let mut out: Vec<Generator> = Vec::new();
    for g in raw {
        match out.last() {
            Some(&last) if last.cancels(g) => {
                out.pop();
            }
            _ => out.push(g),
        }
    }
    Word(out)
}

/// `[x, y] = x^-1 y^-1 x y`.
pub fn commutator(x: &Word, y: &Word) -> Word {
    reduce(
        x.inverse()
            .0
            .into_iter()
            .chain(y.inverse().0)
            .chain(x.0.iter().copied())
            .chain(y.0.iter().copied()),
    )
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: Generator) -> Self {
        Word(vec![g])
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Generator> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Generator> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Generator> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Product of a sequence of words.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        reduce(words.into_iter().flat_map(|w| w.0.iter().copied()))
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let n = exp.unsigned_abs() as usize;
        let mut raw = Vec::with_capacity(base.len() * n);
        for _ in 0..n {
            raw.extend_from_slice(&base.0);
        }
        reduce(raw)
    }

    /// `g^-1 · self · g`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        Word::product([&g.inverse(), self, g])
    }

    /// Occurrences of generator `id` (either sign).
    pub fn count_id(&self, id: u16) -> usize {
        self.0.iter().filter(|g| g.id == id).count()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => self.0.len() == 1 || !f.cancels(l),
            _ => true,
        }
    }

    /// Splits `self = c · core · c^-1` with `core` cyclically reduced.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k].cancels(self.0[n - 1 - k]) {
            k += 1;
        }
        (
            Word(self.0[..k].to_vec()),
            Word(self.0[k..n - k].to_vec()),
        )
    }

    /// Rotation of a cyclically reduced word by `k` letters to the left.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        reduce(v)
    }

    /// For a cyclically reduced word returns `(r, k)` with `self = r^k` and `r`
    /// not a proper power.
    fn cyclic_root(&self) -> (Word, usize) {
        let n = self.0.len();
        for d in 1..=n {
            if !n.is_multiple_of(d) {
                continue;
            }
            if (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return (Word(self.0[..d].to_vec()), n / d);
            }
        }
        (self.clone(), 1)
    }

    /// Returns `(r, k)` with `self = r^k` and `r` simple. The empty word gives
    /// `(1, 0)`.
    pub fn root(&self) -> (Word, usize) {
        if self.is_empty() {
            return (Word::empty(), 0);
        }
        let (c, core) = self.cyclic_split();
        let (r, k) = core.cyclic_root();
        (Word::product([&c, &r, &c.inverse()]), k)
    }

    pub fn is_proper_power(&self) -> bool {
        self.root().1 > 1
    }

    /// The unique square root in the free group, if one exists.
    pub fn sqrt(&self) -> Option<Word> {
        if self.is_empty() {
            return Some(Word::empty());
        }
        let (c, core) = self.cyclic_split();
        let n = core.len();
        if n % 2 != 0 || core.0[..n / 2] != core.0[n / 2..] {
            return None;
        }
        let half = Word(core.0[..n / 2].to_vec());
        Some(Word::product([&c, &half, &c.inverse()]))
    }

    /// Some `g` with `g^-1 · self · g = target`, if the two are conjugate.
    pub fn conjugator_to(&self, target: &Word) -> Option<Word> {
        let (a, m) = self.cyclic_split();
        let (b, r) = target.cyclic_split();
        if m.len() != r.len() {
            return None;
        }
        if m.is_empty() {
            return Some(Word::empty());
        }
        // m = s t, r = t s = s^-1 m s
        for k in 0..m.len() {
            if m.rotate(k) == r {
                let s = Word(m.0[..k].to_vec());
                // self = a m a^-1, target = b r b^-1 = b s^-1 m s b^-1
                // g = a s b^-1
                return Some(Word::product([&a, &s, &b.inverse()]));
            }
        }
        None
    }

    /// Applies the homomorphism determined by `image` to every letter.
    pub fn map_letters<F: FnMut(Generator) -> Word>(&self, mut image: F) -> Word {
        let mut raw = Vec::new();
        for &g in &self.0 {
            raw.extend(image(g).0);
        }
        reduce(raw)
    }

    /// Formats with caller-supplied generator names; `^-1` marks inverses and
    /// runs of one letter are collapsed into powers.
    pub fn display_with<'a, N: Fn(u16) -> &'a str>(&self, name: N) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let g = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == g {
                j += 1;
            }
            let exp = (j - i) as i64 * g.sign() as i64;
            if exp == 1 {
                parts.push(name(g.id).to_string());
            } else {
                parts.push(format!("{}^{}", name(g.id), exp));
            }
            i = j;
        }
        parts.join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// Shortlex: shorter words first, then lexicographic by generator order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl From<Vec<Generator>> for Word {
    fn from(v: Vec<Generator>) -> Self {
        reduce(v)
    }
}

/// Legs of a polygon whose sides multiply to 1: `z_k = L_k L_{k+1}^-1`
/// with cancellation-free products. Up to three sides; a triangle of
/// reduced words is always a tripod. A single side gets no legs.
pub fn tripod_legs(z: &[Word]) -> Vec<Word> {
    match z.len() {
        0 | 1 => Vec::new(),
        2 => vec![z[0].clone(), Word::empty()],
        _ => {
            let (a, b, c) = (z[0].len(), z[1].len(), z[2].len());
            // |L1| + |L2| = a, |L2| + |L3| = b, |L3| + |L1| = c.
            let l1 = (a + c).saturating_sub(b) / 2;
            let l2 = a - l1.min(a);
            let l1 = a - l2;
            vec![
                Word::from(z[0].letters()[..l1].to_vec()),
                Word::from(z[0].letters()[l1..].to_vec()).inverse(),
                Word::from(z[1].letters()[l2.min(b)..].to_vec()).inverse(),
            ]
        }
    }
}

/// Image of `template` under the homomorphism fixing constants and sending
/// each variable to its assigned word.
pub fn substitute<V: Fn(u16) -> bool>(
    template: &Word,
    is_variable: V,
    assignment: &BTreeMap<u16, Word>,
) -> Result<Word, FreeError> {
    let mut raw = Vec::new();
    for &g in template.letters() {
        if is_variable(g.id()) {
            let w = assignment.get(&g.id()).ok_or(FreeError::Unassigned(g.id()))?;
            if g.is_inverse() {
                raw.extend(w.inverse().0);
            } else {
                raw.extend_from_slice(&w.0);
            }
        } else {
            raw.push(g);
        }
    }
    Ok(reduce(raw))
}

/// A word up to cyclic permutation, stored as the least rotation of its
/// cyclic reduction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn representative(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds a cyclic word from raw letters without any reduction; used for
    /// quadratic sets whose letters are edge labels.
    pub fn from_raw_cycle(letters: Vec<Generator>) -> CyclicWord {
        CyclicWord(Word(least_rotation(&letters)))
    }
}

fn least_rotation(v: &[Generator]) -> Vec<Generator> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = 0;
    for k in 1..n {
        let less = (0..n)
            .map(|i| v[(k + i) % n].cmp(&v[(best + i) % n]))
            .find(|o| *o != Ordering::Equal)
            == Some(Ordering::Less);
        if less {
            best = k;
        }
    }
    (0..n).map(|i| v[(best + i) % n]).collect()
}

pub fn cyclic_normalize(w: &Word) -> CyclicWord {
    let (_, core) = w.cyclic_split();
    CyclicWord(Word(least_rotation(&core.0)))
}

/// One maximal stable occurrence `U^(sign * power)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableOccurrence {
    pub sign: i8,
    pub power: usize,
}

/// `w = v_0 U^(e_1 r_1) v_1 ... U^(e_m r_m) v_m` with every `U^(e_i r_i)` a
/// maximal stable occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UDecomposition {
    pub base: Word,
    pub segments: Vec<Word>,
    pub occurrences: Vec<StableOccurrence>,
}

impl UDecomposition {
    /// Concatenates the pieces back into a word.
    pub fn reassemble(&self) -> Word {
        let mut raw: Vec<Generator> = self.segments[0].letters().to_vec();
        for (occ, seg) in self.occurrences.iter().zip(&self.segments[1..]) {
            let block = if occ.sign < 0 {
                self.base.inverse()
            } else {
                self.base.clone()
            };
            for _ in 0..occ.power {
                raw.extend_from_slice(block.letters());
            }
            raw.extend_from_slice(seg.letters());
        }
        reduce(raw)
    }
}

/// Computes the U-decomposition of `w`.
///
/// A maximal run of `m` consecutive copies of `U^e` contributes the stable
/// occurrence formed by its `m - 2` interior copies; the outer copies are the
/// flanks.
pub fn u_decompose(w: &Word, base: &Word) -> Result<UDecomposition, FreeError> {
    if base.is_empty() {
        return Err(FreeError::EmptyBase);
    }
    if !base.is_cyclically_reduced() {
        return Err(FreeError::NotCyclicallyReduced);
    }
    if base.is_proper_power() {
        return Err(FreeError::ProperPower);
    }
    let letters = w.letters();
    let p = base.len();
    let inv = base.inverse();
    let matches_at = |i: usize, u: &Word| i + p <= letters.len() && letters[i..i + p] == u.0[..];

    // (start of stable part, sign, power)
    let mut stable: Vec<(usize, i8, usize)> = Vec::new();
    for (sign, u) in [(1i8, base), (-1i8, &inv)] {
        for start in 0..letters.len() {
            if !matches_at(start, u) || (start >= p && matches_at(start - p, u)) {
                continue;
            }
            let mut m = 0;
            while matches_at(start + m * p, u) {
                m += 1;
            }
            if m >= 3 {
                stable.push((start + p, sign, m - 2));
            }
        }
    }
    stable.sort();

    let mut segments = Vec::new();
    let mut occurrences = Vec::new();
    let mut cursor = 0;
    for (start, sign, power) in stable {
        if start < cursor {
            continue;
        }
        segments.push(Word(letters[cursor..start].to_vec()));
        occurrences.push(StableOccurrence { sign, power });
        cursor = start + power * p;
    }
    segments.push(Word(letters[cursor..].to_vec()));
    Ok(UDecomposition {
        base: base.clone(),
        segments,
        occurrences,
    })
}
