//! SL₂(ℤ) arithmetic and LR-words for pseudo-Anosov mapping classes.
//!
//! `R = [[1,1],[0,1]]` and `L = [[1,0],[1,1]]`. A word `A₁A₂⋯Aₙ` denotes
//! the ordered product of its letters. Every hyperbolic class of SL₂(ℤ)
//! with positive trace is conjugate to a positive word containing both
//! letters, unique up to cyclic rotation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("matrix [[{a},{b}],[{c},{d}]] has determinant {det}, expected 1")]
    NotUnimodular {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        det: i128,
    },
    #[error("integer overflow in SL2(Z) arithmetic")]
    Overflow,
    #[error("not pseudo-Anosov: |trace| = {trace} <= 2")]
    NotPseudoAnosov { trace: i64 },
    #[error("invalid letter {0:?}; words are strings over {{R, L}}")]
    InvalidLetter(char),
    #[error("empty word")]
    Empty,
    #[error("matrix must be given as four comma-separated integers a,b,c,d: {0}")]
    MatrixSyntax(String),
}

/// Letters order as `R < L`, which fixes the canonical rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    R,
    L,
}

impl Letter {
    pub fn matrix(self) -> IntMatrix2x2 {
        match self {
            Letter::R => IntMatrix2x2::R,
            Letter::L => IntMatrix2x2::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::R => 'R',
            Letter::L => 'L',
        }
    }
}

impl TryFrom<char> for Letter {
    type Error = WordError;

    fn try_from(ch: char) -> Result<Self, Self::Error> {
        match ch {
            'R' | 'r' => Ok(Letter::R),
            'L' | 'l' => Ok(Letter::L),
            other => Err(WordError::InvalidLetter(other)),
        }
    }
}

/// An element of SL₂(ℤ), stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMatrix2x2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl IntMatrix2x2 {
    pub const IDENTITY: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    pub const R: Self = Self {
        a: 1,
        b: 1,
        c: 0,
        d: 1,
    };
    pub const L: Self = Self {
        a: 1,
        b: 0,
        c: 1,
        d: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, WordError> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(WordError::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, WordError> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64, WordError> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(WordError::Overflow)
        };
        Ok(Self {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl fmt::Display for IntMatrix2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for IntMatrix2x2 {
    type Err = WordError;

    /// Parses the row-major form `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| WordError::MatrixSyntax(s.to_string()))?;
        match parts[..] {
            [a, b, c, d] => Self::new(a, b, c, d),
            _ => Err(WordError::MatrixSyntax(s.to_string())),
        }
    }
}

impl Serialize for IntMatrix2x2 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix2x2 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [[a, b], [c, d]] = <[[i64; 2]; 2]>::deserialize(deserializer)?;
        Self::new(a, b, c, d).map_err(serde::de::Error::custom)
    }
}

/// Ordered product of arbitrary letters (no pseudo-Anosov requirement).
pub fn letters_to_matrix(letters: &[Letter]) -> Result<IntMatrix2x2, WordError> {
    letters.iter().try_fold(IntMatrix2x2::IDENTITY, |acc, l| {
        acc.checked_mul(&l.matrix())
    })
}

pub fn is_pseudo_anosov(m: &IntMatrix2x2) -> bool {
    m.trace().abs() > 2
}

/// A nonempty LR-word containing both letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MappingClassWord {
    letters: Vec<Letter>,
}

impl MappingClassWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        if !letters.contains(&Letter::R) || !letters.contains(&Letter::L) {
            let trace = letters_to_matrix(&letters)?.trace();
            return Err(WordError::NotPseudoAnosov { trace });
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_matrix(&self) -> Result<IntMatrix2x2, WordError> {
        letters_to_matrix(&self.letters)
    }

    /// The word `A_{k+1}⋯A_n A_1⋯A_k`.
    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.rotate_left(k % self.letters.len());
        Self { letters }
    }

    pub fn rotations(&self) -> impl Iterator<Item = MappingClassWord> + '_ {
        (0..self.len()).map(|k| self.rotate(k))
    }
}

impl fmt::Display for MappingClassWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters
            .iter()
            .try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl FromStr for MappingClassWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .trim()
            .chars()
            .map(Letter::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }
}

impl Serialize for MappingClassWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MappingClassWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn word_to_matrix(word: &MappingClassWord) -> Result<IntMatrix2x2, WordError> {
    word.to_matrix()
}

/// Lexicographically least rotation (`R < L`).
pub fn cyclic_normalize(word: &MappingClassWord) -> MappingClassWord {
    word.rotations()
        .min_by(|x, y| x.letters.cmp(&y.letters))
        .expect("words are nonempty")
}

/// Positive LR-word conjugate to `m`, in canonical cyclic form.
///
/// When `Tr(m) < −2` the word of `−m` is returned; use
/// [`decompose_with_sign`] to learn whether that happened.
pub fn decompose(m: &IntMatrix2x2) -> Result<MappingClassWord, WordError> {
    decompose_with_sign(m).map(|(w, _)| w)
}

/// Like [`decompose`], also reporting whether `−m` was decomposed.
pub fn decompose_with_sign(m: &IntMatrix2x2) -> Result<(MappingClassWord, bool), WordError> {
    let trace = m.trace();
    if trace.abs() <= 2 {
        return Err(WordError::NotPseudoAnosov { trace });
    }
    let negated = trace < 0;
    let m = if negated { m.neg() } else { *m };
    let primitive = decompose_positive(&m)?;
    // The fixed point only sees the primitive root; recover the power from the trace.
    let mut letters = primitive.letters().to_vec();
    loop {
        let t = letters_to_matrix(&letters)?.trace();
        if t == m.trace() {
            break;
        }
        if t > m.trace() {
            return Err(WordError::Overflow);
        }
        letters.extend_from_slice(primitive.letters());
    }
    let word = MappingClassWord::new(letters)?;
    Ok((cyclic_normalize(&word), negated))
}

/// The attracting fixed point `α = (a − d + √D) / 2c` of `z ↦ (az+b)/(cz+d)`
/// has an eventually periodic continued fraction whose period, read as
/// alternating powers of `R` and `L`, spells the conjugacy class. A positive
/// word `R^{a₁}L^{b₁}⋯` fixes `[a₁; b₁, a₂, …]`; the parity of the index where
/// the period starts decides whether the first quotient belongs to `R` or `L`
/// (odd-index complete quotients come from an orientation-reversing change of
/// variable, which swaps the letters).
fn decompose_positive(m: &IntMatrix2x2) -> Result<MappingClassWord, WordError> {
    let [[a, b], [c, d]] = m.entries();
    let t = (a + d) as i128;
    let disc = t * t - 4;
    let root = isqrt(disc);
    // c = 0 forces trace ±2, excluded above.
    let mut p = (a - d) as i128;
    let mut q = 2 * c as i128;
    debug_assert_eq!((disc - p * p) % q, 0);
    let _ = b;

    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut quotients: Vec<i128> = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p, q)) {
            let mut period: Vec<i128> = quotients[start..].to_vec();
            if period.len() % 2 == 1 {
                period.extend_from_within(..);
            }
            let first = if start % 2 == 0 { Letter::R } else { Letter::L };
            return period_to_word(&period, first);
        }
        seen.insert((p, q), quotients.len());
        let quotient = if q > 0 {
            (p + root).div_euclid(q)
        } else {
            floor_div(p + root + 1, q)
        };
        quotients.push(quotient);
        let next_p = quotient
            .checked_mul(q)
            .and_then(|x| x.checked_sub(p))
            .ok_or(WordError::Overflow)?;
        let next_q = (disc - next_p * next_p) / q;
        p = next_p;
        q = next_q;
        if quotients.len() > 1_000_000 {
            return Err(WordError::Overflow);
        }
    }
}

fn period_to_word(period: &[i128], first: Letter) -> Result<MappingClassWord, WordError> {
    let second = match first {
        Letter::R => Letter::L,
        Letter::L => Letter::R,
    };
    let mut letters = Vec::new();
    for (i, &count) in period.iter().enumerate() {
        let letter = if i % 2 == 0 { first } else { second };
        let count = usize::try_from(count).map_err(|_| WordError::Overflow)?;
        letters.extend(std::iter::repeat_n(letter, count));
    }
    MappingClassWord::new(letters)
}

fn floor_div(x: i128, y: i128) -> i128 {
    let q = x / y;
    if (x % y != 0) && ((x < 0) != (y < 0)) {
        q - 1
    } else {
        q
    }
}

fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
