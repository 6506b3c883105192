//! Freely reduced words in the free groups `F_n` on letters `l1, l2, ...`.
//!
//! Words are stored run-length encoded: a list of syllables `l_i^e` with
//! `e != 0` and no two adjacent syllables on the same letter.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub letter: u32,
    pub exp: i64,
}

impl Syllable {
    pub fn new(letter: u32, exp: i64) -> Self {
        Syllable { letter, exp }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    syllables: Vec<Syllable>,
}

/// A commutator `[a, b] = a b a^-1 b^-1`, kept as its two entries.
pub type CommutatorPair = (ReducedWord, ReducedWord);

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    pub fn letter(letter: u32) -> Self {
        Self::power(letter, 1)
    }

    pub fn power(letter: u32, exp: i64) -> Self {
        let mut w = ReducedWord::identity();
        w.push(letter, exp);
        w
    }

    /// Freely reduces a raw syllable list. Letter indices must be positive.
    pub fn reduce<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut w = ReducedWord::identity();
        for (letter, exp) in raw {
            if letter <= 0 || letter > u32::MAX as i64 {
                return Err(Error::malformed(format!("letter index {letter} is not positive")));
            }
            w.push(letter as u32, exp);
        }
        Ok(w)
    }

    /// Appends `letter^exp`, merging or cancelling with the last syllable.
    pub fn push(&mut self, letter: u32, exp: i64) {
        debug_assert!(letter > 0);
        if exp == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some(last) if last.letter == letter => {
                last.exp += exp;
                if last.exp == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push(Syllable { letter, exp }),
        }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    pub fn max_letter(&self) -> Option<u32> {
        self.syllables.iter().map(|s| s.letter).max()
    }

    pub fn min_letter(&self) -> Option<u32> {
        self.syllables.iter().map(|s| s.letter).min()
    }

    pub fn concat(&self, other: &ReducedWord) -> ReducedWord {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// In-place right multiplication.
    pub fn extend(&mut self, other: &ReducedWord) {
        for s in &other.syllables {
            self.push(s.letter, s.exp);
        }
    }

    pub fn invert(&self) -> ReducedWord {
        ReducedWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable::new(s.letter, -s.exp))
                .collect(),
        }
    }

    pub fn conjugate_by(&self, g: &ReducedWord) -> ReducedWord {
        g.concat(self).concat(&g.invert())
    }

    /// Image under `F_m -> F_n`: every letter above `n` is deleted.
    pub fn delete_above(&self, n: u32) -> ReducedWord {
        self.retain_letters(|l| l <= n)
    }

    pub fn retain_letters(&self, keep: impl Fn(u32) -> bool) -> ReducedWord {
        let mut out = ReducedWord::identity();
        for s in self.syllables.iter().filter(|s| keep(s.letter)) {
            out.push(s.letter, s.exp);
        }
        out
    }

    /// Applies `letter -> f(letter)` syllable by syllable and reduces.
    pub fn map_letters(&self, f: impl Fn(u32) -> u32) -> ReducedWord {
        let mut out = ReducedWord::identity();
        for s in &self.syllables {
            out.push(f(s.letter), s.exp);
        }
        out
    }

    pub fn exponent_sum(&self, letter: u32) -> i64 {
        self.syllables
            .iter()
            .filter(|s| s.letter == letter)
            .map(|s| s.exp)
            .sum()
    }

    /// Letters with a nonzero exponent sum, with that sum, in increasing letter order.
    pub fn nonzero_exponent_sums(&self) -> Vec<(u32, i64)> {
        let mut letters: Vec<u32> = self.syllables.iter().map(|s| s.letter).collect();
        letters.sort_unstable();
        letters.dedup();
        letters
            .into_iter()
            .map(|l| (l, self.exponent_sum(l)))
            .filter(|&(_, s)| s != 0)
            .collect()
    }

    pub fn in_commutator_subgroup(&self) -> bool {
        self.nonzero_exponent_sums().is_empty()
    }
}

pub fn commutator(a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
    a.concat(b).concat(&a.invert()).concat(&b.invert())
}

/// Reduced product of the commutators in order.
pub fn assemble(pairs: &[CommutatorPair]) -> ReducedWord {
    let mut out = ReducedWord::identity();
    for (a, b) in pairs {
        out.extend(&commutator(a, b));
    }
    out
}

/// Splits off every syllable of `letter` from `w`.
///
/// Writing `w = u0 x^e1 u1 x^e2 ... x^er ur` with the `u`s free of `x`, and
/// `p_i = u0 ... u(i-1)`, `E_i = e1 + ... + ei`, the returned pairs and
/// remainder satisfy
///
/// `w = prod_i [x^-e_i, x^E_i p_i x^-E_i] * (u0 u1 ... ur)`
///
/// which requires the total exponent of `x` to be zero. At most one
/// commutator is emitted per `x` syllable.
pub fn peel_letter(w: &ReducedWord, letter: u32) -> Result<(Vec<CommutatorPair>, ReducedWord)> {
    let sum = w.exponent_sum(letter);
    if sum != 0 {
        return Err(Error::NotInCommutatorSubgroup { letter, sum });
    }
    let mut pairs = Vec::new();
    let mut prefix = ReducedWord::identity();
    let mut running = 0i64;
    for s in &w.syllables {
        if s.letter != letter {
            prefix.push(s.letter, s.exp);
            continue;
        }
        running += s.exp;
        if prefix.is_identity() {
            continue;
        }
        let a = ReducedWord::power(letter, -s.exp);
        let b = prefix.conjugate_by(&ReducedWord::power(letter, running));
        pairs.push((a, b));
    }
    Ok((pairs, prefix))
}

/// Writes an element of `[F, F]` as a product of commutators.
///
/// Letters are peeled off lowest index first (see [`peel_letter`]); the
/// number of commutators never exceeds the syllable count of `w`.
pub fn commutator_decompose(w: &ReducedWord) -> Result<Vec<CommutatorPair>> {
    if let Some(&(letter, sum)) = w.nonzero_exponent_sums().first() {
        return Err(Error::NotInCommutatorSubgroup { letter, sum });
    }
    let mut pairs = Vec::new();
    let mut rest = w.clone();
    while let Some(x) = rest.min_letter() {
        let (block, remainder) = peel_letter(&rest, x)?;
        pairs.extend(block);
        rest = remainder;
    }
    Ok(pairs)
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if s.exp == 1 {
                write!(f, "l{}", s.letter)?;
            } else {
                write!(f, "l{}^{}", s.letter, s.exp)?;
            }
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed == "1" {
            return Ok(ReducedWord::identity());
        }
        let mut raw = Vec::new();
        for token in trimmed.split_whitespace() {
            let body = token
                .strip_prefix('l')
                .ok_or_else(|| Error::malformed(format!("syllable `{token}` must start with `l`")))?;
            let (index, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e),
                None => (body, "1"),
            };
            let index: i64 = index
                .parse()
                .map_err(|_| Error::malformed(format!("bad letter index in `{token}`")))?;
            let exp: i64 = exp
                .parse()
                .map_err(|_| Error::malformed(format!("bad exponent in `{token}`")))?;
            raw.push((index, exp));
        }
        ReducedWord::reduce(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        let r = ReducedWord::reduce([(1, 1), (2, 1), (2, -1), (3, 1)]).unwrap();
        assert_eq!(r, w("l1 l3"));
        assert!(ReducedWord::reduce([]).unwrap().is_identity());
        assert_eq!(ReducedWord::reduce([(1, 1), (1, 1)]).unwrap(), w("l1^2"));
    }

    #[test]
    fn reduce_rejects_nonpositive_letters() {
        assert!(matches!(ReducedWord::reduce([(0, 1)]), Err(Error::Malformed(_))));
        assert!(matches!(ReducedWord::reduce([(2, 1), (-3, 1)]), Err(Error::Malformed(_))));
    }

    #[test]
    fn group_operations() {
        assert!(w("l1").concat(&w("l1^-1")).is_identity());
        assert_eq!(w("l1 l2").invert(), w("l2^-1 l1^-1"));
        assert_eq!(w("l1 l2").concat(&w("l2 l3")), w("l1 l2^2 l3"));
    }

    #[test]
    fn delete_above_examples() {
        assert_eq!(w("l1 l3 l2 l3^-1").delete_above(2), w("l1 l2"));
        assert_eq!(w("l2 l1 l2^-1").delete_above(1), w("l1"));
        assert!(w("l3 l1 l3^-1 l1^-1").delete_above(2).is_identity());
    }

    #[test]
    fn exponent_sum_examples() {
        assert_eq!(w("l1 l2 l1^-1 l2^-1").exponent_sum(1), 0);
        assert_eq!(w("l1^2").exponent_sum(1), 2);
        assert_eq!(w("l1 l2").exponent_sum(3), 0);
    }

    #[test]
    fn commutator_decompose_examples() {
        let c = commutator_decompose(&w("l1 l2 l1^-1 l2^-1")).unwrap();
        assert_eq!(c, vec![(w("l1"), w("l2"))]);
        assert!(commutator_decompose(&ReducedWord::identity()).unwrap().is_empty());

        let input = w("l1 l2 l1 l2^-1 l1^-2");
        let c = commutator_decompose(&input).unwrap();
        assert_eq!(assemble(&c), input);
        assert!(c.len() <= input.syllable_count());
    }

    #[test]
    fn commutator_decompose_rejects_nonzero_sums() {
        assert_eq!(
            commutator_decompose(&w("l2 l1^2 l2^-1")),
            Err(Error::NotInCommutatorSubgroup { letter: 1, sum: 2 })
        );
    }

    #[test]
    fn peel_letter_keeps_remainder_free_of_letter() {
        let input = w("l2 l1 l3 l1^-1 l2^-1 l3^-1");
        let (pairs, rest) = peel_letter(&input, 1).unwrap();
        assert_eq!(rest.exponent_sum(1), 0);
        assert!(rest.syllables().iter().all(|s| s.letter != 1));
        assert_eq!(assemble(&pairs).concat(&rest), input);
    }

    #[test]
    fn text_form() {
        assert_eq!(w("l1 l2^-1 l3^2").to_string(), "l1 l2^-1 l3^2");
        assert_eq!(ReducedWord::identity().to_string(), "1");
        assert_eq!(w("1"), ReducedWord::identity());
        assert!("x1".parse::<ReducedWord>().is_err());
        assert!("l1^a".parse::<ReducedWord>().is_err());
    }
}
