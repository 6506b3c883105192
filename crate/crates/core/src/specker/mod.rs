//! Eventually periodic elements of the Specker group `Z^N` and the quotient
//! computations built on them.

mod smith;

pub use smith::{
    determinant, h1_from_presentation, smith_normal_form, CokernelCoordinate, H1Group, PresentationMatrix,
    SmithForm,
};

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// An integer sequence `prefix ++ cycle ++ cycle ++ ...`, coordinates numbered from 1.
///
/// Always canonical: the cycle is primitive and the prefix cannot be
/// shortened by rotating the cycle, so equal sequences have equal fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpeckerVector {
    prefix: Vec<i64>,
    cycle: Vec<i64>,
}

impl SpeckerVector {
    pub fn new(prefix: Vec<i64>, cycle: Vec<i64>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::malformed("the periodic part must be nonempty"));
        }
        Ok(Self::canonical(prefix, cycle))
    }

    fn canonical(mut prefix: Vec<i64>, mut cycle: Vec<i64>) -> Self {
        let len = cycle.len();
        if let Some(d) = (1..len)
            .filter(|&d| len.is_multiple_of(d))
            .find(|&d| (d..len).all(|i| cycle[i] == cycle[i - d]))
        {
            cycle.truncate(d);
        }
        while let (Some(&p), Some(&c)) = (prefix.last(), cycle.last()) {
            if p != c {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        SpeckerVector { prefix, cycle }
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn constant(c: i64) -> Self {
        SpeckerVector {
            prefix: Vec::new(),
            cycle: vec![c],
        }
    }

    pub fn all_ones() -> Self {
        Self::constant(1)
    }

    /// Unit vector `e_n`.
    pub fn unit(n: usize) -> Self {
        Self::finite(&Self::unit_prefix(n, 1))
    }

    fn unit_prefix(n: usize, value: i64) -> Vec<i64> {
        assert!(n >= 1, "coordinates are numbered from 1");
        let mut prefix = vec![0; n];
        prefix[n - 1] = value;
        prefix
    }

    /// Finitely supported vector with the given leading coordinates.
    pub fn finite(coords: &[i64]) -> Self {
        Self::canonical(coords.to_vec(), vec![0])
    }

    /// `a_n = (1,1,1,...) - e_1 - ... - e_(n-1)`: zeros before coordinate `n`, ones from there on.
    pub fn tail_ones(n: usize) -> Self {
        assert!(n >= 1, "coordinates are numbered from 1");
        Self::canonical(vec![0; n - 1], vec![1])
    }

    /// Sequence with value `value` at `start, start + step, start + 2 step, ...` and 0 elsewhere.
    pub fn progression(start: usize, step: usize, value: i64) -> Self {
        assert!(start >= 1 && step >= 1);
        let mut cycle = vec![0; step];
        cycle[0] = value;
        Self::canonical(vec![0; start - 1], cycle)
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[i64] {
        &self.cycle
    }

    fn at(&self, i: usize) -> i64 {
        match self.prefix.get(i) {
            Some(&v) => v,
            None => self.cycle[(i - self.prefix.len()) % self.cycle.len()],
        }
    }

    /// Coordinate `n`, numbered from 1.
    pub fn coord(&self, n: usize) -> i64 {
        assert!(n >= 1, "coordinates are numbered from 1");
        self.at(n - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.cycle == [0]
    }

    pub fn has_finite_support(&self) -> bool {
        self.cycle == [0]
    }

    /// Sum of all coordinates, when the support is finite.
    pub fn finite_sum(&self) -> Option<i64> {
        self.has_finite_support().then(|| self.prefix.iter().sum())
    }

    /// Coordinatewise combination; the result has period `lcm` of the inputs.
    pub fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        let start = self.prefix.len().max(other.prefix.len());
        let period = self.cycle.len().lcm(&other.cycle.len());
        let prefix = (0..start).map(|i| f(self.at(i), other.at(i))).collect();
        let cycle = (start..start + period)
            .map(|i| f(self.at(i), other.at(i)))
            .collect();
        Self::canonical(prefix, cycle)
    }

    /// Keeps coordinates whose index satisfies `keep`, zeroing the rest; `keep`
    /// must only depend on the index modulo `modulus`.
    fn mask(&self, modulus: usize, keep: impl Fn(usize) -> bool) -> Self {
        let start = self.prefix.len();
        let period = self.cycle.len().lcm(&modulus);
        let pick = |i: usize| if keep(i + 1) { self.at(i) } else { 0 };
        Self::canonical(
            (0..start).map(pick).collect(),
            (start..start + period).map(pick).collect(),
        )
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::canonical(
            self.prefix.iter().map(|v| v * k).collect(),
            self.cycle.iter().map(|v| v * k).collect(),
        )
    }

    /// Length of prefix plus cycle: every coordinate is determined by the first this many.
    pub fn description_len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }
}

impl Add for &SpeckerVector {
    type Output = SpeckerVector;
    fn add(self, rhs: &SpeckerVector) -> SpeckerVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpeckerVector {
    type Output = SpeckerVector;
    fn sub(self, rhs: &SpeckerVector) -> SpeckerVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &SpeckerVector {
    type Output = SpeckerVector;
    fn neg(self) -> SpeckerVector {
        self.scale(-1)
    }
}

impl Add for SpeckerVector {
    type Output = SpeckerVector;
    fn add(self, rhs: SpeckerVector) -> SpeckerVector {
        &self + &rhs
    }
}

impl Sub for SpeckerVector {
    type Output = SpeckerVector;
    fn sub(self, rhs: SpeckerVector) -> SpeckerVector {
        &self - &rhs
    }
}

impl Neg for SpeckerVector {
    type Output = SpeckerVector;
    fn neg(self) -> SpeckerVector {
        -&self
    }
}

impl std::iter::Sum for SpeckerVector {
    fn sum<I: Iterator<Item = SpeckerVector>>(iter: I) -> Self {
        iter.fold(SpeckerVector::zero(), |acc, v| &acc + &v)
    }
}

/// Equality in `Z^N / (direct sum of Z)`: the difference has finite support.
pub fn finite_support_eq(v: &SpeckerVector, w: &SpeckerVector) -> bool {
    (v - w).has_finite_support()
}

/// Equality modulo `N = <e_n - e_(n+1)>`: the difference has finite support
/// and coordinate sum zero.
pub fn ha_eq(v: &SpeckerVector, w: &SpeckerVector) -> bool {
    (v - w).finite_sum() == Some(0)
}

/// Canonical representative of the class of `v` modulo `N = <e_n - e_(n+1)>`:
/// the purely periodic vector eventually equal to `v`, plus `s * e_1` where
/// `s` is the sum of the finitely many coordinates where the two differ.
pub fn ha_representative(v: &SpeckerVector) -> SpeckerVector {
    let p = v.prefix.len();
    let len = v.cycle.len();
    let periodic = SpeckerVector::canonical(Vec::new(), (0..len).map(|i| v.cycle[(i + len - p % len) % len]).collect());
    let s: i64 = (0..p).map(|i| v.at(i) - periodic.at(i)).sum();
    &periodic + &SpeckerVector::unit(1).scale(s)
}

/// Inverse of [`difference_map`] on sequences whose partial sums stay eventually
/// periodic, i.e. whose cycle sums to zero.
pub fn partial_sums(v: &SpeckerVector) -> Option<SpeckerVector> {
    if v.cycle.iter().sum::<i64>() != 0 {
        return None;
    }
    let start = v.prefix.len();
    let mut running = 0;
    let mut sums = (0..start + v.cycle.len()).map(|i| {
        running += v.at(i);
        running
    });
    let prefix: Vec<i64> = sums.by_ref().take(start).collect();
    Some(SpeckerVector::canonical(prefix, sums.collect()))
}

/// Coefficients `c_1, c_2, ...` with `v = sum c_n (e_n - e_(n+1))`, when `v` lies in `N`.
pub fn consecutive_difference_coefficients(v: &SpeckerVector) -> Option<Vec<i64>> {
    if v.finite_sum()? != 0 {
        return None;
    }
    let mut running = 0;
    Some(
        v.prefix()
            .iter()
            .map(|x| {
                running += x;
                running
            })
            .collect(),
    )
}

/// `(a1, a2, a3, ...) -> (a1, a2 - a1, a3 - a2, ...)`.
pub fn difference_map(v: &SpeckerVector) -> SpeckerVector {
    let start = v.prefix.len() + 1;
    let diff = |i: usize| if i == 0 { v.at(0) } else { v.at(i) - v.at(i - 1) };
    SpeckerVector::canonical(
        (0..start).map(diff).collect(),
        (start..start + v.cycle.len()).map(diff).collect(),
    )
}

/// Image in a quotient that is always trivial, with the splitting of the
/// input into its odd-indexed and even-indexed parts as certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GriffithsImage {
    pub odd: SpeckerVector,
    pub even: SpeckerVector,
}

impl GriffithsImage {
    pub fn is_trivial(&self) -> bool {
        true
    }

    pub fn reassemble(&self) -> SpeckerVector {
        &self.odd + &self.even
    }
}

pub fn griffiths_image(v: &SpeckerVector) -> GriffithsImage {
    GriffithsImage {
        odd: v.mask(2, |n| n % 2 == 1),
        even: v.mask(2, |n| n % 2 == 0),
    }
}

fn join(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for SpeckerVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", join(&self.prefix), join(&self.cycle))
    }
}

impl FromStr for SpeckerVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (prefix, cycle) = s
            .split_once(';')
            .ok_or_else(|| Error::malformed(format!("vector `{s}` needs the form `prefix; cycle`")))?;
        let ints = |part: &str| -> Result<Vec<i64>> {
            part.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::malformed(format!("bad integer `{t}`"))))
                .collect()
        };
        SpeckerVector::new(ints(prefix)?, ints(cycle)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SpeckerVector {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(v("1 2 1 2; 1 2 1 2"), v("; 1 2"));
        assert_eq!(v("0 0; 0 0 0"), SpeckerVector::zero());
        assert_eq!(v("5 3; 1 3"), v("5; 3 1"));
        assert!(SpeckerVector::new(vec![1], vec![]).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        assert!((SpeckerVector::all_ones() + SpeckerVector::constant(-1)).is_zero());
        let twice = SpeckerVector::unit(2) + SpeckerVector::unit(2);
        assert_eq!(twice, SpeckerVector::finite(&[0, 2]));
        let a3 = SpeckerVector::all_ones() - SpeckerVector::unit(1) - SpeckerVector::unit(2);
        assert_eq!(a3, v("0 0; 1"));
        assert_eq!(a3, SpeckerVector::tail_ones(3));
        let mixed = v("1; 1 2") + v("; 0 0 5");
        assert_eq!(mixed.cycle().len(), 6);
    }

    #[test]
    fn finite_support_examples() {
        let ones = SpeckerVector::all_ones();
        assert!(finite_support_eq(&ones, &(&ones + &SpeckerVector::unit(5))));
        assert!(!finite_support_eq(&ones, &SpeckerVector::zero()));
        for n in 1..20 {
            assert!(finite_support_eq(&SpeckerVector::tail_ones(1), &SpeckerVector::tail_ones(n)));
        }
    }

    #[test]
    fn ha_examples() {
        let e1 = SpeckerVector::unit(1);
        let e2 = SpeckerVector::unit(2);
        assert!(ha_eq(&e1, &e2));
        assert!(!ha_eq(&e1, &e2.scale(2)));
        assert!(ha_eq(&e2, &e2));
    }

    #[test]
    fn ha_representatives() {
        assert!(ha_representative(&(SpeckerVector::unit(1) - SpeckerVector::unit(2))).is_zero());
        assert_eq!(ha_representative(&SpeckerVector::unit(4)), SpeckerVector::unit(1));
        assert_eq!(ha_representative(&v("7; 1 2")), v("7; 1 2"));
        assert_eq!(ha_representative(&v("1 1 1; 0")), v("3; 0"));
        let x = v("3 0; 5 -1 2");
        let r = ha_representative(&x);
        assert!(ha_eq(&x, &r));
        assert!(r.prefix().len() <= 1);
    }

    #[test]
    fn partial_sums_invert_differences() {
        let x = v("3 -1; 2 -2");
        let s = partial_sums(&x).unwrap();
        assert_eq!(s, v("3 2; 4 2"));
        assert_eq!(difference_map(&s), x);
        assert!(partial_sums(&SpeckerVector::all_ones()).is_none());
    }

    #[test]
    fn n_membership_by_telescoping() {
        let x = v("3 -1 0 -4 2; 0");
        let coeffs = consecutive_difference_coefficients(&x).unwrap();
        let rebuilt: SpeckerVector = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (SpeckerVector::unit(i + 1) - SpeckerVector::unit(i + 2)).scale(c))
            .sum();
        assert_eq!(rebuilt, x);
        assert!(consecutive_difference_coefficients(&v("1; 0")).is_none());
    }

    #[test]
    fn difference_map_examples() {
        assert_eq!(difference_map(&SpeckerVector::all_ones()), SpeckerVector::unit(1));
        let x = SpeckerVector::unit(2) - SpeckerVector::unit(3);
        assert_eq!(x.to_string(), "0 1 -1; 0");
        assert_eq!(difference_map(&x), SpeckerVector::finite(&[0, 1, -2, 1]));
        assert!(difference_map(&SpeckerVector::zero()).is_zero());
    }

    #[test]
    fn griffiths_examples() {
        let g = griffiths_image(&SpeckerVector::all_ones());
        assert!(g.is_trivial());
        assert_eq!(g.odd, v("; 1 0"));
        assert_eq!(g.even, v("; 0 1"));
        let e7 = SpeckerVector::unit(7);
        let g = griffiths_image(&e7);
        assert_eq!((g.odd, g.even), (e7, SpeckerVector::zero()));
    }

    #[test]
    fn text_form() {
        assert_eq!(SpeckerVector::all_ones().to_string(), "; 1");
        assert_eq!(v(" ; 1").to_string(), "; 1");
        assert!("1 2 3".parse::<SpeckerVector>().is_err());
        assert!("1 x; 0".parse::<SpeckerVector>().is_err());
    }
}
