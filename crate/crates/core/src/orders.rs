//! The ordered set of complementary intervals of the middle-third Cantor set.
//!
//! Component `I(n,k)` is the `k`-th (left to right) open interval of length
//! `3^-n` removed at stage `n`. The components form a complete binary search
//! tree under the left-to-right order: the children of `I(n,k)` are
//! `I(n+1, 2k-1)` and `I(n+1, 2k)`. Enumerating the tree breadth first gives
//! the bijection `theta(m) = I(n,k)` with `m = 2^(n-1) + k - 1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rearrange::Bijection;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CantorComponent {
    level: u32,
    slot: BigUint,
}

impl CantorComponent {
    pub fn new(level: u32, slot: BigUint) -> Result<Self> {
        if level == 0 {
            return Err(Error::malformed("component level must be positive"));
        }
        let max = BigUint::one() << (level - 1);
        if slot.is_zero() || slot > max {
            return Err(Error::malformed(format!("slot {slot} out of range for level {level}")));
        }
        Ok(CantorComponent { level, slot })
    }

    pub fn root() -> Self {
        CantorComponent {
            level: 1,
            slot: BigUint::one(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn slot(&self) -> &BigUint {
        &self.slot
    }

    pub fn left_child(&self) -> Self {
        CantorComponent {
            level: self.level + 1,
            slot: (&self.slot << 1u32) - 1u32,
        }
    }

    pub fn right_child(&self) -> Self {
        CantorComponent {
            level: self.level + 1,
            slot: &self.slot << 1u32,
        }
    }

    /// Numerator of the left endpoint over the denominator `3^level`.
    fn lo_numerator(&self) -> BigUint {
        // binary digits of slot-1 pick the left (0) or right (2) third at each stage
        let path = &self.slot - 1u32;
        let mut num = BigUint::zero();
        for i in (0..self.level - 1).rev() {
            num *= 3u32;
            if path.bit(u64::from(i)) {
                num += 2u32;
            }
        }
        num * 3u32 + 1u32
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(3u32).pow(self.level)
    }

    /// Exact endpoints `(lo, hi)`, with `hi - lo = 3^-level`.
    pub fn endpoints(&self) -> (BigRational, BigRational) {
        let den = self.denominator();
        let lo = self.lo_numerator();
        let hi = &lo + 1u32;
        (
            Ratio::new(lo.into(), den.clone().into()),
            Ratio::new(hi.into(), den.into()),
        )
    }

    pub fn width(&self) -> BigRational {
        let (lo, hi) = self.endpoints();
        hi - lo
    }

    /// Position `m` with `theta(m) == self`.
    pub fn theta_index(&self) -> BigUint {
        (BigUint::one() << (self.level - 1)) + &self.slot - 1u32
    }

    pub fn theta_index_u64(&self) -> Option<u64> {
        self.theta_index().to_u64()
    }
}

impl Ord for CantorComponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // lo_a / 3^a  vs  lo_b / 3^b ; disjoint intervals so left endpoints decide
        let a = self.lo_numerator() * other.denominator();
        let b = other.lo_numerator() * self.denominator();
        a.cmp(&b)
    }
}

impl PartialOrd for CantorComponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CantorComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.endpoints();
        write!(f, "I({},{}) ({}, {})", self.level, self.slot, lo, hi)
    }
}

pub fn theta(m: u64) -> CantorComponent {
    theta_big(&BigUint::from(m))
}

pub fn theta_big(m: &BigUint) -> CantorComponent {
    assert!(!m.is_zero(), "theta is defined on positive integers");
    let level = m.bits() as u32;
    let slot = m - (BigUint::one() << (level - 1)) + 1u32;
    CantorComponent { level, slot }
}

pub fn theta_inv(c: &CantorComponent) -> BigUint {
    c.theta_index()
}

/// Order of `theta(m1)` and `theta(m2)` in the Cantor component order.
pub fn compare(m1: u64, m2: u64) -> Ordering {
    theta(m1).cmp(&theta(m2))
}

/// Countable linear orders that can be embedded into the component order.
///
/// Elements are addressed by their enumeration index `0, 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountableOrderSpec {
    FiniteChain(usize),
    Omega,
    OmegaPlusOmega,
    IntegersZeta,
    Rationals,
    /// `before[i][j]` is true when element `i` precedes element `j`.
    ExplicitFinite(Vec<Vec<bool>>),
}

impl CountableOrderSpec {
    pub fn len(&self) -> Option<usize> {
        match self {
            CountableOrderSpec::FiniteChain(n) => Some(*n),
            CountableOrderSpec::ExplicitFinite(rel) => Some(rel.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Checks that an explicit comparator is a strict total order.
    pub fn validate(&self) -> Result<()> {
        let CountableOrderSpec::ExplicitFinite(rel) = self else {
            return Ok(());
        };
        let n = rel.len();
        if rel.iter().any(|row| row.len() != n) {
            return Err(Error::malformed("comparator matrix is not square"));
        }
        for i in 0..n {
            if rel[i][i] {
                return Err(Error::malformed(format!("comparator is not irreflexive at {i}")));
            }
            for j in 0..n {
                if i != j && rel[i][j] == rel[j][i] {
                    return Err(Error::malformed(format!("elements {i} and {j} are not strictly comparable")));
                }
                for k in 0..n {
                    if rel[i][j] && rel[j][k] && !rel[i][k] {
                        return Err(Error::malformed(format!("comparator not transitive on {i},{j},{k}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn cmp_elements(&self, i: usize, j: usize) -> Ordering {
        match self {
            CountableOrderSpec::FiniteChain(_) | CountableOrderSpec::Omega => i.cmp(&j),
            CountableOrderSpec::OmegaPlusOmega => (i % 2, i / 2).cmp(&(j % 2, j / 2)),
            CountableOrderSpec::IntegersZeta => zeta_value(i).cmp(&zeta_value(j)),
            CountableOrderSpec::Rationals => rational_value(i).cmp(&rational_value(j)),
            CountableOrderSpec::ExplicitFinite(rel) => {
                if i == j {
                    Ordering::Equal
                } else if rel[i][j] {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }
}

/// `0, 1, -1, 2, -2, ...`
pub fn zeta_value(i: usize) -> i64 {
    let i = i as i64;
    if i % 2 == 1 {
        (i + 1) / 2
    } else {
        -(i / 2)
    }
}

/// `0, q1, -q1, q2, -q2, ...` with `q_j` the Calkin-Wilf enumeration of the positive rationals.
pub fn rational_value(i: usize) -> Ratio<i64> {
    if i == 0 {
        return Ratio::zero();
    }
    let j = (i as u64).div_ceil(2);
    let q = Ratio::new(fusc(j) as i64, fusc(j + 1) as i64);
    if i % 2 == 1 {
        q
    } else {
        -q
    }
}

// Stern's diatomic sequence.
fn fusc(mut n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    while n > 0 {
        if n.is_odd() {
            b += a;
        } else {
            a += b;
        }
        n /= 2;
    }
    b
}

/// Lazily computed order embedding of a countable order into the component order.
///
/// Element `i` is mapped after elements `0..i`: it goes to the component of
/// least level (then least slot) strictly between the images of its nearest
/// already-mapped neighbours. Holds memo state; use from one thread at a time.
#[derive(Debug, Clone)]
pub struct OrderEmbedding {
    source: CountableOrderSpec,
    images: Vec<CantorComponent>,
}

impl OrderEmbedding {
    pub fn source(&self) -> &CountableOrderSpec {
        &self.source
    }

    pub fn image(&mut self, i: usize) -> Option<CantorComponent> {
        if let Some(len) = self.source.len() {
            if i >= len {
                return None;
            }
        }
        while self.images.len() <= i {
            let next = self.place(self.images.len());
            self.images.push(next);
        }
        Some(self.images[i].clone())
    }

    /// Images of the first `count` elements (fewer for a shorter finite source).
    pub fn images(&mut self, count: usize) -> Vec<CantorComponent> {
        let count = self.source.len().map_or(count, |len| len.min(count));
        if count > 0 {
            self.image(count - 1);
        }
        self.images[..count].to_vec()
    }

    fn place(&self, i: usize) -> CantorComponent {
        let mut below: Option<usize> = None;
        let mut above: Option<usize> = None;
        for j in 0..i {
            match self.source.cmp_elements(j, i) {
                Ordering::Less => {
                    if below.is_none_or(|b| self.source.cmp_elements(b, j) == Ordering::Less) {
                        below = Some(j);
                    }
                }
                Ordering::Greater => {
                    if above.is_none_or(|a| self.source.cmp_elements(j, a) == Ordering::Less) {
                        above = Some(j);
                    }
                }
                Ordering::Equal => unreachable!("enumeration repeats an element"),
            }
        }
        let lower = below.map(|j| &self.images[j]);
        let upper = above.map(|j| &self.images[j]);
        shallowest_between(lower, upper)
    }
}

/// The component of least level strictly between `lower` and `upper`.
pub fn shallowest_between(
    lower: Option<&CantorComponent>,
    upper: Option<&CantorComponent>,
) -> CantorComponent {
    let mut node = CantorComponent::root();
    loop {
        if lower.is_some_and(|l| node <= *l) {
            node = node.right_child();
        } else if upper.is_some_and(|u| node >= *u) {
            node = node.left_child();
        } else {
            return node;
        }
    }
}

pub fn back_and_forth_embed(src: CountableOrderSpec) -> Result<OrderEmbedding> {
    src.validate()?;
    Ok(OrderEmbedding {
        source: src,
        images: Vec::new(),
    })
}

/// A bijection `Psi` of the component order extending a bijection between two
/// finite embedded orders, with the induced bijection `phi = theta^-1 Psi theta`
/// of the positive integers.
#[derive(Debug, Clone)]
pub struct ExtendedBijection {
    forward: HashMap<u64, u64>,
    source_marks: Vec<u64>,
    target_marks: Vec<u64>,
}

impl ExtendedBijection {
    /// `phi(n)`: images of `mu` go where `psi` says; the remaining indices are
    /// matched in increasing order.
    pub fn phi(&self, n: u64) -> u64 {
        assert!(n >= 1, "phi is defined on positive integers");
        if let Some(&m) = self.forward.get(&n) {
            return m;
        }
        let rank = n - self.source_marks.partition_point(|&x| x < n) as u64;
        let mut m = rank;
        for &x in &self.target_marks {
            if x <= m {
                m += 1;
            } else {
                break;
            }
        }
        m
    }

    pub fn psi_component(&self, c: &CantorComponent) -> CantorComponent {
        let n = c
            .theta_index_u64()
            .expect("component index exceeds u64; extended bijections are finite-support");
        theta(self.phi(n))
    }
}

impl Bijection for ExtendedBijection {
    fn apply(&self, k: u64) -> u64 {
        self.phi(k)
    }
}

/// Extends `psi` (a bijection from the elements of `mu`'s source onto those of
/// `nu`'s source) to a bijection `Psi` with `Psi . mu = nu . psi`.
///
/// Both sources must be finite.
pub fn extend_bijection(
    mu: &mut OrderEmbedding,
    nu: &mut OrderEmbedding,
    psi: &[usize],
) -> Result<ExtendedBijection> {
    let (Some(len_mu), Some(len_nu)) = (mu.source.len(), nu.source.len()) else {
        return Err(Error::malformed("extend_bijection needs finite sources"));
    };
    if len_mu != len_nu || psi.len() != len_mu {
        return Err(Error::NotBijective(format!(
            "psi has {} entries for sources of sizes {len_mu} and {len_nu}",
            psi.len()
        )));
    }
    let mut seen = vec![false; len_nu];
    for &j in psi {
        if j >= len_nu || std::mem::replace(&mut seen[j], true) {
            return Err(Error::NotBijective(format!("psi is not a permutation: {psi:?}")));
        }
    }
    let index = |c: &CantorComponent| {
        c.theta_index_u64()
            .ok_or_else(|| Error::SizeBound(format!("component {c} has no u64 index")))
    };
    let mu_images = mu.images(len_mu);
    let nu_images = nu.images(len_nu);
    let mut forward = HashMap::new();
    for (i, c) in mu_images.iter().enumerate() {
        forward.insert(index(c)?, index(&nu_images[psi[i]])?);
    }
    let mut source_marks: Vec<u64> = forward.keys().copied().collect();
    let mut target_marks: Vec<u64> = forward.values().copied().collect();
    source_marks.sort_unstable();
    target_marks.sort_unstable();
    Ok(ExtendedBijection {
        forward,
        source_marks,
        target_marks,
    })
}
