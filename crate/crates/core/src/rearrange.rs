//! Finitely described bijections of the positive integers.

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// A bijection of `{1, 2, 3, ...}`.
pub trait Bijection {
    fn apply(&self, k: u64) -> u64;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BijectionSpec {
    /// Disjoint cycles; `[a, b, c]` sends `a -> b -> c -> a`. Everything else is fixed.
    FiniteSupport(Vec<Vec<u64>>),
    /// Permutes each block `{jP+1, ..., jP+P}` by the same residue permutation:
    /// `k -> jP + perm[(k-1) mod P] + 1` with `j = (k-1) div P`.
    BlockPermute { period: u64, perm: Vec<u64> },
    /// Composition, rightmost applied first.
    Compose(Vec<BijectionSpec>),
}

impl BijectionSpec {
    pub fn identity() -> Self {
        BijectionSpec::FiniteSupport(Vec::new())
    }

    pub fn transposition(a: u64, b: u64) -> Self {
        BijectionSpec::FiniteSupport(vec![vec![a, b]])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BijectionSpec::FiniteSupport(cycles) => {
                let mut seen = HashSet::new();
                for cycle in cycles {
                    if cycle.is_empty() {
                        return Err(Error::malformed("empty cycle"));
                    }
                    for &x in cycle {
                        if x == 0 {
                            return Err(Error::malformed("cycle entries must be positive"));
                        }
                        if !seen.insert(x) {
                            return Err(Error::malformed(format!("cycles overlap at {x}")));
                        }
                    }
                }
                Ok(())
            }
            BijectionSpec::BlockPermute { period, perm } => {
                if *period == 0 || perm.len() as u64 != *period {
                    return Err(Error::malformed(format!(
                        "block permutation has {} residues for period {period}",
                        perm.len()
                    )));
                }
                let mut seen = vec![false; perm.len()];
                for &r in perm {
                    if r >= *period || std::mem::replace(&mut seen[r as usize], true) {
                        return Err(Error::malformed(format!("{perm:?} is not a permutation of residues")));
                    }
                }
                Ok(())
            }
            BijectionSpec::Compose(parts) => parts.iter().try_for_each(BijectionSpec::validate),
        }
    }

    pub fn evaluate(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::malformed("bijections act on positive integers"));
        }
        self.validate()?;
        Ok(self.apply(k))
    }

    pub fn inverse(&self) -> BijectionSpec {
        match self {
            BijectionSpec::FiniteSupport(cycles) => BijectionSpec::FiniteSupport(
                cycles
                    .iter()
                    .map(|c| c.iter().rev().copied().collect())
                    .collect(),
            ),
            BijectionSpec::BlockPermute { period, perm } => {
                let mut inv = vec![0; perm.len()];
                for (r, &p) in perm.iter().enumerate() {
                    inv[p as usize] = r as u64;
                }
                BijectionSpec::BlockPermute {
                    period: *period,
                    perm: inv,
                }
            }
            BijectionSpec::Compose(parts) => {
                BijectionSpec::Compose(parts.iter().rev().map(BijectionSpec::inverse).collect())
            }
        }
    }

    /// Largest index moved by a finite-support part; block parts report nothing here.
    pub fn support_bound(&self) -> u64 {
        match self {
            BijectionSpec::FiniteSupport(cycles) => cycles.iter().flatten().copied().max().unwrap_or(0),
            BijectionSpec::BlockPermute { .. } => 0,
            BijectionSpec::Compose(parts) => parts.iter().map(Self::support_bound).max().unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BijectionSpec::FiniteSupport(cycles) => json!({"kind": "finite", "cycles": cycles}),
            BijectionSpec::BlockPermute { period, perm } => {
                json!({"kind": "block", "period": period, "perm": perm})
            }
            BijectionSpec::Compose(parts) => {
                json!({"kind": "compose", "of": parts.iter().map(Self::to_json).collect::<Vec<_>>()})
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        Self::from_json_at(value, "$")
    }

    fn from_json_at(value: &Value, path: &str) -> Result<Self> {
        let bad = |reason: &str| Error::malformed(format!("bijection at {path}: {reason}"));
        let kind = value.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing `kind`"))?;
        let uints = |v: &Value| -> Option<Vec<u64>> { v.as_array()?.iter().map(Value::as_u64).collect() };
        let spec = match kind {
            "finite" => {
                let cycles = value
                    .get("cycles")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("`cycles` must be a list"))?
                    .iter()
                    .map(uints)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad("cycles must hold non-negative integers"))?;
                BijectionSpec::FiniteSupport(cycles)
            }
            "block" => {
                let period = value
                    .get("period")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("`period` must be a non-negative integer"))?;
                let perm = value
                    .get("perm")
                    .and_then(uints)
                    .ok_or_else(|| bad("`perm` must be a list of residues"))?;
                BijectionSpec::BlockPermute { period, perm }
            }
            "compose" => {
                let parts = value.get("of").and_then(Value::as_array).ok_or_else(|| bad("`of` must be a list"))?;
                BijectionSpec::Compose(
                    parts
                        .iter()
                        .enumerate()
                        .map(|(i, p)| Self::from_json_at(p, &format!("{path}.of[{i}]")))
                        .collect::<Result<_>>()?,
                )
            }
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        };
        spec.validate().map_err(|e| bad(&e.to_string()))?;
        Ok(spec)
    }
}

impl Bijection for BijectionSpec {
    fn apply(&self, k: u64) -> u64 {
        match self {
            BijectionSpec::FiniteSupport(cycles) => {
                for cycle in cycles {
                    if let Some(pos) = cycle.iter().position(|&x| x == k) {
                        return cycle[(pos + 1) % cycle.len()];
                    }
                }
                k
            }
            BijectionSpec::BlockPermute { period, perm } => {
                let block = (k - 1) / period;
                block * period + perm[((k - 1) % period) as usize] + 1
            }
            BijectionSpec::Compose(parts) => parts.iter().rev().fold(k, |acc, p| p.apply(acc)),
        }
    }
}

/// Bounded check: is the image of `{1..bound}` exactly `{1..bound}`?
pub fn is_bijection(phi: &impl Bijection, bound: u64) -> bool {
    let mut hit = vec![false; bound as usize];
    for k in 1..=bound {
        let v = phi.apply(k);
        if v == 0 || v > bound || std::mem::replace(&mut hit[(v - 1) as usize], true) {
            return false;
        }
    }
    true
}

/// The swap of the middle two entries of every block of four:
/// `4j-3 -> 4j-3, 4j-2 -> 4j-1, 4j-1 -> 4j-2, 4j -> 4j`.
pub fn eh_shuffle() -> BijectionSpec {
    BijectionSpec::BlockPermute {
        period: 4,
        perm: vec![0, 2, 1, 3],
    }
}

/// `psi(2^k - 1) = 2^phi(k) - 1`, identity off the indices `2^k - 1`.
///
/// The sparse indices are permuted among themselves, so the complement is
/// matched to itself in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseEmbed {
    inner: BijectionSpec,
}

impl SparseEmbed {
    pub fn inner(&self) -> &BijectionSpec {
        &self.inner
    }

    /// `Some(k)` when `n = 2^k - 1`.
    pub fn sparse_position(n: u64) -> Option<u32> {
        let m = n.checked_add(1)?;
        (n > 0 && m.is_power_of_two()).then(|| m.trailing_zeros())
    }
}

impl Bijection for SparseEmbed {
    fn apply(&self, n: u64) -> u64 {
        match Self::sparse_position(n) {
            Some(k) => {
                let target = self.inner.apply(u64::from(k));
                assert!(target < 64, "2^{target} - 1 does not fit in u64");
                (1u64 << target) - 1
            }
            None => n,
        }
    }
}

pub fn sparse_embed(inner: BijectionSpec) -> Result<SparseEmbed> {
    inner.validate()?;
    Ok(SparseEmbed { inner })
}
