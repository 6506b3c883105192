//! Finitely described loops in the Hawaiian earring.
//!
//! An expression is built from letters, finite concatenations, inverses and
//! two kinds of infinite products of a null sequence of factors: the omega
//! product, which lists factor `m` in position `m`, and the tau product,
//! which places factor `m` on the Cantor component `theta(m)` and reads the
//! components left to right. The tail of a product is given by templates
//! whose letter indices grow linearly in the factor number, so only finitely
//! many factors ever touch a given letter.

use std::cmp::Ordering;

use num_integer::Integer;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::free_words::{peel_letter, CommutatorPair, ReducedWord};
use crate::orders;
use crate::rearrange::{Bijection, BijectionSpec};
use crate::specker::SpeckerVector;

/// Truncation depth used for equality evidence unless configured otherwise.
pub const DEFAULT_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordExpr {
    Letter { index: u32, exp: i64 },
    Concat(Vec<WordExpr>),
    Inverse(Box<WordExpr>),
    Omega(SeqSpec),
    Tau(SeqSpec),
}

/// Factors `1, 2, ...` of an infinite product: the prefix, then the tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqSpec {
    pub prefix: Vec<WordExpr>,
    pub tail: TailRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule {
    Trivial,
    /// Tail factor `k` (from 0) is the body at `k`.
    Template(TemplateExpr),
    /// Tail factor `k = jP + r` is `bodies[r]` at `j`, where `P = bodies.len()`.
    Interleaved(Vec<TemplateExpr>),
}

/// A finite expression whose letters are `l_(base + coef * k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateExpr {
    Leaf(SymLetter),
    Concat(Vec<TemplateExpr>),
    Inverse(Box<TemplateExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymLetter {
    pub base: u32,
    pub coef: u32,
    pub exp: i64,
}

impl SymLetter {
    pub fn new(base: u32, coef: u32, exp: i64) -> Self {
        SymLetter { base, coef, exp }
    }

    fn at(&self, k: u64) -> u64 {
        u64::from(self.base) + u64::from(self.coef) * k
    }
}

impl TemplateExpr {
    pub fn leaf(base: u32, coef: u32, exp: i64) -> Self {
        TemplateExpr::Leaf(SymLetter::new(base, coef, exp))
    }

    pub fn instantiate(&self, k: u64) -> WordExpr {
        match self {
            TemplateExpr::Leaf(s) => WordExpr::Letter {
                index: u32::try_from(s.at(k)).expect("letter index overflows u32"),
                exp: s.exp,
            },
            TemplateExpr::Concat(parts) => WordExpr::Concat(parts.iter().map(|p| p.instantiate(k)).collect()),
            TemplateExpr::Inverse(inner) => WordExpr::Inverse(Box::new(inner.instantiate(k))),
        }
    }

    /// Substitutes `k -> offset + stretch * k`.
    fn reindex(&self, offset: u64, stretch: u32) -> TemplateExpr {
        match self {
            TemplateExpr::Leaf(s) => TemplateExpr::Leaf(SymLetter {
                base: u32::try_from(s.at(offset)).expect("letter index overflows u32"),
                coef: s.coef * stretch,
                exp: s.exp,
            }),
            TemplateExpr::Concat(parts) => {
                TemplateExpr::Concat(parts.iter().map(|p| p.reindex(offset, stretch)).collect())
            }
            TemplateExpr::Inverse(inner) => TemplateExpr::Inverse(Box::new(inner.reindex(offset, stretch))),
        }
    }

    /// Leaves with the sign picked up from enclosing inverses.
    fn signed_leaves(&self, sign: i64, out: &mut Vec<(SymLetter, i64)>) {
        match self {
            TemplateExpr::Leaf(s) => out.push((*s, sign)),
            TemplateExpr::Concat(parts) => parts.iter().for_each(|p| p.signed_leaves(sign, out)),
            TemplateExpr::Inverse(inner) => inner.signed_leaves(-sign, out),
        }
    }

    fn leaves(&self) -> Vec<SymLetter> {
        let mut out = Vec::new();
        self.signed_leaves(1, &mut out);
        out.into_iter().map(|(s, _)| s).collect()
    }

    /// Largest `k` at which some letter is at most `n`, if any.
    fn last_touching(&self, n: u32) -> Option<u64> {
        self.leaves()
            .iter()
            .filter(|s| s.base <= n && s.coef > 0)
            .map(|s| u64::from((n - s.base) / s.coef))
            .max()
    }
}

impl TailRule {
    pub fn bodies(&self) -> &[TemplateExpr] {
        match self {
            TailRule::Trivial => &[],
            TailRule::Template(body) => std::slice::from_ref(body),
            TailRule::Interleaved(bodies) => bodies,
        }
    }

    fn from_bodies(mut bodies: Vec<TemplateExpr>) -> TailRule {
        match bodies.len() {
            0 => TailRule::Trivial,
            1 => TailRule::Template(bodies.pop().unwrap()),
            _ => TailRule::Interleaved(bodies),
        }
    }

    pub fn factor(&self, k: u64) -> WordExpr {
        let bodies = self.bodies();
        if bodies.is_empty() {
            return WordExpr::identity();
        }
        let period = bodies.len() as u64;
        bodies[(k % period) as usize].instantiate(k / period)
    }

    /// The tail that starts `t` factors later.
    fn shifted(&self, t: u64) -> TailRule {
        let bodies = self.bodies();
        if bodies.is_empty() {
            return TailRule::Trivial;
        }
        let period = bodies.len() as u64;
        TailRule::from_bodies(
            (0..period)
                .map(|r| {
                    let k = r + t;
                    bodies[(k % period) as usize].reindex(k / period, 1)
                })
                .collect(),
        )
    }

    /// The same tail written with period `period * stretch`.
    fn refined(&self, stretch: u32) -> Vec<TemplateExpr> {
        let bodies = self.bodies();
        let period = bodies.len();
        (0..period * stretch as usize)
            .map(|r| bodies[r % period].reindex((r / period) as u64, stretch))
            .collect()
    }
}

impl SeqSpec {
    pub fn new(prefix: Vec<WordExpr>, tail: TailRule) -> Self {
        SeqSpec { prefix, tail }
    }

    /// Factor `m`, numbered from 1.
    pub fn factor(&self, m: u64) -> WordExpr {
        assert!(m >= 1, "factors are numbered from 1");
        let plen = self.prefix.len() as u64;
        if m <= plen {
            self.prefix[(m - 1) as usize].clone()
        } else {
            self.tail.factor(m - plen - 1)
        }
    }

    /// Increasing list of the factor numbers whose factor may use a letter `<= n`.
    pub fn contributing(&self, n: u32) -> Vec<u64> {
        let plen = self.prefix.len() as u64;
        let mut out: Vec<u64> = (1..=plen).collect();
        let bodies = self.tail.bodies();
        let period = bodies.len() as u64;
        for (r, body) in bodies.iter().enumerate() {
            if let Some(last) = body.last_touching(n) {
                out.extend((0..=last).map(|j| plen + j * period + r as u64 + 1));
            }
        }
        out.sort_unstable();
        out
    }

    /// Moves the first `count` tail factors into the prefix.
    fn materialize(&mut self, count: u64) {
        for k in 0..count {
            self.prefix.push(self.tail.factor(k));
        }
        self.tail = self.tail.shifted(count);
    }

    fn apply_bijection(&mut self, phi: &BijectionSpec) {
        match phi {
            BijectionSpec::Compose(parts) => {
                // new factor k is old factor f1(f2(...(k))): apply f1 first
                for part in parts {
                    self.apply_bijection(part);
                }
            }
            BijectionSpec::FiniteSupport(_) => {
                let bound = phi.support_bound();
                let plen = self.prefix.len() as u64;
                if bound > plen {
                    self.materialize(bound - plen);
                }
                self.permute_prefix(phi);
            }
            BijectionSpec::BlockPermute { period, perm } => {
                let plen = self.prefix.len() as u64;
                let aligned = plen.div_ceil(*period) * period;
                self.materialize(aligned - plen);
                self.permute_prefix(phi);
                let tail_period = self.tail.bodies().len() as u64;
                if tail_period == 0 {
                    return;
                }
                let full = tail_period.lcm(period);
                let bodies = self.tail.refined((full / tail_period) as u32);
                let permuted = (0..full)
                    .map(|r| {
                        let block = r / period;
                        bodies[(block * period + perm[(r % period) as usize]) as usize].clone()
                    })
                    .collect();
                self.tail = TailRule::from_bodies(permuted);
            }
        }
    }

    fn permute_prefix(&mut self, phi: &impl Bijection) {
        let old = self.prefix.clone();
        for (k, slot) in self.prefix.iter_mut().enumerate() {
            let source = phi.apply(k as u64 + 1);
            *slot = old[(source - 1) as usize].clone();
        }
    }
}

/// Where an expression fails validation, as a JSON-style path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub reason: String,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::Invalid {
            path: v.path,
            reason: v.reason,
        }
    }
}

/// Outcome of comparing projections up to a depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityVerdict {
    pub depth: u32,
    pub witness: Option<Witness>,
}

/// The smallest `n` at which the projections differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: u32,
    pub left: ReducedWord,
    pub right: ReducedWord,
}

impl EqualityVerdict {
    pub fn equal(&self) -> bool {
        self.witness.is_none()
    }
}

impl WordExpr {
    pub fn identity() -> Self {
        WordExpr::Concat(Vec::new())
    }

    pub fn letter(index: u32) -> Self {
        WordExpr::Letter { index, exp: 1 }
    }

    pub fn power(index: u32, exp: i64) -> Self {
        WordExpr::Letter { index, exp }
    }

    pub fn inverse(e: WordExpr) -> Self {
        WordExpr::Inverse(Box::new(e))
    }

    pub fn from_word(w: &ReducedWord) -> Self {
        WordExpr::Concat(w.syllables().iter().map(|s| WordExpr::power(s.letter, s.exp)).collect())
    }

    pub fn commutator(a: &ReducedWord, b: &ReducedWord) -> Self {
        WordExpr::Concat(vec![
            WordExpr::from_word(a),
            WordExpr::from_word(b),
            WordExpr::from_word(&a.invert()),
            WordExpr::from_word(&b.invert()),
        ])
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WordExpr::Letter { .. } => "letter",
            WordExpr::Concat(_) => "concat",
            WordExpr::Inverse(_) => "inverse",
            WordExpr::Omega(_) => "omega",
            WordExpr::Tau(_) => "tau",
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            WordExpr::Letter { .. } => true,
            WordExpr::Concat(parts) => parts.iter().all(WordExpr::is_finite),
            WordExpr::Inverse(inner) => inner.is_finite(),
            WordExpr::Omega(_) | WordExpr::Tau(_) => false,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.validate_at("$", true)
    }

    fn validate_at(&self, path: &str, allow_products: bool) -> std::result::Result<(), Violation> {
        let fail = |reason: &str| {
            Err(Violation {
                path: path.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            WordExpr::Letter { index, exp } => {
                if *index == 0 {
                    return fail("letter index must be positive");
                }
                if *exp == 0 {
                    return fail("exponent must be nonzero");
                }
                Ok(())
            }
            WordExpr::Concat(parts) => parts
                .iter()
                .enumerate()
                .try_for_each(|(i, p)| p.validate_at(&format!("{path}.factors[{i}]"), allow_products)),
            WordExpr::Inverse(inner) => inner.validate_at(&format!("{path}.of"), allow_products),
            WordExpr::Omega(spec) | WordExpr::Tau(spec) => {
                if !allow_products {
                    return fail("nested infinite product");
                }
                for (i, p) in spec.prefix.iter().enumerate() {
                    p.validate_at(&format!("{path}.prefix[{i}]"), false)?;
                }
                match &spec.tail {
                    TailRule::Trivial => Ok(()),
                    TailRule::Template(body) => validate_template(body, &format!("{path}.tail.body")),
                    TailRule::Interleaved(bodies) => {
                        if bodies.is_empty() {
                            return fail("interleaved tail needs at least one body");
                        }
                        bodies
                            .iter()
                            .enumerate()
                            .try_for_each(|(i, b)| validate_template(b, &format!("{path}.tail.bodies[{i}]")))
                    }
                }
            }
        }
    }

    /// Image in `F_n`.
    pub fn project(&self, n: u32) -> Result<ReducedWord> {
        self.validate()?;
        Ok(self.project_valid(n))
    }

    fn project_valid(&self, n: u32) -> ReducedWord {
        let mut out = ReducedWord::identity();
        self.project_into(n, &mut out);
        out
    }

    fn project_into(&self, n: u32, out: &mut ReducedWord) {
        match self {
            WordExpr::Letter { index, exp } => {
                if *index <= n {
                    out.push(*index, *exp);
                }
            }
            WordExpr::Concat(parts) => parts.iter().for_each(|p| p.project_into(n, out)),
            WordExpr::Inverse(inner) => out.extend(&inner.project_valid(n).invert()),
            WordExpr::Omega(spec) => {
                for m in spec.contributing(n) {
                    spec.factor(m).project_into(n, out);
                }
            }
            WordExpr::Tau(spec) => {
                let mut order = spec.contributing(n);
                order.sort_by(|&a, &b| orders::compare(a, b));
                for m in order {
                    spec.factor(m).project_into(n, out);
                }
            }
        }
    }

    /// Total exponent of each letter.
    pub fn eta(&self) -> Result<SpeckerVector> {
        self.validate()?;
        Ok(self.eta_valid())
    }

    fn eta_valid(&self) -> SpeckerVector {
        match self {
            WordExpr::Letter { index, exp } => SpeckerVector::unit(*index as usize).scale(*exp),
            WordExpr::Concat(parts) => parts.iter().map(WordExpr::eta_valid).sum(),
            WordExpr::Inverse(inner) => -inner.eta_valid(),
            WordExpr::Omega(spec) | WordExpr::Tau(spec) => {
                let mut leaves = Vec::new();
                for body in spec.tail.bodies() {
                    body.signed_leaves(1, &mut leaves);
                }
                let tail: SpeckerVector = leaves
                    .into_iter()
                    .map(|(s, sign)| SpeckerVector::progression(s.base as usize, s.coef as usize, sign * s.exp))
                    .sum();
                spec.prefix.iter().map(WordExpr::eta_valid).sum::<SpeckerVector>() + tail
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            WordExpr::Letter { index, exp } => json!({"type": "letter", "index": index, "exp": exp}),
            WordExpr::Concat(parts) => {
                json!({"type": "concat", "factors": parts.iter().map(WordExpr::to_json).collect::<Vec<_>>()})
            }
            WordExpr::Inverse(inner) => json!({"type": "inverse", "of": inner.to_json()}),
            WordExpr::Omega(spec) => spec_json("omega", spec),
            WordExpr::Tau(spec) => spec_json("tau", spec),
        }
    }

    /// Canonical serialization: sorted keys, no whitespace.
    pub fn to_canonical_json(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        expr_from_json(value, "$")
    }
}

fn validate_template(t: &TemplateExpr, path: &str) -> std::result::Result<(), Violation> {
    let fail = |reason: &str| {
        Err(Violation {
            path: path.to_string(),
            reason: reason.to_string(),
        })
    };
    match t {
        TemplateExpr::Leaf(s) => {
            if s.coef == 0 {
                return fail("constant letter in tail");
            }
            if s.base == 0 {
                return fail("letter index must be positive");
            }
            if s.exp == 0 {
                return fail("exponent must be nonzero");
            }
            Ok(())
        }
        TemplateExpr::Concat(parts) => parts
            .iter()
            .enumerate()
            .try_for_each(|(i, p)| validate_template(p, &format!("{path}.factors[{i}]"))),
        TemplateExpr::Inverse(inner) => validate_template(inner, &format!("{path}.of")),
    }
}

/// The omega product `l1 l2 l3 ...`.
pub fn ell_infinity() -> WordExpr {
    WordExpr::Omega(SeqSpec::new(vec![], TailRule::Template(TemplateExpr::leaf(1, 1, 1))))
}

/// The tau product of `l1, l2, l3, ...`: letter `m` sits on component `theta(m)`.
pub fn ell_tau() -> WordExpr {
    WordExpr::Tau(SeqSpec::new(vec![], TailRule::Template(TemplateExpr::leaf(1, 1, 1))))
}

/// Omega product with factor `k` the commutator `[l_k, l_(k+1)]`.
pub fn commutator_omega() -> WordExpr {
    WordExpr::Omega(SeqSpec::new(
        vec![],
        TailRule::Template(TemplateExpr::Concat(vec![
            TemplateExpr::leaf(1, 1, 1),
            TemplateExpr::leaf(2, 1, 1),
            TemplateExpr::leaf(1, 1, -1),
            TemplateExpr::leaf(2, 1, -1),
        ])),
    ))
}

/// `prod_k [l_(2k-1), l_(2k)]` written letter by letter: factors
/// `l1, l2, l1^-1, l2^-1, l3, l4, l3^-1, l4^-1, ...`.
pub fn flattened_commutators() -> WordExpr {
    WordExpr::Omega(SeqSpec::new(
        vec![],
        TailRule::Interleaved(vec![
            TemplateExpr::leaf(1, 2, 1),
            TemplateExpr::leaf(2, 2, 1),
            TemplateExpr::leaf(1, 2, -1),
            TemplateExpr::leaf(2, 2, -1),
        ]),
    ))
}

pub fn builtin(name: &str) -> Option<WordExpr> {
    match name {
        "ell_infinity" => Some(ell_infinity()),
        "ell_tau" => Some(ell_tau()),
        "commutator_omega" => Some(commutator_omega()),
        "flattened_commutators" => Some(flattened_commutators()),
        "identity" => Some(WordExpr::identity()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "ell_infinity",
    "ell_tau",
    "commutator_omega",
    "flattened_commutators",
    "identity",
];

/// Compares `project(a, n)` and `project(b, n)` for `n = 1..=depth`.
///
/// A witness is a proof of inequality; agreement is only evidence.
pub fn equal_up_to(a: &WordExpr, b: &WordExpr, depth: u32) -> Result<EqualityVerdict> {
    a.validate()?;
    b.validate()?;
    for n in 1..=depth {
        let left = a.project_valid(n);
        let right = b.project_valid(n);
        if left != right {
            return Ok(EqualityVerdict {
                depth,
                witness: Some(Witness { n, left, right }),
            });
        }
    }
    Ok(EqualityVerdict { depth, witness: None })
}

/// The product of the same kind whose factor `k` is factor `phi(k)` of `p`.
pub fn apply_bijection(p: &WordExpr, phi: &BijectionSpec) -> Result<WordExpr> {
    p.validate()?;
    phi.validate()?;
    match p {
        WordExpr::Omega(spec) => {
            let mut spec = spec.clone();
            spec.apply_bijection(phi);
            Ok(WordExpr::Omega(spec))
        }
        WordExpr::Tau(spec) => {
            let mut spec = spec.clone();
            spec.apply_bijection(phi);
            Ok(WordExpr::Tau(spec))
        }
        other => Err(Error::NotAProduct(other.kind())),
    }
}

/// Stage `n` is a list of commutators in letters `>= n`; their ordered product
/// over all stages agrees with the input in every `F_m`, `m <= depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutatorFactorization {
    pub depth: u32,
    pub stages: Vec<Vec<CommutatorPair>>,
}

impl CommutatorFactorization {
    pub fn stage_word(&self, n: usize) -> ReducedWord {
        crate::free_words::assemble(&self.stages[n - 1])
    }

    pub fn to_seq_spec(&self) -> SeqSpec {
        let last = self.stages.iter().rposition(|s| !s.is_empty()).map_or(0, |i| i + 1);
        let prefix = self.stages[..last]
            .iter()
            .map(|stage| WordExpr::Concat(stage.iter().map(|(a, b)| WordExpr::commutator(a, b)).collect()))
            .collect();
        SeqSpec::new(prefix, TailRule::Trivial)
    }

    pub fn to_expr(&self) -> WordExpr {
        WordExpr::Omega(self.to_seq_spec())
    }
}

/// Splits an element of the kernel of `eta` into stages of commutators,
/// peeling `l1`, then `l2`, and so on from its projection to `F_depth`.
pub fn commutator_factorization(e: &WordExpr, depth: u32) -> Result<CommutatorFactorization> {
    let winding = e.eta()?;
    if !winding.is_zero() {
        return Err(Error::NonzeroWinding(winding.to_string()));
    }
    let mut rest = e.project_valid(depth);
    let mut stages = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let (block, remainder) = peel_letter(&rest, n)?;
        stages.push(block);
        rest = remainder;
    }
    debug_assert!(rest.is_identity());
    Ok(CommutatorFactorization { depth, stages })
}

fn spec_json(kind: &str, spec: &SeqSpec) -> Value {
    let tail = match &spec.tail {
        TailRule::Trivial => json!({"kind": "trivial"}),
        TailRule::Template(body) => json!({"kind": "template", "body": template_json(body)}),
        TailRule::Interleaved(bodies) => json!({
            "kind": "interleaved",
            "bodies": bodies.iter().map(template_json).collect::<Vec<_>>(),
        }),
    };
    json!({
        "type": kind,
        "prefix": spec.prefix.iter().map(WordExpr::to_json).collect::<Vec<_>>(),
        "tail": tail,
    })
}

fn template_json(t: &TemplateExpr) -> Value {
    match t {
        TemplateExpr::Leaf(s) => json!({"type": "letter", "base": s.base, "coef": s.coef, "exp": s.exp}),
        TemplateExpr::Concat(parts) => {
            json!({"type": "concat", "factors": parts.iter().map(template_json).collect::<Vec<_>>()})
        }
        TemplateExpr::Inverse(inner) => json!({"type": "inverse", "of": template_json(inner)}),
    }
}

fn invalid(path: &str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value.as_object().ok_or_else(|| invalid(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| invalid(path, format!("missing `{key}`")))
}

fn int_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<i64> {
    field(obj, key, path)?
        .as_i64()
        .ok_or_else(|| invalid(path, format!("`{key}` must be an integer")))
}

fn index_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<u32> {
    let v = int_field(obj, key, path)?;
    u32::try_from(v).map_err(|_| invalid(path, format!("`{key}` must be a non-negative integer below 2^32")))
}

fn list_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Vec<Value>> {
    field(obj, key, path)?
        .as_array()
        .ok_or_else(|| invalid(path, format!("`{key}` must be a list")))
}

fn type_field<'a>(obj: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    field(obj, "type", path)?
        .as_str()
        .ok_or_else(|| invalid(path, "`type` must be a string"))
}

fn expr_from_json(value: &Value, path: &str) -> Result<WordExpr> {
    let obj = object(value, path)?;
    match type_field(obj, path)? {
        "letter" => {
            if obj.contains_key("base") || obj.contains_key("coef") {
                return Err(invalid(path, "symbolic letter outside a template"));
            }
            Ok(WordExpr::Letter {
                index: index_field(obj, "index", path)?,
                exp: int_field(obj, "exp", path)?,
            })
        }
        "concat" => Ok(WordExpr::Concat(
            list_field(obj, "factors", path)?
                .iter()
                .enumerate()
                .map(|(i, v)| expr_from_json(v, &format!("{path}.factors[{i}]")))
                .collect::<Result<_>>()?,
        )),
        "inverse" => Ok(WordExpr::inverse(expr_from_json(
            field(obj, "of", path)?,
            &format!("{path}.of"),
        )?)),
        kind @ ("omega" | "tau") => {
            let prefix = list_field(obj, "prefix", path)?
                .iter()
                .enumerate()
                .map(|(i, v)| expr_from_json(v, &format!("{path}.prefix[{i}]")))
                .collect::<Result<_>>()?;
            let tail_path = format!("{path}.tail");
            let tail_obj = object(field(obj, "tail", path)?, &tail_path)?;
            let tail = match field(tail_obj, "kind", &tail_path)?.as_str() {
                Some("trivial") => TailRule::Trivial,
                Some("template") => TailRule::Template(template_from_json(
                    field(tail_obj, "body", &tail_path)?,
                    &format!("{tail_path}.body"),
                )?),
                Some("interleaved") => TailRule::Interleaved(
                    list_field(tail_obj, "bodies", &tail_path)?
                        .iter()
                        .enumerate()
                        .map(|(i, v)| template_from_json(v, &format!("{tail_path}.bodies[{i}]")))
                        .collect::<Result<_>>()?,
                ),
                _ => return Err(invalid(&tail_path, "`kind` must be trivial, template or interleaved")),
            };
            let spec = SeqSpec::new(prefix, tail);
            Ok(if kind == "omega" {
                WordExpr::Omega(spec)
            } else {
                WordExpr::Tau(spec)
            })
        }
        other => Err(invalid(path, format!("unknown type `{other}`"))),
    }
}

fn template_from_json(value: &Value, path: &str) -> Result<TemplateExpr> {
    let obj = object(value, path)?;
    match type_field(obj, path)? {
        "letter" => {
            if obj.contains_key("index") {
                return Err(invalid(path, "template letters take `base` and `coef`, not `index`"));
            }
            Ok(TemplateExpr::Leaf(SymLetter {
                base: index_field(obj, "base", path)?,
                coef: index_field(obj, "coef", path)?,
                exp: int_field(obj, "exp", path)?,
            }))
        }
        "concat" => Ok(TemplateExpr::Concat(
            list_field(obj, "factors", path)?
                .iter()
                .enumerate()
                .map(|(i, v)| template_from_json(v, &format!("{path}.factors[{i}]")))
                .collect::<Result<_>>()?,
        )),
        "inverse" => Ok(TemplateExpr::Inverse(Box::new(template_from_json(
            field(obj, "of", path)?,
            &format!("{path}.of"),
        )?))),
        "omega" | "tau" => Err(invalid(path, "nested infinite product")),
        other => Err(invalid(path, format!("unknown type `{other}`"))),
    }
}

/// Parses an expression file; syntax errors carry line and column.
pub fn parse_expr(text: &str) -> Result<WordExpr> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
    WordExpr::from_json(&value)
}

/// Sorts factor numbers into the order in which a tau product reads them.
pub fn tau_order(mut factors: Vec<u64>) -> Vec<u64> {
    factors.sort_by(|&a, &b| match orders::compare(a, b) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    factors
}
