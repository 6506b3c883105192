//! Finite models of the James reduced product.
//!
//! A model is a finite based poset carrying its Alexandrov topology (opens
//! are the up-sets). Words are lists of non-basepoint points, `q_n` deletes
//! basepoint entries from an `n`-tuple, and `J_n` is the set of words of
//! length at most `n` with the quotient topology from `X^n`. Everything here
//! is computed by exhaustive enumeration.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// A set of model points as a bitmask.
pub type PointSet = u64;

/// An `n`-tuple of point indices.
pub type Tuple = Vec<usize>;

const MAX_MODEL_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpaceModel {
    names: Vec<String>,
    base: usize,
    /// `le[a][b]` iff `a <= b` in the specialization order.
    le: Vec<Vec<bool>>,
}

impl FiniteSpaceModel {
    /// Builds the model from generating relations `a <= b`, closing them
    /// reflexively and transitively.
    pub fn new(names: Vec<String>, base: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let p = names.len();
        if p == 0 || p > MAX_MODEL_POINTS {
            return Err(Error::malformed(format!(
                "a model needs between 1 and {MAX_MODEL_POINTS} points, got {p}"
            )));
        }
        if base >= p {
            return Err(Error::malformed("basepoint is not a point of the model"));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != p {
            return Err(Error::malformed("point names must be distinct"));
        }
        let mut le = vec![vec![false; p]; p];
        for (a, row) in le.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in relations {
            if a >= p || b >= p {
                return Err(Error::malformed("order relation mentions an unknown point"));
            }
            le[a][b] = true;
        }
        for k in 0..p {
            let via = le[k].clone();
            for row in le.iter_mut().filter(|row| row[k]) {
                for (slot, &x) in row.iter_mut().zip(&via) {
                    *slot |= x;
                }
            }
        }
        for a in 0..p {
            for b in a + 1..p {
                if le[a][b] && le[b][a] {
                    return Err(Error::malformed(format!(
                        "order is not antisymmetric: {} and {} are equivalent",
                        names[a], names[b]
                    )));
                }
            }
        }
        Ok(FiniteSpaceModel { names, base, le })
    }

    pub fn discrete(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(|s| s.to_string()).collect(), 0, &[])
    }

    /// Parses `points: e a b; base: e; le: e<a, a<b`. Statements are separated
    /// by `;` or newlines, `#` starts a comment, and `a<b<c` chains.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut base: Option<String> = None;
        let mut chains: Vec<(usize, Vec<String>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let mut column = 1;
            for stmt in line.split(';') {
                let here = column;
                column += stmt.len() + 1;
                let stmt = stmt.trim();
                if stmt.is_empty() {
                    continue;
                }
                let (key, value) = stmt
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno + 1, here, format!("expected `key: value`, got `{stmt}`")))?;
                match key.trim() {
                    "points" => names = Some(value.split_whitespace().map(str::to_string).collect()),
                    "base" => base = Some(value.trim().to_string()),
                    "le" => {
                        for chain in value.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                            let pts: Vec<String> = chain.split('<').map(|s| s.trim().to_string()).collect();
                            if pts.len() < 2 || pts.iter().any(String::is_empty) {
                                return Err(Error::parse(lineno + 1, here, format!("bad order relation `{chain}`")));
                            }
                            chains.push((lineno + 1, pts));
                        }
                    }
                    other => return Err(Error::parse(lineno + 1, here, format!("unknown key `{other}`"))),
                }
            }
        }
        let names = names.ok_or_else(|| Error::malformed("model has no `points:` line"))?;
        let base = base.ok_or_else(|| Error::malformed("model has no `base:` line"))?;
        let lookup = |name: &str| names.iter().position(|n| n == name);
        let base_idx = lookup(&base).ok_or_else(|| Error::malformed(format!("unknown basepoint `{base}`")))?;
        let mut relations = Vec::new();
        for (line, pts) in &chains {
            let idx = pts
                .iter()
                .map(|n| lookup(n).ok_or_else(|| Error::parse(*line, 1, format!("unknown point `{n}`"))))
                .collect::<Result<Vec<_>>>()?;
            relations.extend(idx.windows(2).map(|w| (w[0], w[1])));
        }
        Self::new(names, base_idx, &relations)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn name(&self, point: usize) -> &str {
        &self.names[point]
    }

    pub fn point(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn all_points(&self) -> PointSet {
        (1u64 << self.len()) - 1
    }

    /// Points other than the basepoint, in index order.
    pub fn letters(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| x != self.base).collect()
    }

    pub fn up_closure(&self, set: PointSet) -> PointSet {
        let mut out = 0;
        for a in members(set) {
            for b in 0..self.len() {
                if self.le[a][b] {
                    out |= 1 << b;
                }
            }
        }
        out
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.up_closure(set) == set
    }

    /// All open sets, in increasing bitmask order.
    pub fn opens(&self) -> Vec<PointSet> {
        (0..=self.all_points()).filter(|&s| self.is_open(s)).collect()
    }

    /// T1 finite spaces are discrete.
    pub fn is_t1(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| a == b || !self.le[a][b]))
    }

    /// `{e}` is closed iff nothing lies strictly below `e`.
    pub fn base_is_closed(&self) -> bool {
        (0..self.len()).all(|a| a == self.base || !self.le[a][self.base])
    }

    /// Points covering `a`: `a < b` with nothing strictly between.
    fn covers(&self, a: usize) -> Vec<usize> {
        let p = self.len();
        (0..p)
            .filter(|&b| b != a && self.le[a][b])
            .filter(|&b| !(0..p).any(|c| c != a && c != b && self.le[a][c] && self.le[c][b]))
            .collect()
    }

    pub fn describe_set(&self, set: PointSet) -> String {
        let inner: Vec<&str> = members(set).map(|x| self.name(x)).collect();
        format!("{{{}}}", inner.join(","))
    }

    pub fn describe_word(&self, w: &JamesWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters().iter().map(|&x| self.name(x)).collect::<Vec<_>>().join(" ")
    }

    pub fn describe_tuple(&self, t: &[usize]) -> String {
        let inner: Vec<&str> = t.iter().map(|&x| self.name(x)).collect();
        format!("({})", inner.join(","))
    }

    pub fn parse_set(&self, text: &str) -> Result<PointSet> {
        let mut set = 0;
        for name in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let x = self
                .point(name)
                .ok_or_else(|| Error::malformed(format!("unknown point `{name}`")))?;
            set |= 1 << x;
        }
        Ok(set)
    }

    pub fn parse_word(&self, text: &str) -> Result<JamesWord> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(JamesWord::empty());
        }
        let letters = text
            .split_whitespace()
            .map(|n| self.point(n).ok_or_else(|| Error::malformed(format!("unknown point `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        JamesWord::new(self, letters)
    }

    /// All tuples of `X^n` in lexicographic order.
    pub fn tuples(&self, n: usize) -> Vec<Tuple> {
        let p = self.len();
        let total = p.pow(n as u32);
        (0..total).map(|code| decode(code, p, n)).collect()
    }
}

impl fmt::Display for FiniteSpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rel = Vec::new();
        for a in 0..self.len() {
            for b in self.covers(a) {
                rel.push(format!("{}<{}", self.names[a], self.names[b]));
            }
        }
        write!(f, "points: {}; base: {}", self.names.join(" "), self.names[self.base])?;
        if !rel.is_empty() {
            write!(f, "; le: {}", rel.join(", "))?;
        }
        Ok(())
    }
}

fn members(set: PointSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| set & (1 << i) != 0)
}

fn decode(mut code: usize, p: usize, n: usize) -> Tuple {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = code % p;
        code /= p;
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JamesWord {
    letters: Vec<usize>,
}

impl JamesWord {
    pub fn empty() -> Self {
        JamesWord::default()
    }

    pub fn new(model: &FiniteSpaceModel, letters: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&x| x == model.base() || x >= model.len()) {
            return Err(Error::malformed(format!(
                "word letters must be non-basepoint points of the model, got index {bad}"
            )));
        }
        Ok(JamesWord { letters })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

pub fn concat_words(a: &JamesWord, b: &JamesWord) -> JamesWord {
    JamesWord {
        letters: a.letters.iter().chain(&b.letters).copied().collect(),
    }
}

/// Deletes basepoint entries, keeping the order of the rest.
pub fn q_n(model: &FiniteSpaceModel, tuple: &[usize]) -> JamesWord {
    JamesWord {
        letters: tuple.iter().copied().filter(|&x| x != model.base()).collect(),
    }
}

/// All words of length at most `n`, shortest first, then lexicographic.
pub fn words_up_to(model: &FiniteSpaceModel, n: usize) -> Vec<JamesWord> {
    let alphabet = model.letters();
    let mut out = vec![JamesWord::empty()];
    let mut layer = vec![JamesWord::empty()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&x| {
                    let mut letters = w.letters.clone();
                    letters.push(x);
                    JamesWord { letters }
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Ways to choose `k` of the positions `0..n`, in lexicographic order.
fn position_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// `q_n^{-1}(w)`: the tuples obtained by inserting `n - |w|` basepoints.
pub fn fiber(model: &FiniteSpaceModel, w: &JamesWord, n: usize) -> Result<Vec<Tuple>> {
    if n < w.len() {
        return Err(Error::EmptyFiber { len: w.len(), n });
    }
    Ok(position_sets(n, w.len())
        .into_iter()
        .map(|positions| {
            let mut t = vec![model.base(); n];
            for (&pos, &x) in positions.iter().zip(&w.letters) {
                t[pos] = x;
            }
            t
        })
        .collect())
}

/// Opens `U_1..U_m` avoiding the basepoint and an open `V` around it, in `X^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardNbhdSpec {
    pub letter_opens: Vec<PointSet>,
    pub base_open: PointSet,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardNbhd {
    pub n: usize,
    pub tuples: BTreeSet<Tuple>,
    pub image: BTreeSet<JamesWord>,
}

impl StandardNbhdSpec {
    pub fn validate(&self, model: &FiniteSpaceModel) -> Result<()> {
        let e = 1 << model.base();
        for (j, &u) in self.letter_opens.iter().enumerate() {
            if u & !model.all_points() != 0 || !model.is_open(u) {
                return Err(Error::malformed(format!("U_{} = {} is not open", j + 1, model.describe_set(u))));
            }
            if u & e != 0 {
                return Err(Error::malformed(format!("U_{} contains the basepoint", j + 1)));
            }
        }
        let v = self.base_open;
        if v & !model.all_points() != 0 || !model.is_open(v) {
            return Err(Error::malformed(format!("V = {} is not open", model.describe_set(v))));
        }
        if v & e == 0 {
            return Err(Error::malformed("V does not contain the basepoint"));
        }
        if self.n < self.letter_opens.len() {
            return Err(Error::EmptyFiber {
                len: self.letter_opens.len(),
                n: self.n,
            });
        }
        Ok(())
    }
}

/// `N = union of the boxes N_v over v in q_n^{-1}(w)`, where `N_v` has `U_j`
/// at the position of the `j`-th letter and `V` elsewhere.
pub fn standard_nbhd(model: &FiniteSpaceModel, w: &JamesWord, spec: &StandardNbhdSpec) -> Result<StandardNbhd> {
    spec.validate(model)?;
    if spec.letter_opens.len() != w.len() {
        return Err(Error::SpecMismatch(format!(
            "{} letter opens for a word of length {}",
            spec.letter_opens.len(),
            w.len()
        )));
    }
    for (j, (&x, &u)) in w.letters.iter().zip(&spec.letter_opens).enumerate() {
        if u & (1 << x) == 0 {
            return Err(Error::SpecMismatch(format!(
                "letter {} is not in U_{} = {}",
                model.name(x),
                j + 1,
                model.describe_set(u)
            )));
        }
    }
    let mut tuples = BTreeSet::new();
    for positions in position_sets(spec.n, w.len()) {
        let mut factors = vec![spec.base_open; spec.n];
        for (&pos, &u) in positions.iter().zip(&spec.letter_opens) {
            factors[pos] = u;
        }
        box_product(&factors, &mut Vec::with_capacity(spec.n), &mut tuples);
    }
    let image = tuples.iter().map(|t| q_n(model, t)).collect();
    Ok(StandardNbhd {
        n: spec.n,
        tuples,
        image,
    })
}

fn box_product(factors: &[PointSet], cur: &mut Tuple, out: &mut BTreeSet<Tuple>) {
    match factors.split_first() {
        None => {
            out.insert(cur.clone());
        }
        Some((&set, rest)) => {
            for x in members(set) {
                cur.push(x);
                box_product(rest, cur, out);
                cur.pop();
            }
        }
    }
}

/// `q_n^{-1}(q_n(N)) = N`, checked over all of `X^n`.
pub fn check_saturated(model: &FiniteSpaceModel, set: &BTreeSet<Tuple>, n: usize) -> bool {
    let image: BTreeSet<JamesWord> = set.iter().map(|t| q_n(model, t)).collect();
    model
        .tuples(n)
        .iter()
        .all(|t| image.contains(&q_n(model, t)) == set.contains(t))
}

/// A set of tuples is open in `X^n` iff it is an up-set of the product order.
pub fn is_open_tuple_set(model: &FiniteSpaceModel, set: &BTreeSet<Tuple>) -> bool {
    set.iter().all(|t| {
        (0..t.len()).all(|i| {
            model.covers(t[i]).into_iter().all(|b| {
                let mut s = t.clone();
                s[i] = b;
                set.contains(&s)
            })
        })
    })
}

/// The quotient topology of `J_n` from `X^n`, stored as the minimal open
/// neighborhood of every word.
#[derive(Debug, Clone)]
pub struct QuotientTopology {
    level: usize,
    words: Vec<JamesWord>,
    index: HashMap<JamesWord, usize>,
    minimal: Vec<Vec<bool>>,
}

impl QuotientTopology {
    /// A set `S` of words is open iff `q_n^{-1}(S)` is an up-set of `X^n`;
    /// the product order is generated by raising one coordinate along a
    /// cover, so `S` is open iff it is closed under the images of those steps.
    pub fn new(model: &FiniteSpaceModel, n: usize) -> Self {
        let words = words_up_to(model, n);
        let index: HashMap<JamesWord, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let covers: Vec<Vec<usize>> = (0..model.len()).map(|a| model.covers(a)).collect();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); words.len()];
        for t in model.tuples(n) {
            let from = index[&q_n(model, &t)];
            for i in 0..n {
                for &b in &covers[t[i]] {
                    let mut s = t.clone();
                    s[i] = b;
                    let to = index[&q_n(model, &s)];
                    if to != from {
                        succ[from].insert(to);
                    }
                }
            }
        }
        let minimal = (0..words.len())
            .map(|start| {
                let mut seen = vec![false; words.len()];
                seen[start] = true;
                let mut stack = vec![start];
                while let Some(i) = stack.pop() {
                    for &j in &succ[i] {
                        if !std::mem::replace(&mut seen[j], true) {
                            stack.push(j);
                        }
                    }
                }
                seen
            })
            .collect();
        QuotientTopology {
            level: n,
            words,
            index,
            minimal,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn words(&self) -> &[JamesWord] {
        &self.words
    }

    /// Smallest open set containing `w`.
    pub fn minimal_open(&self, w: &JamesWord) -> BTreeSet<JamesWord> {
        let row = &self.minimal[self.index[w]];
        self.words
            .iter()
            .zip(row)
            .filter(|(_, &inside)| inside)
            .map(|(w, _)| w.clone())
            .collect()
    }

    pub fn is_open(&self, set: &BTreeSet<JamesWord>) -> bool {
        set.iter().all(|w| match self.index.get(w) {
            Some(&i) => self.words.iter().zip(&self.minimal[i]).all(|(v, &inside)| !inside || set.contains(v)),
            None => false,
        })
    }

    /// Finite T1 spaces are discrete: every minimal open set is a singleton.
    pub fn is_t1(&self) -> bool {
        self.minimal.iter().all(|row| row.iter().filter(|&&b| b).count() == 1)
    }

    /// Is the set of words of length at most `m` closed here?
    pub fn filtration_closed(&self, m: usize) -> bool {
        self.words
            .iter()
            .zip(&self.minimal)
            .filter(|(w, _)| w.len() > m)
            .all(|(_, row)| self.words.iter().zip(row).all(|(v, &inside)| !inside || v.len() > m))
    }
}

/// Bounds on exhaustive topology computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelBounds {
    pub max_points: usize,
    pub max_level: usize,
}

impl Default for ModelBounds {
    fn default() -> Self {
        ModelBounds {
            max_points: 4,
            max_level: 3,
        }
    }
}

impl ModelBounds {
    pub fn check(&self, model: &FiniteSpaceModel, n: usize) -> Result<()> {
        if model.len() > self.max_points {
            return Err(Error::SizeBound(format!(
                "model has {} points, bound is {}",
                model.len(),
                self.max_points
            )));
        }
        if n > self.max_level {
            return Err(Error::SizeBound(format!("level {n} exceeds bound {}", self.max_level)));
        }
        Ok(())
    }
}

/// A word whose minimal open set in `J_n` differs from the trace of its
/// minimal open set in a longer stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub ambient: usize,
    pub word: JamesWord,
    pub quotient_open: BTreeSet<JamesWord>,
    pub subspace_open: BTreeSet<JamesWord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyReport {
    pub n: usize,
    /// Agreement with the subspace topologies from `J_(n+1)` and `J_(n+2)`.
    pub agrees: bool,
    pub disagreement: Option<Disagreement>,
    pub model_t1: bool,
    pub base_closed: bool,
    pub jn_t1: bool,
    pub closed_in_next: bool,
}

impl TopologyReport {
    /// Agreement holds, `X` T1 gives `J_n` T1, and `{e}` closed gives `J_n`
    /// closed in `J_(n+1)`.
    pub fn consistent(&self) -> bool {
        self.agrees && (!self.model_t1 || self.jn_t1) && (!self.base_closed || self.closed_in_next)
    }
}

pub fn topologies_agree(model: &FiniteSpaceModel, n: usize, bounds: &ModelBounds) -> Result<TopologyReport> {
    bounds.check(model, n)?;
    let own = QuotientTopology::new(model, n);
    let next = QuotientTopology::new(model, n + 1);
    let after = QuotientTopology::new(model, n + 2);
    let mut disagreement = None;
    'outer: for ambient in [&next, &after] {
        for w in own.words() {
            let quotient_open = own.minimal_open(w);
            let subspace_open: BTreeSet<JamesWord> =
                ambient.minimal_open(w).into_iter().filter(|v| v.len() <= n).collect();
            if quotient_open != subspace_open {
                disagreement = Some(Disagreement {
                    ambient: ambient.level(),
                    word: w.clone(),
                    quotient_open,
                    subspace_open,
                });
                break 'outer;
            }
        }
    }
    Ok(TopologyReport {
        n,
        agrees: disagreement.is_none(),
        disagreement,
        model_t1: model.is_t1(),
        base_closed: model.base_is_closed(),
        jn_t1: own.is_t1(),
        closed_in_next: next.filtration_closed(n),
    })
}

/// Every based poset on `1..=max_points` labelled points, basepoint `e` first.
pub fn all_models(max_points: usize) -> Vec<FiniteSpaceModel> {
    const NAMES: [&str; 6] = ["e", "a", "b", "c", "d", "f"];
    assert!(max_points <= NAMES.len(), "enumeration supports at most {} points", NAMES.len());
    let mut out = Vec::new();
    for p in 1..=max_points {
        let names: Vec<String> = NAMES[..p].iter().map(|s| s.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (0..p)
            .flat_map(|a| (0..p).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        for mask in 0u64..1 << pairs.len() {
            let rel: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &r)| r)
                .collect();
            // keep exactly the relations that are already partial orders
            let Ok(model) = FiniteSpaceModel::new(names.clone(), 0, &rel) else { continue };
            let strict = (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).filter(|&(a, b)| a != b && model.le(a, b)).count();
            if strict == rel.len() {
                out.push(model);
            }
        }
    }
    out
}

/// Every standard neighborhood spec of `w` in `X^n`.
pub fn all_specs(model: &FiniteSpaceModel, w: &JamesWord, n: usize) -> Vec<StandardNbhdSpec> {
    let e = 1 << model.base();
    let opens = model.opens();
    let base_opens: Vec<PointSet> = opens.iter().copied().filter(|&o| o & e != 0).collect();
    let mut choices: Vec<Vec<PointSet>> = vec![Vec::new()];
    for &x in w.letters() {
        let fits: Vec<PointSet> = opens.iter().copied().filter(|&o| o & e == 0 && o & (1 << x) != 0).collect();
        choices = choices
            .into_iter()
            .flat_map(|c| {
                fits.iter().map(move |&u| {
                    let mut c = c.clone();
                    c.push(u);
                    c
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .flat_map(|letter_opens| {
            base_opens.iter().map(move |&v| StandardNbhdSpec {
                letter_opens: letter_opens.clone(),
                base_open: v,
                n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> FiniteSpaceModel {
        FiniteSpaceModel::parse("points: e a b; base: e; le: e<a, a<b").unwrap()
    }

    fn word(m: &FiniteSpaceModel, s: &str) -> JamesWord {
        m.parse_word(s).unwrap()
    }

    #[test]
    fn parse_and_closure() {
        let m = chain();
        assert_eq!(m.len(), 3);
        assert!(m.le(0, 2));
        assert!(!m.le(2, 0));
        assert_eq!(m.to_string(), "points: e a b; base: e; le: e<a, a<b");
        assert!(FiniteSpaceModel::parse("points: e a; base: e; le: e<a, a<e").is_err());
        assert!(matches!(
            FiniteSpaceModel::parse("points: e a\nbase e"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn opens_are_up_sets() {
        let m = chain();
        // {b}, {a,b}, {e,a,b} and the empty set
        assert_eq!(m.opens(), vec![0b000, 0b100, 0b110, 0b111]);
        assert!(m.base_is_closed());
        assert!(!m.is_t1());
    }

    #[test]
    fn q_and_concat() {
        let m = FiniteSpaceModel::discrete(&["e", "x", "y", "z"]).unwrap();
        assert_eq!(q_n(&m, &[1, 0, 2]), word(&m, "x y"));
        assert!(q_n(&m, &[0, 0]).is_empty());
        let xyz = concat_words(&word(&m, "x"), &word(&m, "y z"));
        assert_eq!(xyz, word(&m, "x y z"));
        assert_eq!(xyz.len(), 3);
        assert!(JamesWord::new(&m, vec![0]).is_err());
    }

    #[test]
    fn fiber_examples() {
        let m = chain();
        assert_eq!(fiber(&m, &word(&m, "a"), 3).unwrap().len(), 3);
        assert_eq!(fiber(&m, &JamesWord::empty(), 4).unwrap(), vec![vec![0; 4]]);
        assert_eq!(fiber(&m, &word(&m, "a b"), 2).unwrap(), vec![vec![1, 2]]);
        assert_eq!(
            fiber(&m, &word(&m, "a b"), 1),
            Err(Error::EmptyFiber { len: 2, n: 1 })
        );
    }

    #[test]
    fn chain_neighborhood() {
        let m = chain();
        let spec = StandardNbhdSpec {
            letter_opens: vec![0b110],
            base_open: 0b111,
            n: 2,
        };
        let nbhd = standard_nbhd(&m, &word(&m, "a"), &spec).unwrap();
        // brute force over the nine tuples: some coordinate lies in {a, b}
        let expected: BTreeSet<Tuple> = m.tuples(2).into_iter().filter(|t| t.iter().any(|&x| x != 0)).collect();
        assert_eq!(nbhd.tuples, expected);
        assert!(check_saturated(&m, &nbhd.tuples, 2));
        assert!(is_open_tuple_set(&m, &nbhd.tuples));
    }

    #[test]
    fn spec_mismatch_and_invalid_opens() {
        let m = chain();
        let spec = StandardNbhdSpec {
            letter_opens: vec![0b100],
            base_open: 0b111,
            n: 2,
        };
        assert!(matches!(
            standard_nbhd(&m, &word(&m, "a"), &spec),
            Err(Error::SpecMismatch(_))
        ));
        let not_open = StandardNbhdSpec {
            letter_opens: vec![0b010],
            base_open: 0b111,
            n: 2,
        };
        assert!(standard_nbhd(&m, &word(&m, "a"), &not_open).is_err());
    }

    #[test]
    fn whole_space_is_a_neighborhood_of_the_empty_word() {
        let m = chain();
        let spec = StandardNbhdSpec {
            letter_opens: vec![],
            base_open: m.all_points(),
            n: 2,
        };
        let nbhd = standard_nbhd(&m, &JamesWord::empty(), &spec).unwrap();
        assert_eq!(nbhd.tuples.len(), 9);
        assert!(check_saturated(&m, &nbhd.tuples, 2));
    }

    #[test]
    fn single_box_is_not_saturated() {
        let m = FiniteSpaceModel::discrete(&["e", "a"]).unwrap();
        let single: BTreeSet<Tuple> = [vec![1, 0]].into_iter().collect();
        assert!(!check_saturated(&m, &single, 2));
    }

    #[test]
    fn boxes_are_disjoint_for_minimal_base_open() {
        let m = FiniteSpaceModel::discrete(&["e", "a", "b"]).unwrap();
        let w = word(&m, "a b");
        let u = vec![0b010, 0b100];
        let mut total = 0;
        for positions in position_sets(3, 2) {
            let mut factors = vec![0b001; 3];
            for (&pos, &set) in positions.iter().zip(&u) {
                factors[pos] = set;
            }
            let mut one = BTreeSet::new();
            box_product(&factors, &mut Vec::new(), &mut one);
            total += one.len();
        }
        let spec = StandardNbhdSpec {
            letter_opens: u,
            base_open: 0b001,
            n: 3,
        };
        assert_eq!(standard_nbhd(&m, &w, &spec).unwrap().tuples.len(), total);
    }

    /// Oracle: list every subset of `J_n` and test its preimage directly.
    fn open_sets_by_definition(m: &FiniteSpaceModel, n: usize) -> Vec<BTreeSet<JamesWord>> {
        let words = words_up_to(m, n);
        let tuples = m.tuples(n);
        (0u32..1 << words.len())
            .map(|mask| {
                words
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, w)| w.clone())
                    .collect::<BTreeSet<_>>()
            })
            .filter(|s| {
                let pre: BTreeSet<Tuple> = tuples.iter().filter(|t| s.contains(&q_n(m, t))).cloned().collect();
                is_open_tuple_set(m, &pre)
            })
            .collect()
    }

    #[test]
    fn quotient_topology_matches_definition() {
        for m in all_models(3) {
            for n in 1..=2 {
                let top = QuotientTopology::new(&m, n);
                let words = words_up_to(&m, n);
                if words.len() > 12 {
                    continue;
                }
                let by_def = open_sets_by_definition(&m, n);
                let count = (0u32..1 << words.len())
                    .filter(|mask| {
                        let s: BTreeSet<JamesWord> = words
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, w)| w.clone())
                            .collect();
                        top.is_open(&s)
                    })
                    .count();
                assert_eq!(count, by_def.len(), "model {m}, n = {n}");
                assert!(by_def.iter().all(|s| top.is_open(s)));
            }
        }
    }

    #[test]
    fn model_enumeration_counts() {
        let per_size: Vec<usize> = (1..=4)
            .map(|p| all_models(4).iter().filter(|m| m.len() == p).count())
            .collect();
        // labelled posets on 1, 2, 3, 4 points
        assert_eq!(per_size, vec![1, 3, 19, 219]);
    }

    #[test]
    fn topology_examples() {
        let bounds = ModelBounds::default();
        let discrete = FiniteSpaceModel::discrete(&["e", "a", "b"]).unwrap();
        let r = topologies_agree(&discrete, 2, &bounds).unwrap();
        assert!(r.agrees && r.jn_t1 && r.consistent());
        let sierpinski = FiniteSpaceModel::parse("points: e a; base: e; le: e<a").unwrap();
        let r = topologies_agree(&sierpinski, 2, &bounds).unwrap();
        assert!(r.base_closed && r.closed_in_next);
        let point = FiniteSpaceModel::discrete(&["e"]).unwrap();
        assert!(topologies_agree(&point, 3, &bounds).unwrap().agrees);
        assert!(matches!(
            topologies_agree(&discrete, 4, &bounds),
            Err(Error::SizeBound(_))
        ));
    }
}
