//! Smith normal form over the integers, with the transformation matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relators as rows, generators as columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i64>>,
}

impl PresentationMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        Self::with_columns(entries, cols)
    }

    /// Needed when there are no relators: the generator count is not implied by the rows.
    pub fn with_columns(entries: Vec<Vec<i64>>, cols: usize) -> Result<Self> {
        if let Some(bad) = entries.iter().position(|r| r.len() != cols) {
            return Err(Error::malformed(format!(
                "row {} has {} entries, expected {cols}",
                bad + 1,
                entries[bad].len()
            )));
        }
        Ok(PresentationMatrix {
            rows: entries.len(),
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PresentationMatrix {
            rows,
            cols,
            entries: vec![vec![0; cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn mul(&self, other: &PresentationMatrix) -> PresentationMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i][j] += a * other.entries[k][j];
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.entries[i][j] == 0))
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self.entries[i][i]).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.entries.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.entries {
            row.swap(a, b);
        }
    }

    /// row[target] += k * row[source]
    fn add_row(&mut self, target: usize, source: usize, k: i64) {
        for j in 0..self.cols {
            let v = self.entries[source][j];
            self.entries[target][j] += k * v;
        }
    }

    /// col[target] += k * col[source]
    fn add_col(&mut self, target: usize, source: usize, k: i64) {
        for row in &mut self.entries {
            row[target] += k * row[source];
        }
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.entries[i] {
            *v = -*v;
        }
    }
}

impl fmt::Display for PresentationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for PresentationMatrix {
    type Err = Error;

    /// Whitespace-separated integer rows, one per line; blank lines and `#` comments ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::parse(lineno + 1, 1, format!("bad integer `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        PresentationMatrix::new(rows)
    }
}

/// `U * A * V = S` with `S` diagonal, `d_1 | d_2 | ...`, `d_i >= 0`, and `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub s: PresentationMatrix,
    pub u: PresentationMatrix,
    pub v: PresentationMatrix,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<i64> {
        self.s.diagonal()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|&&d| d != 0).count()
    }
}

pub fn smith_normal_form(a: &PresentationMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = PresentationMatrix::identity(m);
    let mut v = PresentationMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_nonzero(&s, t) else {
                return finish(s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = s.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let q = s.get(i, t) / pivot;
                if q != 0 {
                    s.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                clean &= s.get(i, t) == 0;
            }
            for j in t + 1..n {
                let q = s.get(t, j) / pivot;
                if q != 0 {
                    s.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
                clean &= s.get(t, j) == 0;
            }
            if !clean {
                // a nonzero remainder smaller than the pivot is now in row or column t
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| s.get(i, j) % pivot != 0));
            match offender {
                Some(i) => {
                    s.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if s.get(t, t) < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(s, u, v)
}

fn finish(s: PresentationMatrix, u: PresentationMatrix, v: PresentationMatrix) -> SmithForm {
    SmithForm { s, u, v }
}

fn min_nonzero(s: &PresentationMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows {
        for j in t..s.cols {
            let x = s.get(i, j).abs();
            if x != 0 && best.is_none_or(|(bi, bj)| x < s.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub fn determinant(a: &PresentationMatrix) -> i64 {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a
        .entries
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    i64::try_from(sign * m[n - 1][n - 1]).expect("determinant overflows i64")
}

/// `Z^free_rank + Z/t_1 + ... + Z/t_k` with every `t_i > 1` and `t_i | t_(i+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct H1Group {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl fmt::Display for H1Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank > 0 {
            parts.insert(0, if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// The abelian group with generators the columns of `a` and relators its rows.
pub fn h1_from_presentation(a: &PresentationMatrix) -> H1Group {
    let form = smith_normal_form(a);
    H1Group {
        free_rank: a.cols - form.rank(),
        torsion: form.invariant_factors().into_iter().filter(|&d| d > 1).collect(),
    }
}

/// One coordinate of an element of the cokernel: `value` in `Z/modulus`, or in `Z` when `modulus == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CokernelCoordinate {
    pub value: i64,
    pub modulus: i64,
}

impl SmithForm {
    /// Coordinates of the class of `x` (a row vector over the generators) in
    /// the decomposition read off the diagonal; `Z/1` coordinates are dropped.
    pub fn cokernel_coordinates(&self, x: &[i64]) -> Vec<CokernelCoordinate> {
        assert_eq!(x.len(), self.v.rows, "vector length does not match generator count");
        let diag = self.invariant_factors();
        (0..self.v.cols)
            .filter_map(|j| {
                let y: i64 = (0..x.len()).map(|i| x[i] * self.v.get(i, j)).sum();
                let modulus = diag.get(j).copied().unwrap_or(0);
                match modulus {
                    1 => None,
                    0 => Some(CokernelCoordinate { value: y, modulus: 0 }),
                    d => Some(CokernelCoordinate {
                        value: y.rem_euclid(d),
                        modulus: d,
                    }),
                }
            })
            .collect()
    }
}
