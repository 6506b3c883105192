//! Seeded generators of random valid inputs.
//!
//! Used by the command line (`--seed`, `--budget`) and by the test suites.
//! Everything is driven by a ChaCha stream, so a seed fixes the output on
//! every platform.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::free_words::ReducedWord;
use crate::rearrange::BijectionSpec;
use crate::specker::{PresentationMatrix, SpeckerVector};
use crate::word_expr::{apply_bijection, SeqSpec, TailRule, TemplateExpr, WordExpr};

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero_exp(rng: &mut FuzzRng, bound: i64) -> i64 {
    let e = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        e
    } else {
        -e
    }
}

pub fn word(rng: &mut FuzzRng, max_letter: u32, max_syllables: usize) -> ReducedWord {
    let count = rng.gen_range(0..=max_syllables);
    let mut w = ReducedWord::identity();
    for _ in 0..count {
        w.push(rng.gen_range(1..=max_letter), nonzero_exp(rng, 3));
    }
    w
}

/// Letters, concatenations and inverses only.
pub fn finite_expr(rng: &mut FuzzRng, max_letter: u32, depth: u32) -> WordExpr {
    if depth == 0 || rng.gen_bool(0.4) {
        return WordExpr::power(rng.gen_range(1..=max_letter), nonzero_exp(rng, 2));
    }
    if rng.gen_bool(0.25) {
        return WordExpr::inverse(finite_expr(rng, max_letter, depth - 1));
    }
    let n = rng.gen_range(0..=3);
    WordExpr::Concat((0..n).map(|_| finite_expr(rng, max_letter, depth - 1)).collect())
}

pub fn template(rng: &mut FuzzRng, depth: u32) -> TemplateExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        return TemplateExpr::leaf(rng.gen_range(1..=5), rng.gen_range(1..=3), nonzero_exp(rng, 2));
    }
    if rng.gen_bool(0.25) {
        return TemplateExpr::Inverse(Box::new(template(rng, depth - 1)));
    }
    let n = rng.gen_range(1..=3);
    TemplateExpr::Concat((0..n).map(|_| template(rng, depth - 1)).collect())
}

pub fn tail(rng: &mut FuzzRng) -> TailRule {
    match rng.gen_range(0..6) {
        0 => TailRule::Trivial,
        1 | 2 => TailRule::Interleaved((0..rng.gen_range(2..=3)).map(|_| template(rng, 2)).collect()),
        _ => TailRule::Template(template(rng, 2)),
    }
}

pub fn seq_spec(rng: &mut FuzzRng) -> SeqSpec {
    let prefix = (0..rng.gen_range(0..=3)).map(|_| finite_expr(rng, 6, 2)).collect();
    SeqSpec::new(prefix, tail(rng))
}

/// An omega or tau product.
pub fn product(rng: &mut FuzzRng) -> WordExpr {
    let spec = seq_spec(rng);
    if rng.gen_bool(0.5) {
        WordExpr::Omega(spec)
    } else {
        WordExpr::Tau(spec)
    }
}

/// Any valid expression: finite, a product, or a short combination of both.
pub fn expr(rng: &mut FuzzRng) -> WordExpr {
    match rng.gen_range(0..5) {
        0 => finite_expr(rng, 8, 3),
        1 | 2 => product(rng),
        3 => WordExpr::inverse(product(rng)),
        _ => WordExpr::Concat(
            (0..rng.gen_range(1..=3))
                .map(|_| if rng.gen_bool(0.6) { product(rng) } else { finite_expr(rng, 8, 2) })
                .collect(),
        ),
    }
}

pub fn bijection(rng: &mut FuzzRng) -> BijectionSpec {
    match rng.gen_range(0..5) {
        0 => {
            let mut points: Vec<u64> = (1..=12).collect();
            points.shuffle(rng);
            let mut cycles = Vec::new();
            let mut rest = &points[..rng.gen_range(0..=12)];
            while !rest.is_empty() {
                let len = rng.gen_range(1..=rest.len().min(4));
                cycles.push(rest[..len].to_vec());
                rest = &rest[len..];
            }
            BijectionSpec::FiniteSupport(cycles)
        }
        1 | 2 => {
            let period = rng.gen_range(1..=6);
            let mut perm: Vec<u64> = (0..period).collect();
            perm.shuffle(rng);
            BijectionSpec::BlockPermute { period, perm }
        }
        3 => BijectionSpec::transposition(rng.gen_range(1..=6), rng.gen_range(7..=15)),
        _ => BijectionSpec::Compose((0..rng.gen_range(2..=3)).map(|_| bijection(rng)).collect()),
    }
}

/// An expression whose winding vector is zero.
pub fn kernel_expr(rng: &mut FuzzRng) -> WordExpr {
    match rng.gen_range(0..4) {
        0 => {
            let p = product(rng);
            let q = apply_bijection(&p, &bijection(rng)).expect("generated inputs are valid");
            WordExpr::Concat(vec![q, WordExpr::inverse(p)])
        }
        1 => {
            let a = template(rng, 1);
            let b = template(rng, 1);
            let body = TemplateExpr::Concat(vec![
                a.clone(),
                b.clone(),
                TemplateExpr::Inverse(Box::new(a)),
                TemplateExpr::Inverse(Box::new(b)),
            ]);
            let spec = SeqSpec::new(Vec::new(), TailRule::Template(body));
            if rng.gen_bool(0.5) {
                WordExpr::Omega(spec)
            } else {
                WordExpr::Tau(spec)
            }
        }
        2 => {
            let x = finite_expr(rng, 6, 2);
            let y = finite_expr(rng, 6, 2);
            WordExpr::Concat(vec![x.clone(), y.clone(), WordExpr::inverse(x), WordExpr::inverse(y)])
        }
        _ => {
            // omega and tau products of the same factors have the same winding vector
            let spec = seq_spec(rng);
            WordExpr::Concat(vec![WordExpr::Omega(spec.clone()), WordExpr::inverse(WordExpr::Tau(spec))])
        }
    }
}

pub fn specker(rng: &mut FuzzRng) -> SpeckerVector {
    let prefix = (0..rng.gen_range(0..=5)).map(|_| rng.gen_range(-3..=3)).collect();
    let cycle = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(-3..=3)).collect();
    SpeckerVector::new(prefix, cycle).expect("cycle is nonempty")
}

fn finite_vector(rng: &mut FuzzRng) -> SpeckerVector {
    let coords: Vec<i64> = (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(-3..=3)).collect();
    SpeckerVector::finite(&coords)
}

/// Pairs that are related in the ways the quotient tests care about: equal,
/// differing by finitely many coordinates (with and without zero sum),
/// differing by an eventually constant or periodic tail, or unrelated.
pub fn specker_pair(rng: &mut FuzzRng) -> (SpeckerVector, SpeckerVector) {
    let v = specker(rng);
    let w = match rng.gen_range(0..6) {
        0 => v.clone(),
        1 => &v + &finite_vector(rng),
        2 => {
            let d = finite_vector(rng);
            let fix = SpeckerVector::unit(rng.gen_range(1..=8)).scale(-d.finite_sum().unwrap_or(0));
            &(&v + &d) + &fix
        }
        3 => &v + &SpeckerVector::tail_ones(rng.gen_range(1..=6)).scale(rng.gen_range(-2..=2)),
        4 => &v + &specker(rng),
        _ => specker(rng),
    };
    (v, w)
}

pub fn matrix(rng: &mut FuzzRng, max_dim: usize, bound: i64) -> PresentationMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    PresentationMatrix::new(entries).expect("rows have equal length")
}
