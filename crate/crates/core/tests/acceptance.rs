//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

use std::collections::{BTreeMap, HashMap};
use std::process::Command;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use wild_words::free_words::ReducedWord;
use wild_words::fuzz;
use wild_words::james_monoid::{
    all_models, all_specs, check_saturated, fiber, is_open_tuple_set, q_n, standard_nbhd, topologies_agree,
    words_up_to, FiniteSpaceModel, JamesWord, ModelBounds,
};
use wild_words::orders::{back_and_forth_embed, extend_bijection, theta, theta_inv, CountableOrderSpec};
use wild_words::rearrange::{eh_shuffle, is_bijection};
use wild_words::specker::{
    determinant, difference_map, finite_support_eq, griffiths_image, h1_from_presentation, ha_eq, smith_normal_form,
    PresentationMatrix, SpeckerVector,
};
use wild_words::word_expr::{
    apply_bijection, commutator_factorization, ell_infinity, ell_tau, equal_up_to, flattened_commutators,
};

fn verdict(number: u32, title: &str, ok: bool, detail: &str) {
    println!("criterion {number:>2} {}: {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {number} failed: {detail}");
}

fn w(s: &str) -> ReducedWord {
    s.parse().unwrap()
}

#[test]
fn criterion_01_projection_tower() {
    let mut rng = fuzz::rng(101);
    let mut failures = Vec::new();
    for i in 0..500 {
        let e = fuzz::expr(&mut rng);
        let mut upper = e.project(1).unwrap();
        for n in 1..=12 {
            let next = e.project(n + 1).unwrap();
            if next.delete_above(n) != upper {
                failures.push(format!("sample {i}, n = {n}"));
            }
            upper = next;
        }
    }
    verdict(
        1,
        "delete_above(project(e, n+1), n) = project(e, n)",
        failures.is_empty(),
        &format!("500 expressions, n <= 12, {} mismatches {:?}", failures.len(), failures.first()),
    );
}

#[test]
fn criterion_02_ell_tau_against_ell_infinity() {
    let verdict_2 = equal_up_to(&ell_infinity(), &ell_tau(), 2).unwrap();
    let witness = verdict_2.witness.clone();
    let witness_ok = witness
        .as_ref()
        .is_some_and(|x| x.n == 2 && x.left == w("l1 l2") && x.right == w("l2 l1"));
    let eta_ok = ell_infinity().eta().unwrap() == SpeckerVector::all_ones()
        && ell_tau().eta().unwrap() == SpeckerVector::all_ones();
    verdict(
        2,
        "projections differ at n = 2, winding vectors are both all-ones",
        witness_ok && eta_ok,
        &match &witness {
            Some(x) => format!("witness at n = {}: {} vs {}, eta equal: {eta_ok}", x.n, x.left, x.right),
            None => format!("no witness, eta equal: {eta_ok}"),
        },
    );
}

#[test]
fn criterion_03_eckmann_hilton_shuffle() {
    let p = flattened_commutators();
    let q = apply_bijection(&p, &eh_shuffle()).unwrap();
    let nontrivial_before = !p.project(2).unwrap().is_identity();
    let bad: Vec<u32> = (1..=12).filter(|&n| !q.project(n).unwrap().is_identity()).collect();
    verdict(
        3,
        "shuffled flattened commutator product projects to the identity",
        nontrivial_before && bad.is_empty(),
        &format!("n <= 12, nonidentity at {bad:?}"),
    );
}

#[test]
fn criterion_04_eta_invariance() {
    let mut rng = fuzz::rng(404);
    let mut failures = 0;
    let mut changed_projection = 0;
    for _ in 0..300 {
        let p = fuzz::product(&mut rng);
        let phi = fuzz::bijection(&mut rng);
        let q = apply_bijection(&p, &phi).unwrap();
        if p.eta().unwrap() != q.eta().unwrap() {
            failures += 1;
        }
        if !equal_up_to(&p, &q, 12).unwrap().equal() {
            changed_projection += 1;
        }
    }
    verdict(
        4,
        "eta(apply_bijection(p, phi)) = eta(p)",
        failures == 0,
        &format!("300 pairs, {failures} changed winding vectors, {changed_projection} changed projections"),
    );
}

#[test]
fn criterion_05_commutator_factorization() {
    let mut rng = fuzz::rng(505);
    let depth = 10;
    let mut mismatches = 0;
    let mut low_letters = 0;
    for _ in 0..200 {
        let e = fuzz::kernel_expr(&mut rng);
        let f = commutator_factorization(&e, depth).unwrap();
        let g = f.to_expr();
        for n in 1..=depth {
            if g.project(n).unwrap() != e.project(n).unwrap() {
                mismatches += 1;
            }
        }
        for (i, stage) in f.stages.iter().enumerate() {
            let stage_n = i as u32 + 1;
            for (a, b) in stage {
                if a.min_letter().is_some_and(|l| l < stage_n) || b.min_letter().is_some_and(|l| l < stage_n) {
                    low_letters += 1;
                }
            }
        }
    }
    verdict(
        5,
        "commutator stages reproduce every projection and stage n uses letters >= n",
        mismatches == 0 && low_letters == 0,
        &format!("200 expressions, depth {depth}, {mismatches} projection mismatches, {low_letters} low letters"),
    );
}

#[test]
fn criterion_06_harmonic_archipelago() {
    let mut rng = fuzz::rng(606);
    let mut counterexamples = Vec::new();
    for _ in 0..500 {
        let (v, x) = fuzz::specker_pair(&mut rng);
        let lhs = ha_eq(&v, &x);
        let rhs = finite_support_eq(&difference_map(&v), &difference_map(&x));
        if lhs != rhs {
            counterexamples.push((v, x, lhs, rhs));
        }
    }
    let generators_ok = (1..=50).all(|n| {
        difference_map(&(SpeckerVector::unit(n) - SpeckerVector::unit(n + 1))).has_finite_support()
    });
    let first = counterexamples
        .first()
        .map(|(v, x, l, r)| format!("v = {v}, w = {x}: ha_eq {l}, finite_support_eq of differences {r}"))
        .unwrap_or_default();
    verdict(
        6,
        "ha_eq(v, w) iff finite_support_eq(D(v), D(w)); D(e_n - e_(n+1)) finitely supported",
        counterexamples.is_empty() && generators_ok,
        &format!(
            "500 pairs, {} counterexamples, generators ok: {generators_ok}; first: {first}",
            counterexamples.len()
        ),
    );
}

#[test]
fn criterion_07_griffiths() {
    let mut rng = fuzz::rng(707);
    let mut failures = 0;
    for _ in 0..200 {
        let v = fuzz::specker(&mut rng);
        let g = griffiths_image(&v);
        let odd_ok = (1..=40).all(|n| g.odd.coord(n) == if n % 2 == 1 { v.coord(n) } else { 0 });
        if g.reassemble() != v || !g.is_trivial() || !odd_ok {
            failures += 1;
        }
    }
    verdict(
        7,
        "odd/even split reassembles and the image is trivial",
        failures == 0,
        &format!("200 vectors, {failures} failures"),
    );
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn criterion_08_james_fibers() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for letters in 1..=3 {
        let names: Vec<&str> = ["e", "a", "b", "c"][..=letters].to_vec();
        let model = FiniteSpaceModel::discrete(&names).unwrap();
        for n in 0..=8 {
            // independent count: sort every tuple of X^n by its word
            let mut by_word: HashMap<JamesWord, usize> = HashMap::new();
            for t in model.tuples(n) {
                *by_word.entry(q_n(&model, &t)).or_default() += 1;
            }
            for word in words_up_to(&model, n) {
                let f = fiber(&model, &word, n).unwrap();
                let distinct: std::collections::BTreeSet<_> = f.iter().collect();
                let ok = f.len() == binomial(n, word.len())
                    && by_word.get(&word) == Some(&f.len())
                    && distinct.len() == f.len()
                    && f.iter().all(|t| q_n(&model, t) == word);
                checked += 1;
                if !ok {
                    failures.push(format!("{} letters, n = {n}, word {}", letters, model.describe_word(&word)));
                }
            }
        }
    }
    verdict(
        8,
        "|q_n^-1(w)| = C(n, |w|)",
        failures.is_empty(),
        &format!("{checked} (word, n) pairs over <= 3 letters, n <= 8, failures {:?}", failures.first()),
    );
}

#[test]
fn criterion_09_saturation_and_topology() {
    let bounds = ModelBounds::default();
    let models = all_models(4);
    let mut nbhds = 0usize;
    let mut bad_nbhds = 0usize;
    let mut topo = 0usize;
    let mut bad_topo = Vec::new();
    for m in &models {
        for n in 0..=3 {
            for word in words_up_to(m, n) {
                for spec in all_specs(m, &word, n) {
                    let nb = standard_nbhd(m, &word, &spec).unwrap();
                    nbhds += 1;
                    if !check_saturated(m, &nb.tuples, n) || !is_open_tuple_set(m, &nb.tuples) {
                        bad_nbhds += 1;
                    }
                }
            }
            let r = topologies_agree(m, n, &bounds).unwrap();
            topo += 1;
            if !r.consistent() {
                bad_topo.push(format!("{m}, n = {n}"));
            }
        }
    }
    verdict(
        9,
        "standard neighborhoods saturated and open; topologies agree; T1 and closedness as predicted",
        bad_nbhds == 0 && bad_topo.is_empty(),
        &format!(
            "{} models, {nbhds} neighborhoods ({bad_nbhds} bad), {topo} topology checks, failures {:?}",
            models.len(),
            bad_topo.first()
        ),
    );
}

/// Invariant factors from gcds of all k x k minors, by cofactor expansion.
fn determinantal_invariants(a: &[Vec<i64>]) -> (usize, Vec<i64>) {
    fn det(m: &[Vec<i64>]) -> i64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum()
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
            .collect()
    }
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let (rows, cols) = (a.len(), a[0].len());
    let mut divisors = vec![1i64];
    for k in 1..=rows.min(cols) {
        let mut g = 0;
        for r in subsets(rows, k) {
            for c in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| a[i][j]).collect()).collect();
                g = gcd(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let torsion = divisors.windows(2).map(|d| d[1] / d[0]).filter(|&t| t > 1).collect();
    (cols - rank, torsion)
}

#[test]
fn criterion_10_smith_normal_form() {
    let mut rng = fuzz::rng(1010);
    let mut snf_failures = 0;
    for _ in 0..300 {
        let a = fuzz::matrix(&mut rng, 4, 5);
        let f = smith_normal_form(&a);
        let product_ok = f.u.mul(&a).mul(&f.v) == f.s;
        let d = f.s.diagonal();
        let chain_ok = f.s.is_diagonal()
            && d.iter().all(|&x| x >= 0)
            && d.windows(2).all(|p| if p[0] == 0 { p[1] == 0 } else { p[1] % p[0] == 0 });
        let unimodular = determinant(&f.u).abs() == 1 && determinant(&f.v).abs() == 1;
        if !(product_ok && chain_ok && unimodular) {
            snf_failures += 1;
        }
    }
    let mut h1_failures = 0;
    for _ in 0..300 {
        let entries: Vec<Vec<i64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let a = PresentationMatrix::new(entries.clone()).unwrap();
        let g = h1_from_presentation(&a);
        if (g.free_rank, g.torsion.clone()) != determinantal_invariants(&entries) {
            h1_failures += 1;
        }
    }
    verdict(
        10,
        "U A V = S with divisibility chain and unimodular U, V; H_1 matches determinantal divisors",
        snf_failures == 0 && h1_failures == 0,
        &format!("300 matrices up to 4x4: {snf_failures} failures; 300 presentations 3x3: {h1_failures} failures"),
    );
}

/// Endpoints of the `k`-th middle third removed at level `n`, from ternary digits.
fn removed_interval(n: u32, k: u64) -> (BigRational, BigRational) {
    let three = BigInt::from(3);
    let mut left = BigRational::zero();
    let mut scale = BigRational::one();
    for i in (0..n - 1).rev() {
        scale /= three.clone();
        if (k - 1) >> i & 1 == 1 {
            left += scale.clone() * BigRational::from_integer(BigInt::from(2));
        }
    }
    scale /= three;
    (left.clone() + scale.clone(), left + scale * BigRational::from_integer(BigInt::from(2)))
}

#[test]
fn criterion_11_order_machinery() {
    let mut theta_failures = 0;
    let mut intervals = Vec::new();
    for m in 1..=4096u64 {
        let c = theta(m);
        let level = 64 - m.leading_zeros();
        let k = m - (1 << (level - 1)) + 1;
        let (lo, hi) = c.endpoints();
        let width = BigRational::new(BigInt::one(), BigInt::from(3).pow(c.level()));
        if theta_inv(&c) != m.into() || (lo.clone(), hi.clone()) != removed_interval(level, k) || &hi - &lo != width {
            theta_failures += 1;
        }
        intervals.push((lo, hi));
    }
    intervals.sort();
    let disjoint = intervals.windows(2).all(|p| p[0].1 < p[1].0);

    let mut rng = fuzz::rng(1111);
    let mut perm: Vec<usize> = (0..12).collect();
    perm.shuffle(&mut rng);
    let explicit = CountableOrderSpec::ExplicitFinite(
        (0..12).map(|i| (0..12).map(|j| perm[i] < perm[j]).collect()).collect(),
    );
    let specs = [
        CountableOrderSpec::FiniteChain(30),
        CountableOrderSpec::Omega,
        CountableOrderSpec::OmegaPlusOmega,
        CountableOrderSpec::IntegersZeta,
        CountableOrderSpec::Rationals,
        explicit,
    ];
    let mut embed_failures = 0;
    for spec in &specs {
        let size = spec.len().unwrap_or(64);
        let mut emb = back_and_forth_embed(spec.clone()).unwrap();
        let images = emb.images(size);
        for _ in 0..200 {
            let i = rng.gen_range(0..size);
            let j = rng.gen_range(0..size);
            if spec.cmp_elements(i, j) != images[i].cmp(&images[j]) {
                embed_failures += 1;
            }
        }
    }

    let mut square_failures = 0;
    for _ in 0..50 {
        let size = rng.gen_range(1..=8);
        let random_order = |rng: &mut fuzz::FuzzRng| {
            let mut p: Vec<usize> = (0..size).collect();
            p.shuffle(rng);
            CountableOrderSpec::ExplicitFinite((0..size).map(|i| (0..size).map(|j| p[i] < p[j]).collect()).collect())
        };
        let mut mu = back_and_forth_embed(random_order(&mut rng)).unwrap();
        let mut nu = back_and_forth_embed(CountableOrderSpec::FiniteChain(size)).unwrap();
        let mut psi: Vec<usize> = (0..size).collect();
        psi.shuffle(&mut rng);
        let ext = extend_bijection(&mut mu, &mut nu, &psi).unwrap();
        for (i, &target) in psi.iter().enumerate() {
            if ext.psi_component(&mu.image(i).unwrap()) != nu.image(target).unwrap() {
                square_failures += 1;
            }
        }
        if !is_bijection(&ext, 500) {
            square_failures += 1;
        }
    }
    verdict(
        11,
        "theta exact and invertible; embeddings preserve order; extended bijections commute",
        theta_failures == 0 && disjoint && embed_failures == 0 && square_failures == 0,
        &format!(
            "m <= 4096: {theta_failures} theta failures, disjoint {disjoint}; {embed_failures} embedding failures; {square_failures} square failures"
        ),
    );
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_wild-words"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_12_cli_golden_reports() {
    let golden_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let mut problems = Vec::new();
    let mut reports = BTreeMap::new();
    for target in ["H", "HA", "griffiths"] {
        let args = ["abelianize", "--target", target, "--seed", "7", "--budget", "10", "--format", "json"];
        let (code1, first) = run_cli(&args);
        let (code2, second) = run_cli(&args);
        if code1 != 0 || code2 != 0 {
            problems.push(format!("{target}: exit codes {code1}, {code2}"));
        }
        if first != second {
            problems.push(format!("{target}: runs differ"));
        }
        let path = format!("{golden_dir}/abelianize_{target}.json");
        match std::fs::read(&path) {
            Ok(golden) if golden == first => {}
            Ok(_) => problems.push(format!("{target}: output differs from {path}")),
            Err(e) => problems.push(format!("{target}: cannot read {path}: {e}")),
        }
        reports.insert(target, serde_json::from_slice::<serde_json::Value>(&first).unwrap());
    }
    let images = |t: &str| reports[t]["images"].as_array().unwrap().clone();
    if images("H")[1]["eta"]["text"] != "; 1" {
        problems.push("H image of ell_tau is not all-ones".into());
    }
    if images("HA")[2]["trivial"] != true {
        problems.push("HA image of the commutator product is not trivial".into());
    }
    if !images("griffiths").iter().all(|r| r["image"] == "trivial" && r["reassembles"] == true) {
        problems.push("griffiths report has a nontrivial image".into());
    }
    verdict(
        12,
        "H, HA and griffiths reports byte-identical across runs with a fixed seed",
        problems.is_empty(),
        &format!("problems: {problems:?}"),
    );
}
