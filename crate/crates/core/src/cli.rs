//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a run produces a
//! conclusive negative answer (an inequality witness or a failed check).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::free_words::ReducedWord;
use crate::fuzz;
use crate::james_monoid::{
    all_specs, check_saturated, fiber, is_open_tuple_set, standard_nbhd, topologies_agree, words_up_to,
    FiniteSpaceModel, ModelBounds, StandardNbhdSpec,
};
use crate::orders::{self, back_and_forth_embed, CantorComponent, CountableOrderSpec};
use crate::rearrange::{eh_shuffle, BijectionSpec};
use crate::specker::{
    griffiths_image, ha_representative, partial_sums, smith_normal_form, PresentationMatrix, SpeckerVector,
};
use crate::word_expr::{
    apply_bijection, builtin, commutator_factorization, equal_up_to, parse_expr, WordExpr, BUILTIN_NAMES,
    DEFAULT_DEPTH,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wild-words", version, about = "Exact word calculus for Hawaiian-earring loops")]
pub struct Cli {
    /// Truncation depth: projections are compared in F_1 .. F_depth.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,

    /// Seed for generated samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of generated samples.
    #[arg(long, global = true, default_value_t = 20)]
    pub budget: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Expressions given by builtin name or JSON file; builtins are taken first.
#[derive(Debug, Clone, Default, Args)]
pub struct ExprSources {
    /// Builtin expression (ell_infinity, ell_tau, commutator_omega, flattened_commutators, identity).
    #[arg(long)]
    pub builtin: Vec<String>,

    /// Expression file in JSON form.
    #[arg(long)]
    pub file: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Image of an expression in the free group F_n.
    Project {
        #[command(flatten)]
        src: ExprSources,
        #[arg(long)]
        n: u32,
    },
    /// Winding vector in Z^N.
    Eta {
        #[command(flatten)]
        src: ExprSources,
    },
    /// Compare two expressions in F_1 .. F_depth.
    Equal {
        #[command(flatten)]
        src: ExprSources,
    },
    /// Rearrange the factors of a product and report the result.
    Shuffle {
        #[command(flatten)]
        src: ExprSources,
        /// Bijection file in JSON form.
        #[arg(long, conflicts_with = "named")]
        bijection: Option<PathBuf>,
        /// Builtin bijection: `eh` (swap the middle pair of every block of four) or `identity`.
        #[arg(long)]
        named: Option<String>,
    },
    /// Split a zero-winding expression into stages of commutators.
    Factor {
        #[command(flatten)]
        src: ExprSources,
    },
    /// Image in Z^N, in Z^N modulo consecutive differences, or in the trivial group.
    /// Without an expression, reports builtins and `--budget` generated samples.
    Abelianize {
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        src: ExprSources,
        /// A vector in `prefix; cycle` form instead of an expression.
        #[arg(long)]
        vector: Option<String>,
    },
    /// Checks on a finite model of the James reduced product.
    James {
        /// Model file: `points: e a b; base: e; le: e<a, a<b`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_points: usize,
        #[arg(long, default_value_t = 3)]
        max_level: usize,
        #[command(subcommand)]
        action: JamesAction,
    },
    /// Cantor component indexing and order embeddings.
    Orders {
        #[command(subcommand)]
        action: OrdersAction,
    },
    /// Image of an expression in a product of finitely presented abelian groups.
    Wedge {
        /// Blocks and layout, see the README for the format.
        #[arg(long)]
        presentations: PathBuf,
        #[command(flatten)]
        src: ExprSources,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "H")]
    H,
    #[value(name = "HA")]
    Ha,
    #[value(name = "griffiths")]
    Griffiths,
}

#[derive(Debug, Subcommand)]
pub enum JamesAction {
    /// Fiber sizes of q_n against binomial coefficients.
    Fibers {
        #[arg(long)]
        n: usize,
    },
    /// One standard neighborhood.
    Nbhd {
        /// Word as space-separated point names, `1` for the empty word.
        #[arg(long)]
        word: String,
        /// Letter opens separated by `;`, each a comma-separated list of points.
        #[arg(long, default_value = "")]
        opens: String,
        /// Open set around the basepoint.
        #[arg(long)]
        v: String,
        #[arg(long)]
        n: usize,
    },
    /// Saturation and openness of every standard neighborhood in X^k, k <= n.
    Saturation {
        #[arg(long)]
        n: usize,
    },
    /// Quotient against subspace topology on J_n, plus T1 and closedness.
    Topology {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrdersAction {
    /// The component assigned to factor m.
    Theta {
        #[arg(long)]
        m: u64,
    },
    /// The factor assigned to component I(level, slot).
    Inverse {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        slot: u64,
    },
    /// Order of the components of factors m1 and m2.
    Compare {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
    },
    /// Images of the first elements of a countable order.
    Embed {
        /// omega, omega+omega, zeta, rationals, or chain:N.
        #[arg(long)]
        order: String,
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
}

/// Resolved settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub depth: u32,
    pub seed: u64,
    pub budget: usize,
    pub format: Format,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        if cli.depth == 0 {
            return Err(Error::malformed("--depth must be at least 1"));
        }
        Ok(RunConfig {
            depth: cli.depth,
            seed: cli.seed,
            budget: cli.budget,
            format: cli.format,
        })
    }
}

/// What a command prints, in both formats, and how it exits.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub exit: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            exit: EXIT_OK,
        }
    }

    fn exit_if(mut self, negative: bool) -> Self {
        if negative {
            self.exit = EXIT_NEGATIVE;
        }
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut s = self.text.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
            Format::Json => format!("{}\n", self.json),
        }
    }
}

/// Parses arguments, runs the command, prints, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let format = cli.format;
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            report.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Project { src, n } => cmd_project(&one_expr(src)?, *n),
        Command::Eta { src } => cmd_eta(&one_expr(src)?),
        Command::Equal { src } => {
            let exprs = load_exprs(src)?;
            let [(la, a), (lb, b)] = <[_; 2]>::try_from(exprs)
                .map_err(|v: Vec<_>| Error::malformed(format!("equal takes two expressions, got {}", v.len())))?;
            cmd_equal(&la, &a, &lb, &b, cfg.depth)
        }
        Command::Shuffle { src, bijection, named } => {
            let phi = match (bijection, named.as_deref()) {
                (Some(path), _) => {
                    let value: Value = serde_json::from_str(&read(path)?)
                        .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
                    BijectionSpec::from_json(&value)?
                }
                (None, Some("eh")) => eh_shuffle(),
                (None, Some("identity")) => BijectionSpec::identity(),
                (None, Some(other)) => return Err(Error::malformed(format!("unknown bijection `{other}`"))),
                (None, None) => return Err(Error::malformed("shuffle needs --bijection or --named")),
            };
            cmd_shuffle(&one_expr(src)?, &phi, cfg.depth)
        }
        Command::Factor { src } => cmd_factor(&one_expr(src)?, cfg.depth),
        Command::Abelianize { target, src, vector } => {
            let items = match vector {
                Some(text) => vec![Sample::Vector(text.parse()?)],
                None if src.builtin.is_empty() && src.file.is_empty() => default_samples(&cfg),
                None => load_exprs(src)?
                    .into_iter()
                    .map(|(label, e)| Sample::Expr { label, expr: e, show: false })
                    .collect(),
            };
            cmd_abelianize(*target, &items, &cfg)
        }
        Command::James {
            model,
            max_points,
            max_level,
            action,
        } => {
            let m = FiniteSpaceModel::parse(&read(model)?)?;
            let bounds = ModelBounds {
                max_points: *max_points,
                max_level: *max_level,
            };
            cmd_james(&m, action, &bounds)
        }
        Command::Orders { action } => cmd_orders(action),
        Command::Wedge { presentations, src } => {
            let layout = WedgeLayout::parse(&read(presentations)?)?;
            cmd_wedge(&layout, &one_expr(src)?, cfg.depth)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::malformed(format!("cannot read {}: {e}", path.display())))
}

fn load_exprs(src: &ExprSources) -> Result<Vec<(String, WordExpr)>> {
    let mut out = Vec::new();
    for name in &src.builtin {
        let e = builtin(name).ok_or_else(|| {
            Error::malformed(format!("unknown builtin `{name}`; expected one of {}", BUILTIN_NAMES.join(", ")))
        })?;
        out.push((name.clone(), e));
    }
    for path in &src.file {
        let e = parse_expr(&read(path)?).map_err(|e| Error::malformed(format!("{}: {e}", path.display())))?;
        e.validate()?;
        out.push((path.display().to_string(), e));
    }
    Ok(out)
}

fn one_expr(src: &ExprSources) -> Result<WordExpr> {
    let mut exprs = load_exprs(src)?;
    if exprs.len() != 1 {
        return Err(Error::malformed(format!("expected one expression, got {}", exprs.len())));
    }
    Ok(exprs.pop().unwrap().1)
}

pub fn cmd_project(e: &WordExpr, n: u32) -> Result<Report> {
    let w = e.project(n)?;
    Ok(Report::ok(w.to_string(), json!({"n": n, "word": w.to_string()})))
}

fn vector_json(v: &SpeckerVector) -> Value {
    json!({"text": v.to_string(), "prefix": v.prefix(), "cycle": v.cycle()})
}

pub fn cmd_eta(e: &WordExpr) -> Result<Report> {
    let v = e.eta()?;
    Ok(Report::ok(v.to_string(), json!({"eta": vector_json(&v)})))
}

pub fn cmd_equal(la: &str, a: &WordExpr, lb: &str, b: &WordExpr, depth: u32) -> Result<Report> {
    let verdict = equal_up_to(a, b, depth)?;
    Ok(match &verdict.witness {
        None => Report::ok(
            format!("{la} and {lb} agree in F_1 .. F_{depth}"),
            json!({"equal": true, "depth": depth, "witness": null}),
        ),
        Some(w) => Report::ok(
            format!(
                "{la} and {lb} differ at n = {}\n  {la}: {}\n  {lb}: {}",
                w.n, w.left, w.right
            ),
            json!({
                "equal": false,
                "depth": depth,
                "witness": {"n": w.n, "left": w.left.to_string(), "right": w.right.to_string()},
            }),
        )
        .exit_if(true),
    })
}

fn projections(e: &WordExpr, depth: u32) -> Result<Vec<ReducedWord>> {
    (1..=depth).map(|n| e.project(n)).collect()
}

pub fn cmd_shuffle(e: &WordExpr, phi: &BijectionSpec, depth: u32) -> Result<Report> {
    let result = apply_bijection(e, phi)?;
    let before = e.eta()?;
    let after = result.eta()?;
    let projs = projections(&result, depth)?;
    let mut text = format!(
        "result: {}\neta before: {before}\neta after:  {after}\n",
        result.to_canonical_json()
    );
    for (n, w) in projs.iter().enumerate() {
        text.push_str(&format!("F_{}: {w}\n", n + 1));
    }
    let unchanged = before == after;
    Ok(Report::ok(
        text,
        json!({
            "bijection": phi.to_json(),
            "result": result.to_json(),
            "eta_before": vector_json(&before),
            "eta_after": vector_json(&after),
            "eta_unchanged": unchanged,
            "projections": projs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }),
    )
    .exit_if(!unchanged))
}

pub fn cmd_factor(e: &WordExpr, depth: u32) -> Result<Report> {
    let f = commutator_factorization(e, depth)?;
    let verdict = equal_up_to(e, &f.to_expr(), depth)?;
    let mut text = String::new();
    let mut stages = Vec::new();
    for (i, stage) in f.stages.iter().enumerate() {
        let pairs: Vec<String> = stage.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
        text.push_str(&format!("stage {}: {}\n", i + 1, if pairs.is_empty() { "1".into() } else { pairs.join(" ") }));
        stages.push(json!(stage
            .iter()
            .map(|(a, b)| json!([a.to_string(), b.to_string()]))
            .collect::<Vec<_>>()));
    }
    text.push_str(&format!(
        "projections agree in F_1 .. F_{depth}: {}",
        verdict.equal()
    ));
    Ok(Report::ok(
        text,
        json!({"depth": depth, "stages": stages, "verified": verdict.equal()}),
    )
    .exit_if(!verdict.equal()))
}

/// One input to `abelianize`.
#[derive(Debug, Clone)]
pub enum Sample {
    Expr { label: String, expr: WordExpr, show: bool },
    Vector(SpeckerVector),
}

/// The builtin products followed by `budget` generated expressions.
pub fn default_samples(cfg: &RunConfig) -> Vec<Sample> {
    let mut out: Vec<Sample> = ["ell_infinity", "ell_tau", "commutator_omega"]
        .iter()
        .map(|&name| Sample::Expr {
            label: name.to_string(),
            expr: builtin(name).unwrap(),
            show: false,
        })
        .collect();
    let mut rng = fuzz::rng(cfg.seed);
    for i in 0..cfg.budget {
        out.push(Sample::Expr {
            label: format!("sample {}", i + 1),
            expr: fuzz::expr(&mut rng),
            show: true,
        });
    }
    out
}

pub fn cmd_abelianize(target: Target, items: &[Sample], cfg: &RunConfig) -> Result<Report> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for item in items {
        let (label, v, shown) = match item {
            Sample::Expr { label, expr, show } => (label.clone(), expr.eta()?, show.then(|| expr.to_json())),
            Sample::Vector(v) => (v.to_string(), v.clone(), None),
        };
        let mut row = json!({"label": label, "eta": vector_json(&v)});
        if let Some(e) = shown {
            row["expr"] = e;
        }
        match target {
            Target::H => {
                text.push_str(&format!("{label}: {v}\n"));
            }
            Target::Ha => {
                let rep = ha_representative(&v);
                row["representative"] = vector_json(&rep);
                row["trivial"] = json!(rep.is_zero());
                // the same class in Z^N modulo finite support, when it stays eventually periodic
                row["partial_sums"] = partial_sums(&v).map_or(Value::Null, |s| vector_json(&s));
                let class = if rep.is_zero() { "trivial".to_string() } else { format!("class of {rep}") };
                text.push_str(&format!("{label}: {v} -> {class}\n"));
            }
            Target::Griffiths => {
                let g = griffiths_image(&v);
                let reassembles = g.reassemble() == v;
                all_ok &= reassembles && g.is_trivial();
                row["odd"] = vector_json(&g.odd);
                row["even"] = vector_json(&g.even);
                row["reassembles"] = json!(reassembles);
                row["image"] = json!("trivial");
                text.push_str(&format!("{label}: trivial (odd {}, even {})\n", g.odd, g.even));
            }
        }
        rows.push(row);
    }
    let target_name = match target {
        Target::H => "H",
        Target::Ha => "HA",
        Target::Griffiths => "griffiths",
    };
    Ok(Report::ok(
        text,
        json!({"target": target_name, "seed": cfg.seed, "budget": cfg.budget, "images": rows}),
    )
    .exit_if(!all_ok))
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

pub fn cmd_james(m: &FiniteSpaceModel, action: &JamesAction, bounds: &ModelBounds) -> Result<Report> {
    match action {
        JamesAction::Fibers { n } => {
            let n = *n;
            if n > 8 {
                return Err(Error::SizeBound(format!("fiber tables stop at n = 8, got {n}")));
            }
            let mut text = format!("model: {m}\n len  words  fiber  C(n,len)\n");
            let mut rows = Vec::new();
            let mut ok = true;
            for len in 0..=n {
                let words: Vec<_> = words_up_to(m, len).into_iter().filter(|w| w.len() == len).collect();
                let sizes: Vec<usize> = words.iter().map(|w| fiber(m, w, n).map(|f| f.len())).collect::<Result<_>>()?;
                let expected = binomial(n, len);
                let agree = sizes.iter().all(|&s| s as u64 == expected);
                ok &= agree;
                let shown = sizes.first().copied().unwrap_or(0);
                text.push_str(&format!("{len:>4}  {:>5}  {shown:>5}  {expected:>8}\n", words.len()));
                rows.push(json!({"length": len, "words": words.len(), "fiber": shown, "binomial": expected, "ok": agree}));
            }
            Ok(Report::ok(text, json!({"n": n, "rows": rows, "ok": ok})).exit_if(!ok))
        }
        JamesAction::Nbhd { word, opens, v, n } => {
            let w = m.parse_word(word)?;
            let letter_opens = opens
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| m.parse_set(s))
                .collect::<Result<Vec<_>>>()?;
            let spec = StandardNbhdSpec {
                letter_opens,
                base_open: m.parse_set(v)?,
                n: *n,
            };
            let nbhd = standard_nbhd(m, &w, &spec)?;
            let saturated = check_saturated(m, &nbhd.tuples, *n);
            let open = is_open_tuple_set(m, &nbhd.tuples);
            let tuples: Vec<String> = nbhd.tuples.iter().map(|t| m.describe_tuple(t)).collect();
            let image: Vec<String> = nbhd.image.iter().map(|w| m.describe_word(w)).collect();
            let text = format!(
                "tuples ({}): {}\nimage: {}\nsaturated: {saturated}\nopen: {open}",
                tuples.len(),
                tuples.join(" "),
                image.join(", ")
            );
            Ok(Report::ok(
                text,
                json!({"tuples": tuples, "image": image, "saturated": saturated, "open": open}),
            )
            .exit_if(!(saturated && open)))
        }
        JamesAction::Saturation { n } => {
            bounds.check(m, *n)?;
            let mut checked = 0usize;
            let mut failures = Vec::new();
            for k in 0..=*n {
                for w in words_up_to(m, k) {
                    for spec in all_specs(m, &w, k) {
                        let nbhd = standard_nbhd(m, &w, &spec)?;
                        checked += 1;
                        if !(check_saturated(m, &nbhd.tuples, k) && is_open_tuple_set(m, &nbhd.tuples)) {
                            let opens: Vec<String> = spec.letter_opens.iter().map(|&u| m.describe_set(u)).collect();
                            failures.push(format!(
                                "n = {k}, word {}, U = [{}], V = {}",
                                m.describe_word(&w),
                                opens.join(" "),
                                m.describe_set(spec.base_open)
                            ));
                        }
                    }
                }
            }
            let mut text = format!("standard neighborhoods checked: {checked}\nfailures: {}\n", failures.len());
            for f in &failures {
                text.push_str(&format!("  {f}\n"));
            }
            Ok(Report::ok(text, json!({"checked": checked, "failures": failures})).exit_if(!failures.is_empty()))
        }
        JamesAction::Topology { n } => {
            let r = topologies_agree(m, *n, bounds)?;
            let mut text = format!(
                "J_{n}: quotient and subspace topologies {}\nX T1: {}\nJ_{n} T1: {}\n{{e}} closed: {}\nJ_{n} closed in J_{}: {}\n",
                if r.agrees { "agree" } else { "differ" },
                r.model_t1,
                r.jn_t1,
                r.base_closed,
                n + 1,
                r.closed_in_next
            );
            let mut disagreement = Value::Null;
            if let Some(d) = &r.disagreement {
                let names = |s: &std::collections::BTreeSet<_>| s.iter().map(|w| m.describe_word(w)).collect::<Vec<_>>();
                text.push_str(&format!(
                    "word {}: open {:?} in the quotient, {:?} traced from J_{}\n",
                    m.describe_word(&d.word),
                    names(&d.quotient_open),
                    names(&d.subspace_open),
                    d.ambient
                ));
                disagreement = json!({
                    "word": m.describe_word(&d.word),
                    "ambient": d.ambient,
                    "quotient_open": names(&d.quotient_open),
                    "subspace_open": names(&d.subspace_open),
                });
            }
            Ok(Report::ok(
                text,
                json!({
                    "n": n,
                    "agree": r.agrees,
                    "disagreement": disagreement,
                    "model_t1": r.model_t1,
                    "jn_t1": r.jn_t1,
                    "base_closed": r.base_closed,
                    "closed_in_next": r.closed_in_next,
                    "consistent": r.consistent(),
                }),
            )
            .exit_if(!r.consistent()))
        }
    }
}

fn component_json(c: &CantorComponent) -> Value {
    let (lo, hi) = c.endpoints();
    json!({
        "level": c.level(),
        "slot": c.slot().to_string(),
        "lo": lo.to_string(),
        "hi": hi.to_string(),
        "m": c.theta_index().to_string(),
    })
}

fn parse_order(name: &str) -> Result<CountableOrderSpec> {
    Ok(match name {
        "omega" => CountableOrderSpec::Omega,
        "omega+omega" => CountableOrderSpec::OmegaPlusOmega,
        "zeta" => CountableOrderSpec::IntegersZeta,
        "rationals" => CountableOrderSpec::Rationals,
        other => match other.strip_prefix("chain:") {
            Some(n) => CountableOrderSpec::FiniteChain(
                n.parse().map_err(|_| Error::malformed(format!("bad chain length `{n}`")))?,
            ),
            None => return Err(Error::malformed(format!("unknown order `{other}`"))),
        },
    })
}

pub fn cmd_orders(action: &OrdersAction) -> Result<Report> {
    match action {
        OrdersAction::Theta { m } => {
            if *m == 0 {
                return Err(Error::malformed("factors are numbered from 1"));
            }
            let c = orders::theta(*m);
            Ok(Report::ok(c.to_string(), component_json(&c)))
        }
        OrdersAction::Inverse { level, slot } => {
            let c = CantorComponent::new(*level, (*slot).into())?;
            let m = orders::theta_inv(&c);
            Ok(Report::ok(m.to_string(), json!({"m": m.to_string(), "component": component_json(&c)})))
        }
        OrdersAction::Compare { m1, m2 } => {
            if *m1 == 0 || *m2 == 0 {
                return Err(Error::malformed("factors are numbered from 1"));
            }
            let sym = match orders::compare(*m1, *m2) {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            Ok(Report::ok(
                format!("theta({m1}) {sym} theta({m2})"),
                json!({"m1": m1, "m2": m2, "order": sym}),
            ))
        }
        OrdersAction::Embed { order, count } => {
            let spec = parse_order(order)?;
            let mut emb = back_and_forth_embed(spec.clone())?;
            let images = emb.images(*count);
            let preserving = (0..images.len())
                .all(|i| (0..images.len()).all(|j| spec.cmp_elements(i, j) == images[i].cmp(&images[j])));
            let mut text = String::new();
            for (i, c) in images.iter().enumerate() {
                text.push_str(&format!("{i} -> {c}\n"));
            }
            text.push_str(&format!("order preserving: {preserving}"));
            Ok(Report::ok(
                text,
                json!({"order": order, "images": images.iter().map(component_json).collect::<Vec<_>>(), "order_preserving": preserving}),
            )
            .exit_if(!preserving))
        }
    }
}

/// A shrinking wedge: named blocks with relation matrices, laid out as an
/// eventually repeating list. Block `k` owns the next `g_k` letters, where
/// `g_k` is its number of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeLayout {
    pub blocks: Vec<(String, PresentationMatrix)>,
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl WedgeLayout {
    /// ```text
    /// block circle 1
    /// block rp2 1
    /// 2
    /// layout: rp2 ; circle
    /// ```
    /// A `block NAME GENERATORS` line starts a block; following integer rows are
    /// its relators. `layout: PREFIX ; CYCLE` lists block names; the cycle may
    /// be empty.
    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks: Vec<(String, usize, Vec<Vec<i64>>)> = Vec::new();
        let mut layout: Option<(usize, String)> = None;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("layout:") {
                layout = Some((lineno, rest.to_string()));
            } else if let Some(rest) = line.strip_prefix("block") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [name, gens] = parts[..] else {
                    return Err(Error::parse(lineno, 1, "expected `block NAME GENERATORS`"));
                };
                let gens = gens
                    .parse()
                    .map_err(|_| Error::parse(lineno, 1, format!("bad generator count `{gens}`")))?;
                blocks.push((name.to_string(), gens, Vec::new()));
            } else {
                let (_, gens, rows) = blocks
                    .last_mut()
                    .ok_or_else(|| Error::parse(lineno, 1, "relation row before any block"))?;
                let row = line
                    .split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| Error::parse(lineno, 1, format!("bad integer `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != *gens {
                    return Err(Error::parse(lineno, 1, format!("relation has {} entries, block has {gens} generators", row.len())));
                }
                rows.push(row);
            }
        }
        let (lineno, layout) = layout.ok_or_else(|| Error::malformed("missing `layout:` line"))?;
        let (prefix, cycle) = layout.split_once(';').unwrap_or((&layout, ""));
        let lookup = |name: &str| {
            blocks
                .iter()
                .position(|(n, _, _)| n == name)
                .ok_or_else(|| Error::parse(lineno, 1, format!("unknown block `{name}`")))
        };
        let prefix = prefix.split_whitespace().map(lookup).collect::<Result<Vec<_>>>()?;
        let cycle = cycle.split_whitespace().map(lookup).collect::<Result<Vec<_>>>()?;
        let blocks = blocks
            .into_iter()
            .map(|(name, gens, rows)| Ok((name, PresentationMatrix::with_columns(rows, gens)?)))
            .collect::<Result<Vec<_>>>()?;
        if cycle.iter().any(|&b| blocks[b].1.cols() == 0) {
            return Err(Error::malformed("repeating blocks need at least one generator"));
        }
        Ok(WedgeLayout { blocks, prefix, cycle })
    }

    /// Block at position `k`, numbered from 1.
    pub fn block_at(&self, k: usize) -> Option<usize> {
        if k <= self.prefix.len() {
            return Some(self.prefix[k - 1]);
        }
        if self.cycle.is_empty() {
            return None;
        }
        Some(self.cycle[(k - self.prefix.len() - 1) % self.cycle.len()])
    }
}

pub fn cmd_wedge(layout: &WedgeLayout, e: &WordExpr, depth: u32) -> Result<Report> {
    let v = e.eta()?;
    let mut first_letter = 1usize;
    let mut k = 1;
    let mut text = String::new();
    let mut rows = Vec::new();
    while first_letter <= depth as usize {
        let Some(b) = layout.block_at(k) else { break };
        let (name, matrix) = &layout.blocks[b];
        let gens = matrix.cols();
        let x: Vec<i64> = (first_letter..first_letter + gens).map(|n| v.coord(n)).collect();
        let form = smith_normal_form(matrix);
        let coords = form.cokernel_coordinates(&x);
        let group = crate::specker::h1_from_presentation(matrix);
        let shown: Vec<String> = coords
            .iter()
            .map(|c| if c.modulus == 0 { c.value.to_string() } else { format!("{} mod {}", c.value, c.modulus) })
            .collect();
        text.push_str(&format!("block {k} ({name}, {group}): [{}]\n", shown.join(", ")));
        rows.push(json!({
            "block": k,
            "name": name,
            "group": group.to_string(),
            "letters": [first_letter, first_letter + gens - 1],
            "coords": coords.iter().map(|c| json!({"value": c.value, "modulus": c.modulus})).collect::<Vec<_>>(),
        }));
        first_letter += gens;
        k += 1;
    }
    if layout.block_at(k).is_none() {
        // finite layout: everything past the last block must vanish
        let covered = first_letter - 1;
        let stray = v.cycle().iter().any(|&c| c != 0) || v.prefix().iter().skip(covered).any(|&c| c != 0);
        if stray {
            return Err(Error::malformed(format!(
                "expression uses letters beyond l{covered}, outside the declared blocks"
            )));
        }
    }
    Ok(Report::ok(text, json!({"depth": depth, "blocks": rows})))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> Report {
        let cli = Cli::try_parse_from(std::iter::once("wild-words").chain(args.iter().copied())).unwrap();
        execute(&cli).unwrap()
    }

    #[test]
    fn project_eta_equal() {
        assert_eq!(run_cli(&["project", "--builtin", "ell_tau", "--n", "3"]).text, "l2 l1 l3");
        assert_eq!(run_cli(&["eta", "--builtin", "ell_infinity"]).text, "; 1");
        let r = run_cli(&["equal", "--builtin", "ell_infinity", "--builtin", "ell_tau", "--depth", "2"]);
        assert_eq!(r.exit, EXIT_NEGATIVE);
        assert_eq!(r.json["witness"]["n"], 2);
    }

    #[test]
    fn abelianize_examples() {
        let r = run_cli(&["abelianize", "--target", "H", "--builtin", "ell_tau"]);
        assert_eq!(r.text, "ell_tau: ; 1\n");
        let r = run_cli(&["abelianize", "--target", "HA", "--vector", "1 -1; 0"]);
        assert_eq!(r.json["images"][0]["trivial"], true);
        let r = run_cli(&["abelianize", "--target", "griffiths", "--budget", "3"]);
        assert_eq!(r.exit, EXIT_OK);
        assert_eq!(r.json["images"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn orders_commands() {
        assert_eq!(run_cli(&["orders", "theta", "--m", "1"]).text, "I(1,1) (1/3, 2/3)");
        assert_eq!(run_cli(&["orders", "compare", "--m1", "2", "--m2", "1"]).text, "theta(2) < theta(1)");
        assert_eq!(run_cli(&["orders", "inverse", "--level", "2", "--slot", "2"]).text, "3");
        assert_eq!(run_cli(&["orders", "embed", "--order", "rationals", "--count", "10"]).exit, EXIT_OK);
    }

    #[test]
    fn wedge_layouts() {
        let layout = WedgeLayout::parse("block z 1\nlayout: ; z").unwrap();
        let r = cmd_wedge(&layout, &crate::word_expr::ell_tau(), 4).unwrap();
        let values: Vec<i64> = r.json["blocks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b["coords"][0]["value"].as_i64().unwrap())
            .collect();
        assert_eq!(values, vec![1, 1, 1, 1]);

        let torsion = WedgeLayout::parse("block z 1\nblock p 1\n2\nlayout: z z p ; z").unwrap();
        let r = cmd_wedge(&torsion, &WordExpr::power(3, 2), 4).unwrap();
        assert_eq!(r.json["blocks"][2]["coords"][0], json!({"value": 0, "modulus": 2}));

        let r = cmd_wedge(&layout, &WordExpr::identity(), 3).unwrap();
        assert!(r.json["blocks"].as_array().unwrap().iter().all(|b| b["coords"][0]["value"] == 0));

        let finite = WedgeLayout::parse("block z 1\nlayout: z z").unwrap();
        assert!(cmd_wedge(&finite, &WordExpr::letter(5), 12).is_err());
    }
}
