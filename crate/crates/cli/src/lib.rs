//! Argument handling, the verification suites behind each subcommand, and
//! JSON/CSV rendering for the `frobrep` binary.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use frobrep_core::autgroup::{random_linear, random_point, random_translation, random_unipotent, GroupPoint};
use frobrep_core::base_ring::{PolyRing, TestAlgebra};
use frobrep_core::char_ring::{delta_class, exhaustive_kernel_census, random_symmetric, PairParams};
use frobrep_core::derham::DeRhamComplex;
use frobrep_core::fp::Prime;
use frobrep_core::glnrep::{character_to_json, dominant_weights_up_to, mod_p_reduce, Weight};
use frobrep_core::irreducibles::{
    classify, dim_irreducible_g, direct_socle_dimension, gln_irreducible_module, restriction_character_lowest_part, surjection_bookkeeping, verify_socle_fundamental, verify_socle_generic, Case,
};
use frobrep_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "frobrep", version, about = "Irreducible representations of Frobenius kernels of Aut(k[x_1..x_n]/(x_i^{p^r}))")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for the ChaCha8 generator used by sampling suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Largest allowed dimension of an induced module; overrides FROBREP_SCOPE_LIMIT.
    #[arg(long, global = true)]
    pub scope_limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of λ ↦ (case, dim L(λ, G(n,r))) over polynomial dominant λ.
    Dims {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        lambda_max: u32,
    },
    /// de Rham cohomology dimensions, Cartier inverse and equivariance checks.
    Cohomology {
        #[command(flatten)]
        params: Params,
        /// Twist the complex by L(μ)^[1] for this GL_n weight.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twist: Option<Vec<i32>>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Checks the socle description matching the case of λ.
    VerifySocle {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<i32>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Kernel of the pair map (b, a) ↦ U_r b + ψ^p(a).
    Kernel {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        window_min: i32,
        #[arg(long, default_value_t = 2)]
        window_max: i32,
        #[arg(long, default_value_t = 1)]
        coeff_bound: i128,
    },
    /// Restriction character of L(λ, G(n,r)) with its lowest part and decomposition.
    Character {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<i32>,
    },
    /// Group laws, factorization and transfer maps on random points.
    GroupCheck {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Outcome of one subcommand: a JSON document, the same data as a table,
/// and whether every assertion held.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub passed: bool,
}

impl Report {
    fn keyed(json: Value, passed: bool) -> Self {
        let rows = match &json {
            Value::Object(map) => map.iter().map(|(k, v)| vec![k.clone(), scalar(v)]).collect(),
            _ => vec![],
        };
        Report { json, header: vec!["key".into(), "value".into()], rows, passed }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn weight_label(w: &[i32]) -> String {
    format!("({})", w.iter().map(i32::to_string).collect::<Vec<_>>().join(","))
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("reports are plain JSON");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header).expect("in-memory write");
            for row in &report.rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
        }
    }
}

fn sample_ring(n: usize, r: u32, p: Prime) -> Result<Arc<PolyRing>> {
    PolyRing::new(n, r, p, TestAlgebra::truncated(p, 1, r)?)
}

fn sample_points(n: usize, r: u32, p: Prime, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<GroupPoint>> {
    let ring = sample_ring(n, r, p)?;
    Ok((0..count).map(|_| random_point(&ring, rng)).collect())
}

fn header(command: &str, params: &Params, seed: Option<u64>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("p".into(), json!(params.p));
    m.insert("n".into(), json!(params.n));
    m.insert("r".into(), json!(params.r));
    if let Some(s) = seed {
        m.insert("seed".into(), json!(s));
    }
    m
}

fn merge(mut base: Map<String, Value>, extra: Value) -> Value {
    if let Value::Object(e) = extra {
        base.extend(e);
    }
    Value::Object(base)
}

pub fn run(cli: &Cli) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Dims { params, lambda_max } => dims(params, *lambda_max),
        Command::Cohomology { params, twist, samples } => cohomology(params, twist.as_deref(), *samples, cli.seed, &mut rng),
        Command::VerifySocle { params, lambda, samples } => verify_socle(params, lambda, *samples, cli.seed, &mut rng),
        Command::Kernel { params, samples, window_min, window_max, coeff_bound } => kernel(params, *samples, *window_min..=*window_max, *coeff_bound, cli.seed, &mut rng),
        Command::Character { params, lambda } => character(params, lambda),
        Command::GroupCheck { params, samples } => group_check(params, *samples, cli.seed, &mut rng),
    }
}

fn prime(params: &Params) -> Result<Prime> {
    Prime::new(params.p)
}

fn dims(params: &Params, lambda_max: u32) -> Result<Report> {
    let p = prime(params)?;
    let (n, r) = (params.n, params.r);
    if n == 0 || r == 0 {
        return Err(Error::Parameter("n and r must be at least 1".into()));
    }
    let weights = dominant_weights_up_to(n, lambda_max);
    info!("dims: {} weights", weights.len());
    let results: Vec<(Weight, Result<_>)> = weights.into_par_iter().map(|lam| {
        let rep = dim_irreducible_g(&lam, n, r, p);
        (lam, rep)
    }).collect();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (lam, res) in results {
        let (case, dim) = match &res {
            Ok(rep) => (rep.case.name().to_string(), Some(rep.dim)),
            Err(Error::Parameter(m)) | Err(Error::Internal(m)) => return Err(Error::Internal(m.clone())),
            Err(e) => (e.kind().to_string(), None),
        };
        rows.push(vec![weight_label(&lam), case.clone(), dim.map_or(String::new(), |d| d.to_string())]);
        entries.push(json!({"lambda": lam, "case": case, "dim": dim}));
    }
    let mut m = header("dims", params, None);
    m.insert("lambda_max".into(), json!(lambda_max));
    m.insert("rows".into(), json!(entries));
    Ok(Report { json: Value::Object(m), header: vec!["lambda".into(), "case".into(), "dim".into()], rows, passed: true })
}

fn cohomology(params: &Params, twist: Option<&[i32]>, samples: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<Report> {
    let p = prime(params)?;
    let (n, r) = (params.n, params.r);
    let module = twist.map(|t| {
        if t.len() != n {
            return Err(Error::Parameter(format!("twist weight needs {n} coordinates")));
        }
        gln_irreducible_module(t, p)
    });
    let module = module.transpose()?;
    let complex = DeRhamComplex::build(n, r, p, module.as_ref())?;
    let got = complex.cohomology_dimensions();
    let expected = complex.expected_cohomology();
    let mut passed = got == expected;

    let mut cartier = Vec::new();
    if r == 1 && module.is_none() {
        for i in 0..=n {
            let c = complex.cartier_check(i)?;
            passed &= c.holds();
            cartier.push(json!({
                "degree": c.degree,
                "classes": c.classes,
                "cocycles": c.all_cocycles,
                "independent": c.independent,
                "spanning": c.spans,
                "lie_annihilated": c.lie_annihilated,
            }));
        }
    }
    let points = sample_points(n, r, p, samples, rng)?;
    let eq = complex.verify_equivariance(&points)?;
    passed &= eq.holds();

    let rows = (0..=n).map(|i| vec![i.to_string(), complex.term(i).dim().to_string(), got[i].to_string(), expected[i].to_string()]).collect();
    let mut m = header("cohomology", params, Some(seed));
    m.insert("twist".into(), json!(twist));
    let mut json = merge(m, complex.report_json());
    json["expected"] = json!(expected);
    json["cartier_inverse"] = json!(cartier);
    json["equivariance"] = json!({"samples": eq.samples, "lie_commutes": eq.lie_commutes, "group_failures": eq.group_failures});
    json["statement"] = json!("dim H^i(Ω_r ⊗ V^[1]) = p^{n(r-1)} binom(n,i) dim V");
    json["passed"] = json!(passed);
    Ok(Report { json, header: vec!["degree".into(), "dim_omega".into(), "cohomology".into(), "expected".into()], rows, passed })
}

fn verify_socle(params: &Params, lambda: &[i32], samples: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<Report> {
    let p = prime(params)?;
    let (n, r) = (params.n, params.r);
    if lambda.len() != n {
        return Err(Error::Parameter(format!("λ needs {n} coordinates")));
    }
    let m = header("verify-socle", params, Some(seed));
    let (body, passed) = match classify(lambda, p) {
        Case::Fundamental(_) => {
            let points = sample_points(n, r, p, samples, rng)?;
            let rep = verify_socle_fundamental(lambda, n, r, p, &points)?;
            (rep.to_json(), rep.holds())
        }
        Case::Generic => {
            // L(λ) ⊗ L(s)^[p^r] pulls back along P_r; the closure runs on r(λ)
            let base = mod_p_reduce(lambda, p).r_part;
            let rep = verify_socle_generic(&base, n, r, p)?;
            let mut j = rep.to_json();
            j["reduced_from"] = json!(lambda);
            (j, rep.full())
        }
        Case::RZero => {
            let rep = dim_irreducible_g(lambda, n, r, p)?;
            let mut j = json!({
                "lambda": lambda,
                "recursion": rep.evidence.recursion,
                "dim": rep.dim,
                "statement": "L(pμ, G(n,r)) = T_r^* L(μ, G(n,r-1))^(1)",
            });
            let mut ok = true;
            if n == 1 && r >= 2 {
                let gens = sample_points(n, r, p, samples, rng)?;
                let fresh = sample_points(n, r, p, samples, rng)?;
                let direct = direct_socle_dimension(lambda, n, r, p, &gens, &fresh)?;
                ok = direct.dim as u64 == rep.dim && direct.stable_under_fresh_samples;
                j["direct_closure"] = json!({"dim": direct.dim, "trace": direct.trace, "stable": direct.stable_under_fresh_samples});
            }
            (j, ok)
        }
    };
    let mut json = merge(m, body);
    json["case"] = json!(classify(lambda, p).name());
    json["passed"] = json!(passed);
    Ok(Report::keyed(json, passed))
}

fn kernel(params: &Params, samples: usize, window: std::ops::RangeInclusive<i32>, coeff_bound: i128, seed: u64, rng: &mut ChaCha8Rng) -> Result<Report> {
    let p = prime(params)?;
    let pp = PairParams::new(params.n, params.r, p)?;
    let delta = delta_class(params.n);
    let symbolic = delta.adams_iter(p.get(), params.r) == pp.u().mul(&delta);
    let mut solved = 0;
    for _ in 0..samples {
        let a = random_symmetric(params.n, -2..=2, 3, rng);
        if pp.kernel_membership(&pp.kernel_element(&a)).as_ref() == Ok(&a) {
            solved += 1;
        }
    }
    let mut passed = symbolic && solved == samples;
    let mut m = header("kernel", params, Some(seed));
    m.insert("symbolic_identity".into(), json!(symbolic));
    m.insert("membership_solves".into(), json!(solved));
    m.insert("membership_trials".into(), json!(samples));
    if params.n == 1 {
        let census = exhaustive_kernel_census(&pp, window.clone(), -coeff_bound..=coeff_bound)?;
        passed &= census.unexplained.is_empty();
        m.insert("window".into(), json!([window.start(), window.end()]));
        m.insert("pairs_checked".into(), json!(census.pairs_checked));
        m.insert("kernel_pairs".into(), json!(census.kernel_pairs));
        m.insert("unexplained".into(), json!(census.unexplained.len()));
        let summary = if census.unexplained.is_empty() { "kernel = parametrized family, exhaustive at window" } else { "kernel contains pairs outside the parametrized family" };
        m.insert("summary".into(), json!(summary));
    }
    m.insert("statement".into(), json!("ker((b,a) ↦ U_r b + ψ^p(a)) = {(δψ^p(a), -(ψ^p)^{r-1}(δ) a)}"));
    m.insert("passed".into(), json!(passed));
    Ok(Report::keyed(Value::Object(m), passed))
}

fn character(params: &Params, lambda: &[i32]) -> Result<Report> {
    let p = prime(params)?;
    if lambda.len() != params.n {
        return Err(Error::Parameter(format!("λ needs {} coordinates", params.n)));
    }
    let rep = dim_irreducible_g(lambda, params.n, params.r, p)?;
    let lowest = restriction_character_lowest_part(&rep)?;
    let mut passed = lowest.holds();
    let mut json = merge(header("character", params, None), rep.to_json());
    json["lowest_part"] = character_to_json(&lowest.lowest);
    json["lowest_part_matches"] = json!(lowest.holds());
    if params.r == 1 {
        let s = surjection_bookkeeping(&rep)?;
        passed &= s.holds();
        json["decomposition"] = json!({"b": character_to_json(&s.b), "a": character_to_json(&s.a), "holds": s.holds()});
    }
    json["passed"] = json!(passed);
    let rows = rep.character.terms().map(|(e, c)| vec![weight_label(e), c.to_string()]).collect();
    Ok(Report { json, header: vec!["weight".into(), "multiplicity".into()], rows, passed })
}

#[derive(Default)]
struct Tally {
    trials: usize,
    failures: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.trials += 1;
        self.failures += usize::from(!ok);
    }
}

fn group_check(params: &Params, samples: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<Report> {
    let p = prime(params)?;
    let (n, r) = (params.n, params.r);
    let ring = sample_ring(n, r, p)?;
    let alg = ring.coeff().algebra();
    let names = ["associativity", "identity", "inverse", "factorization_round_trip", "factorization_uniqueness", "u_membership", "truncation_transfer", "frobenius_transfer", "t_homomorphism"];
    let mut tallies: Vec<Tally> = names.iter().map(|_| Tally::default()).collect();
    let id = GroupPoint::identity(&ring);
    for _ in 0..samples {
        let g = random_point(&ring, rng);
        let h = random_point(&ring, rng);
        let k = random_point(&ring, rng);
        let gh = g.compose(&h)?;
        tallies[0].record(gh.compose(&k)? == g.compose(&h.compose(&k)?)?);
        tallies[1].record(g.compose(&id)? == g && id.compose(&g)? == g);
        let inv = g.invert()?;
        tallies[2].record(g.compose(&inv)?.is_identity() && inv.compose(&g)?.is_identity());
        let f = g.triangular_factorize()?;
        tallies[3].record(f.recompose()? == g);
        let (t, l, u) = (random_translation(&ring, rng), random_linear(&ring, rng), random_unipotent(&ring, rng));
        let fb = t.compose(&l)?.compose(&u)?.triangular_factorize()?;
        tallies[4].record(fb.translation == t.constants() && fb.linear == l.jacobian() && fb.unipotent == u);
        let lu = GroupPoint::linear(&ring, &f.linear)?.compose(&f.unipotent)?;
        for i in 1..=r {
            let level = p.pow(i) as u64;
            let by_factor = f.translation.iter().all(|a| alg.nilpotency_order(a).is_some_and(|o| o <= level));
            tallies[5].record(g.in_u(i)? == by_factor);
            tallies[6].record(lu.transfer_t_ri(i)?.transfer_p(i) == lu.transfer_p(i));
        }
        if r >= 2 {
            tallies[7].record(g.transfer_t_r()?.transfer_p(r - 1) == g.transfer_p_r());
            tallies[8].record(gh.transfer_t_r()? == g.transfer_t_r()?.compose(&h.transfer_t_r()?)?);
        }
    }
    let passed = tallies.iter().all(|t| t.failures == 0);
    let mut m = header("group-check", params, Some(seed));
    m.insert("samples".into(), json!(samples));
    m.insert(
        "checks".into(),
        Value::Object(names.iter().zip(&tallies).map(|(name, t)| (name.to_string(), json!({"trials": t.trials, "failures": t.failures}))).collect()),
    );
    m.insert("passed".into(), json!(passed));
    let rows = names.iter().zip(&tallies).map(|(name, t)| vec![name.to_string(), t.trials.to_string(), t.failures.to_string()]).collect();
    Ok(Report { json: Value::Object(m), header: vec!["check".into(), "trials".into(), "failures".into()], rows, passed })
}
