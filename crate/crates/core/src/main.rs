use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cubicperm::field::{FieldCtx, FieldElem};
use cubicperm::maps::{CoefficientDomain, FamilyId, FamilySpec};
use cubicperm::sets::{gamma_set, gamma_star_set, lambda_set, mu_set, p1_points, ProjPoint};
use cubicperm::verify::{
    admissible_l, check_deg1_lemmas, check_htilde_identities, check_point, check_remark,
    run_gcd_lemma, run_step1_batch, run_step2_batch, run_suite, write_csv, write_jsonl, CPolicy,
    ExpRange, GridConfig,
};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(
    name = "cubicperm",
    version,
    about = "Permutation polynomials over GF(q^3): constructions and exhaustive checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the modulus and order of GF(p^n).
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Print the cardinality (and optionally the members) of a special subset.
    Sets(SetsArgs),
    /// Evaluate one family instance and print its verification record.
    Check(CheckArgs),
    /// Run a lemma checker.
    Lemmas(LemmasArgs),
    /// Run a verification grid.
    Suite(SuiteArgs),
    /// Check both readings of the bivariate remark.
    Remark {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Gamma,
    GammaStar,
    Lambda,
    Mu,
    P1,
}

#[derive(Args)]
struct SetsArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum)]
    which: Which,
    /// Order for `mu`; defaults to q + 1 (taken in GF(q^2)).
    #[arg(long)]
    m: Option<u64>,
    /// Also print element indices.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    family: FamilyId,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Coefficient `c` by element index in GF(q^3).
    #[arg(long)]
    c_index: Option<u32>,
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    Gcd,
    Deg1,
    Step1,
    Step2,
    Htilde,
}

#[derive(Args)]
struct LemmasArgs {
    #[arg(long, value_enum)]
    which: Lemma,
    /// deg1: prime power q (default: 2, 3, 4, 5, 7, 8).
    #[arg(long)]
    q: Option<u64>,
    /// step1/step2: characteristic; needs --k too.
    #[arg(long, requires = "k")]
    p: Option<u64>,
    /// step1/step2/htilde: subfield degree.
    #[arg(long)]
    k: Option<u32>,
    /// htilde: exponent (default: every admissible value below 6k).
    #[arg(long)]
    l: Option<u32>,
    /// step1/step2: random instances per field.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    family: FamilyId,
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    k_min: u32,
    #[arg(long)]
    k_max: u32,
    /// Exponents l, m, n range over [exp-min, exp-max) instead of [0, 3k).
    #[arg(long)]
    exp_max: Option<u32>,
    #[arg(long, default_value_t = 0, requires = "exp_max")]
    exp_min: u32,
    /// Exponents range over [3k, 6k).
    #[arg(long, conflicts_with = "exp_max")]
    periodic_band: bool,
    /// whole-field, subfield-star, one, or index:N.
    #[arg(long, value_parser = parse_c_policy)]
    c_policy: Option<CPolicy>,
    #[arg(long, default_value_t = 512)]
    element_cap: usize,
    #[arg(long, default_value_t = 1 << 18)]
    field_cap: u64,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    #[arg(long)]
    timings: bool,
}

fn parse_c_policy(s: &str) -> Result<CPolicy, String> {
    match s {
        "whole-field" => Ok(CPolicy::WholeField),
        "subfield-star" => Ok(CPolicy::SubfieldStar),
        "one" => Ok(CPolicy::One),
        _ => s
            .strip_prefix("index:")
            .and_then(|i| i.parse().ok())
            .map(CPolicy::FixedIndex)
            .ok_or_else(|| format!("unknown c policy `{s}`")),
    }
}

type CliResult = Result<bool, Box<dyn std::error::Error>>;

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

fn field_info(p: u64, n: u32) -> CliResult {
    let ctx = FieldCtx::build(p, n)?;
    let mut out = io::stdout().lock();
    emit(
        &mut out,
        &json!({
            "p": p,
            "n": n,
            "order": ctx.order(),
            "modulus": ctx.modulus_string(),
            "modulus_coeffs": ctx.modulus(),
        }),
    )?;
    Ok(true)
}

fn sets(a: SetsArgs) -> CliResult {
    let (degree, name) = match a.which {
        Which::Gamma => (3 * a.k, "gamma"),
        Which::GammaStar => (3 * a.k, "gamma-star"),
        Which::Lambda => (3 * a.k, "lambda"),
        Which::Mu => (2 * a.k, "mu"),
        Which::P1 => (a.k, "p1"),
    };
    let ctx = FieldCtx::build(a.p, degree)?;
    let q = a.p.pow(a.k);
    let index = |x: FieldElem| json!(x.index());
    let members: Vec<serde_json::Value> = match a.which {
        Which::Gamma => gamma_set(&ctx, a.k)?.into_iter().map(index).collect(),
        Which::GammaStar => gamma_star_set(&ctx, a.k)?.into_iter().map(index).collect(),
        Which::Lambda => lambda_set(&ctx, a.k)?.into_iter().map(index).collect(),
        Which::Mu => mu_set(&ctx, a.m.unwrap_or(q + 1))
            .into_iter()
            .map(index)
            .collect(),
        Which::P1 => p1_points(&ctx, a.k)?
            .into_iter()
            .map(|pt| match pt {
                ProjPoint::Finite(x) => index(x),
                ProjPoint::Infinity => json!("inf"),
            })
            .collect(),
    };
    let mut record = json!({
        "which": name,
        "p": a.p,
        "k": a.k,
        "q": q,
        "ambient_degree": degree,
        "cardinality": members.len(),
    });
    if let Which::Mu = a.which {
        record["m"] = json!(a.m.unwrap_or(q + 1));
    }
    if a.list {
        record["elements"] = json!(members);
    }
    emit(&mut io::stdout().lock(), &record)?;
    Ok(true)
}

fn check(a: CheckArgs) -> CliResult {
    let ctx = FieldCtx::build(a.p, 3 * a.k)?;
    let mut spec = FamilySpec::new(a.family, a.p, a.k)
        .with_l(a.l)
        .with_m(a.m)
        .with_n(a.n);
    if let Some(i) = a.c_index {
        spec = spec.with_c(ctx.element_from_index(i as u64)?);
    } else if a.family.coefficient_domain() != CoefficientDomain::None {
        return Err(format!("family {} needs --c-index", a.family).into());
    }
    let record = check_point(&ctx, &spec, None, a.timings)?;
    emit(&mut io::stdout().lock(), &record)?;
    Ok(record.matched)
}

fn lemmas(a: LemmasArgs) -> CliResult {
    let mut out = io::stdout().lock();
    let mut ok = true;
    match a.which {
        Lemma::Gcd => {
            let r = run_gcd_lemma();
            ok = r.mismatches == 0;
            emit(&mut out, &r)?;
        }
        Lemma::Deg1 => {
            let qs = a.q.map_or(vec![2, 3, 4, 5, 7, 8], |q| vec![q]);
            for q in qs {
                let r = check_deg1_lemmas(q)?;
                ok &= r.passed;
                emit(&mut out, &r)?;
            }
        }
        Lemma::Step1 | Lemma::Step2 => {
            let step1 = matches!(a.which, Lemma::Step1);
            let fields = match (a.p, a.k) {
                (Some(p), Some(k)) => vec![(p, k)],
                (None, _) if step1 => vec![(2, 1), (2, 2), (3, 1)],
                (None, _) => vec![(2, 1), (2, 2), (5, 1)],
                (Some(_), None) => unreachable!("clap requires --k with --p"),
            };
            for (p, k) in fields {
                let r = if step1 {
                    run_step1_batch(p, k, a.count, a.seed)?
                } else {
                    run_step2_batch(p, k, a.count, a.seed)?
                };
                ok &= r.passed();
                emit(&mut out, &r)?;
            }
        }
        Lemma::Htilde => {
            let ks = a.k.map_or(vec![1, 2], |k| vec![k]);
            for k in ks {
                let ls = a.l.map_or_else(|| admissible_l(k, 6 * k), |l| vec![l]);
                for l in ls {
                    let r = check_htilde_identities(k, l)?;
                    ok &= r.passed();
                    emit(&mut out, &r)?;
                }
            }
        }
    }
    Ok(ok)
}

fn suite(a: SuiteArgs) -> CliResult {
    let mut cfg = GridConfig::new(a.family, a.p_list, a.k_max);
    cfg.k_min = a.k_min;
    if let Some(hi) = a.exp_max {
        cfg.exponents = ExpRange::Fixed { lo: a.exp_min, hi };
    } else if a.periodic_band {
        cfg.exponents = ExpRange::PERIODIC_BAND;
    }
    cfg.c_policy = a.c_policy;
    cfg.element_cap = a.element_cap;
    cfg.field_cap = a.field_cap;
    cfg.time_budget = a.time_budget_ms.map(Duration::from_millis);
    cfg.jobs = a.jobs;
    cfg.seed = a.seed;
    cfg.record_timings = a.timings;

    let outcome = run_suite(&cfg)?;
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match a.format {
        Format::Jsonl => write_jsonl(&outcome.records, sink)?,
        Format::Csv => write_csv(&outcome.records, sink)?,
    }
    let mut err = io::stderr().lock();
    emit(&mut err, &outcome.summary)?;
    if outcome.summary.incomplete {
        writeln!(
            err,
            "time budget exhausted: {} points skipped",
            outcome.summary.skipped
        )?;
    }
    Ok(outcome.summary.all_matched())
}

fn remark(p: u64, k: u32, timings: bool) -> CliResult {
    let r = check_remark(p, k, timings)?;
    let mut out = io::stdout().lock();
    let mut ok = true;
    for rec in [&r.literal, &r.trace] {
        ok &= rec.asserted.is_none_or(|a| a == rec.empirical);
        emit(&mut out, rec)?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::FieldInfo { p, n } => field_info(p, n),
        Command::Sets(a) => sets(a),
        Command::Check(a) => check(a),
        Command::Lemmas(a) => lemmas(a),
        Command::Suite(a) => suite(a),
        Command::Remark { k, p, timings } => remark(p, k, timings),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
