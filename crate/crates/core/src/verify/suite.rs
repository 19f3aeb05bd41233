//! Grid runner: for every parameter point, compare the empirical verdict
//! (exhaustive, over the family's whole domain) with [`predict`].
//!
//! Points are enumerated in sorted `(p, k, l, m, n, c_index)` order and run on
//! a bounded rayon pool; results are collected in enumeration order, so the
//! record stream does not depend on the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::predict;
use crate::field::{FieldCtx, FieldElem};
use crate::maps::{Action, CoefficientDomain, FamilyId, FamilySpec};
use crate::rng::SplitMix64;
use crate::sets::gamma_set;

use super::{injective_on_cosets, is_permutation_of_field, is_permutation_on, VerifyError};

/// How the coefficient `c` is enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CPolicy {
    /// All of GF(q^3), subsampled above the element cap.
    WholeField,
    /// The nonzero elements of F_q.
    SubfieldStar,
    FixedIndex(u32),
    One,
}

impl CPolicy {
    pub fn default_for(family: FamilyId) -> Option<CPolicy> {
        match family.coefficient_domain() {
            CoefficientDomain::None => None,
            CoefficientDomain::SubfieldStar => Some(CPolicy::SubfieldStar),
            CoefficientDomain::WholeField => Some(CPolicy::WholeField),
        }
    }
}

/// Range of the exponent parameters `l, m, n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpRange {
    /// `[lo * k, hi * k)`; the default is `[0, 3k)`.
    PerK { lo: u32, hi: u32 },
    /// `[lo, hi)` regardless of `k`.
    Fixed { lo: u32, hi: u32 },
}

impl ExpRange {
    pub const DEFAULT: ExpRange = ExpRange::PerK { lo: 0, hi: 3 };
    /// The band `[3k, 6k)`, functionally a repeat of the default range.
    pub const PERIODIC_BAND: ExpRange = ExpRange::PerK { lo: 3, hi: 6 };

    fn bounds(self, k: u32) -> (u32, u32) {
        match self {
            ExpRange::PerK { lo, hi } => (lo * k, hi * k),
            ExpRange::Fixed { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub family: FamilyId,
    pub primes: Vec<u64>,
    pub k_min: u32,
    pub k_max: u32,
    pub exponents: ExpRange,
    /// `None` selects the family's default policy.
    pub c_policy: Option<CPolicy>,
    /// Largest number of `c` values drawn under [`CPolicy::WholeField`].
    pub element_cap: usize,
    /// Fields GF(q^3) larger than this are left out of the grid.
    pub field_cap: u64,
    pub time_budget: Option<Duration>,
    pub jobs: usize,
    pub seed: u64,
    pub record_timings: bool,
}

impl GridConfig {
    pub fn new(family: FamilyId, primes: Vec<u64>, k_max: u32) -> Self {
        GridConfig {
            family,
            primes,
            k_min: 1,
            k_max,
            exponents: ExpRange::DEFAULT,
            c_policy: None,
            element_cap: 512,
            field_cap: 1 << 18,
            time_budget: None,
            jobs: 0,
            seed: 0x5EED,
            record_timings: false,
        }
    }

    fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::InvalidParameter(m.to_string()));
        if self.primes.is_empty() {
            return bad("prime list is empty");
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return bad("k range is empty");
        }
        if self.element_cap == 0 || self.field_cap == 0 {
            return bad("caps must be positive");
        }
        for k in self.k_min..=self.k_max {
            let (lo, hi) = self.exponents.bounds(k);
            if lo >= hi {
                return bad("exponent range is empty");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub family: FamilyId,
    pub p: u64,
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub n: u32,
    pub c_index: Option<u32>,
    pub empirical: bool,
    pub predicted: bool,
    #[serde(rename = "match")]
    pub matched: bool,
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub family: Option<FamilyId>,
    pub points: usize,
    pub evaluated: usize,
    pub matched: usize,
    pub mismatched: usize,
    pub skipped: usize,
    /// Set when the time budget cut the run short.
    pub incomplete: bool,
    /// `(p, k)` pairs left out because GF(q^3) exceeds the field cap.
    pub excluded_fields: Vec<(u64, u32)>,
}

impl SuiteSummary {
    pub fn all_matched(&self) -> bool {
        self.mismatched == 0 && !self.incomplete
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub records: Vec<VerificationRecord>,
    pub summary: SuiteSummary,
}

/// Per-field shared state for one `(p, k)`.
struct FieldPlan {
    ctx: FieldCtx,
    gamma: Vec<FieldElem>,
    coefficients: Vec<Option<FieldElem>>,
}

/// `c` values under `policy`. Whole-field draws above `cap` keep one
/// trace-zero and one trace-nonzero element, then fill with seeded draws.
fn coefficients(
    ctx: &FieldCtx,
    k: u32,
    policy: Option<CPolicy>,
    cap: usize,
    seed: u64,
) -> Result<Vec<Option<FieldElem>>, VerifyError> {
    let Some(policy) = policy else {
        return Ok(vec![None]);
    };
    let values: Vec<FieldElem> = match policy {
        CPolicy::One => vec![ctx.one()],
        CPolicy::FixedIndex(i) => vec![ctx.element_from_index(i as u64)?],
        CPolicy::SubfieldStar => ctx
            .subfield_elements(k)?
            .into_iter()
            .filter(|c| !c.is_zero())
            .collect(),
        CPolicy::WholeField if ctx.order() as usize <= cap => ctx.elements().collect(),
        CPolicy::WholeField => {
            let trace_zero = |c: FieldElem| ctx.trace_rel_unchecked(c, k).is_zero();
            let mut picked = std::collections::BTreeSet::new();
            if let Some(z) = ctx.elements().find(|&c| !c.is_zero() && trace_zero(c)) {
                picked.insert(z);
            }
            if let Some(nz) = ctx.elements().find(|&c| !trace_zero(c)) {
                picked.insert(nz);
            }
            let mut rng = SplitMix64::new(seed ^ ((ctx.characteristic() as u64) << 32) ^ k as u64);
            while picked.len() < cap {
                picked.insert(FieldElem::from_index_unchecked(
                    rng.below(ctx.order() as u64) as u32,
                ));
            }
            picked.into_iter().collect()
        }
    };
    Ok(values.into_iter().map(Some).collect())
}

/// Evaluates one grid point. `gamma` may supply a prebuilt Γ for families
/// acting on it.
pub fn check_point(
    ctx: &FieldCtx,
    spec: &FamilySpec,
    gamma: Option<&[FieldElem]>,
    record_timings: bool,
) -> Result<VerificationRecord, VerifyError> {
    let t0 = Instant::now();
    let f = spec.compile(ctx)?;
    let eval = |x| f.eval(ctx, x);
    let empirical = match spec.family.action() {
        Action::Field => is_permutation_of_field(ctx, eval),
        Action::Gamma => match gamma {
            Some(g) => is_permutation_on(ctx, g, eval),
            None => is_permutation_on(ctx, &gamma_set(ctx, spec.k)?, eval),
        },
        Action::Cosets => injective_on_cosets(ctx, spec.k, eval)?,
    };
    let predicted = predict(spec, ctx)?;
    Ok(VerificationRecord {
        family: spec.family,
        p: spec.p,
        k: spec.k,
        l: spec.l,
        m: spec.m,
        n: spec.n,
        c_index: spec.c.map(FieldElem::index),
        empirical,
        predicted,
        matched: empirical == predicted,
        elapsed_ms: record_timings.then(|| t0.elapsed().as_millis() as u64),
    })
}

#[derive(Clone, Copy)]
struct GridPoint {
    plan: usize,
    spec: FamilySpec,
}

/// Runs the grid described by `cfg`.
pub fn run_suite(cfg: &GridConfig) -> Result<SuiteOutcome, VerifyError> {
    cfg.validate()?;
    let family = cfg.family;
    let policy = cfg.c_policy.or(CPolicy::default_for(family));
    if family.coefficient_domain() == CoefficientDomain::None && cfg.c_policy.is_some() {
        return Err(VerifyError::InvalidParameter(format!(
            "family {family} takes no coefficient"
        )));
    }

    let mut primes = cfg.primes.clone();
    primes.sort_unstable();
    primes.dedup();

    let mut plans = Vec::new();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &p in &primes {
        for k in cfg.k_min..=cfg.k_max {
            let fits = p
                .checked_pow(3 * k)
                .is_some_and(|size| size <= cfg.field_cap);
            if !fits {
                excluded.push((p, k));
                continue;
            }
            let ctx = FieldCtx::build_with_cap(p, 3 * k, cfg.field_cap)?;
            let gamma = if family.action() == Action::Gamma {
                gamma_set(&ctx, k)?
            } else {
                Vec::new()
            };
            let coefficients = coefficients(&ctx, k, policy, cfg.element_cap, cfg.seed)?;
            let (lo, hi) = cfg.exponents.bounds(k);
            let range = |used: bool| if used { lo..hi } else { 0..1 };
            let plan = plans.len();
            for l in range(family.uses_l()) {
                for m in range(family.uses_m()) {
                    for n in range(family.uses_n()) {
                        for &c in &coefficients {
                            let spec = FamilySpec {
                                family,
                                p,
                                k,
                                l,
                                m,
                                n,
                                c,
                            };
                            points.push(GridPoint { plan, spec });
                        }
                    }
                }
            }
            plans.push(FieldPlan {
                ctx,
                gamma,
                coefficients,
            });
        }
    }
    // Grid order is already sorted; the c loop runs in index order.
    debug_assert!(plans
        .iter()
        .all(|pl| pl.coefficients.windows(2).all(|w| w[0] < w[1])));

    let start = Instant::now();
    let run_point = |pt: &GridPoint| -> Result<Option<VerificationRecord>, VerifyError> {
        if cfg.time_budget.is_some_and(|b| start.elapsed() > b) {
            return Ok(None);
        }
        let plan = &plans[pt.plan];
        let gamma = (family.action() == Action::Gamma).then_some(plan.gamma.as_slice());
        check_point(&plan.ctx, &pt.spec, gamma, cfg.record_timings).map(Some)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| VerifyError::InvalidParameter(format!("worker pool: {e}")))?;
    let results: Vec<Option<VerificationRecord>> =
        pool.install(|| points.par_iter().map(run_point).collect::<Result<_, _>>())?;

    let skipped = results.iter().filter(|r| r.is_none()).count();
    let records: Vec<VerificationRecord> = results.into_iter().flatten().collect();
    let matched = records.iter().filter(|r| r.matched).count();
    let summary = SuiteSummary {
        family: Some(family),
        points: points.len(),
        evaluated: records.len(),
        matched,
        mismatched: records.len() - matched,
        skipped,
        incomplete: skipped > 0,
        excluded_fields: excluded,
    };
    Ok(SuiteOutcome { records, summary })
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(
    records: &[VerificationRecord],
    mut out: W,
) -> Result<(), VerifyError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// CSV with a header row; absent values are empty cells.
pub fn write_csv<W: Write>(records: &[VerificationRecord], out: W) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Counts of `(empirical, predicted)` outcomes, keyed as `"TT"`, `"TF"`, ...
pub fn outcome_table(records: &[VerificationRecord]) -> BTreeMap<String, usize> {
    let mut table = BTreeMap::new();
    for r in records {
        let key = format!(
            "{}{}",
            if r.empirical { 'T' } else { 'F' },
            if r.predicted { 'T' } else { 'F' }
        );
        *table.entry(key).or_insert(0) += 1;
    }
    table
}
