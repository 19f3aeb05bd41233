//! Exhaustive oracles (permutation of a set, injectivity on additive cosets)
//! and the checkers built on them.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::criteria::CriteriaError;
use crate::field::{FieldCtx, FieldElem, FieldError};
use crate::maps::MapError;

pub mod lemmas;
pub mod suite;

pub use lemmas::{
    admissible_l, check_deg1_lemmas, check_htilde_identities, check_remark, check_step1_instance,
    check_step2_instance, run_gcd_lemma, run_step1_batch, run_step2_batch, BatchReport, Deg1Report,
    GcdLemmaReport, HtildeReport, RemarkReading, RemarkRecord, RemarkReport, Step1Outcome,
    Step2Outcome,
};
pub use suite::{
    check_point, outcome_table, run_suite, write_csv, write_jsonl, CPolicy, ExpRange, GridConfig,
    SuiteOutcome, SuiteSummary, VerificationRecord,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("L must have p-power exponents and coefficients in F_q: {0}")]
    MalformedLinearized(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Whether `f` restricted to `domain` is injective with image inside
/// `domain`. Stops at the first collision or escape.
pub fn is_permutation_on<F>(ctx: &FieldCtx, domain: &[FieldElem], f: F) -> bool
where
    F: Fn(FieldElem) -> FieldElem,
{
    let size = ctx.order() as usize;
    let mut member = FixedBitSet::with_capacity(size);
    for a in domain {
        member.insert(a.index() as usize);
    }
    let mut seen = FixedBitSet::with_capacity(size);
    for &x in domain {
        let y = f(x).index() as usize;
        if !member.contains(y) || seen.put(y) {
            return false;
        }
    }
    true
}

/// [`is_permutation_on`] over the whole field.
pub fn is_permutation_of_field<F>(ctx: &FieldCtx, f: F) -> bool
where
    F: Fn(FieldElem) -> FieldElem,
{
    let mut seen = FixedBitSet::with_capacity(ctx.order() as usize);
    ctx.elements().all(|x| !seen.put(f(x).index() as usize))
}

/// Whether `g` is injective on every coset `u + F_q` of GF(q^3), `q = p^k`.
pub fn injective_on_cosets<F>(ctx: &FieldCtx, k: u32, g: F) -> Result<bool, VerifyError>
where
    F: Fn(FieldElem) -> FieldElem,
{
    if k == 0 || ctx.degree() != 3 * k {
        return Err(FieldError::TraceDegree { k, n: ctx.degree() }.into());
    }
    let subfield = ctx.subfield_elements(k)?;
    let mut visited = FixedBitSet::with_capacity(ctx.order() as usize);
    let mut values = Vec::with_capacity(subfield.len());
    for u in ctx.elements() {
        if visited.contains(u.index() as usize) {
            continue;
        }
        values.clear();
        for &z in &subfield {
            let x = ctx.add(u, z);
            visited.insert(x.index() as usize);
            values.push(g(x));
        }
        values.sort_unstable();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Ok(false);
        }
    }
    Ok(true)
}
