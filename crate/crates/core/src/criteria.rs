//! Integer predicates: 2-adic valuation, the `2^k ± 1` coprimality pattern,
//! and the predicted permutation verdict for each family.
//!
//! [`predict`] always evaluates the gcd / congruence form of a criterion. The
//! 2-adic reformulations live in [`predict_ord2_form`] so that the two halves
//! of each equivalence can be checked against each other.

use thiserror::Error;

use crate::field::{ExtNat, FieldCtx};
use crate::maps::{FamilyId, FamilySpec, MapError};

/// Upper bound on `k` and `l` in [`gcd_pattern`]; keeps `2^k + 1` in a u64.
pub const GCD_PATTERN_MAX: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriteriaError {
    #[error("gcd pattern needs 1 <= k <= {max} and 0 <= l <= {max}, got k={k}, l={l}", max = GCD_PATTERN_MAX)]
    OutOfRange { k: u32, l: u32 },
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// 2-adic valuation of `|v|`; `ord2(0)` is infinite.
pub fn ord2(v: i64) -> ExtNat {
    if v == 0 {
        ExtNat::Infinity
    } else {
        ExtNat::Finite(v.unsigned_abs().trailing_zeros() as u64)
    }
}

/// `(gcd(2^k + 1, 2^l + 1) = 1, gcd(2^k - 1, 2^l + 1) = 1)` by direct gcd.
pub fn gcd_pattern(k: u32, l: u32) -> Result<(bool, bool), CriteriaError> {
    if k == 0 || k > GCD_PATTERN_MAX || l > GCD_PATTERN_MAX {
        return Err(CriteriaError::OutOfRange { k, l });
    }
    let (a, b) = (1u64 << k, 1u64 << l);
    Ok((gcd(a + 1, b + 1) == 1, gcd(a - 1, b + 1) == 1))
}

/// The verdict each theorem predicts for `spec`. Trace clauses evaluate
/// `Tr(c)` in `ctx`, which must be the spec's GF(q^3).
pub fn predict(spec: &FamilySpec, ctx: &FieldCtx) -> Result<bool, MapError> {
    spec.validate(ctx)?;
    let q = spec.q()?;
    let big_q = spec.big_q()?;
    let coprime_q = || gcd(q - 1, big_q + 1) == 1;
    let trace_nonzero = || -> Result<bool, MapError> {
        let c = spec.c.ok_or(MapError::MissingCoefficient(spec.family))?;
        Ok(!ctx.trace_rel(c, spec.k)?.is_zero())
    };
    Ok(match spec.family {
        FamilyId::Main1 => {
            let rs = spec.big_r()? as u128 + spec.big_s()? as u128;
            gcd128((q - 1) as u128, (big_q as u128 + 1) * rs) == 1
        }
        FamilyId::F1
        | FamilyId::F2
        | FamilyId::F3
        | FamilyId::F4
        | FamilyId::F5
        | FamilyId::KeyMap
        | FamilyId::FiberMap => coprime_q(),
        FamilyId::Main3 => coprime_q() && trace_nonzero()?,
        FamilyId::MainDeg3 => q % 3 == 2 && trace_nonzero()?,
        FamilyId::F6 | FamilyId::KeyDeg3 => q % 3 == 2,
    })
}

/// The 2-adic reformulation of a family's gcd criterion, where one exists.
/// Trace clauses are not included.
pub fn predict_ord2_form(spec: &FamilySpec) -> Option<bool> {
    let ok = |bound: ExtNat| spec.p == 2 && ord2(spec.k as i64) <= bound;
    let l = ord2(spec.l as i64);
    match spec.family {
        FamilyId::Main1 => Some(ok(l.min(ord2(spec.m as i64 - spec.n as i64)))),
        FamilyId::F1
        | FamilyId::F2
        | FamilyId::F3
        | FamilyId::F4
        | FamilyId::F5
        | FamilyId::Main3
        | FamilyId::KeyMap
        | FamilyId::FiberMap => Some(ok(l)),
        FamilyId::MainDeg3 | FamilyId::F6 | FamilyId::KeyDeg3 => None,
    }
}
