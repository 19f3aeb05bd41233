//! The distinguished subsets of GF(q^3) and GF(q^2): the trace kernel Γ and
//! Γ*, the root set Λ of `X^(q+1) + X + 1`, roots of unity μ_m, and the
//! projective line over a subfield.
//!
//! Every set is materialized eagerly by filtering the ambient field and comes
//! back sorted by element index.

use std::fmt;

use serde::Serialize;

use crate::field::{FieldCtx, FieldElem, FieldError};

/// A point of the projective line: a field element or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjPoint {
    Finite(FieldElem),
    Infinity,
}

impl ProjPoint {
    pub fn finite(self) -> Option<FieldElem> {
        match self {
            ProjPoint::Finite(a) => Some(a),
            ProjPoint::Infinity => None,
        }
    }
}

impl From<FieldElem> for ProjPoint {
    fn from(a: FieldElem) -> Self {
        ProjPoint::Finite(a)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(a) => write!(f, "{}", a.index()),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetKind {
    Gamma,
    GammaStar,
    Lambda,
    Mu(u64),
    P1Subfield(u32),
}

#[inline]
pub(crate) fn q_of(ctx: &FieldCtx, k: u32) -> u64 {
    (ctx.characteristic() as u64).pow(k)
}

fn check_cubic(ctx: &FieldCtx, k: u32) -> Result<(), FieldError> {
    if k == 0 || ctx.degree() != 3 * k {
        return Err(FieldError::TraceDegree { k, n: ctx.degree() });
    }
    Ok(())
}

/// Γ: the roots of `X^(q^2) + X^q + X` in GF(q^3).
pub fn gamma_set(ctx: &FieldCtx, k: u32) -> Result<Vec<FieldElem>, FieldError> {
    check_cubic(ctx, k)?;
    Ok(ctx
        .elements()
        .filter(|&a| ctx.trace_rel_unchecked(a, k).is_zero())
        .collect())
}

/// Γ*: the nonzero elements of Γ.
pub fn gamma_star_set(ctx: &FieldCtx, k: u32) -> Result<Vec<FieldElem>, FieldError> {
    let mut g = gamma_set(ctx, k)?;
    g.retain(|a| !a.is_zero());
    Ok(g)
}

/// Λ: the roots of `X^(q+1) + X + 1` in GF(q^3).
pub fn lambda_set(ctx: &FieldCtx, k: u32) -> Result<Vec<FieldElem>, FieldError> {
    check_cubic(ctx, k)?;
    let q = q_of(ctx, k);
    Ok(ctx
        .elements()
        .filter(|&a| {
            let v = ctx.add(ctx.add(ctx.pow(a, q + 1), a), ctx.one());
            v.is_zero()
        })
        .collect())
}

/// μ_m: the nonzero `a` with `a^m = 1`.
pub fn mu_set(ctx: &FieldCtx, m: u64) -> Vec<FieldElem> {
    ctx.elements()
        .filter(|&a| !a.is_zero() && ctx.pow(a, m) == ctx.one())
        .collect()
}

/// ℙ¹ of the degree-`k` subfield: its elements as finite points, then ∞.
pub fn p1_points(ctx: &FieldCtx, k: u32) -> Result<Vec<ProjPoint>, FieldError> {
    let mut pts: Vec<ProjPoint> = ctx
        .subfield_elements(k)?
        .into_iter()
        .map(ProjPoint::Finite)
        .collect();
    pts.push(ProjPoint::Infinity);
    Ok(pts)
}

/// Finite members of a subset. ℙ¹ kinds drop ∞; use [`p1_points`] for it.
pub fn subset_elements(
    ctx: &FieldCtx,
    k: u32,
    kind: SubsetKind,
) -> Result<Vec<FieldElem>, FieldError> {
    match kind {
        SubsetKind::Gamma => gamma_set(ctx, k),
        SubsetKind::GammaStar => gamma_star_set(ctx, k),
        SubsetKind::Lambda => lambda_set(ctx, k),
        SubsetKind::Mu(m) => Ok(mu_set(ctx, m)),
        SubsetKind::P1Subfield(d) => ctx.subfield_elements(d),
    }
}

/// How a map on GF(q^3) fibers over Γ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fibering {
    /// Every image lies in Γ.
    pub into_gamma: bool,
    /// Every element of Γ is hit.
    pub onto_gamma: bool,
    /// Distinct fiber sizes, ascending.
    pub fiber_sizes: Vec<u64>,
    /// Every fiber is a coset `u + F_q`.
    pub fibers_are_additive_cosets: bool,
}

/// Fibering of `x -> x^q - x` over Γ.
pub fn fibering_additive(ctx: &FieldCtx, k: u32) -> Result<Fibering, FieldError> {
    let q = q_of(ctx, k);
    fibering_of(ctx, k, |x| ctx.sub(ctx.pow(x, q), x))
}

/// Fibering of `x -> x^(q-1)` over Γ.
pub fn fibering_power(ctx: &FieldCtx, k: u32) -> Result<Fibering, FieldError> {
    let q = q_of(ctx, k);
    fibering_of(ctx, k, |x| ctx.pow(x, q - 1))
}

fn fibering_of(
    ctx: &FieldCtx,
    k: u32,
    map: impl Fn(FieldElem) -> FieldElem,
) -> Result<Fibering, FieldError> {
    let gamma = gamma_set(ctx, k)?;
    let subfield = ctx.subfield_elements(k)?;
    let order = ctx.order() as usize;
    let mut fibers: Vec<Vec<FieldElem>> = vec![Vec::new(); order];
    for x in ctx.elements() {
        fibers[map(x).index() as usize].push(x);
    }
    let mut in_gamma = vec![false; order];
    for a in &gamma {
        in_gamma[a.index() as usize] = true;
    }
    let into_gamma = fibers
        .iter()
        .enumerate()
        .all(|(y, f)| f.is_empty() || in_gamma[y]);
    let onto_gamma = gamma.iter().all(|a| !fibers[a.index() as usize].is_empty());
    let mut fiber_sizes: Vec<u64> = fibers
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| f.len() as u64)
        .collect();
    fiber_sizes.sort_unstable();
    fiber_sizes.dedup();
    let fibers_are_additive_cosets = fibers.iter().filter(|f| !f.is_empty()).all(|f| {
        let u = f[0];
        let mut coset: Vec<FieldElem> = subfield.iter().map(|&z| ctx.add(u, z)).collect();
        coset.sort_unstable();
        coset == *f
    });
    Ok(Fibering {
        into_gamma,
        onto_gamma,
        fiber_sizes,
        fibers_are_additive_cosets,
    })
}
