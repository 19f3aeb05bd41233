//! Evaluators for the polynomial families over GF(q^3), sparse polynomials,
//! degree-1 rational maps on ℙ¹, and the rational functions `h`, `h̃`.
//!
//! Composition `A ∘ B` always means `x -> A(B(x))`. Everything here is
//! pointwise: no symbolic composition is performed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldCtx, FieldElem, FieldError, MAX_EXPONENT};
use crate::sets::ProjPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("family {family} is defined over GF(p^{}) with p = {p}, context is GF({ctx_p}^{ctx_n})", 3 * k)]
    ContextMismatch {
        family: FamilyId,
        p: u64,
        k: u32,
        ctx_p: u32,
        ctx_n: u32,
    },
    #[error("family {0} needs a coefficient c")]
    MissingCoefficient(FamilyId),
    #[error("family {0} takes no coefficient")]
    UnexpectedCoefficient(FamilyId),
    #[error("family {0} needs c in the nonzero elements of F_q")]
    CoefficientNotInSubfield(FamilyId),
    #[error("family {0} is only defined in characteristic 2")]
    NeedsCharacteristicTwo(FamilyId),
    #[error("exponent {0} exceeds the supported range")]
    ExponentOverflow(String),
    #[error("degree-1 map has zero determinant")]
    Degenerate,
    #[error("X^2 + X + 1 has no root in GF({p}^{n})")]
    NoCubeRoot { p: u32, n: u32 },
    #[error("0/0 at element {0}")]
    Indeterminate(u32),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

/// Which polynomial family an instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    Main1,
    Main3,
    MainDeg3,
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    KeyMap,
    KeyDeg3,
    FiberMap,
}

/// Where a family's coefficient `c` is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientDomain {
    None,
    SubfieldStar,
    WholeField,
}

/// The set a family is expected to act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    /// Permutes GF(q^3).
    Field,
    /// Permutes Γ.
    Gamma,
    /// Injective on every coset `u + F_q`.
    Cosets,
}

impl FamilyId {
    pub const ALL: [FamilyId; 12] = [
        FamilyId::Main1,
        FamilyId::Main3,
        FamilyId::MainDeg3,
        FamilyId::F1,
        FamilyId::F2,
        FamilyId::F3,
        FamilyId::F4,
        FamilyId::F5,
        FamilyId::F6,
        FamilyId::KeyMap,
        FamilyId::KeyDeg3,
        FamilyId::FiberMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Main1 => "main1",
            FamilyId::Main3 => "main3",
            FamilyId::MainDeg3 => "main-deg3",
            FamilyId::F1 => "f1",
            FamilyId::F2 => "f2",
            FamilyId::F3 => "f3",
            FamilyId::F4 => "f4",
            FamilyId::F5 => "f5",
            FamilyId::F6 => "f6",
            FamilyId::KeyMap => "key-map",
            FamilyId::KeyDeg3 => "key-deg3",
            FamilyId::FiberMap => "fiber-map",
        }
    }

    /// Whether the family reads `Q = p^l`.
    pub fn uses_l(self) -> bool {
        !matches!(self, FamilyId::KeyDeg3)
    }

    /// Whether the family reads `R = p^m`.
    pub fn uses_m(self) -> bool {
        matches!(self, FamilyId::Main1 | FamilyId::Main3 | FamilyId::F5)
    }

    /// Whether the family reads `S = p^n`.
    pub fn uses_n(self) -> bool {
        matches!(self, FamilyId::Main1)
    }

    pub fn coefficient_domain(self) -> CoefficientDomain {
        match self {
            FamilyId::Main1 | FamilyId::F6 => CoefficientDomain::SubfieldStar,
            FamilyId::Main3 | FamilyId::MainDeg3 => CoefficientDomain::WholeField,
            _ => CoefficientDomain::None,
        }
    }

    pub fn action(self) -> Action {
        match self {
            FamilyId::KeyMap | FamilyId::KeyDeg3 => Action::Gamma,
            FamilyId::FiberMap => Action::Cosets,
            _ => Action::Field,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| MapError::UnknownFamily(s.to_string()))
    }
}

/// One instance of a family: `q = p^k`, `Q = p^l`, `R = p^m`, `S = p^n`, and
/// the coefficient `c` where the family has one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub p: u64,
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub n: u32,
    pub c: Option<FieldElem>,
}

impl FamilySpec {
    pub fn new(family: FamilyId, p: u64, k: u32) -> Self {
        FamilySpec {
            family,
            p,
            k,
            l: 0,
            m: 0,
            n: 0,
            c: None,
        }
    }

    pub fn with_l(mut self, l: u32) -> Self {
        self.l = l;
        self
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = n;
        self
    }

    pub fn with_c(mut self, c: FieldElem) -> Self {
        self.c = Some(c);
        self
    }

    /// Checks the spec against a GF(q^3) context.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<(), MapError> {
        if ctx.characteristic() as u64 != self.p || self.k == 0 || ctx.degree() != 3 * self.k {
            return Err(MapError::ContextMismatch {
                family: self.family,
                p: self.p,
                k: self.k,
                ctx_p: ctx.characteristic(),
                ctx_n: ctx.degree(),
            });
        }
        if self.family == FamilyId::FiberMap && self.p != 2 {
            return Err(MapError::NeedsCharacteristicTwo(self.family));
        }
        match (self.family.coefficient_domain(), self.c) {
            (CoefficientDomain::None, Some(_)) => {
                return Err(MapError::UnexpectedCoefficient(self.family))
            }
            (CoefficientDomain::None, None) => {}
            (_, None) => return Err(MapError::MissingCoefficient(self.family)),
            (CoefficientDomain::SubfieldStar, Some(c)) => {
                ctx.element_from_index(c.index() as u64)?;
                if c.is_zero() || !ctx.is_in_subfield(c, self.k)? {
                    return Err(MapError::CoefficientNotInSubfield(self.family));
                }
            }
            (CoefficientDomain::WholeField, Some(c)) => {
                ctx.element_from_index(c.index() as u64)?;
            }
        }
        Ok(())
    }

    pub fn q(&self) -> Result<u64, MapError> {
        pow_checked(self.p, self.k)
    }

    pub fn big_q(&self) -> Result<u64, MapError> {
        pow_checked(self.p, self.l)
    }

    pub fn big_r(&self) -> Result<u64, MapError> {
        pow_checked(self.p, self.m)
    }

    pub fn big_s(&self) -> Result<u64, MapError> {
        pow_checked(self.p, self.n)
    }

    /// Validates and compiles the instance into an evaluator.
    pub fn compile(&self, ctx: &FieldCtx) -> Result<Family, MapError> {
        self.validate(ctx)?;
        let q = self.q()?;
        let big_q = self.big_q()?;
        let one = ctx.one();
        let int = |v: i64| ctx.from_int(v);
        let c = self.c.unwrap_or(one);
        let e = Exp::new;
        let body = match self.family {
            FamilyId::Main1 => Body::DiffPowerPlusTrace {
                power: e(big_q).add(1)?.get(),
                c,
                inner: e(self.big_r()?).add(self.big_s()?)?.get(),
            },
            FamilyId::Main3 => Body::DiffPowerPlusTrace {
                power: e(big_q).add(1)?.get(),
                c,
                inner: self.big_r()?,
            },
            FamilyId::MainDeg3 => Body::DiffPowerPlusTrace {
                power: 3,
                c,
                inner: big_q,
            },
            FamilyId::KeyMap => Body::PowerThenDiff {
                power: e(big_q).add(1)?.get(),
            },
            FamilyId::KeyDeg3 => Body::PowerThenDiff { power: 3 },
            FamilyId::FiberMap => Body::TraceOfPower {
                power: e(big_q).add(1)?.get(),
            },
            FamilyId::F1 => Body::Sparse(SparsePoly::new(
                ctx,
                [
                    (e(q).times(q)?.times(big_q)?.add(q)?.get(), one),
                    (e(q).times(big_q)?.add(q * q)?.get(), one),
                    (e(big_q).add(1)?.get(), one),
                ],
            )),
            FamilyId::F2 => Body::Sparse(SparsePoly::new(
                ctx,
                [
                    (e(q).times(q)?.times(big_q)?.add(1)?.get(), one),
                    (e(q).times(big_q)?.add(1)?.get(), one),
                    (e(big_q).add(q * q)?.get(), one),
                    (e(big_q).add(q)?.get(), one),
                    (e(big_q).add(1)?.get(), int(-1)),
                ],
            )),
            FamilyId::F3 => Body::Sparse(SparsePoly::new(
                ctx,
                [
                    (e(q).times(q)?.times(big_q)?.add(q)?.get(), one),
                    (e(q).times(big_q)?.add(q)?.get(), one),
                    (e(big_q).add(q * q)?.get(), one),
                    (e(big_q).add(q)?.get(), int(-1)),
                    (e(big_q).add(1)?.get(), one),
                ],
            )),
            FamilyId::F4 => Body::Sparse(SparsePoly::new(
                ctx,
                [
                    (e(q).times(q)?.times(big_q)?.add(q * q)?.get(), one),
                    (e(q).times(big_q)?.add(q * q)?.get(), one),
                    (e(big_q).add(q * q)?.get(), int(-1)),
                    (e(big_q).add(q)?.get(), one),
                    (e(big_q).add(1)?.get(), one),
                ],
            )),
            FamilyId::F5 => {
                let big_r = self.big_r()?;
                Body::Sparse(SparsePoly::new(
                    ctx,
                    [
                        (e(q).times(big_q)?.add(q)?.get(), one),
                        (e(q).times(big_q)?.add(1)?.get(), int(-1)),
                        (e(big_q).add(q)?.get(), int(-1)),
                        (e(big_q).add(1)?.get(), one),
                        (e(q).times(q)?.times(big_r)?.get(), one),
                        (e(q).times(big_r)?.get(), one),
                        (big_r, one),
                    ],
                ))
            }
            FamilyId::F6 => Body::Sparse(SparsePoly::new(
                ctx,
                [
                    (e(q).times(3)?.get(), one),
                    (e(q).times(2)?.add(1)?.get(), int(-3)),
                    (e(q).add(2)?.get(), int(3)),
                    (3, int(-1)),
                    (e(q).times(q)?.times(big_q)?.get(), c),
                    (e(q).times(big_q)?.get(), c),
                    (big_q, c),
                ],
            )),
        };
        Ok(Family {
            spec: *self,
            q,
            body,
        })
    }
}

fn pow_checked(base: u64, e: u32) -> Result<u64, MapError> {
    base.checked_pow(e)
        .filter(|&v| v <= MAX_EXPONENT)
        .ok_or_else(|| MapError::ExponentOverflow(format!("{base}^{e}")))
}

/// Overflow-checked exponent arithmetic.
#[derive(Clone, Copy)]
struct Exp(u64);

impl Exp {
    fn new(v: u64) -> Self {
        Exp(v)
    }

    fn check(v: Option<u64>, what: &str) -> Result<Exp, MapError> {
        v.filter(|&v| v <= MAX_EXPONENT)
            .map(Exp)
            .ok_or_else(|| MapError::ExponentOverflow(what.to_string()))
    }

    fn times(self, v: u64) -> Result<Exp, MapError> {
        Self::check(self.0.checked_mul(v), &format!("{} * {v}", self.0))
    }

    fn add(self, v: u64) -> Result<Exp, MapError> {
        Self::check(self.0.checked_add(v), &format!("{} + {v}", self.0))
    }

    fn get(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Body {
    Sparse(SparsePoly),
    /// `(x^q - x)^power + Tr(c * x^inner)`
    DiffPowerPlusTrace {
        power: u64,
        c: FieldElem,
        inner: u64,
    },
    /// `(x^power)^q - x^power`
    PowerThenDiff {
        power: u64,
    },
    /// `Tr(x^power)`
    TraceOfPower {
        power: u64,
    },
}

/// A compiled family instance; evaluation is a pure function of `x`.
#[derive(Clone, Debug)]
pub struct Family {
    spec: FamilySpec,
    q: u64,
    body: Body,
}

impl Family {
    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    #[inline]
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        let (a, b) = self.parts(ctx, x);
        ctx.add(a, b)
    }

    /// The two additive parts of the value, evaluated separately. Families
    /// with a single part return zero as the second component.
    #[inline]
    pub fn parts(&self, ctx: &FieldCtx, x: FieldElem) -> (FieldElem, FieldElem) {
        let q = self.q;
        match &self.body {
            Body::Sparse(poly) => (poly.eval(ctx, x), FieldElem::ZERO),
            Body::DiffPowerPlusTrace { power, c, inner } => {
                let d = ctx.sub(ctx.pow(x, q), x);
                let t = ctx.trace_rel_unchecked(ctx.mul(*c, ctx.pow(x, *inner)), self.spec.k);
                (ctx.pow(d, *power), t)
            }
            Body::PowerThenDiff { power } => {
                let y = ctx.pow(x, *power);
                (ctx.sub(ctx.pow(y, q), y), FieldElem::ZERO)
            }
            Body::TraceOfPower { power } => (
                ctx.trace_rel_unchecked(ctx.pow(x, *power), self.spec.k),
                FieldElem::ZERO,
            ),
        }
    }
}

/// Validates, compiles and evaluates in one step.
pub fn eval_family(ctx: &FieldCtx, spec: &FamilySpec, x: FieldElem) -> Result<FieldElem, MapError> {
    ctx.element_from_index(x.index() as u64)?;
    Ok(spec.compile(ctx)?.eval(ctx, x))
}

/// A polynomial stored as `(exponent, coefficient)` pairs with strictly
/// increasing exponents and no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: Vec<(u64, FieldElem)>,
}

impl SparsePoly {
    /// Sorts the terms, merges equal exponents and drops zero coefficients.
    pub fn new(ctx: &FieldCtx, terms: impl IntoIterator<Item = (u64, FieldElem)>) -> Self {
        let mut raw: Vec<(u64, FieldElem)> = terms.into_iter().collect();
        raw.sort_by_key(|t| t.0);
        let mut merged: Vec<(u64, FieldElem)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 = ctx.add(last.1, c),
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        SparsePoly { terms: merged }
    }

    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn monomial(ctx: &FieldCtx, e: u64, c: FieldElem) -> Self {
        SparsePoly::new(ctx, [(e, c)])
    }

    pub fn terms(&self) -> &[(u64, FieldElem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        self.terms.iter().fold(FieldElem::ZERO, |acc, &(e, c)| {
            ctx.add(acc, ctx.mul(c, ctx.pow(x, e)))
        })
    }

    /// `g^(q)`: every coefficient raised to the `q = p^k`-th power.
    pub fn frobenius_coeffs(&self, ctx: &FieldCtx, k: u32) -> SparsePoly {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .map(|&(e, c)| (e, ctx.frobenius(c, k as u64)))
                .collect(),
        }
    }
}

/// `x -> (a x + b) / (c x + d)` with `ad - bc != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deg1Map {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl Deg1Map {
    pub fn new(
        ctx: &FieldCtx,
        a: FieldElem,
        b: FieldElem,
        c: FieldElem,
        d: FieldElem,
    ) -> Result<Self, MapError> {
        let det = ctx.sub(ctx.mul(a, d), ctx.mul(b, c));
        if det.is_zero() {
            return Err(MapError::Degenerate);
        }
        Ok(Deg1Map { a, b, c, d })
    }

    pub fn identity() -> Self {
        Deg1Map {
            a: FieldElem::ONE,
            b: FieldElem::ZERO,
            c: FieldElem::ZERO,
            d: FieldElem::ONE,
        }
    }

    pub fn eval(&self, ctx: &FieldCtx, pt: ProjPoint) -> ProjPoint {
        match pt {
            ProjPoint::Infinity => match ctx.div(self.a, self.c) {
                Some(v) => ProjPoint::Finite(v),
                None => ProjPoint::Infinity,
            },
            ProjPoint::Finite(x) => {
                let num = ctx.add(ctx.mul(self.a, x), self.b);
                let den = ctx.add(ctx.mul(self.c, x), self.d);
                match ctx.div(num, den) {
                    Some(v) => ProjPoint::Finite(v),
                    None => ProjPoint::Infinity,
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, ctx: &FieldCtx, other: &Deg1Map) -> Deg1Map {
        let m = |x: FieldElem, y: FieldElem, z: FieldElem, w: FieldElem| {
            ctx.add(ctx.mul(x, y), ctx.mul(z, w))
        };
        Deg1Map {
            a: m(self.a, other.a, self.b, other.c),
            b: m(self.a, other.b, self.b, other.d),
            c: m(self.c, other.a, self.d, other.c),
            d: m(self.c, other.b, self.d, other.d),
        }
    }

    /// Coefficients scaled so the first nonzero of `(c, d)` is 1; equal keys
    /// mean equal maps.
    pub fn normalized(&self, ctx: &FieldCtx) -> [FieldElem; 4] {
        let lead = if self.c.is_zero() { self.d } else { self.c };
        let inv = ctx.inv(lead).expect("c and d cannot both vanish");
        [self.a, self.b, self.c, self.d].map(|v| ctx.mul(v, inv))
    }
}

/// `x -> x^e` on ℙ¹ for a nonzero integer `e`; negative powers swap 0 and ∞.
pub fn proj_pow(ctx: &FieldCtx, pt: ProjPoint, e: i64) -> ProjPoint {
    debug_assert!(e != 0);
    match pt {
        ProjPoint::Infinity if e > 0 => ProjPoint::Infinity,
        ProjPoint::Infinity => ProjPoint::Finite(FieldElem::ZERO),
        ProjPoint::Finite(x) if x.is_zero() && e < 0 => ProjPoint::Infinity,
        ProjPoint::Finite(x) if e > 0 => ProjPoint::Finite(ctx.pow(x, e as u64)),
        ProjPoint::Finite(x) => {
            let inv = ctx.inv(x).expect("nonzero");
            ProjPoint::Finite(ctx.pow(inv, e.unsigned_abs()))
        }
    }
}

/// The root of `X^2 + X + 1` with the smaller element index.
pub fn find_omega(ctx: &FieldCtx) -> Result<FieldElem, MapError> {
    ctx.elements()
        .find(|&w| ctx.add(ctx.add(ctx.mul(w, w), w), ctx.one()).is_zero())
        .ok_or(MapError::NoCubeRoot {
            p: ctx.characteristic(),
            n: ctx.degree(),
        })
}

fn ratio(
    ctx: &FieldCtx,
    x: FieldElem,
    num: FieldElem,
    den: FieldElem,
) -> Result<ProjPoint, MapError> {
    match (num.is_zero(), den.is_zero()) {
        (true, true) => Err(MapError::Indeterminate(x.index())),
        (false, true) => Ok(ProjPoint::Infinity),
        _ => Ok(ProjPoint::Finite(
            ctx.div(num, den).expect("nonzero denominator"),
        )),
    }
}

fn big_q_of(ctx: &FieldCtx, l: u32) -> Result<u64, MapError> {
    pow_checked(ctx.characteristic() as u64, l)
}

/// `h(x) = (x^Q + x + 1) / (x^(Q+1) - 1)` with `Q = p^l`.
pub fn eval_h(ctx: &FieldCtx, l: u32, x: FieldElem) -> Result<ProjPoint, MapError> {
    let big_q = big_q_of(ctx, l)?;
    let xq = ctx.pow(x, big_q);
    let num = ctx.add(ctx.add(xq, x), ctx.one());
    let den = ctx.sub(ctx.mul(xq, x), ctx.one());
    ratio(ctx, x, num, den)
}

/// `h̃(x) = (x^(Q+1) + x^Q + x) / (x^Q + x + 1)` with `Q = p^l`.
pub fn eval_h_tilde(ctx: &FieldCtx, l: u32, x: FieldElem) -> Result<ProjPoint, MapError> {
    let big_q = big_q_of(ctx, l)?;
    let xq = ctx.pow(x, big_q);
    let num = ctx.add(ctx.add(ctx.mul(xq, x), xq), x);
    let den = ctx.add(ctx.add(xq, x), ctx.one());
    ratio(ctx, x, num, den)
}

/// [`eval_h`] extended to ℙ¹: the denominator has the larger degree, so ∞ maps to 0.
pub fn eval_h_proj(ctx: &FieldCtx, l: u32, pt: ProjPoint) -> Result<ProjPoint, MapError> {
    match pt {
        ProjPoint::Infinity => Ok(ProjPoint::Finite(FieldElem::ZERO)),
        ProjPoint::Finite(x) => eval_h(ctx, l, x),
    }
}

/// [`eval_h_tilde`] extended to ℙ¹: the numerator has the larger degree, so ∞ is fixed.
pub fn eval_h_tilde_proj(ctx: &FieldCtx, l: u32, pt: ProjPoint) -> Result<ProjPoint, MapError> {
    match pt {
        ProjPoint::Infinity => Ok(ProjPoint::Infinity),
        ProjPoint::Finite(x) => eval_h_tilde(ctx, l, x),
    }
}

/// Whether `f` and `g` agree at every point of `domain`.
pub fn maps_equal_pointwise<T, U, F, G>(domain: &[T], f: F, g: G) -> bool
where
    T: Copy,
    U: PartialEq,
    F: Fn(T) -> U,
    G: Fn(T) -> U,
{
    domain.iter().all(|&s| f(s) == g(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{lambda_set, p1_points};

    fn cubic(p: u64, k: u32) -> FieldCtx {
        FieldCtx::build(p, 3 * k).unwrap()
    }

    #[test]
    fn family_names_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(f.name().parse::<FamilyId>().unwrap(), f);
        }
        assert!("f7".parse::<FamilyId>().is_err());
        assert_eq!("MAIN_DEG3".parse::<FamilyId>().unwrap(), FamilyId::MainDeg3);
    }

    #[test]
    fn f1_examples() {
        let ctx = cubic(2, 1);
        let spec = FamilySpec::new(FamilyId::F1, 2, 1).with_l(1);
        assert_eq!(eval_family(&ctx, &spec, ctx.zero()).unwrap(), ctx.zero());
        let f = spec.compile(&ctx).unwrap();
        let mut image: Vec<FieldElem> = ctx.elements().map(|x| f.eval(&ctx, x)).collect();
        image.sort_unstable();
        assert_eq!(image, ctx.elements().collect::<Vec<_>>());
    }

    #[test]
    fn key_map_vanishes_on_fq() {
        for (p, k, l) in [(2u64, 2u32, 1u32), (3, 1, 2), (5, 1, 0), (2, 1, 3)] {
            let ctx = cubic(p, k);
            let f = FamilySpec::new(FamilyId::KeyMap, p, k)
                .with_l(l)
                .compile(&ctx)
                .unwrap();
            for x in ctx.subfield_elements(k).unwrap() {
                assert!(f.eval(&ctx, x).is_zero());
            }
        }
    }

    #[test]
    fn spec_validation() {
        let ctx = cubic(2, 2);
        let gamma_gen = ctx.element_from_index(2).unwrap();
        assert!(matches!(
            FamilySpec::new(FamilyId::Main1, 2, 2).compile(&ctx),
            Err(MapError::MissingCoefficient(_))
        ));
        assert!(matches!(
            FamilySpec::new(FamilyId::Main1, 2, 2)
                .with_c(gamma_gen)
                .compile(&ctx),
            Err(MapError::CoefficientNotInSubfield(_))
        ));
        assert!(matches!(
            FamilySpec::new(FamilyId::F1, 2, 2)
                .with_c(ctx.one())
                .compile(&ctx),
            Err(MapError::UnexpectedCoefficient(_))
        ));
        assert!(matches!(
            FamilySpec::new(FamilyId::F1, 2, 1).compile(&ctx),
            Err(MapError::ContextMismatch { .. })
        ));
        assert!(matches!(
            FamilySpec::new(FamilyId::F1, 2, 2).with_l(70).compile(&ctx),
            Err(MapError::ExponentOverflow(_))
        ));
        let gf27 = cubic(3, 1);
        assert!(matches!(
            FamilySpec::new(FamilyId::FiberMap, 3, 1).compile(&gf27),
            Err(MapError::NeedsCharacteristicTwo(_))
        ));
        assert!(FamilySpec::new(FamilyId::Main3, 2, 2)
            .with_c(gamma_gen)
            .compile(&ctx)
            .is_ok());
    }

    /// `(X^q - X)^(Q+1) = X^(qQ+q) - X^(qQ+1) - X^(Q+q) + X^(Q+1)` and the
    /// trace of `c X^t` for `c` in F_q expands to three monomials.
    #[test]
    fn structural_forms_match_expanded_monomials() {
        for (p, k) in [(2u64, 1u32), (2, 2), (3, 1), (5, 1)] {
            let ctx = cubic(p, k);
            let q = p.pow(k);
            let fq_star: Vec<FieldElem> = ctx
                .subfield_elements(k)
                .unwrap()
                .into_iter()
                .filter(|c| !c.is_zero())
                .collect();
            let neg1 = ctx.from_int(-1);
            for l in 0..3 * k {
                for m in 0..3 * k {
                    let big_q = p.pow(l);
                    let big_r = p.pow(m);
                    let big_s = p.pow((l + m) % (3 * k));
                    let c = fq_star[(l + m) as usize % fq_star.len()];
                    let t = big_r + big_s;
                    let expanded = SparsePoly::new(
                        &ctx,
                        [
                            (q * big_q + q, ctx.one()),
                            (q * big_q + 1, neg1),
                            (big_q + q, neg1),
                            (big_q + 1, ctx.one()),
                            (q * q * t, c),
                            (q * t, c),
                            (t, c),
                        ],
                    );
                    let f = FamilySpec::new(FamilyId::Main1, p, k)
                        .with_l(l)
                        .with_m(m)
                        .with_n((l + m) % (3 * k))
                        .with_c(c)
                        .compile(&ctx)
                        .unwrap();
                    for x in ctx.elements() {
                        assert_eq!(f.eval(&ctx, x), expanded.eval(&ctx, x));
                        let (a, b) = f.parts(&ctx, x);
                        assert_eq!(ctx.add(a, b), f.eval(&ctx, x));
                    }
                }
            }
        }
    }

    #[test]
    fn f5_is_main3_with_unit_coefficient_and_f6_is_main_deg3() {
        for (p, k) in [(2u64, 1u32), (2, 2), (3, 1), (5, 1)] {
            let ctx = cubic(p, k);
            for l in 0..3 * k {
                for m in 0..3 * k {
                    let f5 = FamilySpec::new(FamilyId::F5, p, k)
                        .with_l(l)
                        .with_m(m)
                        .compile(&ctx)
                        .unwrap();
                    let main3 = FamilySpec::new(FamilyId::Main3, p, k)
                        .with_l(l)
                        .with_m(m)
                        .with_c(ctx.one())
                        .compile(&ctx)
                        .unwrap();
                    let dom: Vec<FieldElem> = ctx.elements().collect();
                    assert!(maps_equal_pointwise(
                        &dom,
                        |x| f5.eval(&ctx, x),
                        |x| main3.eval(&ctx, x)
                    ));
                }
                for c in ctx.subfield_elements(k).unwrap().into_iter().skip(1) {
                    let f6 = FamilySpec::new(FamilyId::F6, p, k)
                        .with_l(l)
                        .with_c(c)
                        .compile(&ctx)
                        .unwrap();
                    let deg3 = FamilySpec::new(FamilyId::MainDeg3, p, k)
                        .with_l(l)
                        .with_c(c)
                        .compile(&ctx)
                        .unwrap();
                    for x in ctx.elements() {
                        assert_eq!(f6.eval(&ctx, x), deg3.eval(&ctx, x));
                    }
                }
            }
        }
    }

    #[test]
    fn f1_agrees_with_negated_frobenius_of_its_companion() {
        // f1 = -(f~1)^q with f~1 = -X^(qQ+1) - X^(Q+q) - X^(q^2 Q + q^2).
        let ctx = cubic(2, 1);
        let (q, big_q) = (2u64, 2u64);
        let neg1 = ctx.from_int(-1);
        let companion = SparsePoly::new(
            &ctx,
            [
                (q * big_q + 1, neg1),
                (big_q + q, neg1),
                (q * q * big_q + q * q, neg1),
            ],
        );
        let f1 = FamilySpec::new(FamilyId::F1, 2, 1)
            .with_l(1)
            .compile(&ctx)
            .unwrap();
        let dom: Vec<FieldElem> = ctx.elements().collect();
        assert!(maps_equal_pointwise(
            &dom,
            |x| f1.eval(&ctx, x),
            |x| ctx.neg(ctx.pow(companion.eval(&ctx, x), q))
        ));
        assert!(maps_equal_pointwise(&dom, |x| x, |x| x));
        assert!(!maps_equal_pointwise(&dom, |x| x, |x| ctx.pow(x, q)));
    }

    #[test]
    fn sparse_poly_normalizes_terms() {
        let ctx = cubic(2, 1);
        let one = ctx.one();
        let p = SparsePoly::new(&ctx, [(3, one), (1, one), (3, one), (0, ctx.zero())]);
        assert_eq!(p.terms(), &[(1, one)]);
        assert!(SparsePoly::new(&ctx, [(2, one), (2, one)]).is_zero());
        let x = ctx.element_from_index(5).unwrap();
        assert_eq!(
            SparsePoly::monomial(&ctx, 0, one).eval(&ctx, ctx.zero()),
            one
        );
        assert_eq!(p.eval(&ctx, x), x);
    }

    #[test]
    fn frobenius_coeffs_examples() {
        let ctx = cubic(3, 1);
        let c = ctx.element_from_index(4).unwrap();
        let g = SparsePoly::new(&ctx, [(1, c), (0, ctx.from_int(2))]);
        let gq = g.frobenius_coeffs(&ctx, 1);
        assert_eq!(gq.terms(), &[(0, ctx.from_int(2)), (1, ctx.pow(c, 3))]);
        assert_eq!(gq.frobenius_coeffs(&ctx, 1).frobenius_coeffs(&ctx, 1), g);
        let fixed = SparsePoly::new(&ctx, [(5, ctx.from_int(2)), (1, ctx.one())]);
        assert_eq!(fixed.frobenius_coeffs(&ctx, 1), fixed);
    }

    #[test]
    fn omega_examples() {
        let gf4 = FieldCtx::build(2, 2).unwrap();
        assert_eq!(find_omega(&gf4).unwrap().index(), 2);
        let gf7 = FieldCtx::build(7, 1).unwrap();
        assert_eq!(find_omega(&gf7).unwrap().index(), 2);
        assert!(find_omega(&FieldCtx::build(2, 1).unwrap()).is_err());
        assert!(find_omega(&FieldCtx::build(2, 3).unwrap()).is_err());
    }

    #[test]
    fn deg1_examples() {
        let gf4 = FieldCtx::build(2, 2).unwrap();
        let w = find_omega(&gf4).unwrap();
        let id = Deg1Map::identity();
        let all: Vec<ProjPoint> = p1_points(&gf4, 2).unwrap();
        for &pt in &all {
            assert_eq!(id.eval(&gf4, pt), pt);
        }
        let rho = Deg1Map::new(&gf4, w, gf4.one(), gf4.one(), w).unwrap();
        assert_eq!(rho.eval(&gf4, ProjPoint::Infinity), ProjPoint::Finite(w));
        let mut img: Vec<ProjPoint> = p1_points(&gf4, 1)
            .unwrap()
            .into_iter()
            .map(|pt| rho.eval(&gf4, pt))
            .collect();
        img.sort();
        let mut mu3: Vec<ProjPoint> = crate::sets::mu_set(&gf4, 3)
            .into_iter()
            .map(ProjPoint::Finite)
            .collect();
        mu3.sort();
        assert_eq!(img, mu3);
        assert!(Deg1Map::new(&gf4, w, w, w, w).is_err());
        let twice = rho.compose(&gf4, &rho);
        assert_eq!(twice.normalized(&gf4), id.normalized(&gf4));
    }

    #[test]
    fn deg1_maps_are_bijections_of_p1() {
        let ctx = FieldCtx::build(3, 2).unwrap();
        let pts = p1_points(&ctx, 2).unwrap();
        let elems: Vec<FieldElem> = ctx.elements().collect();
        let mut checked = 0;
        for &a in elems.iter().step_by(2) {
            for &b in elems.iter().step_by(3) {
                for &c in &elems {
                    let Ok(rho) = Deg1Map::new(&ctx, a, b, c, ctx.one()) else {
                        continue;
                    };
                    let mut img: Vec<ProjPoint> = pts.iter().map(|&p| rho.eval(&ctx, p)).collect();
                    img.sort();
                    img.dedup();
                    assert_eq!(img.len(), pts.len());
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn h_examples() {
        let ctx = cubic(2, 1);
        assert_eq!(
            eval_h_tilde(&ctx, 1, ctx.zero()).unwrap(),
            ProjPoint::Finite(ctx.zero())
        );
        assert_eq!(
            eval_h_tilde(&ctx, 1, ctx.one()).unwrap(),
            ProjPoint::Finite(ctx.one())
        );
        let lambda = lambda_set(&ctx, 1).unwrap();
        let mut img: Vec<ProjPoint> = lambda
            .iter()
            .map(|&x| eval_h(&ctx, 1, x).unwrap())
            .collect();
        img.sort();
        let lam: Vec<ProjPoint> = lambda.iter().map(|&x| ProjPoint::Finite(x)).collect();
        assert_eq!(img, lam);
        // h(1) = 3 / 0 in characteristic 3.
        let gf27 = cubic(3, 1);
        assert_eq!(
            eval_h(&gf27, 0, gf27.one()),
            Err(MapError::Indeterminate(1))
        );
        assert_eq!(
            eval_h_proj(&ctx, 1, ProjPoint::Infinity).unwrap(),
            ProjPoint::Finite(ctx.zero())
        );
        assert_eq!(
            eval_h_tilde_proj(&ctx, 1, ProjPoint::Infinity).unwrap(),
            ProjPoint::Infinity
        );
    }

    #[test]
    fn proj_pow_handles_zero_and_infinity() {
        let ctx = cubic(2, 1);
        let x = ctx.element_from_index(3).unwrap();
        assert_eq!(proj_pow(&ctx, ProjPoint::Infinity, 3), ProjPoint::Infinity);
        assert_eq!(
            proj_pow(&ctx, ProjPoint::Infinity, -3),
            ProjPoint::Finite(ctx.zero())
        );
        assert_eq!(
            proj_pow(&ctx, ProjPoint::Finite(ctx.zero()), -2),
            ProjPoint::Infinity
        );
        assert_eq!(
            proj_pow(&ctx, ProjPoint::Finite(x), -1),
            ProjPoint::Finite(ctx.inv(x).unwrap())
        );
    }
}
