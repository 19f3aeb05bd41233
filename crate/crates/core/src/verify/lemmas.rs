//! Checkers for the supporting lemmas: the additive and multiplicative
//! reduction steps, the degree-1 map lemmas on ℙ¹(F_q) and μ_{q+1}, the
//! conjugation identities for `h̃`, the `2^k ± 1` gcd pattern, and the
//! bivariate remark.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::criteria::{gcd, gcd_pattern, ord2, GCD_PATTERN_MAX};
use crate::field::{is_prime, FieldCtx, FieldElem, DEFAULT_SIZE_CAP};
use crate::maps::{eval_h_tilde_proj, find_omega, proj_pow, Deg1Map, MapError, SparsePoly};
use crate::rng::SplitMix64;
use crate::sets::{gamma_set, lambda_set, mu_set, p1_points, q_of, ProjPoint};

use super::{injective_on_cosets, is_permutation_of_field, is_permutation_on, VerifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step1Outcome {
    /// `f` permutes GF(q^3).
    pub lhs: bool,
    /// `L + (X^q - X) ∘ B` permutes Γ.
    pub permutes_gamma: bool,
    /// `L + Tr ∘ C` is injective on every coset `u + F_q`.
    pub injective_on_cosets: bool,
    pub rhs: bool,
    #[serde(rename = "match")]
    pub matched: bool,
}

fn ensure_cubic(ctx: &FieldCtx, k: u32) -> Result<u64, VerifyError> {
    if k == 0 || ctx.degree() != 3 * k {
        return Err(VerifyError::InvalidParameter(format!(
            "expected GF(p^{}), got degree {}",
            3 * k,
            ctx.degree()
        )));
    }
    Ok(q_of(ctx, k))
}

/// Evaluates both sides of the additive reduction for
/// `f = L + B ∘ (X^q - X) + Tr ∘ C`.
pub fn check_step1_instance(
    ctx: &FieldCtx,
    k: u32,
    l: &SparsePoly,
    b: &SparsePoly,
    c: &SparsePoly,
) -> Result<Step1Outcome, VerifyError> {
    let q = ensure_cubic(ctx, k)?;
    let p = ctx.characteristic() as u64;
    for &(e, coeff) in l.terms() {
        if !is_power_of(e, p) || !ctx.is_in_subfield(coeff, k)? {
            return Err(VerifyError::MalformedLinearized(format!(
                "term {}*X^{e}",
                coeff.index()
            )));
        }
    }
    let diff = |x: FieldElem| ctx.sub(ctx.pow(x, q), x);
    let trace = |x: FieldElem| ctx.trace_rel_unchecked(x, k);

    let lhs = is_permutation_of_field(ctx, |x| {
        let v = ctx.add(l.eval(ctx, x), b.eval(ctx, diff(x)));
        ctx.add(v, trace(c.eval(ctx, x)))
    });
    let gamma = gamma_set(ctx, k)?;
    let permutes_gamma = is_permutation_on(ctx, &gamma, |y| {
        ctx.add(l.eval(ctx, y), diff(b.eval(ctx, y)))
    });
    let injective =
        injective_on_cosets(ctx, k, |x| ctx.add(l.eval(ctx, x), trace(c.eval(ctx, x))))?;
    let rhs = permutes_gamma && injective;
    Ok(Step1Outcome {
        lhs,
        permutes_gamma,
        injective_on_cosets: injective,
        rhs,
        matched: lhs == rhs,
    })
}

fn is_power_of(v: u64, base: u64) -> bool {
    let mut v = v;
    if v == 0 {
        return false;
    }
    while v.is_multiple_of(base) {
        v /= base;
    }
    v == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step2Outcome {
    /// `X^r B(X^(q-1))` permutes Γ.
    pub e1: bool,
    /// `gcd(r, q-1) = 1` and `X^r B(X)^(q-1)` permutes Λ.
    pub e2: bool,
    /// `gcd(r, q-1) = 1`, `B` has no root in Λ, and
    /// `X^r B^(q)(-1/X - 1) / B(X)` permutes Λ.
    pub e3: bool,
    pub all_equal: bool,
}

/// Evaluates the three equivalent conditions of the multiplicative reduction.
pub fn check_step2_instance(
    ctx: &FieldCtx,
    k: u32,
    r: u64,
    b: &SparsePoly,
) -> Result<Step2Outcome, VerifyError> {
    let q = ensure_cubic(ctx, k)?;
    if r == 0 {
        return Err(VerifyError::InvalidParameter("r must be positive".into()));
    }
    let gamma = gamma_set(ctx, k)?;
    let lambda = lambda_set(ctx, k)?;
    let coprime = gcd(r, q - 1) == 1;

    let e1 = is_permutation_on(ctx, &gamma, |x| {
        ctx.mul(ctx.pow(x, r), b.eval(ctx, ctx.pow(x, q - 1)))
    });
    let e2 = coprime
        && is_permutation_on(ctx, &lambda, |x| {
            ctx.mul(ctx.pow(x, r), ctx.pow(b.eval(ctx, x), q - 1))
        });
    let no_roots = lambda.iter().all(|&x| !b.eval(ctx, x).is_zero());
    let e3 = coprime && no_roots && {
        let bq = b.frobenius_coeffs(ctx, k);
        let minus_one = ctx.from_int(-1);
        is_permutation_on(ctx, &lambda, |x| {
            // x lies in Λ, so x and B(x) are nonzero here.
            let inv = ctx.inv(x).expect("0 is not in Λ");
            let arg = ctx.sub(ctx.mul(minus_one, inv), ctx.one());
            let num = ctx.mul(ctx.pow(x, r), bq.eval(ctx, arg));
            ctx.div(num, b.eval(ctx, x)).expect("B has no root in Λ")
        })
    };
    Ok(Step2Outcome {
        e1,
        e2,
        e3,
        all_equal: e1 == e2 && e2 == e3,
    })
}

fn random_nonzero(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElem {
    FieldElem::from_index_unchecked(1 + rng.below(ctx.order() as u64 - 1) as u32)
}

fn random_elem(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElem {
    FieldElem::from_index_unchecked(rng.below(ctx.order() as u64) as u32)
}

/// A pseudo-random `(L, B, C)` triple. Structured shapes (the `X^(Q+1)` and
/// `X^3` kernels, linearized `C`) are mixed in so both verdicts occur.
pub fn random_step1_instance(
    ctx: &FieldCtx,
    k: u32,
    rng: &mut SplitMix64,
) -> (SparsePoly, SparsePoly, SparsePoly) {
    let p = ctx.characteristic() as u64;
    let n = ctx.degree();
    let fq_star: Vec<FieldElem> = ctx
        .subfield_elements(k)
        .expect("k divides the degree")
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    let p_power = |rng: &mut SplitMix64| p.pow(rng.below(n as u64) as u32);
    let order = ctx.order() as u64;

    let l = match rng.below(3) {
        0 => SparsePoly::zero(),
        1 => SparsePoly::new(ctx, [(p_power(rng), *rng.pick(&fq_star))]),
        _ => SparsePoly::new(
            ctx,
            [
                (p_power(rng), *rng.pick(&fq_star)),
                (p_power(rng), *rng.pick(&fq_star)),
            ],
        ),
    };
    let b = match rng.below(5) {
        0 => SparsePoly::zero(),
        1 => SparsePoly::monomial(ctx, p_power(rng) + 1, ctx.one()),
        2 => SparsePoly::monomial(ctx, 3, ctx.one()),
        3 => SparsePoly::monomial(ctx, rng.below(order), random_nonzero(ctx, rng)),
        _ => SparsePoly::new(
            ctx,
            [
                (rng.below(order), random_nonzero(ctx, rng)),
                (rng.below(order), random_nonzero(ctx, rng)),
            ],
        ),
    };
    let c = match rng.below(4) {
        0 => SparsePoly::zero(),
        1 => SparsePoly::monomial(ctx, p_power(rng), random_elem(ctx, rng)),
        2 => SparsePoly::monomial(ctx, p_power(rng) + p_power(rng), *rng.pick(&fq_star)),
        _ => SparsePoly::monomial(ctx, rng.below(order), random_nonzero(ctx, rng)),
    };
    (l, b, c)
}

/// A pseudo-random `(r, B)` pair, mixing in `B = X^(Q+1) - 1` with
/// `r = Q + 1` and `B = X^3 - 1` with `r = 3`.
pub fn random_step2_instance(ctx: &FieldCtx, rng: &mut SplitMix64) -> (u64, SparsePoly) {
    let p = ctx.characteristic() as u64;
    let order = ctx.order() as u64;
    let minus_one = ctx.from_int(-1);
    match rng.below(5) {
        0 => {
            let e = p.pow(rng.below(ctx.degree() as u64) as u32) + 1;
            (e, SparsePoly::new(ctx, [(e, ctx.one()), (0, minus_one)]))
        }
        1 => (3, SparsePoly::new(ctx, [(3, ctx.one()), (0, minus_one)])),
        2 => (
            1 + rng.below(order - 1),
            SparsePoly::monomial(ctx, 0, random_nonzero(ctx, rng)),
        ),
        3 => (
            1 + rng.below(order - 1),
            SparsePoly::monomial(ctx, rng.below(order), random_nonzero(ctx, rng)),
        ),
        _ => (
            1 + rng.below(order - 1),
            SparsePoly::new(
                ctx,
                [
                    (rng.below(order), random_nonzero(ctx, rng)),
                    (rng.below(order), random_elem(ctx, rng)),
                ],
            ),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub lemma: &'static str,
    pub p: u64,
    pub k: u32,
    pub seed: u64,
    pub instances: usize,
    /// Instances where the reduced condition holds (both sides true).
    pub positive: usize,
    pub mismatches: usize,
}

impl BatchReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

pub fn run_step1_batch(
    p: u64,
    k: u32,
    count: usize,
    seed: u64,
) -> Result<BatchReport, VerifyError> {
    let ctx = FieldCtx::build(p, 3 * k)?;
    let mut rng = SplitMix64::new(seed);
    let mut positive = 0;
    let mut mismatches = 0;
    for _ in 0..count {
        let (l, b, c) = random_step1_instance(&ctx, k, &mut rng);
        let out = check_step1_instance(&ctx, k, &l, &b, &c)?;
        positive += usize::from(out.lhs && out.rhs);
        mismatches += usize::from(!out.matched);
    }
    Ok(BatchReport {
        lemma: "step1",
        p,
        k,
        seed,
        instances: count,
        positive,
        mismatches,
    })
}

pub fn run_step2_batch(
    p: u64,
    k: u32,
    count: usize,
    seed: u64,
) -> Result<BatchReport, VerifyError> {
    let ctx = FieldCtx::build(p, 3 * k)?;
    let mut rng = SplitMix64::new(seed);
    let mut positive = 0;
    let mut mismatches = 0;
    for _ in 0..count {
        let (r, b) = random_step2_instance(&ctx, &mut rng);
        let out = check_step2_instance(&ctx, k, r, &b)?;
        positive += usize::from(out.e1 && out.e2 && out.e3);
        mismatches += usize::from(!out.all_equal);
    }
    Ok(BatchReport {
        lemma: "step2",
        p,
        k,
        seed,
        instances: count,
        positive,
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GcdLemmaReport {
    pub lemma: &'static str,
    pub checked: u64,
    pub mismatches: u64,
}

/// Both `2^k ± 1` coprimality statements against their 2-adic forms, for all
/// `1 <= k <= 60`, `0 <= l <= 60`.
pub fn run_gcd_lemma() -> GcdLemmaReport {
    let mut checked = 0;
    let mut mismatches = 0;
    for k in 1..=GCD_PATTERN_MAX {
        for l in 0..=GCD_PATTERN_MAX {
            let (plus, minus) = gcd_pattern(k, l).expect("within bounds");
            let (ok, ol) = (ord2(k as i64), ord2(l as i64));
            checked += 1;
            if plus != (ok != ol) || minus != (ok <= ol) {
                mismatches += 1;
            }
        }
    }
    GcdLemmaReport {
        lemma: "gcd",
        checked,
        mismatches,
    }
}

/// Per-lemma tallies: maps of the stated form that were checked, and how many
/// failed the stated behavior.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormCheck {
    pub forms: u64,
    pub failures: u64,
    /// Degree-1 maps over GF(q^2) with the behavior; present when enumerated.
    pub behaving_maps: Option<u64>,
    /// Behaving maps not of the stated form.
    pub converse_failures: Option<u64>,
}

impl FormCheck {
    fn ok(&self) -> bool {
        self.failures == 0 && self.converse_failures.unwrap_or(0) == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaCheck {
    pub q_mod_3: u64,
    /// `ρ` permutes ℙ¹(F_q) and μ_{q+1} (expected iff q ≡ 1 mod 3).
    pub permutes_both: bool,
    /// `ρ` maps ℙ¹(F_q) onto μ_{q+1} and back (expected iff q ≡ 2 mod 3).
    pub swaps: bool,
    /// `ρ ∘ ρ` is the identity on ℙ¹(GF(q^2)); checked for even q.
    pub involution: Option<bool>,
}

impl OmegaCheck {
    fn ok(&self) -> bool {
        let expected = match self.q_mod_3 {
            1 => self.permutes_both,
            _ => self.swaps,
        };
        expected && self.involution.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deg1Report {
    pub lemma: &'static str,
    pub q: u64,
    pub permutes_mu: FormCheck,
    pub p1_onto_mu: FormCheck,
    pub mu_onto_p1: FormCheck,
    /// Absent when 3 divides q.
    pub omega: Option<OmegaCheck>,
    pub passed: bool,
}

/// Largest q for which every degree-1 map over GF(q^2) is enumerated.
pub const DEG1_CONVERSE_MAX_Q: u64 = 8;

fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    if !is_prime(p) {
        return None;
    }
    let mut k = 0;
    let mut v = q;
    while v.is_multiple_of(p) {
        v /= p;
        k += 1;
    }
    (v == 1).then_some((p, k))
}

struct PointSet {
    member: Vec<bool>,
    points: Vec<ProjPoint>,
}

impl PointSet {
    fn new(ctx: &FieldCtx, points: Vec<ProjPoint>) -> Self {
        let mut member = vec![false; ctx.order() as usize + 1];
        for pt in &points {
            member[slot(ctx, *pt)] = true;
        }
        PointSet { member, points }
    }

    fn contains(&self, ctx: &FieldCtx, pt: ProjPoint) -> bool {
        self.member[slot(ctx, pt)]
    }
}

fn slot(ctx: &FieldCtx, pt: ProjPoint) -> usize {
    match pt {
        ProjPoint::Finite(a) => a.index() as usize,
        ProjPoint::Infinity => ctx.order() as usize,
    }
}

/// Whether `map` sends `from` bijectively onto `to` (sets of equal size).
fn maps_onto(
    ctx: &FieldCtx,
    map: impl Fn(ProjPoint) -> ProjPoint,
    from: &PointSet,
    to: &PointSet,
) -> bool {
    if from.points.len() != to.points.len() {
        return false;
    }
    let mut seen = vec![false; ctx.order() as usize + 1];
    from.points.iter().all(|&pt| {
        let y = map(pt);
        let s = slot(ctx, y);
        to.contains(ctx, y) && !std::mem::replace(&mut seen[s], true)
    })
}

/// Checks the three degree-1 lemmas over GF(q^2) in both directions and the
/// behavior of `ρ = (ωX + 1)/(X + ω)`.
pub fn check_deg1_lemmas(q: u64) -> Result<Deg1Report, VerifyError> {
    let (p, k) = prime_power(q)
        .ok_or_else(|| VerifyError::InvalidParameter(format!("{q} is not a prime power")))?;
    let ctx = FieldCtx::build(p, 2 * k)?;
    let mu = PointSet::new(
        &ctx,
        mu_set(&ctx, q + 1)
            .into_iter()
            .map(ProjPoint::Finite)
            .collect(),
    );
    let p1 = PointSet::new(&ctx, p1_points(&ctx, k)?);
    let elems: Vec<FieldElem> = ctx.elements().collect();

    type Form = fn(&FieldCtx, FieldElem, FieldElem, u64) -> Option<[FieldElem; 4]>;
    let forms: [(Form, &PointSet, &PointSet); 3] = [
        // (b^q X + a^q) / (a X + b), a^(q+1) != b^(q+1)
        (
            |ctx, a, b, q| {
                (ctx.pow(a, q + 1) != ctx.pow(b, q + 1))
                    .then(|| [ctx.pow(b, q), ctx.pow(a, q), a, b])
            },
            &mu,
            &mu,
        ),
        // (a^q X + b^q) / (a X + b), a^q b != a b^q
        (
            |ctx, a, b, q| {
                (ctx.mul(ctx.pow(a, q), b) != ctx.mul(a, ctx.pow(b, q)))
                    .then(|| [ctx.pow(a, q), ctx.pow(b, q), a, b])
            },
            &p1,
            &mu,
        ),
        // (b X + b^q) / (a X + a^q), a^q b != a b^q
        (
            |ctx, a, b, q| {
                (ctx.mul(ctx.pow(a, q), b) != ctx.mul(a, ctx.pow(b, q)))
                    .then(|| [b, ctx.pow(b, q), a, ctx.pow(a, q)])
            },
            &mu,
            &p1,
        ),
    ];

    let mut checks: Vec<FormCheck> = Vec::new();
    let mut form_keys: Vec<HashSet<[FieldElem; 4]>> = Vec::new();
    for (form, from, to) in &forms {
        let mut check = FormCheck::default();
        let mut keys = HashSet::new();
        for &a in &elems {
            for &b in &elems {
                let Some([x, y, z, w]) = form(&ctx, a, b, q) else {
                    continue;
                };
                check.forms += 1;
                match Deg1Map::new(&ctx, x, y, z, w) {
                    Ok(rho) => {
                        if !maps_onto(&ctx, |pt| rho.eval(&ctx, pt), from, to) {
                            check.failures += 1;
                        }
                        keys.insert(rho.normalized(&ctx));
                    }
                    Err(_) => check.failures += 1,
                }
            }
        }
        checks.push(check);
        form_keys.push(keys);
    }

    if q <= DEG1_CONVERSE_MAX_Q {
        for check in checks.iter_mut() {
            check.behaving_maps = Some(0);
            check.converse_failures = Some(0);
        }
        let mut visit = |rho: Deg1Map| {
            let key = rho.normalized(&ctx);
            for (i, (_, from, to)) in forms.iter().enumerate() {
                if maps_onto(&ctx, |pt| rho.eval(&ctx, pt), from, to) {
                    *checks[i].behaving_maps.as_mut().unwrap() += 1;
                    if !form_keys[i].contains(&key) {
                        *checks[i].converse_failures.as_mut().unwrap() += 1;
                    }
                }
            }
        };
        // Every degree-1 map, normalized so the first nonzero of (c, d) is 1.
        for &a in &elems {
            for &b in &elems {
                for &d in &elems {
                    if let Ok(rho) = Deg1Map::new(&ctx, a, b, ctx.one(), d) {
                        visit(rho);
                    }
                }
                if let Ok(rho) = Deg1Map::new(&ctx, a, b, ctx.zero(), ctx.one()) {
                    visit(rho);
                }
            }
        }
    }

    let omega = if q.is_multiple_of(3) {
        None
    } else {
        let w = find_omega(&ctx)?;
        let rho = Deg1Map::new(&ctx, w, ctx.one(), ctx.one(), w)?;
        let apply = |pt| rho.eval(&ctx, pt);
        let involution = (p == 2).then(|| {
            p1_points(&ctx, 2 * k)
                .expect("full field")
                .into_iter()
                .all(|pt| rho.eval(&ctx, rho.eval(&ctx, pt)) == pt)
        });
        Some(OmegaCheck {
            q_mod_3: q % 3,
            permutes_both: maps_onto(&ctx, apply, &p1, &p1) && maps_onto(&ctx, apply, &mu, &mu),
            swaps: maps_onto(&ctx, apply, &p1, &mu) && maps_onto(&ctx, apply, &mu, &p1),
            involution,
        })
    };

    let passed = checks.iter().all(FormCheck::ok) && omega.as_ref().is_none_or(OmegaCheck::ok);
    let mut it = checks.into_iter();
    Ok(Deg1Report {
        lemma: "deg1",
        q,
        permutes_mu: it.next().unwrap(),
        p1_onto_mu: it.next().unwrap(),
        mu_onto_p1: it.next().unwrap(),
        omega,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HtildeReport {
    pub lemma: &'static str,
    pub k: u32,
    pub l: u32,
    /// `"inverse"` for `ρ ∘ X^-(Q+1) ∘ ρ`, `"power"` for `ρ ∘ X^(Q-1) ∘ ρ`.
    pub conjugate: &'static str,
    /// Size of ℙ¹(GF(q^3)).
    pub points: usize,
    /// The composite equals `h̃` at every point of ℙ¹(GF(q^3)).
    pub agrees: bool,
    /// Size of ℙ¹(GF(q^6)).
    pub ambient_points: usize,
    /// Points of ℙ¹(GF(q^6)) where the `h̃` formula reads 0/0.
    pub ambient_indeterminate: usize,
    /// The composite equals `h̃` at every other point of ℙ¹(GF(q^6)).
    pub ambient_agrees: bool,
}

impl HtildeReport {
    pub fn passed(&self) -> bool {
        self.agrees && self.ambient_agrees
    }
}

/// Compares `ρ ∘ X^-(Q+1) ∘ ρ` (even `l`) or `ρ ∘ X^(Q-1) ∘ ρ` (odd `l`) with
/// `h̃`, where `q = 2^k`, `ρ = (ωX + 1)/(X + ω)`, computed inside GF(2^(6k)).
pub fn check_htilde_identities(k: u32, l: u32) -> Result<HtildeReport, VerifyError> {
    if k == 0 {
        return Err(VerifyError::InvalidParameter("k must be positive".into()));
    }
    if ord2(k as i64) > ord2(l as i64) {
        return Err(VerifyError::InvalidParameter(format!(
            "ord2(k) <= ord2(l) fails for k={k}, l={l}"
        )));
    }
    let ctx = FieldCtx::build_with_cap(2, 6 * k, DEFAULT_SIZE_CAP)?;
    let w = find_omega(&ctx)?;
    let rho = Deg1Map::new(&ctx, w, ctx.one(), ctx.one(), w)?;
    let big_q = 1i64
        .checked_shl(l)
        .filter(|_| l < 62)
        .ok_or_else(|| MapError::ExponentOverflow(format!("2^{l}")))?;
    let even = l.is_multiple_of(2);
    let exponent = if even { -(big_q + 1) } else { big_q - 1 };
    let composite = |pt: ProjPoint| {
        let inner = rho.eval(&ctx, pt);
        let mid = if exponent == 0 {
            inner
        } else {
            proj_pow(&ctx, inner, exponent)
        };
        rho.eval(&ctx, mid)
    };

    let cubic_points = p1_points(&ctx, 3 * k)?;
    let agrees = cubic_points
        .iter()
        .all(|&pt| eval_h_tilde_proj(&ctx, l, pt) == Ok(composite(pt)));

    let ambient = p1_points(&ctx, 6 * k)?;
    let mut ambient_indeterminate = 0;
    let mut ambient_agrees = true;
    for &pt in &ambient {
        match eval_h_tilde_proj(&ctx, l, pt) {
            Ok(v) => ambient_agrees &= v == composite(pt),
            Err(MapError::Indeterminate(_)) => ambient_indeterminate += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(HtildeReport {
        lemma: "htilde",
        k,
        l,
        conjugate: if even { "inverse" } else { "power" },
        points: cubic_points.len(),
        agrees,
        ambient_points: ambient.len(),
        ambient_indeterminate,
        ambient_agrees,
    })
}

/// Values of `l` in `[0, max_l]` with `ord2(k) <= ord2(l)`.
pub fn admissible_l(k: u32, max_l: u32) -> Vec<u32> {
    let ok = ord2(k as i64);
    (0..=max_l).filter(|&l| ok <= ord2(l as i64)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemarkReading {
    /// `(x^q - x)^3 + x^(2q) + x^q + x`: the bivariate form at `Y = X^q`.
    Literal,
    /// `(x^q - x)^3 + x^(q^2) + x^q + x`: the trace form.
    Trace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemarkRecord {
    pub reading: RemarkReading,
    pub p: u64,
    pub k: u32,
    pub empirical: bool,
    /// Set only where a verdict is asserted: `q = 2`, where both readings
    /// coincide with a proven instance.
    pub asserted: Option<bool>,
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemarkReport {
    pub literal: RemarkRecord,
    pub trace: RemarkRecord,
}

/// Permutation behavior of both readings of the bivariate cubic on
/// GF(q^3), `q = p^k`, `p ≡ 2 (mod 3)`.
pub fn check_remark(p: u64, k: u32, timings: bool) -> Result<RemarkReport, VerifyError> {
    if !is_prime(p) || p % 3 != 2 {
        return Err(VerifyError::InvalidParameter(format!(
            "p must be a prime congruent to 2 mod 3, got {p}"
        )));
    }
    if k == 0 {
        return Err(VerifyError::InvalidParameter("k must be positive".into()));
    }
    let ctx = FieldCtx::build(p, 3 * k)?;
    let q = q_of(&ctx, k);
    let asserted = (q == 2).then_some(true);
    let cubic = |x: FieldElem| ctx.pow(ctx.sub(ctx.pow(x, q), x), 3);
    let run = |reading: RemarkReading, second: u64| {
        let start = Instant::now();
        let empirical = is_permutation_of_field(&ctx, |x| {
            let tail = ctx.add(ctx.add(ctx.pow(x, second), ctx.pow(x, q)), x);
            ctx.add(cubic(x), tail)
        });
        RemarkRecord {
            reading,
            p,
            k,
            empirical,
            asserted,
            elapsed_ms: timings.then(|| start.elapsed().as_millis() as u64),
        }
    };
    Ok(RemarkReport {
        literal: run(RemarkReading::Literal, 2 * q),
        trace: run(RemarkReading::Trace, q * q),
    })
}
