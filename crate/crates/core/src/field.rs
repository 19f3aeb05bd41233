//! Prime-power fields GF(p^n) built over a deterministic modulus.
//!
//! Elements are stored packed: the power-basis coordinates `c_0, ..., c_{n-1}`
//! are the base-`p` digits of a single integer, constant term least
//! significant. That integer is also the element's index, so bitmaps over a
//! field are indexed directly by element.
//!
//! Construction picks the monic irreducible of degree `n` with the smallest
//! base-`p` encoding, found by exhaustive trial division. Multiplication,
//! inversion and exponentiation then go through log/antilog tables built from
//! the smallest-index primitive element. The schoolbook product reduced by the
//! modulus ([`FieldCtx::mul_reference`]) and square-and-multiply
//! ([`FieldCtx::pow_square_multiply`]) stay available as the reference path the
//! tables are checked against.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Largest field order accepted by [`FieldCtx::build`].
pub const DEFAULT_SIZE_CAP: u64 = 1 << 22;

/// Largest integer exponent the evaluators accept.
pub const MAX_EXPONENT: u64 = 1 << 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({p}^{n}) exceeds the size cap of {cap} elements")]
    SizeCap { p: u64, n: u32, cap: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("index {index} out of range for a field with {order} elements")]
    IndexOutOfRange { index: u64, order: u32 },
    #[error("expected {expected} coefficients in [0, {p}), got {got:?}")]
    BadCoefficients {
        expected: u32,
        p: u32,
        got: Vec<u32>,
    },
    #[error("{m} does not divide the extension degree {n}")]
    NotADivisor { m: u32, n: u32 },
    #[error("relative trace to GF(p^{k}) needs extension degree {}, field has degree {n}", 3 * k)]
    TraceDegree { k: u32, n: u32 },
    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),
}

/// A nonnegative integer or infinity; infinity is above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinity,
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.cmp(b),
            (ExtNat::Finite(_), ExtNat::Infinity) => Ordering::Less,
            (ExtNat::Infinity, ExtNat::Finite(_)) => Ordering::Greater,
            (ExtNat::Infinity, ExtNat::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Infinity => f.write_str("inf"),
        }
    }
}

/// One element of a [`FieldCtx`], packed as its base-`p` index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub(crate) fn from_index_unchecked(index: u32) -> Self {
        FieldElem(index)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// An immutable description of GF(p^n) together with its arithmetic tables.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: FieldElem,
    // exp has length 2 * (order - 1) so a log sum never needs reducing.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(d);
            while v.is_multiple_of(d) {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// Remainder of `f` modulo the monic polynomial `g`, coefficients mod `p`.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let dg = g.len() - 1;
    let mut r = f.to_vec();
    if r.len() <= dg {
        return r;
    }
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        let shift = top - dg;
        for (j, &gj) in g.iter().enumerate() {
            let sub = (c as u64 * gj as u64 % p as u64) as u32;
            r[shift + j] = (r[shift + j] + p - sub) % p;
        }
    }
    r.truncate(dg);
    r
}

/// Digits of `index` in base `p`, exactly `len` of them.
fn digits(mut index: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = (index % p as u64) as u32;
        index /= p as u64;
    }
    out
}

/// Trial division against every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for lower in 0..count {
            let mut g = digits(lower, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible of degree `n` over F_p with the smallest base-`p`
/// encoding, constant term least significant.
pub fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for lower in 0..count {
        let mut f = digits(lower, p, n as usize);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// Builds GF(p^n) under the default size cap.
    pub fn build(p: u64, n: u32) -> Result<Self, FieldError> {
        Self::build_with_cap(p, n, DEFAULT_SIZE_CAP)
    }

    pub fn build_with_cap(p: u64, n: u32, cap: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n < 1 {
            return Err(FieldError::ZeroDegree);
        }
        let cap = cap.min(u32::MAX as u64);
        let order = p
            .checked_pow(n)
            .filter(|&o| o <= cap)
            .ok_or(FieldError::SizeCap { p, n, cap })?;
        let p = p as u32;
        let modulus = smallest_irreducible(p, n);
        let mut ctx = FieldCtx {
            p,
            n,
            order: order as u32,
            modulus,
            generator: FieldElem::ONE,
            exp: Vec::new(),
            log: Vec::new(),
        };
        ctx.build_tables();
        Ok(ctx)
    }

    fn build_tables(&mut self) {
        let group = (self.order - 1) as u64;
        let factors = prime_factors(group);
        let generator = (1..self.order)
            .map(FieldElem)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_square_multiply(g, group / r) != FieldElem::ONE)
            })
            .expect("the multiplicative group of a finite field is cyclic");
        let group = group as usize;
        let mut exp = vec![0u32; 2 * group];
        let mut log = vec![0u32; self.order as usize];
        let mut cur = FieldElem::ONE;
        for i in 0..group {
            exp[i] = cur.0;
            exp[i + group] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = if self.p == 2 {
                self.mul_binary(cur, generator)
            } else {
                self.mul_reference(cur, generator)
            };
        }
        self.generator = generator;
        self.exp = exp;
        self.log = log;
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements, p^n.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, constant term first; the last entry is 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Smallest-index primitive element, the base of the log tables.
    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join(" + ")
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn element_index(&self, a: FieldElem) -> u32 {
        a.0
    }

    pub fn element_from_index(&self, index: u64) -> Result<FieldElem, FieldError> {
        if index >= self.order as u64 {
            return Err(FieldError::IndexOutOfRange {
                index,
                order: self.order,
            });
        }
        Ok(FieldElem(index as u32))
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.n as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients {
                expected: self.n,
                p: self.p,
                got: coeffs.to_vec(),
            });
        }
        Ok(FieldElem(
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c),
        ))
    }

    /// Power-basis coordinates, constant term first.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        digits(a.0 as u64, self.p, self.n as usize)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut weight = 1u32;
        while x != 0 || y != 0 {
            let d = x % p + y % p;
            out += if d >= p { d - p } else { d } * weight;
            weight *= p;
            x /= p;
            y /= p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut x = a.0;
        let mut out = 0u32;
        let mut weight = 1u32;
        while x != 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * weight;
            }
            weight *= p;
            x /= p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElem(self.exp[s as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let group = self.order - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((group - l) % group) as usize]))
    }

    /// `a / b`, or `None` when `b = 0`.
    #[inline]
    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        if b.0 == 0 {
            return None;
        }
        if a.0 == 0 {
            return Some(FieldElem::ZERO);
        }
        let group = self.order - 1;
        let s = self.log[a.0 as usize] + group - self.log[b.0 as usize];
        Some(FieldElem(self.exp[s as usize]))
    }

    /// `a^e` with `0^0 = 1` and `0^e = 0` for `e > 0`.
    #[inline]
    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let group = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElem(self.exp[(l * (e % group) % group) as usize])
    }

    /// `a^(p^e)`; the Frobenius exponent is taken modulo the degree.
    #[inline]
    pub fn frobenius(&self, a: FieldElem, e: u64) -> FieldElem {
        self.pow(a, (self.p as u64).pow((e % self.n as u64) as u32))
    }

    /// `a^(q^2) + a^q + a` with `q = p^k`; requires degree `3k`.
    pub fn trace_rel(&self, a: FieldElem, k: u32) -> Result<FieldElem, FieldError> {
        if k == 0 || self.n != 3 * k {
            return Err(FieldError::TraceDegree { k, n: self.n });
        }
        Ok(self.trace_rel_unchecked(a, k))
    }

    #[inline]
    pub(crate) fn trace_rel_unchecked(&self, a: FieldElem, k: u32) -> FieldElem {
        let q = (self.p as u64).pow(k);
        let aq = self.pow(a, q);
        let aq2 = self.pow(aq, q);
        self.add(self.add(aq2, aq), a)
    }

    /// Whether `a` lies in the subfield of degree `m`, i.e. `a^(p^m) = a`.
    pub fn is_in_subfield(&self, a: FieldElem, m: u32) -> Result<bool, FieldError> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(FieldError::NotADivisor { m, n: self.n });
        }
        Ok(self.frobenius(a, m as u64) == a)
    }

    /// Elements of the degree-`m` subfield, in index order.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<FieldElem>, FieldError> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(FieldError::NotADivisor { m, n: self.n });
        }
        Ok(self
            .elements()
            .filter(|&a| self.frobenius(a, m as u64) == a)
            .collect())
    }

    /// Schoolbook product of the coordinate vectors reduced by the modulus.
    pub fn mul_reference(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let n = self.n as usize;
        let p = self.p as u64;
        let x = self.coeffs(a);
        let y = self.coeffs(b);
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + xi as u64 * yj as u64) % p) as u32;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        let mut packed = 0u32;
        for i in (0..n).rev() {
            packed = packed * self.p + r.get(i).copied().unwrap_or(0);
        }
        FieldElem(packed)
    }

    /// Carry-less product for `p = 2`; agrees with [`FieldCtx::mul_reference`].
    fn mul_binary(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let n = self.n;
        let mut acc = 0u64;
        for i in 0..n {
            if b.0 >> i & 1 == 1 {
                acc ^= (a.0 as u64) << i;
            }
        }
        let f = self
            .modulus
            .iter()
            .rev()
            .fold(0u64, |v, &c| v << 1 | c as u64);
        for top in (n..2 * n).rev() {
            if acc >> top & 1 == 1 {
                acc ^= f << (top - n);
            }
        }
        FieldElem(acc as u32)
    }

    /// Square-and-multiply over [`FieldCtx::mul_reference`], exponent reduced
    /// modulo `p^n - 1` for nonzero bases.
    pub fn pow_square_multiply(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let mut e = e % (self.order as u64 - 1);
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_reference(acc, base);
            }
            base = self.mul_reference(base, base);
            e >>= 1;
        }
        acc
    }
}
