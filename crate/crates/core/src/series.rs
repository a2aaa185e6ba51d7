//! Polynomials and truncated power series over [`PadicScalar`], and the
//! finite quotients `Λ_n = Z_p[X]/ω_n` of the Iwasawa algebra.
//!
//! Only the `Z_p[[X]]` part of the Iwasawa algebra is modelled. A
//! character of conductor `p` is evaluation at `X = 0`; a character of
//! conductor `p^(n+1)` is replaced by reduction modulo `Φ_{p^n}(1+X)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Matrix, Ring, ScalarMatrix};
use crate::padic::{PadicContext, PadicError, PadicScalar, ScalarRecord};
use crate::report::{scalar_equal, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("leading coefficient {0} of the divisor is not a unit")]
    NonUnitLeading(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("constant term is not invertible: {0}")]
    NotInvertible(String),
    #[error("substitution needs a series without constant term")]
    NonzeroConstant,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("malformed record: {0}")]
    Record(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Dense polynomial; coefficient of `X^j` at index `j`. Trailing exact
/// zeros are never stored, zeros known only to some precision are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    p: u32,
    coeffs: Vec<PadicScalar>,
}

fn trim(mut c: Vec<PadicScalar>) -> Vec<PadicScalar> {
    while c.last().is_some_and(PadicScalar::is_exact_zero) {
        c.pop();
    }
    c
}

fn add_vecs(p: u32, a: &[PadicScalar], b: &[PadicScalar]) -> Vec<PadicScalar> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => PadicScalar::exact_zero(p),
        })
        .collect()
}

/// Product of coefficient vectors, keeping only the first `limit` terms.
fn mul_vecs(p: u32, a: &[PadicScalar], b: &[PadicScalar], limit: usize) -> Vec<PadicScalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = (a.len() + b.len() - 1).min(limit);
    let mut out = vec![PadicScalar::exact_zero(p); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if y.is_exact_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Row `binom(m, 0..=m)` as exact integers.
pub(crate) fn binomial_row(m: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(m as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for j in 0..m {
        c = c * BigInt::from(m - j) / BigInt::from(j + 1);
        row.push(c.clone());
    }
    row
}

impl Poly {
    pub fn zero(p: u32) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn from_coeffs(p: u32, coeffs: Vec<PadicScalar>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.p() == p));
        Self {
            p,
            coeffs: trim(coeffs),
        }
    }

    pub fn constant(c: PadicScalar) -> Self {
        Self::from_coeffs(c.p(), vec![c])
    }

    pub fn from_ints(ctx: &PadicContext, coeffs: &[i64]) -> Self {
        Self::from_coeffs(ctx.p(), coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    pub fn from_bigints(ctx: &PadicContext, coeffs: &[BigInt]) -> Self {
        Self::from_coeffs(ctx.p(), coeffs.iter().map(|c| ctx.from_bigint(c)).collect())
    }

    /// The indeterminate `X`.
    pub fn x(ctx: &PadicContext) -> Self {
        Self::from_coeffs(ctx.p(), vec![ctx.zero(), ctx.one()])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<PadicScalar> {
        self.coeffs
    }

    /// Coefficient of `X^j` (an exact zero past the stored range).
    pub fn coeff(&self, j: usize) -> PadicScalar {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| PadicScalar::exact_zero(self.p))
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the highest coefficient distinguishable from zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_coeffs(self.p, add_vecs(self.p, &self.coeffs, &other.coeffs))
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(PadicScalar::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_coeffs(self.p, mul_vecs(self.p, &self.coeffs, &other.coeffs, usize::MAX))
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        Self::from_coeffs(self.p, self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        let mut c = vec![PadicScalar::exact_zero(self.p); k];
        c.extend(self.coeffs.iter().cloned());
        Self { p: self.p, coeffs: c }
    }

    pub fn pow(&self, e: u32, one: &PadicScalar) -> Self {
        let mut acc = Self::constant(one.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The constant coefficient: evaluation at the trivial character.
    pub fn eval_at_zero(&self) -> PadicScalar {
        self.coeff(0)
    }

    /// The polynomial modulo `X^n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::from_coeffs(self.p, self.coeffs.iter().take(n).cloned().collect())
    }

    /// Leading coefficient and its index, refusing a leading coefficient
    /// that is zero only at precision.
    fn leading(&self) -> Result<(usize, &PadicScalar)> {
        let lc = self.coeffs.last().ok_or(SeriesError::ZeroDivisor)?;
        if lc.is_zero() {
            return Err(SeriesError::PrecisionLoss(format!(
                "leading coefficient of degree {} is {lc}",
                self.coeffs.len() - 1
            )));
        }
        Ok((self.coeffs.len() - 1, lc))
    }

    /// Euclidean division `self = q * g + r` with `len(r) <= deg(g)`;
    /// `g` must have a unit leading coefficient.
    pub fn divide_exact(&self, g: &Self) -> Result<(Self, Self)> {
        let (dg, lc) = g.leading()?;
        if !lc.is_unit() {
            return Err(SeriesError::NonUnitLeading(lc.to_string()));
        }
        let lc_inv = lc.inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dg {
            return Ok((Self::zero(self.p), self.clone()));
        }
        let mut q = vec![PadicScalar::exact_zero(self.p); rem.len() - dg];
        for i in (dg..rem.len()).rev() {
            if rem[i].is_exact_zero() {
                continue;
            }
            let c = rem[i].mul(&lc_inv);
            for (j, gj) in g.coeffs.iter().enumerate().take(dg) {
                if !gj.is_exact_zero() {
                    rem[i - dg + j] = rem[i - dg + j].sub(&c.mul(gj));
                }
            }
            q[i - dg] = c;
        }
        rem.truncate(dg);
        Ok((Self::from_coeffs(self.p, q), Self::from_coeffs(self.p, rem)))
    }

    /// Remainder modulo a polynomial with unit leading coefficient.
    pub fn rem(&self, g: &Self) -> Result<Self> {
        Ok(self.divide_exact(g)?.1)
    }

    pub fn min_valuation(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(PadicScalar::valuation).min()
    }

    /// Smallest certified absolute precision over the coefficients.
    pub fn min_abs_prec(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(PadicScalar::abs_prec).min()
    }

    /// Substitution `self(g)` for a polynomial `g`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Coefficientwise equality at absolute precision `floor`, with the
    /// first offending degree as witness.
    pub fn equal_verdict(&self, other: &Self, floor: i64) -> Verdict {
        let n = self.len().max(other.len());
        Verdict::all((0..n).map(|j| scalar_equal(&self.coeff(j), &other.coeff(j), floor).context(format!("X^{j}"))))
    }

    pub fn zero_verdict(&self, floor: i64) -> Verdict {
        self.equal_verdict(&Self::zero(self.p), floor)
    }

    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            degree: self.coeffs.len().checked_sub(1),
            coeffs: self.coeffs.iter().map(PadicScalar::to_record).collect(),
        }
    }

    pub fn from_record(p: u32, r: &PolyRecord) -> Result<Self> {
        if r.degree != r.coeffs.len().checked_sub(1) {
            return Err(SeriesError::Record(format!(
                "degree {:?} does not match {} coefficients",
                r.degree,
                r.coeffs.len()
            )));
        }
        let c = r
            .coeffs
            .iter()
            .map(|s| PadicScalar::from_record(p, s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(p, c))
    }
}

impl Ring for Poly {
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Poly::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(self.p)
    }
}

/// Serialized polynomial; `degree` is the index of the last stored
/// coefficient (absent for the zero polynomial).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub degree: Option<usize>,
    pub coeffs: Vec<ScalarRecord>,
}

/// `Φ_{p^n}(1+X) = Σ_{i<p} (1+X)^{i p^(n-1)}`, for `n >= 1`.
pub fn phi_cyclo(ctx: &PadicContext, n: u32) -> Poly {
    assert!(n >= 1, "Φ_(p^n) needs n >= 1");
    let p = ctx.p() as u64;
    let step = p.pow(n - 1);
    let deg = (p - 1) * step;
    let mut c = vec![BigInt::zero(); deg as usize + 1];
    for i in 0..p {
        for (j, b) in binomial_row(i * step).into_iter().enumerate() {
            c[j] += b;
        }
    }
    Poly::from_bigints(ctx, &c)
}

/// `ω_n(X) = (1+X)^{p^n} - 1`.
pub fn omega(ctx: &PadicContext, n: u32) -> Poly {
    let mut c = binomial_row((ctx.p() as u64).pow(n));
    c[0] = BigInt::zero();
    Poly::from_bigints(ctx, &c)
}

/// The ring `Λ_n = Z_p[X]/ω_n` (after inverting `p` when denominators
/// appear), shared by its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaN {
    ctx: PadicContext,
    level: u32,
    omega: Arc<Poly>,
}

impl LambdaN {
    pub fn new(ctx: &PadicContext, level: u32) -> Self {
        Self {
            ctx: *ctx,
            level,
            omega: Arc::new(omega(ctx, level)),
        }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn omega(&self) -> &Poly {
        &self.omega
    }

    /// `p^n`, the rank of `Λ_n` over `Z_p`.
    pub fn rank(&self) -> usize {
        (self.ctx.p() as usize).pow(self.level)
    }

    pub fn reduce(&self, f: &Poly) -> LambdaNElement {
        let rep = f.rem(&self.omega).expect("ω_n is monic");
        LambdaNElement {
            rep,
            level: self.level,
            omega: Arc::clone(&self.omega),
        }
    }

    pub fn zero(&self) -> LambdaNElement {
        self.reduce(&Poly::zero(self.ctx.p()))
    }

    pub fn one(&self) -> LambdaNElement {
        self.reduce(&Poly::constant(self.ctx.one()))
    }

    pub fn from_scalar(&self, c: &PadicScalar) -> LambdaNElement {
        self.reduce(&Poly::constant(c.clone()))
    }

    pub fn from_record(&self, r: &LambdaRecord) -> Result<LambdaNElement> {
        if r.level != self.level {
            return Err(SeriesError::LevelMismatch(r.level, self.level));
        }
        if r.coeffs.len() > self.rank() {
            return Err(SeriesError::Record(format!(
                "{} coefficients exceed p^n = {}",
                r.coeffs.len(),
                self.rank()
            )));
        }
        let c = r
            .coeffs
            .iter()
            .map(|s| PadicScalar::from_record(self.ctx.p(), s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(self.reduce(&Poly::from_coeffs(self.ctx.p(), c)))
    }
}

/// An element of `Λ_n`, stored as its representative of degree `< p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaNElement {
    rep: Poly,
    level: u32,
    omega: Arc<Poly>,
}

impl LambdaNElement {
    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    fn same_level(&self, other: &Self) {
        assert_eq!(self.level, other.level, "{}", SeriesError::LevelMismatch(self.level, other.level));
    }

    fn with_rep(&self, rep: Poly) -> Self {
        Self {
            rep,
            level: self.level,
            omega: Arc::clone(&self.omega),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_level(other);
        self.with_rep(self.rep.add(&other.rep))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_level(other);
        self.with_rep(self.rep.sub(&other.rep))
    }

    pub fn neg(&self) -> Self {
        self.with_rep(self.rep.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_level(other);
        self.with_rep(self.rep.mul(&other.rep).rem(&self.omega).expect("ω_n is monic"))
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        self.with_rep(self.rep.scale(s))
    }

    pub fn eval_at_zero(&self) -> PadicScalar {
        self.rep.eval_at_zero()
    }

    /// Image under the projection `Λ_n → Λ_m`, `m <= n`.
    pub fn project(&self, target: &LambdaN) -> Self {
        assert!(target.level() <= self.level, "projection goes down the tower");
        target.reduce(&self.rep)
    }

    pub fn equal_verdict(&self, other: &Self, floor: i64) -> Verdict {
        self.same_level(other);
        self.rep.equal_verdict(&other.rep, floor)
    }

    pub fn to_record(&self) -> LambdaRecord {
        LambdaRecord {
            level: self.level,
            coeffs: self.rep.coeffs().iter().map(PadicScalar::to_record).collect(),
        }
    }
}

impl Ring for LambdaNElement {
    fn add(&self, other: &Self) -> Self {
        LambdaNElement::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        LambdaNElement::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        LambdaNElement::mul(self, other)
    }
    fn neg(&self) -> Self {
        LambdaNElement::neg(self)
    }
    fn zero_like(&self) -> Self {
        self.with_rep(Poly::zero(self.rep.p()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub level: u32,
    pub coeffs: Vec<ScalarRecord>,
}

/// Power series known modulo `X^N`; exactly `N` coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XSeries {
    p: u32,
    coeffs: Vec<PadicScalar>,
}

impl XSeries {
    pub fn new(p: u32, mut coeffs: Vec<PadicScalar>, trunc: usize) -> Self {
        coeffs.resize(trunc, PadicScalar::exact_zero(p));
        Self { p, coeffs }
    }

    pub fn zero(p: u32, trunc: usize) -> Self {
        Self::new(p, Vec::new(), trunc)
    }

    pub fn one(ctx: &PadicContext, trunc: usize) -> Self {
        Self::new(ctx.p(), vec![ctx.one()], trunc)
    }

    pub fn from_poly(f: &Poly, trunc: usize) -> Self {
        Self::new(f.p(), f.coeffs().iter().take(trunc).cloned().collect(), trunc)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.p, self.coeffs.clone())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> PadicScalar {
        self.coeffs[j].clone()
    }

    pub fn eval_at_zero(&self) -> PadicScalar {
        self.coeffs
            .first()
            .cloned()
            .unwrap_or_else(|| PadicScalar::exact_zero(self.p))
    }

    fn common(&self, other: &Self) -> usize {
        self.trunc().min(other.trunc())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::new(self.p, add_vecs(self.p, &self.coeffs[..n], &other.coeffs[..n]), n)
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(PadicScalar::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::new(self.p, mul_vecs(self.p, &self.coeffs, &other.coeffs, n), n)
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    /// Multiplicative inverse; the constant term must be distinguishable
    /// from zero (it need not be a unit).
    pub fn inverse(&self) -> Result<Self> {
        let n = self.trunc();
        let a0 = self.eval_at_zero();
        let b0 = a0.inv().map_err(|_| SeriesError::NotInvertible(a0.to_string()))?;
        let mut b = Vec::with_capacity(n);
        b.push(b0.clone());
        for k in 1..n {
            let mut s = PadicScalar::exact_zero(self.p);
            for j in 1..=k {
                if !self.coeffs[j].is_exact_zero() {
                    s = s.add(&self.coeffs[j].mul(&b[k - j]));
                }
            }
            b.push(s.mul(&b0).neg());
        }
        Ok(Self { p: self.p, coeffs: b })
    }

    /// Substitution `self(g)` for `g` without constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.eval_at_zero().is_exact_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let n = self.common(g);
        let mut acc = Self::zero(self.p, n);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul(g);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }

    pub fn min_valuation(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(PadicScalar::valuation).min()
    }

    pub fn equal_verdict(&self, other: &Self, floor: i64) -> Verdict {
        let n = self.common(other);
        Verdict::all(
            (0..n).map(|j| scalar_equal(&self.coeffs[j], &other.coeffs[j], floor).context(format!("X^{j}"))),
        )
    }
}

impl Ring for XSeries {
    fn add(&self, other: &Self) -> Self {
        XSeries::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        XSeries::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        XSeries::mul(self, other)
    }
    fn neg(&self) -> Self {
        XSeries::neg(self)
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.p, self.trunc())
    }
}

/// Minimum coefficient valuation over the digit blocks `{0}`,
/// `[1, p)`, `[p, p^2)`, ...: block `k` covers degrees `[p^(k-1), p^k)`.
/// Blocks whose coefficients are all zero report `None`.
pub fn coefficient_valuation_profile(f: &Poly) -> Vec<(usize, Option<i64>)> {
    let p = f.p() as usize;
    let mut out = Vec::new();
    let (mut lo, mut hi, mut block) = (0usize, 1usize, 0usize);
    while lo < f.len().max(1) {
        let v = f.coeffs()[lo.min(f.len())..hi.min(f.len())]
            .iter()
            .filter_map(PadicScalar::valuation)
            .min();
        out.push((block, v));
        lo = hi;
        hi = if block == 0 { p } else { hi * p };
        block += 1;
    }
    out
}

/// Constant polynomial matrix.
pub fn constant_matrix(m: &ScalarMatrix) -> Matrix<Poly> {
    m.map(|c| Poly::constant(c.clone()))
}

/// Entrywise constant term.
pub fn eval_matrix_at_zero(m: &Matrix<Poly>) -> ScalarMatrix {
    m.map(Poly::eval_at_zero)
}

pub fn reduce_matrix(m: &Matrix<Poly>, ring: &LambdaN) -> Matrix<LambdaNElement> {
    m.map(|f| ring.reduce(f))
}

/// Entrywise equality of polynomial matrices, witness `(i, j) X^k`.
pub fn matrix_equal_verdict(a: &Matrix<Poly>, b: &Matrix<Poly>, floor: i64) -> Verdict {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Verdict::fail("shape mismatch");
    }
    Verdict::all((0..a.rows()).flat_map(|i| {
        (0..a.cols()).map(move |j| a.get(i, j).equal_verdict(b.get(i, j), floor).context(format!("entry ({i},{j})")))
    }))
}

/// Smallest coefficient valuation over all entries.
pub fn matrix_min_valuation(m: &Matrix<Poly>) -> Option<i64> {
    m.entries().filter_map(Poly::min_valuation).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Comparison;

    fn ctx3() -> PadicContext {
        PadicContext::new(3, 20, 10).unwrap()
    }

    #[test]
    fn phi_3_expands() {
        let c = ctx3();
        // (1+X)^0 + (1+X)^1 + (1+X)^2 = 3 + 3X + X^2
        assert_eq!(phi_cyclo(&c, 1), Poly::from_ints(&c, &[3, 3, 1]));
        assert_eq!(phi_cyclo(&c, 1).eval_at_zero(), c.from_int(3));
        let c5 = PadicContext::new(5, 20, 10).unwrap();
        assert_eq!(phi_cyclo(&c5, 1).degree(), Some(4));
        assert_eq!(phi_cyclo(&c5, 2).degree(), Some(20));
    }

    #[test]
    fn omega_small_levels() {
        let c = ctx3();
        assert_eq!(omega(&c, 0), Poly::from_ints(&c, &[0, 1]));
        assert_eq!(omega(&c, 1), Poly::from_ints(&c, &[0, 3, 3, 1]));
        let (q, r) = omega(&c, 1).divide_exact(&phi_cyclo(&c, 1)).unwrap();
        assert!(q.equal_verdict(&Poly::x(&c), 15).is_pass());
        assert!(r.zero_verdict(15).is_pass());
    }

    #[test]
    fn omega_tower_factorization() {
        let c = ctx3();
        for n in 1..=3 {
            let prod = omega(&c, n - 1).mul(&phi_cyclo(&c, n));
            assert!(prod.equal_verdict(&omega(&c, n), 15).is_pass(), "level {n}");
        }
    }

    #[test]
    fn division_examples() {
        let c = ctx3();
        let phi = phi_cyclo(&c, 1);
        let one_plus_x = Poly::from_ints(&c, &[1, 1]);
        let (q, r) = phi.mul(&one_plus_x).divide_exact(&phi).unwrap();
        assert!(q.equal_verdict(&one_plus_x, 15).is_pass());
        assert!(r.zero_verdict(15).is_pass());
        let (q, r) = Poly::from_ints(&c, &[1, 0, 1]).divide_exact(&Poly::x(&c)).unwrap();
        assert_eq!(q, Poly::x(&c));
        assert_eq!(r, Poly::from_ints(&c, &[1]));
    }

    #[test]
    fn non_unit_leading_coefficient_is_refused() {
        let c = ctx3();
        let g = Poly::from_ints(&c, &[1, 3]);
        assert!(matches!(
            Poly::from_ints(&c, &[1, 1, 1]).divide_exact(&g),
            Err(SeriesError::NonUnitLeading(_))
        ));
    }

    #[test]
    fn reduction_drops_multiples_of_omega() {
        let c = ctx3();
        let l1 = LambdaN::new(&c, 1);
        let h = Poly::from_ints(&c, &[2, -1, 5, 7]);
        let f = omega(&c, 1).mul(&h).add(&Poly::from_ints(&c, &[4]));
        assert!(l1.reduce(&f).rep().equal_verdict(&Poly::from_ints(&c, &[4]), 15).is_pass());
    }

    #[test]
    fn higher_cyclotomic_is_p_modulo_lower_omega() {
        let c = ctx3();
        for n in 1..=2 {
            let ring = LambdaN::new(&c, n);
            for m in (n + 1)..=3 {
                let r = ring.reduce(&phi_cyclo(&c, m));
                assert!(r.rep().equal_verdict(&Poly::from_ints(&c, &[3]), 15).is_pass());
            }
        }
    }

    #[test]
    fn xseries_inverse_and_compose() {
        let c = ctx3();
        let q = XSeries::from_poly(&Poly::from_ints(&c, &[3, 3, 1]), 12);
        let qi = q.inverse().unwrap();
        assert_eq!(qi.eval_at_zero().valuation(), Some(-1));
        let one = q.mul(&qi);
        assert!(one.equal_verdict(&XSeries::one(&c, 12), 5).is_pass());
        // (1+X)^3 - 1 composed with X is itself
        let w = XSeries::from_poly(&omega(&c, 1), 12);
        let x = XSeries::from_poly(&Poly::x(&c), 12);
        assert_eq!(w.compose(&x).unwrap(), w);
    }

    #[test]
    fn valuation_profile_blocks() {
        let c = ctx3();
        assert_eq!(coefficient_valuation_profile(&Poly::from_ints(&c, &[1])), vec![(0, Some(0))]);
        let f = phi_cyclo(&c, 2).scale(&c.p_power(-1));
        let prof = coefficient_valuation_profile(&f);
        assert_eq!(prof.len(), 3);
        assert!(prof.iter().all(|(_, v)| v.is_none_or(|v| v >= -1)));
        assert_eq!(prof[0], (0, Some(0)));
    }

    #[test]
    fn record_roundtrip() {
        let c = ctx3();
        let f = phi_cyclo(&c, 2).scale(&c.p_power(-2));
        let r = f.to_record();
        assert_eq!(Poly::from_record(3, &r).unwrap(), f);
        let ring = LambdaN::new(&c, 2);
        let e = ring.reduce(&f);
        assert_eq!(ring.from_record(&e.to_record()).unwrap(), e);
        assert_eq!(
            e.eval_at_zero().compare(&c.p_power(-1), 10),
            Comparison::Equal
        );
    }
}
