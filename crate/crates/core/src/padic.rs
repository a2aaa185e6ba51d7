//! p-adic scalars in floating-point form: `p^v * u + O(p^(v + k))`.
//!
//! A [`PadicScalar`] is either a unit times a power of `p`, known to a
//! relative precision `k`, or a zero known to some absolute precision.
//! Structural zeros (padding coefficients, empty matrix blocks) are exact
//! and never lose precision. Every other value carries the precision that
//! survived the arithmetic that produced it, using the usual worst-case
//! rules: cancellation in a sum lowers the relative precision by the
//! valuation it gains.

use std::cmp::min;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("relative precision must be at least 1")]
    InvalidPrecision,
    #[error("valuation {valuation} is below the denominator budget -{budget}")]
    DenominatorBudgetExceeded { valuation: i64, budget: u32 },
    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("scalars over different primes ({0} and {1})")]
    MixedPrimes(u32, u32),
    #[error("cannot parse p-adic scalar: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn ppow(p: u32, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Splits a nonzero natural number as `p^w * rest`.
fn strip_p(p: u32, mut n: BigUint) -> (u32, BigUint) {
    let pb = BigUint::from(p);
    let mut w = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (w, n);
        }
        n = q;
        w += 1;
    }
}

/// Writes `n = p^v * u` exactly. Returns `None` for `n = 0`.
pub fn valuation_of_integer(p: u32, n: &BigInt) -> Option<(u32, BigInt)> {
    if n.is_zero() {
        return None;
    }
    let (w, rest) = strip_p(p, n.magnitude().clone());
    let unit = BigInt::from_biguint(n.sign(), rest);
    Some((w, unit))
}

/// Global parameters shared by every scalar of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicContext {
    p: u32,
    rel_prec: u32,
    denom_budget: u32,
}

impl PadicContext {
    pub fn new(p: u32, rel_prec: u32, denom_budget: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if rel_prec == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        Ok(Self {
            p,
            rel_prec,
            denom_budget,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rel_prec(&self) -> u32 {
        self.rel_prec
    }

    pub fn denom_budget(&self) -> u32 {
        self.denom_budget
    }

    /// Same prime and budget, different default precision.
    pub fn with_rel_prec(&self, rel_prec: u32) -> Result<Self> {
        Self::new(self.p, rel_prec, self.denom_budget)
    }

    pub fn with_denom_budget(&self, denom_budget: u32) -> Self {
        Self {
            denom_budget,
            ..*self
        }
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar::exact_zero(self.p)
    }

    pub fn one(&self) -> PadicScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> PadicScalar {
        self.from_bigint(&BigInt::from(n))
    }

    /// Integers become scalars known to the context's relative precision;
    /// zero stays exact.
    pub fn from_bigint(&self, n: &BigInt) -> PadicScalar {
        PadicScalar::from_bigint(self.p, n, self.rel_prec)
    }

    /// `num / den` for integers, `den != 0`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<PadicScalar> {
        let d = self.inv(&self.from_int(den))?;
        self.mul(&self.from_int(num), &d)
    }

    /// `p^e`, exactly a power of `p` with unit 1.
    pub fn p_power(&self, e: i64) -> PadicScalar {
        PadicScalar::nonzero(self.p, e, BigUint::one(), self.rel_prec)
    }

    pub fn valuation_of_integer(&self, n: &BigInt) -> Option<(u32, BigInt)> {
        valuation_of_integer(self.p, n)
    }

    pub fn check_budget(&self, a: &PadicScalar) -> Result<()> {
        match a.valuation() {
            Some(v) if v < -(self.denom_budget as i64) => Err(PadicError::DenominatorBudgetExceeded {
                valuation: v,
                budget: self.denom_budget,
            }),
            _ => Ok(()),
        }
    }

    pub fn add(&self, a: &PadicScalar, b: &PadicScalar) -> PadicScalar {
        a.add(b)
    }

    /// Product with the denominator budget enforced.
    pub fn mul(&self, a: &PadicScalar, b: &PadicScalar) -> Result<PadicScalar> {
        let c = a.mul(b);
        self.check_budget(&c)?;
        Ok(c)
    }

    /// Inverse with the denominator budget enforced.
    pub fn inv(&self, a: &PadicScalar) -> Result<PadicScalar> {
        let c = a.inv()?;
        self.check_budget(&c)?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Indistinguishable from zero modulo `p^abs_prec`; `None` is an exact zero.
    Zero { abs_prec: Option<i64> },
    /// `p^valuation * unit + O(p^(valuation + rel_prec))`, `unit` in `[1, p^rel_prec)`.
    Nonzero {
        valuation: i64,
        unit: BigUint,
        rel_prec: u32,
    },
}

/// Outcome of comparing two scalars at a required absolute precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Unequal,
    /// The difference is zero only below the required precision.
    Indistinguishable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u32,
    repr: Repr,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(min(x, y)),
    }
}

impl PadicScalar {
    pub fn exact_zero(p: u32) -> Self {
        Self {
            p,
            repr: Repr::Zero { abs_prec: None },
        }
    }

    /// Zero known modulo `p^abs_prec`.
    pub fn zero_to(p: u32, abs_prec: i64) -> Self {
        Self {
            p,
            repr: Repr::Zero {
                abs_prec: Some(abs_prec),
            },
        }
    }

    /// Builds `p^valuation * unit` reducing `unit` modulo `p^rel_prec`.
    /// Panics if `unit` is divisible by `p`; use [`PadicScalar::from_parts`]
    /// for unchecked input.
    fn nonzero(p: u32, valuation: i64, unit: BigUint, rel_prec: u32) -> Self {
        debug_assert!(rel_prec >= 1);
        debug_assert!(!(&unit % p).is_zero());
        let unit = unit % ppow(p, rel_prec);
        Self {
            p,
            repr: Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            },
        }
    }

    pub fn from_parts(p: u32, valuation: i64, unit: BigUint, rel_prec: u32) -> Result<Self> {
        if rel_prec == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        if (&unit % p).is_zero() {
            return Err(PadicError::Parse(format!("unit {unit} is divisible by {p}")));
        }
        Ok(Self::nonzero(p, valuation, unit, rel_prec))
    }

    pub fn from_bigint(p: u32, n: &BigInt, rel_prec: u32) -> Self {
        match valuation_of_integer(p, n) {
            None => Self::exact_zero(p),
            Some((v, u)) => {
                let m = BigInt::from(ppow(p, rel_prec));
                let u = u.mod_floor(&m).to_biguint().expect("non-negative after mod_floor");
                Self::nonzero(p, v as i64, u, rel_prec)
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `None` means the value is indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { valuation, .. } => Some(*valuation),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => Some(unit),
        }
    }

    pub fn rel_prec(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { rel_prec, .. } => Some(*rel_prec),
        }
    }

    /// Certified absolute precision; `None` for an exact zero.
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Nonzero {
                valuation, rel_prec, ..
            } => Some(valuation + *rel_prec as i64),
        }
    }

    /// True when the value is indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs_prec: None })
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Certified to lie in `Z_p`.
    pub fn is_integral(&self) -> bool {
        match &self.repr {
            Repr::Zero { abs_prec } => abs_prec.is_none_or(|a| a >= 0),
            Repr::Nonzero { valuation, .. } => *valuation >= 0,
        }
    }

    /// Valuation used for bounds: zeros count as their absolute precision.
    pub fn valuation_floor(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Nonzero { valuation, .. } => Some(*valuation),
        }
    }

    fn same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "{}", PadicError::MixedPrimes(self.p, other.p));
    }

    pub fn zero_like(&self) -> Self {
        Self::exact_zero(self.p)
    }

    /// One, with the relative precision of `self` (or `rel_prec` if `self` is zero).
    pub fn one_like(&self, fallback_prec: u32) -> Self {
        let k = self.rel_prec().unwrap_or(fallback_prec);
        Self::nonzero(self.p, 0, BigUint::one(), k)
    }

    /// Lowers the relative precision to at most `k`.
    pub fn truncate_rel(&self, k: u32) -> Self {
        match &self.repr {
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } if *rel_prec > k => Self::nonzero(self.p, *valuation, unit.clone(), k.max(1)),
            _ => self.clone(),
        }
    }

    /// Lowers the absolute precision to at most `a`.
    pub fn truncate_abs(&self, a: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_prec } => Self::zero_to(self.p, abs_prec.map_or(a, |x| x.min(a))),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                if *valuation >= a {
                    Self::zero_to(self.p, a)
                } else {
                    let k = min(*rel_prec as i64, a - valuation) as u32;
                    Self::nonzero(self.p, *valuation, unit.clone(), k)
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => Self {
                p: self.p,
                repr: Repr::Zero {
                    abs_prec: min_prec(*a, *b),
                },
            },
            (Repr::Zero { abs_prec }, _) => match abs_prec {
                None => other.clone(),
                Some(a) => other.truncate_abs(*a),
            },
            (_, Repr::Zero { abs_prec }) => match abs_prec {
                None => self.clone(),
                Some(a) => self.truncate_abs(*a),
            },
            (
                Repr::Nonzero {
                    valuation: va,
                    unit: ua,
                    rel_prec: ra,
                },
                Repr::Nonzero {
                    valuation: vb,
                    unit: ub,
                    rel_prec: rb,
                },
            ) => {
                let abs = min(va + *ra as i64, vb + *rb as i64);
                let v = min(*va, *vb);
                let k = (abs - v) as u32;
                let m = ppow(self.p, k);
                let shift = |u: &BigUint, w: i64| -> BigUint {
                    let s = (w - v) as u64;
                    if s >= k as u64 {
                        BigUint::zero()
                    } else {
                        u * ppow(self.p, s as u32)
                    }
                };
                let s = (shift(ua, *va) + shift(ub, *vb)) % &m;
                if s.is_zero() {
                    return Self::zero_to(self.p, abs);
                }
                let (w, unit) = strip_p(self.p, s);
                Self::nonzero(self.p, v + w as i64, unit, k - w)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                let m = ppow(self.p, *rel_prec);
                Self::nonzero(self.p, *valuation, m - unit, *rel_prec)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: a }, Repr::Zero { abs_prec: b }) => match (a, b) {
                (Some(x), Some(y)) => Self::zero_to(self.p, x + y),
                _ => Self::exact_zero(self.p),
            },
            (Repr::Zero { abs_prec }, Repr::Nonzero { valuation, .. })
            | (Repr::Nonzero { valuation, .. }, Repr::Zero { abs_prec }) => match abs_prec {
                None => Self::exact_zero(self.p),
                Some(a) => Self::zero_to(self.p, a + valuation),
            },
            (
                Repr::Nonzero {
                    valuation: va,
                    unit: ua,
                    rel_prec: ra,
                },
                Repr::Nonzero {
                    valuation: vb,
                    unit: ub,
                    rel_prec: rb,
                },
            ) => {
                let k = min(*ra, *rb);
                Self::nonzero(self.p, va + vb, ua * ub, k)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(PadicError::DivisionByZero),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                let m = BigInt::from(ppow(self.p, *rel_prec));
                let u = BigInt::from(unit.clone());
                let g = u.extended_gcd(&m);
                debug_assert!(g.gcd.is_one());
                let inv = g.x.mod_floor(&m).to_biguint().expect("reduced mod m");
                Ok(Self::nonzero(self.p, -valuation, inv, *rel_prec))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = self.one_like(self.rel_prec().unwrap_or(1));
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplication by `p^e`.
    pub fn shift(&self, e: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_prec } => Self {
                p: self.p,
                repr: Repr::Zero {
                    abs_prec: abs_prec.map(|a| a + e),
                },
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => Self::nonzero(self.p, valuation + e, unit.clone(), *rel_prec),
        }
    }

    /// Compares `self` and `other`; zero differences count as equal only
    /// when certified to absolute precision `min_abs_prec`.
    pub fn compare(&self, other: &Self, min_abs_prec: i64) -> Comparison {
        self.sub(other).zero_status(min_abs_prec)
    }

    /// Three-valued zero test.
    pub fn zero_status(&self, min_abs_prec: i64) -> Comparison {
        match &self.repr {
            Repr::Nonzero { .. } => Comparison::Unequal,
            Repr::Zero { abs_prec: None } => Comparison::Equal,
            Repr::Zero { abs_prec: Some(a) } if *a >= min_abs_prec => Comparison::Equal,
            Repr::Zero { .. } => Comparison::Indistinguishable,
        }
    }

    /// The residue of an integral value modulo `p^k`, when certified.
    pub fn residue(&self, k: u32) -> Option<BigUint> {
        let m = ppow(self.p, k);
        match &self.repr {
            Repr::Zero { abs_prec } => match abs_prec {
                Some(a) if *a < k as i64 => None,
                _ => Some(BigUint::zero()),
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                if *valuation < 0 || valuation + (*rel_prec as i64) < k as i64 {
                    return None;
                }
                if *valuation >= k as i64 {
                    return Some(BigUint::zero());
                }
                Some((unit * ppow(self.p, *valuation as u32)) % m)
            }
        }
    }

    /// Balanced integer representative of an integral value modulo `p^k`.
    pub fn to_bigint_mod(&self, k: u32) -> Option<BigInt> {
        let r = BigInt::from(self.residue(k)?);
        let m = BigInt::from(ppow(self.p, k));
        let half = &m / 2;
        Some(if r > half { r - m } else { r })
    }

    pub fn to_record(&self) -> ScalarRecord {
        match &self.repr {
            Repr::Zero { abs_prec } => ScalarRecord {
                v: None,
                u: None,
                prec: *abs_prec,
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => ScalarRecord {
                v: Some(*valuation),
                u: Some(unit.to_string()),
                prec: Some(*rel_prec as i64),
            },
        }
    }

    pub fn from_record(p: u32, r: &ScalarRecord) -> Result<Self> {
        match (&r.v, &r.u) {
            (None, None) => Ok(match r.prec {
                None => Self::exact_zero(p),
                Some(a) => Self::zero_to(p, a),
            }),
            (Some(v), Some(u)) => {
                let unit = BigUint::from_str(u).map_err(|e| PadicError::Parse(format!("unit {u:?}: {e}")))?;
                let prec = r
                    .prec
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| PadicError::Parse("nonzero scalar needs a positive prec".into()))?;
                if unit >= ppow(p, prec) {
                    return Err(PadicError::Parse(format!("unit {unit} not reduced modulo {p}^{prec}")));
                }
                Self::from_parts(p, *v, unit, prec)
            }
            _ => Err(PadicError::Parse("v and u must both be present or both absent".into())),
        }
    }

    /// Rational approximation `num / p^s` of the value (for diagnostics).
    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Zero { .. } => 0.0,
            Repr::Nonzero { valuation, unit, .. } => {
                let u = BigInt::from_biguint(Sign::Plus, unit.clone()).to_f64().unwrap_or(f64::NAN);
                u * (self.p as f64).powi(*valuation as i32)
            }
        }
    }
}

/// Serialized form `{v, u, prec}`: for nonzero values `prec` is the relative
/// precision; for zeros `v` and `u` are absent and `prec` is the absolute
/// precision (absent for an exact zero).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarRecord {
    pub v: Option<i64>,
    pub u: Option<String>,
    pub prec: Option<i64>,
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs_prec: None } => write!(f, "0 (exact)"),
            Repr::Zero { abs_prec: Some(a) } => write!(f, "0 (prec {a})"),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => write!(f, "{}^{} * {} (prec {})", self.p, valuation, unit, rel_prec),
        }
    }
}

impl FromStr for PadicScalar {
    type Err = PadicError;

    /// Parses the [`Display`](fmt::Display) form, e.g. `3^-1 * 2 (prec 20)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PadicError::Parse(s.to_string());
        let s = s.trim();
        let (head, tail) = s.split_once('(').ok_or_else(bad)?;
        let tail = tail.strip_suffix(')').ok_or_else(bad)?.trim();
        let head = head.trim();
        if head == "0" {
            // Zeros do not name their prime; see `parse_with_prime`.
            return Err(PadicError::Parse("zero needs an explicit prime".into()));
        }
        let prec: u32 = tail
            .strip_prefix("prec")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let (pv, u) = head.split_once('*').ok_or_else(bad)?;
        let (p, v) = pv.trim().split_once('^').ok_or_else(bad)?;
        let p: u32 = p.trim().parse().map_err(|_| bad())?;
        let v: i64 = v.trim().parse().map_err(|_| bad())?;
        let u = BigUint::from_str(u.trim()).map_err(|_| bad())?;
        if u >= ppow(p, prec) {
            return Err(bad());
        }
        Self::from_parts(p, v, u, prec)
    }
}

impl PadicScalar {
    /// Parses the text form, using `p` for zeros (whose text omits it).
    pub fn parse_with_prime(p: u32, s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('0') {
            let rest = rest.trim();
            if rest == "(exact)" {
                return Ok(Self::exact_zero(p));
            }
            if let Some(a) = rest.strip_prefix("(prec").and_then(|r| r.strip_suffix(')')) {
                let a: i64 = a.trim().parse().map_err(|_| PadicError::Parse(s.to_string()))?;
                return Ok(Self::zero_to(p, a));
            }
        }
        let x: Self = t.parse()?;
        if x.p != p {
            return Err(PadicError::MixedPrimes(x.p, p));
        }
        Ok(x)
    }
}

/// An integer that serializes as a decimal string and deserializes from
/// either a string or a JSON number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigIntText(pub BigInt);

impl Serialize for BigIntText {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigIntText {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Self(BigInt::from(n))),
            Raw::Text(t) => BigInt::from_str(t.trim())
                .map(Self)
                .map_err(|e| serde::de::Error::custom(format!("integer {t:?}: {e}"))),
        }
    }
}

impl From<i64> for BigIntText {
    fn from(n: i64) -> Self {
        Self(BigInt::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u32, k: u32) -> PadicContext {
        PadicContext::new(p, k, 10).unwrap()
    }

    fn parts(x: &PadicScalar) -> (Option<i64>, Option<u64>) {
        (x.valuation(), x.unit().map(|u| u.to_u64().unwrap()))
    }

    #[test]
    fn context_rejects_bad_primes() {
        assert_eq!(PadicContext::new(2, 5, 0), Err(PadicError::NotOddPrime(2)));
        assert_eq!(PadicContext::new(9, 5, 0), Err(PadicError::NotOddPrime(9)));
        assert_eq!(PadicContext::new(3, 0, 0), Err(PadicError::InvalidPrecision));
    }

    #[test]
    fn exact_cancellation_keeps_absolute_precision() {
        let c = ctx(3, 20);
        let z = c.one().add(&c.from_int(-1));
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(z.abs_prec(), Some(20));
    }

    #[test]
    fn sums_from_the_examples() {
        let c = ctx(3, 20);
        assert_eq!(parts(&c.from_int(6).add(&c.from_int(3))), (Some(2), Some(1)));
        let c5 = ctx(3, 5);
        let a = PadicScalar::from_parts(3, 0, 2u32.into(), 5).unwrap();
        let b = PadicScalar::from_parts(3, 1, 1u32.into(), 5).unwrap();
        // 2 + 3 = 5 as integers
        assert_eq!(parts(&a.add(&b)), (Some(0), Some(5)));
        assert_eq!(c5.add(&a, &b).rel_prec(), Some(5));
    }

    #[test]
    fn inverse_mod_243() {
        let two = PadicScalar::from_parts(3, 0, 2u32.into(), 5).unwrap();
        let oracle = (0u64..243).find(|x| (2 * x) % 243 == 1).unwrap();
        assert_eq!(parts(&two.inv().unwrap()), (Some(0), Some(oracle)));
        assert_eq!(oracle, 122);
    }

    #[test]
    fn inverse_of_p() {
        let c = ctx(3, 20);
        let ip = c.inv(&c.from_int(3)).unwrap();
        assert_eq!(parts(&ip), (Some(-1), Some(1)));
        assert_eq!(c.from_int(3).mul(&ip), c.one());
        assert_eq!(c.inv(&c.zero()), Err(PadicError::DivisionByZero));
    }

    #[test]
    fn budget_is_enforced() {
        let c = PadicContext::new(3, 20, 1).unwrap();
        let a = c.p_power(-1);
        assert!(c.mul(&a, &c.one()).is_ok());
        assert_eq!(
            c.mul(&a, &a),
            Err(PadicError::DenominatorBudgetExceeded {
                valuation: -2,
                budget: 1
            })
        );
    }

    #[test]
    fn integer_valuations() {
        let v = |p, n: i64| valuation_of_integer(p, &BigInt::from(n));
        assert_eq!(v(3, 6), Some((1, BigInt::from(2))));
        assert_eq!(v(3, 0), None);
        assert_eq!(v(5, 250), Some((3, BigInt::from(2))));
        assert_eq!(v(5, -250), Some((3, BigInt::from(-2))));
    }

    #[test]
    fn three_valued_comparison() {
        let c = ctx(3, 10);
        let a = c.from_int(1);
        let b = c.from_int(1 + 3i64.pow(12));
        // differ only beyond the known digits
        assert_eq!(a.compare(&b, 10), Comparison::Equal);
        assert_eq!(a.compare(&b, 11), Comparison::Indistinguishable);
        assert_eq!(a.compare(&c.from_int(2), 5), Comparison::Unequal);
    }

    #[test]
    fn text_forms() {
        let c = ctx(3, 20);
        let x = c.from_ratio(2, 3).unwrap();
        assert_eq!(x.to_string(), "3^-1 * 2 (prec 20)");
        assert_eq!("3^-1 * 2 (prec 20)".parse::<PadicScalar>().unwrap(), x);
        assert_eq!(PadicScalar::parse_with_prime(3, "0 (exact)").unwrap(), c.zero());
        assert_eq!(
            PadicScalar::parse_with_prime(3, "0 (prec 7)").unwrap(),
            PadicScalar::zero_to(3, 7)
        );
        assert!("3^0 * 3 (prec 4)".parse::<PadicScalar>().is_err());
        assert!(PadicScalar::parse_with_prime(5, "3^0 * 1 (prec 4)").is_err());
    }

    #[test]
    fn big_integers_as_text() {
        let t: Vec<BigIntText> = serde_json::from_str(r#"[3, "-12345678901234567890123"]"#).unwrap();
        assert_eq!(t[0], BigIntText::from(3));
        assert_eq!(serde_json::to_string(&t[1]).unwrap(), r#""-12345678901234567890123""#);
    }

    fn scalar(p: u32) -> impl Strategy<Value = PadicScalar> {
        (-3i64..4, 1u64..1_000_000, 6u32..16).prop_filter_map("unit", move |(v, u, k)| {
            PadicScalar::from_parts(p, v, BigUint::from(u), k).ok()
        })
    }

    /// Certified agreement: the difference vanishes at the weaker of the
    /// two absolute precisions.
    fn agree(a: &PadicScalar, b: &PadicScalar) -> bool {
        let floor = min(a.abs_prec().unwrap_or(i64::MAX), b.abs_prec().unwrap_or(i64::MAX));
        a.compare(b, floor) == Comparison::Equal
    }

    proptest! {
        #[test]
        fn addition_is_associative(a in scalar(3), b in scalar(3), c in scalar(3)) {
            prop_assert!(agree(&a.add(&b).add(&c), &a.add(&b.add(&c))));
        }

        #[test]
        fn multiplication_distributes(a in scalar(5), b in scalar(5), c in scalar(5)) {
            prop_assert!(agree(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        }

        #[test]
        fn multiplication_is_associative(a in scalar(3), b in scalar(3), c in scalar(3)) {
            prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        }

        #[test]
        fn inverse_is_inverse(a in scalar(7)) {
            let one = a.one_like(1);
            prop_assert!(agree(&a.mul(&a.inv().unwrap()), &one));
        }

        #[test]
        fn valuation_is_a_valuation(a in scalar(3), b in scalar(3)) {
            let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
            prop_assert_eq!(a.mul(&b).valuation(), Some(va + vb));
            let s = a.add(&b);
            match s.valuation() {
                Some(vs) => {
                    prop_assert!(vs >= min(va, vb));
                    if va != vb {
                        prop_assert_eq!(vs, min(va, vb));
                    }
                }
                None => prop_assert_eq!(va, vb),
            }
        }

        #[test]
        fn integer_arithmetic_matches_residues(x in -10_000_000i64..10_000_000, y in -10_000_000i64..10_000_000) {
            let c = ctx(3, 12);
            let (a, b) = (c.from_int(x), c.from_int(y));
            for (got, want) in [(a.add(&b), x + y), (a.mul(&b), x * y), (a.sub(&b), x - y)] {
                let k = got.abs_prec().unwrap_or(40).clamp(0, 40) as u32;
                let m = 3i128.pow(k);
                let oracle = (want as i128).rem_euclid(m);
                let r = got.residue(k).unwrap().to_i128().unwrap();
                prop_assert_eq!(r, oracle);
            }
        }

        #[test]
        fn record_and_text_roundtrip(a in scalar(5)) {
            prop_assert_eq!(PadicScalar::from_record(5, &a.to_record()).unwrap(), a.clone());
            prop_assert_eq!(PadicScalar::parse_with_prime(5, &a.to_string()).unwrap(), a);
        }
    }
}
