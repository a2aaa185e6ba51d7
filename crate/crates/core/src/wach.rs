//! `Z_p[[π]]` with its Frobenius `π ↦ (1+π)^p - 1` and the `Γ`-action
//! `π ↦ (1+π)^c - 1`, and the matrices behind the Wach module attached to
//! Frobenius data over `K = Q_p`:
//!
//! ```text
//! P_n  = C diag(I, 1/φ^{n-1}(q))           q = φ(π)/π
//! M'_n = C_φ^n P_n^-1 ⋯ P_1^-1             (a polynomial matrix)
//! G_γ^(n) = (M'_n)^-1 γ(M'_n) = P_1 ⋯ P_n γ(P_n^-1) ⋯ γ(P_1^-1)
//! ```
//!
//! `P_n^-1 = diag(I, φ^{n-1}(q)) C^-1` is polynomial, so `M'_n` and its tower
//! congruences are exact. Only `P_n`, `(M'_n)^-1` and `G` involve `1/q` and
//! live in truncated series; `1/q` has coefficients of valuation about
//! `-k/(p-1)` at `π^k`, so these need a generous relative precision.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::log_matrix::{build_mn, FrobeniusData, LogMatrixError};
use crate::matrix::{Matrix, MatrixError, ScalarMatrix};
use crate::padic::{PadicContext, PadicError, PadicScalar};
use crate::report::{scalar_equal, CheckSet, Verdict};
use crate::series::{binomial_row, constant_matrix, matrix_equal_verdict, omega, Poly, SeriesError, XSeries};

/// A power series in `π` known modulo `π^N`; same arithmetic as [`XSeries`].
pub type PiSeries = XSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WachError {
    #[error("Wach matrices are implemented for K = Q_p only (r = 1), got r = {0}")]
    RankNotOne(usize),
    #[error("gamma needs c = 1 mod p, got {0}")]
    NotPrincipalUnit(String),
    #[error("binomial coefficient at pi^{k} has precision {have}, need {need}")]
    PrecisionExhausted { k: usize, have: i64, need: i64 },
    #[error("coefficient valuation {valuation} is below the denominator budget -{budget}")]
    DenominatorBudgetExceeded { valuation: i64, budget: u32 },
    #[error("level must be at least 1")]
    LevelZero,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    LogMatrix(#[from] LogMatrixError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, WachError>;

pub const DEFAULT_TRUNC: usize = 30;

/// Frobenius data together with the `π`-adic truncation used for series.
#[derive(Debug, Clone)]
pub struct WachSetup {
    fd: FrobeniusData,
    trunc: usize,
}

impl WachSetup {
    pub fn new(fd: FrobeniusData, trunc: usize) -> Result<Self> {
        if fd.r() != 1 {
            return Err(WachError::RankNotOne(fd.r()));
        }
        Ok(Self { fd, trunc })
    }

    pub fn fd(&self) -> &FrobeniusData {
        &self.fd
    }
    pub fn ctx(&self) -> &PadicContext {
        self.fd.ctx()
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn floor(&self) -> i64 {
        self.fd.floor()
    }

    fn budget_check(&self, s: &PiSeries) -> Result<()> {
        let budget = self.ctx().denom_budget();
        match s.min_valuation() {
            Some(v) if v < -(budget as i64) => Err(WachError::DenominatorBudgetExceeded { valuation: v, budget }),
            _ => Ok(()),
        }
    }
}

/// `φ(π) = (1+π)^p - 1` as an exact polynomial.
pub fn phi_of_pi(ctx: &PadicContext) -> Poly {
    let mut row = binomial_row(ctx.p() as u64);
    row[0] = BigInt::from(0);
    Poly::from_bigints(ctx, &row)
}

/// `q = φ(π)/π = Σ_{k=1}^p binom(p, k) π^{k-1}`.
pub fn q_poly(ctx: &PadicContext) -> Poly {
    Poly::from_bigints(ctx, &binomial_row(ctx.p() as u64)[1..])
}

/// `φ^k(f)` for a polynomial, exactly.
pub fn phi_iterate_poly(ctx: &PadicContext, f: &Poly, k: u32) -> Poly {
    let phi = phi_of_pi(ctx);
    (0..k).fold(f.clone(), |acc, _| acc.compose(&phi))
}

/// `φ(f)`, the substitution `π ↦ (1+π)^p - 1`.
pub fn phi_act(ctx: &PadicContext, f: &PiSeries) -> Result<PiSeries> {
    Ok(f.compose(&XSeries::from_poly(&phi_of_pi(ctx), f.trunc()))?)
}

/// `γ` through its cyclotomic character value `c ∈ 1 + pZ_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaElement {
    c: CharacterValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CharacterValue {
    Integer(BigInt),
    Scalar(PadicScalar),
}

/// Extra digits carried beyond `v_p(k!)` when computing `binom(c, k)`.
const BINOMIAL_MARGIN: u32 = 4;

fn factorial_valuation(p: u32, k: usize) -> u32 {
    let (p, mut k, mut v) = (p as usize, k, 0);
    while k > 0 {
        k /= p;
        v += k;
    }
    v as u32
}

impl GammaElement {
    pub fn from_int(ctx: &PadicContext, c: i64) -> Result<Self> {
        if (c - 1).rem_euclid(ctx.p() as i64) != 0 {
            return Err(WachError::NotPrincipalUnit(c.to_string()));
        }
        Ok(Self {
            c: CharacterValue::Integer(BigInt::from(c)),
        })
    }

    /// A character value known only to its own precision; binomial
    /// coefficients inherit that precision.
    pub fn from_scalar(ctx: &PadicContext, c: PadicScalar) -> Result<Self> {
        let shifted = c.sub(&ctx.one());
        if !shifted.is_zero() && shifted.valuation().is_some_and(|v| v < 1) {
            return Err(WachError::NotPrincipalUnit(c.to_string()));
        }
        Ok(Self {
            c: CharacterValue::Scalar(c),
        })
    }

    /// The topological generator `c = 1 + p`.
    pub fn generator(ctx: &PadicContext) -> Self {
        Self::from_int(ctx, 1 + ctx.p() as i64).expect("1 + p is a principal unit")
    }

    pub fn value(&self, ctx: &PadicContext) -> PadicScalar {
        match &self.c {
            CharacterValue::Integer(c) => ctx.from_bigint(c),
            CharacterValue::Scalar(c) => c.clone(),
        }
    }

    /// `γ_c γ_c' = γ_{cc'}`.
    pub fn compose(&self, other: &Self) -> Self {
        let c = match (&self.c, &other.c) {
            (CharacterValue::Integer(a), CharacterValue::Integer(b)) => CharacterValue::Integer(a * b),
            (a, b) => {
                let scalar = |x: &CharacterValue, y: &CharacterValue| match x {
                    CharacterValue::Scalar(s) => s.clone(),
                    CharacterValue::Integer(n) => {
                        let p = match y {
                            CharacterValue::Scalar(s) => s.p(),
                            CharacterValue::Integer(_) => unreachable!(),
                        };
                        PadicScalar::from_bigint(p, n, u32::MAX / 4)
                    }
                };
                CharacterValue::Scalar(scalar(a, b).mul(&scalar(b, a)))
            }
        };
        Self { c }
    }

    /// Padding used for `binom(c, k)` with `k < trunc`.
    pub fn padding(ctx: &PadicContext, trunc: usize) -> u32 {
        factorial_valuation(ctx.p(), trunc.saturating_sub(1)) + BINOMIAL_MARGIN
    }

    /// `(1+π)^c - 1 = Σ_{k>=1} binom(c, k) π^k` modulo `π^trunc`.
    pub fn series(&self, ctx: &PadicContext, trunc: usize) -> Result<PiSeries> {
        let pad = Self::padding(ctx, trunc);
        let wide = ctx.with_rel_prec(ctx.rel_prec() + pad)?;
        let c = match &self.c {
            CharacterValue::Integer(n) => wide.from_bigint(n),
            CharacterValue::Scalar(s) => s.clone(),
        };
        let need = ctx.rel_prec() as i64;
        let mut coeffs = vec![PadicScalar::exact_zero(ctx.p())];
        let mut falling = wide.one();
        let mut factorial = BigInt::from(1);
        for k in 1..trunc {
            falling = falling.mul(&c.sub(&wide.from_int(k as i64 - 1)));
            factorial *= k;
            let b = falling.div(&wide.from_bigint(&factorial))?;
            let have = b.abs_prec().unwrap_or(i64::MAX);
            if have < need {
                return Err(WachError::PrecisionExhausted { k, have, need });
            }
            coeffs.push(b.truncate_rel(ctx.rel_prec()));
        }
        Ok(XSeries::new(ctx.p(), coeffs, trunc))
    }
}

/// `γ(f)`, the substitution `π ↦ (1+π)^c - 1`.
pub fn gamma_act(ctx: &PadicContext, f: &PiSeries, gamma: &GammaElement) -> Result<PiSeries> {
    Ok(f.compose(&gamma.series(ctx, f.trunc())?)?)
}

fn map_series(m: &Matrix<PiSeries>, f: impl Fn(&PiSeries) -> Result<PiSeries>) -> Result<Matrix<PiSeries>> {
    m.try_map(f)
}

fn series_matrix(m: &Matrix<Poly>, trunc: usize) -> Matrix<PiSeries> {
    m.map(|f| XSeries::from_poly(f, trunc))
}

fn scalar_series_matrix(m: &ScalarMatrix, trunc: usize) -> Matrix<PiSeries> {
    series_matrix(&constant_matrix(m), trunc)
}

/// `diag(I_{d0}, f I_{d-d0})`.
fn block_diag<R: crate::Ring>(d: usize, d0: usize, one: &R, f: &R) -> Matrix<R> {
    let zero = one.zero_like();
    Matrix::from_fn(d, d, |i, j| match (i == j, i < d0) {
        (false, _) => zero.clone(),
        (true, true) => one.clone(),
        (true, false) => f.clone(),
    })
}

/// `P_n = C diag(I, 1/φ^{n-1}(q))` modulo `π^trunc`.
pub fn build_pn(ws: &WachSetup, n: u32) -> Result<Matrix<PiSeries>> {
    if n == 0 {
        return Err(WachError::LevelZero);
    }
    let (ctx, fd, trunc) = (ws.ctx(), ws.fd(), ws.trunc());
    let phi_q = XSeries::from_poly(&phi_iterate_poly(ctx, &q_poly(ctx), n - 1), trunc);
    let inv = phi_q.inverse()?;
    ws.budget_check(&inv)?;
    let one = XSeries::one(ctx, trunc);
    Ok(scalar_series_matrix(fd.c(), trunc).mul(&block_diag(fd.d(), fd.d0(), &one, &inv)))
}

/// `P_n^-1 = diag(I, φ^{n-1}(q)) C^-1`, an exact polynomial matrix.
pub fn build_pn_inverse(ws: &WachSetup, n: u32) -> Result<Matrix<Poly>> {
    if n == 0 {
        return Err(WachError::LevelZero);
    }
    let (ctx, fd) = (ws.ctx(), ws.fd());
    let phi_q = phi_iterate_poly(ctx, &q_poly(ctx), n - 1);
    let one = Poly::constant(ctx.one());
    Ok(block_diag(fd.d(), fd.d0(), &one, &phi_q).mul(&constant_matrix(fd.c_inv())))
}

/// `q P_1 = C diag(q I, I)`, the integral form of `P_1`.
pub fn q_times_p1(ws: &WachSetup) -> Matrix<PiSeries> {
    let (ctx, fd, trunc) = (ws.ctx(), ws.fd(), ws.trunc());
    let q = XSeries::from_poly(&q_poly(ctx), trunc);
    let one = XSeries::one(ctx, trunc);
    scalar_series_matrix(fd.c(), trunc).mul(&block_diag(fd.d(), fd.d0(), &q, &one))
}

/// `P_1, .., P_n` with `M'_n` (exact) and `(M'_n)^-1 = P_1 ⋯ P_n C_φ^-n`.
#[derive(Debug, Clone)]
pub struct WachMatrixTower {
    pub level: u32,
    pub p_matrices: Vec<Matrix<PiSeries>>,
    pub m_prime: Matrix<Poly>,
    pub m_prime_inverse: Matrix<PiSeries>,
}

pub fn build_m_prime(ws: &WachSetup, n: u32) -> Result<WachMatrixTower> {
    if n == 0 {
        return Err(WachError::LevelZero);
    }
    let (fd, trunc) = (ws.fd(), ws.trunc());
    let c_phi_n = fd.c_phi().pow(n);
    let mut m_prime = constant_matrix(&c_phi_n);
    for k in (1..=n).rev() {
        m_prime = m_prime.mul(&build_pn_inverse(ws, k)?);
    }
    let p_matrices: Vec<Matrix<PiSeries>> = (1..=n).map(|k| build_pn(ws, k)).collect::<Result<_>>()?;
    let c_phi_inv_n = c_phi_n.inverse()?;
    let mut inverse = scalar_series_matrix(&c_phi_inv_n, trunc);
    for p in p_matrices.iter().rev() {
        inverse = p.mul(&inverse);
    }
    Ok(WachMatrixTower {
        level: n,
        p_matrices,
        m_prime,
        m_prime_inverse: inverse,
    })
}

/// `M'_m ≡ M'_n (mod φ^n(π))` for `m > n`, by exact division of the
/// difference by `φ^n(π) = (1+π)^{p^n} - 1`.
pub fn tower_congruence(ws: &WachSetup, lower: &WachMatrixTower, upper: &WachMatrixTower) -> Verdict {
    let modulus = omega(ws.ctx(), lower.level);
    let diff = upper.m_prime.sub(&lower.m_prime);
    let floor = ws.floor();
    Verdict::all((0..diff.rows()).flat_map(|i| (0..diff.cols()).map(move |j| (i, j))).map(|(i, j)| {
        match diff.get(i, j).divide_exact(&modulus) {
            Ok((_, r)) => r.zero_verdict(floor).context(format!("entry ({i},{j}) remainder")),
            Err(e) => Verdict::indeterminate(format!("entry ({i},{j}): {e}")),
        }
    }))
}

/// `C_φ M'_n = M_n`: the Wach product and the logarithmic matrix agree.
pub fn log_matrix_relation(ws: &WachSetup, tower: &WachMatrixTower) -> Result<Verdict> {
    let m_n = build_mn(ws.fd(), tower.level)?;
    let lhs = constant_matrix(ws.fd().c_phi()).mul(&tower.m_prime);
    Ok(matrix_equal_verdict(&lhs, &m_n.entries, ws.floor()))
}

fn series_matrix_equal(a: &Matrix<PiSeries>, b: &Matrix<PiSeries>, floor: i64) -> Verdict {
    Verdict::all(
        (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).equal_verdict(b.get(i, j), floor).context(format!("entry ({i},{j})"))),
    )
}

/// `m ≡ I (mod π)` with every coefficient integral.
pub fn unipotent_integral_verdict(m: &Matrix<PiSeries>, floor: i64) -> Verdict {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let f = m.get(i, j);
            let c0 = f.eval_at_zero();
            let want = if i == j { c0.one_like(u32::MAX / 4) } else { PadicScalar::exact_zero(f.p()) };
            let constant = scalar_equal(&c0, &want, floor);
            out.push(constant.context(format!("entry ({i},{j}) at pi^0")));
            for (k, a) in f.coeffs().iter().enumerate() {
                let v = match (a.valuation(), a.abs_prec()) {
                    (Some(v), _) if v < 0 => Verdict::fail(format!("entry ({i},{j}) at pi^{k}: {a} is not integral")),
                    (None, Some(prec)) if prec < 1 => {
                        Verdict::indeterminate(format!("entry ({i},{j}) at pi^{k}: zero only to precision {prec}"))
                    }
                    _ => Verdict::Pass,
                };
                out.push(v);
            }
        }
    }
    Verdict::all(out)
}

fn identity_series(ws: &WachSetup) -> Matrix<PiSeries> {
    scalar_series_matrix(&ScalarMatrix::scalar_identity(ws.ctx(), ws.fd().d()), ws.trunc())
}

fn gamma_matrix(ws: &WachSetup, m: &Matrix<PiSeries>, gamma: &GammaElement) -> Result<Matrix<PiSeries>> {
    map_series(m, |f| gamma_act(ws.ctx(), f, gamma))
}

fn phi_matrix(ws: &WachSetup, m: &Matrix<PiSeries>) -> Result<Matrix<PiSeries>> {
    map_series(m, |f| phi_act(ws.ctx(), f))
}

/// `G^(n)_γ` with the checks that it is `≡ I (mod π)` and integral.
#[derive(Debug, Clone)]
pub struct GammaReport {
    pub level: u32,
    pub g: Matrix<PiSeries>,
    pub checks: CheckSet,
}

impl GammaReport {
    pub fn verdict(&self) -> Verdict {
        self.checks.overall()
    }
}

pub fn build_g_gamma(ws: &WachSetup, tower: &WachMatrixTower, gamma: &GammaElement) -> Result<GammaReport> {
    let trunc = ws.trunc();
    let m = series_matrix(&tower.m_prime, trunc);
    let g = tower.m_prime_inverse.mul(&gamma_matrix(ws, &m, gamma)?);
    let mut checks = CheckSet::new();
    checks.insert(
        "inverse_is_inverse",
        series_matrix_equal(&m.mul(&tower.m_prime_inverse), &identity_series(ws), ws.floor()),
    );
    checks.insert("unipotent_integral", unipotent_integral_verdict(&g, ws.floor()));
    Ok(GammaReport {
        level: tower.level,
        g,
        checks,
    })
}

/// Residual of the commutation identity.
#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    pub level: u32,
    pub verdict: Verdict,
    /// Smallest valuation of a nonzero residual coefficient; `None` when the
    /// residual is zero at the checked precision.
    pub residual_min_valuation: Option<i64>,
    pub floor: i64,
}

/// `P_1 φ(G^(n)) = G^(n+1) γ(P_1)`.
pub fn verify_commutation(
    ws: &WachSetup,
    lower: &WachMatrixTower,
    upper: &WachMatrixTower,
    gamma: &GammaElement,
) -> Result<CommutationReport> {
    let g_n = build_g_gamma(ws, lower, gamma)?.g;
    let g_n1 = build_g_gamma(ws, upper, gamma)?.g;
    commutation_residual(ws, lower.level, &lower.p_matrices[0], &g_n, &g_n1, gamma)
}

/// The commutation check on explicit matrices (so a perturbed `G` can be
/// fed in as a negative control).
pub fn commutation_residual(
    ws: &WachSetup,
    level: u32,
    p1: &Matrix<PiSeries>,
    g_n: &Matrix<PiSeries>,
    g_n1: &Matrix<PiSeries>,
    gamma: &GammaElement,
) -> Result<CommutationReport> {
    let lhs = p1.mul(&phi_matrix(ws, g_n)?);
    let rhs = g_n1.mul(&gamma_matrix(ws, p1, gamma)?);
    let floor = ws.floor();
    let residual = lhs.sub(&rhs);
    Ok(CommutationReport {
        level,
        verdict: series_matrix_equal(&lhs, &rhs, floor),
        residual_min_valuation: residual.entries().filter_map(XSeries::min_valuation).min(),
        floor,
    })
}

/// `P_1 γ(P_1^-1) ∈ I + π M(Z_p[[π]])`.
pub fn lemma_a(ws: &WachSetup, gamma: &GammaElement) -> Result<Verdict> {
    let p1 = build_pn(ws, 1)?;
    let p1_inv = series_matrix(&build_pn_inverse(ws, 1)?, ws.trunc());
    let m = p1.mul(&gamma_matrix(ws, &p1_inv, gamma)?);
    Ok(unipotent_integral_verdict(&m, ws.floor()))
}

/// `P_1 φ(M) γ(P_1^-1) ∈ I + π M(Z_p[[π]])` for `M ∈ I + π M(Z_p[[π]])`.
pub fn lemma_b(ws: &WachSetup, m: &Matrix<PiSeries>, gamma: &GammaElement) -> Result<Verdict> {
    let p1 = build_pn(ws, 1)?;
    let p1_inv = series_matrix(&build_pn_inverse(ws, 1)?, ws.trunc());
    let out = p1.mul(&phi_matrix(ws, m)?).mul(&gamma_matrix(ws, &p1_inv, gamma)?);
    Ok(unipotent_integral_verdict(&out, ws.floor()))
}

/// `G_{cc'} = G_c γ_c(G_{c'})`.
pub fn cocycle_check(ws: &WachSetup, tower: &WachMatrixTower, c1: &GammaElement, c2: &GammaElement) -> Result<Verdict> {
    let g1 = build_g_gamma(ws, tower, c1)?.g;
    let g2 = build_g_gamma(ws, tower, c2)?.g;
    let g12 = build_g_gamma(ws, tower, &c1.compose(c2))?.g;
    let rhs = g1.mul(&gamma_matrix(ws, &g2, c1)?);
    Ok(series_matrix_equal(&g12, &rhs, ws.floor()))
}

/// All checks at one level `n` (the commutation check uses level `n + 1`).
#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: u32,
    pub checks: CheckSet,
    pub residual_min_valuation: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WachReport {
    pub p: u32,
    pub c: String,
    pub trunc: usize,
    pub binomial_padding: u32,
    pub lemma_a: Verdict,
    pub levels: Vec<LevelReport>,
}

impl WachReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(std::iter::once(self.lemma_a.clone()).chain(self.levels.iter().map(|l| l.checks.overall())))
    }
}

/// Runs every check for levels `1..=levels`, in parallel over levels.
pub fn verify_levels(ws: &WachSetup, levels: u32, gamma: &GammaElement) -> Result<WachReport> {
    let ctx = ws.ctx();
    let towers: Vec<WachMatrixTower> = (1..=levels + 1)
        .into_par_iter()
        .map(|n| build_m_prime(ws, n))
        .collect::<Result<_>>()?;
    let second = gamma.compose(&GammaElement::generator(ctx));
    let reports: Vec<LevelReport> = (0..levels as usize)
        .into_par_iter()
        .map(|i| {
            let (lower, upper) = (&towers[i], &towers[i + 1]);
            let mut checks = CheckSet::new();
            checks.insert("g_gamma", build_g_gamma(ws, lower, gamma)?.verdict());
            let comm = verify_commutation(ws, lower, upper, gamma)?;
            checks.insert("commutation", comm.verdict.clone());
            checks.insert("tower_congruence", tower_congruence(ws, lower, upper));
            checks.insert("log_matrix_relation", log_matrix_relation(ws, lower)?);
            checks.insert("cocycle", cocycle_check(ws, lower, gamma, &second)?);
            Ok(LevelReport {
                level: lower.level,
                checks,
                residual_min_valuation: comm.residual_min_valuation,
            })
        })
        .collect::<Result<_>>()?;
    Ok(WachReport {
        p: ctx.p(),
        c: gamma.value(ctx).to_string(),
        trunc: ws.trunc(),
        binomial_padding: GammaElement::padding(ctx, ws.trunc()),
        lemma_a: lemma_a(ws, gamma)?,
        levels: reports,
    })
}
