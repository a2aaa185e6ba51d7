//! Frobenius data `(p, d, d0, r, C)` and the logarithmic matrices
//! `M_n = C_φ^(n+1) C_n ⋯ C_1`.
//!
//! `C_φ = C · diag(I_{r d0}, p^-1 I_{r(d-d0)})` is the matrix of Frobenius in
//! a basis adapted to the filtration: the first `r d0` coordinates span
//! `Fil^0`. `C_n = diag(I, Φ_{p^n}(1+X) I) · C^-1` has polynomial entries,
//! and the tower `{M_n mod ω_n}` stands in for the limit matrix `M_T`.

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Matrix, MatrixError, ScalarMatrix};
use crate::padic::{BigIntText, PadicContext, PadicError, PadicScalar};
use crate::report::{scalar_equal, Verdict};
use crate::series::{
    constant_matrix, eval_matrix_at_zero, matrix_equal_verdict, matrix_min_valuation, phi_cyclo, LambdaN,
    Poly, PolyRecord,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogMatrixError {
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("C must have entries in Z_p: {0}")]
    NotIntegral(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(HypothesisClause),
    #[error("B is not filtration-adapted: {0}")]
    NotFiltrationAdapted(String),
    #[error("operator is singular at working precision: {0}")]
    SingularOperator(String),
    #[error("coefficient valuation {valuation} is below the denominator budget -{budget}")]
    DenominatorBudgetExceeded { valuation: i64, budget: u32 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, LogMatrixError>;

/// Which clause of the slope hypothesis an instance violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum HypothesisClause {
    /// `det(C)` is not a unit of `Z_p`.
    DetNotUnit { det: String },
    /// A Frobenius eigenvalue has valuation outside `(-1, 0]`.
    SlopeOutOfRange { valuation: String },
    /// `det(C_φ - 1)` vanishes at working precision.
    OneIsEigenvalue { det: String },
    /// The Newton polygon cannot be decided at working precision.
    Indeterminate { reason: String },
}

impl std::fmt::Display for HypothesisClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::DetNotUnit { det } => write!(f, "det(C) = {det} is not a unit"),
            Self::SlopeOutOfRange { valuation } => {
                write!(f, "eigenvalue valuation {valuation} lies outside (-1, 0]")
            }
            Self::OneIsEigenvalue { det } => write!(f, "1 is an eigenvalue: det(C_phi - 1) = {det}"),
            Self::Indeterminate { reason } => write!(f, "undecidable at precision: {reason}"),
        }
    }
}

/// The filtered φ-module presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusData {
    ctx: PadicContext,
    d: usize,
    d0: usize,
    r: usize,
    c: ScalarMatrix,
    c_inv: ScalarMatrix,
    c_phi: ScalarMatrix,
    slope_bound: Option<Ratio<i64>>,
    floor: i64,
}

impl FrobeniusData {
    /// Validates shapes and integrality and runs [`check_hypotheses`];
    /// refuses data that fails the slope hypothesis.
    pub fn new(ctx: &PadicContext, d: usize, d0: usize, r: usize, c: ScalarMatrix) -> Result<Self> {
        let mut fd = Self::new_forced(ctx, d, d0, r, c)?;
        let report = check_hypotheses(&fd);
        match report.outcome {
            Ok(()) => {
                fd.slope_bound = report.slope_bound();
                Ok(fd)
            }
            Err(clause) => Err(LogMatrixError::HypothesisFailed(clause)),
        }
    }

    /// Like [`FrobeniusData::new`] but without the hypothesis check; `C`
    /// must still be integral and invertible.
    pub fn new_forced(ctx: &PadicContext, d: usize, d0: usize, r: usize, c: ScalarMatrix) -> Result<Self> {
        let rd = r * d;
        if d == 0 || r == 0 || d0 > d {
            return Err(LogMatrixError::Shape(format!("need d >= 1, r >= 1, d0 <= d; got d={d} d0={d0} r={r}")));
        }
        if c.rows() != rd || c.cols() != rd {
            return Err(LogMatrixError::Shape(format!("C is {}x{}, expected {rd}x{rd}", c.rows(), c.cols())));
        }
        if let Some((i, j)) = (0..rd)
            .flat_map(|i| (0..rd).map(move |j| (i, j)))
            .find(|&(i, j)| !c.get(i, j).is_integral())
        {
            return Err(LogMatrixError::NotIntegral(format!("entry ({i},{j}) = {}", c.get(i, j))));
        }
        let c_inv = c.inverse()?;
        let scales: Vec<PadicScalar> = (0..rd)
            .map(|i| if i < r * d0 { ctx.one() } else { ctx.p_power(-1) })
            .collect();
        let c_phi = c.mul(&ScalarMatrix::diagonal(&scales, &ctx.zero()));
        Ok(Self {
            ctx: *ctx,
            d,
            d0,
            r,
            c,
            c_inv,
            c_phi,
            slope_bound: None,
            floor: default_floor(ctx),
        })
    }

    /// Builds the data from integer entries of `C`.
    pub fn from_ints(ctx: &PadicContext, d: usize, d0: usize, r: usize, c: &[Vec<i64>]) -> Result<Self> {
        Self::new(ctx, d, d0, r, ScalarMatrix::from_ints(ctx, c)?)
    }

    /// Absolute precision at which verification treats a difference as zero.
    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = floor;
        self
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn d0(&self) -> usize {
        self.d0
    }
    pub fn r(&self) -> usize {
        self.r
    }
    /// Size `r d` of all matrices.
    pub fn rd(&self) -> usize {
        self.r * self.d
    }
    /// `r d0`, the rank of `Fil^0`.
    pub fn fil_rank(&self) -> usize {
        self.r * self.d0
    }
    /// `r (d - d0)`, the size of the block scaled by `1/p`.
    pub fn lower_rank(&self) -> usize {
        self.r * (self.d - self.d0)
    }
    pub fn c(&self) -> &ScalarMatrix {
        &self.c
    }
    pub fn c_inv(&self) -> &ScalarMatrix {
        &self.c_inv
    }
    pub fn c_phi(&self) -> &ScalarMatrix {
        &self.c_phi
    }
    /// Largest `-v` over eigenvalue valuations `v`, once checked.
    pub fn slope_bound(&self) -> Option<Ratio<i64>> {
        self.slope_bound
    }
    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn to_record(&self) -> FrobeniusRecord {
        let k = self.ctx.rel_prec();
        FrobeniusRecord {
            p: self.ctx.p(),
            d: self.d,
            d0: self.d0,
            r: self.r,
            c: self
                .c
                .to_rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| BigIntText(x.to_bigint_mod(k).expect("C is integral")))
                        .collect()
                })
                .collect(),
            rel_prec: k,
            denom_budget: self.ctx.denom_budget(),
        }
    }
}

/// Default verification floor: half the working relative precision.
pub fn default_floor(ctx: &PadicContext) -> i64 {
    ctx.rel_prec() as i64 / 2
}

/// Serialized Frobenius data with `C` as an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusRecord {
    pub p: u32,
    pub d: usize,
    pub d0: usize,
    #[serde(default = "one_usize")]
    pub r: usize,
    #[serde(rename = "C")]
    pub c: Vec<Vec<BigIntText>>,
    pub rel_prec: u32,
    pub denom_budget: u32,
}

fn one_usize() -> usize {
    1
}

impl FrobeniusRecord {
    pub fn context(&self) -> Result<PadicContext> {
        Ok(PadicContext::new(self.p, self.rel_prec, self.denom_budget)?)
    }

    fn matrix(&self, ctx: &PadicContext) -> Result<ScalarMatrix> {
        Ok(ScalarMatrix::from_rows(
            self.c
                .iter()
                .map(|row| row.iter().map(|x| ctx.from_bigint(&x.0)).collect())
                .collect(),
        )?)
    }

    pub fn build(&self) -> Result<FrobeniusData> {
        let ctx = self.context()?;
        FrobeniusData::new(&ctx, self.d, self.d0, self.r, self.matrix(&ctx)?)
    }

    pub fn build_forced(&self) -> Result<FrobeniusData> {
        let ctx = self.context()?;
        FrobeniusData::new_forced(&ctx, self.d, self.d0, self.r, self.matrix(&ctx)?)
    }
}

/// Outcome of the slope hypothesis check, with the data behind it.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    /// `charpoly(C_φ) = Σ a_i x^i`, coefficient `a_i` at index `i`.
    pub charpoly: Vec<PadicScalar>,
    /// Vertices `(i, v(a_i))` of the lower Newton polygon.
    pub newton_vertices: Vec<(usize, i64)>,
    /// Valuations of the eigenvalues with multiplicity, ascending.
    pub root_valuations: Vec<Ratio<i64>>,
    pub det_c: PadicScalar,
    pub det_c_phi_minus_one: PadicScalar,
    pub outcome: std::result::Result<(), HypothesisClause>,
}

impl HypothesisReport {
    pub fn slope_bound(&self) -> Option<Ratio<i64>> {
        self.root_valuations.iter().map(|v| -v).max()
    }

    pub fn verdict(&self) -> Verdict {
        match &self.outcome {
            Ok(()) => Verdict::Pass,
            Err(HypothesisClause::Indeterminate { reason }) => Verdict::indeterminate(reason.clone()),
            Err(c) => Verdict::fail(c.to_string()),
        }
    }
}

/// Characteristic polynomial `det(x I - A)` by division-free expansion.
pub fn charpoly(a: &ScalarMatrix) -> Vec<PadicScalar> {
    let p = a.get(0, 0).p();
    let one = a.entries().find_map(|x| x.rel_prec()).map_or_else(
        || PadicScalar::from_parts(p, 0, 1u32.into(), 1).expect("one"),
        |k| PadicScalar::from_parts(p, 0, 1u32.into(), k).expect("one"),
    );
    let n = a.rows();
    let m = Matrix::from_fn(n, n, |i, j| {
        let c = Poly::constant(a.get(i, j).neg());
        if i == j {
            c.add(&Poly::from_coeffs(p, vec![PadicScalar::exact_zero(p), one.clone()]))
        } else {
            c
        }
    });
    let f = m.det();
    (0..=n).map(|i| f.coeff(i)).collect()
}

/// Lower convex hull of points sorted by abscissa.
fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let cross = (x2 as i64 - x1 as i64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as i64 - x1 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Height of the polygon through `hull` above abscissa `x`.
fn hull_height(hull: &[(usize, i64)], x: usize) -> Option<Ratio<i64>> {
    hull.windows(2).find_map(|w| {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        (x1 <= x && x <= x2).then(|| {
            Ratio::from_integer(y1) + Ratio::new((y2 - y1) * (x - x1) as i64, (x2 - x1) as i64)
        })
    })
}

/// The slope hypothesis: `det(C)` a unit, every eigenvalue of `C_φ` of
/// valuation in `(-1, 0]`, and `1` not an eigenvalue. Clauses are checked
/// in that order and the first violation is reported.
pub fn check_hypotheses(fd: &FrobeniusData) -> HypothesisReport {
    let a = charpoly(fd.c_phi());
    let det_c = fd.c().det();
    let one = ScalarMatrix::scalar_identity(fd.ctx(), fd.rd());
    let det_c_phi_minus_one = fd.c_phi().sub(&one).det();

    let mut points = Vec::new();
    let mut lower_bounds = Vec::new();
    for (i, c) in a.iter().enumerate() {
        match (c.valuation(), c.abs_prec()) {
            (Some(v), _) => points.push((i, v)),
            (None, Some(prec)) => lower_bounds.push((i, prec)),
            (None, None) => {}
        }
    }
    let hull = lower_hull(&points);
    let mut roots = Vec::new();
    for w in hull.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        let v = -Ratio::new(y2 - y1, (x2 - x1) as i64);
        roots.extend(std::iter::repeat_n(v, x2 - x1));
    }
    roots.sort();

    let outcome = (|| {
        if det_c.valuation() != Some(0) {
            return Err(HypothesisClause::DetNotUnit { det: det_c.to_string() });
        }
        let first = hull.first().map(|pt| pt.0);
        if first != Some(0) {
            // a_0 = ±det(C_φ) is nonzero once det(C) is a unit
            return Err(HypothesisClause::Indeterminate {
                reason: "constant term of the characteristic polynomial vanishes at precision".into(),
            });
        }
        for &(i, prec) in &lower_bounds {
            match hull_height(&hull, i) {
                Some(h) if Ratio::from_integer(prec) >= h => {}
                _ => {
                    return Err(HypothesisClause::Indeterminate {
                        reason: format!("coefficient of x^{i} is zero only to precision {prec}"),
                    })
                }
            }
        }
        if let Some(v) = roots
            .iter()
            .find(|v| **v <= Ratio::from_integer(-1) || **v > Ratio::from_integer(0))
        {
            return Err(HypothesisClause::SlopeOutOfRange { valuation: v.to_string() });
        }
        if det_c_phi_minus_one.is_zero() {
            return Err(HypothesisClause::OneIsEigenvalue {
                det: det_c_phi_minus_one.to_string(),
            });
        }
        Ok(())
    })();

    HypothesisReport {
        charpoly: a,
        newton_vertices: hull,
        root_valuations: roots,
        det_c,
        det_c_phi_minus_one,
        outcome,
    }
}

/// `C_n = diag(I_{r d0}, Φ_{p^n}(1+X) I) · C^-1`, for `n >= 1`.
pub fn build_cn(fd: &FrobeniusData, n: u32) -> Matrix<Poly> {
    let phi = phi_cyclo(fd.ctx(), n);
    let inv = constant_matrix(fd.c_inv());
    Matrix::from_fn(fd.rd(), fd.rd(), |i, j| {
        if i < fd.fil_rank() {
            inv.get(i, j).clone()
        } else {
            phi.mul(inv.get(i, j))
        }
    })
}

/// `h_n = C_n ⋯ C_1`.
pub fn build_hn(fd: &FrobeniusData, n: u32) -> Matrix<Poly> {
    assert!(n >= 1);
    let mut acc = build_cn(fd, 1);
    for k in 2..=n {
        acc = build_cn(fd, k).mul(&acc);
    }
    acc
}

/// `M_n` with its raw product and its representative modulo `ω_n`.
#[derive(Debug, Clone)]
pub struct LogMatrixApprox {
    pub level: u32,
    /// `C_φ^(n+1) C_n ⋯ C_1` as computed.
    pub raw: Matrix<Poly>,
    /// Entries reduced modulo `ω_n`.
    pub entries: Matrix<Poly>,
    pub min_valuation: Option<i64>,
    /// Weakest certified absolute precision among the coefficients.
    pub min_abs_prec: Option<i64>,
    pub data: FrobeniusData,
}

impl LogMatrixApprox {
    pub fn to_record(&self) -> LogMatrixRecord {
        LogMatrixRecord {
            p: self.data.ctx().p(),
            n: self.level,
            entries: self
                .entries
                .to_rows()
                .iter()
                .map(|row| row.iter().map(Poly::to_record).collect())
                .collect(),
        }
    }
}

/// Serialized `M_n`: entries as coefficient arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogMatrixRecord {
    pub p: u32,
    pub n: u32,
    pub entries: Vec<Vec<PolyRecord>>,
}

impl LogMatrixRecord {
    pub fn to_matrix(&self) -> std::result::Result<Matrix<Poly>, crate::series::SeriesError> {
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|r| Poly::from_record(self.p, r)).collect())
            .collect::<std::result::Result<Vec<Vec<Poly>>, _>>()?;
        Matrix::from_rows(rows).map_err(|e| crate::series::SeriesError::Record(e.to_string()))
    }
}

/// `M_n = C_φ^(n+1) C_n ⋯ C_1`, refusing coefficients below the
/// denominator budget.
pub fn build_mn(fd: &FrobeniusData, n: u32) -> Result<LogMatrixApprox> {
    let power = fd.c_phi().pow(n + 1);
    let raw = constant_matrix(&power).mul(&build_hn(fd, n));
    let min_valuation = matrix_min_valuation(&raw);
    let budget = fd.ctx().denom_budget();
    if let Some(v) = min_valuation.filter(|v| *v < -(budget as i64)) {
        return Err(LogMatrixError::DenominatorBudgetExceeded { valuation: v, budget });
    }
    let ring = LambdaN::new(fd.ctx(), n);
    let entries = raw.map(|f| ring.reduce(f).rep().clone());
    let min_abs_prec = entries.entries().filter_map(Poly::min_abs_prec).min();
    Ok(LogMatrixApprox {
        level: n,
        raw,
        entries,
        min_valuation,
        min_abs_prec,
        data: fd.clone(),
    })
}

/// `a ≡ b (mod ω_n)` entrywise, both reduced first.
pub fn congruent_mod_omega(a: &Matrix<Poly>, b: &Matrix<Poly>, ring: &LambdaN, floor: i64) -> Verdict {
    let ra = a.map(|f| ring.reduce(f).rep().clone());
    let rb = b.map(|f| ring.reduce(f).rep().clone());
    matrix_equal_verdict(&ra, &rb, floor)
}

/// `M_m ≡ M_n (mod ω_n)` for `m >= n`.
pub fn verify_stabilization(fd: &FrobeniusData, n: u32, m: u32) -> Result<Verdict> {
    assert!(m >= n && n >= 1);
    let mn = build_mn(fd, n)?;
    let mm = if m == n { mn.clone() } else { build_mn(fd, m)? };
    Ok(stabilization_verdict(&mm, &mn))
}

/// Stabilization between two already built levels.
pub fn stabilization_verdict(mm: &LogMatrixApprox, mn: &LogMatrixApprox) -> Verdict {
    let ring = LambdaN::new(mn.data.ctx(), mn.level);
    congruent_mod_omega(&mm.entries, &mn.entries, &ring, mn.data.floor())
        .context(format!("M_{} vs M_{} mod ω_{}", mm.level, mn.level, mn.level))
}

/// `M_n(0) = C_φ`.
pub fn evaluation_verdict(m: &LogMatrixApprox) -> Verdict {
    let at_zero = eval_matrix_at_zero(&m.entries);
    let c_phi = m.data.c_phi();
    Verdict::all((0..c_phi.rows()).flat_map(|i| {
        let at_zero = &at_zero;
        (0..c_phi.cols())
            .map(move |j| scalar_equal(at_zero.get(i, j), c_phi.get(i, j), m.data.floor()).context(format!("({i},{j})")))
    }))
}

/// Coefficient valuations of `M_n` are at least `(n+1)` times the
/// smallest entry valuation of `C_φ` (or `0` if that is positive).
pub fn valuation_bound_verdict(m: &LogMatrixApprox) -> Verdict {
    let base = m.data.c_phi().min_valuation().unwrap_or(0).min(0);
    let bound = (m.level as i64 + 1) * base;
    match m.min_valuation {
        Some(v) if v < bound => Verdict::fail(format!("coefficient valuation {v} below {bound}")),
        _ => Verdict::Pass,
    }
}

/// `det(M_n)` next to the closed form
/// `det(C) p^{-(n+1) r(d-d0)} ∏_{k<=n} Φ_{p^k}(1+X)^{r(d-d0)}`.
#[derive(Debug, Clone)]
pub struct DetReport {
    pub det: Poly,
    pub closed_form: Poly,
    pub verdict: Verdict,
}

pub fn det_mn(fd: &FrobeniusData, n: u32) -> Result<DetReport> {
    let m = build_mn(fd, n)?;
    let det = m.raw.det();
    let s = fd.lower_rank() as u32;
    let ctx = fd.ctx();
    let mut closed = Poly::constant(fd.c().det().mul(&ctx.p_power(-((n as i64 + 1) * s as i64))));
    for k in 1..=n {
        closed = closed.mul(&phi_cyclo(ctx, k).pow(s, &ctx.one()));
    }
    let verdict = det.equal_verdict(&closed, fd.floor());
    Ok(DetReport {
        det,
        closed_form: closed,
        verdict,
    })
}

/// Checks the block shape of a change-of-basis matrix `B`: integral,
/// invertible over `Z_p`, and the lower-left block (images of `Fil^0`
/// vectors outside `Fil^0`) zero.
pub fn check_filtration_adapted(fd: &FrobeniusData, b: &ScalarMatrix) -> Result<()> {
    let rd = fd.rd();
    if b.rows() != rd || b.cols() != rd {
        return Err(LogMatrixError::Shape(format!("B is {}x{}, expected {rd}x{rd}", b.rows(), b.cols())));
    }
    if !b.is_integral() {
        return Err(LogMatrixError::NotFiltrationAdapted("B has non-integral entries".into()));
    }
    for i in fd.fil_rank()..rd {
        for j in 0..fd.fil_rank() {
            if !b.get(i, j).is_zero() {
                return Err(LogMatrixError::NotFiltrationAdapted(format!(
                    "entry ({i},{j}) = {} in the lower-left block",
                    b.get(i, j)
                )));
            }
        }
    }
    if !b.det().is_unit() {
        return Err(LogMatrixError::NotFiltrationAdapted("det(B) is not a unit".into()));
    }
    Ok(())
}

/// Frobenius data in the basis `w` with `(v) = (w) B`:
/// `C_{φ,w} = B C_{φ,v} B^-1`, hence `C_w = B C_v D B^-1 D^-1` with
/// `D = diag(I, p^-1 I)`.
pub fn change_basis(fd_v: &FrobeniusData, b: &ScalarMatrix) -> Result<FrobeniusData> {
    check_filtration_adapted(fd_v, b)?;
    let ctx = fd_v.ctx();
    let b_inv = b.inverse()?;
    let c_phi_w = b.mul(fd_v.c_phi()).mul(&b_inv);
    let undo: Vec<PadicScalar> = (0..fd_v.rd())
        .map(|i| if i < fd_v.fil_rank() { ctx.one() } else { ctx.from_int(ctx.p() as i64) })
        .collect();
    let c_w = c_phi_w.mul(&ScalarMatrix::diagonal(&undo, &ctx.zero()));
    let fd_w = FrobeniusData::new(ctx, fd_v.d(), fd_v.d0(), fd_v.r(), c_w)?;
    Ok(fd_w.with_floor(fd_v.floor()))
}

/// `B M_{n,v} B^-1 = M_{n,w}` at each requested level.
pub fn conjugate_basis_check(fd_v: &FrobeniusData, b: &ScalarMatrix, levels: &[u32]) -> Result<Verdict> {
    let fd_w = change_basis(fd_v, b)?;
    let bp = constant_matrix(b);
    let bp_inv = constant_matrix(&b.inverse()?);
    let mut out = Verdict::Pass;
    for &n in levels {
        let mv = build_mn(fd_v, n)?;
        let mw = build_mn(&fd_w, n)?;
        let lhs = bp.mul(&mv.entries).mul(&bp_inv);
        out = out.and(matrix_equal_verdict(&lhs, &mw.entries, fd_v.floor()).context(format!("level {n}")));
    }
    Ok(out)
}

/// The matrix for another basis defined by conjugation,
/// `M_v := B^-1 M_w B` where `(v) = (w) B`.
pub fn conjugate_by(m_w: &Matrix<Poly>, b: &ScalarMatrix) -> Result<Matrix<Poly>> {
    Ok(constant_matrix(&b.inverse()?).mul(m_w).mul(&constant_matrix(b)))
}

/// Which character the image condition is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    Trivial,
    NonTrivial,
}

/// Membership of `w` in `U_I` together with the full-rank criterion,
/// computed on both sides of the duality.
#[derive(Debug, Clone)]
pub struct ImageReport {
    pub member: bool,
    /// `rank U_I = |I|`, from the generators of `U_I`.
    pub full_rank: bool,
    /// The same criterion through the dual determinant test.
    pub full_rank_dual: bool,
}

impl ImageReport {
    pub fn verdict(&self) -> Verdict {
        if self.full_rank != self.full_rank_dual {
            return Verdict::fail("primal and dual rank criteria disagree");
        }
        if self.member {
            Verdict::Pass
        } else {
            Verdict::fail("w is not in U_I")
        }
    }
}

/// The operator sending `Fil^0` to the space whose projection is `U_I`:
/// `(1 - φ)(1 - φ/p)^-1` for the trivial character, the identity otherwise.
pub fn image_operator(fd: &FrobeniusData, chi: Character) -> Result<ScalarMatrix> {
    let ctx = fd.ctx();
    let id = ScalarMatrix::scalar_identity(ctx, fd.rd());
    match chi {
        Character::NonTrivial => Ok(id),
        Character::Trivial => {
            let one_minus_phi = id.sub(fd.c_phi());
            if one_minus_phi.det().is_zero() {
                return Err(LogMatrixError::SingularOperator("1 - φ".into()));
            }
            let damped = id.sub(&fd.c_phi().scale(&ctx.p_power(-1)));
            let inv = damped
                .inverse()
                .map_err(|_| LogMatrixError::SingularOperator("1 - φ/p".into()))?;
            Ok(one_minus_phi.mul(&inv))
        }
    }
}

/// Tests `w ∈ U_I = pr_I(Q · Fil^0)` over `Z_p` (indices 0-based).
pub fn image_condition_at_zero(
    fd: &FrobeniusData,
    indices: &[usize],
    w: &[PadicScalar],
    chi: Character,
) -> Result<ImageReport> {
    let rd = fd.rd();
    if indices.iter().any(|&i| i >= rd) || w.len() != indices.len() {
        return Err(LogMatrixError::Shape(format!(
            "index set {indices:?} and vector of length {} in rank {rd}",
            w.len()
        )));
    }
    let q = image_operator(fd, chi)?;
    let fil: Vec<usize> = (0..fd.fil_rank()).collect();
    let (member, full_rank) = if fil.is_empty() || indices.is_empty() {
        (w.iter().all(PadicScalar::is_zero), indices.is_empty())
    } else {
        let gens = q.select(indices, &fil);
        (gens.solve_integral(w).is_some(), gens.rank() == indices.len())
    };
    let qt = q.transpose();
    let ctx = fd.ctx();
    let mut columns: Vec<Vec<PadicScalar>> = indices.iter().map(|&i| qt.column(i)).collect();
    for j in fd.fil_rank()..rd {
        columns.push((0..rd).map(|i| if i == j { ctx.one() } else { ctx.zero() }).collect());
    }
    let full_rank_dual = if columns.is_empty() {
        true
    } else {
        ScalarMatrix::from_columns(&columns)?.rank() == columns.len()
    };
    Ok(ImageReport {
        member,
        full_rank,
        full_rank_dual,
    })
}

/// Random integral `C` with unit determinant, resampled until the slope
/// hypothesis holds. The block acting on the `1/p`-scaled coordinates is
/// drawn from `p Z` half of the time, which makes supersingular slopes
/// likely.
pub fn random_frobenius_data<R: Rng>(ctx: &PadicContext, d: usize, d0: usize, rng: &mut R) -> FrobeniusData {
    let p = ctx.p() as i64;
    for _ in 0..100_000 {
        let biased = rng.gen_bool(0.5);
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let x = rng.gen_range(-(p * p)..=(p * p));
                        if biased && i >= d0 && j >= d0 {
                            p * (x / p)
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        if let Ok(fd) = FrobeniusData::from_ints(ctx, d, d0, 1, &rows) {
            return fd;
        }
    }
    panic!("no instance satisfying the slope hypothesis found for d={d}, d0={d0}");
}

/// Random filtration-adapted change of basis: block upper triangular with
/// unit determinant; `upper_block` controls whether the top-right block is
/// populated.
pub fn random_adapted_basis<R: Rng>(fd: &FrobeniusData, upper_block: bool, rng: &mut R) -> ScalarMatrix {
    let ctx = fd.ctx();
    let (rd, f) = (fd.rd(), fd.fil_rank());
    let p = ctx.p() as i64;
    loop {
        let m = ScalarMatrix::from_fn(rd, rd, |i, j| {
            let same_block = (i < f) == (j < f);
            if same_block || (upper_block && i < f && j >= f) {
                ctx.from_int(rng.gen_range(-p * p..=p * p))
            } else {
                ctx.zero()
            }
        });
        if m.det().is_unit() {
            return m;
        }
    }
}

/// Convenience for tests and examples: integer matrix as `BigInt` rows.
pub fn int_rows(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}
