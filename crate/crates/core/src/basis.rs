//! Admissible bases of the dual Dieudonné module.
//!
//! A family `v'_1, .., v'_g` in `Z_p^g` is admissible when every subfamily
//! of size `g_-` meets `Fil^0` trivially, tested as `det[v'_I | Fil^0] != 0`.
//! It is saturated when all of these determinants are units, and strongly
//! admissible when the family `T v'_i` with `T = (1 - φ)^-1 (p φ - 1)` is
//! admissible as well.
//!
//! Saturation is not always attainable: reducing mod `p`, a saturated family
//! is an arc of `g` points in `P^{g_- - 1}(F_p)`, and arcs are short when `p`
//! is small (for `g_- = 2` at most `p + 1` points). The plain construction
//! therefore runs the extension lemma first, then a mod-`p` arc search, and
//! finally a Vandermonde family that is only in general position over `Q_p`.
//! The `saturated` flag of the result says which one succeeded.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log_matrix::{default_floor, FrobeniusData};
use crate::matrix::{MatrixError, ScalarMatrix};
use crate::padic::{BigIntText, Comparison, PadicContext, PadicError, PadicScalar};
use crate::report::Verdict;

pub type Vector = Vec<PadicScalar>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("g_minus must be positive")]
    EmptyIndexSets,
    #[error("Fil^0 vectors do not span a direct summand")]
    NotSummand,
    #[error("phi matrix required for strong admissibility")]
    MissingPhi,
    #[error("1 - phi or p phi - 1 is singular at working precision")]
    SingularOperator,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("search exhausted: {what} after {tries} candidates")]
    SearchExhausted { what: String, tries: usize },
    #[error("constructed basis failed verification: {0}")]
    Unverified(Verdict),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, BasisError>;

/// Rank `g`, index-set size `g_-`, a basis of `Fil^0` of the dual module and
/// optionally the matrix of `φ` on it.
#[derive(Debug, Clone)]
pub struct LatticeSetup {
    ctx: PadicContext,
    g: usize,
    g_minus: usize,
    fil0_dual: Vec<Vector>,
    phi: Option<ScalarMatrix>,
}

impl LatticeSetup {
    pub fn new(
        ctx: &PadicContext,
        g: usize,
        g_minus: usize,
        fil0_dual: Vec<Vector>,
        phi: Option<ScalarMatrix>,
    ) -> Result<Self> {
        if g_minus == 0 {
            return Err(BasisError::EmptyIndexSets);
        }
        if g_minus > g || fil0_dual.len() != g - g_minus {
            return Err(BasisError::Shape(format!(
                "need g - g_minus = {} Fil^0 vectors, got {}",
                g.saturating_sub(g_minus),
                fil0_dual.len()
            )));
        }
        if fil0_dual.iter().any(|v| v.len() != g) {
            return Err(BasisError::Shape(format!("Fil^0 vectors must have length {g}")));
        }
        if let Some(phi) = &phi {
            if phi.rows() != g || phi.cols() != g {
                return Err(BasisError::Shape(format!("phi must be {g}x{g}")));
            }
        }
        if !spans_summand(&fil0_dual, g) {
            return Err(BasisError::NotSummand);
        }
        Ok(Self {
            ctx: *ctx,
            g,
            g_minus,
            fil0_dual,
            phi,
        })
    }

    pub fn from_ints(
        ctx: &PadicContext,
        g: usize,
        g_minus: usize,
        fil0_dual: &[Vec<i64>],
        phi: Option<&[Vec<i64>]>,
    ) -> Result<Self> {
        let fil = fil0_dual.iter().map(|v| int_vector(ctx, v)).collect();
        let phi = phi
            .map(|rows| ScalarMatrix::from_ints(ctx, rows))
            .transpose()
            .map_err(|e| BasisError::Shape(e.to_string()))?;
        Self::new(ctx, g, g_minus, fil, phi)
    }

    /// The dual of Frobenius data: `g = rd`, `g_- = rd_0`, `Fil^0` spanned
    /// by the dual coordinates outside `Fil^0 D`, and `φ' = p^-1 (C_φ^T)^-1`
    /// because the dual carries the twist by `Q_p(1)`.
    pub fn dual_of(fd: &FrobeniusData) -> Result<Self> {
        let ctx = fd.ctx();
        let (g, g_minus) = (fd.rd(), fd.fil_rank());
        let fil = (g_minus..g).map(|i| unit_vector(ctx, g, i)).collect();
        let phi = fd
            .c_phi()
            .transpose()
            .inverse()
            .map_err(|_| BasisError::SingularOperator)?
            .scale(&ctx.p_power(-1));
        Self::new(ctx, g, g_minus, fil, Some(phi))
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }
    pub fn g(&self) -> usize {
        self.g
    }
    pub fn g_minus(&self) -> usize {
        self.g_minus
    }
    pub fn g_plus(&self) -> usize {
        self.g - self.g_minus
    }
    pub fn fil0_dual(&self) -> &[Vector] {
        &self.fil0_dual
    }
    pub fn phi(&self) -> Option<&ScalarMatrix> {
        self.phi.as_ref()
    }

    /// `T = (1 - φ)^-1 (p φ - 1)`.
    pub fn transform(&self) -> Result<ScalarMatrix> {
        let phi = self.phi.as_ref().ok_or(BasisError::MissingPhi)?;
        let id = ScalarMatrix::scalar_identity(&self.ctx, self.g);
        let left = id.sub(phi).inverse().map_err(|_| BasisError::SingularOperator)?;
        let right = phi.scale(&self.ctx.from_int(self.ctx.p() as i64)).sub(&id);
        Ok(left.mul(&right))
    }

    /// A basis of `T^-1 Fil^0`, scaled to be integral.
    fn transported_fil0(&self) -> Result<Vec<Vector>> {
        let t_inv = self.transform()?.inverse().map_err(|_| BasisError::SingularOperator)?;
        Ok(self
            .fil0_dual
            .iter()
            .map(|f| {
                let w = t_inv.mul_vec(f);
                let shift = w.iter().filter_map(PadicScalar::valuation).min().unwrap_or(0);
                w.iter().map(|x| x.shift(-shift)).collect()
            })
            .collect())
    }

    pub fn to_record(&self) -> SetupRecord {
        let k = self.ctx.rel_prec();
        SetupRecord {
            p: self.ctx.p(),
            rel_prec: k,
            g: self.g,
            g_minus: self.g_minus,
            fil0_dual: self.fil0_dual.iter().map(|v| integer_text(v, k)).collect(),
            phi: self.phi.as_ref().map(|phi| PhiRecord::from_matrix(phi, k)),
        }
    }
}

/// `φ = p^scale · entries` with integer entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiRecord {
    #[serde(default)]
    pub scale: i64,
    pub entries: Vec<Vec<BigIntText>>,
}

impl PhiRecord {
    fn from_matrix(phi: &ScalarMatrix, k: u32) -> Self {
        let scale = phi.min_valuation().unwrap_or(0).min(0);
        Self {
            scale,
            entries: phi
                .to_rows()
                .iter()
                .map(|row| integer_text(&row.iter().map(|x| x.shift(-scale)).collect::<Vec<_>>(), k))
                .collect(),
        }
    }

    fn to_matrix(&self, ctx: &PadicContext) -> Result<ScalarMatrix> {
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|x| ctx.from_bigint(&x.0).shift(self.scale)).collect())
            .collect();
        ScalarMatrix::from_rows(rows).map_err(|e| BasisError::Shape(e.to_string()))
    }
}

/// Setup file: integer vectors known modulo `p^rel_prec`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupRecord {
    pub p: u32,
    pub rel_prec: u32,
    pub g: usize,
    pub g_minus: usize,
    pub fil0_dual: Vec<Vec<BigIntText>>,
    #[serde(default)]
    pub phi: Option<PhiRecord>,
}

impl SetupRecord {
    pub fn build(&self) -> Result<LatticeSetup> {
        let ctx = PadicContext::new(self.p, self.rel_prec, self.rel_prec)?;
        let fil = self.fil0_dual.iter().map(|v| bigint_vector(&ctx, v)).collect();
        let phi = self.phi.as_ref().map(|r| r.to_matrix(&ctx)).transpose()?;
        LatticeSetup::new(&ctx, self.g, self.g_minus, fil, phi)
    }
}

fn int_vector(ctx: &PadicContext, v: &[i64]) -> Vector {
    v.iter().map(|&x| ctx.from_int(x)).collect()
}

fn bigint_vector(ctx: &PadicContext, v: &[BigIntText]) -> Vector {
    v.iter().map(|x| ctx.from_bigint(&x.0)).collect()
}

fn integer_text(v: &[PadicScalar], k: u32) -> Vec<BigIntText> {
    v.iter()
        .map(|x| BigIntText(x.to_bigint_mod(k).expect("integral entry")))
        .collect()
}

fn unit_vector(ctx: &PadicContext, n: usize, i: usize) -> Vector {
    (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect()
}

fn det_of_columns(cols: &[&Vector]) -> PadicScalar {
    let owned: Vec<Vector> = cols.iter().map(|c| (*c).clone()).collect();
    ScalarMatrix::from_columns(&owned).expect("equal lengths").det()
}

/// Some maximal minor of the coordinate matrix is a unit.
fn spans_summand(vectors: &[Vector], n: usize) -> bool {
    let k = vectors.len();
    if k == 0 {
        return true;
    }
    (0..n).combinations(k).any(|rows| {
        let m = ScalarMatrix::from_fn(k, k, |i, j| vectors[j][rows[i]].clone());
        m.det().is_unit()
    })
}

/// Outcome of one determinant test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetStatus {
    Unit,
    Nonzero,
    Zero,
    Indeterminate,
}

impl DetStatus {
    fn classify(det: &PadicScalar, ctx: &PadicContext, size: usize) -> (Option<i64>, Self) {
        let limit = ctx.rel_prec() as i64 - size as i64;
        match det.valuation() {
            None if det.is_exact_zero() => (None, DetStatus::Zero),
            None => (None, DetStatus::Indeterminate),
            Some(v) if v >= limit => (Some(v), DetStatus::Indeterminate),
            Some(0) => (Some(0), DetStatus::Unit),
            Some(v) => (Some(v), DetStatus::Nonzero),
        }
    }

    fn is_nonzero(self) -> bool {
        matches!(self, DetStatus::Unit | DetStatus::Nonzero)
    }
}

fn status_of(cols: &[&Vector], ctx: &PadicContext) -> DetStatus {
    DetStatus::classify(&det_of_columns(cols), ctx, cols.len()).1
}

/// Determinant valuation of `[v_I | Fil^0]` for one index set `I` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetCertificate {
    pub indices: Vec<usize>,
    pub valuation: Option<i64>,
    pub status: DetStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub subsets: Vec<SubsetCertificate>,
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(self.subsets.iter().map(|s| match s.status {
            DetStatus::Unit | DetStatus::Nonzero => Verdict::Pass,
            DetStatus::Zero => Verdict::fail(format!("subset {:?} meets Fil^0", s.indices)),
            DetStatus::Indeterminate => Verdict::indeterminate(format!(
                "subset {:?}: determinant not distinguishable from zero (valuation {:?})",
                s.indices, s.valuation
            )),
        }))
    }

    pub fn saturated(&self) -> bool {
        self.subsets.iter().all(|s| s.status == DetStatus::Unit)
    }
}

fn certify(ctx: &PadicContext, family: &[Vector], fil: &[Vector], g_minus: usize) -> Certificate {
    let subsets: Vec<Vec<usize>> = (0..family.len()).combinations(g_minus).collect();
    let subsets = subsets
        .into_par_iter()
        .map(|indices| {
            let cols: Vec<&Vector> = indices.iter().map(|&i| &family[i]).chain(fil).collect();
            let (valuation, status) = DetStatus::classify(&det_of_columns(&cols), ctx, cols.len());
            SubsetCertificate {
                indices,
                valuation,
                status,
            }
        })
        .collect();
    Certificate { subsets }
}

fn check_family(setup: &LatticeSetup, basis: &[Vector]) -> Result<()> {
    if basis.len() != setup.g || basis.iter().any(|v| v.len() != setup.g) {
        return Err(BasisError::Shape(format!(
            "need {} vectors of length {}",
            setup.g, setup.g
        )));
    }
    Ok(())
}

/// Brute force over all `C(g, g_-)` index sets.
pub fn is_admissible(setup: &LatticeSetup, basis: &[Vector]) -> Result<Certificate> {
    check_family(setup, basis)?;
    Ok(certify(&setup.ctx, basis, &setup.fil0_dual, setup.g_minus))
}

/// Certificates for the family itself and for its image under `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongCertificate {
    pub plain: Certificate,
    pub transformed: Certificate,
}

impl StrongCertificate {
    pub fn verdict(&self) -> Verdict {
        self.plain
            .verdict()
            .context("plain")
            .and(self.transformed.verdict().context("transformed"))
    }
}

pub fn is_strongly_admissible(setup: &LatticeSetup, basis: &[Vector]) -> Result<StrongCertificate> {
    check_family(setup, basis)?;
    let t = setup.transform()?;
    let moved: Vec<Vector> = basis.iter().map(|v| t.mul_vec(v)).collect();
    Ok(StrongCertificate {
        plain: certify(&setup.ctx, basis, &setup.fil0_dual, setup.g_minus),
        transformed: certify(&setup.ctx, &moved, &setup.fil0_dual, setup.g_minus),
    })
}

// ---------------------------------------------------------------------------
// The extension lemmas, in coordinates of a free module W = Z_p^m.

/// `w` lies in the summand spanned by `h` (or cannot be shown not to).
fn in_hyperplane(ctx: &PadicContext, h: &[Vector], w: &Vector) -> bool {
    let cols: Vec<&Vector> = h.iter().chain(std::iter::once(w)).collect();
    !status_of(&cols, ctx).is_nonzero()
}

fn in_union(ctx: &PadicContext, hyperplanes: &[Vec<Vector>], w: &Vector) -> bool {
    hyperplanes.iter().any(|h| in_hyperplane(ctx, h, w))
}

/// `W_S + Z_p w = W`.
fn complements(ctx: &PadicContext, ws: &[Vector], w: &Vector) -> bool {
    let cols: Vec<&Vector> = ws.iter().chain(std::iter::once(w)).collect();
    status_of(&cols, ctx) == DetStatus::Unit
}

fn lambda_valuation(ctx: &PadicContext, ws: &[Vector], w: &Vector) -> Option<i64> {
    let cols: Vec<&Vector> = ws.iter().chain(std::iter::once(w)).collect();
    match DetStatus::classify(&det_of_columns(&cols), ctx, cols.len()) {
        (v, DetStatus::Unit | DetStatus::Nonzero) => v,
        _ => None,
    }
}

const MOMENT_POINTS: i64 = 64;

/// Small integer vectors: points `(1, t, .., t^{m-1})` of the moment curve
/// (any hyperplane holds at most `m - 1` of them), then every vector with
/// entries in `[0, p^2)`.
fn small_vectors(ctx: &PadicContext, m: usize) -> impl Iterator<Item = Vector> + '_ {
    let moment = (0..MOMENT_POINTS).map(move |t| (0..m).map(|i| ctx.from_int(t.pow(i as u32))).collect());
    let base = (ctx.p() as u64).pow(2);
    let count = base.checked_pow(m as u32).unwrap_or(u64::MAX).min(200_000);
    let boxed = (1..count).map(move |mut idx| {
        (0..m)
            .map(|_| {
                let digit = idx % base;
                idx /= base;
                ctx.from_int(digit as i64)
            })
            .collect()
    });
    moment.chain(boxed)
}

fn check_hyperplanes(hyperplanes: &[Vec<Vector>], m: usize) -> Result<()> {
    for h in hyperplanes {
        if h.len() + 1 != m || h.iter().any(|v| v.len() != m) {
            return Err(BasisError::Shape(format!("hyperplanes need {} vectors of length {m}", m - 1)));
        }
        if !spans_summand(h, m) {
            return Err(BasisError::DegenerateInput("hyperplane is not a direct summand".into()));
        }
    }
    Ok(())
}

/// A vector of `W = Z_p^{w_rank}` outside `p^k W` and outside every given
/// hyperplane: start from any vector off the hyperplanes and divide out
/// `p^k` while possible.
pub fn escape_union(ctx: &PadicContext, w_rank: usize, hyperplanes: &[Vec<Vector>], k: u32) -> Result<Vector> {
    check_hyperplanes(hyperplanes, w_rank)?;
    let mut tries = 0;
    let mut w = small_vectors(ctx, w_rank)
        .inspect(|_| tries += 1)
        .find(|w| !in_union(ctx, hyperplanes, w))
        .ok_or_else(|| BasisError::SearchExhausted {
            what: "vector off the hyperplanes".into(),
            tries,
        })?;
    let k = k as i64;
    while w.iter().all(|x| x.is_zero() || x.valuation().is_some_and(|v| v >= k)) {
        w = w.iter().map(|x| x.shift(-k)).collect();
    }
    Ok(w)
}

const SLOPE_CANDIDATES: usize = 4096;

/// Pairs of small positive integer units, by increasing `x + y`.
fn unit_pairs(p: u32) -> impl Iterator<Item = (i64, i64)> {
    let p = p as i64;
    (2i64..)
        .flat_map(|s| (1..s).map(move |x| (x, s - x)))
        .filter(move |(x, y)| x % p != 0 && y % p != 0)
        .take(SLOPE_CANDIDATES)
}

fn matrix_2x2_unimodular(m: &[PadicScalar; 4]) -> bool {
    m[0].mul(&m[3]).sub(&m[1].mul(&m[2])).is_unit() && m.iter().all(PadicScalar::is_integral)
}

/// Units `x, y` with `cx + dy` a unit and `(ax + by)/(cx + dy)` outside
/// `forbidden`; `y` runs over units for each `x` in turn.
pub fn avoid_slopes(
    ctx: &PadicContext,
    m: &[PadicScalar; 4],
    forbidden: &[PadicScalar],
) -> Result<(PadicScalar, PadicScalar)> {
    if !matrix_2x2_unimodular(m) {
        return Err(BasisError::DegenerateInput("matrix is not in GL_2(Z_p)".into()));
    }
    slope_candidates(ctx, m, forbidden)
        .next()
        .map(|(x, y, _, _)| (x, y))
        .ok_or_else(|| BasisError::SearchExhausted {
            what: "slope outside the forbidden set".into(),
            tries: SLOPE_CANDIDATES,
        })
}

/// Candidates `(x, y, ax + by, cx + dy)` passing the slope conditions.
fn slope_candidates<'a>(
    ctx: &'a PadicContext,
    m: &'a [PadicScalar; 4],
    forbidden: &'a [PadicScalar],
) -> impl Iterator<Item = (PadicScalar, PadicScalar, PadicScalar, PadicScalar)> + 'a {
    let floor = default_floor(ctx);
    unit_pairs(ctx.p()).filter_map(move |(x, y)| {
        let (x, y) = (ctx.from_int(x), ctx.from_int(y));
        let num = m[0].mul(&x).add(&m[1].mul(&y));
        let den = m[2].mul(&x).add(&m[3].mul(&y));
        if !den.is_unit() {
            return None;
        }
        let ratio = num.div(&den).ok()?;
        let clear = forbidden
            .iter()
            .all(|f| ratio.compare(f, floor) == Comparison::Unequal);
        clear.then_some((x, y, num, den))
    })
}

fn combine(alpha: &PadicScalar, v1: &Vector, beta: &PadicScalar, v2: &Vector) -> Vector {
    v1.iter().zip(v2).map(|(a, b)| alpha.mul(a).add(&beta.mul(b))).collect()
}

/// A vector `v = α v_1 + β v_2` outside the hyperplanes `w0` that
/// complements both `W_1` and `W_2`.
pub fn merge_complement(
    ctx: &PadicContext,
    w1: &[Vector],
    w2: &[Vector],
    v1: &Vector,
    v2: &Vector,
    w0: &[Vec<Vector>],
) -> Result<Vector> {
    merge_keeping(ctx, w1, w2, v1, v2, w0, &[])
}

/// As [`merge_complement`], also keeping `v` a complement of every summand
/// in `keep`.
fn merge_keeping(
    ctx: &PadicContext,
    w1: &[Vector],
    w2: &[Vector],
    v1: &Vector,
    v2: &Vector,
    w0: &[Vec<Vector>],
    keep: &[&[Vector]],
) -> Result<Vector> {
    let m = v1.len();
    check_hyperplanes(w0, m)?;
    for (name, v) in [("v1", v1), ("v2", v2)] {
        if in_union(ctx, w0, v) {
            return Err(BasisError::DegenerateInput(format!("{name} lies in W0")));
        }
    }
    if !complements(ctx, w1, v1) || !complements(ctx, w2, v2) {
        return Err(BasisError::DegenerateInput("W_i + Z_p v_i is not all of W".into()));
    }
    let good = |v: &Vector| {
        !in_union(ctx, w0, v)
            && complements(ctx, w1, v)
            && complements(ctx, w2, v)
            && keep.iter().all(|ws| complements(ctx, ws, v))
    };
    let det_with = |ws: &[Vector], v: &Vector| {
        let cols: Vec<&Vector> = ws.iter().chain(std::iter::once(v)).collect();
        det_of_columns(&cols)
    };
    // x1: v2-coordinate of v1 in the basis W_2 + v2; x2 symmetrically.
    let x1 = det_with(w2, v1).div(&det_with(w2, v2))?;
    let x2 = det_with(w1, v2).div(&det_with(w1, v1))?;
    if x1.is_unit() && good(v1) {
        return Ok(v1.clone());
    }
    if x2.is_unit() && good(v2) {
        return Ok(v2.clone());
    }
    let det_x = x1.mul(&x2).sub(&ctx.one());
    let inv = det_x.inv()?;
    let y = [x2.mul(&inv), ctx.one().neg().mul(&inv), ctx.one().neg().mul(&inv), x1.mul(&inv)];
    if !matrix_2x2_unimodular(&y) {
        return Err(BasisError::SearchExhausted {
            what: "unimodular X = [[x1, 1], [1, x2]]".into(),
            tries: 0,
        });
    }
    // α/β values putting v in some hyperplane H: α det[H|v1] + β det[H|v2] = 0.
    let forbidden: Vec<PadicScalar> = w0
        .iter()
        .filter_map(|h| det_with(h, v2).neg().div(&det_with(h, v1)).ok())
        .collect();
    let merged = slope_candidates(ctx, &y, &forbidden)
        .map(|(_, _, alpha, beta)| combine(&alpha, v1, &beta, v2))
        .find(good);
    merged.ok_or_else(|| BasisError::SearchExhausted {
        what: "merged complement".into(),
        tries: SLOPE_CANDIDATES,
    })
}

/// How a family in general position was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionMethod {
    /// The inductive extension lemma.
    Lemma,
    /// Backtracking search for a mod-`p` arc.
    ModPArc,
    /// Vandermonde columns: all minors nonzero, not all units.
    Vandermonde,
    /// The two-family avoidance scheme with random candidates.
    RandomScheme,
    /// The same scheme with candidates enumerated mod `p`, then mod `p^2`.
    EnumeratedScheme,
}

#[derive(Debug, Clone)]
pub struct GeneralPosition {
    pub vectors: Vec<Vector>,
    pub saturated: bool,
    pub method: ConstructionMethod,
}

fn all_subsets_unit(ctx: &PadicContext, family: &[Vector], m: usize) -> bool {
    (0..family.len())
        .combinations(m)
        .all(|s| status_of(&s.iter().map(|&i| &family[i]).collect::<Vec<_>>(), ctx) == DetStatus::Unit)
}

/// Extends a basis of `W = Z_p^m` by `k` vectors so that every `m`-subset
/// spans `W`, falling back as described in the module notes when that is
/// impossible. The input basis is kept as the first `m` vectors.
pub fn generic_position_extend(ctx: &PadicContext, w_basis: &[Vector], k: usize) -> Result<GeneralPosition> {
    let m = w_basis.len();
    if m == 0 || w_basis.iter().any(|v| v.len() != m) {
        return Err(BasisError::Shape("need a square basis".into()));
    }
    let refs: Vec<&Vector> = w_basis.iter().collect();
    if status_of(&refs, ctx) != DetStatus::Unit {
        return Err(BasisError::DegenerateInput("input is not a basis of W".into()));
    }
    if let Ok(family) = lemma_extend(ctx, w_basis, k) {
        if all_subsets_unit(ctx, &family, m) {
            return Ok(GeneralPosition {
                vectors: family,
                saturated: true,
                method: ConstructionMethod::Lemma,
            });
        }
    }
    let basis = ScalarMatrix::from_columns(w_basis).expect("square");
    let mapped = |cols: Vec<Vector>| -> Vec<Vector> {
        w_basis.iter().cloned().chain(cols.iter().map(|c| basis.mul_vec(c))).collect()
    };
    if let Some(arc) = mod_p_arc(ctx.p() as u64, m, k) {
        let cols = arc.iter().map(|c| c.iter().map(|&x| ctx.from_int(x as i64)).collect()).collect();
        let family = mapped(cols);
        if all_subsets_unit(ctx, &family, m) {
            return Ok(GeneralPosition {
                vectors: family,
                saturated: true,
                method: ConstructionMethod::ModPArc,
            });
        }
    }
    // Nodes 1 < 2 < .. make every minor of [I | V] a positive integer.
    let cols = (1..=k as i64)
        .map(|t| (0..m).map(|i| ctx.from_int(t.pow(i as u32))).collect())
        .collect();
    let family = mapped(cols);
    let saturated = all_subsets_unit(ctx, &family, m);
    Ok(GeneralPosition {
        vectors: family,
        saturated,
        method: ConstructionMethod::Vandermonde,
    })
}

/// The lemma's induction: for each new vector, a complement `v_S` of every
/// `(m-1)`-span `W_S` off their union, merged pairwise.
fn lemma_extend(ctx: &PadicContext, w_basis: &[Vector], k: usize) -> Result<Vec<Vector>> {
    let m = w_basis.len();
    let mut family = w_basis.to_vec();
    for _ in 0..k {
        let spans: Vec<Vec<Vector>> = (0..family.len())
            .combinations(m - 1)
            .map(|s| s.iter().map(|&i| family[i].clone()).collect())
            .collect();
        let v_s: Vec<Vector> = spans
            .iter()
            .map(|ws| complement_off_union(ctx, ws, &spans))
            .collect::<Result<_>>()?;
        let mut v = v_s[0].clone();
        for i in 1..spans.len() {
            let keep: Vec<&[Vector]> = spans[..i - 1].iter().map(Vec::as_slice).collect();
            v = merge_keeping(ctx, &spans[i - 1], &spans[i], &v, &v_s[i], &spans, &keep)?;
        }
        family.push(v);
    }
    Ok(family)
}

/// `v ∉ W0` with `W_S + Z_p v = W`, found by enlarging `W_S + Z_p w` one
/// step at a time (the submodules containing `W_S` are totally ordered).
fn complement_off_union(ctx: &PadicContext, ws: &[Vector], w0: &[Vec<Vector>]) -> Result<Vector> {
    let m = ws.len() + 1;
    let mut w = escape_union(ctx, m, w0, 1)?;
    let mut index = lambda_valuation(ctx, ws, &w);
    while index != Some(0) {
        let better = |x: &Vector| match (lambda_valuation(ctx, ws, x), index) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        w = small_vectors(ctx, m)
            .find(|x| better(x) && !in_union(ctx, w0, x))
            .ok_or_else(|| BasisError::SearchExhausted {
                what: "larger complement".into(),
                tries: 0,
            })?;
        index = lambda_valuation(ctx, ws, &w);
    }
    Ok(w)
}

fn det_mod_p(cols: &[&[u64]], p: u64) -> u64 {
    let n = cols.len();
    let mut a: Vec<Vec<u64>> = (0..n).map(|i| cols.iter().map(|c| c[i] % p).collect()).collect();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if pivot != col {
            a.swap(pivot, col);
            det = (p - det) % p;
        }
        det = det * a[col][col] % p;
        let inv = mod_inverse(a[col][col], p);
        for r in col + 1..n {
            let f = a[r][col] * inv % p;
            for c in col..n {
                a[r][c] = (a[r][c] + p * p - f * a[col][c] % p) % p;
            }
        }
    }
    det
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut result, mut base, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn rank_mod_p(vectors: &[Vec<u64>], p: u64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
    let n = rows[0].len();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = mod_inverse(rows[rank][col], p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] * inv % p;
                for c in 0..n {
                    rows[r][c] = (rows[r][c] + p * p - f * rows[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

const ARC_NODE_BUDGET: usize = 200_000;

/// `k` points of `F_p^m` that together with the standard basis have every
/// `m`-subset independent, by backtracking over projective points with all
/// coordinates nonzero.
fn mod_p_arc(p: u64, m: usize, k: usize) -> Option<Vec<Vec<u64>>> {
    let count = (p - 1).checked_pow(m as u32 - 1).unwrap_or(u64::MAX).min(50_000);
    let candidates: Vec<Vec<u64>> = (0..count)
        .map(|mut idx| {
            let mut v = vec![1u64];
            for _ in 1..m {
                v.push(idx % (p - 1) + 1);
                idx /= p - 1;
            }
            v
        })
        .collect();
    let mut family: Vec<Vec<u64>> = (0..m).map(|i| (0..m).map(|j| u64::from(i == j)).collect()).collect();
    let mut budget = ARC_NODE_BUDGET;
    fn extend(
        family: &mut Vec<Vec<u64>>,
        candidates: &[Vec<u64>],
        start: usize,
        need: usize,
        m: usize,
        p: u64,
        budget: &mut usize,
    ) -> bool {
        if need == 0 {
            return true;
        }
        for (ci, c) in candidates.iter().enumerate().skip(start) {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let fits = (0..family.len()).combinations(m - 1).all(|s| {
                let cols: Vec<&[u64]> = s.iter().map(|&i| family[i].as_slice()).chain([c.as_slice()]).collect();
                det_mod_p(&cols, p) != 0
            });
            if fits {
                family.push(c.clone());
                if extend(family, candidates, ci + 1, need - 1, m, p, budget) {
                    return true;
                }
                family.pop();
            }
        }
        false
    }
    extend(&mut family, &candidates, 0, k, m, p, &mut budget).then(|| family.split_off(m))
}

// ---------------------------------------------------------------------------
// Constructions.

#[derive(Debug, Clone)]
pub struct CandidateBasis {
    pub vectors: Vec<Vector>,
    pub admissible: Certificate,
    /// Certificate for the `T`-transported family, when checked.
    pub strongly_admissible: Option<Certificate>,
    pub method: ConstructionMethod,
}

impl CandidateBasis {
    pub fn saturated(&self) -> bool {
        self.admissible.saturated()
    }

    pub fn verdict(&self) -> Verdict {
        let v = self.admissible.verdict();
        match &self.strongly_admissible {
            Some(t) => v.and(t.verdict().context("transformed")),
            None => v,
        }
    }

    pub fn to_record(&self, ctx: &PadicContext) -> BasisRecord {
        let k = ctx.rel_prec();
        BasisRecord {
            p: ctx.p(),
            rel_prec: k,
            vectors: self.vectors.iter().map(|v| integer_text(v, k)).collect(),
            admissible: self.admissible.clone(),
            strongly_admissible: self.strongly_admissible.clone(),
            saturated: self.saturated(),
            method: self.method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub p: u32,
    pub rel_prec: u32,
    pub vectors: Vec<Vec<BigIntText>>,
    pub admissible: Certificate,
    pub strongly_admissible: Option<Certificate>,
    pub saturated: bool,
    pub method: ConstructionMethod,
}

impl BasisRecord {
    pub fn vectors(&self, ctx: &PadicContext) -> Vec<Vector> {
        self.vectors.iter().map(|v| bigint_vector(ctx, v)).collect()
    }
}

fn is_lattice_basis(ctx: &PadicContext, vectors: &[Vector]) -> bool {
    status_of(&vectors.iter().collect::<Vec<_>>(), ctx) == DetStatus::Unit
}

/// Images in `W = dual / Fil^0` are put in general position and lifted: the
/// first `g_-` lifts have no `Fil^0` part, the others pick up one `Fil^0`
/// basis vector each, which keeps the lift a `Z_p`-basis.
pub fn construct_admissible(setup: &LatticeSetup) -> Result<CandidateBasis> {
    let ctx = &setup.ctx;
    let (g, m) = (setup.g, setup.g_minus);
    let fil = &setup.fil0_dual;
    let complement = (0..g)
        .combinations(m)
        .find(|c| {
            let cols: Vec<Vector> = fil.iter().cloned().chain(c.iter().map(|&i| unit_vector(ctx, g, i))).collect();
            is_lattice_basis(ctx, &cols)
        })
        .ok_or(BasisError::NotSummand)?;
    let frame: Vec<Vector> = fil
        .iter()
        .cloned()
        .chain(complement.iter().map(|&i| unit_vector(ctx, g, i)))
        .collect();
    let frame = ScalarMatrix::from_columns(&frame).expect("square");

    let w_basis: Vec<Vector> = (0..m).map(|i| unit_vector(ctx, m, i)).collect();
    let gp = generic_position_extend(ctx, &w_basis, setup.g_plus())?;
    let vectors: Vec<Vector> = gp
        .vectors
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let fil_part = (0..setup.g_plus()).map(|i| if j >= m && i == j - m { ctx.one() } else { ctx.zero() });
            let coords: Vector = fil_part.chain(w.iter().cloned()).collect();
            frame.mul_vec(&coords)
        })
        .collect();
    if !is_lattice_basis(ctx, &vectors) {
        return Err(BasisError::Unverified(Verdict::fail("lift is not a Z_p-basis")));
    }
    let admissible = is_admissible(setup, &vectors)?;
    let verdict = admissible.verdict();
    if !verdict.is_pass() {
        return Err(BasisError::Unverified(verdict));
    }
    Ok(CandidateBasis {
        vectors,
        admissible,
        strongly_admissible: None,
        method: gp.method,
    })
}

/// Candidate source for the strong construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    Random { seed: u64 },
    Enumerated,
}

const STRONG_BUDGET: usize = 20_000;

/// Vectors with entries in `[0, B)` and some entry equal to `B - 1`, for
/// `B = 2, 3, ..` up to `p^2`: every 0/1 pattern comes before any 2.
fn shells(p: u64, g: usize) -> impl Iterator<Item = Vec<u64>> {
    (2..=p * p).flat_map(move |b| {
        let count = b.checked_pow(g as u32).unwrap_or(u64::MAX);
        (0..count).filter_map(move |mut idx| {
            let v: Vec<u64> = (0..g)
                .map(|_| {
                    let d = idx % b;
                    idx /= b;
                    d
                })
                .collect();
            v.contains(&(b - 1)).then_some(v)
        })
    })
}

/// Chooses `v'_1, .., v'_g` one at a time: the first `g_-` avoid
/// `span + Fil^0` and `span + T^-1 Fil^0`; each later one avoids
/// `Fil^0 + V` and `T^-1 Fil^0 + V` for every span `V` of `g_- - 1` earlier
/// vectors. Independence mod `p` is kept throughout so the result is a
/// `Z_p`-basis. The output is re-checked by [`is_strongly_admissible`].
pub fn construct_strongly_admissible(setup: &LatticeSetup, strategy: CandidateSource) -> Result<CandidateBasis> {
    let ctx = &setup.ctx;
    let (g, s) = (setup.g, setup.g_minus);
    let p = ctx.p() as u64;
    let fil = &setup.fil0_dual;
    let moved = setup.transported_fil0()?;
    let mut rng = match strategy {
        CandidateSource::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        CandidateSource::Enumerated => None,
    };

    let mut chosen: Vec<Vector> = Vec::new();
    let mut residues: Vec<Vec<u64>> = Vec::new();
    for _ in 0..g {
        let candidates: Box<dyn Iterator<Item = Vec<u64>> + '_> = match rng.as_mut() {
            Some(rng) => Box::new(std::iter::repeat_with(move || (0..g).map(|_| rng.gen_range(0..p * p)).collect())),
            None => Box::new(shells(p, g)),
        };
        let found = candidates.take(STRONG_BUDGET).find_map(|raw| {
            let mut with = residues.clone();
            with.push(raw.clone());
            if rank_mod_p(&with, p) != with.len() {
                return None;
            }
            let v: Vector = raw.iter().map(|&x| ctx.from_int(x as i64)).collect();
            avoids_both(ctx, &chosen, &v, fil, &moved, s).then_some((v, raw))
        });
        let (v, raw) = found.ok_or_else(|| BasisError::SearchExhausted {
            what: format!("vector {} of the strongly admissible basis", chosen.len() + 1),
            tries: STRONG_BUDGET,
        })?;
        chosen.push(v);
        residues.push(raw);
    }

    let cert = is_strongly_admissible(setup, &chosen)?;
    let verdict = cert.verdict();
    if !verdict.is_pass() || !is_lattice_basis(ctx, &chosen) {
        return Err(BasisError::Unverified(verdict));
    }
    Ok(CandidateBasis {
        vectors: chosen,
        admissible: cert.plain,
        strongly_admissible: Some(cert.transformed),
        method: match strategy {
            CandidateSource::Random { .. } => ConstructionMethod::RandomScheme,
            CandidateSource::Enumerated => ConstructionMethod::EnumeratedScheme,
        },
    })
}

fn avoids_both(ctx: &PadicContext, chosen: &[Vector], v: &Vector, fil: &[Vector], moved: &[Vector], s: usize) -> bool {
    let full_rank = |sub: &[Vector]| {
        let cols: Vec<Vector> = chosen.iter().chain(std::iter::once(v)).chain(sub).cloned().collect();
        ScalarMatrix::from_columns(&cols).expect("equal lengths").rank() == cols.len()
    };
    if chosen.len() < s {
        return full_rank(fil) && full_rank(moved);
    }
    (0..chosen.len()).combinations(s - 1).all(|j| {
        [fil, moved].iter().all(|sub| {
            let cols: Vec<&Vector> = j.iter().map(|&i| &chosen[i]).chain(std::iter::once(v)).chain(sub.iter()).collect();
            status_of(&cols, ctx).is_nonzero()
        })
    })
}

/// Random setup: `Fil^0` from integer vectors spanning a summand and `φ`
/// integral with `T` invertible.
pub fn random_setup<R: Rng>(ctx: &PadicContext, g: usize, g_minus: usize, rng: &mut R) -> LatticeSetup {
    let p = ctx.p() as i64;
    loop {
        let fil: Vec<Vec<i64>> = (0..g - g_minus)
            .map(|_| (0..g).map(|_| rng.gen_range(-p * p..=p * p)).collect())
            .collect();
        let phi: Vec<Vec<i64>> = (0..g).map(|_| (0..g).map(|_| rng.gen_range(-p..=p)).collect()).collect();
        if let Ok(setup) = LatticeSetup::from_ints(ctx, g, g_minus, &fil, Some(&phi)) {
            if setup.transform().and_then(|t| t.inverse().map_err(|_| BasisError::SingularOperator)).is_ok() {
                return setup;
            }
        }
    }
}

impl From<MatrixError> for BasisError {
    fn from(e: MatrixError) -> Self {
        BasisError::Shape(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    fn ctx() -> PadicContext {
        PadicContext::new(3, 30, 20).unwrap()
    }

    fn vecs(c: &PadicContext, v: &[Vec<i64>]) -> Vec<Vector> {
        v.iter().map(|x| int_vector(c, x)).collect()
    }

    fn brute_force(c: &PadicContext, setup: &LatticeSetup, basis: &[Vector]) -> bool {
        // independent oracle: rank of [v_I | Fil^0] over Q_p is full
        (0..setup.g()).combinations(setup.g_minus()).all(|s| {
            let cols: Vec<Vector> = s.iter().map(|&i| basis[i].clone()).chain(setup.fil0_dual().iter().cloned()).collect();
            let _ = c;
            ScalarMatrix::from_columns(&cols).unwrap().rank() == setup.g()
        })
    }

    #[test]
    fn e1_in_fil0_is_rejected() {
        let c = ctx();
        let setup = LatticeSetup::from_ints(&c, 2, 1, &[vec![1, 0]], None).unwrap();
        let cert = is_admissible(&setup, &vecs(&c, &[vec![1, 0], vec![0, 1]])).unwrap();
        assert!(cert.verdict().is_fail());
        assert_eq!(cert.subsets[0].status, DetStatus::Zero);
    }

    #[test]
    fn two_dimensional_saturated_example() {
        let c = ctx();
        let setup = LatticeSetup::from_ints(&c, 2, 1, &[vec![1, 0]], None).unwrap();
        let cert = is_admissible(&setup, &vecs(&c, &[vec![0, 1], vec![1, 1]])).unwrap();
        assert!(cert.verdict().is_pass());
        assert!(cert.saturated());
        // det[[0,1],[1,0]] = -1 and det[[1,1],[1,0]] = -1
        assert!(cert.subsets.iter().all(|s| s.valuation == Some(0)));
    }

    #[test]
    fn nonunit_determinant_is_admissible_but_not_saturated() {
        let c = ctx();
        let setup = LatticeSetup::from_ints(&c, 2, 1, &[vec![1, 0]], None).unwrap();
        let cert = is_admissible(&setup, &vecs(&c, &[vec![0, 1], vec![1, 3]])).unwrap();
        assert!(cert.verdict().is_pass());
        assert!(!cert.saturated());
    }

    #[test]
    fn setup_validation() {
        let c = ctx();
        assert_eq!(
            LatticeSetup::from_ints(&c, 2, 1, &[vec![3, 0]], None).unwrap_err(),
            BasisError::NotSummand
        );
        assert_eq!(
            LatticeSetup::from_ints(&c, 2, 0, &[vec![1, 0], vec![0, 1]], None).unwrap_err(),
            BasisError::EmptyIndexSets
        );
    }

    #[test]
    fn escape_union_examples() {
        let c = ctx();
        assert_eq!(escape_union(&c, 3, &[], 1).unwrap(), int_vector(&c, &[1, 0, 0]));
        let h = vec![vecs(&c, &[vec![1, 0]])];
        let w = escape_union(&c, 2, &h, 2).unwrap();
        assert!(w[1].is_unit());
        let planes: Vec<Vec<Vector>> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(a, b)| vec![unit_vector(&c, 3, a), unit_vector(&c, 3, b)])
            .collect();
        let w = escape_union(&c, 3, &planes, 1).unwrap();
        for plane in &planes {
            assert!(!in_hyperplane(&c, plane, &w));
        }
    }

    #[test]
    fn avoid_slopes_examples() {
        let c = ctx();
        let id = [c.one(), c.zero(), c.zero(), c.one()];
        let (x, y) = avoid_slopes(&c, &id, &[]).unwrap();
        assert_eq!(x.div(&y).unwrap(), c.one());
        let (x, y) = avoid_slopes(&c, &id, &[c.one()]).unwrap();
        assert_ne!(x, y);
        let rot = [c.zero(), c.one().neg(), c.one(), c.zero()];
        let half = c.from_ratio(-1, 2).unwrap();
        let (x, y) = avoid_slopes(&c, &rot, std::slice::from_ref(&half)).unwrap();
        let ratio = y.neg().div(&x).unwrap();
        assert_eq!(ratio.compare(&half, 15), Comparison::Unequal);
        assert!(x.is_unit() && y.is_unit());
        let singular = [c.one(), c.one(), c.one(), c.one()];
        assert!(matches!(avoid_slopes(&c, &singular, &[]), Err(BasisError::DegenerateInput(_))));
    }

    #[test]
    fn merge_complement_examples() {
        let c = ctx();
        let (e1, e2) = (unit_vector(&c, 2, 0), unit_vector(&c, 2, 1));
        let w1 = vec![e1.clone()];
        let w2 = vec![e2.clone()];
        let w0 = vec![w1.clone(), w2.clone()];
        // v1 = v2: the α = 1, β = 0 branch
        let v = int_vector(&c, &[1, 1]);
        assert_eq!(merge_complement(&c, &w1, &w2, &v, &v, &w0).unwrap(), v);
        // W1 = span(e1) with v1 = e2 and W2 = span(e2) with v2 = e1: needs
        // the hyperplanes dropped from W0 since e1, e2 lie in them
        let v = merge_complement(&c, &w1, &w2, &e2, &e1, &[]).unwrap();
        assert!(v[0].is_unit() && v[1].is_unit());
        assert!(complements(&c, &w1, &v) && complements(&c, &w2, &v));
        assert!(matches!(
            merge_complement(&c, &w1, &w2, &e2, &e1, &w0),
            Err(BasisError::DegenerateInput(_))
        ));
    }

    #[test]
    fn generic_position_examples() {
        let c = ctx();
        let id2 = vec![unit_vector(&c, 2, 0), unit_vector(&c, 2, 1)];
        let gp = generic_position_extend(&c, &id2, 0).unwrap();
        assert_eq!(gp.vectors, id2);
        let gp = generic_position_extend(&c, &[int_vector(&c, &[1])], 4).unwrap();
        assert_eq!(gp.vectors.len(), 5);
        assert!(gp.vectors.iter().all(|v| v[0].is_unit()));
        let gp = generic_position_extend(&c, &id2, 2).unwrap();
        assert!(gp.saturated);
        assert!(all_subsets_unit(&c, &gp.vectors, 2));
    }

    #[test]
    fn saturation_is_impossible_beyond_the_arc_bound() {
        // P^1(F_3) has 4 points, so 5 vectors cannot be pairwise unimodular
        let c = ctx();
        let id2 = vec![unit_vector(&c, 2, 0), unit_vector(&c, 2, 1)];
        let gp = generic_position_extend(&c, &id2, 3).unwrap();
        assert!(!gp.saturated);
        assert_eq!(gp.method, ConstructionMethod::Vandermonde);
        for s in (0..5).combinations(2) {
            let cols: Vec<&Vector> = s.iter().map(|&i| &gp.vectors[i]).collect();
            assert!(status_of(&cols, &c).is_nonzero());
        }
    }

    #[test]
    fn arc_search_finds_ovals() {
        // conics in P^2(F_5) have 6 points
        let arc = mod_p_arc(5, 3, 3).unwrap();
        assert_eq!(arc.len(), 3);
        assert!(mod_p_arc(3, 2, 3).is_none());
    }

    #[test]
    fn construct_two_dimensional() {
        let c = ctx();
        let setup = LatticeSetup::from_ints(&c, 2, 1, &[vec![1, 0]], None).unwrap();
        let b = construct_admissible(&setup).unwrap();
        assert!(b.verdict().is_pass() && b.saturated());
        assert!(brute_force(&c, &setup, &b.vectors));
        assert!(b.vectors.iter().all(|v| v[1].is_unit()));
    }

    #[test]
    fn zero_phi_makes_strong_equal_plain() {
        let c = ctx();
        let zero = vec![vec![0; 4]; 4];
        let setup = LatticeSetup::from_ints(&c, 4, 2, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]], Some(&zero)).unwrap();
        let t = setup.transform().unwrap();
        assert_eq!(t, ScalarMatrix::scalar_identity(&c, 4).neg());
        let b = construct_admissible(&setup).unwrap();
        let strong = is_strongly_admissible(&setup, &b.vectors).unwrap();
        assert_eq!(
            strong.plain.subsets.iter().map(|s| s.status).collect::<Vec<_>>(),
            strong.transformed.subsets.iter().map(|s| s.status).collect::<Vec<_>>()
        );
        assert!(strong.verdict().is_pass());
    }

    #[test]
    fn pollack_dual_matches_explicit_transform() {
        let c = ctx();
        let fd = FrobeniusData::from_ints(&c, 2, 1, 1, &[vec![0, -1], vec![1, 0]]).unwrap();
        let setup = LatticeSetup::dual_of(&fd).unwrap();
        // (C_φ^T)^-1 = [[0, -p], [1, 0]], so φ' = [[0, -1], [1/p, 0]]
        let want = ScalarMatrix::from_rows(vec![
            vec![c.zero(), c.one().neg()],
            vec![c.p_power(-1), c.zero()],
        ])
        .unwrap();
        assert_eq!(setup.phi().unwrap(), &want);
        // T by direct solve: (1 - φ') T = p φ' - 1
        let t = setup.transform().unwrap();
        let id = ScalarMatrix::scalar_identity(&c, 2);
        let lhs = id.sub(&want).mul(&t);
        let rhs = want.scale(&c.from_int(3)).sub(&id);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(lhs.get(i, j).compare(rhs.get(i, j), 15), Comparison::Equal);
            }
        }
        let b = construct_strongly_admissible(&setup, CandidateSource::Enumerated).unwrap();
        let moved: Vec<Vector> = b.vectors.iter().map(|v| t.mul_vec(v)).collect();
        let direct = is_admissible(&setup, &moved).unwrap();
        assert_eq!(Some(direct), b.strongly_admissible);
    }

    #[test]
    fn transported_fil0_vector_fails_strong_check() {
        let c = ctx();
        let fd = FrobeniusData::from_ints(&c, 2, 1, 1, &[vec![0, -1], vec![1, 0]]).unwrap();
        let setup = LatticeSetup::dual_of(&fd).unwrap();
        let pre = setup.transported_fil0().unwrap().remove(0);
        let basis = vec![pre, int_vector(&c, &[1, 1])];
        let cert = is_strongly_admissible(&setup, &basis).unwrap();
        assert!(cert.transformed.subsets[0].status != DetStatus::Unit);
        assert!(!cert.transformed.subsets[0].status.is_nonzero());
        assert!(!cert.verdict().is_pass());
    }

    #[test]
    fn random_and_enumerated_agree_on_certificates() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (g, gm) in [(2, 1), (4, 2), (4, 1)] {
            let setup = random_setup(&c, g, gm, &mut rng);
            let a = construct_strongly_admissible(&setup, CandidateSource::Random { seed: 5 }).unwrap();
            let b = construct_strongly_admissible(&setup, CandidateSource::Enumerated).unwrap();
            assert!(a.verdict().is_pass() && b.verdict().is_pass());
            assert!(brute_force(&c, &setup, &a.vectors) && brute_force(&c, &setup, &b.vectors));
        }
    }

    #[test]
    fn setup_record_roundtrip() {
        let c = ctx();
        let fd = FrobeniusData::from_ints(&c, 2, 1, 1, &[vec![0, -1], vec![1, 0]]).unwrap();
        let setup = LatticeSetup::dual_of(&fd).unwrap();
        let json = serde_json::to_string(&setup.to_record()).unwrap();
        let back: SetupRecord = serde_json::from_str(&json).unwrap();
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.phi(), setup.phi());
        assert_eq!(rebuilt.fil0_dual(), setup.fil0_dual());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn constructed_bases_pass_brute_force(seed in 0u64..1000, shape in 0usize..3) {
            let c = ctx();
            let (g, gm) = [(2, 1), (4, 2), (4, 3)][shape];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let setup = random_setup(&c, g, gm, &mut rng);
            let b = construct_admissible(&setup).unwrap();
            prop_assert!(brute_force(&c, &setup, &b.vectors));
            let s = construct_strongly_admissible(&setup, CandidateSource::Random { seed }).unwrap();
            prop_assert!(brute_force(&c, &setup, &s.vectors));
        }

        #[test]
        fn escape_union_output_avoids_hyperplanes(seed in 0u64..1000, k in 1u32..3) {
            let c = ctx();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let planes: Vec<Vec<Vector>> = (0..3)
                .filter_map(|_| {
                    let h: Vec<Vector> = (0..2).map(|_| (0..3).map(|_| c.from_int(rng.gen_range(-9..=9))).collect()).collect();
                    spans_summand(&h, 3).then_some(h)
                })
                .collect();
            let w = escape_union(&c, 3, &planes, k).unwrap();
            prop_assert!(!in_union(&c, &planes, &w));
            prop_assert!(w.iter().any(|x| x.valuation().is_some_and(|v| v < k as i64)));
        }
    }
}
