//! Finite-level factorization of regulator-shaped vectors through
//! `h_n = C_n ⋯ C_1`.
//!
//! Galois cohomology is out of scope, so the vectors are synthetic: a
//! Coleman vector `col` is pushed forward to `L = h_n col (mod ω_n)` and
//! [`factor_level`] must recover some `col'` with `h_n col' = L`. The answer
//! is only defined modulo `ker h_n`, which [`kernel_basis`] computes
//! explicitly for small ranks.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log_matrix::{build_hn, FrobeniusData, LogMatrixError};
use crate::matrix::{Matrix, ScalarMatrix};
use crate::padic::{PadicScalar, ScalarRecord};
use crate::report::Verdict;
use crate::series::{constant_matrix, phi_cyclo, LambdaN, LambdaNElement, LambdaRecord, Poly, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColemanError {
    #[error("not in the image: component {component} is not divisible by Φ_(p^{stage}) ({witness})")]
    NotInImage {
        stage: u32,
        component: usize,
        witness: String,
    },
    #[error("divisibility by Φ_(p^{stage}) of component {component} undecidable: {shortfall}")]
    PrecisionLoss {
        stage: u32,
        component: usize,
        shortfall: String,
    },
    #[error("component {component}, X^{degree}: coefficient {value} is not integral")]
    NotIntegral {
        component: usize,
        degree: usize,
        value: String,
    },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("explicit kernels are limited to rd <= 4 (got {0})")]
    KernelTooLarge(usize),
    #[error(transparent)]
    LogMatrix(#[from] LogMatrixError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, ColemanError>;

/// `(L_1, …, L_rd)` in `Λ_n^rd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegulatorVector {
    pub level: u32,
    pub components: Vec<LambdaNElement>,
}

/// A Coleman vector; `kernel_tag` says what it is certified modulo.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColemanVector {
    pub level: u32,
    pub components: Vec<LambdaNElement>,
    pub kernel_tag: String,
}

/// File form of either vector kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub n: u32,
    pub components: Vec<Vec<ScalarRecord>>,
}

impl VectorRecord {
    pub fn from_components(level: u32, c: &[LambdaNElement]) -> Self {
        Self {
            n: level,
            components: c.iter().map(|e| e.to_record().coeffs).collect(),
        }
    }

    pub fn to_components(&self, ring: &LambdaN) -> Result<Vec<LambdaNElement>> {
        Ok(self
            .components
            .iter()
            .map(|coeffs| {
                ring.from_record(&LambdaRecord {
                    level: self.n,
                    coeffs: coeffs.clone(),
                })
            })
            .collect::<std::result::Result<_, _>>()?)
    }
}

fn kernel_tag(fd: &FrobeniusData, n: u32) -> String {
    let p = fd.ctx().p() as usize;
    format!(
        "modulo ker h_{n}, of Z_p-rank {}",
        fd.lower_rank() * (p.pow(n) - 1)
    )
}

fn apply(m: &Matrix<LambdaNElement>, v: &[LambdaNElement]) -> Vec<LambdaNElement> {
    m.mul_vec(v)
}

/// `h_n` with entries in `Λ_n`.
pub fn hn_in_lambda(fd: &FrobeniusData, ring: &LambdaN) -> Matrix<LambdaNElement> {
    build_hn(fd, ring.level()).map(|f| ring.reduce(f))
}

/// `L = h_n · col (mod ω_n)`.
pub fn forward(fd: &FrobeniusData, n: u32, col: &[LambdaNElement]) -> Result<RegulatorVector> {
    if col.len() != fd.rd() || col.iter().any(|c| c.level() != n) {
        return Err(ColemanError::Shape(format!(
            "expected {} components at level {n}",
            fd.rd()
        )));
    }
    let ring = LambdaN::new(fd.ctx(), n);
    Ok(RegulatorVector {
        level: n,
        components: apply(&hn_in_lambda(fd, &ring), col),
    })
}

/// Recovers `col` from `L = h_n col` by peeling off `C_k` for
/// `k = n, …, 1`: divide the last `r(d-d0)` components by `Φ_{p^k}(1+X)`
/// on their reduced representatives, then multiply by `C`.
pub fn factor_level(fd: &FrobeniusData, l: &RegulatorVector) -> Result<ColemanVector> {
    let n = l.level;
    if l.components.len() != fd.rd() {
        return Err(ColemanError::Shape(format!("expected {} components", fd.rd())));
    }
    let ctx = fd.ctx();
    let ring = LambdaN::new(ctx, n);
    let c = constant_matrix(fd.c());
    let mut cur: Vec<Poly> = l.components.iter().map(|e| e.rep().clone()).collect();
    for k in (1..=n).rev() {
        let phi = phi_cyclo(ctx, k);
        for (i, f) in cur.iter_mut().enumerate().skip(fd.fil_rank()) {
            let (q, r) = f.divide_exact(&phi)?;
            match r.zero_verdict(fd.floor()) {
                Verdict::Pass => *f = q,
                Verdict::Fail { witness } => {
                    return Err(ColemanError::NotInImage {
                        stage: k,
                        component: i,
                        witness: format!("remainder {witness}"),
                    })
                }
                Verdict::Indeterminate { shortfall } => {
                    return Err(ColemanError::PrecisionLoss {
                        stage: k,
                        component: i,
                        shortfall,
                    })
                }
            }
        }
        cur = c.mul_vec(&cur).iter().map(|f| ring.reduce(f).rep().clone()).collect();
    }
    Ok(ColemanVector {
        level: n,
        components: cur.iter().map(|f| ring.reduce(f)).collect(),
        kernel_tag: kernel_tag(fd, n),
    })
}

/// `forward(factor_level(L)) = L` for `L = forward(col)`.
pub fn roundtrip_verdict(fd: &FrobeniusData, col: &[LambdaNElement]) -> Verdict {
    let n = match col.first() {
        Some(c) => c.level(),
        None => return Verdict::fail("empty vector"),
    };
    let run = || -> Result<Verdict> {
        let l = forward(fd, n, col)?;
        let back = factor_level(fd, &l)?;
        let again = forward(fd, n, &back.components)?;
        Ok(vector_equal(&again.components, &l.components, fd.floor()))
    };
    run().unwrap_or_else(|e| Verdict::fail(e.to_string()))
}

pub fn vector_equal(a: &[LambdaNElement], b: &[LambdaNElement], floor: i64) -> Verdict {
    if a.len() != b.len() {
        return Verdict::fail("length mismatch");
    }
    Verdict::all(
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| x.equal_verdict(y, floor).context(format!("component {i}"))),
    )
}

/// `C_φ^(-n-1) · raw (mod ω_n)`, which must be integral.
pub fn integral_shift(fd: &FrobeniusData, n: u32, raw: &[Poly]) -> Result<RegulatorVector> {
    if raw.len() != fd.rd() {
        return Err(ColemanError::Shape(format!("expected {} components", fd.rd())));
    }
    let budget = fd.ctx().denom_budget() as i64;
    if let Some(v) = raw.iter().filter_map(Poly::min_valuation).min().filter(|v| *v < -budget) {
        return Err(LogMatrixError::DenominatorBudgetExceeded {
            valuation: v,
            budget: budget as u32,
        }
        .into());
    }
    let ring = LambdaN::new(fd.ctx(), n);
    let shift = constant_matrix(&fd.c_phi().inverse().map_err(LogMatrixError::from)?.pow(n + 1));
    let comps: Vec<LambdaNElement> = shift.mul_vec(raw).iter().map(|f| ring.reduce(f)).collect();
    for (i, e) in comps.iter().enumerate() {
        if let Some((j, c)) = e.rep().coeffs().iter().enumerate().find(|(_, c)| !c.is_integral()) {
            return Err(ColemanError::NotIntegral {
                component: i,
                degree: j,
                value: c.to_string(),
            });
        }
    }
    Ok(RegulatorVector {
        level: n,
        components: comps,
    })
}

/// Matrix of `h_n` acting on `Λ_n^rd ≅ Z_p^(rd p^n)`; basis vector
/// `X^j e_i` sits at index `i p^n + j`.
pub fn hn_coordinate_matrix(fd: &FrobeniusData, n: u32) -> ScalarMatrix {
    let ring = LambdaN::new(fd.ctx(), n);
    let h = hn_in_lambda(fd, &ring);
    let (rd, pn) = (fd.rd(), ring.rank());
    let mut columns = Vec::with_capacity(rd * pn);
    for i in 0..rd {
        for j in 0..pn {
            let xj = ring.reduce(&Poly::x(fd.ctx()).pow(j as u32, &fd.ctx().one()));
            let image: Vec<PadicScalar> = (0..rd)
                .flat_map(|a| {
                    let e = h.get(a, i).mul(&xj);
                    (0..pn).map(move |b| e.rep().coeff(b))
                })
                .collect();
            columns.push(image);
        }
    }
    ScalarMatrix::from_columns(&columns).expect("uniform columns")
}

/// A `Z_p`-basis of `ker h_n` on `Λ_n^rd`, for `rd <= 4`.
pub fn kernel_basis(fd: &FrobeniusData, n: u32) -> Result<Vec<Vec<LambdaNElement>>> {
    if fd.rd() > 4 {
        return Err(ColemanError::KernelTooLarge(fd.rd()));
    }
    let ring = LambdaN::new(fd.ctx(), n);
    let pn = ring.rank();
    let m = hn_coordinate_matrix(fd, n);
    Ok(m.kernel_basis()
        .into_iter()
        .map(|v| {
            (0..fd.rd())
                .map(|i| ring.reduce(&Poly::from_coeffs(fd.ctx().p(), v[i * pn..(i + 1) * pn].to_vec())))
                .collect()
        })
        .collect())
}

/// Random integral vector in `Λ_n^rd` with coefficients in `[-p^3, p^3]`.
pub fn random_col<R: Rng>(fd: &FrobeniusData, ring: &LambdaN, rng: &mut R) -> Vec<LambdaNElement> {
    let ctx = fd.ctx();
    let bound = (ctx.p() as i64).pow(3);
    (0..fd.rd())
        .map(|_| {
            let c: Vec<i64> = (0..ring.rank()).map(|_| rng.gen_range(-bound..=bound)).collect();
            ring.reduce(&Poly::from_ints(ctx, &c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log_matrix::{build_cn, build_mn, random_frobenius_data};
    use crate::padic::PadicContext;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PadicContext {
        PadicContext::new(3, 30, 20).unwrap()
    }

    fn pollack(c: &PadicContext) -> FrobeniusData {
        FrobeniusData::from_ints(c, 2, 1, 1, &[vec![0, -1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn forward_of_basis_vector() {
        let c = ctx();
        let fd = pollack(&c);
        let ring = LambdaN::new(&c, 1);
        let col = vec![ring.one(), ring.zero()];
        let l = forward(&fd, 1, &col).unwrap();
        // C_1 e_1 = (0, -Φ_3)
        assert!(l.components[0].equal_verdict(&ring.zero(), 15).is_pass());
        let want = ring.reduce(&phi_cyclo(&c, 1).neg());
        assert!(l.components[1].equal_verdict(&want, 15).is_pass());
    }

    #[test]
    fn zero_roundtrips_to_zero() {
        let c = ctx();
        let fd = pollack(&c);
        let ring = LambdaN::new(&c, 2);
        let l = RegulatorVector {
            level: 2,
            components: vec![ring.zero(), ring.zero()],
        };
        let col = factor_level(&fd, &l).unwrap();
        assert!(vector_equal(&col.components, &l.components, 15).is_pass());
    }

    #[test]
    fn random_roundtrips() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fd = pollack(&c);
        for n in 1..=2 {
            let ring = LambdaN::new(&c, n);
            for _ in 0..5 {
                let col = random_col(&fd, &ring, &mut rng);
                let v = roundtrip_verdict(&fd, &col);
                assert!(v.is_pass(), "{v}");
            }
        }
        let fd4 = random_frobenius_data(&c, 4, 2, &mut rng);
        let ring = LambdaN::new(&c, 2);
        let col = random_col(&fd4, &ring, &mut rng);
        assert!(roundtrip_verdict(&fd4, &col).is_pass());
    }

    #[test]
    fn constant_lower_component_is_not_in_image() {
        let c = ctx();
        let fd = pollack(&c);
        let ring = LambdaN::new(&c, 1);
        let l = RegulatorVector {
            level: 1,
            components: vec![ring.zero(), ring.one()],
        };
        assert!(matches!(
            factor_level(&fd, &l),
            Err(ColemanError::NotInImage { stage: 1, component: 1, .. })
        ));
    }

    #[test]
    fn divisible_at_top_stage_only() {
        let c = ctx();
        let fd = pollack(&c);
        let ring = LambdaN::new(&c, 2);
        // C_2 (0, 1): passes stage 2, but (0, 1) is not in the image of C_1
        let y = vec![Poly::zero(3), Poly::from_ints(&c, &[1])];
        let l: Vec<LambdaNElement> = build_cn(&fd, 2).mul_vec(&y).iter().map(|f| ring.reduce(f)).collect();
        let err = factor_level(&fd, &RegulatorVector { level: 2, components: l }).unwrap_err();
        assert!(matches!(err, ColemanError::NotInImage { stage: 1, .. }), "{err}");
    }

    #[test]
    fn lambda_linearity() {
        let c = ctx();
        let fd = pollack(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ring = LambdaN::new(&c, 2);
        let col = random_col(&fd, &ring, &mut rng);
        let a = ring.reduce(&Poly::from_ints(&c, &[2, -1, 0, 4]));
        let scaled: Vec<_> = col.iter().map(|x| a.mul(x)).collect();
        let lhs = forward(&fd, 2, &scaled).unwrap();
        let rhs: Vec<_> = forward(&fd, 2, &col).unwrap().components.iter().map(|x| a.mul(x)).collect();
        assert!(vector_equal(&lhs.components, &rhs, 15).is_pass());
    }

    #[test]
    fn integral_shift_examples() {
        let c = ctx();
        let fd = pollack(&c);
        let n = 1;
        let ring = LambdaN::new(&c, n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let col = random_col(&fd, &ring, &mut rng);
        let raw: Vec<Poly> = build_mn(&fd, n)
            .unwrap()
            .entries
            .mul_vec(&col.iter().map(|e| e.rep().clone()).collect::<Vec<_>>());
        let shifted = integral_shift(&fd, n, &raw).unwrap();
        let l = forward(&fd, n, &col).unwrap();
        assert!(vector_equal(&shifted.components, &l.components, 10).is_pass());

        let bad = vec![Poly::constant(c.p_power(-(n as i64 + 2))), Poly::zero(3)];
        assert!(matches!(integral_shift(&fd, n, &bad), Err(ColemanError::NotIntegral { .. })));
    }

    #[test]
    fn kernel_has_expected_rank_and_dies() {
        let c = ctx();
        let fd = pollack(&c);
        for n in 1..=2 {
            let ring = LambdaN::new(&c, n);
            let ker = kernel_basis(&fd, n).unwrap();
            assert_eq!(ker.len(), 3usize.pow(n) - 1);
            let h = hn_in_lambda(&fd, &ring);
            for v in &ker {
                let image = h.mul_vec(v);
                assert!(vector_equal(&image, &[ring.zero(), ring.zero()], 10).is_pass());
            }
        }
    }

    #[test]
    fn vector_record_roundtrip() {
        let c = ctx();
        let fd = pollack(&c);
        let ring = LambdaN::new(&c, 2);
        let col = random_col(&fd, &ring, &mut ChaCha8Rng::seed_from_u64(1));
        let rec = VectorRecord::from_components(2, &col);
        let json = serde_json::to_string(&rec).unwrap();
        let back: VectorRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_components(&ring).unwrap(), col);
    }
}
