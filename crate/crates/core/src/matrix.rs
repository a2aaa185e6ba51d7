//! Dense matrices over the crate's rings, plus `Z_p`-linear algebra on
//! scalar matrices (inversion, Smith form, integral solving, kernels).

use std::fmt;

use thiserror::Error;

use crate::padic::{PadicContext, PadicScalar};

/// The operations a matrix entry needs. Zero is produced from an existing
/// element because every ring here carries its prime (and, for series, its
/// truncation) at runtime.
pub trait Ring: Clone + fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero_like(&self) -> Self;
}

impl Ring for PadicScalar {
    fn add(&self, other: &Self) -> Self {
        PadicScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        PadicScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        PadicScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        PadicScalar::neg(self)
    }
    fn zero_like(&self) -> Self {
        PadicScalar::zero_like(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular at working precision (column {column})")]
    Singular { column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Shape("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn filled(rows: usize, cols: usize, value: R) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize, zero: &R, one: &R) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn diagonal(entries: &[R], zero: &R) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { zero.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &R> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Matrix<S>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_shape(other).expect("matrix add");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_shape(other).expect("matrix sub");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(Ring::neg)
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|x| s.mul(x))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(other.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).mul(&v[0]);
                for k in 1..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    /// `self^e` for `e >= 1`.
    pub fn pow(&self, e: u32) -> Self {
        assert!(e >= 1 && self.is_square());
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Rows and columns selected by index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<R>]) -> Result<Self, MatrixError> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|v| v.len() != r) {
            return Err(MatrixError::Shape("columns of unequal length".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| columns[j][i].clone()))
    }

    /// Division-free determinant by expansion over column subsets:
    /// `O(n 2^n)` ring operations, exact in any commutative ring.
    pub fn det(&self) -> R {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        assert!((1..=20).contains(&n));
        let zero = self.get(0, 0).zero_like();
        // minors[mask] = det of rows 0..popcount(mask) against the columns in mask
        let mut minors: Vec<Option<R>> = vec![None; 1 << n];
        for j in 0..n {
            minors[1 << j] = Some(self.get(0, j).clone());
        }
        for mask in 1usize..(1 << n) {
            let k = mask.count_ones() as usize;
            if k < 2 {
                continue;
            }
            let row = k - 1;
            let mut acc: Option<R> = None;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let rest = mask & !(1 << j);
                // columns in `rest` after j
                let after = (rest >> (j + 1)).count_ones() as usize;
                let term = self.get(row, j).mul(minors[rest].as_ref().expect("computed"));
                let term = if after % 2 == 1 { term.neg() } else { term };
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            minors[mask] = Some(acc.unwrap_or_else(|| zero.clone()));
        }
        minors[(1 << n) - 1].take().expect("full minor")
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub type ScalarMatrix = Matrix<PadicScalar>;

/// Smith form `U * A * V = diag(d_1, .., d_r, 0, ..)` with `U`, `V` in
/// `GL(Z_p)`. Pivots are chosen by minimal valuation so every elimination
/// multiplier is integral.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub rank: usize,
    pub diagonal: Vec<PadicScalar>,
    pub left: ScalarMatrix,
    pub right: ScalarMatrix,
    /// The reduced matrix; off-diagonal entries are zero at precision.
    pub reduced: ScalarMatrix,
}

impl ScalarMatrix {
    pub fn from_ints(ctx: &PadicContext, rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.from_int(x)).collect()).collect())
    }

    pub fn scalar_identity(ctx: &PadicContext, n: usize) -> Self {
        Self::identity(n, &ctx.zero(), &ctx.one())
    }

    /// Smallest valuation of a nonzero entry; `None` if every entry is zero.
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries().filter_map(PadicScalar::valuation).min()
    }

    pub fn is_integral(&self) -> bool {
        self.entries().all(PadicScalar::is_integral)
    }

    /// Inverse by Gauss-Jordan elimination with minimal-valuation pivots.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows();
        let p = self.get(0, 0).p();
        let prec = self
            .entries()
            .filter_map(PadicScalar::rel_prec)
            .max()
            .unwrap_or(1);
        let one = PadicScalar::from_parts(p, 0, 1u32.into(), prec).expect("one");
        let zero = PadicScalar::exact_zero(p);
        let mut a = self.to_rows();
        let mut inv = Self::identity(n, &zero, &one).to_rows();
        for col in 0..n {
            let pivot = (col..n)
                .filter_map(|r| a[r][col].valuation().map(|v| (v, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or(MatrixError::Singular { column: col })?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inv().map_err(|_| MatrixError::Singular { column: col })?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_exact_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = f.mul(&a[col][j]);
                    a[r][j] = a[r][j].sub(&t);
                    let t = f.mul(&inv[col][j]);
                    inv[r][j] = inv[r][j].sub(&t);
                }
                a[r][col] = zero.clone();
            }
        }
        Self::from_rows(inv)
    }

    /// Smith form over `Z_p` (entries may carry denominators).
    pub fn smith(&self) -> SmithForm {
        let (m, n) = (self.rows(), self.cols());
        let p = self.get(0, 0).p();
        let prec = self
            .entries()
            .filter_map(PadicScalar::rel_prec)
            .max()
            .unwrap_or(1);
        let one = PadicScalar::from_parts(p, 0, 1u32.into(), prec).expect("one");
        let zero = PadicScalar::exact_zero(p);
        let mut a = self.to_rows();
        let mut u = Self::identity(m, &zero, &one).to_rows();
        let mut v = Self::identity(n, &zero, &one).to_rows();
        let mut rank = 0;
        for t in 0..m.min(n) {
            let best = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter_map(|(i, j)| a[i][j].valuation().map(|val| (val, i, j)))
                .min();
            let Some((_, pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let pinv = a[t][t].inv().expect("nonzero pivot");
            for i in (t + 1)..m {
                if a[i][t].is_exact_zero() {
                    continue;
                }
                let f = a[i][t].mul(&pinv);
                for j in 0..n {
                    let s = f.mul(&a[t][j]);
                    a[i][j] = a[i][j].sub(&s);
                }
                for j in 0..m {
                    let s = f.mul(&u[t][j]);
                    u[i][j] = u[i][j].sub(&s);
                }
                a[i][t] = zero.clone();
            }
            for j in (t + 1)..n {
                if a[t][j].is_exact_zero() {
                    continue;
                }
                let f = a[t][j].mul(&pinv);
                for i in 0..m {
                    let s = f.mul(&a[i][t]);
                    a[i][j] = a[i][j].sub(&s);
                }
                for i in 0..n {
                    let s = f.mul(&v[i][t]);
                    v[i][j] = v[i][j].sub(&s);
                }
                a[t][j] = zero.clone();
            }
            rank = t + 1;
        }
        let diagonal = (0..rank).map(|i| a[i][i].clone()).collect();
        SmithForm {
            rank,
            diagonal,
            left: Self::from_rows(u).expect("square"),
            right: Self::from_rows(v).expect("square"),
            reduced: Self::from_rows(a).expect("shape"),
        }
    }

    /// Rank over `Q_p`, treating entries indistinguishable from zero as zero.
    pub fn rank(&self) -> usize {
        if self.rows() == 0 || self.cols() == 0 {
            return 0;
        }
        self.smith().rank
    }

    /// An integral solution of `A x = b`, if one exists at working precision.
    pub fn solve_integral(&self, b: &[PadicScalar]) -> Option<Vec<PadicScalar>> {
        assert_eq!(b.len(), self.rows());
        let sf = self.smith();
        let ub = sf.left.mul_vec(b);
        let zero = PadicScalar::exact_zero(self.get(0, 0).p());
        let mut y = vec![zero; self.cols()];
        for (i, c) in ub.iter().enumerate() {
            if i < sf.rank {
                let q = c.div(&sf.diagonal[i]).ok()?;
                if !q.is_integral() {
                    return None;
                }
                y[i] = q;
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(sf.right.mul_vec(&y))
    }

    /// A `Z_p`-basis of the (saturated) kernel lattice, as column vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<PadicScalar>> {
        let sf = self.smith();
        (sf.rank..self.cols()).map(|j| sf.right.column(j)).collect()
    }
}
