//! Oracles that share no code with the library beyond reading scalars:
//! integer determinants by Bareiss elimination and integer polynomials.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use padic_coleman::{PadicContext, PadicScalar};

/// Determinant of an integer matrix given by its columns.
pub fn int_det(columns: &[Vec<BigInt>]) -> BigInt {
    let n = columns.len();
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| columns[j][i].clone()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// `v_p(x)`, `None` for zero.
pub fn vp(p: u32, x: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let (mut x, mut v) = (x.abs(), 0);
    while x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Integer representatives of an integral vector modulo `p^k`.
pub fn reps(v: &[PadicScalar], k: u32) -> Vec<BigInt> {
    v.iter().map(|x| x.to_bigint_mod(k).expect("integral entry")).collect()
}

/// Determinant of integral p-adic columns, through representatives mod `p^k`.
/// The result is the true determinant modulo `p^k`.
pub fn det_mod(columns: &[&Vec<PadicScalar>], k: u32) -> BigInt {
    int_det(&columns.iter().map(|c| reps(c, k)).collect::<Vec<_>>())
}

/// `v_p` of a determinant known modulo `p^k`, `None` when it is `0 mod p^k`.
pub fn det_valuation(p: u32, columns: &[&Vec<PadicScalar>], k: u32) -> Option<u32> {
    let m = BigInt::from(p).pow(k);
    vp(p, &det_mod(columns, k).mod_floor(&m))
}

pub fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(1+X)^e` by the multiplicative formula for binomials.
pub fn one_plus_x_pow(e: u64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=e {
        let next = row[k as usize - 1].clone() * BigInt::from(e - k + 1) / BigInt::from(k);
        row.push(next);
    }
    row
}

/// `Φ_{p^k}(1+X) = Σ_{i<p} (1+X)^{i p^{k-1}}`.
pub fn cyclotomic(p: u32, k: u32) -> Vec<BigInt> {
    let step = (p as u64).pow(k - 1);
    let mut out = vec![BigInt::zero(); (p as u64 - 1) as usize * step as usize + 1];
    for i in 0..p as u64 {
        for (j, c) in one_plus_x_pow(i * step).into_iter().enumerate() {
            out[j] += c;
        }
    }
    out
}

/// `p^-e f` as p-adic scalars, padded with zeros to `len`.
pub fn scaled(ctx: &PadicContext, f: &[BigInt], e: i64, len: usize) -> Vec<PadicScalar> {
    (0..len.max(f.len()))
        .map(|i| f.get(i).map_or_else(|| ctx.zero(), |c| ctx.from_bigint(c).shift(-e)))
        .collect()
}
