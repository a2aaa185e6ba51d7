//! Floating p-adic scalars: valuations, precision loss on cancellation, and
//! the three-valued comparison every check is built on.

use padic_coleman::{Comparison, PadicContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = PadicContext::new(3, 10, 5)?;
    let a = ctx.from_int(54); // 2 · 3^3
    let b = ctx.from_ratio(1, 3)?;
    println!("54 = {a}, valuation {:?}", a.valuation());
    println!("1/3 = {b}, valuation {:?}", b.valuation());
    println!("54 · 1/3 = {}", a.mul(&b));

    // 1 + 3^9 and 1 agree to 9 digits; their difference keeps only what survives
    let near = ctx.from_int(1 + 3i64.pow(9));
    let diff = near.sub(&ctx.one());
    println!("(1 + 3^9) - 1 = {diff}, absolute precision {:?}", diff.abs_prec());

    // cancellation: the difference of two equal inexact numbers is an inexact zero
    let zero = a.sub(&a);
    println!("54 - 54 = {zero}");
    for floor in [5, 20] {
        let verdict = match zero.zero_status(floor) {
            Comparison::Equal => "zero",
            Comparison::Unequal => "nonzero",
            Comparison::Indistinguishable => "undecidable",
        };
        println!("  is it zero at absolute precision {floor}? {verdict}");
    }
    println!("balanced residue of -1 mod 3^4: {:?}", ctx.one().neg().to_bigint_mod(4));
    Ok(())
}
