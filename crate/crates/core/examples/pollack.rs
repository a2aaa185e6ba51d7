//! The `a_p = 0` instance: `M_n` is antidiagonal with the partial
//! ±-logarithms as entries.

use padic_coleman::log_matrix::build_mn;
use padic_coleman::pollack::{self, PollackInstance};
use padic_coleman::{PadicContext, Poly};

fn show(f: &Poly) -> String {
    let terms: Vec<String> = (0..f.len().min(4)).map(|j| format!("({}) X^{j}", f.coeff(j))).collect();
    format!("{} + ... (degree {:?})", terms.join(" + "), f.degree())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u32 = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let ctx = PadicContext::new(p, 30, 20)?;
    let inst = PollackInstance::new(&ctx)?;
    for n in 1..=3 {
        let m = build_mn(inst.fd(), n)?;
        println!("n = {n}");
        println!("  M_n[0][1] = {}", show(m.entries.get(0, 1)));
        println!("  M_n[1][0] = {}", show(m.entries.get(1, 0)));
        let r = pollack::verify_antidiagonal(&inst, n)?;
        for (name, v) in &r.checks.checks {
            println!("  {name}: {v}");
        }
        println!("  against log^- with its leading 1/p: {}", r.lower_vs_literal_log_minus);
    }
    Ok(())
}
