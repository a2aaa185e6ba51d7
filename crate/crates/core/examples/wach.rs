//! `φ` and `Γ` on `Z_p[[π]]`, and the Wach matrices `P_n`, `M'_n`,
//! `G_γ` for the Pollack instance.

use padic_coleman::pollack::PollackInstance;
use padic_coleman::wach::{self, GammaElement, WachSetup};
use padic_coleman::PadicContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = PadicContext::new(3, 60, 30)?;
    let ws = WachSetup::new(PollackInstance::new(&ctx)?.fd().clone(), 30)?;
    let gamma = GammaElement::from_int(&ctx, 4)?;
    let g = gamma.series(&ctx, 6)?;
    println!("γ(π) = (1+π)^4 - 1, first coefficients: {:?}", g.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>());

    let towers: Vec<_> = (1..=3).map(|n| wach::build_m_prime(&ws, n)).collect::<Result<_, _>>()?;
    for t in &towers {
        let degree = t.m_prime.entries().filter_map(|f| f.degree()).max();
        let g = wach::build_g_gamma(&ws, t, &gamma)?;
        println!("n = {}: M'_n has degree {degree:?}; G^(n) = I mod π, integral: {}", t.level, g.verdict());
        println!("  C_φ M'_n = M_n: {}", wach::log_matrix_relation(&ws, t)?);
    }
    println!("P_1 γ(P_1^-1) = I mod π: {}", wach::lemma_a(&ws, &gamma)?);
    for n in 0..2 {
        let r = wach::verify_commutation(&ws, &towers[n], &towers[n + 1], &gamma)?;
        println!("P_1 φ(G^({0})) = G^({1}) γ(P_1): {2}", n + 1, n + 2, r.verdict);
    }
    println!("M'_2 = M'_1 mod φ(π): {}", wach::tower_congruence(&ws, &towers[0], &towers[1]));
    Ok(())
}
