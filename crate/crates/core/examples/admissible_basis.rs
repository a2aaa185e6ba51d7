//! Admissible and strongly admissible bases with their certificates, for
//! the dual of an instance and for a random lattice setup.

use padic_coleman::basis::{self, CandidateSource, LatticeSetup};
use padic_coleman::pollack::PollackInstance;
use padic_coleman::PadicContext;
use rand::SeedableRng;

fn show(name: &str, setup: &LatticeSetup, b: &basis::CandidateBasis) {
    let ctx = setup.ctx();
    println!("{name}: method {:?}, saturated {}, verdict {}", b.method, b.saturated(), b.verdict());
    for v in &b.vectors {
        let ints: Vec<String> = v.iter().map(|x| x.to_bigint_mod(6).map_or("?".into(), |i| i.to_string())).collect();
        println!("  ({}) mod {}^6", ints.join(", "), ctx.p());
    }
    for s in &b.admissible.subsets {
        println!("  I = {:?}: det valuation {:?}, {:?}", s.indices, s.valuation, s.status);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = PadicContext::new(3, 30, 30)?;
    let dual = LatticeSetup::dual_of(PollackInstance::new(&ctx)?.fd())?;
    show("pollack dual, admissible", &dual, &basis::construct_admissible(&dual)?);
    show(
        "pollack dual, strongly admissible",
        &dual,
        &basis::construct_strongly_admissible(&dual, CandidateSource::Enumerated)?,
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let setup = basis::random_setup(&ctx, 4, 2, &mut rng);
    let strong = basis::construct_strongly_admissible(&setup, CandidateSource::Random { seed: 5 })?;
    println!("random g = 4 setup, strongly admissible: {}", strong.verdict());
    let cert = basis::is_strongly_admissible(&setup, &strong.vectors)?;
    println!("  independent re-check: {}", cert.verdict());

    // e_1 spans Fil^0 here, so keeping it breaks admissibility
    let bad = LatticeSetup::from_ints(&ctx, 2, 1, &[vec![1, 0]], None)?;
    let e = vec![vec![ctx.one(), ctx.zero()], vec![ctx.zero(), ctx.one()]];
    println!("basis {{e_1, e_2}} with Fil^0 = <e_1>: {}", basis::is_admissible(&bad, &e)?.verdict());
    Ok(())
}
