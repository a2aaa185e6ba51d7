//! Factoring a regulator-shaped vector through `h_n = C_n ⋯ C_1`, the
//! kernel ambiguity, and a vector that is not in the image.

use padic_coleman::coleman::{self, RegulatorVector};
use padic_coleman::pollack::PollackInstance;
use padic_coleman::series::LambdaN;
use padic_coleman::{PadicContext, Poly};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = PadicContext::new(3, 30, 20)?;
    let fd = PollackInstance::new(&ctx)?.fd().clone();
    let n = 2;
    let ring = LambdaN::new(&ctx, n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);

    let col = coleman::random_col(&fd, &ring, &mut rng);
    let l = coleman::forward(&fd, n, &col)?;
    let back = coleman::factor_level(&fd, &l)?;
    let again = coleman::forward(&fd, n, &back.components)?;
    println!("h_{n} col' = L: {}", coleman::vector_equal(&again.components, &l.components, fd.floor()));
    println!("col' = col: {} (col' is certified {})", coleman::vector_equal(&back.components, &col, fd.floor()), back.kernel_tag);

    let kernel = coleman::kernel_basis(&fd, n)?;
    println!("ker h_{n} has {} Z_p-basis vectors", kernel.len());

    // adding X to the lower component leaves the image
    let mut bad = l.clone();
    bad.components[1] = bad.components[1].add(&ring.reduce(&Poly::from_ints(&ctx, &[0, 1])));
    match coleman::factor_level(&fd, &RegulatorVector { level: n, components: bad.components }) {
        Ok(_) => println!("unexpectedly factored"),
        Err(e) => println!("perturbed vector: {e}"),
    }
    Ok(())
}
