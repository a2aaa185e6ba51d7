//! Compatibility of the finite levels with each other, as properties over
//! random instances.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padic_coleman::coleman;
use padic_coleman::log_matrix::{self, build_hn};
use padic_coleman::series::{constant_matrix, LambdaN, LambdaNElement};
use padic_coleman::{PadicContext, Verdict};

fn project(ring: &LambdaN, v: &[LambdaNElement]) -> Vec<LambdaNElement> {
    v.iter().map(|x| ring.reduce(x.rep())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// `Φ_{p^{n+1}}(1+X) ≡ p (mod ω_n)`, so `C_{n+1} ≡ C_φ^-1` and the
    /// projection of `h_{n+1} x` is `C_φ^-1 h_n (proj x)`.
    #[test]
    fn projection_intertwines_levels(seed in 0u64..1000, big in any::<bool>(), n in 1u32..=2) {
        let ctx = PadicContext::new(3, 30, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, d0) = if big { (4, 2) } else { (2, 1) };
        let fd = log_matrix::random_frobenius_data(&ctx, d, d0, &mut rng);
        let (lo, hi) = (LambdaN::new(&ctx, n), LambdaN::new(&ctx, n + 1));
        let x = coleman::random_col(&fd, &hi, &mut rng);
        let upper = coleman::forward(&fd, n + 1, &x).unwrap();
        let lower = coleman::forward(&fd, n, &project(&lo, &x)).unwrap();
        let c_phi_inv = constant_matrix(&fd.c_phi().inverse().unwrap()).map(|f| lo.reduce(f));
        let want = c_phi_inv.mul_vec(&lower.components);
        let got = project(&lo, &upper.components);
        prop_assert!(coleman::vector_equal(&got, &want, fd.floor()).is_pass());
    }

    /// `h_n` is `Λ_n`-linear: `h_n (a x) = a h_n x`.
    #[test]
    fn forward_is_lambda_linear(seed in 0u64..1000) {
        let ctx = PadicContext::new(5, 30, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fd = log_matrix::random_frobenius_data(&ctx, 2, 1, &mut rng);
        let ring = LambdaN::new(&ctx, 1);
        let x = coleman::random_col(&fd, &ring, &mut rng);
        let a = coleman::random_col(&fd, &ring, &mut rng).remove(0);
        let ax: Vec<_> = x.iter().map(|c| a.mul(c)).collect();
        let lhs = coleman::forward(&fd, 1, &ax).unwrap().components;
        let rhs: Vec<_> = coleman::forward(&fd, 1, &x).unwrap().components.iter().map(|c| a.mul(c)).collect();
        prop_assert!(coleman::vector_equal(&lhs, &rhs, fd.floor()).is_pass());
    }

    /// Stabilization and evaluation on random instances at p = 5.
    #[test]
    fn stabilization_at_p5(seed in 0u64..1000) {
        let ctx = PadicContext::new(5, 30, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fd = log_matrix::random_frobenius_data(&ctx, 2, 1, &mut rng);
        let v = log_matrix::verify_stabilization(&fd, 1, 2).unwrap();
        prop_assert!(v.is_pass(), "{}", v);
        prop_assert!(log_matrix::evaluation_verdict(&log_matrix::build_mn(&fd, 2).unwrap()).is_pass());
    }
}

#[test]
fn hn_changes_modulo_a_lower_omega() {
    // h_2 and C_φ^-1 h_1 agree mod ω_1 but not mod ω_2
    let ctx = PadicContext::new(3, 30, 20).unwrap();
    let fd = padic_coleman::pollack::PollackInstance::new(&ctx).unwrap().fd().clone();
    let h1 = constant_matrix(&fd.c_phi().inverse().unwrap()).mul(&build_hn(&fd, 1));
    let h2 = build_hn(&fd, 2);
    let r1 = LambdaN::new(&ctx, 1);
    let r2 = LambdaN::new(&ctx, 2);
    assert!(log_matrix::congruent_mod_omega(&h2, &h1, &r1, fd.floor()).is_pass());
    assert!(matches!(log_matrix::congruent_mod_omega(&h2, &h1, &r2, fd.floor()), Verdict::Fail { .. }));
}
