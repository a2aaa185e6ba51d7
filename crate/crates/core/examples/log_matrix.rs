//! Frobenius data from an instance file, the slope hypothesis, and the
//! logarithmic matrices `M_n` with their stabilization, evaluation and
//! determinant checks.
//!
//! ```text
//! cargo run --example log_matrix -- crates/core/examples/data/gl4_p3.json
//! ```

use padic_coleman::cli::{read_json, InstanceFile};
use padic_coleman::log_matrix::{self, build_mn, check_hypotheses};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/gl4_p3.json").into());
    let instance: InstanceFile = read_json(path.as_ref())?;
    let fd = instance.frobenius_data(false)?;
    let h = check_hypotheses(&fd);
    println!("p = {}, d = {}, d0 = {}", fd.ctx().p(), fd.d(), fd.d0());
    println!("eigenvalue valuations of C_φ: {:?}", h.root_valuations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    println!("slope hypothesis: {}", h.verdict());

    let levels: Vec<_> = (1..=3).map(|n| build_mn(&fd, n)).collect::<Result<_, _>>()?;
    for m in &levels {
        let degree = m.entries.entries().filter_map(|f| f.degree()).max();
        println!(
            "M_{}: max degree {degree:?}, smallest coefficient valuation {:?}",
            m.level, m.min_valuation
        );
        println!("  M_{}(0) = C_φ: {}", m.level, log_matrix::evaluation_verdict(m));
        println!("  det M_{} matches closed form: {}", m.level, log_matrix::det_mn(&fd, m.level)?.verdict);
    }
    println!("M_3 = M_1 mod ω_1: {}", log_matrix::stabilization_verdict(&levels[2], &levels[0]));
    println!("M_3 = M_2 mod ω_2: {}", log_matrix::stabilization_verdict(&levels[2], &levels[1]));
    Ok(())
}
