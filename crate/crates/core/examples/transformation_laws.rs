//! Transformation laws: inversion of partial thetas, the theta multiplier
//! under Gamma_theta ∩ Gamma_0(N), Meyer's eta multiplier, invariance under
//! Gamma(w), and quadratic Gauss sums. Each suite reports its worst residual.
//!
//! Run with `cargo run --release --example transformation_laws`.

use thetalab::modularforms::{
    gauss_sum_suite, inversion_suite, invariance_level, level_suite, meyer_multiplier, meyer_suite,
    theta_multiplier_upsilon, transform_suite, TransformMatrix,
};
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::default();

    let gamma = TransformMatrix::new(1, 2, 6, 13)?;
    println!("Meyer multiplier of {gamma}: {:?}", meyer_multiplier(&gamma));
    println!("upsilon({gamma}, 3): {:?}", theta_multiplier_upsilon(&gamma, 3)?);
    for n in [3u64, 5, 12, 15] {
        println!("invariance level w for N = {n}: {}", invariance_level(n));
    }
    println!();

    let seed = 2024;
    let reports = [
        inversion_suite(100, seed, &ctx)?,
        transform_suite(&[3, 5, 9, 15], 100, seed, &ctx)?,
        meyer_suite(1000, seed, &ctx)?,
        level_suite(&[3, 5], 20, seed, &ctx)?,
        gauss_sum_suite(60, &ctx)?,
    ];
    for r in &reports {
        println!(
            "{:<10} {:>6} cases  max residual 2^{:<7.1} tolerance 2^{}  {}",
            r.name,
            r.cases,
            r.max_residual_log2,
            r.tolerance_log2,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
