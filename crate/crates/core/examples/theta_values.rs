//! Theta series, eta and j at CM points.
//!
//! Run with `cargo run --example theta_values`.

use rug::Complex;
use thetalab::characters::DirichletCharacter;
use thetalab::modularforms::{a_value, b_value, eta, eta_product, j_invariant, theta_chi, theta_chi_decomposed};
use thetalab::numkernel::{distance, format_decimal, log2_abs};
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::default();
    let prec = ctx.work_bits();
    let i = Complex::with_val(prec, (0, 1));

    let e = eta(&i, &ctx)?;
    let e_prod = eta_product(&i, &ctx)?;
    println!("eta(i)      = {}", format_decimal(e.real(), 40));
    println!("  series vs product: |difference| = 2^{:.1}", log2_abs(&distance(&e, &e_prod)));

    for n in [1u64, 2, 3, 5] {
        let tau = Complex::with_val(prec, (0, n));
        let j = j_invariant(&tau, &ctx)?;
        println!("j({n}i)       = {}", format_decimal(j.real(), 30));
    }

    println!();
    for label in ["1:", "5:2", "5:1", "7:1", "12:1,1"] {
        let chi: DirichletCharacter = label.parse()?;
        let theta = theta_chi(&chi, &i, &ctx)?;
        let split = theta_chi_decomposed(&chi, &i, &ctx)?;
        println!(
            "theta_{label:<7}(i) = {:>26} {:+.20e}i   (partial-theta decomposition agrees to 2^{:.0})",
            format_decimal(theta.real(), 25),
            theta.imag().to_f64(),
            log2_abs(&distance(&theta, &split))
        );
    }

    println!();
    for label in ["1:", "5:2", "13:2"] {
        let chi: DirichletCharacter = label.parse()?;
        let a = a_value(&chi, &ctx)?;
        let b = b_value(&chi, &ctx)?;
        println!("A_{label}(iN) = {}   B = {}", format_decimal(a.real(), 25), format_decimal(&b, 25));
    }
    Ok(())
}
