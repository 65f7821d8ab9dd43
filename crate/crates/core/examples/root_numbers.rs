//! Root numbers by the Gauss sum (N character evaluations) and by the
//! theta quotient at tau = i (O(sqrt N) series terms), and the functional
//! equation check.
//!
//! Run with `cargo run --release --example root_numbers`.

use rug::Complex;
use thetalab::characters::enumerate_characters;
use thetalab::numkernel::log2_abs;
use thetalab::rootnumber::{root_number_report, theta_term_budget, verify_functional_equation, Method};
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::default();

    println!("{:<14} {:>28} {:>8} {:>8} {:>10}", "character", "W", "gauss", "theta", "log2 diff");
    for n in [5u64, 7, 13, 101, 499, 997] {
        let chi = enumerate_characters(n, true)?.into_iter().last().expect("primitive character");
        let r = root_number_report(&chi, Method::Both, &ctx)?;
        let w = r.w_gauss.as_ref().expect("gauss value");
        println!(
            "{:<14} {:>+13.10}{:>+13.10}i {:>8} {:>8} {:>10.1}   (budget {})",
            r.label,
            w.real().to_f64(),
            w.imag().to_f64(),
            r.gauss_evaluations.unwrap_or(0),
            r.theta_terms.unwrap_or(0),
            r.log2_difference.unwrap_or(f64::NAN),
            theta_term_budget(n, ctx.bits())
        );
    }

    // theta_chi(-1/tau) = W (tau/i)^{1/2+eps} theta_chibar(tau)
    let chi = "13:1".parse()?;
    let w = thetalab::rootnumber::root_number_gauss(&chi, &ctx)?;
    let tau = Complex::with_val(ctx.work_bits(), (0.3, 0.8));
    let residual = verify_functional_equation(&chi, &tau, &w, &ctx)?;
    println!("\nfunctional equation for 13:1 at tau = 0.3 + 0.8i: residual 2^{:.1}", log2_abs(&residual));

    // a vanishing theta value makes the theta method unusable
    let vanishing = "300:1,1,8".parse()?;
    match root_number_report(&vanishing, Method::Theta, &ctx) {
        Err(e) => println!("300:1,1,8 by theta: {e}"),
        Ok(r) => println!("300:1,1,8 by theta: {:?}", r.w_theta),
    }
    Ok(())
}
