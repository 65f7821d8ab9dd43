//! Integer relations, minimal polynomials and the representation of orbit
//! products over Q(j(ip)), each with a doubled-precision stability check,
//! plus a perturbed negative control.
//!
//! Run with `cargo run --release --example recognition`.

use rug::{Complex, Float};
use thetalab::recognize::{
    empirical_exponent, integer_relation, orbit_product_source, perturbed, recognize_in_jfield, recognize_target,
    RecognitionTarget, RelationOutcome,
};
use thetalab::numkernel::format_decimal;
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::new(512)?;

    let golden = |c: &PrecisionContext| {
        let prec = c.work_bits();
        let phi = (Float::with_val(prec, 5).sqrt() + 1u32) / 2u32;
        let phi2 = Float::with_val(prec, phi.square_ref());
        Ok(vec![Complex::with_val(prec, 1), Complex::with_val(prec, phi), Complex::with_val(prec, phi2)])
    };
    match integer_relation(&golden, 1000, &ctx)? {
        RelationOutcome::Found(r) => println!("(1, phi, phi^2): relation {:?}, stable {}", r.coefficients, r.stable),
        RelationOutcome::None { height_lower_bound_log2 } => println!("no relation, height >= 2^{height_lower_bound_log2:.1}"),
    }

    for (p, m, target) in [(3u64, 2u64, RecognitionTarget::N), (5, 2, RecognitionTarget::N), (7, 2, RecognitionTarget::N)] {
        let rec = recognize_target(p, m, target, None, None, &ctx)?;
        let poly = rec.minimal_polynomial.as_ref().map(|mp| mp.to_string()).unwrap_or_else(|| "none".into());
        println!("N({p}, {m}) = {}: minimal polynomial {poly}", format_decimal(rec.value.real(), 25));
    }

    let n52 = orbit_product_source(5, 2);
    if let Some(rep) = recognize_in_jfield(&n52, 5, 1 << 42, &ctx)? {
        let coeffs: Vec<String> = rep.rationals().iter().map(|r| r.to_string()).collect();
        println!("N(5, 2) = {} + {} j(5i)   (stable {})", coeffs[0], coeffs[1], rep.relation.stable);
    }
    let noisy = perturbed(&n52, 128);
    println!("perturbed by 2^-128: {:?}", recognize_in_jfield(&noisy, 5, 1 << 42, &ctx)?.map(|r| r.numerators));

    let n32_sq = |c: &PrecisionContext| Ok(orbit_product_source(3, 2)(c)?.square());
    if let Some(rep) = recognize_in_jfield(&n32_sq, 3, 1 << 42, &ctx)? {
        println!("N(3, 2)^2 = {:?} / {} in the basis 1, j(3i)", rep.numerators, rep.denominator);
    }

    for p in [3u64, 5] {
        println!("smallest d with N({p}, 2)^d recognized in Q(j({p}i)): {:?}", empirical_exponent(p, 2, &ctx)?);
    }
    Ok(())
}
