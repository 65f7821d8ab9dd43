//! The W_{M,iN} action on characters, Galois orbits of A- and B-values,
//! determinant classes, class numbers, degree bounds, orbit products and
//! orbit polynomials.
//!
//! Run with `cargo run --release --example galois_orbits`.

use rand::SeedableRng;
use thetalab::galois::{
    act_on_b, class_number_formula, class_number_oracle, degree_bound, determinant_classes, orbit, orbit_closure,
    orbit_polynomial, orbit_product, units_mod, OrbitKind, OrderParams, WElement,
};
use thetalab::numkernel::format_decimal;
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::default();

    let params = OrderParams::for_x(13, 4)?;
    println!("X(13, 4): v = {}, M = {}, n = {}, w = {}", params.parity, params.level, params.power, params.invariance_level);
    let chi = "13:3".parse()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let mu = WElement::random(&params, &mut rng);
        let (sign, image) = act_on_b(&mu, &chi)?;
        println!("  mu = {:?}, det {} : B_13:3 -> {sign:+} B_{image}", mu.matrix(), mu.det());
    }

    println!("\ndeterminant classes (all of (Z/mZ)*):");
    for (p, m) in [(5u64, 2u64), (13, 4), (37, 12), (73, 24)] {
        println!("  p = {p:<3} m = {m:<3} {:?} = units {:?}", determinant_classes(p, m), units_mod(m) == determinant_classes(p, m));
    }

    println!("\nclass numbers and degree bounds:");
    for p in [3u64, 5, 7, 13, 29] {
        let h = class_number_formula(p)?;
        let d = -4 * (p * p) as i64;
        println!("  p = {p:<3} h = {h:<3} reduced forms {:<3} degree bound (m = 2): {}", class_number_oracle(d)?, degree_bound(p, 2)?);
    }

    println!("\norbits of X(13, 4):");
    for kind in OrbitKind::ALL {
        let report = orbit(13, 4, kind, &ctx)?;
        let closure = orbit_closure(13, 4, kind, 100, 1)?;
        println!(
            "  {:<4?} applicable {:<5} closed {:<5} signs trivial {:<5} e_1 = {}",
            kind,
            report.applicable,
            closure.closed,
            closure.signs_trivial,
            format_decimal(report.elementary_symmetric[0].real(), 20)
        );
    }

    println!("\norbit products:");
    for (p, m) in [(3u64, 2u64), (5, 2), (7, 2), (13, 2), (13, 3), (13, 4)] {
        let prod = orbit_product(p, m, false, &ctx)?;
        println!(
            "  N({p}, {m}) = {:<32} N in ring class field: {}",
            format_decimal(&prod.value, 25),
            prod.value_in_ring_class_field
        );
    }

    let poly = orbit_polynomial(15, 4, &ctx)?;
    println!("\nprod (X - B^2) over X(15, 4): {} coefficients, square-free variant justified: {}", poly.coefficients.len(), poly.squarefree_justified);
    for (k, c) in poly.coefficients.iter().enumerate() {
        println!("  X^{k}: {} {:+.2e}i", format_decimal(c.real(), 25), c.imag().to_f64());
    }
    Ok(())
}
