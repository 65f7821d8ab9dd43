//! Dirichlet characters: canonical generators, labels, values, conductors,
//! and the sets X(p, m) used by the Galois module.
//!
//! Run with `cargo run --example characters`.

use thetalab::characters::{canonical_generators, enumerate_characters, enumerate_x, evaluate, kronecker, DirichletCharacter};
use thetalab::PrecisionContext;

fn main() -> thetalab::Result<()> {
    let ctx = PrecisionContext::default();

    for n in [5u64, 12, 15, 16, 300] {
        let basis = canonical_generators(n);
        let gens: Vec<String> = basis
            .components
            .iter()
            .map(|c| format!("{} (order {}, mod {})", c.generator, c.order, c.prime_power))
            .collect();
        println!("N = {n:>3}: generators {}", gens.join(", "));
    }

    println!("\nprimitive characters mod 15:");
    for chi in enumerate_characters(15, true)? {
        let values: Vec<String> = (1..=4)
            .map(|k| {
                let v = evaluate(&chi, k, &ctx);
                format!("{:+.3}{:+.3}i", v.real().to_f64(), v.imag().to_f64())
            })
            .collect();
        println!(
            "  {:<8} order {} parity {:+} conductor {}  chi(1..4) = {}",
            chi.label(),
            chi.order(),
            chi.parity(),
            chi.conductor(),
            values.join(" ")
        );
    }

    let legendre: DirichletCharacter = "5:2".parse()?;
    let squares: Vec<i32> = (1..5).map(|a| kronecker(a, 5)).collect();
    println!("\n{legendre}: order {}, Kronecker (a/5) for a = 1..4: {squares:?}", legendre.order());

    println!("\nX(p, m), one character per conjugate pair:");
    for (p, m) in [(5u64, 2u64), (7, 3), (13, 4), (13, 12)] {
        let labels: Vec<String> = enumerate_x(p, m)?.iter().map(|c| c.label()).collect();
        println!("  X({p}, {m}) = {{{}}}", labels.join(", "));
    }
    Ok(())
}
