//! Vanishing survey of theta_chi(i) over all primitive characters with
//! conductor up to a bound (default 600), written to CSV.
//!
//! Run with `cargo run --release --example survey_scan -- [NMAX] [OUT.csv]`.

use std::path::PathBuf;

use thetalab::scanner::{emit, scan, OutputFormat, ScanConfig};

fn main() -> thetalab::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_max = args.next().map(|s| s.parse().expect("NMAX must be an integer")).unwrap_or(600);
    let out = args.next().map(PathBuf::from);

    let start = std::time::Instant::now();
    let (records, summary) = scan(&ScanConfig::with_n_max(n_max))?;
    println!("{summary}");
    println!("elapsed {:.2?}", start.elapsed());
    for v in &summary.vanishing {
        println!("  N = {} {} (log2 |theta(i)| = {:.1})", v.conductor, v.label, v.log2_abs_theta);
    }
    if let Some(path) = out {
        emit(&records, OutputFormat::Csv, &path)?;
        println!("wrote {} records to {}", records.len(), path.display());
    }
    Ok(())
}
