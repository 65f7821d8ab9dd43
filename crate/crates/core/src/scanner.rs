//! Survey of `theta_chi(i)` over all primitive characters up to a conductor
//! bound: a cheap pass at the base precision, confirmation of near-zeros at
//! the refine precision, and CSV/JSON emission.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::characters::{enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::modularforms::theta_chi;
use crate::numkernel::{abs, format_decimal, log2_abs, pow2, roots_of_unity_table, theta_truncation_bound, PrecisionContext};
use crate::rootnumber::theta_term_budget;

/// Significant digits written for `abs_theta`, `re_W`, `im_W`.
pub const CSV_DIGITS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Parse(format!("unknown output format {s:?} (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_max: u64,
    pub base_bits: u32,
    /// Candidates satisfy `|theta| < 2^(-vanish_exponent)`; `None` means `P/2`.
    pub vanish_exponent: Option<u32>,
    pub refine_bits: u32,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Keep one character per conjugate pair.
    pub collapse_conjugates: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { n_max: 600, base_bits: 96, vanish_exponent: None, refine_bits: 256, workers: None, collapse_conjugates: true }
    }
}

impl ScanConfig {
    pub fn with_n_max(n_max: u64) -> Self {
        Self { n_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        if self.refine_bits <= self.base_bits {
            return Err(Error::domain(format!(
                "refine precision {} must exceed base precision {}",
                self.refine_bits, self.base_bits
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::domain("worker count must be positive"));
        }
        Ok(())
    }

    fn threshold_exponent(&self, bits: u32) -> u32 {
        match self.vanish_exponent {
            Some(e) if bits == self.base_bits => e,
            _ => bits / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub conductor: u64,
    pub label: String,
    pub order: u64,
    pub parity: i8,
    /// `|theta_chi(i)|` as a decimal string.
    pub abs_theta: String,
    pub log2_abs_theta: f64,
    /// `W = theta_chi(i) / theta_chibar(i)` when `theta_chi(i)` is not
    /// numerically zero.
    pub re_w: Option<String>,
    pub im_w: Option<String>,
    pub vanish: bool,
    pub precision: u32,
    /// Summands evaluated for this record.
    pub terms: u64,
    /// Numeric failure for this record, if any.
    pub error: Option<String>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    #[serde(rename = "N")]
    conductor: u64,
    label: &'a str,
    m: u64,
    v: i8,
    abs_theta: &'a str,
    #[serde(rename = "re_W")]
    re_w: &'a str,
    #[serde(rename = "im_W")]
    im_w: &'a str,
    vanish: bool,
    precision: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingClass {
    pub conductor: u64,
    pub label: String,
    pub parity: i8,
    pub log2_abs_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub n_max: u64,
    pub records: usize,
    pub vanishing: Vec<VanishingClass>,
    /// Vanishing records per conductor.
    pub by_conductor: BTreeMap<u64, usize>,
    pub candidates: usize,
    pub errors: usize,
    pub total_terms: u64,
    /// `sum over records of theta_term_budget(N, P)`.
    pub term_budget: u64,
}

impl std::fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "scan N<={}: {} records, {} candidates, {} vanishing",
            self.n_max,
            self.records,
            self.candidates,
            self.vanishing.len()
        )?;
        for v in &self.vanishing {
            let kind = if v.parity == 1 { "even" } else { "odd" };
            write!(f, "; N={} {} {}", v.conductor, v.label, kind)?;
        }
        write!(f, "; terms {} (budget {})", self.total_terms, self.term_budget)
    }
}

/// Characters of one conductor that the scan visits.
fn scan_characters(n: u64, collapse: bool) -> Result<Vec<DirichletCharacter>> {
    let chars = enumerate_characters(n, true)?;
    if !collapse {
        return Ok(chars);
    }
    Ok(chars.into_iter().filter(|c| c.conj().exponents() >= c.exponents()).collect())
}

/// Shared per-conductor data: discrete logs and Gaussian weights
/// `n^eps exp(-pi n^2 / N)` for `n <= n_max`.
struct ConductorTables {
    logs: Vec<Option<Vec<u64>>>,
    weights: [Vec<Float>; 2],
    n_max: [u64; 2],
}

fn conductor_tables(n: u64, chars: &[DirichletCharacter], ctx: &PrecisionContext) -> Result<ConductorTables> {
    let prec = ctx.work_bits();
    let rate = std::f64::consts::PI / n as f64;
    let n_max = [theta_truncation_bound(n, 0, rate, ctx.bits())?, theta_truncation_bound(n, 1, rate, ctx.bits())?];
    let top = n_max[0].max(n_max[1]);
    let group = chars[0].group();
    let logs = (0..=top).map(|k| if k == 0 { None } else { group.log_vector(k as i64) }).collect();
    // q^{k^2} by the recurrence q^{(k+1)^2} = q^{k^2} q^{2k+1}
    let q = Float::with_val(prec, -(ctx.pi() / n));
    let q = q.exp();
    let q2 = Float::with_val(prec, q.square_ref());
    let mut step = q.clone();
    let mut cur = Float::with_val(prec, 1);
    let mut even = Vec::with_capacity(top as usize + 1);
    even.push(Float::with_val(prec, 0));
    for _ in 1..=top {
        cur *= &step;
        step *= &q2;
        even.push(cur.clone());
    }
    let odd = even.iter().enumerate().map(|(k, w)| Float::with_val(prec, w * k as u64)).collect();
    Ok(ConductorTables { logs, weights: [even, odd], n_max })
}

/// `theta_chi(i)` from the shared tables: real weights accumulated per value
/// class `chi(n) = e(k/m)`, combined once with the `m`-th roots of unity.
fn fast_theta(chi: &DirichletCharacter, tables: &ConductorTables, roots: &[Complex], prec: u32) -> (Complex, u64) {
    let eps = chi.eps() as usize;
    let m = chi.order() as usize;
    let mut classes = vec![Float::with_val(prec, 0); m];
    let n_max = tables.n_max[eps];
    for k in 1..=n_max as usize {
        if let Some(logs) = &tables.logs[k] {
            classes[chi.value_index(logs) as usize] += &tables.weights[eps][k];
        }
    }
    let mut sum = Complex::with_val(prec, 0);
    for (k, s) in classes.iter().enumerate() {
        if !s.is_zero() {
            sum += Complex::with_val(prec, &roots[k] * s);
        }
    }
    sum *= 2u32;
    if chi.modulus() == 1 {
        sum += 1u32;
    }
    (sum, n_max)
}

fn record_from_theta(chi: &DirichletCharacter, theta: &Complex, terms: u64, bits: u32, threshold_exp: u32, prec: u32) -> ScanRecord {
    let a = abs(theta);
    let vanish = a < pow2(-(threshold_exp as i32), prec);
    let (re_w, im_w) = if vanish {
        (None, None)
    } else {
        // theta_chibar(i) = conj(theta_chi(i))
        let w = Complex::with_val(prec, theta / Complex::with_val(prec, theta.conj_ref()));
        (Some(format_decimal(w.real(), CSV_DIGITS)), Some(format_decimal(w.imag(), CSV_DIGITS)))
    };
    ScanRecord {
        conductor: chi.modulus(),
        label: chi.label(),
        order: chi.order(),
        parity: chi.parity(),
        abs_theta: format_decimal(&a, CSV_DIGITS),
        log2_abs_theta: log2_abs(&a),
        re_w,
        im_w,
        vanish,
        precision: bits,
        terms,
        error: None,
    }
}

fn scan_conductor(n: u64, config: &ScanConfig, ctx: &PrecisionContext) -> Vec<ScanRecord> {
    let chars = match scan_characters(n, config.collapse_conjugates) {
        Ok(c) => c,
        Err(e) => return vec![error_record(n, "", &e, config.base_bits)],
    };
    if chars.is_empty() {
        return Vec::new();
    }
    let tables = match conductor_tables(n, &chars, ctx) {
        Ok(t) => t,
        Err(e) => return chars.iter().map(|c| error_record(n, &c.label(), &e, config.base_bits)).collect(),
    };
    let prec = ctx.work_bits();
    let mut root_cache: BTreeMap<u64, Vec<Complex>> = BTreeMap::new();
    let threshold = config.threshold_exponent(config.base_bits);
    chars
        .iter()
        .map(|chi| {
            let roots = root_cache.entry(chi.order()).or_insert_with(|| roots_of_unity_table(chi.order(), prec));
            let (theta, terms) = fast_theta(chi, &tables, roots, prec);
            let record = record_from_theta(chi, &theta, terms, config.base_bits, threshold, prec);
            if record.vanish {
                refine_character(chi, config.refine_bits, threshold_for(config, config.refine_bits), terms)
            } else {
                record
            }
        })
        .collect()
}

fn threshold_for(config: &ScanConfig, bits: u32) -> u32 {
    config.threshold_exponent(bits)
}

fn error_record(n: u64, label: &str, e: &Error, bits: u32) -> ScanRecord {
    ScanRecord {
        conductor: n,
        label: label.to_string(),
        order: 0,
        parity: 0,
        abs_theta: String::new(),
        log2_abs_theta: f64::NAN,
        re_w: None,
        im_w: None,
        vanish: false,
        precision: bits,
        terms: 0,
        error: Some(e.to_string()),
    }
}

fn refine_character(chi: &DirichletCharacter, bits: u32, threshold_exp: u32, prior_terms: u64) -> ScanRecord {
    let result = PrecisionContext::new(bits).and_then(|ctx| {
        let i = Complex::with_val(ctx.work_bits(), (0, 1));
        let theta = theta_chi(chi, &i, &ctx)?;
        let rate = std::f64::consts::PI / chi.modulus() as f64;
        let terms = theta_truncation_bound(chi.modulus(), chi.eps(), rate, bits)?;
        Ok(record_from_theta(chi, &theta, prior_terms + terms, bits, threshold_exp, ctx.work_bits()))
    });
    result.unwrap_or_else(|e| error_record(chi.modulus(), &chi.label(), &e, bits))
}

/// Re-evaluates a record at `bits` and updates the vanish flag against
/// `2^(-bits/2)`.
pub fn refine(record: &ScanRecord, bits: u32) -> Result<ScanRecord> {
    if bits <= record.precision {
        return Err(Error::domain(format!("refine precision {bits} must exceed {}", record.precision)));
    }
    let chi: DirichletCharacter = record.label.parse()?;
    let refined = refine_character(&chi, bits, bits / 2, record.terms);
    match &refined.error {
        Some(e) => Err(Error::domain(e.clone())),
        None => Ok(refined),
    }
}

/// Runs the survey; records are ordered by conductor, then character.
pub fn scan(config: &ScanConfig) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    config.validate()?;
    let ctx = PrecisionContext::new(config.base_bits)?;
    let run = || -> Vec<ScanRecord> {
        let per_conductor: Vec<Vec<ScanRecord>> =
            (1..=config.n_max).into_par_iter().map(|n| scan_conductor(n, config, &ctx)).collect();
        per_conductor.into_iter().flatten().collect()
    };
    let records = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let summary = summarize(config, &records);
    Ok((records, summary))
}

pub fn summarize(config: &ScanConfig, records: &[ScanRecord]) -> ScanSummary {
    let mut by_conductor = BTreeMap::new();
    let mut vanishing = Vec::new();
    for r in records.iter().filter(|r| r.vanish) {
        *by_conductor.entry(r.conductor).or_insert(0) += 1;
        vanishing.push(VanishingClass {
            conductor: r.conductor,
            label: r.label.clone(),
            parity: r.parity,
            log2_abs_theta: r.log2_abs_theta,
        });
    }
    ScanSummary {
        n_max: config.n_max,
        records: records.len(),
        candidates: records.iter().filter(|r| r.precision > config.base_bits).count(),
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        vanishing,
        by_conductor,
        total_terms: records.iter().map(|r| r.terms).sum(),
        term_budget: records.iter().map(|r| theta_term_budget(r.conductor, config.base_bits)).sum(),
    }
}

/// Writes records as CSV (columns `N,label,m,v,abs_theta,re_W,im_W,vanish,precision`).
pub fn write_csv(records: &[ScanRecord], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    if records.is_empty() {
        w.write_record(["N", "label", "m", "v", "abs_theta", "re_W", "im_W", "vanish", "precision"])
            .map_err(csv_error)?;
    }
    for r in records {
        w.serialize(CsvRow {
            conductor: r.conductor,
            label: &r.label,
            m: r.order,
            v: r.parity,
            abs_theta: &r.abs_theta,
            re_w: r.re_w.as_deref().unwrap_or(""),
            im_w: r.im_w.as_deref().unwrap_or(""),
            vanish: r.vanish,
            precision: r.precision,
        })
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::domain(format!("csv: {e}")))?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::domain(format!("csv: {e}"))
}

pub fn write_json(records: &[ScanRecord], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::domain(format!("json: {e}")))?;
    out.write_all(b"\n").map_err(|e| Error::domain(format!("json: {e}")))?;
    Ok(())
}

/// Writes the records to `path` in the given format.
pub fn emit(records: &[ScanRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let io = |source| Error::Io { path: PathBuf::from(path), source };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(records, &mut buf)?,
        OutputFormat::Json => write_json(records, &mut buf)?,
    }
    buf.flush().map_err(io)
}

/// Reads records back from JSON.
pub fn read_json(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: PathBuf::from(path), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
