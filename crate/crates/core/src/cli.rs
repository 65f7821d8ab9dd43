//! Command-line front end. `run` parses `argv`, writes all output to the
//! given writer and returns the process exit code:
//!
//! * `0` success
//! * `1` a verification residual exceeded its tolerance (or two methods disagree)
//! * `2` usage error (bad arguments, labels or parameters)
//! * `3` numeric or I/O failure (insufficient precision, vanishing theta, file errors)

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rug::Complex;
use serde::Serialize;

use crate::characters::{enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::galois::{class_number_formula, class_number_oracle, degree_bound, orbit, orbit_product, OrbitKind};
use crate::modularforms::{
    gauss_sum_suite, inversion_suite, level_suite_at, meyer_suite, quadratic_gauss_sum_closed, quadratic_gauss_sum_direct,
    theta_chi, transform_suite, SuiteReport,
};
use crate::numkernel::{distance, format_decimal, BigComplex, PrecisionContext, DEFAULT_RECOGNITION_BITS, DEFAULT_VERIFY_BITS};
use crate::recognize::{recognize_target, RecognitionTarget};
use crate::rootnumber::{functional_equation_suite, root_number_report, Method};
use crate::scanner::{emit, scan, write_csv, write_json, OutputFormat, ScanConfig};

/// Environment variable overriding the default precision.
pub const PREC_ENV: &str = "THETALAB_PREC";

#[derive(Parser, Debug)]
#[command(name = "thetalab", version, about = "Theta series of Dirichlet characters at CM points")]
pub struct Cli {
    /// Working precision in bits (at least 64; default 192, 512 for recognize)
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dirichlet characters
    Chars {
        #[command(subcommand)]
        action: CharsAction,
    },
    /// theta_chi(tau) for a character label such as 5:2
    Theta {
        label: String,
        /// tau as "re,im"
        #[arg(long, default_value = "0,1")]
        tau: String,
    },
    /// Root number W(chi)
    Rootnum {
        label: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Numerical verification suites
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Trials per modulus (defaults: funceq 5, transform/inversion 100, meyer 1000, level 20; bound d for gauss, 60)
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated moduli
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<u64>>,
        /// Level w for the level suite (default 24N/(12,N))
        #[arg(long)]
        level: Option<u64>,
    },
    /// Quadratic Gauss sum sum_{n=1}^{d} e(b n^2 / 2d)
    #[command(allow_negative_numbers = true)]
    GaussSum { b: i64, d: i64 },
    /// Galois orbit of values for X(p, m)
    Orbit {
        p: u64,
        m: u64,
        #[arg(long, default_value = "B2")]
        kind: String,
    },
    /// Orbit product N(p, m)
    Product {
        p: u64,
        m: u64,
        /// Use the principal character mod p when m = 1
        #[arg(long)]
        include_principal: bool,
    },
    /// Minimal polynomial and Q(j(ip)) representation of an orbit value
    Recognize {
        p: u64,
        m: u64,
        #[arg(long, default_value = "N")]
        target: String,
        #[arg(long)]
        maxdeg: Option<usize>,
        #[arg(long)]
        height: Option<u64>,
    },
    /// Vanishing survey of theta_chi(i)
    Scan {
        #[arg(long, default_value_t = 600)]
        nmax: u64,
        #[arg(long, default_value_t = 96)]
        base_bits: u32,
        #[arg(long, default_value_t = 256)]
        refine_bits: u32,
        /// Keep both members of each conjugate pair
        #[arg(long)]
        no_collapse: bool,
    },
    /// Class number of Z[ip]
    Classnum { p: u64 },
}

#[derive(Subcommand, Debug)]
pub enum CharsAction {
    /// List the characters mod N
    List {
        n: u64,
        #[arg(long)]
        primitive: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gauss,
    Theta,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Funceq,
    Transform,
    Inversion,
    Meyer,
    Level,
    Gauss,
}

/// JSON form of a listed character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CharacterInfo {
    pub label: String,
    pub modulus: u64,
    pub order: u64,
    pub parity: i8,
    pub conductor: u64,
    pub primitive: bool,
}

impl From<&DirichletCharacter> for CharacterInfo {
    fn from(c: &DirichletCharacter) -> Self {
        Self {
            label: c.label(),
            modulus: c.modulus(),
            order: c.order(),
            parity: c.parity(),
            conductor: c.conductor(),
            primitive: c.is_primitive(),
        }
    }
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct ThetaValue {
    pub label: String,
    #[serde(with = "crate::numkernel::serde_complex")]
    pub tau: BigComplex,
    #[serde(with = "crate::numkernel::serde_complex")]
    pub value: BigComplex,
    pub precision: u32,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct GaussSumReport {
    pub b: i64,
    pub d: i64,
    pub closed_form: crate::modularforms::ScaledRoot,
    #[serde(with = "crate::numkernel::serde_complex")]
    pub direct: BigComplex,
    pub log2_difference: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct ClassNumberReport {
    pub p: u64,
    pub discriminant: i64,
    pub formula: u64,
    pub reduced_forms: u64,
}

/// Outcome of a subcommand before rendering: text lines or a JSON value,
/// plus whether a verification failed.
struct Output {
    text: String,
    json: serde_json::Value,
    failed: bool,
}

impl Output {
    fn new(text: String, value: &impl Serialize, failed: bool) -> Result<Self> {
        let json = serde_json::to_value(value).map_err(|e| Error::domain(format!("json: {e}")))?;
        Ok(Self { text, json, failed })
    }
}

fn digits(ctx: &PrecisionContext) -> usize {
    ((ctx.bits() as f64) * std::f64::consts::LOG10_2).floor().clamp(15.0, 80.0) as usize
}

fn fmt_complex(z: &BigComplex, digits: usize) -> String {
    let im = z.imag();
    let sign = if im.is_sign_negative() { "-" } else { "+" };
    let im_abs = rug::Float::with_val(im.prec(), im.abs_ref());
    format!("{} {} {}i", format_decimal(z.real(), digits), sign, format_decimal(&im_abs, digits))
}

fn parse_tau(s: &str, ctx: &PrecisionContext) -> Result<BigComplex> {
    let (re, im) = s.split_once(',').ok_or_else(|| Error::Parse(format!("tau must be \"re,im\", got {s:?}")))?;
    let re = ctx.parse_real(re.trim())?;
    let im = ctx.parse_real(im.trim())?;
    if !(im > 0) {
        return Err(Error::domain(format!("tau must lie in the upper half-plane, got Im = {}", im.to_f64())));
    }
    Ok(Complex::with_val(ctx.work_bits(), (re, im)))
}

fn resolve_precision(cli: &Cli) -> Result<u32> {
    let default = match cli.command {
        Command::Recognize { .. } => DEFAULT_RECOGNITION_BITS,
        _ => DEFAULT_VERIFY_BITS,
    };
    let bits = match cli.prec {
        Some(b) => b,
        None => match std::env::var(PREC_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{PREC_ENV}={v:?} is not a bit count")))?,
            Err(_) => default,
        },
    };
    if bits < 64 {
        return Err(Error::domain(format!("precision must be at least 64 bits, got {bits}")));
    }
    Ok(bits)
}

fn suite_output(report: SuiteReport) -> Result<Output> {
    let text = format!(
        "{:<10} {:>6} cases  max residual 2^{:.1}  tolerance 2^{}  {}\n  worst: {}\n",
        report.name,
        report.cases,
        report.max_residual_log2,
        report.tolerance_log2,
        if report.passed { "PASS" } else { "FAIL" },
        report.worst_case
    );
    let failed = !report.passed;
    Output::new(text, &report, failed)
}

fn execute(cli: &Cli, ctx: &PrecisionContext) -> Result<Output> {
    let dg = digits(ctx);
    match &cli.command {
        Command::Chars { action: CharsAction::List { n, primitive } } => {
            let chars = enumerate_characters(*n, *primitive)?;
            let infos: Vec<CharacterInfo> = chars.iter().map(CharacterInfo::from).collect();
            let mut text = String::new();
            for c in &infos {
                text.push_str(&format!(
                    "{:<16} order {:<4} {} conductor {}{}\n",
                    c.label,
                    c.order,
                    if c.parity == 1 { "even" } else { "odd " },
                    c.conductor,
                    if c.primitive { " primitive" } else { "" }
                ));
            }
            Output::new(text, &infos, false)
        }
        Command::Theta { label, tau } => {
            let chi: DirichletCharacter = label.parse()?;
            let tau = parse_tau(tau, ctx)?;
            let value = theta_chi(&chi, &tau, ctx)?;
            let text = format!("theta_{label}({}) = {}\n", fmt_complex(&tau, 6), fmt_complex(&value, dg));
            Output::new(text, &ThetaValue { label: label.clone(), tau, value, precision: ctx.bits() }, false)
        }
        Command::Rootnum { label, method } => {
            let chi: DirichletCharacter = label.parse()?;
            let method = match method {
                MethodArg::Gauss => Method::Gauss,
                MethodArg::Theta => Method::Theta,
                MethodArg::Both => Method::Both,
            };
            let report = root_number_report(&chi, method, ctx)?;
            let mut text = String::new();
            if let Some(w) = &report.w_gauss {
                text.push_str(&format!("W_gauss = {}  ({} character evaluations)\n", fmt_complex(w, dg), report.gauss_evaluations.unwrap_or(0)));
            }
            if let Some(w) = &report.w_theta {
                text.push_str(&format!("W_theta = {}  ({} series terms)\n", fmt_complex(w, dg), report.theta_terms.unwrap_or(0)));
            }
            if let (Some(agree), Some(diff)) = (report.agree, report.log2_difference) {
                text.push_str(&format!("agreement: {} (|difference| = 2^{:.1})\n", if agree { "yes" } else { "NO" }, diff));
            }
            let failed = report.agree == Some(false);
            Output::new(text, &report, failed)
        }
        Command::Verify { suite, trials, n_list, level } => {
            let seed = cli.seed;
            let report = match suite {
                SuiteArg::Funceq => {
                    let moduli = n_list.clone().unwrap_or_else(|| (1..=50).collect());
                    functional_equation_suite(&moduli, trials.unwrap_or(5), seed, ctx)?
                }
                SuiteArg::Transform => {
                    transform_suite(&n_list.clone().unwrap_or_else(|| vec![3, 5, 9, 15]), trials.unwrap_or(100), seed, ctx)?
                }
                SuiteArg::Inversion => inversion_suite(trials.unwrap_or(100), seed, ctx)?,
                SuiteArg::Meyer => meyer_suite(trials.unwrap_or(1000), seed, ctx)?,
                SuiteArg::Level => {
                    level_suite_at(&n_list.clone().unwrap_or_else(|| vec![3, 5]), *level, trials.unwrap_or(20), seed, ctx)?
                }
                SuiteArg::Gauss => gauss_sum_suite(trials.map(|t| t as i64).unwrap_or(60), ctx)?,
            };
            suite_output(report)
        }
        Command::GaussSum { b, d } => {
            let closed = quadratic_gauss_sum_closed(*b, *d)?;
            let direct = quadratic_gauss_sum_direct(*b, *d, ctx)?;
            let diff = distance(&closed.value(ctx), &direct);
            let agree = diff < ctx.tolerance();
            let log2_difference = crate::numkernel::log2_abs(&diff);
            let text = format!(
                "closed form: sqrt({}) * e({}/{})\ndirect sum:  {}\nagreement: {} (|difference| = 2^{:.1})\n",
                closed.scale_squared,
                closed.root.numerator,
                closed.root.denominator,
                fmt_complex(&direct, dg),
                if agree { "yes" } else { "NO" },
                log2_difference
            );
            let report = GaussSumReport { b: *b, d: *d, closed_form: closed, direct, log2_difference, agree };
            Output::new(text, &report, !agree)
        }
        Command::Orbit { p, m, kind } => {
            let kind: OrbitKind = kind.parse()?;
            let report = orbit(*p, *m, kind, ctx)?;
            let mut text = format!(
                "orbit {:?} for X({p}, {m}): v = {}, n = {}, M = {}{}\n",
                kind,
                report.params.parity,
                report.params.power,
                report.params.level,
                if report.applicable { "" } else { "  [NotAnOrbit: side condition fails]" }
            );
            for mm in &report.members {
                text.push_str(&format!("  {:<14} {}\n", mm.label, fmt_complex(&mm.value, dg)));
            }
            for (k, e) in report.elementary_symmetric.iter().enumerate() {
                text.push_str(&format!("  e_{} = {}\n", k + 1, fmt_complex(e, dg)));
            }
            Output::new(text, &report, false)
        }
        Command::Product { p, m, include_principal } => {
            let prod = orbit_product(*p, *m, *include_principal, ctx)?;
            let text = format!(
                "N({p}, {m}) = {}{}\n  |X| = {}, N^2 in ring class field: {}, N in ring class field: {}\n",
                format_decimal(&prod.value, dg),
                if prod.vanishing { "  [vanishing member]" } else { "" },
                prod.members.len(),
                prod.square_in_ring_class_field,
                prod.value_in_ring_class_field
            );
            Output::new(text, &prod, false)
        }
        Command::Recognize { p, m, target, maxdeg, height } => {
            let target: RecognitionTarget = target.parse()?;
            let rec = recognize_target(*p, *m, target, *maxdeg, *height, ctx)?;
            let mut text = format!(
                "target {:?} of X({p}, {m}) = {}\n  degree bound {}, maxdeg {}, height {}\n",
                target,
                fmt_complex(&rec.value, dg.min(30)),
                degree_bound(*p, *m)?,
                rec.maxdeg,
                rec.height
            );
            match &rec.minimal_polynomial {
                Some(mp) => text.push_str(&format!(
                    "  minimal polynomial: {mp}  (degree {}, stable {})\n",
                    mp.degree, mp.relation.stable
                )),
                None => text.push_str("  minimal polynomial: none found\n"),
            }
            if target != RecognitionTarget::A {
                match &rec.jfield {
                    Some(j) => {
                        let terms: Vec<String> = j
                            .rationals()
                            .iter()
                            .enumerate()
                            .map(|(k, c)| format!("({c})*j({p}i)^{k}"))
                            .collect();
                        text.push_str(&format!("  in Q(j({p}i)): {}\n", terms.join(" + ")));
                    }
                    None => text.push_str(&format!("  in Q(j({p}i)): none found\n")),
                }
            }
            Output::new(text, &rec, false)
        }
        Command::Scan { .. } | Command::Classnum { .. } => unreachable!("handled separately"),
    }
}

fn classnum(p: u64) -> Result<Output> {
    let formula = class_number_formula(p)?;
    let d = -4 * (p as i64) * (p as i64);
    let forms = class_number_oracle(d)?;
    let text = format!("h({d}) = {formula} (formula), {forms} (reduced forms)\n");
    let failed = formula != forms;
    Output::new(text, &ClassNumberReport { p, discriminant: d, formula, reduced_forms: forms }, failed)
}

fn run_scan(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let Command::Scan { nmax, base_bits, refine_bits, no_collapse } = &cli.command else { unreachable!() };
    let config = ScanConfig {
        n_max: *nmax,
        base_bits: *base_bits,
        refine_bits: *refine_bits,
        workers: cli.workers,
        collapse_conjugates: !no_collapse,
        vanish_exponent: None,
    };
    let (records, summary) = scan(&config)?;
    let io = |source| Error::Io { path: PathBuf::from("<stdout>"), source };
    match (&cli.out, cli.format) {
        (Some(path), fmt) => {
            let format = match fmt {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Text => {
                    if path.extension().is_some_and(|e| e == "json") {
                        OutputFormat::Json
                    } else {
                        OutputFormat::Csv
                    }
                }
            };
            emit(&records, format, path)?;
            writeln!(out, "{summary}").map_err(io)?;
        }
        (None, Format::Csv) => write_csv(&records, &mut *out)?,
        (None, Format::Json) => write_json(&records, &mut *out)?,
        (None, Format::Text) => writeln!(out, "{summary}").map_err(io)?,
    }
    Ok(0)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientPrecision { .. } | Error::VanishingTheta { .. } | Error::Io { .. } => 3,
        Error::Domain(_) | Error::Parse(_) => 2,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let bits = resolve_precision(cli)?;
    let ctx = PrecisionContext::new(bits)?;
    if matches!(cli.command, Command::Scan { .. }) {
        return run_scan(cli, out);
    }
    let output = match &cli.command {
        Command::Classnum { p } => classnum(*p)?,
        _ => execute(cli, &ctx)?,
    };
    let rendered = match cli.format {
        Format::Json | Format::Csv => {
            let mut s = serde_json::to_string_pretty(&output.json).map_err(|e| Error::domain(format!("json: {e}")))?;
            s.push('\n');
            s
        }
        Format::Text => output.text,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered).map_err(|source| Error::Io { path: path.clone(), source })?,
        None => out
            .write_all(rendered.as_bytes())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })?,
    }
    Ok(if output.failed { 1 } else { 0 })
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(0) => Err(Error::domain("worker count must be positive")),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(f)),
        None => Ok(f()),
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let result = with_workers(cli.workers, || dispatch(&cli, out)).and_then(|r| r);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code(&e)
        }
    }
}
