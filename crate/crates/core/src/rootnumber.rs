//! Gauss sums and the two root-number computations.
//!
//! `W(chi) = G(chi) / (i^eps sqrt(N))` is computed from the `N`-term Gauss
//! sum, and independently as the theta quotient `theta_chi(i) / theta_chibar(i)`
//! from `O(sqrt(N P))` series terms. With this normalization the functional
//! equation reads
//! `theta_chi(-1/tau) = W(chi) (tau/i)^{1/2+eps} theta_chibar(tau)`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::characters::{enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::modularforms::{random_tau, theta_chi, theta_chi_counted, SuiteReport};
use crate::numkernel::{
    abs, distance, log2_abs, pow2, principal_power, root_of_unity_prec, serde_complex, serde_complex_opt,
    BigComplex, PrecisionContext,
};

/// Which root-number computation to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gauss,
    Theta,
    Both,
}

/// Both root numbers of a character, with the cost of each method.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootNumberReport {
    pub label: String,
    #[serde(with = "serde_complex_opt")]
    pub gauss_sum: Option<BigComplex>,
    #[serde(with = "serde_complex_opt")]
    pub w_gauss: Option<BigComplex>,
    #[serde(with = "serde_complex_opt")]
    pub w_theta: Option<BigComplex>,
    /// `log2 |theta_chi(i)|`, when the theta method ran.
    pub log2_abs_theta: Option<f64>,
    pub gauss_evaluations: Option<u64>,
    pub theta_terms: Option<u64>,
    /// `log2 |W_gauss - W_theta|` when both are present.
    pub log2_difference: Option<f64>,
    pub agree: Option<bool>,
    pub precision: u32,
}

/// `G(chi) = sum_{n mod N} chi(n) e(n/N)` with the number of character
/// evaluations performed (always `N`).
pub fn gauss_sum_counted(chi: &DirichletCharacter, ctx: &PrecisionContext) -> (BigComplex, u64) {
    let n = chi.modulus();
    let m = chi.order();
    let prec = ctx.work_bits();
    let mut out = ctx.zero();
    let l = crate::characters::lcm(m, n);
    let mut evaluations = 0u64;
    for k in 0..n {
        evaluations += 1;
        if let Some(v) = chi.log_value(k as i64) {
            // chi(k) e(k/N) = e(v/m + k/N)
            let e = v as i64 * (l / m) as i64 + k as i64 * (l / n) as i64;
            out += root_of_unity_prec(e, l, prec);
        }
    }
    (out, evaluations)
}

/// The Gauss sum `G(chi)`.
pub fn gauss_sum(chi: &DirichletCharacter, ctx: &PrecisionContext) -> BigComplex {
    gauss_sum_counted(chi, ctx).0
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() {
        return Err(Error::domain(format!("{chi} is not primitive (conductor {})", chi.conductor())));
    }
    Ok(())
}

/// `W(chi) = G(chi) / (i^eps sqrt(N))`.
pub fn root_number_gauss(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<BigComplex> {
    require_primitive(chi)?;
    Ok(normalize_gauss(&gauss_sum(chi, ctx), chi, ctx))
}

fn normalize_gauss(g: &BigComplex, chi: &DirichletCharacter, ctx: &PrecisionContext) -> BigComplex {
    let prec = ctx.work_bits();
    let sqrt_n = Float::with_val(prec, chi.modulus()).sqrt();
    let mut w = Complex::with_val(prec, g / sqrt_n);
    if chi.eps() == 1 {
        // divide by i
        w *= Complex::with_val(prec, (0, -1));
    }
    w
}

/// Result of the theta-quotient method.
#[derive(Clone, Debug)]
pub struct ThetaRootNumber {
    pub value: BigComplex,
    pub theta: BigComplex,
    /// Summands evaluated over both theta series.
    pub terms: u64,
}

/// `W(chi) = theta_chi(i) / theta_chibar(i)`, both series summed
/// independently.
///
/// Fails with [`Error::VanishingTheta`] when `|theta_chi(i)| < 2^(-P/2)` at
/// precision `P` and again at `2P`.
pub fn root_number_theta(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<ThetaRootNumber> {
    require_primitive(chi)?;
    let prec = ctx.work_bits();
    let i = Complex::with_val(prec, (0, 1));
    let (theta, t1) = theta_chi_counted(chi, &i, prec)?;
    let threshold = pow2(-(ctx.bits() as i32) / 2, prec);
    if abs(&theta) < threshold {
        let hi = ctx.doubled();
        let i_hi = Complex::with_val(hi.work_bits(), (0, 1));
        let (recheck, _) = theta_chi_counted(chi, &i_hi, hi.work_bits())?;
        let a = abs(&recheck);
        if a < threshold {
            return Err(Error::VanishingTheta { label: chi.label(), log2_abs: log2_abs(&a) });
        }
    }
    let (theta_bar, t2) = theta_chi_counted(&chi.conj(), &i, prec)?;
    let value = Complex::with_val(prec, &theta / &theta_bar);
    Ok(ThetaRootNumber { value, theta, terms: t1 + t2 })
}

/// Term budget of the theta method at `P` bits: `4 ceil(sqrt(N P ln2 / pi)) + 16`.
pub fn theta_term_budget(n: u64, bits: u32) -> u64 {
    let x = n as f64 * bits as f64 * std::f64::consts::LN_2 / std::f64::consts::PI;
    4 * x.sqrt().ceil() as u64 + 16
}

/// Runs the requested methods and compares them.
pub fn root_number_report(chi: &DirichletCharacter, method: Method, ctx: &PrecisionContext) -> Result<RootNumberReport> {
    require_primitive(chi)?;
    let mut report = RootNumberReport {
        label: chi.label(),
        gauss_sum: None,
        w_gauss: None,
        w_theta: None,
        log2_abs_theta: None,
        gauss_evaluations: None,
        theta_terms: None,
        log2_difference: None,
        agree: None,
        precision: ctx.bits(),
    };
    if matches!(method, Method::Gauss | Method::Both) {
        let (g, count) = gauss_sum_counted(chi, ctx);
        report.w_gauss = Some(normalize_gauss(&g, chi, ctx));
        report.gauss_sum = Some(g);
        report.gauss_evaluations = Some(count);
    }
    if matches!(method, Method::Theta | Method::Both) {
        let t = root_number_theta(chi, ctx)?;
        report.log2_abs_theta = Some(log2_abs(&abs(&t.theta)));
        report.theta_terms = Some(t.terms);
        report.w_theta = Some(t.value);
    }
    if let (Some(a), Some(b)) = (&report.w_gauss, &report.w_theta) {
        let diff = distance(a, b);
        report.log2_difference = Some(log2_abs(&diff));
        report.agree = Some(diff < ctx.tolerance());
    }
    Ok(report)
}

/// Residual of `theta_chi(-1/tau) - W (tau/i)^{1/2+eps} theta_chibar(tau)`.
pub fn verify_functional_equation(
    chi: &DirichletCharacter,
    tau: &BigComplex,
    w: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    functional_equation_residual(chi, &chi.conj(), tau, w, ctx)
}

/// Residual with the roles of `chi` and `chibar` exchanged:
/// `theta_chibar(-1/tau) - W (tau/i)^{1/2+eps} theta_chi(tau)`.
///
/// This form agrees with [`verify_functional_equation`] for real characters
/// only; it is kept to document that difference.
pub fn functional_equation_residual_swapped(
    chi: &DirichletCharacter,
    tau: &BigComplex,
    w: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    functional_equation_residual(&chi.conj(), chi, tau, w, ctx)
}

fn functional_equation_residual(
    left: &DirichletCharacter,
    right: &DirichletCharacter,
    tau: &BigComplex,
    w: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let prec = ctx.work_bits();
    let inv = Complex::with_val(prec, -tau.clone().recip());
    let lhs = theta_chi(left, &inv, ctx)?;
    let tau_over_i = Complex::with_val(prec, tau * Complex::with_val(prec, (0, -1)));
    let factor = principal_power(&tau_over_i, 1 + 2 * left.eps() as i64, 2)?;
    let rhs = Complex::with_val(prec, w * factor) * theta_chi(right, tau, ctx)?;
    Ok(distance(&lhs, &rhs))
}

/// Functional equation for every primitive character with modulus in
/// `moduli`, `trials` seeded random `tau` each, `W` from the Gauss sum.
pub fn functional_equation_suite(
    moduli: &[u64],
    trials: usize,
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for &n in moduli {
        for chi in enumerate_characters(n, true)? {
            for _ in 0..trials {
                let tau = random_tau(&mut rng, ctx);
                cases.push((chi.clone(), tau));
            }
        }
    }
    let residuals = cases
        .into_par_iter()
        .map(|(chi, tau)| {
            let w = root_number_gauss(&chi, ctx)?;
            let r = verify_functional_equation(&chi, &tau, &w, ctx)?;
            Ok((format!("{chi} tau={:.6}", tau), r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::from_residuals("funceq", ctx, residuals))
}

/// Outcome of comparing the two methods on one character.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossCheck {
    pub label: String,
    pub vanishing: bool,
    #[serde(with = "serde_complex")]
    pub w_gauss: BigComplex,
    #[serde(with = "serde_complex_opt")]
    pub w_theta: Option<BigComplex>,
    pub log2_difference: Option<f64>,
    pub log2_unit_defect: f64,
}

/// Both methods on every primitive character with modulus `1..=n_max`.
/// Characters whose theta value vanishes are reported, not compared.
pub fn cross_check(n_max: u64, ctx: &PrecisionContext) -> Result<Vec<CrossCheck>> {
    let chars: Vec<DirichletCharacter> = (1..=n_max)
        .map(|n| enumerate_characters(n, true))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    chars
        .into_par_iter()
        .map(|chi| {
            let w_gauss = root_number_gauss(&chi, ctx)?;
            let unit = Float::with_val(ctx.work_bits(), abs(&w_gauss) - 1u32);
            let log2_unit_defect = log2_abs(&unit);
            match root_number_theta(&chi, ctx) {
                Ok(t) => {
                    let d = distance(&w_gauss, &t.value);
                    Ok(CrossCheck {
                        label: chi.label(),
                        vanishing: false,
                        w_gauss,
                        log2_difference: Some(log2_abs(&d)),
                        w_theta: Some(t.value),
                        log2_unit_defect,
                    })
                }
                Err(Error::VanishingTheta { .. }) => Ok(CrossCheck {
                    label: chi.label(),
                    vanishing: true,
                    w_gauss,
                    w_theta: None,
                    log2_difference: None,
                    log2_unit_defect,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
