//! Integer-relation detection by lattice reduction, minimal polynomials,
//! and recognition of orbit products in `Q(j(ip))`.
//!
//! Every positive answer carries a stability certificate: the same relation
//! is found again after recomputing the inputs at doubled precision.

use rug::ops::{DivRounding, Pow};
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{class_number_formula, degree_bound, orbit_product};
use crate::modularforms::j_invariant;
use crate::numkernel::{abs, log2_abs, pow2, serde_real, BigComplex, PrecisionContext};

/// Lovász constant `delta = 99/100` as a fraction.
const DELTA_NUM: u32 = 99;
const DELTA_DEN: u32 = 100;

/// Largest accepted height bound; coefficients are stored as `i64`.
pub const MAX_HEIGHT: u64 = 1 << 62;

/// Source of a value that can be recomputed at any precision.
pub type ValueSource<'a> = dyn Fn(&PrecisionContext) -> Result<Vec<BigComplex>> + Sync + 'a;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Output of the integral LLL reduction.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub rows: Vec<Vec<Integer>>,
    /// `d_0 = 1, d_i = prod_{j<=i} |b_j^*|^2`.
    pub gram_dets: Vec<Integer>,
}

impl ReducedBasis {
    /// `log2 min_i |b_i^*|`, a lower bound for the length of every nonzero
    /// lattice vector.
    pub fn log2_min_gso_norm(&self) -> f64 {
        (1..self.gram_dets.len())
            .map(|i| {
                let q = Float::with_val(64, &self.gram_dets[i]) / Float::with_val(64, &self.gram_dets[i - 1]);
                q.log2().to_f64() / 2.0
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// LLL reduction (`delta = 0.99`) of linearly independent integer rows,
/// using exact integer arithmetic throughout.
pub fn lattice_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>> {
    Ok(lattice_reduce_full(basis)?.rows)
}

/// [`lattice_reduce`] also returning the Gram determinants.
pub fn lattice_reduce_full(basis: &[Vec<Integer>]) -> Result<ReducedBasis> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::domain("empty basis"));
    }
    let dim = basis[0].len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(Error::domain("basis rows have different lengths"));
    }
    // 1-based indices as in the textbook formulation; slot 0 unused
    let mut b: Vec<Vec<Integer>> = std::iter::once(Vec::new()).chain(basis.iter().cloned()).collect();
    let mut d: Vec<Integer> = vec![Integer::new(); n + 1];
    let mut lambda: Vec<Vec<Integer>> = vec![vec![Integer::new(); n + 1]; n + 1];
    d[0] = Integer::from(1);
    d[1] = dot(&b[1], &b[1]);
    if d[1] == 0 {
        return Err(Error::domain("basis is rank deficient"));
    }
    let mut k = 2;
    let mut kmax = 1;

    fn red(k: usize, l: usize, b: &mut [Vec<Integer>], d: &[Integer], lambda: &mut [Vec<Integer>]) {
        let twice = Integer::from(&lambda[k][l] * 2u32);
        if Integer::from(twice.abs_ref()) <= d[l] {
            return;
        }
        // q = nearest integer to lambda / d
        let q = (Integer::from(&lambda[k][l] * 2u32) + &d[l]).div_floor(Integer::from(&d[l] * 2u32));
        let bl = b[l].clone();
        for (x, y) in b[k].iter_mut().zip(&bl) {
            *x -= Integer::from(&q * y);
        }
        lambda[k][l] -= Integer::from(&q * &d[l]);
        for i in 1..l {
            let t = Integer::from(&q * &lambda[l][i]);
            lambda[k][i] -= t;
        }
    }

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 1..j {
                    u = (Integer::from(&d[i] * &u) - Integer::from(&lambda[k][i] * &lambda[j][i])) / &d[i - 1];
                }
                if j < k {
                    lambda[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::domain("basis is rank deficient"));
                    }
                    d[k] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut b, &d, &mut lambda);
            // Lovász: swap if d_k d_{k-2} < delta d_{k-1}^2 - lambda^2
            let lhs = Integer::from(&d[k] * &d[k - 2]) * DELTA_DEN;
            let rhs = Integer::from(d[k - 1].square_ref()) * DELTA_NUM
                - Integer::from(lambda[k][k - 1].square_ref()) * DELTA_DEN;
            if lhs < rhs {
                b.swap(k, k - 1);
                for j in 1..k - 1 {
                    let t = std::mem::take(&mut lambda[k][j]);
                    lambda[k][j] = std::mem::replace(&mut lambda[k - 1][j], t);
                }
                let lam = lambda[k][k - 1].clone();
                let big_b = (Integer::from(&d[k - 2] * &d[k]) + Integer::from(lam.square_ref())) / &d[k - 1];
                for i in k + 1..=kmax {
                    let t = lambda[i][k].clone();
                    lambda[i][k] = (Integer::from(&d[k] * &lambda[i][k - 1]) - Integer::from(&lam * &t)) / &d[k - 1];
                    lambda[i][k - 1] = (Integer::from(&big_b * &t) + Integer::from(&lam * &lambda[i][k])) / &d[k];
                }
                d[k - 1] = big_b;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    red(k, l, &mut b, &d, &mut lambda);
                }
                k += 1;
                break;
            }
        }
    }
    b.remove(0);
    Ok(ReducedBasis { rows: b, gram_dets: d })
}

/// A detected integer relation `sum c_k x_k ~ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognizedRelation {
    /// Description of each input, aligned with `coefficients`.
    pub basis: Vec<String>,
    pub coefficients: Vec<i64>,
    /// `|sum c_k x_k|` at the working precision.
    #[serde(with = "serde_real")]
    pub residual: Float,
    pub height: u64,
    pub precision: u32,
    /// The same coefficients were found again at doubled precision.
    pub stable: bool,
}

/// Outcome of a relation search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RelationOutcome {
    Found(RecognizedRelation),
    /// No relation within the height bound; every exact relation has height
    /// at least `2^height_lower_bound_log2`.
    None { height_lower_bound_log2: f64 },
}

impl RelationOutcome {
    pub fn relation(&self) -> Option<&RecognizedRelation> {
        match self {
            RelationOutcome::Found(r) => Some(r),
            RelationOutcome::None { .. } => None,
        }
    }
}

fn check_precision(height: u64, len: usize, ctx: &PrecisionContext) -> Result<()> {
    if height < 2 || height > MAX_HEIGHT {
        return Err(Error::domain(format!("height bound {height} outside [2, 2^62]")));
    }
    let needed = (4.0 * (height as f64).log2() * len as f64).ceil() as u32;
    if ctx.bits() < needed {
        return Err(Error::InsufficientPrecision { needed, have: ctx.bits() });
    }
    Ok(())
}

fn normalize_sign(c: &mut [i64], pivot: Option<usize>) {
    let idx = pivot.or_else(|| c.iter().position(|&x| x != 0));
    if let Some(i) = idx {
        if c[i] < 0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn content(c: &[i64]) -> i64 {
    c.iter().fold(0i64, |g, &x| crate::characters::gcd_i64(g, x) as i64)
}

/// One relation search at a fixed precision; `pivot` selects the coordinate
/// that must be nonzero (and is made positive).
fn search(values: &[BigComplex], height: u64, pivot: Option<usize>, ctx: &PrecisionContext) -> Result<(Option<(Vec<i64>, Float)>, f64)> {
    let n = values.len();
    let prec = ctx.work_bits();
    let max_abs = values.iter().map(abs).fold(Float::with_val(prec, 0), |a, b| a.max(&b));
    if max_abs == 0 || !max_abs.is_finite() {
        return Err(Error::domain("relation inputs must be finite and not all zero"));
    }
    // scale so that the largest input maps to about 2^(P - 2g)
    let e = max_abs.get_exp().unwrap_or(0);
    let shift = ctx.bits() as i32 - 2 * ctx.guard() as i32 - e;
    let rows: Vec<Vec<Integer>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row: Vec<Integer> = (0..n).map(|j| Integer::from((i == j) as u32)).collect();
            let re = Float::with_val(prec, v.real() * pow2(shift, prec));
            let im = Float::with_val(prec, v.imag() * pow2(shift, prec));
            row.push(re.to_integer().unwrap_or_default());
            row.push(im.to_integer().unwrap_or_default());
            row
        })
        .collect();
    let reduced = lattice_reduce_full(&rows)?;
    // an exact relation c maps to a lattice vector of length <= |c|_inf sqrt(n + n^2/2)
    let inflation = ((n as f64) + (n * n) as f64 / 2.0).sqrt().log2();
    let lower_bound = reduced.log2_min_gso_norm() - inflation;
    let tolerance = Float::with_val(prec, &max_abs * pow2(-(ctx.bits() as i32) / 2, prec));
    for row in &reduced.rows {
        let coeffs: Option<Vec<i64>> = row[..n].iter().map(|x| x.to_i64()).collect();
        let Some(mut c) = coeffs else { continue };
        if c.iter().all(|&x| x == 0) || c.iter().any(|x| x.unsigned_abs() > height) {
            continue;
        }
        if let Some(p) = pivot {
            if c[p] == 0 {
                continue;
            }
        }
        let g = content(&c);
        c.iter_mut().for_each(|x| *x /= g);
        normalize_sign(&mut c, pivot);
        let residual = relation_residual(values, &c, prec);
        if residual < tolerance {
            return Ok((Some((c, residual)), lower_bound));
        }
    }
    Ok((None, lower_bound))
}

fn relation_residual(values: &[BigComplex], c: &[i64], prec: u32) -> Float {
    let mut acc = Complex::new(prec);
    for (v, &k) in values.iter().zip(c) {
        acc += Complex::with_val(prec, v * k);
    }
    abs(&acc)
}

fn certified(
    source: &ValueSource,
    basis: Vec<String>,
    height: u64,
    pivot: Option<usize>,
    ctx: &PrecisionContext,
) -> Result<RelationOutcome> {
    let values = source(ctx)?;
    if values.len() < 2 {
        return Err(Error::domain("need at least two values"));
    }
    let (found, lower_bound) = search(&values, height, pivot, ctx)?;
    let Some((coefficients, residual)) = found else {
        return Ok(RelationOutcome::None { height_lower_bound_log2: lower_bound });
    };
    let hi = ctx.doubled();
    let hi_values = source(&hi)?;
    let (hi_found, _) = search(&hi_values, height, pivot, &hi)?;
    let stable = hi_found.as_ref().map(|(c, _)| c == &coefficients).unwrap_or(false);
    // the relation must also hold to the doubled tolerance
    let hi_residual = relation_residual(&hi_values, &coefficients, hi.work_bits());
    let hi_max = hi_values.iter().map(abs).fold(Float::with_val(hi.work_bits(), 0), |a, b| a.max(&b));
    let holds = hi_residual < hi_max * pow2(-(hi.bits() as i32) / 2, hi.work_bits());
    if !holds {
        return Ok(RelationOutcome::None { height_lower_bound_log2: lower_bound });
    }
    let h = coefficients.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    Ok(RelationOutcome::Found(RecognizedRelation {
        basis,
        coefficients,
        residual,
        height: h,
        precision: ctx.bits(),
        stable,
    }))
}

/// Integer relation among recomputable values, with a doubled-precision
/// stability check. Requires `P >= 4 log2(H) len`.
pub fn integer_relation(source: &ValueSource, height: u64, ctx: &PrecisionContext) -> Result<RelationOutcome> {
    let n = source(ctx)?.len();
    check_precision(height, n, ctx)?;
    let basis = (0..n).map(|i| format!("x{i}")).collect();
    certified(source, basis, height, None, ctx)
}

/// Relation among fixed values without recomputation (the stability flag is
/// never set).
pub fn integer_relation_fixed(values: &[Float], height: u64, ctx: &PrecisionContext) -> Result<RelationOutcome> {
    if values.len() < 2 {
        return Err(Error::domain("need at least two values"));
    }
    check_precision(height, values.len(), ctx)?;
    let prec = ctx.work_bits();
    let vals: Vec<BigComplex> = values.iter().map(|x| Complex::with_val(prec, (x, 0))).collect();
    let (found, lower_bound) = search(&vals, height, None, ctx)?;
    Ok(match found {
        Some((coefficients, residual)) => RelationOutcome::Found(RecognizedRelation {
            basis: (0..values.len()).map(|i| format!("x{i}")).collect(),
            height: coefficients.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0),
            coefficients,
            residual,
            precision: ctx.bits(),
            stable: false,
        }),
        None => RelationOutcome::None { height_lower_bound_log2: lower_bound },
    })
}

/// Integer polynomial, constant term first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalPolynomial {
    pub coefficients: Vec<i64>,
    pub degree: usize,
    pub relation: RecognizedRelation,
}

impl std::fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_polynomial(&self.coefficients))
    }
}

/// `5*X^2 + 40*X - 64` style rendering, constant term first on input.
pub fn format_polynomial(c: &[i64]) -> String {
    let mut out = String::new();
    for (k, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = if a < 0 { "-" } else { "+" };
        if out.is_empty() {
            if a < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let m = a.unsigned_abs();
        match k {
            0 => out.push_str(&m.to_string()),
            _ => {
                if m != 1 {
                    out.push_str(&format!("{m}*"));
                }
                out.push('X');
                if k > 1 {
                    out.push_str(&format!("^{k}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Smallest-degree integer polynomial of height `<= H` vanishing at `x`,
/// trying degrees `1..=maxdeg` in order. Requires `P >= 4 log2(H)(maxdeg+1)`.
pub fn recognize_minpoly(
    x: &(dyn Fn(&PrecisionContext) -> Result<BigComplex> + Sync),
    maxdeg: usize,
    height: u64,
    ctx: &PrecisionContext,
) -> Result<Option<MinimalPolynomial>> {
    if maxdeg == 0 {
        return Err(Error::domain("maxdeg must be at least 1"));
    }
    check_precision(height, maxdeg + 1, ctx)?;
    for deg in 1..=maxdeg {
        let powers = |c: &PrecisionContext| -> Result<Vec<BigComplex>> {
            let v = x(c)?;
            let mut out = Vec::with_capacity(deg + 1);
            let mut acc = Complex::with_val(c.work_bits(), 1);
            for _ in 0..=deg {
                out.push(acc.clone());
                acc *= &v;
            }
            Ok(out)
        };
        let basis = (0..=deg).map(|k| format!("x^{k}")).collect();
        if let RelationOutcome::Found(rel) = certified(&powers, basis, height, Some(deg), ctx)? {
            if rel.stable {
                return Ok(Some(MinimalPolynomial { coefficients: rel.coefficients.clone(), degree: deg, relation: rel }));
            }
        }
    }
    Ok(None)
}

/// `x = sum_k (numerators[k] / denominator) j(ip)^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JFieldRepresentation {
    pub p: u64,
    pub class_number: u64,
    pub denominator: i64,
    pub numerators: Vec<i64>,
    pub relation: RecognizedRelation,
}

impl JFieldRepresentation {
    /// Reduced rational coefficients `c_0, ..., c_{h-1}`.
    pub fn rationals(&self) -> Vec<Rational> {
        self.numerators.iter().map(|&n| Rational::from((n, self.denominator))).collect()
    }
}

/// `j(ip)` at the context precision (real).
pub fn j_at(p: u64, ctx: &PrecisionContext) -> Result<Float> {
    let tau = Complex::with_val(ctx.work_bits(), (0, p));
    Ok(j_invariant(&tau, ctx)?.real().clone())
}

/// Expresses a real value in the basis `1, j(ip), ..., j(ip)^{h-1}` with
/// `h = h(Z[ip])` and a common denominator `<= H`.
pub fn recognize_in_jfield(
    x: &(dyn Fn(&PrecisionContext) -> Result<Float> + Sync),
    p: u64,
    height: u64,
    ctx: &PrecisionContext,
) -> Result<Option<JFieldRepresentation>> {
    let h = class_number_formula(p)? as usize;
    let values = |c: &PrecisionContext| -> Result<Vec<BigComplex>> {
        let prec = c.work_bits();
        let j = j_at(p, c)?;
        let mut out = vec![Complex::with_val(prec, (x(c)?, 0))];
        let mut acc = Float::with_val(prec, 1);
        for _ in 0..h {
            out.push(Complex::with_val(prec, (&acc, 0)));
            acc *= &j;
        }
        Ok(out)
    };
    let mut basis = vec!["x".to_string()];
    basis.extend((0..h).map(|k| format!("j({p}i)^{k}")));
    // only the denominator is bounded by H; the numerators scale with j^k
    check_precision(height, basis.len(), ctx)?;
    let probe = values(ctx)?;
    let log2_numer = probe.iter().map(|v| log2_abs(&abs(v))).fold(0.0f64, f64::max) + (height as f64).log2() + 2.0;
    let numer_bound = if log2_numer >= 62.0 { MAX_HEIGHT } else { 2f64.powf(log2_numer) as u64 };
    let outcome = certified(&values, basis, numer_bound.max(height), Some(0), ctx)?;
    let outcome = match outcome {
        RelationOutcome::Found(rel) if rel.coefficients[0].unsigned_abs() > height => {
            RelationOutcome::None { height_lower_bound_log2: (height as f64).log2() }
        }
        other => other,
    };
    let RelationOutcome::Found(rel) = outcome else { return Ok(None) };
    if !rel.stable {
        return Ok(None);
    }
    let denominator = rel.coefficients[0];
    let numerators = rel.coefficients[1..].iter().map(|&c| -c).collect();
    Ok(Some(JFieldRepresentation { p, class_number: h as u64, denominator, numerators, relation: rel }))
}

/// `N(p, m)` as a recomputable real value.
pub fn orbit_product_source(p: u64, m: u64) -> impl Fn(&PrecisionContext) -> Result<Float> + Sync {
    move |c| Ok(orbit_product(p, m, false, c)?.value)
}

/// Largest power-of-two height usable at this precision for `len` inputs.
pub fn default_height(len: usize, ctx: &PrecisionContext) -> u64 {
    let bits = (ctx.bits() as usize / (4 * len)).clamp(1, 62);
    1u64 << bits
}

/// What to recognize for an orbit product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecognitionTarget {
    /// `N(p, m)`.
    N,
    /// `N(p, m)^2`.
    N2,
    /// `A_chi(ip)` for the first member of `X(p, m)`.
    A,
}

impl std::str::FromStr for RecognitionTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" => Ok(Self::N),
            "N2" => Ok(Self::N2),
            "A" => Ok(Self::A),
            _ => Err(Error::Parse(format!("unknown target {s:?} (expected N, N2, A)"))),
        }
    }
}

/// Recognition of an orbit-product target: the minimal polynomial and,
/// for real targets, the representation over `Q(j(ip))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetRecognition {
    pub p: u64,
    pub m: u64,
    pub target: RecognitionTarget,
    #[serde(with = "crate::numkernel::serde_complex")]
    pub value: BigComplex,
    pub maxdeg: usize,
    pub height: u64,
    pub minimal_polynomial: Option<MinimalPolynomial>,
    pub jfield: Option<JFieldRepresentation>,
}

/// The value of a recognition target.
pub fn target_value(p: u64, m: u64, target: RecognitionTarget, ctx: &PrecisionContext) -> Result<BigComplex> {
    let prec = ctx.work_bits();
    match target {
        RecognitionTarget::N => Ok(Complex::with_val(prec, (orbit_product(p, m, false, ctx)?.value, 0))),
        RecognitionTarget::N2 => Ok(Complex::with_val(prec, (orbit_product(p, m, false, ctx)?.value.pow(2u32), 0))),
        RecognitionTarget::A => {
            let chi = crate::characters::enumerate_x(p, m)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::domain(format!("X({p}, {m}) is empty")))?;
            crate::modularforms::a_value(&chi, ctx)
        }
    }
}

/// Minimal polynomial (degree up to `maxdeg`, by default the degree bound
/// of the value, doubled for `N^2` and `A`) and `Q(j(ip))` representation.
pub fn recognize_target(
    p: u64,
    m: u64,
    target: RecognitionTarget,
    maxdeg: Option<usize>,
    height: Option<u64>,
    ctx: &PrecisionContext,
) -> Result<TargetRecognition> {
    let bound = degree_bound(p, m)? as usize;
    let maxdeg = maxdeg.unwrap_or(match target {
        RecognitionTarget::N => bound,
        _ => 2 * bound,
    });
    let height = height.unwrap_or_else(|| default_height(maxdeg + 1, ctx));
    let value = target_value(p, m, target, ctx)?;
    let source = move |c: &PrecisionContext| target_value(p, m, target, c);
    let minimal_polynomial = recognize_minpoly(&source, maxdeg, height, ctx)?;
    let jfield = if target == RecognitionTarget::A {
        None
    } else {
        let h = class_number_formula(p)? as usize;
        let jheight = default_height(h + 1, ctx);
        let real = move |c: &PrecisionContext| Ok(target_value(p, m, target, c)?.real().clone());
        recognize_in_jfield(&real, p, jheight, ctx)?
    };
    Ok(TargetRecognition { p, m, target, value, maxdeg, height, minimal_polynomial, jfield })
}

/// Smallest `d` in `{1, 2}` with `N(p, m)^d` recognized in `Q(j(ip))`;
/// reported, not asserted.
pub fn empirical_exponent(p: u64, m: u64, ctx: &PrecisionContext) -> Result<Option<u32>> {
    let h = class_number_formula(p)? as usize;
    let height = default_height(h + 1, ctx);
    for d in 1..=2u32 {
        let src = move |c: &PrecisionContext| Ok(orbit_product(p, m, false, c)?.value.pow(d));
        if recognize_in_jfield(&src, p, height, ctx)?.is_some() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Wraps a source so that its value is multiplied by `1 + 2^(-bits)`; the
/// perturbation does not shrink when the precision grows.
pub fn perturbed<'a>(
    x: &'a (dyn Fn(&PrecisionContext) -> Result<Float> + Sync),
    bits: u32,
) -> impl Fn(&PrecisionContext) -> Result<Float> + Sync + 'a {
    move |c| {
        let v = x(c)?;
        let prec = c.work_bits();
        let factor = Float::with_val(prec, 1) + pow2(-(bits as i32), prec);
        Ok(v * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;
    use crate::modularforms::a_value;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Integer>> {
        rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect()
    }

    fn norm2(v: &[Integer]) -> Integer {
        dot(v, v)
    }

    fn det2(b: &[Vec<Integer>]) -> Integer {
        Integer::from(&b[0][0] * &b[1][1]) - Integer::from(&b[0][1] * &b[1][0])
    }

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    #[test]
    fn identity_is_reduced() {
        let id = ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(lattice_reduce(&id).unwrap(), id);
    }

    #[test]
    fn two_dimensional_shortest_vector() {
        let basis = ints(&[&[201, 37], &[1648, 297]]);
        let reduced = lattice_reduce(&basis).unwrap();
        let mut best: Option<Integer> = None;
        for x in -50i64..=50 {
            for y in -50i64..=50 {
                if x == 0 && y == 0 {
                    continue;
                }
                let v = [Integer::from(201 * x + 1648 * y), Integer::from(37 * x + 297 * y)];
                let n = norm2(&v);
                if best.as_ref().map_or(true, |b| n < *b) {
                    best = Some(n);
                }
            }
        }
        assert_eq!(norm2(&reduced[0]), best.unwrap());
        assert_eq!(det2(&reduced).abs(), det2(&basis).abs());
    }

    #[test]
    fn rank_deficient_rejected() {
        assert!(lattice_reduce(&ints(&[&[1, 2], &[2, 4]])).is_err());
        assert!(lattice_reduce(&ints(&[&[0, 0], &[1, 0]])).is_err());
    }

    #[test]
    fn reduced_bases_satisfy_lll_conditions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(2..6);
            let basis: Vec<Vec<Integer>> =
                (0..n).map(|_| (0..n).map(|_| Integer::from(rng.gen_range(-1000i64..1000))).collect()).collect();
            let Ok(red) = lattice_reduce(&basis) else { continue };
            assert_eq!(gram_schmidt(&red).1.iter().product::<Rational>(), gram_schmidt(&basis).1.iter().product::<Rational>());
            let (mu, bstar) = gram_schmidt(&red);
            for k in 1..n {
                for j in 0..k {
                    assert!(Rational::from(mu[k][j].abs_ref()) <= Rational::from((1, 2)));
                }
                let rhs = (Rational::from((99, 100)) - Rational::from(mu[k][k - 1].square_ref())) * &bstar[k - 1];
                assert!(bstar[k] >= rhs);
            }
        }
    }

    /// Exact Gram-Schmidt coefficients and squared norms.
    fn gram_schmidt(rows: &[Vec<Integer>]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let n = rows.len();
        let mut mu = vec![vec![Rational::new(); n]; n];
        let mut bstar: Vec<Vec<Rational>> = Vec::new();
        let mut norms = Vec::new();
        for i in 0..n {
            let mut v: Vec<Rational> = rows[i].iter().map(Rational::from).collect();
            for j in 0..i {
                let num: Rational = rows[i].iter().zip(&bstar[j]).map(|(a, b)| Rational::from(a * b)).sum();
                mu[i][j] = num / &norms[j];
                for (x, y) in v.iter_mut().zip(&bstar[j]) {
                    *x -= Rational::from(&mu[i][j] * y);
                }
            }
            let nn: Rational = v.iter().map(|x| Rational::from(x.square_ref())).sum();
            norms.push(nn);
            bstar.push(v);
        }
        (mu, norms)
    }

    #[test]
    fn golden_ratio_relation() {
        let src = |c: &PrecisionContext| -> Result<Vec<BigComplex>> {
            let prec = c.work_bits();
            let phi = (Float::with_val(prec, 5).sqrt() + 1u32) / 2u32;
            let phi2 = Float::with_val(prec, phi.square_ref());
            Ok(vec![Complex::with_val(prec, 1), Complex::with_val(prec, phi), Complex::with_val(prec, phi2)])
        };
        let rel = integer_relation(&src, 1000, &ctx(192)).unwrap();
        let rel = rel.relation().unwrap();
        assert_eq!(rel.coefficients, vec![1, 1, -1]);
        assert!(rel.stable);
    }

    #[test]
    fn sqrt8_relation() {
        let c = ctx(192);
        let prec = c.work_bits();
        let values = [Float::with_val(prec, 1), Float::with_val(prec, 2).sqrt(), Float::with_val(prec, 8).sqrt()];
        let rel = integer_relation_fixed(&values, 1000, &c).unwrap();
        assert_eq!(rel.relation().unwrap().coefficients, vec![0, 2, -1]);
        assert!(!rel.relation().unwrap().stable);
    }

    #[test]
    fn one_and_e_have_no_small_relation() {
        let c = ctx(256);
        let prec = c.work_bits();
        let values = [Float::with_val(prec, 1), Float::with_val(prec, 1).exp()];
        match integer_relation_fixed(&values, 1000, &c).unwrap() {
            RelationOutcome::None { height_lower_bound_log2 } => assert!(height_lower_bound_log2 > 10.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn insufficient_precision() {
        let c = ctx(64);
        let values = [Float::with_val(96, 1), Float::with_val(96, 2).sqrt()];
        assert!(matches!(
            integer_relation_fixed(&values, 1 << 20, &c),
            Err(Error::InsufficientPrecision { needed: 160, have: 64 })
        ));
    }

    #[test]
    fn minimal_polynomials_of_radicals() {
        let c = ctx(192);
        let sqrt2 = |c: &PrecisionContext| Ok(Complex::with_val(c.work_bits(), (Float::with_val(c.work_bits(), 2).sqrt(), 0)));
        let mp = recognize_minpoly(&sqrt2, 2, 1000, &c).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-2, 0, 1]);
        assert_eq!(mp.to_string(), "X^2 - 2");
        let cbrt2 = |c: &PrecisionContext| {
            let prec = c.work_bits();
            Ok(Complex::with_val(prec, (Float::with_val(prec, 2).cbrt(), 0)))
        };
        let mp = recognize_minpoly(&cbrt2, 3, 1000, &c).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-2, 0, 0, 1]);
        // a complex algebraic number: i + 1 satisfies X^2 - 2X + 2
        let gauss = |c: &PrecisionContext| Ok(Complex::with_val(c.work_bits(), (1, 1)));
        assert_eq!(recognize_minpoly(&gauss, 2, 1000, &c).unwrap().unwrap().coefficients, vec![2, -2, 1]);
    }

    #[test]
    fn trivial_character_a_value_is_sqrt2() {
        let one = DirichletCharacter::principal(1).unwrap();
        let src = move |c: &PrecisionContext| a_value(&one, c);
        let mp = recognize_minpoly(&src, 2, 1000, &ctx(192)).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-2, 0, 1]);
    }

    #[test]
    fn polynomial_formatting() {
        assert_eq!(format_polynomial(&[-64, 40, 5]), "5*X^2 + 40*X - 64");
        assert_eq!(format_polynomial(&[1, -1]), "-X + 1");
        assert_eq!(format_polynomial(&[0]), "0");
    }

    #[test]
    fn j_itself_in_jfield() {
        let c = ctx(512);
        let src = |c: &PrecisionContext| j_at(5, c);
        let rep = recognize_in_jfield(&src, 5, 1 << 20, &c).unwrap().unwrap();
        assert_eq!(rep.denominator, 1);
        assert_eq!(rep.numerators, vec![0, 1]);
    }

    #[test]
    fn orbit_product_5_2_in_jfield() {
        let c = ctx(512);
        let src = orbit_product_source(5, 2);
        let rep = recognize_in_jfield(&src, 5, 1 << 42, &c).unwrap().unwrap();
        assert!(rep.relation.stable);
        assert_eq!(rep.denominator, 4102393962240);
        assert_eq!(rep.numerators, vec![-38425325462208, 1]);
        // perturbation at 2^(-P/4) defeats the recognition
        let noisy = perturbed(&src, 128);
        assert!(recognize_in_jfield(&noisy, 5, 1 << 42, &c).unwrap().is_none());
    }

    #[test]
    fn orbit_product_3_2_squared_in_jfield() {
        let c = ctx(512);
        let src = |c: &PrecisionContext| Ok(orbit_product(3, 2, false, c)?.value.pow(2u32));
        let rep = recognize_in_jfield(&src, 3, 1 << 42, &c).unwrap().unwrap();
        assert_eq!((rep.denominator, rep.numerators.clone()), (1, vec![4, 0]));
        let noisy = perturbed(&src, 128);
        assert!(recognize_in_jfield(&noisy, 3, 1 << 42, &c).unwrap().is_none());
    }

    #[test]
    fn orbit_product_minimal_polynomials() {
        let c = ctx(512);
        let mp = recognize_minpoly(&|c| target_value(5, 2, RecognitionTarget::N, c), 2, 1 << 40, &c).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-64, 40, 5]);
        let mp = recognize_minpoly(&|c| target_value(3, 2, RecognitionTarget::N, c), 2, 1 << 40, &c).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-2, 1]);
        let mp = recognize_minpoly(&|c| target_value(7, 2, RecognitionTarget::N, c), 4, 1 << 24, &c).unwrap().unwrap();
        assert_eq!(mp.coefficients, vec![-204304, -34272, -1848, 168, 7]);
        // perturbed negative control
        let noisy_src = |c: &PrecisionContext| Ok(target_value(5, 2, RecognitionTarget::N, c)?.real().clone());
        let noisy = perturbed(&noisy_src, 128);
        let as_complex = |c: &PrecisionContext| Ok(Complex::with_val(c.work_bits(), (noisy(c)?, 0)));
        assert!(recognize_minpoly(&as_complex, 2, 1 << 40, &c).unwrap().is_none());
    }

    #[test]
    fn minimal_polynomial_degree_divides_class_field_bound() {
        for (p, bits) in [(3u64, 512u32), (5, 512), (13, 1024)] {
            let c = ctx(bits);
            let h = class_number_formula(p).unwrap() as usize;
            let maxdeg = degree_bound(p, 2).unwrap() as usize;
            let height = default_height(maxdeg + 1, &c);
            let mp = recognize_minpoly(&|c| target_value(p, 2, RecognitionTarget::N, c), maxdeg, height, &c)
                .unwrap()
                .unwrap_or_else(|| panic!("p={p}"));
            assert_eq!((4 * h) % mp.degree, 0, "p={p} degree {}", mp.degree);
        }
    }

    #[test]
    fn relation_json_round_trip() {
        let c = ctx(192);
        let sqrt2 = |c: &PrecisionContext| Ok(Complex::with_val(c.work_bits(), (Float::with_val(c.work_bits(), 2).sqrt(), 0)));
        let mp = recognize_minpoly(&sqrt2, 2, 1000, &c).unwrap().unwrap();
        let json = serde_json::to_string(&mp).unwrap();
        let back: MinimalPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back.coefficients, mp.coefficients);
        assert_eq!(back.relation.basis, vec!["x^0", "x^1", "x^2"]);
        let none = RelationOutcome::None { height_lower_bound_log2: 12.5 };
        let back: RelationOutcome = serde_json::from_str(&serde_json::to_string(&none).unwrap()).unwrap();
        assert_eq!(back, none);
    }
}
