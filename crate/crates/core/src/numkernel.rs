//! Precision management and the small set of arbitrary-precision primitives
//! every analytic module relies on: roots of unity, principal-branch powers,
//! and tail bounds for Gaussian-type series.
//!
//! All values are MPFR-backed through `rug`. A [`PrecisionContext`] carries
//! the target precision `P` and a guard width `g`; computations run at
//! `P + 2g` bits internally and results are compared at `2^(-P+g)`.

use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use rug::Complex as BigComplex;

/// Default precision for the verification suites.
pub const DEFAULT_VERIFY_BITS: u32 = 192;
/// Default precision for algebraic recognition.
pub const DEFAULT_RECOGNITION_BITS: u32 = 512;
pub const DEFAULT_GUARD_BITS: u32 = 32;

/// Target precision `P` and guard width `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_guard(bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(bits: u32, guard: u32) -> Result<Self> {
        if bits < 64 {
            return Err(Error::domain(format!("precision {bits} is below the 64-bit minimum")));
        }
        if guard < 16 {
            return Err(Error::domain(format!("guard width {guard} is below 16 bits")));
        }
        Ok(Self { bits, guard })
    }

    /// Target precision `P`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Internal working precision, `P + 2g`.
    pub fn work_bits(&self) -> u32 {
        self.bits + 2 * self.guard
    }

    /// Same guard, twice the target precision.
    pub fn doubled(&self) -> Self {
        Self { bits: 2 * self.bits, guard: self.guard }
    }

    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        Self::with_guard(bits, self.guard)
    }

    /// `log2` of the comparison tolerance, `-P + g`.
    pub fn tolerance_log2(&self) -> i32 {
        -(self.bits as i32) + self.guard as i32
    }

    /// Comparison tolerance `2^(-P+g)`.
    pub fn tolerance(&self) -> Float {
        pow2(self.tolerance_log2(), self.work_bits())
    }

    pub fn zero(&self) -> BigComplex {
        Complex::new(self.work_bits())
    }

    pub fn one(&self) -> BigComplex {
        Complex::with_val(self.work_bits(), 1)
    }

    pub fn real(&self, x: impl Into<f64>) -> Float {
        Float::with_val(self.work_bits(), x.into())
    }

    pub fn complex(&self, re: f64, im: f64) -> BigComplex {
        Complex::with_val(self.work_bits(), (re, im))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.work_bits(), Constant::Pi)
    }

    /// Parses a decimal string at working precision.
    pub fn parse_real(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.work_bits(), parsed))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { bits: DEFAULT_VERIFY_BITS, guard: DEFAULT_GUARD_BITS }
    }
}

/// `2^e` as a float at the given precision.
pub fn pow2(e: i32, prec: u32) -> Float {
    let one = Float::with_val(prec, 1);
    if e >= 0 {
        one << e as u32
    } else {
        one >> e.unsigned_abs()
    }
}

/// Modulus of a complex value.
pub fn abs(z: &BigComplex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `|a - b|`.
pub fn distance(a: &BigComplex, b: &BigComplex) -> Float {
    let diff = Complex::with_val(a.prec().0.max(b.prec().0), a - b);
    abs(&diff)
}

/// `log2 |x|`, or `-inf` for zero. Only used for reporting.
pub fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let l = Float::with_val(64, x.abs_ref());
    l.log2().to_f64()
}

/// `e(k/M) = exp(2 pi i k / M)` at working precision.
///
/// Quarter turns are returned exactly.
pub fn root_of_unity(k: i64, m: u64, ctx: &PrecisionContext) -> Result<BigComplex> {
    if m == 0 {
        return Err(Error::domain("root_of_unity: modulus must be positive"));
    }
    Ok(root_of_unity_prec(k, m, ctx.work_bits()))
}

pub(crate) fn root_of_unity_prec(k: i64, m: u64, prec: u32) -> BigComplex {
    let m_i = m as i128;
    let k = (k as i128).rem_euclid(m_i);
    if k == 0 {
        return Complex::with_val(prec, 1);
    }
    if 4 * k % m_i == 0 {
        let quarter = 4 * k / m_i;
        return match quarter {
            1 => Complex::with_val(prec, (0, 1)),
            2 => Complex::with_val(prec, -1),
            _ => Complex::with_val(prec, (0, -1)),
        };
    }
    let mut angle = Float::with_val(prec, Constant::Pi);
    angle *= 2 * k as i64;
    angle /= m_i as f64;
    // exact division by an integer when m fits in f64 mantissa
    let (s, c) = angle.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// Table `e(k/M)` for `k = 0..M`.
pub fn roots_of_unity_table(m: u64, prec: u32) -> Vec<BigComplex> {
    (0..m).map(|k| root_of_unity_prec(k as i64, m, prec)).collect()
}

/// `exp(w Log z)` with the principal logarithm, `arg z` in `(-pi, pi]`.
///
/// Half-integral exponents go through the principal square root, so the
/// result for `Im z >= 0` and `w = 1/2` has nonnegative real part.
pub fn principal_power(z: &BigComplex, num: i64, den: u64) -> Result<BigComplex> {
    if den == 0 {
        return Err(Error::domain("principal_power: zero denominator"));
    }
    let prec = z.prec().0;
    let g = gcd_u64(num.unsigned_abs(), den);
    let (num, den) = (num / g as i64, den / g);
    if z.is_zero() {
        if num <= 0 {
            return Err(Error::domain("principal_power: zero base with nonpositive exponent"));
        }
        return Ok(Complex::new(prec));
    }
    match den {
        1 => Ok(integer_power(z, num)),
        2 => {
            let root = Complex::with_val(prec, z.sqrt_ref());
            // num = 2k + 1 with k possibly negative
            let k = (num - 1).div_euclid(2);
            let mut out = integer_power(z, k);
            out *= &root;
            Ok(out)
        }
        _ => {
            let mut log = Complex::with_val(prec, z.ln_ref());
            log *= num;
            log /= den as f64;
            Ok(log.exp())
        }
    }
}

fn integer_power(z: &BigComplex, k: i64) -> BigComplex {
    let prec = z.prec().0;
    let mut p = Complex::with_val(prec, 1);
    let mut base = z.clone();
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            p *= &base;
        }
        base.square_mut();
        e >>= 1;
    }
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Number of terms `n_max` after which the tail
/// `sum_{|n| > n_max} |n|^eps exp(-rate n^2)` drops below `2^(-bits)`.
///
/// `rate` is the Gaussian decay rate of `|q^{n^2/2N}|`, i.e.
/// `pi Im(tau) / N`. `conductor` only enters through the small safety margin
/// so that the bound stays monotone in `N`.
pub fn theta_truncation_bound(conductor: u64, eps: u32, rate: f64, bits: u32) -> Result<u64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain(format!("theta_truncation_bound: nonpositive decay rate {rate}")));
    }
    let target = -((bits as f64) + 8.0 + (conductor.max(1) as f64).log2().ceil()) * std::f64::consts::LN_2;
    let eps = eps as f64;
    // log of the two-sided tail past n, bounded by a geometric series
    let tail_log = |n: f64| -> f64 {
        let next = n + 1.0;
        let ratio = (-rate * (2.0 * next + 1.0)).exp() * ((next + 1.0) / next).powf(eps);
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        (2.0f64).ln() + eps * next.ln() - rate * next * next - (1.0 - ratio).ln()
    };
    let mut n = ((-target / rate).sqrt().floor() as u64).saturating_sub(2);
    while tail_log(n as f64) >= target {
        n += 1;
    }
    while n > 0 && tail_log((n - 1) as f64) < target {
        n -= 1;
    }
    Ok(n)
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Serde adapter writing a complex number as decimal `re`/`im` strings.
pub mod serde_complex {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        re: String,
        im: String,
    }

    pub fn serialize<S: Serializer>(z: &BigComplex, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { re: format_decimal(z.real(), 40), im: format_decimal(z.imag(), 40) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigComplex, D::Error> {
        let r = Repr::deserialize(d)?;
        let prec = decimal_prec(&r.re).max(decimal_prec(&r.im));
        let re = Float::parse(&r.re).map_err(serde::de::Error::custom)?;
        let im = Float::parse(&r.im).map_err(serde::de::Error::custom)?;
        Ok(Complex::with_val(prec, (re, im)))
    }
}

/// Serde adapter for optional complex values.
pub mod serde_complex_opt {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<BigComplex>, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wrap<'a>(#[serde(with = "super::serde_complex")] &'a BigComplex);
        z.as_ref().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigComplex>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::serde_complex")] BigComplex);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Serde adapter for real values as decimal strings.
pub mod serde_real {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_decimal(x, 40).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Float, D::Error> {
        let s = String::deserialize(d)?;
        let parsed = Float::parse(&s).map_err(serde::de::Error::custom)?;
        Ok(Float::with_val(decimal_prec(&s), parsed))
    }
}

/// Scientific decimal with `digits` significant digits, e.g. `1.0864e0`.
pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    // rug counts significant digits in the precision field
    format!("{:.*e}", digits.max(1), x)
}

fn decimal_prec(s: &str) -> u32 {
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count() as u32;
    (digits * 4).max(64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(a: &BigComplex, b: &BigComplex, ctx: &PrecisionContext) -> bool {
        distance(a, b) < ctx.tolerance()
    }

    #[test]
    fn context_bounds() {
        assert!(PrecisionContext::new(63).is_err());
        assert!(PrecisionContext::with_guard(128, 8).is_err());
        let c = PrecisionContext::new(192).unwrap();
        assert_eq!(c.tolerance_log2(), -160);
        assert_eq!(c.doubled().bits(), 384);
    }

    #[test]
    fn roots_of_unity_examples() {
        let c = ctx();
        assert_eq!(root_of_unity(0, 7, &c).unwrap(), c.one());
        assert_eq!(root_of_unity(1, 4, &c).unwrap(), c.complex(0.0, 1.0));
        let third = root_of_unity(1, 3, &c).unwrap();
        let mut sqrt3 = c.real(3.0);
        sqrt3.sqrt_mut();
        sqrt3 /= 2;
        let expect = Complex::with_val(c.work_bits(), (c.real(-0.5), sqrt3));
        assert!(close(&third, &expect, &c));
        assert!(root_of_unity(1, 0, &c).is_err());
    }

    #[test]
    fn principal_power_examples() {
        let c = ctx();
        let r = principal_power(&c.complex(-1.0, 0.0), 1, 2).unwrap();
        assert!(close(&r, &c.complex(0.0, 1.0), &c));
        let r = principal_power(&c.complex(4.0, 0.0), 1, 2).unwrap();
        assert!(close(&r, &c.complex(2.0, 0.0), &c));
        let r = principal_power(&c.complex(0.0, 2.0), 1, 2).unwrap();
        assert!(close(&r, &c.complex(1.0, 1.0), &c));
        // generic exponent goes through exp/log
        let r = principal_power(&c.complex(-8.0, 0.0), 1, 3).unwrap();
        let expect = Complex::with_val(c.work_bits(), root_of_unity(1, 6, &c).unwrap() * 2);
        assert!(close(&r, &expect, &c));
        assert!(principal_power(&c.zero(), -1, 2).is_err());
        assert!(principal_power(&c.zero(), 1, 2).unwrap().is_zero());
    }

    #[test]
    fn three_halves_power_matches_root_times_base() {
        let c = ctx();
        let z = c.complex(-0.3, 1.7);
        let p = principal_power(&z, 3, 2).unwrap();
        let mut log = Complex::with_val(c.work_bits(), z.ln_ref());
        log *= 1.5;
        assert!(close(&p, &log.exp(), &c));
    }

    #[test]
    fn truncation_bound_examples() {
        let pi = std::f64::consts::PI;
        let n = theta_truncation_bound(1, 0, pi, 64).unwrap();
        assert!(n <= 5, "n_max = {n}");
        // direct tail oracle
        let tail: f64 = ((n + 1)..(n + 40)).map(|k| 2.0 * (-pi * (k * k) as f64).exp()).sum();
        assert!(tail < 2f64.powi(-64));

        let n600 = theta_truncation_bound(600, 0, pi / 600.0, 64).unwrap();
        let estimate = (600.0 * 64.0 * std::f64::consts::LN_2 / pi).sqrt().ceil() as u64;
        assert!(n600 >= estimate && n600 <= estimate + 12, "{n600} vs {estimate}");

        assert!(theta_truncation_bound(5, 0, 0.0, 64).is_err());
        assert!(theta_truncation_bound(5, 0, -1.0, 64).is_err());
    }

    #[test]
    fn truncation_bound_growth_under_doubling() {
        let pi = std::f64::consts::PI;
        for &n in &[1u64, 7, 60, 600] {
            let a = theta_truncation_bound(n, 1, pi / n as f64, 256).unwrap() as f64;
            let b = theta_truncation_bound(n, 1, pi / n as f64, 512).unwrap() as f64;
            assert!(b >= a && b <= a * 2f64.sqrt() + 3.0, "N={n}: {a} -> {b}");
        }
    }

    #[test]
    fn decimal_format_round_trip() {
        let c = ctx();
        let x = c.pi();
        let s = format_decimal(&x, 30);
        let back = c.parse_real(&s).unwrap();
        let diff = Float::with_val(c.work_bits(), &back - &x);
        assert!(diff.abs() < 1e-29);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn roots_multiply_to_one(k in -2_000_000i64..2_000_000, m in 1u64..=1_000_000) {
                let c = ctx();
                let a = root_of_unity(k, m, &c).unwrap();
                let b = root_of_unity(m as i64 - k, m, &c).unwrap();
                let prod = Complex::with_val(c.work_bits(), &a * &b);
                prop_assert!(close(&prod, &c.one(), &c));
                let mut modulus = abs(&a);
                modulus -= 1;
                prop_assert!(modulus.abs() < c.tolerance());
            }

            #[test]
            fn square_root_squares_back(re in -50.0f64..50.0, im in 0.0f64..50.0) {
                prop_assume!(re != 0.0 || im != 0.0);
                let c = ctx();
                let z = c.complex(re, im);
                let r = principal_power(&z, 1, 2).unwrap();
                prop_assert!(*r.real() >= 0);
                let sq = Complex::with_val(c.work_bits(), r.square_ref());
                let rel = Float::with_val(c.work_bits(), distance(&sq, &z) / abs(&z));
                prop_assert!(rel < c.tolerance());
            }
        }
    }
}
