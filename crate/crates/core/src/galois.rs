//! Galois action on the values `A_chi(iN)`, `B_chi(iN)` realized through
//! matrices: the map `g_alpha`, the group `W_{M,iN}` of matrices
//! `(t, -N^2 s; s, t)` mod `M = 24 m N^2`, its action on characters, and the
//! orbits, products and polynomials built from it.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::characters::{
    enumerate_primitive_of_order, enumerate_x, gcd, is_prime, lcm, odd_primes_up_to, DirichletCharacter,
};
use crate::error::{Error, Result};
use crate::modularforms::{a_value, invariance_level};
use crate::numkernel::{abs, log2_abs, pow2, principal_power, serde_complex, serde_real, BigComplex, PrecisionContext};

/// Parameters attached to a conductor `N` and an order `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderParams {
    pub conductor: u64,
    pub order: u64,
    /// Common parity `chi(-1)` of the characters.
    pub parity: i8,
    pub eps: u32,
    /// `M = 24 m N^2`.
    pub level: u64,
    /// `n = m` for even `m`, `2m` otherwise.
    pub power: u64,
    /// `w = 24N / (12, N)`.
    pub invariance_level: u64,
}

impl OrderParams {
    pub fn new(conductor: u64, order: u64, parity: i8) -> Result<Self> {
        if conductor % 2 == 0 {
            return Err(Error::domain(format!("conductor {conductor} must be odd")));
        }
        if order == 0 || !(parity == 1 || parity == -1) {
            return Err(Error::domain(format!("invalid order {order} or parity {parity}")));
        }
        Ok(Self {
            conductor,
            order,
            parity,
            eps: if parity == 1 { 0 } else { 1 },
            level: 24 * order * conductor * conductor,
            power: if order % 2 == 0 { order } else { 2 * order },
            invariance_level: invariance_level(conductor),
        })
    }

    /// Parameters of `X(p, m)`; the parity is read off a member.
    pub fn for_x(p: u64, m: u64) -> Result<Self> {
        let parity = x_parity(p, m)?;
        Self::new(p, m, parity)
    }

    /// `p = v (mod 4)`.
    pub fn congruent_to_parity(&self) -> bool {
        (self.conductor as i64 - self.parity as i64).rem_euclid(4) == 0
    }
}

/// Common parity of the characters of conductor `p` and order `m`:
/// `chi(-1) = (-1)^{(p-1)/m}`.
pub fn x_parity(p: u64, m: u64) -> Result<i8> {
    if p < 3 || !is_prime(p) || m == 0 || (p - 1) % m != 0 {
        return Err(Error::domain(format!("need an odd prime p and m | p - 1, got p={p}, m={m}")));
    }
    Ok(if ((p - 1) / m) % 2 == 0 { 1 } else { -1 })
}

/// `g_alpha(s alpha + t)` for `alpha` a root of `X^2 + BX + C`:
/// the matrix `(t - Bs, -Cs; s, t)` mod `M`.
pub fn g_alpha(t: i64, s: i64, b: i64, c: i64, modulus: u64) -> [[u64; 2]; 2] {
    let m = modulus as i128;
    let r = |x: i128| x.rem_euclid(m) as u64;
    let (t, s, b, c) = (t as i128, s as i128, b as i128, c as i128);
    [[r(t - b * s), r(-c * s)], [r(s), r(t)]]
}

/// Element `(t, -N^2 s; s, t)` of `W_{M,iN}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WElement {
    pub t: u64,
    pub s: u64,
    pub conductor: u64,
    pub modulus: u64,
}

impl WElement {
    /// Requires `gcd(t^2 + N^2 s^2, M) = 1`.
    pub fn new(t: i64, s: i64, conductor: u64, modulus: u64) -> Result<Self> {
        let m = modulus as i64;
        let el = Self { t: t.rem_euclid(m) as u64, s: s.rem_euclid(m) as u64, conductor, modulus };
        if gcd(el.det(), modulus) != 1 {
            return Err(Error::domain(format!("det {} of (t={t}, s={s}) is not a unit mod {modulus}", el.det())));
        }
        Ok(el)
    }

    pub fn identity(params: &OrderParams) -> Self {
        Self { t: 1, s: 0, conductor: params.conductor, modulus: params.level }
    }

    /// Uniformly random element of `W_{M,iN}`.
    pub fn random(params: &OrderParams, rng: &mut impl Rng) -> Self {
        loop {
            let t = rng.gen_range(0..params.level) as i64;
            let s = rng.gen_range(0..params.level) as i64;
            if let Ok(el) = Self::new(t, s, params.conductor, params.level) {
                return el;
            }
        }
    }

    pub fn matrix(&self) -> [[u64; 2]; 2] {
        let n2 = (self.conductor * self.conductor) as i64;
        g_alpha(self.t as i64, self.s as i64, 0, n2, self.modulus)
    }

    /// `t^2 + N^2 s^2 mod M`.
    pub fn det(&self) -> u64 {
        let m = self.modulus as u128;
        let (t, s, n) = (self.t as u128, self.s as u128, self.conductor as u128);
        ((t * t % m + n * n % m * (s * s % m)) % m) as u64
    }
}

fn check_action(mu: &WElement, chi: &DirichletCharacter) -> Result<()> {
    if chi.modulus() != mu.conductor || !chi.is_primitive() || chi.modulus() % 2 == 0 {
        return Err(Error::domain(format!("{chi} is not a primitive character of odd conductor {}", mu.conductor)));
    }
    if gcd(mu.det(), mu.modulus) != 1 {
        return Err(Error::domain("det(mu) is not a unit"));
    }
    Ok(())
}

fn sign_of(exponent_half: u64, t: u64) -> i8 {
    // (-1)^{exponent_half (t - 1)}; M is even so t mod 2 is well defined
    if exponent_half % 2 == 1 && t % 2 == 0 {
        -1
    } else {
        1
    }
}

/// `B_chi | mu = (-1)^{((N-v)/2)(t-1)} B_{chi^det(mu)}`.
pub fn act_on_b(mu: &WElement, chi: &DirichletCharacter) -> Result<(i8, DirichletCharacter)> {
    check_action(mu, chi)?;
    let half = (chi.modulus() as i64 - chi.parity() as i64) as u64 / 2;
    Ok((sign_of(half, mu.t), chi.power((mu.det() % chi.order()) as i64)))
}

/// `(A_chi | mu)^n = (-1)^{((N-v)n/2)(t-1)} A_{chi^det(mu)}^n`.
pub fn act_on_a_power(mu: &WElement, chi: &DirichletCharacter, n: u64) -> Result<(i8, DirichletCharacter)> {
    check_action(mu, chi)?;
    let half = (chi.modulus() as i64 - chi.parity() as i64) as u64 * n / 2;
    Ok((sign_of(half, mu.t), chi.power((mu.det() % chi.order()) as i64)))
}

/// The set `{+-(t^2 + s^2) mod m : gcd(t^2 + p^2 s^2, 6mp) = 1}`.
///
/// The coprimality condition depends on `t, s` modulo the radical of `6mp`
/// and the value on `t, s` modulo `m`, so `t, s` range over one period
/// `lcm(m, rad(6mp))`, which divides `6mp`; the result is the same as the
/// search over `[0, 6mp)`.
pub fn determinant_classes(p: u64, m: u64) -> BTreeSet<u64> {
    let full = 6 * m * p;
    let rad: u64 = crate::characters::factorize(full).into_iter().map(|(q, _)| q).product();
    let period = lcm(m, rad);
    determinant_classes_over(p, m, period)
}

/// [`determinant_classes`] searching `t, s` over all of `[0, 6mp)`.
pub fn determinant_classes_exhaustive(p: u64, m: u64) -> BTreeSet<u64> {
    determinant_classes_over(p, m, 6 * m * p)
}

fn determinant_classes_over(p: u64, m: u64, range: u64) -> BTreeSet<u64> {
    let full = 6 * m * p;
    let mut out = BTreeSet::new();
    let p2 = (p * p % full) as u128;
    let units = units_mod(m).len();
    for t in 0..range {
        let t2 = (t as u128 * t as u128) % full as u128;
        for s in 0..range {
            let s2 = (s as u128 * s as u128) % full as u128;
            let det = ((t2 + p2 * s2) % full as u128) as u64;
            if gcd(det, full) != 1 {
                continue;
            }
            let v = ((t2 + s2) % m as u128) as u64;
            out.insert(v);
            out.insert((m - v) % m);
        }
        if out.len() == units && range > m {
            // all units reached; the rest of the search cannot add more
            break;
        }
    }
    out
}

/// `(Z/mZ)^*` as residues, `{0}` for `m = 1`.
pub fn units_mod(m: u64) -> BTreeSet<u64> {
    if m == 1 {
        return BTreeSet::from([0]);
    }
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}

/// `h(Z[ip])`: `(p-1)/2` for `p = 1 (mod 4)`, `(p+1)/2` for `p = 3 (mod 4)`.
pub fn class_number_formula(p: u64) -> Result<u64> {
    if p < 3 || !is_prime(p) {
        return Err(Error::domain(format!("class number formula needs an odd prime, got {p}")));
    }
    Ok(if p % 4 == 1 { (p - 1) / 2 } else { (p + 1) / 2 })
}

/// Reduced primitive positive definite forms `(a, b, c)` of discriminant `D`:
/// `-a < b <= a <= c`, `b >= 0` if `a = c` or `a = |b|`, `gcd(a, b, c) = 1`.
pub fn reduced_forms(d: i64) -> Result<Vec<(i64, i64, i64)>> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::domain(format!("{d} is not a negative discriminant")));
    }
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || ((a == c || a == b.abs()) && b < 0) {
                continue;
            }
            if crate::characters::gcd_i64(crate::characters::gcd_i64(a, b) as i64, c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    Ok(out)
}

/// Number of reduced primitive forms of discriminant `D`.
pub fn class_number_oracle(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}

/// Upper bound for `[H_O(B_chi(ip)) : K]`: `|X|(p - v)/2` if `p = v (mod 4)`,
/// else `|X|(p + v)`.
pub fn degree_bound(p: u64, m: u64) -> Result<u64> {
    let params = OrderParams::for_x(p, m)?;
    let x = enumerate_x(p, m)?.len() as i64;
    let (p, v) = (p as i64, params.parity as i64);
    Ok(if params.congruent_to_parity() { x * (p - v) / 2 } else { x * (p + v) } as u64)
}

/// Which family of values an orbit is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    /// `B_chi(ip)`, chi in `X(p, m)`.
    B,
    /// `B_chi(ip)^2`.
    B2,
    /// `A_chi(ip)^n` and `A_chibar(ip)^n`.
    An,
    /// `A_chi(ip)^{2n}` and `A_chibar(ip)^{2n}`.
    A2n,
}

impl std::str::FromStr for OrbitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" => Ok(Self::B),
            "B2" => Ok(Self::B2),
            "An" => Ok(Self::An),
            "A2n" => Ok(Self::A2n),
            _ => Err(Error::Parse(format!("unknown orbit kind {s:?} (expected B, B2, An, A2n)"))),
        }
    }
}

impl OrbitKind {
    pub const ALL: [OrbitKind; 4] = [OrbitKind::B, OrbitKind::B2, OrbitKind::An, OrbitKind::A2n];

    /// Whether the theorem asserts an orbit of this kind for `(p, m, v)`.
    pub fn applies(&self, params: &OrderParams) -> bool {
        match self {
            OrbitKind::B2 | OrbitKind::A2n => true,
            OrbitKind::B => params.congruent_to_parity(),
            OrbitKind::An => params.order % 4 == 0 || params.congruent_to_parity(),
        }
    }

    fn uses_conjugates(&self) -> bool {
        matches!(self, OrbitKind::An | OrbitKind::A2n)
    }
}

/// One orbit member.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitMember {
    pub label: String,
    #[serde(with = "serde_complex")]
    pub value: BigComplex,
    pub log2_abs_theta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub params: OrderParams,
    pub kind: OrbitKind,
    /// False when the theorem's side condition fails (not an orbit).
    pub applicable: bool,
    pub members: Vec<OrbitMember>,
    /// `e_1, ..., e_k` of the member values.
    #[serde(with = "serde_complex_vec")]
    pub elementary_symmetric: Vec<BigComplex>,
}

pub(crate) mod serde_complex_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::numkernel::BigComplex;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::numkernel::serde_complex")] BigComplex);

    pub fn serialize<S: Serializer>(v: &[BigComplex], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<Wrap> = v.iter().cloned().map(Wrap).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigComplex>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

/// `A_chi(iN)` together with `log2 |theta_chi(i)|`.
fn a_with_theta(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<(BigComplex, f64)> {
    let a = a_value(chi, ctx)?;
    let i = Complex::with_val(ctx.work_bits(), (0, 1));
    let eta = principal_power(&crate::modularforms::eta(&i, ctx)?, 1 + 2 * chi.eps() as i64, 1)?;
    let theta = Complex::with_val(ctx.work_bits(), &a * eta);
    Ok((a, log2_abs(&abs(&theta))))
}

fn member_value(kind: OrbitKind, chi: &DirichletCharacter, params: &OrderParams, ctx: &PrecisionContext) -> Result<OrbitMember> {
    let (a, log2_theta) = a_with_theta(chi, ctx)?;
    let prec = ctx.work_bits();
    let b = Complex::with_val(prec, a.norm_ref());
    let value = match kind {
        OrbitKind::B => b,
        OrbitKind::B2 => principal_power(&b, 2, 1)?,
        OrbitKind::An => principal_power(&a, params.power as i64, 1)?,
        OrbitKind::A2n => principal_power(&a, 2 * params.power as i64, 1)?,
    };
    Ok(OrbitMember { label: chi.label(), value, log2_abs_theta: log2_theta })
}

/// Labels an orbit of the given kind ranges over.
pub fn orbit_characters(p: u64, m: u64, kind: OrbitKind) -> Result<Vec<DirichletCharacter>> {
    let reps = enumerate_x(p, m)?;
    let mut out: Vec<DirichletCharacter> = if kind.uses_conjugates() {
        reps.iter().flat_map(|c| [c.clone(), c.conj()]).collect()
    } else {
        reps
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// Elementary symmetric functions `e_1..e_k` of `values`.
pub fn elementary_symmetric(values: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    // coefficients of prod (X + v): e_k is the coefficient of X^{n-k}
    let mut e = vec![Complex::with_val(prec, 1)];
    for v in values {
        let mut next = vec![Complex::new(prec); e.len() + 1];
        for (k, ek) in e.iter().enumerate() {
            next[k] += ek;
            next[k + 1] += Complex::with_val(prec, ek * v);
        }
        e = next;
    }
    e.remove(0);
    e
}

/// Evaluates the members of one candidate orbit.
pub fn orbit(p: u64, m: u64, kind: OrbitKind, ctx: &PrecisionContext) -> Result<OrbitReport> {
    if m < 2 {
        return Err(Error::domain("orbits need m >= 2; X(p, 1) is empty"));
    }
    let params = OrderParams::for_x(p, m)?;
    let chars = orbit_characters(p, m, kind)?;
    let members = chars
        .par_iter()
        .map(|chi| member_value(kind, chi, &params, ctx))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<BigComplex> = members.iter().map(|mm| mm.value.clone()).collect();
    Ok(OrbitReport {
        params,
        kind,
        applicable: kind.applies(&params),
        elementary_symmetric: elementary_symmetric(&values, ctx.work_bits()),
        members,
    })
}

/// Result of the label-level closure check of an orbit under `W_{M,ip}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosureCheck {
    pub trials: usize,
    /// Every image label lies in the orbit's label set.
    pub closed: bool,
    /// Every sign was `+1`.
    pub signs_trivial: bool,
    /// Distinct image labels reached from the first member.
    pub reached: usize,
}

/// Applies `trials` random `mu` to every member label of an orbit.
pub fn orbit_closure(p: u64, m: u64, kind: OrbitKind, trials: usize, seed: u64) -> Result<ClosureCheck> {
    let params = OrderParams::for_x(p, m)?;
    let chars = orbit_characters(p, m, kind)?;
    let labels: BTreeSet<String> = chars.iter().map(|c| c.label()).collect();
    let canonical = |c: DirichletCharacter| -> String {
        if kind.uses_conjugates() {
            c.label()
        } else {
            let cb = c.conj();
            if cb.exponents() < c.exponents() { cb.label() } else { c.label() }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut closed = true;
    let mut signs_trivial = true;
    let mut reached = BTreeSet::new();
    for _ in 0..trials {
        let mu = WElement::random(&params, &mut rng);
        for (idx, chi) in chars.iter().enumerate() {
            let (sign, image) = match kind {
                OrbitKind::B => act_on_b(&mu, chi)?,
                OrbitKind::B2 => {
                    let (_, image) = act_on_b(&mu, chi)?;
                    (1, image)
                }
                OrbitKind::An => act_on_a_power(&mu, chi, params.power)?,
                OrbitKind::A2n => act_on_a_power(&mu, chi, 2 * params.power)?,
            };
            signs_trivial &= sign == 1;
            let label = canonical(image);
            closed &= labels.contains(&label);
            if idx == 0 {
                reached.insert(label);
            }
        }
    }
    Ok(ClosureCheck { trials, closed, signs_trivial, reached: reached.len() })
}

/// `N(p, m) = prod_{chi in X(p, m)} B_chi(ip)` with the corollary flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitProduct {
    pub params: OrderParams,
    #[serde(with = "serde_real")]
    pub value: Float,
    pub members: Vec<OrbitMember>,
    /// `N(p, m)^2` lies in the ring class field (always).
    pub square_in_ring_class_field: bool,
    /// `N(p, m)` itself lies there: `|X|` even or `p = v (mod 4)`.
    pub value_in_ring_class_field: bool,
    pub vanishing: bool,
    pub includes_principal: bool,
}

/// `N(p, m)`. With `include_principal` (only meaningful for `m = 1`) the
/// principal character mod `p` is used as the single factor.
pub fn orbit_product(p: u64, m: u64, include_principal: bool, ctx: &PrecisionContext) -> Result<OrbitProduct> {
    let params = OrderParams::for_x(p, m)?;
    let mut chars = enumerate_x(p, m)?;
    if include_principal && m == 1 {
        chars.push(DirichletCharacter::principal(p)?);
    }
    let members = chars
        .par_iter()
        .map(|chi| member_value(OrbitKind::B, chi, &params, ctx))
        .collect::<Result<Vec<_>>>()?;
    let threshold = -(ctx.bits() as f64) / 2.0;
    let vanishing = members.iter().any(|mm| mm.log2_abs_theta < threshold);
    let mut value = Float::with_val(ctx.work_bits(), 1);
    for mm in &members {
        value *= mm.value.real();
    }
    if vanishing {
        value = Float::with_val(ctx.work_bits(), 0);
    }
    let x_len = chars.len();
    Ok(OrbitProduct {
        params,
        value,
        members,
        square_in_ring_class_field: true,
        value_in_ring_class_field: x_len % 2 == 0 || params.congruent_to_parity(),
        vanishing,
        includes_principal: include_principal && m == 1,
    })
}

/// `prod_{chi in X(N, m)} (X - B_chi(iN)^2)` for odd `N`, and the
/// square-free variant `prod (X - B_chi(iN))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitPolynomial {
    pub conductor: u64,
    pub order: u64,
    pub members: Vec<OrbitMember>,
    /// Monic, constant term first.
    #[serde(with = "serde_complex_vec")]
    pub coefficients: Vec<BigComplex>,
    #[serde(with = "serde_complex_vec")]
    pub squarefree_coefficients: Vec<BigComplex>,
    /// `N |X| = sum chi(-1) (mod 4)`.
    pub squarefree_justified: bool,
    /// `max |Im c_k|` over the coefficients of the squared polynomial.
    pub log2_max_imag: f64,
}

fn monic_from_roots(roots: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    // prod (X - r): constant term first
    let neg: Vec<BigComplex> = roots.iter().map(|r| Complex::with_val(prec, -r)).collect();
    let mut e = elementary_symmetric(&neg, prec);
    e.insert(0, Complex::with_val(prec, 1));
    e.reverse();
    e
}

pub fn orbit_polynomial(n: u64, m: u64, ctx: &PrecisionContext) -> Result<OrbitPolynomial> {
    if n % 2 == 0 {
        return Err(Error::domain(format!("orbit polynomial needs odd N, got {n}")));
    }
    let chars = enumerate_primitive_of_order(n, m)?;
    if chars.is_empty() {
        return Err(Error::domain(format!("no primitive characters of conductor {n} and order {m}")));
    }
    let params = OrderParams::new(n, m, chars[0].parity())?;
    let members = chars
        .par_iter()
        .map(|chi| member_value(OrbitKind::B, chi, &params, ctx))
        .collect::<Result<Vec<_>>>()?;
    let prec = ctx.work_bits();
    let b: Vec<BigComplex> = members.iter().map(|mm| mm.value.clone()).collect();
    let b2: Vec<BigComplex> = b.iter().map(|x| Complex::with_val(prec, x.square_ref())).collect();
    let coefficients = monic_from_roots(&b2, prec);
    let squarefree_coefficients = monic_from_roots(&b, prec);
    let parity_sum: i64 = chars.iter().map(|c| c.parity() as i64).sum();
    let justified = (n as i64 * chars.len() as i64 - parity_sum).rem_euclid(4) == 0;
    let max_imag = coefficients
        .iter()
        .map(|c| log2_abs(&Float::with_val(64, c.imag())))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(OrbitPolynomial {
        conductor: n,
        order: m,
        members,
        coefficients,
        squarefree_coefficients,
        squarefree_justified: justified,
        log2_max_imag: max_imag,
    })
}

/// Per-orbit vanishing summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferRow {
    pub p: u64,
    pub m: u64,
    pub members: usize,
    pub vanishing: usize,
    pub min_log2_abs_theta: f64,
    /// All members on the same side of the threshold.
    pub uniform: bool,
}

/// For each odd prime `p <= p_max` and `m | p - 1`, `m >= 2`: whether the
/// members of `X(p, m)` are uniformly above or uniformly below the
/// vanishing threshold `|theta_chi(i)| < 2^(-P/2)`.
pub fn vanishing_transfer(p_max: u64, ctx: &PrecisionContext) -> Result<Vec<TransferRow>> {
    let mut jobs = Vec::new();
    for p in odd_primes_up_to(p_max) {
        for m in 2..p {
            if (p - 1) % m == 0 {
                jobs.push((p, m));
            }
        }
    }
    let threshold = pow2(-(ctx.bits() as i32) / 2, ctx.work_bits());
    jobs.into_par_iter()
        .map(|(p, m)| {
            let chars = enumerate_x(p, m)?;
            let i = Complex::with_val(ctx.work_bits(), (0, 1));
            let mut logs = Vec::with_capacity(chars.len());
            let mut vanishing = 0;
            for chi in &chars {
                let theta = crate::modularforms::theta_chi(chi, &i, ctx)?;
                let a = abs(&theta);
                if a < threshold {
                    vanishing += 1;
                }
                logs.push(log2_abs(&a));
            }
            Ok(TransferRow {
                p,
                m,
                members: chars.len(),
                vanishing,
                min_log2_abs_theta: logs.iter().copied().fold(f64::INFINITY, f64::min),
                uniform: vanishing == 0 || vanishing == chars.len(),
            })
        })
        .collect()
}
