//! Dirichlet characters over canonical generators of `(Z/NZ)*`.
//!
//! A character mod `N` is stored as an exponent vector: one exponent per
//! cyclic factor of the unit group, so that `chi(g_i) = e(e_i / d_i)`.
//! Labels serialize as `"N:e1,e2,...,ek"` in generator order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkernel::{root_of_unity_prec, BigComplex, PrecisionContext};

/// Above this group order discrete logs use baby-step giant-step.
const LOG_TABLE_LIMIT: u64 = 1 << 16;

/// One cyclic factor of `(Z/NZ)*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorComponent {
    pub prime: u64,
    /// Prime power `q_i` this factor lives in.
    pub prime_power: u64,
    /// Generator as a residue mod `q_i`.
    pub generator: u64,
    /// Cyclic order `d_i`.
    pub order: u64,
}

/// Canonical generators of `(Z/NZ)*`, one entry per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorBasis {
    pub modulus: u64,
    pub components: Vec<GeneratorComponent>,
}

impl GeneratorBasis {
    /// Product of the cyclic orders, `phi(N)`.
    pub fn group_order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    /// Exponent of the group (lcm of the cyclic orders).
    pub fn exponent(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| lcm(acc, c.order))
    }

    /// CRT lift of component `i`'s generator: `g_i` mod `q_i` and `1` mod the
    /// other prime powers.
    pub fn lift(&self, i: usize) -> u64 {
        let target = &self.components[i];
        let others = self.modulus / target.prime_power;
        // x = 1 + others * t with x = g (mod q)
        let q = target.prime_power;
        let inv = mod_inverse(others % q, q).expect("coprime prime powers");
        let t = mulmod((target.generator + q - 1) % q, inv, q);
        (1 + (others as u128 * t as u128 % self.modulus as u128) as u64) % self.modulus
    }
}

/// Canonical generators: the smallest primitive root mod `p^2` for odd prime
/// powers, `3` mod `4`, and `(2^k - 1, 5)` for `2^k` with `k >= 3`.
pub fn canonical_generators(n: u64) -> GeneratorBasis {
    let mut components = Vec::new();
    for (p, k) in factorize(n) {
        let q = p.pow(k);
        if p == 2 {
            match k {
                1 => {}
                2 => components.push(GeneratorComponent { prime: 2, prime_power: 4, generator: 3, order: 2 }),
                _ => {
                    components.push(GeneratorComponent { prime: 2, prime_power: q, generator: q - 1, order: 2 });
                    components.push(GeneratorComponent { prime: 2, prime_power: q, generator: 5, order: q / 4 });
                }
            }
        } else {
            let g = smallest_primitive_root_mod_p_squared(p);
            components.push(GeneratorComponent { prime: p, prime_power: q, generator: g % q, order: q / p * (p - 1) });
        }
    }
    GeneratorBasis { modulus: n, components }
}

fn smallest_primitive_root_mod_p_squared(p: u64) -> u64 {
    let m = p * p;
    let phi = p * (p - 1);
    let mut factors: Vec<u64> = factorize(p - 1).into_iter().map(|(f, _)| f).collect();
    factors.push(p);
    (2..m)
        .find(|&g| g % p != 0 && factors.iter().all(|&f| powmod(g, phi / f, m) != 1))
        .expect("primitive root exists mod p^2")
}

#[derive(Debug)]
enum LogTable {
    Dense(Vec<u32>),
    Bsgs { giant: HashMap<u64, u64>, step: u64, generator_inv_step: u64 },
}

/// Discrete logarithms for one cyclic factor.
#[derive(Debug)]
struct ComponentLog {
    component: GeneratorComponent,
    /// Set for the `-1` factor of `2^k`, `k >= 3`.
    sign_only: bool,
    table: LogTable,
}

impl ComponentLog {
    fn new(component: &GeneratorComponent, sign_only: bool) -> Self {
        let q = component.prime_power;
        let g = component.generator;
        let table = if sign_only {
            LogTable::Dense(Vec::new())
        } else if component.order <= LOG_TABLE_LIMIT {
            let mut dense = vec![u32::MAX; q as usize];
            let mut x = 1u64;
            for k in 0..component.order {
                dense[x as usize] = k as u32;
                // the 5-factor of 2^k also absorbs -5^k
                if component.prime == 2 && q >= 8 {
                    dense[(q - x) as usize] = k as u32;
                }
                x = mulmod(x, g, q);
            }
            LogTable::Dense(dense)
        } else {
            let step = (component.order as f64).sqrt().ceil() as u64;
            let mut giant = HashMap::with_capacity(step as usize);
            let mut x = 1u64;
            for j in 0..step {
                giant.entry(x).or_insert(j);
                x = mulmod(x, g, q);
            }
            let g_inv = mod_inverse(g, q).expect("generator is a unit");
            LogTable::Bsgs { giant, step, generator_inv_step: powmod(g_inv, step, q) }
        };
        Self { component: component.clone(), sign_only, table }
    }

    fn log(&self, n: u64) -> u64 {
        let q = self.component.prime_power;
        let r = n % q;
        if self.sign_only {
            return if r % 4 == 1 { 0 } else { 1 };
        }
        let r = if self.component.prime == 2 && q >= 8 && r % 4 == 3 { q - r } else { r };
        match &self.table {
            LogTable::Dense(t) => t[r as usize] as u64,
            LogTable::Bsgs { giant, step, generator_inv_step } => {
                let mut y = r;
                for i in 0..=*step {
                    if let Some(j) = giant.get(&y) {
                        return (i * step + j) % self.component.order;
                    }
                    y = mulmod(y, *generator_inv_step, q);
                }
                unreachable!("unit without discrete log")
            }
        }
    }
}

/// Shared per-modulus data: generators and discrete-log tables.
#[derive(Debug)]
pub struct CharacterGroup {
    basis: GeneratorBasis,
    logs: Vec<ComponentLog>,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>> {
        if modulus == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        let basis = canonical_generators(modulus);
        let logs = basis
            .components
            .iter()
            .map(|c| {
                let sign_only = c.prime == 2 && c.prime_power >= 8 && c.generator == c.prime_power - 1;
                ComponentLog::new(c, sign_only)
            })
            .collect();
        Ok(Arc::new(Self { basis, logs }))
    }

    pub fn modulus(&self) -> u64 {
        self.basis.modulus
    }

    pub fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    /// Discrete log vector of a unit, or `None` if `gcd(n, N) > 1`.
    pub fn log_vector(&self, n: i64) -> Option<Vec<u64>> {
        let m = self.modulus();
        let r = n.rem_euclid(m as i64) as u64;
        if gcd(r, m) != 1 {
            return None;
        }
        Some(self.logs.iter().map(|l| l.log(r)).collect())
    }

    /// Every character of this group in lexicographic exponent order.
    pub fn characters(self: &Arc<Self>) -> impl Iterator<Item = DirichletCharacter> + '_ {
        let orders: Vec<u64> = self.basis.components.iter().map(|c| c.order).collect();
        let total: u64 = orders.iter().product();
        (0..total).map(move |mut idx| {
            let mut exps = vec![0u64; orders.len()];
            for (slot, &d) in exps.iter_mut().zip(&orders).rev() {
                *slot = idx % d;
                idx /= d;
            }
            DirichletCharacter::from_parts(self.clone(), exps)
        })
    }
}

/// A Dirichlet character with cached order, parity and conductor.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
    order: u64,
    parity: i8,
    conductor: u64,
}

impl DirichletCharacter {
    pub fn new(group: Arc<CharacterGroup>, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != group.basis.components.len() {
            return Err(Error::domain(format!(
                "modulus {} needs {} exponents, got {}",
                group.modulus(),
                group.basis.components.len(),
                exponents.len()
            )));
        }
        let exps = exponents.iter().zip(&group.basis.components).map(|(&e, c)| e % c.order).collect();
        Ok(Self::from_parts(group, exps))
    }

    fn from_parts(group: Arc<CharacterGroup>, exponents: Vec<u64>) -> Self {
        let order = exponents
            .iter()
            .zip(&group.basis.components)
            .fold(1, |acc, (&e, c)| lcm(acc, c.order / gcd(c.order, e)));
        let conductor = compute_conductor(&group.basis, &exponents);
        let mut chi = Self { group, exponents, order, parity: 1, conductor };
        chi.parity = match chi.log_value(-1) {
            Some(0) => 1,
            _ => -1,
        };
        chi
    }

    /// Trivial character mod `N`.
    pub fn principal(modulus: u64) -> Result<Self> {
        let group = CharacterGroup::new(modulus)?;
        let k = group.basis.components.len();
        Self::new(group, vec![0; k])
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `chi(-1)`.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// `0` for even characters, `1` for odd ones.
    pub fn eps(&self) -> u32 {
        if self.parity == 1 {
            0
        } else {
            1
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// `chi(n) = e(k / m)`: returns `k` in `[0, m)`, or `None` when
    /// `gcd(n, N) > 1`.
    pub fn log_value(&self, n: i64) -> Option<u64> {
        let logs = self.group.log_vector(n)?;
        Some(self.value_index(&logs))
    }

    /// Exponent `k` of `e(k/m)` for a precomputed discrete-log vector.
    pub fn value_index(&self, logs: &[u64]) -> u64 {
        let m = self.order;
        let mut k = 0u128;
        for ((&e, &l), c) in self.exponents.iter().zip(logs).zip(&self.group.basis.components) {
            if e == 0 {
                continue;
            }
            // e/d reduces to e'/d' with d' | m
            let g = gcd(e, c.order);
            let (e_red, d_red) = (e / g, c.order / g);
            k += e_red as u128 * l as u128 % d_red as u128 * (m / d_red) as u128;
        }
        (k % m as u128) as u64
    }

    /// Power `chi^s`; `s = -1` gives the conjugate.
    pub fn power(&self, s: i64) -> Self {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.basis.components)
            .map(|(&e, c)| {
                let d = c.order as i128;
                ((e as i128 * s as i128).rem_euclid(d)) as u64
            })
            .collect();
        Self::from_parts(self.group.clone(), exps)
    }

    pub fn conj(&self) -> Self {
        self.power(-1)
    }

    /// Table of `e(k/m)`, `k = 0..m`, at working precision.
    pub fn value_table(&self, ctx: &PrecisionContext) -> Vec<BigComplex> {
        crate::numkernel::roots_of_unity_table(self.order, ctx.work_bits())
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl PartialOrd for DirichletCharacter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DirichletCharacter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.modulus(), &self.exponents).cmp(&(other.modulus(), &other.exponents))
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.modulus())?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({self}, m={}, v={}, f={})", self.order, self.parity, self.conductor)
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("label {s:?} lacks ':'")))?;
        let n: u64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
        let exps = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|e| e.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent {e:?} in {s:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        let group = CharacterGroup::new(n)?;
        for (e, c) in exps.iter().zip(&group.basis.components) {
            if *e >= c.order {
                return Err(Error::Parse(format!("exponent {e} out of range 0..{} in {s:?}", c.order)));
            }
        }
        DirichletCharacter::new(group, exps)
    }
}

fn compute_conductor(basis: &GeneratorBasis, exps: &[u64]) -> u64 {
    let mut f = 1u64;
    let mut i = 0;
    while i < basis.components.len() {
        let c = &basis.components[i];
        if c.prime == 2 && c.prime_power >= 8 {
            // (-1, 5) pair for 2^k
            let (ea, eb) = (exps[i], exps[i + 1]);
            let k = c.prime_power.trailing_zeros();
            let order5 = basis.components[i + 1].order;
            if ea == 0 && eb == 0 {
                // trivial on the 2-part
            } else {
                // smallest j >= 2 with chi trivial on <5^{2^{j-2}}>
                let mut j = 2;
                while j < k && (eb as u128 * (1u128 << (j - 2))) % order5 as u128 != 0 {
                    j += 1;
                }
                f *= 1 << j;
            }
            i += 2;
            continue;
        }
        let e = exps[i];
        if e != 0 {
            if c.prime == 2 {
                f *= 4;
            } else {
                // smallest j >= 1 with phi(p^k) | e * phi(p^j)
                let p = c.prime;
                let mut pj = p;
                let mut phi_j = p - 1;
                while (e as u128 * phi_j as u128) % c.order as u128 != 0 {
                    pj *= p;
                    phi_j *= p;
                }
                f *= pj;
            }
        }
        i += 1;
    }
    f
}

/// `chi(n)` at working precision; zero when `gcd(n, N) > 1`.
pub fn evaluate(chi: &DirichletCharacter, n: i64, ctx: &PrecisionContext) -> BigComplex {
    match chi.log_value(n) {
        None => ctx.zero(),
        Some(k) => root_of_unity_prec(k as i64, chi.order(), ctx.work_bits()),
    }
}

/// `(m, v)`: order and `chi(-1)`.
pub fn order_parity(chi: &DirichletCharacter) -> (u64, i8) {
    (chi.order(), chi.parity())
}

pub fn conductor(chi: &DirichletCharacter) -> u64 {
    chi.conductor()
}

/// All characters mod `N` (or only primitive ones) in lexicographic
/// exponent order.
pub fn enumerate_characters(n: u64, primitive_only: bool) -> Result<Vec<DirichletCharacter>> {
    let group = CharacterGroup::new(n)?;
    Ok(group.characters().filter(|c| !primitive_only || c.is_primitive()).collect())
}

pub fn char_power(chi: &DirichletCharacter, s: i64) -> DirichletCharacter {
    chi.power(s)
}

/// Primitive characters mod `N` of exact order `m`, one per conjugate pair.
/// The representative is the lexicographically smaller exponent vector.
pub fn enumerate_primitive_of_order(n: u64, m: u64) -> Result<Vec<DirichletCharacter>> {
    let group = CharacterGroup::new(n)?;
    let out = group
        .characters()
        .filter(|c| c.is_primitive() && c.order() == m)
        .filter(|c| c.exponents() <= c.conj().exponents())
        .collect();
    Ok(out)
}

/// `X(p, m)`: characters of conductor `p` and order `m` up to conjugation.
/// Empty when `m` does not divide `p - 1`, and for `m = 1`.
pub fn enumerate_x(p: u64, m: u64) -> Result<Vec<DirichletCharacter>> {
    if p < 3 || !is_prime(p) {
        return Err(Error::domain(format!("X(p, m) needs an odd prime, got {p}")));
    }
    if m == 0 || (p - 1) % m != 0 {
        return Ok(Vec::new());
    }
    let group = CharacterGroup::new(p)?;
    let step = (p - 1) / m;
    let out = (1..=m)
        .filter(|&s| gcd(s, m) == 1 && (m <= 2 || s < m - s))
        .map(|s| DirichletCharacter::new(group.clone(), vec![s * step]))
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().filter(|c| c.is_primitive()).collect())
}

/// Kronecker symbol `(a/b)` for all integers.
pub fn kronecker(a: i64, b: i64) -> i32 {
    let mut a = a as i128;
    let mut b = b as i128;
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    if b < 0 {
        b = -b;
        if a < 0 {
            result = -result;
        }
    }
    let twos = b.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        b >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a/b), b odd positive
    a = a.rem_euclid(b);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(b % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

// integer helpers

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn powmod(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        e >>= 1;
    }
    acc
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Odd primes up to `bound`.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    (3..=bound).step_by(2).filter(|&p| is_prime(p)).collect()
}
