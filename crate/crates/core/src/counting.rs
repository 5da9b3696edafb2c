//! Closed-form evaluation of the number of `k`-subsets of `F_q` whose
//! stabilizer in `AGL(1, F_q)` is exactly `S(γ^((q-1)/d), 0, H)`.
//!
//! A conjugacy-free subgroup class is fixed by `(p, α, d, i, j)`: the
//! multiplicative part has order `d`, `|H'| = p^(o_d(p)·i)` and
//! `|H| = p^β` with `β = o_d(p)·i·j`. The count depends on nothing else,
//! so every function here works on integers only. All arithmetic is exact.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field order accepted by the closed forms.
pub const MAX_ORDER: u64 = u32::MAX as u64;

// ---------------------------------------------------------------------------
// number theory helpers

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Distinct prime divisors of `u`, ascending. `prime_set(1)` is empty.
pub fn prime_set(u: u64) -> Result<Vec<u64>> {
    if u == 0 {
        return Err(Error::InvalidArgument("prime_set needs u >= 1".into()));
    }
    Ok(factorize(u).into_iter().map(|(r, _)| r).collect())
}

/// Prime factorization as `(prime, multiplicity)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (r, e) in factorize(n) {
        let len = out.len();
        let mut pw = 1u64;
        for _ in 0..e {
            pw *= r;
            for t in 0..len {
                out.push(out[t] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Writes `q` as `p^α` when it is a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, alpha)] => Ok((*p, *alpha)),
        _ => Err(Error::NotPrimePower(q)),
    }
}

pub(crate) fn checked_pow(p: u64, alpha: u32) -> Option<u64> {
    p.checked_pow(alpha)
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Multiplicative order of `v` modulo `u`, with `o_1(v) = 1`.
pub fn mult_order(v: u64, u: u64) -> Result<u64> {
    if u == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if u == 1 {
        return Ok(1);
    }
    if v.gcd(&u) != 1 {
        return Err(Error::InvalidArgument(format!(
            "gcd({v}, {u}) != 1, no multiplicative order"
        )));
    }
    // Euler phi of u bounds the order.
    let mut phi = u;
    for (r, _) in factorize(u) {
        phi = phi / r * (r - 1);
    }
    let mut order = phi;
    for (r, _) in factorize(phi) {
        while order % r == 0 && pow_mod(v, order / r, u) == 1 {
            order /= r;
        }
    }
    Ok(order)
}

// ---------------------------------------------------------------------------
// binomials

/// `C(n, m)`, zero when `m > n`.
pub fn binomial(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let m = m.min(n - m);
    let mut acc = BigUint::one();
    for t in 0..m {
        acc *= n - t;
        acc /= t + 1;
    }
    acc
}

/// Gaussian coefficient `[n, m]_base` from the product formula. Zero when
/// `m < 0` or `m > n`.
pub fn q_binomial(n: i64, m: i64, base: &BigInt) -> BigInt {
    if m < 0 || m > n {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..m {
        num *= BigInt::one() - base.pow((n - t) as u32);
        den *= BigInt::one() - base.pow((t + 1) as u32);
    }
    let (quo, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quo
}

/// Möbius function of the subspace lattice for a quotient of dimension
/// `l`: `(-1)^l · base^C(l,2)`.
pub fn moebius_exponent(l: u64, base: &BigInt) -> BigInt {
    let e = l * l.saturating_sub(1) / 2;
    let mag = base.pow(e as u32);
    if l % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Number of `k`-subsets of `F_q` that are unions of orbits of a subgroup
/// with multiplier order `u` and translation group of size `v`:
/// `C((q-v)/uv, k/uv) + C((q-v)/uv, (k-v)/uv)`.
///
/// A binomial whose lower index is not a nonnegative integer contributes 0.
/// Arguments for which `(q-v)/uv` is not a nonnegative integer describe no
/// subgroup and give 0.
pub fn s_qk(q: u64, k: u64, u: u64, v: u64) -> BigUint {
    if u == 0 || v == 0 || v > q {
        return BigUint::zero();
    }
    let uv = match u.checked_mul(v) {
        Some(x) => x,
        None => return BigUint::zero(),
    };
    if (q - v) % uv != 0 {
        return BigUint::zero();
    }
    let top = (q - v) / uv;
    let mut total = BigUint::zero();
    if k % uv == 0 {
        total += binomial(top, k / uv);
    }
    if k >= v && (k - v) % uv == 0 {
        total += binomial(top, (k - v) / uv);
    }
    total
}

// ---------------------------------------------------------------------------
// subgroup classes

/// A class of subgroups `S(γ^((q-1)/d), 0, H)` sharing `d`, `|H|` and
/// `|H'|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupClass {
    p: u64,
    alpha: u32,
    d: u64,
    i: u32,
    j: u32,
    odp: u32,
}

fn bad(condition: &'static str, detail: String) -> Error {
    Error::InvalidClass { condition, detail }
}

pub(crate) fn field_order(p: u64, alpha: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 {
        return Err(Error::BadExponent(alpha));
    }
    match checked_pow(p, alpha) {
        Some(q) if q <= MAX_ORDER => Ok(q),
        _ => Err(Error::FieldTooLarge {
            p,
            alpha,
            max: MAX_ORDER,
        }),
    }
}

impl SubgroupClass {
    pub fn new(p: u64, alpha: u32, d: u64, i: u32, j: u32) -> Result<Self> {
        let q = field_order(p, alpha)?;
        if d == 0 || (q - 1) % d != 0 {
            return Err(bad("d | q-1", format!("d = {d}, q - 1 = {}", q - 1)));
        }
        let odp = mult_order(p, d)? as u32;
        let top = alpha / odp;
        if i == 0 || top % i != 0 {
            return Err(bad(
                "i | alpha/o_d(p)",
                format!("i = {i}, alpha/o_d(p) = {top}"),
            ));
        }
        if i == top {
            if j > 1 {
                return Err(bad(
                    "j in {0,1} when i = alpha/o_d(p)",
                    format!("j = {j}"),
                ));
            }
        } else if j == 0 || j >= top / i {
            return Err(bad(
                "0 < j < alpha/(o_d(p)*i) when i < alpha/o_d(p)",
                format!("j = {j}, alpha/(o_d(p)*i) = {}", top / i),
            ));
        }
        Ok(SubgroupClass {
            p,
            alpha,
            d,
            i,
            j,
            odp,
        })
    }

    /// Every class for `F_{p^α}`, ordered by `d`, then `i`, then `j`.
    pub fn all(p: u64, alpha: u32) -> Result<Vec<Self>> {
        let q = field_order(p, alpha)?;
        let mut out = Vec::new();
        for d in divisors(q - 1) {
            let odp = mult_order(p, d)? as u32;
            let top = alpha / odp;
            for i in divisors(top as u64) {
                let i = i as u32;
                let js = if i == top { 0..=1 } else { 1..=(top / i - 1) };
                for j in js {
                    out.push(SubgroupClass::new(p, alpha, d, i, j)?);
                }
            }
        }
        Ok(out)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn i(&self) -> u32 {
        self.i
    }
    pub fn j(&self) -> u32 {
        self.j
    }
    /// `o_d(p)`.
    pub fn odp(&self) -> u32 {
        self.odp
    }
    pub fn beta(&self) -> u32 {
        self.odp * self.i * self.j
    }
    pub fn q(&self) -> u64 {
        self.p.pow(self.alpha)
    }
    /// `|H| = p^β`.
    pub fn h_size(&self) -> u64 {
        self.p.pow(self.beta())
    }
    /// Degree of `H'` over `F_p`.
    pub fn h_prime_degree(&self) -> u32 {
        self.odp * self.i
    }
    /// `|H'| = p^(o_d(p)·i)`.
    pub fn h_prime_size(&self) -> u64 {
        self.p.pow(self.h_prime_degree())
    }
    /// `|S| = d·p^β`.
    pub fn group_order(&self) -> u64 {
        self.d * self.h_size()
    }

    /// Whether `k ≡ 0` or `p^β (mod d·p^β)`; the count vanishes otherwise.
    pub fn admits(&self, k: u64) -> bool {
        let v = self.h_size();
        let m = self.d * v;
        let r = k % m;
        r == 0 || r == v % m
    }

    /// Whether this class is the whole group `S(γ, 0, F_q)`.
    pub fn is_full_group(&self) -> bool {
        self.d == self.q() - 1 && self.beta() == self.alpha
    }

    /// Closed-form count for any `0 <= k <= q`.
    pub fn count(&self, k: u64) -> Result<BigInt> {
        let q = self.q();
        if k > q {
            return Err(bad("0 <= k <= q", format!("k = {k}, q = {q}")));
        }
        Ok(self.evaluate(k))
    }

    fn evaluate(&self, k: u64) -> BigInt {
        let p = self.p;
        let q = self.q();
        let beta = self.beta();
        let codim = self.alpha - beta;
        let pb = BigInt::from(p);

        let x = (self.h_prime_size() - 1) / self.d;
        let primes = prime_set(x).expect("x >= 1");

        let mut total = BigInt::zero();
        if self.d == 1 {
            let mut first = BigInt::zero();
            for l in 0..=codim {
                let s = s_qk(q, k, 1, p.pow(beta + l));
                if s.is_zero() {
                    continue;
                }
                first += moebius_exponent(l as u64, &pb)
                    * q_binomial(codim as i64, l as i64, &pb)
                    * BigInt::from(s);
            }
            total = (BigInt::one() - pb.pow(codim)) * first;
        }

        let mut inner = BigInt::zero();
        for mask in 0u64..(1u64 << primes.len()) {
            let chosen: Vec<u64> = primes
                .iter()
                .enumerate()
                .filter(|(t, _)| mask >> t & 1 == 1)
                .map(|(_, r)| *r)
                .collect();
            let pi: u64 = chosen.iter().product();
            let u = self.d * pi;
            let o = mult_order(p, u).expect("u divides q - 1") as u32;
            debug_assert_eq!(codim % o, 0);
            let n = codim / o;
            let base = pb.pow(o);
            let mut part = BigInt::zero();
            for l in 0..=n {
                let s = s_qk(q, k, u, p.pow(beta + l * o));
                if s.is_zero() {
                    continue;
                }
                part += moebius_exponent(l as u64, &base)
                    * q_binomial(n as i64, l as i64, &base)
                    * BigInt::from(s);
            }
            if chosen.len() % 2 == 1 {
                inner -= part;
            } else {
                inner += part;
            }
        }

        if self.d == 1 {
            total += pb.pow(codim) * inner;
        } else {
            total = inner;
        }
        debug_assert!(!total.is_negative(), "negative count for {self:?}, k = {k}");
        total
    }
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} o_d(p)={} i={} j={} beta={}",
            self.d,
            self.odp,
            self.i,
            self.j,
            self.beta()
        )
    }
}

/// A class together with a subset size that passes the congruence gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassParams {
    class: SubgroupClass,
    k: u64,
}

impl ClassParams {
    pub fn new(p: u64, alpha: u32, k: u64, d: u64, i: u32, j: u32) -> Result<Self> {
        Self::from_class(SubgroupClass::new(p, alpha, d, i, j)?, k)
    }

    pub fn from_class(class: SubgroupClass, k: u64) -> Result<Self> {
        let q = class.q();
        if k > q {
            return Err(bad("0 <= k <= q", format!("k = {k}, q = {q}")));
        }
        if !class.admits(k) {
            return Err(bad(
                "k = 0 or p^beta (mod d*p^beta)",
                format!(
                    "k = {k}, p^beta = {}, d*p^beta = {}",
                    class.h_size(),
                    class.group_order()
                ),
            ));
        }
        Ok(ClassParams { class, k })
    }

    pub fn class(&self) -> &SubgroupClass {
        &self.class
    }
    pub fn k(&self) -> u64 {
        self.k
    }
}

/// `N(S(γ^((q-1)/d), 0, H), k)` for a validated parameter tuple.
pub fn count_n(params: &ClassParams) -> BigInt {
    params.class.evaluate(params.k)
}

/// All valid tuples with `0 <= k <= k_max` (default `q/2`), nested as
/// `k`, then `d` ascending, then `i`, then `j`.
pub fn enumerate_params(p: u64, alpha: u32, k_max: Option<u64>) -> Result<Vec<ClassParams>> {
    let q = field_order(p, alpha)?;
    let k_max = k_max.unwrap_or(q / 2);
    if k_max > q {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} exceeds q = {q}"
        )));
    }
    let classes = SubgroupClass::all(p, alpha)?;
    let mut out = Vec::new();
    for k in 0..=k_max {
        for class in &classes {
            if class.admits(k) {
                out.push(ClassParams { class: *class, k });
            }
        }
    }
    Ok(out)
}

/// One output row: `(k, d, o_d(p), i, j, β, N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub k: u64,
    pub d: u64,
    pub odp: u32,
    pub i: u32,
    pub j: u32,
    pub beta: u32,
    #[serde(rename = "N", serialize_with = "as_decimal")]
    pub n: BigInt,
}

fn as_decimal<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl CountRecord {
    pub const CSV_HEADER: &'static str = "k,d,odp,i,j,beta,N";

    pub fn from_params(params: &ClassParams) -> Self {
        let c = params.class();
        CountRecord {
            k: params.k(),
            d: c.d(),
            odp: c.odp(),
            i: c.i(),
            j: c.j(),
            beta: c.beta(),
            n: count_n(params),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.k, self.d, self.odp, self.i, self.j, self.beta, self.n
        )
    }
}

impl fmt::Display for CountRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k= {}, d= {}, o_d(p)= {}, i= {}, j= {}, beta= {},  N= {}",
            self.k, self.d, self.odp, self.i, self.j, self.beta, self.n
        )
    }
}

/// The table for `0 <= k <= q/2`.
pub fn build_table(p: u64, alpha: u32) -> Result<Vec<CountRecord>> {
    build_table_to(p, alpha, None)
}

/// The table up to `k_max`. Rows are evaluated in parallel and returned in
/// enumeration order.
pub fn build_table_to(p: u64, alpha: u32, k_max: Option<u64>) -> Result<Vec<CountRecord>> {
    let params = enumerate_params(p, alpha, k_max)?;
    Ok(params.par_iter().map(CountRecord::from_params).collect())
}
