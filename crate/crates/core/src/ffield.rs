//! Arithmetic in `F_{p^α}` with a fixed polynomial basis, plus the
//! `F_p`-subspace machinery used by the subgroup descriptors.
//!
//! An element is stored as its coordinate vector read as a base-`p`
//! integer: the coefficient of `x^t` is digit `t`. Numeric order of the
//! index is therefore the lexicographic order of coordinates, most
//! significant coefficient first.

use std::collections::HashSet;
use std::fmt;

use crate::counting::{divisors, field_order, prime_set};
use crate::error::{Error, Result};

/// Largest field order for which element tables are built.
pub const MAX_TABLE_ORDER: u64 = 1 << 22;

/// `F_{p^α}` defined by a monic irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldParams {
    p: u32,
    alpha: u32,
    /// Coefficients low to high, length `α + 1`, leading 1.
    modulus: Vec<u32>,
}

/// An element of `F_q`, indexed by its base-`p` coordinate encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u32 {
        self.0
    }
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn to_digits(mut x: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn from_digits(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `poly` modulo monic `m`, coefficients low to high.
fn poly_rem(poly: &mut Vec<u64>, m: &[u64], p: u64) {
    let deg_m = m.len() - 1;
    while poly.len() > deg_m {
        let lead = poly.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let shift = poly.len() - deg_m;
        for t in 0..deg_m {
            poly[shift + t] = (poly[shift + t] + (p - lead) * m[t]) % p;
        }
    }
}

fn poly_is_zero(poly: &[u64]) -> bool {
    poly.iter().all(|&c| c == 0)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    for fdeg in 1..=deg / 2 {
        let count = p.pow(fdeg as u32);
        for low in 0..count {
            let mut f = to_digits(low, p, fdeg);
            f.push(1);
            let mut r = m.to_vec();
            poly_rem(&mut r, &f, p);
            if poly_is_zero(&r) {
                return false;
            }
        }
    }
    true
}

impl FieldParams {
    /// `F_{p^α}` with the smallest monic irreducible modulus of degree `α`,
    /// scanning lower coefficients as a base-`p` integer.
    pub fn new(p: u64, alpha: u32) -> Result<Self> {
        let q = field_order(p, alpha)?;
        let len = alpha as usize;
        let mut low = 0u64;
        loop {
            let mut m = to_digits(low, p, len);
            m.push(1);
            if is_irreducible(&m, p) {
                return Ok(FieldParams {
                    p: p as u32,
                    alpha,
                    modulus: m.into_iter().map(|c| c as u32).collect(),
                });
            }
            low += 1;
            debug_assert!(low < q, "an irreducible of every degree exists");
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.alpha)
    }
    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Product by schoolbook multiplication and reduction; no tables.
    fn mul_slow(&self, x: u64, y: u64) -> u64 {
        let p = self.p as u64;
        let len = self.alpha as usize;
        let xd = to_digits(x, p, len);
        let yd = to_digits(y, p, len);
        let mut prod = vec![0u64; 2 * len];
        for (s, &a) in xd.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (t, &b) in yd.iter().enumerate() {
                prod[s + t] = (prod[s + t] + a * b) % p;
            }
        }
        let m: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        poly_rem(&mut prod, &m, p);
        prod.resize(len, 0);
        from_digits(&prod, p)
    }

    fn pow_slow(&self, x: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        acc
    }
}

/// The first element in coordinate order whose multiplicative order is
/// `q - 1`.
pub fn find_generator(params: &FieldParams) -> FieldElement {
    let q = params.order();
    let n = q - 1;
    let primes = prime_set(n).expect("q >= 2");
    for x in 1..q {
        if primes.iter().all(|r| params.pow_slow(x, n / r) != 1) {
            return FieldElement(x as u32);
        }
    }
    unreachable!("F_q^* is cyclic")
}

/// `F_q` with log/antilog tables for fast multiplication.
#[derive(Clone, Debug)]
pub struct Field {
    params: FieldParams,
    q: u32,
    p: u32,
    powers_of_p: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    generator: FieldElement,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(p: u64, alpha: u32) -> Result<Self> {
        let q = field_order(p, alpha)?;
        if q > MAX_TABLE_ORDER {
            return Err(Error::FieldTooLarge {
                p,
                alpha,
                max: MAX_TABLE_ORDER,
            });
        }
        Self::from_params(FieldParams::new(p, alpha)?)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, alpha) = crate::counting::prime_power(q)?;
        Self::new(p, alpha)
    }

    pub fn from_params(params: FieldParams) -> Result<Self> {
        let q64 = params.order();
        if q64 > MAX_TABLE_ORDER {
            return Err(Error::FieldTooLarge {
                p: params.p as u64,
                alpha: params.alpha,
                max: MAX_TABLE_ORDER,
            });
        }
        let q = q64 as u32;
        let generator = find_generator(&params);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for t in 0..q - 1 {
            exp.push(x as u32);
            log[x as usize] = t;
            x = params.mul_slow(x, generator.0 as u64);
        }
        let powers_of_p = (0..params.alpha).map(|t| params.p.pow(t)).collect();
        Ok(Field {
            p: params.p,
            q,
            powers_of_p,
            exp,
            log,
            generator,
            params,
        })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn alpha(&self) -> u32 {
        self.params.alpha
    }
    /// The fixed generator `γ` of `F_q^*`.
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q as u64 {
            return Err(Error::ElementOutOfRange {
                index,
                q: self.q as u64,
            });
        }
        Ok(FieldElement(index as u32))
    }

    /// The prime-field constant `c mod p`.
    pub fn constant(&self, c: u32) -> FieldElement {
        FieldElement(c % self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        to_digits(x.0 as u64, self.p as u64, self.alpha() as usize)
            .into_iter()
            .map(|c| c as u32)
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.alpha() as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates in [0, {})",
                self.alpha(),
                self.p
            )));
        }
        let digits: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
        Ok(FieldElement(from_digits(&digits, self.p as u64) as u32))
    }

    /// Coordinate of `x^pos`.
    pub fn digit(&self, x: FieldElement, pos: u32) -> u32 {
        x.0 / self.powers_of_p[pos as usize] % self.p
    }

    /// Position of the most significant nonzero coordinate.
    pub fn leading_position(&self, x: FieldElement) -> Option<u32> {
        (0..self.alpha()).rev().find(|&t| self.digit(x, t) != 0)
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(x.0 ^ y.0);
        }
        if self.alpha() == 1 {
            return FieldElement((x.0 + y.0) % self.p);
        }
        let (mut a, mut b) = (x.0, y.0);
        let mut out = 0;
        for &w in &self.powers_of_p {
            out += ((a % self.p + b % self.p) % self.p) * w;
            a /= self.p;
            b /= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        if self.p == 2 {
            return x;
        }
        let mut a = x.0;
        let mut out = 0;
        for &w in &self.powers_of_p {
            out += ((self.p - a % self.p) % self.p) * w;
            a /= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.q - 1;
        let e = (self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64) % n as u64;
        FieldElement(self.exp[e as usize])
    }

    pub fn inv(&self, x: FieldElement) -> Option<FieldElement> {
        if x.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        let e = (n - self.log[x.0 as usize]) % n;
        Some(FieldElement(self.exp[e as usize]))
    }

    /// `x / y`; panics on division by zero.
    pub fn div(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.mul(x, self.inv(y).expect("division by zero"))
    }

    pub fn pow(&self, x: FieldElement, e: i64) -> FieldElement {
        if x.0 == 0 {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let n = (self.q - 1) as i64;
        let t = (self.log[x.0 as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        FieldElement(self.exp[t as usize])
    }

    /// `γ^e`.
    pub fn gamma_pow(&self, e: u64) -> FieldElement {
        FieldElement(self.exp[(e % (self.q as u64 - 1)) as usize])
    }

    /// Discrete logarithm to base `γ`.
    pub fn log(&self, x: FieldElement) -> Option<u64> {
        (x.0 != 0).then(|| self.log[x.0 as usize] as u64)
    }

    pub fn mult_order(&self, x: FieldElement) -> Option<u64> {
        let l = self.log(x)?;
        let n = self.q as u64 - 1;
        Some(n / num_integer::gcd(l, n))
    }

    /// `F_{p^m}` for `m | α`.
    pub fn subfield(&self, degree: u32) -> Result<Subfield> {
        if degree == 0 || self.alpha() % degree != 0 {
            return Err(Error::BadSubfield {
                degree,
                alpha: self.alpha(),
            });
        }
        Ok(Subfield { degree })
    }

    pub fn prime_subfield(&self) -> Subfield {
        Subfield { degree: 1 }
    }

    pub fn whole(&self) -> Subfield {
        Subfield {
            degree: self.alpha(),
        }
    }
}

/// The subfield `F_{p^m}` of a fixed ambient field, identified by `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subfield {
    degree: u32,
}

impl Subfield {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self, field: &Field) -> u64 {
        (field.p() as u64).pow(self.degree)
    }

    /// `θ = γ^((q-1)/(p^m - 1))`, a generator of the subfield's unit group.
    pub fn primitive(&self, field: &Field) -> FieldElement {
        let n = field.q() as u64 - 1;
        field.gamma_pow(n / (self.order(field) - 1))
    }

    /// `1, θ, ..., θ^(m-1)`, an `F_p`-basis.
    pub fn basis(&self, field: &Field) -> Vec<FieldElement> {
        let theta = self.primitive(field);
        (0..self.degree as i64).map(|t| field.pow(theta, t)).collect()
    }

    pub fn contains(&self, field: &Field, x: FieldElement) -> bool {
        x.is_zero() || field.pow(x, self.order(field) as i64) == x
    }
}

/// An `F_p`-subspace of `F_q` held in reduced echelon form with pivots at
/// the most significant coordinates. Equal subspaces have equal bases.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    /// Sorted by pivot position, highest first. Each vector has a 1 at its
    /// pivot and 0 at every other pivot.
    basis: Vec<FieldElement>,
    pivots: Vec<u32>,
}

impl Subspace {
    pub fn zero() -> Self {
        Subspace::default()
    }

    pub fn whole(field: &Field) -> Self {
        Self::from_generators(field, (0..field.alpha()).map(|t| FieldElement(field.p().pow(t))))
    }

    /// `F_p`-span.
    pub fn from_generators(field: &Field, gens: impl IntoIterator<Item = FieldElement>) -> Self {
        let mut s = Subspace::zero();
        for g in gens {
            s.insert(field, g);
        }
        s
    }

    /// The smallest `K`-subspace containing `xs`.
    pub fn span(field: &Field, xs: impl IntoIterator<Item = FieldElement>, k: Subfield) -> Self {
        let kb = k.basis(field);
        let mut s = Subspace::zero();
        for x in xs {
            for &c in &kb {
                s.insert(field, field.mul(c, x));
            }
        }
        s
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    pub fn size(&self, field: &Field) -> u64 {
        (field.p() as u64).pow(self.dim())
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Coset representative of `x + self`: the coset's least element.
    pub fn reduce(&self, field: &Field, mut x: FieldElement) -> FieldElement {
        for (&b, &pos) in self.basis.iter().zip(&self.pivots) {
            let c = field.digit(x, pos);
            if c != 0 {
                x = field.sub(x, field.mul(field.constant(c), b));
            }
        }
        x
    }

    pub fn contains(&self, field: &Field, x: FieldElement) -> bool {
        self.reduce(field, x).is_zero()
    }

    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> bool {
        other.basis.iter().all(|&b| self.contains(field, b))
    }

    /// Adds `x` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, field: &Field, x: FieldElement) -> bool {
        let x = self.reduce(field, x);
        let Some(pos) = field.leading_position(x) else {
            return false;
        };
        let lead = field.constant(field.digit(x, pos));
        let x = field.div(x, lead);
        for b in self.basis.iter_mut() {
            let c = field.digit(*b, pos);
            if c != 0 {
                *b = field.sub(*b, field.mul(field.constant(c), x));
            }
        }
        let at = self.pivots.partition_point(|&q| q > pos);
        self.pivots.insert(at, pos);
        self.basis.insert(at, x);
        true
    }

    /// Sum of subspaces.
    pub fn join(&self, field: &Field, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(field, b);
        }
        s
    }

    /// All elements, ascending.
    pub fn elements(&self, field: &Field) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::ZERO];
        for &b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * field.p() as usize);
            for c in 0..field.p() {
                let cb = field.mul(field.constant(c), b);
                next.extend(out.iter().map(|&x| field.add(x, cb)));
            }
            out = next;
        }
        out.sort_unstable();
        out
    }

    /// Whether `c·self ⊆ self`.
    pub fn is_closed_under(&self, field: &Field, c: FieldElement) -> bool {
        self.basis.iter().all(|&b| self.contains(field, field.mul(c, b)))
    }

    pub fn is_module_over(&self, field: &Field, k: Subfield) -> bool {
        self.is_closed_under(field, k.primitive(field))
    }
}

/// `H' = {x : xH ⊆ H}`, the largest subfield over which `H` is a module.
pub fn subfield_stabilizer(field: &Field, h: &Subspace) -> Subfield {
    let mut degrees = divisors(field.alpha() as u64);
    degrees.reverse();
    for m in degrees {
        let k = Subfield { degree: m as u32 };
        if h.is_module_over(field, k) {
            return k;
        }
    }
    unreachable!("every subspace is an F_p-module")
}

/// `F_q / H` with its least-element transversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSpace {
    denominator: Subspace,
    transversal: Vec<FieldElement>,
}

impl QuotientSpace {
    pub fn new(field: &Field, denominator: Subspace) -> Self {
        let transversal = field
            .elements()
            .filter(|&x| denominator.reduce(field, x) == x)
            .collect();
        QuotientSpace {
            denominator,
            transversal,
        }
    }

    pub fn denominator(&self) -> &Subspace {
        &self.denominator
    }

    /// Coset representatives, ascending; the first is 0.
    pub fn transversal(&self) -> &[FieldElement] {
        &self.transversal
    }

    pub fn representative(&self, field: &Field, x: FieldElement) -> FieldElement {
        self.denominator.reduce(field, x)
    }

    /// Each 1-dimensional `K`-subspace of the quotient, once, as its
    /// preimage in `F_q`. The denominator must be a `K`-module.
    pub fn lines(&self, field: &Field, k: Subfield) -> Vec<Subspace> {
        debug_assert!(self.denominator.is_module_over(field, k));
        let kb = k.basis(field);
        let mut covered: HashSet<FieldElement> = HashSet::new();
        let mut out = Vec::new();
        for &r in self.transversal.iter().skip(1) {
            if covered.contains(&r) {
                continue;
            }
            let mut line = self.denominator.clone();
            for &c in &kb {
                line.insert(field, field.mul(c, r));
            }
            for y in line.elements(field) {
                covered.insert(self.denominator.reduce(field, y));
            }
            out.push(line);
        }
        out
    }
}

/// The lines of `F_q / h` over `k`, as preimages.
pub fn lines_of_quotient(field: &Field, h: &Subspace, k: Subfield) -> Vec<Subspace> {
    QuotientSpace::new(field, h.clone()).lines(field, k)
}

/// Every `K`-subspace of `F_q`, ordered by dimension and then basis.
pub fn all_subspaces(field: &Field, k: Subfield) -> Vec<Subspace> {
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut frontier = vec![Subspace::zero()];
    seen.insert(Subspace::zero());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for line in lines_of_quotient(field, s, k) {
                if seen.insert(line.clone()) {
                    next.push(line);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Subspace> = seen.into_iter().collect();
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    out
}
