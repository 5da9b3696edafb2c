//! The affine group `AGL(1, F_q)` and its subgroups `S(a, b, H)`.
//!
//! Every subgroup is `<(a, b)> ⋉ H̄` where `H̄` is the group of
//! translations by an `F_p(a)`-subspace `H`. A [`SubgroupDesc`] stores the
//! canonical form: `a = γ^((q-1)/d)`, `b` the least element of `b + H`
//! (zero when `d = 1`), and `H` in reduced echelon form, so two descriptors
//! are equal exactly when the subgroups are.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counting::{binomial, mult_order, prime_set};
use crate::error::{Error, Result};
use crate::ffield::{lines_of_quotient, subfield_stabilizer, Field, FieldElement, Subspace};

/// `x ↦ a·x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    a: FieldElement,
    b: FieldElement,
}

impl AffineMap {
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::ZeroMultiplier);
        }
        Ok(AffineMap { a, b })
    }

    pub fn identity() -> Self {
        AffineMap {
            a: FieldElement::ONE,
            b: FieldElement::ZERO,
        }
    }

    pub fn translation(c: FieldElement) -> Self {
        AffineMap {
            a: FieldElement::ONE,
            b: c,
        }
    }

    pub fn a(&self) -> FieldElement {
        self.a
    }
    pub fn b(&self) -> FieldElement {
        self.b
    }

    pub fn apply(&self, field: &Field, x: FieldElement) -> FieldElement {
        field.add(field.mul(self.a, x), self.b)
    }

    /// `self ∘ other`: `(a1, b1)∘(a2, b2) = (a1·a2, a1·b2 + b1)`.
    pub fn compose(&self, field: &Field, other: &AffineMap) -> AffineMap {
        AffineMap {
            a: field.mul(self.a, other.a),
            b: field.add(field.mul(self.a, other.b), self.b),
        }
    }

    pub fn inverse(&self, field: &Field) -> AffineMap {
        let ai = field.inv(self.a).expect("nonzero multiplier");
        AffineMap {
            a: ai,
            b: field.neg(field.mul(ai, self.b)),
        }
    }

    /// `(a, b)^l = (a^l, b·(a^l - 1)/(a - 1))`, with the fraction read as
    /// `l` when `a = 1`.
    pub fn pow(&self, field: &Field, l: i64) -> AffineMap {
        let al = field.pow(self.a, l);
        let b = if self.a == FieldElement::ONE {
            let c = field.constant(l.rem_euclid(field.p() as i64) as u32);
            field.mul(c, self.b)
        } else {
            let num = field.sub(al, FieldElement::ONE);
            let den = field.sub(self.a, FieldElement::ONE);
            field.mul(field.div(num, den), self.b)
        };
        AffineMap { a: al, b }
    }
}

/// One immediate supergroup of `S(a, 0, H)` together with the data that
/// produced it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SupergroupStep {
    /// Multiplier order grows by the prime `prime`; `offset` is the
    /// translation part (a coset representative of `H`, always zero when
    /// the base has `d > 1`).
    Multiplier { prime: u64, offset: FieldElement },
    /// `H` grows to the preimage of a line of `F_q / H`.
    Translations { line: Subspace },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImmediateSupergroup {
    pub step: SupergroupStep,
    pub group: SubgroupDesc,
}

/// Canonical descriptor of `S(γ^((q-1)/d), b, H)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupDesc {
    d: u64,
    b: FieldElement,
    h: Subspace,
}

/// Orbits of a subgroup on `F_q`, each sorted, ordered by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<Vec<FieldElement>>,
}

impl OrbitPartition {
    /// `(size, multiplicity)` pairs, ascending by size.
    pub fn sizes(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        let mut sizes: Vec<u64> = self.orbits.iter().map(|o| o.len() as u64).collect();
        sizes.sort_unstable();
        for s in sizes {
            match out.last_mut() {
                Some((t, c)) if *t == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }
}

/// Number of ways to pick whole orbits, given as `(size, count)` pairs,
/// with total size `k`.
pub fn orbit_union_count(profile: &[(u64, u64)], k: u64) -> BigUint {
    // ways[t] = number of selections with total size t
    let mut ways = vec![BigUint::zero(); k as usize + 1];
    ways[0] = BigUint::from(1u32);
    for &(size, count) in profile {
        let mut next = vec![BigUint::zero(); k as usize + 1];
        for (t, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for m in 0..=count {
                let total = t as u64 + m * size;
                if total > k {
                    break;
                }
                next[total as usize] += w * binomial(count, m);
            }
        }
        ways = next;
    }
    ways.pop().unwrap()
}

impl SubgroupDesc {
    /// Builds the canonical descriptor of `S(γ^((q-1)/d), b, H)`.
    pub fn new(field: &Field, d: u64, b: FieldElement, h: Subspace) -> Result<Self> {
        let n = field.q() as u64 - 1;
        if d == 0 || n % d != 0 {
            return Err(Error::InvalidDescriptor(format!("d = {d} does not divide q - 1 = {n}")));
        }
        if b.index() >= field.q() {
            return Err(Error::ElementOutOfRange {
                index: b.index() as u64,
                q: field.q() as u64,
            });
        }
        let a = field.gamma_pow(n / d);
        if !h.is_closed_under(field, a) {
            return Err(Error::InvalidDescriptor(
                "H is not closed under multiplication by a".into(),
            ));
        }
        let b = h.reduce(field, b);
        if d == 1 && !b.is_zero() {
            return Err(Error::InvalidDescriptor("b must lie in H when a = 1".into()));
        }
        Ok(SubgroupDesc { d, b, h })
    }

    pub fn trivial() -> Self {
        SubgroupDesc {
            d: 1,
            b: FieldElement::ZERO,
            h: Subspace::zero(),
        }
    }

    /// `AGL(1, F_q) = S(γ, 0, F_q)`.
    pub fn full(field: &Field) -> Self {
        SubgroupDesc {
            d: field.q() as u64 - 1,
            b: FieldElement::ZERO,
            h: Subspace::whole(field),
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn b(&self) -> FieldElement {
        self.b
    }
    pub fn h(&self) -> &Subspace {
        &self.h
    }

    /// `a = γ^((q-1)/d)`.
    pub fn multiplier(&self, field: &Field) -> FieldElement {
        field.gamma_pow((field.q() as u64 - 1) / self.d)
    }

    pub fn generator(&self, field: &Field) -> AffineMap {
        AffineMap {
            a: self.multiplier(field),
            b: self.b,
        }
    }

    /// `|S| = d·|H|`.
    pub fn order(&self, field: &Field) -> u64 {
        self.d * self.h.size(field)
    }

    pub fn contains_map(&self, field: &Field, map: &AffineMap) -> bool {
        let a = self.multiplier(field);
        let (Some(la), Some(lx)) = (field.log(a), field.log(map.a)) else {
            return false;
        };
        // map.a must be a power a^l; then map ∈ (a, b)^l · H̄.
        let l = match (la, lx) {
            (0, 0) => 0,
            (0, _) => return false,
            _ if lx % la != 0 => return false,
            _ => lx / la,
        };
        let base = AffineMap { a, b: self.b }.pow(field, l as i64);
        debug_assert_eq!(base.a, map.a);
        self.h.contains(field, field.sub(map.b, base.b))
    }

    /// Whether `self ⊆ other`.
    pub fn is_subgroup_of(&self, field: &Field, other: &SubgroupDesc) -> bool {
        other.h.contains_subspace(field, &self.h) && other.contains_map(field, &self.generator(field))
    }

    /// The `d·|H|` elements `(a, b)^l ∘ (1, h)`.
    pub fn elements(&self, field: &Field) -> Vec<AffineMap> {
        let g = self.generator(field);
        let hs = self.h.elements(field);
        let mut out = Vec::with_capacity(self.d as usize * hs.len());
        let mut power = AffineMap::identity();
        for _ in 0..self.d {
            for &h in &hs {
                out.push(power.compose(field, &AffineMap::translation(h)));
            }
            power = g.compose(field, &power);
        }
        out
    }

    /// Canonical descriptor of a finite set of maps that forms a group.
    pub fn from_group_elements(field: &Field, elements: &[AffineMap]) -> Result<Self> {
        let mut h = Subspace::zero();
        for m in elements {
            if m.a == FieldElement::ONE {
                h.insert(field, m.b);
            }
        }
        let hsize = h.size(field);
        let total = elements.len() as u64;
        if total == 0 || total % hsize != 0 {
            return Err(Error::InvalidDescriptor("element set is not a subgroup".into()));
        }
        let d = total / hsize;
        let a = field.gamma_pow((field.q() as u64 - 1) / d);
        let with_a = elements
            .iter()
            .find(|m| m.a == a)
            .ok_or_else(|| Error::InvalidDescriptor("multiplier group is not cyclic of order d".into()))?;
        let b = if d == 1 { FieldElement::ZERO } else { with_a.b };
        SubgroupDesc::new(field, d, b, h)
    }

    /// Canonical descriptor of the subgroup generated by `generators`,
    /// found by closing under composition.
    pub fn canonicalize(field: &Field, generators: &[AffineMap]) -> Result<Self> {
        let limit = field.q() as usize * (field.q() as usize - 1);
        let mut seen: HashSet<AffineMap> = HashSet::new();
        seen.insert(AffineMap::identity());
        let mut frontier = vec![AffineMap::identity()];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = g.compose(field, &x);
                if seen.insert(y) {
                    if seen.len() > limit {
                        return Err(Error::InvalidArgument("maps do not belong to this field".into()));
                    }
                    frontier.push(y);
                }
            }
        }
        let elements: Vec<AffineMap> = seen.into_iter().collect();
        Self::from_group_elements(field, &elements)
    }

    /// Conjugates by the translation `x ↦ x + c`, `c = b/(a - 1)`, to reach
    /// `S(a, 0, H)`. Returns the conjugate and the translation.
    pub fn conjugate_to_b_zero(&self, field: &Field) -> Result<(SubgroupDesc, AffineMap)> {
        if self.b.is_zero() {
            return Ok((self.clone(), AffineMap::identity()));
        }
        if self.d == 1 {
            return Err(Error::InvalidDescriptor("b != 0 with a = 1".into()));
        }
        let a = self.multiplier(field);
        let c = field.div(self.b, field.sub(a, FieldElement::ONE));
        let conj = SubgroupDesc {
            d: self.d,
            b: FieldElement::ZERO,
            h: self.h.clone(),
        };
        Ok((conj, AffineMap::translation(c)))
    }

    /// The minimal subgroups strictly containing `S(a, 0, H)`.
    pub fn immediate_supergroups(&self, field: &Field) -> Result<Vec<ImmediateSupergroup>> {
        if !self.b.is_zero() {
            return Err(Error::NeedsConjugation);
        }
        let n = field.q() as u64 - 1;
        let p = field.p() as u64;
        let hprime = subfield_stabilizer(field, &self.h).order(field);
        let mut out = Vec::new();
        if self.d == 1 {
            let transversal: Vec<FieldElement> = field
                .elements()
                .filter(|&x| self.h.reduce(field, x) == x)
                .collect();
            for e in prime_set(hprime - 1)? {
                for &b in &transversal {
                    let group = SubgroupDesc::new(field, e, b, self.h.clone())?;
                    out.push(ImmediateSupergroup {
                        step: SupergroupStep::Multiplier { prime: e, offset: b },
                        group,
                    });
                }
            }
            for line in lines_of_quotient(field, &self.h, field.prime_subfield()) {
                let group = SubgroupDesc::new(field, 1, FieldElement::ZERO, line.clone())?;
                out.push(ImmediateSupergroup {
                    step: SupergroupStep::Translations { line },
                    group,
                });
            }
        } else {
            for e in prime_set((hprime - 1) / self.d)? {
                let group = SubgroupDesc::new(field, self.d * e, FieldElement::ZERO, self.h.clone())?;
                out.push(ImmediateSupergroup {
                    step: SupergroupStep::Multiplier {
                        prime: e,
                        offset: FieldElement::ZERO,
                    },
                    group,
                });
            }
            let k = field.subfield(mult_order(p, self.d)? as u32)?;
            for line in lines_of_quotient(field, &self.h, k) {
                let group = SubgroupDesc::new(field, self.d, FieldElement::ZERO, line.clone())?;
                out.push(ImmediateSupergroup {
                    step: SupergroupStep::Translations { line },
                    group,
                });
            }
        }
        debug_assert!(out.iter().all(|s| n % s.group.d == 0));
        Ok(out)
    }

    /// Orbit sizes as `(size, count)` pairs, from the descriptor alone.
    pub fn orbit_profile(&self, field: &Field) -> Vec<(u64, u64)> {
        let q = field.q() as u64;
        let v = self.h.size(field);
        if self.d == 1 {
            vec![(v, q / v)]
        } else if v == q {
            vec![(v, 1)]
        } else {
            vec![(v, 1), (self.d * v, (q - v) / (self.d * v))]
        }
    }

    /// The partition of `F_q` into orbits.
    pub fn orbits(&self, field: &Field) -> OrbitPartition {
        let hs = self.h.elements(field);
        let q = field.q() as usize;
        let mut assigned = vec![false; q];
        let mut orbits = Vec::new();
        let g = self.generator(field);
        for x in field.elements() {
            if assigned[x.index() as usize] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut y = x;
            // σ^l(x) + H for l = 0.. until the coset repeats
            loop {
                let rep = self.h.reduce(field, y);
                if assigned[rep.index() as usize] {
                    break;
                }
                for &h in &hs {
                    let z = field.add(rep, h);
                    assigned[z.index() as usize] = true;
                    orbit.push(z);
                }
                y = g.apply(field, y);
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        OrbitPartition { orbits }
    }

    /// `|S'|`: the number of `k`-subsets fixed setwise by every element.
    pub fn fixed_subset_count(&self, field: &Field, k: u64) -> Result<BigUint> {
        if k > field.q() as u64 {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds q = {}", field.q())));
        }
        Ok(orbit_union_count(&self.orbit_profile(field), k))
    }

    /// The subgroup generated by `self` and the selected immediate
    /// supergroups, from the closed join formulas. `self` must have `b = 0`.
    pub fn join(&self, field: &Field, selection: &[&ImmediateSupergroup]) -> Result<SubgroupDesc> {
        self.join_with_anchor(field, selection, 0)
    }

    /// As [`join`](Self::join), choosing the `anchor`-th element of
    /// `{offset/(γ^((q-1)/e) - 1)}` as the base point when `d = 1`.
    pub(crate) fn join_with_anchor(
        &self,
        field: &Field,
        selection: &[&ImmediateSupergroup],
        anchor: usize,
    ) -> Result<SubgroupDesc> {
        if !self.b.is_zero() {
            return Err(Error::NeedsConjugation);
        }
        let n = field.q() as u64 - 1;
        let p = field.p() as u64;
        let mut primes = BTreeSet::new();
        let mut anchors: Vec<FieldElement> = Vec::new();
        let mut gens: Vec<FieldElement> = self.h.basis().to_vec();
        for sel in selection {
            if !self.is_subgroup_of(field, &sel.group) || sel.group == *self {
                return Err(Error::BadSelection("entry does not strictly contain the base".into()));
            }
            match &sel.step {
                SupergroupStep::Multiplier { prime, offset } => {
                    if sel.group.d != self.d * prime || sel.group.h != self.h {
                        return Err(Error::BadSelection(format!(
                            "multiplier step by {prime} does not match its group"
                        )));
                    }
                    if self.d > 1 && !offset.is_zero() {
                        return Err(Error::BadSelection("offset must be zero when d > 1".into()));
                    }
                    primes.insert(*prime);
                    if self.d == 1 {
                        let ae = field.gamma_pow(n / prime);
                        anchors.push(field.div(*offset, field.sub(ae, FieldElement::ONE)));
                    }
                }
                SupergroupStep::Translations { line } => {
                    if sel.group.h != *line || sel.group.d != self.d {
                        return Err(Error::BadSelection("line step does not match its group".into()));
                    }
                    gens.extend_from_slice(line.basis());
                }
            }
        }
        let pi: u64 = primes.iter().product();
        let d = self.d * pi;
        let k = field.subfield(mult_order(p, d)? as u32)?;
        let a = field.gamma_pow(n / d);
        let b = if anchors.is_empty() {
            FieldElement::ZERO
        } else {
            let u = anchors[anchor % anchors.len()];
            for &v in &anchors {
                gens.push(field.sub(v, u));
            }
            field.mul(field.sub(a, FieldElement::ONE), u)
        };
        let h = Subspace::span(field, gens, k);
        SubgroupDesc::new(field, d, b, h)
    }
}
