//! Independent checks for the closed forms: brute-force stabilizers, an
//! exhaustive census of all `k`-subsets, explicit subgroup enumeration and
//! the inclusion–exclusion sum over immediate supergroups.
//!
//! Nothing here calls into the closed-form evaluator except
//! [`three_way`], which exists to compare against it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::agl::{AffineMap, ImmediateSupergroup, SubgroupDesc};
use crate::counting::{binomial, mult_order, SubgroupClass};
use crate::error::{Error, Result};
use crate::ffield::{all_subspaces, subfield_stabilizer, Field, FieldElement, Subspace};

/// Limits for the exhaustive engines. Exceeding one is an error, never a
/// silent truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest field accepted by [`stabilizer`] and the subset scans.
    pub max_q: u64,
    /// Largest field accepted by [`all_subgroups`].
    pub subgroup_max_q: u64,
    /// Most subsets a single scan may visit.
    pub subset_budget: u64,
    /// Supergroup lists up to this length are walked over all `2^t`
    /// selections; longer ones are grouped by join.
    pub literal_walk_limit: usize,
    /// Most distinct joins the grouped walk may hold at once.
    pub lattice_state_budget: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_q: 4096,
            subgroup_max_q: 64,
            subset_budget: 10_000_000,
            literal_walk_limit: 16,
            lattice_state_budget: 100_000,
        }
    }
}

impl OracleConfig {
    fn check_q(&self, field: &Field) -> Result<()> {
        if field.q() as u64 > self.max_q {
            return Err(Error::BudgetExceeded(format!(
                "q = {} exceeds the oracle limit {}",
                field.q(),
                self.max_q
            )));
        }
        Ok(())
    }

    fn check_subsets(&self, what: &str, n: &BigUint) -> Result<()> {
        if *n > BigUint::from(self.subset_budget) {
            return Err(Error::BudgetExceeded(format!(
                "{what}: {n} subsets exceeds the budget {}",
                self.subset_budget
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// subsets

/// A subset of `F_q`; bit `x` is element index `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetBitmask {
    q: u32,
    words: Vec<u64>,
}

impl SubsetBitmask {
    pub fn empty(q: u32) -> Self {
        SubsetBitmask {
            q,
            words: vec![0; (q as usize).div_ceil(64)],
        }
    }

    pub fn full(q: u32) -> Self {
        let mut s = Self::empty(q);
        for x in 0..q {
            s.words[x as usize / 64] |= 1 << (x % 64);
        }
        s
    }

    pub fn from_elements(q: u32, xs: impl IntoIterator<Item = FieldElement>) -> Result<Self> {
        let mut s = Self::empty(q);
        for x in xs {
            s.insert(x)?;
        }
        Ok(s)
    }

    /// From element indices, as on the command line.
    pub fn from_indices(field: &Field, xs: &[u64]) -> Result<Self> {
        let mut s = Self::empty(field.q());
        for &x in xs {
            s.insert(field.element(x)?)?;
        }
        Ok(s)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn insert(&mut self, x: FieldElement) -> Result<()> {
        if x.index() >= self.q {
            return Err(Error::ElementOutOfRange {
                index: x.index() as u64,
                q: self.q as u64,
            });
        }
        self.words[x.index() as usize / 64] |= 1 << (x.index() % 64);
        Ok(())
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        x.index() < self.q && self.words[x.index() as usize / 64] >> (x.index() % 64) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.q).map(FieldElement).filter(|&x| self.contains(x)).collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = Self::full(self.q);
        for (w, &v) in s.words.iter_mut().zip(&self.words) {
            *w &= !v;
        }
        s
    }

    /// `{σ(x) : x ∈ self}`.
    pub fn image(&self, field: &Field, map: &AffineMap) -> Self {
        let mut s = Self::empty(self.q);
        for x in self.elements() {
            let y = map.apply(field, x);
            s.words[y.index() as usize / 64] |= 1 << (y.index() % 64);
        }
        s
    }

    /// Whether `σ(self) ⊆ self` (equivalently `=`, since `σ` is a bijection).
    pub fn is_fixed_by(&self, field: &Field, map: &AffineMap) -> bool {
        self.elements()
            .into_iter()
            .all(|x| self.contains(map.apply(field, x)))
    }
}

/// Ordered by the integer `Σ 2^x`.
impl Ord for SubsetBitmask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q
            .cmp(&other.q)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for SubsetBitmask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// stabilizers

/// `{σ ∈ AGL(1, F_q) : σ(B) = B}`, found by testing every map.
pub fn stabilizer(field: &Field, set: &SubsetBitmask, config: &OracleConfig) -> Result<SubgroupDesc> {
    config.check_q(field)?;
    if set.q() != field.q() {
        return Err(Error::InvalidArgument(format!(
            "subset over q = {} used with a field of order {}",
            set.q(),
            field.q()
        )));
    }
    Ok(stabilizer_unchecked(field, set))
}

fn stabilizer_unchecked(field: &Field, set: &SubsetBitmask) -> SubgroupDesc {
    // Fewer members means cheaper rejections; B and its complement share a
    // stabilizer.
    let owned;
    let set = if set.len() * 2 > field.q() as u64 {
        owned = set.complement();
        &owned
    } else {
        set
    };
    let members = set.elements();
    let mut maps = Vec::new();
    for a in field.elements().skip(1) {
        for b in field.elements() {
            let m = AffineMap::new(a, b).expect("a != 0");
            if members.iter().all(|&x| set.contains(m.apply(field, x))) {
                maps.push(m);
            }
        }
    }
    SubgroupDesc::from_group_elements(field, &maps).expect("a stabilizer is a subgroup")
}

/// Depth-first walk over selections of whole orbits with total size `k`,
/// in lexicographic order of orbit indices.
struct OrbitUnions<'a> {
    sizes: Vec<u64>,
    /// suffix[t] = total size of orbits t..
    suffix: Vec<u64>,
    orbits: &'a [Vec<FieldElement>],
    q: u32,
    k: u64,
    stack: Vec<usize>,
    total: u64,
    next: usize,
    done: bool,
}

impl<'a> OrbitUnions<'a> {
    fn new(q: u32, orbits: &'a [Vec<FieldElement>], k: u64) -> Self {
        let sizes: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
        let mut suffix = vec![0u64; sizes.len() + 1];
        for t in (0..sizes.len()).rev() {
            suffix[t] = suffix[t + 1] + sizes[t];
        }
        OrbitUnions {
            sizes,
            suffix,
            orbits,
            q,
            k,
            stack: Vec::new(),
            total: 0,
            next: 0,
            done: false,
        }
    }

    fn emit(&self) -> SubsetBitmask {
        let mut s = SubsetBitmask::empty(self.q);
        for &t in &self.stack {
            for &x in &self.orbits[t] {
                s.insert(x).expect("orbit element in range");
            }
        }
        s
    }
}

impl Iterator for OrbitUnions<'_> {
    type Item = SubsetBitmask;

    fn next(&mut self) -> Option<SubsetBitmask> {
        while !self.done {
            if self.total == self.k {
                let out = self.emit();
                self.backtrack();
                return Some(out);
            }
            let need = self.k - self.total;
            if self.next < self.sizes.len() && self.suffix[self.next] >= need {
                let t = self.next;
                if self.sizes[t] <= need {
                    self.stack.push(t);
                    self.total += self.sizes[t];
                }
                self.next = t + 1;
            } else {
                self.backtrack();
            }
        }
        None
    }
}

impl OrbitUnions<'_> {
    fn backtrack(&mut self) {
        match self.stack.pop() {
            Some(t) => {
                self.total -= self.sizes[t];
                self.next = t + 1;
            }
            None => self.done = true,
        }
    }
}

/// Every `k`-subset that is a union of orbits of `group`, i.e. the members
/// of `S'`, in a fixed order.
pub fn orbit_unions(
    field: &Field,
    group: &SubgroupDesc,
    k: u64,
    config: &OracleConfig,
) -> Result<Vec<SubsetBitmask>> {
    config.check_q(field)?;
    let n = group.fixed_subset_count(field, k)?;
    config.check_subsets("orbit unions", &n)?;
    let orbits = group.orbits(field).orbits;
    Ok(OrbitUnions::new(field.q(), &orbits, k).collect())
}

/// `N(S, k)` by computing the stabilizer of every member of `S'`.
pub fn count_n_bruteforce(
    field: &Field,
    group: &SubgroupDesc,
    k: u64,
    config: &OracleConfig,
) -> Result<BigUint> {
    config.check_q(field)?;
    let n = group.fixed_subset_count(field, k)?;
    config.check_subsets("orbit unions", &n)?;
    let orbits = group.orbits(field).orbits;
    let hits = OrbitUnions::new(field.q(), &orbits, k)
        .par_bridge()
        .filter(|b| stabilizer_unchecked(field, b) == *group)
        .count();
    Ok(BigUint::from(hits))
}

/// The first member of `S'` (in [`orbit_unions`] order) whose stabilizer is
/// exactly `group`.
pub fn find_witness(
    field: &Field,
    group: &SubgroupDesc,
    k: u64,
    config: &OracleConfig,
) -> Result<Option<SubsetBitmask>> {
    config.check_q(field)?;
    let n = group.fixed_subset_count(field, k)?;
    config.check_subsets("orbit unions", &n)?;
    let orbits = group.orbits(field).orbits;
    Ok(OrbitUnions::new(field.q(), &orbits, k).find(|b| stabilizer_unchecked(field, b) == *group))
}

// ---------------------------------------------------------------------------
// census

/// How many `k`-subsets have each subgroup as their exact stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCensus {
    pub q: u32,
    pub k: u64,
    pub counts: BTreeMap<SubgroupDesc, u64>,
}

impl StabilizerCensus {
    pub fn total(&self) -> BigUint {
        self.counts.values().map(|&c| BigUint::from(c)).sum()
    }

    pub fn get(&self, group: &SubgroupDesc) -> u64 {
        self.counts.get(group).copied().unwrap_or(0)
    }
}

/// Stabilizer of every `k`-subset of `F_q`.
pub fn full_census(field: &Field, k: u64, config: &OracleConfig) -> Result<StabilizerCensus> {
    config.check_q(field)?;
    let q = field.q();
    if k > q as u64 {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds q = {q}")));
    }
    config.check_subsets("census", &binomial(q as u64, k))?;
    let counts = (0..q)
        .combinations(k as usize)
        .par_bridge()
        .fold(HashMap::new, |mut acc: HashMap<SubgroupDesc, u64>, xs| {
            let set = SubsetBitmask::from_elements(q, xs.into_iter().map(FieldElement))
                .expect("indices below q");
            *acc.entry(stabilizer_unchecked(field, &set)).or_default() += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (g, c) in b {
                *a.entry(g).or_default() += c;
            }
            a
        });
    Ok(StabilizerCensus {
        q,
        k,
        counts: counts.into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// subgroups and classes

/// Every subgroup of `AGL(1, F_q)`, each once, ordered by `d`, then `H`,
/// then `b`.
pub fn all_subgroups(field: &Field, config: &OracleConfig) -> Result<Vec<SubgroupDesc>> {
    if field.q() as u64 > config.subgroup_max_q {
        return Err(Error::BudgetExceeded(format!(
            "q = {} exceeds the subgroup enumeration limit {}",
            field.q(),
            config.subgroup_max_q
        )));
    }
    let n = field.q() as u64 - 1;
    let p = field.p() as u64;
    let mut out = Vec::new();
    for d in crate::counting::divisors(n) {
        let k = field.subfield(mult_order(p, d)? as u32)?;
        for h in all_subspaces(field, k) {
            if d == 1 {
                out.push(SubgroupDesc::new(field, 1, FieldElement::ZERO, h)?);
                continue;
            }
            for b in field.elements().filter(|&x| h.reduce(field, x) == x) {
                out.push(SubgroupDesc::new(field, d, b, h.clone())?);
            }
        }
    }
    Ok(out)
}

/// The class `(d, i, j)` a subgroup belongs to.
pub fn class_of(field: &Field, group: &SubgroupDesc) -> Result<SubgroupClass> {
    let p = field.p() as u64;
    let alpha = field.alpha();
    let odp = mult_order(p, group.d())? as u32;
    let h = group.h();
    let (i, j) = if h.is_zero() {
        (alpha / odp, 0)
    } else {
        let deg = subfield_stabilizer(field, h).degree();
        (deg / odp, h.dim() / deg)
    };
    SubgroupClass::new(p, alpha, group.d(), i, j)
}

/// A subgroup `S(γ^((q-1)/d), 0, H)` of the given class.
pub fn class_representative(field: &Field, class: &SubgroupClass) -> Result<SubgroupDesc> {
    if class.p() != field.p() as u64 || class.alpha() != field.alpha() {
        return Err(Error::InvalidArgument(format!(
            "class for {}^{} used with a field of order {}",
            class.p(),
            class.alpha(),
            field.q()
        )));
    }
    let h = if class.beta() == 0 {
        Subspace::zero()
    } else {
        let hp = field.subfield(class.h_prime_degree())?;
        let mut gens = vec![FieldElement::ONE];
        extend_to_class(field, hp, class.j(), &mut gens, 1)
            .ok_or_else(|| Error::InvalidArgument(format!("no subspace for class {class}")))?
    };
    SubgroupDesc::new(field, class.d(), FieldElement::ZERO, h)
}

/// Backtracking search for an `H'`-subspace of `H'`-dimension `j` whose
/// stabilizer is exactly `H'`, spanned by `gens` plus later elements.
fn extend_to_class(
    field: &Field,
    hp: crate::ffield::Subfield,
    j: u32,
    gens: &mut Vec<FieldElement>,
    from: u32,
) -> Option<Subspace> {
    let span = Subspace::span(field, gens.iter().copied(), hp);
    if gens.len() as u32 == j {
        return (subfield_stabilizer(field, &span) == hp).then_some(span);
    }
    for x in from..field.q() {
        let x = FieldElement(x);
        if span.contains(field, x) {
            continue;
        }
        gens.push(x);
        if let Some(found) = extend_to_class(field, hp, j, gens, x.index() + 1) {
            return Some(found);
        }
        gens.pop();
    }
    None
}

// ---------------------------------------------------------------------------
// inclusion–exclusion over immediate supergroups

/// How the alternating sum over selections of supergroups is organised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeWalk {
    /// Every one of the `2^t` selections separately.
    Literal,
    /// Selections merged by their join, one supergroup at a time.
    Grouped,
}

/// The alternating sum `Σ (-1)^|I| [⟨S, S_I⟩ = T]` collected by `T`; terms
/// whose coefficients cancel are dropped.
pub fn lattice_expansion(
    field: &Field,
    group: &SubgroupDesc,
    config: &OracleConfig,
) -> Result<BTreeMap<SubgroupDesc, BigInt>> {
    let sups = group.immediate_supergroups(field)?;
    let walk = if sups.len() <= config.literal_walk_limit {
        LatticeWalk::Literal
    } else {
        LatticeWalk::Grouped
    };
    lattice_expansion_with(field, group, walk, config)
}

pub fn lattice_expansion_with(
    field: &Field,
    group: &SubgroupDesc,
    walk: LatticeWalk,
    config: &OracleConfig,
) -> Result<BTreeMap<SubgroupDesc, BigInt>> {
    let sups = group.immediate_supergroups(field)?;
    let t = sups.len();
    let mut out: BTreeMap<SubgroupDesc, BigInt> = BTreeMap::new();
    match walk {
        LatticeWalk::Literal => {
            if t > config.literal_walk_limit.min(30) {
                return Err(Error::BudgetExceeded(format!(
                    "{t} immediate supergroups is too many for a literal walk"
                )));
            }
            let joins: Vec<(SubgroupDesc, bool)> = (0u64..1 << t)
                .into_par_iter()
                .map(|mask| {
                    let sel: Vec<&ImmediateSupergroup> =
                        (0..t).filter(|&s| mask >> s & 1 == 1).map(|s| &sups[s]).collect();
                    group.join(field, &sel).map(|g| (g, mask.count_ones() % 2 == 1))
                })
                .collect::<Result<_>>()?;
            for (g, odd) in joins {
                let c = out.entry(g).or_insert_with(BigInt::zero);
                if odd {
                    *c -= 1;
                } else {
                    *c += 1;
                }
            }
        }
        LatticeWalk::Grouped => {
            // join -> (coefficient, one selection producing it)
            let mut states: HashMap<SubgroupDesc, (BigInt, Vec<usize>)> = HashMap::new();
            states.insert(group.clone(), (BigInt::one(), Vec::new()));
            for s in 0..t {
                let mut next: HashMap<SubgroupDesc, (BigInt, Vec<usize>)> = states.clone();
                for (c, sel) in states.values() {
                    let mut sel2 = sel.clone();
                    sel2.push(s);
                    let refs: Vec<&ImmediateSupergroup> = sel2.iter().map(|&u| &sups[u]).collect();
                    let g = group.join(field, &refs)?;
                    let e = next.entry(g).or_insert_with(|| (BigInt::zero(), sel2));
                    e.0 -= c;
                }
                next.retain(|_, (c, _)| !c.is_zero());
                if next.len() > config.lattice_state_budget {
                    return Err(Error::BudgetExceeded(format!(
                        "{} distinct joins exceeds the lattice state budget {}",
                        next.len(),
                        config.lattice_state_budget
                    )));
                }
                states = next;
            }
            out.extend(states.into_iter().map(|(g, (c, _))| (g, c)));
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// `N(S, k)` as `Σ c_T |T'|` over a precomputed expansion.
pub fn evaluate_expansion(
    field: &Field,
    expansion: &BTreeMap<SubgroupDesc, BigInt>,
    k: u64,
) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for (g, c) in expansion {
        total += c * BigInt::from(g.fixed_subset_count(field, k)?);
    }
    Ok(total)
}

/// `N(S, k)` by inclusion–exclusion over the immediate supergroups of `S`.
pub fn count_n_via_lattice(
    field: &Field,
    group: &SubgroupDesc,
    k: u64,
    config: &OracleConfig,
) -> Result<BigInt> {
    let expansion = lattice_expansion(field, group, config)?;
    evaluate_expansion(field, &expansion, k)
}

// ---------------------------------------------------------------------------
// agreement

/// Closed form, lattice and brute force for one class and one `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub class: SubgroupClass,
    pub k: u64,
    pub closed: BigInt,
    pub lattice: BigInt,
    pub brute: BigInt,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.closed == self.lattice && self.lattice == self.brute
    }
}

/// Runs all three evaluators on a representative of `class` for each `k`.
pub fn three_way(
    field: &Field,
    class: &SubgroupClass,
    ks: impl IntoIterator<Item = u64>,
    config: &OracleConfig,
) -> Result<Vec<Agreement>> {
    let rep = class_representative(field, class)?;
    let expansion = lattice_expansion(field, &rep, config)?;
    ks.into_iter()
        .map(|k| {
            Ok(Agreement {
                class: *class,
                k,
                closed: class.count(k)?,
                lattice: evaluate_expansion(field, &expansion, k)?,
                brute: count_n_bruteforce(field, &rep, k, config)?.into(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::s_qk;

    fn fe(x: u32) -> FieldElement {
        FieldElement(x)
    }

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn bitmask_basics() {
        let f = Field::new(7, 1).unwrap();
        let b = SubsetBitmask::from_indices(&f, &[1, 2, 4]).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.elements(), vec![fe(1), fe(2), fe(4)]);
        assert_eq!(b.complement().elements(), vec![fe(0), fe(3), fe(5), fe(6)]);
        assert!(SubsetBitmask::from_indices(&f, &[7]).is_err());
        let lo = SubsetBitmask::from_indices(&f, &[0, 1, 2]).unwrap();
        let hi = SubsetBitmask::from_indices(&f, &[3]).unwrap();
        assert!(lo < hi);
        let big = SubsetBitmask::from_elements(100, [fe(70)]).unwrap();
        let small = SubsetBitmask::from_elements(100, (0..64).map(fe)).unwrap();
        assert!(small < big);
    }

    #[test]
    fn stabilizer_examples() {
        let f = Field::new(7, 1).unwrap();
        let full = SubgroupDesc::full(&f);
        assert_eq!(stabilizer(&f, &SubsetBitmask::empty(7), &cfg()).unwrap(), full);
        assert_eq!(stabilizer(&f, &SubsetBitmask::full(7), &cfg()).unwrap(), full);
        let s = stabilizer(&f, &SubsetBitmask::from_indices(&f, &[1, 2, 4]).unwrap(), &cfg()).unwrap();
        assert_eq!(s, SubgroupDesc::new(&f, 3, fe(0), Subspace::zero()).unwrap());
        // singleton {x}: S(γ, (1-γ)x, {0})
        for q in [4u64, 5, 7, 8, 9] {
            let f = Field::with_order(q).unwrap();
            let g = f.generator();
            for x in f.elements() {
                let set = SubsetBitmask::from_elements(f.q(), [x]).unwrap();
                let b = f.mul(f.sub(FieldElement::ONE, g), x);
                let expect = SubgroupDesc::new(&f, q - 1, b, Subspace::zero()).unwrap();
                assert_eq!(stabilizer(&f, &set, &cfg()).unwrap(), expect);
            }
        }
    }

    #[test]
    fn stabilizer_respects_limit() {
        let f = Field::new(2, 5).unwrap();
        let tight = OracleConfig { max_q: 16, ..cfg() };
        assert!(matches!(
            stabilizer(&f, &SubsetBitmask::empty(32), &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn stabilizer_matches_direct_map_test() {
        let f = Field::new(3, 2).unwrap();
        for mask in [0b1u32, 0b11, 0b1011, 0b110010, 0b101010101] {
            let set = SubsetBitmask::from_elements(9, (0..9).filter(|x| mask >> x & 1 == 1).map(fe)).unwrap();
            let s = stabilizer(&f, &set, &cfg()).unwrap();
            for m in SubgroupDesc::full(&f).elements(&f) {
                assert_eq!(s.contains_map(&f, &m), set.image(&f, &m) == set, "{m:?}");
            }
        }
    }

    #[test]
    fn orbit_unions_enumerated_once() {
        for q in [5u64, 7, 8, 9] {
            let f = Field::with_order(q).unwrap();
            for g in all_subgroups(&f, &cfg()).unwrap() {
                for k in 0..=q {
                    let list = orbit_unions(&f, &g, k, &cfg()).unwrap();
                    assert_eq!(BigUint::from(list.len()), g.fixed_subset_count(&f, k).unwrap());
                    assert!(list.windows(2).all(|w| w[0] != w[1]));
                    for b in &list {
                        assert_eq!(b.len(), k);
                        // S ⊆ S'' : the stabilizer of a member contains S
                        assert!(g.is_subgroup_of(&f, &stabilizer(&f, b, &cfg()).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        let f = Field::new(7, 1).unwrap();
        let order3 = SubgroupDesc::new(&f, 3, fe(0), Subspace::zero()).unwrap();
        assert_eq!(count_n_bruteforce(&f, &order3, 3, &cfg()).unwrap(), BigUint::from(2u32));
        assert!(count_n_bruteforce(&f, &SubgroupDesc::trivial(), 3, &cfg()).unwrap().is_zero());
        for q in [3u64, 5, 7, 11, 13] {
            let f = Field::with_order(q).unwrap();
            let s = SubgroupDesc::new(&f, 2, fe(0), Subspace::zero()).unwrap();
            assert_eq!(count_n_bruteforce(&f, &s, 2, &cfg()).unwrap(), BigUint::from((q - 1) / 2));
        }
    }

    #[test]
    fn bruteforce_budget() {
        let f = Field::new(2, 4).unwrap();
        let tight = OracleConfig { subset_budget: 100, ..cfg() };
        assert!(matches!(
            count_n_bruteforce(&f, &SubgroupDesc::trivial(), 8, &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn census_q7_k3() {
        let f = Field::new(7, 1).unwrap();
        let c = full_census(&f, 3, &cfg()).unwrap();
        assert_eq!(c.total(), BigUint::from(35u32));
        let mut by_order: BTreeMap<u64, u64> = BTreeMap::new();
        for (g, &n) in &c.counts {
            *by_order.entry(g.order(&f)).or_default() += n;
        }
        assert_eq!(by_order, BTreeMap::from([(2, 21), (3, 14)]));
        let order3: Vec<_> = c.counts.iter().filter(|(g, _)| g.order(&f) == 3).collect();
        assert_eq!(order3.len(), 7);
        assert!(order3.iter().all(|(_, &n)| n == 2));
    }

    #[test]
    fn census_complement_symmetry() {
        let f = Field::new(2, 3).unwrap();
        for k in 0..=8 {
            assert_eq!(full_census(&f, k, &cfg()).unwrap().counts, full_census(&f, 8 - k, &cfg()).unwrap().counts);
        }
    }

    #[test]
    fn census_budget() {
        let f = Field::new(2, 5).unwrap();
        let tight = OracleConfig { subset_budget: 1000, ..cfg() };
        assert!(matches!(full_census(&f, 16, &tight), Err(Error::BudgetExceeded(_))));
    }

    /// Every subgroup reached by adjoining one map at a time to a known
    /// subgroup, starting from the trivial one; independent of the
    /// descriptor enumeration.
    fn subgroups_by_closure(field: &Field) -> Vec<SubgroupDesc> {
        let maps = SubgroupDesc::full(field).elements(field);
        let mut seen = std::collections::BTreeSet::from([SubgroupDesc::trivial()]);
        let mut frontier = vec![SubgroupDesc::trivial()];
        while let Some(g) = frontier.pop() {
            let mut gens: Vec<AffineMap> = g.elements(field);
            for m in &maps {
                gens.push(*m);
                let h = SubgroupDesc::canonicalize(field, &gens).unwrap();
                gens.pop();
                if seen.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn subgroup_enumeration() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(all_subgroups(&f2, &cfg()).unwrap().len(), 2);
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = Field::with_order(q).unwrap();
            let mut listed = all_subgroups(&f, &cfg()).unwrap();
            let n = listed.len();
            listed.sort();
            listed.dedup();
            assert_eq!(listed.len(), n, "duplicates at q = {q}");
            assert_eq!(listed, subgroups_by_closure(&f), "q = {q}");
            for g in &listed {
                let els: std::collections::HashSet<AffineMap> = g.elements(&f).into_iter().collect();
                for x in &els {
                    for y in &els {
                        assert!(els.contains(&x.compose(&f, y)));
                    }
                }
            }
        }
        let f = Field::new(2, 7).unwrap();
        assert!(matches!(all_subgroups(&f, &cfg()), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn representatives_round_trip() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 27, 25, 64] {
            let f = Field::with_order(q).unwrap();
            for class in SubgroupClass::all(f.p() as u64, f.alpha()).unwrap() {
                let rep = class_representative(&f, &class).unwrap();
                assert!(rep.b().is_zero());
                assert_eq!(class_of(&f, &rep).unwrap(), class, "q = {q}");
                assert_eq!(rep.order(&f), class.group_order());
            }
        }
    }

    #[test]
    fn every_subgroup_has_a_class() {
        for q in [4u64, 8, 9, 16] {
            let f = Field::with_order(q).unwrap();
            let classes = SubgroupClass::all(f.p() as u64, f.alpha()).unwrap();
            for g in all_subgroups(&f, &cfg()).unwrap() {
                assert!(classes.contains(&class_of(&f, &g).unwrap()));
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let f = Field::new(5, 1).unwrap();
        let s = SubgroupDesc::new(&f, 2, fe(0), Subspace::zero()).unwrap();
        assert_eq!(s.immediate_supergroups(&f).unwrap().len(), 2);
        assert_eq!(count_n_via_lattice(&f, &s, 2, &cfg()).unwrap(), BigInt::from(2));
        for q in [2u64, 5, 8, 9] {
            let f = Field::with_order(q).unwrap();
            let full = SubgroupDesc::full(&f);
            for k in 0..=q {
                let expect = if k == 0 || k == q { 1 } else { 0 };
                assert_eq!(count_n_via_lattice(&f, &full, k, &cfg()).unwrap(), BigInt::from(expect));
            }
        }
    }

    #[test]
    fn lattice_needs_b_zero() {
        let f = Field::new(7, 1).unwrap();
        let s = SubgroupDesc::new(&f, 3, fe(1), Subspace::zero()).unwrap();
        assert!(matches!(count_n_via_lattice(&f, &s, 3, &cfg()), Err(Error::NeedsConjugation)));
    }

    #[test]
    fn grouped_walk_matches_literal() {
        for q in [4u64, 5, 7, 8, 9, 11] {
            let f = Field::with_order(q).unwrap();
            let mut base = all_subgroups(&f, &cfg()).unwrap();
            base.retain(|g| g.b().is_zero());
            for g in base {
                if g.immediate_supergroups(&f).unwrap().len() > 16 {
                    continue;
                }
                let literal = lattice_expansion_with(&f, &g, LatticeWalk::Literal, &cfg()).unwrap();
                let grouped = lattice_expansion_with(&f, &g, LatticeWalk::Grouped, &cfg()).unwrap();
                assert_eq!(literal, grouped, "q = {q}, {g:?}");
            }
        }
    }

    #[test]
    fn lattice_matches_bruteforce_small() {
        for q in [3u64, 4, 5, 7, 8] {
            let f = Field::with_order(q).unwrap();
            for g in all_subgroups(&f, &cfg()).unwrap().into_iter().filter(|g| g.b().is_zero()) {
                for k in 0..=q {
                    let lattice = count_n_via_lattice(&f, &g, k, &cfg()).unwrap();
                    let brute = BigInt::from(count_n_bruteforce(&f, &g, k, &cfg()).unwrap());
                    assert_eq!(lattice, brute, "q = {q}, k = {k}, {g:?}");
                    assert!(brute <= BigInt::from(s_qk(q, k, g.d(), g.h().size(&f))));
                }
            }
        }
    }

    #[test]
    fn three_way_q9() {
        let f = Field::new(3, 2).unwrap();
        for class in SubgroupClass::all(3, 2).unwrap() {
            for row in three_way(&f, &class, 0..=9, &cfg()).unwrap() {
                assert!(row.agrees(), "{row:?}");
            }
        }
    }
}
