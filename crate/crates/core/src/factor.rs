//! Divisibility, atoms, factorizations, sets of lengths, catenary degrees,
//! and the constructive refuters (primality, absolute irreducibility,
//! ω-invariant lower bounds).
//!
//! Divisibility search works through quotients: B divides A iff
//! B + Q = A for the maximal candidate complement Q = {c : c + B ⊆ A}
//! (intersected with the ambient monoid in the unrestricted case). Exactness
//! is the contract; every enumeration is budgeted and every certificate is
//! re-verified before it is returned.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::Submonoid;
use crate::set::FiniteSet;

/// The monoid a computation lives in: the restricted power monoid
/// P_fin,0(S) of sets containing 0, or the full power monoid P_fin(S).
#[derive(Clone, Debug)]
pub enum Ambient {
    Restricted(Submonoid),
    Unrestricted(Submonoid),
}

impl Ambient {
    pub fn restricted_natural() -> Self {
        Ambient::Restricted(Submonoid::natural())
    }

    pub fn unrestricted_natural() -> Self {
        Ambient::Unrestricted(Submonoid::natural())
    }

    pub fn monoid(&self) -> &Submonoid {
        match self {
            Ambient::Restricted(s) | Ambient::Unrestricted(s) => s,
        }
    }

    pub fn is_restricted(&self) -> bool {
        matches!(self, Ambient::Restricted(_))
    }

    pub fn contains(&self, a: &FiniteSet) -> bool {
        let member = self.monoid().contains_set(a);
        match self {
            Ambient::Restricted(_) => member && a.contains(0),
            Ambient::Unrestricted(_) => member,
        }
    }

    fn check_member(&self, name: &str, a: &FiniteSet) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::OutsideAmbient(format!("{name} = {a}")))
        }
    }
}

/// Does `b` divide `a` in the ambient monoid? Returns a complement C with
/// B + C = A when it does.
pub fn divides(b: &FiniteSet, a: &FiniteSet, ambient: &Ambient) -> Result<Option<FiniteSet>> {
    ambient.check_member("B", b)?;
    ambient.check_member("A", a)?;
    Ok(divide_quotient(b, a, ambient))
}

/// Internal, membership already vouched for.
fn divide_quotient(b: &FiniteSet, a: &FiniteSet, ambient: &Ambient) -> Option<FiniteSet> {
    if b.max_elem() > a.max_elem() || b.min_elem() > a.min_elem() {
        return None;
    }
    let mut q = a.quotient(b)?;
    match ambient {
        Ambient::Restricted(_) => {
            // the complement must contain 0, which forces B ⊆ A
            if !q.contains(0) {
                return None;
            }
        }
        Ambient::Unrestricted(s) => {
            if !s.is_natural() {
                q = q.intersection(&s.elements_up_to(a.max_elem() - b.max_elem()))?;
            }
            // min(C) is forced to min(A) − min(B)
            if !q.contains(a.min_elem() - b.min_elem()) {
                return None;
            }
        }
    }
    if b.sumset(&q).ok()? == *a {
        Some(q)
    } else {
        None
    }
}

/// All divisors of `a` in the ambient monoid, in ascending canonical order
/// (max, then lexicographic). The length of the list is τ_S(A).
pub fn divisors(a: &FiniteSet, ambient: &Ambient, budget: &Budget) -> Result<Vec<FiniteSet>> {
    ambient.check_member("A", a)?;
    let mut out: Vec<FiniteSet> = Vec::new();
    match ambient {
        Ambient::Restricted(_) => {
            let nonzero: Vec<u32> = a.iter().filter(|&x| x != 0).collect();
            for mask in 0u64..1u64 << nonzero.len() {
                budget.spend(1)?;
                let b = subset_with(&nonzero, mask, Some(0));
                if divide_quotient(&b, a, ambient).is_some() {
                    out.push(b);
                }
            }
        }
        Ambient::Unrestricted(s) => {
            for b0 in 0..=a.min_elem() {
                if !s.contains(b0) || !s.contains(a.min_elem() - b0) {
                    continue;
                }
                let c0 = a.min_elem() - b0;
                let cand: Vec<u32> = (b0 + 1..=a.max_elem().saturating_sub(c0))
                    .filter(|&x| s.contains(x) && a.contains(x + c0))
                    .collect();
                for mask in 0u64..1u64 << cand.len() {
                    budget.spend(1)?;
                    let b = subset_with(&cand, mask, Some(b0));
                    if divide_quotient(&b, a, ambient).is_some() {
                        out.push(b);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn subset_with(pool: &[u32], mask: u64, forced: Option<u32>) -> FiniteSet {
    let chosen = pool
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &x)| x)
        .chain(forced);
    FiniteSet::from_elements(chosen).expect("nonempty by forced element")
}

/// Outcome of an irreducibility test. A decomposition certificate always
/// re-sums to the input with both parts of cardinality ≥ 2, or with a
/// singleton non-unit part in the unrestricted case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AtomCheck {
    Atom,
    Decomposable { left: FiniteSet, right: FiniteSet },
}

impl AtomCheck {
    pub fn is_atom(&self) -> bool {
        matches!(self, AtomCheck::Atom)
    }
}

/// Is `a` irreducible in the ambient monoid? The identity {0} is rejected.
///
/// Restricted: an atom is not a sumset B + C with |B|, |C| ≥ 2 and
/// 0 ∈ B ∩ C (candidates are automatically inside S, being subsets of A).
/// Unrestricted: singleton factors {k}, k ∈ S ∖ {0}, count as well, and
/// genuine two-part splits must stay inside S.
pub fn is_atom(a: &FiniteSet, ambient: &Ambient, budget: &Budget) -> Result<AtomCheck> {
    if a.is_zero() {
        return Err(Error::IdentityInput);
    }
    ambient.check_member("A", a)?;
    match ambient {
        Ambient::Restricted(_) => restricted_atom_check(a, budget),
        Ambient::Unrestricted(s) => unrestricted_atom_check(a, s, budget),
    }
}

fn restricted_atom_check(a: &FiniteSet, budget: &Budget) -> Result<AtomCheck> {
    // In any B + C = A one part has max ≤ max(A)/2; both parts are ⊆ A.
    let half: Vec<u32> = a.iter().filter(|&x| x > 0 && x <= a.max_elem() / 2).collect();
    // pairs first: they certify most decomposable sets quickly
    for &x in &half {
        budget.spend(1)?;
        let b = FiniteSet::from_elements([0, x])?;
        if let Some(q) = pair_check(a, &b) {
            return Ok(AtomCheck::Decomposable { left: b, right: q });
        }
    }
    for mask in 0u64..1u64 << half.len() {
        if mask.count_ones() < 2 {
            continue;
        }
        budget.spend(1)?;
        let b = subset_with(&half, mask, Some(0));
        if let Some(q) = pair_check(a, &b) {
            return Ok(AtomCheck::Decomposable { left: b, right: q });
        }
    }
    Ok(AtomCheck::Atom)
}

fn pair_check(a: &FiniteSet, b: &FiniteSet) -> Option<FiniteSet> {
    let q = a.quotient(b)?;
    if q.cardinality() >= 2 && b.sumset(&q).ok()? == *a {
        Some(q)
    } else {
        None
    }
}

fn unrestricted_atom_check(a: &FiniteSet, s: &Submonoid, budget: &Budget) -> Result<AtomCheck> {
    // P_fin(N0) splits off the prime {1}: strip the minimum as a singleton
    // factor and reduce to the restricted test.
    if s.is_natural() && a.min_elem() > 0 {
        return Ok(if *a == FiniteSet::singleton(1)? {
            AtomCheck::Atom
        } else if a.cardinality() == 1 {
            AtomCheck::Decomposable {
                left: FiniteSet::singleton(1)?,
                right: FiniteSet::singleton(a.min_elem() - 1)?,
            }
        } else {
            AtomCheck::Decomposable {
                left: FiniteSet::singleton(a.min_elem())?,
                right: a.shift_down(a.min_elem()),
            }
        });
    }
    if a.cardinality() == 1 {
        let m = a.min_elem();
        for x in 1..=m / 2 {
            budget.spend(1)?;
            if s.contains(x) && s.contains(m - x) {
                return Ok(AtomCheck::Decomposable {
                    left: FiniteSet::singleton(x)?,
                    right: FiniteSet::singleton(m - x)?,
                });
            }
        }
        return Ok(AtomCheck::Atom);
    }
    // singleton route: A = {k} + (A − k) with k ∈ S ∖ {0}, A − k ⊆ S
    for k in 1..=a.min_elem() {
        budget.spend(1)?;
        if s.contains(k) && a.iter().all(|x| s.contains(x - k)) {
            return Ok(AtomCheck::Decomposable {
                left: FiniteSet::singleton(k)?,
                right: a.shift_down(k),
            });
        }
    }
    // genuine splits B + C = A with |B|, |C| ≥ 2, both inside S
    for b0 in 0..=a.min_elem() {
        if !s.contains(b0) || !s.contains(a.min_elem() - b0) {
            continue;
        }
        let c0 = a.min_elem() - b0;
        let cand: Vec<u32> = (b0 + 1..=a.max_elem().saturating_sub(c0))
            .filter(|&x| s.contains(x) && a.contains(x + c0))
            .collect();
        for mask in 1u64..1u64 << cand.len() {
            budget.spend(1)?;
            let b = subset_with(&cand, mask, Some(b0));
            if let Some(q) = divide_quotient(&b, a, &Ambient::Unrestricted(s.clone())) {
                if q.cardinality() >= 2 {
                    return Ok(AtomCheck::Decomposable { left: b, right: q });
                }
            }
        }
    }
    Ok(AtomCheck::Atom)
}

/// A multiset of atoms summing to a target, parts in non-increasing
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Factorization {
    pub parts: Vec<FiniteSet>,
}

impl Factorization {
    pub fn length(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn sum(&self) -> Result<FiniteSet> {
        let mut acc = FiniteSet::zero();
        for p in &self.parts {
            acc = acc.sumset(p)?;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

struct ZContext<'a> {
    ambient: &'a Ambient,
    budget: &'a Budget,
    memo: HashMap<FiniteSet, Rc<Vec<Factorization>>>,
    atom_cache: HashMap<FiniteSet, bool>,
}

impl<'a> ZContext<'a> {
    fn is_atom_cached(&mut self, b: &FiniteSet) -> Result<bool> {
        if let Some(&v) = self.atom_cache.get(b) {
            return Ok(v);
        }
        let v = is_atom(b, self.ambient, self.budget)?.is_atom();
        self.atom_cache.insert(b.clone(), v);
        Ok(v)
    }

    /// All complements C in the ambient with B + C = target.
    fn complements(&mut self, b: &FiniteSet, target: &FiniteSet) -> Result<Vec<FiniteSet>> {
        let Some(mut q) = target.quotient(b) else {
            return Ok(Vec::new());
        };
        if let Ambient::Unrestricted(s) = self.ambient {
            if !s.is_natural() {
                match q.intersection(&s.elements_up_to(target.max_elem() - b.max_elem())) {
                    Some(qi) => q = qi,
                    None => return Ok(Vec::new()),
                }
            }
        }
        // min(C) is forced: 0 in the restricted case, min(target) − min(B)
        // in the unrestricted case.
        let forced = match self.ambient {
            Ambient::Restricted(_) => 0,
            Ambient::Unrestricted(_) => target.min_elem() - b.min_elem(),
        };
        if !q.contains(forced) {
            return Ok(Vec::new());
        }
        let pool: Vec<u32> = q.iter().filter(|&x| x != forced).collect();
        let mut out = Vec::new();
        for mask in 0u64..1u64 << pool.len() {
            self.budget.spend(1)?;
            let c = subset_with(&pool, mask, Some(forced));
            if b.sumset(&c)? == *target {
                out.push(c);
            }
        }
        Ok(out)
    }

    fn z_all(&mut self, target: &FiniteSet) -> Result<Rc<Vec<Factorization>>> {
        if let Some(z) = self.memo.get(target) {
            return Ok(z.clone());
        }
        if target.is_zero() {
            let z = Rc::new(vec![Factorization { parts: Vec::new() }]);
            self.memo.insert(target.clone(), z.clone());
            return Ok(z);
        }
        self.budget.spend(1)?;
        let mut found: BTreeSet<Vec<FiniteSet>> = BTreeSet::new();
        let candidates = divisors(target, self.ambient, self.budget)?;
        for b in candidates {
            if b.is_zero() || !self.is_atom_cached(&b)? {
                continue;
            }
            for c in self.complements(&b, target)? {
                for z in self.z_all(&c)?.iter() {
                    // canonical descent: b is the greatest part
                    let fits = z
                        .parts
                        .first()
                        .is_none_or(|p| p.canonical_cmp(&b) != std::cmp::Ordering::Greater);
                    if fits {
                        let mut parts = Vec::with_capacity(z.parts.len() + 1);
                        parts.push(b.clone());
                        parts.extend(z.parts.iter().cloned());
                        found.insert(parts);
                    }
                }
            }
        }
        let z = Rc::new(
            found
                .into_iter()
                .map(|parts| Factorization { parts })
                .collect::<Vec<_>>(),
        );
        self.memo.insert(target.clone(), z.clone());
        Ok(z)
    }
}

/// The complete set of factorizations Z(A), deduplicated as multisets and
/// sorted canonically. Z({0}) is the single empty factorization.
pub fn factorizations(a: &FiniteSet, ambient: &Ambient, budget: &Budget) -> Result<Vec<Factorization>> {
    ambient.check_member("A", a)?;
    if let Ambient::Unrestricted(s) = ambient {
        // P_fin(N0) = F({1}) ⊕ P_fin,0(N0): strip min(A) as {1}-factors
        if s.is_natural() && a.min_elem() > 0 {
            let restricted = Ambient::restricted_natural();
            let shifted = a.shift_down(a.min_elem());
            let one = FiniteSet::singleton(1)?;
            let zs = factorizations(&shifted, &restricted, budget)?;
            return Ok(zs
                .into_iter()
                .map(|mut z| {
                    z.parts.extend(std::iter::repeat_n(one.clone(), a.min_elem() as usize));
                    Factorization { parts: z.parts }
                })
                .collect());
        }
    }
    let mut ctx = ZContext {
        ambient,
        budget,
        memo: HashMap::new(),
        atom_cache: HashMap::new(),
    };
    let z = ctx.z_all(a)?;
    Ok(z.as_ref().clone())
}

/// The set of lengths L(A) with its distance set Δ(L).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthSet {
    pub lengths: Vec<u32>,
    pub delta: Vec<u32>,
}

pub fn length_set(a: &FiniteSet, ambient: &Ambient, budget: &Budget) -> Result<LengthSet> {
    let zs = factorizations(a, ambient, budget)?;
    let mut lengths: Vec<u32> = zs.iter().map(|z| z.length()).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let delta = lengths.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(LengthSet { lengths, delta })
}

/// Distance between factorizations: remove the greatest common multiset
/// part, then take the larger residual length.
pub fn distance(z1: &Factorization, z2: &Factorization) -> u32 {
    let mut common = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    // parts are sorted non-increasing
    while i < z1.parts.len() && j < z2.parts.len() {
        match z1.parts[i].canonical_cmp(&z2.parts[j]) {
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Greater => i += 1,
            std::cmp::Ordering::Less => j += 1,
        }
    }
    ((z1.parts.len() - common).max(z2.parts.len() - common)) as u32
}

/// The catenary degree c(A): the least M such that any two factorizations
/// of A are joined by a chain with step distance ≤ M; 0 when |Z(A)| ≤ 1.
pub fn catenary_degree(a: &FiniteSet, ambient: &Ambient, budget: &Budget) -> Result<u32> {
    let zs = factorizations(a, ambient, budget)?;
    if zs.len() <= 1 {
        return Ok(0);
    }
    // bottleneck spanning value via Kruskal
    let mut edges: Vec<(u32, usize, usize)> = Vec::new();
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            budget.spend(1)?;
            edges.push((distance(&zs[i], &zs[j]), i, j));
        }
    }
    edges.sort_unstable();
    let mut parent: Vec<usize> = (0..zs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = zs.len();
    let mut bottleneck = 0;
    for (d, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            components -= 1;
            bottleneck = bottleneck.max(d);
            if components == 1 {
                break;
            }
        }
    }
    Ok(bottleneck)
}

/// A certified lower bound ω(P_fin,0(S), {0,a}) ≥ n + 2, following the
/// witness family A_{m,n} = m{0,2a} + {0,2a,3a} + {0,a,a(2n+5)}.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaWitness {
    pub element: u32,
    pub n: u32,
    pub bound: u32,
    pub pair_atom: FiniteSet,
    pub triple_atom: FiniteSet,
    pub long_atom: FiniteSet,
    pub target: FiniteSet,
    pub quotient: FiniteSet,
    pub subsums_checked: u32,
}

/// Verifies, for each m ∈ [1, n], the closed form
/// A_{m,n} = a·([0, 2m+4] ∪ {2n+5} ∪ [2n+7, 2m+2n+8]), that {0,a} divides
/// A_{n,n}, and that {0,a} divides no proper subsum of its n+2 atoms.
/// Any failed check is an error, never a silently weakened bound.
pub fn omega_lower_bound(s: &Submonoid, a: u32, n: u32) -> Result<OmegaWitness> {
    if a == 0 || !s.contains(a) {
        return Err(Error::Precondition(format!("a = {a} must be a nonzero element of S = {s}")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let budget = Budget::default();
    let ambient = Ambient::Restricted(s.clone());
    let pair = FiniteSet::from_elements([0, 2 * a])?;
    let triple = FiniteSet::from_elements([0, 2 * a, 3 * a])?;
    let long = FiniteSet::from_elements([0, a, a * (2 * n + 5)])?;
    for (name, atom) in [("pair", &pair), ("triple", &triple), ("long", &long)] {
        if !is_atom(atom, &ambient, &budget)?.is_atom() {
            return Err(Error::VerificationFailed(format!("{name} part {atom} is not an atom")));
        }
    }
    let witness = FiniteSet::from_elements([0, a])?;
    let mut target = FiniteSet::zero();
    for m in 1..=n {
        target = pair.k_fold(m)?.sumset(&triple)?.sumset(&long)?;
        let closed = FiniteSet::interval(0, 2 * m + 4)?
            .union(&FiniteSet::singleton(2 * n + 5)?)
            .union(&FiniteSet::interval(2 * n + 7, 2 * m + 2 * n + 8)?)
            .dilate(a)?;
        if target != closed {
            return Err(Error::VerificationFailed(format!(
                "closed form mismatch at m = {m}: sumset {target}, formula {closed}"
            )));
        }
    }
    let quotient = divides(&witness, &target, &ambient)?.ok_or_else(|| {
        Error::VerificationFailed(format!("{witness} should divide the full sum {target}"))
    })?;
    let mut subsums_checked = 0;
    for m in 0..=n {
        for with_triple in [false, true] {
            for with_long in [false, true] {
                if (m, with_triple, with_long) == (n, true, true) {
                    continue;
                }
                let mut sub = pair.k_fold(m)?;
                if with_triple {
                    sub = sub.sumset(&triple)?;
                }
                if with_long {
                    sub = sub.sumset(&long)?;
                }
                if sub.is_zero() {
                    continue;
                }
                if divides(&witness, &sub, &ambient)?.is_some() {
                    return Err(Error::VerificationFailed(format!(
                        "{witness} divides the proper subsum {sub} (m = {m})"
                    )));
                }
                subsums_checked += 1;
            }
        }
    }
    Ok(OmegaWitness {
        element: a,
        n,
        bound: n + 2,
        pair_atom: pair,
        triple_atom: triple,
        long_atom: long,
        target,
        quotient,
        subsums_checked,
    })
}

/// Outcome of the primality refuter in P_fin(S).
#[derive(Clone, Debug, Serialize)]
pub enum PrimeOutcome {
    /// Only {1} over ℕ₀ earns this.
    Prime,
    /// A | left + right, A ∤ left, A ∤ right; `quotient` solves
    /// A + quotient = left + right. All three facts were verified.
    NotPrime {
        left: FiniteSet,
        right: FiniteSet,
        quotient: FiniteSet,
    },
}

/// Produces a verified witness that `a` is not a prime element of
/// P_fin(S), or reports primality for {1} over ℕ₀.
pub fn prime_counterexample(a: &FiniteSet, s: &Submonoid) -> Result<PrimeOutcome> {
    if a.is_zero() {
        return Err(Error::IdentityInput);
    }
    if !s.contains_set(a) {
        return Err(Error::OutsideAmbient(format!("A = {a}")));
    }
    if s.is_trivial() {
        return Err(Error::TrivialMonoid);
    }
    let d = s.scale();
    let reduced_monoid = s.reduced();
    let reduced_set = a.contract(d);
    let outcome = prime_counterexample_reduced(&reduced_set, &reduced_monoid)?;
    match outcome {
        PrimeOutcome::Prime => Ok(PrimeOutcome::Prime),
        PrimeOutcome::NotPrime { left, right, quotient } if d > 1 => Ok(PrimeOutcome::NotPrime {
            left: left.dilate(d)?,
            right: right.dilate(d)?,
            quotient: quotient.dilate(d)?,
        }),
        other => Ok(other),
    }
}

fn prime_counterexample_reduced(a: &FiniteSet, s: &Submonoid) -> Result<PrimeOutcome> {
    let ambient = Ambient::Unrestricted(s.clone());
    let verify = |left: FiniteSet, right: FiniteSet| -> Result<PrimeOutcome> {
        if divide_quotient(a, &left, &ambient).is_some() {
            return Err(Error::VerificationFailed(format!("A divides the left factor {left}")));
        }
        if divide_quotient(a, &right, &ambient).is_some() {
            return Err(Error::VerificationFailed(format!("A divides the right factor {right}")));
        }
        let product = left.sumset(&right)?;
        let quotient = divide_quotient(a, &product, &ambient).ok_or_else(|| {
            Error::VerificationFailed(format!("A does not divide {left} + {right}"))
        })?;
        Ok(PrimeOutcome::NotPrime { left, right, quotient })
    };

    if a.cardinality() == 1 {
        let k = a.min_elem();
        if s.is_natural() {
            if k == 1 {
                return Ok(PrimeOutcome::Prime);
            }
            return verify(FiniteSet::singleton(k - 1)?, FiniteSet::singleton(k - 1)?);
        }
        // bounded search over singleton pairs from S ∖ {0}
        let hi = 2 * (s.frobenius() + k + 2);
        for x in 1..=hi {
            if !s.contains(x) || (x >= k && s.contains(x - k)) {
                continue;
            }
            for y in x..=hi {
                if !s.contains(y) || (y >= k && s.contains(y - k)) {
                    continue;
                }
                let sum = x + y;
                if sum >= k && s.contains(sum - k) {
                    return verify(FiniteSet::singleton(x)?, FiniteSet::singleton(y)?);
                }
            }
        }
        return Err(Error::SearchExhausted(format!(
            "no singleton witness pair for {{{k}}} over {s} below {hi}"
        )));
    }

    if s.is_natural() && *a == FiniteSet::from_elements([0, 1])? {
        // the fixed witness from the structure of [0,6]
        return verify(FiniteSet::from_elements([0, 2, 3])?, FiniteSet::from_elements([0, 1, 3])?);
    }

    // interval construction: B = [m, 2m] ∖ {m+b}, C = [m, 2m] ∖ {2m−b}
    let elems = a.to_vec();
    let b_gap = elems[1] - elems[0];
    let f = s.frobenius();
    let start = (f + 1).max(b_gap + 1).max(a.max_elem()).max(2);
    for m in start..start + 256 {
        if 2 * m < a.min_elem() || 4 * m < a.max_elem() {
            continue;
        }
        let (lo, hi) = (2 * m - a.min_elem(), 4 * m - a.max_elem());
        if lo > hi || lo <= f {
            continue;
        }
        let interval = FiniteSet::interval(lo, hi)?;
        if a.sumset(&interval)? != FiniteSet::interval(2 * m, 4 * m)? {
            continue;
        }
        let left = FiniteSet::interval(m, 2 * m)?.without(m + b_gap)?;
        let right = FiniteSet::interval(m, 2 * m)?.without(2 * m - b_gap)?;
        // the punctured intervals only recover [2m, 4m] once m is large
        // enough relative to the gap
        if left.sumset(&right)? != FiniteSet::interval(2 * m, 4 * m)? {
            continue;
        }
        if divide_quotient(a, &left, &ambient).is_some()
            || divide_quotient(a, &right, &ambient).is_some()
        {
            continue;
        }
        return verify(left, right);
    }
    Err(Error::SearchExhausted(format!(
        "interval construction found no verified witness for A = {a} over {s}"
    )))
}

/// Two distinct factorizations of NA, witnessing that the atom A is not
/// absolutely irreducible.
#[derive(Clone, Debug, Serialize)]
pub struct StrongAtomRefutation {
    pub n: u32,
    pub first: Factorization,
    pub second: Factorization,
}

/// Finds the least N ≤ cap with |Z(NA)| > 1. The lone absolutely
/// irreducible element {1} of P_fin(ℕ₀) is rejected up front.
pub fn strong_atom_refuter(
    a: &FiniteSet,
    ambient: &Ambient,
    budget: &Budget,
    cap: u32,
) -> Result<StrongAtomRefutation> {
    if !is_atom(a, ambient, budget)?.is_atom() {
        return Err(Error::Precondition(format!("A = {a} is not an atom of the ambient")));
    }
    if !ambient.is_restricted() && ambient.monoid().is_natural() && *a == FiniteSet::singleton(1)? {
        return Err(Error::Precondition(
            "{1} is absolutely irreducible in P_fin(N0); no refutation exists".into(),
        ));
    }
    for n in 2..=cap {
        let target = a.k_fold(n)?;
        let zs = factorizations(&target, ambient, budget)?;
        if zs.len() > 1 {
            return Ok(StrongAtomRefutation {
                n,
                first: zs[0].clone(),
                second: zs[1].clone(),
            });
        }
    }
    Err(Error::SearchExhausted(format!(
        "|Z(NA)| = 1 for all N <= {cap}; raise the cap"
    )))
}

/// Element and cardinality caps for the length-set search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_element: u32,
    pub max_cardinality: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_element: 16,
            max_cardinality: 8,
        }
    }
}

/// Searches for a set whose set of lengths equals `l` (a finite set of
/// integers ≥ 2), ascending by (max, cardinality, lexicographic order).
/// `None` means "not found within bounds" — explicitly inconclusive.
pub fn search_length_set(
    l: &[u32],
    ambient: &Ambient,
    bounds: SearchBounds,
    budget: &Budget,
) -> Result<Option<FiniteSet>> {
    if l.is_empty() {
        return Err(Error::Precondition("target length set is empty".into()));
    }
    let mut target: Vec<u32> = l.to_vec();
    target.sort_unstable();
    target.dedup();
    if target[0] < 2 {
        return Err(Error::Precondition(
            "target lengths must all be at least 2".into(),
        ));
    }
    let s = ambient.monoid();
    for max_elem in 1..=bounds.max_element {
        if !s.contains(max_elem) {
            continue;
        }
        let pool: Vec<u32> = match ambient {
            Ambient::Restricted(_) => (1..max_elem).filter(|&x| s.contains(x)).collect(),
            Ambient::Unrestricted(_) => (0..max_elem).filter(|&x| s.contains(x)).collect(),
        };
        let forced: &[u32] = match ambient {
            Ambient::Restricted(_) => &[0, max_elem],
            Ambient::Unrestricted(_) => &[max_elem],
        };
        let max_extra = bounds.max_cardinality.saturating_sub(forced.len());
        for extra in 0..=max_extra.min(pool.len()) {
            let mut combo: Vec<usize> = (0..extra).collect();
            loop {
                budget.spend(1)?;
                let cand = FiniteSet::from_elements(
                    combo.iter().map(|&i| pool[i]).chain(forced.iter().copied()),
                )?;
                let ls = length_set(&cand, ambient, budget)?;
                if ls.lengths == target {
                    return Ok(Some(cand));
                }
                if !next_combination(&mut combo, pool.len()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Advance index combination to the next one in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
