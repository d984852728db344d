//! Divisor-closed submonoids of P_fin,0(ℕ₀).
//!
//! Every divisor-closed submonoid is named canonically by a triple
//! (d, S, T): it equals d · (P_fin,0(S) ∩ rev(P_fin,0(T))) for numerical
//! monoids S and T. The triple supports exact membership tests, maximal
//! divisor-closed submonoid (MDCS) enumeration, fingerprint trees that
//! separate non-isomorphic power monoids, generator search, and the
//! torsion/transfer counterexample identities.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::Submonoid;
use crate::set::FiniteSet;

/// Hard cap on fingerprint recursion.
const MAX_FINGERPRINT_DEPTH: u32 = 6;

/// The canonical name (d, S, T) of a divisor-closed submonoid
/// d · (P_fin,0(S) ∩ rev(P_fin,0(T))), or the degenerate {{0}}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcsDescriptor {
    trivial: bool,
    scale: u32,
    s: Submonoid,
    t: Submonoid,
}

impl DcsDescriptor {
    pub fn new(scale: u32, s: Submonoid, t: Submonoid) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Precondition("descriptor scale must be positive".into()));
        }
        for (name, m) in [("S", &s), ("T", &t)] {
            if m.is_trivial() {
                return Err(Error::TrivialMonoid);
            }
            if m.scale() != 1 {
                return Err(Error::NotNumerical(format!(
                    "descriptor component {name} = {m} must be numerical"
                )));
            }
        }
        Ok(DcsDescriptor {
            trivial: false,
            scale,
            s,
            t,
        })
    }

    /// The descriptor of the degenerate submonoid {{0}}.
    pub fn trivial() -> Self {
        DcsDescriptor {
            trivial: true,
            scale: 1,
            s: Submonoid::trivial(),
            t: Submonoid::trivial(),
        }
    }

    /// The full monoid P_fin,0(ℕ₀).
    pub fn full() -> Self {
        DcsDescriptor::new(1, Submonoid::natural(), Submonoid::natural()).expect("valid")
    }

    /// P_fin,0(S) as a divisor-closed submonoid of P_fin,0(ℕ₀).
    pub fn restricted_power_monoid(s: &Submonoid) -> Result<Self> {
        if s.is_trivial() {
            return Ok(DcsDescriptor::trivial());
        }
        DcsDescriptor::new(s.scale(), s.reduced(), Submonoid::natural())
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn s(&self) -> &Submonoid {
        &self.s
    }

    pub fn t(&self) -> &Submonoid {
        &self.t
    }

    /// Set containment of the named submonoids: componentwise containment
    /// of d·S and d·T.
    pub fn contains_descriptor(&self, other: &DcsDescriptor) -> bool {
        if other.trivial {
            return true;
        }
        if self.trivial {
            return false;
        }
        other.s.dilated(other.scale).is_submonoid_of(&self.s.dilated(self.scale))
            && other.t.dilated(other.scale).is_submonoid_of(&self.t.dilated(self.scale))
    }
}

impl std::fmt::Display for DcsDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.trivial {
            return write!(f, "{{{{0}}}}");
        }
        write!(f, "(d={}, S={}, T={})", self.scale, self.s, self.t)
    }
}

impl Serialize for DcsDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DcsDescriptor", 4)?;
        st.serialize_field("trivial", &self.trivial)?;
        st.serialize_field("d", &self.scale)?;
        st.serialize_field("S", &self.s)?;
        st.serialize_field("T", &self.t)?;
        st.end()
    }
}

/// ⟦A⟧: the smallest divisor-closed submonoid containing A, named by
/// (gcd A, ⟨A/d⟩, ⟨rev(A/d)⟩). A = {0} yields the trivial descriptor.
pub fn dcs_of(a: &FiniteSet) -> Result<DcsDescriptor> {
    if !a.contains(0) {
        return Err(Error::Precondition(
            "A must contain 0 (strip singleton factors first)".into(),
        ));
    }
    if a.is_zero() {
        return Ok(DcsDescriptor::trivial());
    }
    let norm = a.normalize();
    let s = Submonoid::span(&norm.core)?;
    let t = Submonoid::span(&norm.core.reversion())?;
    DcsDescriptor::new(norm.scale, s, t)
}

/// Membership of B in the named submonoid: d divides every element,
/// B/d ⊆ S, and rev(B/d) ⊆ T.
pub fn dcs_contains(descriptor: &DcsDescriptor, b: &FiniteSet) -> Result<bool> {
    if !b.contains(0) {
        return Err(Error::Precondition("B must contain 0".into()));
    }
    if descriptor.trivial {
        return Ok(b.is_zero());
    }
    if b.is_zero() {
        return Ok(true);
    }
    if b.iter().any(|x| x % descriptor.scale != 0) {
        return Ok(false);
    }
    let reduced = b.contract(descriptor.scale);
    Ok(descriptor.s.contains_set(&reduced) && descriptor.t.contains_set(&reduced.reversion()))
}

/// ⟦A⟧ = P_fin,0(ℕ₀) iff 1 ∈ A ∩ rev(A).
pub fn is_full(a: &FiniteSet) -> Result<bool> {
    if !a.contains(0) {
        return Err(Error::Precondition("A must contain 0".into()));
    }
    Ok(a.contains(1) && a.reversion().contains(1))
}

/// The maximal divisor-closed submonoids: (d, S ∖ {a}, T) for atoms a of S
/// and (d, S, T ∖ {b}) for atoms b of T.
pub fn mdcs(descriptor: &DcsDescriptor) -> Result<Vec<DcsDescriptor>> {
    if descriptor.trivial {
        return Err(Error::TrivialMonoid);
    }
    let mut out = Vec::new();
    for s_child in descriptor.s.maximal_submonoids()? {
        out.push(DcsDescriptor::new(descriptor.scale, s_child, descriptor.t.clone())?);
    }
    for t_child in descriptor.t.maximal_submonoids()? {
        out.push(DcsDescriptor::new(descriptor.scale, descriptor.s.clone(), t_child)?);
    }
    Ok(out)
}

/// An MDCS-count tree: `count` children at this node, recursively expanded
/// to the requested depth, children in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fingerprint {
    pub count: usize,
    pub children: Vec<Fingerprint>,
}

impl Fingerprint {
    /// The multiset of child counts, ascending.
    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = self.children.iter().map(|c| c.count).collect();
        counts.sort_unstable();
        counts
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Node<'a>(&'a Fingerprint);
        impl Serialize for Node<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                if self.0.children.is_empty() {
                    serializer.serialize_u64(self.0.count as u64)
                } else {
                    self.0.serialize(serializer)
                }
            }
        }
        let mut st = serializer.serialize_struct("Fingerprint", 2)?;
        st.serialize_field("root", &self.count)?;
        let children: Vec<Node> = self.children.iter().map(Node).collect();
        st.serialize_field("children", &children)?;
        st.end()
    }
}

/// The fingerprint of a descriptor to the given depth (≥ 1). Two monoids
/// with different fingerprints are non-isomorphic; equal fingerprints
/// decide nothing.
pub fn mdcs_fingerprint(descriptor: &DcsDescriptor, depth: u32, budget: &Budget) -> Result<Fingerprint> {
    if depth == 0 {
        return Err(Error::Precondition("fingerprint depth must be at least 1".into()));
    }
    if depth > MAX_FINGERPRINT_DEPTH {
        return Err(Error::DepthExceeded(depth, MAX_FINGERPRINT_DEPTH));
    }
    budget.spend(1)?;
    let children_descriptors = mdcs(descriptor)?;
    let count = children_descriptors.len();
    let mut children = Vec::new();
    if depth > 1 {
        for child in &children_descriptors {
            children.push(mdcs_fingerprint(child, depth - 1, budget)?);
        }
        children.sort();
    }
    Ok(Fingerprint { count, children })
}

/// Finds a set A with ⟦A⟧ equal to the named submonoid, i.e. ⟨A⟩ = S and
/// ⟨rev A⟩ = T after removing the scale. The candidate shape is
/// {0} ∪ 𝒜(S) ∪ (M − ({0} ∪ 𝒜(T))) for increasing M; every candidate is
/// verified by span checks before being returned (the existence proof is
/// non-effective, so post-verification carries the correctness).
pub fn dcs_generator(descriptor: &DcsDescriptor, budget: &Budget) -> Result<FiniteSet> {
    if descriptor.trivial {
        return Err(Error::TrivialMonoid);
    }
    let s = &descriptor.s;
    let t = &descriptor.t;
    let verify = |cand: &FiniteSet| -> Result<bool> {
        Ok(Submonoid::span(cand)? == *s && Submonoid::span(&cand.reversion())? == *t)
    };
    let max_atom = *s.atoms().last().unwrap();
    let horizon = s.frobenius() + t.frobenius() + max_atom + *t.atoms().last().unwrap() + 64;
    for m in max_atom..=horizon {
        budget.spend(1)?;
        if !s.contains(m) || t.atoms().iter().any(|&b| b > m || !s.contains(m - b)) {
            continue;
        }
        let cand = FiniteSet::from_elements(
            std::iter::once(0)
                .chain(s.atoms().iter().copied())
                .chain(std::iter::once(m))
                .chain(t.atoms().iter().map(|&b| m - b)),
        )?;
        if verify(&cand)? {
            return scale_up(&cand, descriptor.scale);
        }
    }
    // randomized fallback, deterministic seed
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let pool: Vec<u32> = (1..=horizon).filter(|&x| s.contains(x)).collect();
    for _ in 0..4096 {
        budget.spend(1)?;
        let mut elems = vec![0u32];
        for &x in &pool {
            if rng.random::<bool>() {
                elems.push(x);
            }
        }
        let cand = FiniteSet::from_elements(elems)?;
        if verify(&cand)? {
            return scale_up(&cand, descriptor.scale);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no generator found for {descriptor} within the search horizon"
    )))
}

fn scale_up(a: &FiniteSet, scale: u32) -> Result<FiniteSet> {
    if scale == 1 {
        Ok(a.clone())
    } else {
        a.dilate(scale)
    }
}

/// The verified counterexample families living in a divisor-closed
/// submonoid H = d · (P_fin,0(S) ∩ rev(P_fin,0(T))):
///
/// * F = B + C = B + D + D — obstructs transfer homomorphisms to
///   cancellative monoids;
/// * A + A = B + B with A = B ∖ {2dn} ≠ B — torsion-freeness fails.
#[derive(Clone, Debug, Serialize)]
pub struct NoncancellativeWitnesses {
    pub n_star: u32,
    pub n: u32,
    pub b: FiniteSet,
    pub c: FiniteSet,
    pub d: FiniteSet,
    pub f: FiniteSet,
    pub torsion_a: FiniteSet,
    pub square: FiniteSet,
}

/// Builds B_n = {0} ∪ d·[n, 3n] ∪ {4dn}, C_n = {0, 2dn}, D_n = {0, dn},
/// F_n = {0} ∪ d·[n, 5n] ∪ {6dn}, verifies membership of each in the
/// descriptor and both identities, and fails loudly otherwise. `n` defaults
/// to the least threshold n* with d·ℕ≥n* ⊆ S ∩ T.
pub fn noncancellative_witnesses(
    descriptor: &DcsDescriptor,
    n: Option<u32>,
) -> Result<NoncancellativeWitnesses> {
    if descriptor.trivial {
        return Err(Error::TrivialMonoid);
    }
    let n_star = descriptor.s.frobenius().max(descriptor.t.frobenius()) + 1;
    let n = n.unwrap_or(n_star);
    if n < n_star {
        return Err(Error::Precondition(format!("n = {n} is below the threshold n* = {n_star}")));
    }
    let d = descriptor.scale;
    let b = FiniteSet::zero()
        .union(&FiniteSet::interval(n, 3 * n)?.dilate(d)?)
        .union(&FiniteSet::singleton(4 * d * n)?);
    let c = FiniteSet::from_elements([0, 2 * d * n])?;
    let dd = FiniteSet::from_elements([0, d * n])?;
    let f = FiniteSet::zero()
        .union(&FiniteSet::interval(n, 5 * n)?.dilate(d)?)
        .union(&FiniteSet::singleton(6 * d * n)?);
    let torsion_a = b.without(2 * d * n)?;
    for (name, set) in [("B", &b), ("C", &c), ("D", &dd), ("F", &f), ("A", &torsion_a)] {
        if !dcs_contains(descriptor, set)? {
            return Err(Error::VerificationFailed(format!(
                "{name} = {set} is not a member of {descriptor}"
            )));
        }
    }
    if b.sumset(&c)? != f {
        return Err(Error::VerificationFailed("B + C differs from F".into()));
    }
    if b.sumset(&dd)?.sumset(&dd)? != f {
        return Err(Error::VerificationFailed("B + D + D differs from F".into()));
    }
    let square = b.sumset(&b)?;
    if torsion_a.sumset(&torsion_a)? != square {
        return Err(Error::VerificationFailed("(B ∖ {2dn}) + (B ∖ {2dn}) differs from B + B".into()));
    }
    let expected_square = FiniteSet::zero()
        .union(&FiniteSet::interval(n, 7 * n)?.dilate(d)?)
        .union(&FiniteSet::singleton(8 * d * n)?);
    if square != expected_square {
        return Err(Error::VerificationFailed("B + B differs from its closed form".into()));
    }
    Ok(NoncancellativeWitnesses {
        n_star,
        n,
        b,
        c,
        d: dd,
        f,
        torsion_a,
        square,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> FiniteSet {
        s.parse().unwrap()
    }

    fn monoid(s: &str) -> Submonoid {
        s.parse().unwrap()
    }

    #[test]
    fn dcs_of_examples() {
        let d = dcs_of(&set("{0,1,3}")).unwrap();
        assert!(d.s().is_natural());
        assert_eq!(d.t().atoms(), &[2, 3]);
        assert_eq!(d.scale(), 1);

        let d = dcs_of(&set("{0,1}")).unwrap();
        assert_eq!(d, DcsDescriptor::full());

        let d = dcs_of(&set("{0,2,6}")).unwrap();
        assert_eq!(d.scale(), 2);
        assert!(d.s().is_natural());
        assert_eq!(d.t().atoms(), &[2, 3]);

        assert!(dcs_of(&FiniteSet::zero()).unwrap().is_trivial());
        assert!(dcs_of(&set("{1,2}")).is_err());
    }

    #[test]
    fn dcs_membership() {
        let d = dcs_of(&set("{0,1,3}")).unwrap();
        // rev({0,1,2}) = {0,1,2} contains 1, which is outside T = <2,3>
        assert!(!dcs_contains(&d, &set("{0,1,2}")).unwrap());
        assert!(dcs_contains(&d, &set("{0,1,3}")).unwrap());
        assert!(dcs_contains(&d, &FiniteSet::zero()).unwrap());
        assert!(dcs_contains(&DcsDescriptor::full(), &set("{0,5,9}")).unwrap());
        let t = DcsDescriptor::trivial();
        assert!(dcs_contains(&t, &FiniteSet::zero()).unwrap());
        assert!(!dcs_contains(&t, &set("{0,1}")).unwrap());
    }

    #[test]
    fn membership_agrees_with_bounded_divisibility() {
        // B ∈ ⟦A⟧ iff B divides some NA; check against a direct search
        use crate::factor::{divides, Ambient};
        let amb = Ambient::restricted_natural();
        for a_str in ["{0,1,3}", "{0,2,3}", "{0,1}"] {
            let a = set(a_str);
            let d = dcs_of(&a).unwrap();
            for mask in 0u32..128 {
                let b = FiniteSet::from_elements(
                    std::iter::once(0).chain((0..7).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)),
                )
                .unwrap();
                let member = dcs_contains(&d, &b).unwrap();
                let divides_some = (1..=24).any(|n| {
                    divides(&b, &a.k_fold(n).unwrap(), &amb).unwrap().is_some()
                });
                assert_eq!(member, divides_some, "A = {a_str}, B = {b}");
            }
        }
    }

    #[test]
    fn fullness_criterion() {
        assert!(is_full(&set("{0,1,4,5}")).unwrap());
        assert!(!is_full(&set("{0,1,3}")).unwrap());
        assert!(!is_full(&set("{0,2,3}")).unwrap());
    }

    #[test]
    fn mdcs_of_full_monoid() {
        let children = mdcs(&DcsDescriptor::full()).unwrap();
        assert_eq!(children.len(), 2);
        assert_eq!(children[0].s().atoms(), &[2, 3]);
        assert!(children[0].t().is_natural());
        assert!(children[1].s().is_natural());
        assert_eq!(children[1].t().atoms(), &[2, 3]);
    }

    #[test]
    fn mdcs_counts_follow_atom_counts() {
        let d = DcsDescriptor::restricted_power_monoid(&monoid("<2,5>")).unwrap();
        let children = mdcs(&d).unwrap();
        assert_eq!(children.len(), 3);
        // removing atom 2 leaves <4,5,6,7>, removing 5 leaves <2,7>
        assert_eq!(children[0].s().atoms(), &[4, 5, 6, 7]);
        assert_eq!(children[1].s().atoms(), &[2, 7]);
        assert_eq!(children[2].t().atoms(), &[2, 3]);

        let d = DcsDescriptor::restricted_power_monoid(&monoid("<4,5>")).unwrap();
        assert_eq!(mdcs(&d).unwrap().len(), 3);
    }

    #[test]
    fn fingerprint_shapes() {
        let budget = Budget::default();
        let fp = mdcs_fingerprint(&DcsDescriptor::full(), 1, &budget).unwrap();
        assert_eq!(fp.count, 2);
        assert!(fp.children.is_empty());

        // depth 2 over <2,5>: children <2,7> → 3, <4,5,6,7> → 5, rev-side → 4
        let d = DcsDescriptor::restricted_power_monoid(&monoid("<2,5>")).unwrap();
        let fp = mdcs_fingerprint(&d, 2, &budget).unwrap();
        assert_eq!(fp.count, 3);
        assert_eq!(fp.child_counts(), vec![3, 4, 5]);

        // depth 2 over <4,5>: children have 5, 5 and 4
        let d = DcsDescriptor::restricted_power_monoid(&monoid("<4,5>")).unwrap();
        let fp = mdcs_fingerprint(&d, 2, &budget).unwrap();
        assert_eq!(fp.count, 3);
        assert_eq!(fp.child_counts(), vec![4, 5, 5]);

        assert!(mdcs_fingerprint(&d, 0, &budget).is_err());
        assert!(mdcs_fingerprint(&d, 99, &budget).is_err());
    }

    #[test]
    fn fingerprint_json_matches_documented_shape() {
        let budget = Budget::default();
        let d = DcsDescriptor::restricted_power_monoid(&monoid("<2,5>")).unwrap();
        let fp = mdcs_fingerprint(&d, 2, &budget).unwrap();
        let v = serde_json::to_value(&fp).unwrap();
        assert_eq!(v["root"], 3);
        assert_eq!(v["children"], serde_json::json!([3, 4, 5]));
    }

    #[test]
    fn generator_search_examples() {
        let budget = Budget::default();
        let d = DcsDescriptor::full();
        assert_eq!(dcs_generator(&d, &budget).unwrap(), set("{0,1}"));

        let d = DcsDescriptor::new(1, Submonoid::natural(), monoid("<2,3>")).unwrap();
        assert_eq!(dcs_generator(&d, &budget).unwrap(), set("{0,1,3}"));

        let d = DcsDescriptor::new(1, monoid("<2,5>"), monoid("<2,5>")).unwrap();
        let a = dcs_generator(&d, &budget).unwrap();
        assert_eq!(Submonoid::span(&a).unwrap(), monoid("<2,5>"));
        assert_eq!(Submonoid::span(&a.reversion()).unwrap(), monoid("<2,5>"));

        // scaled descriptor gets a scaled generator
        let d = DcsDescriptor::new(3, Submonoid::natural(), monoid("<2,3>")).unwrap();
        let a = dcs_generator(&d, &budget).unwrap();
        assert_eq!(a, set("{0,3,9}"));
        assert_eq!(dcs_of(&a).unwrap(), d);
    }

    #[test]
    fn noncancellative_families() {
        let d = DcsDescriptor::full();
        let w = noncancellative_witnesses(&d, Some(3)).unwrap();
        assert_eq!(w.n_star, 1);
        assert_eq!(w.f, FiniteSet::zero().union(&set("[3,15]")).union(&set("{18}")));
        assert_ne!(w.torsion_a, w.b);

        let d = DcsDescriptor::restricted_power_monoid(&monoid("<2,5>")).unwrap();
        let w = noncancellative_witnesses(&d, None).unwrap();
        assert_eq!(w.n_star, 4);
        assert!(noncancellative_witnesses(&d, Some(2)).is_err());

        // scaled descriptor
        let d = DcsDescriptor::new(2, monoid("<2,3>"), Submonoid::natural()).unwrap();
        let w = noncancellative_witnesses(&d, None).unwrap();
        assert!(dcs_contains(&d, &w.f).unwrap());
    }

    #[test]
    fn descending_chain_is_strict() {
        // (1, {0} ∪ N≥n, N0) strictly descends
        let mut prev: Option<DcsDescriptor> = None;
        for n in 1..=10u32 {
            let gens: Vec<u32> = (n..2 * n.max(2)).collect();
            let s = Submonoid::from_generators(&gens).unwrap();
            let d = DcsDescriptor::new(1, s, Submonoid::natural()).unwrap();
            if let Some(p) = prev {
                assert!(p.contains_descriptor(&d));
                assert!(!d.contains_descriptor(&p));
                assert_ne!(p, d);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn rev_duality_swaps_components() {
        for s in ["{0,1,3}", "{0,2,3,7}", "{0,4,5}"] {
            let a = set(s);
            let d1 = dcs_of(&a).unwrap();
            let d2 = dcs_of(&a.reversion()).unwrap();
            assert_eq!(d1.s(), d2.t());
            assert_eq!(d1.t(), d2.s());
        }
    }
}
