//! Additive submonoids of ℕ₀: membership, atoms, Frobenius data, genus.
//!
//! A submonoid S of ℕ₀ is stored as S = d · S′ with S′ numerical
//! (gcd(S′) = 1, cofinite). Frobenius numbers follow the convention
//! F(ℕ₀) = 0, so Lemma-style bounds specialize without branches. The
//! membership table of S′ covers [0, F + max atom + 1]; beyond it,
//! membership is "d | n and n/d > F".

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::set::{gcd, FiniteSet};

#[derive(Clone, Debug)]
pub struct Submonoid {
    trivial: bool,
    scale: u32,
    atoms: Vec<u32>,
    frobenius: u32,
    genus: u32,
    /// membership of the reduced monoid S′ on [0, frobenius + max atom + 1]
    table: Vec<bool>,
}

impl PartialEq for Submonoid {
    fn eq(&self, other: &Self) -> bool {
        self.trivial == other.trivial && self.scale == other.scale && self.atoms == other.atoms
    }
}

impl Eq for Submonoid {}

impl Submonoid {
    /// The monoid ⟨gens⟩ generated by a nonempty list of positive integers.
    pub fn from_generators(gens: &[u32]) -> Result<Submonoid> {
        let mut gens: Vec<u32> = gens.iter().copied().filter(|&g| g > 0).collect();
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        gens.sort_unstable();
        gens.dedup();
        let scale = gens.iter().fold(0, |g, &x| gcd(g, x));
        let reduced: Vec<u32> = gens.iter().map(|&g| g / scale).collect();

        let min = reduced[0];
        let max = *reduced.last().unwrap();
        // Schur bound: F(S') <= (min-1)(max-1) - 1; pad for the atom scan.
        let horizon = ((min - 1) as usize * (max - 1) as usize) + max as usize + 2;
        let mut member = vec![false; horizon + 1];
        member[0] = true;
        for n in 1..=horizon {
            member[n] = reduced
                .iter()
                .take_while(|&&g| g as usize <= n)
                .any(|&g| member[n - g as usize]);
        }
        let frobenius = (0..=horizon).rev().find(|&n| !member[n]).unwrap_or(0) as u32;
        let genus = member[..=frobenius as usize].iter().filter(|&&m| !m).count() as u32;

        // atoms: members that are not a sum of two nonzero members;
        // s > F + min is always min + (s - min) with s - min > F.
        let mut atoms = Vec::new();
        for s in 1..=(frobenius + min).min(horizon as u32) {
            let s = s as usize;
            if member[s] && !(1..s).any(|x| member[x] && member[s - x]) {
                atoms.push(s as u32);
            }
        }
        let table_len = (frobenius + *atoms.last().unwrap() + 2) as usize;
        let table = member[..table_len.min(member.len())].to_vec();
        Ok(Submonoid {
            trivial: false,
            scale,
            atoms,
            frobenius,
            genus,
            table,
        })
    }

    /// ℕ₀ itself (F = 0 by convention, single atom 1).
    pub fn natural() -> Submonoid {
        Submonoid::from_generators(&[1]).expect("nonempty")
    }

    /// The trivial monoid {0}. Never produced by `from_generators`.
    pub fn trivial() -> Submonoid {
        Submonoid {
            trivial: true,
            scale: 1,
            atoms: Vec::new(),
            frobenius: 0,
            genus: 0,
            table: vec![true],
        }
    }

    /// ⟨A⟩, the submonoid generated by the elements of a set.
    /// Errors on A = {0}; use `span_allowing_trivial` when {0} is expected.
    pub fn span(a: &FiniteSet) -> Result<Submonoid> {
        if a.is_zero() {
            return Err(Error::TrivialMonoid);
        }
        let gens: Vec<u32> = a.iter().filter(|&x| x > 0).collect();
        Submonoid::from_generators(&gens)
    }

    pub fn span_allowing_trivial(a: &FiniteSet) -> Submonoid {
        if a.is_zero() {
            Submonoid::trivial()
        } else {
            Submonoid::span(a).expect("nonzero set")
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn is_natural(&self) -> bool {
        !self.trivial && self.scale == 1 && self.atoms == [1]
    }

    /// gcd of all elements; 1 for numerical monoids.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Atoms of the reduced monoid S′.
    pub fn atoms(&self) -> &[u32] {
        &self.atoms
    }

    /// The minimal generating set of S itself (atoms scaled by d).
    pub fn generators(&self) -> Vec<u32> {
        self.atoms.iter().map(|&a| a * self.scale).collect()
    }

    /// Frobenius number of the reduced monoid, with F(ℕ₀) = 0.
    pub fn frobenius(&self) -> u32 {
        self.frobenius
    }

    /// |ℕ₀ ∖ S′|.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn contains(&self, n: u32) -> bool {
        if self.trivial {
            return n == 0;
        }
        if !n.is_multiple_of(self.scale) {
            return false;
        }
        let m = (n / self.scale) as usize;
        if m < self.table.len() {
            self.table[m]
        } else {
            m as u32 > self.frobenius
        }
    }

    pub fn contains_set(&self, a: &FiniteSet) -> bool {
        a.iter().all(|x| self.contains(x))
    }

    /// The reduced monoid S′ (same atoms, scale 1).
    pub fn reduced(&self) -> Submonoid {
        let mut s = self.clone();
        s.scale = 1;
        s
    }

    /// d · S as a new submonoid.
    pub fn dilated(&self, d: u32) -> Submonoid {
        debug_assert!(d > 0);
        let mut s = self.clone();
        s.scale *= d;
        s
    }

    /// S ∩ [0, bound] as a finite set (always contains 0).
    pub fn elements_up_to(&self, bound: u32) -> FiniteSet {
        FiniteSet::from_elements((0..=bound).filter(|&n| self.contains(n)))
            .expect("0 is always a member")
    }

    /// The maximal submonoids: S ∖ {a} for each atom a (scale preserved).
    pub fn maximal_submonoids(&self) -> Result<Vec<Submonoid>> {
        if self.trivial {
            return Err(Error::TrivialMonoid);
        }
        let max_atom = *self.atoms.last().unwrap();
        self.atoms
            .iter()
            .map(|&a| {
                let horizon = self.frobenius.max(a) + 2 * max_atom + 2;
                let gens: Vec<u32> = (1..=horizon)
                    .filter(|&n| n != a && self.reduced().contains(n))
                    .collect();
                Ok(Submonoid::from_generators(&gens)?.dilated(self.scale))
            })
            .collect()
    }

    /// Is S contained in `other` (as subsets of ℕ₀, scales included)?
    /// It suffices to check the scaled generators.
    pub fn is_submonoid_of(&self, other: &Submonoid) -> bool {
        if self.trivial {
            return true;
        }
        if other.trivial {
            return false;
        }
        self.generators().iter().all(|&g| other.contains(g))
    }

    /// m(S): the least m ≥ max 𝒜(S) with m − 1 and m both in S.
    /// Defined for numerical monoids only (scale 1).
    pub fn m_invariant(&self) -> Result<u32> {
        if self.trivial {
            return Err(Error::TrivialMonoid);
        }
        if self.scale != 1 {
            return Err(Error::NotNumerical(format!("m(S) needs gcd 1, got {}", self.scale)));
        }
        let mut m = *self.atoms.last().unwrap();
        loop {
            if self.contains(m) && self.contains(m - 1) {
                return Ok(m);
            }
            m += 1;
        }
    }
}

impl fmt::Display for Submonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trivial {
            return write!(f, "<0>");
        }
        write!(f, "<")?;
        for (i, g) in self.generators().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl std::str::FromStr for Submonoid {
    type Err = Error;

    /// Parses `<2,5>`; gcd > 1 lists like `<4,6>` are accepted and reduced
    /// internally.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('<')
            .and_then(|t| t.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("expected a monoid literal like <2,5>, got `{s}`")))?;
        let mut gens = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            let v: i64 = piece
                .parse()
                .map_err(|_| Error::Parse(format!("`{piece}` is not an integer")))?;
            if v <= 0 {
                return Err(Error::Parse(format!("generator {v} must be positive")));
            }
            gens.push(v as u32);
        }
        Submonoid::from_generators(&gens)
    }
}

impl Serialize for Submonoid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Submonoid", 5)?;
        st.serialize_field("d", &self.scale)?;
        st.serialize_field("generators", &self.generators())?;
        st.serialize_field("frobenius", &self.frobenius)?;
        st.serialize_field("atoms", &self.atoms)?;
        st.serialize_field("genus", &self.genus)?;
        st.end()
    }
}
