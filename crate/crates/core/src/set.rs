//! Finite nonempty subsets of ℕ₀ as bit vectors, and the sumset calculus.
//!
//! `FiniteSet` is the value type everything else is built on. A set is a
//! packed vector of 64-bit words (bit `i` set ⟺ `i` is an element), so the
//! sumset of sets bounded by N costs O(|A|·N/64) word operations — the hot
//! loop of every exhaustive enumeration in this crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on set elements. Exceeding it is a reported error, never a
/// silent truncation.
pub const DEFAULT_UNIVERSE_BOUND: u32 = 4096;

static UNIVERSE_BOUND: AtomicU32 = AtomicU32::new(DEFAULT_UNIVERSE_BOUND);

/// Current cap on the largest representable element.
pub fn universe_bound() -> u32 {
    UNIVERSE_BOUND.load(AtomicOrdering::Relaxed)
}

/// Raise or lower the universe cap for this process.
pub fn set_universe_bound(bound: u32) {
    UNIVERSE_BOUND.store(bound, AtomicOrdering::Relaxed);
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

const WORD: usize = 64;

/// A finite nonempty subset of ℕ₀.
///
/// Invariants: at least one bit set; the last word is nonzero (no trailing
/// zero words), so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    words: Vec<u64>,
}

/// Result of writing A = shift + d · core with 0 ∈ core and gcd(core) = 1.
///
/// Singletons use the convention core = {0}, d = 1 (gcd of {0} is undefined).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub shift: u32,
    pub scale: u32,
    pub core: FiniteSet,
}

impl FiniteSet {
    fn from_words(mut words: Vec<u64>) -> Self {
        while let Some(&last) = words.last() {
            if last == 0 {
                words.pop();
            } else {
                break;
            }
        }
        debug_assert!(!words.is_empty(), "FiniteSet must be nonempty");
        FiniteSet { words }
    }

    /// Build a set from arbitrary elements (duplicates collapse).
    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I) -> Result<Self> {
        let bound = universe_bound();
        let mut words: Vec<u64> = Vec::new();
        let mut any = false;
        for e in elements {
            if e > bound {
                return Err(Error::UniverseExceeded(e as u64, bound));
            }
            let w = e as usize / WORD;
            if words.len() <= w {
                words.resize(w + 1, 0);
            }
            words[w] |= 1u64 << (e as usize % WORD);
            any = true;
        }
        if !any {
            return Err(Error::EmptySet);
        }
        Ok(FiniteSet::from_words(words))
    }

    pub fn singleton(n: u32) -> Result<Self> {
        FiniteSet::from_elements([n])
    }

    /// The identity element {0}.
    pub fn zero() -> Self {
        FiniteSet { words: vec![1] }
    }

    /// The discrete interval [lo, hi].
    pub fn interval(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Parse(format!("empty interval [{lo},{hi}]")));
        }
        let bound = universe_bound();
        if hi > bound {
            return Err(Error::UniverseExceeded(hi as u64, bound));
        }
        let mut words = vec![0u64; hi as usize / WORD + 1];
        for (i, w) in words.iter_mut().enumerate() {
            let base = (i * WORD) as u32;
            if base > hi {
                break;
            }
            let lo_bit = lo.saturating_sub(base).min(64) as u64;
            let hi_bit = (hi - base).min(63) as u64;
            if lo_bit <= hi_bit {
                let span = hi_bit - lo_bit + 1;
                let mask = if span == 64 { !0 } else { ((1u64 << span) - 1) << lo_bit };
                *w = mask;
            }
        }
        Ok(FiniteSet::from_words(words))
    }

    pub fn contains(&self, n: u32) -> bool {
        let w = n as usize / WORD;
        w < self.words.len() && self.words[w] >> (n as usize % WORD) & 1 == 1
    }

    pub fn min_elem(&self) -> u32 {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return (i * WORD) as u32 + w.trailing_zeros();
            }
        }
        unreachable!("FiniteSet is nonempty")
    }

    pub fn max_elem(&self) -> u32 {
        let i = self.words.len() - 1;
        (i * WORD) as u32 + 63 - self.words[i].leading_zeros()
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some((i * WORD) as u32 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The sumset A + B = {a + b : a ∈ A, b ∈ B}.
    pub fn sumset(&self, other: &FiniteSet) -> Result<FiniteSet> {
        let max = self.max_elem() as u64 + other.max_elem() as u64;
        let bound = universe_bound();
        if max > bound as u64 {
            return Err(Error::UniverseExceeded(max, bound));
        }
        let mut words = vec![0u64; max as usize / WORD + 1];
        for a in self.iter() {
            or_shifted(&mut words, &other.words, a);
        }
        Ok(FiniteSet::from_words(words))
    }

    /// The k-fold sumset kA = A + … + A; 0A = {0} by convention.
    pub fn k_fold(&self, k: u32) -> Result<FiniteSet> {
        let mut acc = FiniteSet::zero();
        for _ in 0..k {
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }

    /// The dilation k · A = {k·a : a ∈ A}; k = 0 is rejected (the zero case
    /// belongs to `k_fold`).
    pub fn dilate(&self, k: u32) -> Result<FiniteSet> {
        if k == 0 {
            return Err(Error::ZeroDilation);
        }
        FiniteSet::from_elements(self.iter().map(|a| a.saturating_mul(k)))
    }

    /// Elementwise division; every element must be a multiple of `k`.
    pub(crate) fn contract(&self, k: u32) -> FiniteSet {
        debug_assert!(k > 0 && self.iter().all(|a| a % k == 0));
        FiniteSet::from_elements(self.iter().map(|a| a / k)).expect("nonempty")
    }

    /// The reversion rev(A) = max(A) − A, an involutive sumset homomorphism.
    pub fn reversion(&self) -> FiniteSet {
        let m = self.max_elem();
        FiniteSet::from_elements(self.iter().map(|a| m - a)).expect("nonempty")
    }

    /// The set of distances Δ(A): gaps between consecutive elements.
    /// Empty exactly when |A| = 1.
    pub fn delta_set(&self) -> Vec<u32> {
        let elems = self.to_vec();
        let mut gaps: Vec<u32> = elems.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_unstable();
        gaps.dedup();
        gaps
    }

    pub fn max_gap(&self) -> u32 {
        self.delta_set().last().copied().unwrap_or(0)
    }

    /// Write A = shift + d · core with 0 ∈ core and gcd(core) = 1.
    pub fn normalize(&self) -> Normalized {
        let shift = self.min_elem();
        let shifted: Vec<u32> = self.iter().map(|a| a - shift).collect();
        let scale = shifted.iter().fold(0, |g, &x| gcd(g, x));
        if scale <= 1 {
            let core = FiniteSet::from_elements(shifted).expect("nonempty");
            return Normalized { shift, scale: 1, core };
        }
        let core = FiniteSet::from_elements(shifted.into_iter().map(|x| x / scale)).expect("nonempty");
        Normalized { shift, scale, core }
    }

    /// A + {s}.
    pub fn shift_up(&self, s: u32) -> Result<FiniteSet> {
        FiniteSet::from_elements(self.iter().map(|a| a + s))
    }

    /// A − {s}; requires s ≤ min(A).
    pub fn shift_down(&self, s: u32) -> FiniteSet {
        debug_assert!(s <= self.min_elem());
        FiniteSet::from_elements(self.iter().map(|a| a - s)).expect("nonempty")
    }

    /// A ∖ {n}; errors if the removal would empty the set.
    pub fn without(&self, n: u32) -> Result<FiniteSet> {
        let mut words = self.words.clone();
        let w = n as usize / WORD;
        if w < words.len() {
            words[w] &= !(1u64 << (n as usize % WORD));
        }
        if words.iter().all(|&w| w == 0) {
            return Err(Error::EmptySet);
        }
        Ok(FiniteSet::from_words(words))
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        let mut words = vec![0u64; self.words.len().max(other.words.len())];
        for (i, &w) in self.words.iter().enumerate() {
            words[i] |= w;
        }
        for (i, &w) in other.words.iter().enumerate() {
            words[i] |= w;
        }
        FiniteSet::from_words(words)
    }

    /// Intersection, or None when it is empty.
    pub fn intersection(&self, other: &FiniteSet) -> Option<FiniteSet> {
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        if words.iter().all(|&w| w == 0) {
            None
        } else {
            Some(FiniteSet::from_words(words))
        }
    }

    /// {c : c + B ⊆ A}, the largest candidate complement of `part` in `self`,
    /// or None when no c works. B + C = A holds for some C iff it holds for
    /// this maximal quotient.
    pub fn quotient(&self, part: &FiniteSet) -> Option<FiniteSet> {
        if part.max_elem() > self.max_elem() {
            return None;
        }
        let room = (self.max_elem() - part.max_elem()) as usize;
        let len = room / WORD + 1;
        let mut q = vec![!0u64; len];
        // mask off bits above `room`
        let top = room % WORD;
        if top < 63 {
            q[len - 1] &= (1u64 << (top + 1)) - 1;
        }
        for b in part.iter() {
            and_shifted_down(&mut q, &self.words, b);
            if q.iter().all(|&w| w == 0) {
                return None;
            }
        }
        Some(FiniteSet::from_words(q))
    }

    /// Canonical ordering used for divisor lists and factorization parts:
    /// first by max, then lexicographically on the ascending element lists.
    pub fn canonical_cmp(&self, other: &FiniteSet) -> Ordering {
        self.max_elem()
            .cmp(&other.max_elem())
            .then_with(|| self.to_vec().cmp(&other.to_vec()))
    }
}

fn or_shifted(dst: &mut [u64], src: &[u64], shift: u32) {
    let wshift = shift as usize / WORD;
    let bshift = shift as usize % WORD;
    if bshift == 0 {
        for (i, &w) in src.iter().enumerate() {
            dst[i + wshift] |= w;
        }
    } else {
        let mut carry = 0u64;
        for (i, &w) in src.iter().enumerate() {
            dst[i + wshift] |= (w << bshift) | carry;
            carry = w >> (WORD - bshift);
        }
        if carry != 0 {
            dst[src.len() + wshift] |= carry;
        }
    }
}

/// dst &= (src >> shift), where dst is already truncated to the result range.
fn and_shifted_down(dst: &mut [u64], src: &[u64], shift: u32) {
    let wshift = shift as usize / WORD;
    let bshift = shift as usize % WORD;
    for (i, d) in dst.iter_mut().enumerate() {
        let lo = src.get(i + wshift).copied().unwrap_or(0);
        let v = if bshift == 0 {
            lo
        } else {
            let hi = src.get(i + wshift + 1).copied().unwrap_or(0);
            (lo >> bshift) | (hi << (WORD - bshift))
        };
        *d &= v;
    }
}

impl PartialOrd for FiniteSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FiniteSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FiniteSet {
    type Err = Error;

    /// Accepts `{0,2,3}` (any order, duplicates rejected) and the interval
    /// shorthand `[a,b]`. Negative entries are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (open, close, interval) = match (t.chars().next(), t.chars().last()) {
            (Some('{'), Some('}')) => ('{', '}', false),
            (Some('['), Some(']')) => ('[', ']', true),
            _ => {
                return Err(Error::Parse(format!(
                    "expected a set literal like {{0,2,3}} or [0,6], got `{s}`"
                )))
            }
        };
        let inner = t
            .strip_prefix(open)
            .and_then(|t| t.strip_suffix(close))
            .ok_or_else(|| Error::Parse(format!("unbalanced delimiters in `{s}`")))?;
        let mut nums = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::Parse(format!("empty entry in `{s}`")));
            }
            let v: i64 = piece
                .parse()
                .map_err(|_| Error::Parse(format!("`{piece}` is not an integer")))?;
            if v < 0 {
                return Err(Error::Parse(format!("negative element {v} rejected")));
            }
            if v > u32::MAX as i64 {
                return Err(Error::UniverseExceeded(v as u64, universe_bound()));
            }
            nums.push(v as u32);
        }
        if interval {
            if nums.len() != 2 {
                return Err(Error::Parse(format!("interval needs two endpoints: `{s}`")));
            }
            return FiniteSet::interval(nums[0], nums[1]);
        }
        let mut sorted = nums.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nums.len() {
            return Err(Error::Parse(format!("duplicate elements in `{s}`")));
        }
        FiniteSet::from_elements(sorted)
    }
}

impl Serialize for FiniteSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> FiniteSet {
        s.parse().unwrap()
    }

    #[test]
    fn sumset_matches_paper_example() {
        // [0,6] = {0,2,3} + {0,1,3}
        assert_eq!(set("{0,2,3}").sumset(&set("{0,1,3}")).unwrap(), set("[0,6]"));
    }

    #[test]
    fn sumset_identity_and_direct_enumeration() {
        let a = set("{3,5,9}");
        assert_eq!(a.sumset(&FiniteSet::zero()).unwrap(), a);
        assert_eq!(set("{0,1}").sumset(&set("{0,2,4}")).unwrap(), set("{0,1,2,3,4,5}"));
    }

    #[test]
    fn k_fold_examples() {
        assert_eq!(set("{0,1}").k_fold(3).unwrap(), set("{0,1,2,3}"));
        assert_eq!(set("{0,2,3}").k_fold(0).unwrap(), FiniteSet::zero());
        assert_eq!(set("{0,2,3}").k_fold(1).unwrap(), set("{0,2,3}"));
        // oracle: sumset applied twice
        let a = set("{0,2,3}");
        assert_eq!(a.k_fold(2).unwrap(), a.sumset(&a).unwrap());
        assert_eq!(a.k_fold(2).unwrap(), set("{0,2,3,4,5,6}"));
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(set("{0,1,3}").dilate(2).unwrap(), set("{0,2,6}"));
        assert_eq!(set("{0,2,3}").dilate(3).unwrap(), set("{0,6,9}"));
        let a = set("{1,4}");
        assert_eq!(a.dilate(1).unwrap(), a);
        assert!(matches!(a.dilate(0), Err(Error::ZeroDilation)));
    }

    #[test]
    fn reversion_examples() {
        assert_eq!(set("{0,1,3}").reversion(), set("{0,2,3}"));
        assert_eq!(set("{0}").reversion(), set("{0}"));
        let a = set("{0,1,4,5}");
        assert_eq!(a.reversion().reversion(), a);
    }

    #[test]
    fn delta_set_examples() {
        assert_eq!(set("{0,1,3}").delta_set(), vec![1, 2]);
        assert!(set("{5}").delta_set().is_empty());
        assert_eq!(set("{0,4,8,9}").delta_set(), vec![1, 4]);
    }

    #[test]
    fn normalize_examples() {
        let n = set("{4,6,10}").normalize();
        assert_eq!((n.shift, n.scale), (4, 2));
        assert_eq!(n.core, set("{0,1,3}"));
        let n = set("{0,1}").normalize();
        assert_eq!((n.shift, n.scale), (0, 1));
        assert_eq!(n.core, set("{0,1}"));
        let n = set("{7}").normalize();
        assert_eq!((n.shift, n.scale), (7, 1));
        assert_eq!(n.core, FiniteSet::zero());
    }

    #[test]
    fn quotient_is_maximal_complement() {
        let a = set("[0,6]");
        let b = set("{0,2,3}");
        // every c with c + {0,2,3} ⊆ [0,6], i.e. [0,3]; covers, so B | A
        let q = a.quotient(&b).unwrap();
        assert_eq!(q, set("{0,1,2,3}"));
        assert_eq!(b.sumset(&q).unwrap(), a);
        // the paper's complement {0,1,3} is one of its subsets
        assert!(set("{0,1,3}").is_subset_of(&q));
        // {0,1} does not divide {0,2,3}: quotient exists but fails coverage
        let q = set("{0,2,3}").quotient(&set("{0,1}"));
        assert!(q.is_none() || set("{0,1}").sumset(&q.unwrap()).unwrap() != set("{0,2,3}"));
    }

    #[test]
    fn parser_round_trip_and_rejections() {
        assert_eq!(set("{3, 1, 0}").to_string(), "{0,1,3}");
        assert_eq!(set("[0,6]").to_vec(), vec![0, 1, 2, 3, 4, 5, 6]);
        assert!("{}".parse::<FiniteSet>().is_err());
        assert!("{1,1}".parse::<FiniteSet>().is_err());
        assert!("{-1,2}".parse::<FiniteSet>().is_err());
        assert!("0,1".parse::<FiniteSet>().is_err());
    }

    #[test]
    fn universe_bound_is_enforced() {
        let big = FiniteSet::singleton(universe_bound()).unwrap();
        assert!(matches!(
            big.sumset(&FiniteSet::singleton(1).unwrap()),
            Err(Error::UniverseExceeded(..))
        ));
    }

    #[test]
    fn canonical_order() {
        assert!(set("{0,1,3}") < set("{0,2,3}"));
        assert!(set("{0,5}") > set("{0,1,3}"));
        assert!(set("{0,1}") < set("{0,2}"));
    }

    #[test]
    fn interval_crossing_word_boundaries() {
        let a = FiniteSet::interval(60, 70).unwrap();
        assert_eq!(a.to_vec(), (60..=70).collect::<Vec<_>>());
        assert_eq!(a.min_elem(), 60);
        assert_eq!(a.max_elem(), 70);
        assert_eq!(a.cardinality(), 11);
    }
}
