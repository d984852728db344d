//! Exact and Monte Carlo counts of atoms versus genuine sumsets among
//! subsets of [0, N].
//!
//! Exact mode enumerates bitmask-encoded sets (one u64 per set, so N ≤ 62)
//! and classifies each with a word-level decomposability kernel; the index
//! space is split into contiguous blocks whose counts merge by addition, so
//! totals are deterministic at any thread count. Monte Carlo mode derives
//! one RNG per trial from the base seed with a SplitMix64 step, making every
//! trial reproducible and independent of scheduling.

use num_rational::Ratio;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::factor::{is_atom, Ambient};
use crate::monoid::Submonoid;
use crate::set::FiniteSet;

/// Default exhaustive cap for the restricted and all-subsets universes.
pub const DEFAULT_EXACT_CAP: u32 = 22;
/// Default exhaustive cap for unrestricted universes (the atom test over a
/// general S is heavier).
pub const DEFAULT_UNRESTRICTED_CAP: u32 = 16;

/// Which universe of sets a count ranges over.
#[derive(Clone, Debug)]
pub enum DensityVariant {
    /// Subsets of [0, N] containing 0, classified in P_fin,0(ℕ₀).
    Restricted,
    /// All subsets of [0, N] (the Dec(N) universe, empty set included).
    AllSubsets,
    /// Finite nonempty subsets of S with max ≤ N, classified in P_fin(S).
    Unrestricted(Submonoid),
}

impl DensityVariant {
    pub fn label(&self) -> String {
        match self {
            DensityVariant::Restricted => "restricted".into(),
            DensityVariant::AllSubsets => "all-subsets".into(),
            DensityVariant::Unrestricted(s) => format!("unrestricted{s}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum DensityMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// Counts of a density run. In the all-subsets universe, `atoms` counts the
/// sets of cardinality ≥ 2 whose min-shift is irreducible, `decomposables`
/// counts Dec(N) members, and the empty set plus the nonzero singletons
/// make up the remainder.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub n: u32,
    pub variant: String,
    pub mode: DensityMode,
    pub total: u64,
    pub atoms: u64,
    pub decomposables: u64,
    pub identity_count: u64,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
}

impl DensityReport {
    pub const CSV_HEADER: &'static str =
        "N,variant,mode,total,atoms,decomposables,estimate,stderr,seed";

    pub fn csv_row(&self) -> String {
        let (mode, seed) = match &self.mode {
            DensityMode::Exact => ("exact".to_string(), String::new()),
            DensityMode::MonteCarlo { trials, seed } => {
                (format!("monte-carlo({trials})"), seed.to_string())
            }
        };
        let fmt = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.variant,
            mode,
            self.total,
            self.atoms,
            self.decomposables,
            fmt(self.estimate),
            fmt(self.stderr),
            seed
        )
    }
}

fn low_mask(bit: u32) -> u64 {
    if bit >= 63 {
        !0
    } else {
        (1u64 << (bit + 1)) - 1
    }
}

/// B + Q = A test for bitmask sets: returns the maximal complement Q of
/// `b` in `a` when it has ≥ 2 elements and covers `a`.
fn mask_division(a: u64, b: u64) -> Option<u64> {
    let mut q = a; // bit 0 of b contributes a >> 0
    let mut rest = b & !1;
    while rest != 0 {
        let x = rest.trailing_zeros();
        rest &= rest - 1;
        q &= a >> x;
        if q.count_ones() < 2 {
            return None;
        }
    }
    let mut cover = q;
    let mut rest = b & !1;
    while rest != 0 {
        let x = rest.trailing_zeros();
        rest &= rest - 1;
        cover |= q << x;
    }
    (cover == a).then_some(q)
}

/// Certificate search for "is this 0-containing mask a genuine sumset
/// B + C with |B|, |C| ≥ 2"? Pairs are tried first; one part always fits
/// below max/2, which bounds the submask sweep.
pub(crate) fn restricted_decomposable_mask(a: u64) -> Option<(u64, u64)> {
    debug_assert!(a & 1 == 1);
    if a.count_ones() < 3 {
        return None;
    }
    let max = 63 - a.leading_zeros();
    let cand = a & !1 & low_mask(max / 2);
    let mut rest = cand;
    while rest != 0 {
        let x = rest.trailing_zeros();
        rest &= rest - 1;
        let b = 1 | (1u64 << x);
        if let Some(q) = mask_division(a, b) {
            return Some((b, q));
        }
    }
    let mut s = cand;
    while s != 0 {
        if s.count_ones() >= 2 {
            let b = s | 1;
            if let Some(q) = mask_division(a, b) {
                return Some((b, q));
            }
        }
        s = (s - 1) & cand;
    }
    None
}

/// Dec(N) membership for an arbitrary subset mask of [0, N]: shift the
/// minimum to 0 and look for a genuine two-part sumset.
pub(crate) fn dec_member_mask(a: u64) -> bool {
    if a == 0 {
        return false;
    }
    let shifted = a >> a.trailing_zeros();
    restricted_decomposable_mask(shifted).is_some()
}

fn check_width(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    if n > cap {
        return Err(Error::Precondition(format!(
            "N = {n} exceeds the exhaustive cap {cap}; raise the cap explicitly if intended"
        )));
    }
    if n > 62 {
        return Err(Error::Precondition("exact counting is limited to N <= 62".into()));
    }
    Ok(())
}

/// Exhaustive classification of every admissible set with max ≤ N.
pub fn count_exact(n: u32, variant: &DensityVariant, cap: Option<u32>, budget: &Budget) -> Result<DensityReport> {
    match variant {
        DensityVariant::Restricted => {
            check_width(n, cap.unwrap_or(DEFAULT_EXACT_CAP))?;
            let total = 1u64 << n;
            budget.spend(total)?;
            let (atoms, decs) = (0..total)
                .into_par_iter()
                .fold(
                    || (0u64, 0u64),
                    |(at, dec), m| {
                        let a = (m << 1) | 1;
                        if a == 1 {
                            (at, dec) // identity {0}
                        } else if restricted_decomposable_mask(a).is_some() {
                            (at, dec + 1)
                        } else {
                            (at + 1, dec)
                        }
                    },
                )
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            Ok(DensityReport {
                n,
                variant: variant.label(),
                mode: DensityMode::Exact,
                total,
                atoms,
                decomposables: decs,
                identity_count: 1,
                estimate: None,
                stderr: None,
            })
        }
        DensityVariant::AllSubsets => {
            check_width(n, cap.unwrap_or(DEFAULT_EXACT_CAP))?;
            let total = 1u64 << (n + 1);
            budget.spend(total)?;
            let (atoms, decs) = (0..total)
                .into_par_iter()
                .fold(
                    || (0u64, 0u64),
                    |(at, dec), a| {
                        if a == 0 || a.count_ones() == 1 {
                            (at, dec)
                        } else if dec_member_mask(a) {
                            (at, dec + 1)
                        } else {
                            (at + 1, dec)
                        }
                    },
                )
                .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            Ok(DensityReport {
                n,
                variant: variant.label(),
                mode: DensityMode::Exact,
                total,
                atoms,
                decomposables: decs,
                identity_count: 1,
                estimate: None,
                stderr: None,
            })
        }
        DensityVariant::Unrestricted(s) => {
            check_width(n, cap.unwrap_or(DEFAULT_UNRESTRICTED_CAP))?;
            if s.is_trivial() {
                return Err(Error::TrivialMonoid);
            }
            let pool: Vec<u32> = (0..=n).filter(|&x| s.contains(x)).collect();
            let total = (1u64 << pool.len()) - 1;
            let ambient = Ambient::Unrestricted(s.clone());
            let counts: Result<Vec<(u64, u64)>> = (1..=total)
                .into_par_iter()
                .map(|mask| {
                    budget.spend(1)?;
                    let a = FiniteSet::from_elements(
                        pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x),
                    )?;
                    if a.is_zero() {
                        return Ok((0, 0));
                    }
                    if is_atom(&a, &ambient, budget)?.is_atom() {
                        Ok((1, 0))
                    } else {
                        Ok((0, 1))
                    }
                })
                .collect();
            let (atoms, decs) = counts?
                .into_iter()
                .fold((0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
            Ok(DensityReport {
                n,
                variant: variant.label(),
                mode: DensityMode::Exact,
                total,
                atoms,
                decomposables: decs,
                identity_count: 1,
                estimate: None,
                stderr: None,
            })
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// One ChaCha8 stream per trial, derived from the base seed by a SplitMix64
/// step on the trial index. Trials are reproducible at any thread count.
fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ index.wrapping_mul(0xa076_1d64_78bd_642f)))
}

/// Monte Carlo estimate of ℙ(A ∈ Dec(N)) over uniform subsets of [0, N]
/// (one independent fair bit per element). Deterministic for a given seed.
pub fn sample_decomposable(n: u32, trials: u64, seed: u64) -> Result<DensityReport> {
    if n > 62 {
        return Err(Error::Precondition("sampling is limited to N <= 62".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    let mask = low_mask(n);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let a = rng.next_u64() & mask;
            u64::from(dec_member_mask(a))
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let stderr = (p * (1.0 - p) / trials as f64).sqrt();
    Ok(DensityReport {
        n,
        variant: DensityVariant::AllSubsets.label(),
        mode: DensityMode::MonteCarlo { trials, seed },
        total: trials,
        atoms: trials - hits,
        decomposables: hits,
        identity_count: 0,
        estimate: Some(p),
        stderr: Some(stderr),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub dec_count: u64,
    /// log₂ |Dec(N)| / N; None while Dec(N) is empty.
    pub slope: Option<f64>,
}

/// Exact |Dec(N)| for N ≤ n_max with the empirical slope sequence, shown
/// against the proven bracket [2^0.811, 2) for the growth constant.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub proven_lower: f64,
    pub proven_upper: f64,
}

pub fn growth_constant_bounds(n_max: u32, cap: Option<u32>, budget: &Budget) -> Result<GrowthReport> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let report = count_exact(n, &DensityVariant::AllSubsets, cap, budget)?;
        let dec = report.decomposables;
        rows.push(GrowthRow {
            n,
            dec_count: dec,
            slope: (dec > 0).then(|| (dec as f64).log2() / n as f64),
        });
    }
    Ok(GrowthReport {
        rows,
        proven_lower: 1.754,
        proven_upper: 2.0,
    })
}

/// The exact limiting density of atoms in P_fin(S) among sets with
/// max ≤ x, as x → ∞.
///
/// Genuine sumsets are exponentially rare, so the limit is governed by the
/// shifted sets {k} + B. Whether A is such a shift depends only on the
/// trace A ∩ [0, d(S)] with d(S) = max 𝒜(S) + F(S): writing h for the
/// number of traces t ⊆ S ∩ [0, d(S)] that are empty or fit inside a + S
/// for some atom a, the limit equals 1 − h / 2^{|S ∩ [0, d(S)]|}. It is
/// exactly 1/2 for ℕ₀ and lies strictly inside (1/2, 1) otherwise.
pub fn density_limit_pfin(s: &Submonoid) -> Result<Ratio<u64>> {
    if s.is_trivial() {
        return Err(Error::TrivialMonoid);
    }
    if s.scale() != 1 {
        return Err(Error::NotNumerical(format!("S = {s} must be numerical")));
    }
    let horizon = s.atoms().last().unwrap() + s.frobenius();
    let pool: Vec<u32> = (0..=horizon).filter(|&x| s.contains(x)).collect();
    if pool.len() > 62 {
        return Err(Error::Precondition(format!(
            "trace space of {s} is too large ({} elements)",
            pool.len()
        )));
    }
    // per-atom mask of pool indices that stay inside a + S
    let shifted_masks: Vec<u64> = s
        .atoms()
        .iter()
        .map(|&a| {
            pool.iter()
                .enumerate()
                .filter(|(_, &x)| x >= a && s.contains(x - a))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let total: u64 = 1 << pool.len();
    let mut hits = 0u64;
    for trace in 0..total {
        if trace == 0 || shifted_masks.iter().any(|&m| trace & !m == 0) {
            hits += 1;
        }
    }
    let limit = Ratio::new(total - hits, total);
    let (half, one) = (Ratio::new(1, 2), Ratio::new(1, 1));
    if limit < half || limit >= one {
        return Err(Error::VerificationFailed(format!(
            "density limit {limit} escaped [1/2, 1) for S = {s}"
        )));
    }
    Ok(limit)
}
