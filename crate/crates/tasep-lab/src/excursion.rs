//! Walk decompositions of complete configurations: the excursion and
//! barrier walks read off the columns, the split into independent pieces,
//! and the counting identity the split implies.
//!
//! Over a balanced pair, half the signed particle count along the columns
//! traces a nonnegative excursion `e`, and the top-minus-bottom black
//! count traces a free walk `b`. Each column moves exactly one of the two,
//! so the pair splits into the set of `e`-columns, the excursion read on
//! them, and the free walk read on the rest; the split determines the
//! configuration uniquely.

use num::{BigUint, Zero};
use thiserror::Error;

use num::BigRational;

use crate::config::{prefix_stats, Boundary, CompleteConfig, Particle, Violation};
use crate::enumerate::{binomial, catalan};

// --- errors ---

/// Errors raised while reassembling walks.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ExcursionError {
    #[error("split walks do not fit size {n}: {reason}")]
    BadShape { n: usize, reason: String },
    #[error(transparent)]
    Invalid(#[from] Violation),
}

// --- walks ---

/// The two walks of a configuration, both indexed by wall `0..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalkPair {
    /// Half the black-minus-white count over both rows: a nonnegative
    /// excursion ending at zero.
    pub e: Vec<i64>,
    /// Black count of the top row minus the bottom row: a free walk.
    pub b: Vec<i64>,
}

/// Reads the walk pair off a two-species configuration.
pub fn walks(cfg: &CompleteConfig) -> WalkPair {
    assert_eq!(cfg.boundary(), Boundary::Open2, "walks need two species");
    let stats = prefix_stats(cfg);
    let e = stats.e.iter().map(|v| v / 2).collect();
    let b = stats
        .top_black
        .iter()
        .zip(&stats.bottom_black)
        .map(|(t, u)| t - u)
        .collect();
    WalkPair { e, b }
}

/// A configuration split into its independent pieces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitWalks {
    /// Columns whose cells agree, ascending; these move the excursion.
    pub i_e: Vec<usize>,
    /// The excursion read on the `i_e` columns, walls included.
    pub e_prime: Vec<i64>,
    /// The free walk read on the remaining columns.
    pub b_prime: Vec<i64>,
}

/// Splits a configuration into the column set and the two restricted walks.
pub fn split(cfg: &CompleteConfig) -> SplitWalks {
    let pair = walks(cfg);
    let mut i_e = Vec::new();
    let mut e_prime = vec![0i64];
    let mut b_prime = vec![0i64];
    for col in 1..=cfg.n() {
        if cfg.top_cell(col) == cfg.bottom_cell(col) {
            i_e.push(col);
            e_prime.push(pair.e[col]);
        } else {
            b_prime.push(pair.b[col]);
        }
    }
    SplitWalks {
        i_e,
        e_prime,
        b_prime,
    }
}

/// Rebuilds the configuration of size `n` from its split, checking every
/// shape constraint along the way.
pub fn join(n: usize, walks: &SplitWalks) -> Result<CompleteConfig, ExcursionError> {
    let bad = |reason: &str| ExcursionError::BadShape {
        n,
        reason: reason.to_string(),
    };
    let p = walks.i_e.len();
    if walks.i_e.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("column set out of order"));
    }
    if walks.i_e.iter().any(|&c| c == 0 || c > n) {
        return Err(bad("column index out of range"));
    }
    if walks.e_prime.len() != p + 1 {
        return Err(bad("excursion length does not match the column set"));
    }
    if walks.b_prime.len() != n - p + 1 {
        return Err(bad("free walk length does not match the column set"));
    }
    if walks.e_prime.first() != Some(&0) || walks.e_prime.last() != Some(&0) {
        return Err(bad("excursion must start and end at zero"));
    }
    if walks.b_prime.first() != Some(&0) {
        return Err(bad("free walk must start at zero"));
    }
    if walks.e_prime.iter().any(|&v| v < 0) {
        return Err(bad("excursion dips below zero"));
    }
    if walks.e_prime.windows(2).any(|w| (w[1] - w[0]).abs() != 1) {
        return Err(bad("excursion steps must be unit"));
    }
    if walks.b_prime.windows(2).any(|w| (w[1] - w[0]).abs() != 1) {
        return Err(bad("free walk steps must be unit"));
    }
    let mut top = Vec::with_capacity(n);
    let mut bottom = Vec::with_capacity(n);
    let mut at_e = 0usize;
    let mut at_b = 0usize;
    for col in 1..=n {
        if at_e < p && walks.i_e[at_e] == col {
            let up = walks.e_prime[at_e + 1] > walks.e_prime[at_e];
            let cell = if up { Particle::Black } else { Particle::White };
            top.push(cell);
            bottom.push(cell);
            at_e += 1;
        } else {
            let up = walks.b_prime[at_b + 1] > walks.b_prime[at_b];
            top.push(if up { Particle::Black } else { Particle::White });
            bottom.push(if up { Particle::White } else { Particle::Black });
            at_b += 1;
        }
    }
    Ok(CompleteConfig::new(top, bottom, Boundary::Open2)?)
}

// --- counting ---

/// The number of excursions with `len` unit steps: a Catalan number for
/// even lengths, zero otherwise.
pub fn count_excursion_paths(len: u64) -> BigUint {
    if len % 2 == 0 {
        catalan(len / 2)
    } else {
        BigUint::zero()
    }
}

/// Sums the split counts over all column sets: choosing the `p` excursion
/// columns, an excursion on them, and a free walk on the rest. The total
/// is the Catalan number counting the balanced pairs themselves.
pub fn excursion_sum_identity(n: u64) -> BigUint {
    let mut total = BigUint::zero();
    for p in 0..=n {
        total +=
            count_excursion_paths(p) * BigUint::from(2u32).pow((n - p) as u32) * binomial(n, p);
    }
    total
}

// --- density ---

/// The probability of a black top cell at each position under a weighted
/// set of configurations, exactly. Probabilities must align with the
/// states and sum to one over configurations of one size.
pub fn density_profile_exact(states: &[CompleteConfig], probs: &[BigRational]) -> Vec<BigRational> {
    assert_eq!(states.len(), probs.len(), "states and probabilities align");
    let n = states.first().map_or(0, |c| c.n());
    let mut profile = vec![BigRational::zero(); n];
    for (cfg, p) in states.iter().zip(probs) {
        assert_eq!(cfg.n(), n, "states share one size");
        for col in 1..=n {
            if cfg.top_cell(col) == Particle::Black {
                profile[col - 1] += p;
            }
        }
    }
    profile
}

/// [`density_profile_exact`] in floating point.
pub fn density_profile(states: &[CompleteConfig], probs: &[f64]) -> Vec<f64> {
    assert_eq!(states.len(), probs.len(), "states and probabilities align");
    let n = states.first().map_or(0, |c| c.n());
    let mut profile = vec![0.0f64; n];
    for (cfg, p) in states.iter().zip(probs) {
        assert_eq!(cfg.n(), n, "states share one size");
        for col in 1..=n {
            if cfg.top_cell(col) == Particle::Black {
                profile[col - 1] += p;
            }
        }
    }
    profile
}

// --- tests ---
