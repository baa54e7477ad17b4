//! Deterministic state generation: exhaustive enumeration, seeded random
//! sampling, and direct construction of states with prescribed conserved
//! quantities.
//!
//! Everything here is reproducible from a `u64` seed alone. The generator is
//! a hand-rolled splitmix64 (integer-only, so results are identical on every
//! platform); its name is recorded in sweep metadata so that archived data
//! remain replayable.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{RingState, MAX_RING_LEN, MIN_RING_LEN};
use crate::Rat;

/// Largest `L` for which full enumeration (`2^L` states) is allowed by
/// default.
pub const DEFAULT_EXHAUSTIVE_BOUND: u32 = 16;

/// Validate an exhaustive length range `l_min..=l_max` against a bound.
pub(crate) fn check_length_range(l_min: u32, l_max: u32, bound: u32) -> Result<()> {
    if l_min < MIN_RING_LEN || l_min > l_max {
        return Err(Error::InvalidLengthRange { l_min, l_max });
    }
    if l_max > bound {
        return Err(Error::BoundTooLarge {
            requested: l_max,
            bound,
        });
    }
    Ok(())
}

/// splitmix64: Steele, Lea and Flood's 64-bit mixer. Small, fast, and easy
/// to reimplement elsewhere, which is all a replayable lab needs.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n` by rejection, so there is no modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n; // 2^64 mod n
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            items.swap(i, self.below(i as u64 + 1) as usize);
        }
    }
}

/// A point of the conserved-quantity lattice to hit exactly: ring length,
/// number of occupied sites, number of maximal runs of length >= 2 (that is,
/// the conserved `#011` count), and optionally the number of odd-length runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantTarget {
    pub length: u32,
    pub ones: u32,
    pub runs_ge2: u32,
    /// Additionally require this many odd-length runs (used when targeting
    /// the `ex1` diagram, whose second axis is the odd-run density).
    pub odd_runs: Option<u32>,
}

impl InvariantTarget {
    pub fn new(length: u32, ones: u32, runs_ge2: u32) -> Self {
        Self {
            length,
            ones,
            runs_ge2,
            odd_runs: None,
        }
    }

    /// The total run counts `r` compatible with this target, ignoring any
    /// odd-run requirement: each of the `runs_ge2` long runs needs at least
    /// 2 ones and each of the other `r - runs_ge2` runs exactly 1, while the
    /// `r` gaps between runs need `r` zeros. So a composition exists iff
    /// `runs_ge2 <= r`, `r + runs_ge2 <= ones` and `r <= L - ones` — except
    /// that with no long runs there is no room for surplus ones, forcing
    /// `r = ones` exactly.
    pub fn feasible_run_counts(&self) -> Option<std::ops::RangeInclusive<u32>> {
        let zeros = self.length.checked_sub(self.ones)?;
        if self.ones == 0 || zeros == 0 {
            // The constant rings carry no delimited runs at all; only
            // runs_ge2 = 0 is realizable.
            return (self.runs_ge2 == 0).then_some(0..=0);
        }
        if self.runs_ge2 == 0 {
            return (self.ones <= zeros).then_some(self.ones..=self.ones);
        }
        let lo = self.runs_ge2;
        let hi = zeros.min(self.ones.checked_sub(self.runs_ge2)?);
        (lo <= hi).then_some(lo..=hi)
    }

    /// Whether any ring of this length realizes the target (odd-run
    /// requirements aside, which are checked during construction).
    pub fn feasible(&self) -> bool {
        self.ones <= self.length && self.feasible_run_counts().is_some()
    }
}

impl fmt::Display for InvariantTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={};ones={};runs2={}",
            self.length, self.ones, self.runs_ge2
        )?;
        if let Some(odd) = self.odd_runs {
            write!(f, ";odd={odd}")?;
        }
        Ok(())
    }
}

impl FromStr for InvariantTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut length = None;
        let mut ones = None;
        let mut runs_ge2 = None;
        let mut odd_runs = None;
        for field in s.split(';') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::UnknownName(s.to_string()))?;
            let value: u32 = value
                .parse()
                .map_err(|_| Error::UnknownName(s.to_string()))?;
            match key {
                "L" => length = Some(value),
                "ones" => ones = Some(value),
                "runs2" => runs_ge2 = Some(value),
                "odd" => odd_runs = Some(value),
                _ => return Err(Error::UnknownName(s.to_string())),
            }
        }
        match (length, ones, runs_ge2) {
            (Some(length), Some(ones), Some(runs_ge2)) => Ok(Self {
                length,
                ones,
                runs_ge2,
                odd_runs,
            }),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// How many shuffled compositions to try before concluding an odd-run
/// requirement cannot be met.
const ODD_RUN_ATTEMPTS: u32 = 10_000;

/// Build a state hitting `target` exactly, randomized by `seed`: the run
/// count, the distribution of surplus ones over long runs, the gap widths,
/// the run order and the final rotation are all drawn from the seeded stream.
///
/// Returns [`Error::Infeasible`] when no ring meets the target.
pub fn construct(target: &InvariantTarget, seed: u64) -> Result<RingState> {
    if target.length < MIN_RING_LEN {
        return Err(Error::TooShort(target.length as usize));
    }
    if target.length > MAX_RING_LEN {
        return Err(Error::TooLong(target.length as usize));
    }
    if target.ones > target.length {
        return Err(Error::Infeasible(*target));
    }
    let run_range = target
        .feasible_run_counts()
        .ok_or(Error::Infeasible(*target))?;
    if let Some(odd) = target.odd_runs {
        // Odd runs are at most all runs, and their total parity must match.
        if odd > *run_range.end() {
            return Err(Error::Infeasible(*target));
        }
    }

    let l = target.length;
    let mut rng = SplitMix64::new(seed);
    if target.ones == 0 {
        return RingState::all_zeros(l);
    }
    if target.ones == l {
        return RingState::all_ones(l);
    }

    let attempts = if target.odd_runs.is_some() {
        ODD_RUN_ATTEMPTS
    } else {
        1
    };
    for _ in 0..attempts {
        let span = *run_range.end() - *run_range.start() + 1;
        let r = *run_range.start() + rng.below(u64::from(span)) as u32;

        // Start every long run at 2 and every short run at 1, then sprinkle
        // the surplus ones over the long runs so short runs stay short.
        let mut runs: Vec<u32> = Vec::with_capacity(r as usize);
        runs.extend(std::iter::repeat_n(2, target.runs_ge2 as usize));
        runs.extend(std::iter::repeat_n(1, (r - target.runs_ge2) as usize));
        let surplus_ones = target.ones - target.runs_ge2 - r;
        for _ in 0..surplus_ones {
            let i = rng.below(u64::from(target.runs_ge2)) as usize;
            runs[i] += 1;
        }
        if let Some(odd) = target.odd_runs {
            let odd_now: u32 = runs.iter().filter(|&&k| k % 2 == 1).count() as u32;
            if odd_now != odd {
                continue;
            }
        }
        rng.shuffle(&mut runs);

        // One guaranteed zero after each run, surplus zeros sprinkled.
        let mut gaps: Vec<u32> = vec![1; r as usize];
        let surplus_zeros = (l - target.ones) - r;
        for _ in 0..surplus_zeros {
            let i = rng.below(u64::from(r)) as usize;
            gaps[i] += 1;
        }

        let mut bits = 0u64;
        for (run, gap) in runs.iter().zip(&gaps) {
            for _ in 0..*run {
                bits = (bits << 1) | 1;
            }
            bits <<= gap;
        }
        let state = RingState::from_word_unchecked(bits, l);
        return Ok(state.rotated(rng.below(u64::from(l)) as i64));
    }
    Err(Error::Infeasible(*target))
}

/// A seeded Bernoulli ring: each site is occupied independently with exact
/// rational probability `p`.
pub fn random_state(length: u32, p: Rat, seed: u64) -> Result<RingState> {
    if length < MIN_RING_LEN {
        return Err(Error::TooShort(length as usize));
    }
    if length > MAX_RING_LEN {
        return Err(Error::TooLong(length as usize));
    }
    if p < Rat::new(0, 1) || p > Rat::new(1, 1) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let num = *p.numer() as u64;
    let den = *p.denom() as u64;
    let mut rng = SplitMix64::new(seed);
    let mut bits = 0u64;
    for _ in 0..length {
        bits <<= 1;
        if rng.below(den) < num {
            bits |= 1;
        }
    }
    Ok(RingState::from_word_unchecked(bits, length))
}

/// All `2^L` states of length `length` in ascending (lexicographic) order.
/// Refuses lengths above `DEFAULT_EXHAUSTIVE_BOUND`; see
/// [`enumerate_states_with_bound`] to opt into larger sweeps.
pub fn enumerate_states(length: u32) -> Result<impl Iterator<Item = RingState>> {
    enumerate_states_with_bound(length, DEFAULT_EXHAUSTIVE_BOUND)
}

/// [`enumerate_states`] with an explicit bound.
pub fn enumerate_states_with_bound(
    length: u32,
    bound: u32,
) -> Result<impl Iterator<Item = RingState>> {
    check_length_range(length, length, bound)?;
    Ok((0..(1u64 << length)).map(move |w| RingState::from_word_unchecked(w, length)))
}
