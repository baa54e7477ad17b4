//! Periodic binary ring states and cyclic pattern statistics.
//!
//! A [`RingState`] is a cyclic word of `L` binary sites (5 <= L <= 64)
//! bit-packed into one `u64`. Site 0 is the leftmost symbol of the bitstring
//! form and the most significant bit of the packed word, so enumerating
//! packed words in ascending numeric order enumerates bitstrings in
//! lexicographic order.
//!
//! All occurrence counts here are cyclic: a pattern of length `k` is tested
//! at every start position `j` in `0..L` with site indices taken modulo `L`.
//! Counting this way (rather than stopping at the right edge) is what makes
//! the combinatorial identities exact, e.g. on any ring
//! `sum_k k * runs(k) = ones` and `sum_k runs(k) + pairs("00") = zeros`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Rat;

/// Smallest supported ring. The update stencil spans five consecutive sites,
/// so shorter rings would let one neighborhood wrap onto itself.
pub const MIN_RING_LEN: u32 = 5;
/// Largest supported ring: one `u64` of sites.
pub const MAX_RING_LEN: u32 = 64;

#[inline]
const fn word_mask(len: u32) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn check_len(len: usize) -> Result<u32> {
    if len < MIN_RING_LEN as usize {
        Err(Error::TooShort(len))
    } else if len > MAX_RING_LEN as usize {
        Err(Error::TooLong(len))
    } else {
        Ok(len as u32)
    }
}

/// Parse a `{'0','1'}` string into `(bits, len)` with the first symbol mapped
/// to the most significant bit.
fn parse_bits(s: &str) -> Result<(u64, u32)> {
    let mut bits = 0u64;
    let mut len = 0usize;
    for (position, symbol) in s.chars().enumerate() {
        if position >= MAX_RING_LEN as usize {
            return Err(Error::TooLong(s.chars().count()));
        }
        bits <<= 1;
        match symbol {
            '0' => {}
            '1' => bits |= 1,
            _ => return Err(Error::NonBinarySymbol { position, symbol }),
        }
        len = position + 1;
    }
    Ok((bits, len as u32))
}

/// A periodic binary configuration on `L` sites.
///
/// `Ord` sorts by length first, then by packed word, which for equal lengths
/// is the lexicographic order of the bitstrings.
///
/// # Examples
///
/// ```
/// use ringflux::RingState;
///
/// let s: RingState = "01101110".parse().unwrap();
/// assert_eq!(s.len(), 8);
/// assert_eq!(s.ones(), 5);
/// assert_eq!(s.site(0), 0);
/// assert_eq!(s.site(1), 1);
/// assert_eq!(s.to_string(), "01101110");
/// ```
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingState {
    len: u32,
    bits: u64,
}

impl RingState {
    /// Build a state from an already-packed word. `word` must fit in `len`
    /// bits; the low bit is site `len - 1`.
    pub fn from_word(word: u64, len: u32) -> Result<Self> {
        let len = check_len(len as usize)?;
        debug_assert!(
            len == 64 || word >> len == 0,
            "word has bits beyond the ring length"
        );
        Ok(Self {
            len,
            bits: word & word_mask(len),
        })
    }

    pub(crate) const fn from_word_unchecked(word: u64, len: u32) -> Self {
        Self { len, bits: word }
    }

    /// The empty ring of length `len`.
    pub fn all_zeros(len: u32) -> Result<Self> {
        Self::from_word(0, len)
    }

    /// The fully occupied ring of length `len`.
    pub fn all_ones(len: u32) -> Result<Self> {
        let len = check_len(len as usize)?;
        Ok(Self {
            len,
            bits: word_mask(len),
        })
    }

    /// Number of sites `L`.
    #[inline]
    pub fn len(&self) -> u32 {
        self.len
    }

    /// Rings are never empty; provided to satisfy the usual pairing with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The packed word. Site 0 is the most significant of the low `len` bits.
    #[inline]
    pub fn word(&self) -> u64 {
        self.bits
    }

    /// Site value at position `j` (0-based, `j < L`), either 0 or 1.
    #[inline]
    pub fn site(&self, j: u32) -> u8 {
        debug_assert!(j < self.len);
        ((self.bits >> (self.len - 1 - j)) & 1) as u8
    }

    /// Number of occupied sites.
    #[inline]
    pub fn ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of empty sites.
    #[inline]
    pub fn zeros(&self) -> u32 {
        self.len - self.ones()
    }

    /// The state with sites relabelled `v_j = u_{(j + k) mod L}`.
    pub fn rotated(&self, k: i64) -> Self {
        let l = i64::from(self.len);
        let s = k.rem_euclid(l) as u32;
        if s == 0 {
            return *self;
        }
        let bits = ((self.bits << s) | (self.bits >> (self.len - s))) & word_mask(self.len);
        Self {
            len: self.len,
            bits,
        }
    }

    /// The cyclic window `u_j u_{j+1} .. u_{j+k-1}` packed MSB-first into the
    /// low `k` bits. `k` must satisfy `1 <= k <= L`.
    #[inline]
    pub fn window(&self, j: u32, k: u32) -> u64 {
        debug_assert!(k >= 1 && k <= self.len && j < self.len);
        self.rotated(i64::from(j)).bits >> (self.len - k)
    }

    /// Count cyclic occurrences of `pattern`: start positions `j` in `0..L`
    /// such that the window of `pattern.len()` sites at `j` equals `pattern`,
    /// indices mod `L`.
    ///
    /// ```
    /// use ringflux::{Pattern, RingState};
    ///
    /// let s: RingState = "01101110".parse().unwrap();
    /// let p: Pattern = "011".parse().unwrap();
    /// assert_eq!(s.count_pattern(p).unwrap(), 2); // at j = 0 and j = 4
    /// ```
    pub fn count_pattern(&self, pattern: Pattern) -> Result<u32> {
        let k = pattern.len();
        if k > self.len {
            return Err(Error::PatternTooLong {
                pattern: k,
                ring: self.len,
            });
        }
        let mask = word_mask(k);
        let mut w = self.window(0, k);
        let mut count = 0;
        for j in 0..self.len {
            if w == pattern.bits {
                count += 1;
            }
            w = ((w << 1) | u64::from(self.site((j + k) % self.len))) & mask;
        }
        Ok(count)
    }

    /// The multiset of maximal runs of 1s, plus adjacent-zero statistics.
    /// See [`RunSpectrum`].
    pub fn run_spectrum(&self) -> RunSpectrum {
        if self.ones() == self.len {
            return RunSpectrum {
                run_counts: BTreeMap::new(),
                zero_pair_count: 0,
                saturated: true,
                ones: self.len,
            };
        }
        // Walk one full cycle starting just past some empty site, so every
        // maximal run is seen whole and the wrap-around pair is not missed.
        let z = (0..self.len)
            .find(|&j| self.site(j) == 0)
            .expect("unsaturated state has an empty site");
        let mut run_counts: BTreeMap<u32, u32> = BTreeMap::new();
        let mut zero_pair_count = 0;
        let mut run_len = 0;
        let mut prev = 0u8; // value at z
        for offset in 1..=self.len {
            let cur = self.site((z + offset) % self.len);
            if cur == 1 {
                run_len += 1;
            } else {
                if run_len > 0 {
                    *run_counts.entry(run_len).or_insert(0) += 1;
                    run_len = 0;
                }
                if prev == 0 {
                    zero_pair_count += 1;
                }
            }
            prev = cur;
        }
        debug_assert_eq!(run_len, 0, "walk ends on the starting empty site");
        RunSpectrum {
            run_counts,
            zero_pair_count,
            saturated: false,
            ones: self.ones(),
        }
    }

    /// Exact site and pattern densities of this state. See [`Densities`].
    pub fn densities(&self) -> Densities {
        let l = i64::from(self.len);
        let spectrum = self.run_spectrum();
        let n011 = self
            .count_pattern(Pattern::P011)
            .expect("3 <= L always holds");
        let n110 = self
            .count_pattern(Pattern::P110)
            .expect("3 <= L always holds");
        let n100 = self
            .count_pattern(Pattern::P100)
            .expect("3 <= L always holds");
        Densities {
            rho: Rat::new(i64::from(self.ones()), l),
            rho_011: Rat::new(i64::from(n011), l),
            rho_odd: Rat::new(i64::from(spectrum.odd_runs()), l),
            rho_1star0: Rat::new(i64::from(n110 + n100), l),
        }
    }
}

impl fmt::Display for RingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", self.site(j))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingState(\"{self}\")")
    }
}

impl FromStr for RingState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (bits, len) = parse_bits(s)?;
        let len = check_len(len as usize)?;
        Ok(Self { len, bits })
    }
}

/// A short binary word to count inside a ring, 1 to 64 symbols.
///
/// Patterns are matched cyclically; see [`RingState::count_pattern`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pattern {
    len: u32,
    bits: u64,
}

impl Pattern {
    /// The patterns behind the standard densities: `011` marks a run that
    /// continues, `110`/`100` together mark `1*0` edges, `00` marks slack.
    pub const P011: Pattern = Pattern { len: 3, bits: 0b011 };
    pub const P110: Pattern = Pattern { len: 3, bits: 0b110 };
    pub const P100: Pattern = Pattern { len: 3, bits: 0b100 };
    pub const P00: Pattern = Pattern { len: 2, bits: 0b00 };

    /// The isolated-run pattern `0 1^k 0`, e.g. `run(2) == "0110"`.
    pub fn run(k: u32) -> Result<Self> {
        if k + 2 > MAX_RING_LEN {
            return Err(Error::TooLong((k + 2) as usize));
        }
        let ones = word_mask(k) << 1;
        Ok(Self {
            len: k + 2,
            bits: ones,
        })
    }

    /// Number of symbols in the pattern.
    #[inline]
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed word, first symbol in the most significant of the low `len` bits.
    #[inline]
    pub fn word(&self) -> u64 {
        self.bits
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", (self.bits >> (self.len - 1 - j)) & 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern(\"{self}\")")
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (bits, len) = parse_bits(s)?;
        if len == 0 {
            return Err(Error::EmptyPattern);
        }
        Ok(Self { len, bits })
    }
}

/// Run statistics of a ring: how many maximal runs of 1s of each length it
/// carries, and how many adjacent `00` pairs.
///
/// For the fully occupied ring (`saturated`) the single wrap-around "run" has
/// no delimiting zero, so `run_counts` is empty and `zero_pair_count` is 0.
/// For the empty ring every one of the `L` cyclic pairs is `00`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSpectrum {
    run_counts: BTreeMap<u32, u32>,
    zero_pair_count: u32,
    saturated: bool,
    ones: u32,
}

impl RunSpectrum {
    /// Number of maximal runs of exactly `k` consecutive 1s.
    pub fn count(&self, k: u32) -> u32 {
        self.run_counts.get(&k).copied().unwrap_or(0)
    }

    /// Number of cyclically adjacent positions `(j, j+1)` that are both 0.
    pub fn zero_pair_count(&self) -> u32 {
        self.zero_pair_count
    }

    /// True for the fully occupied ring, whose occupation wraps without a
    /// delimiting zero and is not counted as a run.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Total number of maximal runs.
    pub fn total_runs(&self) -> u32 {
        self.run_counts.values().sum()
    }

    /// Number of maximal runs of odd length.
    pub fn odd_runs(&self) -> u32 {
        self.run_counts
            .iter()
            .filter(|(k, _)| *k % 2 == 1)
            .map(|(_, c)| c)
            .sum()
    }

    /// Length of the longest run, `None` if there are no runs.
    pub fn max_run(&self) -> Option<u32> {
        self.run_counts.keys().next_back().copied()
    }

    /// Iterate `(run length, count)` pairs in increasing run length.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.run_counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Number of occupied sites the spectrum was taken from.
    pub fn ones(&self) -> u32 {
        self.ones
    }
}

/// The exact per-site densities that parameterize the flow diagrams:
/// occupation `rho`, pattern densities `rho_011` and `rho_1star0`
/// (`#110 + #100` per site), and the density `rho_odd` of odd-length runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Densities {
    pub rho: Rat,
    pub rho_011: Rat,
    pub rho_odd: Rat,
    pub rho_1star0: Rat,
}
