//! Phase classification, closed-form momentum laws, and conservation
//! certificates.
//!
//! Under the built-in `rule1` every trajectory settles onto a cycle of one of
//! two shapes. In the jammed phase ([`PhaseType::TypeA`]) the empty sites are
//! isolated and no pair can form, so holes stream left through the packed
//! background. In the free phase ([`PhaseType::TypeB`]) every pack has
//! dissolved into singles and pairs with slack around them, and the pairs
//! carry all the flow. Each shape comes with an exact momentum formula, and
//! the asymptotic mean momentum is the larger of the two laws evaluated on
//! the conserved densities:
//!
//! ```text
//! Q(rho, rho_011) = max(2 rho - 1, 2 rho_011)
//! ```
//!
//! The module also hosts the analogous conjectured predictors for the `ex1`
//! and `ex2` tables and a brute-force certifier for single-step conservation
//! of arbitrary counting observables.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rayon::prelude::*;

use crate::dynamics::{self, CycleInfo, FluxRule};
use crate::error::{Error, Result};
use crate::lattice::{Densities, Pattern, RingState};
use crate::statesmith;
use crate::Rat;

/// Largest `L` the exhaustive certifiers accept by default.
pub const DEFAULT_CERTIFY_BOUND: u32 = 16;

/// The two asymptotic shapes of `rule1` cycles, plus a bucket for states that
/// are neither (such states exist, but never on a cycle).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseType {
    /// Jammed: no isolated pair (`0110`) and no adjacent empties (`00`).
    TypeA,
    /// Free-flowing: some pair or slack exists, and no run of four or more.
    TypeB,
    /// Neither shape; transient only.
    Other,
}

impl fmt::Display for PhaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseType::TypeA => "TypeA",
            PhaseType::TypeB => "TypeB",
            PhaseType::Other => "Other",
        })
    }
}

impl FromStr for PhaseType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TypeA" => Ok(PhaseType::TypeA),
            "TypeB" => Ok(PhaseType::TypeB),
            "Other" => Ok(PhaseType::Other),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Classify a state by its run structure. See [`PhaseType`].
pub fn classify(state: &RingState) -> PhaseType {
    let spectrum = state.run_spectrum();
    let has_pair_run = spectrum.count(2) > 0;
    let has_slack = spectrum.zero_pair_count() > 0;
    if !has_pair_run && !has_slack {
        return PhaseType::TypeA;
    }
    if spectrum.max_run().is_none_or(|k| k < 4) {
        PhaseType::TypeB
    } else {
        PhaseType::Other
    }
}

/// The integer `2 * #011 - #1 + #0`. On cycle states its sign separates the
/// phases: nonpositive exactly for [`PhaseType::TypeA`], positive exactly for
/// [`PhaseType::TypeB`].
pub fn discriminant(state: &RingState) -> i64 {
    let n011 = state
        .count_pattern(Pattern::P011)
        .expect("pattern fits any ring");
    2 * i64::from(n011) - i64::from(state.ones()) + i64::from(state.zeros())
}

/// Momentum of a jammed cycle state: `(#1 - #0) / L`. Every empty site is
/// isolated and swallows one unit of backward flow per step.
///
/// Errors with [`Error::WrongPhase`] unless `state` classifies as `TypeA`.
pub fn momentum_formula_a(state: &RingState) -> Result<Rat> {
    let actual = classify(state);
    if actual != PhaseType::TypeA {
        return Err(Error::WrongPhase {
            expected: PhaseType::TypeA,
            actual,
        });
    }
    Ok(Rat::new(
        i64::from(state.ones()) - i64::from(state.zeros()),
        i64::from(state.len()),
    ))
}

/// Momentum of a free-flowing cycle state: `2 * #011 / L`. Each pair head
/// advances and drags its partner behind it.
///
/// Errors with [`Error::WrongPhase`] unless `state` classifies as `TypeB`.
pub fn momentum_formula_b(state: &RingState) -> Result<Rat> {
    let actual = classify(state);
    if actual != PhaseType::TypeB {
        return Err(Error::WrongPhase {
            expected: PhaseType::TypeB,
            actual,
        });
    }
    let n011 = state
        .count_pattern(Pattern::P011)
        .expect("pattern fits any ring");
    Ok(Rat::new(2 * i64::from(n011), i64::from(state.len())))
}

/// Asymptotic momentum surface for `rule1`: `max(2 rho - 1, 2 rho_011)`,
/// evaluated on the (conserved) initial densities.
pub fn predict_q_rule1(rho: Rat, rho_011: Rat) -> Rat {
    let two = Rat::from_integer(2);
    (two * rho - Rat::one()).max(two * rho_011)
}

/// Conjectured momentum surface for `ex1`: `min(2 (1 - rho), rho - rho_odd)`,
/// with `rho_odd` the density of odd-length runs.
pub fn predict_q_ex1(rho: Rat, rho_odd: Rat) -> Rat {
    let two = Rat::from_integer(2);
    (two * (Rat::one() - rho)).min(rho - rho_odd)
}

/// Conjectured momentum surface for `ex2`:
/// `min(2 rho, -4 rho_1star0 + 1, 2 (1 - rho))`, with `rho_1star0` taken on
/// the cycle (it is constant there but not along transients).
pub fn predict_q_ex2(rho: Rat, rho_1star0: Rat) -> Rat {
    let two = Rat::from_integer(2);
    let four = Rat::from_integer(4);
    (two * rho)
        .min(Rat::one() - four * rho_1star0)
        .min(two * (Rat::one() - rho))
}

/// An observable whose single-step conservation can be certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Cyclic occurrence count of a fixed pattern.
    PatternCount(Pattern),
    /// Number of maximal runs of odd length.
    OddRunCount,
    /// `#110 + #100`: packed-ahead-of-hole windows.
    OneStarZeroCount,
    /// Total occupation `#1`.
    SiteSum,
}

impl Quantity {
    /// Evaluate the observable on one state.
    pub fn evaluate(&self, state: &RingState) -> Result<i64> {
        Ok(match self {
            Quantity::PatternCount(p) => i64::from(state.count_pattern(*p)?),
            Quantity::OddRunCount => i64::from(state.run_spectrum().odd_runs()),
            Quantity::OneStarZeroCount => {
                let a = state.count_pattern(Pattern::P110)?;
                let b = state.count_pattern(Pattern::P100)?;
                i64::from(a + b)
            }
            Quantity::SiteSum => i64::from(state.ones()),
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::PatternCount(p) => write!(f, "pattern:{p}"),
            Quantity::OddRunCount => f.write_str("odd-runs"),
            Quantity::OneStarZeroCount => f.write_str("one-star-zero"),
            Quantity::SiteSum => f.write_str("site-sum"),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(p) = s.strip_prefix("pattern:") {
            return Ok(Quantity::PatternCount(p.parse()?));
        }
        match s {
            "odd-runs" => Ok(Quantity::OddRunCount),
            "one-star-zero" => Ok(Quantity::OneStarZeroCount),
            "site-sum" => Ok(Quantity::SiteSum),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// A state on which a claimed invariant changes in one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservationCounterexample {
    pub state: RingState,
    pub before: i64,
    pub after: i64,
}

/// Outcome of exhaustively checking one observable for single-step
/// conservation over every state of every length in a range.
#[derive(Clone, Debug)]
pub struct ConservationReport {
    pub rule_string: String,
    pub quantity: Quantity,
    pub l_min: u32,
    pub l_max: u32,
    pub states_checked: u64,
    /// The first violating state in (length, lexicographic) order, if any.
    pub counterexample: Option<ConservationCounterexample>,
}

impl ConservationReport {
    pub fn conserved(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for ConservationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule: {}", self.rule_string)?;
        writeln!(f, "quantity: {}", self.quantity)?;
        writeln!(f, "range: L={}..{}", self.l_min, self.l_max)?;
        writeln!(f, "states checked: {}", self.states_checked)?;
        match &self.counterexample {
            None => write!(f, "verdict: CONSERVED"),
            Some(c) => {
                writeln!(
                    f,
                    "counterexample: state={} before={} after={}",
                    c.state, c.before, c.after
                )?;
                write!(f, "verdict: NOT CONSERVED")
            }
        }
    }
}

/// Exhaustively check whether `quantity` is invariant under one step of
/// `rule` for every state with `l_min <= L <= l_max`, reporting the first
/// counterexample in enumeration order if one exists.
pub fn certify_conserved(
    rule: &FluxRule,
    quantity: &Quantity,
    l_min: u32,
    l_max: u32,
) -> Result<ConservationReport> {
    certify_conserved_with_bound(rule, quantity, l_min, l_max, DEFAULT_CERTIFY_BOUND)
}

/// [`certify_conserved`] with an explicit cap on the exhaustive range.
pub fn certify_conserved_with_bound(
    rule: &FluxRule,
    quantity: &Quantity,
    l_min: u32,
    l_max: u32,
    bound: u32,
) -> Result<ConservationReport> {
    statesmith::check_length_range(l_min, l_max, bound)?;
    let mut states_checked = 0u64;
    let mut counterexample = None;
    for l in l_min..=l_max {
        states_checked += 1u64 << l;
        if counterexample.is_some() {
            continue; // already found at a smaller length; keep the count exact
        }
        // find_map_first keeps the lexicographically least violator.
        counterexample = (0..(1u64 << l))
            .into_par_iter()
            .map(|w| -> Result<Option<ConservationCounterexample>> {
                let state = RingState::from_word_unchecked(w, l);
                let before = quantity.evaluate(&state)?;
                let after = quantity.evaluate(&rule.step(&state)?)?;
                Ok((before != after).then_some(ConservationCounterexample {
                    state,
                    before,
                    after,
                }))
            })
            .find_map_first(|r| r.transpose())
            .transpose()?;
    }
    Ok(ConservationReport {
        rule_string: rule.to_string(),
        quantity: quantity.clone(),
        l_min,
        l_max,
        states_checked,
        counterexample,
    })
}

/// Everything the lab records about one trajectory: its exact cycle, the
/// cycle-averaged momentum, the phase of the attractor, and the densities
/// before and after the transient.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub cycle: CycleInfo,
    pub mean_momentum: Rat,
    pub type_label: PhaseType,
    pub densities_initial: Densities,
    pub densities_asymptotic: Densities,
}

impl fmt::Display for AsymptoticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entry = &self.cycle.cycle_states[0];
        writeln!(f, "transient: {}", self.cycle.transient)?;
        writeln!(f, "period: {}", self.cycle.period)?;
        writeln!(f, "cycle entry state: {entry}")?;
        writeln!(f, "mean momentum: {}", self.mean_momentum)?;
        writeln!(f, "attractor type: {}", self.type_label)?;
        let d0 = &self.densities_initial;
        writeln!(
            f,
            "initial densities: rho={} rho_011={} rho_odd={} rho_1*0={}",
            d0.rho, d0.rho_011, d0.rho_odd, d0.rho_1star0
        )?;
        let d1 = &self.densities_asymptotic;
        write!(
            f,
            "cycle densities:   rho={} rho_011={} rho_odd={} rho_1*0={}",
            d1.rho, d1.rho_011, d1.rho_odd, d1.rho_1star0
        )
    }
}

/// Run one trajectory to its cycle and summarize it. See [`AsymptoticReport`].
pub fn analyze(rule: &FluxRule, state: &RingState) -> Result<AsymptoticReport> {
    analyze_with_budget(rule, state, dynamics::default_step_budget(state.len()))
}

/// [`analyze`] with an explicit step budget for cycle detection.
pub fn analyze_with_budget(
    rule: &FluxRule,
    state: &RingState,
    budget: u64,
) -> Result<AsymptoticReport> {
    let cycle = dynamics::find_cycle_with_budget(rule, state, budget)?;
    let mean_momentum = dynamics::cycle_mean_momentum(rule, &cycle)?;
    let entry = cycle.cycle_states[0];
    Ok(AsymptoticReport {
        mean_momentum,
        type_label: classify(&entry),
        densities_initial: state.densities(),
        densities_asymptotic: entry.densities(),
        cycle,
    })
}
