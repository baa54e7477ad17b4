//! Exact simulation and verification laboratory for binary
//! conservation-form cellular automata on periodic rings.
//!
//! The dynamics under study move indestructible particles around a ring: a
//! state assigns each of `L` sites a 0 or 1, and one synchronous update adds
//! to every site the flux across its left edge and subtracts the flux across
//! its right edge, each flux read from a 16-entry table over the edge's
//! 4-site neighborhood. Written that way the update telescopes, so the
//! particle count is conserved by construction and every trajectory on a
//! finite ring is eventually periodic. All bookkeeping is exact: states are
//! bit-packed words, momenta and densities are rationals, and equality means
//! equality.
//!
//! The crate is organized by role:
//!
//! - [`lattice`]: ring states, cyclic pattern counting, run spectra, and the
//!   density vector `(rho, rho_011, rho_odd, rho_1*0)`.
//! - [`dynamics`]: flux tables (with the built-ins `rule1`, `ex1`, `ex2`),
//!   the synchronous step, cycle detection, and exact momentum averages.
//! - [`analysis`]: the two-phase classification of `rule1` cycles, its
//!   closed-form momenta, the predicted flow surfaces for all three
//!   built-ins, and exhaustive conservation certification.
//! - [`statesmith`]: deterministic construction of states hitting prescribed
//!   invariants, seeded random states, and exhaustive enumeration.
//! - [`lab`]: the measurement campaigns — flow-diagram sweeps with CSV and
//!   gnuplot output, space-time rendering, exhaustive verification of the
//!   `rule1` structure, and adjudication of the conjectured `ex1`/`ex2`
//!   surfaces.
//!
//! The flagship fact, checked exhaustively by [`lab::verify_rule1`]: under
//! `rule1` every cycle-averaged momentum equals
//! `max(2*rho - 1, 2*rho_011)`, with both arguments computable from the
//! initial state because `#1` and `#011` never change.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod lab;
pub mod lattice;
pub mod statesmith;

/// Exact rational scalar used for densities and momenta throughout.
pub type Rat = num_rational::Rational64;

pub use analysis::{
    analyze, analyze_with_budget, certify_conserved, certify_conserved_with_bound, classify,
    discriminant, momentum_formula_a, momentum_formula_b, predict_q_ex1, predict_q_ex2,
    predict_q_rule1, AsymptoticReport, ConservationCounterexample, ConservationReport, PhaseType,
    Quantity, DEFAULT_CERTIFY_BOUND,
};
pub use dynamics::{
    cycle_mean_momentum, default_step_budget, find_cycle, find_cycle_with_budget, mean_momentum,
    trajectory, CycleInfo, FluxRule, TABLE_LEN,
};
pub use error::{Error, Result};
pub use lattice::{Densities, Pattern, RingState, RunSpectrum, MAX_RING_LEN, MIN_RING_LEN};
pub use statesmith::{
    construct, enumerate_states, enumerate_states_with_bound, random_state, InvariantTarget,
    SplitMix64, DEFAULT_EXHAUSTIVE_BOUND,
};
