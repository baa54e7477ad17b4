//! Exhaustive verification of the flow law and adjudication of the
//! conjectured diagrams.
//!
//! [`verify_rule1`] enumerates every state in a length range, runs each to
//! its cycle, and checks the whole advertised structure of the dynamics:
//! the max-law for the cycle-averaged momentum, the two-phase classification
//! with its discriminant, conservation of `#1` and `#011` along entire
//! trajectories, and the transport behavior of long runs. Any failure is
//! collected with the offending state so it can be replayed.
//!
//! [`adjudicate`] does the measurement half of the same job for the `ex1`
//! and `ex2` tables, whose flow surfaces are conjectured rather than proven:
//! it certifies the claimed (quasi-)invariants strictly and tallies exact
//! agreement between measured and predicted momentum, reporting every
//! disagreeing state as a finding rather than an error.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::analysis::{
    classify, discriminant, momentum_formula_a, momentum_formula_b, predict_q_ex1, predict_q_ex2,
    predict_q_rule1, PhaseType,
};
use crate::dynamics::{self, FluxRule};
use crate::error::Result;
use crate::lattice::{Pattern, RingState};
use crate::statesmith;
use crate::Rat;

/// Default exhaustive ceiling for [`verify_rule1`].
pub const DEFAULT_VERIFY_BOUND: u32 = 14;
/// Default exhaustive ceiling for [`adjudicate`].
pub const DEFAULT_ADJUDICATE_BOUND: u32 = 12;

/// A state that breaks a structural claim, with a human-readable account.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// The initial state whose trajectory exhibits the failure.
    pub state: RingState,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state={} {}", self.state, self.detail)
    }
}

/// A state whose measured cycle momentum differs from the predicted surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentumMismatch {
    pub state: RingState,
    pub measured: Rat,
    pub predicted: Rat,
}

impl fmt::Display for MomentumMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "state={} measured={} predicted={}",
            self.state, self.measured, self.predicted
        )
    }
}

/// Everything an exhaustive run found. `pass()` demands a completely clean
/// sheet; `findings_text()` is the deterministic file form (no timings).
#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// What ran, e.g. `verify rule1` or `adjudicate ex2`.
    pub task: String,
    pub rule_string: String,
    pub l_min: u32,
    pub l_max: u32,
    pub states_checked: u64,
    /// States whose measured momentum matched the prediction exactly.
    pub agreeing_states: u64,
    pub momentum_mismatches: Vec<MomentumMismatch>,
    pub phase_violations: Vec<Violation>,
    pub conservation_violations: Vec<Violation>,
    pub transport_violations: Vec<Violation>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.momentum_mismatches.is_empty()
            && self.phase_violations.is_empty()
            && self.conservation_violations.is_empty()
            && self.transport_violations.is_empty()
    }

    /// `(agreeing, total)` exact-agreement tally.
    pub fn agreement(&self) -> (u64, u64) {
        (self.agreeing_states, self.states_checked)
    }

    /// Deterministic text form: everything except wall-clock timing, one
    /// finding per line, replayable by parsing the `state=` bitstrings.
    pub fn findings_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# task: {}\n", self.task));
        out.push_str(&format!("# rule: {}\n", self.rule_string));
        out.push_str(&format!("# range: L={}..{}\n", self.l_min, self.l_max));
        out.push_str(&format!("# states-checked: {}\n", self.states_checked));
        out.push_str(&format!(
            "# agreement: {}/{}\n",
            self.agreeing_states, self.states_checked
        ));
        out.push_str(&format!(
            "# verdict: {}\n",
            if self.pass() { "PASS" } else { "FINDINGS" }
        ));
        for m in &self.momentum_mismatches {
            out.push_str(&format!("momentum {m}\n"));
        }
        for v in &self.phase_violations {
            out.push_str(&format!("phase {v}\n"));
        }
        for v in &self.conservation_violations {
            out.push_str(&format!("conservation {v}\n"));
        }
        for v in &self.transport_violations {
            out.push_str(&format!("transport {v}\n"));
        }
        out
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}  L={}..{}  {} states  {:.2?}",
            self.task, self.l_min, self.l_max, self.states_checked, self.elapsed
        )?;
        writeln!(
            f,
            "momentum agreement: {}/{}",
            self.agreeing_states, self.states_checked
        )?;
        writeln!(f, "momentum mismatches:     {}", self.momentum_mismatches.len())?;
        writeln!(f, "phase violations:        {}", self.phase_violations.len())?;
        writeln!(
            f,
            "conservation violations: {}",
            self.conservation_violations.len()
        )?;
        writeln!(f, "transport violations:    {}", self.transport_violations.len())?;
        write!(f, "verdict: {}", if self.pass() { "PASS" } else { "FINDINGS" })
    }
}

/// Write the deterministic findings file for a report.
pub fn write_findings(report: &VerifyReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.findings_text())?;
    Ok(())
}

/// Per-state scratch gathered in parallel, merged in enumeration order.
#[derive(Default)]
struct StateOutcome {
    agreed: bool,
    momentum: Option<MomentumMismatch>,
    phase: Vec<Violation>,
    conservation: Vec<Violation>,
    transport: Vec<Violation>,
}

/// Start positions of maximal runs of exactly `k` ones.
fn run_starts(state: &RingState, k: u32) -> Vec<u32> {
    let l = state.len();
    (0..l)
        .filter(|&j| {
            state.site((j + l - 1) % l) == 0
                && (0..k).all(|i| state.site((j + i) % l) == 1)
                && state.site((j + k) % l) == 0
        })
        .collect()
}

fn count_011(state: &RingState) -> u32 {
    state
        .count_pattern(Pattern::P011)
        .expect("pattern fits any supported ring")
}

/// Full structural check of one trajectory under the max-law rule.
fn check_rule1_state(rule: &FluxRule, s0: RingState) -> Result<StateOutcome> {
    let mut out = StateOutcome::default();
    let cycle = dynamics::find_cycle(rule, &s0)?;
    let l = s0.len();
    let ones0 = s0.ones();
    let n011_0 = count_011(&s0);

    // (a) Along the whole trajectory: #1 and #011 never change, runs of
    // length >= 4 never appear from nowhere, never lengthen, and their count
    // at the current maximum never grows.
    let mut prev = s0;
    let mut prev_spectrum = s0.run_spectrum();
    for step in 0..(cycle.transient + cycle.period) {
        let next = rule.step(&prev)?;
        if next.ones() != ones0 {
            out.conservation.push(Violation {
                state: s0,
                detail: format!("step {}: #1 {} -> {}", step + 1, ones0, next.ones()),
            });
        }
        let n011 = count_011(&next);
        if n011 != n011_0 {
            out.conservation.push(Violation {
                state: s0,
                detail: format!("step {}: #011 {} -> {}", step + 1, n011_0, n011),
            });
        }
        let next_spectrum = next.run_spectrum();
        let prev_max = prev_spectrum.max_run().filter(|&k| k >= 4);
        let next_max = next_spectrum.max_run().filter(|&k| k >= 4);
        match (prev_max, next_max) {
            (None, Some(k)) => out.transport.push(Violation {
                state: s0,
                detail: format!("step {}: run of {k} appeared out of short runs", step + 1),
            }),
            (Some(kp), Some(kn)) if kn > kp => out.transport.push(Violation {
                state: s0,
                detail: format!("step {}: longest run grew {kp} -> {kn}", step + 1),
            }),
            (Some(kp), Some(kn))
                if kn == kp && next_spectrum.count(kn) > prev_spectrum.count(kp) =>
            {
                out.transport.push(Violation {
                    state: s0,
                    detail: format!(
                        "step {}: count of longest runs ({kp}) grew {} -> {}",
                        step + 1,
                        prev_spectrum.count(kp),
                        next_spectrum.count(kn)
                    ),
                })
            }
            _ => {}
        }
        if !out.conservation.is_empty() || !out.transport.is_empty() {
            break; // one account per state is enough to replay it
        }
        prev = next;
        prev_spectrum = next_spectrum;
    }

    // (b) On the cycle: two-phase classification with the discriminant sign,
    // the matching closed-form momentum, momentum constancy, and rigid
    // transport of long runs (counts constant, starts shifted by two).
    let q_mean = dynamics::cycle_mean_momentum(rule, &cycle)?;
    let period = cycle.period as usize;
    for (i, cs) in cycle.cycle_states.iter().enumerate() {
        let phase = classify(cs);
        let disc = discriminant(cs);
        let disc_ok = match phase {
            PhaseType::TypeA => disc <= 0,
            PhaseType::TypeB => disc > 0,
            PhaseType::Other => {
                out.phase.push(Violation {
                    state: s0,
                    detail: format!("cycle state {cs} classifies as Other"),
                });
                continue;
            }
        };
        if !disc_ok {
            out.phase.push(Violation {
                state: s0,
                detail: format!("cycle state {cs}: discriminant {disc} contradicts {phase}"),
            });
        }
        let q_inst = rule.instantaneous_momentum(cs);
        let formula = match phase {
            PhaseType::TypeA => momentum_formula_a(cs)?,
            _ => momentum_formula_b(cs)?,
        };
        if formula != q_inst {
            out.phase.push(Violation {
                state: s0,
                detail: format!(
                    "cycle state {cs}: {phase} closed form {formula} != momentum {q_inst}"
                ),
            });
        }
        if q_inst != q_mean {
            out.phase.push(Violation {
                state: s0,
                detail: format!("cycle state {cs}: momentum {q_inst} != cycle mean {q_mean}"),
            });
        }

        let succ = &cycle.cycle_states[(i + 1) % period];
        let spec_here = cs.run_spectrum();
        let spec_next = succ.run_spectrum();
        for (k, c) in spec_here.iter().filter(|&(k, _)| k >= 4) {
            if spec_next.count(k) != c {
                out.transport.push(Violation {
                    state: s0,
                    detail: format!(
                        "cycle state {cs}: count of {k}-runs changed {c} -> {}",
                        spec_next.count(k)
                    ),
                });
                continue;
            }
            let mut expected: Vec<u32> =
                run_starts(cs, k).iter().map(|&j| (j + 2) % l).collect();
            expected.sort_unstable();
            let actual = {
                let mut v = run_starts(succ, k);
                v.sort_unstable();
                v
            };
            if expected != actual {
                out.transport.push(Violation {
                    state: s0,
                    detail: format!("cycle state {cs}: {k}-runs did not shift by two"),
                });
            }
        }
        for (k, _) in spec_next.iter().filter(|&(k, _)| k >= 4) {
            if spec_here.count(k) == 0 {
                out.transport.push(Violation {
                    state: s0,
                    detail: format!("cycle state {succ}: {k}-runs appeared on the cycle"),
                });
            }
        }
        // With no pairs and no slack the asymptotic motion is rigid, so the
        // whole run spectrum must survive each step (pairs-and-slack cycles
        // are allowed to merge and split short runs).
        if phase == PhaseType::TypeA && spec_next != spec_here {
            out.transport.push(Violation {
                state: s0,
                detail: format!("cycle state {cs}: run spectrum changed without pairs or slack"),
            });
        }
    }

    // (c) The headline law: cycle-averaged momentum equals the max surface
    // evaluated on the initial (conserved) densities.
    let d0 = s0.densities();
    let predicted = predict_q_rule1(d0.rho, d0.rho_011);
    if q_mean == predicted {
        out.agreed = true;
    } else {
        out.momentum = Some(MomentumMismatch {
            state: s0,
            measured: q_mean,
            predicted,
        });
    }
    Ok(out)
}

/// Which conjectured diagram to adjudicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdjudicatedRule {
    Ex1,
    Ex2,
}

impl AdjudicatedRule {
    pub fn rule(self) -> FluxRule {
        match self {
            AdjudicatedRule::Ex1 => FluxRule::ex1(),
            AdjudicatedRule::Ex2 => FluxRule::ex2(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            AdjudicatedRule::Ex1 => "ex1",
            AdjudicatedRule::Ex2 => "ex2",
        }
    }
}

/// Measurement check of one trajectory under a conjectured diagram.
fn check_adjudicated_state(
    which: AdjudicatedRule,
    rule: &FluxRule,
    s0: RingState,
) -> Result<StateOutcome> {
    let mut out = StateOutcome::default();
    let cycle = dynamics::find_cycle(rule, &s0)?;
    let d0 = s0.densities();

    let predicted = match which {
        AdjudicatedRule::Ex1 => {
            // The odd-run count is claimed invariant along the whole
            // trajectory; certify that strictly here.
            let odd0 = s0.run_spectrum().odd_runs();
            let mut prev = s0;
            for step in 0..(cycle.transient + cycle.period) {
                let next = rule.step(&prev)?;
                let odd = next.run_spectrum().odd_runs();
                if odd != odd0 {
                    out.conservation.push(Violation {
                        state: s0,
                        detail: format!("step {}: odd runs {odd0} -> {odd}", step + 1),
                    });
                    break;
                }
                prev = next;
            }
            predict_q_ex1(d0.rho, d0.rho_odd)
        }
        AdjudicatedRule::Ex2 => {
            // rho_1star0 is only claimed constant once the transient has
            // died; certify constancy across the cycle.
            let entry = cycle.cycle_states[0];
            let aux0 = entry.densities().rho_1star0;
            for cs in &cycle.cycle_states[1..] {
                let aux = cs.densities().rho_1star0;
                if aux != aux0 {
                    out.conservation.push(Violation {
                        state: s0,
                        detail: format!("on cycle: rho_1*0 {aux0} -> {aux} at {cs}"),
                    });
                    break;
                }
            }
            predict_q_ex2(d0.rho, aux0)
        }
    };

    let measured = dynamics::cycle_mean_momentum(rule, &cycle)?;
    if measured == predicted {
        out.agreed = true;
    } else {
        out.momentum = Some(MomentumMismatch {
            state: s0,
            measured,
            predicted,
        });
    }
    Ok(out)
}

/// Run per-state checks over every state of every length in the range, in
/// parallel, merging results in enumeration order.
fn run_exhaustive<F>(
    task: String,
    rule: &FluxRule,
    l_min: u32,
    l_max: u32,
    bound: u32,
    check: F,
) -> Result<VerifyReport>
where
    F: Fn(&FluxRule, RingState) -> Result<StateOutcome> + Sync,
{
    statesmith::check_length_range(l_min, l_max, bound)?;
    let started = Instant::now();
    let mut report = VerifyReport {
        task,
        rule_string: rule.to_string(),
        l_min,
        l_max,
        states_checked: 0,
        agreeing_states: 0,
        momentum_mismatches: Vec::new(),
        phase_violations: Vec::new(),
        conservation_violations: Vec::new(),
        transport_violations: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for l in l_min..=l_max {
        // Indexed collect keeps outcomes in enumeration order, so findings
        // land in the report deterministically regardless of thread count.
        let outcomes: Vec<Result<StateOutcome>> = (0..(1u64 << l))
            .into_par_iter()
            .map(|w| check(rule, RingState::from_word_unchecked(w, l)))
            .collect();
        report.states_checked += 1u64 << l;
        for o in outcomes {
            let mut o = o?;
            report.agreeing_states += u64::from(o.agreed);
            if let Some(m) = o.momentum.take() {
                report.momentum_mismatches.push(m);
            }
            report.phase_violations.append(&mut o.phase);
            report.conservation_violations.append(&mut o.conservation);
            report.transport_violations.append(&mut o.transport);
        }
    }
    report.elapsed = started.elapsed();
    Ok(report)
}

/// Exhaustively verify the whole advertised structure of the built-in
/// `rule1` dynamics over `l_min..=l_max` (default ceiling
/// [`DEFAULT_VERIFY_BOUND`]).
pub fn verify_rule1(l_min: u32, l_max: u32) -> Result<VerifyReport> {
    verify_rule1_with(&FluxRule::rule1(), l_min, l_max, DEFAULT_VERIFY_BOUND)
}

/// [`verify_rule1`] against an arbitrary flux table, with an explicit bound.
///
/// Running the suite against a deliberately corrupted table is the standard
/// negative control: the checks must light up, or they check nothing.
pub fn verify_rule1_with(
    rule: &FluxRule,
    l_min: u32,
    l_max: u32,
    bound: u32,
) -> Result<VerifyReport> {
    run_exhaustive(
        "verify rule1".to_string(),
        rule,
        l_min,
        l_max,
        bound,
        |r, s| check_rule1_state(r, s),
    )
}

/// Exhaustively compare a conjectured diagram against measured cycle
/// momenta, certifying its claimed invariants along the way (default
/// ceiling [`DEFAULT_ADJUDICATE_BOUND`]).
pub fn adjudicate(which: AdjudicatedRule, l_min: u32, l_max: u32) -> Result<VerifyReport> {
    adjudicate_with_bound(which, l_min, l_max, DEFAULT_ADJUDICATE_BOUND)
}

/// [`adjudicate`] with an explicit bound.
pub fn adjudicate_with_bound(
    which: AdjudicatedRule,
    l_min: u32,
    l_max: u32,
    bound: u32,
) -> Result<VerifyReport> {
    let rule = which.rule();
    run_exhaustive(
        format!("adjudicate {}", which.label()),
        &rule,
        l_min,
        l_max,
        bound,
        move |r, s| check_adjudicated_state(which, r, s),
    )
}
