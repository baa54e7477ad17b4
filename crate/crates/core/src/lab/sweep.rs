//! Diagram sweeps: measure the asymptotic momentum of many trajectories and
//! tag each with its exact densities and provenance.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{self, PhaseType};
use crate::dynamics::{self, FluxRule};
use crate::error::{Error, Result};
use crate::lattice::RingState;
use crate::statesmith::{self, InvariantTarget, SplitMix64, DEFAULT_EXHAUSTIVE_BOUND};
use crate::Rat;

/// Where a measured state came from — enough to regenerate it exactly.
///
/// The text form is CSV-safe (no commas) and round-trips through `FromStr`:
/// `bits:01101110`, `ctor:L=60;ones=30;runs2=5;seed=7`, `rand:L=40;p=1/2;seed=9`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// An explicitly given configuration.
    Bits(RingState),
    /// Built by [`statesmith::construct`] from an invariant target and seed.
    Constructed { target: InvariantTarget, seed: u64 },
    /// Drawn by [`statesmith::random_state`].
    Random { length: u32, p: Rat, seed: u64 },
}

impl Origin {
    /// Recreate the initial state this origin describes.
    pub fn realize(&self) -> Result<RingState> {
        match self {
            Origin::Bits(state) => Ok(*state),
            Origin::Constructed { target, seed } => statesmith::construct(target, *seed),
            Origin::Random { length, p, seed } => statesmith::random_state(*length, *p, *seed),
        }
    }

    /// Ring length of the state this origin generates.
    pub fn length(&self) -> u32 {
        match self {
            Origin::Bits(state) => state.len(),
            Origin::Constructed { target, .. } => target.length,
            Origin::Random { length, .. } => *length,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Bits(state) => write!(f, "bits:{state}"),
            Origin::Constructed { target, seed } => write!(f, "ctor:{target};seed={seed}"),
            Origin::Random { length, p, seed } => {
                write!(f, "rand:L={length};p={p};seed={seed}")
            }
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(bits) = s.strip_prefix("bits:") {
            return Ok(Origin::Bits(bits.parse()?));
        }
        if let Some(body) = s.strip_prefix("ctor:") {
            let (target, seed) = body
                .rsplit_once(";seed=")
                .ok_or_else(|| Error::UnknownName(s.to_string()))?;
            return Ok(Origin::Constructed {
                target: target.parse()?,
                seed: seed.parse().map_err(|_| Error::UnknownName(s.to_string()))?,
            });
        }
        if let Some(body) = s.strip_prefix("rand:") {
            let mut length = None;
            let mut p = None;
            let mut seed = None;
            for field in body.split(';') {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| Error::UnknownName(s.to_string()))?;
                match key {
                    "L" => length = value.parse::<u32>().ok(),
                    "p" => p = value.parse::<Rat>().ok(),
                    "seed" => seed = value.parse::<u64>().ok(),
                    _ => return Err(Error::UnknownName(s.to_string())),
                }
            }
            if let (Some(length), Some(p), Some(seed)) = (length, p, seed) {
                return Ok(Origin::Random { length, p, seed });
            }
        }
        Err(Error::UnknownName(s.to_string()))
    }
}

/// Which closed-form surface to evaluate next to the measured momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predictor {
    Rule1,
    Ex1,
    Ex2,
    /// Record measurements only.
    None,
}

impl Predictor {
    /// The natural predictor for a built-in rule, `None` otherwise.
    pub fn for_rule(rule: &FluxRule) -> Self {
        match rule.name() {
            Some("rule1") => Predictor::Rule1,
            Some("ex1") => Predictor::Ex1,
            Some("ex2") => Predictor::Ex2,
            _ => Predictor::None,
        }
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predictor::Rule1 => "rule1",
            Predictor::Ex1 => "ex1",
            Predictor::Ex2 => "ex2",
            Predictor::None => "none",
        })
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rule1" => Ok(Predictor::Rule1),
            "ex1" => Ok(Predictor::Ex1),
            "ex2" => Ok(Predictor::Ex2),
            "none" => Ok(Predictor::None),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// One measured trajectory: provenance, exact densities, asymptotic mean
/// momentum, the predicted value (if a predictor was chosen), the attractor
/// phase (for the `rule1` table), and the cycle shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramPoint {
    pub length: u32,
    pub origin: Origin,
    pub rho: Rat,
    /// Second diagram axis. Which density this is depends on the predictor:
    /// `rho_011` for `rule1`, `rho_odd` for `ex1`, on-cycle `rho_1star0` for
    /// `ex2`.
    pub rho_aux: Rat,
    pub q_measured: Rat,
    pub q_predicted: Option<Rat>,
    pub phase: Option<PhaseType>,
    pub transient: u64,
    pub period: u64,
}

/// How a sweep chooses its initial states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Every state of the given length (bounded; 2^L trajectories).
    Exhaustive,
    /// `samples_per_p` Bernoulli states for each occupation probability in
    /// `p_grid`; per-state seeds are drawn from a splitmix64 stream seeded
    /// with `seed`.
    Random {
        p_grid: Vec<Rat>,
        samples_per_p: u64,
        seed: u64,
    },
    /// `seeds_per_target` constructed states per invariant target, with the
    /// same seed-stream discipline. Infeasible targets are skipped with a
    /// note.
    Constructed {
        targets: Vec<InvariantTarget>,
        seeds_per_target: u64,
        seed: u64,
    },
}

impl SweepMode {
    /// Compact metadata label recorded in CSV output. Includes the seeds and
    /// the generator name, so archived sweeps can be regenerated.
    pub fn label(&self) -> String {
        match self {
            SweepMode::Exhaustive => "exhaustive".to_string(),
            SweepMode::Random {
                p_grid,
                samples_per_p,
                seed,
            } => {
                let grid: Vec<String> = p_grid.iter().map(|p| p.to_string()).collect();
                format!(
                    "random;p-grid={};samples={samples_per_p};seed={seed};prng=splitmix64",
                    grid.join("|")
                )
            }
            SweepMode::Constructed {
                targets,
                seeds_per_target,
                seed,
            } => format!(
                "constructed;targets={};seeds-per-target={seeds_per_target};seed={seed};prng=splitmix64",
                targets.len()
            ),
        }
    }
}

/// A finished sweep: the rule and mode that produced it plus one point per
/// measured trajectory, in generation order.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rule: FluxRule,
    pub length: u32,
    pub mode_label: String,
    pub predictor: Predictor,
    pub points: Vec<DiagramPoint>,
    /// Human-readable skip notes (infeasible targets and the like); not part
    /// of the CSV payload.
    pub notes: Vec<String>,
}

/// Measure one trajectory from an explicit origin.
pub fn measure_point(rule: &FluxRule, origin: &Origin, predictor: Predictor) -> Result<DiagramPoint> {
    let state = origin.realize()?;
    measure_realized(
        rule,
        origin,
        &state,
        predictor,
        dynamics::default_step_budget(state.len()),
    )
}

fn measure_realized(
    rule: &FluxRule,
    origin: &Origin,
    state: &RingState,
    predictor: Predictor,
    budget: u64,
) -> Result<DiagramPoint> {
    let cycle = dynamics::find_cycle_with_budget(rule, state, budget)?;
    let q_measured = dynamics::cycle_mean_momentum(rule, &cycle)?;
    let entry = cycle.cycle_states[0];
    let d0 = state.densities();
    let (rho_aux, q_predicted) = match predictor {
        Predictor::Rule1 => (
            d0.rho_011,
            Some(analysis::predict_q_rule1(d0.rho, d0.rho_011)),
        ),
        Predictor::Ex1 => (d0.rho_odd, Some(analysis::predict_q_ex1(d0.rho, d0.rho_odd))),
        Predictor::Ex2 => {
            // The second axis of this diagram settles only on the cycle.
            let aux = entry.densities().rho_1star0;
            (aux, Some(analysis::predict_q_ex2(d0.rho, aux)))
        }
        Predictor::None => {
            let aux = match rule.name() {
                Some("ex1") => d0.rho_odd,
                Some("ex2") => entry.densities().rho_1star0,
                _ => d0.rho_011,
            };
            (aux, None)
        }
    };
    let phase = (rule.table() == FluxRule::rule1().table()).then(|| analysis::classify(&entry));
    Ok(DiagramPoint {
        length: state.len(),
        origin: origin.clone(),
        rho: d0.rho,
        rho_aux,
        q_measured,
        q_predicted,
        phase,
        transient: cycle.transient,
        period: cycle.period,
    })
}

/// Sweep the diagram for `rule` at ring length `length` with default bounds
/// and step budget.
pub fn sweep(
    rule: &FluxRule,
    length: u32,
    mode: &SweepMode,
    predictor: Predictor,
) -> Result<SweepResult> {
    sweep_with(
        rule,
        length,
        mode,
        predictor,
        DEFAULT_EXHAUSTIVE_BOUND,
        dynamics::default_step_budget(length),
    )
}

/// [`sweep`] with an explicit exhaustive bound and cycle-detection budget.
pub fn sweep_with(
    rule: &FluxRule,
    length: u32,
    mode: &SweepMode,
    predictor: Predictor,
    exhaustive_bound: u32,
    budget: u64,
) -> Result<SweepResult> {
    let mut notes = Vec::new();
    let mut jobs: Vec<(Origin, RingState)> = Vec::new();
    match mode {
        SweepMode::Exhaustive => {
            for state in statesmith::enumerate_states_with_bound(length, exhaustive_bound)? {
                jobs.push((Origin::Bits(state), state));
            }
        }
        SweepMode::Random {
            p_grid,
            samples_per_p,
            seed,
        } => {
            let mut stream = SplitMix64::new(*seed);
            for &p in p_grid {
                for _ in 0..*samples_per_p {
                    let origin = Origin::Random {
                        length,
                        p,
                        seed: stream.next_u64(),
                    };
                    let state = origin.realize()?;
                    jobs.push((origin, state));
                }
            }
        }
        SweepMode::Constructed {
            targets,
            seeds_per_target,
            seed,
        } => {
            let mut stream = SplitMix64::new(*seed);
            for target in targets {
                if target.length != length {
                    notes.push(format!("skipped target {target}: length differs from sweep"));
                    continue;
                }
                if !target.feasible() {
                    notes.push(format!("skipped target {target}: infeasible"));
                    continue;
                }
                for _ in 0..*seeds_per_target {
                    let origin = Origin::Constructed {
                        target: *target,
                        seed: stream.next_u64(),
                    };
                    match origin.realize() {
                        Ok(state) => jobs.push((origin, state)),
                        Err(Error::Infeasible(t)) => {
                            // Possible for odd-run targets whose parity can
                            // never work out; note and move on.
                            notes.push(format!("skipped target {t}: no realization found"));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }

    // Indexed collect first so points keep generation order exactly,
    // independent of the number of worker threads.
    let points: Vec<DiagramPoint> = jobs
        .par_iter()
        .map(|(origin, state)| measure_realized(rule, origin, state, predictor, budget))
        .collect::<Vec<Result<DiagramPoint>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    Ok(SweepResult {
        rule: rule.clone(),
        length,
        mode_label: mode.label(),
        predictor,
        points,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RingState {
        s.parse().unwrap()
    }

    #[test]
    fn origin_round_trip() {
        let origins = [
            Origin::Bits(rs("01101110")),
            Origin::Constructed {
                target: InvariantTarget::new(60, 30, 5),
                seed: 7,
            },
            Origin::Constructed {
                target: InvariantTarget {
                    length: 20,
                    ones: 9,
                    runs_ge2: 2,
                    odd_runs: Some(3),
                },
                seed: 1,
            },
            Origin::Random {
                length: 40,
                p: Rat::new(1, 2),
                seed: 9,
            },
        ];
        for origin in origins {
            let text = origin.to_string();
            assert!(!text.contains(','), "CSV-safe: {text}");
            assert_eq!(text.parse::<Origin>().unwrap(), origin);
        }
        assert_eq!(
            Origin::Bits(rs("01101110")).to_string(),
            "bits:01101110"
        );
        assert!("orbit:xyz".parse::<Origin>().is_err());
    }

    #[test]
    fn points_regenerate_from_their_origin() {
        let rule = FluxRule::rule1();
        let mode = SweepMode::Constructed {
            targets: vec![
                InvariantTarget::new(24, 12, 3),
                InvariantTarget::new(24, 20, 1),
            ],
            seeds_per_target: 2,
            seed: 77,
        };
        let result = sweep(&rule, 24, &mode, Predictor::Rule1).unwrap();
        assert_eq!(result.points.len(), 4);
        for point in &result.points {
            let again = measure_point(&rule, &point.origin, Predictor::Rule1).unwrap();
            assert_eq!(&again, point);
        }
    }

    #[test]
    fn exhaustive_sweep_covers_the_cube() {
        let rule = FluxRule::rule1();
        let result = sweep(&rule, 5, &SweepMode::Exhaustive, Predictor::Rule1).unwrap();
        assert_eq!(result.points.len(), 32);
        // Every point measured under rule1 carries a phase and a prediction,
        // and exact agreement holds at this size.
        for point in &result.points {
            assert!(point.phase.is_some());
            assert_eq!(point.q_predicted, Some(point.q_measured));
        }
        // Deterministic: same call, same result.
        let again = sweep(&rule, 5, &SweepMode::Exhaustive, Predictor::Rule1).unwrap();
        assert_eq!(again.points, result.points);
    }

    #[test]
    fn random_sweep_is_seeded() {
        let rule = FluxRule::ex1();
        let mode = SweepMode::Random {
            p_grid: vec![Rat::new(1, 4), Rat::new(3, 4)],
            samples_per_p: 3,
            seed: 5,
        };
        let a = sweep(&rule, 20, &mode, Predictor::Ex1).unwrap();
        let b = sweep(&rule, 20, &mode, Predictor::Ex1).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.points.len(), 6);
        // Distinct per-sample seeds.
        let seeds: std::collections::HashSet<u64> = a
            .points
            .iter()
            .map(|p| match p.origin {
                Origin::Random { seed, .. } => seed,
                _ => panic!("random sweep produced a non-random origin"),
            })
            .collect();
        assert_eq!(seeds.len(), 6);
        assert!(a.mode_label.contains("prng=splitmix64"));
        assert!(a.mode_label.contains("p-grid=1/4|3/4"));
    }

    #[test]
    fn constructed_sweep_skips_infeasible_targets() {
        let rule = FluxRule::rule1();
        let mode = SweepMode::Constructed {
            targets: vec![
                InvariantTarget::new(10, 5, 2),
                InvariantTarget::new(10, 9, 0), // 9 singles cannot fit on 10 sites
            ],
            seeds_per_target: 2,
            seed: 3,
        };
        let result = sweep(&rule, 10, &mode, Predictor::Rule1).unwrap();
        assert_eq!(result.points.len(), 2);
        assert_eq!(result.notes.len(), 1);
        assert!(result.notes[0].contains("infeasible"));
    }

    #[test]
    fn ex2_points_use_cycle_densities() {
        // A lone particle: rho_1star0 = 1/5 on the cycle, prediction 1/5,
        // but the walker hops two sites per step, so the measured flow is 2/5.
        let rule = FluxRule::ex2();
        let origin = Origin::Bits(rs("10000"));
        let point = measure_point(&rule, &origin, Predictor::Ex2).unwrap();
        assert_eq!(point.rho_aux, Rat::new(1, 5));
        assert_eq!(point.q_predicted, Some(Rat::new(1, 5)));
        assert_eq!(point.q_measured, Rat::new(2, 5));
        assert_eq!(point.phase, None);
    }
}
