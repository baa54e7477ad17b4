//! Flux rules and exact trajectory evolution.
//!
//! A [`FluxRule`] is a table `q : {0,1}^4 -> {-1, 0, 1}` read on the window
//! `(u_{j-2}, u_{j-1}, u_j, u_{j+1})`. One synchronous step moves every site
//! by the difference of the flux across its two bonds:
//!
//! ```text
//! u_j' = u_j + q(u_{j-2}, u_{j-1}, u_j, u_{j+1}) - q(u_{j-1}, u_j, u_{j+1}, u_{j+2})
//! ```
//!
//! Written this way the update telescopes around the ring, so whenever every
//! `u_j'` stays binary the total occupation is conserved exactly. A table for
//! which some state would leave `{0,1}` is still representable; [`FluxRule::step`]
//! reports the offending site instead of wrapping.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::RingState;
use crate::Rat;

/// Number of 4-site windows, i.e. flux table entries.
pub const TABLE_LEN: usize = 16;

/// A local flux table over 4-site windows.
///
/// Entry `i` is the flux for the window whose bits spell `i` MSB-first:
/// index 0b1100 holds `q(1,1,0,0)`. The text form writes entries from window
/// `1111` down to `0000`:
///
/// ```
/// use ringflux::FluxRule;
///
/// let r = FluxRule::rule1();
/// assert_eq!(r.to_string(), "table:1,1,1,1,0,0,0,0,0,1,0,0,0,0,0,0");
/// assert_eq!("rule1".parse::<FluxRule>().unwrap(), r);
/// assert_eq!(r.to_string().parse::<FluxRule>().unwrap(), r);
/// ```
#[derive(Clone, PartialEq, Eq)]
pub struct FluxRule {
    table: [i8; TABLE_LEN],
    name: Option<&'static str>,
}

impl FluxRule {
    /// The slow-to-start traffic rule: a particle moves right into an empty
    /// site unless it is the leftmost of a newly formed pack (window `0110`
    /// carries flux so the head of a pair does advance).
    ///
    /// Flux 1 on windows 1111, 1110, 1101, 1100, 0110; 0 elsewhere.
    pub fn rule1() -> Self {
        let mut table = [0i8; TABLE_LEN];
        for w in [0b1111, 0b1110, 0b1101, 0b1100, 0b0110] {
            table[w] = 1;
        }
        Self {
            table,
            name: Some("rule1"),
        }
    }

    /// Variant that drops the saturated-window flux: flux 1 on 1110, 1101,
    /// 1100, 0110; 0 elsewhere (in particular on 1111). Every movable
    /// particle sits in a `110`, which is what conserves the odd-run count.
    pub fn ex1() -> Self {
        let mut table = [0i8; TABLE_LEN];
        for w in [0b1110, 0b1101, 0b1100, 0b0110] {
            table[w] = 1;
        }
        Self {
            table,
            name: Some("ex1"),
        }
    }

    /// A two-speed variant with one negative flux entry: flux 1 on 1110,
    /// 1101, 1100, 1010, 1000, 0101, 0100; flux -1 on 0011.
    pub fn ex2() -> Self {
        let mut table = [0i8; TABLE_LEN];
        for w in [0b1110, 0b1101, 0b1100, 0b1010, 0b1000, 0b0101, 0b0100] {
            table[w] = 1;
        }
        table[0b0011] = -1;
        Self {
            table,
            name: Some("ex2"),
        }
    }

    /// Build a rule from a raw table; entries must lie in `{-1, 0, 1}`.
    pub fn from_table(table: [i8; TABLE_LEN]) -> Result<Self> {
        for (index, &value) in table.iter().enumerate() {
            if !(-1..=1).contains(&value) {
                return Err(Error::FluxOutOfRange {
                    index,
                    value: i64::from(value),
                });
            }
        }
        Ok(Self { table, name: None })
    }

    /// The raw 16-entry table, indexed by window value.
    pub fn table(&self) -> &[i8; TABLE_LEN] {
        &self.table
    }

    /// Short name if this is one of the built-in rules ("rule1", "ex1", "ex2").
    pub fn name(&self) -> Option<&str> {
        self.name
    }

    /// Flux through the window `(a, b, c, d)`; each argument must be 0 or 1.
    #[inline]
    pub fn flux(&self, a: u8, b: u8, c: u8, d: u8) -> i8 {
        debug_assert!(a <= 1 && b <= 1 && c <= 1 && d <= 1);
        self.table[usize::from(a) << 3 | usize::from(b) << 2 | usize::from(c) << 1 | usize::from(d)]
    }

    #[inline]
    fn flux_at(&self, window: u64) -> i8 {
        self.table[window as usize]
    }

    /// The 4-site window ending one site past `j`, i.e.
    /// `(u_{j-2}, u_{j-1}, u_j, u_{j+1})` packed MSB-first.
    #[inline]
    fn window_at(state: &RingState, j: u32) -> u64 {
        let l = state.len();
        state.window((j + l - 2) % l, 4)
    }

    /// One synchronous update of the whole ring.
    ///
    /// Errors with [`Error::NonBinaryState`] at the first site (lowest index)
    /// that would leave `{0, 1}`; no partial state is returned.
    pub fn step(&self, state: &RingState) -> Result<RingState> {
        let l = state.len();
        let mut w = Self::window_at(state, 0);
        let mut bits = 0u64;
        for j in 0..l {
            let w_next = ((w << 1) & 0xF) | u64::from(state.site((j + 2) % l));
            let v = state.site(j) as i8 + self.flux_at(w) - self.flux_at(w_next);
            match v {
                0 => {}
                1 => bits |= 1 << (l - 1 - j),
                _ => return Err(Error::NonBinaryState { site: j, value: v }),
            }
            w = w_next;
        }
        Ok(RingState::from_word_unchecked(bits, l))
    }

    /// Sum of the flux over all `L` windows of `state`.
    pub fn flux_total(&self, state: &RingState) -> i64 {
        let l = state.len();
        let mut w = Self::window_at(state, 0);
        let mut total = 0i64;
        for j in 0..l {
            total += i64::from(self.flux_at(w));
            w = ((w << 1) & 0xF) | u64::from(state.site((j + 2) % l));
        }
        total
    }

    /// Average flux per site of a single configuration,
    /// `sum_j q(window at j) / L`, as an exact rational.
    pub fn instantaneous_momentum(&self, state: &RingState) -> Rat {
        Rat::new(self.flux_total(state), i64::from(state.len()))
    }
}

impl fmt::Display for FluxRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "table:")?;
        for (i, w) in (0..TABLE_LEN).rev().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.table[w])?;
        }
        Ok(())
    }
}

impl fmt::Debug for FluxRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name {
            Some(name) => write!(f, "FluxRule({name})"),
            None => write!(f, "FluxRule({self})"),
        }
    }
}

impl FromStr for FluxRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rule1" => return Ok(Self::rule1()),
            "ex1" => return Ok(Self::ex1()),
            "ex2" => return Ok(Self::ex2()),
            _ => {}
        }
        let Some(body) = s.strip_prefix("table:") else {
            return Err(Error::UnknownName(s.to_string()));
        };
        let entries: Vec<&str> = body.split(',').collect();
        if entries.len() != TABLE_LEN {
            return Err(Error::MalformedRuleTable(s.to_string()));
        }
        let mut table = [0i8; TABLE_LEN];
        for (i, entry) in entries.iter().enumerate() {
            let value: i64 = entry
                .trim()
                .parse()
                .map_err(|_| Error::MalformedRuleTable(s.to_string()))?;
            let index = TABLE_LEN - 1 - i; // text order runs 1111 down to 0000
            if !(-1..=1).contains(&value) {
                return Err(Error::FluxOutOfRange { index, value });
            }
            table[index] = value as i8;
        }
        // Reuse the built-in identity (and name) when the table matches one.
        for builtin in [Self::rule1(), Self::ex1(), Self::ex2()] {
            if builtin.table == table {
                return Ok(builtin);
            }
        }
        Ok(Self { table, name: None })
    }
}

/// Default cap on `transient + period` for [`find_cycle`]: `2^L + 1`, one
/// more than the number of distinct states, so a binary-preserving rule can
/// never hit it.
pub fn default_step_budget(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) + 1
    }
}

/// The eventually periodic shape of one trajectory: `transient` steps of
/// approach, then a cycle of `period` states repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleInfo {
    /// Number of steps before the trajectory first enters its cycle.
    pub transient: u64,
    /// Length of the cycle.
    pub period: u64,
    /// The cycle states in visit order, starting with the first revisited
    /// state; `cycle_states.len() == period`.
    pub cycle_states: Vec<RingState>,
}

/// Iterate from `state` until a configuration repeats, identifying the exact
/// transient and period, with the default step budget of [`default_step_budget`].
///
/// The state space is finite so this always terminates for binary-preserving
/// rules; rules that leave `{0,1}` surface [`Error::NonBinaryState`] instead.
pub fn find_cycle(rule: &FluxRule, state: &RingState) -> Result<CycleInfo> {
    find_cycle_with_budget(rule, state, default_step_budget(state.len()))
}

/// [`find_cycle`] with an explicit cap on `transient + period`.
pub fn find_cycle_with_budget(
    rule: &FluxRule,
    state: &RingState,
    budget: u64,
) -> Result<CycleInfo> {
    let mut seen: HashMap<RingState, u64> = HashMap::new();
    let mut history: Vec<RingState> = Vec::new();
    let mut current = *state;
    loop {
        if let Some(&first) = seen.get(&current) {
            let period = history.len() as u64 - first;
            return Ok(CycleInfo {
                transient: first,
                period,
                cycle_states: history[first as usize..].to_vec(),
            });
        }
        if history.len() as u64 >= budget {
            return Err(Error::StepBudgetExceeded { budget });
        }
        seen.insert(current, history.len() as u64);
        history.push(current);
        current = rule.step(&current)?;
    }
}

/// Time-averaged momentum over one full cycle reached from `state`:
/// the mean of `instantaneous_momentum` over the cycle states, exactly.
pub fn mean_momentum(rule: &FluxRule, state: &RingState) -> Result<Rat> {
    let cycle = find_cycle(rule, state)?;
    cycle_mean_momentum(rule, &cycle)
}

/// The cycle average `sum(flux_total) / (period * L)` of an already-detected
/// cycle.
pub fn cycle_mean_momentum(rule: &FluxRule, cycle: &CycleInfo) -> Result<Rat> {
    let l = cycle.cycle_states[0].len();
    let total: i64 = cycle
        .cycle_states
        .iter()
        .map(|s| rule.flux_total(s))
        .sum();
    let denom = i64::try_from(cycle.period as u128 * u128::from(l))
        .map_err(|_| Error::ArithmeticOverflow)?;
    Ok(Rat::new(total, denom))
}

/// The first `steps + 1` configurations of the trajectory from `state`
/// (the initial state included).
pub fn trajectory(rule: &FluxRule, state: &RingState, steps: u64) -> Result<Vec<RingState>> {
    let mut out = Vec::with_capacity((steps + 1) as usize);
    out.push(*state);
    let mut current = *state;
    for _ in 0..steps {
        current = rule.step(&current)?;
        out.push(current);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RingState {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_tables() {
        let r = FluxRule::rule1();
        assert_eq!(r.flux(1, 1, 1, 1), 1);
        assert_eq!(r.flux(1, 1, 1, 0), 1);
        assert_eq!(r.flux(1, 1, 0, 1), 1);
        assert_eq!(r.flux(1, 1, 0, 0), 1);
        assert_eq!(r.flux(0, 1, 1, 0), 1);
        assert_eq!(r.table().iter().filter(|&&v| v == 1).count(), 5);
        assert!(r.table().iter().all(|&v| v >= 0));

        let e1 = FluxRule::ex1();
        assert_eq!(e1.flux(1, 1, 1, 1), 0);
        assert_eq!(e1.flux(0, 1, 1, 0), 1);
        assert_eq!(e1.table().iter().filter(|&&v| v == 1).count(), 4);

        let e2 = FluxRule::ex2();
        assert_eq!(e2.flux(0, 0, 1, 1), -1);
        assert_eq!(e2.flux(1, 0, 0, 0), 1);
        assert_eq!(e2.flux(0, 1, 0, 1), 1);
        assert_eq!(e2.table().iter().filter(|&&v| v == 1).count(), 7);
        assert_eq!(e2.table().iter().filter(|&&v| v == -1).count(), 1);
    }

    #[test]
    fn serialization_round_trip() {
        assert_eq!(
            FluxRule::rule1().to_string(),
            "table:1,1,1,1,0,0,0,0,0,1,0,0,0,0,0,0"
        );
        for rule in [FluxRule::rule1(), FluxRule::ex1(), FluxRule::ex2()] {
            let parsed: FluxRule = rule.to_string().parse().unwrap();
            assert_eq!(parsed, rule);
            assert_eq!(parsed.name(), rule.name());
        }
        assert_eq!("rule1".parse::<FluxRule>().unwrap(), FluxRule::rule1());
        assert!(matches!(
            "rule9".parse::<FluxRule>(),
            Err(Error::UnknownName(_))
        ));
        assert!(matches!(
            "table:1,1,1".parse::<FluxRule>(),
            Err(Error::MalformedRuleTable(_))
        ));
        assert!(matches!(
            "table:2,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0".parse::<FluxRule>(),
            Err(Error::FluxOutOfRange { index: 15, value: 2 })
        ));
        assert!(FluxRule::from_table([2; 16]).is_err());
    }

    #[test]
    fn step_moves_a_pack_head_first() {
        // A run of three: the leftmost particle holds, the others advance.
        let r = FluxRule::rule1();
        let t0 = rs("01110000");
        let t1 = r.step(&t0).unwrap();
        assert_eq!(t1.to_string(), "01011000");
        let t2 = r.step(&t1).unwrap();
        assert_eq!(t2.to_string(), "01001100");
        assert_eq!(
            trajectory(&r, &t0, 2).unwrap(),
            vec![t0, t1, t2],
        );
    }

    #[test]
    fn step_translates_a_pair() {
        // An isolated pair under rule1 translates one site per step.
        let r = FluxRule::rule1();
        let s = rs("01100000");
        assert_eq!(r.step(&s).unwrap(), s.rotated(-1));
    }

    #[test]
    fn step_conserves_occupation_for_builtins() {
        for rule in [FluxRule::rule1(), FluxRule::ex1(), FluxRule::ex2()] {
            for w in 0..(1u64 << 7) {
                let s = RingState::from_word(w, 7).unwrap();
                let t = rule.step(&s).unwrap();
                assert_eq!(t.ones(), s.ones(), "rule {rule:?} state {s}");
            }
        }
    }

    #[test]
    fn step_reports_non_binary_site() {
        // Flux only out of the all-zero window: site 0 of 00010 receives
        // nothing and sends 1, driving it to -1.
        let mut table = [0i8; 16];
        table[0b0000] = 1;
        let rule = FluxRule::from_table(table).unwrap();
        let err = rule.step(&rs("00010")).unwrap_err();
        assert!(matches!(err, Error::NonBinaryState { site: 0, value: -1 }));
    }

    #[test]
    fn momentum_of_a_fixed_state() {
        // Windows of 01101110 with nonzero rule1 flux: 0110 at j=2 (sites
        // 1..4), 1101, 1110, 1100 along the 111 pack, so 4 in total.
        let r = FluxRule::rule1();
        let s = rs("01101110");
        assert_eq!(r.flux_total(&s), 4);
        assert_eq!(r.instantaneous_momentum(&s), Rat::new(1, 2));
        assert_eq!(r.instantaneous_momentum(&rs("00000")), Rat::new(0, 1));
        assert_eq!(r.instantaneous_momentum(&rs("11111")), Rat::new(1, 1));
    }

    #[test]
    fn find_cycle_on_a_translating_state() {
        // A pair translates, so the cycle is the L rotations of the state.
        let r = FluxRule::rule1();
        let info = find_cycle(&r, &rs("01100000")).unwrap();
        assert_eq!(info.transient, 0);
        assert_eq!(info.period, 8);
        assert_eq!(info.cycle_states.len(), 8);
        assert_eq!(info.cycle_states[0], rs("01100000"));
        assert_eq!(mean_momentum(&r, &rs("01100000")).unwrap(), Rat::new(1, 4));
    }

    #[test]
    fn find_cycle_fixed_points() {
        let r = FluxRule::rule1();
        for s in ["00000000", "11111111"] {
            let info = find_cycle(&r, &rs(s)).unwrap();
            assert_eq!((info.transient, info.period), (0, 1));
        }
        // Saturated ring flows at full speed even though the state is fixed.
        assert_eq!(mean_momentum(&r, &rs("11111111")).unwrap(), Rat::new(1, 1));
    }

    #[test]
    fn find_cycle_period_of_a_shedding_pack() {
        // 01110000 sheds its pack, the freed pair laps the ring and re-packs
        // two sites to the left: five steps compose to a rotation by two, so
        // the orbit is closed with period 5 * (8 / 2) = 20 and no transient.
        let r = FluxRule::rule1();
        let t0 = rs("01110000");
        let five = trajectory(&r, &t0, 5).unwrap()[5];
        assert_eq!(five, t0.rotated(2));
        let info = find_cycle(&r, &t0).unwrap();
        assert_eq!((info.transient, info.period), (0, 20));
        assert_eq!(info.cycle_states.len() as u64, info.period);
    }

    #[test]
    fn find_cycle_with_transient() {
        // A 4-run next to slack (00 pairs) cannot persist: such states are
        // never periodic, so the trajectory has a genuine transient.
        let r = FluxRule::rule1();
        let info = find_cycle(&r, &rs("01111000")).unwrap();
        assert!(info.transient > 0);
        // The first cycle state is reproduced after `period` more steps.
        let entry = info.cycle_states[0];
        let mut s = entry;
        for _ in 0..info.period {
            s = r.step(&s).unwrap();
        }
        assert_eq!(s, entry);
        assert!(!info.cycle_states.contains(&rs("01111000")));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = FluxRule::rule1();
        let err = find_cycle_with_budget(&r, &rs("01100000"), 3).unwrap_err();
        assert!(matches!(err, Error::StepBudgetExceeded { budget: 3 }));
        // The default budget can never trigger: it exceeds the state count.
        assert_eq!(default_step_budget(5), 33);
        assert_eq!(default_step_budget(64), u64::MAX);
    }

    #[test]
    fn mean_momentum_averages_the_cycle() {
        let r = FluxRule::rule1();
        let s = rs("01101110");
        let info = find_cycle(&r, &s).unwrap();
        let mean = cycle_mean_momentum(&r, &info).unwrap();
        assert_eq!(mean, Rat::new(1, 2));
        // On the cycle itself the momentum does not fluctuate.
        for cs in &info.cycle_states {
            assert_eq!(r.instantaneous_momentum(cs), mean);
        }
    }
}
