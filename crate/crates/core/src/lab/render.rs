//! Space-time rendering of single trajectories.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{trajectory, FluxRule};
use crate::error::{Error, Result};
use crate::lattice::RingState;

/// Output encodings for a space-time diagram: rows are time (initial state
/// first), columns are ring sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    /// `#` for occupied, `.` for empty, one row per step.
    Ascii,
    /// Plain-text portable bitmap (`P1`), 1 = occupied = black.
    Pbm,
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::Ascii => "ascii",
            RenderFormat::Pbm => "pbm",
        })
    }
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(RenderFormat::Ascii),
            "pbm" => Ok(RenderFormat::Pbm),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Render `steps + 1` rows (the initial state and each update) of the
/// trajectory of `state` under `rule`.
pub fn render_spacetime(
    rule: &FluxRule,
    state: &RingState,
    steps: u64,
    format: RenderFormat,
) -> Result<String> {
    let rows = trajectory(rule, state, steps)?;
    let l = state.len();
    let mut out = String::new();
    if format == RenderFormat::Pbm {
        out.push_str(&format!("P1\n{} {}\n", l, rows.len()));
    }
    for row in &rows {
        for j in 0..l {
            out.push(match (format, row.site(j)) {
                (RenderFormat::Ascii, 1) => '#',
                (RenderFormat::Ascii, _) => '.',
                (RenderFormat::Pbm, 1) => '1',
                (RenderFormat::Pbm, _) => '0',
            });
        }
        out.push('\n');
    }
    Ok(out)
}
