//! The measurement lab: diagram sweeps, exhaustive verification runs, CSV
//! and plot-script emission, and space-time rendering.
//!
//! Everything the lab writes is deterministic byte-for-byte given the same
//! inputs and seeds: no timestamps, no machine names, no iteration-order
//! dependence. Rerunning a command must reproduce its output files exactly,
//! so that archived diagrams and findings can be trusted and replayed.

mod csv;
mod plot;
mod render;
mod sweep;
mod verify;

pub use csv::{csv_string, emit_csv, parse_csv, parse_csv_str};
pub use plot::{emit_plot_script, plot_script_text};
pub use render::{render_spacetime, RenderFormat};
pub use sweep::{
    measure_point, sweep, sweep_with, DiagramPoint, Origin, Predictor, SweepMode, SweepResult,
};
pub use verify::{
    adjudicate, adjudicate_with_bound, verify_rule1, verify_rule1_with, write_findings,
    AdjudicatedRule, MomentumMismatch, VerifyReport, Violation, DEFAULT_ADJUDICATE_BOUND,
    DEFAULT_VERIFY_BOUND,
};
