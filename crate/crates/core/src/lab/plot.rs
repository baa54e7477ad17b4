//! Gnuplot script emission for the three-dimensional flow diagram.

use std::path::Path;

use crate::error::{Error, Result};

/// The gnuplot script text for a given CSV path: a 3D scatter of measured
/// momenta over the density plane, colored by phase, with the two exact
/// candidate sheets drawn underneath.
pub fn plot_script_text(csv_path: &str) -> String {
    // Gnuplot escapes a quote inside single-quoted strings by doubling it.
    let quoted = csv_path.replace('\'', "''");
    format!(
        r##"#!/usr/bin/env gnuplot
#
# Flow-diagram scatter: asymptotic momentum Q over the exact density plane
# (rho, rho_aux), measured cycle by cycle, with the two candidate sheets.
#
# Interactive:  gnuplot -p {{this file}}
# To a PNG:     gnuplot -e "set term pngcairo size 1000,760; set output 'diagram.png'" {{this file}}

csv = '{quoted}'

set datafile separator ","
set datafile commentschars "#"

set xlabel "rho"
set ylabel "rho_aux"
set zlabel "Q" rotate parallel
set xrange [0:1]
set yrange [0:0.5]
set zrange [0:1]
set xyplane at 0
set grid x y z
set key left top

# The two exact sheets whose upper envelope is the flow law.
set isosamples 41, 41
sheet_jam(x, y)  = 2*x - 1
sheet_free(x, y) = 2*y

# Phase column 11: TypeA -> 1, TypeB -> 2, anything else -> 3.
phase_code(s) = (s eq "TypeA") ? 1 : (s eq "TypeB") ? 2 : 3
set palette defined (1 "#d62728", 2 "#1f77b4", 3 "#7f7f7f")
set cbrange [1:3]
unset colorbox

splot \
    sheet_jam(x, y)  with lines lc rgb "#e8c0c0" title "Q = 2 rho - 1", \
    sheet_free(x, y) with lines lc rgb "#c0cde8" title "Q = 2 rho_aux", \
    csv using ($3/$4):($5/$6):($7/$8):(phase_code(strcol(11))) \
        with points pt 7 ps 0.6 palette title "measured cycles"
"##
    )
}

/// Write a gnuplot script that renders the diagram stored in `csv_path`.
/// Refuses to write anything if the CSV does not exist yet.
pub fn emit_plot_script(csv_path: &Path, dest: &Path) -> Result<()> {
    if !csv_path.exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no such CSV: {}", csv_path.display()),
        )));
    }
    let script = plot_script_text(&csv_path.display().to_string());
    std::fs::write(dest, script)?;
    Ok(())
}
