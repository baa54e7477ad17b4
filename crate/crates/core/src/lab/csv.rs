//! CSV persistence for sweep results.
//!
//! Rationals are stored as separate numerator and denominator columns so no
//! precision is lost; a `#` metadata block pins the rule, mode and seeds so
//! the file is self-describing and regenerable. Output is byte-deterministic.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lab::sweep::{DiagramPoint, Origin, Predictor, SweepResult};
use crate::Rat;

const HEADER: &str = "L,origin,rho_num,rho_den,rho_aux_num,rho_aux_den,\
q_measured_num,q_measured_den,q_predicted_num,q_predicted_den,phase,transient,period";

/// Render a sweep as CSV text.
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(concat!("# ringflux ", env!("CARGO_PKG_VERSION"), "\n"));
    out.push_str(&format!("# rule: {}\n", result.rule));
    out.push_str(&format!("# L: {}\n", result.length));
    out.push_str(&format!("# mode: {}\n", result.mode_label));
    out.push_str(&format!("# predictor: {}\n", result.predictor));
    out.push_str(HEADER);
    out.push('\n');
    for p in &result.points {
        let (qp_num, qp_den) = match p.q_predicted {
            Some(q) => (q.numer().to_string(), q.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let phase = match p.phase {
            Some(ph) => ph.to_string(),
            None => "n/a".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.length,
            p.origin,
            p.rho.numer(),
            p.rho.denom(),
            p.rho_aux.numer(),
            p.rho_aux.denom(),
            p.q_measured.numer(),
            p.q_measured.denom(),
            qp_num,
            qp_den,
            phase,
            p.transient,
            p.period,
        ));
    }
    out
}

/// Write a sweep to `path` as CSV. The write is atomic enough for our
/// purposes: the full text is rendered first, then written in one call.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(result))?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::CsvParse {
        line,
        message: message.into(),
    }
}

fn parse_rat(num: &str, den: &str, line: usize) -> Result<Rat> {
    let n: i64 = num
        .parse()
        .map_err(|_| parse_err(line, format!("bad numerator {num:?}")))?;
    let d: i64 = den
        .parse()
        .map_err(|_| parse_err(line, format!("bad denominator {den:?}")))?;
    if d <= 0 {
        return Err(parse_err(line, format!("nonpositive denominator {d}")));
    }
    Ok(Rat::new(n, d))
}

/// Parse CSV text produced by [`csv_string`] back into a [`SweepResult`]
/// (with empty notes: notes are not part of the persisted format).
pub fn parse_csv_str(text: &str) -> Result<SweepResult> {
    let mut rule = None;
    let mut length = None;
    let mut mode_label = None;
    let mut predictor = None;
    let mut header_seen = false;
    let mut points = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(comment) = raw.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("rule:") {
                rule = Some(
                    v.trim()
                        .parse()
                        .map_err(|e| parse_err(line_no, format!("bad rule: {e}")))?,
                );
            } else if let Some(v) = comment.strip_prefix("L:") {
                length = Some(
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| parse_err(line_no, "bad L"))?,
                );
            } else if let Some(v) = comment.strip_prefix("mode:") {
                mode_label = Some(v.trim().to_string());
            } else if let Some(v) = comment.strip_prefix("predictor:") {
                predictor = Some(
                    Predictor::from_str(v.trim()).map_err(|_| parse_err(line_no, "bad predictor"))?,
                );
            }
            continue;
        }
        if raw.is_empty() {
            continue;
        }
        if !header_seen {
            if raw != HEADER {
                return Err(parse_err(line_no, "missing or mangled header line"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 13 {
            return Err(parse_err(
                line_no,
                format!("expected 13 fields, found {}", fields.len()),
            ));
        }
        let point_len: u32 = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, "bad length field"))?;
        let origin: Origin = fields[1]
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad origin: {e}")))?;
        let q_predicted = match (fields[8], fields[9]) {
            ("", "") => None,
            (num, den) => Some(parse_rat(num, den, line_no)?),
        };
        let phase = match fields[10] {
            "n/a" => None,
            other => Some(
                other
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad phase {other:?}")))?,
            ),
        };
        points.push(DiagramPoint {
            length: point_len,
            origin,
            rho: parse_rat(fields[2], fields[3], line_no)?,
            rho_aux: parse_rat(fields[4], fields[5], line_no)?,
            q_measured: parse_rat(fields[6], fields[7], line_no)?,
            q_predicted,
            phase,
            transient: fields[11]
                .parse()
                .map_err(|_| parse_err(line_no, "bad transient"))?,
            period: fields[12]
                .parse()
                .map_err(|_| parse_err(line_no, "bad period"))?,
        });
    }

    let rule = rule.ok_or_else(|| parse_err(0, "missing '# rule:' metadata"))?;
    let length = length.ok_or_else(|| parse_err(0, "missing '# L:' metadata"))?;
    let mode_label = mode_label.ok_or_else(|| parse_err(0, "missing '# mode:' metadata"))?;
    let predictor = predictor.ok_or_else(|| parse_err(0, "missing '# predictor:' metadata"))?;
    if !header_seen {
        return Err(parse_err(0, "missing header line"));
    }
    Ok(SweepResult {
        rule,
        length,
        mode_label,
        predictor,
        points,
        notes: Vec::new(),
    })
}

/// Read a sweep back from a CSV file written by [`emit_csv`].
pub fn parse_csv(path: &Path) -> Result<SweepResult> {
    parse_csv_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FluxRule;
    use crate::lab::sweep::{sweep, SweepMode};
    use crate::statesmith::InvariantTarget;

    fn sample_result() -> SweepResult {
        let mode = SweepMode::Constructed {
            targets: vec![
                InvariantTarget::new(16, 8, 2),
                InvariantTarget::new(16, 12, 1),
            ],
            seeds_per_target: 2,
            seed: 11,
        };
        sweep(&FluxRule::rule1(), 16, &mode, Predictor::Rule1).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let result = sample_result();
        let text = csv_string(&result);
        let parsed = parse_csv_str(&text).unwrap();
        assert_eq!(csv_string(&parsed), text);
        assert_eq!(parsed.points, result.points);
        assert_eq!(parsed.length, result.length);
        assert_eq!(parsed.mode_label, result.mode_label);
        assert_eq!(parsed.predictor, result.predictor);
        assert_eq!(parsed.rule, result.rule);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let result = sample_result();
        emit_csv(&result, &path).unwrap();
        let parsed = parse_csv(&path).unwrap();
        assert_eq!(csv_string(&parsed), csv_string(&result));
    }

    #[test]
    fn metadata_block_is_complete() {
        let text = csv_string(&sample_result());
        assert!(text.starts_with("# ringflux "));
        assert!(text.contains("\n# rule: table:1,1,1,1,0,0,0,0,0,1,0,0,0,0,0,0\n"));
        assert!(text.contains("\n# L: 16\n"));
        assert!(text.contains("\n# mode: constructed;targets=2;seeds-per-target=2;seed=11;prng=splitmix64\n"));
        assert!(text.contains("\n# predictor: rule1\n"));
        assert!(text.contains(&format!("\n{HEADER}\n")));
        // No floats anywhere in the data: exact integer pairs only.
        let data = text.split_once('\n').unwrap().1;
        assert!(!data.contains('.'));
    }

    #[test]
    fn missing_prediction_and_phase_round_trip() {
        let result = sweep(
            &FluxRule::ex2(),
            8,
            &SweepMode::Exhaustive,
            Predictor::None,
        )
        .unwrap();
        let text = csv_string(&result);
        assert!(text.contains(",,,n/a,"));
        let parsed = parse_csv_str(&text).unwrap();
        assert_eq!(csv_string(&parsed), text);
        assert!(parsed.points.iter().all(|p| p.q_predicted.is_none()));
        assert!(parsed.points.iter().all(|p| p.phase.is_none()));
    }

    #[test]
    fn parse_rejects_mangled_input() {
        let result = sample_result();
        let text = csv_string(&result);
        let no_rule: String = text
            .lines()
            .filter(|l| !l.starts_with("# rule:"))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(
            parse_csv_str(&no_rule),
            Err(Error::CsvParse { .. })
        ));
        let truncated = text.replace(",TypeA,", ",TypeQ,");
        if truncated != text {
            assert!(matches!(
                parse_csv_str(&truncated),
                Err(Error::CsvParse { .. })
            ));
        }
        let bad_field = format!("{text}16,bits:0110111001101110,1,2,1,4,1,2,1,2,TypeB,0\n");
        assert!(matches!(
            parse_csv_str(&bad_field),
            Err(Error::CsvParse { .. })
        ));
    }
}
