//! Pulse CSV files.
//!
//! ```text
//! # T_seconds=0.005 M=50
//! slice,ux1_hz,uy1_hz,ux2_hz,uy2_hz
//! 0,12.5,-3.25,0,88
//! ...
//! ```
//!
//! Values are written with Rust's shortest round-trip formatting, so a pulse
//! read back is bit-identical to the one written.

use std::fmt::Write as _;

use super::pulse::{PulseSequence, CHANNELS};
use crate::error::{Error, Result};

pub const PULSE_CSV_HEADER: &str = "slice,ux1_hz,uy1_hz,ux2_hz,uy2_hz";

pub fn write_pulse_csv(pulse: &PulseSequence<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# T_seconds={} M={}", pulse.duration(), pulse.slices());
    out.push_str(PULSE_CSV_HEADER);
    out.push('\n');
    for (m, row) in pulse.amplitudes().iter().enumerate() {
        let _ = writeln!(out, "{m},{},{},{},{}", row[0], row[1], row[2], row[3]);
    }
    out
}

pub fn read_pulse_csv(text: &str) -> Result<PulseSequence<f64>> {
    let mut duration: Option<f64> = None;
    let mut declared_m: Option<usize> = None;
    let mut saw_header = false;
    let mut rows: Vec<[f64; CHANNELS]> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for token in meta.split_whitespace() {
                let Some((key, value)) = token.split_once('=') else {
                    continue;
                };
                match key {
                    "T_seconds" => {
                        duration = Some(value.parse().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid T_seconds '{value}'"),
                        })?)
                    }
                    "M" => {
                        declared_m = Some(value.parse().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid M '{value}'"),
                        })?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !saw_header {
            let normalized: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if normalized != PULSE_CSV_HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header '{PULSE_CSV_HEADER}', found '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != CHANNELS + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", CHANNELS + 1, fields.len()),
            });
        }
        let slice: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid slice index '{}'", fields[0]),
        })?;
        if slice != rows.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("slice index {slice} out of order (expected {})", rows.len()),
            });
        }
        let mut row = [0.0; CHANNELS];
        for (k, v) in row.iter_mut().enumerate() {
            *v = fields[k + 1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid amplitude '{}'", fields[k + 1]),
            })?;
        }
        rows.push(row);
    }

    let duration = duration.ok_or(Error::Parse {
        line: 1,
        message: "missing '# T_seconds=<value> M=<value>' metadata line".into(),
    })?;
    if let Some(m) = declared_m {
        if m != rows.len() {
            return Err(Error::Usage(format!("metadata declares M={m} but file has {} slices", rows.len())));
        }
    }
    PulseSequence::new(duration, rows)
}
