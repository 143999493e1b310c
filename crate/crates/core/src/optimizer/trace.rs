//! Iteration records, their file formats and after-the-fact audits.
//!
//! JSONL schema, one object per line:
//!
//! | key | meaning |
//! |-----|---------|
//! | `n` | iteration index, from 0 |
//! | `phase` | `"step1"` or `"step2"`: the kind of step tested in this iteration |
//! | `t_seconds` | duration of the accepted pulse after the iteration |
//! | `t_trial` | duration of the tested candidate |
//! | `j_before` | oracle J of the accepted pulse before the iteration |
//! | `j_trial` | oracle J of the candidate |
//! | `j_oracle` | oracle J of the accepted pulse after the iteration |
//! | `j_model` | model J of the accepted pulse after the iteration |
//! | `j_low` | return threshold J_L(n) |
//! | `step_size` | d used for the candidate |
//! | `slope` | predicted first-order change per unit d (Σ Δu·g_u for step 1) |
//! | `accepted` | whether the candidate replaced the pulse |
//! | `backtracks` | consecutive rejections so far in the current line search |
//! | `measurements` | oracle measurements charged in this iteration |
//! | `events` | list of event tags |
//!
//! Iteration 0 measures the initial pulse; it carries the `baseline` event and
//! `j_trial = j_before`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Step1,
    Step2,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Step1 => "step1",
            Phase::Step2 => "step2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Baseline,
    StallInStep1,
    StallInStep2,
    DegenerateTimeGradient,
    EnterStep2,
    ReturnToStep1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: u64,
    pub phase: Phase,
    pub t_seconds: f64,
    pub t_trial: f64,
    pub j_before: f64,
    pub j_trial: f64,
    pub j_oracle: f64,
    pub j_model: f64,
    pub j_low: f64,
    pub step_size: f64,
    pub slope: f64,
    pub accepted: bool,
    pub backtracks: u32,
    pub measurements: u64,
    #[serde(default)]
    pub events: Vec<Event>,
}

impl IterationRecord {
    pub fn has_event(&self, e: Event) -> bool {
        self.events.contains(&e)
    }
}

/// Sufficient-increase test for step 1. The optimizer and the audit share
/// this exact expression.
#[inline]
pub fn armijo_holds(j_before: f64, j_trial: f64, alpha: f64, step: f64, slope: f64) -> bool {
    j_trial >= j_before + alpha * step * slope
}

/// Retention test for step 2.
#[inline]
pub fn retention_holds(j_before: f64, j_trial: f64, beta: f64) -> bool {
    j_trial >= beta * j_before
}

pub fn to_jsonl(records: &[IterationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&record_line(r));
        out.push('\n');
    }
    out
}

pub fn record_line(r: &IterationRecord) -> String {
    serde_json::to_string(r).expect("records serialize")
}

pub fn from_jsonl(text: &str) -> Result<Vec<IterationRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub const SUMMARY_CSV_HEADER: &str = "n,phase,T_ms,J_oracle,J_model,accepted,measurements";

pub fn summary_csv(records: &[IterationRecord]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.phase.label(),
            r.t_seconds * 1e3,
            r.j_oracle,
            r.j_model,
            u8::from(r.accepted),
            r.measurements
        );
    }
    out
}

/// Plot-ready columns: iteration, measured J, threshold and T in ms.
pub fn plot_csv(records: &[IterationRecord]) -> String {
    let mut out = String::from("n,J_tomo,J_L,T_ms\n");
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.j_oracle, r.j_low, r.t_seconds * 1e3);
    }
    out
}

/// One failed audit check.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditViolation {
    pub n: u64,
    pub rule: &'static str,
    pub detail: String,
}

/// Replay a trace against the acceptance inequalities and the phase machine.
pub fn audit_trace(records: &[IterationRecord], alpha: f64, beta: f64) -> Vec<AuditViolation> {
    let mut out = Vec::new();
    let mut push = |n, rule, detail: String| out.push(AuditViolation { n, rule, detail });
    for (i, r) in records.iter().enumerate() {
        if i > 0 && r.n <= records[i - 1].n {
            push(r.n, "monotone-n", format!("n {} follows {}", r.n, records[i - 1].n));
        }
        if r.accepted && !r.has_event(Event::Baseline) {
            match r.phase {
                Phase::Step1 => {
                    if !armijo_holds(r.j_before, r.j_trial, alpha, r.step_size, r.slope) {
                        push(r.n, "armijo", format!("{} < {} + {}·{}·{}", r.j_trial, r.j_before, alpha, r.step_size, r.slope));
                    }
                    if r.t_trial != records.get(i.wrapping_sub(1)).map_or(r.t_trial, |p| p.t_seconds) {
                        push(r.n, "step1-fixed-t", format!("T moved to {}", r.t_trial));
                    }
                }
                Phase::Step2 => {
                    if !retention_holds(r.j_before, r.j_trial, beta) {
                        push(r.n, "retention", format!("{} < {}·{}", r.j_trial, beta, r.j_before));
                    }
                }
            }
        }
        if i > 0 {
            let prev = &records[i - 1];
            if r.t_seconds > prev.t_seconds {
                push(r.n, "t-nonincreasing", format!("{} > {}", r.t_seconds, prev.t_seconds));
            }
            if r.t_seconds != prev.t_seconds && !(r.accepted && r.phase == Phase::Step2) {
                push(r.n, "t-changes-only-in-step2", format!("{} → {}", prev.t_seconds, r.t_seconds));
            }
            if prev.j_oracle < prev.j_low && (r.phase != Phase::Step1 || r.t_seconds != prev.t_seconds) {
                push(
                    r.n,
                    "return-threshold",
                    format!("J {} < J_L {} at n = {} not followed by frozen-T step 1", prev.j_oracle, prev.j_low, prev.n),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: u64, phase: Phase, t: f64, jb: f64, jt: f64, accepted: bool) -> IterationRecord {
        IterationRecord {
            n,
            phase,
            t_seconds: t,
            t_trial: t,
            j_before: jb,
            j_trial: jt,
            j_oracle: if accepted { jt } else { jb },
            j_model: jt,
            j_low: 0.9,
            step_size: 1.0,
            slope: 1e-3,
            accepted,
            backtracks: 0,
            measurements: 3,
            events: vec![],
        }
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let mut r = rec(0, Phase::Step1, 5e-3, 0.1, 0.1 + 1e-17, true);
        r.j_model = 0.123_456_789_012_345_67;
        r.events.push(Event::Baseline);
        let text = to_jsonl(&[r.clone(), rec(1, Phase::Step2, 4.9e-3, 0.95, 0.949, true)]);
        let back = from_jsonl(&text).unwrap();
        assert_eq!(back[0], r);
        assert!(text.contains("\"phase\":\"step2\""));
        assert!(matches!(from_jsonl("{\"n\":1}\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn audit_flags_each_rule() {
        let good = vec![rec(0, Phase::Step1, 5e-3, 0.5, 0.6, true), rec(1, Phase::Step1, 5e-3, 0.6, 0.7, true)];
        assert!(audit_trace(&good, 0.01, 0.999).is_empty());

        // armijo: J must rise by at least α·d·slope = 1e-5
        let bad = vec![rec(0, Phase::Step1, 5e-3, 0.5, 0.500_000_1, true)];
        assert_eq!(audit_trace(&bad, 0.01, 0.999)[0].rule, "armijo");

        let bad = vec![rec(0, Phase::Step2, 4e-3, 0.95, 0.9, true)];
        assert_eq!(audit_trace(&bad, 0.01, 0.999)[0].rule, "retention");

        let bad = vec![rec(0, Phase::Step2, 4e-3, 0.95, 0.95, true), rec(1, Phase::Step2, 4.1e-3, 0.95, 0.95, true)];
        assert!(audit_trace(&bad, 0.01, 0.999).iter().any(|v| v.rule == "t-nonincreasing"));

        let mut low = rec(0, Phase::Step2, 4e-3, 0.95, 0.85, false);
        low.j_oracle = 0.85;
        let bad = vec![low, rec(1, Phase::Step2, 3.9e-3, 0.85, 0.85, true)];
        assert!(audit_trace(&bad, 0.01, 0.999).iter().any(|v| v.rule == "return-threshold"));
    }

    #[test]
    fn summary_header() {
        let csv = summary_csv(&[rec(0, Phase::Step1, 5e-3, 0.5, 0.6, true)]);
        assert!(csv.starts_with("n,phase,T_ms,J_oracle,J_model,accepted,measurements\n0,step1,5,0.6,"));
    }
}
