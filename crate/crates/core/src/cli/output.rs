//! Formatting helpers for CLI data files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::catbox::EquivalenceReport;
use crate::units::UnitMode;
use crate::wavepacket::{GaussianPacket, SpreadReport};

/// Scientific notation with ten significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

/// `HH:MM[:SS]` to seconds since midnight.
pub fn parse_clock(s: &str) -> Result<f64, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected HH:MM or HH:MM:SS, got '{s}'");
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let h: u32 = parts[0].parse().map_err(|_| bad())?;
    let m: u32 = parts[1].parse().map_err(|_| bad())?;
    let sec: f64 = match parts.get(2) {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if m >= 60 || !(0.0..60.0).contains(&sec) {
        return Err(bad());
    }
    Ok(f64::from(h) * 3600.0 + f64::from(m) * 60.0 + sec)
}

/// Seconds since midnight as `HH:MM:SS`, rounded to the nearest second.
pub fn format_clock(t: f64) -> String {
    let total = t.round() as i64;
    format!("{:02}:{:02}:{:02}", total / 3600, (total / 60) % 60, total % 60)
}

pub(super) fn mode_name(mode: UnitMode) -> &'static str {
    match mode {
        UnitMode::Si => "si",
        UnitMode::Natural => "natural",
    }
}

#[derive(Serialize)]
struct SpreadOutput<'a> {
    preset: &'a str,
    units: &'a str,
    mass: f64,
    dx0: f64,
    dt: f64,
    rate: f64,
    delta_x_v: f64,
    delta_x_1: f64,
    target: f64,
    wait_time: f64,
}

pub(super) fn spread_json(
    preset: &str,
    packet: &GaussianPacket,
    report: &SpreadReport,
    target: f64,
    wait_time: f64,
    mode: UnitMode,
) -> String {
    let out = SpreadOutput {
        preset,
        units: mode_name(mode),
        mass: packet.mass,
        dx0: packet.width,
        dt: report.delta_t,
        rate: report.rate,
        delta_x_v: report.delta_x_v,
        delta_x_1: report.delta_x_1,
        target,
        wait_time,
    };
    serde_json::to_string_pretty(&out).expect("spread output serialises") + "\n"
}

/// Conditional stop-time histograms, one row per bin, with analytic counts.
pub(super) fn histogram_csv(report: &EquivalenceReport) -> String {
    let mut csv = String::from("bin_lower,bin_upper,expected");
    for e in &report.engines {
        write!(csv, ",{}", e.engine).unwrap();
    }
    csv.push('\n');
    let Some(first) = report.engines.first() else {
        return csv;
    };
    let edges = first.stop_time_histogram.bin_edges();
    for k in 0..edges.len() - 1 {
        write!(csv, "{},{},{}", sci(edges[k]), sci(edges[k + 1]), sci(report.expected_stop_histogram[k])).unwrap();
        for e in &report.engines {
            write!(csv, ",{}", e.stop_time_histogram.counts[k]).unwrap();
        }
        csv.push('\n');
    }
    csv
}
