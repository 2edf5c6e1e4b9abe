//! File formats written by the commands.

use crate::CliError;
use bulsol_core::montecarlo::Schedule;
use bulsol_core::{Scaling, SolitaireParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub x: f64,
    pub rescaled_y: f64,
    pub shape_y: f64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    #[serde(rename = "move")]
    pub move_index: u64,
    #[serde(rename = "N")]
    pub piles: u64,
    pub new_pile: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryRow {
    pub state: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRow {
    pub x: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionRow {
    #[serde(rename = "move")]
    pub move_index: u64,
    pub chunk: usize,
    pub size: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSummary {
    pub sup: f64,
    pub fraction_within: f64,
    pub epsilon: f64,
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub stream: u64,
    pub final_sup: f64,
    pub mean_sup: Option<f64>,
    pub max_sup: Option<f64>,
    pub max_new_pile_deviation: Option<f64>,
    pub max_pile_ratio: Option<f64>,
}

/// Contents of `simulate --json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationStats {
    pub schema_version: u32,
    pub params: SolitaireParams,
    pub schedule: Schedule<f64>,
    pub burn_in: u64,
    pub moves: u64,
    pub start: String,
    pub shape: String,
    pub scaling: Scaling,
    pub sorted: bool,
    pub seeds: Vec<u64>,
    pub chains: Vec<ChainSummary>,
    /// Deviation of the first chain's final state.
    pub deviation: DeviationSummary,
    pub final_state: String,
    pub traces_path: Option<String>,
}

/// Versioned header comment for a CSV kind.
pub fn csv_tag(kind: &str) -> String {
    format!("# bulsol {kind} v{SCHEMA_VERSION}")
}

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes the tag line, the header and one record per row, LF-terminated.
pub fn write_csv<R: Serialize>(out: &mut dyn Write, kind: &str, header: &[&str], rows: &[R]) -> Result<(), CliError> {
    writeln!(out, "{}", csv_tag(kind))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_to<R: Serialize>(
    path: Option<&Path>,
    kind: &str,
    header: &[&str],
    rows: &[R],
) -> Result<(), CliError> {
    let mut out = sink(path)?;
    write_csv(&mut *out, kind, header, rows)?;
    out.flush()?;
    Ok(())
}

/// Parses a CSV written by [`write_csv`].
pub fn read_csv<R: DeserializeOwned>(input: impl Read) -> Result<Vec<R>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<R>, _>>()?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// A line plot of a step function against a smooth curve, self-contained.
pub struct Plot<'a> {
    pub title: &'a str,
    pub x_range: (f64, f64),
    pub steps: &'a [(f64, f64)],
    pub curve: &'a [(f64, f64)],
    pub step_label: &'a str,
    pub curve_label: &'a str,
}

impl Plot<'_> {
    pub fn to_svg(&self) -> String {
        const W: f64 = 720.0;
        const H: f64 = 450.0;
        const M: f64 = 56.0;
        let (x0, x1) = self.x_range;
        let y_top = self.steps.iter().chain(self.curve).map(|&(_, y)| y).fold(1.0f64, f64::max) * 1.05;
        let px = |x: f64| M + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (W - 2.0 * M);
        let py = |y: f64| H - M - y / y_top * (H - 2.0 * M);
        let polyline = |pts: &[(f64, f64)]| {
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect::<Vec<_>>().join(" ")
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r##"<rect width="{W}" height="{H}" fill="#ffffff"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            s,
            r##"<path d="M{:.2},{:.2} H{:.2} M{:.2},{:.2} V{:.2}" stroke="#000000" fill="none"/>"##,
            M,
            H - M,
            W - M,
            M,
            H - M,
            M
        );
        let ticks = 6;
        for i in 0..=ticks {
            let x = x0 + (x1 - x0) * i as f64 / ticks as f64;
            let _ =
                writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.2}</text>"#, px(x), H - M + 18.0, x);
        }
        for i in 0..=4 {
            let y = y_top * i as f64 / 4.0;
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"#, M - 6.0, py(y) + 4.0, y);
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{}" stroke="#1f4e9c" stroke-width="1.2" fill="none"/>"##,
            polyline(self.steps)
        );
        let _ = writeln!(
            s,
            r##"<polyline points="{}" stroke="#c0392b" stroke-width="1.6" fill="none"/>"##,
            polyline(self.curve)
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="#1f4e9c" text-anchor="end">{}</text>"##,
            W - M,
            M,
            escape(self.step_label)
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="#c0392b" text-anchor="end">{}</text>"##,
            W - M,
            M + 16.0,
            escape(self.curve_label)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
