//! Serialization of wall datasets to CSV, JSON and SVG.
//!
//! Every format is a pure function of the dataset, so identical inputs give
//! byte-identical files. Numeric lattice data is written as exact `p/q` strings;
//! the only floats are SVG pixel coordinates, printed at fixed precision.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_exact, to_f64, Q};
use crate::scan::WallDataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Parse(format!(
                "unknown format `{other}` (expected csv, json or svg)"
            ))),
        }
    }
}

pub fn render(data: &WallDataset, format: Format) -> String {
    match format {
        Format::Csv => to_csv(data),
        Format::Json => to_json(data),
        Format::Svg => to_svg(data),
    }
}

/// Header `w_index,b,t`, then one row per sample in dataset order.
pub fn to_csv(data: &WallDataset) -> String {
    let mut out = String::from("w_index,b,t\n");
    for s in &data.samples {
        let _ = writeln!(
            out,
            "{},{},{}",
            s.w_index,
            format_exact(&s.b),
            format_exact(&s.t)
        );
    }
    out
}

#[derive(Serialize)]
struct JsonWall {
    index: usize,
    class: String,
    polynomial: String,
    trivial: bool,
    cells: usize,
}

#[derive(Serialize)]
struct JsonSample {
    w_index: usize,
    b: String,
    t: String,
}

#[derive(Serialize)]
struct JsonDataset {
    k: usize,
    v: String,
    b_range: [String; 2],
    t_range: [String; 2],
    resolution: [usize; 2],
    b_step: String,
    t_step: String,
    degenerate_v: bool,
    walls: Vec<JsonWall>,
    samples: Vec<JsonSample>,
}

pub fn to_json(data: &WallDataset) -> String {
    let doc = JsonDataset {
        k: data.k,
        v: data.v.to_string(),
        b_range: [format_exact(&data.b_range.0), format_exact(&data.b_range.1)],
        t_range: [format_exact(&data.t_range.0), format_exact(&data.t_range.1)],
        resolution: [data.resolution.0, data.resolution.1],
        b_step: format_exact(&data.b_step),
        t_step: format_exact(&data.t_step),
        degenerate_v: data.degenerate_v,
        walls: data
            .walls
            .iter()
            .map(|w| JsonWall {
                index: w.index,
                class: w.class.to_string(),
                polynomial: w.polynomial.to_string(),
                trivial: w.trivial,
                cells: w.cells,
            })
            .collect(),
        samples: data
            .samples
            .iter()
            .map(|s| JsonSample {
                w_index: s.w_index,
                b: format_exact(&s.b),
                t: format_exact(&s.t),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("dataset serializes");
    out.push('\n');
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Scatter plot of sample cell centres, one `<g>` layer per candidate class.
pub fn to_svg(data: &WallDataset) -> String {
    let (b0, b1) = (to_f64(&data.b_range.0), to_f64(&data.b_range.1));
    let (t0, t1) = (to_f64(&data.t_range.0), to_f64(&data.t_range.1));
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let px = |b: f64| MARGIN + (b - b0) / (b1 - b0) * plot_w;
    let py = |t: f64| HEIGHT - MARGIN - (t - t0) / (t1 - t0) * plot_h;
    let cell_w = to_f64(&data.b_step) / (b1 - b0) * plot_w;
    let cell_h = to_f64(&data.t_step) / (t1 - t0) * plot_h;
    let radius = (cell_w.min(cell_h) / 2.0).clamp(0.5, 3.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">b</text>"#,
        WIDTH / 2.0,
        HEIGHT - MARGIN / 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">t</text>"#,
        MARGIN / 3.0,
        HEIGHT / 2.0
    );
    for (label, x, y, anchor) in [
        (
            format_exact(&data.b_range.0),
            MARGIN,
            HEIGHT - MARGIN + 16.0,
            "start",
        ),
        (
            format_exact(&data.b_range.1),
            WIDTH - MARGIN,
            HEIGHT - MARGIN + 16.0,
            "end",
        ),
        (
            format_exact(&data.t_range.0),
            MARGIN - 4.0,
            HEIGHT - MARGIN,
            "end",
        ),
        (
            format_exact(&data.t_range.1),
            MARGIN - 4.0,
            MARGIN + 10.0,
            "end",
        ),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{label}</text>"#
        );
    }

    let half = |step: &Q| step / Q::from_integer(2.into());
    let (hb, ht) = (half(&data.b_step), half(&data.t_step));
    for wall in &data.walls {
        let colour = PALETTE[wall.index % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<g id="w{}" data-class="{}" fill="{colour}" stroke="none">"#,
            wall.index, wall.class
        );
        for s in data.samples.iter().filter(|s| s.w_index == wall.index) {
            let cx = px(to_f64(&(&s.b + &hb)));
            let cy = py(to_f64(&(&s.t + &ht)));
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{radius:.3}"/>"#
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

/// Write `contents` to `path`, reporting the path on failure.
pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn emit(data: &WallDataset, format: Format, path: &Path) -> Result<()> {
    write(path, &render(data, format))
}
