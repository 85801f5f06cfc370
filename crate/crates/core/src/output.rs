//! Deterministic file output: CSV, JSON, and minimal SVG plots.
//!
//! Every float is rendered as fixed-format scientific notation with 17
//! significant digits, so identical inputs produce byte-identical files on
//! any platform.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV table: one header line, then one row per record.
pub fn write_csv<W: Write>(
    out: &mut W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| sci(*v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// JSON formatter that pins f64 rendering to [`sci`].
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize to JSON with deterministic float formatting and a trailing
/// newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("serialization of report types cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

/// A single-polyline SVG plot with axes and labels.
pub fn svg_line_plot(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }

    let px = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y_min) / (y_max - y_min) * (H - MT - MB);

    let mut path = String::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        path.push_str(&format!("{cmd}{:.2},{:.2} ", px(x), py(y)));
    }

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        W / 2.0
    ));
    // Axes
    s.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    s.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        H - MB
    ));
    // Tick labels at the extremes
    for (x, anchor) in [(x_min, "start"), (x_max, "end")] {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" \
             font-size=\"11\">{:.6e}</text>\n",
            px(x),
            H - MB + 16.0,
            x
        ));
    }
    for y in [y_min, y_max] {
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"11\">{:.6e}</text>\n",
            ML - 6.0,
            py(y) + 4.0,
            y
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{x_label}</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 16 {:.1})\">{y_label}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    ));
    s.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
        path.trim_end()
    ));
    s.push_str("</svg>\n");
    s
}
