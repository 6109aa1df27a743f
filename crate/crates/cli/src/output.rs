//! Artifact files: CSV with `#` provenance lines, JSON reports, SVG plots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub struct Table {
    pub provenance: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn num(v: f64) -> String {
    // Shortest round-trip form; identical across reruns.
    format!("{v:?}")
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for line in &table.provenance {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// One panel per named column, plotted against the first column.
pub fn svg_from_csv(csv_path: &Path, svg_path: &Path, columns: &[String]) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(csv_path)
        .with_context(|| format!("reading {}", csv_path.display()))?;
    let headers = rdr.headers()?.clone();
    let picks: Vec<(String, usize)> = columns
        .iter()
        .filter_map(|c| headers.iter().position(|h| h == c).map(|i| (c.clone(), i)))
        .collect();
    let mut t = Vec::new();
    let mut series = vec![Vec::new(); picks.len()];
    for rec in rdr.records() {
        let rec = rec?;
        t.push(rec[0].parse::<f64>()?);
        for (s, (_, i)) in series.iter_mut().zip(&picks) {
            s.push(rec[*i].parse::<f64>()?);
        }
    }

    const W: f64 = 640.0;
    const H: f64 = 180.0;
    const PAD: f64 = 40.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{}\" font-family=\"monospace\" font-size=\"11\">\n",
        H * picks.len().max(1) as f64
    );
    let (t0, t1) = bounds(&t);
    for (p, ((name, _), ys)) in picks.iter().zip(&series).enumerate() {
        let top = p as f64 * H;
        let (y0, y1) = bounds(ys);
        let points: Vec<String> = t
            .iter()
            .zip(ys)
            .filter(|(_, y)| y.is_finite())
            .map(|(x, y)| {
                let px = PAD + (x - t0) / (t1 - t0) * (W - 2.0 * PAD);
                let py = top + H - PAD / 2.0 - (y - y0) / (y1 - y0) * (H - 1.5 * PAD);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        svg += &format!(
            "<rect x=\"{PAD}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
            top + PAD,
            W - 2.0 * PAD,
            H - 1.5 * PAD
        );
        svg += &format!(
            "<text x=\"{PAD}\" y=\"{}\">{name}  [{y0:.3e}, {y1:.3e}]  t in [{t0}, {t1}]</text>\n",
            top + PAD - 6.0
        );
        svg += &format!(
            "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1\" points=\"{}\"/>\n",
            points.join(" ")
        );
    }
    svg += "</svg>\n";
    std::fs::write(svg_path, svg).with_context(|| format!("writing {}", svg_path.display()))
}

/// Finite min and max, widened when flat so the scale is never degenerate.
fn bounds(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}
