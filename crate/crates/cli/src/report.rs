//! Sweep output rendering: CSV, JSON and a static SVG heatmap.
//!
//! Formatting is pinned so repeated runs produce byte-identical files:
//! floats carry 12 significant digits, the decimal separator is "." and
//! lines end with "\n" regardless of platform or parallelism.

use serde::Serialize;
use wkey_core::protocol::{FilterSweepPoint, RandomSweepPoint};

/// Fixed 12-significant-digit float formatting.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn filter_csv(rows: &[FilterSweepPoint<f64>]) -> String {
    let mut out = String::from("N,D,epsilon,q,i_ab,i_ae,rate,rate_clamped\n");
    for row in rows {
        let r = &row.record;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.n_parties,
            row.d,
            fmt_sig(row.epsilon),
            fmt_sig(r.q),
            fmt_sig(r.i_ab),
            fmt_sig(r.i_ae),
            fmt_sig(r.rate),
            fmt_sig(r.rate_clamped()),
        ));
    }
    out
}

pub fn random_csv(rows: &[RandomSweepPoint<f64>]) -> String {
    let mut out = String::from("D,M,q,i_ab,i_ae,rate,rate_clamped\n");
    for row in rows {
        let r = &row.record;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.d,
            row.m_rounds,
            fmt_sig(r.q),
            fmt_sig(r.i_ab),
            fmt_sig(r.i_ae),
            fmt_sig(r.rate),
            fmt_sig(r.rate_clamped()),
        ));
    }
    out
}

#[derive(Serialize)]
struct FilterJsonRow {
    n: usize,
    d: u64,
    epsilon: f64,
    q: f64,
    i_ab: f64,
    i_ae: f64,
    rate: f64,
    rate_clamped: f64,
}

#[derive(Serialize)]
struct RandomJsonRow {
    d: u64,
    m: u64,
    q: f64,
    i_ab: f64,
    i_ae: f64,
    rate: f64,
    rate_clamped: f64,
}

pub fn filter_json(rows: &[FilterSweepPoint<f64>]) -> String {
    let rows: Vec<FilterJsonRow> = rows
        .iter()
        .map(|row| FilterJsonRow {
            n: row.n_parties,
            d: row.d,
            epsilon: row.epsilon,
            q: row.record.q,
            i_ab: row.record.i_ab,
            i_ae: row.record.i_ae,
            rate: row.record.rate,
            rate_clamped: row.record.rate_clamped(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("plain structs serialize");
    text.push('\n');
    text
}

pub fn random_json(rows: &[RandomSweepPoint<f64>]) -> String {
    let rows: Vec<RandomJsonRow> = rows
        .iter()
        .map(|row| RandomJsonRow {
            d: row.d,
            m: row.m_rounds,
            q: row.record.q,
            i_ab: row.record.i_ab,
            i_ae: row.record.i_ae,
            rate: row.record.rate,
            rate_clamped: row.record.rate_clamped(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("plain structs serialize");
    text.push('\n');
    text
}

/// Static heatmap of the clamped rate over a rectangular grid; one cell
/// per (x, y) point, darker is larger.
pub fn heatmap_svg(
    x_label: &str,
    x_values: &[String],
    y_label: &str,
    y_values: &[String],
    cells_row_major: &[f64],
) -> String {
    let cols = x_values.len();
    let rows = y_values.len();
    assert_eq!(cells_row_major.len(), cols * rows, "cell count mismatch");
    const CELL: usize = 8;
    const MARGIN: usize = 70;
    let width = MARGIN + cols * CELL + 10;
    let height = MARGIN + rows * CELL + 10;
    let max = cells_row_major.iter().cloned().fold(0.0f64, f64::max);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (j, row_value) in y_values.iter().enumerate() {
        for (i, _) in x_values.iter().enumerate() {
            let v = cells_row_major[j * cols + i];
            let t = if max > 0.0 {
                (v / max).clamp(0.0, 1.0)
            } else {
                0.0
            };
            // white to dark blue
            let r = (255.0 - t * 247.0) as u8;
            let g = (255.0 - t * 186.0) as u8;
            let b = (255.0 - t * 107.0) as u8;
            let x = MARGIN + i * CELL;
            let y = MARGIN + (rows - 1 - j) * CELL;
            svg.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n"
            ));
        }
        if j == 0 || j + 1 == rows {
            let y = MARGIN + (rows - 1 - j) * CELL + CELL;
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{y}\" font-size=\"10\" text-anchor=\"end\">{row_value}</text>\n",
                MARGIN - 4
            ));
        }
    }
    let axis_y = MARGIN + rows * CELL + 12;
    svg.push_str(&format!(
        "<text x=\"{MARGIN}\" y=\"{axis_y}\" font-size=\"10\">{}</text>\n",
        x_values.first().map(String::as_str).unwrap_or("")
    ));
    if cols > 1 {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{axis_y}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            MARGIN + cols * CELL,
            x_values.last().map(String::as_str).unwrap_or("")
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">{x_label}</text>\n",
        MARGIN + cols * CELL / 2,
        axis_y
    ));
    svg.push_str(&format!(
        "<text x=\"8\" y=\"{}\" font-size=\"11\">{y_label}</text>\n",
        MARGIN + rows * CELL / 2
    ));
    svg.push_str(&format!(
        "<text x=\"8\" y=\"14\" font-size=\"11\">max rate_clamped = {}</text>\n",
        fmt_sig(max)
    ));
    svg.push_str("</svg>\n");
    svg
}

pub fn filter_svg(rows: &[FilterSweepPoint<f64>]) -> String {
    let mut ds: Vec<u64> = rows.iter().map(|r| r.d).collect();
    ds.dedup();
    let mut epsilons: Vec<f64> = Vec::new();
    for row in rows.iter().take_while(|r| r.d == rows[0].d) {
        epsilons.push(row.epsilon);
    }
    let cols = ds.len();
    let rows_n = epsilons.len();
    let mut cells = vec![0.0f64; cols * rows_n];
    for (idx, row) in rows.iter().enumerate() {
        let i = idx / rows_n;
        let j = idx % rows_n;
        cells[j * cols + i] = row.record.rate_clamped();
    }
    heatmap_svg(
        "D",
        &ds.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "epsilon",
        &epsilons.iter().map(|e| fmt_sig(*e)).collect::<Vec<_>>(),
        &cells,
    )
}

pub fn random_svg(rows: &[RandomSweepPoint<f64>]) -> String {
    let mut ds: Vec<u64> = rows.iter().map(|r| r.d).collect();
    ds.dedup();
    let mut ms: Vec<u64> = Vec::new();
    for row in rows.iter().take_while(|r| r.d == rows[0].d) {
        ms.push(row.m_rounds);
    }
    let cols = ds.len();
    let rows_n = ms.len();
    let mut cells = vec![0.0f64; cols * rows_n];
    for (idx, row) in rows.iter().enumerate() {
        let i = idx / rows_n;
        let j = idx % rows_n;
        cells[j * cols + i] = row.record.rate_clamped();
    }
    heatmap_svg(
        "D",
        &ds.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "M",
        &ms.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        &cells,
    )
}
