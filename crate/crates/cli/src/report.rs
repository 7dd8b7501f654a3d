//! CSV and SVG renderings of an [`ErrorTable`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gridrecov_core::fmt::sig6;

use crate::experiment::ErrorTable;
use crate::{CliError, CliResult};

pub const CSV_HEADER: &str = "algorithm,p,q,rows,cols,trials,mean_error,stderr,wall_ms";

pub fn table_csv(table: &ErrorTable) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in table.sorted() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            sig6(r.p),
            sig6(r.q),
            r.rows,
            r.cols,
            r.trials,
            sig6(r.mean_error),
            sig6(r.stderr),
            sig6(r.wall_ms)
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(table: &ErrorTable, path: &Path) -> CliResult<()> {
    fs::write(path, table_csv(table)).map_err(|e| CliError::io(path, e))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Line chart of mean error against `p`, one polyline per algorithm, over
/// `[0, max p] x [0, 1.1 max error]`.
pub fn table_svg(table: &ErrorTable) -> CliResult<String> {
    if table.rows.is_empty() {
        return Err(CliError::Config("cannot plot an empty table".into()));
    }
    let max_p = table.rows.iter().map(|r| r.p).fold(0.0, f64::max);
    let max_err = table.rows.iter().map(|r| r.mean_error).fold(0.0, f64::max);
    let x_max = if max_p > 0.0 { max_p } else { 1.0 };
    let y_max = if max_err > 0.0 { 1.1 * max_err } else { 1.0 };
    let (plot_w, plot_h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let x = |p: f64| MARGIN + p / x_max * plot_w;
    let y = |e: f64| HEIGHT - MARGIN - e / y_max * plot_h;

    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in table.sorted() {
        series.entry(r.algorithm.name()).or_default().push((r.p, r.mean_error));
    }

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let (x0, y0, x1, y1) = (x(0.0), y(0.0), x(x_max), y(y_max));
    writeln!(svg, r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#)
        .unwrap();
    for k in 0..=4 {
        let fx = k as f64 / 4.0;
        let (px, ey) = (fx * x_max, fx * y_max);
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            x(px),
            y0 + 16.0,
            sig6(px)
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y(ey) + 4.0,
            sig6(ey)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">edge noise p</text>"#,
        MARGIN + plot_w / 2.0,
        HEIGHT - 16.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">mean Hamming error</text>"#,
        MARGIN + plot_h / 2.0,
        MARGIN + plot_h / 2.0
    )
    .unwrap();
    for (k, (name, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = points.iter().map(|&(p, e)| format!("{:.2},{:.2}", x(p), y(e))).collect();
        writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, coords.join(" "))
            .unwrap();
        let ly = MARGIN + 16.0 * k as f64;
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="12" fill="{color}">{name}</text>"#,
            WIDTH - MARGIN - 90.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(table: &ErrorTable, path: &Path) -> CliResult<()> {
    let svg = table_svg(table)?;
    fs::write(path, svg).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Algorithm, ErrorRow};

    fn row(algorithm: Algorithm, p: f64, mean_error: f64) -> ErrorRow {
        ErrorRow { algorithm, p, q: 0.4, rows: 20, cols: 20, trials: 100, mean_error, stderr: 0.1, wall_ms: 0.0 }
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(table_csv(&ErrorTable::default()), format!("{CSV_HEADER}\n"));
        assert!(table_svg(&ErrorTable::default()).is_err());
    }

    #[test]
    fn rows_sorted_by_algorithm_then_p() {
        let table = ErrorTable {
            rows: vec![
                row(Algorithm::TwoStep, 0.02, 1.0),
                row(Algorithm::EdgeOnly, 0.04, 2.0),
                row(Algorithm::TwoStep, 0.01, 0.5),
            ],
        };
        let csv = table_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "edge-only,0.04,0.4,20,20,100,2,0.1,0");
        assert!(lines[2].starts_with("two-step,0.01,"));
        assert!(lines[3].starts_with("two-step,0.02,"));
    }

    #[test]
    fn single_series_is_one_polyline() {
        let table = ErrorTable { rows: vec![row(Algorithm::TwoStep, 0.01, 1.0), row(Algorithm::TwoStep, 0.02, 2.0)] };
        let svg = table_svg(&table).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        // the top of the y axis is 1.1 times the largest error
        assert!(svg.contains(">2.2</text>"));
        assert_eq!(svg, table_svg(&table).unwrap());
    }
}
