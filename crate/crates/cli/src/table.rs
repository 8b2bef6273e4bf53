//! Rectangular result tables with deterministic rendering.
//!
//! CSV serializes reals with 17 significant digits; JSON uses the shortest
//! round-trip representation. Both parse back to identical f64 values.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Pretty,
    Csv,
    Json,
}

/// A rectangular table: named columns (with an optional unit) and rows of
/// cells in a fixed order.
#[derive(Debug, Clone)]
pub struct OutputTable {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "ragged table row");
        self.rows.push(cells);
    }

    fn header(&self, (name, unit): &(String, String)) -> String {
        if unit.is_empty() {
            name.clone()
        } else {
            format!("{name} ({unit})")
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Pretty => self.to_pretty(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// RFC-4180-style CSV with a header row; reals carry 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let headers: Vec<String> = self
            .columns
            .iter()
            .map(|c| csv_escape(&self.header(c)))
            .collect();
        out.push_str(&headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Real(v) => format!("{v:.16e}"),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(t) => csv_escape(t),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON array of row objects keyed by column name.
    pub fn to_json(&self) -> String {
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (col, cell) in self.columns.iter().zip(row.iter()) {
                let value = match cell {
                    Cell::Real(v) => serde_json::Number::from_f64(*v)
                        .map(serde_json::Value::Number)
                        .unwrap_or(serde_json::Value::Null),
                    Cell::Int(v) => serde_json::Value::Number((*v).into()),
                    Cell::Text(t) => serde_json::Value::String(t.clone()),
                };
                obj.insert(self.header(col), value);
            }
            rows.push(serde_json::Value::Object(obj));
        }
        serde_json::to_string_pretty(&serde_json::Value::Array(rows)).expect("table is valid JSON")
    }

    /// Column-aligned plain text.
    pub fn to_pretty(&self) -> String {
        let headers: Vec<String> = self.columns.iter().map(|c| self.header(c)).collect();
        let mut cells: Vec<Vec<String>> = vec![headers.clone()];
        for row in &self.rows {
            cells.push(
                row.iter()
                    .map(|c| match c {
                        Cell::Real(v) => format!("{v}"),
                        Cell::Int(v) => v.to_string(),
                        Cell::Text(t) => t.clone(),
                    })
                    .collect(),
            );
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push_str("  ");
                }
                let _ = write!(out, "{cell:<width$}", width = widths[j]);
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
            if i == 0 {
                for (j, w) in widths.iter().enumerate() {
                    if j > 0 {
                        out.push_str("  ");
                    }
                    out.push_str(&"-".repeat(*w));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Presentation-only SVG polyline plot of `y_cols` against `x_col`.
    pub fn write_svg(&self, x_col: usize, y_cols: &[usize], path: &Path) -> std::io::Result<()> {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const M: f64 = 50.0;
        let xs: Vec<f64> = self.rows.iter().filter_map(|r| r[x_col].as_f64()).collect();
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{W}" height="{H}" fill="white"/><g stroke="black" fill="none"><path d="M {M} {m} V {ybot} H {xr}"/></g>"#,
            m = M,
            ybot = H - M,
            xr = W - M,
        );
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
        let (xmin, xmax) = bounds(&xs);
        for (ci, &yc) in y_cols.iter().enumerate() {
            let ys: Vec<f64> = self.rows.iter().filter_map(|r| r[yc].as_f64()).collect();
            let (ymin, ymax) = bounds(&ys);
            let mut points = String::new();
            for (x, y) in xs.iter().zip(ys.iter()) {
                let px = M + (x - xmin) / (xmax - xmin).max(1e-300) * (W - 2.0 * M);
                let py = H - M - (y - ymin) / (ymax - ymin).max(1e-300) * (H - 2.0 * M);
                let _ = write!(points, "{px:.2},{py:.2} ");
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                colors[ci % colors.len()],
                points.trim_end()
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" fill="{}">{}</text>"#,
                W - M + 4.0,
                M + 14.0 * ci as f64,
                colors[ci % colors.len()],
                self.header(&self.columns[yc])
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text></svg>"#,
            W / 2.0,
            H - 12.0,
            self.header(&self.columns[x_col])
        );
        std::fs::write(path, svg)
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
