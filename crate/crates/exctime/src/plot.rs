//! `plot`: ECDF overlays and log-log survival plots as plain SVG. The output
//! is a pure function of the input tables and the chosen column.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One curve: a label and the sample it summarizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// Optional row filter `column == value`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFilter {
    pub column: String,
    pub value: f64,
}

/// Reads one numeric column from a CSV table, keeping rows that pass `filter`.
pub fn read_column(path: &Path, column: &str, filter: Option<&RowFilter>) -> Result<Series> {
    let label = path
        .file_name()
        .map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_column(&text, &label, column, filter)
}

pub fn parse_column(text: &str, label: &str, column: &str, filter: Option<&RowFilter>) -> Result<Series> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Input(format!("{label}: {e}")))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input(format!("{label}: no column '{name}'")))
    };
    let col = find(column)?;
    let filter_col = filter.map(|f| find(&f.column)).transpose()?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Input(format!("{label}: {e}")))?;
        let number = |k: usize| -> Result<f64> {
            let cell = record.get(k).unwrap_or("");
            cell.trim()
                .parse()
                .map_err(|_| Error::Input(format!("{label}: row {}: '{cell}' is not a number", line + 1)))
        };
        if let (Some(f), Some(k)) = (filter, filter_col) {
            if number(k)? != f.value {
                continue;
            }
        }
        values.push(number(col)?);
    }
    if values.is_empty() {
        return Err(Error::Input(format!("{label}: no data rows for column '{column}'")));
    }
    Ok(Series {
        label: label.to_string(),
        values,
    })
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v
}

// Evenly spaced order statistics, so very large samples stay light.
fn thin(n: usize) -> Vec<usize> {
    if n <= MAX_POINTS {
        (0..n).collect()
    } else {
        (0..MAX_POINTS).map(|k| k * (n - 1) / (MAX_POINTS - 1)).collect()
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = if self.x.1 > self.x.0 { self.x.1 - self.x.0 } else { 1.0 };
        MARGIN + (x - self.x.0) / span * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let span = if self.y.1 > self.y.0 { self.y.1 - self.y.0 } else { 1.0 };
        HEIGHT - MARGIN - (y - self.y.0) / span * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_open(title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    s
}

fn axes(s: &mut String, frame: &Frame, fmt_x: impl Fn(f64) -> String, fmt_y: impl Fn(f64) -> String) {
    for k in 0..=4 {
        let fx = frame.x.0 + (frame.x.1 - frame.x.0) * k as f64 / 4.0;
        let fy = frame.y.0 + (frame.y.1 - frame.y.0) * k as f64 / 4.0;
        let (x, y) = (frame.px(fx), frame.py(fy));
        let base = HEIGHT - MARGIN;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            base + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            base + 18.0,
            fmt_x(fx)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            y + 4.0,
            fmt_y(fy)
        );
    }
}

fn polyline(s: &mut String, frame: &Frame, points: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
}

fn legend(s: &mut String, series: &[Series]) {
    for (k, ser) in series.iter().enumerate() {
        let y = MARGIN + 16.0 + 16.0 * k as f64;
        let x = WIDTH - MARGIN - 150.0;
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            x + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 26.0,
            y + 4.0,
            escape(&ser.label)
        );
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn check(series: &[Series]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Input("nothing to plot".into()));
    }
    if let Some(s) = series.iter().find(|s| sorted(&s.values).is_empty()) {
        return Err(Error::Input(format!("{}: no finite values", s.label)));
    }
    Ok(())
}

/// Overlaid empirical CDFs, legend in input order.
pub fn ecdf_svg(series: &[Series], column: &str) -> Result<String> {
    check(series)?;
    let all: Vec<Vec<f64>> = series.iter().map(|s| sorted(&s.values)).collect();
    let lo = all.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
    let hi = all.iter().map(|v| v[v.len() - 1]).fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x: (lo, hi),
        y: (0.0, 1.0),
    };
    let mut s = svg_open(&format!("ECDF of {column}"), column, "P(X ≤ x)");
    axes(&mut s, &frame, |x| format!("{x:.3}"), |y| format!("{y:.2}"));
    for (k, v) in all.iter().enumerate() {
        let n = v.len() as f64;
        let mut pts = vec![(lo, 0.0)];
        for i in thin(v.len()) {
            pts.push((v[i], i as f64 / n));
            pts.push((v[i], (i + 1) as f64 / n));
        }
        pts.push((hi, 1.0));
        polyline(&mut s, &frame, &pts, PALETTE[k % PALETTE.len()]);
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Empirical survival `P(X > x)` against `x` on log-log axes, positive values only.
pub fn tail_svg(series: &[Series], column: &str) -> Result<String> {
    check(series)?;
    let mut curves = Vec::with_capacity(series.len());
    for ser in series {
        let v: Vec<f64> = sorted(&ser.values).into_iter().filter(|&x| x > 0.0).collect();
        if v.len() < 2 {
            return Err(Error::Input(format!("{}: fewer than two positive values", ser.label)));
        }
        let n = v.len() as f64;
        let pts: Vec<(f64, f64)> = thin(v.len() - 1)
            .into_iter()
            .map(|i| (v[i].log10(), ((n - i as f64 - 0.5) / n).log10()))
            .collect();
        curves.push(pts);
    }
    let xs = curves.iter().flatten().map(|p| p.0);
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let ylo = curves.iter().flatten().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let frame = Frame {
        x: (lo, hi),
        y: (ylo, 0.0),
    };
    let mut s = svg_open(
        &format!("Tail of {column}"),
        &format!("log10 {column}"),
        "log10 P(X > x)",
    );
    axes(&mut s, &frame, |x| format!("{x:.2}"), |y| format!("{y:.2}"));
    for (k, pts) in curves.iter().enumerate() {
        polyline(&mut s, &frame, pts, PALETTE[k % PALETTE.len()]);
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Reads `column` from every input and writes `ecdf_<column>.svg` and
/// `tail_<column>.svg` into `out`.
pub fn cmd_plot(inputs: &[PathBuf], column: &str, filter: Option<&RowFilter>, out: &Path) -> Result<Vec<PathBuf>> {
    let series = inputs
        .iter()
        .map(|p| read_column(p, column, filter))
        .collect::<Result<Vec<_>>>()?;
    let ecdf = ecdf_svg(&series, column)?;
    let tail = tail_svg(&series, column)?;
    fs::create_dir_all(out)?;
    let stem: String = column
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    let paths = vec![
        out.join(format!("ecdf_{stem}.svg")),
        out.join(format!("tail_{stem}.svg")),
    ];
    fs::write(&paths[0], ecdf)?;
    fs::write(&paths[1], tail)?;
    Ok(paths)
}
