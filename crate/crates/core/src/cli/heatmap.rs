use std::fmt::Write as _;
use std::path::Path;

use super::viridis::VIRIDIS;
use crate::error::{Error, Result};
use crate::experiments::FrequencyTrace;

/// Upper end of the color scale; larger values saturate.
pub const COLOR_MAX: f64 = 1.2;

/// Rows are frequencies (or degrees), columns iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapData {
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
    /// `values[row][col]`
    pub values: Vec<Vec<f64>>,
    pub row_title: String,
}

impl HeatmapData {
    pub fn new(row_labels: Vec<usize>, col_labels: Vec<usize>, values: Vec<Vec<f64>>, row_title: &str) -> Result<Self> {
        if row_labels.is_empty() || col_labels.is_empty() {
            return Err(Error::Shape("heatmap needs at least one row and one column".into()));
        }
        if values.len() != row_labels.len() || values.iter().any(|r| r.len() != col_labels.len()) {
            return Err(Error::Shape(format!(
                "heatmap values do not match {} rows × {} columns",
                row_labels.len(),
                col_labels.len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("heatmap value {v} is not in [0, ∞)")));
        }
        Ok(Self {
            row_labels,
            col_labels,
            values,
            row_title: row_title.into(),
        })
    }

    pub fn from_trace(trace: &FrequencyTrace, row_title: &str) -> Result<Self> {
        Self::new(
            trace.labels().to_vec(),
            trace.checkpoints().to_vec(),
            trace.matrix().to_vec(),
            row_title,
        )
    }
}

fn color(v: f64) -> String {
    let i = ((v.clamp(0.0, COLOR_MAX) / COLOR_MAX) * 255.0).round() as usize;
    let [r, g, b] = VIRIDIS[i];
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// SVG body without an XML declaration, so callers may prepend comments.
/// Iterations along x, row labels increasing downward,
/// and a color bar with 1.0 marked.
pub fn heatmap_svg(h: &HeatmapData) -> String {
    let (rows, cols) = (h.row_labels.len(), h.col_labels.len());
    let cw = (900.0 / cols as f64).clamp(2.0, 24.0);
    let ch = (400.0 / rows as f64).clamp(8.0, 24.0);
    let (left, top) = (70.0, 20.0);
    let (pw, ph) = (cw * cols as f64, ch * rows as f64);
    let bar_x = left + pw + 30.0;
    let width = bar_x + 70.0;
    let height = top + ph + 55.0;

    let mut s = String::new();
    let w = &mut s;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, row) in h.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            writeln!(
                w,
                r#"<rect class="cell" x="{:.2}" y="{:.2}" width="{cw:.2}" height="{ch:.2}" fill="{}"/>"#,
                left + j as f64 * cw,
                top + i as f64 * ch,
                color(v)
            )
            .unwrap();
        }
    }
    for (i, label) in h.row_labels.iter().enumerate() {
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" dominant-baseline="middle">{label}</text>"#,
            left - 6.0,
            top + (i as f64 + 0.5) * ch
        )
        .unwrap();
    }
    let step = cols.div_ceil(10);
    for j in (0..cols).step_by(step) {
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            left + (j as f64 + 0.5) * cw,
            top + ph + 16.0,
            h.col_labels[j]
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">iteration</text>"#,
        left + pw / 2.0,
        top + ph + 40.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        h.row_title
    )
    .unwrap();

    // color bar, COLOR_MAX at the top
    let bar_h = ph.max(120.0);
    let seg = bar_h / 64.0;
    for i in 0..64 {
        let v = COLOR_MAX * (1.0 - (i as f64 + 0.5) / 64.0);
        writeln!(
            w,
            r#"<rect x="{bar_x:.1}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            top + i as f64 * seg,
            seg + 0.05,
            color(v)
        )
        .unwrap();
    }
    for (v, label) in [(0.0, "0"), (1.0, "1.0"), (COLOR_MAX, "1.2")] {
        let y = top + bar_h * (1.0 - v / COLOR_MAX);
        let bold = if v == 1.0 { r#" font-weight="bold""# } else { "" };
        writeln!(
            w,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{y:.1}" dominant-baseline="middle"{bold}>{label}</text>"#,
            bar_x - 3.0,
            bar_x + 17.0,
            bar_x + 20.0
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    s
}

pub fn render_heatmap(h: &HeatmapData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = format!("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n{}", heatmap_svg(h));
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
