//! Static SVG rendering of experiment summaries: one mean line per
//! algorithm over a translucent 10th-90th percentile band, with axis
//! ticks and an optional log-scale vertical axis.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{FrameError, Result};
use crate::experiments::{AlgorithmStats, StatsSummary};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 4] = ["rgb(0,0,0)", "rgb(31,119,180)", "rgb(214,39,40)", "rgb(44,160,44)"];

/// Renders the summary to `path`. Under `log_scale`, nonpositive values
/// are clamped to the smallest positive plotted value and a footnote
/// records the clamp.
pub fn write_svg(summary: &StatsSummary, path: &Path, log_scale: bool) -> Result<()> {
    let body = svg_string(summary, log_scale);
    let mut file = File::create(path).map_err(|source| FrameError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(body.as_bytes())
        .map_err(|source| FrameError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axes {
    y_min: f64,
    y_max: f64,
    iters: usize,
    log_scale: bool,
}

impl Axes {
    fn x(&self, iteration: usize) -> f64 {
        let span = self.iters.max(1) as f64;
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * iteration as f64 / span
    }

    fn y(&self, value: f64) -> f64 {
        let v = if self.log_scale { value.log10() } else { value };
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        let frac = (v - self.y_min) / span;
        HEIGHT - MARGIN_BOTTOM - (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) * frac
    }
}

/// The rendered SVG document as a string.
pub fn svg_string(summary: &StatsSummary, log_scale: bool) -> String {
    let mut algorithms: Vec<&AlgorithmStats> = summary.algorithms.iter().collect();
    algorithms.sort_by(|a, b| a.name.cmp(&b.name));

    // Clamp floor for log scale: the smallest positive plotted value.
    let mut clamp_floor = f64::INFINITY;
    let mut clamped = false;
    for alg in &algorithms {
        for v in alg.mean.iter().chain(&alg.p10).chain(&alg.p90) {
            if *v > 0.0 {
                clamp_floor = clamp_floor.min(*v);
            } else {
                clamped = true;
            }
        }
    }
    if !clamp_floor.is_finite() {
        clamp_floor = 1e-16;
    }
    let sanitize = |v: f64| -> f64 {
        if log_scale && v <= 0.0 {
            clamp_floor
        } else {
            v
        }
    };

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for alg in &algorithms {
        for v in alg.mean.iter().chain(&alg.p10).chain(&alg.p90) {
            let v = sanitize(*v);
            let v = if log_scale { v.log10() } else { v };
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        if log_scale {
            y_min = -1.0;
            y_max = 0.0;
        } else {
            y_min = 0.0;
            y_max = 1.0;
        }
    }
    if y_max - y_min < 1e-12 {
        y_max += 1.0;
    }
    let pad = 0.04 * (y_max - y_min);
    let axes = Axes {
        y_min: y_min - pad,
        y_max: y_max + pad,
        iters: summary.iters,
        log_scale,
    };

    let mut out = String::new();
    out.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    out.push('\n');
    out.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    ));
    out.push('\n');

    // Bands first so the mean lines draw on top of them.
    for (idx, alg) in algorithms.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for (n, v) in alg.p90.iter().enumerate() {
            points.push_str(&format!("{:.2},{:.2} ", axes.x(n), axes.y(sanitize(*v))));
        }
        for (n, v) in alg.p10.iter().enumerate().rev() {
            points.push_str(&format!("{:.2},{:.2} ", axes.x(n), axes.y(sanitize(*v))));
        }
        out.push_str(&format!(
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            points.trim_end()
        ));
        out.push('\n');
    }
    for (idx, alg) in algorithms.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for (n, v) in alg.mean.iter().enumerate() {
            points.push_str(&format!("{:.2},{:.2} ", axes.x(n), axes.y(sanitize(*v))));
        }
        out.push_str(&format!(
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            points.trim_end()
        ));
        out.push('\n');
    }

    // Frame and axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="rgb(51,51,51)" stroke-width="1"/>"#
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="rgb(51,51,51)" stroke-width="1"/>"#
    ));
    out.push('\n');

    // X ticks at nice integer steps.
    let x_step = nice_step(summary.iters.max(1) as f64 / 6.0);
    let mut tick = 0.0;
    while tick <= summary.iters as f64 + 1e-9 {
        let n = tick as usize;
        let px = axes.x(n);
        out.push_str(&format!(
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="rgb(51,51,51)" stroke-width="1"/>"#,
            y0 + 5.0
        ));
        out.push('\n');
        out.push_str(&format!(
            r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle" font-family="sans-serif">{n}</text>"#,
            y0 + 20.0
        ));
        out.push('\n');
        tick += x_step;
    }
    out.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle" font-family="sans-serif">iteration</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    ));
    out.push('\n');

    // Y ticks: decades under log scale, even spacing otherwise.
    if log_scale {
        let lo = axes.y_min.ceil() as i64;
        let hi = axes.y_max.floor() as i64;
        let count = (hi - lo).max(0) + 1;
        let stride = ((count as f64 / 8.0).ceil() as i64).max(1);
        let mut exp = lo;
        while exp <= hi {
            let v = 10f64.powi(exp as i32);
            let py = axes.y(v);
            out.push_str(&format!(
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="rgb(51,51,51)" stroke-width="1"/>"#,
                x0 - 5.0
            ));
            out.push('\n');
            out.push_str(&format!(
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end" font-family="sans-serif">1e{exp}</text>"#,
                x0 - 8.0,
                py + 4.0
            ));
            out.push('\n');
            exp += stride;
        }
    } else {
        for k in 0..=5 {
            let v = axes.y_min + (axes.y_max - axes.y_min) * k as f64 / 5.0;
            let py = axes.y(v);
            out.push_str(&format!(
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="rgb(51,51,51)" stroke-width="1"/>"#,
                x0 - 5.0
            ));
            out.push('\n');
            out.push_str(&format!(
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end" font-family="sans-serif">{v:.3}</text>"#,
                x0 - 8.0,
                py + 4.0
            ));
            out.push('\n');
        }
    }
    out.push_str(&format!(
        r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 18 {:.2})">mean error of approximation</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));
    out.push('\n');

    // Legend.
    for (idx, alg) in algorithms.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 * idx as f64 + 8.0;
        let lx = x1 - 150.0;
        out.push_str(&format!(
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 26.0
        ));
        out.push('\n');
        out.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            escape(&alg.name)
        ));
        out.push('\n');
    }

    if log_scale && clamped {
        out.push_str(&format!(
            r#"<text x="{x0}" y="{:.2}" font-size="11" fill="rgb(85,85,85)" font-family="sans-serif">nonpositive values clamped to {clamp_floor:.3e} for the log scale</text>"#,
            HEIGHT - 2.0
        ));
        out.push('\n');
    }

    out.push_str("</svg>\n");
    out
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    (step * mag).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ReductionRate;

    fn sample_summary() -> StatsSummary {
        let iters: usize = 50;
        let mk = |name: &str, rate: f64| AlgorithmStats {
            name: name.to_string(),
            mean: (0..=iters).map(|n| rate.powi(n as i32)).collect(),
            p10: (0..=iters).map(|n| 0.5 * rate.powi(n as i32)).collect(),
            p90: (0..=iters).map(|n| 1.5 * rate.powi(n as i32)).collect(),
            reduction_rate: ReductionRate {
                rate,
                window: (1, 15),
                degenerate: false,
            },
        };
        StatsSummary {
            iters,
            algorithms: vec![mk("classical", 0.64), mk("greedy", 0.47)],
            redraws: 0,
        }
    }

    #[test]
    fn renders_lines_and_bands() {
        let svg = svg_string(&sample_summary(), false);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains("iteration"));
        roxmltree::Document::parse(&svg).expect("well-formed XML");
    }

    #[test]
    fn empty_summary_still_valid() {
        let summary = StatsSummary {
            iters: 0,
            algorithms: vec![],
            redraws: 0,
        };
        for log in [false, true] {
            let svg = svg_string(&summary, log);
            assert_eq!(svg.matches("<polyline").count(), 0);
            roxmltree::Document::parse(&svg).expect("well-formed XML");
        }
    }

    #[test]
    fn log_scale_clamps_nonpositive_with_footnote() {
        let mut summary = sample_summary();
        summary.algorithms[0].p10[3] = 0.0;
        let svg = svg_string(&summary, true);
        assert!(svg.contains("clamped"));
        roxmltree::Document::parse(&svg).expect("well-formed XML");

        let clean = svg_string(&sample_summary(), true);
        assert!(!clean.contains("clamped"));
    }

    #[test]
    fn file_write_matches_string() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let summary = sample_summary();
        write_svg(&summary, &path, true).unwrap();
        let disk = std::fs::read_to_string(&path).unwrap();
        assert_eq!(disk, svg_string(&summary, true));
    }
}
