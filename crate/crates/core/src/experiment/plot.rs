//! Plot emission: per-iteration series and sweep scaling as plot-ready CSV
//! plus a standalone SVG line chart. The SVG is self-contained (no external
//! resources) and deterministic for a fixed input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::sweep::{least_squares_slope, parse_sweep_csv};
use crate::experiment::trace_io;

/// Emits plot files next to the data they were derived from.
///
/// * run directory (`trace.csv`) → `plot.csv` + `plot.svg` with the gradient
///   norms and oracle-gap series on a log scale;
/// * sweep directory (`sweep.csv`) → `sweep_plot.csv` + `sweep_plot.svg`,
///   log-log first-hit scaling with the fitted line annotated.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let trace_path = dir.join("trace.csv");
    if trace_path.exists() {
        return emit_run_plots(dir, &trace_path);
    }
    let sweep_path = dir.join("sweep.csv");
    if sweep_path.exists() {
        return emit_sweep_plots(dir, &sweep_path);
    }
    Err(Error::InvalidConfig(format!(
        "{}: neither trace.csv nor sweep.csv found",
        dir.display()
    )))
}

fn emit_run_plots(dir: &Path, trace_path: &Path) -> Result<Vec<PathBuf>> {
    let trace = trace_io::read_trace(trace_path)?;

    let mut csv = String::from("t,grad_theta_norm,grad_alpha_norm,g_gap,danskin_gap\n");
    for row in &trace.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            row.t,
            row.grad_theta_norm,
            row.grad_alpha_norm.map(|v| v.to_string()).unwrap_or_default(),
            row.g_gap.map(|v| v.to_string()).unwrap_or_default(),
            row.danskin_gap.map(|v| v.to_string()).unwrap_or_default(),
        );
    }
    let csv_path = dir.join("plot.csv");
    fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;

    let mut chart = Chart::new("iterate stationarity", "outer iteration t", "value (log scale)");
    chart.log_y = true;
    type Extract = Box<dyn Fn(&trace_io::CsvRow) -> Option<f64>>;
    let series: [(&str, &str, Extract); 4] = [
        ("grad_theta_norm", "#1f77b4", Box::new(|r| Some(r.grad_theta_norm))),
        ("grad_alpha_norm", "#d62728", Box::new(|r| r.grad_alpha_norm)),
        ("g_gap", "#2ca02c", Box::new(|r| r.g_gap)),
        ("danskin_gap", "#9467bd", Box::new(|r| r.danskin_gap)),
    ];
    for (name, color, extract) in &series {
        let points: Vec<(f64, f64)> = trace
            .rows
            .iter()
            .filter_map(|r| extract(r).map(|v| (r.t as f64, v)))
            .filter(|&(_, v)| v > 0.0)
            .collect();
        if !points.is_empty() {
            chart.series.push(Series {
                name: (*name).to_string(),
                color,
                points,
            });
        }
    }
    let svg_path = dir.join("plot.svg");
    fs::write(&svg_path, chart.render()).map_err(|e| Error::io(&svg_path, e))?;
    Ok(vec![csv_path, svg_path])
}

fn emit_sweep_plots(dir: &Path, sweep_path: &Path) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(sweep_path).map_err(|e| Error::io(sweep_path, e))?;
    let rows = parse_sweep_csv(&text, &sweep_path.display().to_string())?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|&(eps, hit)| hit.filter(|&h| h >= 1).map(|h| (eps, h)))
        .map(|(eps, h)| ((1.0 / eps).log10(), (h as f64).log10()))
        .collect();
    if points.is_empty() {
        return Err(Error::Parse {
            file: sweep_path.display().to_string(),
            line: 1,
            message: "no converged rows to plot".into(),
        });
    }

    let mut csv = String::from("epsilon,first_hit_outer_iters,log10_inv_epsilon,log10_first_hit\n");
    for &(eps, hit) in &rows {
        if let Some(h) = hit.filter(|&h| h >= 1) {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                eps,
                h,
                (1.0 / eps).log10(),
                (h as f64).log10()
            );
        }
    }
    let csv_path = dir.join("sweep_plot.csv");
    fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;

    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let slope = least_squares_slope(&xs, &ys);

    let mut chart = Chart::new(
        "first-hit scaling",
        "log10(1/epsilon)",
        "log10(first-hit outer iterations)",
    );
    chart.markers = points.clone();
    if let Some(m) = slope {
        let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
        let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
        let (x0, x1) = (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        chart.line = Some((x0, mean_y + m * (x0 - mean_x), x1, mean_y + m * (x1 - mean_x)));
        chart.annotation = Some(format!("fitted slope = {m:.4}"));
    }
    let svg_path = dir.join("sweep_plot.svg");
    fs::write(&svg_path, chart.render()).map_err(|e| Error::io(&svg_path, e))?;
    Ok(vec![csv_path, svg_path])
}

struct Series {
    name: String,
    color: &'static str,
    points: Vec<(f64, f64)>,
}

struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    log_y: bool,
    series: Vec<Series>,
    markers: Vec<(f64, f64)>,
    line: Option<(f64, f64, f64, f64)>,
    annotation: Option<String>,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 58.0;

impl Chart {
    fn new(title: &str, x_label: &str, y_label: &str) -> Chart {
        Chart {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_y: false,
            series: Vec::new(),
            markers: Vec::new(),
            line: None,
            annotation: None,
        }
    }

    fn data_points(&self) -> Vec<(f64, f64)> {
        let mut all: Vec<(f64, f64)> = Vec::new();
        for s in &self.series {
            all.extend(&s.points);
        }
        all.extend(&self.markers);
        if let Some((x0, y0, x1, y1)) = self.line {
            all.push((x0, y0));
            all.push((x1, y1));
        }
        if self.log_y {
            all.iter().map(|&(x, y)| (x, y.log10())).collect()
        } else {
            all
        }
    }

    fn render(&self) -> String {
        let transformed = self.data_points();
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &transformed {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !x_min.is_finite() {
            x_min = 0.0;
            x_max = 1.0;
            y_min = 0.0;
            y_max = 1.0;
        }
        if x_max - x_min < 1e-12 {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_max - y_min < 1e-12 {
            y_min -= 0.5;
            y_max += 0.5;
        }
        let pad_x = 0.04 * (x_max - x_min);
        let pad_y = 0.06 * (y_max - y_min);
        let (x_min, x_max) = (x_min - pad_x, x_max + pad_x);
        let (y_min, y_max) = (y_min - pad_y, y_max + pad_y);

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = move |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let py = move |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
        let ty = |y: f64| if self.log_y { y.log10() } else { y };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );

        // axes
        let _ = writeln!(
            svg,
            "  <line x1=\"{MARGIN_LEFT:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\"/>",
            MARGIN_TOP + plot_h,
            MARGIN_LEFT + plot_w,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{MARGIN_LEFT:.2}\" y1=\"{MARGIN_TOP:.2}\" x2=\"{MARGIN_LEFT:.2}\" y2=\"{:.2}\" stroke=\"#000000\"/>",
            MARGIN_TOP + plot_h
        );

        for tick in ticks(x_min, x_max) {
            let x = px(tick);
            let _ = writeln!(
                svg,
                "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#cccccc\"/>",
                MARGIN_TOP,
                MARGIN_TOP + plot_h
            );
            let _ = writeln!(
                svg,
                "  <text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                MARGIN_TOP + plot_h + 16.0,
                tick_label(tick)
            );
        }
        for tick in ticks(y_min, y_max) {
            let y = py(tick);
            let _ = writeln!(
                svg,
                "  <line x1=\"{MARGIN_LEFT:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#cccccc\"/>",
                MARGIN_LEFT + plot_w
            );
            let label = if self.log_y {
                format!("1e{}", tick_label(tick))
            } else {
                tick_label(tick)
            };
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{label}</text>",
                MARGIN_LEFT - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"18\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let mut points = String::new();
            for &(x, y) in &s.points {
                let _ = write!(points, "{:.2},{:.2} ", px(x), py(ty(y)));
            }
            let _ = writeln!(
                svg,
                "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
                s.color,
                points.trim_end()
            );
            let ly = MARGIN_TOP + 14.0 + 16.0 * i as f64;
            let lx = MARGIN_LEFT + plot_w - 180.0;
            let _ = writeln!(
                svg,
                "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
                lx + 18.0,
                s.color
            );
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{}</text>",
                lx + 24.0,
                ly + 4.0,
                escape(&s.name)
            );
        }

        if let Some((x0, y0, x1, y1)) = self.line {
            let _ = writeln!(
                svg,
                "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>",
                px(x0),
                py(y0),
                px(x1),
                py(y1)
            );
        }
        for &(x, y) in &self.markers {
            let _ = writeln!(
                svg,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1f77b4\"/>",
                px(x),
                py(y)
            );
        }
        if let Some(text) = &self.annotation {
            let _ = writeln!(
                svg,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"13\">{}</text>",
                MARGIN_LEFT + 12.0,
                MARGIN_TOP + 18.0,
                escape(text)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let rounded = (v * 1e6).round() / 1e6;
    format!("{rounded}")
}

/// At most ~7 round-valued ticks covering `[min, max]`.
fn ticks(min: f64, max: f64) -> Vec<f64> {
    let range = max - min;
    let raw_step = range / 5.0;
    let mag = 10.0_f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| range / s <= 7.0)
        .unwrap_or(mag * 10.0);
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-12 * range.abs() {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}
