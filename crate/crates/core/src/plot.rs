//! Self-contained SVG line charts of fidelity traces.

use std::fmt::Write as _;

use crate::engine::FidelityTrace;
use crate::error::{Error, Result};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

#[derive(Clone, Debug)]
pub struct PlotStyle {
    pub width: f64,
    pub height: f64,
    pub title: Option<String>,
    pub x_label: String,
    pub y_label: String,
    /// Shade `mean ± σ` for traces with more than one realization.
    pub sigma_band: bool,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            width: 720.0,
            height: 440.0,
            title: None,
            x_label: "J·T".into(),
            y_label: "F_e".into(),
            sigma_band: true,
        }
    }
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `traces` as one SVG document.
pub fn render_svg(traces: &[FidelityTrace], style: &PlotStyle) -> Result<String> {
    if traces.is_empty() || traces.iter().all(|t| t.is_empty()) {
        return Err(Error::Parameter("nothing to plot: no trace data".into()));
    }
    let band = |t: &FidelityTrace| style.sigma_band && t.n_realizations > 1;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for t in traces {
        for i in 0..t.len() {
            let s = if band(t) { t.stddev[i] } else { 0.0 };
            x0 = x0.min(t.sample_times[i]);
            x1 = x1.max(t.sample_times[i]);
            y0 = y0.min(t.mean[i] - s);
            y1 = y1.max(t.mean[i] + s);
        }
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.05;
        y1 += 0.05;
    }
    let pad = 0.04 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let (ml, mr, mt, mb) = (70.0, 160.0, if style.title.is_some() { 40.0 } else { 20.0 }, 50.0);
    let pw = style.width - ml - mr;
    let ph = style.height - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(title) = &style.title {
        let _ = writeln!(w, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, ml + pw / 2.0, escape(title));
    }
    // axes and grid
    let _ = writeln!(w, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(w, r##"<line x1="{x:.2}" y1="{mt}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, mt + ph);
        let _ = writeln!(w, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, mt + ph + 16.0, fmt_tick(t));
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(w, r##"<line x1="{ml}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, ml + pw);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, ml - 6.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, ml + pw / 2.0, style.height - 12.0, escape(&style.x_label));
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(&style.y_label)
    );

    for (k, t) in traces.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if band(t) {
            let mut pts: Vec<String> =
                (0..t.len()).map(|i| format!("{:.2},{:.2}", sx(t.sample_times[i]), sy(t.mean[i] + t.stddev[i]))).collect();
            pts.extend((0..t.len()).rev().map(|i| format!("{:.2},{:.2}", sx(t.sample_times[i]), sy(t.mean[i] - t.stddev[i]))));
            let _ = writeln!(w, r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, pts.join(" "));
        }
        let pts: Vec<String> = (0..t.len()).map(|i| format!("{:.2},{:.2}", sx(t.sample_times[i]), sy(t.mean[i]))).collect();
        let _ = writeln!(w, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#, pts.join(" "));
        let ly = mt + 14.0 + 18.0 * k as f64;
        let lx = ml + pw + 12.0;
        let _ = writeln!(w, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 22.0);
        let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&t.name));
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(name: &str, rows: Vec<Vec<f64>>) -> FidelityTrace {
        let n = rows[0].len();
        FidelityTrace::from_realizations(name, (0..n).map(|i| i as f64).collect(), rows, 0)
    }

    #[test]
    fn constant_trace_is_horizontal() {
        let svg = render_svg(&[trace("one", vec![vec![1.0; 4]])], &PlotStyle::default()).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split('"').nth(1).unwrap();
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
        assert!(!svg.contains("class=\"band\""));
    }

    #[test]
    fn bands_and_legend() {
        let a = trace("PDD", vec![vec![1.0, 0.9, 0.8]]);
        let b = trace("RPD", vec![vec![1.0, 0.95, 0.9], vec![1.0, 0.9, 0.85]]);
        let svg = render_svg(&[a, b], &PlotStyle::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("class=\"band\"").count(), 1);
        assert!(svg.contains(">PDD<") && svg.contains(">RPD<"));
    }

    #[test]
    fn empty_rejected() {
        assert!(render_svg(&[], &PlotStyle::default()).is_err());
    }

    #[test]
    fn tick_values_are_round() {
        assert_eq!(ticks(0.0, 40.0), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
    }
}
