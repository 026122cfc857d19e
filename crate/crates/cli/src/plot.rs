//! Deterministic SVG line plots and heatmaps.
//!
//! Fixed canvas, plain-text labels, and coordinates printed with two
//! decimals, so identical data gives byte-identical files.

use std::fmt::Write as _;

use crate::output::CsvData;
use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const COLORMAP: [(f64, f64, f64); 5] =
    [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    /// One or more line series, or the row axis of a heatmap.
    pub y: Vec<String>,
    /// Heatmap value column.
    pub z: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

impl PlotSpec {
    pub fn lines(x: &str, y: &[&str]) -> Self {
        Self { x: x.into(), y: y.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn heatmap(x: &str, y: &str, z: &str) -> Self {
        Self { x: x.into(), y: vec![y.into()], z: Some(z.into()), ..Default::default() }
    }
}

#[derive(Clone, Copy)]
struct AxisMap {
    lo: f64,
    hi: f64,
    log: bool,
    start: f64,
    end: f64,
}

impl AxisMap {
    fn new(values: impl Iterator<Item = f64>, log: bool, start: f64, end: f64) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Self { lo, hi, log, start, end })
    }

    fn map(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.start + (v - self.lo) / (self.hi - self.lo) * (self.end - self.start))
    }

    /// Tick positions in data units with their labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            return (a..=b).map(|e| (10f64.powi(e), format!("1e{e}"))).collect();
        }
        let step = nice_step((self.hi - self.lo) / 5.0);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| (k as f64 * step, tick_label(k as f64 * step, step))).collect()
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.0 {
        2.0
    } else if f < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e4 || v.abs() < 1e-3 {
        return format!("{v:.2e}");
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let k = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - k as f64;
    let (a, b) = (COLORMAP[k], COLORMAP[k + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn frame(svg: &mut String, xm: &AxisMap, ym: &AxisMap, xlabel: &str, ylabel: &str, title: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(svg, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for (v, label) in xm.ticks() {
        if let Some(px) = xm.map(v) {
            let _ = writeln!(svg, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(svg, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 20.0, escape(&label));
        }
    }
    for (v, label) in ym.ticks() {
        if let Some(py) = ym.map(v) {
            let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, escape(&label));
        }
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0, escape(xlabel));
    let _ = writeln!(
        svg,
        r#"<text x="20.00" y="{:.2}" text-anchor="middle" transform="rotate(-90 20.00 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    let _ = writeln!(svg, r#"<text x="{:.2}" y="25.00" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

/// Renders `spec` over `data`. `provenance` becomes an XML comment.
pub fn render_svg(data: &CsvData, spec: &PlotSpec, provenance: &str) -> Result<String, CliError> {
    if data.rows.is_empty() {
        return Err(CliError::Validation("CSV has no data rows".into()));
    }
    if spec.y.is_empty() {
        return Err(CliError::Validation("plot needs at least one y column".into()));
    }
    let x = data.column(&spec.x)?;
    let ys = spec.y.iter().map(|c| data.column(c)).collect::<Result<Vec<_>, _>>()?;
    let z = spec.z.as_deref().map(|c| data.column(c)).transpose()?;

    let xm = AxisMap::new(x.iter().copied(), spec.log_x, LEFT, WIDTH - RIGHT)
        .ok_or_else(|| CliError::Validation(format!("column `{}` has no plottable values", spec.x)))?;
    let ym = AxisMap::new(ys.iter().flatten().copied(), spec.log_y, HEIGHT - BOTTOM, TOP)
        .ok_or_else(|| CliError::Validation("y columns have no plottable values".into()))?;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, "<!-- {} -->", provenance.replace("--", "- -"));
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let title = spec.title.clone().unwrap_or_else(|| match &spec.z {
        Some(zc) => format!("{zc} over ({}, {})", spec.x, spec.y[0]),
        None => spec.y.join(", "),
    });

    if let Some(z) = z {
        heatmap(&mut svg, &x, &ys[0], &z, &xm, &ym);
        frame(&mut svg, &xm, &ym, &spec.x, &spec.y[0], &title);
    } else {
        for (k, (name, y)) in spec.y.iter().zip(&ys).enumerate() {
            let stroke = PALETTE[k % PALETTE.len()];
            // Non-finite points break the line into segments.
            let mut segment = Vec::new();
            let flush = |svg: &mut String, seg: &mut Vec<String>| {
                if seg.len() > 1 {
                    let _ = writeln!(svg, r#"<polyline fill="none" stroke="{stroke}" stroke-width="1.5" points="{}"/>"#, seg.join(" "));
                }
                seg.clear();
            };
            for (xv, yv) in x.iter().zip(y) {
                match (xm.map(*xv), ym.map(*yv)) {
                    (Some(px), Some(py)) => segment.push(format!("{px:.2},{py:.2}")),
                    _ => flush(&mut svg, &mut segment),
                }
            }
            flush(&mut svg, &mut segment);
            let ly = TOP + 15.0 + 16.0 * k as f64;
            let lx = WIDTH - RIGHT - 150.0;
            let _ = writeln!(svg, r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="2"/>"#, ly - 4.0, lx + 20.0, ly - 4.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 25.0, escape(name));
        }
        let ylabel = if spec.y.len() == 1 { spec.y[0].clone() } else { String::new() };
        frame(&mut svg, &xm, &ym, &spec.x, &ylabel, &title);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn sorted_unique(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    u.dedup();
    u
}

/// Cell edges halfway between neighbouring grid values.
fn edges(values: &[f64], map: &AxisMap) -> Vec<f64> {
    let px: Vec<f64> = values.iter().filter_map(|v| map.map(*v)).collect();
    let n = px.len();
    let mut e = Vec::with_capacity(n + 1);
    if n == 1 {
        return vec![map.start, map.end];
    }
    e.push(px[0] - (px[1] - px[0]) / 2.0);
    for k in 1..n {
        e.push((px[k - 1] + px[k]) / 2.0);
    }
    e.push(px[n - 1] + (px[n - 1] - px[n - 2]) / 2.0);
    e
}

fn heatmap(svg: &mut String, x: &[f64], y: &[f64], z: &[f64], xm: &AxisMap, ym: &AxisMap) {
    let xs = sorted_unique(x);
    let ys = sorted_unique(y);
    let (xe, ye) = (edges(&xs, xm), edges(&ys, ym));
    let (zlo, zhi) = z.iter().filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let span = if zhi > zlo { zhi - zlo } else { 1.0 };
    let clamp = |v: f64| v.clamp(LEFT.min(WIDTH - RIGHT), WIDTH - RIGHT);
    let clamp_y = |v: f64| v.clamp(TOP, HEIGHT - BOTTOM);
    for ((xv, yv), zv) in x.iter().zip(y).zip(z) {
        let (Some(i), Some(j)) = (xs.iter().position(|v| v == xv), ys.iter().position(|v| v == yv)) else {
            continue;
        };
        if i + 1 >= xe.len() || j + 1 >= ye.len() {
            continue;
        }
        let (xa, xb) = (clamp(xe[i].min(xe[i + 1])), clamp(xe[i].max(xe[i + 1])));
        let (ya, yb) = (clamp_y(ye[j].min(ye[j + 1])), clamp_y(ye[j].max(ye[j + 1])));
        let fill = if zv.is_finite() { color((zv - zlo) / span) } else { "#bbbbbb".into() };
        let _ = writeln!(svg, r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{fill}" shape-rendering="crispEdges"/>"#, xb - xa, yb - ya);
    }
    if zlo.is_finite() {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, WIDTH - RIGHT, HEIGHT - 15.0, escape(&format!("z: {zlo:.4e} .. {zhi:.4e}")));
    }
}
