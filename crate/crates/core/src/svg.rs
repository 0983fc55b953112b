//! Minimal self-contained SVG charts. Output depends only on the input data:
//! every coordinate is printed with a fixed number of decimals.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only, no connecting line.
    pub scatter: bool,
}

impl Series {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points, scatter: false }
    }

    pub fn scatter(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points, scatter: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Chart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            series: Vec::new(),
        }
    }

    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn tx(&self, x: f64) -> f64 {
        if self.log_x {
            x.max(f64::MIN_POSITIVE).log10()
        } else {
            x
        }
    }

    pub fn render(&self) -> String {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = range(pts().map(|p| self.tx(p.0)));
        let (y0, y1) = range(pts().map(|p| p.1));
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (self.tx(x) - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut o = String::new();
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(o, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            fmt(W / 2.0),
            escape(&self.title)
        );
        let _ = writeln!(
            o,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            fmt(LEFT),
            fmt(TOP),
            fmt(pw),
            fmt(ph)
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let xs = LEFT + f * pw;
            let shown = if self.log_x { 10f64.powf(xv) } else { xv };
            let _ = writeln!(
                o,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                fmt(xs),
                fmt(H - BOTTOM + 16.0),
                label(shown)
            );
            let yv = y0 + f * (y1 - y0);
            let ys = TOP + (1.0 - f) * ph;
            let _ = writeln!(
                o,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                fmt(LEFT - 6.0),
                fmt(ys + 4.0),
                label(yv)
            );
        }
        let _ = writeln!(
            o,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            fmt(LEFT + pw / 2.0),
            fmt(H - 10.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            fmt(TOP + ph / 2.0),
            fmt(TOP + ph / 2.0),
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let finite: Vec<(f64, f64)> =
                s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
            if s.scatter {
                for (x, y) in &finite {
                    let _ = writeln!(o, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, fmt(sx(*x)), fmt(sy(*y)));
                }
            } else if !finite.is_empty() {
                let path: Vec<String> =
                    finite.iter().map(|(x, y)| format!("{},{}", fmt(sx(*x)), fmt(sy(*y)))).collect();
                let _ = writeln!(
                    o,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    path.join(" ")
                );
            }
            let ly = TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                o,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#,
                fmt(LEFT + 10.0),
                fmt(ly - 9.0)
            );
            let _ = writeln!(o, r#"<text x="{}" y="{}">{}</text>"#, fmt(LEFT + 26.0), fmt(ly), escape(&s.name));
        }
        o.push_str("</svg>\n");
        o
    }
}

/// Bar heights of a histogram with `bins` equal bins over the data range,
/// returned as a step line.
pub fn histogram(name: &str, data: &[f64], bins: usize) -> Series {
    let bins = bins.max(1);
    let (lo, hi) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return Series::line(name, Vec::new());
    }
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in data {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let mut pts = Vec::with_capacity(2 * bins + 2);
    pts.push((lo, 0.0));
    for (i, &c) in counts.iter().enumerate() {
        let a = lo + i as f64 * width;
        pts.push((a, c as f64));
        pts.push((a + width, c as f64));
    }
    pts.push((lo + bins as f64 * width, 0.0));
    Series::line(name, pts)
}
