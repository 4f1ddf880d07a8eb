//! Locale-independent number formatting and small SVG writers.

use std::fmt::Write as _;

use crate::Point;

/// Significant digits used for every number the crate prints.
pub const DIGITS: i32 = 12;

/// Formats `v` in plain decimal notation with 12 significant digits.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (DIGITS - 1 - magnitude).clamp(0, 40) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        return "0".to_string();
    }
    s
}

/// Rounds `v` to the value [`num`] prints.
pub fn round_sig(v: f64) -> f64 {
    num(v).parse().unwrap_or(v)
}

/// Maps world coordinates into an SVG canvas with the y axis pointing up.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    pub width: f64,
    pub height: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Viewport {
    pub fn map(&self, p: Point) -> Point {
        let sx = self.width / (self.x_max - self.x_min);
        let sy = self.height / (self.y_max - self.y_min);
        [(p[0] - self.x_min) * sx, self.height - (p[1] - self.y_min) * sy]
    }

    pub fn header(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            w = num(self.width),
            h = num(self.height)
        )
    }

    /// `d` attribute of an SVG path through `points`.
    pub fn path_data(&self, points: &[Point], close: bool) -> String {
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let [x, y] = self.map(*p);
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{} {} ", num(x), num(y));
        }
        if close {
            d.push('Z');
        }
        d.trim_end().to_string()
    }

    pub fn axes(&self) -> String {
        let mut out = String::new();
        if self.y_min <= 0.0 && self.y_max >= 0.0 {
            let a = self.map([self.x_min, 0.0]);
            let b = self.map([self.x_max, 0.0]);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"1\"/>",
                num(a[0]),
                num(a[1]),
                num(b[0]),
                num(b[1])
            );
        }
        if self.x_min <= 0.0 && self.x_max >= 0.0 {
            let a = self.map([0.0, self.y_min]);
            let b = self.map([0.0, self.y_max]);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"1\"/>",
                num(a[0]),
                num(a[1]),
                num(b[0]),
                num(b[1])
            );
        }
        out
    }
}

/// Standalone SVG line plot of a sampled series.
pub fn line_plot_svg(series: &[Point], width: f64, height: f64) -> String {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in series {
        x_min = x_min.min(p[0]);
        x_max = x_max.max(p[0]);
        y_min = y_min.min(p[1]);
        y_max = y_max.max(p[1]);
    }
    if x_max.is_nan() || x_max <= x_min {
        x_max = x_min + 1.0;
    }
    if y_max.is_nan() || y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let vp = Viewport {
        width,
        height,
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };
    let mut svg = vp.header();
    svg.push_str(&vp.axes());
    let _ = writeln!(
        svg,
        "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        vp.path_data(series, false)
    );
    svg.push_str("</svg>\n");
    svg
}
