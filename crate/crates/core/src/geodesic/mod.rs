//! Geodesics from the origin to light vertices.
//!
//! For `β >= β^c_0` a geodesic runs along light diagonals and horizontal
//! square sides. For `√(3/2) <= β < β^c_0` it also uses S₃-paths, the Snell
//! paths from `(2m + k, k)` to `(2m + k + 3, k + 1)`. Below `√(3/2)` no
//! closed form is known and [`oracle`] supplies numeric distances.

pub mod oracle;

use serde::Serialize;
use std::fmt::Write as _;
use std::f64::consts::SQRT_2;

use crate::error::{domain, Error, Result};
use crate::format::{num, round_sig, Viewport};
use crate::normlen::{self, beta_c0, norm_len, SQRT_3_2};
use crate::roots::bisect_decreasing;
use crate::snell::{self, Medium, StripSpec};
use crate::Point;

pub use oracle::{oracle_distance, oracle_geodesic, oracle_path, OracleOptions, OraclePath, Window};

/// Integer point `(2n + j, j)` on the light diagonal `y = x − 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LightVertex {
    pub n: u32,
    pub j: u32,
}

impl LightVertex {
    pub fn new(n: u32, j: u32) -> Self {
        LightVertex { n, j }
    }

    pub fn x(&self) -> f64 {
        2.0 * f64::from(self.n) + f64::from(self.j)
    }

    pub fn y(&self) -> f64 {
        f64::from(self.j)
    }

    pub fn point(&self) -> Point {
        [self.x(), self.y()]
    }
}

/// How a geodesic was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicRegime {
    /// Light diagonals and horizontal sides only (`β >= β^c_0`).
    Octagon,
    /// S₃-paths, light diagonals and horizontal sides (`√(3/2) <= β < β^c_0`).
    S3,
    /// Shortest path in the discretized graph.
    Oracle,
}

/// A geodesic polyline with its optical length.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicResult {
    pub breakpoints: Vec<Point>,
    pub optical_length: f64,
    pub regime: GeodesicRegime,
    /// Discretization error estimate, only for oracle results.
    pub error_bar: Option<f64>,
}

#[derive(Serialize)]
struct GeodesicJson {
    regime: GeodesicRegime,
    length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_bar: Option<f64>,
    breakpoints: Vec<[f64; 2]>,
}

impl GeodesicResult {
    pub fn euclidean_length(&self) -> f64 {
        polyline_length(&self.breakpoints)
    }

    /// `{"regime": …, "length": …, "breakpoints": [[x, y], …]}` with 12 significant digits.
    pub fn to_json(&self) -> String {
        let doc = GeodesicJson {
            regime: self.regime,
            length: round_sig(self.optical_length),
            error_bar: self.error_bar.map(round_sig),
            breakpoints: self
                .breakpoints
                .iter()
                .map(|p| [round_sig(p[0]), round_sig(p[1])])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

impl GeodesicResult {
    /// Polyline drawn over the dark squares of its bounding box.
    pub fn to_svg(&self) -> String {
        let (mut x1, mut y1) = (1.0_f64, 1.0_f64);
        let (mut x0, mut y0) = (0.0_f64, 0.0_f64);
        for p in &self.breakpoints {
            x0 = x0.min(p[0].floor());
            y0 = y0.min(p[1].floor());
            x1 = x1.max(p[0].ceil());
            y1 = y1.max(p[1].ceil());
        }
        let cell = (640.0 / (x1 - x0)).min(480.0 / (y1 - y0)).min(80.0);
        let vp = Viewport {
            width: cell * (x1 - x0),
            height: cell * (y1 - y0),
            x_min: x0,
            x_max: x1,
            y_min: y0,
            y_max: y1,
        };
        let mut svg = vp.header();
        for cy in y0 as i64..y1 as i64 {
            for cx in x0 as i64..x1 as i64 {
                if (cx + cy).rem_euclid(2) == 1 {
                    let [px, py] = vp.map([cx as f64, cy as f64 + 1.0]);
                    let _ = writeln!(
                        svg,
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#b0b0b0\"/>",
                        num(px),
                        num(py),
                        num(cell),
                        num(cell)
                    );
                }
            }
        }
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>",
            vp.path_data(&self.breakpoints, false)
        );
        svg.push_str("</svg>\n");
        svg
    }
}

pub(crate) fn polyline_length(points: &[Point]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum()
}

/// Snell path from `(2m + k, k)` to `(2m + k + 3, k + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct S3Path {
    pub anchor: LightVertex,
    /// Incidence sine, root of `2σ/√(1−σ²) + σ/√(β²−σ²) = 1`.
    pub sigma3: f64,
    /// Normalized length `λ₃ = l(2, β)`.
    pub lambda3: f64,
    /// Optical length `Λ₃ = λ₃ + 2 + √2`.
    pub length: f64,
    pub polyline: Vec<Point>,
}

/// Builds the S₃-path anchored at the light vertex `anchor = (2m + k, k)`.
pub fn s3_path(beta: f64, anchor: LightVertex) -> Result<S3Path> {
    if !(beta.is_finite() && beta > 1.0) {
        return Err(domain(format!("S3-path needs beta > 1, got {beta}")));
    }
    let spec = StripSpec::new(2.0, 1.0, 1.0, beta)?;
    let sol = snell::solve(&spec)?;
    let poly = snell::snell_polyline(anchor.point(), &spec, Medium::Light)?;
    Ok(S3Path {
        anchor,
        sigma3: sol.sigma,
        lambda3: sol.length - 2.0 - SQRT_2,
        length: sol.length,
        polyline: poly.points,
    })
}

/// `Λ₃(β)`, the optical length of an S₃-path.
pub fn s3_length(beta: f64) -> Result<f64> {
    Ok(norm_len(2.0, beta)? + 2.0 + SQRT_2)
}

/// `x + (√2 − 1)y`.
pub fn octagon_length(x: f64, y: f64) -> f64 {
    x + (SQRT_2 - 1.0) * y
}

/// Length of a geodesic to `(x, y)`, `0 <= y <= x`, in the S₃ regime.
pub fn s3_regime_length(x: f64, y: f64, big_lambda3: f64) -> f64 {
    if 3.0 * y <= x {
        x + (big_lambda3 - 3.0) * y
    } else {
        0.5 * (big_lambda3 - SQRT_2) * x + 0.5 * (3.0 * SQRT_2 - big_lambda3) * y
    }
}

/// Counts of S₃-paths, light-square diagonals and unit horizontal sides in
/// the S₃-regime geodesic to `(2n + j, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct S3Decomposition {
    pub s3: u32,
    pub diagonals: u32,
    pub horizontals: u32,
}

impl S3Decomposition {
    pub fn for_vertex(v: LightVertex) -> Self {
        // x = 2n + j, y = j: y <= x/3 iff j <= n.
        if v.j <= v.n {
            S3Decomposition {
                s3: v.j,
                diagonals: 0,
                horizontals: 2 * v.n - 2 * v.j,
            }
        } else {
            S3Decomposition {
                s3: v.n,
                diagonals: v.j - v.n,
                horizontals: 0,
            }
        }
    }
}

/// Explicit geodesic from the origin to the light vertex `(2n + j, j)`, for `β >= √(3/2)`.
///
/// Pieces are emitted S₃-paths first, then diagonals, then horizontal sides.
/// At `β = β^c_0` the octagon construction is returned; the S₃ one has the
/// same length there.
pub fn geodesic_to_light_vertex(n: u32, j: u32, beta: f64) -> Result<GeodesicResult> {
    if !beta.is_finite() || beta < SQRT_3_2 {
        return Err(Error::UnsupportedRegime {
            beta,
            hint: "explicit geodesics need beta >= sqrt(3/2); use the oracle",
        });
    }
    let target = LightVertex::new(n, j);
    let (x, y) = (target.x(), target.y());
    let mut points = vec![[0.0, 0.0]];
    let push = |p: Point, pts: &mut Vec<Point>| {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    };

    if beta >= beta_c0() {
        push([y, y], &mut points);
        push([x, y], &mut points);
        return Ok(GeodesicResult {
            breakpoints: points,
            optical_length: octagon_length(x, y),
            regime: GeodesicRegime::Octagon,
            error_bar: None,
        });
    }

    let parts = S3Decomposition::for_vertex(target);
    let mut anchor = LightVertex::new(0, 0);
    let mut big_lambda3 = s3_length(beta)?;
    for _ in 0..parts.s3 {
        let path = s3_path(beta, anchor)?;
        big_lambda3 = path.length;
        for p in path.polyline.into_iter().skip(1) {
            push(p, &mut points);
        }
        anchor = LightVertex::new(anchor.n + 1, anchor.j + 1);
    }
    let [cx, cy] = anchor.point();
    let d = f64::from(parts.diagonals);
    push([cx + d, cy + d], &mut points);
    push([cx + d + f64::from(parts.horizontals), cy + d], &mut points);
    Ok(GeodesicResult {
        breakpoints: points,
        optical_length: f64::from(parts.s3) * big_lambda3
            + d * SQRT_2
            + f64::from(parts.horizontals),
        regime: GeodesicRegime::S3,
        error_bar: None,
    })
}

/// Number of light diagonals `x − y = 2i` cut transversally inside each
/// open horizontal strip `r < y < r + 1`, indexed by `r` from the lowest
/// strip the polyline touches.
pub fn diagonal_cuts_per_strip(points: &[Point]) -> Vec<usize> {
    if points.len() < 2 {
        return Vec::new();
    }
    let y_lo = points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).floor();
    let y_hi = points.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max).ceil();
    let strips = ((y_hi - y_lo) as usize).max(1);
    let mut cuts = vec![0usize; strips];
    const EPS: f64 = 1e-12;

    let record = |y: f64, cuts: &mut Vec<usize>| {
        if (y - y.round()).abs() > EPS {
            let r = ((y.floor() - y_lo) as usize).min(strips - 1);
            cuts[r] += 1;
        }
    };

    let g = |p: &Point| p[0] - p[1];
    for w in points.windows(2) {
        let (ga, gb) = (g(&w[0]), g(&w[1]));
        if (gb - ga).abs() < EPS {
            continue;
        }
        let (lo, hi) = (ga.min(gb), ga.max(gb));
        let mut c = (lo / 2.0).ceil() * 2.0;
        while c <= hi {
            if c - lo > EPS && hi - c > EPS {
                let s = (c - ga) / (gb - ga);
                record(w[0][1] + s * (w[1][1] - w[0][1]), &mut cuts);
            }
            c += 2.0;
        }
    }
    // Crossings that land exactly on an interior breakpoint.
    for w in points.windows(3) {
        let (ga, gm, gb) = (g(&w[0]), g(&w[1]), g(&w[2]));
        let c = (gm / 2.0).round() * 2.0;
        if (gm - c).abs() < EPS && (ga - c) * (gb - c) < 0.0 {
            record(w[1][1], &mut cuts);
        }
    }
    cuts
}

fn check_sub_regime(beta: f64) -> Result<()> {
    if beta > 1.0 && beta < SQRT_3_2 {
        Ok(())
    } else {
        Err(domain(format!(
            "counterexample needs 1 < beta < sqrt(3/2), got {beta}"
        )))
    }
}

/// Normalized length `l(t, β) + l(2 − t, β)` of the path through `(1 + t, 1)`
/// from the origin to `(4, 2)`; at `t = 0` it is `λ₃`.
pub fn counterexample_curve(beta: f64, t: f64) -> Result<f64> {
    check_sub_regime(beta)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("counterexample parameter t = {t} outside [0, 1]")));
    }
    Ok(norm_len(t, beta)? + norm_len(2.0 - t, beta)?)
}

/// Optical length of the same curve, `counterexample_curve + 2 + 2√2`.
pub fn counterexample_optical_length(beta: f64, t: f64) -> Result<f64> {
    Ok(counterexample_curve(beta, t)? + 2.0 + 2.0 * SQRT_2)
}

/// Right derivative at `t = 0`: `√(β² − 1/2) − √(1 − σ₃²)`.
pub fn counterexample_right_derivative(beta: f64) -> Result<f64> {
    check_sub_regime(beta)?;
    let right = normlen::norm_len_one_sided_deriv(0.0, beta, normlen::Side::Right)?;
    let left = normlen::norm_len_one_sided_deriv(2.0, beta, normlen::Side::Left)?;
    Ok(right - left)
}

/// `ψ(β) = 2√((3 − 2β²)/(2β² − 1)) + √((3 − 2β²)/(4β² − 3)) − 1`.
pub fn psi(beta: f64) -> f64 {
    let b2 = beta * beta;
    let num = (3.0 - 2.0 * b2).max(0.0);
    2.0 * (num / (2.0 * b2 - 1.0)).sqrt() + (num / (4.0 * b2 - 3.0)).sqrt() - 1.0
}

/// `β̃`, the zero of [`psi`] in `(1, √(3/2))`. Below it the S₃-regime
/// geodesic to `(4, 2)` stops being minimal.
pub fn tilde_beta() -> f64 {
    bisect_decreasing(psi, 1.0, SQRT_3_2)
}
