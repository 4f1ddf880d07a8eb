//! The homogenized Finsler metric `Φ_β` and its unit ball.
//!
//! With `M = max(|x|, |y|)` and `m = min(|x|, |y|)`:
//!
//! - `β >= β^c_0`: `Φ = M + (√2 − 1)m`, an octagonal ball;
//! - `√(3/2) <= β < β^c_0`: `Φ = M + (Λ₃ − 3)m` when `3m <= M`, otherwise
//!   `((Λ₃ − √2)M + (3√2 − Λ₃)m)/2`, a ball with sixteen sides;
//! - below `√(3/2)` only the cones `(2k_c + 1)m <= M` are known, where
//!   `Φ = M + (l(2k_c, β) + √2 − 1)m`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::format::{num, Viewport};
use crate::geodesic::oracle::{oracle_path, OracleOptions, Window};
use crate::geodesic::{oracle_distance, s3_length};
use crate::normlen::{beta_c0, k_c, norm_len, SQRT_3_2};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricRegime {
    Octagon,
    S3,
    ConeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinslerMetric {
    pub beta: f64,
    pub regime: MetricRegime,
    /// `Λ₃(β)`; only set in the S₃ regime.
    pub big_lambda3: Option<f64>,
    pub kc: u32,
    /// `l(2k_c(β), β)`.
    pub l_min: f64,
}

fn octant(x: f64, y: f64) -> (f64, f64) {
    let (ax, ay) = (x.abs(), y.abs());
    (ax.max(ay), ax.min(ay))
}

impl FinslerMetric {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 1.0) {
            return Err(domain(format!("metric needs beta > 1, got {beta}")));
        }
        let kc = k_c(beta)?;
        let l_min = norm_len(2.0 * f64::from(kc), beta)?;
        let (regime, big_lambda3) = if beta >= beta_c0() {
            (MetricRegime::Octagon, None)
        } else if beta >= SQRT_3_2 {
            (MetricRegime::S3, Some(s3_length(beta)?))
        } else {
            (MetricRegime::ConeOnly, None)
        };
        Ok(FinslerMetric {
            beta,
            regime,
            big_lambda3,
            kc,
            l_min,
        })
    }

    /// Slope `2k_c + 1` bounding the cones `(2k_c + 1)m <= M`.
    pub fn cone_slope(&self) -> f64 {
        2.0 * f64::from(self.kc) + 1.0
    }

    /// Coefficient `c` in `Φ = M + c·m` on the cones.
    pub fn cone_coefficient(&self) -> f64 {
        self.l_min + SQRT_2 - 1.0
    }

    pub fn in_cone(&self, x: f64, y: f64) -> bool {
        let (big, small) = octant(x, y);
        self.cone_slope() * small <= big * (1.0 + 1e-12)
    }

    pub fn phi(&self, x: f64, y: f64) -> Result<f64> {
        let (big, small) = octant(x, y);
        match self.regime {
            MetricRegime::Octagon => Ok(big + (SQRT_2 - 1.0) * small),
            MetricRegime::S3 => {
                let lam = self.big_lambda3.expect("set in the S3 regime");
                Ok(if 3.0 * small <= big {
                    big + (lam - 3.0) * small
                } else {
                    0.5 * (lam - SQRT_2) * big + 0.5 * (3.0 * SQRT_2 - lam) * small
                })
            }
            MetricRegime::ConeOnly => Err(Error::UnsupportedRegime {
                beta: self.beta,
                hint: "closed form needs beta >= sqrt(3/2); use phi_on_cone or phi_estimate",
            }),
        }
    }

    pub fn phi_on_cone(&self, x: f64, y: f64) -> Result<f64> {
        if !self.in_cone(x, y) {
            return Err(Error::OutOfCoverage { x, y, kc: self.kc });
        }
        let (big, small) = octant(x, y);
        Ok(big + self.cone_coefficient() * small)
    }

    /// `Φ` wherever a closed form is known, `None` otherwise.
    pub fn known(&self, x: f64, y: f64) -> Option<f64> {
        match self.regime {
            MetricRegime::ConeOnly => self.phi_on_cone(x, y).ok(),
            _ => self.phi(x, y).ok(),
        }
    }
}

/// `Φ_β(x, y)` for `β >= √(3/2)`.
pub fn phi(x: f64, y: f64, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta >= SQRT_3_2) {
        return Err(Error::UnsupportedRegime {
            beta,
            hint: "closed form needs beta >= sqrt(3/2); use phi_on_cone or phi_estimate",
        });
    }
    FinslerMetric::new(beta)?.phi(x, y)
}

/// `Φ_β(x, y)` on the cones `(2k_c + 1)m <= M`, any `β > 1`.
pub fn phi_on_cone(x: f64, y: f64, beta: f64) -> Result<f64> {
    FinslerMetric::new(beta)?.phi_on_cone(x, y)
}

/// Whether an estimate can be checked against a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateStatus {
    Verified,
    Conjectural,
}

impl EstimateStatus {
    pub fn label(self) -> &'static str {
        match self {
            EstimateStatus::Verified => "verified",
            EstimateStatus::Conjectural => "conjectural",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub status: EstimateStatus,
    pub closed_form: Option<f64>,
    /// Light vertex `(2n + j, j)` used for the scaled target.
    pub vertex: Point,
}

/// Numeric `Φ_β(x, y)` from oracle distances at scale `s` and refinement `n`.
///
/// The scaled target `s·(M, m)` is reached through the light vertex
/// `(2n + j, j)` with `j = ⌊s·m⌋`, `n = ⌊(s·M − j)/2⌋`, and the total is
/// divided by `s`. The bound adds `β√5/s`, the cost of the rounding step,
/// to the change of the estimate between refinements `n/2` and `n`.
pub fn phi_estimate(x: f64, y: f64, beta: f64, scale: u32, n: u32) -> Result<PhiEstimate> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(domain("phi_estimate needs a finite direction"));
    }
    if scale == 0 {
        return Err(domain("phi_estimate needs scale >= 1"));
    }
    let metric = FinslerMetric::new(beta)?;
    let closed_form = metric.known(x, y);
    let status = if closed_form.is_some() {
        EstimateStatus::Verified
    } else {
        EstimateStatus::Conjectural
    };
    let (big, small) = octant(x, y);
    if big == 0.0 {
        return Ok(PhiEstimate {
            value: 0.0,
            error_bound: 0.0,
            status,
            closed_form,
            vertex: [0.0, 0.0],
        });
    }
    let s = f64::from(scale);
    let target = [s * big, s * small];
    let j = (target[1] + 1e-9).floor();
    let n_diag = ((target[0] - j + 1e-9) / 2.0).floor().max(0.0);
    let vertex = [2.0 * n_diag + j, j];

    let total = |refinement: u32| -> Result<f64> {
        let head = oracle_distance([0.0, 0.0], vertex, beta, refinement)?;
        let tail = if (target[0] - vertex[0]).hypot(target[1] - vertex[1]) < 1e-12 {
            0.0
        } else {
            let opts = OracleOptions::new(refinement).window(Window::Padded(0));
            oracle_path(vertex, target, beta, &opts)?.length
        };
        Ok(head + tail)
    };
    let fine = total(n)?;
    let gap = if n >= 2 { (total(n / 2)? - fine).abs() } else { 0.0 };
    Ok(PhiEstimate {
        value: fine / s,
        error_bound: (beta * 5f64.sqrt() + gap) / s,
        status,
        closed_form,
        vertex,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Full,
    /// Only the boundary inside the cones `(2k_c + 1)m <= M` is known.
    Cones,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    /// Segment of `{Φ = 1}`.
    Flat,
    /// Chord across a region where `Φ` is not known.
    Gap,
}

/// Polygon on `{Φ_β = 1}`, vertices counterclockwise from `(1, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitBall {
    pub beta: f64,
    pub coverage: Coverage,
    pub vertices: Vec<Point>,
    /// `faces[i]` joins `vertices[i]` to `vertices[i + 1]` (cyclically).
    pub faces: Vec<FaceKind>,
    /// Vertex where two known faces meet with distinct normals.
    pub corners: Vec<bool>,
}

fn swap(p: Point) -> Point {
    [p[1], p[0]]
}

fn rotate(p: Point, quarter_turns: usize) -> Point {
    (0..quarter_turns).fold(p, |[x, y], _| [-y, x])
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Unit ball of `Φ_β` for any `β > 1`.
pub fn unit_ball(beta: f64) -> Result<UnitBall> {
    let metric = FinslerMetric::new(beta)?;
    let diagonal = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let (quadrant, kinds, coverage) = match metric.regime {
        MetricRegime::Octagon => (
            vec![[1.0, 0.0], diagonal],
            vec![FaceKind::Flat; 2],
            Coverage::Full,
        ),
        MetricRegime::S3 => {
            let lam = metric.big_lambda3.expect("set in the S3 regime");
            let a = [3.0 / lam, 1.0 / lam];
            (
                vec![[1.0, 0.0], a, diagonal, swap(a)],
                vec![FaceKind::Flat; 4],
                Coverage::Full,
            )
        }
        MetricRegime::ConeOnly => {
            let slope = metric.cone_slope();
            let y = 1.0 / (slope + metric.cone_coefficient());
            let p = [slope * y, y];
            (
                vec![[1.0, 0.0], p, swap(p)],
                vec![FaceKind::Flat, FaceKind::Gap, FaceKind::Flat],
                Coverage::Cones,
            )
        }
    };

    let vertices: Vec<Point> = (0..4)
        .flat_map(|r| quadrant.iter().map(move |&p| rotate(p, r)))
        .collect();
    let faces: Vec<FaceKind> = (0..4).flat_map(|_| kinds.iter().copied()).collect();
    let count = vertices.len();
    let corners = (0..count)
        .map(|i| {
            let before = faces[(i + count - 1) % count];
            let after = faces[i];
            before == FaceKind::Flat
                && after == FaceKind::Flat
                && cross(vertices[(i + count - 1) % count], vertices[i], vertices[(i + 1) % count])
                    > 1e-12
        })
        .collect();
    Ok(UnitBall {
        beta,
        coverage,
        vertices,
        faces,
        corners,
    })
}

impl UnitBall {
    /// Every turn is to the left (or straight).
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            cross(
                self.vertices[i],
                self.vertices[(i + 1) % n],
                self.vertices[(i + 2) % n],
            ) >= -1e-12
        })
    }

    /// Known face of positive length.
    pub fn has_flat_face(&self) -> bool {
        let n = self.vertices.len();
        (0..n).any(|i| {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            self.faces[i] == FaceKind::Flat && (b[0] - a[0]).hypot(b[1] - a[1]) > 1e-12
        })
    }

    pub fn has_corner(&self) -> bool {
        self.corners.iter().any(|&c| c)
    }

    /// Vertices lie between the circles of radius `1/β` and `1`.
    pub fn is_sandwiched(&self) -> bool {
        self.vertices.iter().all(|p| {
            let r = p[0].hypot(p[1]);
            r <= 1.0 + 1e-12 && r >= 1.0 / self.beta - 1e-12
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.vertices {
            let _ = writeln!(out, "{},{}", num(p[0]), num(p[1]));
        }
        out
    }

    /// 512×512 drawing: unit circle, polygon, and the known cones shaded
    /// when coverage is partial. Gap chords are dashed.
    pub fn to_svg(&self) -> String {
        let vp = Viewport {
            width: 512.0,
            height: 512.0,
            x_min: -1.25,
            x_max: 1.25,
            y_min: -1.25,
            y_max: 1.25,
        };
        let mut svg = vp.header();
        svg.push_str(&vp.axes());

        if self.coverage == Coverage::Cones {
            let n = self.vertices.len();
            for i in 0..n {
                if self.faces[i] != FaceKind::Flat {
                    continue;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let reach = |p: Point| [1.25 * p[0] / p[0].hypot(p[1]), 1.25 * p[1] / p[0].hypot(p[1])];
                let _ = writeln!(
                    svg,
                    "<path d=\"{}\" fill=\"#dde8f5\" stroke=\"none\"/>",
                    vp.path_data(&[[0.0, 0.0], reach(a), reach(b)], true)
                );
            }
        }

        let center = vp.map([0.0, 0.0]);
        let radius = vp.width / (vp.x_max - vp.x_min);
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
            num(center[0]),
            num(center[1]),
            num(radius)
        );

        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let style = match self.faces[i] {
                FaceKind::Flat => "stroke=\"black\" stroke-width=\"2\"",
                FaceKind::Gap => "stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"6 4\"",
            };
            let _ = writeln!(
                svg,
                "<path d=\"{}\" fill=\"none\" {style}/>",
                vp.path_data(&[a, b], false)
            );
        }
        for (p, &corner) in self.vertices.iter().zip(&self.corners) {
            let [cx, cy] = vp.map(*p);
            let fill = if corner { "black" } else { "white" };
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{fill}\" stroke=\"black\"/>",
                num(cx),
                num(cy)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        for beta in [SQRT_3_2, 1.23, 1.3, 2.0] {
            assert_eq!(phi(1.0, 0.0, beta).unwrap(), 1.0);
        }
        assert!((phi(1.0, 1.0, 1.5).unwrap() - SQRT_2).abs() < 1e-15);
        let lam = s3_length(1.23).unwrap();
        assert!((phi(3.0, 1.0, 1.23).unwrap() - lam).abs() < 1e-12);
        assert!(matches!(phi(1.0, 0.5, 1.1), Err(Error::UnsupportedRegime { .. })));
    }

    #[test]
    fn branches_meet() {
        let m = FinslerMetric::new(1.23).unwrap();
        let lam = m.big_lambda3.unwrap();
        let a = 3.0 + (lam - 3.0);
        let b = 0.5 * (lam - SQRT_2) * 3.0 + 0.5 * (3.0 * SQRT_2 - lam);
        assert!((a - b).abs() < 1e-12);
        let lam0 = s3_length(beta_c0()).unwrap();
        for (x, y) in [(1.0, 0.2), (1.0, 0.5), (2.0, 1.7)] {
            let s3 = if 3.0 * y <= x {
                x + (lam0 - 3.0) * y
            } else {
                0.5 * (lam0 - SQRT_2) * x + 0.5 * (3.0 * SQRT_2 - lam0) * y
            };
            assert!((s3 - phi(x, y, beta_c0()).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_formula() {
        let c = 3.0 + (norm_len(2.0, 1.1).unwrap() + SQRT_2 - 1.0);
        assert!((phi_on_cone(3.0, 1.0, 1.1).unwrap() - c).abs() < 1e-12);
        assert!(matches!(
            phi_on_cone(1.0, 0.9, 1.1),
            Err(Error::OutOfCoverage { kc: 1, .. })
        ));
        assert!((phi_on_cone(2.0, 1.5, 1.3).unwrap() - phi(2.0, 1.5, 1.3).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn ball_shapes() {
        let oct = unit_ball(1.5).unwrap();
        assert_eq!(oct.vertices.len(), 8);
        assert_eq!(oct.vertices[0], [1.0, 0.0]);
        assert!(oct.corners.iter().all(|&c| c));
        let sixteen = unit_ball(1.23).unwrap();
        assert_eq!(sixteen.vertices.len(), 16);
        let partial = unit_ball(1.1).unwrap();
        assert_eq!(partial.coverage, Coverage::Cones);
        assert_eq!(partial.vertices.len(), 12);
        assert!(partial.corners[0]);
        for ball in [oct, sixteen, partial] {
            assert!(ball.is_convex());
            assert!(ball.is_sandwiched());
            assert!(ball.has_flat_face() && ball.has_corner());
            let metric = FinslerMetric::new(ball.beta).unwrap();
            for p in &ball.vertices {
                assert!((metric.known(p[0], p[1]).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svg_and_csv_shape() {
        let ball = unit_ball(1.5).unwrap();
        let csv = ball.to_csv();
        assert!(csv.starts_with("x,y\n1.00000000000,0\n"));
        assert_eq!(csv.lines().count(), 9);
        let svg = unit_ball(1.1).unwrap().to_svg();
        assert!(svg.contains("width=\"512.000000000\""));
        assert!(svg.contains("stroke-dasharray=\"6 4\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn axis_estimate_is_exact() {
        for s in [1, 3, 8] {
            let e = phi_estimate(1.0, 0.0, 1.3, s, 4).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12);
        }
    }
}
