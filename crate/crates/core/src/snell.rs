//! Snell paths through alternating vertical strips of index 1 and `beta`.
//!
//! A path crossing light thickness `p`, dark thickness `q` and rising by `h`
//! is fixed by the sine `sigma` of its angle of incidence on the light side:
//!
//! ```text
//! p·σ/√(1−σ²) + q·σ/√(β²−σ²) = h
//! ```
//!
//! and its optical length is `p/√(1−σ²) + β²q/√(β²−σ²)`.

use crate::error::{domain, Result};
use crate::roots::bisect_increasing;
use crate::Point;

/// Upper end of the bisection bracket sits this far below the pole.
const POLE_GAP: f64 = 1e-14;

/// Bound on the constraint residual accepted from [`solve_sigma`].
pub const TOL_SIGMA: f64 = 1e-12;

/// Agreement required between a reconstructed polyline and [`snell_length`].
pub const TOL_LEN: f64 = 1e-9;

/// One Snell-path instance in a layered medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSpec {
    /// Light thickness crossed.
    pub p: f64,
    /// Dark thickness crossed.
    pub q: f64,
    /// Height gained, in `(0, 1]`.
    pub h: f64,
    /// Refractive index of the dark material.
    pub beta: f64,
}

impl StripSpec {
    /// Builds a spec, rejecting thicknesses, heights or indices outside the domain.
    ///
    /// `beta = 1` is accepted: the uniform medium is the reference case
    /// for the closed forms used by the increment `δ(k, 1)`.
    pub fn new(p: f64, q: f64, h: f64, beta: f64) -> Result<Self> {
        let spec = StripSpec { p, q, h, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let StripSpec { p, q, h, beta } = *self;
        if !(p.is_finite() && q.is_finite() && h.is_finite() && beta.is_finite()) {
            return Err(domain("strip parameters must be finite"));
        }
        if p < 0.0 || q < 0.0 {
            return Err(domain(format!("negative thickness (p = {p}, q = {q})")));
        }
        if p + q <= 0.0 {
            return Err(domain("total thickness p + q must be positive"));
        }
        if !(h > 0.0 && h <= 1.0) {
            return Err(domain(format!("height h = {h} outside (0, 1]")));
        }
        if beta < 1.0 {
            return Err(domain(format!("refractive index beta = {beta} below 1")));
        }
        Ok(())
    }

    /// Euclidean length of the chord joining the endpoints.
    pub fn chord(&self) -> f64 {
        (self.p + self.q).hypot(self.h)
    }

    /// `p·σ/√(1−σ²) + q·σ/√(β²−σ²) − h`, strictly increasing in `σ`.
    pub fn residual(&self, sigma: f64) -> f64 {
        let mut rise = 0.0;
        if self.p > 0.0 {
            rise += self.p * sigma / light_cos(sigma);
        }
        if self.q > 0.0 {
            rise += self.q * sigma / dark_cos(sigma, self.beta);
        }
        rise - self.h
    }
}

/// Solved Snell path: incidence sine and optical length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnellSolution {
    pub sigma: f64,
    pub length: f64,
}

/// `√(1−σ²)`, factored to keep precision near `σ = 1`.
pub(crate) fn light_cos(sigma: f64) -> f64 {
    ((1.0 - sigma) * (1.0 + sigma)).sqrt()
}

/// `√(β²−σ²)`.
pub(crate) fn dark_cos(sigma: f64, beta: f64) -> f64 {
    ((beta - sigma) * (beta + sigma)).sqrt()
}

/// Sine of the light-side incidence angle of the Snell path.
pub fn solve_sigma(spec: &StripSpec) -> Result<f64> {
    spec.validate()?;
    let StripSpec { p, q, h, beta } = *spec;
    // Single-medium paths are straight lines.
    if q == 0.0 {
        return Ok(h / p.hypot(h));
    }
    if p == 0.0 {
        return Ok(beta * h / q.hypot(h));
    }
    let hi = 1.0 - POLE_GAP;
    if spec.residual(hi) < 0.0 {
        return Err(domain(format!(
            "no Snell angle below the pole for p = {p}, q = {q}, h = {h}"
        )));
    }
    Ok(bisect_increasing(|s| spec.residual(s), 0.0, hi))
}

/// Solves the constraint and evaluates the optical length.
pub fn solve(spec: &StripSpec) -> Result<SnellSolution> {
    let sigma = solve_sigma(spec)?;
    Ok(SnellSolution {
        sigma,
        length: length_at(spec, sigma),
    })
}

/// Optical length written as `p√(1−σ²) + q√(β²−σ²) + σh`.
///
/// This agrees with `p/√(1−σ²) + β²q/√(β²−σ²)` once the constraint holds and
/// is stationary in `σ` there, so bisection error enters only quadratically.
pub(crate) fn length_at(spec: &StripSpec, sigma: f64) -> f64 {
    let mut len = sigma * spec.h;
    if spec.p > 0.0 {
        len += spec.p * light_cos(sigma);
    }
    if spec.q > 0.0 {
        len += spec.q * dark_cos(sigma, spec.beta);
    }
    len
}

/// `p/√(1−σ²) + β²q/√(β²−σ²)` evaluated literally.
pub fn length_direct(spec: &StripSpec, sigma: f64) -> f64 {
    let mut len = 0.0;
    if spec.p > 0.0 {
        len += spec.p / light_cos(sigma);
    }
    if spec.q > 0.0 {
        len += spec.beta * spec.beta * spec.q / dark_cos(sigma, spec.beta);
    }
    len
}

/// Optical length `L(p, q, h)` of the Snell path.
pub fn snell_length(spec: &StripSpec) -> Result<f64> {
    solve(spec).map(|s| s.length)
}

/// `(∂L/∂p, ∂L/∂q) = (√(1−σ²), √(β²−σ²))`.
pub fn snell_partials(spec: &StripSpec) -> Result<(f64, f64)> {
    let sigma = solve_sigma(spec)?;
    if sigma >= 1.0 {
        return Err(domain(
            "dL/dp undefined: a purely dark path steeper than the light critical angle",
        ));
    }
    Ok((light_cos(sigma), dark_cos(sigma, spec.beta)))
}

/// Material of a vertical column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Medium {
    Light,
    Dark,
}

impl Medium {
    pub fn flip(self) -> Self {
        match self {
            Medium::Light => Medium::Dark,
            Medium::Dark => Medium::Light,
        }
    }

    pub fn index(self, beta: f64) -> f64 {
        match self {
            Medium::Light => 1.0,
            Medium::Dark => beta,
        }
    }
}

/// Breakpoints of a Snell path together with the medium of each piece.
#[derive(Debug, Clone, PartialEq)]
pub struct SnellPolyline {
    pub points: Vec<Point>,
    pub media: Vec<Medium>,
    pub sigma: f64,
}

impl SnellPolyline {
    /// Sum of index-weighted Euclidean lengths of the pieces.
    pub fn optical_length(&self, beta: f64) -> f64 {
        self.points
            .windows(2)
            .zip(&self.media)
            .map(|(w, m)| m.index(beta) * (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }
}

/// Rebuilds the refracted path starting at `start`, breaking at each integer
/// abscissa where the medium alternates.
///
/// `first` names the medium of the column containing `start` (the column
/// to its right when `start` is on an interface). The light and dark
/// thickness implied by that layout must match `spec.p` and `spec.q`.
pub fn snell_polyline(start: Point, spec: &StripSpec, first: Medium) -> Result<SnellPolyline> {
    let sigma = solve_sigma(spec)?;
    let [x0, y0] = start;
    let end = x0 + spec.p + spec.q;
    let slope = |m: Medium| match m {
        Medium::Light => sigma / light_cos(sigma),
        Medium::Dark => sigma / dark_cos(sigma, spec.beta),
    };

    let mut points = vec![start];
    let mut media = Vec::new();
    let (mut light, mut dark) = (0.0, 0.0);
    let (mut x, mut y) = (x0, y0);
    let mut medium = first;
    while end - x > 1e-12 {
        let mut next = (x.floor() + 1.0).min(end);
        if end - next < 1e-12 {
            next = end;
        }
        let w = next - x;
        match medium {
            Medium::Light => light += w,
            Medium::Dark => dark += w,
        }
        y += w * slope(medium);
        x = next;
        points.push([x, y]);
        media.push(medium);
        medium = medium.flip();
    }

    let scale = 1e-9 * (spec.p + spec.q).max(1.0);
    if (light - spec.p).abs() > scale || (dark - spec.q).abs() > scale {
        return Err(domain(format!(
            "column layout from x = {x0} crosses light {light} / dark {dark}, spec says p = {}, q = {}",
            spec.p, spec.q
        )));
    }
    Ok(SnellPolyline {
        points,
        media,
        sigma,
    })
}
