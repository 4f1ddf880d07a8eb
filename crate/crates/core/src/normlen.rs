//! Normalized length of Snell paths leaving a light vertex across one strip.
//!
//! For a horizontal excess `t >= 0` the Snell path from the origin to
//! `(t + 1, 1)` crosses light thickness `p(t)` and dark thickness `q(t)`.
//! Its normalized length `l(t, β)` is the optical length minus `t + √2`,
//! the length of the best path that stays out of the dark squares.
//! The increments `δ(k, β) = l(2k + 2, β) − l(2k, β)` change sign at the
//! critical indices `β^c_k`, and `k_c(β)` is the first `k` with `δ > 0`.

use rayon::prelude::*;
use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::roots::{bisect_decreasing, bisect_increasing};
use crate::snell::{self, dark_cos, light_cos, StripSpec};

/// Residual accepted for a critical index: `|δ(k, β^c_k)| <= TOL_DELTA`.
pub const TOL_DELTA: f64 = 1e-10;

/// `√(3/2)`, lower end of the regime with explicit geodesics.
pub const SQRT_3_2: f64 = 1.224_744_871_391_589;

/// Which part of the excess axis `t` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `t ∈ (2k, 2k + 1)`: the last piece of the path is in a dark square.
    Dark,
    /// `t ∈ (2k + 1, 2k + 2)`: the last piece is in a light square.
    Light,
    /// `t` is an integer.
    Boundary,
}

impl Regime {
    pub fn of(t: f64) -> Regime {
        let f = t.floor();
        if t == f {
            Regime::Boundary
        } else if f.rem_euclid(2.0) == 0.0 {
            Regime::Dark
        } else {
            Regime::Light
        }
    }
}

/// Side from which a one-sided derivative is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("excess t = {t} must be finite and non-negative")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("refractive index beta = {beta} below 1")))
    }
}

/// Dark thickness crossed by the Snell path to `(t + 1, 1)`.
pub fn q_of_t(t: f64) -> Result<f64> {
    check_t(t)?;
    let f = t.floor();
    Ok(if f.rem_euclid(2.0) == 1.0 {
        (f + 1.0) / 2.0
    } else {
        t - f / 2.0
    })
}

/// Light thickness, `p(t) = t + 1 − q(t)`.
pub fn p_of_t(t: f64) -> Result<f64> {
    Ok(t + 1.0 - q_of_t(t)?)
}

fn strip(t: f64, beta: f64) -> Result<StripSpec> {
    check_beta(beta)?;
    let q = q_of_t(t)?;
    StripSpec::new(t + 1.0 - q, q, 1.0, beta)
}

/// `σ̂(t, β)`: incidence sine of the Snell path from the origin to `(t + 1, 1)`.
pub fn sigma_hat(t: f64, beta: f64) -> Result<f64> {
    snell::solve_sigma(&strip(t, beta)?)
}

/// Normalized length `l(t, β)`.
pub fn norm_len(t: f64, beta: f64) -> Result<f64> {
    let sol = snell::solve(&strip(t, beta)?)?;
    Ok(sol.length - t - SQRT_2)
}

/// An evaluated point of the normalized length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormLenPoint {
    pub t: f64,
    pub beta: f64,
    pub sigma_hat: f64,
    pub value: f64,
    pub regime: Regime,
}

impl NormLenPoint {
    pub fn evaluate(t: f64, beta: f64) -> Result<Self> {
        let sol = snell::solve(&strip(t, beta)?)?;
        Ok(NormLenPoint {
            t,
            beta,
            sigma_hat: sol.sigma,
            value: sol.length - t - SQRT_2,
            regime: Regime::of(t),
        })
    }
}

fn deriv_in(regime: Regime, sigma: f64, beta: f64) -> f64 {
    match regime {
        Regime::Light => light_cos(sigma) - 1.0,
        Regime::Dark => dark_cos(sigma, beta) - 1.0,
        Regime::Boundary => unreachable!("boundary has no single-interval derivative"),
    }
}

/// `∂l/∂t` for non-integer `t > 0`.
///
/// Integer abscissae are rejected with [`Error::OneSided`]; use
/// [`norm_len_one_sided_deriv`] there.
pub fn norm_len_deriv(t: f64, beta: f64) -> Result<f64> {
    check_t(t)?;
    match Regime::of(t) {
        Regime::Boundary => Err(Error::OneSided(t)),
        regime => Ok(deriv_in(regime, sigma_hat(t, beta)?, beta)),
    }
}

/// One-sided derivative of `l(·, β)` at `t`, taken from the interval on `side`.
///
/// Since `σ̂` is continuous, the one-sided limit uses the formula of the
/// neighbouring interval evaluated at `t` itself.
pub fn norm_len_one_sided_deriv(t: f64, beta: f64, side: Side) -> Result<f64> {
    check_t(t)?;
    let regime = match Regime::of(t) {
        Regime::Boundary => {
            let neighbour = match side {
                Side::Left if t == 0.0 => {
                    return Err(domain("no left derivative at t = 0"));
                }
                Side::Left => t - 0.5,
                Side::Right => t + 0.5,
            };
            Regime::of(neighbour)
        }
        r => r,
    };
    Ok(deriv_in(regime, sigma_hat(t, beta)?, beta))
}

/// Unique `t₀ > 0` with `σ̂(t₀, β) = √(β² − 1)`, defined for `1 < β < √(3/2)`.
pub fn t_zero(beta: f64) -> Result<f64> {
    if !(beta > 1.0 && beta < SQRT_3_2) {
        return Err(domain(format!(
            "t0 exists only for 1 < beta < sqrt(3/2), got {beta}"
        )));
    }
    let target = ((beta - 1.0) * (beta + 1.0)).sqrt();
    let gap = |t: f64| sigma_hat(t, beta).map(|s| s - target);
    let mut hi = 1.0;
    while gap(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Internal(format!("t0 bracket diverged for beta = {beta}")));
        }
    }
    // gap(t) is strictly decreasing; errors cannot occur inside the bracket.
    Ok(bisect_decreasing(|t| gap(t).unwrap_or(f64::NAN), 0.0, hi))
}

/// `δ(k, β) = l(2k + 2, β) − l(2k, β)`.
pub fn delta(k: u32, beta: f64) -> Result<f64> {
    let t = 2.0 * f64::from(k);
    Ok(norm_len(t + 2.0, beta)? - norm_len(t, beta)?)
}

/// `√(1 + (2k + 3)²) − √(1 + (2k + 1)²) − 2`, the value of `δ(k, 1)`.
pub fn delta_uniform(k: u32) -> f64 {
    let k = f64::from(k);
    (2.0 * k + 3.0).hypot(1.0) - (2.0 * k + 1.0).hypot(1.0) - 2.0
}

/// Upper bound `1 + (√2 − 1)/(k + 1)` on `β^c_k`.
pub fn beta_c_upper_bound(k: u32) -> f64 {
    1.0 + (SQRT_2 - 1.0) / (f64::from(k) + 1.0)
}

/// Critical index `β^c_k`, the root of `δ(k, ·)` in `(1, √2)`.
pub fn beta_c(k: u32) -> Result<f64> {
    let lo = 1.0 + 1e-9;
    let hi = SQRT_2;
    let (dlo, dhi) = (delta(k, lo)?, delta(k, hi)?);
    if !(dlo < 0.0 && dhi > 0.0) {
        return Err(Error::Internal(format!(
            "delta({k}, .) not bracketed: {dlo} at {lo}, {dhi} at {hi}"
        )));
    }
    let root = bisect_increasing(|b| delta(k, b).unwrap_or(f64::NAN), lo, hi);
    let residual = delta(k, root)?;
    if residual.abs() > TOL_DELTA {
        return Err(Error::Internal(format!(
            "beta_c({k}) = {root} leaves residual {residual}"
        )));
    }
    Ok(root)
}

/// `β^c_0`, computed on first use.
pub fn beta_c0() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| beta_c(0).expect("beta_c(0) is bracketed"))
}

/// `k_c(β) = min{k : δ(k, β) > 0}`.
pub fn k_c(beta: f64) -> Result<u32> {
    if !(beta.is_finite() && beta > 1.0) {
        return Err(domain(format!("k_c needs beta > 1, got {beta}")));
    }
    // β^c_k < 1 + (√2−1)/(k+1) bounds the answer.
    let cap = ((SQRT_2 - 1.0) / (beta - 1.0)).ceil().min(f64::from(u32::MAX - 3)) as u32 + 2;
    for k in 0..=cap {
        if delta(k, beta)? > 0.0 {
            return Ok(k);
        }
    }
    Err(Error::Internal(format!(
        "delta(k, {beta}) not positive for any k <= {cap}"
    )))
}

/// `l(2k_c(β), β)`, the minimum of the normalized length.
pub fn l_min(beta: f64) -> Result<f64> {
    norm_len(2.0 * f64::from(k_c(beta)?), beta)
}

/// One row of the critical table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub k: u32,
    pub beta_c: f64,
}

/// `β^c_k` for `k = 0..=max_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalTable {
    pub entries: Vec<CriticalValue>,
}

impl CriticalTable {
    pub fn compute(max_k: u32) -> Result<Self> {
        let entries = (0..=max_k)
            .into_par_iter()
            .map(|k| beta_c(k).map(|beta_c| CriticalValue { k, beta_c }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CriticalTable { entries })
    }

    /// CSV with header `k,beta_c` and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,beta_c\n");
        for e in &self.entries {
            out.push_str(&format!("{},{}\n", e.k, crate::format::num(e.beta_c)));
        }
        out
    }
}

fn tilde_strip(t: f64, beta: f64, h: f64) -> Result<StripSpec> {
    check_beta(beta)?;
    if !(h > 0.0 && h <= 1.0) {
        return Err(domain(format!("height h = {h} outside (0, 1]")));
    }
    let q = q_of_t(t)?;
    let p = t + h - q;
    if p < 0.0 {
        return Err(domain(format!("light thickness p(t, h) = {p} is negative")));
    }
    StripSpec::new(p, q, h, beta)
}

/// `σ̃(t, β, h)` for the Snell path from `(−h, −h)` to `(t, 0)`.
pub fn tilde_sigma(t: f64, beta: f64, h: f64) -> Result<f64> {
    snell::solve_sigma(&tilde_strip(t, beta, h)?)
}

/// Generalized normalized length `l̃(t, β, h)`.
pub fn tilde_norm_len(t: f64, beta: f64, h: f64) -> Result<f64> {
    let sol = snell::solve(&tilde_strip(t, beta, h)?)?;
    Ok(sol.length - t - h * SQRT_2)
}

/// `∂l̃/∂h = √(1 − σ̃²) + σ̃ − √2`.
pub fn tilde_norm_len_dh(t: f64, beta: f64, h: f64) -> Result<f64> {
    let s = tilde_sigma(t, beta, h)?;
    Ok(light_cos(s) + s - SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn thickness_split() {
        assert_eq!((q_of_t(0.0).unwrap(), p_of_t(0.0).unwrap()), (0.0, 1.0));
        assert_eq!((q_of_t(1.0).unwrap(), p_of_t(1.0).unwrap()), (1.0, 1.0));
        assert_eq!((q_of_t(2.5).unwrap(), p_of_t(2.5).unwrap()), (1.5, 2.0));
        assert!(q_of_t(-0.1).is_err());
        for i in 0..400 {
            let t = 0.037 * f64::from(i);
            let (q, p) = (q_of_t(t).unwrap(), p_of_t(t).unwrap());
            assert!(q >= 0.0 && p >= 0.0);
            assert!((p + q - t - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::of(0.0), Regime::Boundary);
        assert_eq!(Regime::of(0.5), Regime::Dark);
        assert_eq!(Regime::of(1.5), Regime::Light);
        assert_eq!(Regime::of(4.2), Regime::Dark);
        assert_eq!(Regime::of(3.0), Regime::Boundary);
    }

    #[test]
    fn sigma_hat_at_origin_and_uniform() {
        for beta in [1.01, 1.3, 2.0, 5.0] {
            assert!((sigma_hat(0.0, beta).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!(norm_len(0.0, beta).unwrap().abs() < 1e-15);
        }
        for t in [0.3, 1.0, 2.7, 9.0] {
            let expect = 1.0 / (1.0_f64 + t).hypot(1.0);
            assert!((sigma_hat(t, 1.0).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn s3_fixtures() {
        // Values frozen from a 40-digit bisection on the same constraint.
        assert!((sigma_hat(2.0, 1.5).unwrap() - 0.354_037_648_564_031).abs() < 1e-13);
        assert!((norm_len(2.0, 1.5).unwrap() - 0.267_906_867_121_825).abs() < 1e-13);
        assert!((norm_len(2.0, 1.1).unwrap() + 0.146_891_329_008_511).abs() < 1e-13);
    }

    #[test]
    fn derivative_signs() {
        for t in [1.2, 1.5, 3.7, 5.01] {
            let d = norm_len_deriv(t, 1.3).unwrap();
            assert!(d > -1.0 && d < 0.0);
        }
        for beta in [SQRT_3_2, 1.3, 2.0] {
            for t in [0.1, 0.5, 0.99, 2.5] {
                assert!(norm_len_deriv(t, beta).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn derivative_needs_a_side_at_integers() {
        assert_eq!(norm_len_deriv(2.0, 1.3), Err(Error::OneSided(2.0)));
        let left = norm_len_one_sided_deriv(2.0, 1.3, Side::Left).unwrap();
        let right = norm_len_one_sided_deriv(2.0, 1.3, Side::Right).unwrap();
        assert!(left < 0.0 && right > 0.0);
        assert!(norm_len_one_sided_deriv(0.0, 1.3, Side::Left).is_err());
        let r0 = norm_len_one_sided_deriv(0.0, 1.3, Side::Right).unwrap();
        assert!((r0 - ((1.69_f64 - 0.5).sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let step = 1e-5;
        for &(t, beta) in &[(1.5, 1.3), (0.4, 1.1), (2.3, 1.05), (7.7, 1.9)] {
            let fd = (norm_len(t + step, beta).unwrap() - norm_len(t - step, beta).unwrap())
                / (2.0 * step);
            assert!((fd - norm_len_deriv(t, beta).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn t_zero_domain_and_trend() {
        assert!(t_zero(1.0).is_err());
        assert!(t_zero(SQRT_3_2).is_err());
        assert!(t_zero(1.3).is_err());
        assert!((t_zero(1.2).unwrap() - 0.171_250_513_326_696).abs() < 1e-10);
        assert!((t_zero(1.01).unwrap() - 6.012_639_811_018_217).abs() < 1e-9);
        assert!(t_zero(1.224_744).unwrap() < 1e-4);
        let ts: Vec<f64> = [1.2, 1.1, 1.05, 1.02, 1.01]
            .iter()
            .map(|&b| t_zero(b).unwrap())
            .collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn delta_uniform_closed_form() {
        assert!((delta(0, 1.0).unwrap() - (10f64.sqrt() - SQRT_2 - 2.0)).abs() < 1e-14);
        for k in 0..=20 {
            assert!((delta(k, 1.0).unwrap() - delta_uniform(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_values_and_bound() {
        let b0 = beta_c(0).unwrap();
        assert!((b0 - 1.240_843_056_321_607).abs() < 1e-12);
        for k in 0..6 {
            let b = beta_c(k).unwrap();
            assert!(b > 1.0 && b < beta_c_upper_bound(k));
            assert!(delta(k, b).unwrap().abs() <= TOL_DELTA);
        }
        assert!(beta_c(1).unwrap() < SQRT_3_2 && SQRT_3_2 < b0);
    }

    #[test]
    fn k_c_examples() {
        assert_eq!(k_c(1.3).unwrap(), 0);
        assert_eq!(k_c(1.1).unwrap(), 1);
        assert_eq!(k_c(1.05).unwrap(), 2);
        assert_eq!(k_c(1.009).unwrap(), 5);
        assert_eq!(k_c(3.0).unwrap(), 0);
        assert!(k_c(1.0).is_err());
    }

    #[test]
    fn critical_table_csv() {
        let table = CriticalTable::compute(1).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,beta_c"));
        assert!(lines.next().unwrap().starts_with("0,1.24084305632"));
        assert!(lines.next().unwrap().starts_with("1,1.06413031902"));
    }

    #[test]
    fn tilde_reduces_to_plain_at_unit_height() {
        for &(t, beta) in &[(0.0, 1.3), (0.7, 1.1), (2.0, 1.5), (5.5, 1.02)] {
            let a = tilde_norm_len(t, beta, 1.0).unwrap();
            let b = norm_len(t, beta).unwrap();
            assert!((a - b).abs() < 1e-14);
            assert_eq!(tilde_sigma(t, beta, 1.0).unwrap(), sigma_hat(t, beta).unwrap());
        }
    }

    #[test]
    fn tilde_dh_negative_and_matches_fd() {
        let step = 1e-5;
        let (t, beta, h) = (1.5, 1.3, 0.5);
        let fd = (tilde_norm_len(t, beta, h + step).unwrap()
            - tilde_norm_len(t, beta, h - step).unwrap())
            / (2.0 * step);
        let dh = tilde_norm_len_dh(t, beta, h).unwrap();
        assert!((fd - dh).abs() < 1e-6);
        for h in [0.1, 0.4, 0.8, 0.99] {
            assert!(tilde_norm_len_dh(0.8, 1.2, h).unwrap() < 0.0);
        }
        assert!(tilde_norm_len(1.0, 1.3, 0.0).is_err());
    }
}
