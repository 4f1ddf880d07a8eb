//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero on any failure.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chessgeo_core::geodesic::{counterexample_curve, geodesic_to_light_vertex, oracle_distance, tilde_beta};
use chessgeo_core::homog::{phi, phi_estimate, phi_on_cone, unit_ball};
use chessgeo_core::normlen::{
    beta_c, delta, k_c, norm_len, t_zero, tilde_norm_len, tilde_norm_len_dh, SQRT_3_2,
};
use chessgeo_core::snell::{snell_length, snell_partials, StripSpec};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn critical_table() -> Check {
    let table = [1.24084, 1.06413, 1.02820, 1.01577, 1.01006, 1.00698, 1.00512, 1.00392];
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (k, expect) in table.iter().enumerate() {
        let b = beta_c(k as u32).map_err(|e| e.to_string())?;
        worst = worst.max((b - expect).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 5e-6 && secs < 5.0,
        format!("max deviation {worst:.3e} (tol 5e-6), {secs:.3} s (limit 5 s)"),
    )
}

fn uniform_delta() -> Check {
    let mut worst = 0.0_f64;
    for k in 0..=50u32 {
        let a = 2.0 * f64::from(k) + 3.0;
        let b = 2.0 * f64::from(k) + 1.0;
        let closed = (1.0 + a * a).sqrt() - (1.0 + b * b).sqrt() - 2.0;
        worst = worst.max((delta(k, 1.0).map_err(|e| e.to_string())? - closed).abs());
    }
    verdict(worst <= 1e-12, format!("max residual {worst:.3e} (tol 1e-12)"))
}

fn asymptotics() -> Check {
    let scaled = |k: f64, beta: f64| -> Result<f64, String> {
        let d = delta(k as u32, beta).map_err(|e| e.to_string())?;
        Ok(k.powi(3) * (d - (beta - 1.0) + beta / (2.0 * (beta + 1.0) * k * k)).abs())
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in [1.1, 1.5, 2.0] {
        let ratio = scaled(200.0, beta)? / scaled(400.0, beta)?;
        ok &= (0.3..=3.0).contains(&ratio);
        detail.push(format!("beta {beta}: {ratio:.4}"));
    }
    verdict(ok, format!("k^3 remainder ratio 200/400: {}", detail.join(", ")))
}

fn counterexample() -> Check {
    let tb = tilde_beta();
    let l0 = counterexample_curve(1.1, 0.0).map_err(|e| e.to_string())?;
    let mut below = None;
    for i in 1..100 {
        let t = f64::from(i) * 1e-3;
        if counterexample_curve(1.1, t).map_err(|e| e.to_string())? < l0 {
            below = Some(t);
            break;
        }
    }
    verdict(
        (tb - 1.17868).abs() <= 5e-6 && below.is_some(),
        format!("tilde beta {tb:.8} (1.17868 +- 5e-6); first t with L(t) < L(0): {below:?}"),
    )
}

fn gradients() -> Check {
    let eps = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_605);
    let mut worst_pq = 0.0_f64;
    for _ in 0..100 {
        let (p, q) = (rng.gen_range(0.05..4.0), rng.gen_range(0.05..4.0));
        let h = rng.gen_range(0.05..1.0);
        let beta = rng.gen_range(1.01..3.0);
        let spec = StripSpec::new(p, q, h, beta).map_err(|e| e.to_string())?;
        let (dp, dq) = snell_partials(&spec).map_err(|e| e.to_string())?;
        let len = |p: f64, q: f64| snell_length(&StripSpec::new(p, q, h, beta).unwrap()).unwrap();
        let fp = (len(p + eps, q) - len(p - eps, q)) / (2.0 * eps);
        let fq = (len(p, q + eps) - len(p, q - eps)) / (2.0 * eps);
        worst_pq = worst_pq.max((fp - dp).abs()).max((fq - dq).abs());
    }
    let mut worst_h = 0.0_f64;
    for _ in 0..100 {
        let t = rng.gen_range(0.0..8.0);
        let h = rng.gen_range(0.02..0.99);
        let beta = rng.gen_range(1.01..3.0);
        let d = tilde_norm_len_dh(t, beta, h).map_err(|e| e.to_string())?;
        let f = |h: f64| tilde_norm_len(t, beta, h).unwrap();
        worst_h = worst_h.max(((f(h + eps) - f(h - eps)) / (2.0 * eps) - d).abs());
    }
    verdict(
        worst_pq <= 1e-6 && worst_h <= 1e-6,
        format!("partials {worst_pq:.3e}, d/dh {worst_h:.3e} (tol 1e-6)"),
    )
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut monotone = true;
    for beta in [1.25, 1.3, 1.5, 2.0] {
        for (x, y) in [(3u32, 1u32), (4, 2), (5, 1), (7, 3)] {
            let (n, j) = ((x - y) / 2, y);
            let exact = geodesic_to_light_vertex(n, j, beta).map_err(|e| e.to_string())?.optical_length;
            let b = [f64::from(x), f64::from(y)];
            let d64 = oracle_distance([0.0, 0.0], b, beta, 64).map_err(|e| e.to_string())?;
            let d128 = oracle_distance([0.0, 0.0], b, beta, 128).map_err(|e| e.to_string())?;
            let (g64, g128) = ((d64 - exact).abs(), (d128 - exact).abs());
            worst = worst.max(g64);
            monotone &= g128 <= g64 + 1e-12;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 5e-3 && monotone && secs < 60.0,
        format!("max gap at N=64 {worst:.3e} (tol 5e-3), gap non-increasing at N=128: {monotone}, {secs:.2} s"),
    )
}

fn polygons() -> Check {
    let oct = unit_ball(1.5).map_err(|e| e.to_string())?;
    let sixteen = unit_ball(1.23).map_err(|e| e.to_string())?;
    let r = 0.5 * SQRT_2;
    let axis = oct.vertices.iter().any(|p| (p[0] - 1.0).abs() <= 1e-12 && p[1].abs() <= 1e-12);
    let diag = oct
        .vertices
        .iter()
        .any(|p| (p[0] - r).abs() <= 1e-12 && (p[1] - r).abs() <= 1e-12);
    let shape = |b: &chessgeo_core::homog::UnitBall| b.is_convex() && b.has_flat_face() && b.has_corner();
    verdict(
        oct.vertices.len() == 8 && sixteen.vertices.len() == 16 && axis && diag && shape(&oct) && shape(&sixteen),
        format!(
            "octagon {} vertices (axis {axis}, diagonal {diag}), 16-gon {} vertices, convex/face/corner {}/{}",
            oct.vertices.len(),
            sixteen.vertices.len(),
            shape(&oct),
            shape(&sixteen)
        ),
    )
}

fn minimum_structure() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in [1.26, 1.23, 1.2, 1.1, 1.05, 1.009] {
        let kc = k_c(beta).map_err(|e| e.to_string())?;
        let target = 2.0 * f64::from(kc);
        let steps = ((target + 6.0) / 1e-3).round() as u32;
        let (mut arg, mut best) = (0.0, f64::INFINITY);
        for i in 0..=steps {
            let t = f64::from(i) * 1e-3;
            let v = norm_len(t, beta).map_err(|e| e.to_string())?;
            if v < best {
                best = v;
                arg = t;
            }
        }
        ok &= (arg - target).abs() <= 2e-3;
        detail.push(format!("beta {beta}: {arg:.3} vs {target}"));
    }
    verdict(ok, format!("argmin vs 2k_c: {}", detail.join(", ")))
}

fn t_zero_bound() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in [1.01, 1.05, 1.1, 1.2] {
        let t0 = t_zero(beta).map_err(|e| e.to_string())?;
        let mut k0 = 0u32;
        while t0 > 2.0 * f64::from(k0) + 2.0 {
            k0 += 1;
        }
        let lhs = norm_len(2.0 * f64::from(k0) + 2.0, beta).map_err(|e| e.to_string())?;
        let rhs = norm_len(t0, beta).map_err(|e| e.to_string())?;
        ok &= lhs <= rhs + 1e-10;
        detail.push(format!("beta {beta}: k0 {k0}, margin {:.3e}", rhs - lhs));
    }
    verdict(ok, detail.join(", "))
}

fn homogenization() -> Check {
    let est = phi_estimate(1.0, 1.0, 1.5, 8, 64).map_err(|e| e.to_string())?;
    let tol = 5f64.sqrt() / 8.0 + 5e-3;
    let gap = (est.value - SQRT_2).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let beta = rng.gen_range(SQRT_3_2..3.0);
        let slope = 2.0 * f64::from(k_c(beta).map_err(|e| e.to_string())?) + 1.0;
        let big = rng.gen_range(0.01..10.0);
        let small = rng.gen_range(0.0..1.0) * big / slope;
        let sx = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sy = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let (x, y) = if rng.gen_bool(0.5) { (sx * big, sy * small) } else { (sx * small, sy * big) };
        let a = phi_on_cone(x, y, beta).map_err(|e| e.to_string())?;
        let b = phi(x, y, beta).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
    }
    verdict(
        gap <= tol && worst <= 1e-12,
        format!("|estimate - sqrt2| {gap:.3e} (tol {tol:.4}), cone vs phi {worst:.3e} (tol 1e-12)"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("critical table", critical_table),
        ("delta closed form at beta = 1", uniform_delta),
        ("delta asymptotics", asymptotics),
        ("counterexample", counterexample),
        ("gradient checks", gradients),
        ("oracle equivalence", oracle_equivalence),
        ("octagon and 16-gon", polygons),
        ("minimum structure", minimum_structure),
        ("bound at t0", t_zero_bound),
        ("homogenization consistency", homogenization),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
