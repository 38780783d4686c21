//! Quadrature oracles that do not go through the spectral code paths.
#![allow(dead_code)]

use std::f64::consts::PI;

use freeineq_core::quad::GaussLegendre;

/// Composite Gauss-Legendre on `[a, b]` with panels graded geometrically
/// toward a singular point `s` inside or at the end of the interval.
pub fn graded_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, s: f64, rule: &GaussLegendre) -> f64 {
    let mut total = 0.0;
    if s > a {
        total += graded_one_side(f, s, a, rule);
    }
    if s < b {
        total += graded_one_side(f, s, b, rule);
    }
    total
}

fn graded_one_side<F: Fn(f64) -> f64>(f: &F, s: f64, end: f64, rule: &GaussLegendre) -> f64 {
    let len = end - s;
    let mut total = 0.0;
    let mut far = 1.0;
    while far > 1e-14 {
        let near = far * 0.25;
        let (x0, x1) = (s + len * near, s + len * far);
        total += rule.integrate(x0.min(x1), x0.max(x1), f);
        far = near;
    }
    total
}

/// `-(1/π²)∬ log|2cos θ - 2cos φ| f(θ) f(φ) dθ dφ` for a density
/// difference given in the angle variable.
pub fn log_energy_oracle<F: Fn(f64) -> f64>(f: F, outer: usize) -> f64 {
    let rule = GaussLegendre::new(20);
    let panels = outer;
    let h = PI / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        total += rule.integrate(k as f64 * h, (k + 1) as f64 * h, |t| {
            let x = 2.0 * t.cos();
            let inner = graded_integral(&|p: f64| safe_log(x - 2.0 * p.cos()) * f(p), 0.0, PI, t, &rule);
            f(t) * inner
        });
    }
    -total / (PI * PI)
}

/// Principal value `(1/π) pv∫₀^π 2 f(φ)/(2cos θ - 2cos φ) dφ` at
/// `x = 2cos θ`, regularised by subtracting `f(θ)`.
pub fn hilbert_oracle<F: Fn(f64) -> f64>(f: F, theta: f64) -> f64 {
    let rule = GaussLegendre::new(20);
    let ft = f(theta);
    let c = theta.cos();
    let g = |p: f64| {
        let d = c - p.cos();
        if d == 0.0 {
            0.0
        } else {
            (f(p) - ft) / d
        }
    };
    let mut total = 0.0;
    let panels = 64;
    let h = PI / panels as f64;
    for k in 0..panels {
        total += rule.integrate(k as f64 * h, (k + 1) as f64 * h, g);
    }
    total / PI
}

/// `-∫ log|x - y| f(y) β(dy)` in the angle variable.
pub fn log_potential_oracle<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let rule = GaussLegendre::new(20);
    let theta = (x / 2.0).clamp(-1.0, 1.0).acos();
    -graded_integral(&|p: f64| safe_log(x - 2.0 * p.cos()) * f(p), 0.0, PI, theta, &rule) / PI
}

/// Poisson-kernel smoothing of an even angular function with radius
/// `e^{-t}`.
pub fn poisson_oracle<F: Fn(f64) -> f64>(f: F, t: f64, theta: f64) -> f64 {
    let r = (-t).exp();
    let rule = GaussLegendre::new(20);
    let panels = 128;
    let h = 2.0 * PI / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = -PI + k as f64 * h;
        total += rule.integrate(a, a + h, |p| {
            let kernel = (1.0 - r * r) / (1.0 - 2.0 * r * (theta - p).cos() + r * r);
            kernel * f(p.abs())
        });
    }
    total / (2.0 * PI)
}

/// Density of the geometric family in the angle variable:
/// `η Σ r^{n-1} cos nθ = η (cos θ - r)/(1 - 2r cos θ + r²)`.
pub fn geometric_density(r: f64, eta: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| eta * (t.cos() - r) / (1.0 - 2.0 * r * t.cos() + r * r)
}

fn safe_log(d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d.abs().ln()
    }
}
