//! One-dimensional optimal transport.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::{BetaDensity, Distribution1d, SignedDifference};
use crate::operators::apply_e;
use crate::quad::{bracketed_root, gl20, merge_breaks};

/// Integrates `|f|^p` over consecutive breakpoints, each interval split into
/// `sub` panels and further at sign changes.
fn abs_pow_on_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], p: f64, sub: usize) -> f64 {
    let rule = gl20();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let h = (b - a) / sub as f64;
        let mut x0 = a;
        let mut f0 = f(a);
        for k in 1..=sub {
            let x1 = if k == sub { b } else { a + k as f64 * h };
            let f1 = f(x1);
            if f0 != 0.0 && f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
                let r = bracketed_root(&f, x0, x1);
                total += rule.integrate(x0, r, |x| f(x).abs().powf(p));
                total += rule.integrate(r, x1, |x| f(x).abs().powf(p));
            } else {
                total += rule.integrate(x0, x1, |x| f(x).abs().powf(p));
            }
            x0 = x1;
            f0 = f1;
        }
    }
    total
}

/// Like [`abs_pow_on_breaks`] with one panel per interval, but each panel
/// is bisected until two-level Gauss-Legendre estimates agree.
fn abs_pow_adaptive<F: Fn(f64) -> f64>(f: F, breaks: &[f64], p: f64, tol: f64) -> f64 {
    fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64, p: f64, tol: f64, depth: u32) -> f64 {
        let rule = gl20();
        if fa != 0.0 && fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            let r = bracketed_root(f, a, b);
            if r > a && r < b {
                return panel(f, a, r, fa, 0.0, p, tol, depth) + panel(f, r, b, 0.0, fb, p, tol, depth);
            }
        }
        let whole = rule.integrate(a, b, |x| f(x).abs().powf(p));
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, |x| f(x).abs().powf(p));
        let right = rule.integrate(m, b, |x| f(x).abs().powf(p));
        if depth == 0 || (whole - left - right).abs() <= tol * (b - a) {
            return left + right;
        }
        let fm = f(m);
        panel(f, a, m, fa, fm, p, tol, depth - 1) + panel(f, m, b, fm, fb, p, tol, depth - 1)
    }
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| panel(&f, w[0], w[1], f(w[0]), f(w[1]), p, tol, 40))
        .sum()
}

/// Geometric refinement towards both ends of `[a, b]`.
fn graded(a: f64, b: f64, levels: i32) -> Vec<f64> {
    let mut pts = vec![a, b];
    for k in 1..=levels {
        let f = 0.5f64.powi(k);
        pts.push(a + f * (b - a));
        pts.push(b - f * (b - a));
    }
    pts
}

/// `W_p(μ, ν)` for any pair of one-dimensional distributions.
///
/// `p = 1` uses `∫|F_μ - F_ν| dx`; other exponents use the quantile formula.
pub fn wasserstein_p<A, B>(mu: &A, nu: &B, p: f64) -> Result<f64>
where
    A: Distribution1d + ?Sized,
    B: Distribution1d + ?Sized,
{
    check_p(p)?;
    if p == 1.0 {
        Ok(w1_cdf(mu, nu))
    } else {
        wasserstein_quantile(mu, nu, p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    Ok(())
}

/// `∫ |F_μ - F_ν| dx` over the hull of both supports.
pub fn w1_cdf<A, B>(mu: &A, nu: &B) -> f64
where
    A: Distribution1d + ?Sized,
    B: Distribution1d + ?Sized,
{
    let (a0, a1) = mu.support();
    let (b0, b1) = nu.support();
    let (lo, hi) = (a0.min(b0), a1.max(b1));
    let mut pts = mu.breakpoints();
    pts.extend(nu.breakpoints());
    for (s, e) in [(a0, a1), (b0, b1)] {
        pts.extend(graded(s, e, 40));
    }
    let n = 64;
    pts.extend((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64));
    let breaks = merge_breaks(pts, 0.0);
    abs_pow_on_breaks(|x| mu.cdf(x) - nu.cdf(x), &breaks, 1.0, 2)
}

/// `(∫_0^1 |F_μ^{-1}(t) - F_ν^{-1}(t)|^p dt)^{1/p}`.
pub fn wasserstein_quantile<A, B>(mu: &A, nu: &B, p: f64) -> Result<f64>
where
    A: Distribution1d + ?Sized,
    B: Distribution1d + ?Sized,
{
    check_p(p)?;
    let mut pts: Vec<f64> = mu.breakpoints().iter().chain(&nu.breakpoints()).map(|&x| mu.cdf(x)).collect();
    pts.extend(nu.breakpoints().iter().chain(&mu.breakpoints()).map(|&x| nu.cdf(x)));
    pts.extend(graded(0.0, 1.0, 40));
    let n = 100;
    pts.extend((0..=n).map(|k| k as f64 / n as f64));
    pts.retain(|t| (0.0..=1.0).contains(t));
    let breaks = merge_breaks(pts, 0.0);
    let cost = abs_pow_adaptive(|t| mu.quantile(t) - nu.quantile(t), &breaks, p, 1e-13);
    Ok(cost.powf(1.0 / p))
}

/// `W_1` of two β-densities from the closed-form CDFs, integrated in `θ`:
/// `∫|F_μ - F_ν| dx = ∫_0^π |F_μ - F_ν|(2cos θ) 2 sin θ dθ`.
pub fn w1_beta(mu: &BetaDensity, nu: &BetaDensity) -> f64 {
    let deg = mu.degree().max(nu.degree());
    let panels = (4 * deg + 16).max(32);
    crate::quad::integrate_abs_pow(
        |t| mu.cdf_theta(t) - nu.cdf_theta(t),
        |t| 2.0 * t.sin(),
        0.0,
        PI,
        1.0,
        panels,
    )
}

/// Dual spectral form `W_1 = 2∫|(E²ψ)'| dα = ∫|Σ (γ_n/n) ψ_{n-1}| dα`.
pub fn w1_dual_spectral(d: &SignedDifference) -> Result<f64> {
    if d.coeff(0) != 0.0 {
        return Err(Error::InvalidMeasure("difference must have zero mass".into()));
    }
    let g = apply_e(&apply_e(d.series())).derivative().scale(2.0);
    Ok(crate::functionals::alpha_abs_pow(&g, 1.0))
}

/// The nondecreasing map `F_μ^{-1} ∘ F_ν` pushing an atomless β-density
/// `ν` onto `μ`.
#[derive(Debug, Clone)]
pub struct MonotoneMap<'a, T: Distribution1d + ?Sized> {
    source: &'a BetaDensity,
    target: &'a T,
}

/// Builds the monotone map from `source` to `target`.
pub fn monotone_map<'a, T: Distribution1d + ?Sized>(
    source: &'a BetaDensity,
    target: &'a T,
) -> MonotoneMap<'a, T> {
    MonotoneMap { source, target }
}

/// Checked variant for arbitrary sources, rejecting atomic ones.
pub fn monotone_map_checked<'a, S, T>(source: &'a S, target: &'a T) -> Result<&'a S>
where
    S: Distribution1d + ?Sized,
    T: Distribution1d + ?Sized,
{
    let _ = target;
    if source.is_atomic() {
        return Err(Error::InvalidMeasure("the source of a monotone map must be atomless".into()));
    }
    Ok(source)
}

impl<T: Distribution1d + ?Sized> MonotoneMap<'_, T> {
    pub fn apply(&self, x: f64) -> f64 {
        self.target.quantile(self.source.cdf(x))
    }

    /// `∫ |θ(x) - x|^p ν(dx)`, integrated against the source density in `θ`.
    pub fn cost(&self, p: f64) -> f64 {
        let deg = self.source.degree();
        let panels = (8 * deg + 64).max(128);
        let f = self.source.density();
        crate::quad::integrate_abs_pow(
            |t| {
                let x = 2.0 * t.cos();
                self.apply(x) - x
            },
            |t| f.eval_theta(t) / PI,
            0.0,
            PI,
            p,
            panels,
        )
    }
}
