//! Seeded numerical studies built on the functionals.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chebyshev::SecondKindSeries;
use crate::error::{Error, Result};
use crate::functionals::{
    e2_pairing, entropy_h_diff, fisher_i_diff, fisher_j_diff, lp_information_diff, total_variation_diff, Extended,
};
use crate::measure::{BetaDensity, SignedDifference};
use crate::operators::semigroup;
use crate::quad::{gl20, integrate_abs_pow};
use crate::transport::{w1_beta, wasserstein_quantile};

/// Slack floor for inequality sweeps.
pub const SLACK_FLOOR: f64 = -1e-9;

/// Default cap on the degree of random densities.
pub const MAX_RANDOM_DEGREE: usize = 32;

/// Random pair generator: degree uniform in `1..=32`, decay `ρ` uniform in
/// `[0.5, 0.95]`, one independent ChaCha stream per sample.
pub fn random_pair(seed: u64, sample: u64) -> (BetaDensity, BetaDensity) {
    random_pair_with_degree(seed, sample, MAX_RANDOM_DEGREE)
}

/// [`random_pair`] with degrees drawn from `1..=max_degree` (at least 1).
pub fn random_pair_with_degree(seed: u64, sample: u64, max_degree: usize) -> (BetaDensity, BetaDensity) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let top = max_degree.max(1);
    let draw = |rng: &mut ChaCha8Rng| {
        let deg = rng.random_range(1..=top);
        let rho = rng.random_range(0.5..=0.95);
        BetaDensity::random(rng, deg, rho)
    };
    let mu = draw(&mut rng);
    let nu = draw(&mut rng);
    (mu, nu)
}

/// Functionals of one pair and the three inequality slacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairStats {
    pub w1: f64,
    pub h: f64,
    pub i: f64,
    pub j: f64,
    /// `2H - W₁²`.
    pub slack_transport: f64,
    /// `J - 2H`.
    pub slack_lsi: f64,
    /// `√(2I) W₁ - W₁²/2 - H`.
    pub slack_hwi: f64,
}

impl PairStats {
    pub fn violations(&self, floor: f64) -> usize {
        [self.slack_transport, self.slack_lsi, self.slack_hwi].iter().filter(|&&s| s < floor).count()
    }
}

pub fn pair_stats(mu: &BetaDensity, nu: &BetaDensity) -> PairStats {
    let d = mu.difference(nu);
    let w1 = w1_beta(mu, nu);
    let h = entropy_h_diff(&d);
    let i = fisher_i_diff(&d);
    let j = fisher_j_diff(&d);
    PairStats {
        w1,
        h,
        i,
        j,
        slack_transport: 2.0 * h - w1 * w1,
        slack_lsi: j - 2.0 * h,
        slack_hwi: hwi_value(i, w1) - h,
    }
}

fn hwi_value(i: f64, w1: f64) -> f64 {
    (2.0 * i).sqrt() * w1 - 0.5 * w1 * w1
}

/// `√(2I)W₁ - W₁²/2 - H`; infinite information gives `+∞`.
pub fn hwi_slack(mu: &BetaDensity, nu: &BetaDensity) -> Extended {
    let s = pair_stats(mu, nu);
    Extended::Finite(s.slack_hwi)
}

/// The sharpness pair `μ - ν = c x β(dx)`: `ν = β`, `dμ/dβ = 1 + c x`.
pub fn sharpness_pair(c: f64) -> Result<(BetaDensity, BetaDensity)> {
    let mu = BetaDensity::from_coeffs(vec![1.0, 2.0 * c])?;
    Ok((mu, BetaDensity::arcsine()))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    pub sample_id: u64,
    pub stats: PairStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub rows: Vec<VerifyRow>,
    pub violations: usize,
    /// `(c, stats)` on the sharpness family.
    pub sharpness: Vec<(f64, PairStats)>,
    pub sharpness_ok: bool,
}

/// Seeded sweep of the transport, log-Sobolev and HWI inequalities.
pub fn verify_inequalities(seed: u64, n_samples: usize) -> VerifyReport {
    verify_inequalities_with_degree(seed, n_samples, MAX_RANDOM_DEGREE)
}

pub fn verify_inequalities_with_degree(seed: u64, n_samples: usize, max_degree: usize) -> VerifyReport {
    let rows: Vec<VerifyRow> = (0..n_samples as u64)
        .into_par_iter()
        .map(|id| {
            let (mu, nu) = random_pair_with_degree(seed, id, max_degree);
            VerifyRow { sample_id: id, stats: pair_stats(&mu, &nu) }
        })
        .collect();
    let violations = rows.iter().map(|r| r.stats.violations(SLACK_FLOOR)).sum();
    let sharpness: Vec<(f64, PairStats)> = [0.1, 0.3, 0.5]
        .iter()
        .map(|&c| {
            let (mu, nu) = sharpness_pair(c).expect("valid sharpness pair");
            (c, pair_stats(&mu, &nu))
        })
        .collect();
    let sharpness_ok = sharpness.iter().all(|(_, s)| {
        s.slack_transport.abs() < 1e-8 && s.slack_lsi.abs() < 1e-8 && s.slack_hwi.abs() < 1e-8
    });
    VerifyReport { seed, rows, violations, sharpness, sharpness_ok }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinskerRow {
    pub n: usize,
    pub tv: f64,
    pub h: f64,
    /// `H / TV²`.
    pub ratio: f64,
    /// `π²/(8n)`.
    pub predicted: f64,
}

/// `ψ = c φ_n` for `n = 1..=n_max`: `H/TV²` decays like `1/n`.
pub fn pinsker_failure_table(n_max: usize, c: f64) -> Result<Vec<PinskerRow>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter("amplitude must be nonzero".into()));
    }
    (1..=n_max)
        .map(|n| {
            let d = SignedDifference::mode(n, c)?;
            let tv = total_variation_diff(&d);
            let h = entropy_h_diff(&d);
            Ok(PinskerRow { n, tv, h, ratio: h / (tv * tv), predicted: PI * PI / (8.0 * n as f64) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearizationRow {
    pub floor: f64,
    pub wp: f64,
    pub h: f64,
    /// `W_p² / H`.
    pub ratio: f64,
}

/// Density `δ + (1-δ)x⁴/6` (minimum `δ` at the origin), perturbed by
/// `ε φ_1`; reports `W_p²/H` for each floor `δ`.
pub fn wp_linearization_sweep(p: f64, floors: &[f64], eps: f64) -> Result<Vec<LinearizationRow>> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    floors
        .par_iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::InvalidParameter(format!("floor must lie in (0, 1), got {delta}")));
            }
            // x⁴ = 6 + 8φ_2 + 2φ_4
            let s = (1.0 - delta) / 6.0;
            let mu = BetaDensity::from_coeffs(vec![1.0, 0.0, 8.0 * s, 0.0, 2.0 * s])?;
            let d = SignedDifference::mode(1, eps)?;
            let nu = mu.perturb(&d)?;
            let wp = wasserstein_quantile(&mu, &nu, p)?;
            let h = entropy_h_diff(&d);
            Ok(LinearizationRow { floor: delta, wp, h, ratio: wp * wp / h })
        })
        .collect()
}

/// Truncation order `ceil(40/(1-r))`, capped at `10⁶`.
pub fn truncation_order(r: f64) -> usize {
    ((40.0 / (1.0 - r)).ceil() as usize).min(1_000_000)
}

/// `∫₀¹ √(u(1-u)) / ((1-r)² + 4ru)^p du` via `u = sin²τ`, on panels graded
/// geometrically around the peak `sin τ ≈ (1-r)/(2√r)`.
pub fn geometric_u_integral(r: f64, p: f64) -> f64 {
    let q = (1.0 - r).powi(2);
    let peak = ((q / (4.0 * r)).sqrt()).asin().max(1e-300);
    let half_pi = 0.5 * PI;
    let mut br = vec![0.0, half_pi];
    let mut x = peak;
    while x > 1e-14 * peak.max(1e-300) && x > 0.0 {
        br.push(x);
        x *= 0.5;
        if br.len() > 200 {
            break;
        }
    }
    let mut x = peak;
    while x < half_pi {
        br.push(x);
        x *= 1.5;
    }
    for k in 1..16 {
        br.push(half_pi * k as f64 / 16.0);
    }
    let br = crate::quad::merge_breaks(br.into_iter().filter(|t| (0.0..=half_pi).contains(t)).collect(), 0.0);
    crate::quad::integrate_pieces(&br, gl20(), |t| {
        let (s, c) = t.sin_cos();
        2.0 * s * s * c * c / (q + 4.0 * r * s * s).powf(p)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpRow {
    pub r: f64,
    pub terms: usize,
    pub tail_bound: f64,
    /// Truncated spectral sum `Σ (η r^{n-1})²/(2n)`.
    pub h: f64,
    /// `∫ |H(μ-ν)|^p dα`.
    pub alpha_integral: f64,
    /// `∫₀¹ √(u(1-u))/((1-r)²+4ru)^p du`; the α-integral is `(8/π)η^p` times it.
    pub u_integral: f64,
    /// `H / (∫|H|^p dα)^{2/p}`.
    pub ratio: f64,
    /// `16η^p/(4r)^p · ∫₀¹ u^{1/2-p} du` when `p < 3/2`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpReport {
    pub p: f64,
    pub eta: f64,
    pub rows: Vec<LpRow>,
    /// Least-squares slope of the α-integral against `-log(1-r)`.
    pub slope: f64,
    /// Same for the `u`-integral times `η^p`.
    pub u_slope: f64,
}

/// Geometric family `μ - ν = η Σ r^{n-1} φ_n β`.
pub fn lp_explorer(p: f64, r_values: &[f64], eta: f64) -> Result<LpReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    if let Some(r) = r_values.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidParameter(format!("r must lie in (0, 1), got {r}")));
    }
    let rows: Vec<LpRow> = r_values
        .par_iter()
        .map(|&r| {
            let terms = truncation_order(r);
            let mut h = 0.0;
            let mut c = eta;
            for n in 1..=terms {
                h += c * c / (2.0 * n as f64);
                c *= r;
            }
            let u = geometric_u_integral(r, p);
            let alpha = 8.0 / PI * eta.abs().powf(p) * u;
            let bound = (p < 1.5).then(|| 16.0 * eta.abs().powf(p) / (4.0 * r).powf(p) / (1.5 - p));
            LpRow {
                r,
                terms,
                tail_bound: eta.abs() * r.powi(terms.min(i32::MAX as usize) as i32) / (1.0 - r),
                h,
                alpha_integral: alpha,
                u_integral: u,
                ratio: h / alpha.powf(2.0 / p),
                bound,
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| -(1.0 - r.r).ln()).collect();
    let slope = fit_slope(&xs, &rows.iter().map(|r| r.alpha_integral).collect::<Vec<_>>());
    let u_slope = fit_slope(&xs, &rows.iter().map(|r| eta.abs().powf(p) * r.u_integral).collect::<Vec<_>>());
    Ok(LpReport { p, eta, rows, slope, u_slope })
}

/// Least-squares slope; `NaN` with fewer than two distinct abscissae.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `(∫₀^π |Σ a_k sin kt|^p sin^{2-p}t dt)^{2/p} / Σ a_k²/k`, with the
/// integrand evaluated as `|Σ a_k sin(kt)/sin t|^p sin²t`.
pub fn trig_ratio(a: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    if a.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParameter("coefficient vector is zero".into()));
    }
    let s = SecondKindSeries::new(a.to_vec())?;
    let panels = (4 * a.len() + 32).max(64);
    let num = integrate_abs_pow(|t| s.eval(2.0 * t.cos()), |t| t.sin().powi(2), 0.0, PI, p, panels);
    let den: f64 = a.iter().enumerate().map(|(k, x)| x * x / (k + 1) as f64).sum();
    Ok(num.powf(2.0 / p) / den)
}

/// Random-restart coordinate search for small values of [`trig_ratio`].
/// Reports evidence only.
pub fn trig_ratio_search(p: f64, degree: usize, seed: u64, rounds: usize) -> Result<(f64, Vec<f64>)> {
    if degree == 0 {
        return Err(Error::InvalidParameter("degree must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_a: Vec<f64> = (0..degree).map(|k| 0.9f64.powi(k as i32)).collect();
    let mut best = trig_ratio(&best_a, p)?;
    let mut step = 0.5;
    for _ in 0..rounds {
        let mut cand = best_a.clone();
        let k = rng.random_range(0..degree);
        cand[k] += step * rng.random_range(-1.0..1.0);
        if let Ok(v) = trig_ratio(&cand, p) {
            if v < best {
                best = v;
                best_a = cand;
                continue;
            }
        }
        step = (step * 0.995).max(1e-3);
    }
    Ok((best, best_a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRow {
    pub t: f64,
    pub h: f64,
    pub i: f64,
    /// Centred difference of `H` in `t`.
    pub dh_dt: f64,
    /// `dH/dt + 2I`.
    pub defect: f64,
}

/// `H` and `I` along `γ_n ↦ e^{-nt}γ_n`.
pub fn semigroup_flow(mu: &BetaDensity, nu: &BetaDensity, t_grid: &[f64]) -> Result<Vec<FlowRow>> {
    let d = mu.difference(nu);
    let at = |t: f64| -> Result<SignedDifference> { SignedDifference::new(semigroup(d.series(), t)?) };
    t_grid
        .iter()
        .map(|&t| {
            let dt = 1e-4_f64.min(t.max(0.0) / 2.0).max(1e-6);
            let cur = at(t)?;
            let h = entropy_h_diff(&cur);
            let i = fisher_i_diff(&cur);
            let hp = entropy_h_diff(&at(t + dt)?);
            let hm = entropy_h_diff(&at((t - dt).max(0.0))?);
            let dh_dt = (hp - hm) / (t + dt - (t - dt).max(0.0));
            Ok(FlowRow { t, h, i, dh_dt, defect: dh_dt + 2.0 * i })
        })
        .collect()
}

/// `2⟨E²ψ,ψ⟩` next to the true `W₁²` for a given difference.
pub fn second_mode_gap(d: &SignedDifference) -> Result<(f64, f64)> {
    let w1 = crate::transport::w1_dual_spectral(d)?;
    Ok((w1, e2_pairing(d).sqrt()))
}

/// `(lp information)/H` for a β-class difference; with `a = γ` this is
/// `2(2/π)^{2/p}` times [`trig_ratio`].
pub fn measure_level_ratio(d: &SignedDifference, p: f64) -> Result<f64> {
    Ok(lp_information_diff(d, p)? / entropy_h_diff(d))
}

/// Chebyshev coefficients of the geometric family truncated at `terms`.
pub fn geometric_difference(r: f64, eta: f64, terms: usize) -> SignedDifference {
    let tail: Vec<f64> = (0..terms).map(|k| eta * r.powi(k as i32)).collect();
    SignedDifference::from_tail(&tail)
}
