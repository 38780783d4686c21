//! Entropy, Fisher informations, `L^p` information, total variation and
//! logarithmic energies.

use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::chebyshev::{ChebSeries, QuadratureRule, SecondKindSeries};
use crate::equilibrium::EquilibriumResult;
use crate::error::{Error, Result};
use crate::logkernel::{cell_pair_average, Toeplitz};
use crate::measure::{BetaDensity, Distribution1d, GridMeasure, ScaledMeasure, SignedDifference};
use crate::operators::hilbert;
use crate::quad::{gl20, sign_changes, GaussLegendre};

/// A nonnegative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    PosInfinity,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::PosInfinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::PosInfinity)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v:.16e}"),
            Extended::PosInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::PosInfinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Quadrature,
}

/// A functional value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: Extended,
    pub method: Method,
}

impl FunctionalValue {
    pub fn spectral(v: f64) -> Self {
        Self { value: Extended::Finite(v), method: Method::Spectral }
    }

    pub fn quadrature(v: f64) -> Self {
        Self { value: Extended::Finite(v), method: Method::Quadrature }
    }

    pub fn infinite(method: Method) -> Self {
        Self { value: Extended::PosInfinity, method }
    }

    pub fn finite(&self) -> Option<f64> {
        self.value.finite()
    }
}

/// `H = Σ_{n≥1} γ_n² / (2n)`.
pub fn entropy_h_diff(d: &SignedDifference) -> f64 {
    d.series().coeffs().iter().enumerate().skip(1).map(|(n, g)| g * g / (2.0 * n as f64)).sum()
}

pub fn entropy_h(mu: &BetaDensity, nu: &BetaDensity) -> FunctionalValue {
    FunctionalValue::spectral(entropy_h_diff(&mu.difference(nu)))
}

/// `I = Σ_{n≥1} γ_n² / 2`.
pub fn fisher_i_diff(d: &SignedDifference) -> f64 {
    0.5 * d.series().coeffs().iter().skip(1).map(|g| g * g).sum::<f64>()
}

pub fn fisher_i(mu: &BetaDensity, nu: &BetaDensity) -> FunctionalValue {
    FunctionalValue::spectral(fisher_i_diff(&mu.difference(nu)))
}

/// `J = ∫ (Hμ - Hν)² dα` by the semicircle Gauss rule of the default size.
pub fn fisher_j_diff(d: &SignedDifference) -> f64 {
    let h = hilbert(d.series());
    let rule = QuadratureRule::alpha_for_degree(d.degree());
    rule.integrate(|x| h.eval(x).powi(2))
}

pub fn fisher_j(mu: &BetaDensity, nu: &BetaDensity) -> FunctionalValue {
    FunctionalValue::quadrature(fisher_j_diff(&mu.difference(nu)))
}

/// `2⟨E²ψ, ψ⟩ = Σ γ_n² / n²`.
pub fn e2_pairing(d: &SignedDifference) -> f64 {
    d.series().coeffs().iter().enumerate().skip(1).map(|(n, g)| (g / n as f64).powi(2)).sum()
}

fn panels_for(degree: usize) -> usize {
    (4 * degree + 16).max(32)
}

/// `∫_0^π |f(θ)|^p w(θ) dθ` split at sign changes of `f`.
fn theta_abs_pow<F: Fn(f64) -> f64, W: Fn(f64) -> f64>(f: F, w: W, p: f64, panels: usize) -> f64 {
    crate::quad::integrate_abs_pow(f, w, 0.0, PI, p, panels)
}

/// `∫ |Σ c_n ψ_n|^p dα` via `x = 2cos θ`, `dα = (2/π) sin²θ dθ`.
pub fn alpha_abs_pow(s: &SecondKindSeries, p: f64) -> f64 {
    let panels = panels_for(s.coeffs().len());
    theta_abs_pow(|t| s.eval(2.0 * t.cos()), |t| 2.0 / PI * t.sin().powi(2), p, panels)
}

/// `(∫ |Hμ - Hν|^p dα)^{2/p}`.
pub fn lp_information_diff(d: &SignedDifference, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    let h = hilbert(d.series());
    Ok(alpha_abs_pow(&h, p).powf(2.0 / p))
}

pub fn lp_information(mu: &BetaDensity, nu: &BetaDensity, p: f64) -> Result<FunctionalValue> {
    Ok(FunctionalValue::quadrature(lp_information_diff(&mu.difference(nu), p)?))
}

/// `∫ |ψ| dβ = (1/π)∫_0^π |Σ γ_n cos nθ| dθ`.
pub fn total_variation_series(s: &ChebSeries) -> f64 {
    theta_abs_pow(|t| s.eval_theta(t), |_| 1.0 / PI, 1.0, panels_for(s.degree()))
}

pub fn total_variation_diff(d: &SignedDifference) -> f64 {
    total_variation_series(d.series())
}

pub fn total_variation(mu: &BetaDensity, nu: &BetaDensity) -> FunctionalValue {
    FunctionalValue::quadrature(total_variation_diff(&mu.difference(nu)))
}

/// Fisher information of two pushforwards under the same `x ↦ Lx + c`,
/// computed on the scaled arcsine rule.
pub fn fisher_i_scaled(mu: &ScaledMeasure, nu: &ScaledMeasure) -> Result<f64> {
    same_frame(mu, nu)?;
    let d = mu.base().difference(nu.base());
    let rule = QuadratureRule::beta_for_degree(d.degree());
    // density of the image w.r.t. the image of β at y = Lx + c is ψ(x)
    Ok(rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let y = mu.scale() * x + mu.shift();
            w * d.series().eval(mu.to_reference(y)).powi(2)
        })
        .sum())
}

/// `∫ (Hμ_L - Hν_L)² dα_L` on the scaled semicircle rule; the transform of
/// an image measure is `(1/L)·(Hμ)((y - c)/L)`.
pub fn fisher_j_scaled(mu: &ScaledMeasure, nu: &ScaledMeasure) -> Result<f64> {
    same_frame(mu, nu)?;
    let d = mu.base().difference(nu.base());
    let h = hilbert(d.series());
    let rule = QuadratureRule::alpha_for_degree(d.degree());
    let l = mu.scale();
    Ok(rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let y = l * x + mu.shift();
            w * (h.eval(mu.to_reference(y)) / l).powi(2)
        })
        .sum())
}

/// Entropy of two images under the same affine map (unchanged by the map).
pub fn entropy_h_scaled(mu: &ScaledMeasure, nu: &ScaledMeasure) -> Result<f64> {
    same_frame(mu, nu)?;
    Ok(entropy_h_diff(&mu.base().difference(nu.base())))
}

fn same_frame(mu: &ScaledMeasure, nu: &ScaledMeasure) -> Result<()> {
    if mu.scale() != nu.scale() || mu.shift() != nu.shift() {
        return Err(Error::InvalidParameter("measures must share scale and shift".into()));
    }
    Ok(())
}

/// Signed piecewise-constant Lebesgue density on a common partition.
struct SignedCells {
    edges: Vec<f64>,
    /// mass of each piece
    masses: Vec<f64>,
}

fn cells_of(g: &GridMeasure) -> Option<(Vec<f64>, &[f64])> {
    g.edges().map(|e| (e, g.weights()))
}

/// `μ - ν` on the union of both partitions.
fn signed_cells(mu: &GridMeasure, nu: &GridMeasure) -> Option<SignedCells> {
    let (em, wm) = cells_of(mu)?;
    let (en, wn) = cells_of(nu)?;
    let mut edges: Vec<f64> = em.iter().chain(&en).copied().collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let density = |e: &[f64], w: &[f64], x: f64| -> f64 {
        if x <= e[0] || x >= e[e.len() - 1] {
            return 0.0;
        }
        let i = e.partition_point(|&b| b <= x) - 1;
        w[i] / (e[i + 1] - e[i])
    };
    let masses = edges
        .windows(2)
        .map(|s| {
            let m = 0.5 * (s[0] + s[1]);
            (density(&em, wm, m) - density(&en, wn, m)) * (s[1] - s[0])
        })
        .collect();
    Some(SignedCells { edges, masses })
}

/// `H(μ, ν) = -∬ log|x - y| (μ-ν)(dx)(μ-ν)(dy)` for cell measures, with
/// exact cell-pair averages of the logarithm. Atomic inputs give `+∞`.
pub fn log_energy(mu: &GridMeasure, nu: &GridMeasure) -> Extended {
    if mu.is_atomic() || nu.is_atomic() {
        return Extended::PosInfinity;
    }
    if mu.same_uniform_grid(nu) {
        let h = mu.uniform_width().unwrap();
        let d: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a - b).collect();
        let t = Toeplitz::log_kernel(d.len(), h);
        return Extended::Finite((-t.quadratic_form(&d)).max(0.0));
    }
    let sc = signed_cells(mu, nu).expect("cell measures");
    let idx: Vec<usize> = (0..sc.masses.len()).filter(|&i| sc.masses[i] != 0.0).collect();
    let e = &sc.edges;
    let mut acc = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        acc += sc.masses[i] * sc.masses[i] * cell_pair_average(e[i], e[i + 1], e[i], e[i + 1]);
        for &j in &idx[a + 1..] {
            acc += 2.0 * sc.masses[i] * sc.masses[j] * cell_pair_average(e[i], e[i + 1], e[j], e[j + 1]);
        }
    }
    Extended::Finite((-acc).max(0.0))
}

/// `∫ |dμ/dβ - dν/dβ| dβ = |μ - ν|(ℝ)` for cell measures.
pub fn total_variation_grid(mu: &GridMeasure, nu: &GridMeasure) -> Extended {
    if mu.is_atomic() || nu.is_atomic() {
        // exact for atoms: sum of mass differences at merged points
        let mut pts: Vec<(f64, f64)> = mu.nodes().iter().copied().zip(mu.weights().iter().copied()).collect();
        pts.extend(nu.nodes().iter().copied().zip(nu.weights().iter().map(|w| -w)));
        if !(mu.is_atomic() && nu.is_atomic()) {
            return Extended::Finite(2.0);
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut total = 0.0;
        let mut i = 0;
        while i < pts.len() {
            let mut m = pts[i].1;
            while i + 1 < pts.len() && pts[i + 1].0 == pts[i].0 {
                i += 1;
                m += pts[i].1;
            }
            total += m.abs();
            i += 1;
        }
        return Extended::Finite(total);
    }
    let sc = signed_cells(mu, nu).unwrap();
    Extended::Finite(sc.masses.iter().map(|m| m.abs()).sum())
}

fn inside_reference(g: &GridMeasure) -> bool {
    match g.support_hull(0.0) {
        Some((lo, hi)) => lo >= -2.0 && hi <= 2.0,
        None => false,
    }
}

/// `∫ (dμ/dβ - dν/dβ)² dβ` for cell measures inside `[-2, 2]`; with
/// piecewise constant Lebesgue density `g` this is `π∫ g²√(4-x²) dx`.
pub fn fisher_i_grid(mu: &GridMeasure, nu: &GridMeasure) -> Extended {
    if mu.is_atomic() || nu.is_atomic() || !inside_reference(mu) || !inside_reference(nu) {
        return Extended::PosInfinity;
    }
    let sc = signed_cells(mu, nu).unwrap();
    let s = |x: f64| {
        let x = x.clamp(-2.0, 2.0);
        0.5 * x * (4.0 - x * x).max(0.0).sqrt() + 2.0 * (0.5 * x).asin()
    };
    let total = sc
        .edges
        .windows(2)
        .zip(&sc.masses)
        .map(|(e, m)| {
            let g = m / (e[1] - e[0]);
            PI * g * g * (s(e[1]) - s(e[0]))
        })
        .sum();
    Extended::Finite(total)
}

/// `∫ (Hμ - Hν)² dα` for cell measures inside `[-2, 2]`, with
/// `H(g dx)(x) = 2 Σ g_k log|(x - a_k)/(x - b_k)|` integrated on panels
/// graded towards every cell edge.
pub fn fisher_j_grid(mu: &GridMeasure, nu: &GridMeasure) -> Extended {
    if mu.is_atomic() || nu.is_atomic() || !inside_reference(mu) || !inside_reference(nu) {
        return Extended::PosInfinity;
    }
    let sc = signed_cells(mu, nu).unwrap();
    let dens: Vec<f64> = sc.edges.windows(2).zip(&sc.masses).map(|(e, m)| m / (e[1] - e[0])).collect();
    // jumps of the density at each edge: H = -2 Σ_e jump_e log|x - e|
    let mut jumps = vec![0.0; sc.edges.len()];
    for (k, g) in dens.iter().enumerate() {
        jumps[k] += g;
        jumps[k + 1] -= g;
    }
    let active: Vec<(f64, f64)> =
        sc.edges.iter().zip(&jumps).filter(|(_, j)| **j != 0.0).map(|(e, j)| (*e, *j)).collect();
    let hilbert_at = |x: f64| -> f64 {
        -2.0 * active.iter().map(|(e, j)| if x == *e { 0.0 } else { j * (x - e).abs().ln() }).sum::<f64>()
    };
    let mut thetas: Vec<f64> = active.iter().map(|(e, _)| (0.5 * e.clamp(-2.0, 2.0)).acos()).collect();
    thetas.extend([0.0, PI]);
    let thetas = crate::quad::merge_breaks(thetas, 1e-15);
    let rule = gl20();
    let mut total = 0.0;
    for w in thetas.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut br = vec![a, b, 0.5 * (a + b)];
        for k in 2..30 {
            let f = 0.5f64.powi(k);
            br.push(a + f * (b - a));
            br.push(b - f * (b - a));
        }
        br.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for s in br.windows(2) {
            total += rule.integrate(s[0], s[1], |t| {
                let h = hilbert_at(2.0 * t.cos());
                2.0 / PI * t.sin().powi(2) * h * h
            });
        }
    }
    Extended::Finite(total)
}

/// Relative free entropy `E_V(μ|μ_V) = ∫(V - U)dμ + H(μ, μ_V)`.
///
/// On the solver's own grid this uses the same cell averages as the solver,
/// otherwise `U` is integrated per cell and `H` uses [`log_energy`].
pub fn relative_entropy_ev(mu: &GridMeasure, eq: &EquilibriumResult) -> Extended {
    if mu.is_atomic() {
        return Extended::PosInfinity;
    }
    let mv = eq.measure();
    if mu.same_uniform_grid(mv) {
        let t = eq.toeplitz();
        let d: Vec<f64> = mu.weights().iter().zip(mv.weights()).map(|(a, b)| a - b).collect();
        let tw = t.matvec(mv.weights());
        let k = eq.robin_constant();
        let linear: f64 = mu
            .weights()
            .iter()
            .zip(eq.cell_potential())
            .zip(&tw)
            .map(|((w, v), u)| w * (v - 2.0 * u - k))
            .sum();
        let h = -t.quadratic_form(&d);
        return Extended::Finite(linear + h);
    }
    let v = eq.potential();
    let linear = mu.integrate(|x| v.eval(x) - eq.effective_potential(x));
    match log_energy(mu, mv) {
        Extended::Finite(h) => Extended::Finite(linear + h),
        inf => inf,
    }
}

/// `∫ f dα` by Gauss–Legendre in `θ` with breakpoints; used by sweeps
/// whose integrands are closed forms rather than series.
pub fn alpha_integral_theta<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rule: &GaussLegendre) -> f64 {
    crate::quad::integrate_pieces(breaks, rule, |t| 2.0 / PI * t.sin().powi(2) * f(2.0 * t.cos()))
}

/// Sign changes of a `θ`-function on `(0, π)`; exposed for oracles.
pub fn theta_roots<F: FnMut(f64) -> f64>(f: F, samples: usize) -> Vec<f64> {
    sign_changes(f, 0.0, PI, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::grid_from_density;
    use approx::assert_abs_diff_eq;

    fn mode(n: usize, c: f64) -> SignedDifference {
        SignedDifference::mode(n, c).unwrap()
    }

    #[test]
    fn single_mode_values() {
        for n in [1, 2, 5, 9] {
            let d = mode(n, 0.3);
            assert_abs_diff_eq!(entropy_h_diff(&d), 0.09 / (2.0 * n as f64), epsilon = 1e-16);
            assert_abs_diff_eq!(fisher_i_diff(&d), 0.045, epsilon = 1e-16);
            assert_abs_diff_eq!(fisher_j_diff(&d), 0.09, epsilon = 1e-14);
            assert_abs_diff_eq!(total_variation_diff(&d), 0.6 / PI, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(lp_information_diff(&mode(1, 0.7), 2.0).unwrap(), 0.49, epsilon = 1e-13);
        assert!(lp_information_diff(&mode(1, 0.7), 0.5).is_err());
    }

    #[test]
    fn equal_measures_vanish() {
        let mu = BetaDensity::from_coeffs(vec![1.0, 0.2, 0.1]).unwrap();
        assert_eq!(entropy_h(&mu, &mu).finite(), Some(0.0));
        assert_eq!(fisher_i(&mu, &mu).finite(), Some(0.0));
        assert_eq!(fisher_j(&mu, &mu).finite(), Some(0.0));
        assert_eq!(total_variation(&mu, &mu).finite(), Some(0.0));
    }

    #[test]
    fn tv_mixed_modes_against_refinement() {
        let d = SignedDifference::from_tail(&[0.3, 0.1]);
        let n = 400_000;
        let brute: f64 = (0..n)
            .map(|j| d.series().eval_theta((j as f64 + 0.5) * PI / n as f64).abs())
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(total_variation_diff(&d), brute, epsilon = 1e-8);
    }

    #[test]
    fn grid_log_energy_matches_spectral() {
        let beta = BetaDensity::arcsine();
        let mu = BetaDensity::from_coeffs(vec![1.0, 0.5]).unwrap();
        let gm = grid_from_density(&mu, 2000).unwrap();
        let gb = grid_from_density(&beta, 2000).unwrap();
        let h = log_energy(&gm, &gb).finite().unwrap();
        assert!((h - 0.125).abs() < 1e-4, "grid H = {h}");
        assert_eq!(log_energy(&gm, &gm), Extended::Finite(0.0));
    }

    #[test]
    fn grid_log_energy_general_path_agrees() {
        let mu = BetaDensity::from_coeffs(vec![1.0, 0.5, 0.2]).unwrap();
        let nu = BetaDensity::arcsine();
        let a = grid_from_density(&mu, 300).unwrap();
        let b = grid_from_density(&nu, 300).unwrap();
        let fast = log_energy(&a, &b).finite().unwrap();
        let c = GridMeasure::cells(a.nodes().to_vec(), a.weights().to_vec(), (-2.0, 2.0)).unwrap();
        let slow = log_energy(&c, &b).finite().unwrap();
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-10);
    }

    #[test]
    fn atoms_have_infinite_energy() {
        let a = GridMeasure::empirical(&[0.0, 0.0, 1.0]).unwrap();
        let b = GridMeasure::empirical(&[0.0, 1.0]).unwrap();
        assert!(log_energy(&a, &b).is_infinite());
        assert!(fisher_i_grid(&a, &b).is_infinite());
        assert_abs_diff_eq!(total_variation_grid(&a, &b).finite().unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn grid_fisher_informations() {
        let mu = BetaDensity::from_coeffs(vec![1.0, 0.4, -0.2]).unwrap();
        let nu = BetaDensity::arcsine();
        let a = grid_from_density(&mu, 64).unwrap();
        let b = grid_from_density(&nu, 64).unwrap();
        let i = fisher_i_grid(&a, &b).finite().unwrap();
        let j = fisher_j_grid(&a, &b).finite().unwrap();
        assert!((j - 2.0 * i).abs() < 1e-6 * i, "J = {j}, 2I = {}", 2.0 * i);
    }

    #[test]
    fn extended_serialization() {
        assert_eq!(serde_json::to_string(&Extended::PosInfinity).unwrap(), "\"inf\"");
        assert_eq!(Extended::PosInfinity.to_string(), "inf");
        assert_eq!(Extended::Finite(0.5).to_string(), "5.0000000000000000e-1");
    }
}
