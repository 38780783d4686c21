//! Equilibrium measures of external potentials, the compression map, the
//! global transport check and the double-well example.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::QuadratureRule;
use crate::error::{Error, Result};
use crate::functionals::{relative_entropy_ev, Extended};
use crate::logkernel::{point_cell_average, Toeplitz};
use crate::measure::{BetaDensity, Distribution1d, GridMeasure, ScaledMeasure};
use crate::operators::hilbert_density;
use crate::transport::wasserstein_p;

/// Support detection threshold on cell weights.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `Σ c_k x^k`.
    Poly(Vec<f64>),
    /// `min((x-a1)², (x-a2)²)/2`.
    DoubleWell { a1: f64, a2: f64 },
}

/// External potential with a quadratic growth certificate:
/// `V(x) ≥ (A/2)x²` for `|x| > B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    growth_a: f64,
    growth_b: f64,
    lower_bound: f64,
}

/// JSON potential specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Poly { coeffs: Vec<f64> },
    DoubleWell { a1: f64, a2: f64 },
}

impl Potential {
    /// Certifies growth for even degree ≥ 2 with positive leading
    /// coefficient: `A = c_2` for quadratics, `A = 1` otherwise.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let mut c = coeffs;
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
        }
        let deg = c.len() - 1;
        let lead = c[deg];
        if deg < 2 || deg % 2 == 1 || lead <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cannot certify quadratic growth for a degree-{deg} polynomial with leading coefficient {lead}"
            )));
        }
        let a = if deg == 2 { lead } else { 1.0 };
        let kind = PotentialKind::Poly(c);
        let mut v = Self { kind, growth_a: a, growth_b: 0.0, lower_bound: f64::NEG_INFINITY };
        v.growth_b = v.certify_radius();
        v.lower_bound = v.sampled_minimum();
        Ok(v)
    }

    /// `x²/2`.
    pub fn quadratic() -> Self {
        Self::polynomial(vec![0.0, 0.0, 0.5]).unwrap()
    }

    /// Double well with minima at `a1 < a2`; requires `a2 - a1 > 4`.
    pub fn double_well(a1: f64, a2: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite()) || !(a2 - a1 > 4.0) {
            return Err(Error::InvalidParameter(format!(
                "double well needs a1 < a2 with a2 - a1 > 4, got ({a1}, {a2})"
            )));
        }
        let m = a1.abs().max(a2.abs());
        Ok(Self {
            kind: PotentialKind::DoubleWell { a1, a2 },
            growth_a: 0.5,
            growth_b: m * (2.0 + std::f64::consts::SQRT_2),
            lower_bound: 0.0,
        })
    }

    pub fn from_spec(spec: PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Poly { coeffs } => Self::polynomial(coeffs),
            PotentialSpec::DoubleWell { a1, a2 } => Self::double_well(a1, a2),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn growth_a(&self) -> f64 {
        self.growth_a
    }

    pub fn growth_b(&self) -> f64 {
        self.growth_b
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Poly(c) => c.iter().rev().fold(0.0, |acc, &k| acc * x + k),
            PotentialKind::DoubleWell { a1, a2 } => 0.5 * (x - a1).powi(2).min((x - a2).powi(2)),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Poly(c) => {
                c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck)
            }
            PotentialKind::DoubleWell { a1, a2 } => {
                if (x - a1).abs() <= (x - a2).abs() {
                    x - a1
                } else {
                    x - a2
                }
            }
        }
    }

    /// Default solver interval `[-2B-4, 2B+4]`, widened to contain both
    /// wells for a double well.
    pub fn default_interval(&self) -> (f64, f64) {
        let r = match self.kind {
            PotentialKind::DoubleWell { a1, a2 } => a1.abs().max(a2.abs()) + 4.0,
            PotentialKind::Poly(_) => 2.0 * self.growth_b + 4.0,
        };
        (-r, r)
    }

    /// Smallest `B` with `V(x) ≥ (A/2)x²` on `|x| > B`.
    fn certify_radius(&self) -> f64 {
        let PotentialKind::Poly(c) = &self.kind else { return self.growth_b };
        let deg = c.len() - 1;
        let cauchy = 1.0 + c[..deg].iter().map(|k| (k / c[deg]).abs()).fold(self.growth_a / c[deg], f64::max);
        let gap = |x: f64| self.eval(x) - 0.5 * self.growth_a * x * x;
        let n = 20_000;
        let step = cauchy / n as f64;
        let mut b: f64 = 0.0;
        for sign in [-1.0, 1.0] {
            for k in (0..=n).rev() {
                let x = sign * k as f64 * step;
                if gap(x) < 0.0 {
                    let y = sign * (k + 1) as f64 * step;
                    let r = crate::quad::bracketed_root(gap, x, y);
                    b = b.max(r.abs().max(x.abs()) * (1.0 + 1e-12) + 1e-12);
                    break;
                }
            }
        }
        b
    }

    /// Minimum over the critical points found on a sample grid and the
    /// ends of the default interval.
    fn sampled_minimum(&self) -> f64 {
        let r = 2.0 * self.growth_b + 4.0;
        let crit = crate::quad::sign_changes(|x| self.derivative(x), -r, r, 20_000);
        crit.iter().chain([-r, r].iter()).map(|&x| self.eval(x)).fold(f64::INFINITY, f64::min) - 1e-12
    }

    /// `V(x) ≥ lower bound` and the growth certificate on a sample grid.
    pub fn check_certificate(&self, radius: f64, samples: usize) -> bool {
        (0..=samples).all(|k| {
            let x = -radius + 2.0 * radius * k as f64 / samples as f64;
            let v = self.eval(x);
            v >= self.lower_bound - 1e-12 && (x.abs() <= self.growth_b || v >= 0.5 * self.growth_a * x * x - 1e-12)
        })
    }
}

/// Cell average of `V` by three-point Gauss–Legendre.
fn cell_average<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = (0.6f64).sqrt();
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    (5.0 * f(m - r * h) + 8.0 * f(m) + 5.0 * f(m + r * h)) / 18.0
}

/// Discretized `E_V(w) = Σ V̄_i w_i - wᵀ T w` on uniform cells.
#[derive(Debug, Clone)]
pub struct DiscreteEnergy {
    lo: f64,
    hi: f64,
    cell_potential: Vec<f64>,
    toeplitz: Toeplitz,
}

impl DiscreteEnergy {
    pub fn new(v: &Potential, interval: (f64, f64), n_cells: usize) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid interval [{lo}, {hi}]")));
        }
        if n_cells < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 cells, got {n_cells}")));
        }
        let h = (hi - lo) / n_cells as f64;
        let f = |x: f64| v.eval(x);
        let cell_potential =
            (0..n_cells).map(|i| cell_average(&f, lo + i as f64 * h, lo + (i + 1) as f64 * h)).collect();
        Ok(Self { lo, hi, cell_potential, toeplitz: Toeplitz::log_kernel(n_cells, h) })
    }

    pub fn len(&self) -> usize {
        self.cell_potential.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_potential.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn energy(&self, w: &[f64]) -> f64 {
        let tw = self.toeplitz.matvec(w);
        w.iter().zip(&self.cell_potential).zip(&tw).map(|((w, v), t)| w * (v - t)).sum()
    }

    /// `V̄ - 2Tw`.
    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let tw = self.toeplitz.matvec(w);
        self.cell_potential.iter().zip(&tw).map(|(v, t)| v - 2.0 * t).collect()
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop when the simplex optimality gap `⟨g, w⟩ - min g` falls below this.
    pub gap_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 50_000, gap_tolerance: 1e-11 }
    }
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    measure: GridMeasure,
    robin_constant: f64,
    potential: Potential,
    cell_potential: Vec<f64>,
    toeplitz: Toeplitz,
    support: (f64, f64),
    residual: f64,
    iterations: usize,
    gap: f64,
}

impl EquilibriumResult {
    /// Wraps given weights on the uniform grid of `energy` (no solve).
    pub fn from_weights(v: &Potential, energy: &DiscreteEnergy, weights: Vec<f64>) -> Result<Self> {
        let (lo, hi) = energy.interval();
        let measure = GridMeasure::uniform(lo, hi, weights)?;
        let grad = energy.gradient(measure.weights());
        let gap = simplex_gap(&grad, measure.weights());
        Ok(Self::assemble(v.clone(), energy.clone(), measure, 0, gap))
    }

    fn assemble(potential: Potential, energy: DiscreteEnergy, measure: GridMeasure, iterations: usize, gap: f64) -> Self {
        let n = measure.len();
        let w = measure.weights();
        let tw = energy.toeplitz.matvec(w);
        let mut pool: Vec<f64> = (0..n)
            .filter(|&i| w[i] > 1e-3 / n as f64)
            .map(|i| energy.cell_potential[i] - 2.0 * tw[i])
            .collect();
        pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let robin_constant = if pool.is_empty() { f64::NAN } else { median(&pool) };
        let support = measure.support_hull(SUPPORT_THRESHOLD).unwrap_or((f64::NAN, f64::NAN));
        let mut out = Self {
            measure,
            robin_constant,
            potential,
            cell_potential: energy.cell_potential,
            toeplitz: energy.toeplitz,
            support,
            residual: 0.0,
            iterations,
            gap,
        };
        out.residual = out.residual_with(&out.cell_potential);
        out
    }

    pub fn measure(&self) -> &GridMeasure {
        &self.measure
    }

    pub fn robin_constant(&self) -> f64 {
        self.robin_constant
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn cell_potential(&self) -> &[f64] {
        &self.cell_potential
    }

    pub fn toeplitz(&self) -> &Toeplitz {
        &self.toeplitz
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn optimality_gap(&self) -> f64 {
        self.gap
    }

    /// `U(x) = 2∫ log|x - y| μ_V(dy) + K_V` at any point.
    pub fn effective_potential(&self, x: f64) -> f64 {
        let e = self.measure.edges().expect("uniform cells");
        let s: f64 = self
            .measure
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| w * point_cell_average(x, e[i], e[i + 1]))
            .sum();
        2.0 * s + self.robin_constant
    }

    /// Cell averages of `U` on the solver grid.
    pub fn cell_effective_potential(&self) -> Vec<f64> {
        self.toeplitz.matvec(self.measure.weights()).iter().map(|t| 2.0 * t + self.robin_constant).collect()
    }

    fn residual_with(&self, v_cells: &[f64]) -> f64 {
        let u = self.cell_effective_potential();
        let w = self.measure.weights();
        let mut worst: f64 = 0.0;
        for i in 0..w.len() {
            let diff = v_cells[i] - u[i];
            worst = worst.max(if w[i] > SUPPORT_THRESHOLD { diff.abs() } else { (-diff).max(0.0) });
        }
        worst
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn simplex_gap(g: &[f64], w: &[f64]) -> f64 {
    let gw: f64 = g.iter().zip(w).map(|(a, b)| a * b).sum();
    let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
    gw - gmin
}

/// Maximum Euler–Lagrange violation at the cell midpoints: `|V - U|` on
/// the support and `max(0, U - V)` off it, with `U` evaluated pointwise
/// from the piecewise-constant density.
pub fn euler_lagrange_residual(eq: &EquilibriumResult, v: &Potential) -> f64 {
    let w = eq.measure.weights();
    eq.measure
        .nodes()
        .par_iter()
        .zip(w.par_iter())
        .map(|(&x, &wi)| {
            let diff = v.eval(x) - eq.effective_potential(x);
            if wi > SUPPORT_THRESHOLD {
                diff.abs()
            } else {
                (-diff).max(0.0)
            }
        })
        .reduce(|| 0.0, f64::max)
}

pub fn solve_equilibrium(v: &Potential, interval: (f64, f64), n_cells: usize) -> Result<EquilibriumResult> {
    solve_equilibrium_with(v, interval, n_cells, SolverOptions::default())
}

/// Minimizes the discretized energy over the simplex by accelerated
/// projected gradient with backtracking and adaptive restart.
pub fn solve_equilibrium_with(
    v: &Potential,
    interval: (f64, f64),
    n_cells: usize,
    opts: SolverOptions,
) -> Result<EquilibriumResult> {
    let energy = DiscreteEnergy::new(v, interval, n_cells)?;
    let n = n_cells;
    let mut x = vec![1.0 / n as f64; n];
    let mut gx = energy.gradient(&x);
    let mut y = x.clone();
    let mut gy = gx.clone();
    let mut t: f64 = 1.0;
    let mut lip = 1.0;
    let mut gap = simplex_gap(&gx, &x);
    let mut iterations = 0;
    while iterations < opts.max_iterations && gap >= opts.gap_tolerance {
        iterations += 1;
        // backtracking; the energy is quadratic, so the sufficient-decrease
        // test reduces to a curvature bound along z - y
        let (z, gz) = loop {
            let step: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect();
            let z = project_simplex(&step);
            let gz = energy.gradient(&z);
            let mut curv = 0.0;
            let mut sq = 0.0;
            for i in 0..n {
                let d = z[i] - y[i];
                curv += (gz[i] - gy[i]) * d;
                sq += d * d;
            }
            if curv <= lip * sq || lip > 1e12 {
                break (z, gz);
            }
            lip *= 2.0;
        };
        // gradient-based adaptive restart
        let restart: f64 = y.iter().zip(&z).zip(&x).map(|((yi, zi), xi)| (yi - zi) * (zi - xi)).sum();
        let t_next = if restart > 0.0 { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let beta = if restart > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        y = z.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        gy = if beta == 0.0 { gz.clone() } else { energy.gradient(&y) };
        x = z;
        gx = gz;
        t = t_next;
        lip *= 0.98;
        gap = simplex_gap(&gx, &x);
    }
    if gap >= opts.gap_tolerance {
        return Err(Error::NonConvergence { iterations, residual: gap });
    }
    let (lo, hi) = interval;
    let measure = GridMeasure::uniform(lo, hi, x)?;
    Ok(EquilibriumResult::assemble(v.clone(), energy, measure, iterations, gap))
}

/// Odd, increasing, `C¹` map equal to the identity on `[-L, L]` and
/// `±2L³/(3L² - x²)` beyond, blowing up at `±√3 L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionMap {
    l: f64,
}

impl CompressionMap {
    pub fn new(l: f64) -> Result<Self> {
        let min = 3f64.powf(0.25);
        if !(l >= min * (1.0 - 1e-15)) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!("L must be at least 3^(1/4), got {l}")));
        }
        Ok(Self { l })
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    /// Open domain radius `√3 L`.
    pub fn radius(&self) -> f64 {
        3f64.sqrt() * self.l
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.abs() < self.radius()) {
            return Err(Error::Domain { value: x, domain: "(-√3 L, √3 L)" });
        }
        let l = self.l;
        if x.abs() <= l {
            Ok(x)
        } else {
            Ok(x.signum() * 2.0 * l.powi(3) / (3.0 * l * l - x * x))
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        if !(x.abs() < self.radius()) {
            return Err(Error::Domain { value: x, domain: "(-√3 L, √3 L)" });
        }
        let l = self.l;
        if x.abs() <= l {
            Ok(1.0)
        } else {
            Ok(4.0 * l.powi(3) * x.abs() / (3.0 * l * l - x * x).powi(2))
        }
    }

    /// `log|(φ(x)-φ(y))/(x-y)| ≤ 2log|φ(x)| + 2log|φ(y)|`.
    pub fn log_ratio_bound_holds(&self, x: f64, y: f64) -> Result<bool> {
        let (fx, fy) = (self.eval(x)?, self.eval(y)?);
        let lhs = ((fx - fy) / (x - y)).abs().ln();
        let rhs = 2.0 * fx.abs().ln() + 2.0 * fy.abs().ln();
        Ok(lhs <= rhs + 1e-12)
    }
}

/// A test measure for the global transport check.
#[derive(Debug, Clone)]
pub struct TestMeasure {
    pub label: String,
    pub measure: GridMeasure,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportRow {
    pub label: String,
    pub relative_entropy: Option<f64>,
    pub w1: f64,
    pub ratio: Option<f64>,
    pub note: Option<String>,
}

/// Certified constants for the global inequality.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthCertificate {
    /// `V - U ≥ a x²` for `|x| > b` on the sample range.
    pub a: f64,
    pub b: f64,
    pub support_radius: f64,
    pub l: f64,
    pub constant: f64,
    pub sample_radius: f64,
    /// `(L, C(L))` at larger admissible `L`.
    pub sensitivity: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    pub certificate: GrowthCertificate,
    pub rows: Vec<TransportRow>,
    pub min_ratio: Option<f64>,
    pub all_above: bool,
}

/// `2A/(12AL² + 9)`.
pub fn chain_constant(a: f64, l: f64) -> f64 {
    2.0 * a / (12.0 * a * l * l + 9.0)
}

/// Picks `A_T = A/2`, the smallest sampled `B_T` with `V - U ≥ A_T x²`
/// beyond it, and `L = max(B_T, 2·support radius, 3^{1/4})`.
pub fn certify_constant(v: &Potential, eq: &EquilibriumResult) -> GrowthCertificate {
    let a = 0.5 * v.growth_a();
    let (s0, s1) = eq.support();
    let radius = s0.abs().max(s1.abs());
    let (lo, hi) = eq.measure().interval();
    let sample_radius = 10.0 * lo.abs().max(hi.abs()).max(v.growth_b() + 1.0);
    let n = 4000;
    let mut b: f64 = 0.0;
    for k in 0..=n {
        let r = sample_radius * k as f64 / n as f64;
        for x in [r, -r] {
            if v.eval(x) - eq.effective_potential(x) < a * x * x {
                b = b.max(r + sample_radius / n as f64);
            }
        }
    }
    let l = b.max(2.0 * radius).max(3f64.powf(0.25));
    let sensitivity = [1.0, 1.5, 2.0, 3.0].iter().map(|f| (f * l, chain_constant(a, f * l))).collect();
    GrowthCertificate { a, b, support_radius: radius, l, constant: chain_constant(a, l), sample_radius, sensitivity }
}

/// Checks `C W₁²(μ, μ_V) ≤ E_V(μ|μ_V)` on each test measure.
pub fn global_transport_check(v: &Potential, eq: &EquilibriumResult, tests: &[TestMeasure]) -> TransportReport {
    let certificate = certify_constant(v, eq);
    let rows: Vec<TransportRow> = tests
        .iter()
        .map(|t| {
            if t.measure.is_atomic() {
                return TransportRow {
                    label: t.label.clone(),
                    relative_entropy: None,
                    w1: f64::NAN,
                    ratio: None,
                    note: Some("atomic test measure skipped".into()),
                };
            }
            let w1 = wasserstein_p(&t.measure, eq.measure(), 1.0).unwrap_or(f64::NAN);
            let e = match relative_entropy_ev(&t.measure, eq) {
                Extended::Finite(e) => Some(e),
                Extended::PosInfinity => None,
            };
            let (ratio, note) = if w1 < 1e-12 {
                (None, Some("ratio undefined: measure equals the equilibrium".to_string()))
            } else {
                (e.map(|e| e / (w1 * w1)), None)
            };
            TransportRow { label: t.label.clone(), relative_entropy: e, w1, ratio, note }
        })
        .collect();
    let min_ratio = rows.iter().filter_map(|r| r.ratio).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))));
    let all_above = rows.iter().filter_map(|r| r.ratio).all(|r| r >= certificate.constant);
    TransportReport { certificate, rows, min_ratio, all_above }
}

struct Dilated<'a> {
    base: &'a GridMeasure,
    center: f64,
    factor: f64,
}

impl Distribution1d for Dilated<'_> {
    fn support(&self) -> (f64, f64) {
        let (a, b) = self.base.support();
        (self.center + self.factor * (a - self.center), self.center + self.factor * (b - self.center))
    }

    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(self.center + (x - self.center) / self.factor)
    }

    fn quantile(&self, t: f64) -> f64 {
        self.center + self.factor * (self.base.quantile(t) - self.center)
    }
}

fn shift_cells(w: &[f64], k: isize) -> Option<Vec<f64>> {
    let n = w.len() as isize;
    let mut out = vec![0.0; w.len()];
    for (i, &x) in w.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let j = i as isize + k;
        if j < 0 || j >= n {
            if x > SUPPORT_THRESHOLD {
                return None;
            }
            continue;
        }
        out[j as usize] = x;
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    Some(out)
}

/// Translates, dilations and mixtures of `μ_V`, plus β-class measures,
/// all placed on the solver grid.
pub fn default_test_family(eq: &EquilibriumResult, seed: u64) -> Vec<TestMeasure> {
    use rand::{Rng, SeedableRng};
    let mv = eq.measure();
    let (lo, hi) = mv.interval();
    let h = mv.uniform_width().expect("uniform solver grid");
    let n = mv.len();
    let (s0, s1) = eq.support();
    let center = 0.5 * (s0 + s1);
    let mut out = Vec::new();
    let on_grid = |w: Vec<f64>| GridMeasure::uniform(lo, hi, w).ok();
    let fits = |a: f64, b: f64| a >= lo && b <= hi;
    for s in [0.1, 0.2, 0.5, 1.0, 1.5, -0.1, -0.5, -1.0] {
        let k = (s / h).round() as isize;
        if let Some(m) = shift_cells(mv.weights(), k).and_then(on_grid) {
            out.push(TestMeasure { label: format!("translate({s})"), measure: m });
        }
    }
    for f in [0.5, 0.8, 0.9, 1.1, 1.25, 1.6] {
        let d = Dilated { base: mv, center, factor: f };
        let (a, b) = (center + f * (s0 - center), center + f * (s1 - center));
        if fits(a, b) {
            if let Ok(m) = GridMeasure::from_distribution(&d, lo, hi, n) {
                out.push(TestMeasure { label: format!("dilate({f})"), measure: m });
            }
        }
    }
    for (s, lam) in [(1.0, 0.25), (1.0, 0.5), (-1.0, 0.5)] {
        let k = (s / h).round() as isize;
        if let Some(t) = shift_cells(mv.weights(), k) {
            let w: Vec<f64> = mv.weights().iter().zip(&t).map(|(a, b)| (1.0 - lam) * a + lam * b).collect();
            if let Some(m) = on_grid(w) {
                out.push(TestMeasure { label: format!("mix({lam}, translate({s}))"), measure: m });
            }
        }
    }
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut beta_class: Vec<(String, ScaledMeasure)> = vec![
        ("arcsine(0.5)".into(), ScaledMeasure::new(BetaDensity::arcsine(), 0.5, mid).unwrap()),
        ("arcsine(0.9)".into(), ScaledMeasure::new(BetaDensity::arcsine(), 0.9, mid).unwrap()),
        ("semicircle(0.5, +0.5)".into(), ScaledMeasure::new(BetaDensity::semicircle(), 0.5, mid + 0.5).unwrap()),
        (
            "semicircle(0.25, far)".into(),
            ScaledMeasure::new(BetaDensity::semicircle(), 0.25, mid + 0.7 * half).unwrap(),
        ),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for k in 0..4 {
        let deg = rng.random_range(1..=12);
        let mu = BetaDensity::random(&mut rng, deg, 0.7);
        let scale = rng.random_range(0.3..0.9) * half / 2.0;
        let shift = mid + rng.random_range(-0.3..0.3) * half;
        beta_class.push((format!("random[{k}]"), ScaledMeasure::new(mu, scale, shift).unwrap()));
    }
    for (label, m) in beta_class {
        let (a, b) = m.support();
        if fits(a, b) {
            if let Ok(g) = GridMeasure::from_distribution(&m, lo, hi, n) {
                out.push(TestMeasure { label, measure: g });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct WellReport {
    pub center: f64,
    pub support: (f64, f64),
    /// `sup |Hμ_i - V'|` over the open support.
    pub sup_hilbert_gap: f64,
    /// `∫ (Hμ_i - V')² dμ_i`.
    pub fisher_information: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleWellReport {
    pub a1: f64,
    pub a2: f64,
    pub wells: Vec<WellReport>,
    pub w1_between: f64,
    /// Both measures have vanishing Fisher information against `V` yet differ.
    pub lsi_obstructed: bool,
}

/// Two translated semicircles, each solving `Hμ = V'` on its own well.
pub fn double_well_demo(a1: f64, a2: f64) -> Result<DoubleWellReport> {
    let v = Potential::double_well(a1, a2)?;
    let semi = BetaDensity::semicircle();
    let h = hilbert_density(&semi);
    let rule = QuadratureRule::alpha_for_degree(8);
    let mut wells = Vec::new();
    let mut measures = Vec::new();
    for a in [a1, a2] {
        let mut sup: f64 = 0.0;
        let m = 4000;
        for k in 1..m {
            let x = a - 2.0 + 4.0 * k as f64 / m as f64;
            sup = sup.max((h.eval(x - a) - v.derivative(x)).abs());
        }
        let fisher = rule.integrate(|y| (h.eval(y) - v.derivative(y + a)).powi(2));
        wells.push(WellReport { center: a, support: (a - 2.0, a + 2.0), sup_hilbert_gap: sup, fisher_information: fisher });
        measures.push(ScaledMeasure::new(semi.clone(), 1.0, a)?);
    }
    let w1_between = wasserstein_p(&measures[0], &measures[1], 1.0)?;
    let lsi_obstructed = wells.iter().all(|w| w.fisher_information < 1e-12) && w1_between > 0.0;
    Ok(DoubleWellReport { a1, a2, wells, w1_between, lsi_obstructed })
}
