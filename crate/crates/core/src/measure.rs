//! Probability measures: densities against the arcsine law, their affine
//! images, and grid measures on arbitrary compact intervals.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{ChebSeries, QuadratureRule};
use crate::error::{Error, Result};

/// Nonnegativity tolerance for Chebyshev densities.
pub const DENSITY_FLOOR: f64 = -1e-9;

/// Mass tolerance for grid measures.
pub const MASS_TOL: f64 = 1e-12;

/// Cumulative distribution interface shared by every measure type.
pub trait Distribution1d {
    /// Closed interval containing the support.
    fn support(&self) -> (f64, f64);

    fn cdf(&self, x: f64) -> f64;

    /// Left-continuous generalized inverse `inf{x : F(x) ≥ t}`.
    fn quantile(&self, t: f64) -> f64;

    /// Points where the CDF is not smooth (cell edges, atoms).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn is_atomic(&self) -> bool {
        false
    }
}

/// `μ = φ·dβ` with `φ` a nonnegative Chebyshev series of unit β-mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaDensity {
    density: ChebSeries,
}

impl BetaDensity {
    /// Validates unit mass (`γ_0 = 1` to 1e-9, then set exactly) and
    /// nonnegativity on the check grids.
    pub fn new(density: ChebSeries) -> Result<Self> {
        let g0 = density.coeff(0);
        if (g0 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!("density has β-mass {g0}, expected 1")));
        }
        let mut coeffs = density.into_coeffs();
        coeffs[0] = 1.0;
        let density = ChebSeries::new(coeffs)?;
        let min = min_on_check_grid(&density);
        if min < DENSITY_FLOOR {
            return Err(Error::InvalidMeasure(format!("density takes the negative value {min:e}")));
        }
        Ok(Self { density })
    }

    /// Divides by `γ_0` before validating.
    pub fn from_unnormalized(density: ChebSeries) -> Result<Self> {
        let g0 = density.coeff(0);
        if !(g0 > 0.0) {
            return Err(Error::InvalidMeasure(format!("total mass {g0} is not positive")));
        }
        Self::new(density.scale(1.0 / g0))
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(ChebSeries::new(coeffs)?)
    }

    /// The arcsine law itself.
    pub fn arcsine() -> Self {
        Self { density: ChebSeries::constant(1.0) }
    }

    /// The semicircle law, `dα/dβ = 1 - φ_2`.
    pub fn semicircle() -> Self {
        Self { density: ChebSeries::new(vec![1.0, 0.0, -1.0]).unwrap() }
    }

    pub fn density(&self) -> &ChebSeries {
        &self.density
    }

    pub fn degree(&self) -> usize {
        self.density.degree()
    }

    /// `dμ/dβ - dν/dβ`.
    pub fn difference(&self, other: &BetaDensity) -> SignedDifference {
        let mut coeffs = self.density.sub(&other.density).into_coeffs();
        coeffs[0] = 0.0;
        SignedDifference { coeffs: ChebSeries::new(coeffs).unwrap() }
    }

    /// `μ + d` for a zero-mass perturbation, validated as a probability density.
    pub fn perturb(&self, d: &SignedDifference) -> Result<Self> {
        Self::new(self.density.add(d.series()))
    }

    /// CDF at `x = 2cos θ`:
    /// `F = (1/π)[(π-θ) - Σ_{n≥1} γ_n sin(nθ)/n]`.
    pub fn cdf_theta(&self, theta: f64) -> f64 {
        let g = self.density.coeffs();
        let (s1, c1) = theta.sin_cos();
        let two_c = 2.0 * c1;
        let (mut prev, mut cur) = (0.0, s1);
        let mut acc = (PI - theta) * g[0];
        for (n, &gn) in g.iter().enumerate().skip(1) {
            acc -= gn * cur / n as f64;
            let next = two_c * cur - prev;
            prev = cur;
            cur = next;
        }
        (acc / PI).clamp(0.0, 1.0)
    }

    /// Closed-form CDF; errors outside `[-2, 2]`.
    pub fn cdf_checked(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 2.0) {
            return Err(Error::Domain { value: x, domain: "[-2, 2]" });
        }
        Ok(self.cdf_theta((0.5 * x).acos()))
    }

    /// Quantile via safeguarded Newton iteration in `θ`, falling back to
    /// bisection whenever the Newton step leaves the bracket.
    pub fn quantile_theta(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return PI;
        }
        if t >= 1.0 {
            return 0.0;
        }
        // F is nonincreasing in θ: F(0) = 1, F(π) = 0.
        let (mut lo, mut hi) = (0.0, PI);
        let mut theta = (1.0 - t) * PI;
        for _ in 0..200 {
            let g = self.cdf_theta(theta) - t;
            if g.abs() <= 1e-15 {
                break;
            }
            if g > 0.0 {
                lo = theta;
            } else {
                hi = theta;
            }
            if hi - lo <= 1e-15 {
                break;
            }
            let dens = self.density.eval_theta(theta);
            let newton = theta + PI * g / dens;
            theta = if dens > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        theta
    }

    pub fn rescale(&self, half_width: f64) -> Result<ScaledMeasure> {
        ScaledMeasure::new(self.clone(), half_width, 0.0)
    }

    /// Random strictly positive density: `γ_n ~ U(-1,1)ρ^n`, then
    /// `φ ↦ (φ + s)/(1 + s)` so that the minimum on the check grid is at
    /// least `0.01`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, rho: f64) -> Self {
        let mut coeffs = vec![1.0; degree + 1];
        let mut r = 1.0;
        for c in coeffs.iter_mut().skip(1) {
            r *= rho;
            *c = rng.random_range(-1.0..1.0) * r;
        }
        let series = ChebSeries::new(coeffs).unwrap();
        let m = min_on_check_grid(&series);
        let series = if m < 0.01 {
            let s = (0.01 - m) / 0.99;
            let mut c = series.scale(1.0 / (1.0 + s)).into_coeffs();
            c[0] = 1.0;
            ChebSeries::new(c).unwrap()
        } else {
            series
        };
        Self { density: series }
    }
}

impl Distribution1d for BetaDensity {
    fn support(&self) -> (f64, f64) {
        (-2.0, 2.0)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= -2.0 {
            0.0
        } else if x >= 2.0 {
            1.0
        } else {
            self.cdf_theta((0.5 * x).acos())
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        2.0 * self.quantile_theta(t).cos()
    }
}

/// Minimum of a series over the `4(N+1)`-node β-grid and a 10× denser grid.
pub fn min_on_check_grid(s: &ChebSeries) -> f64 {
    let n = s.degree() + 1;
    let coarse = QuadratureRule::beta(4 * n);
    let dense = QuadratureRule::beta(40 * n);
    coarse
        .nodes()
        .iter()
        .chain(dense.nodes())
        .chain([-2.0, 2.0].iter())
        .map(|&x| s.eval(x))
        .fold(f64::INFINITY, f64::min)
}

/// `ψ = dμ/dβ - dν/dβ`, a series with zero β-mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedDifference {
    coeffs: ChebSeries,
}

impl SignedDifference {
    pub fn new(coeffs: ChebSeries) -> Result<Self> {
        if coeffs.coeff(0) != 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "difference of probability densities must have γ_0 = 0, got {}",
                coeffs.coeff(0)
            )));
        }
        Ok(Self { coeffs })
    }

    /// `c·φ_n`, `n ≥ 1`.
    pub fn mode(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("mode 0 carries mass".into()));
        }
        Self::new(ChebSeries::mode(n, c))
    }

    /// Builds `ψ` from `γ_1, γ_2, …`.
    pub fn from_tail(tail: &[f64]) -> Self {
        let mut c = Vec::with_capacity(tail.len() + 1);
        c.push(0.0);
        c.extend_from_slice(tail);
        Self { coeffs: ChebSeries::new(c).expect("finite coefficients") }
    }

    pub fn series(&self) -> &ChebSeries {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.coeff(n)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.degree()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.scale(s) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.coeffs().iter().all(|&c| c == 0.0)
    }
}

/// Image of a β-density under `x ↦ scale·x + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledMeasure {
    base: BetaDensity,
    scale: f64,
    shift: f64,
}

impl ScaledMeasure {
    pub fn new(base: BetaDensity, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if !shift.is_finite() {
            return Err(Error::InvalidParameter("shift must be finite".into()));
        }
        Ok(Self { base, scale, shift })
    }

    pub fn base(&self) -> &BetaDensity {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn translate(&self, by: f64) -> Self {
        Self { shift: self.shift + by, ..self.clone() }
    }

    /// Pulls a point of the image back to `[-2, 2]`.
    pub fn to_reference(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }
}

impl Distribution1d for ScaledMeasure {
    fn support(&self) -> (f64, f64) {
        (self.shift - 2.0 * self.scale, self.shift + 2.0 * self.scale)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(self.to_reference(x))
    }

    fn quantile(&self, t: f64) -> f64 {
        self.shift + self.scale * self.base.quantile(t)
    }
}

/// How the masses of a grid measure are carried.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Equal cells tiling the interval, mass spread uniformly in each cell.
    Uniform,
    /// Cells with explicit edges (`nodes.len() + 1` of them).
    Cells(Vec<f64>),
    /// Point masses at the nodes.
    Atoms,
}

/// Weights on an ordered grid inside `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
    layout: Layout,
    cumulative: Vec<f64>,
}

impl GridMeasure {
    fn build(nodes: Vec<f64>, weights: Vec<f64>, interval: (f64, f64), layout: Layout) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo < hi) {
            return Err(Error::InvalidMeasure(format!("empty interval [{lo}, {hi}]")));
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: nodes.len().max(1), got: weights.len() });
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidMeasure("nodes must be strictly increasing".into()));
        }
        if nodes[0] < lo || nodes[nodes.len() - 1] > hi {
            return Err(Error::InvalidMeasure("nodes outside the interval".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("negative or non-finite weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL * weights.len().max(1) as f64 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, expected 1")));
        }
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Self { nodes, weights, interval, layout, cumulative })
    }

    /// Equal cells on `[lo, hi]` with midpoint nodes.
    pub fn uniform(lo: f64, hi: f64, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        let h = (hi - lo) / n as f64;
        let nodes = (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect();
        Self::build(nodes, weights, (lo, hi), Layout::Uniform)
    }

    /// Cells whose edges are the midpoints between consecutive nodes,
    /// closed off by the interval ends.
    pub fn cells(nodes: Vec<f64>, weights: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        let mut edges = Vec::with_capacity(nodes.len() + 1);
        edges.push(interval.0);
        edges.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        edges.push(interval.1);
        Self::build(nodes, weights, interval, Layout::Cells(edges))
    }

    pub fn atoms(nodes: Vec<f64>, weights: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        Self::build(nodes, weights, interval, Layout::Atoms)
    }

    /// Empirical measure of a sample; repeated points merge into one atom.
    pub fn empirical(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("no sample points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite sample point".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let unit = 1.0 / pts.len() as f64;
        let mut nodes: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for p in pts {
            if nodes.last() == Some(&p) {
                *weights.last_mut().unwrap() += unit;
            } else {
                nodes.push(p);
                weights.push(unit);
            }
        }
        let lo = nodes[0];
        let hi = nodes[nodes.len() - 1];
        let interval = if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Self::atoms(nodes, weights, interval)
    }

    /// Uniform cells on `[lo, hi]` carrying the exact CDF increments of `dist`.
    pub fn from_distribution<D: Distribution1d + ?Sized>(dist: &D, lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        if n_cells < 1 {
            return Err(Error::InvalidParameter("need at least one cell".into()));
        }
        let h = (hi - lo) / n_cells as f64;
        let edges: Vec<f64> = (0..=n_cells).map(|i| if i == n_cells { hi } else { lo + i as f64 * h }).collect();
        let f: Vec<f64> = edges.iter().map(|&x| dist.cdf(x)).collect();
        let mut weights: Vec<f64> = f.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("distribution puts no mass on the interval".into()));
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!(
                "interval [{lo}, {hi}] carries only mass {total}"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::uniform(lo, hi, weights)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cell edges, or `None` for atomic measures.
    pub fn edges(&self) -> Option<Vec<f64>> {
        match &self.layout {
            Layout::Atoms => None,
            Layout::Cells(e) => Some(e.clone()),
            Layout::Uniform => {
                let (lo, hi) = self.interval;
                let n = self.nodes.len();
                let h = (hi - lo) / n as f64;
                Some((0..=n).map(|i| if i == n { hi } else { lo + i as f64 * h }).collect())
            }
        }
    }

    /// Cell width of a uniform layout.
    pub fn uniform_width(&self) -> Option<f64> {
        matches!(self.layout, Layout::Uniform)
            .then(|| (self.interval.1 - self.interval.0) / self.nodes.len() as f64)
    }

    /// Same uniform grid (interval and cell count).
    pub fn same_uniform_grid(&self, other: &GridMeasure) -> bool {
        matches!(self.layout, Layout::Uniform)
            && matches!(other.layout, Layout::Uniform)
            && self.interval == other.interval
            && self.nodes.len() == other.nodes.len()
    }

    /// `∫ f dμ`; cells use a 3-point Gauss rule per cell, atoms the point value.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self.edges() {
            None => self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum(),
            Some(e) => {
                let g = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
                let gw = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
                self.weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, &w)| {
                        let (a, b) = (e[i], e[i + 1]);
                        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
                        w * g.iter().zip(&gw).map(|(x, gw)| gw * f(m + r * x)).sum::<f64>()
                    })
                    .sum()
            }
        }
    }

    /// Support hull `[first, last]` of cells (or atoms) with weight above `threshold`.
    pub fn support_hull(&self, threshold: f64) -> Option<(f64, f64)> {
        let first = self.weights.iter().position(|&w| w > threshold)?;
        let last = self.weights.iter().rposition(|&w| w > threshold)?;
        match self.edges() {
            None => Some((self.nodes[first], self.nodes[last])),
            Some(e) => Some((e[first], e[last + 1])),
        }
    }
}

impl Distribution1d for GridMeasure {
    fn support(&self) -> (f64, f64) {
        self.interval
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.edges() {
            None => {
                let k = self.nodes.partition_point(|&n| n <= x);
                self.cumulative[k].min(1.0)
            }
            Some(e) => {
                if x <= e[0] {
                    return 0.0;
                }
                if x >= e[e.len() - 1] {
                    return 1.0;
                }
                let i = e.partition_point(|&b| b <= x) - 1;
                let frac = (x - e[i]) / (e[i + 1] - e[i]);
                (self.cumulative[i] + self.weights[i] * frac).min(1.0)
            }
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        let t = t.clamp(0.0, 1.0);
        // first index whose cumulative mass reaches t with positive weight
        let mut i = self.cumulative[1..].partition_point(|&c| c < t).min(n - 1);
        while i + 1 < n && self.weights[i] == 0.0 {
            i += 1;
        }
        match self.edges() {
            None => self.nodes[i],
            Some(e) => {
                if t <= 0.0 {
                    let first = self.weights.iter().position(|&w| w > 0.0).unwrap_or(0);
                    return e[first];
                }
                let w = self.weights[i];
                let frac = if w > 0.0 { ((t - self.cumulative[i]) / w).clamp(0.0, 1.0) } else { 1.0 };
                e[i] + frac * (e[i + 1] - e[i])
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.edges().unwrap_or_else(|| self.nodes.clone())
    }

    fn is_atomic(&self) -> bool {
        matches!(self.layout, Layout::Atoms)
    }
}

/// Any supported measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Beta(BetaDensity),
    Scaled(ScaledMeasure),
    Grid(GridMeasure),
}

impl Measure {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MeasureSpec = serde_json::from_str(text)?;
        spec.into_measure()
    }

    pub fn as_beta(&self) -> Option<&BetaDensity> {
        match self {
            Measure::Beta(b) => Some(b),
            _ => None,
        }
    }
}

impl Distribution1d for Measure {
    fn support(&self) -> (f64, f64) {
        match self {
            Measure::Beta(m) => m.support(),
            Measure::Scaled(m) => m.support(),
            Measure::Grid(m) => m.support(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            Measure::Beta(m) => m.cdf(x),
            Measure::Scaled(m) => m.cdf(x),
            Measure::Grid(m) => m.cdf(x),
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        match self {
            Measure::Beta(m) => m.quantile(t),
            Measure::Scaled(m) => m.quantile(t),
            Measure::Grid(m) => m.quantile(t),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Measure::Grid(m) => m.breakpoints(),
            _ => Vec::new(),
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Measure::Grid(m) if m.is_atomic())
    }
}

/// JSON measure specification.
///
/// ```json
/// {"kind":"cheb","coeffs":[1.0, 0.2]}
/// {"kind":"grid","nodes":[-1,0,1],"weights":[0.25,0.5,0.25],"interval":[-1.5,1.5]}
/// {"kind":"samples","points":[0.1,-0.3,0.7]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Cheb { coeffs: Vec<f64> },
    Grid { nodes: Vec<f64>, weights: Vec<f64>, interval: [f64; 2] },
    Samples { points: Vec<f64> },
}

impl MeasureSpec {
    pub fn into_measure(self) -> Result<Measure> {
        Ok(match self {
            MeasureSpec::Cheb { coeffs } => Measure::Beta(BetaDensity::from_coeffs(coeffs)?),
            MeasureSpec::Grid { nodes, weights, interval } => {
                Measure::Grid(GridMeasure::cells(nodes, weights, (interval[0], interval[1]))?)
            }
            MeasureSpec::Samples { points } => Measure::Grid(GridMeasure::empirical(&points)?),
        })
    }
}

/// Equal-width cells on `[-2, 2]` with masses from exact CDF differences.
pub fn grid_from_density(mu: &BetaDensity, n_cells: usize) -> Result<GridMeasure> {
    if n_cells < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 cells, got {n_cells}")));
    }
    GridMeasure::from_distribution(mu, -2.0, 2.0, n_cells)
}
