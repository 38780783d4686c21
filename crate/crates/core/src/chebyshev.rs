//! Chebyshev bases on `[-2, 2]` and Gauss rules for the arcsine and
//! semicircle laws.
//!
//! `φ_n(x) = T_n(x/2)` is orthogonal for the arcsine law
//! `β(dx) = dx / (π√(4-x²))` with `⟨φ_0,φ_0⟩ = 1` and `⟨φ_n,φ_n⟩ = 1/2`;
//! `ψ_n(x) = U_n(x/2)` is orthonormal for the semicircle law
//! `α(dx) = √(4-x²)/(2π) dx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the reference interval.
pub const EDGE: f64 = 2.0;

/// `φ_n(x) = T_n(x/2)` for `|x| ≤ 2`.
pub fn eval_phi(n: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= EDGE) {
        return Err(Error::Domain { value: x, domain: "[-2, 2]" });
    }
    Ok(phi_unchecked(n, x))
}

fn phi_unchecked(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.5 * x,
        _ => {
            let (mut a, mut b) = (1.0, 0.5 * x);
            for _ in 2..=n {
                let c = x * b - a;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// `ψ_n(x) = U_n(x/2)` for `|x| < 2`.
pub fn eval_psi(n: usize, x: f64) -> Result<f64> {
    eval_psi_with(n, x, false)
}

/// `ψ_n(x)`; when `allow_endpoints` is set, `x = ±2` returns the limit
/// `(n+1)·sign(x)^n`.
pub fn eval_psi_with(n: usize, x: f64, allow_endpoints: bool) -> Result<f64> {
    if x.abs() < EDGE {
        return Ok(psi_unchecked(n, x));
    }
    if allow_endpoints && x.abs() == EDGE {
        let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        return Ok(sign * (n as f64 + 1.0));
    }
    Err(Error::Domain { value: x, domain: "(-2, 2)" })
}

fn psi_unchecked(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            for _ in 2..=n {
                let c = x * b - a;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// A polynomial `Σ γ_n φ_n(x)` in the first-kind basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient vector".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coefficient {bad}")));
        }
        Ok(Self { coeffs })
    }

    /// The zero series of the given degree.
    pub fn zeros(degree: usize) -> Self {
        Self { coeffs: vec![0.0; degree + 1] }
    }

    /// `c·φ_n`.
    pub fn mode(n: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = c;
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Interpolates `f` on the default β-rule for degree `degree`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, degree: usize) -> Self {
        let rule = QuadratureRule::beta_for_degree(degree);
        let values: Vec<f64> = rule.nodes().iter().map(|&x| f(x)).collect();
        rule.project(&values, degree).expect("rule sized for degree")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Clenshaw evaluation; valid for any real `x` as a polynomial.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        if n == 1 {
            return self.coeffs[0];
        }
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (1..n).rev() {
            let b0 = self.coeffs[k] + x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + 0.5 * x * b1 - b2
    }

    /// `Σ γ_n cos(nθ)`, i.e. the series at `x = 2cos θ`.
    pub fn eval_theta(&self, theta: f64) -> f64 {
        self.eval(2.0 * theta.cos())
    }

    /// Derivative as a second-kind series, from `φ_n' = (n/2) ψ_{n-1}`.
    pub fn derivative(&self) -> SecondKindSeries {
        if self.coeffs.len() == 1 {
            return SecondKindSeries { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &g)| 0.5 * n as f64 * g)
            .collect();
        SecondKindSeries { coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| f(self.coeff(k), other.coeff(k))).collect();
        Self { coeffs }
    }

    /// Applies `γ_n ↦ m(n)·γ_n`.
    pub fn map_modes(&self, m: impl Fn(usize) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, &g)| m(n) * g).collect();
        Self { coeffs }
    }

    /// `‖f‖²_{L²(β)} = γ_0² + ½Σ_{n≥1} γ_n²`.
    pub fn beta_norm_sq(&self) -> f64 {
        self.coeffs[0].powi(2) + 0.5 * self.coeffs[1..].iter().map(|g| g * g).sum::<f64>()
    }
}

/// A polynomial `Σ c_n ψ_n(x)` in the second-kind basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondKindSeries {
    coeffs: Vec<f64>,
}

impl SecondKindSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient vector".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coefficient {bad}")));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            let b0 = c + x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        b1
    }

    /// `sin θ · f(2cos θ) = Σ c_n sin((n+1)θ)`; bounded at the endpoints.
    pub fn eval_theta_sin(&self, theta: f64) -> f64 {
        let (s1, c1) = theta.sin_cos();
        let two_c = 2.0 * c1;
        let (mut prev, mut cur) = (0.0, s1);
        let mut acc = 0.0;
        for &c in &self.coeffs {
            acc += c * cur;
            let next = two_c * cur - prev;
            prev = cur;
            cur = next;
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect() }
    }

    /// `‖f‖²_{L²(α)} = Σ c_n²`.
    pub fn alpha_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Reference weight of a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Semicircle law.
    Alpha,
    /// Arcsine law.
    Beta,
}

/// Gauss rule for `α` or `β`; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: WeightKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `K`-point Gauss–Chebyshev rule for `β`: nodes `2cos(π(2k-1)/(2K))`,
    /// equal weights; exact through degree `2K-1`.
    pub fn beta(k: usize) -> Self {
        assert!(k >= 1);
        let kf = k as f64;
        let nodes = (1..=k)
            .map(|j| 2.0 * (PI * (2.0 * j as f64 - 1.0) / (2.0 * kf)).cos())
            .collect();
        Self { kind: WeightKind::Beta, nodes, weights: vec![1.0 / kf; k] }
    }

    /// `K`-point Gauss rule for `α`: nodes `2cos(jπ/(K+1))`, weights
    /// `2 sin²(jπ/(K+1)) / (K+1)`.
    pub fn alpha(k: usize) -> Self {
        assert!(k >= 1);
        let kp = k as f64 + 1.0;
        let (nodes, weights) = (1..=k)
            .map(|j| {
                let t = j as f64 * PI / kp;
                (2.0 * t.cos(), 2.0 * t.sin().powi(2) / kp)
            })
            .unzip();
        Self { kind: WeightKind::Alpha, nodes, weights }
    }

    /// β-rule with `4(N+1)` nodes; exact for every quadratic functional of
    /// degree-`N` series.
    pub fn beta_for_degree(degree: usize) -> Self {
        Self::beta(4 * (degree + 1))
    }

    pub fn alpha_for_degree(degree: usize) -> Self {
        Self::alpha(4 * (degree + 1))
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::LengthMismatch { expected: self.nodes.len(), got: values.len() });
        }
        Ok(values.iter().zip(&self.weights).map(|(v, w)| v * w).sum())
    }

    /// Coefficients `γ_n = c_n ∫ f φ_n dβ` (`c_0 = 1`, `c_n = 2`) from values
    /// at the β-nodes of this rule.
    pub fn project(&self, values: &[f64], degree: usize) -> Result<ChebSeries> {
        if self.kind != WeightKind::Beta {
            return Err(Error::InvalidParameter("projection needs a beta rule".into()));
        }
        if values.len() != self.nodes.len() {
            return Err(Error::LengthMismatch { expected: self.nodes.len(), got: values.len() });
        }
        if degree >= self.nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} not resolved by {} nodes",
                self.nodes.len()
            )));
        }
        let k = self.nodes.len() as f64;
        let coeffs = (0..=degree)
            .map(|n| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (n as f64 * PI * (2.0 * j as f64 + 1.0) / (2.0 * k)).cos())
                    .sum();
                let c = if n == 0 { 1.0 } else { 2.0 };
                c * s / k
            })
            .collect();
        ChebSeries::new(coeffs)
    }
}

/// `∫ f dβ = γ_0`.
pub fn beta_integral(f: &ChebSeries) -> f64 {
    f.coeff(0)
}

/// `∫ f dα = γ_0 - γ_2/2`, from `T_0 = U_0`, `T_2 = (U_2 - U_0)/2` and
/// `∫ψ_n dα = δ_{n0}`.
pub fn alpha_integral(f: &ChebSeries) -> f64 {
    f.coeff(0) - 0.5 * f.coeff(2)
}

/// `∫ f dα` for a general function using the given α-rule.
pub fn alpha_integral_fn<F: FnMut(f64) -> f64>(f: F, nodes: usize) -> f64 {
    QuadratureRule::alpha(nodes).integrate(f)
}
