//! Diagonal and shift operators on Chebyshev coefficients.

use crate::chebyshev::{ChebSeries, SecondKindSeries};
use crate::error::{Error, Result};
use crate::measure::{BetaDensity, SignedDifference};

/// Operator selector, used by sweeps and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    /// Inverse counting operator (log-kernel convolution against β).
    Energy,
    /// Counting operator.
    Number,
    /// Squared counting operator.
    Laplacian,
    /// Difference-quotient operator into the second-kind basis.
    Quotient,
    /// Heat-type semigroup at time `t ≥ 0`.
    Semigroup(f64),
}

/// `γ_0 ↦ 0`, `γ_n ↦ γ_n / n`.
pub fn apply_e(f: &ChebSeries) -> ChebSeries {
    f.map_modes(|n| if n == 0 { 0.0 } else { 1.0 / n as f64 })
}

/// `γ_n ↦ n γ_n`.
pub fn apply_n(f: &ChebSeries) -> ChebSeries {
    f.map_modes(|n| n as f64)
}

/// `γ_n ↦ n² γ_n`.
pub fn apply_l(f: &ChebSeries) -> ChebSeries {
    f.map_modes(|n| (n * n) as f64)
}

/// `φ_n ↦ ψ_{n-1} / 2`; constants are annihilated.
pub fn apply_u(f: &ChebSeries) -> SecondKindSeries {
    let g = f.coeffs();
    let coeffs = if g.len() <= 1 { vec![0.0] } else { g[1..].iter().map(|c| 0.5 * c).collect() };
    SecondKindSeries::new(coeffs).expect("finite coefficients")
}

/// `γ_n ↦ e^{-tn} γ_n`.
pub fn semigroup(f: &ChebSeries, t: f64) -> Result<ChebSeries> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("semigroup time must be nonnegative, got {t}")));
    }
    Ok(f.map_modes(|n| (-t * n as f64).exp()))
}

/// Applies the operator named by `tag`; `Quotient` lands in the
/// second-kind basis and is rejected here.
pub fn apply(tag: OperatorTag, f: &ChebSeries) -> Result<ChebSeries> {
    match tag {
        OperatorTag::Energy => Ok(apply_e(f)),
        OperatorTag::Number => Ok(apply_n(f)),
        OperatorTag::Laplacian => Ok(apply_l(f)),
        OperatorTag::Semigroup(t) => semigroup(f, t),
        OperatorTag::Quotient => Err(Error::InvalidParameter(
            "the quotient operator maps into the second-kind basis; use apply_u".into(),
        )),
    }
}

/// Hilbert transform of `f dβ` (principal value of `2/(x-y)`):
/// `-Σ_{n≥1} γ_n ψ_{n-1}`, i.e. `-2 U f`.
pub fn hilbert(f: &ChebSeries) -> SecondKindSeries {
    apply_u(f).scale(-2.0)
}

pub fn hilbert_difference(d: &SignedDifference) -> SecondKindSeries {
    hilbert(d.series())
}

pub fn hilbert_density(mu: &BetaDensity) -> SecondKindSeries {
    hilbert(mu.density())
}

/// `(E²ψ)'` as a second-kind series: `Σ (γ_n/n)/2 · ψ_{n-1}`.
pub fn e2_derivative(f: &ChebSeries) -> SecondKindSeries {
    apply_e(&apply_e(f)).derivative()
}
