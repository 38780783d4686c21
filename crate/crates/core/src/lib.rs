//! Spectral computation of free-probability functionals on compact intervals:
//! Chebyshev bases, measures, the energy/number operators and the Hilbert
//! transform, entropy and Fisher informations, one-dimensional transport,
//! equilibrium measures, and the numerical studies built on them.

pub mod chebyshev;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod logkernel;
pub mod measure;
pub mod operators;
pub mod quad;
pub mod transport;

pub use chebyshev::{ChebSeries, QuadratureRule, SecondKindSeries, WeightKind};
pub use equilibrium::{CompressionMap, EquilibriumResult, Potential};
pub use error::{Error, Result};
pub use functionals::{Extended, FunctionalValue, Method};
pub use measure::{BetaDensity, Distribution1d, GridMeasure, Measure, MeasureSpec, ScaledMeasure, SignedDifference};
pub use operators::OperatorTag;
