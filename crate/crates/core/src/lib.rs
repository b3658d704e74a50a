//! Integral quasi-arithmetic means on finite discrete measure spaces.
//!
//! The crate evaluates the two partially mixed means
//!
//! ```text
//! f^-1( int_X f( g^-1( int_Y g o h dmu ) ) dlambda )
//! g^-1( int_Y g( f^-1( int_X f o h dlambda ) ) dmu )
//! ```
//!
//! for simple functions `h` on a product of finite measure spaces, measures
//! how far they are from commuting, and searches for simple functions on
//! which they do not. Pairs `f = a g + b` commute on probability spaces and
//! pairs `f = c g` commute on arbitrary finite measure spaces when both map
//! onto `(0, inf)`; every other pair admits a witness.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The `*64`
//! aliases below fix the scalar to `f64`, which is what the tolerances in the
//! documentation assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod inversion;
pub mod measure_space;
pub mod phi;
pub mod qam;
pub mod scalar;
pub mod suite;
pub mod witness;

pub use error::{Error, Result, Stage};
pub use generators::{CodomainKind, Family, Generator, GeneratorDocument, Interval, Setting};
pub use measure_space::{DiscreteMeasureSpace, ProductGrid, SpaceDocument};
pub use phi::{block_scenario_residual, BlockScenario, LinearFit, Phi};
pub use qam::{
    commutation_residual, lhs_mixed_mean, qam, rhs_mixed_mean, scale_invariance_residual, MatrixDocument,
    ResidualReport, SimpleFunctionMatrix,
};
pub use scalar::Scalar;
pub use witness::{GridSpec, SearchOptions, Witness, WitnessSubject};

pub type Generator64 = Generator<f64>;
pub type Generator32 = Generator<f32>;
pub type Space64 = DiscreteMeasureSpace<f64>;
pub type Space32 = DiscreteMeasureSpace<f32>;
pub type ProductGrid64 = ProductGrid<f64>;
pub type Matrix64 = SimpleFunctionMatrix<f64>;
pub type Scenario64 = BlockScenario<f64>;
pub type Report64 = ResidualReport<f64>;
pub type Witness64 = Witness<f64>;
