//! Heights of the points `C ∩ ωC`, where `C` is the line `x0 + x1 + x2 = 0`
//! and `ω` runs over torsion points of the 2-torus, together with the
//! constants they accumulate at and the tools used to reach them.
//!
//! Numerical code is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! exact quantities use [`num_rational::Ratio`]. The aliases below fix the
//! scalar to `f64`.

pub mod amoeba;
pub mod arith;
pub mod constants;
pub mod curves;
pub mod export;
pub mod grid;
pub mod quad;
pub mod scalar;
pub mod symmetry;
pub mod torsion;

pub use num_rational::Ratio;

pub type Real = f64;
pub type Rational = Ratio<i64>;
pub type HeightBreakdown = torsion::HeightBreakdown<Real>;
pub type QuadResult = quad::QuadResult<Real>;
pub type QuadConfig = quad::QuadConfig<Real>;
pub type HeightGrid = grid::HeightGrid<Real>;
pub type DistStats = grid::DistStats<Real>;
pub type AmoebaPoint = amoeba::AmoebaPoint<Real>;
pub type SpecialValues = constants::SpecialValues<Real>;

pub use curves::{TorsionCurve, Witness};
pub use torsion::TorsionPoint;
