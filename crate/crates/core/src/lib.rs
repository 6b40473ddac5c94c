//! Exact continued fractions, Diophantine classification diagnostics and
//! Gauss-map dynamics.

pub mod classifier;
pub mod cli;
pub mod convergents;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod exactnum;
pub mod gallery;
pub mod precise;
pub mod scalar;

pub use classifier::{BrjunoReport, DiophantineReport};
pub use convergents::{Convergent, ConvergentTable};
pub use dynamics::{BirkhoffEstimate, LyapunovReport};
pub use error::{Error, ParseError, Result};
pub use exactnum::{BigInt, BigRational, ContinuedFraction, Interval};
pub use gallery::{SpeedFunction, SpeedStrategy};
pub use scalar::Real;

pub type DiophantineReport64 = DiophantineReport<f64>;
pub type LyapunovReport64 = LyapunovReport<f64>;
pub type BirkhoffEstimate64 = BirkhoffEstimate<f64>;
pub type Quadrature64 = dynamics::Quadrature<f64>;
pub type MonteCarloResult64 = dynamics::MonteCarloResult<f64>;
