//! Wicksell section transform for sphere-radius distributions, Monte Carlo
//! section sampling, and lower-tail extreme-value diagnostics.

pub mod error;
pub mod evt;
pub mod interp;
pub mod laws;
pub mod quad;
pub mod real;
pub mod rng;
pub mod simulate;
pub mod transform;
pub mod verify;

pub use error::{Result, WicksellError};
pub use laws::{EvtClass, LawSpec, RadiusLaw, TabulatedCdf};
pub use real::Real;

pub type RadiusLawF64 = RadiusLaw<f64>;
pub type RadiusLawF32 = RadiusLaw<f32>;
