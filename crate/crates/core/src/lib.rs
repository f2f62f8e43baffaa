//! Numerics for fractal uncertainty principles: regular sets, restricted
//! Fourier norms, harmonic measure, and multiplier weights.

pub mod error;
pub mod fit;
pub mod fup_core;
pub mod fup_operators;
pub mod generators;
pub mod harmonic_measure;
pub mod linalg;
pub mod multiplier_iteration;
pub mod rational;
pub mod regular_sets;

pub use error::{Error, Result};
pub use rational::Q;
pub use regular_sets::{ClaimedSet, Frame, RegularSetApprox, RegularityCertificate, RegularityClaim};
