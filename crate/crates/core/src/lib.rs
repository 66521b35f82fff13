//! Direct and inverse scattering for the energy-dependent Schrödinger
//! equation `−y″ + qy + 2kpy = k²y` on the half-line, with a Miura potential
//! `q = u′ + u²` and boundary condition at `x = 0` parameterized by `α`.
//!
//! The forward map `(u, p, α) → S(k)` goes through the canonical ZS-AKNS
//! system; the inverse map solves a Marchenko equation for its potential `v`
//! and then recovers the phase `φ`, and with it `u`, `p` and `α`.

pub mod cli;
pub mod direct;
pub mod error;
pub mod io;
pub mod marchenko;
pub mod mat2;
pub mod numerics;
pub mod phase;
pub mod problem;
pub mod scatdata;
pub mod transform;

pub use direct::{forward, jost_function, jost_matrix, scattering_function, winding_number, ScatteringSamples};
pub use error::{Error, Result};
pub use numerics::{ComplexFunction, RealFunction, SymmetricKGrid, UniformGrid};
pub use phase::{inverse_scatter, InverseConfig, ReconstructionResult};
pub use scatdata::{validate_class_s, ScatConfig, ScatteringData, ValidationReport};
pub use transform::{to_zsakns, SchrodingerProblem, ZsAknsProblem};
