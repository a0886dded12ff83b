//! Numerical laboratory for self-similar implosion of the 2D axisymmetric
//! compressible Euler equations with swirl.
//!
//! The pipeline: solve the Guderley-type phase-plane ODE for a candidate
//! blowup speed `r` by shooting from the sonic point ([`profile`]), build
//! repulsivity weights and verify their inequalities on a grid ([`weights`]),
//! discretize the linearized operators and check coercivity and the discrete
//! spectrum ([`linop`]), evolve the full radial system from explicit initial
//! data ([`sim`]), and measure the blowup asymptotics, specific-vorticity
//! transport, and Lagrangian trajectory bounds ([`physical`]).

pub mod config;
pub mod error;
pub mod field;
pub mod fileio;
pub mod grid;
pub mod linop;
pub mod ode;
pub mod params;
pub mod phase;
pub mod physical;
pub mod pipeline;
pub mod profile;
pub mod series;
pub mod shoot;
pub mod sim;
pub mod weights;

pub use error::Error;
pub use params::ModelParams;
