//! Kirchhoff-Love plates reinforced by Euler-Bernoulli beams that cut
//! arbitrarily through a triangle mesh.
//!
//! The plate is discretized with a continuous/discontinuous Galerkin method
//! on continuous `P_k` elements (`k >= 2`). Each beam lives on the trace of
//! the same space on the elements it crosses, with Nitsche-type point terms
//! where it passes from one element to the next.

mod assembly;
pub mod error;
pub mod fem;
pub mod mesh;
pub mod sparse;
pub mod beam;
pub mod solver;
pub mod harness;
pub mod plate;
