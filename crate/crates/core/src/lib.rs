//! Multiple ergodic averages on explicit dynamical systems.
//!
//! Every quantity is available two ways: by streaming orbits of a concrete
//! system, and by exact algebra on trigonometric-polynomial observables.
//! The modules mirror that split:
//!
//! - [`systems`]: rotations, toral automorphisms, cocycle extensions and
//!   Heisenberg nilsystems, with exact powers and Haar samplers.
//! - [`observables`]: finite character sums with exact integrals and exact
//!   composition with `T^n`.
//! - [`averaging`]: Birkhoff, linear-pattern, square, cube and Følner-box
//!   averages with closed-form counterparts and convergence diagnostics.
//! - [`seminorms`]: Host–Kra seminorms through their recursive formula, the
//!   van der Corput diagnostic and the multilinear L² bound.
//! - [`joinings`]: empirical Furstenberg self-joinings, fiber measures and
//!   the arithmetic-progression subtorus oracle.
//! - [`suite`]: the property families behind the acceptance checks.

pub mod averaging;
pub mod error;
pub mod intmat;
pub mod joinings;
pub mod observables;
pub mod phase;
pub mod rng;
pub mod seminorms;
pub mod suite;
pub mod summation;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use observables::Observable;
pub use rng::RngState;
pub use systems::{DynamicalSystem, Point};
