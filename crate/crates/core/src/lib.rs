//! Numerical checks of second-order optimality conditions for one-dimensional
//! variational problems `F(y) = ∫ f(x, y, y′) dx`.
//!
//! The crate evaluates the second variation of `F` along a trajectory in three
//! algebraically distinct forms, reports how far apart they are, measures the
//! sign of the integrated-by-parts inequality for admissible variations, and
//! ships the simple pendulum end to end (Lagrangian, equation of motion, RK4
//! and the closed-form separatrix solution).
//!
//! Data-parallel loops (quadrature panels, sweep combinations) run on rayon
//! when the `parallel` feature is enabled and fall back to plain iterators
//! otherwise. Results are bit-identical in both modes.

pub mod cli;
pub mod error;
pub mod exec;
pub mod lagrangian;
pub mod pendulum;
pub mod quadrature;
pub mod sampled;
pub mod second_variation;
pub mod testfn;

pub use error::{Error, Result};
pub use exec::Exec;
pub use lagrangian::{LagrangianModel, PartialSet, Point3};
pub use quadrature::{Interval, QuadratureSpec, Rule};
pub use second_variation::{CheckReport, Trajectory};
pub use testfn::TestFunction;
