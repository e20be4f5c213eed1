//! Validated numerics for connecting orbits of
//! `A'' + A'/r - A/(4r^2) = A - A^3`.
//!
//! The crate is organized bottom-up: [`interval`] arithmetic, the concrete
//! vector [`systems`] and their charts, [`manifold`] certificates (isolating
//! blocks, cone conditions, time-Lipschitz bounds), a rigorous Taylor–Lohner
//! [`integrator`], the [`shooting`] proof driver and the nonrigorous
//! [`scout`].

pub mod interval;

pub use interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};
pub mod systems;
pub mod manifold;
pub mod integrator;
pub mod shooting;
pub mod scout;
