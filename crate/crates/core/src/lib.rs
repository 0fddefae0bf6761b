//! Stable allocations in bipartite job/machine markets with exact rational
//! data: blocking-edge detection, better and best response dynamics, and
//! deterministic paths to stability.
//!
//! ```
//! use stable_alloc::fixtures::fig2;
//! use stable_alloc::solvers::SolverRegistry;
//!
//! let (instance, start) = fig2();
//! let registry = SolverRegistry::with_defaults();
//! let solver = registry.get("accel").unwrap();
//! let solution = solver.solve(&instance, &start, &Default::default()).unwrap();
//! assert!(stable_alloc::blocking::is_stable(&instance, &solution.allocation));
//! ```

pub mod accelerated;
pub mod allocation;
pub mod blocking;
pub mod dynamics;
pub mod fixtures;
pub mod instance;
pub mod io;
pub mod rational;
pub mod solvers;

pub use allocation::Allocation;
pub use instance::{EdgeId, Instance, RawInstance, Side, Vertex};
pub use rational::Rational;
