//! Resource measures for finite-dimensional quantum resource theories.
//!
//! The crate computes one-shot distances to explicit free sets (stabilizer
//! hulls, diagonal states, PPT states), closed-form yield and cost bounds,
//! and the twirling channels that certify when the measures coincide.

pub mod bounds;
pub mod convex;
pub mod linalg;
pub mod measures;
pub mod sets;
pub mod twirl;

pub use convex::{LinearProgram, SdpProblem, Solution, SolverOptions, Status};
pub use linalg::{ComplexMatrix, DensityMatrix, PureState};


pub use measures::{MeasureValue, Value};
pub use sets::FreeSet;
