//! Exact and relaxed solvers for convex recoloring of vertex-colored graphs,
//! built on a connected-set integer programming formulation and two families
//! of valid inequalities.
//!
//! The core types are generic over [`Scalar`], so the same code runs in `f64`,
//! `f32` or exact rational arithmetic. Aliases for the common choices are at
//! the bottom of this file.

pub mod capa;
pub mod cuts;
pub mod error;
pub mod experiments;
pub mod formulation;
pub mod graph;
pub mod io;
pub mod lp;
mod linalg;
pub mod scalar;
pub mod solve;

pub use cuts::{Cut, CutPool, Provenance, SeparationOptions};
pub use error::{Error, Result};
pub use formulation::{Model, ModelOrigin, Point, VarId};
pub use graph::{Color, ConnectedSet, Graph, GraphKind, Instance, PartialColoring};
pub use lp::{LinearProgram, LpOutcome, LpStatus};
pub use scalar::Scalar;
pub use solve::{CutMode, RelaxationLevel};

pub use num_rational::BigRational;

pub type Instance64 = Instance<f64>;
pub type Model64 = Model<f64>;
pub type Point64 = Point<f64>;
pub type ExactInstance = Instance<BigRational>;
pub type ExactModel = Model<BigRational>;
pub type ExactPoint = Point<BigRational>;
