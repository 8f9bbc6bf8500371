//! Numeric abstraction shared by the model, the simplex code and the oracles.
//!
//! Floating point types carry the tolerances used throughout the solver;
//! exact rational types report zero for every tolerance, which turns each
//! comparison into an exact one.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Field-like scalar usable for weights, objective coefficients and LP data.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    /// Primal feasibility tolerance for row and bound violations.
    fn feasibility_tol() -> Self;

    /// Magnitude below which a pivot element is treated as zero.
    fn pivot_tol() -> Self;

    /// Distance from 0 or 1 under which an entry counts as integral.
    fn integrality_tol() -> Self;

    /// Tolerance on objective comparisons (reduced costs, pruning).
    fn optimality_tol() -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn of_u32(v: u32) -> Self {
        Self::from_u64(u64::from(v)).expect("u32 fits every scalar")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// True when `self` is within `integrality_tol` of 0 or 1.
    fn is_binary(&self) -> bool {
        let tol = Self::integrality_tol();
        self.abs() <= tol || (self.clone() - Self::one()).abs() <= tol
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn feasibility_tol() -> Self {
        1e-7
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn integrality_tol() -> Self {
        1e-6
    }
    fn optimality_tol() -> Self {
        1e-9
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn feasibility_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn integrality_tol() -> Self {
        1e-3
    }
    fn optimality_tol() -> Self {
        1e-5
    }
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn feasibility_tol() -> Self {
        Ratio::from_integer(BigInt::from(0))
    }
    fn pivot_tol() -> Self {
        Self::feasibility_tol()
    }
    fn integrality_tol() -> Self {
        Self::feasibility_tol()
    }
    fn optimality_tol() -> Self {
        Self::feasibility_tol()
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Converts between scalar types through `f64` for floats and exactly for
/// integral rationals.
pub fn convert<S: Scalar, T: Scalar>(value: &S) -> T {
    T::from_f64(value.to_f64_lossy()).expect("finite scalar")
}

/// Exact rational image of an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(value: f64) -> BigRational {
    BigRational::from_float(value).expect("finite float")
}
