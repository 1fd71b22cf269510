use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Floating-point type the planar primitives and closed-form range
/// formulas are written against.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Default length tolerance for this precision.
    fn default_len_tol() -> Self;
    /// Default angular tolerance in radians.
    fn default_ang_tol() -> Self;
    /// Threshold for the codimension-2 special-case classification.
    fn default_special_tol() -> Self;

    fn lit(v: f64) -> Self;

    fn tau() -> Self {
        Self::TAU()
    }
}

impl Scalar for f64 {
    fn default_len_tol() -> Self {
        1e-9
    }
    fn default_ang_tol() -> Self {
        1e-9
    }
    fn default_special_tol() -> Self {
        1e-7
    }
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
}

impl Scalar for f32 {
    fn default_len_tol() -> Self {
        1e-4
    }
    fn default_ang_tol() -> Self {
        1e-4
    }
    fn default_special_tol() -> Self {
        1e-3
    }
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
}

/// The tolerances every equality test in the crate goes through.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    /// Length comparisons.
    pub len: T,
    /// Angle comparisons, radians.
    pub ang: T,
    /// Special-case detection on the range formulas.
    pub special: T,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Tolerance {
            len: T::default_len_tol(),
            ang: T::default_ang_tol(),
            special: T::default_special_tol(),
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    /// Length tolerance relative to a magnitude, never below the absolute one.
    pub fn len_at(&self, magnitude: T) -> T {
        self.len * magnitude.abs().max(T::one())
    }
}
