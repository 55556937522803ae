use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the state engine is generic over: `f32` or `f64`.
///
/// The associated tolerances are the comparison thresholds used by the
/// validating constructors. For `f64` they are the fixed double-precision
/// values (`1e-12` for exact algebra, `1e-10` after renormalization, `1e-9`
/// for direction norms); `f32` gets thresholds scaled to its epsilon.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for exact algebraic identities.
    const EXACT_TOL: f64;
    /// Tolerance for norms after collapse and renormalization.
    const NORM_TOL: f64;
    /// Tolerance for unit-length direction vectors.
    const DIRECTION_TOL: f64;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EXACT_TOL: f64 = 1e-12;
    const NORM_TOL: f64 = 1e-10;
    const DIRECTION_TOL: f64 = 1e-9;
}

impl Real for f32 {
    const EXACT_TOL: f64 = 1e-5;
    const NORM_TOL: f64 = 1e-5;
    const DIRECTION_TOL: f64 = 1e-5;
}
