use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar used by the generic graph and VWF code.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to a float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {}

pub(crate) fn approx_eq<T: Scalar>(a: T, b: T, rel: T) -> bool {
    if a == b {
        return true;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= rel * scale
}
