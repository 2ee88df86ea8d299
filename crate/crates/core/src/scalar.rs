use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar accepted by the element-level kernels: f32 or f64.
pub trait Scalar: Float + FromPrimitive + Debug + Sum + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
