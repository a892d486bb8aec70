use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::num_complex::Complex;
use rustfft::FftNum;

/// Real scalar type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    FftNum + Float + FloatConst + FromPrimitive + ToPrimitive + Default + Display + Debug + Send + Sync
{
    /// Converts an `f64` constant into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;

/// `e^{i phase}`
#[inline]
pub fn cis<T: Real>(phase: T) -> Cx<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: &Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn is_power_of_two(m: usize) -> bool {
    m != 0 && m & (m - 1) == 0
}
