use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::scalar::{Cx, Real};

/// Cached forward/inverse FFT pair of one size with its scratch buffer.
///
/// Both directions are unnormalised: `forward` computes
/// `sum_n a_n e^{-i n theta_k}`, `inverse` computes `sum_k c_k e^{+i n theta_k}`.
pub struct FourierPlan<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch: Vec<Cx<T>>,
}

impl<T: Real> FourierPlan<T> {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            len,
            forward,
            inverse,
            scratch: vec![Cx::new(T::zero(), T::zero()); scratch_len],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&mut self, buf: &mut [Cx<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    pub fn inverse(&mut self, buf: &mut [Cx<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }
}

impl<T: Real> std::fmt::Debug for FourierPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan")
            .field("len", &self.len)
            .finish()
    }
}
