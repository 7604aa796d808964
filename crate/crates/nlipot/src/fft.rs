//! Multidimensional complex FFT over row-major buffers.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Exponent sign of a transform: `Σ_n x_n e^{sign·2πi jn/N}`, unnormalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_i32(s: i32) -> Self {
        if s < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

const BATCH: usize = 16;

pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn process(&self, data: &mut [Complex64], sign: Sign) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT shape");
        let plans = match sign {
            Sign::Minus => &self.forward,
            Sign::Plus => &self.inverse,
        };
        for axis in 0..self.shape.len() {
            self.process_axis(data, axis, &plans[axis]);
        }
    }

    fn process_axis(&self, data: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let n = self.shape[axis];
        let stride: usize = self.shape[axis + 1..].iter().product();
        if stride == 1 {
            data.par_chunks_mut(n * 64).for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(chunk, &mut scratch);
            });
            return;
        }
        let block = n * stride;
        let run = |outer: &mut [Complex64]| {
            let mut lines = vec![Complex64::default(); BATCH * n];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            let mut c0 = 0;
            while c0 < stride {
                let b = BATCH.min(stride - c0);
                for i in 0..n {
                    let row = &outer[i * stride + c0..i * stride + c0 + b];
                    for (k, &v) in row.iter().enumerate() {
                        lines[k * n + i] = v;
                    }
                }
                plan.process_with_scratch(&mut lines[..b * n], &mut scratch);
                for i in 0..n {
                    let row = &mut outer[i * stride + c0..i * stride + c0 + b];
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = lines[k * n + i];
                    }
                }
                c0 += b;
            }
        };
        if data.len() > block {
            data.par_chunks_mut(block).for_each(run);
        } else {
            run(data);
        }
    }
}
