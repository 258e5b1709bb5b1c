//! Character transforms over a finite abelian group, computed as a
//! multidimensional FFT along each cyclic factor.
//!
//! `forward`:  F(a) = Σ_x f(x)·conj(χ_a(x))
//! `inverse`:  f(x) = Σ_a F(a)·χ_a(x)          (unnormalized)

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::group::FiniteAbelianGroup;

pub struct GroupFft {
    orders: Vec<usize>,
    strides: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl GroupFft {
    pub fn new(group: &FiniteAbelianGroup) -> Self {
        let orders = group.orders().to_vec();
        let mut strides = vec![1usize; orders.len()];
        for j in (0..orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * orders[j + 1];
        }
        let mut planner = FftPlanner::new();
        let forward = orders.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = orders.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self { orders, strides, forward, inverse }
    }

    pub fn len(&self) -> usize {
        self.orders.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// In-place forward transform of one length-`|G|` block.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.apply(data, &self.forward, scratch);
    }

    /// In-place unnormalized inverse transform of one length-`|G|` block.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.apply(data, &self.inverse, scratch);
    }

    fn apply(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>], line: &mut Vec<Complex64>) {
        let total = self.len();
        debug_assert_eq!(data.len(), total);
        for (axis, plan) in plans.iter().enumerate() {
            let n = self.orders[axis];
            if n == 1 {
                continue;
            }
            let stride = self.strides[axis];
            line.resize(n, Complex64::default());
            // Every start index whose coordinate along `axis` is zero.
            for start in (0..total).filter(|i| (i / stride).is_multiple_of(n)) {
                for k in 0..n {
                    line[k] = data[start + k * stride];
                }
                plan.process(line);
                for k in 0..n {
                    data[start + k * stride] = line[k];
                }
            }
        }
    }
}
