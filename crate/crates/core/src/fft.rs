//! Shared FFT plans.
//!
//! rustfft plans are immutable and thread-safe; a small global cache hands
//! out clones so that every stepper on every worker reuses the same plan.
//! Transforms are unnormalized — callers fold the 1/n into their own
//! multiplier tables.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone)]
pub struct FftPlans {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub fn new(n: usize) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<usize, FftPlans>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                FftPlans { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
            })
            .clone()
    }

    pub fn scratch_len(&self) -> usize {
        self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())
    }

    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, scratch);
    }

    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, scratch);
    }
}
