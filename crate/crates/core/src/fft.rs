//! Square-grid FFT helpers on row-major buffers.
//!
//! Besides full 1-D/2-D transforms this provides the pruned passes used by the
//! slice pipeline: a band-limited slice only has a few nonzero rows/columns in
//! the frequency domain, and often only a few spatial rows are needed.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const COLUMN_BLOCK: usize = 8;

#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("n", &self.n).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn plan(&self, dir: Direction) -> &Arc<dyn Fft<f64>> {
        match dir {
            Direction::Forward => &self.fwd,
            Direction::Inverse => &self.inv,
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len());
        vec![Complex64::default(); len]
    }

    /// Unnormalized transform of every contiguous length-`n` chunk.
    pub fn rows(&self, data: &mut [Complex64], dir: Direction, scratch: &mut [Complex64]) {
        self.plan(dir).process_with_scratch(data, scratch);
    }

    /// Unnormalized transform of the listed rows of an `n × n` buffer.
    pub fn select_rows(
        &self,
        data: &mut [Complex64],
        rows: &[usize],
        dir: Direction,
        scratch: &mut [Complex64],
    ) {
        let n = self.n;
        let plan = self.plan(dir);
        for &r in rows {
            plan.process_with_scratch(&mut data[r * n..(r + 1) * n], scratch);
        }
    }

    /// Unnormalized transform along axis 0 of the listed columns of an `n × n` buffer.
    pub fn select_cols(
        &self,
        data: &mut [Complex64],
        cols: &[usize],
        dir: Direction,
        scratch: &mut [Complex64],
    ) {
        let n = self.n;
        let plan = self.plan(dir);
        let mut block = vec![Complex64::default(); COLUMN_BLOCK * n];
        for chunk in cols.chunks(COLUMN_BLOCK) {
            let used = &mut block[..chunk.len() * n];
            for (b, &c) in chunk.iter().enumerate() {
                for r in 0..n {
                    used[b * n + r] = data[r * n + c];
                }
            }
            plan.process_with_scratch(used, scratch);
            for (b, &c) in chunk.iter().enumerate() {
                for r in 0..n {
                    data[r * n + c] = used[b * n + r];
                }
            }
        }
    }

    /// Full unnormalized transform of an `n^n_dims` buffer.
    pub fn transform(&self, data: &mut [Complex64], n_dims: usize, dir: Direction) {
        let mut scratch = self.scratch();
        self.rows(data, dir, &mut scratch);
        if n_dims == 2 {
            let cols: Vec<usize> = (0..self.n).collect();
            self.select_cols(data, &cols, dir, &mut scratch);
        }
    }

    pub fn forward(&self, data: &mut [Complex64], n_dims: usize) {
        self.transform(data, n_dims, Direction::Forward);
    }

    /// Inverse transform including the `1/n^n_dims` normalization.
    pub fn inverse(&self, data: &mut [Complex64], n_dims: usize) {
        self.transform(data, n_dims, Direction::Inverse);
        let scale = 1.0 / (self.n as f64).powi(n_dims as i32);
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft2(x: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); n * n];
        for k0 in 0..n {
            for k1 in 0..n {
                let mut acc = Complex64::default();
                for j0 in 0..n {
                    for j1 in 0..n {
                        let ph = -2.0 * PI * ((k0 * j0) as f64 + (k1 * j1) as f64) / n as f64;
                        acc += x[j0 * n + j1] * Complex64::from_polar(1.0, ph);
                    }
                }
                out[k0 * n + k1] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let n = 8;
        let x: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let plan = FftPlan::new(n);
        let mut y = x.clone();
        plan.forward(&mut y, 2);
        let want = naive_dft2(&x, n);
        for (a, b) in y.iter().zip(&want) {
            assert!((a - b).norm() < 1e-10);
        }
        plan.inverse(&mut y, 2);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn pruned_passes_agree_with_full() {
        let n = 16;
        let plan = FftPlan::new(n);
        let mut spec = vec![Complex64::default(); n * n];
        let (rows, cols) = ([2usize, 3, 4], [5usize, 6]);
        for &r in &rows {
            for &c in &cols {
                spec[r * n + c] = Complex64::new(r as f64, c as f64 - 1.0);
            }
        }
        let mut full = spec.clone();
        plan.inverse(&mut full, 2);

        // columns first (only the nonzero ones), then the rows we want
        let mut pruned = spec.clone();
        let mut scratch = plan.scratch();
        plan.select_cols(&mut pruned, &cols, Direction::Inverse, &mut scratch);
        let want_rows = [0usize, 7, 15];
        plan.select_rows(&mut pruned, &want_rows, Direction::Inverse, &mut scratch);
        let s = 1.0 / (n * n) as f64;
        for &r in &want_rows {
            for c in 0..n {
                assert!((pruned[r * n + c] * s - full[r * n + c]).norm() < 1e-13);
            }
        }
    }
}
