//! Two-dimensional complex FFT on square grids: row transforms,
//! transpose, row transforms. Rows run in parallel.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft2D {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2D {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2D {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn rows(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n).for_each(|row| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(row, &mut scratch);
        });
    }

    fn transpose(&self, data: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                data.swap(i * n + j, j * n + i);
            }
        }
    }

    /// In-place forward transform (unnormalized).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.rows(data, &self.forward);
        self.transpose(data);
        self.rows(data, &self.forward);
        self.transpose(data);
    }

    /// In-place inverse transform, normalized by 1/n².
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.rows(data, &self.inverse);
        self.transpose(data);
        self.rows(data, &self.inverse);
        self.transpose(data);
        let norm = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_plane_wave() {
        let n = 64;
        let fft = Fft2D::new(n);
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx % n, idx / n);
                let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let y = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                Complex64::new((3.0 * x).cos() * (2.0 * y).sin(), 0.0)
            })
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        // energy concentrated on the four (±3, ±2) modes
        let mut big = 0;
        for v in &data {
            if v.norm() > 1e-6 * (n * n) as f64 {
                big += 1;
            }
        }
        assert_eq!(big, 4);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
