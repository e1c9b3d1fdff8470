//! Solves `(I - c * Lap_h) u = r` on the interior nodes with homogeneous
//! Dirichlet data, where `Lap_h` is the 5-point Laplacian. The sine transform
//! diagonalises `Lap_h`, so one solve is two 2D DST-I passes and a pointwise
//! division.
//!
//! The DST-I of length `m` is read off a complex FFT of length `2(m + 1)`
//! applied to the odd extension. Two real rows share one FFT: with
//! `z = x + i y` the transform of `z` is `-2i S(x) + 2 S(y)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

/// Unnormalised DST-I, `S_k = sum_n x_n sin(pi (n+1)(k+1) / (m+1))`,
/// applied to the consecutive rows of a row-major block.
struct RowSine {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl RowSine {
    fn new(m: usize, planner: &mut FftPlanner<f64>) -> Self {
        let fft = planner.plan_fft_forward(2 * (m + 1));
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            m,
            buffer: vec![Complex::default(); 2 * (m + 1)],
            fft,
            scratch,
        }
    }

    fn transform_pair(&mut self, x: &mut [f64], y: Option<&mut [f64]>) {
        let m = self.m;
        let buf = &mut self.buffer;
        buf[0] = Complex::default();
        buf[m + 1] = Complex::default();
        match &y {
            Some(y) => {
                for n in 0..m {
                    let z = Complex::new(x[n], y[n]);
                    buf[n + 1] = z;
                    buf[2 * m + 1 - n] = -z;
                }
            }
            None => {
                for n in 0..m {
                    buf[n + 1] = Complex::new(x[n], 0.0);
                    buf[2 * m + 1 - n] = Complex::new(-x[n], 0.0);
                }
            }
        }
        self.fft.process_with_scratch(buf, &mut self.scratch);
        for k in 0..m {
            x[k] = -0.5 * buf[k + 1].im;
        }
        if let Some(y) = y {
            for k in 0..m {
                y[k] = 0.5 * buf[k + 1].re;
            }
        }
    }

    fn transform_rows(&mut self, block: &mut [f64]) {
        let m = self.m;
        let mut pairs = block.chunks_exact_mut(2 * m);
        for pair in &mut pairs {
            let (x, y) = pair.split_at_mut(m);
            self.transform_pair(x, Some(y));
        }
        let rest = pairs.into_remainder();
        if !rest.is_empty() {
            self.transform_pair(rest, None);
        }
    }
}

fn transpose(src: &[f64], dst: &mut [f64], rows: usize, cols: usize) {
    const TILE: usize = 32;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

pub struct DiffusionSolver {
    mx: usize,
    my: usize,
    sine_x: RowSine,
    sine_y: RowSine,
    /// Eigenvalues of `-Lap_h` along each axis.
    eig_x: Vec<f64>,
    eig_y: Vec<f64>,
    work: Vec<f64>,
    transposed: Vec<f64>,
}

fn eigenvalues(m: usize, h: f64) -> Vec<f64> {
    (0..m)
        .map(|k| {
            let s = (PI * (k + 1) as f64 / (2.0 * (m + 1) as f64)).sin();
            4.0 * s * s / (h * h)
        })
        .collect()
}

impl DiffusionSolver {
    pub fn new(grid: &GridSpec) -> Self {
        let mx = grid.nx - 2;
        let my = grid.ny - 2;
        let mut planner = FftPlanner::new();
        Self {
            mx,
            my,
            sine_x: RowSine::new(mx, &mut planner),
            sine_y: RowSine::new(my, &mut planner),
            eig_x: eigenvalues(mx, grid.hx()),
            eig_y: eigenvalues(my, grid.hy()),
            work: vec![0.0; mx * my],
            transposed: vec![0.0; mx * my],
        }
    }

    /// Overwrites the interior of `values` (full grid, row-major) with the
    /// solution for right-hand side `rhs` (full grid; boundary entries ignored).
    /// Boundary entries of `values` are set to zero.
    pub fn solve(&mut self, coef: f64, rhs: &[f64], values: &mut [f64]) {
        let (mx, my) = (self.mx, self.my);
        let nx = mx + 2;
        for j in 0..my {
            let src = (j + 1) * nx + 1;
            self.work[j * mx..(j + 1) * mx].copy_from_slice(&rhs[src..src + mx]);
        }
        self.sine_x.transform_rows(&mut self.work);
        transpose(&self.work, &mut self.transposed, my, mx);
        self.sine_y.transform_rows(&mut self.transposed);
        // transposed layout: index i * my + j
        let norm = 4.0 / ((mx + 1) * (my + 1)) as f64;
        for i in 0..mx {
            let ex = self.eig_x[i];
            for j in 0..my {
                self.transposed[i * my + j] *= norm / (1.0 + coef * (ex + self.eig_y[j]));
            }
        }
        self.sine_y.transform_rows(&mut self.transposed);
        transpose(&self.transposed, &mut self.work, mx, my);
        self.sine_x.transform_rows(&mut self.work);
        values.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..my {
            let dst = (j + 1) * nx + 1;
            values[dst..dst + mx].copy_from_slice(&self.work[j * mx..(j + 1) * mx]);
        }
    }
}

/// 5-point Laplacian at interior node `k` of a row-major grid.
#[inline]
pub fn laplacian_at(values: &[f64], k: usize, nx: usize, hx2: f64, hy2: f64) -> f64 {
    let c = values[k];
    (values[k - 1] - 2.0 * c + values[k + 1]) / hx2 + (values[k - nx] - 2.0 * c + values[k + nx]) / hy2
}
