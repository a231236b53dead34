//! Fast diagonalization of the stepper operators on uniform grids.
//!
//! The block-centered Neumann Laplacian is diagonalized per axis by the
//! even-reflection cosine basis `cos(pi k (i + 1/2) / N)` with eigenvalues
//! `mu_k = -(4/h^2) sin^2(pi k / (2N))`. Any operator that is a polynomial
//! in the Laplacian with scalar coefficients is then solved exactly by a
//! forward DCT-II, a pointwise divide by the operator symbol, and an
//! inverse transform. Transforms run through a single complex FFT of the
//! same length (Makhoul's permutation), so non-power-of-two grids work.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::{CellField, Grid};

/// One-axis DCT-II / inverse pair sharing a cached FFT plan.
pub struct Dct1d {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `exp(-i pi k / (2N))`
    twiddle: Vec<Complex<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Dct1d>>>> = OnceLock::new();

impl Dct1d {
    pub fn get(n: usize) -> Arc<Dct1d> {
        assert!(n >= 1);
        let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let fwd = planner.plan_fft_forward(n);
                let inv = planner.plan_fft_inverse(n);
                let twiddle = (0..n)
                    .map(|k| {
                        Complex::from_polar(1.0, -std::f64::consts::PI * k as f64 / (2.0 * n as f64))
                    })
                    .collect();
                Arc::new(Dct1d { n, fwd, inv, twiddle })
            })
            .clone()
    }

    pub fn scratch_len(&self) -> usize {
        self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())
    }

    /// Unnormalized DCT-II: `out[k] = sum_n x[n] cos(pi k (2n+1) / (2N))`.
    pub fn dct2(&self, x: &[f64], out: &mut [f64], buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>]) {
        let n = self.n;
        debug_assert!(x.len() == n && out.len() == n && buf.len() == n);
        for i in 0..n {
            let v = x[i];
            if i % 2 == 0 {
                buf[i / 2] = Complex::new(v, 0.0);
            } else {
                buf[n - i.div_ceil(2)] = Complex::new(v, 0.0);
            }
        }
        self.fwd.process_with_scratch(buf, scratch);
        for k in 0..n {
            out[k] = (buf[k] * self.twiddle[k]).re;
        }
    }

    /// Exact inverse of [`Dct1d::dct2`].
    pub fn idct2(&self, x: &[f64], out: &mut [f64], buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>]) {
        let n = self.n;
        debug_assert!(x.len() == n && out.len() == n && buf.len() == n);
        buf[0] = Complex::new(x[0], 0.0);
        for k in 1..n {
            // conj(twiddle) = exp(+i pi k / (2N))
            buf[k] = Complex::new(x[k], -x[n - k]) * self.twiddle[k].conj();
        }
        self.inv.process_with_scratch(buf, scratch);
        let inv_n = 1.0 / n as f64;
        for i in 0..n {
            let v = if i % 2 == 0 { buf[i / 2].re } else { buf[n - i.div_ceil(2)].re };
            out[i] = v * inv_n;
        }
    }
}

/// Cosine-space solver for operators `A = p(Laplacian)` on a uniform grid.
pub struct NeumannSpectral {
    nx: usize,
    ny: usize,
    dct_x: Arc<Dct1d>,
    dct_y: Arc<Dct1d>,
    /// Per-axis Laplacian eigenvalues (nonpositive).
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    coef: Vec<f64>,
    line_in: Vec<f64>,
    line_out: Vec<f64>,
    cbuf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl NeumannSpectral {
    pub fn new(grid: &Grid) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let dct_x = Dct1d::get(nx);
        let dct_y = Dct1d::get(ny);
        let mu = |k: usize, n: usize, h: f64| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin();
            -4.0 / (h * h) * s * s
        };
        let mu_x = (0..nx).map(|k| mu(k, nx, grid.hx)).collect();
        let mu_y = (0..ny).map(|k| mu(k, ny, grid.hy)).collect();
        let nmax = nx.max(ny);
        let scratch_len = dct_x.scratch_len().max(dct_y.scratch_len());
        NeumannSpectral {
            nx,
            ny,
            dct_x,
            dct_y,
            mu_x,
            mu_y,
            coef: vec![0.0; nx * ny],
            line_in: vec![0.0; nmax],
            line_out: vec![0.0; nmax],
            cbuf: vec![Complex::new(0.0, 0.0); nmax],
            scratch: vec![Complex::new(0.0, 0.0); scratch_len],
        }
    }

    fn forward_2d(&mut self, field: &[f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            self.dct_x.dct2(
                &field[j * nx..(j + 1) * nx],
                &mut self.line_out[..nx],
                &mut self.cbuf[..nx],
                &mut self.scratch,
            );
            self.coef[j * nx..(j + 1) * nx].copy_from_slice(&self.line_out[..nx]);
        }
        for i in 0..nx {
            for j in 0..ny {
                self.line_in[j] = self.coef[j * nx + i];
            }
            self.dct_y.dct2(&self.line_in[..ny], &mut self.line_out[..ny], &mut self.cbuf[..ny], &mut self.scratch);
            for j in 0..ny {
                self.coef[j * nx + i] = self.line_out[j];
            }
        }
    }

    fn inverse_2d(&mut self, out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for i in 0..nx {
            for j in 0..ny {
                self.line_in[j] = self.coef[j * nx + i];
            }
            self.dct_y.idct2(&self.line_in[..ny], &mut self.line_out[..ny], &mut self.cbuf[..ny], &mut self.scratch);
            for j in 0..ny {
                self.coef[j * nx + i] = self.line_out[j];
            }
        }
        for j in 0..ny {
            self.line_in[..nx].copy_from_slice(&self.coef[j * nx..(j + 1) * nx]);
            self.dct_x.idct2(&self.line_in[..nx], &mut out[j * nx..(j + 1) * nx], &mut self.cbuf[..nx], &mut self.scratch);
        }
    }

    /// Solve `A x = rhs` where `A` acts on the cosine mode `(kx, ky)` as
    /// multiplication by `symbol(mu_x[kx] + mu_y[ky])`.
    pub fn solve_symbol(&mut self, symbol: impl Fn(f64) -> f64, rhs: &CellField) -> CellField {
        assert!(rhs.nx == self.nx && rhs.ny == self.ny);
        self.forward_2d(&rhs.data);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let a = symbol(self.mu_x[i] + self.mu_y[j]);
                self.coef[j * self.nx + i] /= a;
            }
        }
        let mut out = CellField { nx: self.nx, ny: self.ny, data: vec![0.0; self.nx * self.ny] };
        self.inverse_2d(&mut out.data);
        out
    }
}
