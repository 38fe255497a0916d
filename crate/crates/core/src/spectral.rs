//! Fast solves for constant-coefficient polynomials in the Neumann
//! Laplacian.  The node-centred mirror Laplacian is diagonalised exactly by
//! the type-I cosine transform along each axis.

use std::sync::Arc;

use rustdct::{Dct1, DctPlanner};

use crate::grid::Grid2D;

pub struct NeumannSpectral {
    grid: Grid2D,
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
    dct_x: Arc<dyn Dct1<f64>>,
    dct_y: Arc<dyn Dct1<f64>>,
    scratch: Vec<f64>,
    spec: Vec<f64>,
}

fn eigenvalues(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / (2.0 * (n - 1) as f64)).sin();
            -4.0 / (h * h) * s * s
        })
        .collect()
}

impl NeumannSpectral {
    pub fn new(grid: Grid2D) -> Self {
        let mut planner = DctPlanner::new();
        let dct_x = planner.plan_dct1(grid.nx);
        let dct_y = planner.plan_dct1(grid.ny);
        let scratch_len = dct_x.get_scratch_len().max(dct_y.get_scratch_len());
        Self {
            grid,
            lam_x: eigenvalues(grid.nx, grid.hx()),
            lam_y: eigenvalues(grid.ny, grid.hy()),
            dct_x,
            dct_y,
            scratch: vec![0.0; scratch_len],
            spec: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Eigenvalues of the discrete Laplacian, `lam_x[kx] + lam_y[ky]`.
    pub fn laplacian_eigenvalue(&self, kx: usize, ky: usize) -> f64 {
        self.lam_x[kx] + self.lam_y[ky]
    }

    /// Tabulates `1 / p(lambda)` in the internal (transposed) spectral
    /// layout, with the transform normalisation folded in.
    pub fn inverse_symbol(&self, p: impl Fn(f64) -> f64) -> Vec<f64> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let norm = 4.0 / ((nx - 1) * (ny - 1)) as f64;
        let mut s = Vec::with_capacity(nx * ny);
        for kx in 0..nx {
            for ky in 0..ny {
                s.push(norm / p(self.lam_x[kx] + self.lam_y[ky]));
            }
        }
        s
    }

    /// `out = p(L)^{-1} rhs` for a symbol produced by [`inverse_symbol`].
    ///
    /// [`inverse_symbol`]: NeumannSpectral::inverse_symbol
    pub fn solve(&mut self, rhs: &[f64], inv_symbol: &[f64], out: &mut [f64]) {
        let mut spec = std::mem::take(&mut self.spec);
        self.forward(rhs, &mut spec);
        for (c, &w) in spec.iter_mut().zip(inv_symbol) {
            *c *= w;
        }
        self.backward(&mut spec, out);
        self.spec = spec;
    }

    /// Cosine coefficients of `u` in the transposed layout, unnormalised.
    pub fn forward(&mut self, u: &[f64], spec: &mut [f64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut rows = std::mem::take(&mut self.spec);
        if rows.len() != u.len() {
            rows = vec![0.0; u.len()];
        }
        rows.copy_from_slice(u);
        for row in rows.chunks_exact_mut(nx) {
            self.dct_x.process_dct1_with_scratch(row, &mut self.scratch);
        }
        for j in 0..ny {
            for i in 0..nx {
                spec[i * ny + j] = rows[j * nx + i];
            }
        }
        for col in spec.chunks_exact_mut(ny) {
            self.dct_y.process_dct1_with_scratch(col, &mut self.scratch);
        }
        self.spec = rows;
    }

    /// Inverse of [`forward`] up to the normalisation carried by the symbol;
    /// `spec` is overwritten.
    ///
    /// [`forward`]: NeumannSpectral::forward
    pub fn backward(&mut self, spec: &mut [f64], out: &mut [f64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for col in spec.chunks_exact_mut(ny) {
            self.dct_y.process_dct1_with_scratch(col, &mut self.scratch);
        }
        for j in 0..ny {
            for i in 0..nx {
                out[j * nx + i] = spec[i * ny + j];
            }
        }
        for row in out.chunks_exact_mut(nx) {
            self.dct_x.process_dct1_with_scratch(row, &mut self.scratch);
        }
    }
}
