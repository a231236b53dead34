//! Staggered-grid geometry and block-centered difference operators.
//!
//! Scalars (phase field, chemical potential) live at cell centers; discrete
//! gradients/fluxes live at interior edge midpoints. Boundary edges are not
//! stored: homogeneous Neumann conditions make them identically zero, which
//! is what makes the summation-by-parts identity
//! `(q, Dx w)_m = -(dx q, w)_x` hold exactly at the discrete level.

/// Uniform rectangular grid with `nx * ny` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    /// A grid over `[x0,x1] x [y0,y1]` with `nx * ny` cells.
    ///
    /// # Panics
    /// Panics on zero cell counts or an empty box.
    pub fn new(nx: usize, ny: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        assert!(nx >= 1 && ny >= 1, "grid needs at least one cell per axis");
        assert!(x1 > x0 && y1 > y0, "domain bounds must be increasing");
        let hx = (x1 - x0) / nx as f64;
        let hy = (y1 - y0) / ny as f64;
        Grid { nx, ny, x0, x1, y0, y1, hx, hy }
    }

    /// Unit square `[0,1]^2`.
    pub fn unit_square(nx: usize, ny: usize) -> Self {
        Self::new(nx, ny, 0.0, 1.0, 0.0, 1.0)
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Cell area `hx * hy`.
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Domain area.
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// x-coordinate of cell center `i` (0-based).
    #[inline]
    pub fn xc(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.hx
    }

    /// y-coordinate of cell center `j` (0-based).
    #[inline]
    pub fn yc(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.hy
    }

    /// x-coordinate of interior x-edge `e` (0-based; edge between cells e and e+1).
    #[inline]
    pub fn xe(&self, e: usize) -> f64 {
        self.x0 + (e as f64 + 1.0) * self.hx
    }

    /// y-coordinate of interior y-edge `e`.
    #[inline]
    pub fn ye(&self, e: usize) -> f64 {
        self.y0 + (e as f64 + 1.0) * self.hy
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }
}

/// Scalar field at cell centers, row-major: value (i,j) at `j*nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: &Grid) -> Self {
        CellField { nx: grid.nx, ny: grid.ny, data: vec![0.0; grid.n_cells()] }
    }

    pub fn constant(grid: &Grid, v: f64) -> Self {
        CellField { nx: grid.nx, ny: grid.ny, data: vec![v; grid.n_cells()] }
    }

    /// Sample `f(x, y)` at cell centers.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(grid.xc(i), grid.yc(j)));
            }
        }
        CellField { nx: grid.nx, ny: grid.ny, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * self.nx + i]
    }

    pub fn conforms(&self, grid: &Grid) -> bool {
        self.nx == grid.nx && self.ny == grid.ny && self.data.len() == grid.n_cells()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &CellField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    /// `a*x + b*y` as a new field.
    pub fn lin_comb(a: f64, x: &CellField, b: f64, y: &CellField) -> CellField {
        debug_assert_eq!(x.data.len(), y.data.len());
        let data = x.data.iter().zip(&y.data).map(|(u, v)| a * u + b * v).collect();
        CellField { nx: x.nx, ny: x.ny, data }
    }
}

/// Field at interior x-edge midpoints: value (i+1/2, j) at `j*(nx-1) + i`,
/// `i = 0..nx-1`. Boundary edges are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFieldX {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl EdgeFieldX {
    pub fn zeros(grid: &Grid) -> Self {
        EdgeFieldX { nx: grid.nx, ny: grid.ny, data: vec![0.0; (grid.nx - 1) * grid.ny] }
    }

    #[inline]
    pub fn at(&self, e: usize, j: usize) -> f64 {
        self.data[j * (self.nx - 1) + e]
    }

    pub fn conforms(&self, grid: &Grid) -> bool {
        self.nx == grid.nx && self.ny == grid.ny && self.data.len() == (grid.nx - 1) * grid.ny
    }
}

/// Field at interior y-edge midpoints: value (i, j+1/2) at `j*nx + i`,
/// `j = 0..ny-1`. Boundary edges are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFieldY {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl EdgeFieldY {
    pub fn zeros(grid: &Grid) -> Self {
        EdgeFieldY { nx: grid.nx, ny: grid.ny, data: vec![0.0; grid.nx * (grid.ny - 1)] }
    }

    #[inline]
    pub fn at(&self, i: usize, e: usize) -> f64 {
        self.data[e * self.nx + i]
    }

    pub fn conforms(&self, grid: &Grid) -> bool {
        self.nx == grid.nx && self.ny == grid.ny && self.data.len() == grid.nx * (grid.ny - 1)
    }
}

/// Edge difference in x: `[dx g]_{i+1/2,j} = (g_{i+1,j} - g_{i,j}) / hx`.
pub fn dx(g: &CellField, grid: &Grid) -> EdgeFieldX {
    assert!(g.conforms(grid), "dx: field does not conform to grid");
    let mut out = EdgeFieldX::zeros(grid);
    let inv = 1.0 / grid.hx;
    for j in 0..grid.ny {
        let row = j * grid.nx;
        let orow = j * (grid.nx - 1);
        for i in 0..grid.nx - 1 {
            out.data[orow + i] = (g.data[row + i + 1] - g.data[row + i]) * inv;
        }
    }
    out
}

/// Edge difference in y: `[dy g]_{i,j+1/2} = (g_{i,j+1} - g_{i,j}) / hy`.
pub fn dy(g: &CellField, grid: &Grid) -> EdgeFieldY {
    assert!(g.conforms(grid), "dy: field does not conform to grid");
    let mut out = EdgeFieldY::zeros(grid);
    let inv = 1.0 / grid.hy;
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx {
            out.data[j * grid.nx + i] = (g.data[(j + 1) * grid.nx + i] - g.data[j * grid.nx + i]) * inv;
        }
    }
    out
}

/// Cell divergence in x: `[Dx w]_{i,j} = (w_{i+1/2,j} - w_{i-1/2,j}) / hx`
/// with zero boundary edges.
pub fn div_x(w: &EdgeFieldX, grid: &Grid) -> CellField {
    assert!(w.conforms(grid), "div_x: field does not conform to grid");
    let mut out = CellField::zeros(grid);
    let inv = 1.0 / grid.hx;
    for j in 0..grid.ny {
        let orow = j * grid.nx;
        let wrow = j * (grid.nx - 1);
        for i in 0..grid.nx {
            let right = if i < grid.nx - 1 { w.data[wrow + i] } else { 0.0 };
            let left = if i > 0 { w.data[wrow + i - 1] } else { 0.0 };
            out.data[orow + i] = (right - left) * inv;
        }
    }
    out
}

/// Cell divergence in y with zero boundary edges.
pub fn div_y(w: &EdgeFieldY, grid: &Grid) -> CellField {
    assert!(w.conforms(grid), "div_y: field does not conform to grid");
    let mut out = CellField::zeros(grid);
    let inv = 1.0 / grid.hy;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let up = if j < grid.ny - 1 { w.data[j * grid.nx + i] } else { 0.0 };
            let down = if j > 0 { w.data[(j - 1) * grid.nx + i] } else { 0.0 };
            out.data[j * grid.nx + i] = (up - down) * inv;
        }
    }
    out
}

/// Block-centered Laplacian `Dx dx + Dy dy` with built-in homogeneous Neumann
/// conditions. Fused stencil; equals `div_x(dx(g)) + div_y(dy(g))`.
pub fn laplacian(g: &CellField, grid: &Grid) -> CellField {
    let mut out = CellField::zeros(grid);
    laplacian_into(g, grid, &mut out);
    out
}

/// In-place variant of [`laplacian`] for solver hot loops.
pub fn laplacian_into(g: &CellField, grid: &Grid, out: &mut CellField) {
    assert!(g.conforms(grid), "laplacian: field does not conform to grid");
    assert!(out.conforms(grid));
    let (nx, ny) = (grid.nx, grid.ny);
    let ix = 1.0 / (grid.hx * grid.hx);
    let iy = 1.0 / (grid.hy * grid.hy);
    for j in 0..ny {
        let row = j * nx;
        for i in 0..nx {
            let c = g.data[row + i];
            let mut acc = 0.0;
            if i + 1 < nx {
                acc += (g.data[row + i + 1] - c) * ix;
            }
            if i > 0 {
                acc -= (c - g.data[row + i - 1]) * ix;
            }
            if j + 1 < ny {
                acc += (g.data[row + nx + i] - c) * iy;
            }
            if j > 0 {
                acc -= (c - g.data[row - nx + i]) * iy;
            }
            out.data[row + i] = acc;
        }
    }
}

/// Discrete L2 inner product over cells: `(f,g)_m = sum hx hy f g`.
pub fn inner_m(f: &CellField, g: &CellField, grid: &Grid) -> f64 {
    assert!(f.conforms(grid) && g.conforms(grid), "inner_m: non-conforming fields");
    let mut s = 0.0;
    for (a, b) in f.data.iter().zip(&g.data) {
        s += a * b;
    }
    s * grid.cell_area()
}

pub fn norm_m(f: &CellField, grid: &Grid) -> f64 {
    inner_m(f, f, grid).sqrt()
}

/// Cell mean weighted sum against 1: `(f, 1)_m`.
pub fn mass(f: &CellField, grid: &Grid) -> f64 {
    assert!(f.conforms(grid));
    f.data.iter().sum::<f64>() * grid.cell_area()
}

/// Inner product over interior x-edges.
pub fn inner_x(f: &EdgeFieldX, g: &EdgeFieldX, grid: &Grid) -> f64 {
    assert!(f.conforms(grid) && g.conforms(grid), "inner_x: non-conforming fields");
    let mut s = 0.0;
    for (a, b) in f.data.iter().zip(&g.data) {
        s += a * b;
    }
    s * grid.cell_area()
}

/// Inner product over interior y-edges.
pub fn inner_y(f: &EdgeFieldY, g: &EdgeFieldY, grid: &Grid) -> f64 {
    assert!(f.conforms(grid) && g.conforms(grid), "inner_y: non-conforming fields");
    let mut s = 0.0;
    for (a, b) in f.data.iter().zip(&g.data) {
        s += a * b;
    }
    s * grid.cell_area()
}

/// Inner product on edge-field pairs: `(v,r)_TM = (v1,r1)_x + (v2,r2)_y`.
pub fn inner_tm(v: (&EdgeFieldX, &EdgeFieldY), r: (&EdgeFieldX, &EdgeFieldY), grid: &Grid) -> f64 {
    inner_x(v.0, r.0, grid) + inner_y(v.1, r.1, grid)
}

pub fn norm_tm(v: (&EdgeFieldX, &EdgeFieldY), grid: &Grid) -> f64 {
    inner_tm(v, v, grid).sqrt()
}

/// Squared TM norm of the discrete gradient of a cell field.
pub fn grad_norm_sq(g: &CellField, grid: &Grid) -> f64 {
    let gx = dx(g, grid);
    let gy = dy(g, grid);
    inner_x(&gx, &gx, grid) + inner_y(&gy, &gy, grid)
}
