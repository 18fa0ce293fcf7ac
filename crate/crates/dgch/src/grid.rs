//! Uniform cell-centered 1D/2D grids, boundary conditions, discrete
//! differential operators, and quadrature.
//!
//! All stencils are cell-centered. Neumann boundaries use mirror ghost cells
//! (zero normal derivative at the boundary face); periodic boundaries wrap.
//! Reductions run in a fixed serial order so results are bit-identical
//! across runs.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Periodic,
    Neumann,
}

impl Bc {
    pub fn name(&self) -> &'static str {
        match self {
            Bc::Periodic => "periodic",
            Bc::Neumann => "neumann",
        }
    }
}

/// Uniform grid; in 1D the second axis has a single cell and unit extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: Dim,
    n: [usize; 2],
    length: [f64; 2],
    h: [f64; 2],
    bc: Bc,
}

impl Grid {
    pub fn new_1d(n: usize, length: f64, bc: Bc) -> Result<Grid> {
        if n < 4 {
            return Err(Error::Params(format!("grid needs n >= 4 per axis, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Params(format!("grid length must be positive, got {length}")));
        }
        Ok(Grid {
            dim: Dim::One,
            n: [n, 1],
            length: [length, 1.0],
            h: [length / n as f64, 1.0],
            bc,
        })
    }

    pub fn new_2d(n: [usize; 2], length: [f64; 2], bc: Bc) -> Result<Grid> {
        for a in 0..2 {
            if n[a] < 4 {
                return Err(Error::Params(format!(
                    "grid needs n >= 4 per axis, got {}",
                    n[a]
                )));
            }
            if !(length[a] > 0.0) || !length[a].is_finite() {
                return Err(Error::Params(format!(
                    "grid length must be positive, got {}",
                    length[a]
                )));
            }
        }
        Ok(Grid {
            dim: Dim::Two,
            n,
            length,
            h: [length[0] / n[0] as f64, length[1] / n[1] as f64],
            bc,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }
    pub fn n(&self) -> [usize; 2] {
        self.n
    }
    pub fn length(&self) -> [f64; 2] {
        self.length
    }
    pub fn h(&self) -> [f64; 2] {
        self.h
    }
    pub fn bc(&self) -> Bc {
        self.bc
    }

    pub fn axes(&self) -> &'static [usize] {
        match self.dim {
            Dim::One => &[0],
            Dim::Two => &[0, 1],
        }
    }

    pub fn total_cells(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            Dim::One => self.h[0],
            Dim::Two => self.h[0] * self.h[1],
        }
    }

    pub fn domain_volume(&self) -> f64 {
        match self.dim {
            Dim::One => self.length[0],
            Dim::Two => self.length[0] * self.length[1],
        }
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    /// Center of cell `(i, j)`; the second coordinate is 0 in 1D.
    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let x = (i as f64 + 0.5) * self.h[0];
        let y = match self.dim {
            Dim::One => 0.0,
            Dim::Two => (j as f64 + 0.5) * self.h[1],
        };
        [x, y]
    }
}

/// Discrete scalar field, one value per cell, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.total_cells() {
            return Err(Error::Params(format!(
                "field length {} does not match grid cell count {}",
                values.len(),
                grid.total_cells()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params("field contains non-finite values".into()));
        }
        Ok(Field { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Field {
        assert!(c.is_finite());
        Field {
            grid,
            values: vec![c; grid.total_cells()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Field> {
        let mut values = Vec::with_capacity(grid.total_cells());
        for j in 0..grid.n()[1] {
            for i in 0..grid.n()[0] {
                values.push(f(grid.cell_center(i, j)));
            }
        }
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

#[inline]
fn minus_idx(t: usize, n: usize, bc: Bc) -> usize {
    if t == 0 {
        match bc {
            Bc::Periodic => n - 1,
            Bc::Neumann => 0, // mirror ghost
        }
    } else {
        t - 1
    }
}

#[inline]
fn plus_idx(t: usize, n: usize, bc: Bc) -> usize {
    if t + 1 == n {
        match bc {
            Bc::Periodic => 0,
            Bc::Neumann => n - 1,
        }
    } else {
        t + 1
    }
}

fn assert_same_grid(a: &Field, b: &Field) {
    assert_eq!(a.grid, b.grid, "fields live on different grids");
}

/// Centered gradient component along `axis`.
pub fn gradient_centered(f: &Field, axis: usize) -> Field {
    let g = *f.grid();
    let [nx, ny] = g.n();
    let bc = g.bc();
    let v = f.values();
    let mut out = vec![0.0; v.len()];
    match axis {
        0 => {
            let inv2h = 1.0 / (2.0 * g.h()[0]);
            for j in 0..ny {
                let row = j * nx;
                for i in 0..nx {
                    let l = row + minus_idx(i, nx, bc);
                    let r = row + plus_idx(i, nx, bc);
                    out[row + i] = (v[r] - v[l]) * inv2h;
                }
            }
        }
        1 => {
            assert_eq!(g.dim(), Dim::Two, "axis 1 requires a 2D grid");
            let inv2h = 1.0 / (2.0 * g.h()[1]);
            for j in 0..ny {
                let jm = minus_idx(j, ny, bc);
                let jp = plus_idx(j, ny, bc);
                for i in 0..nx {
                    out[j * nx + i] = (v[jp * nx + i] - v[jm * nx + i]) * inv2h;
                }
            }
        }
        _ => panic!("axis out of range"),
    }
    Field { grid: g, values: out }
}

/// Per-cell squared gradient magnitude `|grad u|^2` from centered
/// differences.
pub fn gradient_sq(f: &Field) -> Field {
    let g = *f.grid();
    let mut out = gradient_centered(f, 0);
    for v in out.values_mut() {
        *v = *v * *v;
    }
    if g.dim() == Dim::Two {
        let dy = gradient_centered(f, 1);
        for (o, d) in out.values_mut().iter_mut().zip(dy.values()) {
            *o += d * d;
        }
    }
    out
}

/// Conservative divergence of `coef * grad f` with arithmetic face means of
/// the coefficient and compact per-axis flux differencing.
///
/// Face fluxes appear with opposite signs in exactly two cells, so the
/// volume-weighted sum of the output telescopes to zero under both boundary
/// conditions (Neumann boundary faces carry zero flux).
pub fn divergence_of_flux(coef: &Field, f: &Field) -> Field {
    assert_same_grid(coef, f);
    let g = *f.grid();
    let [nx, ny] = g.n();
    let bc = g.bc();
    let c = coef.values();
    let v = f.values();
    let mut out = vec![0.0; v.len()];

    // axis 0
    {
        let inv_h2 = 1.0 / (g.h()[0] * g.h()[0]);
        for j in 0..ny {
            let row = j * nx;
            for i in 0..nx {
                let me = row + i;
                let fr = if i + 1 == nx && bc == Bc::Neumann {
                    0.0
                } else {
                    let r = row + plus_idx(i, nx, bc);
                    0.5 * (c[me] + c[r]) * (v[r] - v[me])
                };
                let fl = if i == 0 && bc == Bc::Neumann {
                    0.0
                } else {
                    let l = row + minus_idx(i, nx, bc);
                    0.5 * (c[l] + c[me]) * (v[me] - v[l])
                };
                out[me] = (fr - fl) * inv_h2;
            }
        }
    }
    // axis 1
    if g.dim() == Dim::Two {
        let inv_h2 = 1.0 / (g.h()[1] * g.h()[1]);
        for j in 0..ny {
            let jm = minus_idx(j, ny, bc);
            let jp = plus_idx(j, ny, bc);
            for i in 0..nx {
                let me = j * nx + i;
                let fr = if j + 1 == ny && bc == Bc::Neumann {
                    0.0
                } else {
                    let r = jp * nx + i;
                    0.5 * (c[me] + c[r]) * (v[r] - v[me])
                };
                let fl = if j == 0 && bc == Bc::Neumann {
                    0.0
                } else {
                    let l = jm * nx + i;
                    0.5 * (c[l] + c[me]) * (v[me] - v[l])
                };
                out[me] += (fr - fl) * inv_h2;
            }
        }
    }
    Field { grid: g, values: out }
}

/// Centered divergence of cell-collocated flux components.
///
/// This is the exact adjoint of the centered-gradient quadrature used by the
/// collocated energy: under Neumann conditions the ghost flux is the
/// negative mirror of the boundary value (the centered gradient of a
/// mirror-extended field is odd across the boundary face).
pub fn divergence_of_cell_flux(flux: &[Field]) -> Field {
    let g = *flux[0].grid();
    let [nx, ny] = g.n();
    let bc = g.bc();
    assert_eq!(flux.len(), g.axes().len(), "one flux component per axis");
    let mut out = vec![0.0; g.total_cells()];

    {
        let fx = flux[0].values();
        let inv2h = 1.0 / (2.0 * g.h()[0]);
        for j in 0..ny {
            let row = j * nx;
            for i in 0..nx {
                let fr = if i + 1 == nx && bc == Bc::Neumann {
                    -fx[row + i]
                } else {
                    fx[row + plus_idx(i, nx, bc)]
                };
                let fl = if i == 0 && bc == Bc::Neumann {
                    -fx[row + i]
                } else {
                    fx[row + minus_idx(i, nx, bc)]
                };
                out[row + i] = (fr - fl) * inv2h;
            }
        }
    }
    if g.dim() == Dim::Two {
        let fy = flux[1].values();
        assert_same_grid(&flux[0], &flux[1]);
        let inv2h = 1.0 / (2.0 * g.h()[1]);
        for j in 0..ny {
            let jm = minus_idx(j, ny, bc);
            let jp = plus_idx(j, ny, bc);
            for i in 0..nx {
                let me = j * nx + i;
                let fr = if j + 1 == ny && bc == Bc::Neumann {
                    -fy[me]
                } else {
                    fy[jp * nx + i]
                };
                let fl = if j == 0 && bc == Bc::Neumann {
                    -fy[me]
                } else {
                    fy[jm * nx + i]
                };
                out[me] += (fr - fl) * inv2h;
            }
        }
    }
    Field { grid: g, values: out }
}

/// Compensated (Neumaier) sum; immune to cancellation up to one final
/// rounding.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Midpoint-rule integral `sum_i f_i * h^n` with compensated summation in a
/// fixed order.
pub fn integrate(f: &Field) -> f64 {
    neumaier_sum(f.values().iter().copied()) * f.grid().cell_volume()
}

/// `Int |a - b|`, the L1 distance of two fields on the same grid.
pub fn l1_distance(a: &Field, b: &Field) -> f64 {
    assert_same_grid(a, b);
    neumaier_sum(
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs()),
    ) * a.grid().cell_volume()
}
