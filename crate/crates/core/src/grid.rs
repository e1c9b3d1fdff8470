//! Uniform grids and the sampled fields that live on them.
//!
//! A [`Field`] is stored row by row: row `j` holds the nodes with ordinate
//! `x2(j)`, and within a row the abscissa `x1(i)` increases with `i`.
//! Node coordinates are computed as `(i - (n-1)/2) * h`, so mirrored nodes
//! have exactly opposite coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square computational box `[-L, L]^2` sampled with `nx * ny` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_extent: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub const MIN_NODES: usize = 16;

    pub fn new(half_extent: f64, nx: usize, ny: usize) -> Result<Self> {
        let grid = Self {
            half_extent,
            nx,
            ny,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn square(half_extent: f64, n: usize) -> Result<Self> {
        Self::new(half_extent, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_extent.is_finite() && self.half_extent > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "grid half extent must be positive, got {}",
                self.half_extent
            )));
        }
        if self.nx < Self::MIN_NODES || self.ny < Self::MIN_NODES {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least {} nodes per axis, got {}x{}",
                Self::MIN_NODES,
                self.nx,
                self.ny
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        2.0 * self.half_extent / (self.nx - 1) as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        2.0 * self.half_extent / (self.ny - 1) as f64
    }

    /// The coarser of the two spacings.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.nx - 1) as f64) * self.hx()
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * (self.ny - 1) as f64) * self.hy()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Trapezoidal weight along x1 (without the spacing factor).
    #[inline]
    pub fn trap_x(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nx {
            0.5
        } else {
            1.0
        }
    }

    #[inline]
    pub fn trap_y(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.ny {
            0.5
        } else {
            1.0
        }
    }

    /// Row index whose ordinate is closest to `x2`.
    pub fn nearest_row(&self, x2: f64) -> usize {
        let c = 0.5 * (self.ny - 1) as f64;
        let j = (x2 / self.hy() + c).round();
        j.clamp(0.0, (self.ny - 1) as f64) as usize
    }

    pub fn describe(&self) -> String {
        format!("[-{0}, {0}]^2 with {1}x{2} nodes", self.half_extent, self.nx, self.ny)
    }
}

/// Scalar field sampled on a [`GridSpec`].
#[derive(Clone, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("max_abs", &self.max_abs())
            .finish_non_exhaustive()
    }
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let x2 = grid.x2(j);
            for i in 0..grid.nx {
                values.push(f(grid.x1(i), x2));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.describe(),
                found: format!("{} values", values.len()),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "field value at flat index {bad} is not finite"
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Zero the outermost ring of nodes.
    pub fn clear_boundary(&mut self) {
        let g = self.grid;
        for i in 0..g.nx {
            self.set(i, 0, 0.0);
            self.set(i, g.ny - 1, 0.0);
        }
        for j in 0..g.ny {
            self.set(0, j, 0.0);
            self.set(g.nx - 1, j, 0.0);
        }
    }

    pub fn check_grid(&self, expected: &GridSpec) -> Result<()> {
        if self.grid != *expected {
            return Err(Error::GridMismatch {
                expected: expected.describe(),
                found: self.grid.describe(),
            });
        }
        Ok(())
    }

    /// Tensor-product cubic Lagrange interpolation at an arbitrary point.
    ///
    /// Returns `None` when the 4x4 stencil would leave the grid.
    pub fn sample_bicubic(&self, x1: f64, x2: f64) -> Option<f64> {
        let g = &self.grid;
        let fx = x1 / g.hx() + 0.5 * (g.nx - 1) as f64;
        let fy = x2 / g.hy() + 0.5 * (g.ny - 1) as f64;
        if !(fx.is_finite() && fy.is_finite()) {
            return None;
        }
        let i0 = fx.floor();
        let j0 = fy.floor();
        if i0 < 1.0 || j0 < 1.0 || i0 + 2.0 > (g.nx - 1) as f64 || j0 + 2.0 > (g.ny - 1) as f64 {
            // allow the exact upper edge node
            if fx == (g.nx - 1) as f64 || fy == (g.ny - 1) as f64 {
                return self.sample_bilinear(x1, x2);
            }
            return None;
        }
        let (i0, j0) = (i0 as usize, j0 as usize);
        let wx = cubic_weights(fx - i0 as f64);
        let wy = cubic_weights(fy - j0 as f64);
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let j = j0 + b - 1;
            let mut row = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                row += wxa * self.get(i0 + a - 1, j);
            }
            acc += wyb * row;
        }
        Some(acc)
    }

    /// Bilinear interpolation; `None` outside the box.
    pub fn sample_bilinear(&self, x1: f64, x2: f64) -> Option<f64> {
        let g = &self.grid;
        let fx = x1 / g.hx() + 0.5 * (g.nx - 1) as f64;
        let fy = x2 / g.hy() + 0.5 * (g.ny - 1) as f64;
        let maxx = (g.nx - 1) as f64;
        let maxy = (g.ny - 1) as f64;
        if !(0.0..=maxx).contains(&fx) || !(0.0..=maxy).contains(&fy) {
            return None;
        }
        let i0 = (fx.floor() as usize).min(g.nx - 2);
        let j0 = (fy.floor() as usize).min(g.ny - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v00 = self.get(i0, j0);
        let v10 = self.get(i0 + 1, j0);
        let v01 = self.get(i0, j0 + 1);
        let v11 = self.get(i0 + 1, j0 + 1);
        Some(
            (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11),
        )
    }

    /// Resample onto another grid. Points whose bicubic stencil leaves the
    /// source grid fall back to bilinear, and to zero outside the source box.
    pub fn resample(&self, target: GridSpec) -> Field {
        if target == self.grid {
            return self.clone();
        }
        Field::from_fn(target, |x1, x2| {
            self.sample_bicubic(x1, x2)
                .or_else(|| self.sample_bilinear(x1, x2))
                .unwrap_or(0.0)
        })
    }
}

/// Cubic Lagrange weights for nodes at -1, 0, 1, 2 evaluated at `t` in [0, 1].
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Scalar function sampled on a uniform 1D mesh `[s_min, s_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    pub s_min: f64,
    pub s_max: f64,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative_values: Option<Vec<f64>>,
}

impl Profile1D {
    pub fn new(s_min: f64, s_max: f64, values: Vec<f64>) -> Result<Self> {
        if !(s_max > s_min) || values.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "profile needs s_max > s_min and at least 2 nodes (got [{s_min}, {s_max}], {} nodes)",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("profile has non-finite values".into()));
        }
        Ok(Self {
            s_min,
            s_max,
            values,
            derivative_values: None,
        })
    }

    pub fn from_fn(s_min: f64, s_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = (s_max - s_min) / (n.max(2) - 1) as f64;
        let values = (0..n).map(|k| f(s_min + k as f64 * step)).collect();
        Self::new(s_min, s_max, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n() - 1) as f64
    }

    #[inline]
    pub fn s(&self, k: usize) -> f64 {
        self.s_min + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (self.s(k), v))
    }

    /// Piecewise cubic (4-point Lagrange) interpolation; `None` outside the domain.
    pub fn eval(&self, s: f64) -> Option<f64> {
        let tol = 1e-12 * (self.s_max - self.s_min);
        if s < self.s_min - tol || s > self.s_max + tol {
            return None;
        }
        Some(lagrange4(&self.values, (s - self.s_min) / self.spacing()))
    }
}

/// Cubic Lagrange interpolation of uniformly spaced samples at fractional
/// index `x` (0 = first sample). Clamps to the one-sided stencil at the ends.
pub(crate) fn lagrange4(values: &[f64], x: f64) -> f64 {
    let n = values.len();
    if n < 4 {
        let i = (x.floor().max(0.0) as usize).min(n - 2);
        let t = x - i as f64;
        return (1.0 - t) * values[i] + t * values[i + 1];
    }
    let i = x.floor() as isize;
    let start = (i - 1).clamp(0, n as isize - 4) as usize;
    let t = x - start as f64;
    let (p0, p1, p2, p3) = (
        values[start],
        values[start + 1],
        values[start + 2],
        values[start + 3],
    );
    // nodes at t = 0, 1, 2, 3
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    l0 * p0 + l1 * p1 + l2 * p2 + l3 * p3
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_nodes_have_opposite_coordinates() {
        for n in [16, 17, 101, 128] {
            let g = GridSpec::square(2.5, n).unwrap();
            for i in 0..n {
                assert_eq!(g.x1(i), -g.x1(n - 1 - i));
                assert_eq!(g.x2(i), -g.x2(n - 1 - i));
            }
            assert!((g.x1(n - 1) - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_small_grids() {
        assert!(GridSpec::new(1.0, 15, 32).is_err());
        assert!(GridSpec::new(-1.0, 32, 32).is_err());
    }

    #[test]
    fn bicubic_reproduces_cubics() {
        let g = GridSpec::square(2.0, 41).unwrap();
        let f = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + y - 0.5;
        let field = Field::from_fn(g, f);
        for &(x, y) in &[(0.13, -0.71), (1.1, 0.333), (-1.7, 1.7)] {
            let v = field.sample_bicubic(x, y).unwrap();
            assert!((v - f(x, y)).abs() < 1e-12, "{v} vs {}", f(x, y));
        }
        assert!(field.sample_bicubic(1.99, 0.0).is_none());
        assert!(field.sample_bicubic(2.5, 0.0).is_none());
    }

    #[test]
    fn lagrange_is_exact_for_cubics() {
        let p = Profile1D::from_fn(-1.0, 2.0, 31, |s| s * s * s - s).unwrap();
        for s in [-1.0, -0.95, 0.31, 1.999, 2.0] {
            assert!((p.eval(s).unwrap() - (s * s * s - s)).abs() < 1e-12);
        }
        assert!(p.eval(2.1).is_none());
    }

    #[test]
    fn compensated_sum() {
        let mut acc = KahanSum::default();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-13).abs() < 1e-20);
    }
}
