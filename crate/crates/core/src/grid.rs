//! Uniform time grids and vector-valued paths sampled on them.
//!
//! Every object in this library lives on a uniform grid over `[0, T]`. A
//! [`GridPath`] stores one d-dimensional value per grid point in a flat
//! row-major buffer; increments `X_{s,t} = X_t - X_s` are always taken
//! between grid points.

use crate::{Error, Result};

/// A uniform partition of `[0, T]` into `n_steps` equal steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::DegenerateGrid("n_steps must be at least 1".into()));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::DegenerateGrid(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        Ok(Self { horizon, n_steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    /// Time difference `t_j - t_i`, evaluated as `(j - i)·h` so that equal
    /// lags always produce identical weights in norm scans.
    pub fn span(&self, i: usize, j: usize) -> f64 {
        (j - i) as f64 * self.step()
    }
}

/// A d-dimensional path sampled on a [`TimeGrid`]. Values are immutable
/// after construction; all operations on paths are pure functions.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl GridPath {
    /// Wraps a flat row-major buffer of `n_points × dim` values.
    pub fn from_values(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("path dimension must be ≥ 1".into()));
        }
        if values.len() != grid.n_points() * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values ({} points × dim {}), got {}",
                grid.n_points() * dim,
                grid.n_points(),
                dim,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite path value at flat index {bad}"
            )));
        }
        Ok(Self { grid, dim, values })
    }

    /// One-dimensional path from scalar samples.
    pub fn scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::from_values(grid, 1, values)
    }

    /// Constant path `X_t ≡ value`.
    pub fn constant(grid: TimeGrid, value: &[f64]) -> Result<Self> {
        let dim = value.len();
        let mut values = Vec::with_capacity(grid.n_points() * dim);
        for _ in 0..grid.n_points() {
            values.extend_from_slice(value);
        }
        Self::from_values(grid, dim, values)
    }

    /// Builds a path by evaluating `f` at every grid time.
    pub fn tabulate(grid: TimeGrid, dim: usize, f: impl Fn(f64, &mut [f64])) -> Result<Self> {
        let mut values = vec![0.0; grid.n_points() * dim];
        for i in 0..grid.n_points() {
            f(grid.time(i), &mut values[i * dim..(i + 1) * dim]);
        }
        Self::from_values(grid, dim, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at grid point `i`.
    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Scalar value at grid point `i` (first component).
    pub fn value1(&self, i: usize) -> f64 {
        self.values[i * self.dim]
    }

    /// Writes the increment `X_j - X_i` into `out`.
    pub fn increment(&self, i: usize, j: usize, out: &mut [f64]) {
        let a = self.value(i);
        let b = self.value(j);
        for k in 0..self.dim {
            out[k] = b[k] - a[k];
        }
    }

    /// Euclidean norm of the increment `X_j - X_i`.
    pub fn increment_norm(&self, i: usize, j: usize) -> f64 {
        let a = self.value(i);
        let b = self.value(j);
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = b[k] - a[k];
            s += d * d;
        }
        s.sqrt()
    }

    /// `max_t |X_t|` (Euclidean norm per point).
    pub fn sup_norm(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.grid.n_points() {
            let v = self.value(i);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            best = best.max(n);
        }
        best
    }

    /// Componentwise linear combination `a·self + b·other` on a shared grid.
    pub fn axpy(&self, a: f64, other: &GridPath, b: f64) -> Result<GridPath> {
        self.check_same_grid(other)?;
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "dims {} vs {}",
                self.dim, other.dim
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridPath::from_values(self.grid, self.dim, values)
    }

    /// Scales every value by `lambda`.
    pub fn scale(&self, lambda: f64) -> GridPath {
        let values = self.values.iter().map(|v| lambda * v).collect();
        GridPath {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }

    pub fn check_same_grid(&self, other: &GridPath) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "grids differ: ({}, {} steps) vs ({}, {} steps)",
                self.grid.horizon,
                self.grid.n_steps,
                other.grid.horizon,
                other.grid.n_steps
            )));
        }
        Ok(())
    }
}

/// Hölder-scale parameters shared by the rough-path and roughness modules:
/// the rough-path regularity `alpha`, the roughness exponent `theta`, and
/// the roughness scale `epsilon0` (defaulting to half the horizon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParams {
    pub alpha: f64,
    pub theta: f64,
    pub epsilon0: f64,
}

impl AlphaParams {
    /// Requires `1/3 < alpha < 1/2`, `1/2 < theta < 1` and `theta < 2·alpha`.
    pub fn new(alpha: f64, theta: f64, horizon: f64) -> Result<Self> {
        if !(alpha > 1.0 / 3.0 && alpha < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (1/3, 1/2), got {alpha}"
            )));
        }
        if !(theta > 0.5 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (1/2, 1), got {theta}"
            )));
        }
        if !(theta < 2.0 * alpha) {
            return Err(Error::InvalidParameter(format!(
                "hypothesis violated: theta = {theta} must be below 2·alpha = {}",
                2.0 * alpha
            )));
        }
        Ok(Self {
            alpha,
            theta,
            epsilon0: horizon / 2.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_zero_steps() {
        assert!(matches!(
            TimeGrid::new(1.0, 0),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn grid_rejects_bad_horizon() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(-1.0, 4).is_err());
        assert!(TimeGrid::new(f64::NAN, 4).is_err());
    }

    #[test]
    fn uniform_spacing() {
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.step(), 0.25);
        assert_eq!(g.time(4), 1.0);
        assert_eq!(g.span(2, 6), 1.0);
    }

    #[test]
    fn path_shape_checks() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(GridPath::scalar(g, vec![0.0, 1.0]).is_err());
        assert!(GridPath::scalar(g, vec![0.0, 1.0, f64::INFINITY]).is_err());
        let p = GridPath::scalar(g, vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(p.increment_norm(0, 2), 3.0);
        assert_eq!(p.value1(1), 1.0);
    }

    #[test]
    fn alpha_params_validation() {
        assert!(AlphaParams::new(0.4, 0.55, 1.0).is_ok());
        assert!(AlphaParams::new(0.3, 0.55, 1.0).is_err());
        assert!(AlphaParams::new(0.4, 0.85, 1.0).is_err()); // theta ≥ 2 alpha
        let p = AlphaParams::new(0.45, 0.55, 2.0).unwrap();
        assert_eq!(p.epsilon0, 1.0);
    }
}
