//! Controlled paths: integrands admissible for rough integration.
//!
//! A controlled path is a pair `(Y, Y')` where `Y` takes values in the
//! linear maps ℝ^d → ℝ^n (row-major n×d per grid point) and the derivative
//! `Y'` in ℝ^{n×d×d}, indexed `Y'[a][b][c] = ∂ Y[a][b] / ∂ X^{(c)}`. The
//! remainder `R_{s,t} = Y_{s,t} - Y'_s X_{s,t}` measures how well `Y'`
//! linearises `Y` along the reference path.

use crate::{Error, GridPath, Result, RoughPath, TimeGrid};

/// A path `Y` with its derivative `Y'` relative to a reference rough path.
///
/// The reference is passed to the operations that need its increments; the
/// constructor pins the expected grid and base dimension so mismatches fail
/// early.
#[derive(Debug, Clone)]
pub struct ControlledPath {
    y: GridPath,
    y_prime: GridPath,
    out_dim: usize,
    base_dim: usize,
}

impl ControlledPath {
    pub fn new(y: GridPath, y_prime: GridPath, out_dim: usize, base: &RoughPath) -> Result<Self> {
        let d = base.dim();
        y.check_same_grid(base.path())?;
        y_prime.check_same_grid(base.path())?;
        if y.dim() != out_dim * d {
            return Err(Error::DimensionMismatch(format!(
                "Y has dim {}, expected out_dim {} × base dim {}",
                y.dim(),
                out_dim,
                d
            )));
        }
        if y_prime.dim() != out_dim * d * d {
            return Err(Error::DimensionMismatch(format!(
                "Y' has dim {}, expected out_dim {} × base dim {}²",
                y_prime.dim(),
                out_dim,
                d
            )));
        }
        Ok(Self {
            y,
            y_prime,
            out_dim,
            base_dim: d,
        })
    }

    /// The coordinate integrand `Y = X`, `Y' = 1` for a scalar reference.
    pub fn coordinate(base: &RoughPath) -> Result<Self> {
        if base.dim() != 1 {
            return Err(Error::DimensionMismatch(
                "coordinate integrand requires a one-dimensional reference".into(),
            ));
        }
        let y = base.path().clone();
        let y_prime = GridPath::constant(*base.grid(), &[1.0])?;
        Self::new(y, y_prime, 1, base)
    }

    /// Constant integrand `Y ≡ c` (row-major n×d), `Y' ≡ 0`.
    pub fn constant(value: &[f64], out_dim: usize, base: &RoughPath) -> Result<Self> {
        let d = base.dim();
        if value.len() != out_dim * d {
            return Err(Error::DimensionMismatch(format!(
                "constant integrand needs {} entries, got {}",
                out_dim * d,
                value.len()
            )));
        }
        let y = GridPath::constant(*base.grid(), value)?;
        let y_prime = GridPath::constant(*base.grid(), &vec![0.0; out_dim * d * d])?;
        Self::new(y, y_prime, out_dim, base)
    }

    pub fn y(&self) -> &GridPath {
        &self.y
    }

    pub fn y_prime(&self) -> &GridPath {
        &self.y_prime
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn grid(&self) -> &TimeGrid {
        self.y.grid()
    }

    /// Linear combination `a·self + b·other` (shared reference path).
    pub fn axpy(&self, a: f64, other: &ControlledPath, b: f64) -> Result<ControlledPath> {
        if self.out_dim != other.out_dim || self.base_dim != other.base_dim {
            return Err(Error::DimensionMismatch(
                "controlled paths of different shapes".into(),
            ));
        }
        Ok(ControlledPath {
            y: self.y.axpy(a, &other.y, b)?,
            y_prime: self.y_prime.axpy(a, &other.y_prime, b)?,
            out_dim: self.out_dim,
            base_dim: self.base_dim,
        })
    }

    pub fn scale(&self, lambda: f64) -> ControlledPath {
        ControlledPath {
            y: self.y.scale(lambda),
            y_prime: self.y_prime.scale(lambda),
            out_dim: self.out_dim,
            base_dim: self.base_dim,
        }
    }

    fn check_base(&self, base: &RoughPath) -> Result<()> {
        self.y.check_same_grid(base.path())?;
        if base.dim() != self.base_dim {
            return Err(Error::DimensionMismatch(format!(
                "reference dim {} vs controlled base dim {}",
                base.dim(),
                self.base_dim
            )));
        }
        Ok(())
    }

    /// Remainder `R_{i,j} = Y_{i,j} - Y'_i X_{i,j}` (row-major n×d).
    pub fn remainder(&self, base: &RoughPath, i: usize, j: usize) -> Result<Vec<f64>> {
        if i >= j {
            return Err(Error::EmptyInterval { start: i, end: j });
        }
        self.check_base(base)?;
        let n = self.out_dim;
        let d = self.base_dim;
        let mut out = vec![0.0; n * d];
        let mut dx = vec![0.0; d];
        base.path().increment(i, j, &mut dx);
        let yi = self.y.value(i);
        let yj = self.y.value(j);
        let ypi = self.y_prime.value(i);
        for a in 0..n {
            for b in 0..d {
                let mut corr = 0.0;
                for (c, dxc) in dx.iter().enumerate() {
                    corr += ypi[(a * d + b) * d + c] * dxc;
                }
                out[a * d + b] = yj[a * d + b] - yi[a * d + b] - corr;
            }
        }
        Ok(out)
    }

    /// `max_{s<t} |R_{s,t}|_F / (t-s)^{2 alpha}` over all grid pairs.
    pub fn remainder_two_alpha_norm(&self, base: &RoughPath, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        self.check_base(base)?;
        let n_steps = self.grid().n_steps();
        let h = self.grid().step();
        let n = self.out_dim;
        let d = self.base_dim;
        let ratios = crate::exec::map_indexed(n_steps, |lag_m1| {
            let lag = lag_m1 + 1;
            let w = ((lag as f64) * h).powf(2.0 * alpha);
            let mut dx = vec![0.0; d];
            let mut best: f64 = 0.0;
            for i in 0..=(n_steps - lag) {
                let j = i + lag;
                base.path().increment(i, j, &mut dx);
                let yi = self.y.value(i);
                let yj = self.y.value(j);
                let ypi = self.y_prime.value(i);
                let mut total = 0.0;
                for a in 0..n {
                    for b in 0..d {
                        let mut corr = 0.0;
                        for (c, dxc) in dx.iter().enumerate() {
                            corr += ypi[(a * d + b) * d + c] * dxc;
                        }
                        let r = yj[a * d + b] - yi[a * d + b] - corr;
                        total += r * r;
                    }
                }
                let v = total.sqrt();
                if v > best {
                    best = v;
                }
            }
            best / w
        });
        Ok(ratios.into_iter().fold(0.0, f64::max))
    }
}

/// A twice continuously differentiable scalar function with its first two
/// derivatives, evaluable along path values.
pub trait ScalarC2: Sync {
    fn value(&self, x: f64) -> f64;
    fn first(&self, x: f64) -> f64;
    fn second(&self, x: f64) -> f64;
}

/// `F(x) = x`.
pub struct IdentityFn;

impl ScalarC2 for IdentityFn {
    fn value(&self, x: f64) -> f64 {
        x
    }
    fn first(&self, _: f64) -> f64 {
        1.0
    }
    fn second(&self, _: f64) -> f64 {
        0.0
    }
}

/// `F(x) = x²`.
pub struct SquareFn;

impl ScalarC2 for SquareFn {
    fn value(&self, x: f64) -> f64 {
        x * x
    }
    fn first(&self, x: f64) -> f64 {
        2.0 * x
    }
    fn second(&self, _: f64) -> f64 {
        2.0
    }
}

/// `F(x) = x³`.
pub struct CubeFn;

impl ScalarC2 for CubeFn {
    fn value(&self, x: f64) -> f64 {
        x * x * x
    }
    fn first(&self, x: f64) -> f64 {
        3.0 * x * x
    }
    fn second(&self, x: f64) -> f64 {
        6.0 * x
    }
}

/// `F(x) ≡ c`.
pub struct ConstFn(pub f64);

impl ScalarC2 for ConstFn {
    fn value(&self, _: f64) -> f64 {
        self.0
    }
    fn first(&self, _: f64) -> f64 {
        0.0
    }
    fn second(&self, _: f64) -> f64 {
        0.0
    }
}

/// User-supplied C² function given as three closures.
pub struct CustomC2<F, G, H>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
    H: Fn(f64) -> f64 + Sync,
{
    pub f: F,
    pub df: G,
    pub d2f: H,
}

impl<F, G, H> ScalarC2 for CustomC2<F, G, H>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
    H: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn first(&self, x: f64) -> f64 {
        (self.df)(x)
    }
    fn second(&self, x: f64) -> f64 {
        (self.d2f)(x)
    }
}

/// Lifts a smooth scalar function of a scalar reference path to the
/// controlled pair `(F(X), DF(X))`.
pub fn controlled_lift_smooth(f: &dyn ScalarC2, base: &RoughPath) -> Result<ControlledPath> {
    if base.dim() != 1 {
        return Err(Error::DimensionMismatch(
            "smooth lift requires a one-dimensional reference".into(),
        ));
    }
    let grid = *base.grid();
    let mut y = Vec::with_capacity(grid.n_points());
    let mut yp = Vec::with_capacity(grid.n_points());
    for i in 0..grid.n_points() {
        let x = base.path().value1(i);
        let v = f.value(x);
        let dv = f.first(x);
        if !v.is_finite() || !dv.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite lift value at grid point {i} (x = {x})"
            )));
        }
        y.push(v);
        yp.push(dv);
    }
    ControlledPath::new(
        GridPath::scalar(grid, y)?,
        GridPath::scalar(grid, yp)?,
        1,
        base,
    )
}
