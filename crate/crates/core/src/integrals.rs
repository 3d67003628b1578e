//! Discrete stochastic integrals: left-point sums, cross variation, and the
//! symmetrised (Stratonovich) correction.
//!
//! Adaptedness is structural here: integrands enter through left-point
//! evaluation only, and there is no look-ahead API. The base grid is the
//! reference object for every limit statement — coarser partitions are
//! compared against it and the gap is reported, never asserted to vanish.

use crate::util::KahanSum;
use crate::{quadratic_variation, Error, GridPath, Result, ScalarC2};

/// Cumulative left-point integral `Σ y_k (b_{k+1} - b_k)`.
///
/// `y` is read as an n×d matrix per grid point with `n = y.dim / b.dim`;
/// the result is the cumulative n-vector path. For scalar `b`, `y` may have
/// any dimension (each component integrates separately).
pub fn ito_integral(y: &GridPath, b: &GridPath) -> Result<GridPath> {
    y.check_same_grid(b)?;
    let d = b.dim();
    if !y.dim().is_multiple_of(d) {
        return Err(Error::DimensionMismatch(format!(
            "integrand dim {} is not a multiple of integrator dim {}",
            y.dim(),
            d
        )));
    }
    let n_out = y.dim() / d;
    let n = b.grid().n_steps();
    let mut out = vec![0.0; (n + 1) * n_out];
    let mut acc = vec![KahanSum::new(); n_out];
    let mut db = vec![0.0; d];
    for k in 0..n {
        b.increment(k, k + 1, &mut db);
        let yk = y.value(k);
        for a in 0..n_out {
            let mut t = 0.0;
            for c in 0..d {
                t += yk[a * d + c] * db[c];
            }
            acc[a].add(t);
        }
        for (slot, s) in out[(k + 1) * n_out..(k + 2) * n_out].iter_mut().zip(&acc) {
            *slot = s.value();
        }
    }
    GridPath::from_values(*b.grid(), n_out, out)
}

/// Cumulative realised cross variation `Σ Δy ⊗ Δb`, an n×d matrix path.
#[derive(Debug, Clone)]
pub struct CrossVariationPath {
    /// Matrix path of dimension `y_dim × b_dim`, row-major.
    pub path: GridPath,
    pub y_dim: usize,
    pub b_dim: usize,
}

impl CrossVariationPath {
    /// Matrix value at grid point `k`.
    pub fn value(&self, k: usize) -> &[f64] {
        self.path.value(k)
    }

    /// Trace at grid point `k` (square case only).
    pub fn trace(&self, k: usize) -> f64 {
        debug_assert_eq!(self.y_dim, self.b_dim);
        let v = self.path.value(k);
        (0..self.y_dim).map(|i| v[i * self.b_dim + i]).sum()
    }
}

/// Cross variation of two paths at base-grid resolution.
pub fn cross_variation(y: &GridPath, b: &GridPath) -> Result<CrossVariationPath> {
    y.check_same_grid(b)?;
    let ny = y.dim();
    let d = b.dim();
    let n = b.grid().n_steps();
    let s = ny * d;
    let mut out = vec![0.0; (n + 1) * s];
    let mut acc = vec![KahanSum::new(); s];
    for k in 0..n {
        let y0 = y.value(k);
        let y1 = y.value(k + 1);
        let b0 = b.value(k);
        let b1 = b.value(k + 1);
        for r in 0..ny {
            let dy = y1[r] - y0[r];
            for c in 0..d {
                acc[r * d + c].add(dy * (b1[c] - b0[c]));
            }
        }
        for (slot, a) in out[(k + 1) * s..(k + 2) * s].iter_mut().zip(&acc) {
            *slot = a.value();
        }
    }
    Ok(CrossVariationPath {
        path: GridPath::from_values(*b.grid(), s, out)?,
        y_dim: ny,
        b_dim: d,
    })
}

/// Stratonovich integral `∫ y ∘ db = ∫ y db + ½ ⟨y, b⟩` for paths of equal
/// dimension, paired componentwise and summed. Scalar cumulative result.
pub fn stratonovich_integral(y: &GridPath, b: &GridPath) -> Result<GridPath> {
    y.check_same_grid(b)?;
    if y.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "componentwise pairing needs equal dims, got {} and {}",
            y.dim(),
            b.dim()
        )));
    }
    let ito = ito_integral(y, b)?; // y as 1×d row
    let cv = cross_variation(y, b)?;
    let n = b.grid().n_points();
    let out: Vec<f64> = (0..n).map(|k| ito.value1(k) + 0.5 * cv.trace(k)).collect();
    GridPath::scalar(*b.grid(), out)
}

/// One row of a midpoint-sum refinement comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MidpointRow {
    pub level: u32,
    pub modulus: f64,
    /// |midpoint sum - base-grid Stratonovich value| at the horizon.
    pub gap: f64,
}

/// Report of midpoint Riemann sums against the base-grid Stratonovich
/// value along refining dyadic partitions.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MidpointReport {
    pub rows: Vec<MidpointRow>,
    pub base_value: f64,
    /// Fitted decay order in the modulus; absent when all gaps sit at
    /// rounding level (the midpoint sum telescopes exactly for `y = b`).
    pub fitted_order: Option<f64>,
    pub exact: bool,
}

/// Evaluates `Σ ½(y_u + y_v)(b_v - b_u)` on dyadic partitions and compares
/// with the base-grid Stratonovich integral. Scalar paths.
pub fn midpoint_convergence(y: &GridPath, b: &GridPath, levels: &[u32]) -> Result<MidpointReport> {
    y.check_same_grid(b)?;
    if y.dim() != 1 || b.dim() != 1 {
        return Err(Error::DimensionMismatch(
            "midpoint comparison is defined for scalar paths".into(),
        ));
    }
    let strat = stratonovich_integral(y, b)?;
    let base_value = strat.value1(strat.grid().n_points() - 1);
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let part = crate::Partition::dyadic(b.grid(), level)?;
        let mut acc = KahanSum::new();
        for (u, v) in part.intervals() {
            acc.add(0.5 * (y.value1(u) + y.value1(v)) * (b.value1(v) - b.value1(u)));
        }
        rows.push(MidpointRow {
            level,
            modulus: part.modulus(b.grid()),
            gap: (acc.value() - base_value).abs(),
        });
    }
    let floor = 1e-13 * (1.0 + base_value.abs());
    let exact = rows.iter().all(|r| r.gap <= floor);
    let fitted_order = if exact {
        None
    } else {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.gap > floor)
            .map(|r| (r.modulus.ln(), r.gap.ln()))
            .collect();
        if pts.len() >= 3 {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            crate::util::ols(&xs, &ys).ok().map(|(s, _, _)| s)
        } else {
            None
        }
    };
    Ok(MidpointReport {
        rows,
        base_value,
        fitted_order,
        exact,
    })
}

/// Coefficient handles of a scalar state equation
/// `dx = drift dt + qv_coeff d⟨b⟩ + diffusion db`, evaluated left-point at
/// `(t, b_t, x_t)`.
pub struct ItoProcessSpec<'a> {
    pub x0: f64,
    pub drift: &'a dyn Fn(f64, f64, f64) -> f64,
    pub qv_coeff: &'a dyn Fn(f64, f64, f64) -> f64,
    pub diffusion: &'a dyn Fn(f64, f64, f64) -> f64,
}

/// Builds the state path of an [`ItoProcessSpec`] along a sampled driver.
pub fn build_ito_process(spec: &ItoProcessSpec, b: &GridPath) -> Result<GridPath> {
    if b.dim() != 1 {
        return Err(Error::DimensionMismatch(
            "state equations are scalar here".into(),
        ));
    }
    let grid = *b.grid();
    let n = grid.n_steps();
    let h = grid.step();
    let qv = quadratic_variation(b);
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(spec.x0);
    let mut acc = KahanSum::new();
    acc.add(spec.x0);
    for k in 0..n {
        let t = grid.time(k);
        let bk = b.value1(k);
        let xk = acc.value();
        let dqv = qv.value1(k + 1) - qv.value1(k);
        let db = b.value1(k + 1) - bk;
        acc.add((spec.drift)(t, bk, xk) * h);
        acc.add((spec.qv_coeff)(t, bk, xk) * dqv);
        acc.add((spec.diffusion)(t, bk, xk) * db);
        let next = acc.value();
        if !next.is_finite() {
            return Err(Error::Numerical(format!(
                "state blew up at step {k} (x = {next})"
            )));
        }
        xs.push(next);
    }
    GridPath::scalar(grid, xs)
}

/// Largest over the grid of the change-of-variable residual
///
/// ```text
/// Φ(x_t) - Φ(x_0) - Σ Φ'(x)β db - Σ Φ'(x)α dt - Σ (Φ'(x)γ + ½Φ''(x)β²) d⟨b⟩
/// ```
///
/// for the state path of `spec` along the driver `b`. Linear and quadratic
/// `Φ` with `x = b` cancel exactly on the grid by the defining identity of
/// the realised quadratic variation.
pub fn ito_formula_residual(phi: &dyn ScalarC2, spec: &ItoProcessSpec, b: &GridPath) -> Result<f64> {
    let x = build_ito_process(spec, b)?;
    let grid = *b.grid();
    let n = grid.n_steps();
    let h = grid.step();
    let qv = quadratic_variation(b);
    let mut rhs = KahanSum::new();
    let mut worst: f64 = 0.0;
    let phi0 = phi.value(x.value1(0));
    for k in 0..n {
        let t = grid.time(k);
        let bk = b.value1(k);
        let xk = x.value1(k);
        let db = b.value1(k + 1) - bk;
        let dqv = qv.value1(k + 1) - qv.value1(k);
        let dphi = phi.first(xk);
        let d2phi = phi.second(xk);
        let beta = (spec.diffusion)(t, bk, xk);
        let alpha = (spec.drift)(t, bk, xk);
        let gamma = (spec.qv_coeff)(t, bk, xk);
        rhs.add(dphi * beta * db);
        rhs.add(dphi * alpha * h);
        rhs.add((dphi * gamma + 0.5 * d2phi * beta * beta) * dqv);
        let lhs = phi.value(x.value1(k + 1)) - phi0;
        let res = (lhs - rhs.value()).abs();
        if res > worst {
            worst = res;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CubeFn, IdentityFn, SquareFn, TimeGrid};
    use rand::{Rng, SeedableRng};

    fn bm_like(n: usize, seed: u64) -> GridPath {
        let grid = TimeGrid::new(1.0, n).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0];
        let scale = (1.0 / n as f64).sqrt();
        for _ in 0..n {
            let last = *values.last().unwrap();
            values.push(last + scale * rng.random_range(-1.7..1.7));
        }
        GridPath::scalar(grid, values).unwrap()
    }

    #[test]
    fn unit_integrand_recovers_integrator() {
        let b = bm_like(64, 1);
        let ones = GridPath::constant(*b.grid(), &[1.0]).unwrap();
        let i = ito_integral(&ones, &b).unwrap();
        for k in 0..=64 {
            assert!((i.value1(k) - (b.value1(k) - b.value1(0))).abs() < 1e-14);
        }
    }

    #[test]
    fn self_integral_identity() {
        // ∫ b db = (b_T² - ⟨b⟩_T)/2 exactly on the grid.
        let b = bm_like(256, 2);
        let i = ito_integral(&b, &b).unwrap();
        let qv = quadratic_variation(&b);
        let n = 256;
        let expected = 0.5 * (b.value1(n) * b.value1(n) - qv.value1(n));
        assert!(
            (i.value1(n) - expected).abs() < 1e-12,
            "{} vs {expected}",
            i.value1(n)
        );
    }

    #[test]
    fn deterministic_ramp_integral() {
        // b_t = t, y_t = t, T = 1: Σ t_k Δt = ½ - 1/(2n).
        let n = 50;
        let grid = TimeGrid::new(1.0, n).unwrap();
        let ramp = GridPath::tabulate(grid, 1, |t, out| out[0] = t).unwrap();
        let i = ito_integral(&ramp, &ramp).unwrap();
        let expected = 0.5 - 1.0 / (2.0 * n as f64);
        assert!((i.value1(n) - expected).abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = bm_like(32, 3);
        let b = bm_like(64, 3);
        assert!(ito_integral(&a, &b).is_err());
    }

    #[test]
    fn cross_variation_cases() {
        let b = bm_like(128, 4);
        // Constant y → zero cross variation.
        let c = GridPath::constant(*b.grid(), &[3.0]).unwrap();
        let cv = cross_variation(&c, &b).unwrap();
        assert_eq!(cv.value(128), &[0.0]);
        // y = b → the quadratic variation.
        let cv = cross_variation(&b, &b).unwrap();
        let qv = quadratic_variation(&b);
        for k in [0, 17, 128] {
            assert!((cv.value(k)[0] - qv.value1(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn cross_variation_of_scaled_integral() {
        // y = ∫ 2 db → ⟨y, b⟩ = 2⟨b⟩ exactly on the grid.
        let b = bm_like(128, 5);
        let two = GridPath::constant(*b.grid(), &[2.0]).unwrap();
        let y = ito_integral(&two, &b).unwrap();
        let cv = cross_variation(&y, &b).unwrap();
        let qv = quadratic_variation(&b);
        for k in [1, 64, 128] {
            assert!(
                (cv.value(k)[0] - 2.0 * qv.value1(k)).abs() < 1e-12,
                "k = {k}"
            );
        }
    }

    #[test]
    fn bilinearity_and_polarization() {
        let y = bm_like(64, 6);
        let b = bm_like(64, 7);
        // Bilinearity: ⟨2y, 3b⟩ = 6⟨y, b⟩.
        let cv = cross_variation(&y, &b).unwrap();
        let cv_scaled = cross_variation(&y.scale(2.0), &b.scale(3.0)).unwrap();
        for k in [13, 64] {
            assert!((cv_scaled.value(k)[0] - 6.0 * cv.value(k)[0]).abs() < 1e-12);
        }
        // Polarization: ⟨y+b, y+b⟩ - ⟨y,y⟩ - ⟨b,b⟩ = 2⟨y,b⟩.
        let sum = y.axpy(1.0, &b, 1.0).unwrap();
        let qs = cross_variation(&sum, &sum).unwrap();
        let qy = cross_variation(&y, &y).unwrap();
        let qb = cross_variation(&b, &b).unwrap();
        for k in [13, 64] {
            let lhs = qs.value(k)[0] - qy.value(k)[0] - qb.value(k)[0];
            assert!((lhs - 2.0 * cv.value(k)[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn stratonovich_of_unit_is_integrator() {
        let b = bm_like(64, 8);
        let ones = GridPath::constant(*b.grid(), &[1.0]).unwrap();
        let s = stratonovich_integral(&ones, &b).unwrap();
        for k in [0, 30, 64] {
            assert!((s.value1(k) - (b.value1(k) - b.value1(0))).abs() < 1e-14);
        }
    }

    #[test]
    fn stratonovich_self_integral_is_half_square() {
        let b = bm_like(256, 9);
        let s = stratonovich_integral(&b, &b).unwrap();
        for k in [1, 100, 256] {
            let expected = 0.5 * (b.value1(k) * b.value1(k) - b.value1(0) * b.value1(0));
            assert!(
                (s.value1(k) - expected).abs() < 1e-12,
                "k = {k}: {} vs {expected}",
                s.value1(k)
            );
        }
    }

    #[test]
    fn correction_consistency_guard() {
        // strat - ito = ½ ⟨y, b⟩ by construction; regression guard.
        let b = bm_like(64, 10);
        let y = ito_integral(&b, &b).unwrap();
        let ito = ito_integral(&y, &b).unwrap();
        let strat = stratonovich_integral(&y, &b).unwrap();
        let cv = cross_variation(&y, &b).unwrap();
        for k in [5, 33, 64] {
            let lhs = strat.value1(k) - ito.value1(k);
            assert!((lhs - 0.5 * cv.value(k)[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn midpoint_exact_for_coordinate() {
        // ½(b_u + b_v)(b_v - b_u) telescopes to ½ b_T² exactly.
        let b = bm_like(128, 11);
        let report = midpoint_convergence(&b, &b, &[0, 2, 4, 6]).unwrap();
        assert!(report.exact, "rows {:?}", report.rows);
    }

    #[test]
    fn midpoint_constant_integrand_zero_gap() {
        let b = bm_like(64, 12);
        let c = GridPath::constant(*b.grid(), &[2.0]).unwrap();
        let report = midpoint_convergence(&c, &b, &[0, 1, 3]).unwrap();
        assert!(report.exact);
    }

    #[test]
    fn midpoint_converges_for_integral_integrand() {
        // y = ∫ b db is not affine in b; the midpoint gap decays ~ τ^{1/2}.
        let mut orders = Vec::new();
        for seed in 0..20 {
            let b = bm_like(4096, 100 + seed);
            let y = ito_integral(&b, &b).unwrap();
            let report = midpoint_convergence(&y, &b, &[2, 4, 6, 8, 10]).unwrap();
            if let Some(o) = report.fitted_order {
                orders.push(o);
            }
        }
        let mean: f64 = orders.iter().sum::<f64>() / orders.len() as f64;
        assert!(mean >= 0.5, "mean fitted order {mean}");
    }

    #[test]
    fn drift_cross_variation_decays() {
        // y_t = t: Σ Δy Δb over partitions of modulus τ shrinks like √τ,
        // and the base-grid value shrinks as the grid refines.
        let mut base_small = 0;
        let n_seeds = 40;
        for seed in 0..n_seeds {
            let b_coarse = bm_like(256, 500 + seed);
            let b_fine = bm_like(4096, 900 + seed);
            let ramp_c = GridPath::tabulate(*b_coarse.grid(), 1, |t, o| o[0] = t).unwrap();
            let ramp_f = GridPath::tabulate(*b_fine.grid(), 1, |t, o| o[0] = t).unwrap();
            let cv_c = cross_variation(&ramp_c, &b_coarse).unwrap();
            let cv_f = cross_variation(&ramp_f, &b_fine).unwrap();
            if cv_c.value(256)[0].abs() > cv_f.value(4096)[0].abs() {
                base_small += 1;
            }
        }
        // Finer grids shrink the drift cross variation in most seeds.
        assert!(base_small * 10 >= n_seeds * 7, "{base_small}/{n_seeds}");

        // Coarse-partition sums over the ramp integrand: fit the mean gap
        // against the partition modulus; square-root order or better.
        let n = 4096usize;
        let levels = [2u32, 4, 6, 8, 10];
        let mut mean_abs = vec![0.0f64; levels.len()];
        let seeds = 60;
        for seed in 0..seeds {
            let b = bm_like(n, 2000 + seed);
            let grid = *b.grid();
            for (li, &level) in levels.iter().enumerate() {
                let part = crate::Partition::dyadic(&grid, level).unwrap();
                let mut sum = 0.0;
                for (u, v) in part.intervals() {
                    sum += (grid.time(v) - grid.time(u)) * (b.value1(v) - b.value1(u));
                }
                mean_abs[li] += sum.abs() / seeds as f64;
            }
        }
        let xs: Vec<f64> = levels
            .iter()
            .map(|&l| {
                crate::Partition::dyadic(&TimeGrid::new(1.0, n).unwrap(), l)
                    .unwrap()
                    .modulus(&TimeGrid::new(1.0, n).unwrap())
                    .ln()
            })
            .collect();
        let ys: Vec<f64> = mean_abs.iter().map(|m| m.ln()).collect();
        let (order, _, _) = crate::util::ols(&xs, &ys).unwrap();
        assert!(order >= 0.5, "fitted order {order}");
    }

    #[test]
    fn ito_formula_linear_and_quadratic_exact() {
        let b = bm_like(512, 13);
        let spec = ItoProcessSpec {
            x0: 0.0,
            drift: &|_, _, _| 0.0,
            qv_coeff: &|_, _, _| 0.0,
            diffusion: &|_, _, _| 1.0,
        };
        let lin = ito_formula_residual(&IdentityFn, &spec, &b).unwrap();
        assert!(lin <= 1e-12, "linear residual {lin}");
        let quad = ito_formula_residual(&SquareFn, &spec, &b).unwrap();
        assert!(quad <= 1e-12, "quadratic residual {quad}");
    }

    #[test]
    fn ito_formula_cubic_residual_small() {
        let b = bm_like(4096, 14);
        let spec = ItoProcessSpec {
            x0: 0.0,
            drift: &|_, _, _| 0.0,
            qv_coeff: &|_, _, _| 0.0,
            diffusion: &|_, _, _| 1.0,
        };
        let res = ito_formula_residual(&CubeFn, &spec, &b).unwrap();
        let sup = b.sup_norm();
        assert!(
            res <= 5e-2 * (1.0 + sup * sup * sup),
            "cubic residual {res} vs envelope"
        );
    }

    #[test]
    fn ito_formula_with_drift_and_qv_terms() {
        // x_t = x_0 + ∫α dt + ∫γ d⟨b⟩ + ∫β db with state-dependent handles;
        // linear Φ must still telescope exactly.
        let b = bm_like(256, 15);
        let spec = ItoProcessSpec {
            x0: 1.0,
            drift: &|t, _, _| 0.3 + t,
            qv_coeff: &|_, bk, _| 0.1 * bk,
            diffusion: &|_, _, xk| 0.5 * xk,
        };
        let res = ito_formula_residual(&IdentityFn, &spec, &b).unwrap();
        assert!(res <= 1e-12, "residual {res}");
    }
}
