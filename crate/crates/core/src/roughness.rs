//! Pathwise Hölder-roughness estimation and tail experiments.
//!
//! The dyadic statistic scans blocks `[(k-1)T/2^n, kT/2^n]` at every depth
//! `n ≤ n_max` and every direction of a unit mesh:
//!
//! ```text
//! D_theta = min_{a, n, k}  max_{s,t in block}  2^{theta·n} |a · X_{s,t}|
//! ```
//!
//! A positive `D_theta` certifies directional oscillation at all dyadic
//! scales, and `½ (2T)^{-theta} D_theta` is a lower bound for the roughness
//! modulus `L_theta`. The tail experiments estimate how often the bound
//! falls below a threshold across seeds, maximised over simulated control
//! laws — an empirical stand-in for the capacity, and a lower bound of it.

use crate::sim::{ControlKind, EnsembleConfig, VolatilityBand};
use crate::{ensemble_map, Error, GridPath, Result, TimeGrid};

/// Result of one dyadic roughness scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RoughnessReport {
    pub theta: f64,
    pub n_max: u32,
    /// The inf over directions, depths, and blocks of the scaled block sup.
    pub d_theta: f64,
    /// `½ (2T)^{-theta} · d_theta`.
    pub l_theta_lower: f64,
    /// Per-depth minima over blocks and directions, index 0 ↔ depth 1.
    pub per_level_minima: Vec<f64>,
}

/// Directions scanned: `{±e_1}` in one dimension, a uniform sphere mesh
/// otherwise (Fibonacci lattice for d = 3, equal angles for d = 2).
pub fn direction_mesh(dim: usize, size: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0]],
        2 => (0..size)
            .map(|i| {
                let phi = std::f64::consts::PI * i as f64 / size as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere on the upper half (antipodes are redundant
            // because the scan takes absolute projections).
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..size)
                .map(|i| {
                    let z = (i as f64 + 0.5) / size as f64; // (0, 1)
                    let r = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * i as f64 / golden;
                    let mut v = vec![r * phi.cos(), r * phi.sin(), z];
                    v.truncate(dim);
                    // For dim > 3 the trailing coordinates are zero; the
                    // mesh is then a 3-sphere slice, documented coverage.
                    v.resize(dim, 0.0);
                    v
                })
                .collect()
        }
    }
}

/// Scans dyadic blocks at depths `1..=n_max` and reports the minimum of the
/// scaled block oscillation. `2^n_max` must not exceed the step count.
pub fn dyadic_roughness(
    path: &GridPath,
    theta: f64,
    n_max: u32,
    direction_mesh_size: usize,
) -> Result<RoughnessReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    let n_steps = path.grid().n_steps();
    let blocks_deepest = 1usize
        .checked_shl(n_max)
        .ok_or_else(|| Error::InvalidParameter(format!("n_max = {n_max} too deep")))?;
    if blocks_deepest > n_steps {
        return Err(Error::InvalidParameter(format!(
            "2^{n_max} blocks exceed the {n_steps}-step grid"
        )));
    }
    let d = path.dim();
    let mesh = direction_mesh(d, direction_mesh_size.max(1));
    let horizon = path.grid().horizon();
    let mut per_level_minima = Vec::with_capacity(n_max as usize);
    let mut d_theta = f64::INFINITY;
    for n in 1..=n_max {
        let blocks = 1usize << n;
        let weight = 2f64.powf(theta * n as f64);
        let mut level_min = f64::INFINITY;
        for a in &mesh {
            for k in 0..blocks {
                // Grid indices covered by block k at depth n.
                let lo = k * n_steps / blocks;
                let hi = (k + 1) * n_steps / blocks;
                let mut pmin = f64::INFINITY;
                let mut pmax = f64::NEG_INFINITY;
                for i in lo..=hi {
                    let v = path.value(i);
                    let proj: f64 = a.iter().zip(v).map(|(ai, vi)| ai * vi).sum();
                    pmin = pmin.min(proj);
                    pmax = pmax.max(proj);
                }
                // sup_{s,t in block} |a·X_{s,t}| is the projected range.
                let osc = pmax - pmin;
                level_min = level_min.min(weight * osc);
            }
        }
        per_level_minima.push(level_min);
        d_theta = d_theta.min(level_min);
    }
    let l_theta_lower = 0.5 * (2.0 * horizon).powf(-theta) * d_theta;
    Ok(RoughnessReport {
        theta,
        n_max,
        d_theta,
        l_theta_lower,
        per_level_minima,
    })
}

/// Direct grid evaluation of the roughness modulus:
///
/// ```text
/// inf_{a, s, eps}  sup_{|t-s| ≤ eps}  |a · X_{s,t}| / eps^theta
/// ```
///
/// with `eps` over the dyadic scales `epsilon0 · 2^-m`, `m < eps_levels`.
/// Always at least the block-based lower bound when both are computed on
/// the same path.
pub fn direct_roughness_estimate(
    path: &GridPath,
    theta: f64,
    epsilon0: f64,
    eps_levels: u32,
    direction_mesh_size: usize,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    if !(epsilon0 > 0.0 && epsilon0 <= path.grid().horizon()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon0 must lie in (0, T], got {epsilon0}"
        )));
    }
    let n = path.grid().n_points();
    let h = path.grid().step();
    let d = path.dim();
    let mesh = direction_mesh(d, direction_mesh_size.max(1));
    let mut best = f64::INFINITY;
    for m in 0..eps_levels {
        let eps = epsilon0 * 2f64.powi(-(m as i32));
        let win = (eps / h).floor() as usize;
        if win == 0 {
            break; // finer scales are invisible on this grid
        }
        let wpow = eps.powf(theta);
        for a in &mesh {
            let proj: Vec<f64> = (0..n)
                .map(|i| {
                    let v = path.value(i);
                    a.iter().zip(v).map(|(ai, vi)| ai * vi).sum()
                })
                .collect();
            for s in 0..n {
                let lo = s.saturating_sub(win);
                let hi = (s + win).min(n - 1);
                let mut sup = 0.0f64;
                for t in lo..=hi {
                    sup = sup.max((proj[t] - proj[s]).abs());
                }
                best = best.min(sup / wpow);
            }
        }
    }
    Ok(best)
}

/// One row of the small-ball tail table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TailRow {
    pub eps: f64,
    /// Empirical `max over laws` of the fraction of seeds with
    /// `L_theta_lower < eps`.
    pub frequency: f64,
    /// Which law attained the maximum.
    pub law: String,
}

/// Small-ball tail experiment summary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TailReport {
    pub theta: f64,
    pub n_seeds: usize,
    pub rows: Vec<TailRow>,
    /// Slope of `log frequency` against `eps^{-2}` over rows with
    /// frequency strictly inside (0, 1); negative under the expected
    /// Gaussian small-ball shape.
    pub fitted_slope: f64,
    pub fitted_r2: f64,
}

/// The simulated control laws over which tail frequencies are maximised:
/// both constant extremes and the i.i.d. piecewise lattice draw.
fn tail_law_family(band: &VolatilityBand) -> Vec<(String, ControlKind)> {
    vec![
        (
            format!("constant_{:.6}", band.sigma_low),
            ControlKind::ConstantValue(band.sigma_low),
        ),
        (
            format!("constant_{:.6}", band.sigma_high),
            ControlKind::ConstantValue(band.sigma_high),
        ),
        ("piecewise".into(), ControlKind::PiecewiseConstant),
    ]
}

/// Estimates `frequency(L_theta_lower < eps)` across seeds, maximised over
/// the simulated law family, and fits the Gaussian small-ball shape.
///
/// `eps_grid` must lie inside `(0, 1/(2 T^theta))`; an empty grid is an
/// error. Rows with degenerate frequencies (0 or 1) are excluded from the
/// fit but kept in the table.
pub fn roughness_tail_experiment(
    band: &VolatilityBand,
    grid: TimeGrid,
    theta: f64,
    n_max: u32,
    eps_grid: &[f64],
    n_seeds: usize,
    seed: u64,
) -> Result<TailReport> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("empty eps grid".into()));
    }
    let cap = 1.0 / (2.0 * grid.horizon().powf(theta));
    for &e in eps_grid {
        if !(e > 0.0 && e < cap) {
            return Err(Error::InvalidParameter(format!(
                "eps = {e} outside (0, {cap})"
            )));
        }
    }
    let laws = tail_law_family(band);
    // l_values[law][seed]
    let mut l_values: Vec<Vec<f64>> = Vec::with_capacity(laws.len());
    for (li, (_, kind)) in laws.iter().enumerate() {
        let cfg = EnsembleConfig {
            band: band.clone(),
            control: kind.clone(),
            grid,
            n_paths: n_seeds,
            seed: seed.wrapping_add(li as u64),
        };
        let ls = ensemble_map(&cfg, |_i, sp| {
            dyadic_roughness(&sp.b, theta, n_max, 1).map(|r| r.l_theta_lower)
        })?;
        l_values.push(ls.into_iter().collect::<Result<Vec<_>>>()?);
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let mut best = (0.0f64, String::new());
        for (li, (label, _)) in laws.iter().enumerate() {
            let count = l_values[li].iter().filter(|&&l| l < eps).count();
            let freq = count as f64 / n_seeds as f64;
            if freq >= best.0 {
                best = (freq, label.clone());
            }
        }
        rows.push(TailRow {
            eps,
            frequency: best.0,
            law: best.1,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.frequency > 0.0 && r.frequency < 1.0)
        .map(|r| (r.eps.powi(-2), r.frequency.ln()))
        .collect();
    let (fitted_slope, fitted_r2) = if pts.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let (slope, _, r2) = crate::util::ols(&xs, &ys)?;
        (slope, r2)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(TailReport {
        theta,
        n_seeds,
        rows,
        fitted_slope,
        fitted_r2,
    })
}

/// One row of the supremum tail comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SupTailRow {
    pub eps: f64,
    pub law: String,
    pub frequency: f64,
    /// The exponential reference bound `d·exp(-1/(eps² d T σ_high²))`.
    pub bound: f64,
    pub ci_halfwidth: f64,
    /// `frequency ≤ bound + 3·ci`; violations are reported, not hidden.
    pub pass: bool,
}

/// Compares empirical `frequency(sup |B| ≥ 1/eps)` per simulated law
/// against the exponential reference bound. The bound is known to be
/// optimistic at moderate `eps` (its constant omits the factor 2 a
/// Gaussian tail carries), so rows record pass/fail per law rather than
/// asserting the inequality globally.
pub fn exponential_tail_check(
    band: &VolatilityBand,
    grid: TimeGrid,
    eps_grid: &[f64],
    n_seeds: usize,
    seed: u64,
) -> Result<Vec<SupTailRow>> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("empty eps grid".into()));
    }
    let d = band.dim as f64;
    let t = grid.horizon();
    let sh2 = band.sigma_high * band.sigma_high;
    let laws = tail_law_family(band);
    let mut rows = Vec::new();
    for (li, (label, kind)) in laws.iter().enumerate() {
        let cfg = EnsembleConfig {
            band: band.clone(),
            control: kind.clone(),
            grid,
            n_paths: n_seeds,
            seed: seed.wrapping_add(li as u64),
        };
        let sups = ensemble_map(&cfg, |_i, sp| sp.b.sup_norm())?;
        for &eps in eps_grid {
            let threshold = 1.0 / eps;
            let count = sups.iter().filter(|&&s| s >= threshold).count();
            let frequency = count as f64 / n_seeds as f64;
            let bound = d * (-1.0 / (eps * eps * d * t * sh2)).exp();
            let ci = crate::util::binomial_ci_halfwidth(count, n_seeds, 1.0);
            rows.push(SupTailRow {
                eps,
                law: label.clone(),
                frequency,
                bound,
                ci_halfwidth: ci,
                pass: frequency <= bound + 3.0 * ci,
            });
        }
    }
    Ok(rows)
}
