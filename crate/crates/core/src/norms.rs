//! Hölder (semi-)norms over grid pairs.
//!
//! All norms here are suprema over grid-aligned pairs `s < t`, so they are
//! lower bounds for their continuous-time counterparts: increments between
//! grid points are invisible to the scan. Level-1 increments use the
//! Euclidean norm, level-2 interval values the Frobenius norm.
//!
//! The pair scans cost O(N²) and iterate lag-major, so they parallelise
//! over lags (one weight `(lag·h)^-alpha` per lag, contiguous reads per
//! row). `hoelder_norm_seq` is the pinned single-thread variant used as a
//! benchmark baseline.

use crate::exec;
use crate::{Error, GridPath, Result, RoughPath};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

fn lag_maximum(path: &GridPath, lag: usize) -> f64 {
    let n = path.grid().n_steps();
    let d = path.dim();
    let values = path.values();
    let mut best: f64 = 0.0;
    if d == 1 {
        for i in 0..=(n - lag) {
            let inc = (values[i + lag] - values[i]).abs();
            if inc > best {
                best = inc;
            }
        }
    } else {
        for i in 0..=(n - lag) {
            let a = &values[i * d..(i + 1) * d];
            let b = &values[(i + lag) * d..(i + lag + 1) * d];
            let mut s = 0.0;
            for k in 0..d {
                let diff = b[k] - a[k];
                s += diff * diff;
            }
            let inc = s.sqrt();
            if inc > best {
                best = inc;
            }
        }
    }
    best
}

fn is_constant(path: &GridPath) -> bool {
    let d = path.dim();
    let first = path.value(0);
    path.values().chunks_exact(d).all(|v| v == first)
}

/// `max_{s<t} |X_{s,t}| / (t-s)^alpha` over all grid pairs.
pub fn hoelder_norm(path: &GridPath, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if is_constant(path) {
        return Ok(0.0);
    }
    let n = path.grid().n_steps();
    let h = path.grid().step();
    let ratios = exec::map_indexed(n, |lag_m1| {
        let lag = lag_m1 + 1;
        lag_maximum(path, lag) / ((lag as f64) * h).powf(alpha)
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Single-thread twin of [`hoelder_norm`]; identical result.
pub fn hoelder_norm_seq(path: &GridPath, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if is_constant(path) {
        return Ok(0.0);
    }
    let n = path.grid().n_steps();
    let h = path.grid().step();
    let ratios = exec::map_indexed_seq(n, |lag_m1| {
        let lag = lag_m1 + 1;
        lag_maximum(path, lag) / ((lag as f64) * h).powf(alpha)
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `max_{s<t} |X2_{s,t}|_F / (t-s)^{2 alpha}` with interval values
/// reconstructed through the prefix table.
pub fn two_alpha_norm(rp: &RoughPath, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n = rp.grid().n_steps();
    let h = rp.grid().step();
    let prefix = rp.prefix();
    let ratios = exec::map_indexed(n, |lag_m1| {
        let lag = lag_m1 + 1;
        let w = ((lag as f64) * h).powf(2.0 * alpha);
        let mut best: f64 = 0.0;
        for i in 0..=(n - lag) {
            let v = prefix.interval_frobenius(i, i + lag);
            if v > best {
                best = v;
            }
        }
        best / w
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Rough-path semi-norm `‖X‖_alpha + ‖X2‖_{2 alpha}^{1/2}`.
pub fn rough_path_seminorm(rp: &RoughPath, alpha: f64) -> Result<f64> {
    Ok(hoelder_norm(rp.path(), alpha)? + two_alpha_norm(rp, alpha)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GridPath, LevelTwo, LiftKind, TimeGrid};

    /// Brute-force oracle: enumerate every pair directly from the definition.
    fn hoelder_oracle(path: &GridPath, alpha: f64) -> f64 {
        let n = path.grid().n_points();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dt = path.grid().time(j) - path.grid().time(i);
                best = best.max(path.increment_norm(i, j) / dt.powf(alpha));
            }
        }
        best
    }

    #[test]
    fn constant_path_has_zero_norm() {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let p = GridPath::constant(grid, &[3.0, -1.0]).unwrap();
        assert_eq!(hoelder_norm(&p, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn linear_path_alpha_half() {
        // X_t = t on [0,1], alpha = 1/2: ratios (t-s)^{1/2}, sup 1 at (0,1).
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let p = GridPath::tabulate(grid, 1, |t, out| out[0] = t).unwrap();
        let norm = hoelder_norm(&p, 0.5).unwrap();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tent_path_cube_root() {
        // Values (0,1,0) on {0, 0.5, 1}, alpha = 1/3: max ratio 2^{1/3}.
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let p = GridPath::scalar(grid, vec![0.0, 1.0, 0.0]).unwrap();
        let norm = hoelder_norm(&p, 1.0 / 3.0).unwrap();
        let expected = 2f64.powf(1.0 / 3.0); // 1.2599210498948732
        assert!((norm - expected).abs() < 1e-14, "norm {norm}");
        assert!((norm - hoelder_oracle(&p, 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn seq_matches_parallel() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let p = GridPath::tabulate(grid, 1, |t, out| out[0] = (7.0 * t).sin()).unwrap();
        assert_eq!(
            hoelder_norm(&p, 0.4).unwrap(),
            hoelder_norm_seq(&p, 0.4).unwrap()
        );
    }

    #[test]
    fn rejects_bad_alpha() {
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let p = GridPath::constant(grid, &[0.0]).unwrap();
        assert!(hoelder_norm(&p, 0.0).is_err());
        assert!(hoelder_norm(&p, 1.5).is_err());
    }

    #[test]
    fn two_alpha_norm_of_zero_data() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let p = GridPath::constant(grid, &[0.0]).unwrap();
        let rp = RoughPath::new(p, LevelTwo::zeros(1, 4), LiftKind::Ito).unwrap();
        assert_eq!(two_alpha_norm(&rp, 1.0 / 3.0).unwrap(), 0.0);
    }

    #[test]
    fn two_alpha_norm_of_013() {
        // Path (0,1,3), zero blocks: X2_{0,2} = 2; ratios {0, 0, 2/1} → 2.
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let p = GridPath::scalar(grid, vec![0.0, 1.0, 3.0]).unwrap();
        let rp = RoughPath::new(p, LevelTwo::zeros(1, 2), LiftKind::Ito).unwrap();
        let norm = two_alpha_norm(&rp, 1.0 / 3.0).unwrap();
        assert!((norm - 2.0).abs() < 1e-14);
    }

    #[test]
    fn doubling_blocks_doubles_two_alpha_norm() {
        let grid = TimeGrid::new(1.0, 3).unwrap();
        let p = GridPath::constant(grid, &[0.0]).unwrap();
        let l2 = LevelTwo::new(1, 3, vec![0.5, -1.0, 2.0]).unwrap();
        let rp1 = RoughPath::new(p.clone(), l2.scale(1.0), LiftKind::Ito).unwrap();
        let rp2 = RoughPath::new(p, l2.scale(2.0), LiftKind::Ito).unwrap();
        let n1 = two_alpha_norm(&rp1, 0.4).unwrap();
        let n2 = two_alpha_norm(&rp2, 0.4).unwrap();
        assert!((n2 - 2.0 * n1).abs() < 1e-12 * n2.abs().max(1.0));
    }

    #[test]
    fn seminorm_of_013_from_oracle() {
        // Enumerating all pairs: level-1 ratios {1/0.5^{1/3}, 2/0.5^{1/3}, 3}
        // → sup 3; level-2 sup 2 → seminorm 3 + √2.
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let p = GridPath::scalar(grid, vec![0.0, 1.0, 3.0]).unwrap();
        let rp = RoughPath::new(p.clone(), LevelTwo::zeros(1, 2), LiftKind::Ito).unwrap();
        let got = rough_path_seminorm(&rp, 1.0 / 3.0).unwrap();
        let oracle = hoelder_oracle(&p, 1.0 / 3.0) + 2f64.sqrt();
        assert!((got - oracle).abs() < 1e-14);
        assert!((got - (3.0 + 2f64.sqrt())).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn seminorm_scaling_homogeneity() {
        // Path scaled by λ and blocks by λ² scale the seminorm by λ.
        let grid = TimeGrid::new(1.0, 3).unwrap();
        let p = GridPath::scalar(grid, vec![0.0, 0.7, -0.3, 1.1]).unwrap();
        let l2 = LevelTwo::new(1, 3, vec![0.2, -0.1, 0.4]).unwrap();
        let lambda = 2.5;
        let rp = RoughPath::new(p.clone(), l2.clone(), LiftKind::Ito).unwrap();
        let scaled =
            RoughPath::new(p.scale(lambda), l2.scale(lambda * lambda), LiftKind::Ito).unwrap();
        let s1 = rough_path_seminorm(&rp, 0.45).unwrap();
        let s2 = rough_path_seminorm(&scaled, 0.45).unwrap();
        assert!((s2 - lambda * s1).abs() < 1e-12 * s2.max(1.0));
    }
}
