//! Small numeric utilities: compensated summation and least-squares fits.

/// Neumaier-compensated accumulator. Summation order is fixed by the caller;
/// the compensation keeps long grid sums accurate to ~eps times the sum of
/// absolute terms instead of growing with the term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Ordinary least squares of `y` on `x`, returning (slope, intercept, r²).
pub fn ols(x: &[f64], y: &[f64]) -> crate::Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(crate::Error::DimensionMismatch(format!(
            "regression inputs of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(crate::Error::Underdetermined(format!(
            "need at least 3 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx <= 0.0 {
        return Err(crate::Error::Underdetermined(
            "regressor has zero variance".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Least squares of `y` on two regressors plus an intercept:
/// `y ≈ b0 + b1·x1 + b2·x2`. Returns (b0, b1, b2, r²). Solved via the 3×3
/// normal equations with partial pivoting; inputs are expected to be small
/// calibration tables, not large designs.
#[allow(clippy::needless_range_loop)]
pub fn ols2(x1: &[f64], x2: &[f64], y: &[f64]) -> crate::Result<(f64, f64, f64, f64)> {
    let n = y.len();
    if x1.len() != n || x2.len() != n {
        return Err(crate::Error::DimensionMismatch(
            "two-regressor fit with unequal column lengths".into(),
        ));
    }
    if n < 4 {
        return Err(crate::Error::Underdetermined(format!(
            "need at least 4 points for a two-regressor fit, got {n}"
        )));
    }
    // Normal equations A b = rhs with A = Xᵀ X, X = [1, x1, x2].
    let nf = n as f64;
    let (mut s1, mut s2, mut sy) = (0.0, 0.0, 0.0);
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    let (mut s1y, mut s2y, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        s1 += x1[i];
        s2 += x2[i];
        sy += y[i];
        s11 += x1[i] * x1[i];
        s12 += x1[i] * x2[i];
        s22 += x2[i] * x2[i];
        s1y += x1[i] * y[i];
        s2y += x2[i] * y[i];
        syy += y[i] * y[i];
    }
    let mut a = [
        [nf, s1, s2, sy],
        [s1, s11, s12, s1y],
        [s2, s12, s22, s2y],
    ];
    // Gaussian elimination with partial pivoting on the 3×4 tableau.
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 * (1.0 + nf) {
            return Err(crate::Error::Underdetermined(
                "collinear regressors in two-regressor fit".into(),
            ));
        }
        a.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let b0 = a[0][3] / a[0][0];
    let b1 = a[1][3] / a[1][1];
    let b2 = a[2][3] / a[2][2];
    let my = sy / nf;
    let ss_tot = syy - nf * my * my;
    let mut ss_res = 0.0;
    for i in 0..n {
        let r = y[i] - (b0 + b1 * x1[i] + b2 * x2[i]);
        ss_res += r * r;
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((b0, b1, b2, r2))
}

/// Sample mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Half-width of a normal-approximation binomial confidence interval at
/// `z` standard errors for `k` successes out of `n` trials.
pub fn binomial_ci_halfwidth(k: usize, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    z * (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancelling_sum() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        k.add(-1.0);
        let expected = 10_000.0 * 1e-16;
        assert!((k.value() - expected).abs() < 1e-18);
    }

    #[test]
    fn ols_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (slope, intercept, r2) = ols(&x, &y).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ols_rejects_short_input() {
        assert!(ols(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ols2_exact_plane() {
        let x1 = [0.0, 1.0, 0.0, 1.0, 2.0];
        let x2 = [0.0, 0.0, 1.0, 1.0, 3.0];
        let y: Vec<f64> = x1
            .iter()
            .zip(&x2)
            .map(|(&a, &b)| 0.5 + 2.0 * a - 3.0 * b)
            .collect();
        let (b0, b1, b2, r2) = ols2(&x1, &x2, &y).unwrap();
        assert!((b0 - 0.5).abs() < 1e-10);
        assert!((b1 - 2.0).abs() < 1e-10);
        assert!((b2 + 3.0).abs() < 1e-10);
        assert!((r2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn binomial_ci_basic() {
        let hw = binomial_ci_halfwidth(50, 100, 1.96);
        assert!((hw - 1.96 * 0.05).abs() < 1e-12);
    }
}
