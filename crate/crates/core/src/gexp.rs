//! The sublinear expectation, evaluated two ways.
//!
//! The reference route is an explicit monotone finite-difference solver for
//! the fully nonlinear heat equation `∂_t u = G(∂_x² u)` with
//! `G(a) = ½(σ_high² a⁺ - σ_low² a⁻)`: curvature diffuses at the highest
//! admissible volatility, concavity at the lowest. The second route is a
//! Monte-Carlo supremum over a restricted control family, which is a lower
//! bound of the envelope by construction and is labelled as such in the
//! estimate. One-dimensional state only for the solver; higher dimensions
//! go through the Monte-Carlo route.

use std::sync::Arc;

use crate::sim::{ControlKind, EnsembleConfig, VolatilityBand};
use crate::{ensemble_map, Error, Result, TimeGrid};

/// Payoffs evaluable on the terminal state.
#[derive(Clone)]
pub enum Payoff {
    Square,
    NegSquare,
    Abs,
    Identity,
    Quartic,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Payoff {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Payoff::Square => x * x,
            Payoff::NegSquare => -x * x,
            Payoff::Abs => x.abs(),
            Payoff::Identity => x,
            Payoff::Quartic => x * x * x * x,
            Payoff::Custom(f) => f(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Payoff::Square => "square",
            Payoff::NegSquare => "neg-square",
            Payoff::Abs => "abs",
            Payoff::Identity => "identity",
            Payoff::Quartic => "x4",
            Payoff::Custom(_) => "custom",
        }
    }

    /// The pointwise negation, for lower expectations.
    pub fn negated(&self) -> Payoff {
        match self {
            Payoff::Square => Payoff::NegSquare,
            Payoff::NegSquare => Payoff::Square,
            other => {
                let inner = other.clone();
                Payoff::Custom(Arc::new(move |x| -inner.eval(x)))
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Payoff> {
        match name {
            "square" => Ok(Payoff::Square),
            "neg-square" => Ok(Payoff::NegSquare),
            "abs" => Ok(Payoff::Abs),
            "identity" => Ok(Payoff::Identity),
            "x4" => Ok(Payoff::Quartic),
            other => Err(Error::InvalidParameter(format!("unknown payoff {other}"))),
        }
    }
}

impl std::fmt::Debug for Payoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `G(a) = ½ (σ_high² a⁺ - σ_low² a⁻)` for scalar curvature.
pub fn g_function(a: f64, band: &VolatilityBand) -> f64 {
    let sh2 = band.sigma_high * band.sigma_high;
    let sl2 = band.sigma_low * band.sigma_low;
    0.5 * (sh2 * a.max(0.0) - sl2 * (-a).max(0.0))
}

/// Matrix form: `½ max_γ tr(a · γγᵀ)` over the admissible family.
/// Requires a symmetric input and a non-empty family.
pub fn g_function_matrix(a: &[f64], dim: usize, band: &VolatilityBand) -> Result<f64> {
    if a.len() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "expected {}² entries, got {}",
            dim,
            a.len()
        )));
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (a[i * dim + j] - a[j * dim + i]).abs() > 1e-12 * (1.0 + scale) {
                return Err(Error::InvalidParameter(
                    "g_function_matrix requires a symmetric matrix".into(),
                ));
            }
        }
    }
    if band.gamma_set.is_empty() {
        return Err(Error::InvalidParameter(
            "empty gamma_set for a matrix-valued band".into(),
        ));
    }
    let mut best = f64::NEG_INFINITY;
    for gamma in &band.gamma_set {
        // tr(a γγᵀ) = Σ_{i,j} a[i][j] Σ_k γ[j][k] γ[i][k]
        let mut tr = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let mut gg = 0.0;
                for k in 0..dim {
                    gg += gamma[j * dim + k] * gamma[i * dim + k];
                }
                tr += a[i * dim + j] * gg;
            }
        }
        best = best.max(tr);
    }
    Ok(0.5 * best)
}

/// An explicit solve configuration for the nonlinear heat equation on
/// `[-radius, radius]` with the payoff held fixed at the boundary.
#[derive(Clone)]
pub struct GHeatProblem {
    pub payoff: Payoff,
    pub band: VolatilityBand,
    pub t_final: f64,
    pub space_radius: f64,
    pub nx: usize,
    pub dt: f64,
}

impl GHeatProblem {
    /// Default domain `radius = 8 σ_high √t` (boundary influence at the
    /// origin below ~1e-6 for Lipschitz data) and `dt` at half the
    /// stability limit.
    pub fn new(payoff: Payoff, band: &VolatilityBand, t_final: f64, nx: usize) -> Result<Self> {
        if band.dim != 1 {
            return Err(Error::InvalidParameter(
                "the heat solver is one-dimensional; use the Monte-Carlo route".into(),
            ));
        }
        if !(t_final > 0.0) {
            return Err(Error::InvalidParameter("t_final must be positive".into()));
        }
        if nx < 5 || nx.is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "nx must be odd and at least 5 so that x = 0 is a grid point".into(),
            ));
        }
        let radius = 8.0 * band.sigma_high * t_final.sqrt();
        let dx = 2.0 * radius / (nx - 1) as f64;
        let limit = dx * dx / (band.sigma_high * band.sigma_high);
        let p = Self {
            payoff,
            band: band.clone(),
            t_final,
            space_radius: radius,
            nx,
            dt: 0.5 * limit,
        };
        p.check_cfl()?;
        Ok(p)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.check_cfl()?;
        Ok(self)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter("radius must be positive".into()));
        }
        self.space_radius = radius;
        // Keep dt at half the limit for the new spacing.
        let dx = self.dx();
        self.dt = 0.5 * dx * dx / (self.band.sigma_high * self.band.sigma_high);
        self.check_cfl()?;
        Ok(self)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.space_radius / (self.nx - 1) as f64
    }

    fn check_cfl(&self) -> Result<()> {
        let dx = self.dx();
        let limit = dx * dx / (self.band.sigma_high * self.band.sigma_high);
        if !(self.dt > 0.0) || self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::UnstableConfiguration(format!(
                "dt = {} exceeds the stability limit dx²/σ_high² = {limit}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Terminal slice of the solve, plus its value at the origin.
#[derive(Debug, Clone)]
pub struct GHeatSolution {
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    pub value_at_zero: f64,
}

/// Explicit time stepping `u ← u + dt·G(second difference)`, monotone under
/// the step-size restriction, with Dirichlet payoff values at the ends.
pub fn solve_g_heat(problem: &GHeatProblem) -> Result<GHeatSolution> {
    problem.check_cfl()?;
    let nx = problem.nx;
    let dx = problem.dx();
    let inv_dx2 = 1.0 / (dx * dx);
    let xs: Vec<f64> = (0..nx)
        .map(|i| -problem.space_radius + i as f64 * dx)
        .collect();
    let mut u: Vec<f64> = xs.iter().map(|&x| problem.payoff.eval(x)).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "payoff produced non-finite values on the domain".into(),
        ));
    }
    let mut next = u.clone();
    let mut remaining = problem.t_final;
    while remaining > 1e-15 * problem.t_final {
        let dt = problem.dt.min(remaining);
        for i in 1..nx - 1 {
            let lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
            next[i] = u[i] + dt * g_function(lap, &problem.band);
        }
        // Dirichlet: payoff values pinned at ±radius.
        next[0] = u[0];
        next[nx - 1] = u[nx - 1];
        std::mem::swap(&mut u, &mut next);
        remaining -= dt;
    }
    let mid = (nx - 1) / 2;
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("solution lost finiteness".into()));
    }
    Ok(GHeatSolution {
        value_at_zero: u[mid],
        xs,
        u,
    })
}

/// Which route produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMethod {
    Pde,
    McSup,
}

/// Per-control diagnostics of the Monte-Carlo supremum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ControlEstimate {
    pub label: String,
    pub value: f64,
    pub ci_halfwidth: f64,
}

/// An expectation value with its provenance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    /// 95% half-width for Monte-Carlo estimates; 0 for the solver.
    pub ci_halfwidth: f64,
    pub method: ExpectationMethod,
    /// True when the estimate is a supremum over a restricted control
    /// family and therefore a lower bound of the envelope.
    pub lower_bound_only: bool,
    pub per_control: Vec<ControlEstimate>,
    pub warnings: Vec<String>,
}

/// Solver route: `E[payoff(B_t)]` as the solution value at the origin.
pub fn pde_expectation(
    payoff: Payoff,
    band: &VolatilityBand,
    t_final: f64,
    nx: usize,
) -> Result<ExpectationEstimate> {
    let problem = GHeatProblem::new(payoff, band, t_final, nx)?;
    let sol = solve_g_heat(&problem)?;
    Ok(ExpectationEstimate {
        value: sol.value_at_zero,
        ci_halfwidth: 0.0,
        method: ExpectationMethod::Pde,
        lower_bound_only: false,
        per_control: Vec::new(),
        warnings: Vec::new(),
    })
}

/// A labelled control family member.
#[derive(Clone)]
pub struct ControlMember {
    pub label: String,
    pub kind: ControlKind,
}

/// The extremal family for a payoff: both constant extremes plus a
/// bang-bang feedback driven by the payoff's local curvature at the
/// current state. For convex or concave payoffs the feedback member
/// coincides with one of the extremes.
pub fn bang_bang_family(band: &VolatilityBand, payoff: &Payoff) -> Vec<ControlMember> {
    let mut members = vec![
        ControlMember {
            label: format!("constant_{:.6}", band.sigma_low),
            kind: ControlKind::ConstantValue(band.sigma_low),
        },
        ControlMember {
            label: format!("constant_{:.6}", band.sigma_high),
            kind: ControlKind::ConstantValue(band.sigma_high),
        },
    ];
    let p = payoff.clone();
    members.push(ControlMember {
        label: "bang_bang_curvature".into(),
        kind: ControlKind::FeedbackBangBang(Arc::new(move |state: &[f64]| {
            let x = state[0];
            let delta = 1e-3 * (1.0 + x.abs());
            p.eval(x + delta) - 2.0 * p.eval(x) + p.eval(x - delta) >= 0.0
        })),
    });
    members
}

/// Constant-control family over the band's volatility lattice.
pub fn constant_lattice_family(band: &VolatilityBand) -> Vec<ControlMember> {
    band.lattice()
        .into_iter()
        .map(|sigma| ControlMember {
            label: format!("constant_{sigma:.6}"),
            kind: ControlKind::ConstantValue(sigma),
        })
        .collect()
}

/// Monte-Carlo supremum over a control family with common random numbers:
/// the Wiener stream of path `i` depends only on `(seed, i)`, so members
/// are compared on identical noise. The maximum over the family is a lower
/// bound of the envelope, flagged in the estimate.
pub fn mc_upper_expectation(
    payoff: &Payoff,
    band: &VolatilityBand,
    family: &[ControlMember],
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<ExpectationEstimate> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty control family".into()));
    }
    if n_paths < 100 {
        return Err(Error::InsufficientSample(format!(
            "need at least 100 paths, got {n_paths}"
        )));
    }
    let mut per_control = Vec::with_capacity(family.len());
    for member in family {
        let cfg = EnsembleConfig {
            band: band.clone(),
            control: member.kind.clone(),
            grid,
            n_paths,
            seed,
        };
        let terminal = ensemble_map(&cfg, |_i, sp| {
            payoff.eval(sp.b.value1(grid.n_steps()))
        })?;
        let (mean, var) = crate::util::mean_var(&terminal);
        per_control.push(ControlEstimate {
            label: member.label.clone(),
            value: mean,
            ci_halfwidth: 1.96 * (var / n_paths as f64).sqrt(),
        });
    }
    let best = per_control
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("non-empty family");
    Ok(ExpectationEstimate {
        value: best.value,
        ci_halfwidth: best.ci_halfwidth,
        method: ExpectationMethod::McSup,
        lower_bound_only: true,
        per_control: per_control.clone(),
        warnings: Vec::new(),
    })
}

/// Lower expectation `-E[-payoff]` through the solver.
pub fn lower_expectation_pde(
    payoff: Payoff,
    band: &VolatilityBand,
    t_final: f64,
    nx: usize,
) -> Result<ExpectationEstimate> {
    let mut est = pde_expectation(payoff.negated(), band, t_final, nx)?;
    est.value = -est.value;
    Ok(est)
}

/// Lower expectation `-E[-payoff]` through the Monte-Carlo supremum.
pub fn lower_expectation_mc(
    payoff: &Payoff,
    band: &VolatilityBand,
    family: &[ControlMember],
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<ExpectationEstimate> {
    let neg = payoff.negated();
    let mut est = mc_upper_expectation(&neg, band, family, grid, n_paths, seed)?;
    est.value = -est.value;
    for c in &mut est.per_control {
        c.value = -c.value;
    }
    Ok(est)
}

/// Two-epoch expectation `E[phi2(B_{t1}, B_{t2} - B_{t1})]` by backward
/// recursion: an inner solve over `[0, t2 - t1]` in the second argument for
/// every first-argument lattice point, then an outer solve over `[0, t1]`
/// of the resulting function.
pub fn multi_time_expectation(
    phi2: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    band: &VolatilityBand,
    t1: f64,
    t2: f64,
    nx: usize,
) -> Result<ExpectationEstimate> {
    if !(t1 > 0.0 && t2 > t1) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t1 < t2, got t1 = {t1}, t2 = {t2}"
        )));
    }
    if band.dim != 1 {
        return Err(Error::InvalidParameter(
            "multi-time recursion is one-dimensional".into(),
        ));
    }
    let tau = t2 - t1;
    let outer_radius = 8.0 * band.sigma_high * t1.sqrt();
    let dx_outer = 2.0 * outer_radius / (nx - 1) as f64;
    let lattice: Vec<f64> = (0..nx)
        .map(|i| -outer_radius + i as f64 * dx_outer)
        .collect();
    // Inner solves, one per first-argument lattice point.
    let band_inner = band.clone();
    let inner_vals: Vec<Result<f64>> = crate::exec::map_indexed(nx, |i| {
        let x1 = lattice[i];
        let phi2 = Arc::clone(&phi2);
        let payoff = Payoff::Custom(Arc::new(move |y| phi2(x1, y)));
        let problem = GHeatProblem::new(payoff, &band_inner, tau, nx)?;
        Ok(solve_g_heat(&problem)?.value_at_zero)
    });
    let psi: Vec<f64> = inner_vals.into_iter().collect::<Result<Vec<_>>>()?;

    // Coarse-lattice diagnostic: compare the inner function's increments
    // against the spacing.
    let max_abs = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_inc = psi
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if max_inc > 0.1 * (1.0 + max_abs) {
        warnings.push(format!(
            "inner solution moves by {max_inc:.3} per lattice cell; lattice may be coarse \
             relative to the payoff's Lipschitz constant"
        ));
    }

    // Outer solve with the interpolated inner values as payoff.
    let lattice_arc = Arc::new(lattice);
    let psi_arc = Arc::new(psi);
    let (l, p) = (Arc::clone(&lattice_arc), Arc::clone(&psi_arc));
    let payoff = Payoff::Custom(Arc::new(move |x| interp_clamped(&l, &p, x)));
    let problem = GHeatProblem::new(payoff, band, t1, nx)?.with_radius(outer_radius)?;
    let sol = solve_g_heat(&problem)?;
    Ok(ExpectationEstimate {
        value: sol.value_at_zero,
        ci_halfwidth: 0.0,
        method: ExpectationMethod::Pde,
        lower_bound_only: false,
        per_control: Vec::new(),
        warnings,
    })
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let dx = xs[1] - xs[0];
    let idx = ((x - xs[0]) / dx).floor() as usize;
    let idx = idx.min(n - 2);
    let w = (x - xs[idx]) / dx;
    ys[idx] * (1.0 - w) + ys[idx + 1] * w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(lo: f64, hi: f64) -> VolatilityBand {
        VolatilityBand::scalar(lo, hi).unwrap()
    }

    #[test]
    fn g_function_examples() {
        let b = band(1.0, 1.0);
        assert_eq!(g_function(0.0, &b), 0.0);
        assert_eq!(g_function(2.0, &b), 1.0);
        let b = band(1.0, 2.0);
        assert_eq!(g_function(-3.0, &b), -1.5);
    }

    #[test]
    fn g_function_monotone_sandwich() {
        // ½σ_low² tr(a-b) ≤ G(a) - G(b) ≤ ½σ_high² tr(a-b) for a ≥ b.
        let b = band(0.5, 1.5);
        for (hi, lo) in [(2.0, 1.0), (1.0, -1.0), (-0.5, -2.0)] {
            let diff = g_function(hi, &b) - g_function(lo, &b);
            assert!(diff >= 0.5 * 0.25 * (hi - lo) - 1e-12);
            assert!(diff <= 0.5 * 2.25 * (hi - lo) + 1e-12);
        }
    }

    #[test]
    fn g_function_matrix_cases() {
        let mut b = VolatilityBand::multi(
            2,
            1.0,
            2.0,
            vec![
                vec![1.0, 0.0, 0.0, 1.0],
                vec![2.0, 0.0, 0.0, 1.0],
            ],
        )
        .unwrap();
        let identity = vec![1.0, 0.0, 0.0, 1.0];
        // tr(γγᵀ): 2 for the identity, 5 for diag(2,1) → G = 2.5.
        assert_eq!(g_function_matrix(&identity, 2, &b).unwrap(), 2.5);
        let skew = vec![0.0, 1.0, -1.0, 0.0];
        assert!(g_function_matrix(&skew, 2, &b).is_err());
        b.gamma_set.clear();
        assert!(g_function_matrix(&identity, 2, &b).is_err());
    }

    #[test]
    fn pde_square_anchor() {
        let b = band(0.5, 1.5);
        let est = pde_expectation(Payoff::Square, &b, 1.0, 201).unwrap();
        assert!(
            (est.value - 2.25).abs() < 0.01 * 2.25,
            "value {}",
            est.value
        );
    }

    #[test]
    fn pde_neg_square_anchor() {
        let b = band(0.5, 1.5);
        let est = pde_expectation(Payoff::NegSquare, &b, 1.0, 201).unwrap();
        assert!(
            (est.value + 0.25).abs() < 0.01 * 0.25 + 1e-4,
            "value {}",
            est.value
        );
    }

    #[test]
    fn pde_odd_payoff_vanishes() {
        let b = band(0.5, 1.5);
        let est = pde_expectation(Payoff::Identity, &b, 1.0, 201).unwrap();
        assert!(est.value.abs() < 1e-3, "value {}", est.value);
    }

    #[test]
    fn lower_expectation_square() {
        let b = band(0.5, 1.0);
        let est = lower_expectation_pde(Payoff::Square, &b, 1.0, 201).unwrap();
        assert!((est.value - 0.25).abs() < 0.01 * 0.25, "value {}", est.value);
    }

    #[test]
    fn degenerate_band_matches_gaussian_oracle() {
        let b = band(1.0, 1.0);
        let cases: [(Payoff, f64); 3] = [
            (Payoff::Square, 1.0),
            (Payoff::Abs, (2.0 / std::f64::consts::PI).sqrt()),
            (Payoff::Quartic, 3.0),
        ];
        for (payoff, expected) in cases {
            let est = pde_expectation(payoff.clone(), &b, 1.0, 401).unwrap();
            assert!(
                (est.value - expected).abs() < 0.005 * expected.abs(),
                "{}: {} vs {expected}",
                payoff.name(),
                est.value
            );
            // Lower equals upper for a degenerate band.
            let lo = lower_expectation_pde(payoff, &b, 1.0, 401).unwrap();
            assert!((lo.value - est.value).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_preservation_exact() {
        let b = band(0.5, 1.5);
        let est = pde_expectation(
            Payoff::Custom(Arc::new(|_| 4.25)),
            &b,
            1.0,
            101,
        )
        .unwrap();
        assert_eq!(est.value, 4.25);
    }

    #[test]
    fn positive_homogeneity_of_solver() {
        let b = band(0.5, 1.5);
        let base = pde_expectation(Payoff::Abs, &b, 1.0, 201).unwrap().value;
        let scaled = pde_expectation(
            Payoff::Custom(Arc::new(|x: f64| 3.0 * x.abs())),
            &b,
            1.0,
            201,
        )
        .unwrap()
        .value;
        assert!((scaled - 3.0 * base).abs() < 1e-10 * (1.0 + scaled.abs()));
    }

    #[test]
    fn monotonicity_of_solver() {
        let b = band(0.5, 1.5);
        // |x| ≤ x² + 0.25 pointwise.
        let lo = pde_expectation(Payoff::Abs, &b, 1.0, 201).unwrap().value;
        let hi = pde_expectation(
            Payoff::Custom(Arc::new(|x: f64| x * x + 0.25)),
            &b,
            1.0,
            201,
        )
        .unwrap()
        .value;
        assert!(lo <= hi + 1e-6);
    }

    #[test]
    fn sublinearity_of_solver() {
        let b = band(0.5, 1.5);
        let phi = Payoff::Square;
        let psi = Payoff::Abs;
        let sum = Payoff::Custom(Arc::new(|x: f64| x * x + x.abs()));
        let v_sum = pde_expectation(sum, &b, 1.0, 201).unwrap().value;
        let v_phi = pde_expectation(phi, &b, 1.0, 201).unwrap().value;
        let v_psi = pde_expectation(psi, &b, 1.0, 201).unwrap().value;
        assert!(v_sum <= v_phi + v_psi + 1e-4);
    }

    #[test]
    fn cfl_violation_rejected() {
        let b = band(0.5, 1.5);
        let p = GHeatProblem::new(Payoff::Square, &b, 1.0, 101).unwrap();
        let dx = p.dx();
        assert!(matches!(
            p.with_dt(2.0 * dx * dx / (1.5 * 1.5)),
            Err(Error::UnstableConfiguration(_))
        ));
    }

    #[test]
    fn even_nx_rejected() {
        let b = band(0.5, 1.5);
        assert!(GHeatProblem::new(Payoff::Square, &b, 1.0, 100).is_err());
    }

    #[test]
    fn mc_requires_sample_size_and_family() {
        let b = band(0.5, 1.0);
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let fam = bang_bang_family(&b, &Payoff::Square);
        assert!(matches!(
            mc_upper_expectation(&Payoff::Square, &b, &fam, grid, 50, 1),
            Err(Error::InsufficientSample(_))
        ));
        assert!(mc_upper_expectation(&Payoff::Square, &b, &[], grid, 1000, 1).is_err());
    }

    #[test]
    fn mc_square_sup_at_high_volatility() {
        let b = band(0.5, 1.0);
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let fam = constant_lattice_family(&b);
        let est = mc_upper_expectation(&Payoff::Square, &b, &fam, grid, 20_000, 7).unwrap();
        assert!(est.lower_bound_only);
        assert!(
            (est.value - 1.0).abs() < 3.0 * est.ci_halfwidth.max(0.01),
            "value {} ci {}",
            est.value,
            est.ci_halfwidth
        );
        // The winning member is the top of the lattice.
        let best = est
            .per_control
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .unwrap();
        assert_eq!(best.label, "constant_1.000000");
    }

    #[test]
    fn mc_abs_matches_gaussian_oracle() {
        let b = band(0.5, 1.0);
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let fam = bang_bang_family(&b, &Payoff::Abs);
        let est = mc_upper_expectation(&Payoff::Abs, &b, &fam, grid, 20_000, 9).unwrap();
        let oracle = (2.0 / std::f64::consts::PI).sqrt(); // σ_high √(2/π)
        assert!(
            (est.value - oracle).abs() < 3.0 * est.ci_halfwidth.max(0.01),
            "value {} vs {oracle}",
            est.value
        );
    }

    #[test]
    fn mc_quartic_degenerate_band() {
        let b = band(1.0, 1.0);
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let fam = bang_bang_family(&b, &Payoff::Quartic);
        let est = mc_upper_expectation(&Payoff::Quartic, &b, &fam, grid, 20_000, 11).unwrap();
        assert!(
            (est.value - 3.0).abs() < 3.0 * est.ci_halfwidth.max(0.05),
            "value {} ci {}",
            est.value,
            est.ci_halfwidth
        );
    }

    #[test]
    fn mc_lower_equals_negated_upper() {
        let b = band(0.5, 1.0);
        let grid = TimeGrid::new(1.0, 128).unwrap();
        let fam = bang_bang_family(&b, &Payoff::Square);
        let lo = lower_expectation_mc(&Payoff::Square, &b, &fam, grid, 2000, 3).unwrap();
        // Lower expectation of x² sits near σ_low² = 0.25.
        assert!((lo.value - 0.25).abs() < 0.05, "value {}", lo.value);
    }

    #[test]
    fn multi_time_second_increment_only() {
        let b = band(0.5, 1.5);
        let est = multi_time_expectation(Arc::new(|_x, y| y * y), &b, 0.5, 1.0, 161).unwrap();
        // Independent increment: E[(B_{t2} - B_{t1})²] = σ_high² (t2 - t1).
        let expected = 2.25 * 0.5;
        assert!(
            (est.value - expected).abs() < 0.02 * expected,
            "value {} vs {expected}",
            est.value
        );
    }

    #[test]
    fn multi_time_first_argument_only() {
        let b = band(0.5, 1.5);
        let est = multi_time_expectation(Arc::new(|x, _y| x), &b, 0.5, 1.0, 161).unwrap();
        assert!(est.value.abs() < 5e-3, "value {}", est.value);
    }

    #[test]
    fn multi_time_additive_payoff() {
        let b = band(0.5, 1.5);
        let est = multi_time_expectation(Arc::new(|x, y| x * x + y * y), &b, 0.5, 1.0, 161).unwrap();
        // σ_high²·0.5 + σ_high²·0.5 = σ_high².
        assert!(
            (est.value - 2.25).abs() < 0.02 * 2.25,
            "value {}",
            est.value
        );
    }
}
