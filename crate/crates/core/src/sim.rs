//! Simulation of G-Brownian motion under volatility uncertainty.
//!
//! The sublinear expectation is represented as a supremum of Wiener
//! expectations over volatility controls with values in the admissible set.
//! This module samples from individual control laws only: each path draws a
//! control (constant, i.i.d. piecewise constant, or bang-bang feedback on
//! the running state) and integrates `db = a·dw` against a seeded Wiener
//! stream. The supremum itself is taken elsewhere (the expectation module),
//! so ensembles here are lower-bound material for the envelope.
//!
//! Ensembles are parallel over path indices; path `i` of seed `s` is a pure
//! function of `(s, i)`, so parallel and sequential generation agree bit for
//! bit and aggregate statistics are mergeable by pure reduction.

use std::sync::Arc;

use crate::rng::{mix_seed, path_rng, standard_normal};
use crate::util::KahanSum;
use crate::{Error, GridPath, LevelTwo, LiftKind, Result, RoughPath, TimeGrid};

/// Stream tag separating control draws from Wiener draws under one seed.
const CONTROL_STREAM_TAG: u64 = 0xc0de_5eed_0bad_7701;

/// State-dependent branch selector for bang-bang feedback controls: `true`
/// picks the high-volatility branch.
pub type StateIndicator = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// The volatility uncertainty interval `[sigma_low, sigma_high]` with a
/// lattice discretisation of the admissible set, plus an explicit matrix
/// family for dimensions above one.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VolatilityBand {
    pub sigma_low: f64,
    pub sigma_high: f64,
    /// Lattice size over `[sigma_low, sigma_high]`, at least 2.
    pub control_levels: usize,
    pub dim: usize,
    /// Admissible d×d matrices (row-major) for `dim > 1`; empty for dim 1.
    pub gamma_set: Vec<Vec<f64>>,
}

impl VolatilityBand {
    /// One-dimensional band. Requires `0 < sigma_low ≤ sigma_high`.
    pub fn scalar(sigma_low: f64, sigma_high: f64) -> Result<Self> {
        Self::check_sigmas(sigma_low, sigma_high)?;
        Ok(Self {
            sigma_low,
            sigma_high,
            control_levels: 2,
            dim: 1,
            gamma_set: Vec::new(),
        })
    }

    /// Multi-dimensional band with an explicit admissible matrix family.
    pub fn multi(
        dim: usize,
        sigma_low: f64,
        sigma_high: f64,
        gamma_set: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::check_sigmas(sigma_low, sigma_high)?;
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "multi-dimensional band needs dim ≥ 2; use scalar()".into(),
            ));
        }
        for (i, g) in gamma_set.iter().enumerate() {
            if g.len() != dim * dim {
                return Err(Error::DimensionMismatch(format!(
                    "gamma_set[{i}] has {} entries, expected {}",
                    g.len(),
                    dim * dim
                )));
            }
        }
        Ok(Self {
            sigma_low,
            sigma_high,
            control_levels: 2,
            dim,
            gamma_set,
        })
    }

    fn check_sigmas(lo: f64, hi: f64) -> Result<()> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < sigma_low ≤ sigma_high < ∞, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn with_levels(mut self, control_levels: usize) -> Result<Self> {
        if control_levels < 2 {
            return Err(Error::InvalidParameter(
                "control_levels must be at least 2".into(),
            ));
        }
        self.control_levels = control_levels;
        Ok(self)
    }

    /// The volatility lattice: `control_levels` evenly spaced values.
    pub fn lattice(&self) -> Vec<f64> {
        let m = self.control_levels;
        (0..m)
            .map(|i| {
                self.sigma_low
                    + (self.sigma_high - self.sigma_low) * i as f64 / (m - 1) as f64
            })
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma_low == self.sigma_high
    }
}

/// How a volatility control is drawn along a path.
#[derive(Clone)]
pub enum ControlKind {
    /// One lattice value (seeded draw) held for all steps.
    Constant,
    /// A pinned constant volatility; must lie inside the band.
    ConstantValue(f64),
    /// Independent lattice values per step.
    PiecewiseConstant,
    /// `sigma_high` where the indicator reports convexity at the current
    /// state, `sigma_low` otherwise. One-dimensional only.
    FeedbackBangBang(StateIndicator),
}

impl ControlKind {
    pub fn name(&self) -> &'static str {
        match self {
            ControlKind::Constant => "constant",
            ControlKind::ConstantValue(_) => "constant_value",
            ControlKind::PiecewiseConstant => "piecewise_constant",
            ControlKind::FeedbackBangBang(_) => "feedback_bang_bang",
        }
    }
}

impl std::fmt::Debug for ControlKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

enum ControlValues {
    /// Per-step d×d matrices, row-major, `n_steps × dim²`.
    PerStep(Vec<f64>),
    /// Resolved against the running state during simulation.
    Feedback(StateIndicator),
}

/// A realised (or feedback) volatility control on a grid.
pub struct ControlPath {
    grid: TimeGrid,
    band: VolatilityBand,
    kind_name: &'static str,
    values: ControlValues,
}

impl ControlPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn band(&self) -> &VolatilityBand {
        &self.band
    }

    pub fn kind_name(&self) -> &'static str {
        self.kind_name
    }

    /// Per-step matrix for non-feedback controls.
    pub fn step_value(&self, k: usize) -> Option<&[f64]> {
        match &self.values {
            ControlValues::PerStep(v) => {
                let s = self.band.dim * self.band.dim;
                Some(&v[k * s..(k + 1) * s])
            }
            ControlValues::Feedback(_) => None,
        }
    }
}

fn scalar_matrix(dim: usize, sigma: f64) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = sigma;
    }
    m
}

/// Draws a control path for the given kind. Constant and piecewise kinds
/// realise their values immediately from the seeded stream; the feedback
/// kind defers to simulation time.
pub fn sample_control(
    band: &VolatilityBand,
    kind: &ControlKind,
    grid: TimeGrid,
    seed: u64,
) -> Result<ControlPath> {
    let d = band.dim;
    if d > 1 && band.gamma_set.is_empty() {
        return Err(Error::InvalidParameter(
            "empty gamma_set for a multi-dimensional band".into(),
        ));
    }
    let n = grid.n_steps();
    let mut rng = path_rng(mix_seed(seed, CONTROL_STREAM_TAG), 0);
    let values = match kind {
        ControlKind::Constant => {
            let v = if d == 1 {
                let lattice = band.lattice();
                let idx = rand::Rng::random_range(&mut rng, 0..lattice.len());
                scalar_matrix(1, lattice[idx])
            } else {
                let idx = rand::Rng::random_range(&mut rng, 0..band.gamma_set.len());
                band.gamma_set[idx].clone()
            };
            let mut all = Vec::with_capacity(n * d * d);
            for _ in 0..n {
                all.extend_from_slice(&v);
            }
            ControlValues::PerStep(all)
        }
        ControlKind::ConstantValue(sigma) => {
            if !(*sigma >= band.sigma_low && *sigma <= band.sigma_high) {
                return Err(Error::InvalidParameter(format!(
                    "pinned volatility {sigma} outside band [{}, {}]",
                    band.sigma_low, band.sigma_high
                )));
            }
            if d != 1 {
                return Err(Error::InvalidParameter(
                    "pinned scalar volatility requires dim 1".into(),
                ));
            }
            let v = scalar_matrix(1, *sigma);
            let mut all = Vec::with_capacity(n);
            for _ in 0..n {
                all.extend_from_slice(&v);
            }
            ControlValues::PerStep(all)
        }
        ControlKind::PiecewiseConstant => {
            let mut all = Vec::with_capacity(n * d * d);
            if d == 1 {
                let lattice = band.lattice();
                for _ in 0..n {
                    let idx = rand::Rng::random_range(&mut rng, 0..lattice.len());
                    all.push(lattice[idx]);
                }
            } else {
                for _ in 0..n {
                    let idx = rand::Rng::random_range(&mut rng, 0..band.gamma_set.len());
                    all.extend_from_slice(&band.gamma_set[idx]);
                }
            }
            ControlValues::PerStep(all)
        }
        ControlKind::FeedbackBangBang(indicator) => {
            if d != 1 {
                return Err(Error::InvalidParameter(
                    "bang-bang feedback control requires dim 1".into(),
                ));
            }
            ControlValues::Feedback(Arc::clone(indicator))
        }
    };
    Ok(ControlPath {
        grid,
        band: band.clone(),
        kind_name: kind.name(),
        values,
    })
}

/// One simulated path: the state `b`, its driving Wiener path `w`, the
/// realised per-step control matrices, and the stream seed.
pub struct SamplePath {
    pub b: GridPath,
    pub w: GridPath,
    /// Realised control, `n_steps × dim²` row-major.
    pub control_values: Vec<f64>,
    pub control_kind: &'static str,
    pub seed: u64,
}

/// Integrates `db = a·dw` with increments `Δw ~ N(0, h·I)` drawn from the
/// stream keyed by `seed`. Feedback controls resolve against the current
/// state before each step.
pub fn sample_gbm_path(control: &ControlPath, seed: u64) -> Result<SamplePath> {
    let grid = control.grid;
    let d = control.band.dim;
    let n = grid.n_steps();
    let sqrt_h = grid.step().sqrt();
    let mut rng = path_rng(seed, 0);
    let mut w = vec![0.0; (n + 1) * d];
    let mut b = vec![0.0; (n + 1) * d];
    let mut realised = vec![0.0; n * d * d];
    let mut dw = vec![0.0; d];
    for k in 0..n {
        for slot in dw.iter_mut() {
            *slot = sqrt_h * standard_normal(&mut rng);
        }
        match &control.values {
            ControlValues::PerStep(v) => {
                realised[k * d * d..(k + 1) * d * d]
                    .copy_from_slice(&v[k * d * d..(k + 1) * d * d]);
            }
            ControlValues::Feedback(indicator) => {
                let state = &b[k * d..(k + 1) * d];
                realised[k * d * d] = if indicator(state) {
                    control.band.sigma_high
                } else {
                    control.band.sigma_low
                };
            }
        }
        let a_k = &realised[k * d * d..(k + 1) * d * d];
        for r in 0..d {
            w[(k + 1) * d + r] = w[k * d + r] + dw[r];
            let mut inc = 0.0;
            for c in 0..d {
                inc += a_k[r * d + c] * dw[c];
            }
            b[(k + 1) * d + r] = b[k * d + r] + inc;
        }
    }
    Ok(SamplePath {
        b: GridPath::from_values(grid, d, b)?,
        w: GridPath::from_values(grid, d, w)?,
        control_values: realised,
        control_kind: control.kind_name,
        seed,
    })
}

/// The cumulative realised covariation `Σ ΔB ⊗ ΔB` per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticVariationPath {
    grid: TimeGrid,
    dim: usize,
    /// `(n_steps + 1) × dim²`, row-major, zero at the origin.
    values: Vec<f64>,
}

impl QuadraticVariationPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix value at grid point `k`.
    pub fn value(&self, k: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.values[k * s..(k + 1) * s]
    }

    /// Scalar value at grid point `k` (entry (0,0)).
    pub fn value1(&self, k: usize) -> f64 {
        self.values[k * self.dim * self.dim]
    }

    pub fn terminal(&self) -> &[f64] {
        self.value(self.grid.n_steps())
    }

    /// Writes the increment over `(i, j)` into `out`.
    pub fn increment(&self, i: usize, j: usize, out: &mut [f64]) {
        let a = self.value(i);
        let b = self.value(j);
        for (o, (x, y)) in out.iter_mut().zip(b.iter().zip(a)) {
            *o = x - y;
        }
    }
}

/// Realised quadratic variation of a path: cumulative sums of `ΔB ⊗ ΔB`.
/// Satisfies `B_T ⊗ B_T - ⟨B⟩_T = 2·Sym(level-2 of the lift)` exactly on
/// the grid.
pub fn quadratic_variation(b: &GridPath) -> QuadraticVariationPath {
    let grid = *b.grid();
    let d = b.dim();
    let n = grid.n_steps();
    let s = d * d;
    let mut values = vec![0.0; (n + 1) * s];
    let mut acc = vec![KahanSum::new(); s];
    for k in 0..n {
        let x = b.value(k);
        let y = b.value(k + 1);
        for r in 0..d {
            let dr = y[r] - x[r];
            for c in 0..d {
                acc[r * d + c].add(dr * (y[c] - x[c]));
            }
        }
        for (slot, a) in values[(k + 1) * s..(k + 2) * s].iter_mut().zip(&acc) {
            *slot = a.value();
        }
    }
    QuadraticVariationPath { grid, dim: d, values }
}

/// The second-order lift with left-point convention: per-step blocks are
/// zero (the grid is the finest observable scale), and interval values from
/// Chen reconstruction coincide with left-point Riemann sums of `B ⊗ dB`.
pub fn ito_lift(b: &GridPath) -> RoughPath {
    let level2 = LevelTwo::zeros(b.dim(), b.grid().n_steps());
    RoughPath::new(b.clone(), level2, LiftKind::Ito).expect("shapes match by construction")
}

/// Converts a left-point lift into the symmetrised convention by adding
/// half a quadratic-variation increment to every step block.
pub fn stratonovich_lift(rp: &RoughPath, qv: &QuadraticVariationPath) -> Result<RoughPath> {
    if rp.lift_kind() != LiftKind::Ito {
        return Err(Error::InvalidParameter(
            "stratonovich_lift expects a left-point (ito) lift".into(),
        ));
    }
    if rp.grid() != qv.grid() || rp.dim() != qv.dim() {
        return Err(Error::GridMismatch(
            "lift and quadratic variation live on different grids".into(),
        ));
    }
    let d = rp.dim();
    let s = d * d;
    let n = rp.grid().n_steps();
    let mut blocks = rp.level2().blocks().to_vec();
    for k in 0..n {
        let lo = qv.value(k);
        let hi = qv.value(k + 1);
        for idx in 0..s {
            blocks[k * s + idx] += 0.5 * (hi[idx] - lo[idx]);
        }
    }
    RoughPath::new(
        rp.path().clone(),
        LevelTwo::new(d, n, blocks)?,
        LiftKind::Stratonovich,
    )
}

/// Configuration for a path ensemble.
#[derive(Clone)]
pub struct EnsembleConfig {
    pub band: VolatilityBand,
    pub control: ControlKind,
    pub grid: TimeGrid,
    pub n_paths: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    fn one_path(&self, i: usize) -> Result<SamplePath> {
        let control = sample_control(
            &self.band,
            &self.control,
            self.grid,
            mix_seed(self.seed, i as u64),
        )?;
        sample_gbm_path(&control, mix_seed(self.seed, i as u64))
    }
}

/// Generates the full ensemble, parallel over path indices.
pub fn sample_ensemble(cfg: &EnsembleConfig) -> Result<Vec<SamplePath>> {
    collect_results(crate::exec::map_indexed(cfg.n_paths, |i| cfg.one_path(i)))
}

/// Single-thread twin of [`sample_ensemble`]; identical output.
pub fn sample_ensemble_seq(cfg: &EnsembleConfig) -> Result<Vec<SamplePath>> {
    collect_results(crate::exec::map_indexed_seq(cfg.n_paths, |i| {
        cfg.one_path(i)
    }))
}

/// Applies `f` to each path without retaining the ensemble; results come
/// back in path order, so sequential reduction afterwards is deterministic.
pub fn ensemble_map<T, F>(cfg: &EnsembleConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &SamplePath) -> T + Sync + Send,
{
    collect_results(crate::exec::map_indexed(cfg.n_paths, |i| {
        cfg.one_path(i).map(|p| f(i, &p))
    }))
}

fn collect_results<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// Moment-scaling report: log-log slopes of the empirical moments of
/// level-1 increments and level-2 interval values against the lag.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MomentScalingReport {
    pub q: u32,
    /// Lags in grid steps.
    pub lags: Vec<usize>,
    /// Lags in time units.
    pub taus: Vec<f64>,
    /// `mean |B_{s,s+τ}|^q` over paths and positions.
    pub level1_moments: Vec<f64>,
    /// `mean |X2_{s,s+τ}|_F^q`.
    pub level2_moments: Vec<f64>,
    pub slope1: f64,
    pub slope2: f64,
    pub r2_1: f64,
    pub r2_2: f64,
    /// `q/2`: first-order increments scale like `τ^{1/2}` per moment.
    pub expected_slope1: f64,
    /// `q`: second-order values scale like `τ` per moment.
    pub expected_slope2: f64,
}

/// Estimates moment scaling across an ensemble. Positions are subsampled by
/// `position_stride` to keep the scan linear in the grid size.
///
/// With the left-point lift, the level-2 value over a single step is the
/// (zero) step block, and over `m` steps its second moment carries a
/// `1 - 1/m` discretisation factor; scaling fits for the second level
/// should therefore use lags of at least 8 steps.
pub fn moment_scaling_check(
    cfg: &EnsembleConfig,
    q: u32,
    lags: &[usize],
    position_stride: usize,
) -> Result<MomentScalingReport> {
    if !matches!(q, 2 | 4 | 6) {
        return Err(Error::InvalidParameter(format!(
            "moment order q must be one of 2, 4, 6; got {q}"
        )));
    }
    if lags.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "need at least 3 lags, got {}",
            lags.len()
        )));
    }
    let n = cfg.grid.n_steps();
    for &lag in lags {
        if lag == 0 || lag > n {
            return Err(Error::InvalidParameter(format!(
                "lag {lag} outside the grid (1..={n})"
            )));
        }
    }
    let stride = position_stride.max(1);
    let nl = lags.len();
    // Per-path partial sums, merged in path order.
    let partials = ensemble_map(cfg, |_i, sp| {
        let rp = ito_lift(&sp.b);
        let prefix = rp.prefix();
        let mut sums1 = vec![0.0; nl];
        let mut sums2 = vec![0.0; nl];
        let mut counts = vec![0u64; nl];
        for (li, &lag) in lags.iter().enumerate() {
            let mut s = 0;
            while s + lag <= n {
                let inc = sp.b.increment_norm(s, s + lag);
                sums1[li] += inc.powi(q as i32);
                let l2 = prefix.interval_frobenius(s, s + lag);
                sums2[li] += l2.powi(q as i32);
                counts[li] += 1;
                s += stride;
            }
        }
        (sums1, sums2, counts)
    })?;
    let mut m1 = vec![0.0; nl];
    let mut m2 = vec![0.0; nl];
    let mut counts = vec![0u64; nl];
    for (s1, s2, c) in &partials {
        for i in 0..nl {
            m1[i] += s1[i];
            m2[i] += s2[i];
            counts[i] += c[i];
        }
    }
    for i in 0..nl {
        if counts[i] == 0 {
            return Err(Error::InvalidParameter(format!(
                "no admissible positions for lag {}",
                lags[i]
            )));
        }
        m1[i] /= counts[i] as f64;
        m2[i] /= counts[i] as f64;
    }
    let taus: Vec<f64> = lags.iter().map(|&l| l as f64 * cfg.grid.step()).collect();
    let log_tau: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let log_m1: Vec<f64> = m1.iter().map(|m| m.ln()).collect();
    let log_m2: Vec<f64> = m2.iter().map(|m| m.ln()).collect();
    let (slope1, _, r2_1) = crate::util::ols(&log_tau, &log_m1)?;
    let (slope2, _, r2_2) = crate::util::ols(&log_tau, &log_m2)?;
    Ok(MomentScalingReport {
        q,
        lags: lags.to_vec(),
        taus,
        level1_moments: m1,
        level2_moments: m2,
        slope1,
        slope2,
        r2_1,
        r2_2,
        expected_slope1: q as f64 / 2.0,
        expected_slope2: q as f64,
    })
}
