//! Stochastic calculus for G-Brownian motion through rough paths.
//!
//! The library simulates G-Brownian motion under volatility uncertainty,
//! lifts sampled paths to rough paths, integrates controlled paths against
//! them, evaluates the sublinear G-expectation by a nonlinear-heat-equation
//! solver and by a Monte-Carlo control supremum, and estimates pathwise
//! Hölder roughness for the Norris-type diagnostics.
//!
//! Everything lives on uniform time grids. Simulated ensembles are
//! embarrassingly parallel over path indices (rayon behind the `parallel`
//! feature, on by default) with per-path RNG streams, so results do not
//! depend on thread scheduling.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
mod controlled;
mod error;
mod exec;
mod gexp;
mod grid;
pub mod harness;
mod integral;
mod integrals;
pub mod io;
mod level2;
mod norms;
mod norris;
mod rng;
mod roughness;
mod sim;
mod util;

pub use controlled::{
    controlled_lift_smooth, ConstFn, ControlledPath, CubeFn, CustomC2, IdentityFn, ScalarC2,
    SquareFn,
};
pub use error::{Error, Result};
pub use gexp::{
    bang_bang_family, constant_lattice_family, g_function, g_function_matrix,
    lower_expectation_mc, lower_expectation_pde, mc_upper_expectation, multi_time_expectation,
    pde_expectation, solve_g_heat, ControlEstimate, ControlMember, ExpectationEstimate,
    ExpectationMethod, GHeatProblem, GHeatSolution, Payoff,
};
pub use grid::{AlphaParams, GridPath, TimeGrid};
pub use integral::{
    gubinelli_integral, ito_vs_rough_equivalence, local_error_check, EquivalenceReport,
    EquivalenceRow, IntegralReport, Partition,
};
pub use integrals::{
    build_ito_process, cross_variation, ito_formula_residual, ito_integral, midpoint_convergence,
    stratonovich_integral, CrossVariationPath, ItoProcessSpec, MidpointReport, MidpointRow,
};
pub use level2::{chen_defect, LevelTwo, Level2Prefix, LiftKind, RoughPath, TripleSample};
pub use norms::{hoelder_norm, hoelder_norm_seq, rough_path_seminorm, two_alpha_norm};
pub use norris::{
    default_mesh_size, norris_diagnostic, norris_integral, norris_scaling_family,
    uniqueness_check, NorrisCalibration, NorrisComponents, NorrisReport, NorrisScalingReport,
    ScalingFamilyConfig, ScalingRow, UniquenessFlag, UniquenessReport,
};
pub use roughness::{
    direct_roughness_estimate, direction_mesh, dyadic_roughness, exponential_tail_check,
    roughness_tail_experiment, RoughnessReport, SupTailRow, TailReport, TailRow,
};
pub use sim::{
    ensemble_map, ito_lift, moment_scaling_check, quadratic_variation, sample_control,
    sample_ensemble, sample_ensemble_seq, sample_gbm_path, stratonovich_lift, ControlKind,
    ControlPath, EnsembleConfig, MomentScalingReport, QuadraticVariationPath, SamplePath,
    StateIndicator, VolatilityBand,
};

pub mod prng {
    //! Seed-derivation and inverse-CDF sampling helpers.
    pub use crate::rng::{
        inverse_normal_cdf, mix_seed, path_rng, splitmix64, standard_normal, uniform_open01,
    };
}

pub mod numeric {
    //! Compensated sums and small regression helpers.
    pub use crate::util::{binomial_ci_halfwidth, mean_var, ols, ols2, KahanSum};
}
