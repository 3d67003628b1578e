//! Reusable experiment pipelines shared by the CLI and the acceptance
//! driver: ensemble simulation with CSV outputs and a checksummed manifest.

use std::path::Path;
use std::time::Instant;

use crate::io::{config_hash, write_path_csv, write_table_csv, RunManifest};
use crate::sim::{ControlKind, EnsembleConfig, VolatilityBand};
use crate::{ensemble_map, quadratic_variation, Error, Result, TimeGrid};

/// Serialisable simulation request; its canonical JSON is the config hash.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SimulateSpec {
    pub sigma_low: f64,
    pub sigma_high: f64,
    pub dim: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// `constant`, `piecewise_constant`, or `feedback_bang_bang` (the
    /// bang-bang indicator is the sign of the state, a fixed choice for
    /// file-driven runs).
    pub control_kind: String,
    /// How many leading sample paths to write out in full.
    pub write_paths: usize,
}

impl SimulateSpec {
    pub fn control(&self) -> Result<ControlKind> {
        match self.control_kind.as_str() {
            "constant" => Ok(ControlKind::Constant),
            "piecewise_constant" => Ok(ControlKind::PiecewiseConstant),
            "feedback_bang_bang" => Ok(ControlKind::FeedbackBangBang(std::sync::Arc::new(
                |state: &[f64]| state[0] >= 0.0,
            ))),
            other => Err(Error::InvalidParameter(format!(
                "unknown control kind {other:?}"
            ))),
        }
    }

    pub fn band(&self) -> Result<VolatilityBand> {
        if self.dim != 1 {
            return Err(Error::InvalidParameter(
                "file-driven simulation is one-dimensional; use the library API for d > 1".into(),
            ));
        }
        VolatilityBand::scalar(self.sigma_low, self.sigma_high)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.n_steps)
    }
}

/// Runs the ensemble and writes one CSV per statistic (terminal values,
/// terminal quadratic variation, running sup) plus optional full paths and
/// the run manifest. Returns the manifest.
pub fn run_simulate(spec: &SimulateSpec, out_dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let band = spec.band()?;
    let grid = spec.grid()?;
    let cfg = EnsembleConfig {
        band,
        control: spec.control()?,
        grid,
        n_paths: spec.n_paths,
        seed: spec.seed,
    };
    let n = grid.n_steps();
    // Per-path summary rows, reduced in path order.
    let rows = ensemble_map(&cfg, |i, sp| {
        let qv = quadratic_variation(&sp.b);
        (
            i,
            sp.b.value1(n),
            qv.value1(n),
            sp.b.sup_norm(),
            if i < spec.write_paths {
                Some(sp.b.clone())
            } else {
                None
            },
        )
    })?;
    let mut manifest = RunManifest::new(config_hash(spec)?, 0.0);
    manifest.seed = Some(spec.seed);
    let terminal: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0 as f64, r.1]).collect();
    let qv: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0 as f64, r.2]).collect();
    let sup: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0 as f64, r.3]).collect();
    let files = [
        ("terminal.csv", &["path_index", "b_terminal"], &terminal),
        (
            "quadratic_variation.csv",
            &["path_index", "qv_terminal"],
            &qv,
        ),
        ("sup_abs.csv", &["path_index", "sup_abs"], &sup),
    ];
    for (name, header, data) in files {
        let path = out_dir.join(name);
        write_table_csv(header.as_slice(), data, &path)?;
        manifest.record(&path)?;
    }
    for row in &rows {
        if let Some(b) = &row.4 {
            let path = out_dir.join(format!("path_{:04}.csv", row.0));
            write_path_csv(b, &path)?;
            manifest.record(&path)?;
        }
    }
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    manifest.write(out_dir)?;
    Ok(manifest)
}
