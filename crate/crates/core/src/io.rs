//! File formats: path and level-2 CSV, generic tables, and run manifests.
//!
//! Paths travel as CSV with header `t,x1,...,xd`, one row per grid point,
//! values printed with 17 significant digits so that a write/read round
//! trip is bit-exact. Level-2 blocks use `step_index,i,j,value`. Every run
//! directory gets a JSON manifest listing the configuration hash and a
//! SHA-256 checksum per emitted file; equal config hashes must reproduce
//! byte-identical payloads (wall time lives only in the manifest, outside
//! the hashed content).

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::{Error, GridPath, LevelTwo, Result, TimeGrid};

/// 17 significant digits; round-trips every finite f64 exactly.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_field(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: line_no,
        message: format!("bad number {field:?}: {e}"),
    })
}

/// Writes a path as `t,x1,...,xd` rows.
pub fn write_path_csv(path: &GridPath, file: &Path) -> Result<()> {
    let mut out = String::new();
    let d = path.dim();
    out.push('t');
    for c in 1..=d {
        let _ = write!(out, ",x{c}");
    }
    out.push('\n');
    for i in 0..path.grid().n_points() {
        let _ = write!(out, "{}", fmt_g17(path.grid().time(i)));
        for v in path.value(i) {
            let _ = write!(out, ",{}", fmt_g17(*v));
        }
        out.push('\n');
    }
    std::fs::write(file, out)?;
    Ok(())
}

/// Reads a path written by [`write_path_csv`], validating the header, the
/// row shape, and the uniform-grid invariant.
pub fn load_path_csv(file: &Path) -> Result<GridPath> {
    let reader = BufReader::new(std::fs::File::open(file)?);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.is_empty() || cols[0] != "t" || cols.len() < 2 {
        return Err(Error::Parse {
            path: file.display().to_string(),
            line: 1,
            message: format!(
                "expected header t,x1,...,xd; got {header:?}"
            ),
        });
    }
    let d = cols.len() - 1;
    for (c, name) in cols[1..].iter().enumerate() {
        let expected = format!("x{}", c + 1);
        if name.trim() != expected {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: 1,
                message: format!("expected column {expected}, got {name:?}"),
            });
        }
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: line_no,
                message: format!("expected {} fields, got {}", d + 1, fields.len()),
            });
        }
        times.push(parse_field(file, line_no, fields[0])?);
        for f in &fields[1..] {
            values.push(parse_field(file, line_no, f)?);
        }
    }
    if times.len() < 2 {
        return Err(Error::Parse {
            path: file.display().to_string(),
            line: times.len() + 1,
            message: "need at least two grid points".into(),
        });
    }
    let n_steps = times.len() - 1;
    let horizon = times[n_steps] - times[0];
    if times[0] != 0.0 {
        return Err(Error::Parse {
            path: file.display().to_string(),
            line: 2,
            message: format!("grid must start at t = 0, got {}", times[0]),
        });
    }
    let grid = TimeGrid::new(horizon, n_steps)?;
    let h = grid.step();
    for (i, &t) in times.iter().enumerate() {
        if (t - i as f64 * h).abs() > 1e-9 * (1.0 + horizon) {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: i + 2,
                message: format!(
                    "non-uniform time column: t = {t} at row {i}, expected {}",
                    i as f64 * h
                ),
            });
        }
    }
    GridPath::from_values(grid, d, values)
}

/// Writes level-2 step blocks as `step_index,i,j,value` rows.
pub fn write_level2_csv(level2: &LevelTwo, file: &Path) -> Result<()> {
    let d = level2.dim();
    let mut out = String::from("step_index,i,j,value\n");
    for k in 0..level2.n_steps() {
        let blk = level2.block(k);
        for i in 0..d {
            for j in 0..d {
                let _ = writeln!(out, "{k},{i},{j},{}", fmt_g17(blk[i * d + j]));
            }
        }
    }
    std::fs::write(file, out)?;
    Ok(())
}

/// Reads level-2 blocks written by [`write_level2_csv`].
pub fn load_level2_csv(file: &Path, dim: usize, n_steps: usize) -> Result<LevelTwo> {
    let reader = BufReader::new(std::fs::File::open(file)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(h) => {
            let h = h?;
            if h.trim() != "step_index,i,j,value" {
                return Err(Error::Parse {
                    path: file.display().to_string(),
                    line: 1,
                    message: format!("expected header step_index,i,j,value; got {h:?}"),
                });
            }
        }
        None => {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut blocks = vec![0.0; n_steps * dim * dim];
    let mut seen = vec![false; n_steps * dim * dim];
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: line_no,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let parse_idx = |f: &str, what: &str| -> Result<usize> {
            f.trim().parse::<usize>().map_err(|e| Error::Parse {
                path: file.display().to_string(),
                line: line_no,
                message: format!("bad {what} {f:?}: {e}"),
            })
        };
        let k = parse_idx(fields[0], "step index")?;
        let i = parse_idx(fields[1], "row index")?;
        let j = parse_idx(fields[2], "column index")?;
        if k >= n_steps || i >= dim || j >= dim {
            return Err(Error::Parse {
                path: file.display().to_string(),
                line: line_no,
                message: format!("indices ({k},{i},{j}) outside {n_steps}×{dim}×{dim}"),
            });
        }
        let flat = (k * dim + i) * dim + j;
        blocks[flat] = parse_field(file, line_no, fields[3])?;
        seen[flat] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            path: file.display().to_string(),
            line: 0,
            message: format!("missing block entry at flat index {missing}"),
        });
    }
    LevelTwo::new(dim, n_steps, blocks)
}

/// Writes a generic numeric table with the given header.
pub fn write_table_csv(header: &[&str], rows: &[Vec<f64>], file: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_g17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(file, out)?;
    Ok(())
}

/// SHA-256 of a byte slice, hex-encoded.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Hash of a serialisable configuration: SHA-256 over its canonical JSON.
pub fn config_hash<T: serde::Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)
        .map_err(|e| Error::InvalidParameter(format!("unserialisable config: {e}")))?;
    Ok(sha256_hex(json.as_bytes()))
}

/// One emitted file with its checksum.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
}

/// A run record: configuration hash, seed, library version, wall time, and
/// a checksum per output. Wall time is informational and excluded from any
/// reproducibility comparison.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub library_version: String,
    pub wall_time_secs: f64,
    pub outputs: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(config_hash: String, wall_time_secs: f64) -> Self {
        Self {
            config_hash,
            seed: None,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_secs,
            outputs: Vec::new(),
        }
    }

    /// Checksums an emitted file and records it.
    pub fn record(&mut self, file: &Path) -> Result<()> {
        let bytes = std::fs::read(file)?;
        self.outputs.push(ManifestEntry {
            file: file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| file.display().to_string()),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes the manifest as pretty JSON and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("run_manifest.json");
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("manifest serialisation: {e}")))?;
        let mut f = std::fs::File::create(&path)?;
        f.write_all(json.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: 0,
            message: format!("bad manifest: {e}"),
        })
    }

    /// True when both manifests list the same outputs with equal checksums.
    pub fn same_outputs(&self, other: &RunManifest) -> bool {
        if self.outputs.len() != other.outputs.len() {
            return false;
        }
        let mut a: Vec<_> = self.outputs.iter().map(|e| (&e.file, &e.sha256)).collect();
        let mut b: Vec<_> = other.outputs.iter().map(|e| (&e.file, &e.sha256)).collect();
        a.sort();
        b.sort();
        a == b
    }
}
