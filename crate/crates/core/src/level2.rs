//! Second-order path data: per-step d×d blocks with Chen reconstruction.
//!
//! A [`LevelTwo`] stores the value of the second-order object over each base
//! step only. Values over longer grid intervals are reconstructed on demand
//! through Chen's identity
//!
//! ```text
//! X2_{s,t} = X2_{s,u} + X2_{u,t} + X_{s,u} ⊗ X_{u,t}
//! ```
//!
//! which keeps storage at O(N) instead of an O(N²) interval table. The entry
//! convention is `X2_{s,t}[i][j] = ∫_s^t X^{(i)}_{s,r} dX^{(j)}_r`: the left
//! index is the integrand component, the right index the integrator.

use crate::util::KahanSum;
use crate::{Error, GridPath, Result, TimeGrid};
use rand::Rng;
use rand::SeedableRng;

/// Which second-order convention a [`RoughPath`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftKind {
    Ito,
    Stratonovich,
}

impl std::fmt::Display for LiftKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftKind::Ito => write!(f, "ito"),
            LiftKind::Stratonovich => write!(f, "stratonovich"),
        }
    }
}

/// Per-base-step d×d blocks of a second-order object.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTwo {
    dim: usize,
    /// Flat row-major storage, `n_steps × dim × dim`.
    step_blocks: Vec<f64>,
}

impl LevelTwo {
    pub fn new(dim: usize, n_steps: usize, step_blocks: Vec<f64>) -> Result<Self> {
        if step_blocks.len() != n_steps * dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} block entries ({} steps × {}²), got {}",
                n_steps * dim * dim,
                n_steps,
                dim,
                step_blocks.len()
            )));
        }
        if step_blocks.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite level-2 block entry".into()));
        }
        Ok(Self { dim, step_blocks })
    }

    pub fn zeros(dim: usize, n_steps: usize) -> Self {
        Self {
            dim,
            step_blocks: vec![0.0; n_steps * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_steps(&self) -> usize {
        self.step_blocks.len() / (self.dim * self.dim)
    }

    /// Block over base step `k`, row-major d×d.
    pub fn block(&self, k: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.step_blocks[k * s..(k + 1) * s]
    }

    pub fn blocks(&self) -> &[f64] {
        &self.step_blocks
    }

    pub fn scale(&self, lambda: f64) -> LevelTwo {
        LevelTwo {
            dim: self.dim,
            step_blocks: self.step_blocks.iter().map(|v| lambda * v).collect(),
        }
    }
}

/// A path together with its second-order data and the lift convention.
///
/// Interval values of the second level are reconstructed through Chen's
/// identity, so every `RoughPath` is Chen-consistent by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughPath {
    path: GridPath,
    level2: LevelTwo,
    lift_kind: LiftKind,
}

impl RoughPath {
    pub fn new(path: GridPath, level2: LevelTwo, lift_kind: LiftKind) -> Result<Self> {
        if level2.dim() != path.dim() {
            return Err(Error::DimensionMismatch(format!(
                "path dim {} vs level-2 dim {}",
                path.dim(),
                level2.dim()
            )));
        }
        if level2.n_steps() != path.grid().n_steps() {
            return Err(Error::GridMismatch(format!(
                "path has {} steps, level-2 has {}",
                path.grid().n_steps(),
                level2.n_steps()
            )));
        }
        Ok(Self {
            path,
            level2,
            lift_kind,
        })
    }

    pub fn path(&self) -> &GridPath {
        &self.path
    }

    pub fn level2(&self) -> &LevelTwo {
        &self.level2
    }

    pub fn lift_kind(&self) -> LiftKind {
        self.lift_kind
    }

    pub fn dim(&self) -> usize {
        self.path.dim()
    }

    pub fn grid(&self) -> &TimeGrid {
        self.path.grid()
    }

    /// Reconstructs `X2_{t_i, t_j}` by accumulating left to right:
    ///
    /// ```text
    /// X2_{i,j} = Σ_{k=i}^{j-1} block_k + Σ_{k=i+1}^{j-1} X_{i,k} ⊗ X_{k,k+1}
    /// ```
    ///
    /// Runs in O((j-i)·d²) with compensated accumulation per entry.
    pub fn reconstruct_level2(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        if i >= j {
            return Err(Error::EmptyInterval { start: i, end: j });
        }
        let d = self.dim();
        let mut acc = vec![KahanSum::new(); d * d];
        for k in i..j {
            let blk = self.level2.block(k);
            for (a, b) in acc.iter_mut().zip(blk) {
                a.add(*b);
            }
            if k > i {
                let xi = self.path.value(i);
                let xk = self.path.value(k);
                let xk1 = self.path.value(k + 1);
                for r in 0..d {
                    let left = xk[r] - xi[r];
                    for c in 0..d {
                        acc[r * d + c].add(left * (xk1[c] - xk[c]));
                    }
                }
            }
        }
        Ok(acc.iter().map(KahanSum::value).collect())
    }

    /// Precomputes prefix values `X2_{0,j}` for O(d²) interval queries.
    pub fn prefix(&self) -> Level2Prefix<'_> {
        Level2Prefix::new(self)
    }
}

/// Prefix table of second-level values anchored at time zero.
///
/// Any interval value follows from Chen's identity applied at the left
/// endpoint: `X2_{i,j} = X2_{0,j} - X2_{0,i} - X_{0,i} ⊗ X_{i,j}`. Building
/// the table costs O(N·d²); each query is O(d²). Queries agree with
/// [`RoughPath::reconstruct_level2`] up to rounding on the order of 1e-14
/// times the magnitude of the data.
pub struct Level2Prefix<'a> {
    rp: &'a RoughPath,
    /// `(n_steps + 1) × d × d`, compensated cumulative values.
    prefix: Vec<f64>,
}

impl<'a> Level2Prefix<'a> {
    fn new(rp: &'a RoughPath) -> Self {
        let d = rp.dim();
        let n = rp.grid().n_steps();
        let mut prefix = vec![0.0; (n + 1) * d * d];
        let mut acc = vec![KahanSum::new(); d * d];
        let x0 = rp.path.value(0).to_vec();
        for k in 0..n {
            let blk = rp.level2.block(k);
            let xk = rp.path.value(k);
            let xk1 = rp.path.value(k + 1);
            for r in 0..d {
                let left = xk[r] - x0[r];
                for c in 0..d {
                    let idx = r * d + c;
                    acc[idx].add(blk[idx]);
                    if k > 0 {
                        acc[idx].add(left * (xk1[c] - xk[c]));
                    }
                }
            }
            for (slot, a) in prefix[(k + 1) * d * d..(k + 2) * d * d]
                .iter_mut()
                .zip(&acc)
            {
                *slot = a.value();
            }
        }
        Self { rp, prefix }
    }

    pub fn dim(&self) -> usize {
        self.rp.dim()
    }

    /// Writes `X2_{i,j}` (row-major d×d) into `out`.
    pub fn interval(&self, i: usize, j: usize, out: &mut [f64]) {
        let d = self.rp.dim();
        let s = d * d;
        let pi = &self.prefix[i * s..(i + 1) * s];
        let pj = &self.prefix[j * s..(j + 1) * s];
        let x0 = self.rp.path.value(0);
        let xi = self.rp.path.value(i);
        let xj = self.rp.path.value(j);
        for r in 0..d {
            let left = xi[r] - x0[r];
            for c in 0..d {
                out[r * d + c] = pj[r * d + c] - pi[r * d + c] - left * (xj[c] - xi[c]);
            }
        }
    }

    /// Frobenius norm of `X2_{i,j}`.
    pub fn interval_frobenius(&self, i: usize, j: usize) -> f64 {
        let d = self.rp.dim();
        let s = d * d;
        let pi = &self.prefix[i * s..(i + 1) * s];
        let pj = &self.prefix[j * s..(j + 1) * s];
        let x0 = self.rp.path.value(0);
        let xi = self.rp.path.value(i);
        let xj = self.rp.path.value(j);
        let mut total = 0.0;
        for r in 0..d {
            let left = xi[r] - x0[r];
            for c in 0..d {
                let v = pj[r * d + c] - pi[r * d + c] - left * (xj[c] - xi[c]);
                total += v * v;
            }
        }
        total.sqrt()
    }
}

/// How [`chen_defect`] chooses the grid triples it inspects.
#[derive(Debug, Clone, Copy)]
pub enum TripleSample {
    /// Every `i < j < k`. Cost grows as the cube of the point count.
    Exhaustive,
    /// A seeded uniform sample of distinct triples, plus the extremal
    /// triples touching both endpoints. Deterministic for a fixed seed.
    Budget { max_triples: usize, seed: u64 },
}

impl TripleSample {
    /// Exhaustive below ~200k triples, a 200k budget above.
    pub fn auto(n_points: usize) -> Self {
        let total = n_choose_3(n_points);
        if total <= 200_000 {
            TripleSample::Exhaustive
        } else {
            TripleSample::Budget {
                max_triples: 200_000,
                seed: 0x9e3779b97f4a7c15,
            }
        }
    }
}

fn n_choose_3(n: usize) -> u128 {
    if n < 3 {
        return 0;
    }
    let n = n as u128;
    n * (n - 1) * (n - 2) / 6
}

/// Largest Chen-identity violation of externally supplied level-2 data:
///
/// ```text
/// max_{i<j<k} | X2_{i,k} - X2_{i,j} - X2_{j,k} - X_{i,j} ⊗ X_{j,k} |_F
/// ```
///
/// `level2` writes the d×d value over `(i, j)` into its output slice.
pub fn chen_defect<F>(path: &GridPath, level2: F, sample: TripleSample) -> Result<f64>
where
    F: Fn(usize, usize, &mut [f64]),
{
    let n = path.grid().n_points();
    if n < 3 {
        return Ok(0.0);
    }
    let d = path.dim();
    let s = d * d;
    let mut ik = vec![0.0; s];
    let mut ij = vec![0.0; s];
    let mut jk = vec![0.0; s];
    let mut worst: f64 = 0.0;
    let mut eval = |i: usize, j: usize, k: usize, worst: &mut f64| {
        level2(i, k, &mut ik);
        level2(i, j, &mut ij);
        level2(j, k, &mut jk);
        let xi = path.value(i);
        let xj = path.value(j);
        let xk = path.value(k);
        let mut total = 0.0;
        for r in 0..d {
            let left = xj[r] - xi[r];
            for c in 0..d {
                let idx = r * d + c;
                let v = ik[idx] - ij[idx] - jk[idx] - left * (xk[c] - xj[c]);
                total += v * v;
            }
        }
        let defect = total.sqrt();
        if defect > *worst {
            *worst = defect;
        }
    };
    match sample {
        TripleSample::Exhaustive => {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        eval(i, j, k, &mut worst);
                    }
                }
            }
        }
        TripleSample::Budget { max_triples, seed } => {
            if n_choose_3(n) <= max_triples as u128 {
                return chen_defect(path, level2, TripleSample::Exhaustive);
            }
            // Endpoint-touching triples first: they exercise the longest
            // reconstructions, where accumulated rounding is largest.
            eval(0, (n - 1) / 2, n - 1, &mut worst);
            eval(0, 1, n - 1, &mut worst);
            eval(0, n - 2, n - 1, &mut worst);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut drawn = 3;
            while drawn < max_triples {
                let mut a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n);
                let mut c = rng.random_range(0..n);
                if a == b || b == c || a == c {
                    continue;
                }
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                if b > c {
                    std::mem::swap(&mut b, &mut c);
                }
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                eval(a, b, c, &mut worst);
                drawn += 1;
            }
        }
    }
    Ok(worst)
}
