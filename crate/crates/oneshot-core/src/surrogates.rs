//! Surrogate regression models fitted on design evaluations: Kriging
//! (Gaussian process with squared-exponential kernel), CART-style decision
//! trees, and bagged random forests.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::pointset::PointSet;
use crate::rng;
use crate::Objective;
use rand_chacha::ChaCha8Rng;

/// Supported model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurrogateKind {
    Kriging,
    Tree,
    Forest,
}

impl fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurrogateKind::Kriging => f.write_str("kriging"),
            SurrogateKind::Tree => f.write_str("tree"),
            SurrogateKind::Forest => f.write_str("forest"),
        }
    }
}

impl core::str::FromStr for SurrogateKind {
    type Err = SurrogateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kriging" => Ok(SurrogateKind::Kriging),
            "tree" => Ok(SurrogateKind::Tree),
            "forest" => Ok(SurrogateKind::Forest),
            other => Err(SurrogateError::InvalidParameter(alloc::format!(
                "unknown surrogate kind {other}"
            ))),
        }
    }
}

/// Errors from training-set validation, fitting and prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum SurrogateError {
    InvalidParameter(String),
    TooFewPoints { n: usize, min: usize },
    /// Kriging refuses very large designs (dense kernel factorization).
    KrigingTooLarge { n: usize, max: usize },
    /// Two identical rows carry different responses.
    ConflictingDuplicate { row_a: usize, row_b: usize },
    /// Kernel matrix stayed non-positive-definite after nugget escalation.
    SingularKernel { attempts: u32 },
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for SurrogateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurrogateError::InvalidParameter(msg) => write!(f, "{msg}"),
            SurrogateError::TooFewPoints { n, min } => {
                write!(f, "training set has {n} points; at least {min} required")
            }
            SurrogateError::KrigingTooLarge { n, max } => {
                write!(f, "kriging supports at most {max} points, got {n}")
            }
            SurrogateError::ConflictingDuplicate { row_a, row_b } => {
                write!(f, "rows {row_a} and {row_b} are identical but carry different responses")
            }
            SurrogateError::SingularKernel { attempts } => {
                write!(f, "kernel matrix not positive definite after {attempts} nugget escalations")
            }
            SurrogateError::DimensionMismatch { expected, found } => {
                write!(f, "query dimension {found} does not match model dimension {expected}")
            }
        }
    }
}

impl core::error::Error for SurrogateError {}

/// Design coordinates with their observed responses.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    x: Vec<f64>, // n x d, row-major
    y: Vec<f64>,
    n: usize,
    d: usize,
    pub function_id: String,
    pub design_id: String,
}

impl TrainingSet {
    /// Validates shapes and rejects identical rows with conflicting responses.
    pub fn new(
        x: Vec<f64>,
        d: usize,
        y: Vec<f64>,
        function_id: String,
        design_id: String,
    ) -> Result<Self, SurrogateError> {
        if d == 0 || x.is_empty() || x.len() % d != 0 {
            return Err(SurrogateError::InvalidParameter(String::from(
                "coordinates must form a non-empty n x d matrix",
            )));
        }
        let n = x.len() / d;
        if y.len() != n {
            return Err(SurrogateError::InvalidParameter(alloc::format!(
                "got {} responses for {n} rows",
                y.len()
            )));
        }
        // Sort row indices by raw coordinate bits; duplicates become adjacent.
        let row_key = |i: usize| &x[i * d..(i + 1) * d];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (row_key(a), row_key(b));
            for (va, vb) in ra.iter().zip(rb) {
                match va.total_cmp(vb) {
                    core::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            core::cmp::Ordering::Equal
        });
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            if row_key(a) == row_key(b) && y[a] != y[b] {
                return Err(SurrogateError::ConflictingDuplicate { row_a: a, row_b: b });
            }
        }
        Ok(TrainingSet {
            x,
            y,
            n,
            d,
            function_id,
            design_id,
        })
    }

    /// Evaluates an objective on every design point; returns the training
    /// set and the response vector.
    pub fn from_design(
        ps: &PointSet,
        f: &dyn Objective,
    ) -> Result<(Self, Vec<f64>), crate::EvalError> {
        let mut y = Vec::with_capacity(ps.len());
        for p in ps.iter_points() {
            y.push(f.evaluate(p)?);
        }
        let ts = TrainingSet::new(
            ps.coords().to_vec(),
            ps.dim(),
            y.clone(),
            String::from(f.id()),
            String::from(ps.id()),
        )
        .map_err(|e| crate::EvalError::External(alloc::format!("{e}")))?;
        Ok((ts, y))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn responses(&self) -> &[f64] {
        &self.y
    }

    /// FNV-1a digest over shape and raw data bits.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.n as u64);
        eat(self.d as u64);
        for c in &self.x {
            eat(c.to_bits());
        }
        for v in &self.y {
            eat(v.to_bits());
        }
        h
    }
}

/// Kriging hyperparameter policy: an isotropic squared-exponential kernel
/// with the length-scale selected from a fixed logarithmic grid by marginal
/// likelihood, and a relative nugget for numerical stability.
#[derive(Debug, Clone)]
pub struct KrigingParams {
    /// Number of grid points for the length-scale search.
    pub theta_grid: usize,
    /// Grid spans `[theta_lo_factor, theta_hi_factor] * data diagonal`.
    pub theta_lo_factor: f64,
    pub theta_hi_factor: f64,
    /// Nugget relative to the process variance.
    pub nugget_rel: f64,
    /// Hard cap on the training size for the dense factorization.
    pub max_points: usize,
}

impl Default for KrigingParams {
    fn default() -> Self {
        KrigingParams {
            theta_grid: 25,
            theta_lo_factor: 1e-2,
            theta_hi_factor: 1e1,
            nugget_rel: 1e-8,
            max_points: 5_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeParams {
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { min_leaf: 5 }
    }
}

#[derive(Debug, Clone)]
pub struct ForestParams {
    pub trees: usize,
    pub min_leaf: usize,
    /// Candidate split dimensions per node; `None` means `ceil(d/3)`.
    pub mtry: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 500,
            min_leaf: 5,
            mtry: None,
            bootstrap: true,
        }
    }
}

/// Bundle of per-kind fitting parameters.
#[derive(Debug, Clone, Default)]
pub struct FitParams {
    pub kriging: KrigingParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
}

/// Hyperparameters and provenance of a fitted model, for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub kind: SurrogateKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub training_digest: u64,
    pub hyperparameters: Vec<(String, f64)>,
}

/// A fitted surrogate; prediction is deterministic and reentrant.
#[derive(Debug, Clone)]
pub enum SurrogateModel {
    Kriging(KrigingModel),
    Tree(DecisionTree),
    Forest(Forest),
}

impl SurrogateModel {
    pub fn kind(&self) -> SurrogateKind {
        match self {
            SurrogateModel::Kriging(_) => SurrogateKind::Kriging,
            SurrogateModel::Tree(_) => SurrogateKind::Tree,
            SurrogateModel::Forest(_) => SurrogateKind::Forest,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SurrogateModel::Kriging(m) => m.d,
            SurrogateModel::Tree(m) => m.d,
            SurrogateModel::Forest(m) => m.d,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, SurrogateError> {
        if x.len() != self.dim() {
            return Err(SurrogateError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(match self {
            SurrogateModel::Kriging(m) => m.predict(x),
            SurrogateModel::Tree(m) => m.predict(x),
            SurrogateModel::Forest(m) => m.predict(x),
        })
    }

    /// Predicts every row of an `m x d` coordinate matrix.
    pub fn predict_batch(&self, coords: &[f64]) -> Result<Vec<f64>, SurrogateError> {
        let d = self.dim();
        if coords.len() % d != 0 {
            return Err(SurrogateError::DimensionMismatch {
                expected: d,
                found: coords.len() % d,
            });
        }
        coords.chunks_exact(d).map(|row| self.predict(row)).collect()
    }

    pub fn summary(&self) -> ModelSummary {
        match self {
            SurrogateModel::Kriging(m) => ModelSummary {
                kind: SurrogateKind::Kriging,
                n: m.n,
                d: m.d,
                seed: m.seed,
                training_digest: m.training_digest,
                hyperparameters: vec![
                    (String::from("theta"), m.theta),
                    (String::from("sigma2"), m.sigma2),
                    (String::from("mean"), m.mean),
                    (String::from("nugget_rel"), m.nugget_rel_used),
                ],
            },
            SurrogateModel::Tree(m) => ModelSummary {
                kind: SurrogateKind::Tree,
                n: m.n,
                d: m.d,
                seed: m.seed,
                training_digest: m.training_digest,
                hyperparameters: vec![(String::from("min_leaf"), m.min_leaf as f64)],
            },
            SurrogateModel::Forest(m) => ModelSummary {
                kind: SurrogateKind::Forest,
                n: m.n,
                d: m.d,
                seed: m.seed,
                training_digest: m.training_digest,
                hyperparameters: vec![
                    (String::from("trees"), m.trees.len() as f64),
                    (String::from("min_leaf"), m.min_leaf as f64),
                    (String::from("mtry"), m.mtry as f64),
                    (String::from("bootstrap"), if m.bootstrap { 1.0 } else { 0.0 }),
                ],
            },
        }
    }
}

/// Fits a surrogate of the requested kind.
///
/// Kriging fits are deterministic; `seed` drives bootstrap resampling and
/// per-node feature sampling for forests. A constant-response training set
/// yields a constant model for every kind.
pub fn fit(
    kind: SurrogateKind,
    ts: &TrainingSet,
    seed: u64,
    params: &FitParams,
) -> Result<SurrogateModel, SurrogateError> {
    if ts.len() < 3 {
        return Err(SurrogateError::TooFewPoints { n: ts.len(), min: 3 });
    }
    match kind {
        SurrogateKind::Kriging => {
            fit_kriging(ts, seed, &params.kriging).map(SurrogateModel::Kriging)
        }
        SurrogateKind::Tree => Ok(SurrogateModel::Tree(fit_tree(ts, seed, &params.tree))),
        SurrogateKind::Forest => Ok(SurrogateModel::Forest(fit_forest(ts, seed, &params.forest))),
    }
}

// ---------------------------------------------------------------------------
// Kriging
// ---------------------------------------------------------------------------

/// Ordinary-Kriging-style model: fitted constant mean plus kernel weights.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    x: Vec<f64>,
    n: usize,
    d: usize,
    theta: f64,
    sigma2: f64,
    mean: f64,
    nugget_rel_used: f64,
    weights: Vec<f64>,
    seed: u64,
    training_digest: u64,
}

impl KrigingModel {
    fn predict(&self, q: &[f64]) -> f64 {
        let inv = 1.0 / (2.0 * self.theta * self.theta);
        let mut acc = self.mean;
        for (row, w) in self.x.chunks_exact(self.d).zip(&self.weights) {
            let mut sq = 0.0;
            for (a, b) in row.iter().zip(q) {
                let diff = a - b;
                sq += diff * diff;
            }
            acc += w * (-sq * inv).exp();
        }
        acc
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// In-place Cholesky factorization (lower triangle); false if a pivot is
/// not strictly positive.
fn cholesky(a: &mut [f64], n: usize) -> bool {
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                a[i * n + i] = s.sqrt();
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    true
}

/// Solves `L L^T x = b` given the lower factor.
fn cholesky_solve(l: &[f64], n: usize, b: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= l[i * n + j] * out[j];
        }
        out[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = out[i];
        for j in i + 1..n {
            s -= l[j * n + i] * out[j];
        }
        out[i] = s / l[i * n + i];
    }
}

fn fit_kriging(
    ts: &TrainingSet,
    seed: u64,
    params: &KrigingParams,
) -> Result<KrigingModel, SurrogateError> {
    let (n, d) = (ts.len(), ts.dim());
    if n > params.max_points {
        return Err(SurrogateError::KrigingTooLarge {
            n,
            max: params.max_points,
        });
    }
    let y = ts.responses();
    let digest = ts.digest();

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let y_var = variance(y);
    if y_var == 0.0 {
        // Constant responses: the model collapses to its mean.
        return Ok(KrigingModel {
            x: Vec::new(),
            n,
            d,
            theta: 1.0,
            sigma2: 0.0,
            mean: y_mean,
            nugget_rel_used: params.nugget_rel,
            weights: Vec::new(),
            seed,
            training_digest: digest,
        });
    }

    // Bounding-box diagonal of the training data anchors the theta grid.
    let mut diag_sq = 0.0;
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let v = ts.row(i)[j];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        diag_sq += (hi - lo) * (hi - lo);
    }
    let diagonal = diag_sq.sqrt().max(f64::MIN_POSITIVE);

    // Pairwise squared distances, computed once and shared across the grid.
    let mut dist_sq = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..i {
            let (ri, rk) = (ts.row(i), ts.row(k));
            let mut sq = 0.0;
            for (a, b) in ri.iter().zip(rk) {
                let diff = a - b;
                sq += diff * diff;
            }
            dist_sq[i * n + k] = sq;
            dist_sq[k * n + i] = sq;
        }
    }

    let grid = params.theta_grid.max(1);
    let log_lo = params.theta_lo_factor.log10();
    let log_hi = params.theta_hi_factor.log10();

    let mut nugget = params.nugget_rel;
    let mut escalations = 0u32;
    loop {
        // (logml, theta, mean, sigma2, weights)
        let mut best: Option<(f64, f64, f64, f64, Vec<f64>)> = None;
        let mut r = vec![0.0; n * n];
        let mut alpha = vec![0.0; n];
        let mut u = vec![0.0; n];
        let ones = vec![1.0; n];
        for k in 0..grid {
            let frac = if grid == 1 {
                0.5
            } else {
                k as f64 / (grid - 1) as f64
            };
            let theta = diagonal * 10f64.powf(log_lo + (log_hi - log_lo) * frac);
            let inv = 1.0 / (2.0 * theta * theta);
            for i in 0..n {
                for j in 0..i {
                    let c = (-dist_sq[i * n + j] * inv).exp();
                    r[i * n + j] = c;
                    r[j * n + i] = c;
                }
                r[i * n + i] = 1.0 + nugget;
            }
            if !cholesky(&mut r, n) {
                continue;
            }
            let log_det_half: f64 = (0..n).map(|i| r[i * n + i].ln()).sum();
            cholesky_solve(&r, n, y, &mut alpha);
            cholesky_solve(&r, n, &ones, &mut u);
            let denom: f64 = u.iter().sum();
            if denom <= 0.0 || !denom.is_finite() {
                continue;
            }
            let mean = alpha.iter().sum::<f64>() / denom;
            // weights = R^{-1} (y - mean) = alpha - mean * u
            let weights: Vec<f64> = alpha.iter().zip(&u).map(|(a, b)| a - mean * b).collect();
            let sigma2 = y
                .iter()
                .zip(&weights)
                .map(|(yi, wi)| (yi - mean) * wi)
                .sum::<f64>()
                / n as f64;
            let sigma2 = sigma2.max(1e-300);
            let logml = -0.5 * n as f64 * sigma2.ln() - log_det_half;
            if best.as_ref().map_or(true, |(b, ..)| logml > *b) {
                best = Some((logml, theta, mean, sigma2, weights));
            }
        }
        if let Some((_, theta, mean, sigma2, weights)) = best {
            return Ok(KrigingModel {
                x: ts.x.clone(),
                n,
                d,
                theta,
                sigma2,
                mean,
                nugget_rel_used: nugget,
                weights,
                seed,
                training_digest: digest,
            });
        }
        if escalations == 3 {
            return Err(SurrogateError::SingularKernel { attempts: escalations });
        }
        nugget *= 10.0;
        escalations += 1;
    }
}

// ---------------------------------------------------------------------------
// CART tree and random forest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum TreeNode {
    Leaf { value: f64 },
    Split { dim: usize, threshold: f64, left: usize, right: usize },
}

/// Regression tree grown by variance-reduction splits.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    n: usize,
    d: usize,
    min_leaf: usize,
    seed: u64,
    training_digest: u64,
}

impl DecisionTree {
    fn predict(&self, x: &[f64]) -> f64 {
        predict_nodes(&self.nodes, x)
    }
}

fn predict_nodes(nodes: &[TreeNode], x: &[f64]) -> f64 {
    let mut node = 0usize;
    loop {
        match &nodes[node] {
            TreeNode::Leaf { value } => return *value,
            TreeNode::Split { dim, threshold, left, right } => {
                node = if x[*dim] <= *threshold { *left } else { *right };
            }
        }
    }
}

struct TreeBuilder<'a> {
    ts: &'a TrainingSet,
    min_leaf: usize,
    mtry: usize,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    /// Builds the subtree over `indices` (row indices, possibly repeated
    /// under bootstrap) and returns its node id.
    fn build(&mut self, indices: &mut [usize], rng: &mut ChaCha8Rng) -> usize {
        let m = indices.len();
        let sum: f64 = indices.iter().map(|&i| self.ts.responses()[i]).sum();
        let mean = sum / m as f64;
        if m < 2 * self.min_leaf {
            self.nodes.push(TreeNode::Leaf { value: mean });
            return self.nodes.len() - 1;
        }
        let sse_parent: f64 = indices
            .iter()
            .map(|&i| {
                let r = self.ts.responses()[i] - mean;
                r * r
            })
            .sum();

        let d = self.ts.dim();
        let dims: Vec<usize> = if self.mtry >= d {
            (0..d).collect()
        } else {
            let mut picked = rng::sample_distinct(rng, d, self.mtry);
            picked.sort_unstable();
            picked
        };

        // Best split (cost, dim, threshold); fixed scan order settles ties.
        let mut best: Option<(f64, usize, f64)> = None;
        let mut scratch: Vec<usize> = indices.to_vec();
        let total_sq: f64 = indices
            .iter()
            .map(|&i| {
                let v = self.ts.responses()[i];
                v * v
            })
            .sum();
        for &dim in &dims {
            scratch.copy_from_slice(indices);
            scratch.sort_by(|&a, &b| self.ts.row(a)[dim].total_cmp(&self.ts.row(b)[dim]));
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for s in 1..m {
                let v = self.ts.responses()[scratch[s - 1]];
                left_sum += v;
                left_sq += v * v;
                if s < self.min_leaf || m - s < self.min_leaf {
                    continue;
                }
                let a = self.ts.row(scratch[s - 1])[dim];
                let b = self.ts.row(scratch[s])[dim];
                if a == b {
                    continue; // cannot separate equal coordinates
                }
                let right_sum = sum - left_sum;
                let right_sq = total_sq - left_sq;
                let cost = (left_sq - left_sum * left_sum / s as f64)
                    + (right_sq - right_sum * right_sum / (m - s) as f64);
                if best.as_ref().map_or(true, |(c, ..)| cost < *c) {
                    best = Some((cost, dim, 0.5 * (a + b)));
                }
            }
        }

        match best {
            Some((cost, dim, threshold)) if cost < sse_parent => {
                let (mut left_idx, mut right_idx): (Vec<usize>, Vec<usize>) = indices
                    .iter()
                    .partition(|&&i| self.ts.row(i)[dim] <= threshold);
                let left = self.build(&mut left_idx, rng);
                let right = self.build(&mut right_idx, rng);
                self.nodes.push(TreeNode::Split { dim, threshold, left, right });
                self.nodes.len() - 1
            }
            _ => {
                self.nodes.push(TreeNode::Leaf { value: mean });
                self.nodes.len() - 1
            }
        }
    }
}

fn grow_tree(
    ts: &TrainingSet,
    indices: &mut [usize],
    min_leaf: usize,
    mtry: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<TreeNode> {
    let mut builder = TreeBuilder {
        ts,
        min_leaf,
        mtry,
        nodes: Vec::new(),
    };
    let root = builder.build(indices, rng);
    let mut nodes = builder.nodes;
    // Relocate the root to index 0 for a fixed prediction entry point.
    let last = nodes.len() - 1;
    debug_assert_eq!(root, last);
    if root != 0 {
        nodes.swap(0, root);
        for node in &mut nodes {
            if let TreeNode::Split { left, right, .. } = node {
                if *left == 0 {
                    *left = root;
                } else if *left == root {
                    *left = 0;
                }
                if *right == 0 {
                    *right = root;
                } else if *right == root {
                    *right = 0;
                }
            }
        }
    }
    nodes
}

fn fit_tree(ts: &TrainingSet, seed: u64, params: &TreeParams) -> DecisionTree {
    let mut rng = rng::rng_from_seed(seed);
    let mut indices: Vec<usize> = (0..ts.len()).collect();
    let nodes = grow_tree(ts, &mut indices, params.min_leaf.max(1), ts.dim(), &mut rng);
    DecisionTree {
        nodes,
        n: ts.len(),
        d: ts.dim(),
        min_leaf: params.min_leaf.max(1),
        seed,
        training_digest: ts.digest(),
    }
}

/// Bagged ensemble of regression trees; prediction is the tree mean.
#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Vec<TreeNode>>,
    n: usize,
    d: usize,
    min_leaf: usize,
    mtry: usize,
    bootstrap: bool,
    seed: u64,
    training_digest: u64,
}

impl Forest {
    fn predict(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|nodes| predict_nodes(nodes, x)).sum();
        sum / self.trees.len() as f64
    }
}

fn fit_forest(ts: &TrainingSet, seed: u64, params: &ForestParams) -> Forest {
    let n = ts.len();
    let d = ts.dim();
    let mtry = params.mtry.unwrap_or_else(|| d.div_ceil(3)).clamp(1, d);
    let min_leaf = params.min_leaf.max(1);
    let mut trees = Vec::with_capacity(params.trees);
    for t in 0..params.trees {
        let mut rng = rng::rng_from_seed(rng::subseed(seed, t as u64));
        let mut indices: Vec<usize> = if params.bootstrap {
            (0..n)
                .map(|_| rng::next_below(&mut rng, n as u64) as usize)
                .collect()
        } else {
            (0..n).collect()
        };
        trees.push(grow_tree(ts, &mut indices, min_leaf, mtry, &mut rng));
    }
    Forest {
        trees,
        n,
        d,
        min_leaf,
        mtry,
        bootstrap: params.bootstrap,
        seed,
        training_digest: ts.digest(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchfuncs;
    use crate::generators::{self, GeneratorSpec};
    use crate::pointset::Bounds;
    use alloc::string::ToString;

    fn quadratic_training(n: usize, seed: u64) -> TrainingSet {
        let ps = generators::generate(&GeneratorSpec::uniform(seed), n, 2)
            .unwrap()
            .scale(&Bounds::symmetric(2, 5.0))
            .unwrap();
        let y: Vec<f64> = ps
            .iter_points()
            .map(|p| p[0] * p[0] + 2.0 * p[1] * p[1] + 0.5 * p[0])
            .collect();
        TrainingSet::new(ps.coords().to_vec(), 2, y, "quad".to_string(), "u".to_string()).unwrap()
    }

    #[test]
    fn constant_responses_yield_constant_predictions_for_all_kinds() {
        let ps = generators::generate(&GeneratorSpec::uniform(3), 30, 2).unwrap();
        let ts = TrainingSet::new(
            ps.coords().to_vec(),
            2,
            vec![7.0; 30],
            "const".to_string(),
            "u".to_string(),
        )
        .unwrap();
        for kind in [SurrogateKind::Kriging, SurrogateKind::Tree, SurrogateKind::Forest] {
            let model = fit(kind, &ts, 1, &FitParams::default()).unwrap();
            for probe in [[0.1, 0.9], [0.5, 0.5], [0.99, 0.01]] {
                let p = model.predict(&probe).unwrap();
                assert!((p - 7.0).abs() < 1e-9, "{kind}: {p}");
            }
        }
    }

    #[test]
    fn kriging_interpolates_training_points_of_smooth_function() {
        let ts = quadratic_training(50, 11);
        let model = fit(SurrogateKind::Kriging, &ts, 0, &FitParams::default()).unwrap();
        for i in 0..ts.len() {
            let p = model.predict(ts.row(i)).unwrap();
            assert!(
                (p - ts.responses()[i]).abs() <= 1e-6,
                "row {i}: {p} vs {}",
                ts.responses()[i]
            );
        }
    }

    #[test]
    fn kriging_far_field_prediction_approaches_fitted_mean() {
        let ts = quadratic_training(40, 13);
        let model = match fit(SurrogateKind::Kriging, &ts, 0, &FitParams::default()).unwrap() {
            SurrogateModel::Kriging(m) => m,
            _ => unreachable!(),
        };
        let faraway = [1e4, 1e4]; // ~1e3 times the data diagonal away
        let p = model.predict(&faraway);
        assert!(
            (p - model.mean()).abs() <= 1e-3 * model.mean().abs().max(1.0),
            "{p} vs mean {}",
            model.mean()
        );
    }

    #[test]
    fn kriging_predictions_are_invariant_under_row_permutation() {
        let ts = quadratic_training(40, 17);
        let n = ts.len();
        let mut rows: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|i| (ts.row(i).to_vec(), ts.responses()[i]))
            .collect();
        rows.reverse();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (row, v) in &rows {
            x.extend_from_slice(row);
            y.push(*v);
        }
        let ts2 = TrainingSet::new(x, 2, y, "quad".to_string(), "u".to_string()).unwrap();
        let m1 = fit(SurrogateKind::Kriging, &ts, 0, &FitParams::default()).unwrap();
        let m2 = fit(SurrogateKind::Kriging, &ts2, 0, &FitParams::default()).unwrap();
        let mut chacha = rng::rng_from_seed(5);
        for _ in 0..50 {
            let probe = [
                -5.0 + 10.0 * rng::uniform01(&mut chacha),
                -5.0 + 10.0 * rng::uniform01(&mut chacha),
            ];
            let a = m1.predict(&probe).unwrap();
            let b = m2.predict(&probe).unwrap();
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn forest_single_tree_without_bootstrap_equals_plain_tree() {
        let ts = quadratic_training(60, 19);
        let mut params = FitParams::default();
        params.forest = ForestParams {
            trees: 1,
            min_leaf: 5,
            mtry: Some(2),
            bootstrap: false,
        };
        let forest = fit(SurrogateKind::Forest, &ts, 42, &params).unwrap();
        let tree = fit(SurrogateKind::Tree, &ts, 42, &params).unwrap();
        let mut chacha = rng::rng_from_seed(7);
        for _ in 0..100 {
            let probe = [
                -5.0 + 10.0 * rng::uniform01(&mut chacha),
                -5.0 + 10.0 * rng::uniform01(&mut chacha),
            ];
            assert_eq!(
                forest.predict(&probe).unwrap(),
                tree.predict(&probe).unwrap()
            );
        }
    }

    #[test]
    fn tree_prediction_is_piecewise_constant() {
        let ts = quadratic_training(60, 23);
        let model = fit(SurrogateKind::Tree, &ts, 0, &FitParams::default()).unwrap();
        let a = model.predict(&[1.234567, 0.555]).unwrap();
        let b = model.predict(&[1.234567 + 1e-12, 0.555]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forest_predictions_stay_within_response_range() {
        let ts = quadratic_training(80, 29);
        let lo = ts.responses().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ts.responses().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut params = FitParams::default();
        params.forest.trees = 50;
        let model = fit(SurrogateKind::Forest, &ts, 3, &params).unwrap();
        let mut chacha = rng::rng_from_seed(31);
        for _ in 0..500 {
            let probe = [
                -8.0 + 16.0 * rng::uniform01(&mut chacha),
                -8.0 + 16.0 * rng::uniform01(&mut chacha),
            ];
            let p = model.predict(&probe).unwrap();
            assert!(p >= lo - 1e-12 && p <= hi + 1e-12, "{p} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn fits_are_deterministic_given_seed() {
        let ts = quadratic_training(60, 37);
        let mut params = FitParams::default();
        params.forest.trees = 20;
        for kind in [SurrogateKind::Kriging, SurrogateKind::Tree, SurrogateKind::Forest] {
            let m1 = fit(kind, &ts, 99, &params).unwrap();
            let m2 = fit(kind, &ts, 99, &params).unwrap();
            let mut chacha = rng::rng_from_seed(41);
            for _ in 0..50 {
                let probe = [
                    -5.0 + 10.0 * rng::uniform01(&mut chacha),
                    -5.0 + 10.0 * rng::uniform01(&mut chacha),
                ];
                assert_eq!(m1.predict(&probe).unwrap(), m2.predict(&probe).unwrap());
            }
        }
    }

    #[test]
    fn predict_batch_equals_mapped_predict() {
        let ts = quadratic_training(40, 43);
        let model = fit(SurrogateKind::Forest, &ts, 5, &FitParams::default()).unwrap();
        let probes = [0.0, 0.0, 1.0, -1.0, 3.0, 2.0];
        let batch = model.predict_batch(&probes).unwrap();
        for (i, row) in probes.chunks(2).enumerate() {
            assert_eq!(batch[i], model.predict(row).unwrap());
        }
    }

    #[test]
    fn conflicting_duplicate_rows_are_rejected() {
        let x = vec![0.1, 0.2, 0.1, 0.2, 0.5, 0.5];
        let err = TrainingSet::new(x, 2, vec![1.0, 2.0, 3.0], "f".to_string(), "d".to_string())
            .unwrap_err();
        assert!(matches!(err, SurrogateError::ConflictingDuplicate { .. }));
        // equal responses on duplicate rows are fine
        let x = vec![0.1, 0.2, 0.1, 0.2, 0.5, 0.5];
        assert!(
            TrainingSet::new(x, 2, vec![1.0, 1.0, 3.0], "f".to_string(), "d".to_string()).is_ok()
        );
    }

    #[test]
    fn too_few_points_is_an_error() {
        let ts = TrainingSet::new(
            vec![0.1, 0.2, 0.3, 0.4],
            2,
            vec![1.0, 2.0],
            "f".to_string(),
            "d".to_string(),
        )
        .unwrap();
        assert!(matches!(
            fit(SurrogateKind::Kriging, &ts, 0, &FitParams::default()),
            Err(SurrogateError::TooFewPoints { n: 2, min: 3 })
        ));
    }

    #[test]
    fn kriging_interpolation_on_suite_functions() {
        // smooth suite members, d=4, within 1e-4 * range(y) at training points
        for fid in ["sphere", "rosenbrock"] {
            let f = benchfuncs::by_id(fid, 4).unwrap();
            let ps = generators::generate(&GeneratorSpec::lhs(7), 200, 4)
                .unwrap()
                .scale(f.domain())
                .unwrap();
            let (ts, y) = TrainingSet::from_design(&ps, &f).unwrap();
            let range = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - y.iter().cloned().fold(f64::INFINITY, f64::min);
            let model = fit(SurrogateKind::Kriging, &ts, 0, &FitParams::default()).unwrap();
            for i in 0..ts.len() {
                let p = model.predict(ts.row(i)).unwrap();
                assert!(
                    (p - y[i]).abs() <= 1e-4 * range,
                    "{fid} row {i}: |{p} - {}| > 1e-4 * {range}",
                    y[i]
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let ts = quadratic_training(20, 47);
        let model = fit(SurrogateKind::Tree, &ts, 0, &FitParams::default()).unwrap();
        assert!(matches!(
            model.predict(&[0.0]),
            Err(SurrogateError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn model_summary_is_self_describing() {
        let ts = quadratic_training(30, 53);
        let model = fit(SurrogateKind::Kriging, &ts, 8, &FitParams::default()).unwrap();
        let s = model.summary();
        assert_eq!(s.kind, SurrogateKind::Kriging);
        assert_eq!(s.n, 30);
        assert_eq!(s.d, 2);
        assert_eq!(s.training_digest, ts.digest());
        assert!(s.hyperparameters.iter().any(|(k, _)| k == "theta"));
    }
}
