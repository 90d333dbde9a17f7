//! Benchmark objectives with known optima, organized by the structural
//! categories the experiment analysis groups by: separable/nonseparable
//! unimodal, multimodal with global structure, and multimodal with weak
//! structure.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::pointset::Bounds;
use crate::rng;

/// Structural category of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    SeparableUnimodal,
    NonseparableUnimodal,
    MultimodalStructured,
    MultimodalWeakStructure,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Category::SeparableUnimodal => "separable-unimodal",
            Category::NonseparableUnimodal => "nonseparable-unimodal",
            Category::MultimodalStructured => "multimodal-structured",
            Category::MultimodalWeakStructure => "multimodal-weak-structure",
        };
        f.write_str(name)
    }
}

/// Errors raised during objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Point has the wrong dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Coordinate outside the closed domain box; callers must repair first.
    OutOfDomain { dim: usize, value: f64 },
    /// An external evaluator misbehaved; carries the raw reply or cause.
    External(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DimensionMismatch { expected, found } => {
                write!(f, "point dimension {found} does not match function dimension {expected}")
            }
            EvalError::OutOfDomain { dim, value } => {
                write!(f, "coordinate {value} in dimension {dim} is outside the domain")
            }
            EvalError::External(msg) => write!(f, "external evaluation failed: {msg}"),
        }
    }
}

impl core::error::Error for EvalError {}

/// An evaluatable objective with dimension, box domain and known optimum.
pub trait Objective: Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    fn domain(&self) -> &Bounds;
    /// The known optimal value `inf_x f(x)` over the domain.
    fn f_star(&self) -> f64;
    fn x_star(&self) -> Option<&[f64]> {
        None
    }
    fn evaluate(&self, x: &[f64]) -> Result<f64, EvalError>;
}

/// Maximum of `z * sin(sqrt(z))` over `[-500, 500]`, attained at
/// [`SCHWEFEL_Z_STAR`]; the tiny margin keeps the shifted objective
/// strictly nonnegative under floating-point evaluation noise.
const SCHWEFEL_PEAK: f64 = 418.9828872724337 + 1e-11;
const SCHWEFEL_Z_STAR: f64 = 420.96874635998205;

/// Frozen seeds for the deterministic random structure of the suite.
const ROTATION_SEED: u64 = 0x526f_7461;
const GALLAGHER_SEED: u64 = 0x4761_6c6c;

const GALLAGHER_PEAKS: usize = 101;

#[derive(Debug, Clone)]
enum FunctionKind {
    Sphere,
    Ellipsoid,
    LinearSlope { slopes: Vec<f64> },
    RotatedEllipsoid { rotation: Vec<f64> }, // d x d, row-major
    Rosenbrock,
    SharpRidge,
    Rastrigin,
    SchafferF7,
    Schwefel,
    Gallagher { centers: Vec<f64>, weights: Vec<f64>, widths: Vec<f64> },
}

/// A concrete benchmark function from the built-in suite.
#[derive(Debug, Clone)]
pub struct BenchmarkFunction {
    fid: String,
    d: usize,
    domain: Bounds,
    f_star: f64,
    x_star: Option<Vec<f64>>,
    category: Category,
    kind: FunctionKind,
}

impl BenchmarkFunction {
    pub fn category(&self) -> Category {
        self.category
    }

    fn eval_kind(&self, x: &[f64]) -> f64 {
        let d = self.d;
        match &self.kind {
            FunctionKind::Sphere => x.iter().map(|v| v * v).sum(),
            FunctionKind::Ellipsoid => x
                .iter()
                .enumerate()
                .map(|(i, v)| ellipsoid_weight(i, d) * v * v)
                .sum(),
            FunctionKind::LinearSlope { slopes } => x
                .iter()
                .zip(slopes)
                .map(|(v, s)| s * (5.0 - v))
                .sum(),
            FunctionKind::RotatedEllipsoid { rotation } => {
                let mut total = 0.0;
                for i in 0..d {
                    let zi: f64 = rotation[i * d..(i + 1) * d]
                        .iter()
                        .zip(x)
                        .map(|(r, v)| r * v)
                        .sum();
                    total += ellipsoid_weight(i, d) * zi * zi;
                }
                total
            }
            FunctionKind::Rosenbrock => (0..d - 1)
                .map(|i| {
                    let a = x[i + 1] - x[i] * x[i];
                    let b = 1.0 - x[i];
                    100.0 * a * a + b * b
                })
                .sum(),
            FunctionKind::SharpRidge => {
                let tail: f64 = x[1..].iter().map(|v| v * v).sum();
                x[0] * x[0] + 100.0 * tail.sqrt()
            }
            FunctionKind::Rastrigin => {
                10.0 * d as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * core::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
            FunctionKind::SchafferF7 => {
                let mut acc = 0.0;
                for i in 0..d - 1 {
                    let s = (x[i] * x[i] + x[i + 1] * x[i + 1]).sqrt();
                    let angle = (50.0 * s.powf(0.2)).sin();
                    acc += s.sqrt() * (1.0 + angle * angle);
                }
                let mean = acc / (d as f64 - 1.0);
                mean * mean
            }
            FunctionKind::Schwefel => x
                .iter()
                .map(|v| {
                    let z = 100.0 * v;
                    SCHWEFEL_PEAK - z * z.abs().sqrt().sin()
                })
                .sum(),
            FunctionKind::Gallagher { centers, weights, widths } => {
                let mut best = f64::NEG_INFINITY;
                for k in 0..weights.len() {
                    let sq: f64 = centers[k * d..(k + 1) * d]
                        .iter()
                        .zip(x)
                        .map(|(c, v)| (v - c) * (v - c))
                        .sum();
                    let peak = weights[k] * (-sq / (2.0 * d as f64 * widths[k] * widths[k])).exp();
                    if peak > best {
                        best = peak;
                    }
                }
                10.0 - best
            }
        }
    }
}

fn ellipsoid_weight(i: usize, d: usize) -> f64 {
    // condition number 10^6 across dimensions
    1e6f64.powf(i as f64 / (d as f64 - 1.0))
}

impl Objective for BenchmarkFunction {
    fn id(&self) -> &str {
        &self.fid
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn domain(&self) -> &Bounds {
        &self.domain
    }

    fn f_star(&self) -> f64 {
        self.f_star
    }

    fn x_star(&self) -> Option<&[f64]> {
        self.x_star.as_deref()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.d {
            return Err(EvalError::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        for (j, v) in x.iter().enumerate() {
            if !(*v >= self.domain.lower()[j] && *v <= self.domain.upper()[j]) {
                return Err(EvalError::OutOfDomain { dim: j, value: *v });
            }
        }
        Ok(self.eval_kind(x))
    }
}

/// Random orthogonal matrix via Gram-Schmidt on a seeded Gaussian matrix.
fn random_rotation(d: usize, seed: u64) -> Vec<f64> {
    let mut chacha = rng::rng_from_seed(seed);
    let mut m: Vec<f64> = (0..d * d).map(|_| rng::standard_normal(&mut chacha)).collect();
    for i in 0..d {
        for prev in 0..i {
            let dot: f64 = (0..d).map(|j| m[i * d + j] * m[prev * d + j]).sum();
            for j in 0..d {
                m[i * d + j] -= dot * m[prev * d + j];
            }
        }
        let norm: f64 = (0..d).map(|j| m[i * d + j] * m[i * d + j]).sum::<f64>().sqrt();
        for j in 0..d {
            m[i * d + j] /= norm;
        }
    }
    m
}

/// The built-in suite for dimension `d` (supported range 2..=10): ten
/// functions covering all four structural categories.
pub fn suite(d: usize) -> Result<Vec<BenchmarkFunction>, EvalError> {
    if !(2..=10).contains(&d) {
        return Err(EvalError::External(alloc::format!(
            "unsupported dimension {d}; the suite covers d in 2..=10"
        )));
    }
    let domain = Bounds::symmetric(d, 5.0);
    let origin = vec![0.0; d];
    let mut funcs = Vec::new();

    funcs.push(BenchmarkFunction {
        fid: String::from("sphere"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::SeparableUnimodal,
        kind: FunctionKind::Sphere,
    });
    funcs.push(BenchmarkFunction {
        fid: String::from("ellipsoid"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::SeparableUnimodal,
        kind: FunctionKind::Ellipsoid,
    });
    let slopes: Vec<f64> = (0..d).map(|i| 10f64.powf(i as f64 / (d as f64 - 1.0))).collect();
    funcs.push(BenchmarkFunction {
        fid: String::from("linear_slope"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(vec![5.0; d]),
        category: Category::SeparableUnimodal,
        kind: FunctionKind::LinearSlope { slopes },
    });

    funcs.push(BenchmarkFunction {
        fid: String::from("rot_ellipsoid"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::NonseparableUnimodal,
        kind: FunctionKind::RotatedEllipsoid {
            rotation: random_rotation(d, rng::subseed(ROTATION_SEED, d as u64)),
        },
    });
    funcs.push(BenchmarkFunction {
        fid: String::from("rosenbrock"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(vec![1.0; d]),
        category: Category::NonseparableUnimodal,
        kind: FunctionKind::Rosenbrock,
    });
    funcs.push(BenchmarkFunction {
        fid: String::from("sharp_ridge"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::NonseparableUnimodal,
        kind: FunctionKind::SharpRidge,
    });

    funcs.push(BenchmarkFunction {
        fid: String::from("rastrigin"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::MultimodalStructured,
        kind: FunctionKind::Rastrigin,
    });
    funcs.push(BenchmarkFunction {
        fid: String::from("schaffer_f7"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(origin.clone()),
        category: Category::MultimodalStructured,
        kind: FunctionKind::SchafferF7,
    });

    funcs.push(BenchmarkFunction {
        fid: String::from("schwefel"),
        d,
        domain: domain.clone(),
        f_star: 0.0,
        x_star: Some(vec![SCHWEFEL_Z_STAR / 100.0; d]),
        category: Category::MultimodalWeakStructure,
        kind: FunctionKind::Schwefel,
    });

    let mut chacha = rng::rng_from_seed(rng::subseed(GALLAGHER_SEED, d as u64));
    let centers: Vec<f64> = (0..GALLAGHER_PEAKS * d)
        .map(|_| -4.9 + 9.8 * rng::uniform01(&mut chacha))
        .collect();
    // The first peak is the unique global optimum; the rest stay below 9.5.
    let mut weights = vec![10.0];
    let mut widths = vec![1.0];
    for _ in 1..GALLAGHER_PEAKS {
        weights.push(1.0 + 8.5 * rng::uniform01(&mut chacha));
        widths.push(0.3 + 1.7 * rng::uniform01(&mut chacha));
    }
    let x_star_gallagher = centers[..d].to_vec();
    funcs.push(BenchmarkFunction {
        fid: String::from("gallagher"),
        d,
        domain,
        f_star: 0.0,
        x_star: Some(x_star_gallagher),
        category: Category::MultimodalWeakStructure,
        kind: FunctionKind::Gallagher { centers, weights, widths },
    });

    Ok(funcs)
}

/// Looks up one suite function by id.
pub fn by_id(fid: &str, d: usize) -> Result<BenchmarkFunction, EvalError> {
    suite(d)?
        .into_iter()
        .find(|f| f.fid == fid)
        .ok_or_else(|| EvalError::External(alloc::format!("unknown function id {fid}")))
}

/// Wraps an objective and counts true evaluations; used to audit evaluation
/// budgets.
pub struct CountingObjective<'a> {
    inner: &'a dyn Objective,
    count: AtomicU64,
}

impl<'a> CountingObjective<'a> {
    pub fn new(inner: &'a dyn Objective) -> Self {
        CountingObjective {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

impl Objective for CountingObjective<'_> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> &Bounds {
        self.inner.domain()
    }

    fn f_star(&self) -> f64 {
        self.inner.f_star()
    }

    fn x_star(&self) -> Option<&[f64]> {
        self.inner.x_star()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_at_origin_is_zero() {
        let f = by_id("sphere", 4).unwrap();
        assert_eq!(f.evaluate(&[0.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn rastrigin_at_origin_is_zero() {
        let f = by_id("rastrigin", 4).unwrap();
        assert!(f.evaluate(&[0.0; 4]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rosenbrock_at_all_ones_is_zero() {
        let f = by_id("rosenbrock", 4).unwrap();
        assert_eq!(f.evaluate(&[1.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn suite_has_ten_functions_and_all_categories() {
        let funcs = suite(4).unwrap();
        assert!(funcs.len() >= 10);
        for cat in [
            Category::SeparableUnimodal,
            Category::NonseparableUnimodal,
            Category::MultimodalStructured,
            Category::MultimodalWeakStructure,
        ] {
            assert!(funcs.iter().any(|f| f.category() == cat), "{cat} empty");
        }
        assert!(
            funcs
                .iter()
                .filter(|f| f.category() == Category::SeparableUnimodal)
                .count()
                >= 3
        );
        assert!(
            funcs
                .iter()
                .filter(|f| f.category() == Category::NonseparableUnimodal)
                .count()
                >= 3
        );
    }

    #[test]
    fn x_star_attains_f_star_within_1e9() {
        for d in [2, 4, 7, 10] {
            for f in suite(d).unwrap() {
                let xs = f.x_star().expect("suite functions provide x_star").to_vec();
                let v = f.evaluate(&xs).unwrap();
                assert!(
                    (v - f.f_star()).abs() <= 1e-9,
                    "{} (d={d}): f(x*)={v}, f*={}",
                    f.id(),
                    f.f_star()
                );
            }
        }
    }

    #[test]
    fn regret_is_nonnegative_on_random_probes() {
        let mut chacha = rng::rng_from_seed(99);
        for f in suite(4).unwrap() {
            for _ in 0..20_000 {
                let x: alloc::vec::Vec<f64> = (0..4)
                    .map(|_| -5.0 + 10.0 * rng::uniform01(&mut chacha))
                    .collect();
                let v = f.evaluate(&x).unwrap();
                assert!(
                    v >= f.f_star(),
                    "{}: f({x:?}) = {v} < f* = {}",
                    f.id(),
                    f.f_star()
                );
            }
        }
    }

    #[test]
    fn linear_slope_optimum_sits_at_a_corner() {
        let f = by_id("linear_slope", 4).unwrap();
        let xs = f.x_star().unwrap();
        assert!(xs.iter().all(|v| *v == 5.0 || *v == -5.0));
        assert_eq!(f.evaluate(xs).unwrap(), 0.0);
    }

    #[test]
    fn separable_functions_admit_coordinatewise_grid_minimization() {
        for f in suite(4).unwrap() {
            if f.category() != Category::SeparableUnimodal {
                continue;
            }
            // minimize one coordinate at a time over a 101-point axis grid
            let mut x = [0.5; 4]; // arbitrary in-domain start
            for j in 0..4 {
                let mut best = f64::INFINITY;
                let mut best_v = x[j];
                for k in 0..=100 {
                    let cand = -5.0 + 0.1 * k as f64;
                    let mut probe = x;
                    probe[j] = cand;
                    let val = f.evaluate(&probe).unwrap();
                    if val < best {
                        best = val;
                        best_v = cand;
                    }
                }
                x[j] = best_v;
            }
            let reached = f.evaluate(&x).unwrap();
            let range = 10.0;
            assert!(
                reached - f.f_star() <= 1e-6 * range,
                "{}: coordinate descent reached {reached}",
                f.id()
            );
        }
    }

    #[test]
    fn out_of_domain_is_an_error_not_a_clamp() {
        let f = by_id("sphere", 2).unwrap();
        assert!(matches!(
            f.evaluate(&[5.1, 0.0]),
            Err(EvalError::OutOfDomain { dim: 0, .. })
        ));
        assert!(matches!(
            f.evaluate(&[0.0]),
            Err(EvalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let a = by_id("gallagher", 4).unwrap();
        let b = by_id("gallagher", 4).unwrap();
        let x = [1.25, -3.5, 0.0, 4.75];
        assert_eq!(a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
        let r1 = by_id("rot_ellipsoid", 4).unwrap().evaluate(&x).unwrap();
        let r2 = by_id("rot_ellipsoid", 4).unwrap().evaluate(&x).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn counting_wrapper_audits_evaluations() {
        let f = by_id("sphere", 2).unwrap();
        let counting = CountingObjective::new(&f);
        for _ in 0..7 {
            counting.evaluate(&[0.5, 0.5]).unwrap();
        }
        assert_eq!(counting.count(), 7);
    }
}
