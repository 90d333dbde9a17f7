//! Design generators: plain and generalized (digit-permuted) Halton
//! sequences, Latin Hypercube Samples and i.i.d. uniform samples, plus the
//! exhaustive enumeration of generalized Halton generators and the search
//! for the generator of minimal exact star discrepancy.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::discrepancy::{self, DiscrepancyError, DiscrepancyResult};
use crate::pointset::{Bounds, PointSet, Provenance};
use crate::rng;

/// Which family a generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Halton,
    GeneralizedHalton,
    Lhs,
    Uniform,
    /// Placeholder for sets loaded from files; not generatable.
    File,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GeneratorKind::Halton => "halton",
            GeneratorKind::GeneralizedHalton => "generalized-halton",
            GeneratorKind::Lhs => "lhs",
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::File => "file",
        };
        f.write_str(name)
    }
}

/// Declarative description of how a design is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Prime bases, one per dimension (Halton kinds only). Defaults to the
    /// first `d` primes in increasing order.
    pub bases: Vec<u32>,
    /// Per-base digit permutation, each a bijection on `{0,...,b-1}` fixing 0
    /// (generalized Halton only).
    pub permutations: Vec<Vec<u32>>,
    /// Seed for stochastic kinds.
    pub seed: Option<u64>,
    /// First sequence index used by Halton kinds. Index 0 maps every
    /// coordinate to 0, so generation starts at 1 by default.
    pub start_index: u64,
}

/// Errors raised while validating or running a generator.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorError {
    /// Base must be a prime >= 2.
    InvalidBase(u32),
    /// Permutation is not a bijection fixing 0 for its base.
    InvalidPermutation { base: u32, detail: String },
    /// A stochastic kind was asked to generate without a seed.
    MissingSeed(GeneratorKind),
    /// Bases/permutations do not match the requested dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// n or d out of range.
    InvalidCount(String),
    /// Enumeration refused: the tuple count is astronomically large.
    EnumerationTooLarge { d: usize, estimate: f64 },
    /// The `file` kind cannot generate points.
    NotGeneratable,
    /// Search could not evaluate any candidate.
    EmptySearch,
    /// Exact discrepancy evaluation failed during the search.
    Discrepancy(DiscrepancyError),
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorError::InvalidBase(b) => write!(f, "base {b} is not a prime >= 2"),
            GeneratorError::InvalidPermutation { base, detail } => {
                write!(f, "invalid permutation for base {base}: {detail}")
            }
            GeneratorError::MissingSeed(kind) => {
                write!(f, "generator kind {kind} requires a seed")
            }
            GeneratorError::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} bases/permutations, found {found}")
            }
            GeneratorError::InvalidCount(msg) => write!(f, "{msg}"),
            GeneratorError::EnumerationTooLarge { d, estimate } => write!(
                f,
                "enumeration for d={d} spans ~{estimate:.3e} permutation tuples; refusing (d <= 6 supported, and only d <= 4 is practical)"
            ),
            GeneratorError::NotGeneratable => {
                write!(f, "file-backed specs describe loaded sets and cannot generate points")
            }
            GeneratorError::EmptySearch => write!(f, "search budget exhausted without any evaluation"),
            GeneratorError::Discrepancy(e) => write!(f, "discrepancy evaluation failed: {e}"),
        }
    }
}

impl core::error::Error for GeneratorError {}

/// The first `d` primes in increasing order.
pub fn first_primes(d: usize) -> Vec<u32> {
    let mut primes = Vec::with_capacity(d);
    let mut candidate: u32 = 2;
    while primes.len() < d {
        if is_prime(candidate) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn validate_permutation(base: u32, perm: &[u32]) -> Result<(), GeneratorError> {
    if perm.len() != base as usize {
        return Err(GeneratorError::InvalidPermutation {
            base,
            detail: format!("length {} != base {base}", perm.len()),
        });
    }
    if perm[0] != 0 {
        return Err(GeneratorError::InvalidPermutation {
            base,
            detail: String::from("permutation must fix 0"),
        });
    }
    let mut seen = vec![false; base as usize];
    for &v in perm {
        if v >= base || seen[v as usize] {
            return Err(GeneratorError::InvalidPermutation {
                base,
                detail: format!("value {v} repeated or out of range"),
            });
        }
        seen[v as usize] = true;
    }
    Ok(())
}

impl GeneratorSpec {
    /// Plain Halton sequence over the first `d` primes.
    pub fn halton(d: usize) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Halton,
            bases: first_primes(d),
            permutations: Vec::new(),
            seed: None,
            start_index: 1,
        }
    }

    /// Generalized Halton with explicit digit permutations over the first
    /// `d` primes (one permutation per base, in base order).
    pub fn generalized_halton(permutations: Vec<Vec<u32>>) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::GeneralizedHalton,
            bases: first_primes(permutations.len()),
            permutations,
            seed: None,
            start_index: 1,
        }
    }

    pub fn lhs(seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Lhs,
            bases: Vec::new(),
            permutations: Vec::new(),
            seed: Some(seed),
            start_index: 1,
        }
    }

    pub fn uniform(seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Uniform,
            bases: Vec::new(),
            permutations: Vec::new(),
            seed: Some(seed),
            start_index: 1,
        }
    }

    pub fn with_start_index(mut self, start_index: u64) -> Self {
        self.start_index = start_index;
        self
    }

    pub fn with_bases(mut self, bases: Vec<u32>) -> Self {
        self.bases = bases;
        self
    }

    /// Canonical single-line description used in provenance and file headers.
    pub fn describe(&self) -> String {
        match self.kind {
            GeneratorKind::Halton => format!(
                "halton(bases={};start={})",
                join_u32(&self.bases),
                self.start_index
            ),
            GeneratorKind::GeneralizedHalton => {
                let perms: Vec<String> = self
                    .permutations
                    .iter()
                    .map(|p| join_u32(p).replace(',', "."))
                    .collect();
                format!(
                    "generalized-halton(bases={};perms={};start={})",
                    join_u32(&self.bases),
                    perms.join("|"),
                    self.start_index
                )
            }
            GeneratorKind::Lhs => String::from("lhs"),
            GeneratorKind::Uniform => String::from("uniform"),
            GeneratorKind::File => String::from("file"),
        }
    }

    fn validate(&self, d: usize) -> Result<(), GeneratorError> {
        match self.kind {
            GeneratorKind::Halton | GeneratorKind::GeneralizedHalton => {
                if self.bases.len() != d {
                    return Err(GeneratorError::DimensionMismatch {
                        expected: d,
                        found: self.bases.len(),
                    });
                }
                for &b in &self.bases {
                    if !is_prime(b) {
                        return Err(GeneratorError::InvalidBase(b));
                    }
                }
                if self.kind == GeneratorKind::GeneralizedHalton {
                    if self.permutations.len() != d {
                        return Err(GeneratorError::DimensionMismatch {
                            expected: d,
                            found: self.permutations.len(),
                        });
                    }
                    for (b, p) in self.bases.iter().zip(&self.permutations) {
                        validate_permutation(*b, p)?;
                    }
                }
                if self.start_index == 0 {
                    return Err(GeneratorError::InvalidCount(String::from(
                        "start_index must be >= 1",
                    )));
                }
                Ok(())
            }
            GeneratorKind::Lhs | GeneratorKind::Uniform => {
                if self.seed.is_none() {
                    return Err(GeneratorError::MissingSeed(self.kind));
                }
                Ok(())
            }
            GeneratorKind::File => Err(GeneratorError::NotGeneratable),
        }
    }
}

fn join_u32(values: &[u32]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    parts.join(",")
}

/// Radical inverse of `index` in base `base` with an optional digit
/// permutation: writes `index` as digits `d_0 d_1 ...` (least significant
/// first) and returns `sum perm(d_k) * base^{-k-1}`.
pub fn radical_inverse(index: u64, base: u32, perm: Option<&[u32]>) -> Result<f64, GeneratorError> {
    if base < 2 {
        return Err(GeneratorError::InvalidBase(base));
    }
    if let Some(p) = perm {
        validate_permutation(base, p)?;
    }
    let b = u64::from(base);
    let mut remaining = index;
    let mut inv_scale = 1.0 / b as f64;
    let mut value = 0.0;
    while remaining > 0 {
        let digit = (remaining % b) as usize;
        let mapped = match perm {
            Some(p) => u64::from(p[digit]),
            None => digit as u64,
        };
        value += mapped as f64 * inv_scale;
        inv_scale /= b as f64;
        remaining /= b;
    }
    Ok(value)
}

/// Generates `n` points of dimension `d` in the unit cube from `spec`.
///
/// Pure function of `(spec, n, d)`: identical arguments yield bitwise
/// identical point sets.
pub fn generate(spec: &GeneratorSpec, n: usize, d: usize) -> Result<PointSet, GeneratorError> {
    if n == 0 || d == 0 {
        return Err(GeneratorError::InvalidCount(String::from(
            "n and d must be >= 1",
        )));
    }
    spec.validate(d)?;
    let mut coords = Vec::with_capacity(n * d);
    match spec.kind {
        GeneratorKind::Halton | GeneratorKind::GeneralizedHalton => {
            for i in 0..n {
                let index = spec.start_index + i as u64;
                for j in 0..d {
                    let perm = if spec.kind == GeneratorKind::GeneralizedHalton {
                        Some(spec.permutations[j].as_slice())
                    } else {
                        None
                    };
                    coords.push(radical_inverse(index, spec.bases[j], perm)?);
                }
            }
        }
        GeneratorKind::Lhs => {
            let mut chacha = rng::rng_from_seed(spec.seed.unwrap());
            // Column-major construction: per dimension, a shuffled stratum
            // assignment plus uniform jitter inside each stratum.
            let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
            for _ in 0..d {
                let mut strata: Vec<usize> = (0..n).collect();
                rng::shuffle(&mut chacha, &mut strata);
                let column: Vec<f64> = strata
                    .into_iter()
                    .map(|k| (k as f64 + rng::uniform01(&mut chacha)) / n as f64)
                    .collect();
                columns.push(column);
            }
            for i in 0..n {
                for column in &columns {
                    coords.push(column[i]);
                }
            }
        }
        GeneratorKind::Uniform => {
            let mut chacha = rng::rng_from_seed(spec.seed.unwrap());
            for _ in 0..n * d {
                coords.push(rng::uniform01(&mut chacha));
            }
        }
        GeneratorKind::File => unreachable!("rejected by validate"),
    }
    let id = format!("{}-n{}-d{}", spec.kind, n, d);
    let ps = PointSet::new(
        coords,
        d,
        Bounds::unit(d),
        Provenance {
            generator: spec.describe(),
            seed: spec.seed,
        },
        id,
    )
    .expect("generated coordinates lie in [0,1)");
    Ok(ps)
}

/// True iff every 1-D projection of the unit-cube set hits each stratum
/// `[k/n, (k+1)/n)` exactly once.
pub fn is_latin_hypercube(ps: &PointSet) -> bool {
    let n = ps.len();
    for j in 0..ps.dim() {
        let mut seen = vec![false; n];
        for i in 0..n {
            let stratum = (ps.coord(i, j) * n as f64) as usize;
            if stratum >= n || seen[stratum] {
                return false;
            }
            seen[stratum] = true;
        }
    }
    true
}

/// Number of generalized Halton generators for dimension `d`:
/// the product over the first `d` prime bases of `(b-1)!`.
pub fn generalized_halton_count(d: usize) -> f64 {
    first_primes(d)
        .iter()
        .map(|&b| factorial_f64(b - 1))
        .product()
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(f64::from).product::<f64>().max(1.0)
}

/// Lazily yields every tuple of per-base digit permutations fixing 0 over
/// the first `d` primes, in lexicographic order.
pub fn enumerate_generalized_halton(
    d: usize,
) -> Result<GeneralizedHaltonEnumeration, GeneratorError> {
    if d == 0 {
        return Err(GeneratorError::InvalidCount(String::from("d must be >= 1")));
    }
    if d > 6 {
        return Err(GeneratorError::EnumerationTooLarge {
            d,
            estimate: generalized_halton_count(d),
        });
    }
    let bases = first_primes(d);
    let per_base: Vec<Vec<Vec<u32>>> = bases.iter().map(|&b| permutations_fixing_zero(b)).collect();
    Ok(GeneralizedHaltonEnumeration {
        per_base,
        odometer: vec![0; d],
        exhausted: false,
    })
}

/// All permutations of `{0,...,b-1}` fixing 0, in lexicographic order.
fn permutations_fixing_zero(base: u32) -> Vec<Vec<u32>> {
    let tail: Vec<u32> = (1..base).collect();
    let mut result = Vec::new();
    let mut current = tail.clone();
    loop {
        let mut perm = Vec::with_capacity(base as usize);
        perm.push(0);
        perm.extend_from_slice(&current);
        result.push(perm);
        if !next_permutation(&mut current) {
            break;
        }
    }
    result
}

/// Steps `items` to its next lexicographic permutation; false at the last one.
fn next_permutation(items: &mut [u32]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// Iterator over all per-base permutation tuples (see
/// [`enumerate_generalized_halton`]).
#[derive(Debug)]
pub struct GeneralizedHaltonEnumeration {
    per_base: Vec<Vec<Vec<u32>>>,
    odometer: Vec<usize>,
    exhausted: bool,
}

impl Iterator for GeneralizedHaltonEnumeration {
    type Item = Vec<Vec<u32>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        let tuple: Vec<Vec<u32>> = self
            .per_base
            .iter()
            .zip(&self.odometer)
            .map(|(perms, &idx)| perms[idx].clone())
            .collect();
        // Advance the odometer, least significant position last.
        let mut pos = self.odometer.len();
        loop {
            if pos == 0 {
                self.exhausted = true;
                break;
            }
            pos -= 1;
            self.odometer[pos] += 1;
            if self.odometer[pos] < self.per_base[pos].len() {
                break;
            }
            self.odometer[pos] = 0;
        }
        Some(tuple)
    }
}

/// Budget for [`search_best_generator`]: evaluate all tuples or only a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchBudget {
    All,
    First(u64),
}

/// Exhaustively searches generalized Halton generators for the one whose
/// `n`-point design has minimal exact star discrepancy.
///
/// With `SearchBudget::All` this is the full enumeration; a finite budget
/// evaluates only the first `k` tuples. The full search at n=125, d=4 runs
/// for many hours and is exposed for completeness rather than routine use.
pub fn search_best_generator(
    n: usize,
    d: usize,
    budget: SearchBudget,
) -> Result<(GeneratorSpec, DiscrepancyResult), GeneratorError> {
    let limit = match budget {
        SearchBudget::All => u64::MAX,
        SearchBudget::First(k) => k,
    };
    let mut best: Option<(GeneratorSpec, DiscrepancyResult)> = None;
    for (count, perms) in enumerate_generalized_halton(d)?.enumerate() {
        if (count as u64) >= limit {
            break;
        }
        let spec = GeneratorSpec::generalized_halton(perms);
        let ps = generate(&spec, n, d)?;
        let result = discrepancy::star_discrepancy_exact(&ps).map_err(GeneratorError::Discrepancy)?;
        let better = match &best {
            None => true,
            Some((_, incumbent)) => result.value < incumbent.value,
        };
        if better {
            best = Some((spec, result));
        }
    }
    best.ok_or(GeneratorError::EmptySearch)
}
