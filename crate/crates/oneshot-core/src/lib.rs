//! Core algorithms for one-shot decision making experiments: low-discrepancy
//! point sets, exact star-discrepancy computation, benchmark objectives,
//! surrogate regression models, bounded local search, the three one-shot
//! task pipelines, evolutionary design search and result aggregation.
//!
//! The crate is `no_std`-compatible (allocation required); all IO, file
//! formats and the CLI live in the companion `oneshot` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod benchfuncs;
pub mod discrepancy;
pub mod evolve;
pub mod generators;
pub mod localsearch;
pub mod pipelines;
pub mod pointset;
pub mod report;
pub mod rng;
pub mod surrogates;

pub use benchfuncs::{BenchmarkFunction, Category, EvalError, Objective};
pub use discrepancy::DiscrepancyResult;
pub use generators::{GeneratorKind, GeneratorSpec};
pub use pointset::{Bounds, PointSet, Provenance};
