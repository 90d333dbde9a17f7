//! Exact star-discrepancy computation on the critical grid, a randomized
//! certified lower bound for large instances, and the overhead table
//! comparing several designs.
//!
//! The star discrepancy of a unit-cube point set is the supremum over
//! origin-anchored boxes `[0,y]` of the absolute difference between the box
//! volume and the fraction of points it contains. The supremum is attained
//! on the critical grid built from point coordinates plus 1.0, taking the
//! closed count on one side and the open count on the other:
//!
//! `D*(X) = max_y max( closed(y)/n - V_y , V_y - open(y)/n )`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::pointset::PointSet;
use crate::rng;

/// Default cap on the number of critical-grid cells the exact enumeration
/// may visit (126^4 for an n=125, d=4 design is ~2.5e8 and fits).
pub const DEFAULT_CELL_BUDGET: u64 = 500_000_000;

/// Outcome of a discrepancy computation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    /// The discrepancy value (exact) or a certified lower bound.
    pub value: f64,
    /// True iff produced by exact enumeration.
    pub exact: bool,
    /// Anchored-box corner attaining (exact) or certifying (bound) `value`.
    pub witness_box: Vec<f64>,
    /// Points strictly inside the witness box (componentwise `<`).
    pub point_count_open: usize,
    /// Points inside the closed witness box (componentwise `<=`).
    pub point_count_closed: usize,
}

/// Errors raised by discrepancy operations.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscrepancyError {
    /// Points must live in the unit cube.
    NotUnitCube,
    /// Exact enumeration would visit more cells than the budget allows.
    BudgetExceeded { cells: f64, budget: u64 },
    /// Invalid parameter (e.g. zero trials).
    InvalidParameter(String),
    /// Designs with mixed (n, d) cannot be compared.
    MixedShapes(String),
}

impl fmt::Display for DiscrepancyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscrepancyError::NotUnitCube => {
                write!(f, "star discrepancy requires points in the unit cube [0,1]^d")
            }
            DiscrepancyError::BudgetExceeded { cells, budget } => write!(
                f,
                "exact enumeration needs ~{cells:.3e} grid cells, above the budget of {budget}; \
                 use star_discrepancy_lower_bound instead"
            ),
            DiscrepancyError::InvalidParameter(msg) => write!(f, "{msg}"),
            DiscrepancyError::MixedShapes(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for DiscrepancyError {}

/// Local discrepancy data of one anchored box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDiscrepancy {
    pub volume: f64,
    pub count_closed: usize,
    pub count_open: usize,
    /// `max(closed/n - volume, volume - open/n)`.
    pub value: f64,
}

/// Evaluates the local discrepancy of the anchored box `[0, y]` directly.
pub fn local_discrepancy(ps: &PointSet, y: &[f64]) -> LocalDiscrepancy {
    let n = ps.len() as f64;
    let mut closed = 0usize;
    let mut open = 0usize;
    for p in ps.iter_points() {
        let mut inside_closed = true;
        let mut inside_open = true;
        for (v, yj) in p.iter().zip(y) {
            if *v > *yj {
                inside_closed = false;
                inside_open = false;
                break;
            }
            if *v == *yj {
                inside_open = false;
            }
        }
        if inside_closed {
            closed += 1;
        }
        if inside_open {
            open += 1;
        }
    }
    let volume: f64 = y.iter().product();
    let value = (closed as f64 / n - volume).max(volume - open as f64 / n);
    LocalDiscrepancy {
        volume,
        count_closed: closed,
        count_open: open,
        value,
    }
}

/// Sorted deduplicated critical values per dimension: point coordinates plus 1.0.
fn critical_grids(ps: &PointSet) -> Vec<Vec<f64>> {
    let d = ps.dim();
    let mut grids = Vec::with_capacity(d);
    for j in 0..d {
        let mut values: Vec<f64> = (0..ps.len()).map(|i| ps.coord(i, j)).collect();
        values.push(1.0);
        values.sort_unstable_by(f64::total_cmp);
        values.dedup();
        grids.push(values);
    }
    grids
}

#[derive(Clone, Copy)]
struct Entry {
    idx: u32,
    strict: bool,
}

struct Traversal<'a> {
    ps: &'a PointSet,
    grids: &'a [Vec<f64>],
    inv_n: f64,
    // One scratch state per recursion level; entries stay sorted by the
    // last dimension's coordinate because filtering preserves order.
    levels: Vec<Vec<Entry>>,
    prefix: Vec<f64>,
    best_value: f64,
    best_witness: Vec<f64>,
    best_closed: usize,
    best_open: usize,
}

impl<'a> Traversal<'a> {
    /// Visits grid values of dimension `level` in ascending order, filtering
    /// the parent state; leaves are handled by a two-pointer sweep.
    fn descend(&mut self, level: usize) {
        let d = self.ps.dim();
        if level == d - 1 {
            self.sweep_leaf(level);
            return;
        }
        for gi in 0..self.grids[level].len() {
            let g = self.grids[level][gi];
            self.prefix[level] = g;
            // Build child state from the parent's entries.
            let (parents, children) = {
                let (a, b) = self.levels.split_at_mut(level + 1);
                (&a[level], &mut b[0])
            };
            children.clear();
            for e in parents.iter() {
                let c = self.ps.coord(e.idx as usize, level);
                if c <= g {
                    children.push(Entry {
                        idx: e.idx,
                        strict: e.strict && c < g,
                    });
                }
            }
            self.descend(level + 1);
        }
    }

    fn sweep_leaf(&mut self, level: usize) {
        let state = core::mem::take(&mut self.levels[level]);
        let vol_prefix: f64 = self.prefix[..level].iter().product();
        let grid = self.grids[level].as_slice();
        let mut closed_ptr = 0usize;
        let mut open_ptr = 0usize;
        let mut open_strict = 0usize; // strict entries among the first open_ptr
        for &g in grid {
            while open_ptr < state.len() && self.ps.coord(state[open_ptr].idx as usize, level) < g {
                if state[open_ptr].strict {
                    open_strict += 1;
                }
                open_ptr += 1;
            }
            while closed_ptr < state.len()
                && self.ps.coord(state[closed_ptr].idx as usize, level) <= g
            {
                closed_ptr += 1;
            }
            let volume = vol_prefix * g;
            let local = (closed_ptr as f64 * self.inv_n - volume)
                .max(volume - open_strict as f64 * self.inv_n);
            if local > self.best_value {
                self.best_value = local;
                self.prefix[level] = g;
                self.best_witness.copy_from_slice(&self.prefix);
                self.best_closed = closed_ptr;
                self.best_open = open_strict;
            }
        }
        self.levels[level] = state;
    }
}

/// Computes the exact star discrepancy with the default work budget.
pub fn star_discrepancy_exact(ps: &PointSet) -> Result<DiscrepancyResult, DiscrepancyError> {
    star_discrepancy_exact_with_budget(ps, DEFAULT_CELL_BUDGET)
}

/// Computes the exact star discrepancy, refusing if the critical grid holds
/// more than `budget` cells.
///
/// The traversal is dimension-recursive with incremental open/closed counts;
/// ties between witness boxes are broken toward the lexicographically
/// smallest corner.
pub fn star_discrepancy_exact_with_budget(
    ps: &PointSet,
    budget: u64,
) -> Result<DiscrepancyResult, DiscrepancyError> {
    if !ps.domain().is_unit() {
        return Err(DiscrepancyError::NotUnitCube);
    }
    let grids = critical_grids(ps);
    let cells: f64 = grids.iter().map(|g| g.len() as f64).product();
    if cells > budget as f64 {
        return Err(DiscrepancyError::BudgetExceeded { cells, budget });
    }
    let d = ps.dim();
    let n = ps.len();
    // Root state: all points ordered by the last coordinate.
    let mut root: Vec<Entry> = (0..n as u32).map(|idx| Entry { idx, strict: true }).collect();
    root.sort_by(|a, b| {
        ps.coord(a.idx as usize, d - 1)
            .total_cmp(&ps.coord(b.idx as usize, d - 1))
    });
    let mut levels = vec![Vec::new(); d];
    for level in &mut levels[1..] {
        level.reserve(n);
    }
    levels[0] = root;
    let mut traversal = Traversal {
        ps,
        grids: &grids,
        inv_n: 1.0 / n as f64,
        levels,
        prefix: vec![0.0; d],
        best_value: f64::NEG_INFINITY,
        best_witness: vec![0.0; d],
        best_closed: 0,
        best_open: 0,
    };
    traversal.descend(0);
    Ok(DiscrepancyResult {
        value: traversal.best_value,
        exact: true,
        witness_box: traversal.best_witness,
        point_count_open: traversal.best_open,
        point_count_closed: traversal.best_closed,
    })
}

/// Certified lower bound on the star discrepancy from randomized box
/// sampling with corner snapping to the critical grid.
///
/// Each trial draws a uniform corner, snaps it down and up onto critical
/// values per dimension, and evaluates both local discrepancies at the two
/// snapped boxes; the best value found is returned. Deterministic in
/// `(trials, seed)`.
pub fn star_discrepancy_lower_bound(
    ps: &PointSet,
    trials: usize,
    seed: u64,
) -> Result<DiscrepancyResult, DiscrepancyError> {
    if !ps.domain().is_unit() {
        return Err(DiscrepancyError::NotUnitCube);
    }
    if trials == 0 {
        return Err(DiscrepancyError::InvalidParameter(String::from(
            "trials must be >= 1",
        )));
    }
    let d = ps.dim();
    let grids = critical_grids(ps);
    let mut chacha = rng::rng_from_seed(seed);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_witness = vec![0.0; d];
    let mut best = LocalDiscrepancy {
        volume: 0.0,
        count_closed: 0,
        count_open: 0,
        value: f64::NEG_INFINITY,
    };
    let mut down = vec![0.0; d];
    let mut up = vec![0.0; d];
    for _ in 0..trials {
        for j in 0..d {
            let y = rng::uniform01(&mut chacha);
            let grid = &grids[j];
            // First critical value >= y.
            let pos = grid.partition_point(|v| *v < y);
            up[j] = grid[pos.min(grid.len() - 1)];
            // Largest critical value <= y; 0.0 when below every point.
            down[j] = if pos == 0 { 0.0 } else { grid[pos - 1] };
        }
        for corner in [&down, &up] {
            let local = local_discrepancy(ps, corner);
            if local.value > best_value {
                best_value = local.value;
                best_witness.copy_from_slice(corner);
                best = local;
            }
        }
    }
    Ok(DiscrepancyResult {
        value: best_value,
        exact: false,
        witness_box: best_witness,
        point_count_open: best.count_open,
        point_count_closed: best.count_closed,
    })
}

/// How a discrepancy value should be obtained for table rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyMethod {
    Exact { budget: u64 },
    LowerBound { trials: usize, seed: u64 },
}

/// One row of the overhead comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadRow {
    pub name: String,
    pub value: f64,
    /// `100 * (value / best - 1)`; 0 for the best design.
    pub overhead_pct: f64,
    pub best: bool,
}

/// Computes discrepancy values for named designs of identical shape and the
/// relative overhead of each against the best one.
pub fn overhead_table(
    designs: &[(String, &PointSet)],
    method: DiscrepancyMethod,
) -> Result<Vec<OverheadRow>, DiscrepancyError> {
    if designs.len() < 2 {
        return Err(DiscrepancyError::InvalidParameter(String::from(
            "overhead table needs at least 2 designs",
        )));
    }
    let (n0, d0) = (designs[0].1.len(), designs[0].1.dim());
    for (name, ps) in designs {
        if ps.len() != n0 || ps.dim() != d0 {
            return Err(DiscrepancyError::MixedShapes(alloc::format!(
                "design {name} has shape ({}, {}), expected ({n0}, {d0})",
                ps.len(),
                ps.dim()
            )));
        }
    }
    let mut values = Vec::with_capacity(designs.len());
    for (name, ps) in designs {
        let result = match method {
            DiscrepancyMethod::Exact { budget } => star_discrepancy_exact_with_budget(ps, budget)?,
            DiscrepancyMethod::LowerBound { trials, seed } => {
                star_discrepancy_lower_bound(ps, trials, seed)?
            }
        };
        values.push((name.clone(), result.value));
    }
    overhead_from_values(&values)
}

/// Overhead rows from precomputed (name, value) pairs.
pub fn overhead_from_values(
    values: &[(String, f64)],
) -> Result<Vec<OverheadRow>, DiscrepancyError> {
    if values.len() < 2 {
        return Err(DiscrepancyError::InvalidParameter(String::from(
            "overhead table needs at least 2 designs",
        )));
    }
    let min = values
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    Ok(values
        .iter()
        .map(|(name, v)| OverheadRow {
            name: name.clone(),
            value: *v,
            overhead_pct: if *v == min { 0.0 } else { 100.0 * (v / min - 1.0) },
            best: *v == min,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, GeneratorSpec};
    use crate::pointset::{Bounds, PointSet, Provenance};
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn unit_set(rows: &[Vec<f64>]) -> PointSet {
        PointSet::from_rows(
            rows,
            Bounds::unit(rows[0].len()),
            Provenance::default(),
            String::from("test"),
        )
        .unwrap()
    }

    /// Independent oracle: supremum of |V_y - closed(y)/n| over a uniform
    /// grid of anchored-box corners. Intentionally naive.
    fn brute_force_grid_supremum(ps: &PointSet, grid_per_axis: usize) -> f64 {
        let d = ps.dim();
        let n = ps.len() as f64;
        let mut best = 0.0f64;
        let mut indices = vec![1usize; d];
        loop {
            let y: Vec<f64> = indices
                .iter()
                .map(|&k| k as f64 / grid_per_axis as f64)
                .collect();
            let volume: f64 = y.iter().product();
            let closed = ps
                .iter_points()
                .filter(|p| p.iter().zip(&y).all(|(v, yj)| v <= yj))
                .count() as f64;
            best = best.max((volume - closed / n).abs());
            // odometer over {1..grid} per axis
            let mut pos = 0;
            loop {
                if pos == d {
                    return best;
                }
                indices[pos] += 1;
                if indices[pos] <= grid_per_axis {
                    break;
                }
                indices[pos] = 1;
                pos += 1;
            }
        }
    }

    #[test]
    fn single_point_at_half_has_discrepancy_half() {
        let ps = unit_set(&[vec![0.5]]);
        let r = star_discrepancy_exact(&ps).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        // witness just below 0.5 is represented by the open count at y=0.5
        assert_eq!(r.witness_box, vec![0.5]);
        assert_eq!(r.point_count_open, 0);
        assert_eq!(r.point_count_closed, 1);
    }

    #[test]
    fn two_midpoints_have_discrepancy_quarter() {
        let ps = unit_set(&[vec![0.25], vec![0.75]]);
        let r = star_discrepancy_exact(&ps).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn midpoint_designs_are_exactly_one_over_two_n() {
        for n in 1..=64usize {
            let rows: Vec<Vec<f64>> = (1..=n)
                .map(|i| vec![(2 * i - 1) as f64 / (2 * n) as f64])
                .collect();
            let ps = unit_set(&rows);
            let r = star_discrepancy_exact(&ps).unwrap();
            assert!(
                (r.value - 1.0 / (2 * n) as f64).abs() <= 1e-12,
                "n={n}: got {}",
                r.value
            );
        }
    }

    #[test]
    fn exact_matches_brute_force_oracle_on_random_sets() {
        let mut chacha = rng::rng_from_seed(2024);
        for _ in 0..25 {
            let n = 1 + (rng::next_below(&mut chacha, 16)) as usize;
            let d = 1 + (rng::next_below(&mut chacha, 2)) as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng::uniform01(&mut chacha)).collect())
                .collect();
            let ps = unit_set(&rows);
            let exact = star_discrepancy_exact(&ps).unwrap().value;
            let oracle = brute_force_grid_supremum(&ps, 400);
            assert!(
                (exact - oracle).abs() <= 2.0 / 400.0,
                "exact {exact} vs oracle {oracle} (n={n}, d={d})"
            );
            assert!(exact >= oracle - 1e-12, "oracle may not exceed the exact sup");
        }
    }

    #[test]
    fn witness_box_reproduces_value() {
        let ps = generators::generate(&GeneratorSpec::halton(3), 64, 3).unwrap();
        let r = star_discrepancy_exact(&ps).unwrap();
        let local = local_discrepancy(&ps, &r.witness_box);
        assert!((local.value - r.value).abs() <= 1e-12);
        assert_eq!(local.count_closed, r.point_count_closed);
        assert_eq!(local.count_open, r.point_count_open);
    }

    #[test]
    fn exact_value_is_invariant_under_axis_permutation() {
        let ps = generators::generate(&GeneratorSpec::uniform(5), 40, 3).unwrap();
        let swapped: Vec<Vec<f64>> = ps
            .iter_points()
            .map(|p| vec![p[2], p[0], p[1]])
            .collect();
        let ps2 = unit_set(&swapped);
        let a = star_discrepancy_exact(&ps).unwrap().value;
        let b = star_discrepancy_exact(&ps2).unwrap().value;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn budget_refusal_suggests_lower_bound() {
        let ps = generators::generate(&GeneratorSpec::uniform(1), 100, 4).unwrap();
        match star_discrepancy_exact_with_budget(&ps, 1000) {
            Err(DiscrepancyError::BudgetExceeded { cells, budget: 1000 }) => {
                assert!(cells > 1000.0);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn lower_bound_finds_midpoint_witness() {
        let ps = unit_set(&[vec![0.25], vec![0.75]]);
        let r = star_discrepancy_lower_bound(&ps, 10_000, 7).unwrap();
        assert!((r.value - 0.25).abs() <= 1e-9);
        assert!(!r.exact);
    }

    #[test]
    fn lower_bound_is_deterministic() {
        let ps = generators::generate(&GeneratorSpec::uniform(9), 50, 3).unwrap();
        let a = star_discrepancy_lower_bound(&ps, 1, 3).unwrap();
        let b = star_discrepancy_lower_bound(&ps, 1, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lower_bound_rejects_zero_trials() {
        let ps = unit_set(&[vec![0.5]]);
        assert!(star_discrepancy_lower_bound(&ps, 0, 1).is_err());
    }

    #[test]
    fn overhead_matches_reported_percentages() {
        // 0.0627 / 0.056 - 1 = 11.96..% (reported as 12%)
        let rows =
            overhead_from_values(&[("best".to_string(), 0.056), ("bw".to_string(), 0.0627)])
                .unwrap();
        assert_eq!(rows[0].overhead_pct, 0.0);
        assert!(rows[0].best);
        assert!((rows[1].overhead_pct - 11.9642857).abs() < 1e-6);

        // 0.0272 / 0.013 - 1 = 109.2..%
        let rows =
            overhead_from_values(&[("best".to_string(), 0.013), ("lhs".to_string(), 0.0272)])
                .unwrap();
        assert!((rows[1].overhead_pct - 109.2307692).abs() < 1e-6);
    }

    #[test]
    fn overhead_of_identical_designs_is_zero() {
        let ps = generators::generate(&GeneratorSpec::halton(2), 16, 2).unwrap();
        let rows = overhead_table(
            &[("a".to_string(), &ps), ("b".to_string(), &ps)],
            DiscrepancyMethod::Exact {
                budget: DEFAULT_CELL_BUDGET,
            },
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.overhead_pct == 0.0));
    }

    #[test]
    fn overhead_rejects_mixed_shapes() {
        let a = generators::generate(&GeneratorSpec::halton(2), 16, 2).unwrap();
        let b = generators::generate(&GeneratorSpec::halton(2), 8, 2).unwrap();
        assert!(matches!(
            overhead_table(
                &[("a".to_string(), &a), ("b".to_string(), &b)],
                DiscrepancyMethod::Exact {
                    budget: DEFAULT_CELL_BUDGET
                }
            ),
            Err(DiscrepancyError::MixedShapes(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn lower_bound_never_exceeds_exact(
            coords in proptest::collection::vec(0.0f64..1.0, 2..30),
            trials in 1usize..200,
            seed in 0u64..1000,
        ) {
            let d = 2;
            let n = coords.len() / d;
            prop_assume!(n >= 1);
            let rows: Vec<Vec<f64>> = coords[..n * d].chunks(d).map(|c| c.to_vec()).collect();
            let ps = unit_set(&rows);
            let exact = star_discrepancy_exact(&ps).unwrap().value;
            let bound = star_discrepancy_lower_bound(&ps, trials, seed).unwrap().value;
            prop_assert!(bound <= exact + 1e-12, "bound {bound} exceeds exact {exact}");
        }
    }
}
