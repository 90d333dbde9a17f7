//! Point-set representation, box domains and affine rescaling.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Closed axis-aligned box `[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Errors raised by point-set construction and rescaling.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSetError {
    /// Lower/upper vectors empty, unequal length, or lower[i] >= upper[i].
    InvalidBounds(String),
    /// A point's dimension disagrees with the set's dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// The set is empty.
    Empty,
    /// A coordinate falls outside the declared domain.
    OutOfDomain { point: usize, dim: usize, value: f64 },
    /// Operation requires a unit-cube domain.
    NotUnitCube,
}

impl fmt::Display for PointSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSetError::InvalidBounds(msg) => write!(f, "invalid bounds: {msg}"),
            PointSetError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            PointSetError::Empty => write!(f, "point set must contain at least one point"),
            PointSetError::OutOfDomain { point, dim, value } => write!(
                f,
                "coordinate {value} of point {point} (dimension {dim}) lies outside the domain"
            ),
            PointSetError::NotUnitCube => {
                write!(f, "operation requires points in the unit cube [0,1]^d")
            }
        }
    }
}

impl core::error::Error for PointSetError {}

impl Bounds {
    /// Builds a box from per-dimension lower and upper bounds.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, PointSetError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(PointSetError::InvalidBounds(String::from(
                "lower and upper must be non-empty and of equal length",
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(PointSetError::InvalidBounds(alloc::format!(
                    "dimension {i}: require finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        Bounds {
            lower: alloc::vec![0.0; d],
            upper: alloc::vec![1.0; d],
        }
    }

    /// The symmetric box `[-half, half]^d`, e.g. `[-5,5]^d` for `half = 5`.
    pub fn symmetric(d: usize, half: f64) -> Self {
        Bounds {
            lower: alloc::vec![-half; d],
            upper: alloc::vec![half; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Width of dimension `j`.
    pub fn range(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    /// Euclidean length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// True iff `x` lies inside the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Clamps `x` componentwise onto the box.
    pub fn project(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            if *v < *lo {
                *v = *lo;
            } else if *v > *hi {
                *v = *hi;
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        self.lower.iter().all(|&v| v == 0.0) && self.upper.iter().all(|&v| v == 1.0)
    }
}

/// How a point set came to be: a generator description plus the seed used.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    /// Canonical generator description, e.g. `halton(bases=2,3,5,7;start=1)`.
    pub generator: String,
    pub seed: Option<u64>,
}

/// An `n x d` collection of points with its domain and provenance.
///
/// Immutable after construction; all transforming operations return a new
/// set, so values can be shared freely across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>, // row-major, point-contiguous
    n: usize,
    d: usize,
    domain: Bounds,
    provenance: Provenance,
    id: String,
}

impl PointSet {
    /// Builds a set from row-major coordinates, validating every invariant.
    pub fn new(
        coords: Vec<f64>,
        d: usize,
        domain: Bounds,
        provenance: Provenance,
        id: String,
    ) -> Result<Self, PointSetError> {
        if d == 0 || coords.is_empty() {
            return Err(PointSetError::Empty);
        }
        if coords.len() % d != 0 {
            return Err(PointSetError::DimensionMismatch {
                expected: d,
                found: coords.len() % d,
            });
        }
        if domain.dim() != d {
            return Err(PointSetError::DimensionMismatch {
                expected: d,
                found: domain.dim(),
            });
        }
        let n = coords.len() / d;
        for (i, row) in coords.chunks_exact(d).enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !(*v >= domain.lower()[j] && *v <= domain.upper()[j]) {
                    return Err(PointSetError::OutOfDomain {
                        point: i,
                        dim: j,
                        value: *v,
                    });
                }
            }
        }
        Ok(PointSet {
            coords,
            n,
            d,
            domain,
            provenance,
            id,
        })
    }

    /// Builds a set from per-point rows.
    pub fn from_rows(
        rows: &[Vec<f64>],
        domain: Bounds,
        provenance: Provenance,
        id: String,
    ) -> Result<Self, PointSetError> {
        if rows.is_empty() {
            return Err(PointSetError::Empty);
        }
        let d = rows[0].len();
        for row in rows {
            if row.len() != d {
                return Err(PointSetError::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            coords.extend_from_slice(row);
        }
        PointSet::new(coords, d, domain, provenance, id)
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

    pub fn domain(&self) -> &Bounds {
        &self.domain
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.coords[i * self.d + j]
    }

    /// Row-major coordinate storage.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn with_id(mut self, id: String) -> Self {
        self.id = id;
        self
    }

    /// 64-bit FNV-1a digest over shape and raw coordinate bits; used for
    /// fitness caching and pairing assertions.
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
        for c in &self.coords {
            eat(c.to_bits());
        }
        h
    }

    /// Affinely maps a unit-cube set onto `target`: `c -> lower + c*(upper-lower)`.
    ///
    /// Provenance and id are preserved; only the coordinates and domain change.
    pub fn scale(&self, target: &Bounds) -> Result<PointSet, PointSetError> {
        if !self.domain.is_unit() {
            return Err(PointSetError::NotUnitCube);
        }
        if target.dim() != self.d {
            return Err(PointSetError::DimensionMismatch {
                expected: self.d,
                found: target.dim(),
            });
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for row in self.coords.chunks_exact(self.d) {
            for (j, c) in row.iter().enumerate() {
                coords.push(target.lower()[j] + c * (target.upper()[j] - target.lower()[j]));
            }
        }
        Ok(PointSet {
            coords,
            n: self.n,
            d: self.d,
            domain: target.clone(),
            provenance: self.provenance.clone(),
            id: self.id.clone(),
        })
    }

    /// Inverse of [`scale`](Self::scale): maps the set back onto the unit cube.
    pub fn to_unit(&self) -> PointSet {
        let dom = &self.domain;
        let mut coords = Vec::with_capacity(self.coords.len());
        for row in self.coords.chunks_exact(self.d) {
            for (j, c) in row.iter().enumerate() {
                let unit = (c - dom.lower()[j]) / (dom.upper()[j] - dom.lower()[j]);
                coords.push(unit.clamp(0.0, 1.0));
            }
        }
        PointSet {
            coords,
            n: self.n,
            d: self.d,
            domain: Bounds::unit(self.d),
            provenance: self.provenance.clone(),
            id: self.id.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    #[test]
    fn scale_midpoint_of_unit_cube_hits_box_center() {
        let ps = unit_set(&[alloc::vec![0.5, 0.5, 0.5, 0.5]]);
        let scaled = ps.scale(&Bounds::symmetric(4, 5.0)).unwrap();
        assert_eq!(scaled.point(0), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn scale_endpoints_map_to_bounds() {
        let ps = unit_set(&[alloc::vec![0.0, 1.0]]);
        let scaled = ps.scale(&Bounds::symmetric(2, 5.0)).unwrap();
        assert_eq!(scaled.point(0), &[-5.0, 5.0]);
    }

    #[test]
    fn scale_quarter_point_by_hand() {
        // 2 + 0.25 * 4 = 3
        let ps = unit_set(&[alloc::vec![0.25]]);
        let scaled = ps
            .scale(&Bounds::new(alloc::vec![2.0], alloc::vec![6.0]).unwrap())
            .unwrap();
        assert_eq!(scaled.point(0), &[3.0]);
    }

    #[test]
    fn scale_rejects_dimension_mismatch() {
        let ps = unit_set(&[alloc::vec![0.5, 0.5]]);
        let err = ps.scale(&Bounds::symmetric(3, 5.0)).unwrap_err();
        assert!(matches!(err, PointSetError::DimensionMismatch { .. }));
    }

    #[test]
    fn construction_rejects_out_of_domain_coordinates() {
        let err = PointSet::from_rows(
            &[alloc::vec![0.2], alloc::vec![1.5]],
            Bounds::unit(1),
            Provenance::default(),
            String::from("bad"),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            PointSetError::OutOfDomain {
                point: 1,
                dim: 0,
                ..
            }
        ));
    }

    #[test]
    fn bounds_require_strictly_increasing_pairs() {
        assert!(Bounds::new(alloc::vec![0.0], alloc::vec![0.0]).is_err());
        assert!(Bounds::new(alloc::vec![1.0], alloc::vec![0.5]).is_err());
        assert!(Bounds::new(alloc::vec![], alloc::vec![]).is_err());
    }

    #[test]
    fn digest_is_sensitive_to_coordinates() {
        let a = unit_set(&[alloc::vec![0.1, 0.2]]);
        let b = unit_set(&[alloc::vec![0.1, 0.3]]);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }

    proptest! {
        #[test]
        fn scale_then_unscale_is_identity_within_1e12(
            coords in proptest::collection::vec(0.0f64..=1.0, 1..40),
            lo in -17.0f64..3.0,
            width in 0.5f64..23.0,
        ) {
            let d = if coords.len() >= 4 { 2 } else { 1 };
            let n = coords.len() / d;
            prop_assume!(n >= 1);
            let coords = coords[..n * d].to_vec();
            let ps = PointSet::new(
                coords.clone(),
                d,
                Bounds::unit(d),
                Provenance::default(),
                String::from("prop"),
            ).unwrap();
            let target = Bounds::new(alloc::vec![lo; d], alloc::vec![lo + width; d]).unwrap();
            let back = ps.scale(&target).unwrap().to_unit();
            for (a, b) in coords.iter().zip(back.coords()) {
                prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
        }
    }
}
