//! Finite unions of closed intervals with exact set arithmetic.
//!
//! Cross-sections of approach regions are finite unions of closed
//! intervals, and every quantitative claim downstream (section sizes,
//! superlevel-set measures, containment checks) reduces to measure and
//! difference computations on such unions. The representation is kept
//! canonical — parts sorted, pairwise disjoint, with touching parts merged —
//! so `measure` is a plain sum and comparisons are two-pointer sweeps with
//! no tolerance fuzz.
//!
//! Degenerate parts `[a, a]` are legal (a cone section at its vertex height
//! is a single point); they carry zero measure and still answer point
//! containment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors for interval arithmetic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("interval endpoints must be finite with lo <= hi, got [{0}, {1}]")]
    InvalidEndpoints(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A finite union of closed intervals in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for IntervalUnion {
    type Error = Error;
    fn try_from(parts: Vec<(f64, f64)>) -> Result<Self> {
        IntervalUnion::from_parts(parts)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(u: IntervalUnion) -> Self {
        u.parts
    }
}

impl Default for IntervalUnion {
    fn default() -> Self {
        IntervalUnion::empty()
    }
}

impl IntervalUnion {
    /// The empty set.
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    /// A single closed interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        IntervalUnion::from_parts(vec![(lo, hi)])
    }

    /// Canonicalise an arbitrary list of closed intervals: sort, merge
    /// overlapping and touching parts.
    ///
    /// # Example
    ///
    /// ```
    /// use regionlab::intervals::IntervalUnion;
    ///
    /// let u = IntervalUnion::from_parts(vec![(1.0, 2.0), (0.0, 1.0), (3.0, 3.0)]).unwrap();
    /// assert_eq!(u.parts(), &[(0.0, 2.0), (3.0, 3.0)]);
    /// assert_eq!(u.measure(), 2.0);
    /// ```
    pub fn from_parts(mut parts: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &parts {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidEndpoints(lo, hi));
            }
        }
        parts.sort_by(|a, b| {
            a.partial_cmp(b).expect("finite endpoints compare totally")
        });
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some((_, phi)) if lo <= *phi => *phi = phi.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(IntervalUnion { parts: merged })
    }

    /// The canonical parts, sorted and disjoint.
    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        self.parts.len()
    }

    /// True if the set is empty.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total length (degenerate parts contribute zero).
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Smallest interval containing the set, or `None` if empty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        match (self.parts.first(), self.parts.last()) {
            (Some(&(lo, _)), Some(&(_, hi))) => Some((lo, hi)),
            _ => None,
        }
    }

    /// Translate every part by `dx`.
    pub fn translate(&self, dx: f64) -> Self {
        IntervalUnion {
            parts: self.parts.iter().map(|&(lo, hi)| (lo + dx, hi + dx)).collect(),
        }
    }

    /// Union with another set.
    pub fn union(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        IntervalUnion::from_parts(parts).expect("canonical inputs stay valid")
    }

    /// Intersection with a single closed interval `[lo, hi]`.
    pub fn intersect_segment(&self, lo: f64, hi: f64) -> Self {
        let mut parts = Vec::new();
        for &(plo, phi) in &self.parts {
            let a = plo.max(lo);
            let b = phi.min(hi);
            if a <= b {
                parts.push((a, b));
            }
        }
        IntervalUnion { parts }
    }

    /// True if `x` lies in the set (closed intervals).
    pub fn contains_point(&self, x: f64) -> bool {
        let idx = self.parts.partition_point(|&(lo, _)| lo <= x);
        idx > 0 && x <= self.parts[idx - 1].1
    }

    /// Measure of `self \ other`: how much of this set the other fails to
    /// cover. Zero exactly when `self` is a subset of `other` up to null
    /// sets.
    pub fn difference_measure(&self, other: &Self) -> f64 {
        let mut total = 0.0;
        let mut j = 0;
        for &(lo, hi) in &self.parts {
            let mut cursor = lo;
            while j < other.parts.len() && other.parts[j].1 < cursor {
                j += 1;
            }
            let mut jj = j;
            while jj < other.parts.len() && other.parts[jj].0 <= hi {
                let (olo, ohi) = other.parts[jj];
                if olo > cursor {
                    total += olo - cursor;
                }
                cursor = cursor.max(ohi);
                if cursor >= hi {
                    break;
                }
                jj += 1;
            }
            if cursor < hi {
                total += hi - cursor;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalisation_merges_touching_parts() {
        let u = IntervalUnion::from_parts(vec![(0.0, 1.0), (1.0, 2.0), (2.5, 3.0)]).unwrap();
        assert_eq!(u.parts(), &[(0.0, 2.0), (2.5, 3.0)]);
        assert_eq!(u.component_count(), 2);
        assert_eq!(u.measure(), 2.5);
    }

    #[test]
    fn degenerate_points_survive_unless_absorbed() {
        let u = IntervalUnion::from_parts(vec![(1.0, 1.0), (0.0, 0.5)]).unwrap();
        assert_eq!(u.parts(), &[(0.0, 0.5), (1.0, 1.0)]);
        assert!(u.contains_point(1.0));
        assert_eq!(u.measure(), 0.5);
        let v = IntervalUnion::from_parts(vec![(1.0, 1.0), (0.0, 2.0)]).unwrap();
        assert_eq!(v.parts(), &[(0.0, 2.0)]);
    }

    #[test]
    fn invalid_endpoints_are_rejected() {
        assert!(IntervalUnion::interval(1.0, 0.0).is_err());
        assert!(IntervalUnion::interval(f64::NAN, 2.0).is_err());
        assert!(IntervalUnion::interval(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn containment_at_endpoints_is_closed() {
        let u = IntervalUnion::from_parts(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert!(u.contains_point(0.0));
        assert!(u.contains_point(1.0));
        assert!(u.contains_point(2.0));
        assert!(!u.contains_point(1.5));
        assert!(!u.contains_point(-0.1));
        assert!(!u.contains_point(3.1));
    }

    #[test]
    fn difference_measure_basic_cases() {
        let a = IntervalUnion::interval(0.0, 4.0).unwrap();
        let b = IntervalUnion::from_parts(vec![(1.0, 2.0), (3.0, 5.0)]).unwrap();
        assert_eq!(a.difference_measure(&b), 2.0);
        assert_eq!(b.difference_measure(&a), 1.0);
        assert_eq!(a.difference_measure(&a), 0.0);
        assert_eq!(a.difference_measure(&IntervalUnion::empty()), 4.0);
        assert_eq!(IntervalUnion::empty().difference_measure(&a), 0.0);
    }

    #[test]
    fn translate_and_intersect() {
        let u = IntervalUnion::from_parts(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let t = u.translate(10.0);
        assert_eq!(t.parts(), &[(10.0, 11.0), (12.0, 13.0)]);
        let clipped = u.intersect_segment(0.5, 2.5);
        assert_eq!(clipped.parts(), &[(0.5, 1.0), (2.0, 2.5)]);
        assert!(u.intersect_segment(1.2, 1.8).is_empty());
    }

    #[test]
    fn serde_round_trip_canonicalises() {
        let u: IntervalUnion = serde_json::from_str("[[1.0,2.0],[0.0,1.0]]").unwrap();
        assert_eq!(u.parts(), &[(0.0, 2.0)]);
        let js = serde_json::to_string(&u).unwrap();
        assert_eq!(js, "[[0.0,2.0]]");
        assert!(serde_json::from_str::<IntervalUnion>("[[2.0,1.0]]").is_err());
    }

    // Exact reference model: endpoints live on the grid k/16 in [-4, 4], so
    // indicator samples at the midpoints of the 1/32-cells decide membership
    // of whole cells and grid arithmetic is exact in f64.
    const GRID: f64 = 1.0 / 16.0;
    const CELL: f64 = 1.0 / 32.0;

    fn indicator_cells(parts: &[(f64, f64)]) -> Vec<bool> {
        let n = (8.0 / CELL) as usize;
        (0..n)
            .map(|i| {
                let x = -4.0 + (i as f64 + 0.5) * CELL;
                parts.iter().any(|&(lo, hi)| x >= lo && x <= hi)
            })
            .collect()
    }

    fn raw_parts() -> impl Strategy<Value = Vec<(f64, f64)>> {
        // lo up to -4 + 111/16, width up to 15/16: everything stays inside
        // the oracle window [-4, 4].
        prop::collection::vec((0i32..112, 0i32..16), 0..8).prop_map(|pairs| {
            pairs
                .into_iter()
                .map(|(lo16, w16)| {
                    let lo = -4.0 + lo16 as f64 * GRID;
                    (lo, lo + w16 as f64 * GRID)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn measure_matches_cell_count(parts in raw_parts()) {
            let u = IntervalUnion::from_parts(parts.clone()).unwrap();
            let cells = indicator_cells(&parts);
            let oracle = cells.iter().filter(|&&b| b).count() as f64 * CELL;
            prop_assert!((u.measure() - oracle).abs() < 1e-12);
        }

        #[test]
        fn parts_are_canonical(parts in raw_parts()) {
            let u = IntervalUnion::from_parts(parts).unwrap();
            for w in u.parts().windows(2) {
                prop_assert!(w[0].1 < w[1].0, "parts {:?} not disjoint-sorted", u.parts());
            }
            for &(lo, hi) in u.parts() {
                prop_assert!(lo <= hi);
            }
        }

        #[test]
        fn union_matches_indicator_or(a in raw_parts(), b in raw_parts()) {
            let ua = IntervalUnion::from_parts(a.clone()).unwrap();
            let ub = IntervalUnion::from_parts(b.clone()).unwrap();
            let u = ua.union(&ub);
            let ca = indicator_cells(&a);
            let cb = indicator_cells(&b);
            let oracle = ca.iter().zip(&cb).filter(|(x, y)| **x || **y).count() as f64 * CELL;
            prop_assert!((u.measure() - oracle).abs() < 1e-12);
        }

        #[test]
        fn difference_matches_indicator_andnot(a in raw_parts(), b in raw_parts()) {
            let ua = IntervalUnion::from_parts(a.clone()).unwrap();
            let ub = IntervalUnion::from_parts(b.clone()).unwrap();
            let ca = indicator_cells(&a);
            let cb = indicator_cells(&b);
            let oracle = ca.iter().zip(&cb).filter(|(x, y)| **x && !*y).count() as f64 * CELL;
            prop_assert!((ua.difference_measure(&ub) - oracle).abs() < 1e-12);
        }

        #[test]
        fn contains_point_matches_indicator(parts in raw_parts(), idx in 0usize..256) {
            let u = IntervalUnion::from_parts(parts.clone()).unwrap();
            let x = -4.0 + (idx as f64 + 0.5) * CELL;
            let oracle = parts.iter().any(|&(lo, hi)| x >= lo && x <= hi);
            prop_assert_eq!(u.contains_point(x), oracle);
        }
    }
}
