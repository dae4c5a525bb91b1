//! Audits of the structural facts behind the permutation-count bound:
//! consecutive-pair and intersection-line properties of popular vertices,
//! the exhaustive-removal counting identities, the two-faces bound inside
//! single-body sub-arrangements, the zone-squared metric, and the reference
//! bound curves.
//!
//! The popular-vertex audits are theorems: a reported violation means an
//! implementation bug or a general-position breach, never new mathematics.

use std::collections::BTreeMap;

use crate::arrangement::{build_arrangement, Arrangement, CellRef, FaceId};
use crate::body::SeparationSystem;
use crate::census::{Census, PopularSummary, RemovalAnalysis};
use crate::error::Error;
use crate::linalg::plane_intersection_line;
use crate::scalar::Scalar;
use crate::transversal::{line_meets_body, OrientedOrder};

/// Outcome of one audit: how many objects were checked and what failed.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub checked: u64,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Core consecutive-pairs checker over four orders around one vertex,
/// separated out so it can be fed fabricated negative controls.
pub fn check_consecutive_pairs(
    orders: &[OrientedOrder],
    pair1: (usize, usize),
    pair2: (usize, usize),
) -> Vec<String> {
    let mut violations = Vec::new();
    let member = [pair1.0, pair1.1, pair2.0, pair2.1];
    let reference = &orders[0].0;
    for (oi, order) in orders.iter().enumerate() {
        for (pos, &body) in order.0.iter().enumerate() {
            if member.contains(&body) {
                continue;
            }
            if reference.iter().position(|&b| b == body) != Some(pos) {
                violations.push(format!(
                    "body {body} changes position between order 0 and order {oi}"
                ));
            }
        }
        for (i, j) in [pair1, pair2] {
            let pi = order.0.iter().position(|&b| b == i);
            let pj = order.0.iter().position(|&b| b == j);
            match (pi, pj) {
                (Some(pi), Some(pj)) if pi.abs_diff(pj) == 1 => {}
                _ => violations.push(format!(
                    "pair ({i},{j}) not consecutive in order {oi}: {:?}",
                    order.0
                )),
            }
        }
    }
    violations
}

/// For every regular popular vertex, the four incident orders may differ
/// only by swapping the vertex's two defining pairs: all other bodies keep
/// their positions and both pairs stay adjacent.
pub fn audit_consecutive_pairs<S: Scalar>(
    census: &Census<S>,
    popular: &PopularSummary,
    arr: &Arrangement<S>,
) -> AuditReport {
    let mut report = AuditReport::default();
    for &v in &popular.popular_vertices {
        let vert = &arr.vertices[v];
        if !vert.regular {
            continue;
        }
        let orders: Vec<OrientedOrder> = vert
            .faces
            .iter()
            .filter_map(|&f| census.classes[f].order().cloned())
            .collect();
        if orders.len() != 4 {
            report
                .violations
                .push(format!("popular vertex {v} has a cyclic incident face"));
            continue;
        }
        let pair1 = arr.circles[vert.circles.0].pair;
        let pair2 = arr.circles[vert.circles.1].pair;
        report.checked += 1;
        for msg in check_consecutive_pairs(&orders, pair1, pair2) {
            report.violations.push(format!("vertex {v}: {msg}"));
        }
    }
    report
}

/// For every regular popular vertex, the intersection line of its two
/// separating planes stabs every body outside the two pairs and misses all
/// four pair bodies; both checks are exact LPs.
pub fn audit_popular_line<S: Scalar>(
    census: &Census<S>,
    popular: &PopularSummary,
    arr: &Arrangement<S>,
    sys: &SeparationSystem<S>,
) -> Result<AuditReport, Error> {
    let mut report = AuditReport::default();
    for &v in &popular.popular_vertices {
        let vert = &arr.vertices[v];
        if !vert.regular {
            continue;
        }
        let pair1 = arr.circles[vert.circles.0].pair;
        let pair2 = arr.circles[vert.circles.1].pair;
        let h1 = sys.hyperplane(pair1.0, pair1.1);
        let h2 = sys.hyperplane(pair2.0, pair2.1);
        let (point, dir) =
            plane_intersection_line(&h1.normal, &h1.offset, &h2.normal, &h2.offset)?;
        report.checked += 1;
        let members = [pair1.0, pair1.1, pair2.0, pair2.1];
        for &a in &census.active {
            let meets = line_meets_body(&point, &dir, &sys.bodies[a]);
            let should_meet = !members.contains(&a);
            if meets != should_meet {
                report.violations.push(format!(
                    "vertex {v}: intersection line {} body {a}",
                    if meets { "unexpectedly stabs" } else { "misses" }
                ));
            }
        }
    }
    Ok(report)
}

/// Both sides of the exhaustive-removal identities, as exact integers
/// (averages are reported scaled by n to stay integral).
#[derive(Debug, Clone)]
pub struct RemovalIdentityReport {
    pub n: u64,
    /// Sum over removals of 0-level borders in the sub-arrangement.
    pub lhs_sum_e: i128,
    pub lhs_sum_v: i128,
    /// (n-4) * regular 0-level borders + regular 1-level weight.
    pub rhs_regular_e: i128,
    pub rhs_regular_v: i128,
    /// Same sums restricted to borders at regular vertices.
    pub lhs_regular_e: i128,
    pub lhs_regular_v: i128,
    /// Degenerate-border contribution: the gap between the all-border sum
    /// and the regular-border identity terms.
    pub degenerate_gap_e: i128,
    pub degenerate_gap_v: i128,
    pub inequality_e: bool,
    pub inequality_v: bool,
    pub regular_equality_e: bool,
    pub regular_equality_v: bool,
    /// Full double-counting identity over all borders (survival plus
    /// conflict weights); exact by construction, asserted as a self-check.
    pub full_identity_e: bool,
    pub full_identity_v: bool,
}

impl RemovalIdentityReport {
    pub fn passed(&self) -> bool {
        self.inequality_e
            && self.inequality_v
            && self.regular_equality_e
            && self.regular_equality_v
            && self.full_identity_e
            && self.full_identity_v
    }
}

/// Verify `avg E0(R) >= ((n-4)/n) E0 + (1/n) E1` restricted to regular
/// borders (and the slice-border analogue), plus the exact equalities that
/// the survival/conflict decomposition implies.
pub fn audit_removal_identities(
    popular: &PopularSummary,
    analysis: &RemovalAnalysis,
    n: u64,
) -> RemovalIdentityReport {
    let n_i = n as i128;
    let e0_reg = popular.e0_regular as i128;
    let e0_deg = (popular.e0 - popular.e0_regular) as i128;
    let v0_reg = popular.v0_regular as i128;
    let v0_deg = (popular.v0 - popular.v0_regular) as i128;

    let lhs_sum_e: i128 = analysis.runs.iter().map(|r| r.e0 as i128).sum();
    let lhs_sum_v: i128 = analysis.runs.iter().map(|r| r.v0 as i128).sum();
    let lhs_regular_e: i128 = analysis.runs.iter().map(|r| r.e0_regular as i128).sum();
    let lhs_regular_v: i128 = analysis.runs.iter().map(|r| r.v0_regular as i128).sum();

    let w1_e_reg = analysis.e1_weighted_regular() as i128;
    let w1_v_reg = analysis.v1_weighted_regular() as i128;
    let w1_e_all = analysis.e1_weighted() as i128;
    let w1_v_all = analysis.v1_weighted() as i128;

    let rhs_regular_e = (n_i - 4) * e0_reg + w1_e_reg;
    let rhs_regular_v = (n_i - 4) * v0_reg + w1_v_reg;

    RemovalIdentityReport {
        n,
        lhs_sum_e,
        lhs_sum_v,
        rhs_regular_e,
        rhs_regular_v,
        lhs_regular_e,
        lhs_regular_v,
        degenerate_gap_e: lhs_sum_e - rhs_regular_e,
        degenerate_gap_v: lhs_sum_v - rhs_regular_v,
        inequality_e: lhs_sum_e >= rhs_regular_e,
        inequality_v: lhs_sum_v >= rhs_regular_v,
        regular_equality_e: lhs_regular_e == rhs_regular_e,
        regular_equality_v: lhs_regular_v == rhs_regular_v,
        full_identity_e: lhs_sum_e == (n_i - 4) * e0_reg + (n_i - 3) * e0_deg + w1_e_all,
        full_identity_v: lhs_sum_v == (n_i - 4) * v0_reg + (n_i - 3) * v0_deg + w1_v_all,
    }
}

/// Count, for a group of contained faces with their touched boundary-edge
/// sets, how many faces touch each edge pair plus at least one more edge;
/// returns the `(e0, e1, count)` triples exceeding two. Separated out for
/// fabricated negative controls.
pub fn k33_pair_violations(touch_sets: &[Vec<usize>]) -> Vec<(usize, usize, u64)> {
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for touches in touch_sets {
        if touches.len() < 3 {
            continue;
        }
        for (i, &e0) in touches.iter().enumerate() {
            for &e1 in touches.iter().skip(i + 1) {
                let key = (e0.min(e1), e0.max(e1));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c > 2)
        .map(|((a, b), c)| (a, b, c))
        .collect()
}

/// Build the sub-arrangement of the circles involving body `i` and verify
/// that no face of it contains more than two full-arrangement faces touching
/// any fixed pair of its edges plus a third edge.
pub fn audit_k33<S: Scalar>(
    arr: &Arrangement<S>,
    body: usize,
) -> Result<AuditReport, Error> {
    if arr.dim != 3 {
        return Err(Error::BadDimension(arr.dim));
    }
    let sub_circles: Vec<_> = arr
        .circles
        .iter()
        .filter(|c| c.pair.0 == body || c.pair.1 == body)
        .cloned()
        .collect();
    let sub = build_arrangement(&sub_circles)?;
    let sub_index: Vec<Option<usize>> = arr
        .circles
        .iter()
        .map(|c| sub_circles.iter().position(|sc| sc.pair == c.pair))
        .collect();

    // Touched boundary edges of the containing sub-face, per full face.
    let mut touches_by_subface: BTreeMap<FaceId, Vec<Vec<usize>>> = BTreeMap::new();
    let mut report = AuditReport::default();
    for face in &arr.faces {
        let restricted: Vec<i8> = arr
            .circles
            .iter()
            .zip(&face.signs)
            .filter(|(c, _)| c.pair.0 == body || c.pair.1 == body)
            .map(|(_, &s)| s)
            .collect();
        let f0 = sub
            .face_by_signs(&restricted)
            .expect("restricted signs match a sub-face");
        let mut touched: Vec<usize> = Vec::new();
        for &e in &face.edges {
            let edge = &arr.edges[e];
            if sub_index[edge.circle].is_none() {
                continue;
            }
            match sub.locate(&edge.sample)? {
                CellRef::Edge(e0) => {
                    if !touched.contains(&e0) {
                        touched.push(e0);
                    }
                }
                other => {
                    report.violations.push(format!(
                        "edge sample on a sub-circle located at {other:?}"
                    ));
                }
            }
        }
        touches_by_subface.entry(f0).or_default().push(touched);
    }

    for (f0, sets) in touches_by_subface {
        report.checked += sets.len() as u64;
        for (e0, e1, count) in k33_pair_violations(&sets) {
            report.violations.push(format!(
                "sub-face {f0}: edges ({e0},{e1}) shared by {count} contained faces"
            ));
        }
    }
    Ok(report)
}

/// Sum of squared face complexities of the circles-involving-`i`
/// sub-arrangement, with the ratio to (number of circles)^2.
pub fn zone_square_metric<S: Scalar>(
    arr: &Arrangement<S>,
    body: usize,
) -> Result<(u64, S), Error> {
    if arr.dim != 3 {
        return Err(Error::BadDimension(arr.dim));
    }
    let sub_circles: Vec<_> = arr
        .circles
        .iter()
        .filter(|c| c.pair.0 == body || c.pair.1 == body)
        .cloned()
        .collect();
    let m = sub_circles.len() as i64;
    let sub = build_arrangement(&sub_circles)?;
    let sum = sub.face_complexity_square_sum();
    let ratio = S::from_int(sum as i64) / (S::from_int(m) * S::from_int(m));
    Ok((sum, ratio))
}

/// Reference bound curves with unit constants; the only approximate value
/// is the base-2 logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurves {
    /// n^(2d-2)
    pub wenger: u128,
    /// n^(2d-3), the polynomial part of the main bound
    pub main_poly: u128,
    pub log2_n: f64,
    /// n^(2d-3) * log2(n)
    pub main: f64,
    /// 2n - 2
    pub planar: u64,
    /// n^(d-1)
    pub lower: u128,
}

pub fn bound_curves(n: u64, d: u32) -> BoundCurves {
    assert!(n >= 2 && d >= 2);
    let p = |e: u32| (n as u128).pow(e);
    let log2_n = (n as f64).log2();
    BoundCurves {
        wenger: p(2 * d - 2),
        main_poly: p(2 * d - 3),
        log2_n,
        main: p(2 * d - 3) as f64 * log2_n,
        planar: 2 * n - 2,
        lower: p(d - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consecutive_pairs_checker_accepts_swaps() {
        // Orders around a popular vertex differ only by swapping (0,1) and
        // (2,3).
        let orders = vec![
            OrientedOrder(vec![0, 1, 4, 2, 3]),
            OrientedOrder(vec![1, 0, 4, 2, 3]),
            OrientedOrder(vec![0, 1, 4, 3, 2]),
            OrientedOrder(vec![1, 0, 4, 3, 2]),
        ];
        assert!(check_consecutive_pairs(&orders, (0, 1), (2, 3)).is_empty());
    }

    #[test]
    fn consecutive_pairs_checker_flags_non_adjacent_pair() {
        let orders = vec![
            OrientedOrder(vec![0, 4, 1, 2, 3]),
            OrientedOrder(vec![1, 4, 0, 2, 3]),
            OrientedOrder(vec![0, 4, 1, 3, 2]),
            OrientedOrder(vec![1, 4, 0, 3, 2]),
        ];
        let violations = check_consecutive_pairs(&orders, (0, 1), (2, 3));
        assert!(violations.iter().any(|v| v.contains("(0,1)")));
    }

    #[test]
    fn consecutive_pairs_checker_flags_moved_outsider() {
        let orders = vec![
            OrientedOrder(vec![0, 1, 4, 2, 3]),
            OrientedOrder(vec![4, 1, 0, 2, 3]),
            OrientedOrder(vec![0, 1, 4, 3, 2]),
            OrientedOrder(vec![1, 0, 4, 3, 2]),
        ];
        let violations = check_consecutive_pairs(&orders, (0, 1), (2, 3));
        assert!(violations.iter().any(|v| v.contains("body 4")));
    }

    #[test]
    fn k33_counter_negative_control() {
        // Three faces each touching edges {0,1} plus a third edge: the pair
        // (0,1) is shared three times, which the two-faces bound forbids.
        let sets = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
        let violations = k33_pair_violations(&sets);
        assert_eq!(violations, vec![(0, 1, 3)]);

        // Two faces are fine.
        let ok = vec![vec![0, 1, 2], vec![0, 1, 3], vec![2, 3]];
        assert!(k33_pair_violations(&ok).is_empty());
    }

    #[test]
    fn bound_curve_values() {
        let c = bound_curves(10, 2);
        assert_eq!(c.planar, 18);
        let c = bound_curves(10, 3);
        assert_eq!(c.wenger, 10_000);
        assert_eq!(c.main_poly, 1_000);
        assert!((c.main - 1000.0 * (10.0f64).log2()).abs() < 1e-9);
        assert_eq!(c.lower, 100);
    }
}
