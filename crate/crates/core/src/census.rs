//! Face-by-face classification of the direction-sphere arrangement:
//! pairwise-order relations from sign vectors, one-sided certification of
//! permutation faces by explicit witness lines, popular vertices and edges,
//! borders with levels, and conflict weights by exhaustive single-removal.
//!
//! Certification is one-sided by design: probing cannot prove the absence of
//! a transversal direction inside a face, so levels and conflicts are always
//! defined relative to this classifier, applied with the identical probe
//! policy before and after removals. Witnesses found for the full family are
//! carried into every sub-family (a witness line keeps certifying after a
//! body is removed), which makes certification monotone under removal and
//! the removal identities exact.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::arrangement::{
    build_arrangement, Arrangement, CellRef, EdgeId, FaceId, VertexId,
};
use crate::body::SeparationSystem;
use crate::error::Error;
use crate::linalg::Ray;
use crate::scalar::Scalar;
use crate::transversal::{
    sort_tournament, transversal_for_direction, BodyRef, LineWitness, OrientedOrder,
};

/// Probe policy: deterministic interior samples per face plus caller-chosen
/// extra probe directions (typically the oracle grid).
#[derive(Debug, Clone)]
pub struct ProbePolicy<S: Scalar> {
    pub probes_per_face: usize,
    pub extra_probes: Vec<Ray<S>>,
}

impl<S: Scalar> Default for ProbePolicy<S> {
    fn default() -> Self {
        ProbePolicy {
            probes_per_face: 5,
            extra_probes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceRelation {
    Acyclic(OrientedOrder),
    Cyclic([usize; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceStatus<S: Scalar> {
    Certified(LineWitness<S>),
    Uncertified,
}

#[derive(Debug, Clone)]
pub struct FaceClass<S: Scalar> {
    pub face: FaceId,
    pub relation: FaceRelation,
    pub status: FaceStatus<S>,
}

impl<S: Scalar> FaceClass<S> {
    pub fn is_certified(&self) -> bool {
        matches!(self.status, FaceStatus::Certified(_))
    }

    pub fn order(&self) -> Option<&OrientedOrder> {
        match &self.relation {
            FaceRelation::Acyclic(o) => Some(o),
            FaceRelation::Cyclic(_) => None,
        }
    }
}

/// Classification of every face of one arrangement for one (sub-)family.
#[derive(Debug, Clone)]
pub struct Census<S: Scalar> {
    pub active: Vec<usize>,
    pub classes: Vec<FaceClass<S>>,
    pub acyclic_faces: u64,
    pub certified_faces: u64,
    pub certified_oriented: BTreeSet<OrientedOrder>,
    pub certified_unoriented: BTreeSet<OrientedOrder>,
    /// Carried witnesses that failed substitution in this family; nonzero
    /// values indicate a monotone-certification violation.
    pub monotone_violations: u64,
    /// Witness orders disagreeing with their face relation (always zero for
    /// a correct build).
    pub order_mismatches: u64,
}

impl<S: Scalar> Census<S> {
    pub fn witnesses(&self) -> Vec<LineWitness<S>> {
        self.classes
            .iter()
            .filter_map(|c| match &c.status {
                FaceStatus::Certified(w) => Some(w.clone()),
                FaceStatus::Uncertified => None,
            })
            .collect()
    }
}

fn pair_to_circle<S: Scalar>(arr: &Arrangement<S>) -> HashMap<(usize, usize), usize> {
    arr.circles
        .iter()
        .enumerate()
        .map(|(c, circ)| (circ.pair, c))
        .collect()
}

/// The pairwise-order relation of one face, read off its sign vector: a
/// positive sign on the circle of pair (i, j) puts i first.
pub fn face_relation<S: Scalar>(
    arr: &Arrangement<S>,
    face: FaceId,
    active: &[usize],
) -> FaceRelation {
    let circle_of = pair_to_circle(arr);
    let signs = &arr.faces[face].signs;
    let beats = |a: usize, b: usize| {
        let (i, j) = (a.min(b), a.max(b));
        let c = circle_of[&(i, j)];
        let s = signs[c];
        debug_assert_ne!(s, 0);
        (s == 1) == (a == i)
    };
    match sort_tournament(active, beats) {
        Ok(seq) => FaceRelation::Acyclic(OrientedOrder(seq)),
        Err(cycle) => FaceRelation::Cyclic(cycle),
    }
}

/// Classify every face: the relation comes from the sign vector alone; the
/// status is `Certified` when a carried witness lands in the face or any
/// probe direction admits a transversal.
pub fn classify_faces<S: Scalar>(
    arr: &Arrangement<S>,
    sys: &SeparationSystem<S>,
    active: &[usize],
    policy: &ProbePolicy<S>,
    carried: &[LineWitness<S>],
) -> Result<Census<S>, Error> {
    if active.len() < 2 {
        return Err(Error::InvalidConfig("census needs at least two bodies".into()));
    }
    let bodies: Vec<BodyRef<'_, S>> = active.iter().map(|&i| (i, &sys.bodies[i])).collect();
    let circle_of = pair_to_circle(arr);

    // Relations from sign vectors; no sampling involved.
    let relations: Vec<FaceRelation> = arr
        .faces
        .iter()
        .map(|face| {
            let beats = |a: usize, b: usize| {
                let (i, j) = (a.min(b), a.max(b));
                let c = circle_of[&(i, j)];
                let s = face.signs[c];
                debug_assert_ne!(s, 0);
                (s == 1) == (a == i)
            };
            match sort_tournament(active, beats) {
                Ok(seq) => FaceRelation::Acyclic(OrientedOrder(seq)),
                Err(cycle) => FaceRelation::Cyclic(cycle),
            }
        })
        .collect();

    // Carried witnesses certify their containing face by substitution alone.
    let mut certified: Vec<Option<LineWitness<S>>> = vec![None; arr.num_faces()];
    let mut monotone_violations = 0u64;
    for w in carried {
        let sub = if w.entries.len() == active.len() {
            w.clone()
        } else {
            let mut keep = w.clone();
            keep.entries.retain(|e| active.contains(&e.body));
            keep
        };
        if !sub.verify(&bodies) {
            monotone_violations += 1;
            continue;
        }
        match arr.locate(&sub.direction) {
            Ok(CellRef::Face(f)) => {
                if matches!(relations[f], FaceRelation::Cyclic(_)) {
                    monotone_violations += 1;
                } else if certified[f].is_none() {
                    certified[f] = Some(sub);
                }
            }
            _ => monotone_violations += 1,
        }
    }

    // Extra probes grouped by containing face; probes on lower cells are
    // discarded (a transversal direction never lies on a circle).
    let mut extra_for_face: Vec<Vec<Ray<S>>> = vec![Vec::new(); arr.num_faces()];
    for u in &policy.extra_probes {
        if let Ok(CellRef::Face(f)) = arr.locate(u) {
            extra_for_face[f].push(u.clone());
        }
    }

    let results: Vec<Option<LineWitness<S>>> = (0..arr.num_faces())
        .into_par_iter()
        .map(|f| {
            if certified[f].is_some() {
                return certified[f].clone();
            }
            if matches!(relations[f], FaceRelation::Cyclic(_)) {
                return None;
            }
            for u in extra_for_face[f]
                .iter()
                .cloned()
                .chain(arr.interior_samples(f, policy.probes_per_face))
            {
                if let Ok(Some(w)) = transversal_for_direction(&u, &bodies) {
                    return Some(w);
                }
            }
            None
        })
        .collect();

    let mut classes = Vec::with_capacity(arr.num_faces());
    let mut acyclic = 0u64;
    let mut certified_faces = 0u64;
    let mut oriented = BTreeSet::new();
    let mut unoriented = BTreeSet::new();
    let mut order_mismatches = 0u64;
    for (f, (relation, witness)) in relations.into_iter().zip(results).enumerate() {
        if matches!(relation, FaceRelation::Acyclic(_)) {
            acyclic += 1;
        }
        let status = match witness {
            Some(w) => {
                certified_faces += 1;
                match &relation {
                    FaceRelation::Acyclic(o) => {
                        if &w.order() != o {
                            order_mismatches += 1;
                        }
                        oriented.insert(o.clone());
                        unoriented.insert(o.unoriented());
                    }
                    FaceRelation::Cyclic(_) => order_mismatches += 1,
                }
                FaceStatus::Certified(w)
            }
            None => FaceStatus::Uncertified,
        };
        classes.push(FaceClass {
            face: f,
            relation,
            status,
        });
    }

    Ok(Census {
        active: active.to_vec(),
        classes,
        acyclic_faces: acyclic,
        certified_faces,
        certified_oriented: oriented,
        certified_unoriented: unoriented,
        monotone_violations,
        order_mismatches,
    })
}

/// Popular cells and 0-level border counts derived from a census.
#[derive(Debug, Clone, Default)]
pub struct PopularSummary {
    pub popular_vertices: Vec<VertexId>,
    pub popular_edges: Vec<EdgeId>,
    /// 0-level edge borders; equals twice the number of popular edges.
    pub e0: u64,
    /// 0-level slice borders.
    pub v0: u64,
    pub e0_regular: u64,
    pub v0_regular: u64,
    pub degenerate_vertices: u64,
    /// Popular vertices at degenerate vertices; must stay zero.
    pub degenerate_popular: u64,
}

pub fn popular_census<S: Scalar>(census: &Census<S>, arr: &Arrangement<S>) -> PopularSummary {
    let is_certified = |f: FaceId| census.classes[f].is_certified();
    let mut out = PopularSummary::default();

    if arr.dim == 2 {
        out.degenerate_vertices = 0;
        for (v, vert) in arr.vertices.iter().enumerate() {
            if vert.faces.iter().all(|&f| is_certified(f)) {
                out.popular_vertices.push(v);
            }
        }
        return out;
    }

    for (e, edge) in arr.edges.iter().enumerate() {
        if is_certified(edge.side_faces.0) && is_certified(edge.side_faces.1) {
            out.popular_edges.push(e);
        }
    }
    let popular_edge: Vec<bool> = {
        let mut v = vec![false; arr.num_edges()];
        for &e in &out.popular_edges {
            v[e] = true;
        }
        v
    };

    for (v, vert) in arr.vertices.iter().enumerate() {
        if !vert.regular {
            out.degenerate_vertices += 1;
        }
        let certified_count = vert.faces.iter().filter(|&&f| is_certified(f)).count() as u64;
        out.v0 += certified_count;
        if vert.regular {
            out.v0_regular += certified_count;
        }
        if certified_count == 4 {
            out.popular_vertices.push(v);
            if !vert.regular {
                out.degenerate_popular += 1;
            }
        }
        let mut e0_here = 0u64;
        for slot in [0usize, 1] {
            for sign in [1i8, -1] {
                let e = arr.edge_at_vertex_in_hemisphere(v, slot, sign);
                if popular_edge[e] {
                    e0_here += 1;
                }
            }
        }
        out.e0 += e0_here;
        if vert.regular {
            out.e0_regular += e0_here;
        }
    }
    debug_assert_eq!(out.e0, 2 * out.popular_edges.len() as u64);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorderKind {
    Edge,
    Slice,
}

/// A border: a vertex together with a hemisphere (edge border: `a` is the
/// circle slot, `b` the sign) or a slice (`a`, `b` are the two signs against
/// the vertex's circles in slot order).
#[derive(Debug, Clone)]
pub struct BorderRecord {
    pub vertex: VertexId,
    pub kind: BorderKind,
    pub a: i8,
    pub b: i8,
    pub regular: bool,
    pub level0: bool,
    /// Bodies whose single removal turns this border 0-level (empty for
    /// 0-level borders and for level >= 2 borders).
    pub conflicts: Vec<usize>,
    /// Charges received from neighboring 0-level slice borders.
    pub charges: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorderLevel {
    Zero,
    One { weight: usize },
    DeeperOrUnknown,
}

impl BorderRecord {
    pub fn level(&self) -> BorderLevel {
        if self.level0 {
            BorderLevel::Zero
        } else if self.conflicts.is_empty() {
            BorderLevel::DeeperOrUnknown
        } else {
            BorderLevel::One {
                weight: self.conflicts.len(),
            }
        }
    }

    /// Weight is defined for 1-level borders only.
    pub fn weight(&self) -> Option<usize> {
        match self.level() {
            BorderLevel::One { weight } => Some(weight),
            _ => None,
        }
    }
}

/// Per-removal 0-level border counts of the sub-census.
#[derive(Debug, Clone)]
pub struct RemovalRun {
    pub removed: usize,
    pub e0: u64,
    pub v0: u64,
    pub e0_regular: u64,
    pub v0_regular: u64,
}

/// Exhaustive single-removal analysis: border levels, conflict sets and the
/// data for the removal identities.
#[derive(Debug, Clone)]
pub struct RemovalAnalysis {
    pub runs: Vec<RemovalRun>,
    pub borders: Vec<BorderRecord>,
    pub monotone_violations: u64,
    /// Weight-1 1-level slice borders charged by two 0-level borders.
    pub double_charged_weight1: u64,
    pub double_charged_weight1_regular: u64,
    /// Charged neighbors that were unexpectedly 0-level (must stay zero).
    pub charge_violations: u64,
}

impl RemovalAnalysis {
    fn weighted(&self, kind: BorderKind, regular_only: bool) -> u64 {
        self.borders
            .iter()
            .filter(|b| b.kind == kind && (!regular_only || b.regular))
            .map(|b| b.weight().unwrap_or(0) as u64)
            .sum()
    }

    pub fn e1_weighted(&self) -> u64 {
        self.weighted(BorderKind::Edge, false)
    }

    pub fn v1_weighted(&self) -> u64 {
        self.weighted(BorderKind::Slice, false)
    }

    pub fn e1_weighted_regular(&self) -> u64 {
        self.weighted(BorderKind::Edge, true)
    }

    pub fn v1_weighted_regular(&self) -> u64 {
        self.weighted(BorderKind::Slice, true)
    }
}

/// Enumerate the eight borders of a vertex in a fixed order: four edge
/// borders then four slice borders.
fn border_choices() -> [(BorderKind, i8, i8); 8] {
    [
        (BorderKind::Edge, 0, 1),
        (BorderKind::Edge, 0, -1),
        (BorderKind::Edge, 1, 1),
        (BorderKind::Edge, 1, -1),
        (BorderKind::Slice, 1, 1),
        (BorderKind::Slice, 1, -1),
        (BorderKind::Slice, -1, 1),
        (BorderKind::Slice, -1, -1),
    ]
}

fn border_is_level0<S: Scalar>(
    arr: &Arrangement<S>,
    census: &Census<S>,
    popular_edge: &[bool],
    v: VertexId,
    kind: BorderKind,
    a: i8,
    b: i8,
) -> bool {
    match kind {
        BorderKind::Edge => {
            let e = arr.edge_at_vertex_in_hemisphere(v, a as usize, b);
            popular_edge[e]
        }
        BorderKind::Slice => {
            let f = arr.face_at_vertex(v, a, b);
            census.classes[f].is_certified()
        }
    }
}

fn popular_edge_flags<S: Scalar>(arr: &Arrangement<S>, census: &Census<S>) -> Vec<bool> {
    arr.edges
        .iter()
        .map(|e| {
            census.classes[e.side_faces.0].is_certified()
                && census.classes[e.side_faces.1].is_certified()
        })
        .collect()
}

/// Map a full-arrangement vertex slot to the slot of the same circle pair in
/// a sub-arrangement vertex.
fn slot_in<S: Scalar>(
    full: &Arrangement<S>,
    sub: &Arrangement<S>,
    v_full: VertexId,
    v_sub: VertexId,
    slot: usize,
) -> usize {
    let (c1, c2) = full.vertices[v_full].circles;
    let pair = if slot == 0 {
        full.circles[c1].pair
    } else {
        full.circles[c2].pair
    };
    let (d1, d2) = sub.vertices[v_sub].circles;
    if sub.circles[d1].pair == pair {
        0
    } else {
        debug_assert_eq!(sub.circles[d2].pair, pair);
        1
    }
}

/// Exhaustively rebuild the census for every single-body removal, reusing
/// all certified witnesses, and annotate every border with its conflict set.
pub fn conflict_weights<S: Scalar>(
    arr: &Arrangement<S>,
    sys: &SeparationSystem<S>,
    census: &Census<S>,
    policy: &ProbePolicy<S>,
) -> Result<RemovalAnalysis, Error> {
    if arr.dim != 3 {
        return Err(Error::BadDimension(arr.dim));
    }
    let active = census.active.clone();
    let witnesses = census.witnesses();
    let popular_edge = popular_edge_flags(arr, census);

    // Border table in fixed order: vertex-major, eight borders each.
    let mut borders: Vec<BorderRecord> = Vec::with_capacity(arr.num_vertices() * 8);
    for v in 0..arr.num_vertices() {
        for (kind, a, b) in border_choices() {
            borders.push(BorderRecord {
                vertex: v,
                kind,
                a,
                b,
                regular: arr.vertices[v].regular,
                level0: border_is_level0(arr, census, &popular_edge, v, kind, a, b),
                conflicts: Vec::new(),
                charges: 0,
            });
        }
    }

    struct SubResult {
        run: RemovalRun,
        now_level0: Vec<usize>,
        monotone_violations: u64,
    }

    let sub_results: Vec<SubResult> = active
        .par_iter()
        .map(|&q| -> Result<SubResult, Error> {
            let sub_circles: Vec<_> = arr
                .circles
                .iter()
                .filter(|c| c.pair.0 != q && c.pair.1 != q)
                .cloned()
                .collect();
            let sub_arr = build_arrangement(&sub_circles)?;
            let sub_active: Vec<usize> = active.iter().copied().filter(|&i| i != q).collect();
            let carried: Vec<LineWitness<S>> =
                witnesses.iter().map(|w| w.without_body(q)).collect();
            let sub_census = classify_faces(&sub_arr, sys, &sub_active, policy, &carried)?;
            let sub_popular_edge = popular_edge_flags(&sub_arr, &sub_census);

            let mut run = RemovalRun {
                removed: q,
                e0: 0,
                v0: 0,
                e0_regular: 0,
                v0_regular: 0,
            };
            let mut now_level0 = Vec::new();
            for (v, vert) in arr.vertices.iter().enumerate() {
                let (c1, c2) = vert.circles;
                let involved = [
                    arr.circles[c1].pair.0,
                    arr.circles[c1].pair.1,
                    arr.circles[c2].pair.0,
                    arr.circles[c2].pair.1,
                ];
                if involved.contains(&q) {
                    continue;
                }
                let v_sub = sub_arr
                    .vertex_by_ray(&vert.ray)
                    .expect("surviving vertex keeps its ray");
                for (k, (kind, a, b)) in border_choices().into_iter().enumerate() {
                    let level0 = match kind {
                        BorderKind::Edge => {
                            let slot = slot_in(arr, &sub_arr, v, v_sub, a as usize);
                            let e = sub_arr.edge_at_vertex_in_hemisphere(v_sub, slot, b);
                            sub_popular_edge[e]
                        }
                        BorderKind::Slice => {
                            // Reorder the two signs if the sub vertex lists
                            // its circles in the opposite order.
                            let (s1, s2) = if slot_in(arr, &sub_arr, v, v_sub, 0) == 0 {
                                (a, b)
                            } else {
                                (b, a)
                            };
                            let f = sub_arr.face_at_vertex(v_sub, s1, s2);
                            sub_census.classes[f].is_certified()
                        }
                    };
                    if level0 {
                        let idx = v * 8 + k;
                        if kind == BorderKind::Edge {
                            run.e0 += 1;
                            if vert.regular {
                                run.e0_regular += 1;
                            }
                        } else {
                            run.v0 += 1;
                            if vert.regular {
                                run.v0_regular += 1;
                            }
                        }
                        now_level0.push(idx);
                    }
                }
            }
            Ok(SubResult {
                run,
                now_level0,
                monotone_violations: sub_census.monotone_violations,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut monotone_violations = 0;
    let mut runs = Vec::with_capacity(sub_results.len());
    for sr in sub_results {
        for idx in sr.now_level0 {
            if !borders[idx].level0 {
                borders[idx].conflicts.push(sr.run.removed);
            }
        }
        monotone_violations += sr.monotone_violations;
        runs.push(sr.run);
    }

    // Charging scheme for slice borders: every regular 0-level slice border
    // whose two incident boundary edges are not popular charges the two
    // 1-level borders reached along the circles away from its slice.
    let mut charge_violations = 0u64;
    for v in 0..arr.num_vertices() {
        if !arr.vertices[v].regular {
            continue;
        }
        for (s1, s2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
            let f = arr.face_at_vertex(v, s1, s2);
            if !census.classes[f].is_certified() {
                continue;
            }
            let edge_on_c1 = arr.edge_at_vertex_in_hemisphere(v, 1, s2);
            let edge_on_c2 = arr.edge_at_vertex_in_hemisphere(v, 0, s1);
            if popular_edge[edge_on_c1] || popular_edge[edge_on_c2] {
                continue;
            }
            // Neighbor along circle c1 (slot 0): kept sign is s1 on c1.
            for (away_slot, kept_slot, kept_sign) in [(1usize, 0usize, s1), (0, 1, s2)] {
                let away_sign = if away_slot == 1 { -s2 } else { -s1 };
                let e_away = arr.edge_at_vertex_in_hemisphere(v, away_slot, away_sign);
                let edge = &arr.edges[e_away];
                let v1 = if edge.endpoints.0 == v {
                    edge.endpoints.1
                } else {
                    edge.endpoints.0
                };
                let kept_circle = if kept_slot == 0 {
                    arr.vertices[v].circles.0
                } else {
                    arr.vertices[v].circles.1
                };
                debug_assert_eq!(edge.circle, kept_circle);
                let (d1, d2) = arr.vertices[v1].circles;
                let other_circle = if d1 == kept_circle { d2 } else { d1 };
                let sign_of_v = arr.vertices[v].signs[other_circle];
                debug_assert_ne!(sign_of_v, 0);
                let (t1, t2) = if d1 == kept_circle {
                    (kept_sign, sign_of_v)
                } else {
                    (sign_of_v, kept_sign)
                };
                let combo = match (t1, t2) {
                    (1, 1) => 4,
                    (1, -1) => 5,
                    (-1, 1) => 6,
                    _ => 7,
                };
                let idx = v1 * 8 + combo;
                debug_assert_eq!(borders[idx].kind, BorderKind::Slice);
                if borders[idx].level0 {
                    charge_violations += 1;
                } else {
                    borders[idx].charges += 1;
                }
            }
        }
    }

    let mut double_charged_weight1 = 0;
    let mut double_charged_weight1_regular = 0;
    for b in &borders {
        if b.kind == BorderKind::Slice && b.weight() == Some(1) && b.charges >= 2 {
            double_charged_weight1 += 1;
            if b.regular {
                double_charged_weight1_regular += 1;
            }
        }
    }

    Ok(RemovalAnalysis {
        runs,
        borders,
        monotone_violations,
        double_charged_weight1,
        double_charged_weight1_regular,
        charge_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::circles_of;
    use crate::body::build_separation_system;
    use crate::body::test_bodies::collinear_cubes;
    use crate::Rat;

    fn collinear_census(
        n: usize,
    ) -> (
        SeparationSystem<Rat>,
        Arrangement<Rat>,
        Census<Rat>,
    ) {
        let sys = build_separation_system(collinear_cubes(n), 7).unwrap();
        let arr = build_arrangement(&circles_of(&sys)).unwrap();
        let active: Vec<usize> = (0..n).collect();
        // The feasible direction cone of the collinear family is a narrow
        // cap around the x axis; hand it the probes a direction-grid oracle
        // would find.
        let policy = ProbePolicy {
            probes_per_face: 5,
            extra_probes: vec![Ray::from_ints(&[1, 0, 0]), Ray::from_ints(&[-1, 0, 0])],
        };
        let census = classify_faces(&arr, &sys, &active, &policy, &[]).unwrap();
        (sys, arr, census)
    }

    #[test]
    fn collinear_three_classification() {
        let (_sys, arr, census) = collinear_census(3);
        assert_eq!(arr.num_faces(), 8);
        assert_eq!(census.acyclic_faces, 6);
        assert_eq!(census.certified_faces, 2);
        assert_eq!(census.certified_unoriented.len(), 1);
        assert_eq!(census.order_mismatches, 0);
        let expected: BTreeSet<OrientedOrder> =
            [OrientedOrder(vec![0, 1, 2]), OrientedOrder(vec![2, 1, 0])]
                .into_iter()
                .collect();
        assert_eq!(census.certified_oriented, expected);
    }

    #[test]
    fn collinear_three_popular_census() {
        let (_sys, arr, census) = collinear_census(3);
        let popular = popular_census(&census, &arr);
        assert!(popular.popular_vertices.is_empty());
        assert!(popular.popular_edges.is_empty());
        assert_eq!(popular.e0, 0);
        // The two certified faces are antipodal; each touches its boundary
        // vertices once.
        assert_eq!(popular.degenerate_vertices, 6);
        assert_eq!(popular.degenerate_popular, 0);
    }

    #[test]
    fn two_bodies_single_unoriented_permutation() {
        let (_sys, arr, census) = collinear_census(2);
        assert_eq!(arr.num_faces(), 2);
        assert_eq!(census.certified_faces, 2);
        assert_eq!(census.certified_unoriented.len(), 1);
    }

    #[test]
    fn removal_analysis_collinear_four() {
        let (sys, arr, census) = collinear_census(4);
        assert_eq!(census.certified_faces, 2);
        let policy = ProbePolicy {
            probes_per_face: 5,
            extra_probes: vec![Ray::from_ints(&[1, 0, 0]), Ray::from_ints(&[-1, 0, 0])],
        };
        let analysis = conflict_weights(&arr, &sys, &census, &policy).unwrap();
        assert_eq!(analysis.runs.len(), 4);
        assert_eq!(analysis.monotone_violations, 0);
        assert_eq!(analysis.charge_violations, 0);
        // Weights are only defined for 1-level borders.
        for b in &analysis.borders {
            if b.level0 {
                assert_eq!(b.weight(), None);
            }
            if let Some(w) = b.weight() {
                assert!(w >= 1);
            }
        }
        // Exact double-counting: the total weight recomputed per removal
        // equals the survival identity. For edge borders:
        let n = 4i64;
        let e0_reg: i64 = {
            let popular = popular_census(&census, &arr);
            popular.e0_regular as i64
        };
        let e0_deg: i64 = {
            let popular = popular_census(&census, &arr);
            (popular.e0 - popular.e0_regular) as i64
        };
        let lhs: i64 = analysis.runs.iter().map(|r| r.e0 as i64).sum();
        let w1: i64 = analysis.e1_weighted() as i64;
        assert_eq!(lhs, (n - 4) * e0_reg + (n - 3) * e0_deg + w1);
    }

    #[test]
    fn census_rejects_single_body() {
        let sys = build_separation_system(collinear_cubes(2), 1).unwrap();
        let arr = build_arrangement(&circles_of(&sys)).unwrap();
        assert!(classify_faces(&arr, &sys, &[0], &ProbePolicy::default(), &[]).is_err());
    }
}
