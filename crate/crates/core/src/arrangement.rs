//! The arrangement of separating-plane great circles on the direction
//! sphere (d=3), or of antipodal direction-point pairs on the circle (d=2).
//!
//! Construction is exact throughout: vertices are cross products of circle
//! normals kept as rational rays, vertices are sorted angularly along each
//! circle with exact orientation predicates, and faces are identified by
//! their sign vectors (which identify cells of a central plane arrangement
//! uniquely). Every face carries a verified strict interior sample.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::body::SeparationSystem;
use crate::error::Error;
use crate::linalg::{Ray, Vector};
use crate::scalar::Scalar;

pub type CircleId = usize;
pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// Great circle induced by the separating hyperplane of a body pair.
///
/// The positive hemisphere `{u : u . normal > 0}` consists of the directions
/// of lines crossing the hyperplane from the negative to the positive side,
/// i.e. meeting body `pair.0` before body `pair.1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreatCircle<S: Scalar> {
    pub pair: (usize, usize),
    pub normal: Vector<S>,
}

/// One circle per hyperplane, orientation preserved. Normals are rescaled by
/// a positive factor into canonical form.
pub fn circles_of<S: Scalar>(sys: &SeparationSystem<S>) -> Vec<GreatCircle<S>> {
    sys.hyperplanes
        .iter()
        .map(|h| {
            let mut coords = h.normal.coords().to_vec();
            let _ = S::canonicalize_direction(&mut coords);
            GreatCircle {
                pair: h.pair,
                normal: Vector::new(coords),
            }
        })
        .collect()
}

/// The two antipodal intersection rays of two non-parallel circles (d=3).
pub fn intersect_circles<S: Scalar>(
    c1: &GreatCircle<S>,
    c2: &GreatCircle<S>,
) -> Result<(Ray<S>, Ray<S>), Error> {
    let cr = c1.normal.cross(&c2.normal);
    if cr.is_zero() {
        return Err(Error::ParallelCircles(c1.pair.0, c2.pair.0));
    }
    let r = Ray::new(cr)?;
    let anti = r.antipode();
    Ok((r, anti))
}

#[derive(Debug, Clone)]
pub struct ArrVertex<S: Scalar> {
    pub ray: Ray<S>,
    /// The two circles through this vertex; equal entries in d=2.
    pub circles: (CircleId, CircleId),
    /// Four distinct body indices among the two circle pairs (d=3).
    pub regular: bool,
    /// Sign against every circle normal; zero exactly at the own circles.
    pub signs: Vec<i8>,
    /// Incident edges (4 in d=3 general position; empty in d=2).
    pub edges: Vec<EdgeId>,
    /// Incident faces; in d=3 indexed by the sign combo
    /// `[(+,+),(+,-),(-,+),(-,-)]` against `circles`; 2 adjacent arcs in d=2.
    pub faces: Vec<FaceId>,
}

#[derive(Debug, Clone)]
pub struct ArrEdge<S: Scalar> {
    pub circle: CircleId,
    /// Endpoints in counterclockwise order along the circle.
    pub endpoints: (VertexId, VertexId),
    /// A point strictly inside the open arc.
    pub sample: Ray<S>,
    /// Faces on the (positive, negative) side of the carrying circle.
    pub side_faces: (FaceId, FaceId),
}

#[derive(Debug, Clone)]
pub struct ArrFace<S: Scalar> {
    /// Hemisphere per circle, +1 or -1; never zero.
    pub signs: Vec<i8>,
    /// Boundary edges as one directed cycle (empty for hemisphere faces).
    pub edges: Vec<EdgeId>,
    /// Boundary vertices in cycle order.
    pub vertices: Vec<VertexId>,
    /// Verified strict interior sample.
    pub sample: Ray<S>,
}

/// Reference to the unique cell whose closure conditions a query ray
/// satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRef {
    Vertex(VertexId),
    Edge(EdgeId),
    Face(FaceId),
}

#[derive(Debug, Clone)]
pub struct Arrangement<S: Scalar> {
    pub dim: usize,
    pub circles: Vec<GreatCircle<S>>,
    pub vertices: Vec<ArrVertex<S>>,
    pub edges: Vec<ArrEdge<S>>,
    pub faces: Vec<ArrFace<S>>,
    /// Per circle, the vertex cycle in counterclockwise order (d=3).
    circle_cycles: Vec<Vec<VertexId>>,
    /// Per circle, edge `i` joins cycle position `i` to `i+1` (d=3).
    circle_edges: Vec<Vec<EdgeId>>,
    /// Global vertex cycle on the unit circle (d=2).
    d2_cycle: Vec<VertexId>,
    face_lookup: HashMap<Vec<i8>, FaceId>,
    vertex_lookup: HashMap<Ray<S>, VertexId>,
}

/// Exact counterclockwise comparator for plane coordinates around the
/// origin, starting at the positive x-axis.
fn angle_cmp<S: Scalar>(a: &(S, S), b: &(S, S)) -> Ordering {
    fn half<S: Scalar>(p: &(S, S)) -> u8 {
        if p.1.is_positive() || (p.1.is_zero() && p.0.is_positive()) {
            0
        } else {
            1
        }
    }
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let cross = a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone();
    match cross.sign() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// A deterministic rational basis of the plane orthogonal to `normal`, with
/// `(a, b, normal)` positively oriented.
fn circle_basis<S: Scalar>(normal: &Vector<S>) -> (Vector<S>, Vector<S>) {
    let abs: Vec<S> = normal.coords().iter().map(|c| c.abs()).collect();
    let mut k = 0;
    for i in 1..3 {
        if abs[i] < abs[k] {
            k = i;
        }
    }
    let mut axis = vec![S::zero(); 3];
    axis[k] = S::one();
    let a = normal.cross(&Vector::new(axis));
    debug_assert!(!a.is_zero());
    let b = normal.cross(&a);
    // (a, b) is right-handed with respect to -normal under b = n x a; flip to
    // get counterclockwise as seen from the +normal side.
    (a, b.neg())
}

fn plane_coords<S: Scalar>(u: &Vector<S>, a: &Vector<S>, b: &Vector<S>) -> (S, S) {
    (u.dot(a), u.dot(b))
}

impl<S: Scalar> Arrangement<S> {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn face_by_signs(&self, signs: &[i8]) -> Option<FaceId> {
        self.face_lookup.get(signs).copied()
    }

    pub fn vertex_by_ray(&self, ray: &Ray<S>) -> Option<VertexId> {
        self.vertex_lookup.get(ray).copied()
    }

    /// Face incident to vertex `v` inside the slice with the given signs
    /// against the vertex's two circles (d=3).
    pub fn face_at_vertex(&self, v: VertexId, s1: i8, s2: i8) -> FaceId {
        debug_assert_eq!(self.dim, 3);
        let idx = (if s1 > 0 { 0 } else { 1 }) * 2 + (if s2 > 0 { 0 } else { 1 });
        self.vertices[v].faces[idx]
    }

    /// The unique edge incident to `v` inside the open hemisphere given by
    /// one of the vertex's circles (`slot` 0 or 1) and a sign; the edge lies
    /// on the other circle (d=3).
    pub fn edge_at_vertex_in_hemisphere(&self, v: VertexId, slot: usize, sign: i8) -> EdgeId {
        debug_assert_eq!(self.dim, 3);
        let vert = &self.vertices[v];
        let hemi_circle = if slot == 0 {
            vert.circles.0
        } else {
            vert.circles.1
        };
        let other_circle = if slot == 0 {
            vert.circles.1
        } else {
            vert.circles.0
        };
        for &e in &vert.edges {
            let edge = &self.edges[e];
            if edge.circle != other_circle {
                continue;
            }
            let s = edge
                .sample
                .vector()
                .dot(&self.circles[hemi_circle].normal)
                .sign();
            debug_assert_ne!(s, 0);
            if s == sign {
                return e;
            }
        }
        unreachable!("vertex is incident to one edge per hemisphere");
    }

    /// `k` distinct rays strictly inside the face, deterministic per
    /// `(face, k)`; element `j` of the sequence does not depend on `k`.
    pub fn interior_samples(&self, f: FaceId, k: usize) -> Vec<Ray<S>> {
        let face = &self.faces[f];
        let mut out = Vec::with_capacity(k);
        if k == 0 {
            return out;
        }
        out.push(face.sample.clone());
        if k == 1 {
            return out;
        }
        // Blend the base sample toward a fixed boundary direction; positive
        // combinations of an interior ray and a closure ray stay interior.
        let toward = match face.vertices.first() {
            Some(&v0) => self.vertices[v0].ray.vector().clone(),
            None => {
                if self.circles.is_empty() {
                    let mut c = vec![S::zero(); self.dim];
                    c[1] = S::one();
                    Vector::new(c)
                } else {
                    // Hemisphere face: any direction on the circle.
                    let n = &self.circles[0].normal;
                    if self.dim == 2 {
                        n.perp()
                    } else {
                        circle_basis(n).0
                    }
                }
            }
        };
        let mut weight = S::one() + S::one();
        for _ in 1..k {
            let cand = face.sample.vector().scale(&weight).add(&toward);
            let ray = Ray::new(cand).expect("interior blend is nonzero");
            debug_assert!(self.signs_match(ray.vector(), &face.signs));
            out.push(ray);
            weight = weight.clone() + weight;
        }
        out
    }

    fn signs_match(&self, u: &Vector<S>, signs: &[i8]) -> bool {
        self.circles
            .iter()
            .zip(signs)
            .all(|(c, &s)| u.dot(&c.normal).sign() == s)
    }

    /// Locate the unique cell containing a query direction.
    pub fn locate(&self, u: &Ray<S>) -> Result<CellRef, Error> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, u.dim()));
        }
        let signs: Vec<i8> = self
            .circles
            .iter()
            .map(|c| u.vector().dot(&c.normal).sign())
            .collect();
        let zeros: Vec<CircleId> = (0..signs.len()).filter(|&c| signs[c] == 0).collect();
        match zeros.len() {
            0 => self
                .face_by_signs(&signs)
                .map(CellRef::Face)
                .ok_or_else(|| Error::InvalidConfig("sign vector matches no face".into())),
            1 if self.dim == 3 => {
                let c = zeros[0];
                let cycle = &self.circle_cycles[c];
                if cycle.is_empty() {
                    return Err(Error::BareCirclePoint);
                }
                let (a, b) = circle_basis(&self.circles[c].normal);
                let key = plane_coords(u.vector(), &a, &b);
                let pos = cycle.partition_point(|&v| {
                    angle_cmp(
                        &plane_coords(self.vertices[v].ray.vector(), &a, &b),
                        &key,
                    ) == Ordering::Less
                });
                let idx = (pos + cycle.len() - 1) % cycle.len();
                Ok(CellRef::Edge(self.circle_edges[c][idx]))
            }
            1 => self
                .vertex_by_ray(u)
                .map(CellRef::Vertex)
                .ok_or(Error::BareCirclePoint),
            2 if self.dim == 3 => self
                .vertex_by_ray(u)
                .map(CellRef::Vertex)
                .ok_or_else(|| Error::InvalidConfig("ray on two circles is not a vertex".into())),
            _ => Err(Error::ConcurrentCircles(zeros[0], zeros[1], zeros[2])),
        }
    }

    /// Sum of squared face complexities (edge counts); used by the zone
    /// metric.
    pub fn face_complexity_square_sum(&self) -> u64 {
        self.faces
            .iter()
            .map(|f| (f.edges.len() as u64).pow(2))
            .sum()
    }
}

/// Shrink a verified point to small dyadic coordinates when the scalar
/// supports it, keeping exactness: the rounded candidate is re-verified and
/// the original is kept on failure.
fn shrink_verified<S: Scalar>(cand: Vector<S>, verify: impl Fn(&Vector<S>) -> bool) -> Vector<S> {
    debug_assert!(verify(&cand));
    if cand.coords().iter().map(|c| c.complexity()).max() <= Some(128) {
        return cand;
    }
    for bits in [24u32, 48, 96, 192] {
        let rounded: Vec<S> = cand.coords().iter().map(|c| c.dyadic_round(bits)).collect();
        let rv = Vector::new(rounded);
        if rv.is_zero() {
            continue;
        }
        if verify(&rv) {
            return rv;
        }
    }
    cand
}

/// Build the arrangement of the given circles; their normals must be in
/// general position.
pub fn build_arrangement<S: Scalar>(circles: &[GreatCircle<S>]) -> Result<Arrangement<S>, Error> {
    let dim = circles
        .first()
        .map(|c| c.normal.dim())
        .unwrap_or(3);
    match dim {
        3 => build_d3(circles),
        2 => build_d2(circles),
        _ => Err(Error::BadDimension(dim)),
    }
}

fn build_d3<S: Scalar>(circles: &[GreatCircle<S>]) -> Result<Arrangement<S>, Error> {
    let m = circles.len();
    let mut arr = Arrangement {
        dim: 3,
        circles: circles.to_vec(),
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
        circle_cycles: vec![Vec::new(); m],
        circle_edges: vec![Vec::new(); m],
        d2_cycle: Vec::new(),
        face_lookup: HashMap::new(),
        vertex_lookup: HashMap::new(),
    };

    // Vertices: all pairwise intersections, deduplicated by ray. A collision
    // means three circles share a point.
    for a in 0..m {
        for b in (a + 1)..m {
            let cr = circles[a].normal.cross(&circles[b].normal);
            if cr.is_zero() {
                return Err(Error::ParallelCircles(a, b));
            }
            let ray = Ray::new(cr)?;
            for r in [ray.clone(), ray.antipode()] {
                if let Some(&prev) = arr.vertex_lookup.get(&r) {
                    let (pa, pb) = arr.vertices[prev].circles;
                    let third = if a != pa && a != pb { a } else { b };
                    return Err(Error::ConcurrentCircles(pa, pb, third));
                }
                let id = arr.vertices.len();
                let pa = circles[a].pair;
                let pb = circles[b].pair;
                let mut idx = vec![pa.0, pa.1, pb.0, pb.1];
                idx.sort_unstable();
                idx.dedup();
                arr.vertex_lookup.insert(r.clone(), id);
                arr.vertices.push(ArrVertex {
                    ray: r,
                    circles: (a, b),
                    regular: idx.len() == 4,
                    signs: Vec::new(),
                    edges: Vec::new(),
                    faces: Vec::new(),
                });
            }
        }
    }

    // Vertex sign vectors.
    for v in 0..arr.vertices.len() {
        let signs: Vec<i8> = circles
            .iter()
            .map(|c| arr.vertices[v].ray.vector().dot(&c.normal).sign())
            .collect();
        let (c1, c2) = arr.vertices[v].circles;
        for (c, &s) in signs.iter().enumerate() {
            if s == 0 && c != c1 && c != c2 {
                return Err(Error::ConcurrentCircles(c1, c2, c));
            }
        }
        arr.vertices[v].signs = signs;
    }

    // Angular vertex cycles per circle.
    for c in 0..m {
        let mut on_circle: Vec<VertexId> = (0..arr.vertices.len())
            .filter(|&v| {
                let (c1, c2) = arr.vertices[v].circles;
                c1 == c || c2 == c
            })
            .collect();
        let (a, b) = circle_basis(&circles[c].normal);
        let mut keyed: Vec<(VertexId, (S, S))> = on_circle
            .drain(..)
            .map(|v| {
                let key = plane_coords(arr.vertices[v].ray.vector(), &a, &b);
                (v, key)
            })
            .collect();
        keyed.sort_by(|x, y| angle_cmp(&x.1, &y.1));
        for w in keyed.windows(2) {
            if angle_cmp(&w[0].1, &w[1].1) == Ordering::Equal {
                let (c1, c2) = arr.vertices[w[0].0].circles;
                let (d1, d2) = arr.vertices[w[1].0].circles;
                let other = [c1, c2, d1, d2].into_iter().find(|&x| x != c).unwrap();
                return Err(Error::ConcurrentCircles(c, other, other));
            }
        }
        arr.circle_cycles[c] = keyed.into_iter().map(|(v, _)| v).collect();
    }

    // Edges between consecutive cycle vertices.
    for c in 0..m {
        let cycle = arr.circle_cycles[c].clone();
        let count = cycle.len();
        for i in 0..count {
            let from = cycle[i];
            let to = cycle[(i + 1) % count];
            let sum = arr.vertices[from]
                .ray
                .vector()
                .add(arr.vertices[to].ray.vector());
            let mid = if sum.is_zero() {
                // Antipodal endpoints (two-circle case): rotate a quarter
                // turn counterclockwise along the circle.
                circles[c].normal.cross(arr.vertices[from].ray.vector())
            } else {
                sum
            };
            let id = arr.edges.len();
            arr.edges.push(ArrEdge {
                circle: c,
                endpoints: (from, to),
                sample: Ray::new(mid)?,
                side_faces: (usize::MAX, usize::MAX),
            });
            arr.circle_edges[c].push(id);
            arr.vertices[from].edges.push(id);
            arr.vertices[to].edges.push(id);
        }
    }

    // Faces adjacent to each edge, via the edge-interior sign vector. The
    // signs come from the endpoints: the open arc crosses no circle, so per
    // circle the endpoint signs agree or exactly one endpoint lies on it.
    let mut face_edges: Vec<Vec<EdgeId>> = Vec::new();
    for e in 0..arr.edges.len() {
        let carrier = arr.edges[e].circle;
        let (from, to) = arr.edges[e].endpoints;
        let mut signs = vec![0i8; m];
        for c in 0..m {
            if c == carrier {
                continue;
            }
            let sf = arr.vertices[from].signs[c];
            let st = arr.vertices[to].signs[c];
            signs[c] = match (sf, st) {
                (0, 0) => arr.edges[e].sample.vector().dot(&circles[c].normal).sign(),
                (0, s) | (s, 0) => s,
                (a, b) if a == b => a,
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "edge {e} crosses circle {c} away from any vertex"
                    )))
                }
            };
            if signs[c] == 0 {
                return Err(Error::ConcurrentCircles(carrier, c, c));
            }
        }
        let mut ids = [0usize; 2];
        for (slot, side) in [1i8, -1].into_iter().enumerate() {
            signs[carrier] = side;
            let id = match arr.face_lookup.get(&signs) {
                Some(&f) => f,
                None => {
                    let f = arr.faces.len();
                    arr.face_lookup.insert(signs.clone(), f);
                    arr.faces.push(ArrFace {
                        signs: signs.clone(),
                        edges: Vec::new(),
                        vertices: Vec::new(),
                        sample: arr.edges[e].sample.clone(), // placeholder
                    });
                    face_edges.push(Vec::new());
                    f
                }
            };
            ids[slot] = id;
            face_edges[id].push(e);
        }
        signs[carrier] = 0;
        arr.edges[e].side_faces = (ids[0], ids[1]);
    }

    if m == 1 {
        for side in [1i8, -1] {
            let signs = vec![side];
            let f = arr.faces.len();
            arr.face_lookup.insert(signs.clone(), f);
            let sample = Ray::new(if side == 1 {
                circles[0].normal.clone()
            } else {
                circles[0].normal.neg()
            })?;
            arr.faces.push(ArrFace {
                signs,
                edges: Vec::new(),
                vertices: Vec::new(),
                sample,
            });
            face_edges.push(Vec::new());
        }
    } else if m == 0 {
        let f = arr.faces.len();
        arr.face_lookup.insert(Vec::new(), f);
        arr.faces.push(ArrFace {
            signs: Vec::new(),
            edges: Vec::new(),
            vertices: Vec::new(),
            sample: Ray::from_ints(&[1, 0, 0]),
        });
        face_edges.push(Vec::new());
    }

    // Order each face boundary into a directed cycle and list its vertices.
    for f in 0..arr.faces.len() {
        let edges = &face_edges[f];
        if edges.is_empty() {
            continue;
        }
        let mut at: HashMap<VertexId, Vec<EdgeId>> = HashMap::new();
        for &e in edges {
            let (x, y) = arr.edges[e].endpoints;
            at.entry(x).or_default().push(e);
            at.entry(y).or_default().push(e);
        }
        debug_assert!(at.values().all(|es| es.len() == 2));
        let start = *edges.iter().min().unwrap();
        let mut cycle = vec![start];
        let mut verts = vec![arr.edges[start].endpoints.0];
        let mut cur_vertex = arr.edges[start].endpoints.1;
        let mut cur_edge = start;
        while cur_vertex != verts[0] {
            verts.push(cur_vertex);
            let next = at[&cur_vertex]
                .iter()
                .copied()
                .find(|&e| e != cur_edge)
                .expect("boundary walk");
            cycle.push(next);
            let (x, y) = arr.edges[next].endpoints;
            cur_vertex = if x == cur_vertex { y } else { x };
            cur_edge = next;
            if cycle.len() > edges.len() {
                panic!("face boundary is not a single cycle");
            }
        }
        debug_assert_eq!(cycle.len(), edges.len());
        debug_assert_eq!(verts.len(), edges.len());
        arr.faces[f].edges = cycle;
        arr.faces[f].vertices = verts;
    }

    // Verified interior samples.
    for f in 0..arr.faces.len() {
        let sample = face_sample(&arr, f)?;
        arr.faces[f].sample = sample;
    }

    // Vertex-face incidence by sign-combo lookup.
    for v in 0..arr.vertices.len() {
        let (c1, c2) = arr.vertices[v].circles;
        let mut faces = Vec::with_capacity(4);
        let mut key = arr.vertices[v].signs.clone();
        for s1 in [1i8, -1] {
            for s2 in [1i8, -1] {
                key[c1] = s1;
                key[c2] = s2;
                let f = *arr
                    .face_lookup
                    .get(&key)
                    .expect("every vertex slice holds a face");
                faces.push(f);
            }
        }
        arr.vertices[v].faces = faces;
    }

    validate_d3_counts(&arr);
    Ok(arr)
}

fn validate_d3_counts<S: Scalar>(arr: &Arrangement<S>) {
    let m = arr.circles.len();
    if m >= 2 {
        debug_assert_eq!(arr.num_vertices(), m * (m - 1));
        debug_assert_eq!(arr.num_edges(), 2 * m * (m - 1));
        debug_assert_eq!(arr.num_faces(), m * (m - 1) + 2);
        debug_assert!(arr.vertices.iter().all(|v| v.edges.len() == 4));
    }
}

/// Compute a verified strict interior sample for a face: the vertex-ray sum
/// when it verifies, otherwise an edge midpoint pushed off its circle by an
/// exact margin-safe amount.
fn face_sample<S: Scalar>(arr: &Arrangement<S>, f: FaceId) -> Result<Ray<S>, Error> {
    let face = &arr.faces[f];
    let verify = |u: &Vector<S>| arr.signs_match(u, &face.signs);

    if face.edges.is_empty() {
        // Hemisphere (m=1) or whole sphere (m=0): the existing placeholder
        // sample is already correct by construction.
        debug_assert!(verify(face.sample.vector()));
        return Ok(face.sample.clone());
    }

    let mut sum = Vector::zero(arr.dim);
    for &v in &face.vertices {
        sum = sum.add(arr.vertices[v].ray.vector());
    }
    if !sum.is_zero() && verify(&sum) {
        return Ray::new(shrink_verified(sum, verify));
    }

    for &e in &face.edges {
        let edge = &arr.edges[e];
        let c = edge.circle;
        let side = face.signs[c];
        let mid = edge.sample.vector();
        let push = Ray::new(if side == 1 {
            arr.circles[c].normal.clone()
        } else {
            arr.circles[c].normal.neg()
        })?;
        // Margin-safe push: smaller than every strict margin of the midpoint
        // against the other circles.
        let mut eps: Option<S> = None;
        for (ci, circ) in arr.circles.iter().enumerate() {
            if ci == c {
                continue;
            }
            let margin = mid.dot(&circ.normal).abs();
            let drift = push.vector().dot(&circ.normal).abs() + S::one();
            let bound = margin / drift;
            eps = Some(match eps {
                None => bound,
                Some(prev) => prev.min(bound),
            });
        }
        let eps = eps.expect("face with edges has at least two circles")
            / (S::one() + S::one());
        let cand = mid.add(&push.vector().scale(&eps));
        if verify(&cand) {
            return Ray::new(shrink_verified(cand, verify));
        }
    }
    Err(Error::InvalidConfig(format!(
        "no interior sample found for face {f}"
    )))
}

fn build_d2<S: Scalar>(circles: &[GreatCircle<S>]) -> Result<Arrangement<S>, Error> {
    let m = circles.len();
    let mut arr = Arrangement {
        dim: 2,
        circles: circles.to_vec(),
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
        circle_cycles: Vec::new(),
        circle_edges: Vec::new(),
        d2_cycle: Vec::new(),
        face_lookup: HashMap::new(),
        vertex_lookup: HashMap::new(),
    };

    for (c, circ) in circles.iter().enumerate() {
        let dir = Ray::new(circ.normal.perp())?;
        for r in [dir.clone(), dir.antipode()] {
            if let Some(&prev) = arr.vertex_lookup.get(&r) {
                return Err(Error::ParallelCircles(arr.vertices[prev].circles.0, c));
            }
            let id = arr.vertices.len();
            arr.vertex_lookup.insert(r.clone(), id);
            arr.vertices.push(ArrVertex {
                ray: r,
                circles: (c, c),
                regular: false,
                signs: Vec::new(),
                edges: Vec::new(),
                faces: Vec::new(),
            });
        }
    }

    for v in 0..arr.vertices.len() {
        let signs: Vec<i8> = circles
            .iter()
            .map(|c| arr.vertices[v].ray.vector().dot(&c.normal).sign())
            .collect();
        arr.vertices[v].signs = signs;
    }

    // One global angular cycle; arcs between consecutive points are the
    // top-dimensional cells ("faces") of the d=2 arrangement.
    let mut keyed: Vec<(VertexId, (S, S))> = (0..arr.vertices.len())
        .map(|v| {
            let c = arr.vertices[v].ray.vector().coords();
            (v, (c[0].clone(), c[1].clone()))
        })
        .collect();
    keyed.sort_by(|x, y| angle_cmp(&x.1, &y.1));
    arr.d2_cycle = keyed.into_iter().map(|(v, _)| v).collect();

    let count = arr.d2_cycle.len();
    for i in 0..count {
        let from = arr.d2_cycle[i];
        let to = arr.d2_cycle[(i + 1) % count];
        let sum = arr.vertices[from]
            .ray
            .vector()
            .add(arr.vertices[to].ray.vector());
        let mid = if sum.is_zero() {
            arr.vertices[from].ray.vector().perp()
        } else {
            sum
        };
        let sample = Ray::new(mid)?;
        let signs: Vec<i8> = circles
            .iter()
            .map(|c| sample.vector().dot(&c.normal).sign())
            .collect();
        if signs.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfig(
                "arc midpoint lies on a direction pair".into(),
            ));
        }
        let f = arr.faces.len();
        if arr.face_lookup.insert(signs.clone(), f).is_some() {
            return Err(Error::InvalidConfig("duplicate arc sign vector".into()));
        }
        arr.faces.push(ArrFace {
            signs,
            edges: Vec::new(),
            vertices: vec![from, to],
            sample,
        });
        arr.vertices[from].faces.push(f);
        arr.vertices[to].faces.push(f);
    }

    if m == 0 {
        let f = arr.faces.len();
        arr.face_lookup.insert(Vec::new(), f);
        arr.faces.push(ArrFace {
            signs: Vec::new(),
            edges: Vec::new(),
            vertices: Vec::new(),
            sample: Ray::from_ints(&[1, 0]),
        });
    }

    Ok(arr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn circle(pair: (usize, usize), normal: &[i64]) -> GreatCircle<Rat> {
        GreatCircle {
            pair,
            normal: Vector::from_ints(normal),
        }
    }

    fn octant() -> Arrangement<Rat> {
        build_arrangement(&[
            circle((0, 1), &[1, 0, 0]),
            circle((0, 2), &[0, 1, 0]),
            circle((1, 2), &[0, 0, 1]),
        ])
        .unwrap()
    }

    #[test]
    fn intersect_circles_examples() {
        let c1 = circle((0, 1), &[1, 0, 0]);
        let c2 = circle((0, 2), &[0, 1, 0]);
        let (r, anti) = intersect_circles(&c1, &c2).unwrap();
        assert_eq!(r, Ray::from_ints(&[0, 0, 1]));
        assert_eq!(anti, Ray::from_ints(&[0, 0, -1]));

        let c3 = circle((1, 2), &[0, 0, 1]);
        let (r, _) = intersect_circles(&c1, &c3).unwrap();
        assert_eq!(r, Ray::from_ints(&[0, -1, 0]));

        let c4 = circle((0, 1), &[1, 1, 0]);
        let c5 = circle((0, 2), &[1, -1, 0]);
        let (r, anti) = intersect_circles(&c4, &c5).unwrap();
        assert_eq!(r.canonical(), Ray::from_ints(&[0, 0, 1]));
        assert_eq!(anti.canonical(), Ray::from_ints(&[0, 0, 1]));
        assert_ne!(r, anti);

        let c6 = circle((1, 2), &[2, 2, 0]);
        assert!(matches!(
            intersect_circles(&c4, &c6),
            Err(Error::ParallelCircles(_, _))
        ));
    }

    #[test]
    fn octant_counts() {
        let arr = octant();
        assert_eq!(arr.num_vertices(), 6);
        assert_eq!(arr.num_edges(), 12);
        assert_eq!(arr.num_faces(), 8);
        for v in &arr.vertices {
            assert_eq!(v.edges.len(), 4);
            assert_eq!(v.faces.len(), 4);
        }
    }

    #[test]
    fn two_circle_lunes() {
        let arr = build_arrangement(&[
            circle((0, 1), &[1, 0, 0]),
            circle((0, 2), &[0, 1, 0]),
        ])
        .unwrap();
        assert_eq!(arr.num_vertices(), 2);
        assert_eq!(arr.num_edges(), 4);
        assert_eq!(arr.num_faces(), 4);
        for f in 0..4 {
            let s = &arr.faces[f];
            assert!(arr.signs_match(s.sample.vector(), &s.signs));
        }
    }

    #[test]
    fn single_circle_hemispheres() {
        let arr = build_arrangement(&[circle((0, 1), &[1, 0, 0])]).unwrap();
        assert_eq!(arr.num_vertices(), 0);
        assert_eq!(arr.num_edges(), 0);
        assert_eq!(arr.num_faces(), 2);
    }

    #[test]
    fn concurrent_circles_are_rejected() {
        let err = build_arrangement(&[
            circle((0, 1), &[1, 0, 0]),
            circle((0, 2), &[0, 1, 0]),
            circle((1, 2), &[1, 1, 0]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::ConcurrentCircles(_, _, _)));
    }

    #[test]
    fn locate_in_octant() {
        let arr = octant();
        let f = arr.locate(&Ray::from_ints(&[1, 1, 1])).unwrap();
        match f {
            CellRef::Face(f) => assert_eq!(arr.faces[f].signs, vec![1, 1, 1]),
            other => panic!("expected face, got {other:?}"),
        }
        let v = arr.locate(&Ray::from_ints(&[0, 0, 1])).unwrap();
        match v {
            CellRef::Vertex(v) => {
                assert_eq!(arr.vertices[v].ray, Ray::from_ints(&[0, 0, 1]))
            }
            other => panic!("expected vertex, got {other:?}"),
        }
        // (1,1,0) lies on the circle with normal (0,0,1), in the (+,+)
        // quadrant of the other two.
        let e = arr.locate(&Ray::from_ints(&[1, 1, 0])).unwrap();
        match e {
            CellRef::Edge(e) => {
                let edge = &arr.edges[e];
                assert_eq!(arr.circles[edge.circle].normal, Vector::from_ints(&[0, 0, 1]));
                let pos_face = edge.side_faces.0;
                assert_eq!(arr.faces[pos_face].signs, vec![1, 1, 1]);
            }
            other => panic!("expected edge, got {other:?}"),
        }
    }

    #[test]
    fn octant_positive_face_sample_is_diagonal() {
        let arr = octant();
        let f = arr.face_by_signs(&[1, 1, 1]).unwrap();
        assert_eq!(arr.faces[f].sample, Ray::from_ints(&[1, 1, 1]));
    }

    #[test]
    fn interior_samples_are_distinct_verified_and_located() {
        let arr = octant();
        for f in 0..arr.num_faces() {
            let samples = arr.interior_samples(f, 5);
            assert_eq!(samples.len(), 5);
            for (i, s) in samples.iter().enumerate() {
                assert!(arr.signs_match(s.vector(), &arr.faces[f].signs));
                assert_eq!(arr.locate(s).unwrap(), CellRef::Face(f));
                for t in samples.iter().skip(i + 1) {
                    assert_ne!(s, t);
                }
            }
        }
    }

    #[test]
    fn antipodal_symmetry() {
        let arr = octant();
        for v in &arr.vertices {
            assert!(arr.vertex_by_ray(&v.ray.antipode()).is_some());
        }
        for f in &arr.faces {
            let neg: Vec<i8> = f.signs.iter().map(|s| -s).collect();
            assert!(arr.face_by_signs(&neg).is_some());
        }
    }

    #[test]
    fn d2_counts_and_locate() {
        let arr = build_arrangement(&[
            GreatCircle::<Rat> {
                pair: (0, 1),
                normal: Vector::from_ints(&[1, 0]),
            },
            GreatCircle {
                pair: (0, 2),
                normal: Vector::from_ints(&[0, 1]),
            },
            GreatCircle {
                pair: (1, 2),
                normal: Vector::from_ints(&[1, 1]),
            },
        ])
        .unwrap();
        assert_eq!(arr.num_vertices(), 6);
        assert_eq!(arr.num_faces(), 6);
        for f in 0..arr.num_faces() {
            let s = arr.faces[f].sample.clone();
            assert_eq!(arr.locate(&s).unwrap(), CellRef::Face(f));
        }
        for v in &arr.vertices {
            assert_eq!(v.faces.len(), 2);
        }
        let on_point = arr.locate(&Ray::from_ints(&[0, 1])).unwrap();
        assert!(matches!(on_point, CellRef::Vertex(_)));
    }

    #[test]
    fn d2_parallel_normals_rejected() {
        let err = build_arrangement(&[
            GreatCircle::<Rat> {
                pair: (0, 1),
                normal: Vector::from_ints(&[1, 0]),
            },
            GreatCircle {
                pair: (0, 2),
                normal: Vector::from_ints(&[-2, 0]),
            },
        ])
        .unwrap_err();
        assert!(matches!(err, Error::ParallelCircles(_, _)));
    }

    #[test]
    fn edge_hemisphere_association() {
        let arr = octant();
        for v in 0..arr.num_vertices() {
            for slot in [0, 1] {
                for sign in [1i8, -1] {
                    let e = arr.edge_at_vertex_in_hemisphere(v, slot, sign);
                    let edge = &arr.edges[e];
                    let hemi = if slot == 0 {
                        arr.vertices[v].circles.0
                    } else {
                        arr.vertices[v].circles.1
                    };
                    assert_eq!(
                        edge.sample.vector().dot(&arr.circles[hemi].normal).sign(),
                        sign
                    );
                    assert!(edge.endpoints.0 == v || edge.endpoints.1 == v);
                }
            }
        }
    }
}
