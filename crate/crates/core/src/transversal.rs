//! Line-transversal feasibility per direction and the induced stabbing
//! orders.
//!
//! A direction is feasible when one LP — base point constrained to a fixed
//! coordinate plane, one line parameter per body, convex weights over each
//! body's vertices — is feasible; the witness carries everything needed to
//! re-check membership by pure substitution, so witnesses survive body
//! removals without re-solving.

use crate::body::ConvexBody;
use crate::body::SeparationSystem;
use crate::error::Error;
use crate::linalg::{Ray, Vector};
use crate::lp::{lp_feasible, Feasibility, LinearSystem, Rel};
use crate::scalar::Scalar;

/// A body with its index in the original family; sub-families keep original
/// indices.
pub type BodyRef<'a, S> = (usize, &'a ConvexBody<S>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessEntry<S> {
    pub body: usize,
    pub t: S,
    /// Convex weights over the body's vertices for the point at parameter
    /// `t`; makes the certificate re-checkable by substitution alone.
    pub weights: Vec<S>,
}

/// An explicit transversal line certifying a set of stabbing positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineWitness<S: Scalar> {
    pub direction: Ray<S>,
    pub base_point: Vector<S>,
    pub entries: Vec<WitnessEntry<S>>,
}

impl<S: Scalar> LineWitness<S> {
    /// The oriented stabbing order: bodies sorted by line parameter.
    pub fn order(&self) -> OrientedOrder {
        let mut by_t: Vec<(&S, usize)> = self.entries.iter().map(|e| (&e.t, e.body)).collect();
        by_t.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));
        OrientedOrder(by_t.into_iter().map(|(_, b)| b).collect())
    }

    /// Exact substitution check against the given sub-family.
    pub fn verify(&self, bodies: &[BodyRef<'_, S>]) -> bool {
        bodies.iter().all(|&(idx, body)| {
            let Some(entry) = self.entries.iter().find(|e| e.body == idx) else {
                return false;
            };
            if entry.weights.len() != body.vertices().len() {
                return false;
            }
            if entry.weights.iter().any(|w| w.is_negative()) {
                return false;
            }
            let total = entry
                .weights
                .iter()
                .fold(S::zero(), |acc, w| acc + w.clone());
            if !total.is_one() {
                return false;
            }
            let mut hull_point = Vector::zero(body.dim());
            for (w, v) in entry.weights.iter().zip(body.vertices()) {
                hull_point = hull_point.add(&v.scale(w));
            }
            let line_point = self
                .base_point
                .add(&self.direction.vector().scale(&entry.t));
            hull_point == line_point
        })
    }

    /// The same line as a witness for the family without one body.
    pub fn without_body(&self, q: usize) -> LineWitness<S> {
        LineWitness {
            direction: self.direction.clone(),
            base_point: self.base_point.clone(),
            entries: self
                .entries
                .iter()
                .filter(|e| e.body != q)
                .cloned()
                .collect(),
        }
    }
}

/// A geometric permutation, oriented.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedOrder(pub Vec<usize>);

impl OrientedOrder {
    pub fn reversed(&self) -> OrientedOrder {
        OrientedOrder(self.0.iter().rev().copied().collect())
    }

    /// Canonical representative of the {order, reverse} pair.
    pub fn unoriented(&self) -> OrientedOrder {
        let rev = self.reversed();
        if self.0 <= rev.0 {
            self.clone()
        } else {
            rev
        }
    }
}

/// Outcome of reading the pairwise-order tournament at a direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOutcome {
    Order(OrientedOrder),
    /// The direction lies on the circle of this pair: a cell-boundary
    /// signal, not an error.
    OnCircle((usize, usize)),
    /// The tournament contains the given 3-cycle, so no transversal can
    /// have this direction.
    Cyclic([usize; 3]),
}

/// Topologically sort a tournament given by `beats` over `items`, or report
/// a witness 3-cycle. A tournament is a total order exactly when its win
/// counts are pairwise distinct.
pub(crate) fn sort_tournament(
    items: &[usize],
    beats: impl Fn(usize, usize) -> bool,
) -> Result<Vec<usize>, [usize; 3]> {
    let k = items.len();
    let mut scored: Vec<(usize, usize)> = items
        .iter()
        .map(|&a| {
            let wins = items.iter().filter(|&&b| b != a && beats(a, b)).count();
            (a, wins)
        })
        .collect();
    scored.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let transitive = scored
        .iter()
        .enumerate()
        .all(|(pos, &(_, wins))| wins == k - 1 - pos);
    if transitive {
        return Ok(scored.into_iter().map(|(a, _)| a).collect());
    }
    for x in 0..k {
        for y in (x + 1)..k {
            for z in (y + 1)..k {
                let (a, b, c) = (items[x], items[y], items[z]);
                if beats(a, b) && beats(b, c) && beats(c, a) {
                    return Err([a, b, c]);
                }
                if beats(b, a) && beats(c, b) && beats(a, c) {
                    return Err([b, a, c]);
                }
            }
        }
    }
    unreachable!("non-transitive tournament contains a 3-cycle");
}

/// Read the stabbing order of the (sub-)family at direction `u` from the
/// separating-plane signs: positive sign on pair (i, j) means i is met
/// first.
pub fn order_for_direction<S: Scalar>(
    u: &Ray<S>,
    sys: &SeparationSystem<S>,
    active: &[usize],
) -> OrderOutcome {
    let mut sign = vec![vec![0i8; sys.n()]; sys.n()];
    for (ai, &i) in active.iter().enumerate() {
        for &j in active.iter().skip(ai + 1) {
            let h = sys.hyperplane(i.min(j), i.max(j));
            let s = u.vector().dot(&h.normal).sign();
            if s == 0 {
                return OrderOutcome::OnCircle(h.pair);
            }
            sign[i][j] = s;
            sign[j][i] = -s;
        }
    }
    match sort_tournament(active, |a, b| sign[a][b] == 1) {
        Ok(seq) => OrderOutcome::Order(OrientedOrder(seq)),
        Err(cycle) => OrderOutcome::Cyclic(cycle),
    }
}

fn projection_basis<S: Scalar>(u: &Vector<S>) -> Vec<Vector<S>> {
    match u.dim() {
        2 => vec![u.perp()],
        3 => {
            // A spanning pair of the orthogonal plane plus the
            // axis-orthogonalized directions; the extra tests sharpen the
            // prescreen for families separated by thin coordinate gaps.
            let abs: Vec<S> = u.coords().iter().map(|c| c.abs()).collect();
            let mut k = 0;
            for i in 1..3 {
                if abs[i] < abs[k] {
                    k = i;
                }
            }
            let mut out = Vec::with_capacity(5);
            let mut axis = vec![S::zero(); 3];
            axis[k] = S::one();
            let b1 = u.cross(&Vector::new(axis));
            let b2 = u.cross(&b1);
            out.push(b1);
            out.push(b2);
            for c in 0..3 {
                let mut e = vec![S::zero(); 3];
                e[c] = S::one();
                let b = u.cross(&Vector::new(e));
                let b = u.cross(&b);
                if !b.is_zero() {
                    out.push(b);
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Necessary condition for a common transversal with direction `u`: the
/// projections of the bodies onto each direction orthogonal to `u` must
/// share a point. Exact interval arithmetic; never rejects a feasible
/// direction.
fn projection_prescreen<S: Scalar>(u: &Vector<S>, bodies: &[BodyRef<'_, S>]) -> bool {
    for b in projection_basis(u) {
        let mut lo: Option<S> = None;
        let mut hi: Option<S> = None;
        for &(_, body) in bodies {
            let mut bmin: Option<S> = None;
            let mut bmax: Option<S> = None;
            for v in body.vertices() {
                let d = v.dot(&b);
                bmin = Some(match bmin {
                    None => d.clone(),
                    Some(m) => m.min(d.clone()),
                });
                bmax = Some(match bmax {
                    None => d,
                    Some(m) => m.max(d),
                });
            }
            let (bmin, bmax) = (bmin.unwrap(), bmax.unwrap());
            lo = Some(match lo {
                None => bmin.clone(),
                Some(l) => l.max(bmin.clone()),
            });
            hi = Some(match hi {
                None => bmax.clone(),
                Some(h) => h.min(bmax.clone()),
            });
            if lo.as_ref().unwrap() > hi.as_ref().unwrap() {
                return false;
            }
        }
    }
    true
}

/// Index of the coordinate plane used for the canonical base point: the
/// axis where |u| is largest, so the plane is not parallel to u.
fn base_plane_axis<S: Scalar>(dir: &Vector<S>) -> usize {
    let abs: Vec<S> = dir.coords().iter().map(|c| c.abs()).collect();
    let mut best = 0;
    for i in 1..dir.dim() {
        if abs[i] > abs[best] {
            best = i;
        }
    }
    best
}

/// 2D orientation value: cross(a, b).
fn cross2<S: Scalar>(a: &(S, S), b: &(S, S)) -> S {
    a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone()
}

fn sub2<S: Scalar>(a: &(S, S), b: &(S, S)) -> (S, S) {
    (a.0.clone() - b.0.clone(), a.1.clone() - b.1.clone())
}

/// Strict counterclockwise convex hull by monotone chain; returns indices
/// into `pts`. Duplicates and interior collinear points are dropped. A
/// segment yields its two extremes, a single point just itself.
fn convex_hull_2d<S: Scalar>(pts: &[(S, S)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a]
            .0
            .cmp(&pts[b].0)
            .then(pts[a].1.cmp(&pts[b].1))
            .then(a.cmp(&b))
    });
    idx.dedup_by(|&mut a, &mut b| pts[a] == pts[b]);
    if idx.len() <= 1 {
        return idx;
    }
    let turn = |o: usize, a: usize, b: usize| {
        cross2(&sub2(&pts[a], &pts[o]), &sub2(&pts[b], &pts[o])).sign()
    };
    let mut lower: Vec<usize> = Vec::new();
    for &p in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Clip a convex region (vertex list, possibly degenerate) by the
/// half-plane `normal . p >= rhs`, exactly.
fn clip_half_plane<S: Scalar>(
    region: Vec<(S, S)>,
    normal: &(S, S),
    rhs: &S,
) -> Vec<(S, S)> {
    if region.is_empty() {
        return region;
    }
    let depth: Vec<S> = region
        .iter()
        .map(|p| normal.0.clone() * p.0.clone() + normal.1.clone() * p.1.clone() - rhs.clone())
        .collect();
    let k = region.len();
    let mut out: Vec<(S, S)> = Vec::with_capacity(k + 2);
    for i in 0..k {
        let j = (i + 1) % k;
        let (di, dj) = (&depth[i], &depth[j]);
        if !di.is_negative() {
            out.push(region[i].clone());
        }
        if (di.is_positive() && dj.is_negative()) || (di.is_negative() && dj.is_positive()) {
            let t = di.clone() / (di.clone() - dj.clone());
            let seg = sub2(&region[j], &region[i]);
            out.push((
                region[i].0.clone() + t.clone() * seg.0,
                region[i].1.clone() + t * seg.1,
            ));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Express a point of the hull as a convex combination of up to three hull
/// vertices by fan search; returns (vertex index, weight) pairs.
fn convex_coordinates<S: Scalar>(
    pts: &[(S, S)],
    hull: &[usize],
    p: &(S, S),
) -> Vec<(usize, S)> {
    match hull.len() {
        0 => unreachable!("empty hull"),
        1 => vec![(hull[0], S::one())],
        2 => {
            let (a, b) = (&pts[hull[0]], &pts[hull[1]]);
            let e = sub2(b, a);
            let len2 = e.0.clone() * e.0.clone() + e.1.clone() * e.1.clone();
            let s = (sub2(p, a).0 * e.0.clone() + sub2(p, a).1 * e.1.clone()) / len2;
            vec![(hull[0], S::one() - s.clone()), (hull[1], s)]
        }
        _ => {
            let h0 = &pts[hull[0]];
            for i in 1..hull.len() - 1 {
                let hi = &pts[hull[i]];
                let hj = &pts[hull[i + 1]];
                let ei = sub2(hi, h0);
                let ej = sub2(hj, h0);
                let det = cross2(&ei, &ej);
                debug_assert!(det.is_positive());
                let dp = sub2(p, h0);
                let s = cross2(&dp, &ej) / det.clone();
                let r = cross2(&ei, &dp) / det;
                if !s.is_negative() && !r.is_negative() && s.clone() + r.clone() <= S::one() {
                    return vec![
                        (hull[0], S::one() - s.clone() - r.clone()),
                        (hull[i], s),
                        (hull[i + 1], r),
                    ];
                }
            }
            unreachable!("point inside hull lies in some fan triangle");
        }
    }
}

/// Assemble the witness from per-body hull points on the common line
/// {x : projection(x) = p}.
fn witness_from_hull_points<S: Scalar>(
    u: &Ray<S>,
    bodies: &[BodyRef<'_, S>],
    hull_points: Vec<(Vector<S>, Vec<S>)>,
) -> LineWitness<S> {
    let dir = u.vector();
    let k = base_plane_axis(dir);
    let q0 = &hull_points[0].0;
    let shift = q0.coords()[k].clone() / dir.coords()[k].clone();
    let base_point = q0.sub(&dir.scale(&shift));
    debug_assert!(base_point.coords()[k].is_zero());
    let uu = dir.dot(dir);
    let entries = bodies
        .iter()
        .zip(hull_points)
        .map(|(&(idx, _), (q, weights))| {
            let t = q.sub(&base_point).dot(dir) / uu.clone();
            WitnessEntry {
                body: idx,
                t,
                weights,
            }
        })
        .collect();
    LineWitness {
        direction: u.clone(),
        base_point,
        entries,
    }
}

fn transversal_d2<S: Scalar>(
    u: &Ray<S>,
    bodies: &[BodyRef<'_, S>],
) -> Option<LineWitness<S>> {
    let b = u.vector().perp();
    // Common point of the projection intervals; lines through direction u
    // are points of this axis.
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    let mut ranges = Vec::with_capacity(bodies.len());
    for &(_, body) in bodies {
        let proj: Vec<S> = body.vertices().iter().map(|v| v.dot(&b)).collect();
        let bmin = proj.iter().cloned().min().unwrap();
        let bmax = proj.iter().cloned().max().unwrap();
        lo = Some(match lo {
            None => bmin.clone(),
            Some(l) => l.max(bmin.clone()),
        });
        hi = Some(match hi {
            None => bmax.clone(),
            Some(h) => h.min(bmax.clone()),
        });
        ranges.push((proj, bmin, bmax));
    }
    let (lo, hi) = (lo.unwrap(), hi.unwrap());
    if lo > hi {
        return None;
    }
    let p = lo;
    let mut hull_points = Vec::with_capacity(bodies.len());
    for (&(_, body), (proj, bmin, bmax)) in bodies.iter().zip(ranges) {
        let nv = body.vertices().len();
        let mut weights = vec![S::zero(); nv];
        if bmin == bmax {
            let i = proj.iter().position(|v| *v == bmin).unwrap();
            weights[i] = S::one();
        } else {
            let i = proj.iter().position(|v| *v == bmin).unwrap();
            let j = proj.iter().position(|v| *v == bmax).unwrap();
            let s = (p.clone() - bmin.clone()) / (bmax.clone() - bmin.clone());
            weights[i] = S::one() - s.clone();
            weights[j] = s;
        }
        let mut q = Vector::zero(2);
        for (w, v) in weights.iter().zip(body.vertices()) {
            q = q.add(&v.scale(w));
        }
        hull_points.push((q, weights));
    }
    Some(witness_from_hull_points(u, bodies, hull_points))
}

fn transversal_d3<S: Scalar>(
    u: &Ray<S>,
    bodies: &[BodyRef<'_, S>],
) -> Option<LineWitness<S>> {
    let dir = u.vector();
    // Projection frame of the plane orthogonal to u, content-reduced to keep
    // the hull predicates small.
    let abs: Vec<S> = dir.coords().iter().map(|c| c.abs()).collect();
    let mut kmin = 0;
    for i in 1..3 {
        if abs[i] < abs[kmin] {
            kmin = i;
        }
    }
    let mut axis = vec![S::zero(); 3];
    axis[kmin] = S::one();
    let b1 = Ray::new(dir.cross(&Vector::new(axis)))
        .expect("frame vector is nonzero")
        .vector()
        .clone();
    let b2 = Ray::new(dir.cross(&b1))
        .expect("frame vector is nonzero")
        .vector()
        .clone();

    // Projected hulls; lines with direction u are points of this plane, and
    // the line meets a body exactly when the point lies in its hull.
    let mut projected: Vec<Vec<(S, S)>> = Vec::with_capacity(bodies.len());
    let mut hulls: Vec<Vec<usize>> = Vec::with_capacity(bodies.len());
    for &(_, body) in bodies {
        let pts: Vec<(S, S)> = body
            .vertices()
            .iter()
            .map(|v| (v.dot(&b1), v.dot(&b2)))
            .collect();
        hulls.push(convex_hull_2d(&pts));
        projected.push(pts);
    }

    // Common point of all hulls by successive exact half-plane clipping:
    // start from the first hull polygon and clip it against every
    // half-plane of the remaining hulls (segments and points contribute an
    // equality as a pair of opposite half-planes).
    let mut region: Vec<(S, S)> = hulls[0].iter().map(|&i| projected[0][i].clone()).collect();
    for (pts, hull) in projected.iter().zip(&hulls).skip(1) {
        let mut planes: Vec<((S, S), S)> = Vec::new();
        match hull.len() {
            1 => {
                let a = &pts[hull[0]];
                planes.push(((S::one(), S::zero()), a.0.clone()));
                planes.push(((-S::one(), S::zero()), -a.0.clone()));
                planes.push(((S::zero(), S::one()), a.1.clone()));
                planes.push(((S::zero(), -S::one()), -a.1.clone()));
            }
            2 => {
                let (a, b) = (&pts[hull[0]], &pts[hull[1]]);
                let e = sub2(b, a);
                let c = cross2(&e, a);
                planes.push(((-e.1.clone(), e.0.clone()), c.clone()));
                planes.push(((e.1.clone(), -e.0.clone()), -c));
                planes.push((
                    (e.0.clone(), e.1.clone()),
                    e.0.clone() * a.0.clone() + e.1.clone() * a.1.clone(),
                ));
                planes.push((
                    (-e.0.clone(), -e.1.clone()),
                    -(e.0.clone() * b.0.clone() + e.1.clone() * b.1.clone()),
                ));
            }
            _ => {
                for w in 0..hull.len() {
                    let a = &pts[hull[w]];
                    let b = &pts[hull[(w + 1) % hull.len()]];
                    let e = sub2(b, a);
                    planes.push(((-e.1.clone(), e.0.clone()), cross2(&e, a)));
                }
            }
        }
        for (normal, rhs) in planes {
            region = clip_half_plane(region, &normal, &rhs);
            if region.is_empty() {
                return None;
            }
        }
    }
    let p = region.into_iter().next().expect("nonempty region");

    let mut hull_points = Vec::with_capacity(bodies.len());
    for ((&(_, body), pts), hull) in bodies.iter().zip(&projected).zip(&hulls) {
        let combo = convex_coordinates(pts, hull, &p);
        let mut weights = vec![S::zero(); body.vertices().len()];
        let mut q = Vector::zero(3);
        for (vi, w) in combo {
            q = q.add(&body.vertices()[vi].scale(&w));
            weights[vi] = w;
        }
        hull_points.push((q, weights));
    }
    Some(witness_from_hull_points(u, bodies, hull_points))
}

/// Decide whether some line with direction `u` meets every body; on success
/// return the witness line with per-body parameters and convex certificates.
///
/// The decision reduces to a common point of the bodies' projections along
/// `u`: exact 2D hulls plus a two-variable LP in d=3, pure interval
/// arithmetic in d=2. `transversal_lp_reference` keeps the direct one-shot
/// LP encoding as an independent oracle for this reduction.
pub fn transversal_for_direction<S: Scalar>(
    u: &Ray<S>,
    bodies: &[BodyRef<'_, S>],
) -> Result<Option<LineWitness<S>>, Error> {
    let dir = u.vector();
    let d = dir.dim();
    if bodies.is_empty() {
        return Err(Error::InvalidConfig("no bodies".into()));
    }
    for &(_, b) in bodies {
        if b.dim() != d {
            return Err(Error::DimensionMismatch(d, b.dim()));
        }
    }
    let witness = match d {
        2 => transversal_d2(u, bodies),
        3 => {
            if !projection_prescreen(dir, bodies) {
                return Ok(None);
            }
            transversal_d3(u, bodies)
        }
        _ => return Err(Error::BadDimension(d)),
    };
    if let Some(w) = &witness {
        debug_assert!(w.verify(bodies));
    }
    Ok(witness)
}

/// Reference encoding of the transversal test as one LP over a base point
/// in a fixed coordinate plane, a line parameter per body, and convex
/// weights over every body's vertices.
pub fn transversal_lp_reference<S: Scalar>(
    u: &Ray<S>,
    bodies: &[BodyRef<'_, S>],
) -> Result<Option<LineWitness<S>>, Error> {
    let dir = u.vector();
    let d = dir.dim();
    if bodies.is_empty() {
        return Err(Error::InvalidConfig("no bodies".into()));
    }
    for &(_, b) in bodies {
        if b.dim() != d {
            return Err(Error::DimensionMismatch(d, b.dim()));
        }
    }
    let k = base_plane_axis(dir);
    let free_coords: Vec<usize> = (0..d).filter(|&c| c != k).collect();

    let nb = bodies.len();
    let num_weights: usize = bodies.iter().map(|&(_, b)| b.vertices().len()).sum();
    let n_vars = (d - 1) + nb + num_weights;
    // Variable layout: p free coords | t per body | weights per body.
    let t_base = d - 1;
    let w_base = t_base + nb;

    let mut sys = LinearSystem::new(n_vars);
    let mut w_offset = w_base;
    for (bi, &(_, body)) in bodies.iter().enumerate() {
        let nv = body.vertices().len();
        for c in 0..d {
            let mut row = vec![S::zero(); n_vars];
            for (vi, v) in body.vertices().iter().enumerate() {
                row[w_offset + vi] = v.coords()[c].clone();
            }
            if let Some(pos) = free_coords.iter().position(|&fc| fc == c) {
                row[pos] = -S::one();
            }
            row[t_base + bi] = -dir.coords()[c].clone();
            sys.push(row, Rel::Eq, S::zero())?;
        }
        let mut sum = vec![S::zero(); n_vars];
        for wv in sum.iter_mut().skip(w_offset).take(nv) {
            *wv = S::one();
        }
        sys.push(sum, Rel::Eq, S::one())?;
        for vi in 0..nv {
            let mut row = vec![S::zero(); n_vars];
            row[w_offset + vi] = S::one();
            sys.push(row, Rel::Ge, S::zero())?;
        }
        w_offset += nv;
    }

    match lp_feasible(&sys) {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(x) => {
            let mut base = vec![S::zero(); d];
            for (pos, &c) in free_coords.iter().enumerate() {
                base[c] = x[pos].clone();
            }
            let base_point = Vector::new(base);
            let mut entries = Vec::with_capacity(nb);
            let mut w_offset = w_base;
            for (bi, &(idx, body)) in bodies.iter().enumerate() {
                let nv = body.vertices().len();
                entries.push(WitnessEntry {
                    body: idx,
                    t: x[t_base + bi].clone(),
                    weights: x[w_offset..w_offset + nv].to_vec(),
                });
                w_offset += nv;
            }
            let witness = LineWitness {
                direction: u.clone(),
                base_point,
                entries,
            };
            debug_assert!(witness.verify(bodies));
            Ok(Some(witness))
        }
    }
}

/// Does the line `base + t * dir` meet the body?
pub fn line_meets_body<S: Scalar>(
    base: &Vector<S>,
    dir: &Vector<S>,
    body: &ConvexBody<S>,
) -> bool {
    let d = body.dim();
    let nv = body.vertices().len();
    // Variables: t then the convex weights.
    let mut sys = LinearSystem::new(1 + nv);
    for c in 0..d {
        let mut row = vec![S::zero(); 1 + nv];
        row[0] = -dir.coords()[c].clone();
        for (vi, v) in body.vertices().iter().enumerate() {
            row[1 + vi] = v.coords()[c].clone();
        }
        sys.push(row, Rel::Eq, base.coords()[c].clone()).unwrap();
    }
    let mut sum = vec![S::zero(); 1 + nv];
    for wv in sum.iter_mut().skip(1) {
        *wv = S::one();
    }
    sys.push(sum, Rel::Eq, S::one()).unwrap();
    for vi in 0..nv {
        let mut row = vec![S::zero(); 1 + nv];
        row[1 + vi] = S::one();
        sys.push(row, Rel::Ge, S::zero()).unwrap();
    }
    lp_feasible(&sys).is_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::test_bodies::{collinear_cubes, cube};
    use crate::body::build_separation_system;
    use crate::Rat;

    fn refs(bodies: &[ConvexBody<Rat>]) -> Vec<BodyRef<'_, Rat>> {
        bodies.iter().enumerate().collect()
    }

    #[test]
    fn collinear_cubes_along_x() {
        let bodies = collinear_cubes(3);
        let w = transversal_for_direction(&Ray::from_ints(&[1, 0, 0]), &refs(&bodies))
            .unwrap()
            .expect("x axis pierces all three");
        assert!(w.verify(&refs(&bodies)));
        assert_eq!(w.order(), OrientedOrder(vec![0, 1, 2]));

        let infeasible =
            transversal_for_direction(&Ray::from_ints(&[0, 0, 1]), &refs(&bodies)).unwrap();
        assert!(infeasible.is_none());
    }

    #[test]
    fn stacked_cubes_along_z() {
        let bodies = vec![cube("a", 0, 0, 0, 1, 2), {
            // cube centered at z=2
            let mut verts = Vec::new();
            for v in cube("b", 0, 0, 0, 1, 2).vertices() {
                let mut c = v.coords().to_vec();
                c[2] = c[2].clone() + crate::scalar::rat_int(2);
                verts.push(Vector::new(c));
            }
            ConvexBody::new("b", verts).unwrap()
        }];
        let w = transversal_for_direction(&Ray::from_ints(&[0, 0, 1]), &refs(&bodies))
            .unwrap()
            .expect("z axis pierces both");
        assert!(w.verify(&refs(&bodies)));
    }

    #[test]
    fn order_for_direction_and_reversal() {
        let sys = build_separation_system(collinear_cubes(3), 7).unwrap();
        let active: Vec<usize> = (0..3).collect();
        let u = Ray::from_ints(&[1, 0, 0]);
        match order_for_direction(&u, &sys, &active) {
            OrderOutcome::Order(o) => assert_eq!(o, OrientedOrder(vec![0, 1, 2])),
            other => panic!("unexpected {other:?}"),
        }
        match order_for_direction(&u.antipode(), &sys, &active) {
            OrderOutcome::Order(o) => assert_eq!(o, OrientedOrder(vec![2, 1, 0])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn on_circle_signal() {
        let sys = build_separation_system(collinear_cubes(2), 3).unwrap();
        let n = sys.hyperplanes[0].normal.clone();
        // A direction orthogonal to the lone separator normal.
        let u = Ray::new(n.cross(&Vector::from_ints(&[0, 0, 1]))).unwrap();
        assert_eq!(
            order_for_direction(&u, &sys, &[0, 1]),
            OrderOutcome::OnCircle((0, 1))
        );
    }

    #[test]
    fn tournament_sorting() {
        // Transitive: 2 beats 0 and 1; 0 beats 1.
        let beats = |a: usize, b: usize| matches!((a, b), (2, _) | (0, 1));
        assert_eq!(sort_tournament(&[0, 1, 2], beats), Ok(vec![2, 0, 1]));

        // Rock-paper-scissors.
        let cyc = |a: usize, b: usize| matches!((a, b), (0, 1) | (1, 2) | (2, 0));
        assert_eq!(sort_tournament(&[0, 1, 2], cyc), Err([0, 1, 2]));
    }

    #[test]
    fn witness_survives_body_removal() {
        let bodies = collinear_cubes(4);
        let w = transversal_for_direction(&Ray::from_ints(&[1, 0, 0]), &refs(&bodies))
            .unwrap()
            .unwrap();
        let sub = w.without_body(2);
        let sub_refs: Vec<BodyRef<'_, Rat>> = refs(&bodies)
            .into_iter()
            .filter(|&(i, _)| i != 2)
            .collect();
        assert!(sub.verify(&sub_refs));
        assert_eq!(sub.order(), OrientedOrder(vec![0, 1, 3]));
    }

    #[test]
    fn line_meets_body_checks() {
        let c = cube("c", 0, 0, 0, 1, 2);
        let origin = Vector::zero(3);
        let x = Vector::from_ints(&[1, 0, 0]);
        assert!(line_meets_body(&origin, &x, &c));
        let far = Vector::from_ints(&[0, 5, 0]);
        assert!(!line_meets_body(&far, &x, &c));
    }

    #[test]
    fn fast_path_agrees_with_reference_encoding() {
        use crate::generate::{generate, oracle_directions, GenConfig, GenKind};
        for (kind, n, dim) in [
            (GenKind::Collinear, 3usize, 3usize),
            (GenKind::Flower3d, 4, 3),
            (GenKind::GridBoxes, 4, 3),
        ] {
            let bodies = generate(&GenConfig::<Rat>::new(n, dim, kind, 5)).unwrap();
            let refs: Vec<BodyRef<'_, Rat>> = bodies.iter().enumerate().collect();
            for u in oracle_directions::<Rat>(dim, 60) {
                let fast = transversal_for_direction(&u, &refs).unwrap();
                let slow = transversal_lp_reference(&u, &refs).unwrap();
                assert_eq!(fast.is_some(), slow.is_some(), "disagree at {u:?}");
                if let (Some(f), Some(s)) = (fast, slow) {
                    assert!(f.verify(&refs));
                    assert!(s.verify(&refs));
                    assert_eq!(f.order(), s.order());
                }
            }
        }
    }

    #[test]
    fn unoriented_canonicalization() {
        let a = OrientedOrder(vec![2, 0, 1]);
        let b = OrientedOrder(vec![1, 0, 2]);
        assert_eq!(a.unoriented(), b.unoriented());
        assert_ne!(a, b);
        assert_eq!(a.reversed(), b);
    }
}
