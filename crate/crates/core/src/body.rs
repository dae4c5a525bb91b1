//! Convex polytopes in V-representation, exact disjointness, oriented
//! separating hyperplanes, and general-position enforcement.
//!
//! For every pair `i < j` the system carries one hyperplane with body `i`
//! strictly in the open negative halfspace and body `j` strictly in the open
//! positive halfspace. Normals receive a seeded rational perturbation so the
//! induced direction circles are in general position (no two parallel, no
//! three concurrent); the perturbation is re-checked exactly and retried
//! with fresh sub-seeds, never trusted.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::Vector;
use crate::lp::{lp_feasible, Feasibility, LinearSystem, Rel};
use crate::scalar::Scalar;

/// A compact convex polytope given as the hull of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexBody<S: Scalar> {
    pub name: String,
    vertices: Vec<Vector<S>>,
}

impl<S: Scalar> ConvexBody<S> {
    /// Exact duplicate vertices are dropped on load; interior points are
    /// harmless and kept.
    pub fn new(name: impl Into<String>, vertices: Vec<Vector<S>>) -> Result<Self, Error> {
        let name = name.into();
        if vertices.is_empty() {
            return Err(Error::InvalidConfig(format!("body {name} has no vertices")));
        }
        let dim = vertices[0].dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::BadDimension(dim));
        }
        let mut kept: Vec<Vector<S>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(dim, v.dim()));
            }
            if !kept.contains(&v) {
                kept.push(v);
            }
        }
        Ok(ConvexBody {
            name,
            vertices: kept,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Vector<S>] {
        &self.vertices
    }
}

/// `true` iff the convex hulls of the two vertex sets have empty
/// intersection, decided exactly by LP.
pub fn disjoint<S: Scalar>(a: &ConvexBody<S>, b: &ConvexBody<S>) -> Result<bool, Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    let na = a.vertices().len();
    let nb = b.vertices().len();
    let n = na + nb;
    let mut sys = LinearSystem::new(n);
    // Common point: sum w_a v_a = sum w_b v_b with both weight vectors in the
    // standard simplex.
    for k in 0..d {
        let mut row = Vec::with_capacity(n);
        for v in a.vertices() {
            row.push(v.coords()[k].clone());
        }
        for v in b.vertices() {
            row.push(-v.coords()[k].clone());
        }
        sys.push(row, Rel::Eq, S::zero())?;
    }
    let mut sum_a = vec![S::zero(); n];
    for c in sum_a.iter_mut().take(na) {
        *c = S::one();
    }
    sys.push(sum_a, Rel::Eq, S::one())?;
    let mut sum_b = vec![S::zero(); n];
    for c in sum_b.iter_mut().skip(na) {
        *c = S::one();
    }
    sys.push(sum_b, Rel::Eq, S::one())?;
    for j in 0..n {
        let mut row = vec![S::zero(); n];
        row[j] = S::one();
        sys.push(row, Rel::Ge, S::zero())?;
    }
    Ok(!lp_feasible(&sys).is_feasible())
}

/// Membership of an exact point in a body, decided by LP.
pub fn point_in_body<S: Scalar>(body: &ConvexBody<S>, point: &Vector<S>) -> bool {
    let d = body.dim();
    let n = body.vertices().len();
    let mut sys = LinearSystem::new(n);
    for k in 0..d {
        let row: Vec<S> = body
            .vertices()
            .iter()
            .map(|v| v.coords()[k].clone())
            .collect();
        sys.push(row, Rel::Eq, point.coords()[k].clone()).unwrap();
    }
    sys.push(vec![S::one(); n], Rel::Eq, S::one()).unwrap();
    for j in 0..n {
        let mut row = vec![S::zero(); n];
        row[j] = S::one();
        sys.push(row, Rel::Ge, S::zero()).unwrap();
    }
    lp_feasible(&sys).is_feasible()
}

/// Oriented separating hyperplane `normal . x = offset` for a pair `i < j`:
/// body `i` lies strictly on the negative side, body `j` strictly on the
/// positive side, with a margin-normalized gap of at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedHyperplane<S: Scalar> {
    pub normal: Vector<S>,
    pub offset: S,
    pub pair: (usize, usize),
}

impl<S: Scalar> OrientedHyperplane<S> {
    /// Exhaustive vertex substitution of the orientation invariant.
    pub fn separates_strictly(&self, neg: &ConvexBody<S>, pos: &ConvexBody<S>) -> bool {
        neg.vertices()
            .iter()
            .all(|v| self.normal.dot(v) < self.offset)
            && pos
                .vertices()
                .iter()
                .all(|w| self.normal.dot(w) > self.offset)
    }

    /// min over pos-side vertices minus max over neg-side vertices of the
    /// normal functional.
    pub fn margin(&self, neg: &ConvexBody<S>, pos: &ConvexBody<S>) -> S {
        let hi = neg
            .vertices()
            .iter()
            .map(|v| self.normal.dot(v))
            .max()
            .expect("nonempty body");
        let lo = pos
            .vertices()
            .iter()
            .map(|w| self.normal.dot(w))
            .min()
            .expect("nonempty body");
        lo - hi
    }
}

/// Find a margin-normalized strict separator of two disjoint bodies.
///
/// The feasibility system is `normal . v <= offset - 1` over the vertices of
/// `a` and `normal . w >= offset + 1` over the vertices of `b`; any witness
/// is a valid separator per the orientation convention.
pub fn separating_hyperplane<S: Scalar>(
    a: &ConvexBody<S>,
    b: &ConvexBody<S>,
) -> Result<(Vector<S>, S), Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    // Variables: normal coordinates then the offset, all free.
    let mut sys = LinearSystem::new(d + 1);
    for v in a.vertices() {
        let mut row: Vec<S> = v.coords().to_vec();
        row.push(-S::one());
        sys.push(row, Rel::Le, -S::one())?;
    }
    for w in b.vertices() {
        let mut row: Vec<S> = w.coords().to_vec();
        row.push(-S::one());
        sys.push(row, Rel::Ge, S::one())?;
    }
    match lp_feasible(&sys) {
        Feasibility::Feasible(mut w) => {
            let offset = w.pop().expect("offset variable");
            Ok((Vector::new(w), offset))
        }
        Feasibility::Infeasible => Err(Error::DisjointnessViolation(0, 0)),
    }
}

/// The family of bodies plus one oriented separating hyperplane per pair,
/// in general position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationSystem<S: Scalar> {
    pub bodies: Vec<ConvexBody<S>>,
    pub hyperplanes: Vec<OrientedHyperplane<S>>,
    pub seed: u64,
}

impl<S: Scalar> SeparationSystem<S> {
    pub fn n(&self) -> usize {
        self.bodies.len()
    }

    pub fn dim(&self) -> usize {
        self.bodies[0].dim()
    }

    /// Position of pair `(i, j)`, `i < j`, in the lexicographic pair order.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n());
        let n = self.n();
        (2 * n - i - 1) * i / 2 + (j - i - 1)
    }

    pub fn hyperplane(&self, i: usize, j: usize) -> &OrientedHyperplane<S> {
        &self.hyperplanes[self.pair_index(i, j)]
    }

    /// Body indices that remain after removing body `q`.
    pub fn active_without(&self, q: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| i != q).collect()
    }
}

fn sub_rng(seed: u64, pair: usize, round: u32) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&(pair as u64).to_le_bytes());
    bytes[16..20].copy_from_slice(&round.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// Uniform-ish rational in [-1, 1] with denominator 2^20.
fn unit_jitter<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    let raw = (rng.next_u64() % (1 << 21)) as i64 - (1 << 20);
    S::from_int(raw) / S::from_int(1 << 20)
}

const MAX_GP_ROUNDS: u32 = 32;

/// Build all `n(n-1)/2` oriented separating hyperplanes and enforce general
/// position by seeded rational perturbation.
///
/// Each round perturbs every base normal by at most `2^-(16+round)` relative
/// to its largest coordinate, then re-derives the offset so the margin is
/// exactly 2 with a jittered center. Strict separation and general position
/// are re-verified exactly; failed rounds retry with a fresh sub-seed.
pub fn build_separation_system<S: Scalar>(
    bodies: Vec<ConvexBody<S>>,
    seed: u64,
) -> Result<SeparationSystem<S>, Error> {
    let n = bodies.len();
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two bodies".into()));
    }
    let dim = bodies[0].dim();
    for b in &bodies {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch(dim, b.dim()));
        }
    }

    let mut base: Vec<(Vector<S>, (usize, usize))> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            if !disjoint(&bodies[i], &bodies[j])? {
                return Err(Error::DisjointnessViolation(i, j));
            }
            let (normal, _offset) = separating_hyperplane(&bodies[i], &bodies[j])
                .map_err(|_| Error::DisjointnessViolation(i, j))?;
            base.push((normal, (i, j)));
        }
    }

    'rounds: for round in 0..MAX_GP_ROUNDS {
        let mut planes: Vec<OrientedHyperplane<S>> = Vec::with_capacity(base.len());
        let mag = S::one() / S::from_int(1i64 << (16 + round.min(40) as i64).min(62));
        for (k, (normal, pair)) in base.iter().enumerate() {
            let mut rng = sub_rng(seed, k, round);
            let scale = normal
                .coords()
                .iter()
                .map(|c| c.abs())
                .max()
                .expect("nonzero normal");
            let step = scale * mag.clone();
            let coords: Vec<S> = normal
                .coords()
                .iter()
                .map(|c| c.clone() + unit_jitter::<S>(&mut rng) * step.clone())
                .collect();
            let perturbed = Vector::new(coords);
            if perturbed.is_zero() {
                continue 'rounds;
            }
            let (i, j) = *pair;
            let hi = bodies[i]
                .vertices()
                .iter()
                .map(|v| perturbed.dot(v))
                .max()
                .unwrap();
            let lo = bodies[j]
                .vertices()
                .iter()
                .map(|w| perturbed.dot(w))
                .min()
                .unwrap();
            if lo <= hi {
                continue 'rounds;
            }
            // Rescale so the separation margin is exactly 2, then jitter the
            // offset inside the open margin band.
            let kappa = (S::one() + S::one()) / (lo.clone() - hi.clone());
            let normal = perturbed.scale(&kappa);
            let center = (lo + hi) / (S::one() + S::one());
            let shift = unit_jitter::<S>(&mut rng) / S::from_int(4);
            let offset = kappa * center + shift;
            let plane = OrientedHyperplane {
                normal,
                offset,
                pair: *pair,
            };
            if !plane.separates_strictly(&bodies[i], &bodies[j]) {
                continue 'rounds;
            }
            planes.push(plane);
        }
        let sys = SeparationSystem {
            bodies: bodies.clone(),
            hyperplanes: planes,
            seed,
        };
        if gp_verify(&sys) {
            return Ok(sys);
        }
    }
    Err(Error::GeneralPositionFailure(MAX_GP_ROUNDS))
}

/// General position of a normal family: no two parallel; in d=3 additionally
/// no three linearly dependent (which would make three circles concurrent).
pub fn gp_verify_normals<S: Scalar>(normals: &[Vector<S>], dim: usize) -> bool {
    let m = normals.len();
    for a in 0..m {
        for b in (a + 1)..m {
            let parallel = match dim {
                2 => {
                    let na = normals[a].coords();
                    let nb = normals[b].coords();
                    (na[0].clone() * nb[1].clone() - na[1].clone() * nb[0].clone()).is_zero()
                }
                3 => normals[a].cross(&normals[b]).is_zero(),
                _ => return false,
            };
            if parallel {
                return false;
            }
        }
    }
    if dim == 3 {
        for a in 0..m {
            for b in (a + 1)..m {
                let cr = normals[a].cross(&normals[b]);
                for nc in normals.iter().skip(b + 1) {
                    if cr.dot(nc).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// General position of a separation system's hyperplane normals.
pub fn gp_verify<S: Scalar>(sys: &SeparationSystem<S>) -> bool {
    let normals: Vec<Vector<S>> = sys.hyperplanes.iter().map(|h| h.normal.clone()).collect();
    gp_verify_normals(&normals, sys.dim())
}

#[cfg(test)]
pub(crate) mod test_bodies {
    use super::*;
    use crate::scalar::rat;
    use crate::Rat;

    pub fn cube(name: &str, cx: i64, cy: i64, cz: i64, half_num: i64, half_den: i64) -> ConvexBody<Rat> {
        let h = rat(half_num, half_den);
        let c = [rat(cx, 1), rat(cy, 1), rat(cz, 1)];
        let mut verts = Vec::new();
        for sx in [-1i64, 1] {
            for sy in [-1i64, 1] {
                for sz in [-1i64, 1] {
                    verts.push(Vector::new(vec![
                        c[0].clone() + rat(sx, 1) * h.clone(),
                        c[1].clone() + rat(sy, 1) * h.clone(),
                        c[2].clone() + rat(sz, 1) * h.clone(),
                    ]));
                }
            }
        }
        ConvexBody::new(name, verts).unwrap()
    }

    pub fn collinear_cubes(n: usize) -> Vec<ConvexBody<Rat>> {
        (0..n)
            .map(|i| cube(&format!("K{}", i + 1), 2 * i as i64, 0, 0, 1, 2))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::test_bodies::{collinear_cubes, cube};
    use super::*;
    use crate::linalg::sign_dot;
    use crate::scalar::rat_int;
    use crate::Rat;

    fn point3(x: i64, y: i64, z: i64) -> Vector<Rat> {
        Vector::from_ints(&[x, y, z])
    }

    #[test]
    fn disjoint_cubes_and_overlaps() {
        let a = cube("a", 0, 0, 0, 1, 2);
        let b = cube("b", 2, 0, 0, 1, 2);
        assert!(disjoint(&a, &b).unwrap());

        let tri = ConvexBody::new(
            "t",
            vec![point3(0, 0, 0), point3(1, 0, 0), point3(0, 1, 0)],
        )
        .unwrap();
        assert!(!disjoint(&tri, &tri.clone()).unwrap());
    }

    #[test]
    fn crossing_segments_are_not_disjoint() {
        let s1 = ConvexBody::new(
            "s1",
            vec![
                Vector::<Rat>::from_ints(&[0, 0]),
                Vector::from_ints(&[1, 1]),
            ],
        )
        .unwrap();
        let s2 = ConvexBody::new(
            "s2",
            vec![
                Vector::<Rat>::from_ints(&[0, 1]),
                Vector::from_ints(&[1, 0]),
            ],
        )
        .unwrap();
        assert!(!disjoint(&s1, &s2).unwrap());
    }

    #[test]
    fn separator_of_two_points() {
        let a = ConvexBody::new("a", vec![point3(0, 0, 0)]).unwrap();
        let b = ConvexBody::new("b", vec![point3(2, 0, 0)]).unwrap();
        let (n, c) = separating_hyperplane(&a, &b).unwrap();
        // Margin constraints: n.a <= c-1 and n.b >= c+1.
        assert!(n.dot(&point3(0, 0, 0)) <= c.clone() - rat_int(1));
        assert!(n.dot(&point3(2, 0, 0)) >= c + rat_int(1));
    }

    #[test]
    fn separator_of_two_cubes_by_substitution() {
        let a = cube("a", 0, 0, 0, 1, 2);
        let b = cube("b", 2, 0, 0, 1, 2);
        let (n, c) = separating_hyperplane(&a, &b).unwrap();
        for v in a.vertices() {
            assert!(n.dot(v) <= c.clone() - rat_int(1));
        }
        for w in b.vertices() {
            assert!(n.dot(w) >= c.clone() + rat_int(1));
        }
    }

    #[test]
    fn overlapping_bodies_refuse_separator() {
        let a = cube("a", 0, 0, 0, 1, 1);
        let b = cube("b", 1, 0, 0, 1, 1);
        assert!(!disjoint(&a, &b).unwrap());
        assert!(matches!(
            build_separation_system(vec![a, b], 0),
            Err(Error::DisjointnessViolation(0, 1))
        ));
    }

    #[test]
    fn collinear_system_orientation_and_margin() {
        let sys = build_separation_system(collinear_cubes(3), 7).unwrap();
        assert_eq!(sys.hyperplanes.len(), 3);
        assert!(gp_verify(&sys));
        for h in &sys.hyperplanes {
            // Positive x-component after orientation.
            assert_eq!(h.normal.coords()[0].sign(), 1);
            let (i, j) = h.pair;
            assert!(h.separates_strictly(&sys.bodies[i], &sys.bodies[j]));
            assert!(h.margin(&sys.bodies[i], &sys.bodies[j]) >= rat_int(2));
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = build_separation_system(collinear_cubes(4), 11).unwrap();
        let b = build_separation_system(collinear_cubes(4), 11).unwrap();
        assert_eq!(a, b);
        let c = build_separation_system(collinear_cubes(4), 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn two_bodies_vacuous_gp() {
        let sys = build_separation_system(collinear_cubes(2), 1).unwrap();
        assert_eq!(sys.hyperplanes.len(), 1);
        assert!(gp_verify(&sys));
    }

    #[test]
    fn gp_verify_examples() {
        let basis = vec![
            Vector::<Rat>::from_ints(&[1, 0, 0]),
            Vector::from_ints(&[0, 1, 0]),
            Vector::from_ints(&[0, 0, 1]),
        ];
        assert!(gp_verify_normals(&basis, 3));

        let parallel = vec![
            Vector::<Rat>::from_ints(&[1, 0, 0]),
            Vector::from_ints(&[2, 0, 0]),
        ];
        assert!(!gp_verify_normals(&parallel, 3));

        let concurrent = vec![
            Vector::<Rat>::from_ints(&[1, 0, 0]),
            Vector::from_ints(&[0, 1, 0]),
            Vector::from_ints(&[1, 1, 0]),
        ];
        assert!(!gp_verify_normals(&concurrent, 3));
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        let sys = build_separation_system(collinear_cubes(4), 3).unwrap();
        let mut k = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(sys.pair_index(i, j), k);
                assert_eq!(sys.hyperplanes[k].pair, (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn point_membership() {
        let c = cube("c", 0, 0, 0, 1, 2);
        assert!(point_in_body(&c, &Vector::zero(3)));
        assert!(!point_in_body(&c, &point3(1, 0, 0)));
    }

    #[test]
    fn perturbed_normals_are_in_general_position_for_collinear_family() {
        // The unperturbed margin-LP separators of collinear cubes are all
        // parallel to the x axis; the seeded perturbation must break that.
        let sys = build_separation_system(collinear_cubes(4), 5).unwrap();
        assert!(gp_verify(&sys));
        for h in &sys.hyperplanes {
            assert_eq!(
                sign_dot(&Vector::from_ints(&[1, 0, 0]), &h.normal).unwrap(),
                1
            );
        }
    }
}
