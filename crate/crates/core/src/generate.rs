//! Instance generators (random and structured) and the direction-grid
//! oracle.
//!
//! The oracle deliberately avoids the separation/arrangement pipeline: it
//! probes a deterministic quasi-uniform set of rational directions and runs
//! the transversal LP on each, so its order set is an independently
//! certified subset of the true permutation set.

use rand::{RngCore, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::str::FromStr;

use crate::body::{disjoint, ConvexBody};
use crate::error::Error;
use crate::linalg::{Ray, Vector};
use crate::scalar::Scalar;
use crate::transversal::{transversal_for_direction, BodyRef, LineWitness, OrientedOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    GridBoxes,
    Collinear,
    Flower2d,
    Flower3d,
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "grid_boxes" => Ok(GenKind::GridBoxes),
            "collinear" => Ok(GenKind::Collinear),
            "flower2d" => Ok(GenKind::Flower2d),
            "flower3d" => Ok(GenKind::Flower3d),
            other => Err(Error::InvalidConfig(format!("unknown kind {other:?}"))),
        }
    }
}

impl GenKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GenKind::GridBoxes => "grid_boxes",
            GenKind::Collinear => "collinear",
            GenKind::Flower2d => "flower2d",
            GenKind::Flower3d => "flower3d",
        }
    }
}

/// Generator configuration. Spacing and half-width apply to the grid and
/// collinear kinds; the flower kinds use fixed proportions.
#[derive(Debug, Clone)]
pub struct GenConfig<S> {
    pub n: usize,
    pub dim: usize,
    pub kind: GenKind,
    pub seed: u64,
    pub spacing: S,
    pub half_width: S,
}

impl<S: Scalar> GenConfig<S> {
    pub fn new(n: usize, dim: usize, kind: GenKind, seed: u64) -> Self {
        GenConfig {
            n,
            dim,
            kind,
            seed,
            spacing: S::from_int(2),
            half_width: S::one() / S::from_int(2),
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::BadDimension(self.dim));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("need n >= 2".into()));
        }
        match self.kind {
            GenKind::Flower2d if self.dim != 2 => {
                Err(Error::InvalidConfig("flower2d requires dim 2".into()))
            }
            GenKind::Flower3d if self.dim != 3 => {
                Err(Error::InvalidConfig("flower3d requires dim 3".into()))
            }
            GenKind::Flower3d if self.n < 4 => {
                Err(Error::InvalidConfig("flower3d needs n >= 4".into()))
            }
            GenKind::GridBoxes | GenKind::Collinear
                if self.spacing <= self.half_width.clone() + self.half_width.clone() =>
            {
                Err(Error::InvalidConfig(
                    "spacing must exceed twice the half-width".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

fn jitter<S: Scalar>(rng: &mut ChaCha8Rng, denom: i64) -> S {
    let raw = (rng.next_u64() % (2 * denom as u64 + 1)) as i64 - denom;
    S::from_int(raw) / S::from_int(denom * denom)
}

fn box_body<S: Scalar>(
    name: String,
    center: &[S],
    half: &[S],
) -> Result<ConvexBody<S>, Error> {
    let d = center.len();
    let mut verts = Vec::new();
    for mask in 0..(1u32 << d) {
        let mut v = Vec::with_capacity(d);
        for c in 0..d {
            let h = half[c].clone();
            let off = if mask & (1 << c) != 0 { h } else { -h };
            v.push(center[c].clone() + off);
        }
        verts.push(Vector::new(v));
    }
    ConvexBody::new(name, verts)
}

fn gen_collinear<S: Scalar>(cfg: &GenConfig<S>) -> Result<Vec<ConvexBody<S>>, Error> {
    let mut bodies = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let mut center = vec![S::zero(); cfg.dim];
        center[0] = cfg.spacing.clone() * S::from_int(i as i64);
        let half = vec![cfg.half_width.clone(); cfg.dim];
        bodies.push(box_body(format!("K{}", i + 1), &center, &half)?);
    }
    Ok(bodies)
}

fn gen_grid<S: Scalar>(cfg: &GenConfig<S>) -> Result<Vec<ConvexBody<S>>, Error> {
    let d = cfg.dim;
    let g = (2..).find(|&g: &usize| g.pow(d as u32) >= cfg.n).unwrap();
    let simplex: &[&[i64]] = if d == 3 {
        &[&[1, 1, 1], &[1, -1, -1], &[-1, 1, -1], &[-1, -1, 1]]
    } else {
        &[&[1, 0], &[-1, 1], &[-1, -1]]
    };
    let mut bodies = Vec::with_capacity(cfg.n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.n {
        let cell = [
            i % g,
            (i / g) % g,
            if d == 3 { i / (g * g) } else { 0 },
        ];
        let mut center: Vec<S> = Vec::with_capacity(d);
        for c in 0..d {
            let base = cfg.spacing.clone() * S::from_int(cell[c] as i64);
            center.push(base + jitter::<S>(&mut rng, 8) * cfg.half_width.clone());
        }
        let mut verts = Vec::new();
        for pattern in simplex {
            let mut v = Vec::with_capacity(d);
            for c in 0..d {
                let scale = S::from_int(3) / S::from_int(4);
                let offset = cfg.half_width.clone() * scale * S::from_int(pattern[c])
                    + jitter::<S>(&mut rng, 8) * cfg.half_width.clone();
                v.push(center[c].clone() + offset);
            }
            verts.push(Vector::new(v));
        }
        bodies.push(ConvexBody::new(format!("K{}", i + 1), verts)?);
    }
    Ok(bodies)
}

/// Fan of thin radial spokes in the plane: segments along quasi-uniform
/// rational directions in a bounded angular fan, at radial extent [1, 2].
/// Lines crossing the fan realize many stabbing orders.
fn gen_flower2d<S: Scalar>(cfg: &GenConfig<S>) -> Result<Vec<ConvexBody<S>>, Error> {
    let n = cfg.n as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bodies = Vec::with_capacity(cfg.n);
    for k in 0..n {
        // Half-angle parameter in (-1/2, 1/2), slightly jittered.
        let s = (S::from_int(2 * k + 1 - n) + jitter::<S>(&mut rng, 16))
            / S::from_int(2 * n);
        let dir = Vector::new(vec![
            S::one() - s.clone() * s.clone(),
            S::from_int(2) * s.clone(),
        ]);
        let near = dir.scale(&S::one());
        let far = dir.scale(&S::from_int(2));
        bodies.push(ConvexBody::new(format!("K{}", k + 1), vec![near, far])?);
    }
    Ok(bodies)
}

/// Two split slab pairs in transverse directions plus full slabs at later
/// stations along the x axis. Lines tilted to cross both splits realize all
/// four swap combinations of the two pairs, which makes popular vertices
/// appear at the crossing of the two pair circles.
fn gen_flower3d<S: Scalar>(cfg: &GenConfig<S>) -> Result<Vec<ConvexBody<S>>, Error> {
    let gap = S::one() / S::from_int(8);
    let window = S::one() / S::from_int(2);
    let extent = S::from_int(12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bodies = Vec::with_capacity(cfg.n);

    let mut push_box = |name: String,
                        x0: S,
                        ranges: [(S, S); 2],
                        rng: &mut ChaCha8Rng|
     -> Result<(), Error> {
        let jx: S = jitter::<S>(rng, 64);
        let jy: S = jitter::<S>(rng, 64);
        let jz: S = jitter::<S>(rng, 64);
        let y_range = [ranges[0].0.clone(), ranges[0].1.clone()];
        let z_range = [ranges[1].0.clone(), ranges[1].1.clone()];
        let mut verts = Vec::new();
        for sx in [-1, 1] {
            for y_end in &y_range {
                for z_end in &z_range {
                    let x = x0.clone() + S::from_int(sx) * window.clone() + jx.clone();
                    let y = y_end.clone() + jy.clone();
                    let z = z_end.clone() + jz.clone();
                    verts.push(Vector::new(vec![x, y, z]));
                }
            }
        }
        bodies.push(ConvexBody::new(name, verts)?);
        Ok(())
    };

    // Pair split in y at station 0.
    push_box(
        "K1".into(),
        S::zero(),
        [(gap.clone(), extent.clone()), (-extent.clone(), extent.clone())],
        &mut rng,
    )?;
    push_box(
        "K2".into(),
        S::zero(),
        [(-extent.clone(), -gap.clone()), (-extent.clone(), extent.clone())],
        &mut rng,
    )?;
    // Pair split in z at station 4.
    push_box(
        "K3".into(),
        S::from_int(4),
        [(-extent.clone(), extent.clone()), (gap.clone(), extent.clone())],
        &mut rng,
    )?;
    push_box(
        "K4".into(),
        S::from_int(4),
        [(-extent.clone(), extent.clone()), (-extent.clone(), -gap.clone())],
        &mut rng,
    )?;
    // Full slabs at later stations.
    for k in 4..cfg.n {
        let x0 = S::from_int(4 * (k as i64 - 2));
        push_box(
            format!("K{}", k + 1),
            x0,
            [
                (-extent.clone(), extent.clone()),
                (-extent.clone(), extent.clone()),
            ],
            &mut rng,
        )?;
    }
    Ok(bodies)
}

/// Rescale the whole instance by one positive factor so coordinates take
/// their canonical small form (integers for rational scalars). Scaling
/// changes no stabbing order, transversal, or disjointness fact.
fn normalize_instance<S: Scalar>(bodies: Vec<ConvexBody<S>>) -> Result<Vec<ConvexBody<S>>, Error> {
    let mut all: Vec<S> = Vec::new();
    for b in &bodies {
        for v in b.vertices() {
            all.extend(v.coords().iter().cloned());
        }
    }
    if !S::canonicalize_direction(&mut all) {
        return Ok(bodies);
    }
    let mut it = all.into_iter();
    bodies
        .into_iter()
        .map(|b| {
            let dim = b.dim();
            let verts: Vec<Vector<S>> = b
                .vertices()
                .iter()
                .map(|_| Vector::new((&mut it).take(dim).collect()))
                .collect();
            ConvexBody::new(b.name.clone(), verts)
        })
        .collect()
}

/// Generate a pairwise disjoint family; disjointness is re-verified exactly
/// before returning.
pub fn generate<S: Scalar>(cfg: &GenConfig<S>) -> Result<Vec<ConvexBody<S>>, Error> {
    cfg.validate()?;
    let bodies = match cfg.kind {
        // Collinear keeps its literal unit-cube coordinates.
        GenKind::Collinear => gen_collinear(cfg),
        GenKind::GridBoxes => normalize_instance(gen_grid(cfg)?),
        GenKind::Flower2d => normalize_instance(gen_flower2d(cfg)?),
        GenKind::Flower3d => normalize_instance(gen_flower3d(cfg)?),
    }?;
    for i in 0..bodies.len() {
        for j in (i + 1)..bodies.len() {
            if !disjoint(&bodies[i], &bodies[j])? {
                return Err(Error::InvalidConfig(format!(
                    "generator bug: bodies {i} and {j} overlap"
                )));
            }
        }
    }
    Ok(bodies)
}

/// Orders found by the direction-grid oracle, each with a verified witness.
#[derive(Debug, Clone)]
pub struct OracleResult<S: Scalar> {
    pub orders: BTreeMap<OrientedOrder, LineWitness<S>>,
    pub probes: u64,
    pub directions: Vec<Ray<S>>,
}

impl<S: Scalar> OracleResult<S> {
    pub fn unoriented_count(&self) -> usize {
        self.orders
            .keys()
            .map(|o| o.unoriented())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }
}

fn frac_to_unit<S: Scalar>(num: i128, den: i128) -> S {
    // 2 * frac(num/den) - 1, exactly.
    let m = num.rem_euclid(den);
    S::from_int((2 * m - den) as i64) / S::from_int(den as i64)
}

/// The deterministic quasi-uniform rational direction grid.
pub fn oracle_directions<S: Scalar>(dim: usize, density: usize) -> Vec<Ray<S>> {
    let mut dirs = Vec::with_capacity(density);
    match dim {
        2 => {
            let m = density as i64;
            for k in 0..m {
                let t = S::from_int(2 * k + 1 - m) / S::from_int(m);
                let u = Vector::new(vec![
                    S::one() - t.clone() * t.clone(),
                    S::from_int(2) * t.clone(),
                ]);
                let u = if k % 2 == 1 { u.neg() } else { u };
                dirs.push(Ray::new(u).expect("nonzero grid direction"));
            }
        }
        3 => {
            // Kronecker sequences with rational rotation numbers (convergents
            // of sqrt(2)-1 and the golden ratio) and fixed offsets. The
            // exact coordinates are rounded to small dyadics; any nonzero
            // rational direction is as good as any other for probing.
            for k in 0..density {
                let k1 = (k + 1) as i128;
                let s: S = frac_to_unit(k1 * 408 * 7 + 985, 985 * 7);
                let t: S = frac_to_unit(k1 * 4181 * 11 + 6765, 6765 * 11);
                let one = S::one();
                let s2 = s.clone() * s.clone();
                let t2 = t.clone() * t.clone();
                let sigma = if k % 2 == 1 { -S::one() } else { S::one() };
                let u = Vector::new(vec![
                    ((one.clone() - t2.clone()) * (one.clone() - s2.clone()) * sigma)
                        .dyadic_round(20),
                    ((one.clone() - t2) * S::from_int(2) * s).dyadic_round(20),
                    (S::from_int(2) * t * (one + s2)).dyadic_round(20),
                ]);
                dirs.push(Ray::new(u).expect("nonzero grid direction"));
            }
        }
        _ => panic!("unsupported dimension"),
    }
    dirs
}

/// Probe `density` grid directions and collect every stabbing order found,
/// with its witness. The result is a certified subset of the true
/// permutation set; emptiness is not certified.
pub fn oracle_enumerate<S: Scalar>(
    bodies: &[ConvexBody<S>],
    density: usize,
) -> Result<OracleResult<S>, Error> {
    if density == 0 {
        return Err(Error::InvalidConfig("oracle density must be >= 1".into()));
    }
    let dim = bodies
        .first()
        .map(|b| b.dim())
        .ok_or_else(|| Error::InvalidConfig("no bodies".into()))?;
    let refs: Vec<BodyRef<'_, S>> = bodies.iter().enumerate().collect();
    let directions = oracle_directions::<S>(dim, density);
    // Probes are independent; aggregate in direction order so the kept
    // witness per order never depends on thread scheduling.
    let hits: Vec<Option<LineWitness<S>>> = directions
        .par_iter()
        .map(|u| transversal_for_direction(u, &refs))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut orders = BTreeMap::new();
    for w in hits.into_iter().flatten() {
        debug_assert!(w.verify(&refs));
        orders.entry(w.order()).or_insert(w);
    }
    Ok(OracleResult {
        orders,
        probes: density as u64,
        directions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn collinear_exact_cubes() {
        let cfg = GenConfig::<Rat>::new(3, 3, GenKind::Collinear, 0);
        let bodies = generate(&cfg).unwrap();
        assert_eq!(bodies.len(), 3);
        assert_eq!(bodies[0].vertices().len(), 8);
        // Second cube is centered at (2,0,0).
        assert!(bodies[1]
            .vertices()
            .iter()
            .all(|v| v.coords()[0] >= crate::rat(3, 2) && v.coords()[0] <= crate::rat(5, 2)));
    }

    #[test]
    fn grid_is_deterministic_and_disjoint() {
        let cfg = GenConfig::<Rat>::new(6, 3, GenKind::GridBoxes, 7);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate(&GenConfig::<Rat>::new(6, 3, GenKind::GridBoxes, 8)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn kind_dim_mismatch_is_config_error() {
        let cfg = GenConfig::<Rat>::new(5, 3, GenKind::Flower2d, 0);
        assert!(matches!(generate(&cfg), Err(Error::InvalidConfig(_))));
        let cfg = GenConfig::<Rat>::new(5, 2, GenKind::Flower3d, 0);
        assert!(matches!(generate(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn flower2d_segments_are_disjoint() {
        let cfg = GenConfig::<Rat>::new(6, 2, GenKind::Flower2d, 3);
        let bodies = generate(&cfg).unwrap();
        assert_eq!(bodies.len(), 6);
        for b in &bodies {
            assert_eq!(b.vertices().len(), 2);
        }
    }

    #[test]
    fn oracle_on_collinear_three() {
        let cfg = GenConfig::<Rat>::new(3, 3, GenKind::Collinear, 0);
        let bodies = generate(&cfg).unwrap();
        let res = oracle_enumerate(&bodies, 2000).unwrap();
        let keys: Vec<_> = res.orders.keys().cloned().collect();
        assert_eq!(
            keys,
            vec![OrientedOrder(vec![0, 1, 2]), OrientedOrder(vec![2, 1, 0])]
        );
        assert_eq!(res.unoriented_count(), 1);
        // Reproducible per (bodies, density).
        let res2 = oracle_enumerate(&bodies, 2000).unwrap();
        let keys2: Vec<_> = res2.orders.keys().cloned().collect();
        assert_eq!(keys, keys2);
    }

    #[test]
    fn oracle_two_bodies() {
        let cfg = GenConfig::<Rat>::new(2, 3, GenKind::Collinear, 0);
        let bodies = generate(&cfg).unwrap();
        let res = oracle_enumerate(&bodies, 500).unwrap();
        assert_eq!(res.unoriented_count(), 1);
    }

    #[test]
    fn oracle_reports_none_when_nothing_found() {
        use crate::body::test_bodies::cube;
        let bodies = vec![
            cube("a", 0, 0, 0, 1, 2),
            cube("b", 10, 0, 0, 1, 2),
            cube("c", 0, 10, 0, 1, 2),
        ];
        let res = oracle_enumerate(&bodies, 500).unwrap();
        assert!(res.orders.is_empty());
    }

    #[test]
    fn flower3d_admits_all_four_swap_combinations() {
        let cfg = GenConfig::<Rat>::new(4, 3, GenKind::Flower3d, 1);
        let bodies = generate(&cfg).unwrap();
        let res = oracle_enumerate(&bodies, 2000).unwrap();
        // Orders on {0,1} x {2,3} with both swaps realized.
        let found: std::collections::BTreeSet<Vec<usize>> =
            res.orders.keys().map(|o| o.0.clone()).collect();
        for a in [[0, 1], [1, 0]] {
            for b in [[2, 3], [3, 2]] {
                let fwd = vec![a[0], a[1], b[0], b[1]];
                let bwd: Vec<usize> = fwd.iter().rev().copied().collect();
                assert!(
                    found.contains(&fwd) || found.contains(&bwd),
                    "missing swap combination {fwd:?} in {found:?}"
                );
            }
        }
    }
}
