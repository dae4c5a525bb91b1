//! Small exact linear algebra: vectors of scalar coordinates, sign
//! predicates, rays (scale-normalized directions), and the 2-plane
//! intersection solve.

use std::fmt;

use crate::error::Error;
use crate::scalar::Scalar;

/// A point or direction in dimension 2 or 3, with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Vector(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| S::from_int(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Vector(vec![S::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<S> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        self.0
            .iter()
            .zip(&other.0)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, factor: &S) -> Self {
        Vector(self.0.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Vector(self.0.iter().map(|c| -c.clone()).collect())
    }

    /// Cross product; both operands must be 3-dimensional.
    pub fn cross(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), 3, "cross product needs dimension 3");
        assert_eq!(other.dim(), 3, "cross product needs dimension 3");
        let a = &self.0;
        let b = &other.0;
        Vector(vec![
            a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
            a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
            a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
        ])
    }

    /// Counterclockwise perpendicular; 2-dimensional only.
    pub fn perp(&self) -> Self {
        assert_eq!(self.dim(), 2, "perp needs dimension 2");
        Vector(vec![-self.0[1].clone(), self.0[0].clone()])
    }
}

impl<S: fmt::Display> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Exact sign of the inner product of two same-dimension vectors.
pub fn sign_dot<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> Result<i8, Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.dot(b).sign())
}

/// An oriented direction on the unit sphere, kept as a rational ray.
///
/// The stored coordinates are scale-normalized by a positive factor so that
/// structural equality coincides with "equal up to a positive multiple": two
/// antipodal directions are distinct rays. No square roots are ever taken.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ray<S> {
    coords: Vector<S>,
}

impl<S: Scalar> Ray<S> {
    /// Normalize a nonzero vector into a ray. The scale factor is always
    /// positive, so orientation is preserved.
    pub fn new(v: Vector<S>) -> Result<Self, Error> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let mut coords = v.into_coords();
        if !S::canonicalize_direction(&mut coords) {
            let lead = coords
                .iter()
                .find(|c| !c.is_zero())
                .expect("nonzero vector")
                .abs();
            for c in coords.iter_mut() {
                *c = c.clone() / lead.clone();
            }
        }
        Ok(Ray {
            coords: Vector::new(coords),
        })
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Ray::new(Vector::from_ints(coords)).expect("nonzero integer ray")
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn vector(&self) -> &Vector<S> {
        &self.coords
    }

    /// True when the first nonzero coordinate is positive.
    pub fn is_canonical(&self) -> bool {
        self.coords
            .coords()
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .unwrap_or(false)
    }

    /// The antipodal-pair representative whose first nonzero coordinate is +1.
    pub fn canonical(&self) -> Ray<S> {
        if self.is_canonical() {
            self.clone()
        } else {
            self.antipode()
        }
    }

    pub fn antipode(&self) -> Ray<S> {
        Ray {
            coords: self.coords.neg(),
        }
    }
}

impl<S: fmt::Display> fmt::Debug for Ray<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ray{:?}", self.coords)
    }
}

/// Canonical antipodal representative of a nonzero direction: the result is
/// scaled so its first nonzero coordinate is +1.
pub fn canonical_ray<S: Scalar>(v: &Vector<S>) -> Result<Ray<S>, Error> {
    Ok(Ray::new(v.clone())?.canonical())
}

/// A point on the intersection line of two non-parallel planes
/// `n1.x = c1`, `n2.x = c2` in R^3, together with the line direction.
pub fn plane_intersection_line<S: Scalar>(
    n1: &Vector<S>,
    c1: &S,
    n2: &Vector<S>,
    c2: &S,
) -> Result<(Vector<S>, Vector<S>), Error> {
    let dir = n1.cross(n2);
    if dir.is_zero() {
        return Err(Error::ParallelCircles(0, 1));
    }
    // Drop the coordinate where |dir| is largest and solve the 2x2 system in
    // the remaining two coordinates; its determinant is +-dir[k] != 0.
    let k = {
        let abs: Vec<S> = dir.coords().iter().map(|c| c.abs()).collect();
        let mut best = 0;
        for i in 1..3 {
            if abs[i] > abs[best] {
                best = i;
            }
        }
        best
    };
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let a = n1.coords()[i].clone();
    let b = n1.coords()[j].clone();
    let c = n2.coords()[i].clone();
    let d = n2.coords()[j].clone();
    let det = a.clone() * d.clone() - b.clone() * c.clone();
    debug_assert!(!det.is_zero());
    let xi = (c1.clone() * d - c2.clone() * b) / det.clone();
    let xj = (a * c2.clone() - c * c1.clone()) / det;
    let mut point = vec![S::zero(); 3];
    point[i] = xi;
    point[j] = xj;
    Ok((Vector::new(point), dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use num_rational::BigRational;

    type V = Vector<BigRational>;

    #[test]
    fn sign_dot_examples() {
        let a = V::from_ints(&[1, 0, 0]);
        let b = V::from_ints(&[0, 1, 0]);
        assert_eq!(sign_dot(&a, &b).unwrap(), 0);

        let a = V::from_ints(&[1, 2, 3]);
        let b = V::from_ints(&[1, 1, 1]);
        assert_eq!(sign_dot(&a, &b).unwrap(), 1);

        let a = V::new(vec![rat(1, 3), rat_int(-2)]);
        let b = V::new(vec![rat_int(6), rat_int(1)]);
        assert_eq!(sign_dot(&a, &b).unwrap(), 0);

        let short = V::from_ints(&[1, 2]);
        let long = V::from_ints(&[1, 2, 3]);
        assert!(matches!(
            sign_dot(&short, &long),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn canonical_ray_examples() {
        let r = canonical_ray(&V::from_ints(&[-2, 4, 0])).unwrap();
        assert_eq!(r.vector().coords(), V::from_ints(&[1, -2, 0]).coords());

        let r = canonical_ray(&V::from_ints(&[0, 0, 5])).unwrap();
        assert_eq!(r.vector().coords(), V::from_ints(&[0, 0, 1]).coords());

        let r = canonical_ray(&V::from_ints(&[3, 3, 3])).unwrap();
        assert_eq!(r.vector().coords(), V::from_ints(&[1, 1, 1]).coords());

        assert!(canonical_ray(&V::zero(3)).is_err());
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let r = canonical_ray(&V::from_ints(&[-7, 2, -5])).unwrap();
        assert_eq!(r.canonical(), r);
        assert!(r.is_canonical());
    }

    #[test]
    fn rays_identify_positive_multiples_only() {
        let a = Ray::<BigRational>::from_ints(&[2, -4, 6]);
        let b = Ray::<BigRational>::from_ints(&[1, -2, 3]);
        let c = Ray::<BigRational>::from_ints(&[-1, 2, -3]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.antipode(), c);
    }

    #[test]
    fn cross_and_perp() {
        let x = V::from_ints(&[1, 0, 0]);
        let y = V::from_ints(&[0, 1, 0]);
        assert_eq!(x.cross(&y).coords(), V::from_ints(&[0, 0, 1]).coords());
        let n = V::from_ints(&[3, 4]);
        assert_eq!(n.perp().coords(), V::from_ints(&[-4, 3]).coords());
    }

    #[test]
    fn plane_intersection_line_example() {
        // x = 1 and y = 1 meet in the vertical line through (1,1,0).
        let n1 = V::from_ints(&[1, 0, 0]);
        let n2 = V::from_ints(&[0, 1, 0]);
        let (p, dir) = plane_intersection_line(&n1, &rat_int(1), &n2, &rat_int(1)).unwrap();
        assert_eq!(p.coords(), V::from_ints(&[1, 1, 0]).coords());
        assert_eq!(p.dot(&n1), rat_int(1));
        assert_eq!(p.dot(&n2), rat_int(1));
        assert_eq!(dir.dot(&n1), rat_int(0));
        assert_eq!(dir.dot(&n2), rat_int(0));
    }
}
