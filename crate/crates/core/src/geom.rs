//! Geometric primitives shared by every algorithm: points, balls, cones and
//! axis-aligned dyadic cells, plus the handful of distance/projection
//! predicates everything else is built from.
//!
//! All predicates use the scalar's default absolute tolerance for tie
//! detection; distance ties are broken toward the lexicographically smallest
//! point so that every algorithm in the crate is deterministic.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::scalar::{cmp_tol, Scalar};

/// A point of `R^d`. Coordinates are plain scalars; the dimension is the
/// length of the vector and is fixed per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<F: Scalar> {
    pub coords: Vec<F>,
}

impl<F: Scalar> Point<F> {
    /// Wraps a coordinate vector. All coordinates must be finite.
    pub fn new(coords: Vec<F>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()), "non-finite coordinate");
        Point { coords }
    }

    /// Builds a point from `f64` literals, casting into the scalar type.
    pub fn from_f64s(coords: &[f64]) -> Self {
        Point::new(coords.iter().map(|&c| F::cast(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The origin of `R^d`.
    pub fn zeros(dim: usize) -> Self {
        Point::new(vec![F::zero(); dim])
    }

    /// `self - other`, as a coordinate vector.
    pub fn sub(&self, other: &Self) -> Vec<F> {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a - b)
            .collect()
    }

    /// `self + t * dir`.
    pub fn add_scaled(&self, dir: &[F], t: F) -> Self {
        debug_assert_eq!(self.dim(), dir.len());
        Point::new(
            self.coords
                .iter()
                .zip(dir)
                .map(|(&a, &d)| a + t * d)
                .collect(),
        )
    }

    /// Lexicographic comparison, coordinate by coordinate.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.partial_cmp(b).expect("non-finite coordinate") {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

/// Dot product of two coordinate vectors.
pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm of a coordinate vector.
pub fn norm<F: Scalar>(v: &[F]) -> F {
    dot(v, v).sqrt()
}

/// Normalizes `v` in place; panics on the zero vector.
pub fn normalize<F: Scalar>(v: &mut [F]) {
    let n = norm(v);
    assert!(n > F::zero(), "cannot normalize the zero vector");
    for c in v.iter_mut() {
        *c = *c / n;
    }
}

/// Euclidean distance.
///
/// Panics if the dimensions differ.
pub fn dist<F: Scalar>(a: &Point<F>, b: &Point<F>) -> F {
    assert_eq!(a.dim(), b.dim(), "dist: dimension mismatch");
    let mut acc = F::zero();
    for (&x, &y) in a.coords.iter().zip(&b.coords) {
        let d = x - y;
        acc = acc + d * d;
    }
    acc.sqrt()
}

/// Minimum distance from `q` to a nonempty set of points, together with the
/// index of a minimizer. Ties (within tolerance) go to the lexicographically
/// smallest point.
///
/// Panics if `set` is empty.
pub fn dist_to_set<F: Scalar>(q: &Point<F>, set: &[Point<F>]) -> (F, usize) {
    assert!(!set.is_empty(), "dist_to_set: empty set");
    let mut best = 0usize;
    let mut best_d = dist(q, &set[0]);
    for (i, p) in set.iter().enumerate().skip(1) {
        let d = dist(q, p);
        match cmp_tol(d, best_d) {
            Ordering::Less => {
                best = i;
                best_d = d;
            }
            Ordering::Equal => {
                if p.lex_cmp(&set[best]) == Ordering::Less {
                    best = i;
                    best_d = d;
                }
            }
            Ordering::Greater => {}
        }
    }
    (best_d, best)
}

/// Closest point of the segment `ab` to `q`, with the barycentric parameter
/// `t` such that the result equals `(1-t)a + t·b`. A degenerate segment
/// (`a == b`) yields `(a, 0)`.
pub fn project_to_segment<F: Scalar>(
    q: &Point<F>,
    a: &Point<F>,
    b: &Point<F>,
) -> (Point<F>, F) {
    let ab = b.sub(a);
    let len2 = dot(&ab, &ab);
    if len2 <= F::zero() {
        return (a.clone(), F::zero());
    }
    let aq = q.sub(a);
    let t = (dot(&aq, &ab) / len2).max(F::zero()).min(F::one());
    (a.add_scaled(&ab, t), t)
}

/// Signed scalar `s` such that `origin + s·dir` is the orthogonal projection
/// of `x` onto the line through `origin` with unit direction `dir`.
pub fn projection_along_ray<F: Scalar>(x: &Point<F>, origin: &Point<F>, dir: &[F]) -> F {
    debug_assert!((norm(dir) - F::one()).abs() <= F::cast(1e-9), "dir must be unit");
    dot(&x.sub(origin), dir)
}

/// A Euclidean ball; `radius >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball<F: Scalar> {
    pub center: Point<F>,
    pub radius: F,
}

impl<F: Scalar> Ball<F> {
    pub fn new(center: Point<F>, radius: F) -> Self {
        assert!(radius >= F::zero(), "ball radius must be nonnegative");
        Ball { center, radius }
    }
}

/// A circular cone: apex, unit axis and half-angle in `(0, π/2)`.
/// Membership is `angle(x - apex, axis) <= half_angle`; the apex belongs to
/// the cone.
#[derive(Debug, Clone)]
pub struct Cone<F: Scalar> {
    pub apex: Point<F>,
    pub axis: Vec<F>,
    pub half_angle: F,
}

impl<F: Scalar> Cone<F> {
    /// Builds a cone, normalizing `axis`. Panics on a zero axis or a
    /// half-angle outside `(0, π/2)`.
    pub fn new(apex: Point<F>, mut axis: Vec<F>, half_angle: F) -> Self {
        assert_eq!(apex.dim(), axis.len(), "cone axis dimension mismatch");
        assert!(
            half_angle > F::zero() && half_angle < F::cast(std::f64::consts::FRAC_PI_2),
            "half-angle must lie in (0, π/2)"
        );
        normalize(&mut axis);
        Cone { apex, axis, half_angle }
    }

    /// True when `x` lies in the (closed) cone, within tolerance.
    pub fn contains(&self, x: &Point<F>) -> bool {
        let v = x.sub(&self.apex);
        let n = norm(&v);
        if n <= F::tol() {
            return true;
        }
        // Compare cosines: angle <= half_angle  <=>  cos(angle) >= cos(half_angle).
        dot(&v, &self.axis) / n >= self.half_angle.cos() - F::tol()
    }

    /// True when the direction `v` (from the apex) lies in the cone.
    pub fn contains_direction(&self, v: &[F]) -> bool {
        let n = norm(v);
        if n <= F::tol() {
            return true;
        }
        dot(v, &self.axis) / n >= self.half_angle.cos() - F::tol()
    }
}

/// An axis-aligned dyadic cell of the unit cube: low corner plus a depth,
/// with side `2^-depth`. Dyadic corners are exactly representable, so cell
/// geometry is reproducible across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell<F: Scalar> {
    pub low: Point<F>,
    pub depth: u32,
}

impl<F: Scalar> Cell<F> {
    /// The root cell `[0,1]^d`.
    pub fn unit(dim: usize) -> Self {
        Cell { low: Point::zeros(dim), depth: 0 }
    }

    pub fn dim(&self) -> usize {
        self.low.dim()
    }

    pub fn side(&self) -> F {
        F::cast(0.5).powi(self.depth as i32)
    }

    /// Cell diameter (full-space diagonal).
    pub fn diameter(&self) -> F {
        self.side() * F::cast(self.dim() as f64).sqrt()
    }

    pub fn center(&self) -> Point<F> {
        let half = self.side() * F::cast(0.5);
        Point::new(self.low.coords.iter().map(|&c| c + half).collect())
    }

    /// The `2^d` children one level deeper.
    pub fn children(&self) -> Vec<Cell<F>> {
        let d = self.dim();
        let half = self.side() * F::cast(0.5);
        let mut out = Vec::with_capacity(1 << d);
        for mask in 0u32..(1u32 << d) {
            let mut low = self.low.coords.clone();
            for (j, c) in low.iter_mut().enumerate() {
                if mask >> j & 1 == 1 {
                    *c = *c + half;
                }
            }
            out.push(Cell { low: Point::new(low), depth: self.depth + 1 });
        }
        out
    }

    /// Distance from `p` to the nearest point of the (closed) cell.
    pub fn min_dist(&self, p: &Point<F>) -> F {
        let side = self.side();
        let mut acc = F::zero();
        for (&lo, &c) in self.low.coords.iter().zip(&p.coords) {
            let hi = lo + side;
            let d = if c < lo {
                lo - c
            } else if c > hi {
                c - hi
            } else {
                F::zero()
            };
            acc = acc + d * d;
        }
        acc.sqrt()
    }

    /// Distance from `p` to the farthest corner of the cell.
    pub fn max_corner_dist(&self, p: &Point<F>) -> F {
        let side = self.side();
        let mut acc = F::zero();
        for (&lo, &c) in self.low.coords.iter().zip(&p.coords) {
            let hi = lo + side;
            let d = (c - lo).abs().max((c - hi).abs());
            acc = acc + d * d;
        }
        acc.sqrt()
    }
}

/// True iff every point of the cell lies in the closed ball, i.e. the
/// farthest corner does.
pub fn cell_inside_ball<F: Scalar>(cell: &Cell<F>, ball: &Ball<F>) -> bool {
    cell.max_corner_dist(&ball.center) <= ball.radius
}
