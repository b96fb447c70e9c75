//! The probe layer: nearest-neighbor oracles over explicit and analytic
//! point sets.
//!
//! An [`Oracle`] answers exact NN queries (`nn_query`), benign ANN queries
//! (`ann_query`, which simply delegates — an exact answer is a legal ANN
//! answer) and, for finite sets, adversarial ANN queries that return the
//! *worst* point still legal under the `(1+ε)` guarantee. The adversarial
//! wrapper is what the test suites run against; the benign one is the
//! default for demos.
//!
//! Analytic sets realize the infinite-point-set setting with closed-form
//! answers: a sphere projects radially, a union of solid balls clamps to the
//! nearest ball, a box boundary projects per face.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist, Ball, Point};
use crate::scalar::{cmp_tol, Scalar};

/// Result of a probe: a member of the represented set and its distance from
/// the query. `distance == dist(query, point)` always, even for approximate
/// queries — the approximation shows in *which* point is returned.
#[derive(Debug, Clone, PartialEq)]
pub struct NnAnswer<F: Scalar> {
    pub point: Point<F>,
    pub distance: F,
}

/// Monotone counters for probe accounting. Increments are relaxed atomics;
/// totals are exact once all querying sessions have finished.
#[derive(Debug, Default)]
pub struct OracleStats {
    exact: AtomicU64,
    ann: AtomicU64,
}

/// A point-in-time view of [`OracleStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSnapshot {
    pub exact_queries: u64,
    pub ann_queries: u64,
}

impl OracleStats {
    fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            exact_queries: self.exact.load(AtomicOrdering::Relaxed),
            ann_queries: self.ann.load(AtomicOrdering::Relaxed),
        }
    }
}

impl StatsSnapshot {
    /// Probes issued between `earlier` and `self`.
    pub fn since(&self, earlier: &StatsSnapshot) -> StatsSnapshot {
        StatsSnapshot {
            exact_queries: self.exact_queries - earlier.exact_queries,
            ann_queries: self.ann_queries - earlier.ann_queries,
        }
    }

    pub fn total(&self) -> u64 {
        self.exact_queries + self.ann_queries
    }
}

/// The set an oracle represents. Every variant is nonempty and compact.
#[derive(Debug, Clone)]
pub enum OracleSet<F: Scalar> {
    /// An explicit list of points.
    Finite(Vec<Point<F>>),
    /// The sphere (surface only) of the given center and radius.
    Sphere { center: Point<F>, radius: F },
    /// A union of solid balls.
    BallUnion(Vec<Ball<F>>),
    /// The boundary (all faces) of an axis-aligned box.
    BoxBoundary { low: Point<F>, high: Point<F> },
}

impl<F: Scalar> OracleSet<F> {
    fn dim(&self) -> usize {
        match self {
            OracleSet::Finite(pts) => pts.first().map_or(0, Point::dim),
            OracleSet::Sphere { center, .. } => center.dim(),
            OracleSet::BallUnion(balls) => balls.first().map_or(0, |b| b.center.dim()),
            OracleSet::BoxBoundary { low, .. } => low.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::EmptySet);
        }
        match self {
            OracleSet::Finite(pts) => {
                if pts.is_empty() {
                    return Err(Error::EmptySet);
                }
                for p in pts {
                    if p.dim() != d {
                        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
                    }
                }
            }
            OracleSet::Sphere { radius, .. } => {
                if *radius < F::zero() {
                    return Err(Error::InvalidParameter("sphere radius < 0".into()));
                }
            }
            OracleSet::BallUnion(balls) => {
                if balls.is_empty() {
                    return Err(Error::EmptySet);
                }
                for b in balls {
                    if b.center.dim() != d {
                        return Err(Error::DimensionMismatch { expected: d, got: b.center.dim() });
                    }
                    if b.radius < F::zero() {
                        return Err(Error::InvalidParameter("ball radius < 0".into()));
                    }
                }
            }
            OracleSet::BoxBoundary { low, high } => {
                if high.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: high.dim() });
                }
                for (&l, &h) in low.coords.iter().zip(&high.coords) {
                    if l > h {
                        return Err(Error::InvalidParameter("box has low > high".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A nearest-neighbor oracle: immutable set plus probe counters.
#[derive(Debug)]
pub struct Oracle<F: Scalar> {
    set: OracleSet<F>,
    dim: usize,
    stats: OracleStats,
}

impl<F: Scalar> Oracle<F> {
    pub fn new(set: OracleSet<F>) -> Result<Self> {
        set.validate()?;
        let dim = set.dim();
        Ok(Oracle { set, dim, stats: OracleStats::default() })
    }

    /// Convenience constructor for explicit point sets.
    pub fn from_points(points: Vec<Point<F>>) -> Result<Self> {
        Oracle::new(OracleSet::Finite(points))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&self) -> &OracleSet<F> {
        &self.set
    }

    /// The explicit points, when the represented set is finite.
    pub fn finite_points(&self) -> Option<&[Point<F>]> {
        match &self.set {
            OracleSet::Finite(pts) => Some(pts),
            _ => None,
        }
    }

    pub fn stats(&self) -> StatsSnapshot {
        self.stats.snapshot()
    }

    fn check_dim(&self, q: &Point<F>) -> Result<()> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: q.dim() });
        }
        Ok(())
    }

    /// Exact nearest neighbor of `q` in the represented set. Ties resolve to
    /// the lexicographically smallest point.
    pub fn nn_query(&self, q: &Point<F>) -> Result<NnAnswer<F>> {
        self.check_dim(q)?;
        self.stats.exact.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(self.compute_nn(q))
    }

    /// `(1+eps)`-approximate nearest neighbor. This implementation delegates
    /// to the exact computation — an exact answer is always legal.
    pub fn ann_query(&self, q: &Point<F>, eps: F) -> Result<NnAnswer<F>> {
        if eps <= F::zero() {
            return Err(Error::InvalidParameter("ann eps must be > 0".into()));
        }
        self.check_dim(q)?;
        self.stats.ann.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(self.compute_nn(q))
    }

    /// Worst legal `(1+eps)`-ANN answer: the point of the (finite) set
    /// farthest from `q` among all points within `(1+eps)` times the exact
    /// NN distance. `eps = 0` reduces to the exact query.
    pub fn adversarial_ann_query(&self, q: &Point<F>, eps: F) -> Result<NnAnswer<F>> {
        if eps < F::zero() {
            return Err(Error::InvalidParameter("ann eps must be >= 0".into()));
        }
        self.check_dim(q)?;
        let pts = self.finite_points().ok_or(Error::RequiresFiniteSet)?;
        self.stats.ann.fetch_add(1, AtomicOrdering::Relaxed);

        let exact = pts
            .iter()
            .map(|p| dist(q, p))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .expect("finite sets are nonempty");
        let limit = (F::one() + eps) * exact;
        let mut best: Option<(&Point<F>, F)> = None;
        for p in pts {
            let d = dist(q, p);
            if d > limit {
                continue;
            }
            best = match best {
                None => Some((p, d)),
                Some((bp, bd)) => match cmp_tol(d, bd) {
                    Ordering::Greater => Some((p, d)),
                    Ordering::Equal if p.lex_cmp(bp) == Ordering::Less => Some((p, d)),
                    _ => Some((bp, bd)),
                },
            };
        }
        let (p, d) = best.expect("the exact NN is always within the limit");
        Ok(NnAnswer { point: p.clone(), distance: d })
    }

    fn compute_nn(&self, q: &Point<F>) -> NnAnswer<F> {
        let point = match &self.set {
            OracleSet::Finite(pts) => {
                let (_, idx) = crate::geom::dist_to_set(q, pts);
                pts[idx].clone()
            }
            OracleSet::Sphere { center, radius } => sphere_nn(q, center, *radius),
            OracleSet::BallUnion(balls) => ball_union_nn(q, balls),
            OracleSet::BoxBoundary { low, high } => box_boundary_nn(q, low, high),
        };
        let distance = dist(q, &point);
        NnAnswer { point, distance }
    }
}

/// Radial projection onto the sphere. A query at the exact center picks the
/// surface point in the `+e_1` direction.
fn sphere_nn<F: Scalar>(q: &Point<F>, center: &Point<F>, radius: F) -> Point<F> {
    let v = q.sub(center);
    let n = crate::geom::norm(&v);
    if n == F::zero() {
        let mut c = center.coords.clone();
        c[0] += radius;
        return Point::new(c);
    }
    center.add_scaled(&v, radius / n)
}

/// Nearest point of a single solid ball: the query itself when inside.
fn solid_ball_nn<F: Scalar>(q: &Point<F>, ball: &Ball<F>) -> (Point<F>, F) {
    let v = q.sub(&ball.center);
    let n = crate::geom::norm(&v);
    if n <= ball.radius {
        return (q.clone(), F::zero());
    }
    if n == F::zero() {
        // radius must be 0 here: the ball degenerates to its center.
        return (ball.center.clone(), F::zero());
    }
    (ball.center.add_scaled(&v, ball.radius / n), n - ball.radius)
}

fn ball_union_nn<F: Scalar>(q: &Point<F>, balls: &[Ball<F>]) -> Point<F> {
    let mut best: Option<(Point<F>, F)> = None;
    for b in balls {
        let (cand, d) = solid_ball_nn(q, b);
        best = match best {
            None => Some((cand, d)),
            Some((bp, bd)) => match cmp_tol(d, bd) {
                Ordering::Less => Some((cand, d)),
                Ordering::Equal if cand.lex_cmp(&bp) == Ordering::Less => Some((cand, d)),
                _ => Some((bp, bd)),
            },
        };
    }
    best.expect("ball unions are nonempty").0
}

/// Per-face projection minimum over the `2d` faces of the box.
fn box_boundary_nn<F: Scalar>(q: &Point<F>, low: &Point<F>, high: &Point<F>) -> Point<F> {
    let d = low.dim();
    let mut best: Option<(Point<F>, F)> = None;
    for j in 0..d {
        for &face in &[low.coords[j], high.coords[j]] {
            let mut r = Vec::with_capacity(d);
            for i in 0..d {
                if i == j {
                    r.push(face);
                } else {
                    r.push(q.coords[i].max(low.coords[i]).min(high.coords[i]));
                }
            }
            let cand = Point::new(r);
            let dq = dist(q, &cand);
            best = match best {
                None => Some((cand, dq)),
                Some((bp, bd)) => match cmp_tol(dq, bd) {
                    Ordering::Less => Some((cand, dq)),
                    Ordering::Equal if cand.lex_cmp(&bp) == Ordering::Less => Some((cand, dq)),
                    _ => Some((bp, bd)),
                },
            };
        }
    }
    best.expect("boxes have at least one face").0
}

/// JSON description of an oracle: `{"kind": ..., "dim": ..., "params": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleConfig {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: OracleKindConfig,
}

/// The `kind`/`params` part of [`OracleConfig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum OracleKindConfig {
    FiniteSet { points: Vec<Vec<f64>> },
    Sphere { center: Vec<f64>, radius: f64 },
    BallUnion { balls: Vec<BallParams> },
    BoxBoundary { low: Vec<f64>, high: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallParams {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl OracleConfig {
    /// Builds the oracle this config describes, checking dimensions against
    /// the declared `dim`.
    pub fn build<F: Scalar>(&self) -> Result<Oracle<F>> {
        let to_point = |v: &Vec<f64>| -> Result<Point<F>> {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
            Ok(Point::from_f64s(v))
        };
        let set = match &self.kind {
            OracleKindConfig::FiniteSet { points } => {
                OracleSet::Finite(points.iter().map(to_point).collect::<Result<_>>()?)
            }
            OracleKindConfig::Sphere { center, radius } => OracleSet::Sphere {
                center: to_point(center)?,
                radius: F::cast(*radius),
            },
            OracleKindConfig::BallUnion { balls } => OracleSet::BallUnion(
                balls
                    .iter()
                    .map(|b| Ok(Ball::new(to_point(&b.center)?, F::cast(b.radius))))
                    .collect::<Result<_>>()?,
            ),
            OracleKindConfig::BoxBoundary { low, high } => OracleSet::BoxBoundary {
                low: to_point(low)?,
                high: to_point(high)?,
            },
        };
        Oracle::new(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(coords: &[f64]) -> Point<f64> {
        Point::from_f64s(coords)
    }

    fn rand_query(rng: &mut ChaCha8Rng, d: usize) -> Point<f64> {
        Point::new((0..d).map(|_| rng.random_range(0.0..1.0)).collect())
    }

    #[test]
    fn finite_nn_basic() {
        let o = Oracle::from_points(vec![p(&[0.0, 0.0]), p(&[1.0, 0.0])]).unwrap();
        let a = o.nn_query(&p(&[0.9, 0.0])).unwrap();
        assert_eq!(a.point, p(&[1.0, 0.0]));
        assert_relative_eq!(a.distance, 0.1, max_relative = 1e-12);
    }

    #[test]
    fn sphere_radial_projection() {
        let o = Oracle::new(OracleSet::Sphere { center: p(&[0.5, 0.5]), radius: 0.25 }).unwrap();
        let a = o.nn_query(&p(&[0.5, 0.9])).unwrap();
        assert_relative_eq!(a.point.coords[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(a.point.coords[1], 0.75, max_relative = 1e-15);
        assert_relative_eq!(a.distance, 0.15, max_relative = 1e-12);
    }

    #[test]
    fn sphere_center_query_picks_plus_e1() {
        let o = Oracle::new(OracleSet::Sphere { center: p(&[0.5, 0.5]), radius: 0.25 }).unwrap();
        let a = o.nn_query(&p(&[0.5, 0.5])).unwrap();
        assert_eq!(a.point, p(&[0.75, 0.5]));
    }

    #[test]
    fn ball_union_interior_query_is_its_own_nn() {
        let o = Oracle::new(OracleSet::BallUnion(vec![Ball::new(p(&[0.5, 0.5]), 0.2)])).unwrap();
        let a = o.nn_query(&p(&[0.5, 0.6])).unwrap();
        assert_eq!(a.point, p(&[0.5, 0.6]));
        assert_eq!(a.distance, 0.0);
    }

    #[test]
    fn box_boundary_inside_and_outside() {
        let o = Oracle::new(OracleSet::BoxBoundary { low: p(&[0.0, 0.0]), high: p(&[1.0, 1.0]) })
            .unwrap();
        // Inside: closest face is x = 0.
        let a = o.nn_query(&p(&[0.1, 0.5])).unwrap();
        assert_eq!(a.point, p(&[0.0, 0.5]));
        // Outside: clamp onto the near face.
        let b = o.nn_query(&p(&[1.5, 0.5])).unwrap();
        assert_eq!(b.point, p(&[1.0, 0.5]));
        assert_relative_eq!(b.distance, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let o = Oracle::from_points(vec![p(&[0.0, 0.0])]).unwrap();
        assert!(matches!(
            o.nn_query(&p(&[0.0])),
            Err(crate::Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn ann_delegates_to_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<_> = (0..40).map(|_| rand_query(&mut rng, 3)).collect();
        let o = Oracle::from_points(pts).unwrap();
        for _ in 0..1_000 {
            let q = rand_query(&mut rng, 3);
            let exact = o.nn_query(&q).unwrap();
            let ann = o.ann_query(&q, 0.1).unwrap();
            assert_eq!(exact, ann);
        }
    }

    #[test]
    fn ann_zero_distance_is_exact_regardless_of_eps() {
        let pts = vec![p(&[0.25, 0.25]), p(&[0.75, 0.75])];
        let o = Oracle::from_points(pts).unwrap();
        let a = o.adversarial_ann_query(&p(&[0.25, 0.25]), 0.1).unwrap();
        assert_eq!(a.point, p(&[0.25, 0.25]));
        assert_eq!(a.distance, 0.0);
    }

    #[test]
    fn adversarial_picks_forced_far_point() {
        let o = Oracle::from_points(vec![p(&[0.0, 0.0]), p(&[1.0, 0.0])]).unwrap();
        // 0.53 <= 1.2 * 0.47: the far point is legal, hence returned.
        let a = o.adversarial_ann_query(&p(&[0.47, 0.0]), 0.2).unwrap();
        assert_eq!(a.point, p(&[1.0, 0.0]));
        // 0.9 > 1.2 * 0.1: only the true NN is legal.
        let b = o.adversarial_ann_query(&p(&[0.1, 0.0]), 0.2).unwrap();
        assert_eq!(b.point, p(&[0.0, 0.0]));
    }

    #[test]
    fn adversarial_eps_zero_equals_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<_> = (0..30).map(|_| rand_query(&mut rng, 2)).collect();
        let o = Oracle::from_points(pts).unwrap();
        for _ in 0..1_000 {
            let q = rand_query(&mut rng, 2);
            assert_eq!(
                o.nn_query(&q).unwrap().point,
                o.adversarial_ann_query(&q, 0.0).unwrap().point
            );
        }
    }

    #[test]
    fn adversarial_answers_are_legal_and_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<_> = (0..50).map(|_| rand_query(&mut rng, 2)).collect();
        let o = Oracle::from_points(pts.clone()).unwrap();
        for _ in 0..1_000 {
            let q = rand_query(&mut rng, 2);
            let eps = rng.random_range(0.0..0.5);
            let a = o.adversarial_ann_query(&q, eps).unwrap();
            let d_star = pts
                .iter()
                .map(|p| dist(&q, p))
                .min_by(|a, b| a.partial_cmp(b).unwrap())
                .unwrap();
            assert!(a.distance <= (1.0 + eps) * d_star + 1e-12);
            assert!(pts.contains(&a.point));
        }
    }

    #[test]
    fn analytic_answers_lie_on_the_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sphere = Oracle::new(OracleSet::Sphere { center: p(&[0.5, 0.5, 0.5]), radius: 0.3 })
            .unwrap();
        let balls = Oracle::new(OracleSet::BallUnion(vec![
            Ball::new(p(&[0.3, 0.3, 0.3]), 0.1),
            Ball::new(p(&[0.7, 0.7, 0.7]), 0.15),
        ]))
        .unwrap();
        for _ in 0..1_000 {
            let q = rand_query(&mut rng, 3);
            let s = sphere.nn_query(&q).unwrap();
            assert_relative_eq!(dist(&s.point, &p(&[0.5, 0.5, 0.5])), 0.3, epsilon = 1e-9);
            let b = balls.nn_query(&q).unwrap();
            let inside_some = [(0.3, 0.1), (0.7, 0.15)].iter().any(|&(c, r)| {
                dist(&b.point, &p(&[c, c, c])) <= r + 1e-9
            });
            assert!(inside_some);
        }
    }

    #[test]
    fn sphere_exactness_against_brute_force_sampling() {
        // Independent check of the closed form: no sampled sphere point is
        // closer than the claimed nearest neighbor.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let center = p(&[0.4, 0.6]);
        let o = Oracle::new(OracleSet::Sphere { center: center.clone(), radius: 0.2 }).unwrap();
        for _ in 0..200 {
            let q = rand_query(&mut rng, 2);
            let a = o.nn_query(&q).unwrap();
            for k in 0..500 {
                let t = 2.0 * std::f64::consts::PI * (k as f64) / 500.0;
                let s = p(&[0.4 + 0.2 * t.cos(), 0.6 + 0.2 * t.sin()]);
                assert!(dist(&q, &s) >= a.distance - 1e-9);
            }
        }
    }

    #[test]
    fn finite_nn_matches_independent_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<_> = (0..80).map(|_| rand_query(&mut rng, 3)).collect();
        let o = Oracle::from_points(pts.clone()).unwrap();
        for _ in 0..1_000 {
            let q = rand_query(&mut rng, 3);
            let a = o.nn_query(&q).unwrap();
            let min = pts
                .iter()
                .map(|p| dist(&q, p))
                .min_by(|x, y| x.partial_cmp(y).unwrap())
                .unwrap();
            assert_eq!(a.distance, min);
            assert_eq!(dist(&q, &a.point), a.distance);
        }
    }

    #[test]
    fn stats_survive_concurrent_sessions() {
        let o = std::sync::Arc::new(
            Oracle::from_points(vec![p(&[0.0, 0.0]), p(&[1.0, 1.0])]).unwrap(),
        );
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let o = o.clone();
                std::thread::spawn(move || {
                    for i in 0..100 {
                        let q = p(&[(t as f64) / 4.0, (i as f64) / 100.0]);
                        o.nn_query(&q).unwrap();
                        o.ann_query(&q, 0.2).unwrap();
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        let s = o.stats();
        assert_eq!(s.exact_queries, 400);
        assert_eq!(s.ann_queries, 400);
    }

    #[test]
    fn query_accounting_is_exact() {
        let o = Oracle::from_points(vec![p(&[0.0]), p(&[1.0])]).unwrap();
        for _ in 0..5 {
            o.nn_query(&p(&[0.3])).unwrap();
        }
        for _ in 0..3 {
            o.ann_query(&p(&[0.3]), 0.5).unwrap();
        }
        o.adversarial_ann_query(&p(&[0.3]), 0.5).unwrap();
        let s = o.stats();
        assert_eq!(s.exact_queries, 5);
        assert_eq!(s.ann_queries, 4);
    }

    #[test]
    fn config_round_trip_and_build() {
        let json = r#"{
            "kind": "sphere",
            "dim": 2,
            "params": { "center": [0.5, 0.5], "radius": 0.25 }
        }"#;
        let cfg: OracleConfig = serde_json::from_str(json).unwrap();
        let o: Oracle<f64> = cfg.build().unwrap();
        assert_eq!(o.dim(), 2);
        let back = serde_json::to_string(&cfg).unwrap();
        let cfg2: OracleConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(cfg2.dim, 2);
    }

    #[test]
    fn config_rejects_mismatched_dims() {
        let cfg = OracleConfig {
            dim: 3,
            kind: OracleKindConfig::FiniteSet { points: vec![vec![0.0, 1.0]] },
        };
        assert!(cfg.build::<f64>().is_err());
    }
}
