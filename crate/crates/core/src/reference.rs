//! Brute-force ground truth used to validate the probe-driven algorithms:
//! Gonzalez greedy k-center on explicit points, exact extremal queries, and
//! exact distance to the convex hull.
//!
//! Nothing in this module touches an oracle; it sees the points directly.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{dist, dot, norm, project_to_segment, Point};
use crate::scalar::{cmp_tol, Scalar};

/// Prefix of the greedy permutation with its covering radii. `radii[i]` is
/// the covering radius of the first `i+1` centers, so the sequence is
/// non-increasing; `radii[k-1]` 2-approximates the optimal k-center radius.
#[derive(Debug, Clone)]
pub struct GonzalezResult<F: Scalar> {
    pub centers: Vec<Point<F>>,
    pub center_indices: Vec<usize>,
    pub radii: Vec<F>,
}

/// Greedy k-center: start from the lexicographically smallest point, then
/// repeatedly take the point farthest from the chosen centers (ties to the
/// lexicographically smallest point).
pub fn gonzalez<F: Scalar>(points: &[Point<F>], k: usize) -> Result<GonzalezResult<F>> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if k < 1 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={}, got {k}",
            points.len()
        )));
    }

    let first = (0..points.len())
        .min_by(|&a, &b| points[a].lex_cmp(&points[b]))
        .expect("nonempty");
    let mut center_indices = vec![first];
    let mut dist_to_centers: Vec<F> = points.iter().map(|p| dist(p, &points[first])).collect();
    let mut radii = Vec::with_capacity(k);

    for _ in 1..=k {
        // Covering radius of the current centers, with the farthest point
        // (the next center) chosen lexicographically among maximizers.
        let mut far = 0usize;
        for i in 1..points.len() {
            match cmp_tol(dist_to_centers[i], dist_to_centers[far]) {
                Ordering::Greater => far = i,
                Ordering::Equal if points[i].lex_cmp(&points[far]) == Ordering::Less => far = i,
                _ => {}
            }
        }
        radii.push(dist_to_centers[far]);
        if center_indices.len() == k {
            break;
        }
        center_indices.push(far);
        for (i, d) in dist_to_centers.iter_mut().enumerate() {
            let nd = dist(&points[i], &points[far]);
            if nd < *d {
                *d = nd;
            }
        }
    }

    Ok(GonzalezResult {
        centers: center_indices.iter().map(|&i| points[i].clone()).collect(),
        center_indices,
        radii,
    })
}

/// Index of the point maximizing the dot product with the unit direction
/// `dir`; ties resolve to the lexicographically smallest point.
pub fn exact_extremal<F: Scalar>(points: &[Point<F>], dir: &[F]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    debug_assert!((norm(dir) - F::one()).abs() <= F::cast(1e-9));
    let mut best = 0usize;
    let mut best_dot = dot(&points[0].coords, dir);
    for (i, p) in points.iter().enumerate().skip(1) {
        let d = dot(&p.coords, dir);
        match cmp_tol(d, best_dot) {
            Ordering::Greater => {
                best = i;
                best_dot = d;
            }
            Ordering::Equal if p.lex_cmp(&points[best]) == Ordering::Less => {
                best = i;
                best_dot = d;
            }
            _ => {}
        }
    }
    Ok(best)
}

/// Indices of the convex hull of a planar point set, counterclockwise
/// (Andrew's monotone chain). Collinear inputs yield the two extreme points;
/// a single distinct point yields one index.
pub fn convex_hull_2d<F: Scalar>(points: &[Point<F>]) -> Vec<usize> {
    assert!(points.iter().all(|p| p.dim() == 2), "convex_hull_2d is planar only");
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]));
    order.dedup_by(|&mut a, &mut b| points[a] == points[b]);
    if order.len() <= 2 {
        return order;
    }

    let cross = |o: usize, a: usize, b: usize| -> F {
        let (po, pa, pb) = (&points[o], &points[a], &points[b]);
        (pa.coords[0] - po.coords[0]) * (pb.coords[1] - po.coords[1])
            - (pa.coords[1] - po.coords[1]) * (pb.coords[0] - po.coords[0])
    };

    let sweep = |indices: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut chain: Vec<usize> = Vec::new();
        for i in indices {
            while chain.len() >= 2 && cross(chain[chain.len() - 2], chain[chain.len() - 1], i) <= F::zero()
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
        chain
    };
    let mut hull = sweep(&mut order.iter().copied());
    hull.extend(sweep(&mut order.iter().rev().copied()));
    hull
}

/// Exact distance from `q` to the convex hull of a planar set: zero inside,
/// else the minimum distance to a hull edge.
pub fn hull_distance_2d<F: Scalar>(q: &Point<F>, points: &[Point<F>]) -> F {
    let hull = convex_hull_2d(points);
    match hull.len() {
        0 => panic!("hull_distance_2d: empty point set"),
        1 => dist(q, &points[hull[0]]),
        2 => {
            let (foot, _) = project_to_segment(q, &points[hull[0]], &points[hull[1]]);
            dist(q, &foot)
        }
        _ => {
            let inside = hull.iter().enumerate().all(|(i, &a)| {
                let b = hull[(i + 1) % hull.len()];
                let (pa, pb) = (&points[a], &points[b]);
                let cross = (pb.coords[0] - pa.coords[0]) * (q.coords[1] - pa.coords[1])
                    - (pb.coords[1] - pa.coords[1]) * (q.coords[0] - pa.coords[0]);
                cross >= -F::tol()
            });
            if inside {
                return F::zero();
            }
            let mut best = F::infinity();
            for (i, &a) in hull.iter().enumerate() {
                let b = hull[(i + 1) % hull.len()];
                let (foot, _) = project_to_segment(q, &points[a], &points[b]);
                best = best.min(dist(q, &foot));
            }
            best
        }
    }
}

/// Distance from `q` (inside the hull) to the hull *boundary* of a planar
/// set: the interior margin. Returns zero for points outside.
pub fn interior_depth_2d<F: Scalar>(q: &Point<F>, points: &[Point<F>]) -> F {
    let hull = convex_hull_2d(points);
    if hull.len() < 3 || hull_distance_2d(q, points) > F::zero() {
        return F::zero();
    }
    let mut best = F::infinity();
    for (i, &a) in hull.iter().enumerate() {
        let b = hull[(i + 1) % hull.len()];
        let (foot, _) = project_to_segment(q, &points[a], &points[b]);
        best = best.min(dist(q, &foot));
    }
    best
}

/// Result of the min-norm-point iteration: a bracket on the hull distance
/// plus the convex-combination certificate of the upper bound.
#[derive(Debug, Clone)]
pub struct HullDistanceBracket<F: Scalar> {
    /// `|witness - q|`, an upper bound on the distance (witness is in the hull).
    pub upper: F,
    /// Best lower bound from separating directions; zero when inside.
    pub lower: F,
    /// Convex weights over the input points reconstructing the witness.
    pub weights: Vec<F>,
    /// The nearest hull point found.
    pub witness: Point<F>,
    /// Major iterations used.
    pub iterations: usize,
}

/// Wolfe's min-norm-point iteration over `conv(points) - q`: computes the
/// distance from `q` to the hull within `tol`, with a convex-combination
/// certificate for the upper bound and a separating-direction lower bound.
/// Works in any dimension; this is the ground truth for hull verdicts.
pub fn min_norm_point<F: Scalar>(
    q: &Point<F>,
    points: &[Point<F>],
    tol: F,
) -> HullDistanceBracket<F> {
    assert!(!points.is_empty(), "min_norm_point: empty point set");
    let translated: Vec<Vec<F>> = points.iter().map(|p| p.sub(q)).collect();

    // Start from the translated point of smallest norm.
    let start = (0..points.len())
        .min_by(|&a, &b| {
            norm(&translated[a])
                .partial_cmp(&norm(&translated[b]))
                .unwrap()
        })
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<F> = vec![F::one()];
    let mut lower = F::zero();
    let tiny = F::cast(1e-12);
    let max_major = 2000;

    let combine = |corral: &[usize], lambda: &[F]| -> Vec<F> {
        let d = translated[0].len();
        let mut x = vec![F::zero(); d];
        for (&i, &w) in corral.iter().zip(lambda) {
            for (xc, &yc) in x.iter_mut().zip(&translated[i]) {
                *xc = *xc + w * yc;
            }
        }
        x
    };

    let mut iterations = 0;
    for _ in 0..max_major {
        iterations += 1;
        let x = combine(&corral, &lambda);
        let xn = norm(&x);
        if xn <= F::cast(1e-9) {
            break; // q is (numerically) inside the hull
        }
        // Support point minimizing x . y over the translated set.
        let jstar = (0..translated.len())
            .min_by(|&a, &b| dot(&x, &translated[a]).partial_cmp(&dot(&x, &translated[b])).unwrap())
            .unwrap();
        let support_val = dot(&x, &translated[jstar]);
        // Any unit direction v gives the bound dist >= min_p v.(p - q).
        lower = lower.max((support_val / xn).max(F::zero()));
        // Wolfe optimality: x . y_j* >= |x|^2 (up to tolerance) means x is
        // the min-norm point.
        if support_val >= xn * xn - tol * xn.max(F::one()) {
            break;
        }
        if xn - lower <= tol {
            break;
        }
        if !corral.contains(&jstar) {
            corral.push(jstar);
            lambda.push(F::zero());
        }

        // Minor loop: move to the affine minimizer over the corral, shrinking
        // the corral whenever the minimizer leaves the simplex.
        loop {
            match affine_minimizer(&translated, &corral) {
                Some(mu) if mu.iter().all(|&m| m > -tiny) => {
                    lambda = mu.into_iter().map(|m| m.max(F::zero())).collect();
                    let s: F = lambda.iter().copied().sum();
                    for l in lambda.iter_mut() {
                        *l = *l / s;
                    }
                    break;
                }
                Some(mu) => {
                    // Step as far toward mu as feasibility allows, then drop
                    // the vanished vertices.
                    let mut theta = F::one();
                    for (&l, &m) in lambda.iter().zip(&mu) {
                        if l - m > tiny {
                            theta = theta.min(l / (l - m));
                        }
                    }
                    for (l, &m) in lambda.iter_mut().zip(&mu) {
                        *l = *l + theta * (m - *l);
                    }
                    let keep: Vec<bool> = lambda.iter().map(|&l| l > tiny).collect();
                    if keep.iter().all(|&k| k) {
                        // Numerical stall; clamp the most negative weight away.
                        let drop = (0..lambda.len())
                            .min_by(|&a, &b| lambda[a].partial_cmp(&lambda[b]).unwrap())
                            .unwrap();
                        corral.remove(drop);
                        lambda.remove(drop);
                    } else {
                        let mut i = 0;
                        corral.retain(|_| {
                            let k = keep[i];
                            i += 1;
                            k
                        });
                        lambda = lambda.into_iter().filter(|&l| l > tiny).collect();
                    }
                    let s: F = lambda.iter().copied().sum();
                    for l in lambda.iter_mut() {
                        *l = *l / s;
                    }
                }
                None => {
                    // Singular system: drop the smallest-weight vertex and retry.
                    if corral.len() <= 1 {
                        break;
                    }
                    let drop = (0..lambda.len())
                        .min_by(|&a, &b| lambda[a].partial_cmp(&lambda[b]).unwrap())
                        .unwrap();
                    corral.remove(drop);
                    lambda.remove(drop);
                    let s: F = lambda.iter().copied().sum();
                    for l in lambda.iter_mut() {
                        *l = *l / s;
                    }
                }
            }
        }
    }

    let x = combine(&corral, &lambda);
    let upper = norm(&x);
    let lower = lower.min(upper);
    let mut weights = vec![F::zero(); points.len()];
    for (&i, &w) in corral.iter().zip(&lambda) {
        weights[i] += w;
    }
    let witness = q.add_scaled(&x, F::one());
    HullDistanceBracket { upper, lower, weights, witness, iterations }
}

/// Minimizer of `|sum mu_j y_j|` over the affine hull of the corral
/// (`sum mu = 1`), via the KKT system. `None` when the system is singular.
fn affine_minimizer<F: Scalar>(translated: &[Vec<F>], corral: &[usize]) -> Option<Vec<F>> {
    let m = corral.len();
    let n = m + 1;
    let mut a = vec![vec![F::zero(); n + 1]; n];
    for (r, &i) in corral.iter().enumerate() {
        for (c, &j) in corral.iter().enumerate() {
            a[r][c] = dot(&translated[i], &translated[j]);
        }
        a[r][m] = F::one();
        a[r][n] = F::zero();
    }
    for c in 0..m {
        a[m][c] = F::one();
    }
    a[m][m] = F::zero();
    a[m][n] = F::one();
    solve_linear(&mut a).map(|sol| sol[..m].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_linear<F: Scalar>(a: &mut [Vec<F>]) -> Option<Vec<F>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())?;
        if a[pivot][col].abs() < F::cast(1e-13) {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor == F::zero() {
                continue;
            }
            for c in col..=n {
                let v = a[col][c];
                a[row][c] = a[row][c] - factor * v;
            }
        }
    }
    Some((0..n).map(|r| a[r][n] / a[r][r]).collect())
}

/// Exact distance from `q` to `conv(points)`: the planar case goes through
/// the hull polygon, higher dimensions through the min-norm-point iteration.
pub fn exact_hull_distance<F: Scalar>(q: &Point<F>, points: &[Point<F>]) -> F {
    if q.dim() == 2 {
        hull_distance_2d(q, points)
    } else {
        min_norm_point(q, points, F::cast(1e-9)).upper
    }
}
