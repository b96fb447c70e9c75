//! Balanced (k-density) Voronoi clustering: pick centers from the point set
//! so that the exact Voronoi assignment sends at most `k` points to any
//! center.
//!
//! Center selection is Las Vegas sample-and-verify: draw a uniform random
//! subset sized by the cone-cover net bound, verify balance by exact
//! partitioning, and double the sample on failure. Verification is exact, so
//! a returned clustering is always balanced; the net bounds only inform the
//! initial sample size.
//!
//! Also here: the cone covers used by that bound (and by the exploration
//! analysis), and the high-dimensional construction showing that balanced
//! Voronoi clusterings may need almost all points as centers.

use serde::{Deserialize, Serialize};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{dist_to_set, normalize, Cone, Point};
use crate::scalar::Scalar;

/// Largest cone cover we will materialize; counting works far beyond this.
const MAX_MATERIALIZED_CONES: usize = 1_000_000;

/// A Voronoi clustering of a point set by a subset of centers.
#[derive(Debug, Clone)]
pub struct DensityClustering<F: Scalar> {
    /// The chosen centers (members of the input set).
    pub centers: Vec<Point<F>>,
    /// For each input point, the index (into `centers`) it is assigned to.
    pub assignment: Vec<usize>,
    /// Number of points assigned to each center.
    pub cluster_sizes: Vec<usize>,
    /// The balance parameter this clustering was built for.
    pub k: usize,
}

impl<F: Scalar> DensityClustering<F> {
    pub fn max_cluster_size(&self) -> usize {
        self.cluster_sizes.iter().copied().max().unwrap_or(0)
    }

    /// True when every cluster holds at most `k` points.
    pub fn is_balanced(&self) -> bool {
        self.max_cluster_size() <= self.k
    }

    /// Serializable view matching the published clustering schema.
    pub fn report(&self, seed: u64, attempts: u32) -> DensityReport {
        DensityReport {
            k: self.k,
            centers: self
                .centers
                .iter()
                .map(|c| c.coords.iter().map(|&x| x.as_f64()).collect())
                .collect(),
            sizes: self.cluster_sizes.clone(),
            max_size: self.max_cluster_size(),
            center_count: self.centers.len(),
            seed,
            attempts,
        }
    }
}

/// JSON form of a clustering result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub k: usize,
    pub centers: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
    pub max_size: usize,
    pub center_count: usize,
    pub seed: u64,
    pub attempts: u32,
}

/// Exact Voronoi partition of `points` by `centers`. Every center must be a
/// member of the point set; ties go to the lexicographically smallest
/// center, so the assignment is total and deterministic.
pub fn voronoi_partition<F: Scalar>(
    points: &[Point<F>],
    centers: &[Point<F>],
    k: usize,
) -> Result<DensityClustering<F>> {
    if centers.is_empty() {
        return Err(Error::EmptySet);
    }
    for (i, c) in centers.iter().enumerate() {
        if !points.iter().any(|p| p == c) {
            return Err(Error::CentersNotSubset { index: i });
        }
    }
    let mut cluster_sizes = vec![0usize; centers.len()];
    let assignment: Vec<usize> = points
        .iter()
        .map(|p| {
            let (_, idx) = dist_to_set(p, centers);
            cluster_sizes[idx] += 1;
            idx
        })
        .collect();
    Ok(DensityClustering { centers: centers.to_vec(), assignment, cluster_sizes, k })
}

/// A finite set of cones with a common apex at the origin covering all
/// directions, each of angular diameter at most `angular_diameter`.
///
/// Construction: cover the faces of `[-1,1]^d` by a grid and take the cone
/// through each grid cell; each stored [`Cone`] is the circumscribed
/// circular cone of its cell, so cone membership tests are conservative.
#[derive(Debug, Clone)]
pub struct ConeCover<F: Scalar> {
    pub cones: Vec<Cone<F>>,
    pub angular_diameter: F,
    cells_per_axis: usize,
}

impl<F: Scalar> ConeCover<F> {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Index of the cone whose face cell the direction exits through.
    pub fn locate(&self, v: &[F]) -> usize {
        let d = v.len();
        let m = self.cells_per_axis;
        let axis = (0..d)
            .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap())
            .expect("nonzero dimension");
        let positive = v[axis] >= F::zero();
        let scale = v[axis].abs();
        let face_rank = axis * 2 + usize::from(positive);
        let mut cell_rank = 0usize;
        for i in 0..d {
            if i == axis {
                continue;
            }
            let x = v[i] / scale; // in [-1, 1]
            let t = (x + F::one()) / F::cast(2.0) * F::cast(m as f64);
            let idx = (t.floor().as_f64() as isize).clamp(0, m as isize - 1) as usize;
            cell_rank = cell_rank * m + idx;
        }
        face_rank * m.pow(d as u32 - 1) + cell_rank
    }

    /// Checks that `samples` random unit directions each lie in some cone.
    pub fn verify_coverage(&self, samples: usize, rng: &mut impl Rng) -> bool {
        let d = self.cones[0].apex.dim();
        for _ in 0..samples {
            let mut v: Vec<F> = (0..d)
                .map(|_| F::cast(rng.random_range(-1.0..1.0f64)))
                .collect();
            if crate::geom::norm(&v) < F::cast(1e-3) {
                continue;
            }
            normalize(&mut v);
            if !self.cones[self.locate(&v)].contains_direction(&v)
                && !self.cones.iter().any(|c| c.contains_direction(&v))
            {
                return false;
            }
        }
        true
    }
}

/// Number of cells per face axis for the grid realizing the requested
/// angular diameter: side `θ/(π√d)` on faces of `[-1,1]^d`.
fn grid_cells_per_axis(dim: usize, angular_diameter: f64) -> usize {
    let side = angular_diameter / (std::f64::consts::PI * (dim as f64).sqrt());
    (2.0 / side).ceil() as usize
}

/// Size of the cone cover [`build_cone_cover`] would construct, without
/// materializing it. Errors when the count overflows.
pub fn cone_cover_size(dim: usize, angular_diameter: f64) -> Result<usize> {
    if dim < 2 {
        return Err(Error::InvalidParameter("cone covers need dimension >= 2".into()));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&angular_diameter) || angular_diameter <= 0.0 {
        return Err(Error::InvalidParameter(
            "angular diameter must lie in (0, π/2)".into(),
        ));
    }
    let m = grid_cells_per_axis(dim, angular_diameter);
    m.checked_pow(dim as u32 - 1)
        .and_then(|per_face| per_face.checked_mul(2 * dim))
        .ok_or_else(|| Error::ConeCover(format!("cover size overflows for dimension {dim}")))
}

/// Builds the face-grid cone cover and verifies coverage on 10^4 sampled
/// directions (with a fixed internal seed, so construction is
/// deterministic). Fails if verification misses a direction — that would be
/// a construction bug, not an input problem.
pub fn build_cone_cover<F: Scalar>(dim: usize, angular_diameter: f64) -> Result<ConeCover<F>> {
    let n = cone_cover_size(dim, angular_diameter)?;
    if n > MAX_MATERIALIZED_CONES {
        return Err(Error::ConeCover(format!(
            "cover of {n} cones is too large to materialize"
        )));
    }
    let m = grid_cells_per_axis(dim, angular_diameter);
    let cell_side = 2.0 / m as f64;
    let mut cones = Vec::with_capacity(n);

    let cells_per_face = m.pow(dim as u32 - 1);
    for axis in 0..dim {
        for &positive in &[false, true] {
            let face_val = if positive { 1.0 } else { -1.0 };
            let others: Vec<usize> = (0..dim).filter(|&i| i != axis).collect();
            for rank in 0..cells_per_face {
                // Decode the cell rank most-significant-digit first, matching
                // the encoding in `locate`.
                let mut digits = vec![0usize; dim - 1];
                let mut r = rank;
                for slot in (0..dim - 1).rev() {
                    digits[slot] = r % m;
                    r /= m;
                }

                let mut center = vec![0.0f64; dim];
                center[axis] = face_val;
                for (slot, &i) in others.iter().enumerate() {
                    center[i] = -1.0 + (digits[slot] as f64 + 0.5) * cell_side;
                }
                let mut axis_dir: Vec<F> = center.iter().map(|&c| F::cast(c)).collect();
                normalize(&mut axis_dir);

                // Cell corners (2^(d-1) of them), lifted to R^d.
                let mut corner_dirs: Vec<Vec<f64>> = Vec::with_capacity(1 << (dim - 1));
                for mask in 0u32..(1u32 << (dim - 1)) {
                    let mut corner = vec![0.0f64; dim];
                    corner[axis] = face_val;
                    for (slot, &i) in others.iter().enumerate() {
                        let lo = -1.0 + digits[slot] as f64 * cell_side;
                        corner[i] = if mask >> slot & 1 == 1 { lo + cell_side } else { lo };
                    }
                    corner_dirs.push(corner);
                }
                let mut half_angle = 0.0f64;
                for c in &corner_dirs {
                    let cf: Vec<F> = c.iter().map(|&x| F::cast(x)).collect();
                    let cosv = crate::geom::dot(&cf, &axis_dir).as_f64()
                        / crate::geom::norm(&cf).as_f64();
                    half_angle = half_angle.max(cosv.clamp(-1.0, 1.0).acos());
                }
                // Pairwise corner angles realize the cone's angular diameter.
                let mut diam = 0.0f64;
                for (a, ca) in corner_dirs.iter().enumerate() {
                    for cb in corner_dirs.iter().skip(a + 1) {
                        let (na, nb) = (
                            ca.iter().map(|x| x * x).sum::<f64>().sqrt(),
                            cb.iter().map(|x| x * x).sum::<f64>().sqrt(),
                        );
                        let cosv =
                            ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
                        diam = diam.max(cosv.clamp(-1.0, 1.0).acos());
                    }
                }
                if diam > angular_diameter {
                    return Err(Error::ConeCover(format!(
                        "cell angular diameter {diam} exceeds requested {angular_diameter}"
                    )));
                }
                cones.push(Cone::new(
                    Point::zeros(dim),
                    axis_dir,
                    F::cast(half_angle.max(1e-9)),
                ));
            }
        }
    }
    debug_assert_eq!(cones.len(), n);

    let cover = ConeCover {
        cones,
        angular_diameter: F::cast(angular_diameter),
        cells_per_axis: m,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    if !cover.verify_coverage(10_000, &mut rng) {
        return Err(Error::ConeCover("sampled direction missed every cone".into()));
    }
    Ok(cover)
}

/// Outcome of the sample-and-verify center selection.
#[derive(Debug, Clone)]
pub struct KDensityOutcome<F: Scalar> {
    pub clustering: DensityClustering<F>,
    /// Verification rounds performed (0 when `k == 1` short-circuits).
    pub attempts: u32,
    /// Final sample size drawn.
    pub sample_size: usize,
    pub seed: u64,
}

/// Selects centers for a k-density clustering by sampling and verifying.
///
/// The initial sample size follows the cone-cover net bound with
/// `eps = (k/N)/n` (`N` = cover size at angular diameter π/3): `⌈4/eps⌉` in
/// planar mode, `⌈(1/eps)·ln(1/eps + e)⌉` otherwise, both capped at `n`. The
/// sample doubles on every failed verification; with all points as centers
/// the partition is balanced unless some point occurs more than `k` times,
/// which is reported as [`Error::Unclusterable`].
pub fn k_density_centers<F: Scalar>(
    points: &[Point<F>],
    k: usize,
    planar_mode: bool,
    seed: u64,
) -> Result<KDensityOutcome<F>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!("k must be in 1..={n}, got {k}")));
    }
    let dim = points[0].dim();

    if k == 1 {
        // Only the full set can verify: any missing point lands in some
        // other point's cluster, pushing it past size 1.
        let clustering = voronoi_partition(points, points, k)?;
        if !clustering.is_balanced() {
            return Err(Error::Unclusterable);
        }
        return Ok(KDensityOutcome { clustering, attempts: 0, sample_size: n, seed });
    }

    let cover_size = if dim >= 2 {
        cone_cover_size(dim, std::f64::consts::FRAC_PI_3)?
    } else {
        2 // on the line, the two rays
    };
    let eps = (k as f64 / cover_size as f64) / n as f64;
    let initial = if planar_mode {
        (4.0 / eps).ceil() as usize
    } else {
        ((1.0 / eps) * (1.0 / eps + std::f64::consts::E).ln()).ceil() as usize
    };
    let mut sample_size = initial.clamp(1, n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let mut chosen = rand::seq::index::sample(&mut rng, n, sample_size).into_vec();
        chosen.sort_unstable();
        let centers: Vec<Point<F>> = chosen.iter().map(|&i| points[i].clone()).collect();
        let clustering = voronoi_partition(points, &centers, k)?;
        if clustering.is_balanced() {
            return Ok(KDensityOutcome { clustering, attempts, sample_size, seed });
        }
        if sample_size == n {
            return Err(Error::Unclusterable);
        }
        sample_size = (sample_size * 2).min(n);
    }
}

/// The n-point set in `R^n` on which every k-density clustering needs at
/// least `n-k+1` centers: point `i` (1-based) sits at `√(1 - 2^{-i-1})`
/// along axis `i`.
pub fn counterexample_set<F: Scalar>(n: usize) -> Vec<Point<F>> {
    assert!(n >= 2, "counterexample needs n >= 2");
    (1..=n)
        .map(|i| {
            let ell = (1.0 - 2f64.powi(-(i as i32) - 1)).sqrt();
            let mut coords = vec![F::zero(); n];
            coords[i - 1] = F::cast(ell);
            Point::new(coords)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dist;
    use approx::assert_relative_eq;

    fn p(coords: &[f64]) -> Point<f64> {
        Point::from_f64s(coords)
    }

    #[test]
    fn voronoi_two_points_two_centers() {
        let pts = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0])];
        let c = voronoi_partition(&pts, &pts, 1).unwrap();
        assert_eq!(c.cluster_sizes, vec![1, 1]);
        assert!(c.is_balanced());
    }

    #[test]
    fn voronoi_single_center_takes_everything() {
        let pts = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.2, 0.7])];
        let c = voronoi_partition(&pts, &pts[..1], 3).unwrap();
        assert_eq!(c.cluster_sizes, vec![3]);
    }

    #[test]
    fn voronoi_rejects_foreign_centers() {
        let pts = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0])];
        let foreign = vec![p(&[0.5, 0.5])];
        assert!(matches!(
            voronoi_partition(&pts, &foreign, 1),
            Err(Error::CentersNotSubset { index: 0 })
        ));
    }

    #[test]
    fn voronoi_matches_independent_brute_force() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1_000 {
            let n = rng.random_range(2..30);
            let pts = crate::datasets::uniform(n, 2, &mut rng);
            let c_count = rng.random_range(1..=n);
            let mut idx = rand::seq::index::sample(&mut rng, n, c_count).into_vec();
            idx.sort_unstable();
            let centers: Vec<_> = idx.iter().map(|&i| pts[i].clone()).collect();
            let clustering = voronoi_partition(&pts, &centers, n).unwrap();
            for (pi, pt) in pts.iter().enumerate() {
                let assigned = &centers[clustering.assignment[pi]];
                for c in &centers {
                    let (da, dc) = (dist(pt, assigned), dist(pt, c));
                    assert!(
                        da < dc + 1e-12,
                        "{pt:?} assigned to {assigned:?} but {c:?} is closer"
                    );
                }
            }
        }
    }

    #[test]
    fn cover_planar_pi_third_has_36_cones() {
        let cover = build_cone_cover::<f64>(2, std::f64::consts::FRAC_PI_3).unwrap();
        assert_eq!(cover.len(), 36);
        assert_eq!(cone_cover_size(2, std::f64::consts::FRAC_PI_3).unwrap(), 36);
    }

    #[test]
    fn cover_planar_narrow_is_at_least_24() {
        let cover = build_cone_cover::<f64>(2, std::f64::consts::PI / 12.0).unwrap();
        assert!(cover.len() >= 24, "got {}", cover.len());
    }

    #[test]
    fn cover_3d_constructs_and_counts_match() {
        let cover = build_cone_cover::<f64>(3, std::f64::consts::FRAC_PI_3).unwrap();
        assert_eq!(cover.len(), cone_cover_size(3, std::f64::consts::FRAC_PI_3).unwrap());
    }

    #[test]
    fn cover_rejects_silly_parameters() {
        assert!(cone_cover_size(1, 1.0).is_err());
        assert!(cone_cover_size(3, 0.0).is_err());
        assert!(cone_cover_size(3, 2.0).is_err());
    }

    #[test]
    fn k_equals_n_any_sample_verifies() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts = crate::datasets::uniform(64, 2, &mut rng);
        let out = k_density_centers(&pts, 64, true, 7).unwrap();
        assert!(out.clustering.max_cluster_size() <= 64);
        assert_eq!(out.attempts, 1);
    }

    #[test]
    fn k_equals_one_returns_all_points() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let pts = crate::datasets::uniform(32, 2, &mut rng);
        let out = k_density_centers(&pts, 1, true, 7).unwrap();
        assert_eq!(out.clustering.centers.len(), 32);
        assert_eq!(out.clustering.max_cluster_size(), 1);
        assert_eq!(out.attempts, 0);
    }

    #[test]
    fn planar_256_points_k16_verifies() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let pts = crate::datasets::uniform(256, 2, &mut rng);
        let out = k_density_centers(&pts, 16, true, 3).unwrap();
        assert!(out.clustering.max_cluster_size() <= 16);
        assert!(out.clustering.centers.len() <= 256);
    }

    #[test]
    fn duplicates_beyond_k_are_unclusterable() {
        let pts = vec![p(&[0.5, 0.5]); 5];
        assert!(matches!(k_density_centers(&pts, 2, true, 1), Err(Error::Unclusterable)));
    }

    #[test]
    fn k_density_is_seed_deterministic() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts = crate::datasets::uniform(300, 2, &mut rng);
        let a = k_density_centers(&pts, 150, true, 11).unwrap();
        let b = k_density_centers(&pts, 150, true, 11).unwrap();
        assert_eq!(a.clustering.centers, b.clustering.centers);
        assert_eq!(a.attempts, b.attempts);
    }

    #[test]
    fn counterexample_lengths_match_formula() {
        let pts = counterexample_set::<f64>(2);
        assert_relative_eq!(pts[0].coords[0], 0.75f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(pts[1].coords[1], 0.875f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(dist(&pts[0], &pts[1]), 1.625f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn counterexample_pairwise_order_is_index_lexicographic() {
        // d(i,j) < d(i',j')  iff  i < i', or i = i' and j < j' (1-based,
        // i < j in both pairs) — checked exhaustively.
        let n = 8;
        let pts = counterexample_set::<f64>(n);
        for i in 0..n {
            for j in (i + 1)..n {
                for i2 in 0..n {
                    for j2 in (i2 + 1)..n {
                        let d1 = dist(&pts[i], &pts[j]);
                        let d2 = dist(&pts[i2], &pts[j2]);
                        let expect_less = i < i2 || (i == i2 && j < j2);
                        let expect_equal = i == i2 && j == j2;
                        if expect_equal {
                            assert_eq!(d1, d2);
                        } else if expect_less {
                            assert!(d1 < d2, "d({i},{j}) >= d({i2},{j2})");
                        } else {
                            assert!(d1 > d2, "d({i},{j}) <= d({i2},{j2})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn counterexample_lowest_index_center_absorbs_non_centers() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        let n = 10;
        let pts = counterexample_set::<f64>(n);
        for _ in 0..1_000 {
            let size = rng.random_range(1..n);
            let mut idx = rand::seq::index::sample(&mut rng, n, size).into_vec();
            idx.sort_unstable();
            let centers: Vec<_> = idx.iter().map(|&i| pts[i].clone()).collect();
            let c = voronoi_partition(&pts, &centers, n).unwrap();
            let lowest = 0usize; // centers are sorted by index
            assert_eq!(
                c.cluster_sizes[lowest],
                n - centers.len() + 1,
                "lowest-index center must absorb all non-centers (C = {idx:?})"
            );
        }
    }

    #[test]
    fn report_shape_matches_schema() {
        let pts = vec![p(&[0.0, 0.0]), p(&[1.0, 0.0])];
        let c = voronoi_partition(&pts, &pts, 1).unwrap();
        let json = serde_json::to_value(c.report(99, 1)).unwrap();
        for key in ["k", "centers", "sizes", "max_size", "center_count", "seed", "attempts"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
