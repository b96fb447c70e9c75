//! Greedy farthest-point exploration of `[0,1]^d` through a nearest-neighbor
//! oracle.
//!
//! Each step probes the point of the uncovered domain farthest from the
//! centers found so far, then removes ("carves") the ball around the probe
//! that the answer certifies empty: the full probe distance with an exact
//! oracle, `(1-eps)` times the reported distance with an ANN oracle. The
//! uncovered region is tracked by an adaptive cell decomposition in the
//! spirit of a (compressed) quadtree: cells wholly inside a carved ball die,
//! cells straddling its boundary split until their diameter drops below
//! `rho` times the ball radius or the depth cap binds.
//!
//! The farthest point is approximated by the best live-cell center; the
//! resulting constant-factor slack is absorbed by the covering guarantees
//! this module is tested against.

use serde::{Deserialize, Serialize};

use crate::density::cone_cover_size;
use crate::error::{Error, Result};
use crate::geom::{dist, Ball, Cell, Point};
use crate::oracle::{NnAnswer, Oracle, StatsSnapshot};
use crate::scalar::Scalar;

/// Tuning knobs for the carved-domain decomposition.
#[derive(Debug, Clone)]
pub struct CarveConfig<F: Scalar> {
    /// Cells straddling a ball boundary split until their diameter is at
    /// most `rho` times the ball radius.
    pub rho: F,
    /// Hard cap on cell depth (cell side `2^-depth`).
    pub max_depth: u32,
    /// Hard cap on the number of live cells; refinement stops there.
    pub max_cells: usize,
    /// Pre-refine the fresh domain to this depth.
    pub initial_depth: u32,
}

impl<F: Scalar> Default for CarveConfig<F> {
    fn default() -> Self {
        CarveConfig {
            rho: F::cast(0.25),
            max_depth: 20,
            max_cells: 1 << 22,
            initial_depth: 0,
        }
    }
}

struct LiveCell<F: Scalar> {
    cell: Cell<F>,
    center: Point<F>,
    /// Cached min distance from `center` to the first `seen` centers.
    cached: F,
    seen: usize,
}

impl<F: Scalar> LiveCell<F> {
    fn fresh(cell: Cell<F>) -> Self {
        let center = cell.center();
        LiveCell { cell, center, cached: F::infinity(), seen: 0 }
    }
}

/// The uncovered part of `[0,1]^d`: the original domain minus every carved
/// ball, over-approximated by live cells. Any point of the true uncovered
/// region lies in some live cell; dead cells are wholly inside carved balls.
pub struct CarvedDomain<F: Scalar> {
    dim: usize,
    cfg: CarveConfig<F>,
    live: Vec<LiveCell<F>>,
}

impl<F: Scalar> CarvedDomain<F> {
    pub fn new(dim: usize, cfg: CarveConfig<F>) -> Self {
        assert!(dim >= 1, "domain dimension must be at least 1");
        assert!(cfg.rho > F::zero() && cfg.rho < F::one(), "rho must lie in (0,1)");
        let mut live = vec![LiveCell::fresh(Cell::unit(dim))];
        for _ in 0..cfg.initial_depth {
            live = live
                .into_iter()
                .flat_map(|lc| lc.cell.children().into_iter().map(LiveCell::fresh))
                .collect();
        }
        CarvedDomain { dim, cfg, live }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    /// The live cells, for rendering and inspection.
    pub fn live_cells(&self) -> impl Iterator<Item = &Cell<F>> {
        self.live.iter().map(|lc| &lc.cell)
    }

    /// Removes the open ball from the domain. Cells wholly inside the closed
    /// ball die; cells crossing the boundary split until small enough.
    /// Zero-radius balls carve nothing.
    pub fn carve(&mut self, ball: &Ball<F>) {
        if ball.radius <= F::zero() {
            return;
        }
        let min_diam = self.cfg.rho * ball.radius;
        let mut stack = std::mem::take(&mut self.live);
        while let Some(lc) = stack.pop() {
            // Disjoint from the open ball: keep untouched (cache stays valid).
            if lc.cell.min_dist(&ball.center) >= ball.radius {
                self.live.push(lc);
                continue;
            }
            // Death requires strict containment: only the open ball is
            // certified empty, and set members can sit exactly on its
            // boundary (the probed neighbor always does).
            if lc.cell.max_corner_dist(&ball.center) < ball.radius {
                continue; // dead
            }
            let at_limit = lc.cell.diameter() <= min_diam
                || lc.cell.depth >= self.cfg.max_depth
                || self.live.len() + stack.len() + (1 << self.dim) > self.cfg.max_cells;
            if at_limit {
                self.live.push(lc);
                continue;
            }
            for child in lc.cell.children() {
                stack.push(LiveCell::fresh(child));
            }
        }
    }

    fn update_caches(&mut self, centers: &[Point<F>]) {
        for lc in &mut self.live {
            if lc.seen > centers.len() {
                lc.seen = 0;
                lc.cached = F::infinity();
            }
            for c in &centers[lc.seen..] {
                let d = dist(&lc.center, c);
                if d < lc.cached {
                    lc.cached = d;
                }
            }
            lc.seen = centers.len();
        }
    }

    /// Splits live cells until the farthest-cell-center selection
    /// approximates the true farthest uncovered point within a factor
    /// `1 + rho/2`: any cell that could still beat the current best
    /// (its center distance plus half its diameter exceeds it) is refined
    /// until its diameter drops below `rho` times its center distance.
    /// Depth and cell-count caps bind as in carving.
    pub fn refine_against_centers(&mut self, centers: &[Point<F>]) {
        assert!(!centers.is_empty(), "refinement needs at least one center");
        let half = F::cast(0.5);
        loop {
            self.update_caches(centers);
            let Some(best) = self
                .live
                .iter()
                .map(|lc| lc.cached)
                .max_by(|a, b| a.partial_cmp(b).unwrap())
            else {
                return;
            };
            let mut kept: Vec<LiveCell<F>> = Vec::with_capacity(self.live.len());
            let mut split_any = false;
            let mut budget = self.cfg.max_cells.saturating_sub(self.live.len());
            for lc in std::mem::take(&mut self.live) {
                let contender = lc.cached + lc.cell.diameter() * half > best;
                let coarse = lc.cell.diameter() > self.cfg.rho * lc.cached;
                let splittable = lc.cell.depth < self.cfg.max_depth && budget >= (1 << self.dim);
                if contender && coarse && splittable {
                    budget -= 1 << self.dim;
                    kept.extend(lc.cell.children().into_iter().map(LiveCell::fresh));
                    split_any = true;
                } else {
                    kept.push(lc);
                }
            }
            self.live = kept;
            if !split_any {
                return;
            }
        }
    }

    /// The live-cell center farthest from `centers` (ties to the
    /// lexicographically smallest cell center) and its distance to the
    /// centers. `None` once no live cells remain.
    ///
    /// `centers` must only grow between calls on the same domain; cached
    /// per-cell distances are updated incrementally against new entries.
    pub fn farthest_live_point(&mut self, centers: &[Point<F>]) -> Option<(Point<F>, F)> {
        assert!(!centers.is_empty(), "farthest_live_point needs at least one center");
        if self.live.is_empty() {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in 0..self.live.len() {
            let lc = &mut self.live[i];
            if lc.seen > centers.len() {
                lc.seen = 0;
                lc.cached = F::infinity();
            }
            for c in &centers[lc.seen..] {
                let d = dist(&lc.center, c);
                if d < lc.cached {
                    lc.cached = d;
                }
            }
            lc.seen = centers.len();
            best = match best {
                None => Some(i),
                Some(b) => {
                    let (cand, cur) = (&self.live[i], &self.live[b]);
                    match crate::scalar::cmp_tol(cand.cached, cur.cached) {
                        std::cmp::Ordering::Greater => Some(i),
                        std::cmp::Ordering::Equal
                            if cand.center.lex_cmp(&cur.center) == std::cmp::Ordering::Less =>
                        {
                            Some(i)
                        }
                        _ => Some(b),
                    }
                }
            };
        }
        let b = &self.live[best.expect("live cells exist")];
        Some((b.center.clone(), b.cached))
    }
}

/// How probes are answered during exploration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExploreMode<F: Scalar> {
    /// Exact NN answers; carve the full reported distance.
    Exact,
    /// `(1+eps)`-ANN answers; carve `(1-eps)` times the reported distance.
    /// With `adversarial` set, probes go through the worst-legal-answer
    /// wrapper (finite sets only).
    Ann { eps: F, adversarial: bool },
}

/// One exploration step: the probe point, the neighbor it returned, and the
/// step value `r` (distance from the probe to the previously found centers;
/// for the first step, the reported NN distance).
#[derive(Debug, Clone)]
pub struct TraceStep<F: Scalar> {
    pub query: Point<F>,
    pub neighbor: Point<F>,
    pub radius: F,
}

/// The full record of an exploration run.
#[derive(Debug, Clone)]
pub struct GreedyTrace<F: Scalar> {
    pub steps: Vec<TraceStep<F>>,
    pub mode: ExploreMode<F>,
    /// Set when the uncovered domain emptied before the iteration budget.
    pub completed: bool,
    pub live_cells_remaining: usize,
    /// Oracle calls consumed by this run (one per step).
    pub probes: u64,
    pub stats: StatsSnapshot,
}

impl<F: Scalar> GreedyTrace<F> {
    /// Distinct centers in discovery order.
    pub fn centers(&self) -> Vec<Point<F>> {
        let mut out: Vec<Point<F>> = Vec::new();
        for s in &self.steps {
            if !out.contains(&s.neighbor) {
                out.push(s.neighbor.clone());
            }
        }
        out
    }

    /// Serializable view matching the published trace schema.
    pub fn report(&self) -> TraceReport {
        let (mode, eps) = match self.mode {
            ExploreMode::Exact => ("exact", None),
            ExploreMode::Ann { eps, .. } => ("ann", Some(eps.as_f64())),
        };
        TraceReport {
            mode: mode.to_string(),
            eps,
            steps: self
                .steps
                .iter()
                .map(|s| TraceStepReport {
                    q: s.query.coords.iter().map(|&c| c.as_f64()).collect(),
                    nnp: s.neighbor.coords.iter().map(|&c| c.as_f64()).collect(),
                    r: s.radius.as_f64(),
                })
                .collect(),
            probe_count: self.probes,
            live_cells_remaining: self.live_cells_remaining,
            completed: self.completed,
        }
    }
}

/// JSON form of a greedy trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub steps: Vec<TraceStepReport>,
    pub probe_count: u64,
    pub live_cells_remaining: usize,
    pub completed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepReport {
    pub q: Vec<f64>,
    pub nnp: Vec<f64>,
    pub r: f64,
}

fn probe<F: Scalar>(oracle: &Oracle<F>, q: &Point<F>, mode: ExploreMode<F>) -> Result<NnAnswer<F>> {
    match mode {
        ExploreMode::Exact => oracle.nn_query(q),
        ExploreMode::Ann { eps, adversarial: false } => oracle.ann_query(q, eps),
        ExploreMode::Ann { eps, adversarial: true } => oracle.adversarial_ann_query(q, eps),
    }
}

/// Runs greedy exploration for at most `iterations` probes. The first probe
/// goes to the domain center; each later probe goes to the farthest live
/// cell center. Returns early (with `completed` set) when no live cells
/// remain.
pub fn explore<F: Scalar>(
    oracle: &Oracle<F>,
    iterations: usize,
    mode: ExploreMode<F>,
    cfg: CarveConfig<F>,
) -> Result<GreedyTrace<F>> {
    if iterations < 1 {
        return Err(Error::InvalidParameter("iterations must be >= 1".into()));
    }
    if let ExploreMode::Ann { eps, .. } = mode {
        if eps <= F::zero() || eps >= F::one() {
            return Err(Error::InvalidParameter("ann eps must lie in (0,1)".into()));
        }
    }
    let shrink = match mode {
        ExploreMode::Exact => F::one(),
        ExploreMode::Ann { eps, .. } => F::one() - eps,
    };

    let dim = oracle.dim();
    let mut domain = CarvedDomain::new(dim, cfg);
    let stats_before = oracle.stats();
    let mut steps: Vec<TraceStep<F>> = Vec::with_capacity(iterations);
    let mut centers: Vec<Point<F>> = Vec::new();
    let mut completed = false;

    let q0 = Point::new(vec![F::cast(0.5); dim]);
    let ans0 = probe(oracle, &q0, mode)?;
    domain.carve(&Ball::new(q0.clone(), shrink * ans0.distance));
    centers.push(ans0.point.clone());
    steps.push(TraceStep { query: q0, neighbor: ans0.point, radius: ans0.distance });

    for _ in 1..iterations {
        domain.refine_against_centers(&centers);
        let Some((q, r)) = domain.farthest_live_point(&centers) else {
            completed = true;
            break;
        };
        let ans = probe(oracle, &q, mode)?;
        domain.carve(&Ball::new(q.clone(), shrink * ans.distance));
        if !centers.contains(&ans.point) {
            centers.push(ans.point.clone());
        }
        steps.push(TraceStep { query: q, neighbor: ans.point, radius: r });
    }

    let probes = steps.len() as u64;
    let stats = oracle.stats().since(&stats_before);
    debug_assert_eq!(stats.total(), probes);
    Ok(GreedyTrace {
        steps,
        mode,
        completed,
        live_cells_remaining: domain.live_count(),
        probes,
        stats,
    })
}

/// Rebuilds the carved domain a trace left behind, for rendering and
/// inspection. Deterministic: carving replays the recorded probes.
pub fn replay_domain<F: Scalar>(trace: &GreedyTrace<F>, cfg: CarveConfig<F>) -> CarvedDomain<F> {
    let dim = trace.steps.first().map_or(1, |s| s.query.dim());
    let shrink = match trace.mode {
        ExploreMode::Exact => F::one(),
        ExploreMode::Ann { eps, .. } => F::one() - eps,
    };
    let mut domain = CarvedDomain::new(dim, cfg);
    for s in &trace.steps {
        let reported = dist(&s.query, &s.neighbor);
        domain.carve(&Ball::new(s.query.clone(), shrink * reported));
    }
    domain
}

/// Number of cones of angular diameter at most π/12 needed to cover all
/// directions of `R^d`: 2 on the line, 24 in the plane (exact angular
/// partition), and the face-grid construction count beyond.
pub fn cone_count(dim: usize) -> usize {
    match dim {
        0 => panic!("cone_count: dimension must be >= 1"),
        1 => 2,
        2 => 24,
        d => cone_cover_size(d, std::f64::consts::PI / 12.0)
            .expect("cone count overflows usize for this dimension"),
    }
}

/// Components of the probe-driven diameter estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiameterEstimate {
    /// `max(centers_diameter, final_radius)`.
    pub estimate: f64,
    /// Diameter of the distinct centers discovered.
    pub centers_diameter: f64,
    /// Step value `r` of the last executed step.
    pub final_radius: f64,
    pub distinct_centers: usize,
    /// Single-center runs make the estimate lean entirely on `final_radius`.
    pub single_center: bool,
    pub probes: u64,
}

/// Estimates the diameter of the probed set by exploring for
/// `cone_count(d) + 1` iterations; the result is within a factor 3 of the
/// true diameter in either direction.
pub fn estimate_diameter<F: Scalar>(
    oracle: &Oracle<F>,
    cfg: CarveConfig<F>,
) -> Result<DiameterEstimate> {
    let m = cone_count(oracle.dim()) + 1;
    let trace = explore(oracle, m, ExploreMode::Exact, cfg)?;
    let centers = trace.centers();
    let mut centers_diameter = F::zero();
    for (i, a) in centers.iter().enumerate() {
        for b in centers.iter().skip(i + 1) {
            centers_diameter = centers_diameter.max(dist(a, b));
        }
    }
    let final_radius = trace.steps.last().expect("at least one step").radius;
    Ok(DiameterEstimate {
        estimate: centers_diameter.max(final_radius).as_f64(),
        centers_diameter: centers_diameter.as_f64(),
        final_radius: final_radius.as_f64(),
        distinct_centers: centers.len(),
        single_center: centers.len() == 1,
        probes: trace.probes,
    })
}

/// Spread of a finite point set relative to the unit-cube domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub domain_diameter: f64,
    pub min_pairwise: f64,
    pub phi: f64,
}

/// Exact spread: domain diameter `√d` over the minimum pairwise distance.
/// Duplicate points make the spread undefined.
pub fn spread<F: Scalar>(points: &[Point<F>]) -> Result<SpreadEstimate> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("spread needs at least two points".into()));
    }
    let dim = points[0].dim();
    let mut min_pair = F::infinity();
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            let d = dist(a, b);
            if d == F::zero() {
                return Err(Error::DuplicatePoints(i, j));
            }
            min_pair = min_pair.min(d);
        }
    }
    let domain_diameter = (dim as f64).sqrt();
    Ok(SpreadEstimate {
        domain_diameter,
        min_pairwise: min_pair.as_f64(),
        phi: domain_diameter / min_pair.as_f64(),
    })
}
