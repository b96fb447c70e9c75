//! Approximate convex-hull membership through extremal queries.
//!
//! The membership test walks a sequence of hull points toward the query: at
//! each step it asks for an extremal point of `P` in the direction of the
//! query, either concludes `Out` (the extremal projection falls short of the
//! query), or descends by projecting the query onto the segment toward the
//! extremal point. `In` fires once the iterate gets within
//! `eps·diameter_bound/2` of the query. Every iterate is a tracked convex
//! combination of probed points, so both verdicts carry certificates in
//! exact mode.
//!
//! Extremal queries come in three strengths: exact, `eps/4`-approximate
//! (additive `eps/4·diam` shortfall allowed), and ANN-derived — a single
//! `(1+delta_small)`-ANN probe taken `tau` far along the query direction,
//! which is guaranteed to be an `eps`-approximate extremal answer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist, dot, project_to_segment, projection_along_ray, Point};
use crate::oracle::Oracle;
use crate::reference::exact_extremal;
use crate::scalar::Scalar;

/// Parameters of a membership run. `diameter_bound` is the caller's
/// diameter estimate Δ′ and must satisfy `diam(P) <= Δ′ <= 2·diam(P)` for
/// the verdict guarantees to hold.
#[derive(Debug, Clone)]
pub struct HullConfig<F: Scalar> {
    pub eps: F,
    pub diameter_bound: F,
    /// Probe budget of an exact-mode run; approximate and ANN modes get 4x.
    pub max_iters: usize,
    /// Distance of the far ANN probe along the query ray: `32·Δ′/eps`.
    pub tau: F,
    /// ANN factor that makes one far probe an `eps`-approximate extremal
    /// query: `eps²/(32-eps)²`.
    pub delta_small: F,
}

impl<F: Scalar> HullConfig<F> {
    /// Builds a config for `eps` in `(0, 1]` and a positive diameter bound.
    pub fn new(eps: F, diameter_bound: F) -> Result<Self> {
        if eps <= F::zero() || eps > F::one() {
            return Err(Error::InvalidParameter("hull eps must lie in (0, 1]".into()));
        }
        if diameter_bound <= F::zero() {
            return Err(Error::InvalidParameter("diameter bound must be positive".into()));
        }
        let e = eps.as_f64();
        let max_iters = (8.0 / (e * e)).ceil() as usize + (1.0 / e).log2().ceil().max(0.0) as usize;
        let c = F::cast(32.0);
        let tau = c * diameter_bound / eps;
        let delta_small = eps * eps / ((c - eps) * (c - eps));
        debug_assert!(tau > diameter_bound);
        Ok(HullConfig { eps, diameter_bound, max_iters, tau, delta_small })
    }

    /// Builds a config from a probe-driven diameter estimate (within a
    /// factor 3 either way): doubling it keeps the bound above the true
    /// diameter in the typical case where the estimate is not a gross
    /// underestimate.
    pub fn from_diameter_estimate(eps: F, estimate: F) -> Result<Self> {
        HullConfig::new(eps, estimate * F::cast(2.0))
    }

    /// Overrides the probe budget.
    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn in_threshold(&self) -> F {
        self.eps * self.diameter_bound / F::cast(2.0)
    }
}

/// Membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    In,
    Out,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Iterate within `eps·Δ′/2` of the query.
    InThreshold,
    /// The extremal projection certified separation (or fell short by more
    /// than the approximate-mode gap).
    Separation,
    /// Probe budget exhausted without reaching the query.
    BudgetExhausted,
}

/// An iterate of the descent: the point, its distance to the query, and the
/// convex weights over the probed points recorded so far (earlier iterates
/// have shorter weight vectors; missing entries are zero).
#[derive(Debug, Clone)]
pub struct HullIterate<F: Scalar> {
    pub point: Point<F>,
    pub dist_to_query: F,
    pub weights: Vec<F>,
}

/// Certificate attached to a finished run.
#[derive(Debug, Clone)]
pub enum Certificate<F: Scalar> {
    /// A hull point within `eps·Δ′/2` of the query, with its convex weights.
    InWitness { point: Point<F>, weights: Vec<F> },
    /// A unit direction `v` with `max_P v·x < v·q` (exact mode only).
    Separation { direction: Vec<F> },
}

/// Full record of a membership run.
#[derive(Debug, Clone)]
pub struct HullRun<F: Scalar> {
    pub verdict: Verdict,
    pub stop: StopReason,
    pub iterates: Vec<HullIterate<F>>,
    /// Every oracle answer, in probe order (`iterates[i].weights` indexes this).
    pub probed: Vec<Point<F>>,
    pub probes: u64,
    pub certificate: Option<Certificate<F>>,
    pub config: HullConfigReport,
}

impl<F: Scalar> HullRun<F> {
    /// Serializable view matching the published run schema.
    pub fn report(&self) -> HullReport {
        HullReport {
            verdict: match self.verdict {
                Verdict::In => "in".into(),
                Verdict::Out => "out".into(),
            },
            iterations: self.iterates.len() - 1,
            probes: self.probes,
            eps: self.config.eps,
            delta_small: self.config.delta_small,
            tau: self.config.tau,
            budget_exhausted: self.stop == StopReason::BudgetExhausted,
            certificate: self.certificate.as_ref().map(|c| match c {
                Certificate::InWitness { point, .. } => CertificateReport::InWitness {
                    point: point.coords.iter().map(|&x| x.as_f64()).collect(),
                },
                Certificate::Separation { direction } => CertificateReport::Separation {
                    direction: direction.iter().map(|&x| x.as_f64()).collect(),
                },
            }),
        }
    }
}

/// The scalar parts of a config, kept on the run for reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullConfigReport {
    pub eps: f64,
    pub diameter_bound: f64,
    pub max_iters: usize,
    pub tau: f64,
    pub delta_small: f64,
}

impl<F: Scalar> HullConfig<F> {
    fn to_report(&self) -> HullConfigReport {
        HullConfigReport {
            eps: self.eps.as_f64(),
            diameter_bound: self.diameter_bound.as_f64(),
            max_iters: self.max_iters,
            tau: self.tau.as_f64(),
            delta_small: self.delta_small.as_f64(),
        }
    }
}

/// JSON form of a membership run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullReport {
    pub verdict: String,
    pub iterations: usize,
    pub probes: u64,
    pub eps: f64,
    pub delta_small: f64,
    pub tau: f64,
    pub budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CertificateReport {
    InWitness { point: Vec<f64> },
    Separation { direction: Vec<f64> },
}

/// Source of extremal answers for the membership loop. `origin` is the
/// current iterate; implementations that probe far along the ray need it.
pub trait ExtremalOracle<F: Scalar> {
    fn dim(&self) -> usize;
    fn extremal(&mut self, origin: &Point<F>, dir: &[F]) -> Result<Point<F>>;
}

/// Exact extremal answers by brute force over explicit points.
pub struct ExactExtremalSource<'a, F: Scalar> {
    pub points: &'a [Point<F>],
}

impl<F: Scalar> ExtremalOracle<F> for ExactExtremalSource<'_, F> {
    fn dim(&self) -> usize {
        self.points.first().map_or(0, Point::dim)
    }

    fn extremal(&mut self, _origin: &Point<F>, dir: &[F]) -> Result<Point<F>> {
        Ok(self.points[exact_extremal(self.points, dir)?].clone())
    }
}

/// The least helpful answer still legal for an approximate extremal oracle
/// with additive slack `slack` (callers pass `eps/4 · diam(P)`): the point
/// of minimum projection among those within `slack` of the true maximum.
pub struct WorstLegalExtremal<'a, F: Scalar> {
    pub points: &'a [Point<F>],
    pub slack: F,
}

impl<F: Scalar> ExtremalOracle<F> for WorstLegalExtremal<'_, F> {
    fn dim(&self) -> usize {
        self.points.first().map_or(0, Point::dim)
    }

    fn extremal(&mut self, _origin: &Point<F>, dir: &[F]) -> Result<Point<F>> {
        if self.points.is_empty() {
            return Err(Error::EmptySet);
        }
        let max = self
            .points
            .iter()
            .map(|p| dot(&p.coords, dir))
            .fold(F::neg_infinity(), F::max);
        let mut best: Option<(&Point<F>, F)> = None;
        for p in self.points {
            let v = dot(&p.coords, dir);
            if v < max - self.slack {
                continue;
            }
            best = match best {
                None => Some((p, v)),
                Some((bp, bv)) => match crate::scalar::cmp_tol(v, bv) {
                    std::cmp::Ordering::Less => Some((p, v)),
                    std::cmp::Ordering::Equal
                        if p.lex_cmp(bp) == std::cmp::Ordering::Less =>
                    {
                        Some((p, v))
                    }
                    _ => Some((bp, bv)),
                },
            };
        }
        Ok(best.expect("true extremal is always legal").0.clone())
    }
}

/// Kind tag for [`ExtremalAnswer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalKind {
    Exact,
    Approx,
    AnnDerived,
}

/// An extremal answer together with how it was obtained.
#[derive(Debug, Clone)]
pub struct ExtremalAnswer<F: Scalar> {
    pub point: Point<F>,
    pub kind: ExtremalKind,
}

/// Answers an extremal query in the direction `(q - p_prev)` with a single
/// `(1+delta_small)`-ANN probe placed `tau` beyond `p_prev` along that
/// direction. The answer is an `eps`-approximate extremal point of the
/// oracle's set.
pub fn ann_extremal<F: Scalar>(
    p_prev: &Point<F>,
    q: &Point<F>,
    oracle: &Oracle<F>,
    cfg: &HullConfig<F>,
    adversarial: bool,
) -> Result<ExtremalAnswer<F>> {
    let mut dir = q.sub(p_prev);
    let n = crate::geom::norm(&dir);
    if n <= F::zero() {
        return Err(Error::InvalidParameter("ann_extremal needs p_prev != q".into()));
    }
    for c in dir.iter_mut() {
        *c = *c / n;
    }
    ann_extremal_along(p_prev, &dir, oracle, cfg, adversarial)
}

fn ann_extremal_along<F: Scalar>(
    origin: &Point<F>,
    dir: &[F],
    oracle: &Oracle<F>,
    cfg: &HullConfig<F>,
    adversarial: bool,
) -> Result<ExtremalAnswer<F>> {
    let probe = origin.add_scaled(dir, cfg.tau);
    let ans = if adversarial {
        oracle.adversarial_ann_query(&probe, cfg.delta_small)?
    } else {
        oracle.ann_query(&probe, cfg.delta_small)?
    };
    Ok(ExtremalAnswer { point: ans.point, kind: ExtremalKind::AnnDerived })
}

/// ANN-backed extremal source for the membership loop.
struct AnnExtremalSource<'a, F: Scalar> {
    oracle: &'a Oracle<F>,
    cfg: HullConfig<F>,
    adversarial: bool,
}

impl<F: Scalar> ExtremalOracle<F> for AnnExtremalSource<'_, F> {
    fn dim(&self) -> usize {
        self.oracle.dim()
    }

    fn extremal(&mut self, origin: &Point<F>, dir: &[F]) -> Result<Point<F>> {
        Ok(ann_extremal_along(origin, dir, self.oracle, &self.cfg, self.adversarial)?.point)
    }
}

/// Out-detection rule of the membership loop.
enum OutRule<F: Scalar> {
    /// Exact extremal answers: the projection falling strictly short of the
    /// query separates, and the query direction is the certificate.
    Projection,
    /// Approximate answers: only a shortfall beyond `gap` is conclusive.
    ShortfallBeyond { gap: F },
}

fn unit_axis<F: Scalar>(dim: usize, sign: F) -> Vec<F> {
    let mut e = vec![F::zero(); dim];
    e[0] = sign;
    e
}

fn run_membership<F: Scalar, E: ExtremalOracle<F>>(
    q: &Point<F>,
    extremal: &mut E,
    cfg: &HullConfig<F>,
    out_rule: OutRule<F>,
    budget: usize,
    p0: Point<F>,
    initial_probes: u64,
) -> Result<HullRun<F>> {
    let threshold = cfg.in_threshold();
    let mut probes = initial_probes;
    let mut probed: Vec<Point<F>> = vec![p0.clone()];
    let mut weights: Vec<F> = vec![F::one()];
    let mut current = p0;
    let mut iterates = vec![HullIterate {
        point: current.clone(),
        dist_to_query: dist(&current, q),
        weights: weights.clone(),
    }];

    let (verdict, stop, certificate) = loop {
        let d_prev = dist(&current, q);
        if d_prev <= threshold {
            break (
                Verdict::In,
                StopReason::InThreshold,
                Some(Certificate::InWitness { point: current.clone(), weights: weights.clone() }),
            );
        }
        if probes >= budget as u64 {
            break (Verdict::Out, StopReason::BudgetExhausted, None);
        }

        let mut dir = q.sub(&current);
        for c in dir.iter_mut() {
            *c = *c / d_prev;
        }
        let z = extremal.extremal(&current, &dir)?;
        probes += 1;
        let s = projection_along_ray(&z, &current, &dir);

        match out_rule {
            OutRule::Projection => {
                // Boundary ties (within tolerance) keep iterating.
                if s < d_prev - F::cast(1e-12) {
                    break (
                        Verdict::Out,
                        StopReason::Separation,
                        Some(Certificate::Separation { direction: dir }),
                    );
                }
            }
            OutRule::ShortfallBeyond { gap } => {
                if s >= F::zero() && d_prev - s > gap {
                    break (Verdict::Out, StopReason::Separation, None);
                }
            }
        }

        let zi = match probed.iter().position(|p| *p == z) {
            Some(i) => i,
            None => {
                probed.push(z.clone());
                weights.push(F::zero());
                probed.len() - 1
            }
        };
        let (next, t) = project_to_segment(q, &current, &z);
        for w in weights.iter_mut() {
            *w = *w * (F::one() - t);
        }
        weights[zi] += t;
        current = next;
        iterates.push(HullIterate {
            point: current.clone(),
            dist_to_query: dist(&current, q),
            weights: weights.clone(),
        });
    };

    Ok(HullRun {
        verdict,
        stop,
        iterates,
        probed,
        probes,
        certificate,
        config: cfg.to_report(),
    })
}

/// Membership with exact extremal queries. `Out` answers carry a separating
/// direction; `In` answers carry a witness within `eps·Δ′/2` of the query.
pub fn membership_exact<F: Scalar>(
    q: &Point<F>,
    extremal: &mut impl ExtremalOracle<F>,
    cfg: &HullConfig<F>,
) -> Result<HullRun<F>> {
    if q.dim() != extremal.dim() {
        return Err(Error::DimensionMismatch { expected: extremal.dim(), got: q.dim() });
    }
    let p0 = extremal.extremal(q, &unit_axis(q.dim(), F::one()))?;
    run_membership(q, extremal, cfg, OutRule::Projection, cfg.max_iters, p0, 1)
}

/// Membership with an `eps/4`-approximate extremal oracle. Early `Out`
/// requires the extremal projection to land on the segment and fall short
/// of the query by more than `eps·Δ′/4`; the budget is 4x the exact mode's.
pub fn membership_approx_extremal<F: Scalar>(
    q: &Point<F>,
    extremal: &mut impl ExtremalOracle<F>,
    cfg: &HullConfig<F>,
) -> Result<HullRun<F>> {
    if q.dim() != extremal.dim() {
        return Err(Error::DimensionMismatch { expected: extremal.dim(), got: q.dim() });
    }
    let p0 = extremal.extremal(q, &unit_axis(q.dim(), F::one()))?;
    let gap = cfg.eps * cfg.diameter_bound / F::cast(4.0);
    run_membership(
        q,
        extremal,
        cfg,
        OutRule::ShortfallBeyond { gap },
        cfg.max_iters * 4,
        p0,
        1,
    )
}

/// Membership with extremal queries implemented by `(1+delta_small)`-ANN
/// probes. ANN-derived answers are `eps`-approximate extremal answers, so
/// early `Out` requires a shortfall beyond `eps·Δ′`; budget is 4x exact.
pub fn membership_ann<F: Scalar>(
    q: &Point<F>,
    oracle: &Oracle<F>,
    cfg: &HullConfig<F>,
    adversarial: bool,
) -> Result<HullRun<F>> {
    if q.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dim(), got: q.dim() });
    }
    let dim = q.dim();
    let mut source = AnnExtremalSource { oracle, cfg: cfg.clone(), adversarial };
    // First hull point: the ANN answer for a probe far out on the -e1 axis
    // from the domain center.
    let domain_center = Point::new(vec![F::cast(0.5); dim]);
    let p0 = source.extremal(&domain_center, &unit_axis(dim, -F::one()))?;
    let gap = cfg.eps * cfg.diameter_bound;
    run_membership(
        q,
        &mut source,
        cfg,
        OutRule::ShortfallBeyond { gap },
        cfg.max_iters * 4,
        p0,
        1,
    )
}

/// Reconstructs an iterate from its weight certificate, for validation.
pub fn reconstruct_iterate<F: Scalar>(run: &HullRun<F>, iterate: &HullIterate<F>) -> Point<F> {
    let dim = run.probed[0].dim();
    let mut acc = vec![F::zero(); dim];
    for (w, p) in iterate.weights.iter().zip(&run.probed) {
        for (a, &c) in acc.iter_mut().zip(&p.coords) {
            *a = *a + *w * c;
        }
    }
    Point::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::normalize;
    use crate::reference::{hull_distance_2d, interior_depth_2d};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(coords: &[f64]) -> Point<f64> {
        Point::from_f64s(coords)
    }

    fn corners() -> Vec<Point<f64>> {
        vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[1.0, 1.0])]
    }

    fn sq2() -> f64 {
        2f64.sqrt()
    }

    #[test]
    fn config_formulas() {
        let c = HullConfig::new(0.2f64, 1.0).unwrap();
        assert_eq!(c.max_iters, 203); // ceil(8/0.04) + ceil(lg 5)
        let c1 = HullConfig::new(1.0f64, 1.0).unwrap();
        assert_relative_eq!(c1.delta_small, 1.0 / 961.0, max_relative = 1e-12);
        assert_eq!(c1.max_iters, 8);
        let c5 = HullConfig::new(0.5f64, 1.0).unwrap();
        assert_relative_eq!(c5.tau, 64.0, max_relative = 1e-12);
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(HullConfig::new(0.0f64, 1.0).is_err());
        assert!(HullConfig::new(1.5f64, 1.0).is_err());
        assert!(HullConfig::new(0.5f64, 0.0).is_err());
    }

    #[test]
    fn exact_interior_center_of_square_lands_in_one_step() {
        let pts = corners();
        let cfg = HullConfig::new(0.1, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        let run = membership_exact(&p(&[0.5, 0.5]), &mut src, &cfg).unwrap();
        assert_eq!(run.verdict, Verdict::In);
        // The first descent step lands exactly on the query.
        assert_eq!(run.iterates[1].point, p(&[0.5, 0.5]));
        assert!(run.probes <= cfg.max_iters as u64);
    }

    #[test]
    fn exact_right_outside_with_axis_certificate() {
        let pts = corners();
        let cfg = HullConfig::new(0.1, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        let run = membership_exact(&p(&[1.5, 0.5]), &mut src, &cfg).unwrap();
        assert_eq!(run.verdict, Verdict::Out);
        assert_eq!(run.stop, StopReason::Separation);
        let Some(Certificate::Separation { direction }) = &run.certificate else {
            panic!("missing separation certificate");
        };
        // The certificate separates: max over P of v.x < v.q.
        let vq = dot(direction, &[1.5, 0.5]);
        for pt in &pts {
            assert!(dot(direction, &pt.coords) < vq - 1e-12);
        }
        // The descent walks to (1, 0.5) and then separates along +e1.
        assert_relative_eq!(direction[0], 1.0, epsilon = 1e-12);
        assert!(direction[1].abs() < 1e-12);
    }

    #[test]
    fn exact_above_outside_matches_reference_distance() {
        let pts = corners();
        let q = p(&[0.5, 1.3]);
        assert!(hull_distance_2d(&q, &pts) > 0.1 * sq2());
        let cfg = HullConfig::new(0.1, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        let run = membership_exact(&q, &mut src, &cfg).unwrap();
        assert_eq!(run.verdict, Verdict::Out);
    }

    #[test]
    fn contraction_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let d = rng.random_range(2..=5);
            let pts = crate::datasets::uniform(rng.random_range(5..60), d, &mut rng);
            let mut diameter = 0.0f64;
            for (i, a) in pts.iter().enumerate() {
                for b in pts.iter().skip(i + 1) {
                    diameter = diameter.max(dist(a, b));
                }
            }
            if diameter == 0.0 {
                continue;
            }
            let eps = *[0.1, 0.2, 0.4].choose(&mut rng).unwrap();
            let cfg = HullConfig::new(eps, diameter * 1.5).unwrap();
            let q = Point::new(
                (0..d).map(|_| rng.random_range(-0.2..1.2)).collect::<Vec<f64>>(),
            );
            let mut src = ExactExtremalSource { points: &pts };
            let run = membership_exact(&q, &mut src, &cfg).unwrap();
            for w in run.iterates.windows(2) {
                let (d_prev, d_next) = (w[0].dist_to_query, w[1].dist_to_query);
                if d_prev > eps * diameter {
                    assert!(
                        d_next < (1.0 - eps * eps / 2.0) * d_prev,
                        "no contraction: {d_prev} -> {d_next} (eps {eps})"
                    );
                }
            }
        }
    }

    #[test]
    fn iterate_certificates_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = crate::datasets::uniform(40, 3, &mut rng);
        let cfg = HullConfig::new(0.15, 3f64.sqrt()).unwrap();
        let q = p(&[0.4, 0.5, 0.6]);
        let mut src = ExactExtremalSource { points: &pts };
        let run = membership_exact(&q, &mut src, &cfg).unwrap();
        for it in &run.iterates {
            let rec = reconstruct_iterate(&run, it);
            assert!(dist(&rec, &it.point) <= 1e-9);
            let total: f64 = it.weights.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
            assert!(it.weights.iter().all(|&w| w >= -1e-12));
        }
        // Distances strictly decrease while the run continues.
        for w in run.iterates.windows(2) {
            assert!(w[1].dist_to_query < w[0].dist_to_query);
        }
    }

    #[test]
    fn query_at_p0_is_in_after_one_probe() {
        let pts = corners();
        let cfg = HullConfig::new(0.1, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        // p0 is the +e1 extremal with lexicographic ties: (1, 0).
        let run = membership_approx_extremal(&p(&[1.0, 0.0]), &mut src, &cfg).unwrap();
        assert_eq!(run.verdict, Verdict::In);
        assert_eq!(run.probes, 1);
        assert_eq!(run.iterates.len(), 1);
    }

    #[test]
    fn approx_with_exact_oracle_agrees_with_exact_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 100 {
            let pts = crate::datasets::uniform(30, 2, &mut rng);
            let q = Point::new(vec![
                rng.random_range(-0.3..1.3),
                rng.random_range(-0.3..1.3),
            ]);
            let mut diameter = 0.0f64;
            for (i, a) in pts.iter().enumerate() {
                for b in pts.iter().skip(i + 1) {
                    diameter = diameter.max(dist(a, b));
                }
            }
            let eps = 0.2;
            // Skip queries inside the fuzzy band around the boundary.
            let outside = hull_distance_2d(&q, &pts);
            let depth = interior_depth_2d(&q, &pts);
            if outside.max(depth) <= eps * diameter {
                continue;
            }
            checked += 1;
            let cfg = HullConfig::new(eps, diameter * 1.2).unwrap();
            let mut a = ExactExtremalSource { points: &pts };
            let mut b = ExactExtremalSource { points: &pts };
            let exact = membership_exact(&q, &mut a, &cfg).unwrap();
            let approx = membership_approx_extremal(&q, &mut b, &cfg).unwrap();
            assert_eq!(exact.verdict, approx.verdict, "disagreement at {q:?}");
        }
    }

    #[test]
    fn approx_with_worst_legal_answers_is_still_correct() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        while checked < 100 {
            let pts = crate::datasets::uniform(25, 2, &mut rng);
            let q = Point::new(vec![
                rng.random_range(-0.3..1.3),
                rng.random_range(-0.3..1.3),
            ]);
            let mut diameter = 0.0f64;
            for (i, a) in pts.iter().enumerate() {
                for b in pts.iter().skip(i + 1) {
                    diameter = diameter.max(dist(a, b));
                }
            }
            let eps = 0.25;
            let outside = hull_distance_2d(&q, &pts);
            let depth = interior_depth_2d(&q, &pts);
            if outside.max(depth) <= eps * diameter {
                continue;
            }
            checked += 1;
            let cfg = HullConfig::new(eps, diameter * 1.4).unwrap();
            let mut src =
                WorstLegalExtremal { points: &pts, slack: eps / 4.0 * diameter };
            let run = membership_approx_extremal(&q, &mut src, &cfg).unwrap();
            let want = if outside > 0.0 { Verdict::Out } else { Verdict::In };
            assert_eq!(run.verdict, want, "wrong verdict at {q:?}");
            assert!(run.probes <= 4 * cfg.max_iters as u64);
        }
    }

    #[test]
    fn ann_extremal_recovers_true_extremal_with_benign_oracle() {
        let pts = corners();
        let oracle = Oracle::from_points(pts).unwrap();
        let cfg = HullConfig::new(0.5, sq2()).unwrap();
        let ans = ann_extremal(&p(&[0.0, 0.0]), &p(&[1.0, 1.0]), &oracle, &cfg, false).unwrap();
        assert_eq!(ans.point, p(&[1.0, 1.0]));
        assert_eq!(ans.kind, ExtremalKind::AnnDerived);
    }

    #[test]
    fn ann_extremal_validity_under_adversarial_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let d = rng.random_range(2..=4);
            let pts = crate::datasets::uniform(rng.random_range(4..40), d, &mut rng);
            let mut diameter = 0.0f64;
            for (i, a) in pts.iter().enumerate() {
                for b in pts.iter().skip(i + 1) {
                    diameter = diameter.max(dist(a, b));
                }
            }
            if diameter < 1e-6 {
                continue;
            }
            let eps = rng.random_range(0.05..1.0);
            let cfg = HullConfig::new(eps, diameter * rng.random_range(1.0..2.0)).unwrap();
            let oracle = Oracle::from_points(pts.clone()).unwrap();
            let p_prev = pts.choose(&mut rng).unwrap().clone();
            let q = Point::new((0..d).map(|_| rng.random_range(-1.0..2.0)).collect::<Vec<f64>>());
            if dist(&p_prev, &q) < 1e-9 {
                continue;
            }
            let mut dir = q.sub(&p_prev);
            normalize(&mut dir);
            let z = ann_extremal(&p_prev, &q, &oracle, &cfg, true).unwrap();
            let max = pts
                .iter()
                .map(|pt| dot(&pt.coords, &dir))
                .fold(f64::NEG_INFINITY, f64::max);
            let got = dot(&z.point.coords, &dir);
            assert!(
                got >= max - eps * diameter - 1e-9,
                "eps-extremal violated: {got} < {max} - {eps}*{diameter}"
            );
        }
    }

    #[test]
    fn ann_membership_on_square() {
        let pts = corners();
        let oracle = Oracle::from_points(pts).unwrap();
        let cfg = HullConfig::new(0.2, sq2()).unwrap();
        let inside = membership_ann(&p(&[0.5, 0.5]), &oracle, &cfg, true).unwrap();
        assert_eq!(inside.verdict, Verdict::In);
        let outside = membership_ann(&p(&[2.0, 0.5]), &oracle, &cfg, true).unwrap();
        assert_eq!(outside.verdict, Verdict::Out);
        assert!(outside.probes <= 4 * cfg.max_iters as u64);
        // In-certificate sits within eps*Δ'/2 of the query.
        let Some(Certificate::InWitness { point, .. }) = &inside.certificate else {
            panic!("missing witness");
        };
        assert!(dist(point, &p(&[0.5, 0.5])) <= 0.2 * sq2() / 2.0 + 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let pts = corners();
        let cfg = HullConfig::new(0.2, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        assert!(membership_exact(&p(&[0.1]), &mut src, &cfg).is_err());
    }

    #[test]
    fn report_has_schema_fields() {
        let pts = corners();
        let cfg = HullConfig::new(0.2, sq2()).unwrap();
        let mut src = ExactExtremalSource { points: &pts };
        let run = membership_exact(&p(&[1.5, 0.5]), &mut src, &cfg).unwrap();
        let json = serde_json::to_value(run.report()).unwrap();
        for key in ["verdict", "iterations", "probes", "eps", "delta_small", "tau", "certificate"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
