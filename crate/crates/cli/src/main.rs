//! Command-line front end: dataset generation and probe-driven experiments
//! with JSON reports and optional 2-D SVG plots.

mod report;
mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pxprobe::density::k_density_centers;
use pxprobe::explore::{
    estimate_diameter, explore, replay_domain, CarveConfig, ExploreMode,
};
use pxprobe::hull::{
    membership_ann, membership_approx_extremal, membership_exact, ExactExtremalSource,
    HullConfig, WorstLegalExtremal,
};
use pxprobe::{datasets, io, Oracle64, Point64};

use report::{command_echo, emit, file_digest, RunReport};

#[derive(Parser)]
#[command(
    name = "pxprobe",
    about = "Geometric computation over point sets accessed through nearest-neighbor probes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated point set to a CSV points file.
    Generate {
        #[arg(long, value_enum)]
        shape: Shape,
        /// Number of points.
        #[arg(long)]
        n: usize,
        /// Dimension (ignored by `counterexample`, which uses d = n).
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedy farthest-point exploration through an NN oracle.
    Greedy {
        #[arg(long)]
        points: PathBuf,
        /// Probe budget.
        #[arg(long)]
        iters: usize,
        #[arg(long, value_enum, default_value_t = GreedyMode::Exact)]
        mode: GreedyMode,
        /// ANN approximation factor (ann mode only).
        #[arg(long)]
        eps: Option<f64>,
        /// Answer ANN probes with the worst legal point instead of the exact one.
        #[arg(long, default_value_t = false)]
        adversarial: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Include wall time in the report (breaks byte-determinism).
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Probe-driven constant-factor diameter estimate.
    Diameter {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Approximate convex-hull membership for a query point.
    Hull {
        #[arg(long)]
        points: PathBuf,
        /// Query point, comma-separated coordinates.
        #[arg(long)]
        query: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = HullMode::ExactExtremal)]
        mode: HullMode,
        /// Diameter bound Δ' (estimated by probing when omitted).
        #[arg(long)]
        delta: Option<f64>,
        /// Use worst-legal answers for approx/ann extremal queries.
        #[arg(long, default_value_t = false)]
        adversarial: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Balanced (k-density) Voronoi clustering.
    Density {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Uniform,
    Circle,
    Clusters,
    Counterexample,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GreedyMode {
    Exact,
    Ann,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum HullMode {
    ExactExtremal,
    ApproxExtremal,
    Ann,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

/// Cell cap for the carved domain, overridable via PXPROBE_MAX_CELLS.
fn carve_config() -> Result<CarveConfig<f64>> {
    let mut cfg = CarveConfig::default();
    if let Ok(raw) = std::env::var("PXPROBE_MAX_CELLS") {
        cfg.max_cells = raw
            .parse()
            .map_err(|_| anyhow!("PXPROBE_MAX_CELLS must be an integer, got {raw:?}"))?;
    }
    Ok(cfg)
}

fn load_points(path: &Path) -> Result<Vec<Point64>> {
    io::read_points_csv(path).with_context(|| format!("loading points from {}", path.display()))
}

fn parse_query(raw: &str, dim: usize) -> Result<Point64> {
    let coords: Vec<f64> = raw
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("query coordinate {c:?} is not a number"))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        bail!("query has {} coordinates but the point set has dimension {dim}", coords.len());
    }
    Ok(Point64::new(coords))
}

fn write_svg(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing svg to {}", path.display()))
}

fn require_planar(points: &[Point64], what: &str) -> Result<()> {
    if points.first().map_or(0, |p| p.dim()) != 2 {
        bail!("--svg is only available for 2-D point sets ({what})");
    }
    Ok(())
}

fn finish<T: Serialize>(
    payload: T,
    seed: Option<u64>,
    digest: Option<String>,
    started: Instant,
    timing: bool,
    report_path: Option<&Path>,
) -> Result<()> {
    let elapsed = started.elapsed().as_millis();
    eprintln!("completed in {elapsed} ms");
    let report = RunReport {
        command: command_echo(),
        seed,
        input_digest: digest,
        wall_time_ms: timing.then_some(elapsed),
        payload,
    };
    emit(&report, report_path)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { shape, n, d, seed, out } => {
            if n < 1 {
                bail!("n must be at least 1");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points = match shape {
                Shape::Uniform => datasets::uniform(n, d, &mut rng),
                Shape::Clusters => datasets::clusters(n, d, 5.min(n), &mut rng),
                Shape::Circle => {
                    if d != 2 {
                        bail!("circle datasets are planar; got --d {d}");
                    }
                    datasets::circle(n)
                }
                Shape::Counterexample => {
                    if n < 2 {
                        bail!("counterexample needs n >= 2");
                    }
                    pxprobe::density::counterexample_set(n)
                }
            };
            io::write_points_csv(&out, &points)?;
            eprintln!("wrote {} points to {}", points.len(), out.display());
            Ok(())
        }

        Command::Greedy {
            points, iters, mode, eps, adversarial, report, seed, svg, timing,
        } => {
            let started = Instant::now();
            let digest = file_digest(&points)?;
            let pts = load_points(&points)?;
            let oracle = Oracle64::from_points(pts)?;
            let explore_mode = match mode {
                GreedyMode::Exact => {
                    if eps.is_some() {
                        bail!("--eps is only meaningful with --mode ann");
                    }
                    ExploreMode::Exact
                }
                GreedyMode::Ann => {
                    let eps = eps.ok_or_else(|| anyhow!("--mode ann requires --eps"))?;
                    ExploreMode::Ann { eps, adversarial }
                }
            };
            let cfg = carve_config()?;
            let trace = explore(&oracle, iters, explore_mode, cfg.clone())?;
            if let Some(svg_path) = svg {
                require_planar(oracle.finite_points().unwrap_or(&[]), "greedy")?;
                let domain = replay_domain(&trace, cfg);
                write_svg(&svg_path, &svg::render_trace(&trace, &domain))?;
            }
            finish(trace.report(), Some(seed), Some(digest), started, timing, report.as_deref())
        }

        Command::Diameter { points, report, seed, timing } => {
            let started = Instant::now();
            let digest = file_digest(&points)?;
            let pts = load_points(&points)?;
            let oracle = Oracle64::from_points(pts)?;
            let est = estimate_diameter(&oracle, carve_config()?)?;
            finish(est, Some(seed), Some(digest), started, timing, report.as_deref())
        }

        Command::Hull {
            points, query, eps, mode, delta, adversarial, report, seed, svg, timing,
        } => {
            let started = Instant::now();
            if !(0.0..=1.0).contains(&eps) || eps == 0.0 {
                bail!("--eps must lie in (0, 1]");
            }
            let digest = file_digest(&points)?;
            let pts = load_points(&points)?;
            let dim = pts[0].dim();
            let q = parse_query(&query, dim)?;
            let delta_big = match delta {
                Some(d) if d > 0.0 => d,
                Some(d) => bail!("--delta must be positive, got {d}"),
                None => {
                    let inside_unit_cube = pts
                        .iter()
                        .all(|p| p.coords.iter().all(|&c| (0.0..=1.0).contains(&c)));
                    if !inside_unit_cube {
                        bail!(
                            "points leave the unit cube; the probe-driven diameter \
                             estimate does not apply — pass --delta explicitly"
                        );
                    }
                    let oracle = Oracle64::from_points(pts.clone())?;
                    let est = estimate_diameter(&oracle, carve_config()?)?;
                    if est.estimate <= 0.0 {
                        bail!("degenerate point set; pass --delta explicitly");
                    }
                    eprintln!(
                        "estimated diameter {:.6}; using delta = {:.6}",
                        est.estimate,
                        2.0 * est.estimate
                    );
                    2.0 * est.estimate
                }
            };
            let cfg = HullConfig::new(eps, delta_big)?;
            let run = match mode {
                HullMode::ExactExtremal => {
                    let mut src = ExactExtremalSource { points: &pts };
                    membership_exact(&q, &mut src, &cfg)?
                }
                HullMode::ApproxExtremal => {
                    if adversarial {
                        let mut diam = 0.0f64;
                        for (i, a) in pts.iter().enumerate() {
                            for b in pts.iter().skip(i + 1) {
                                diam = diam.max(pxprobe::geom::dist(a, b));
                            }
                        }
                        let mut src =
                            WorstLegalExtremal { points: &pts, slack: eps / 4.0 * diam };
                        membership_approx_extremal(&q, &mut src, &cfg)?
                    } else {
                        let mut src = ExactExtremalSource { points: &pts };
                        membership_approx_extremal(&q, &mut src, &cfg)?
                    }
                }
                HullMode::Ann => {
                    let oracle = Oracle64::from_points(pts.clone())?;
                    membership_ann(&q, &oracle, &cfg, adversarial)?
                }
            };
            if let Some(svg_path) = svg {
                require_planar(&pts, "hull")?;
                write_svg(&svg_path, &svg::render_hull(&run, &pts, &q))?;
            }
            finish(run.report(), Some(seed), Some(digest), started, timing, report.as_deref())
        }

        Command::Density { points, k, seed, report, svg, timing } => {
            let started = Instant::now();
            let digest = file_digest(&points)?;
            let pts = load_points(&points)?;
            let planar = pts[0].dim() == 2;
            let out = k_density_centers(&pts, k, planar, seed)?;
            if let Some(svg_path) = svg {
                require_planar(&pts, "density")?;
                write_svg(&svg_path, &svg::render_density(&out.clustering, &pts))?;
            }
            let payload = out.clustering.report(seed, out.attempts);
            finish(payload, Some(seed), Some(digest), started, timing, report.as_deref())
        }
    }
}
