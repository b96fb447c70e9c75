//! Geometric computation over point sets that are reachable only through
//! nearest-neighbor probes.
//!
//! The crate provides:
//!
//! - [`oracle`]: exact and `(1+ε)`-approximate nearest-neighbor oracles over
//!   explicit and analytic (infinite) point sets, with adversarial wrappers
//!   and probe accounting;
//! - [`explore`]: greedy farthest-point exploration of the unit cube through
//!   an oracle, yielding an approximate greedy permutation, plus a
//!   constant-factor diameter estimator;
//! - [`hull`]: approximate convex-hull membership by iterative descent,
//!   driven by exact, approximate, or ANN-implemented extremal queries;
//! - [`density`]: balanced (k-density) Voronoi clustering;
//! - [`reference`]: brute-force ground truth (Gonzalez k-center, exact
//!   extremal points, exact hull distance) used to validate everything else.
//!
//! All geometry is generic over the [`scalar::Scalar`] floating-point type;
//! the `*64` aliases below are the concrete types used by the CLI and tests.
//!
//! ```
//! use pxprobe::{Oracle64, OracleSet, Point64};
//!
//! let pts = vec![Point64::from_f64s(&[0.2, 0.2]), Point64::from_f64s(&[0.8, 0.8])];
//! let oracle = Oracle64::new(OracleSet::Finite(pts)).unwrap();
//! let ans = oracle.nn_query(&Point64::from_f64s(&[0.0, 0.0])).unwrap();
//! assert_eq!(ans.point, Point64::from_f64s(&[0.2, 0.2]));
//! ```

pub mod datasets;
pub mod density;
pub mod error;
pub mod explore;
pub mod geom;
pub mod hull;
pub mod io;
pub mod oracle;
pub mod reference;
pub mod scalar;

pub use error::{Error, Result};
pub use geom::{Ball, Cell, Cone, Point};
pub use oracle::{NnAnswer, Oracle, OracleConfig, OracleSet, OracleStats};
pub use scalar::Scalar;

/// Concrete `f64` aliases; the CLI and the acceptance suite work with these.
pub type Point64 = geom::Point<f64>;
pub type Ball64 = geom::Ball<f64>;
pub type Cone64 = geom::Cone<f64>;
pub type Cell64 = geom::Cell<f64>;
pub type Oracle64 = oracle::Oracle<f64>;
pub type NnAnswer64 = oracle::NnAnswer<f64>;
pub type CarvedDomain64 = explore::CarvedDomain<f64>;
pub type GreedyTrace64 = explore::GreedyTrace<f64>;
pub type HullConfig64 = hull::HullConfig<f64>;
pub type HullRun64 = hull::HullRun<f64>;
pub type DensityClustering64 = density::DensityClustering<f64>;

/// Concrete `f32` aliases for callers that prefer single precision.
pub type Point32 = geom::Point<f32>;
pub type Ball32 = geom::Ball<f32>;
