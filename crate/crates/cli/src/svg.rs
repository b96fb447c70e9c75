//! Minimal SVG rendering for planar runs: carved balls and live cells for
//! exploration, the iterate path for hull membership, colored clusters for
//! density clustering.

use pxprobe::explore::{CarvedDomain, GreedyTrace};
use pxprobe::geom::dist;
use pxprobe::hull::HullRun;
use pxprobe::{DensityClustering64, Point64};

const CANVAS: f64 = 800.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Maps a world bounding box onto the fixed canvas, preserving aspect ratio.
struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn around(points: impl Iterator<Item = [f64; 2]>) -> Frame {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        if !lo[0].is_finite() {
            (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let margin = span * 0.05;
        Frame {
            min: [lo[0] - margin, lo[1] - margin],
            scale: CANVAS / (span + 2.0 * margin),
        }
    }

    fn x(&self, wx: f64) -> f64 {
        (wx - self.min[0]) * self.scale
    }

    /// SVG y grows downward; world y grows upward.
    fn y(&self, wy: f64) -> f64 {
        CANVAS - (wy - self.min[1]) * self.scale
    }

    fn len(&self, l: f64) -> f64 {
        l * self.scale
    }
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn new() -> Canvas {
        Canvas { body: String::new() }
    }

    fn circle(&mut self, f: &Frame, c: [f64; 2], r: f64, style: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" style=\"{style}\"/>\n",
            f.x(c[0]),
            f.y(c[1]),
            f.len(r).max(0.5)
        ));
    }

    fn rect(&mut self, f: &Frame, low: [f64; 2], side: f64, style: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" style=\"{style}\"/>\n",
            f.x(low[0]),
            f.y(low[1] + side),
            f.len(side),
            f.len(side)
        ));
    }

    fn polyline(&mut self, f: &Frame, pts: &[[f64; 2]], style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", f.x(p[0]), f.y(p[1])))
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" style=\"{style}\"/>\n",
            coords.join(" ")
        ));
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" \
             viewBox=\"0 0 {c} {c}\">\n<rect width=\"{c}\" height=\"{c}\" fill=\"white\"/>\n{}\
             </svg>\n",
            self.body,
            c = CANVAS
        )
    }
}

fn xy(p: &Point64) -> [f64; 2] {
    [p.coords[0], p.coords[1]]
}

/// Exploration: live cells, carved balls, probe points and found centers.
pub fn render_trace(trace: &GreedyTrace<f64>, domain: &CarvedDomain<f64>) -> String {
    let frame = Frame::around([[0.0, 0.0], [1.0, 1.0]].into_iter());
    let mut c = Canvas::new();
    c.rect(&frame, [0.0, 0.0], 1.0, "fill:none;stroke:#333;stroke-width:1");
    for cell in domain.live_cells() {
        c.rect(
            &frame,
            [cell.low.coords[0], cell.low.coords[1]],
            cell.side(),
            "fill:#f5f5f5;stroke:#ccc;stroke-width:0.4",
        );
    }
    let shrink = match trace.mode {
        pxprobe::explore::ExploreMode::Exact => 1.0,
        pxprobe::explore::ExploreMode::Ann { eps, .. } => 1.0 - eps,
    };
    for s in &trace.steps {
        let r = shrink * dist(&s.query, &s.neighbor);
        c.circle(
            &frame,
            xy(&s.query),
            r,
            "fill:#1f77b4;fill-opacity:0.08;stroke:#1f77b4;stroke-width:0.6",
        );
    }
    for s in &trace.steps {
        c.circle(&frame, xy(&s.query), 0.004, "fill:#d62728");
        c.circle(&frame, xy(&s.neighbor), 0.006, "fill:#2ca02c");
    }
    c.finish()
}

/// Hull membership: the point set, the descent path, and the query.
pub fn render_hull(run: &HullRun<f64>, points: &[Point64], query: &Point64) -> String {
    let frame = Frame::around(
        points
            .iter()
            .map(xy)
            .chain(std::iter::once(xy(query)))
            .chain(run.iterates.iter().map(|it| xy(&it.point))),
    );
    let mut c = Canvas::new();
    for p in points {
        c.circle(&frame, xy(p), 0.004, "fill:#7f7f7f");
    }
    let path: Vec<[f64; 2]> = run.iterates.iter().map(|it| xy(&it.point)).collect();
    c.polyline(&frame, &path, "fill:none;stroke:#1f77b4;stroke-width:1.5");
    for it in &run.iterates {
        c.circle(&frame, xy(&it.point), 0.005, "fill:#1f77b4");
    }
    for p in &run.probed {
        c.circle(&frame, xy(p), 0.006, "fill:none;stroke:#2ca02c;stroke-width:1");
    }
    c.circle(&frame, xy(query), 0.008, "fill:#d62728");
    c.finish()
}

/// Density clustering: points colored by their assigned center.
pub fn render_density(clustering: &DensityClustering64, points: &[Point64]) -> String {
    let frame = Frame::around(points.iter().map(xy));
    let mut c = Canvas::new();
    for (p, &assigned) in points.iter().zip(&clustering.assignment) {
        let color = PALETTE[assigned % PALETTE.len()];
        c.circle(&frame, xy(p), 0.004, &format!("fill:{color}"));
    }
    for (i, center) in clustering.centers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        c.circle(
            &frame,
            xy(center),
            0.009,
            &format!("fill:{color};stroke:#000;stroke-width:0.8"),
        );
    }
    c.finish()
}
