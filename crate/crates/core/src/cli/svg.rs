//! Phase portraits as standalone SVG.

use crate::dynsys::{State, VectorField};
use crate::flow::{basin_map, BranchKind, FlowStructure};
use crate::region::{Region, Shape};
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitOptions {
    /// Forward orbits started on the region boundary.
    pub trajectories: usize,
    pub nullclines: bool,
    /// Shade basins on an `n`×`n` grid.
    pub basins: Option<usize>,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            trajectories: 12,
            nullclines: true,
            basins: None,
        }
    }
}

const PALETTE: [&str; 4] = ["#4c78a8", "#f58518", "#54a24b", "#b279a2"];

/// Maps model coordinates into the picture, y pointing up.
struct Frame {
    lo: State,
    hi: State,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(region: &Region) -> Frame {
        let (mut lo, mut hi) = region.bbox();
        if region.dim() == 1 {
            let w = hi[0] - lo[0];
            lo[1] = -0.1 * w;
            hi[1] = 0.1 * w;
        }
        let m = [0.05 * (hi[0] - lo[0]), 0.05 * (hi[1] - lo[1])];
        let lo = [lo[0] - m[0], lo[1] - m[1]];
        let hi = [hi[0] + m[0], hi[1] + m[1]];
        let scale = WIDTH / (hi[0] - lo[0]);
        Frame {
            lo,
            hi,
            scale,
            height: (hi[1] - lo[1]) * scale,
        }
    }

    fn map(&self, p: &State) -> (f64, f64) {
        (
            (p[0] - self.lo[0]) * self.scale,
            (self.hi[1] - p[1]) * self.scale,
        )
    }

    fn points(&self, pts: &[State]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Zero-level segments of `g` on an `n`×`n` grid, as an SVG path.
fn contour(frame: &Frame, n: usize, g: impl Fn(&State) -> Option<f64>) -> String {
    let at = |i: usize, j: usize| -> State {
        [
            frame.lo[0] + (frame.hi[0] - frame.lo[0]) * i as f64 / n as f64,
            frame.lo[1] + (frame.hi[1] - frame.lo[1]) * j as f64 / n as f64,
        ]
    };
    let vals: Vec<Option<f64>> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| g(&at(i, j)))
        .collect();
    let v = |i: usize, j: usize| vals[j * (n + 1) + i];
    let mut d = String::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let Some(cv) = corners
                .iter()
                .map(|&(a, b)| v(a, b))
                .collect::<Option<Vec<f64>>>()
            else {
                continue;
            };
            let mut cross: Vec<State> = Vec::new();
            for k in 0..4 {
                let (a, b) = (cv[k], cv[(k + 1) % 4]);
                if (a < 0.0) != (b < 0.0) {
                    let t = a / (a - b);
                    let pa = at(corners[k].0, corners[k].1);
                    let pb = at(corners[(k + 1) % 4].0, corners[(k + 1) % 4].1);
                    cross.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                }
            }
            for pair in cross.chunks_exact(2) {
                let (x0, y0) = frame.map(&pair[0]);
                let (x1, y1) = frame.map(&pair[1]);
                let _ = write!(d, "M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}");
            }
        }
    }
    d
}

/// Region, nullclines, sample orbits, saddle branches, cycles and
/// equilibria, drawn in that order.
pub fn render_portrait(field: &VectorField, region: &Region, fs: &FlowStructure, opts: &PortraitOptions) -> String {
    let frame = Frame::new(region);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {:.2} {:.2}" width="{:.0}" height="{:.0}">"##,
        WIDTH, frame.height, WIDTH, frame.height
    );
    let _ = writeln!(s, "<title>{}</title>", field.name());
    let _ = writeln!(s, r##"<rect class="background" x="0" y="0" width="{WIDTH:.2}" height="{:.2}" fill="white"/>"##, frame.height);

    if let Some(n) = opts.basins {
        let map = basin_map(field, region, fs, n);
        let (lo, hi) = region.bbox();
        let cw = (hi[0] - lo[0]) / map.nx as f64 * frame.scale;
        let ch = if map.ny == 1 {
            0.2 * (hi[0] - lo[0]) * frame.scale
        } else {
            (hi[1] - lo[1]) / map.ny as f64 * frame.scale
        };
        for (_, _, p, label) in &map.cells {
            if *label < 0 {
                continue;
            }
            let (x, y) = frame.map(p);
            let _ = writeln!(
                s,
                r##"<rect class="basin basin-{label}" x="{:.2}" y="{:.2}" width="{cw:.2}" height="{ch:.2}" fill="{}" fill-opacity="0.25"/>"##,
                x - cw / 2.0,
                y - ch / 2.0,
                PALETTE[*label as usize % PALETTE.len()]
            );
        }
    }

    match &region.shape {
        Shape::Polygon(v) => {
            let _ = writeln!(
                s,
                r##"<polygon class="region" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"##,
                frame.points(v)
            );
        }
        Shape::Interval { lo, hi } => {
            let _ = writeln!(
                s,
                r##"<polyline class="region" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"##,
                frame.points(&[[*lo, 0.0], [*hi, 0.0]])
            );
        }
    }

    if opts.nullclines && fs.dim == 2 {
        for k in 0..2 {
            let d = contour(&frame, 256, |p| field.eval(p).ok().map(|f| f[k]));
            let _ = writeln!(
                s,
                r##"<path class="nullcline nullcline-{k}" d="{d}" fill="none" stroke="{}" stroke-width="0.8" stroke-dasharray="4 3"/>"##,
                if k == 0 { "#888" } else { "#bbb" }
            );
        }
    }

    if opts.trajectories > 0 {
        let targets = fs.targets(field, region);
        let n = opts.trajectories;
        let starts: Vec<State> = if region.dim() == 1 {
            // the boundary of an interval is two points, so spread starts inside
            let (lo, hi) = region.bbox();
            (0..n).map(|k| [lo[0] + (k as f64 + 0.5) / n as f64 * (hi[0] - lo[0]), 0.0]).collect()
        } else {
            let samples = region.boundary_samples(n);
            let step = (samples.len() as f64 / n as f64).max(1.0);
            (0..n.min(samples.len())).map(|k| samples[(k as f64 * step) as usize].point).collect()
        };
        for start in starts {
            let pts = targets.orbit(start);
            let _ = writeln!(
                s,
                r##"<polyline class="trajectory" points="{}" fill="none" stroke="#333" stroke-width="0.7"/>"##,
                frame.points(&pts)
            );
        }
    }

    for b in &fs.branches {
        let pts: Vec<State> = b.path.iter().map(|p| p.1).collect();
        let class = match b.kind {
            BranchKind::Stable => "separatrix",
            BranchKind::Unstable => "unstable-branch",
        };
        let colour = if b.kind == BranchKind::Stable { "#d62728" } else { "#2ca02c" };
        let _ = writeln!(
            s,
            r##"<polyline class="{class}" points="{}" fill="none" stroke="{colour}" stroke-width="1.6"/>"##,
            frame.points(&pts)
        );
    }
    for c in &fs.cycles {
        let mut pts = c.points.clone();
        pts.push(pts[0]);
        let _ = writeln!(
            s,
            r##"<polyline class="cycle" points="{}" fill="none" stroke="#9467bd" stroke-width="2"/>"##,
            frame.points(&pts)
        );
    }
    for e in &fs.equilibria {
        let (x, y) = frame.map(&e.point);
        let fill = if e.class.is_attractor() { "black" } else { "white" };
        let _ = writeln!(
            s,
            r##"<circle class="equilibrium {}" cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}" stroke="black"/>"##,
            e.class.name()
        );
    }
    s.push_str("</svg>\n");
    s
}
