//! SVG rendering of dissections, facets, and serpent nests.
//!
//! Vertex `v` sits on a circle at angle `-2*pi*(v-1)/(2n) + pi/2`, so label 1
//! is at the top and labels increase clockwise. Hollow points are drawn as
//! red outlines, solid points as filled blue dots. Serpents are polylines
//! through the midpoints of their edges' chords, routed via the barycenters
//! of the cells they pass through.

use std::fmt::Write;

use crate::complex::AccordionDissection;
use crate::dissection::{Cell, HollowDissection};
use crate::serpent::{Serpent, SerpentNest};

#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub size: f64,
    pub margin: f64,
    pub point_radius: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { size: 400.0, margin: 30.0, point_radius: 5.0 }
    }
}

impl RenderSpec {
    fn point(&self, v: u32, n: u32) -> (f64, f64) {
        let theta = std::f64::consts::FRAC_PI_2
            - 2.0 * std::f64::consts::PI * f64::from(v - 1) / f64::from(2 * n);
        let c = self.size / 2.0;
        let r = c - self.margin;
        (c + r * theta.cos(), c - r * theta.sin())
    }
}

fn fmt_pt((x, y): (f64, f64)) -> String {
    format!("{x:.2},{y:.2}")
}

fn barycenter(cell: &Cell, spec: &RenderSpec, n: u32) -> (f64, f64) {
    let pts: Vec<_> = cell.vertices.iter().map(|&v| spec.point(v, n)).collect();
    let k = pts.len() as f64;
    (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k)
}

fn serpent_polyline(s: &Serpent, d: &HollowDissection, spec: &RenderSpec) -> Vec<(f64, f64)> {
    let edges = s.edges();
    let tree = d.dual_tree();
    // cell sequence along the dual path: the off-side cell of the first
    // edge, then the cell shared by each consecutive edge pair, then the
    // off-side cell of the last edge
    let mut cells = Vec::with_capacity(edges.len() + 1);
    for w in edges.windows(2) {
        let (a1, b1) = tree.cells_of(&w[0]);
        let (a2, b2) = tree.cells_of(&w[1]);
        let shared = if a1 == a2 || a1 == b2 { a1 } else { b1 };
        cells.push(shared);
    }
    let (a, b) = tree.cells_of(&edges[0]);
    cells.insert(0, if cells.first() == Some(&a) { b } else { a });
    let (a, b) = tree.cells_of(&edges[edges.len() - 1]);
    cells.push(if cells.last() == Some(&a) { b } else { a });

    let mid = |e: &crate::diag::Diagonal| {
        let p = spec.point(e.a, d.n);
        let q = spec.point(e.b, d.n);
        ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0)
    };
    let mut pts = vec![barycenter(&d.cells()[cells[0]], spec, d.n)];
    for (i, e) in edges.iter().enumerate() {
        pts.push(mid(e));
        pts.push(barycenter(&d.cells()[cells[i + 1]], spec, d.n));
    }
    pts
}

const SERPENT_COLORS: [&str; 6] =
    ["#2a9d8f", "#e76f51", "#8338ec", "#b5852a", "#d62828", "#457b9d"];

pub fn render(
    d: &HollowDissection,
    facet: Option<&AccordionDissection>,
    nest: Option<&SerpentNest>,
    spec: &RenderSpec,
) -> String {
    let n = d.n;
    let mut svg = String::new();
    let s = spec.size;
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s:.0}" height="{s:.0}" viewBox="0 0 {s:.0} {s:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{s:.0}" height="{s:.0}" fill="white"/>"#);

    for e in crate::diag::hollow_boundary_edges(n) {
        let p = spec.point(e.a, n);
        let q = spec.point(e.b, n);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ccc" stroke-width="1"/>"##,
            p.0, p.1, q.0, q.1
        );
    }
    for e in &d.diagonals {
        let p = spec.point(e.a, n);
        let q = spec.point(e.b, n);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="1.5"/>"#,
            p.0, p.1, q.0, q.1
        );
    }
    if let Some(f) = facet {
        for e in &f.diagonals {
            let p = spec.point(e.a, n);
            let q = spec.point(e.b, n);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="blue" stroke-width="1.5"/>"#,
                p.0, p.1, q.0, q.1
            );
        }
    }
    if let Some(nest) = nest {
        for (i, serp) in nest.serpents.iter().enumerate() {
            let pts: Vec<String> =
                serpent_polyline(serp, d, spec).into_iter().map(fmt_pt).collect();
            let color = SERPENT_COLORS[i % SERPENT_COLORS.len()];
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
        }
    }
    for v in 1..=2 * n {
        let (x, y) = spec.point(v, n);
        let r = spec.point_radius;
        if crate::diag::is_hollow(v) {
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="white" stroke="red" stroke-width="1.5"/>"#
            );
        } else {
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="blue"/>"#);
        }
    }
    svg.push_str("</svg>\n");
    svg
}
