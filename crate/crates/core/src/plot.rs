//! Static SVG drawings of complexes in dimension ≤ 2, or of a planar projection.
//!
//! Unbounded cells are cut at a bounding box that is recorded in the output; rays leaving
//! the box end in an arrow.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::complex::PolyhedralComplex;
use crate::num::Rat;
use crate::pwa::FacewiseAffine;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlotError {
    #[error("a complex in dimension {0} needs an explicit projection")]
    NeedsProjection(usize),
    #[error("projection axis {axis} is out of range for dimension {dim}")]
    BadAxis { axis: usize, dim: usize },
}

/// A linear map to the plane, given by its two rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub rows: [Vec<f64>; 2],
}

impl Projection {
    /// The default for `n ≤ 3`: the identity in the plane, `x ↦ (x, 0)` on the line, and an
    /// oblique view in space.
    pub fn default_for(n: usize) -> Result<Projection, PlotError> {
        let rows = match n {
            0 => [vec![], vec![]],
            1 => [vec![1.0], vec![0.0]],
            2 => [vec![1.0, 0.0], vec![0.0, 1.0]],
            3 => [vec![1.0, 0.0, -0.5], vec![0.0, 1.0, -0.5]],
            _ => return Err(PlotError::NeedsProjection(n)),
        };
        Ok(Projection { rows })
    }

    /// Coordinate projection onto axes `i` and `j`.
    pub fn axes(n: usize, i: usize, j: usize) -> Result<Projection, PlotError> {
        for axis in [i, j] {
            if axis >= n {
                return Err(PlotError::BadAxis { axis, dim: n });
            }
        }
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        a[i] = 1.0;
        b[j] = 1.0;
        Ok(Projection { rows: [a, b] })
    }

    fn apply(&self, v: &[f64]) -> P {
        let dot = |r: &[f64]| r.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        P(dot(&self.rows[0]), dot(&self.rows[1]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct P(f64, f64);

fn f(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

struct Shape {
    cell: usize,
    dim: usize,
    vertices: Vec<P>,
    dirs: Vec<P>,
}

#[derive(Clone, Copy, Debug)]
struct BBox {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl BBox {
    fn contains(&self, p: P) -> bool {
        let e = 1e-9;
        p.0 >= self.x0 - e && p.0 <= self.x1 + e && p.1 >= self.y0 - e && p.1 <= self.y1 + e
    }

    /// The largest `t` with `p + t·d` in the box, for `p` inside.
    fn exit(&self, p: P, d: P) -> f64 {
        let mut t = f64::INFINITY;
        if d.0 > 0.0 {
            t = t.min((self.x1 - p.0) / d.0);
        } else if d.0 < 0.0 {
            t = t.min((self.x0 - p.0) / d.0);
        }
        if d.1 > 0.0 {
            t = t.min((self.y1 - p.1) / d.1);
        } else if d.1 < 0.0 {
            t = t.min((self.y0 - p.1) / d.1);
        }
        t.max(0.0)
    }

    fn diagonal(&self) -> f64 {
        ((self.x1 - self.x0).powi(2) + (self.y1 - self.y0).powi(2)).sqrt()
    }
}

fn cross(o: P, a: P, b: P) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn hull(mut pts: Vec<P>) -> Vec<P> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<P> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Sutherland–Hodgman against the four sides of the box.
fn clip(poly: &[P], b: &BBox) -> Vec<P> {
    let sides: [fn(P, &BBox) -> f64; 4] =
        [|p, b| p.0 - b.x0, |p, b| b.x1 - p.0, |p, b| p.1 - b.y0, |p, b| b.y1 - p.1];
    let mut out = poly.to_vec();
    for side in sides {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        for k in 0..input.len() {
            let cur = input[k];
            let prev = input[(k + input.len() - 1) % input.len()];
            let (dc, dp) = (side(cur, b), side(prev, b));
            if dc >= 0.0 {
                if dp < 0.0 {
                    out.push(lerp(prev, cur, dp / (dp - dc)));
                }
                out.push(cur);
            } else if dp >= 0.0 {
                out.push(lerp(prev, cur, dp / (dp - dc)));
            }
        }
    }
    out
}

fn lerp(a: P, b: P, t: f64) -> P {
    P(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

fn norm(d: P) -> Option<P> {
    let l = (d.0 * d.0 + d.1 * d.1).sqrt();
    (l > 1e-12).then(|| P(d.0 / l, d.1 / l))
}

fn shapes(c: &PolyhedralComplex, proj: &Projection) -> Vec<Shape> {
    let mut out = Vec::new();
    for i in 0..c.len() {
        let v = match c.cell(i).vrep() {
            Some(v) => v,
            None => continue,
        };
        let vertices = v.vertices.iter().map(|x| proj.apply(&x.iter().map(f).collect::<Vec<_>>())).collect();
        let mut dirs: Vec<P> = Vec::new();
        let to_f = |r: &[crate::num::Int]| r.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect::<Vec<_>>();
        for r in &v.rays {
            dirs.extend(norm(proj.apply(&to_f(r))));
        }
        for l in &v.lineality {
            if let Some(d) = norm(proj.apply(&to_f(l))) {
                dirs.push(d);
                dirs.push(P(-d.0, -d.1));
            }
        }
        out.push(Shape { cell: i, dim: c.cell_dim(i), vertices, dirs });
    }
    out
}

fn bounding_box(shapes: &[Shape]) -> BBox {
    let pts: Vec<P> = shapes.iter().flat_map(|s| s.vertices.iter().copied()).collect();
    let unbounded = shapes.iter().any(|s| !s.dirs.is_empty());
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(p) = pts.first() {
        (x0, y0, x1, y1) = (p.0, p.1, p.0, p.1);
    }
    for p in &pts {
        x0 = x0.min(p.0);
        y0 = y0.min(p.1);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    let span = (x1 - x0).max(y1 - y0).max(1.0);
    let pad = if unbounded { 0.5 * span } else { 0.1 * span };
    BBox { x0: x0 - pad, y0: y0 - pad, x1: x1 + pad, y1: y1 + pad }
}

const PALETTE: [&str; 8] = ["#dbe9f6", "#fde2c8", "#d9f0d3", "#f3d6e8", "#fff2b3", "#e0dcf2", "#d4efef", "#f6dcd4"];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `complex`, labeling each maximal cell with the form of `function` when given.
pub fn render_svg(
    complex: &PolyhedralComplex,
    function: Option<&FacewiseAffine>,
    projection: Option<&Projection>,
) -> Result<String, PlotError> {
    let proj = match projection {
        Some(p) => p.clone(),
        None => Projection::default_for(complex.dim())?,
    };
    let drawn = shapes(complex, &proj);
    let bb = bounding_box(&drawn);
    let far = 4.0 * bb.diagonal();
    let size = 480.0;
    let scale = size / (bb.x1 - bb.x0).max(bb.y1 - bb.y0);
    let width = (bb.x1 - bb.x0) * scale;
    let height = (bb.y1 - bb.y0) * scale;
    let sx = |p: P| ((p.0 - bb.x0) * scale, (bb.y1 - p.1) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        width, height, width, height
    );
    let _ = writeln!(svg, "<desc>bounding box [{:.3}, {:.3}] x [{:.3}, {:.3}]</desc>", bb.x0, bb.x1, bb.y0, bb.y1);
    svg.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" \
         orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n",
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{:.1}" height="{:.1}" fill="none" stroke="#bbb" stroke-dasharray="4 3"/>"##,
        width, height
    );

    let region = |s: &Shape| -> Vec<P> {
        let mut pts = s.vertices.clone();
        for v in &s.vertices {
            for d in &s.dirs {
                pts.push(P(v.0 + far * d.0, v.1 + far * d.1));
            }
        }
        clip(&hull(pts), &bb)
    };

    let mut labels = Vec::new();
    for s in drawn.iter().filter(|s| s.dim == 2) {
        let poly = region(s);
        if poly.len() < 3 {
            continue;
        }
        let pts: Vec<String> = poly.iter().map(|&p| {
            let (x, y) = sx(p);
            format!("{x:.2},{y:.2}")
        }).collect();
        let _ = writeln!(
            svg,
            r##"<polygon data-cell="{}" points="{}" fill="{}" stroke="none"/>"##,
            s.cell,
            pts.join(" "),
            PALETTE[s.cell % PALETTE.len()]
        );
    }
    for s in drawn.iter().filter(|s| s.dim == 1) {
        let (a, b, arrow_a, arrow_b) = match (s.vertices.len(), s.dirs.len()) {
            (2, _) => (s.vertices[0], s.vertices[1], false, false),
            (1, 1) => {
                let t = bb.exit(s.vertices[0], s.dirs[0]);
                let end = P(s.vertices[0].0 + t * s.dirs[0].0, s.vertices[0].1 + t * s.dirs[0].1);
                (s.vertices[0], end, false, true)
            }
            (1, 2) => {
                let v = s.vertices[0];
                let t0 = bb.exit(v, s.dirs[0]);
                let t1 = bb.exit(v, s.dirs[1]);
                (P(v.0 + t1 * s.dirs[1].0, v.1 + t1 * s.dirs[1].1), P(v.0 + t0 * s.dirs[0].0, v.1 + t0 * s.dirs[0].1), true, true)
            }
            _ => continue,
        };
        if !bb.contains(a) {
            continue;
        }
        let ((x1, y1), (x2, y2)) = (sx(a), sx(b));
        let _ = writeln!(
            svg,
            r##"<line data-cell="{}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#333" stroke-width="1.5"{}{}/>"##,
            s.cell,
            if arrow_a { r#" marker-start="url(#arrow)""# } else { "" },
            if arrow_b { r#" marker-end="url(#arrow)""# } else { "" },
        );
    }
    for s in drawn.iter().filter(|s| s.dim == 0) {
        let (x, y) = sx(s.vertices[0]);
        let _ = writeln!(svg, r##"<circle data-cell="{}" cx="{x:.2}" cy="{y:.2}" r="3" fill="#111"/>"##, s.cell);
    }
    if let Some(func) = function {
        for s in shapes(func.complex(), &proj) {
            if func.complex().maximal_cells().contains(&s.cell) {
                labels.push((region(&s), s.vertices.clone(), func.form(s.cell).to_string()));
            }
        }
    }
    for (poly, vertices, text) in labels {
        let pts = if poly.is_empty() { vertices } else { poly };
        if pts.is_empty() {
            continue;
        }
        let k = pts.len() as f64;
        let c = P(pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let (x, y) = sx(c);
        let _ = writeln!(
            svg,
            r##"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="12" text-anchor="middle" fill="#000">{}</text>"##,
            xml_escape(&text)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::poly::Polyhedron;
    use crate::trop::AffineForm;

    fn square() -> PolyhedralComplex {
        let x = AffineForm::var(2, 0);
        let y = AffineForm::var(2, 1);
        let one = AffineForm::constant(2, rat(1));
        let p = Polyhedron::new(2, vec![x.clone(), y.clone(), one.sub(&x), one.sub(&y)], vec![]);
        PolyhedralComplex::new(2, vec![p], true).unwrap()
    }

    #[test]
    fn square_with_labels() {
        let c = square();
        let f = FacewiseAffine::affine(c.clone(), AffineForm::from_ints(&[2, -1], rat(3))).unwrap();
        let svg = render_svg(&c, Some(&f), None).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<line").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains("<text"));
        assert_eq!(svg, render_svg(&c, Some(&f), None).unwrap());
    }

    #[test]
    fn rays_get_arrows() {
        let h = Polyhedron::new(2, vec![AffineForm::var(2, 0)], vec![]);
        let c = PolyhedralComplex::new(2, vec![h], true).unwrap();
        let svg = render_svg(&c, None, None).unwrap();
        assert!(svg.contains("marker-start") && svg.contains("marker-end"));
    }

    #[test]
    fn high_dimension_needs_projection() {
        let c = PolyhedralComplex::new(4, vec![Polyhedron::point(&vec![rat(0); 4])], true).unwrap();
        assert_eq!(render_svg(&c, None, None), Err(PlotError::NeedsProjection(4)));
        let p = Projection::axes(4, 0, 3).unwrap();
        assert!(render_svg(&c, None, Some(&p)).is_ok());
    }
}
