//! Deterministic SVG rendering of partitions and field assignments.
//!
//! Write-only reporting: fills per region, interfaces as strokes, and one
//! arrow triple per cell showing the paired fields. Output is byte-stable
//! for fixed input — floats are printed with fixed precision and every
//! iteration order is the storage order.

use crate::geometry::Polygon;
use crate::partitions::{FieldAssignment, PartitionSpec};
use crate::scalar::Scalar;

const VERSION_HEADER: &str = "<!-- netcalib figure v1 -->";
const REGION_FILLS: [&str; 3] = ["#dbe7f6", "#f6dbdb", "#dcf0dc"];
const PAIR_STROKES: [&str; 3] = ["#1f5fbf", "#bf1f1f", "#1f7f2f"];

type Ring = Vec<(f64, f64)>;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    pad: f64,
}

impl Frame {
    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        (
            (p.0 - self.min_x) * self.scale + self.pad,
            (self.max_y - p.1) * self.scale + self.pad,
        )
    }
}

fn ring_f64<S: Scalar>(ring: &[crate::geometry::Point2<S>]) -> Ring {
    ring.iter()
        .map(|p| {
            let p = p.to_f64();
            (p.x, p.y)
        })
        .collect()
}

fn path_data(frame: &Frame, poly: &Polygon<f64>) -> String {
    let mut d = String::new();
    let mut ring_path = |ring: &[crate::geometry::Point2<f64>]| {
        for (i, p) in ring.iter().enumerate() {
            let (x, y) = frame.map((p.x, p.y));
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{x:.4} {y:.4} "));
        }
        d.push_str("Z ");
    };
    ring_path(&poly.outer);
    for hole in &poly.holes {
        ring_path(hole);
    }
    d.trim_end().to_string()
}

fn to_f64_polygon<S: Scalar>(poly: &Polygon<S>) -> Polygon<f64> {
    Polygon {
        outer: ring_f64(&poly.outer)
            .into_iter()
            .map(|(x, y)| crate::geometry::Point2::new(x, y))
            .collect(),
        holes: poly
            .holes
            .iter()
            .map(|h| {
                ring_f64(h)
                    .into_iter()
                    .map(|(x, y)| crate::geometry::Point2::new(x, y))
                    .collect()
            })
            .collect(),
    }
}

fn bbox(rings: &[Ring]) -> (f64, f64, f64, f64) {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for ring in rings {
        for &(x, y) in ring {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
    }
    (min_x, min_y, max_x, max_y)
}

fn arrow(out: &mut String, frame: &Frame, base: (f64, f64), dir: (f64, f64), len: f64, color: &str) {
    let n = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
    if n < 1e-12 {
        return;
    }
    let d = (dir.0 / n, dir.1 / n);
    let tip = (base.0 + d.0 * len, base.1 + d.1 * len);
    let perp = (-d.1, d.0);
    let b1 = (
        tip.0 - 0.25 * len * d.0 + 0.12 * len * perp.0,
        tip.1 - 0.25 * len * d.1 + 0.12 * len * perp.1,
    );
    let b2 = (
        tip.0 - 0.25 * len * d.0 - 0.12 * len * perp.0,
        tip.1 - 0.25 * len * d.1 - 0.12 * len * perp.1,
    );
    let (x1, y1) = frame.map(base);
    let (x2, y2) = frame.map(tip);
    let (hx1, hy1) = frame.map(b1);
    let (hx2, hy2) = frame.map(b2);
    out.push_str(&format!(
        "<line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
    ));
    out.push_str(&format!(
        "<polygon points=\"{x2:.4},{y2:.4} {hx1:.4},{hy1:.4} {hx2:.4},{hy2:.4}\" fill=\"{color}\"/>\n"
    ));
}

fn render_spec_group<S: Scalar>(
    out: &mut String,
    frame: &Frame,
    spec: &PartitionSpec<S>,
    fields: Option<&FieldAssignment<S>>,
) {
    for (color, region) in spec.regions.iter().enumerate() {
        for poly in region {
            let poly = to_f64_polygon(poly);
            out.push_str(&format!(
                "<path d=\"{}\" fill=\"{}\" fill-rule=\"evenodd\" stroke=\"none\"/>\n",
                path_data(frame, &poly),
                REGION_FILLS[color]
            ));
        }
    }
    let omega = to_f64_polygon(&spec.omega);
    out.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
        path_data(frame, &omega)
    ));
    for itf in &spec.interfaces {
        let a = itf.segment.a.to_f64();
        let b = itf.segment.b.to_f64();
        let (x1, y1) = frame.map((a.x, a.y));
        let (x2, y2) = frame.map((b.x, b.y));
        out.push_str(&format!(
            "<line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"#111111\" stroke-width=\"1.6\"/>\n"
        ));
    }
    let Some(assignment) = fields else {
        return;
    };
    for (face, psi) in assignment.cells.faces.iter().zip(&assignment.fields) {
        let Some(psi) = psi else { continue };
        let ring = ring_f64(&face.polygon.outer);
        let n = ring.len() as f64;
        let cx = ring.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = ring.iter().map(|p| p.1).sum::<f64>() / n;
        let area: f64 = to_f64_polygon(&face.polygon).area().abs();
        let len = 0.35 * area.sqrt();
        for (k, v) in psi.iter().enumerate() {
            let v = (v.x.to_f64(), v.y.to_f64());
            arrow(out, frame, (cx, cy), v, len, PAIR_STROKES[k]);
        }
    }
}

fn document(frames: Vec<(Frame, f64, f64)>, body: String) -> String {
    let width: f64 = frames.iter().map(|f| f.1).fold(0.0, f64::max);
    let height: f64 = frames.iter().map(|f| f.2).fold(0.0, f64::max);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n{VERSION_HEADER}\n{body}</svg>\n"
    )
}

fn frame_for(rings: &[Ring], target: f64, pad: f64, x_shift: f64) -> (Frame, f64, f64) {
    let (min_x, min_y, max_x, max_y) = bbox(rings);
    let w = (max_x - min_x).max(1e-9);
    let h = (max_y - min_y).max(1e-9);
    let scale = target / w.max(h);
    let frame = Frame {
        min_x: min_x - x_shift / scale,
        max_y,
        scale,
        pad,
    };
    (frame, w * scale + 2.0 * pad + x_shift, h * scale + 2.0 * pad)
}

/// Render one partition with optional field arrows.
pub fn render_partition<S: Scalar>(
    spec: &PartitionSpec<S>,
    fields: Option<&FieldAssignment<S>>,
) -> String {
    let rings: Vec<Ring> = std::iter::once(ring_f64(&spec.omega.outer))
        .chain(spec.omega.holes.iter().map(|h| ring_f64(h)))
        .collect();
    let (frame, w, h) = frame_for(&rings, 560.0, 20.0, 0.0);
    let mut body = String::new();
    render_spec_group(&mut body, &frame, spec, fields);
    document(vec![(frame, w, h)], body)
}

/// Render the fattened tree next to its taller-join competitor.
pub fn render_pair<S: Scalar>(
    left: &PartitionSpec<S>,
    right: &PartitionSpec<S>,
) -> String {
    let rings_l: Vec<Ring> = std::iter::once(ring_f64(&left.omega.outer))
        .chain(left.omega.holes.iter().map(|h| ring_f64(h)))
        .collect();
    let (frame_l, w_l, h_l) = frame_for(&rings_l, 360.0, 20.0, 0.0);
    let rings_r: Vec<Ring> = std::iter::once(ring_f64(&right.omega.outer))
        .chain(right.omega.holes.iter().map(|h| ring_f64(h)))
        .collect();
    let (frame_r, w_r, h_r) = frame_for(&rings_r, 360.0, 20.0, w_l);
    let mut body = String::new();
    render_spec_group(&mut body, &frame_l, left, None);
    render_spec_group(&mut body, &frame_r, right, None);
    document(vec![(frame_l, w_l, h_l), (frame_r, w_r + w_l, h_r)], body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ToleranceConfig;
    use crate::network::{Edge, Network};
    use crate::offset::polygon_offset_network;
    use crate::partitions::{
        assign_fields, build_partition_spec, counterexample_specs, three_color_faces,
    };

    fn tripod() -> Network<f64> {
        let r3 = 3f64.sqrt();
        let points = vec![
            crate::geometry::Point2::new(0.0, 0.0),
            crate::geometry::Point2::new(2.0, 0.0),
            crate::geometry::Point2::new(-1.0, r3),
            crate::geometry::Point2::new(-1.0, -r3),
        ];
        let edges = vec![
            Edge::straight(0, 1),
            Edge::straight(0, 2),
            Edge::straight(0, 3),
        ];
        Network::new(points, edges).unwrap()
    }

    #[test]
    fn partition_figure_is_deterministic() {
        let tol = ToleranceConfig::float_default();
        let net = tripod();
        let omega = polygon_offset_network(&net, &0.2, &tol).unwrap();
        let colored = three_color_faces(&net, &omega, &tol).unwrap();
        let spec = build_partition_spec(&omega, &colored).unwrap();
        let fields = assign_fields(&net, &omega, &colored, &tol).unwrap();
        let a = render_partition(&spec, Some(&fields));
        let b = render_partition(&spec, Some(&fields));
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("netcalib figure v1"));
        // Three region fills and at least one arrow head per assigned cell.
        for fill in REGION_FILLS {
            assert!(a.contains(fill), "{fill} missing");
        }
        assert!(a.contains("<polygon points="));
    }

    #[test]
    fn pair_figure_places_both_partitions() {
        let tol = ToleranceConfig::float_default();
        let (e, f, _, _) = counterexample_specs(&1.0, &2.0, &0.6, &0.7, &tol).unwrap();
        let svg = render_pair(&e, &f);
        assert_eq!(svg, render_pair(&e, &f));
        // Both tubes outline their Ω with the neutral stroke.
        assert!(svg.matches("stroke=\"#444444\"").count() == 2);
    }
}
