//! Tube neighborhoods of a network: the polygon at fixed orthogonal
//! distance `delta` from the edges, with mitered corners at junctions and
//! flat caps through the endpoints.
//!
//! The outline is built by walking every face of the network's planar
//! embedding and offsetting each walk to its left. The walk around the
//! unbounded face gives the outer ring; walks around bounded network cycles
//! give the holes, so a closed loop of edges produces an annulus. A face
//! walk reverses through degree-1 vertices, which is exactly where the flat
//! caps appear.
//!
//! The checked entry point enforces `delta < (√3/8)·d` for the shortest
//! edge length `d`: below that bound the mitered tube around a triple
//! junction cannot self-intersect, so the outline is a simple polygon.

use crate::error::{CoreError, Result};
use crate::geometry::{
    ccw_angle_cmp, line_intersection, vector_norm, Point2, Polygon, ToleranceConfig, Vector2,
};
use crate::network::Network;
use crate::scalar::Scalar;

/// Straight pieces of the network with `via` points promoted to vertices.
struct FlatGraph<S> {
    points: Vec<Point2<S>>,
    pieces: Vec<(usize, usize)>,
}

impl<S: Scalar> FlatGraph<S> {
    fn build(net: &Network<S>) -> Result<Self> {
        let mut points = net.points.clone();
        let mut pieces = Vec::new();
        for edge in &net.edges {
            let mut prev = edge.from;
            for p in &edge.via {
                points.push(p.clone());
                let v = points.len() - 1;
                pieces.push((prev, v));
                prev = v;
            }
            pieces.push((prev, edge.to));
        }
        for &(a, b) in &pieces {
            if points[a].to(&points[b]).norm_sq().is_zero() {
                return Err(CoreError::InvalidGeometry(
                    "network contains a zero-length piece".into(),
                ));
            }
        }
        Ok(FlatGraph { points, pieces })
    }

    fn origin(&self, h: usize) -> usize {
        let (a, b) = self.pieces[h / 2];
        if h % 2 == 0 {
            a
        } else {
            b
        }
    }

    fn target(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    fn direction(&self, h: usize) -> Vector2<S> {
        self.points[self.origin(h)].to(&self.points[self.target(h)])
    }

    /// Unit left normal scaled by `delta`.
    fn left_offset(&self, h: usize, delta: &S) -> Result<Vector2<S>> {
        let d = self.direction(h);
        let len = vector_norm(&d)?;
        Ok(d.rot90().scale(&(delta.clone() / len)))
    }
}

/// Tube outline with the safety threshold enforced.
pub fn polygon_offset_network<S: Scalar>(
    net: &Network<S>,
    delta: &S,
    tol: &ToleranceConfig<S>,
) -> Result<Polygon<S>> {
    let mut shortest: Option<S> = None;
    for e in 0..net.edges.len() {
        let l = net.edge_length(e)?;
        shortest = Some(match shortest {
            None => l,
            Some(cur) => cur.min_val(l),
        });
    }
    let d = shortest.ok_or_else(|| CoreError::InvalidInput("network has no edges".into()))?;
    let bound = S::sqrt3() * d / S::from_int(8);
    if !(delta.clone() < bound.clone()) {
        return Err(CoreError::ThresholdViolation(format!(
            "tube half-width {} must stay below (√3/8)·(shortest edge) = {}",
            delta.to_f64(),
            bound.to_f64()
        )));
    }
    polygon_offset_network_unchecked(net, delta, tol)
}

/// Tube outline without the width threshold. Callers take responsibility
/// for the outline staying simple.
pub fn polygon_offset_network_unchecked<S: Scalar>(
    net: &Network<S>,
    delta: &S,
    tol: &ToleranceConfig<S>,
) -> Result<Polygon<S>> {
    if delta.is_zero() || delta.is_negative() {
        return Err(CoreError::InvalidInput(
            "tube half-width must be positive".into(),
        ));
    }
    if !net.is_connected() {
        return Err(CoreError::InvalidInput(
            "tube outline requires a connected network".into(),
        ));
    }
    let flat = FlatGraph::build(net)?;
    let nh = 2 * flat.pieces.len();

    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); flat.points.len()];
    for h in 0..nh {
        outgoing[flat.origin(h)].push(h);
    }
    for list in &mut outgoing {
        list.sort_by(|&x, &y| ccw_angle_cmp(&flat.direction(x), &flat.direction(y)));
    }
    let next = |h: usize| -> usize {
        let list = &outgoing[flat.target(h)];
        let idx = list
            .iter()
            .position(|&x| x == (h ^ 1))
            .expect("twin present in outgoing list");
        list[(idx + list.len() - 1) % list.len()]
    };

    // Angular near-parallel guard for the float model; exact scalars use
    // the exact zero test inside line_intersection.
    let straight_through = |d1: &Vector2<S>, d2: &Vector2<S>| -> bool {
        let c = d1.cross(d2);
        let gate = tol.eps_angle.clone() * tol.eps_angle.clone() * d1.norm_sq() * d2.norm_sq();
        c.clone() * c <= gate
    };

    let mut visited = vec![false; nh];
    let mut rings: Vec<(f64, Vec<Point2<S>>)> = Vec::new();
    for h0 in 0..nh {
        if visited[h0] {
            continue;
        }
        let mut halves = Vec::new();
        let mut h = h0;
        loop {
            visited[h] = true;
            halves.push(h);
            h = next(h);
            if h == h0 {
                break;
            }
        }
        let mut ring: Vec<Point2<S>> = Vec::new();
        let m = halves.len();
        for k in 0..m {
            let h = halves[k];
            let h2 = halves[(k + 1) % m];
            let v = &flat.points[flat.target(h)];
            let off1 = flat.left_offset(h, delta)?;
            if h2 == (h ^ 1) {
                // Dead end: flat cap through the tip.
                ring.push(v.add(&off1));
                ring.push(v.add(&flat.left_offset(h2, delta)?));
            } else {
                let d1 = flat.direction(h);
                let d2 = flat.direction(h2);
                if straight_through(&d1, &d2) {
                    ring.push(v.add(&off1));
                } else {
                    let p1 = flat.points[flat.origin(h)].add(&off1);
                    let p2 = flat.points[flat.origin(h2)].add(&flat.left_offset(h2, delta)?);
                    let miter = line_intersection(&p1, &d1, &p2, &d2).ok_or_else(|| {
                        CoreError::InvalidGeometry(
                            "offset lines of a corner are parallel".into(),
                        )
                    })?;
                    ring.push(miter);
                }
            }
        }
        let mut area2 = 0.0f64;
        for k in 0..ring.len() {
            let p = ring[k].to_f64();
            let q = ring[(k + 1) % ring.len()].to_f64();
            area2 += p.x * q.y - q.x * p.y;
        }
        rings.push((area2, ring));
    }

    // The walk around the unbounded face traces the outermost ring; it has
    // the largest magnitude of enclosed area. Everything else is a hole.
    let outer_idx = rings
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.abs().total_cmp(&b.1 .0.abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| CoreError::InvalidInput("network has no edges".into()))?;
    let mut outer = Vec::new();
    let mut holes = Vec::new();
    for (i, (_, ring)) in rings.into_iter().enumerate() {
        if i == outer_idx {
            outer = ring;
        } else {
            holes.push(ring);
        }
    }
    Polygon::new(outer, holes)
}
