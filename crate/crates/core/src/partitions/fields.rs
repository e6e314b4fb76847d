//! Construction of the piecewise-constant paired fields.
//!
//! The domain is cut into cells by two chords through the midpoint of every
//! junction–junction edge, each at 30° to the edge and spanning Ω. Every
//! cell then gets its three constant vectors from one local rule:
//!
//! - a cell containing a junction: for each of the three incident edges,
//!   the field of the color pair separated by that edge is the edge's unit
//!   normal oriented from the first color of the pair into the second —
//!   the three assignments sum to zero because the three edge directions
//!   do;
//! - a wedge cell at a chord crossing (no junction, probed from the edge
//!   midpoint): the edge's own pair keeps its interface normal, the pair
//!   not involving the wedge's ambient color is zero, and the third is
//!   forced by the zero-sum constraint;
//! - a junctionless cell crossed by a single edge keeps that edge's pair
//!   normal, zeroes the next pair in cyclic order, and forces the third;
//!   a cell touching no edge gets all-zero fields.
//!
//! No global propagation is involved: the face coloring already fixes the
//! calibration gauge, and the verifier re-checks every consequence.

use crate::error::{CoreError, Result};
use crate::geometry::{Point2, Polygon, Segment, ToleranceConfig, Vector2};
use crate::network::Network;
use crate::planar::build_subdivision;
use crate::scalar::Scalar;

use super::{pair_index, ColoredFaces, FieldAssignment, PAIRS};

pub fn assign_fields<S: Scalar>(
    net: &Network<S>,
    omega: &Polygon<S>,
    colored: &ColoredFaces<S>,
    tol: &ToleranceConfig<S>,
) -> Result<FieldAssignment<S>> {
    let degrees = net.degrees();
    let mut edge_pair: Vec<(u8, u8)> = Vec::with_capacity(net.edges.len());
    for e in 0..net.edges.len() {
        edge_pair.push(edge_colors(net, e, colored, tol)?);
    }

    // Chords through junction–junction edge midpoints, clipped to Ω.
    let boundary = omega.boundary_segments();
    let mut segments: Vec<(Segment<S>, usize)> = Vec::new();
    for s in &boundary {
        let id = segments.len();
        segments.push((s.clone(), id));
    }
    struct Chorded<S> {
        edge: usize,
        mid: Point2<S>,
        /// Unit left normal of the edge (relative to from→to).
        left: Vector2<S>,
    }
    let mut chorded: Vec<Chorded<S>> = Vec::new();
    let half = S::from_ratio(1, 2);
    let c30 = S::sqrt3() * half.clone();
    for (e, edge) in net.edges.iter().enumerate() {
        if degrees[edge.from] != 3 || degrees[edge.to] != 3 {
            continue;
        }
        let a = &net.points[edge.from];
        let b = &net.points[edge.to];
        let mid = a.midpoint(b);
        let u = a.to(b).unit().ok_or_else(|| {
            CoreError::ExactArithmetic(format!(
                "edge {e} direction has no representable unit vector"
            ))
        })?;
        for sign in [S::one(), -S::one()] {
            // Rotation of u by ±30°.
            let s30 = half.clone() * sign;
            let w = Vector2::new(
                u.x.clone() * c30.clone() - u.y.clone() * s30.clone(),
                u.x.clone() * s30 + u.y.clone() * c30.clone(),
            );
            let t_fwd = first_hit(&boundary, &mid, &w, tol).ok_or_else(|| {
                CoreError::InvalidGeometry(format!(
                    "chord through edge {e} midpoint does not reach the boundary"
                ))
            })?;
            let t_bwd = first_hit(&boundary, &mid, &w.neg(), tol).ok_or_else(|| {
                CoreError::InvalidGeometry(format!(
                    "chord through edge {e} midpoint does not reach the boundary"
                ))
            })?;
            let id = segments.len();
            segments.push((
                Segment::new(mid.add(&w.neg().scale(&t_bwd)), mid.add(&w.scale(&t_fwd))),
                id,
            ));
        }
        chorded.push(Chorded {
            edge: e,
            mid,
            left: u.rot90(),
        });
    }

    let cells = build_subdivision(&segments, tol)?;
    let inside = cells.faces_inside(omega, tol)?;
    let nf = cells.faces.len();
    let mut fields: Vec<Option<[Vector2<S>; 3]>> = vec![None; nf];

    // Junction cells.
    let inc = net.incidence();
    for v in 0..net.points.len() {
        if degrees[v] != 3 {
            continue;
        }
        let cell = cells.locate_face(&net.points[v], tol).ok_or_else(|| {
            CoreError::InconsistentAssignment(format!(
                "junction {v} is not interior to any cell"
            ))
        })?;
        if !inside[cell] {
            return Err(CoreError::InconsistentAssignment(format!(
                "junction {v} lies in a cell outside Ω"
            )));
        }
        if fields[cell].is_some() {
            return Err(CoreError::InconsistentAssignment(format!(
                "junction {v} shares a cell with another junction"
            )));
        }
        let mut psi = [Vector2::zero(), Vector2::zero(), Vector2::zero()];
        let mut got = [false; 3];
        for &(e, is_from) in &inc[v] {
            let (cl, cr) = edge_pair[e];
            let (l, r) = if is_from { (cl, cr) } else { (cr, cl) };
            let w = net.outgoing_dir(v, e).unit().ok_or_else(|| {
                CoreError::ExactArithmetic(format!(
                    "edge {e} direction has no representable unit vector"
                ))
            })?;
            // rot90 of the outgoing direction points from the right color
            // into the left color.
            let (k, flipped) = pair_index(r, l).ok_or_else(|| {
                CoreError::InconsistentAssignment(format!(
                    "edge {e} does not separate two distinct colors"
                ))
            })?;
            let nu = if flipped { w.rot90().neg() } else { w.rot90() };
            psi[k] = nu;
            got[k] = true;
        }
        if !got.iter().all(|&g| g) {
            return Err(CoreError::InconsistentAssignment(format!(
                "junction {v} does not exhibit all three color pairs"
            )));
        }
        fields[cell] = Some(psi);
    }

    // Wedge cells, probed from each chorded midpoint toward the boundary.
    for ch in &chorded {
        let (cl, cr) = edge_pair[ch.edge];
        let (k, flipped) = pair_index(cr, cl).ok_or_else(|| {
            CoreError::InconsistentAssignment(format!(
                "edge {} does not separate two distinct colors",
                ch.edge
            ))
        })?;
        for (ambient, dir) in [(cl, ch.left.clone()), (cr, ch.left.neg())] {
            let t = first_hit(&boundary, &ch.mid, &dir, tol).ok_or_else(|| {
                CoreError::InvalidGeometry(format!(
                    "wedge probe of edge {} does not reach the boundary",
                    ch.edge
                ))
            })?;
            let probe = ch.mid.add(&dir.scale(&(t * half.clone())));
            let cell = cells.locate_face(&probe, tol).ok_or_else(|| {
                CoreError::InconsistentAssignment(format!(
                    "wedge probe of edge {} lands on a cell boundary",
                    ch.edge
                ))
            })?;
            if !inside[cell] || fields[cell].is_some() {
                return Err(CoreError::InconsistentAssignment(format!(
                    "wedge cell of edge {} is already classified",
                    ch.edge
                )));
            }
            let nu = if flipped {
                ch.left.neg()
            } else {
                ch.left.clone()
            };
            let zero_pair = (0..3)
                .find(|&m| m != k && PAIRS[m].0 != ambient && PAIRS[m].1 != ambient)
                .expect("one remaining pair avoids the ambient color");
            let forced = 3 - k - zero_pair;
            let mut psi = [Vector2::zero(), Vector2::zero(), Vector2::zero()];
            psi[forced] = nu.neg();
            psi[k] = nu;
            fields[cell] = Some(psi);
        }
    }

    // Leftover cells (possible only with clipped domains): classify by the
    // edges whose pieces they contain.
    let mut touches: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for e in 0..net.edges.len() {
        let chord_mid = chorded
            .iter()
            .find(|c| c.edge == e)
            .map(|c| c.mid.clone());
        let chain = net.edge_chain(e);
        let mut stops: Vec<Point2<S>> = Vec::new();
        stops.push(chain[0].clone());
        if let Some(m) = chord_mid {
            stops.push(m);
        }
        stops.extend(chain[1..].iter().cloned());
        for w in stops.windows(2) {
            let pm = w[0].midpoint(&w[1]);
            if let Some(cell) = cells.locate_face(&pm, tol) {
                if inside[cell] && fields[cell].is_none() && !touches[cell].contains(&e) {
                    touches[cell].push(e);
                }
            }
        }
    }
    for f in 0..nf {
        if !inside[f] || fields[f].is_some() {
            continue;
        }
        match touches[f].as_slice() {
            [] => {
                fields[f] = Some([Vector2::zero(), Vector2::zero(), Vector2::zero()]);
            }
            [e] => {
                let (cl, cr) = edge_pair[*e];
                let edge = &net.edges[*e];
                let u = net.points[edge.from]
                    .to(&net.points[edge.to])
                    .unit()
                    .ok_or_else(|| {
                        CoreError::ExactArithmetic(format!(
                            "edge {e} direction has no representable unit vector"
                        ))
                    })?;
                let (k, flipped) = pair_index(cr, cl).ok_or_else(|| {
                    CoreError::InconsistentAssignment(format!(
                        "edge {e} does not separate two distinct colors"
                    ))
                })?;
                let nu = if flipped { u.rot90().neg() } else { u.rot90() };
                let mut psi = [Vector2::zero(), Vector2::zero(), Vector2::zero()];
                psi[(k + 2) % 3] = nu.neg();
                psi[k] = nu;
                fields[f] = Some(psi);
            }
            many => {
                return Err(CoreError::InconsistentAssignment(format!(
                    "cell {f} is crossed by {} edges but contains no junction",
                    many.len()
                )));
            }
        }
    }

    Ok(FieldAssignment { cells, fields })
}

/// Colors (left, right) of the faces flanking edge `e`, relative to its
/// from→to direction, found by probing halfway to the nearest obstacle.
fn edge_colors<S: Scalar>(
    net: &Network<S>,
    e: usize,
    colored: &ColoredFaces<S>,
    tol: &ToleranceConfig<S>,
) -> Result<(u8, u8)> {
    let chain = net.edge_chain(e);
    let mid = chain[0].midpoint(&chain[1]);
    let n = chain[0].to(&chain[1]).rot90().unit().ok_or_else(|| {
        CoreError::ExactArithmetic(format!(
            "edge {e} direction has no representable unit vector"
        ))
    })?;
    let sub_segs: Vec<Segment<S>> = colored
        .subdivision
        .edges
        .iter()
        .map(|se| {
            Segment::new(
                colored.subdivision.points[se.a].clone(),
                colored.subdivision.points[se.b].clone(),
            )
        })
        .collect();
    let mut out = [0u8; 2];
    for (slot, dir) in [(0usize, n.clone()), (1usize, n.neg())] {
        let t = first_hit(&sub_segs, &mid, &dir, tol).ok_or_else(|| {
            CoreError::InvalidGeometry(format!("side probe of edge {e} escapes the subdivision"))
        })?;
        let p = mid.add(&dir.scale(&(t * S::from_ratio(1, 2))));
        let f = colored.subdivision.locate_face(&p, tol).ok_or_else(|| {
            CoreError::InvalidGeometry(format!("side probe of edge {e} lands on a face boundary"))
        })?;
        let c = colored.colors[f];
        if c == 0 {
            return Err(CoreError::InconsistentAssignment(format!(
                "side probe of edge {e} lands outside Ω"
            )));
        }
        out[slot] = c;
    }
    Ok((out[0], out[1]))
}

/// Smallest t > 0 with origin + t·dir on one of the segments.
fn first_hit<S: Scalar>(
    segs: &[Segment<S>],
    origin: &Point2<S>,
    dir: &Vector2<S>,
    tol: &ToleranceConfig<S>,
) -> Option<S> {
    let mut best: Option<S> = None;
    for seg in segs {
        let d2 = seg.dir();
        let denom = dir.cross(&d2);
        if denom.is_zero() {
            continue;
        }
        let rel = origin.to(&seg.a);
        let t = rel.cross(&d2) / denom.clone();
        let u = rel.cross(dir) / denom;
        if u.is_negative() || u > S::one() {
            continue;
        }
        // dir is unit length, so t is a distance; skip the segments through
        // the origin itself.
        if t <= tol.eps_len {
            continue;
        }
        best = Some(match best {
            None => t,
            Some(cur) => cur.min_val(t),
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CoreError;
    use crate::offset::polygon_offset_network;
    use crate::partitions::{coarse_subdivision, color_faces_by_probes};
    use crate::scalar::Q3;
    use std::ops::Neg;

    fn mknet(points: Vec<Point2<Q3>>, edges: &[(usize, usize)]) -> Network<Q3> {
        let edges = edges
            .iter()
            .map(|&(a, b)| crate::network::Edge::straight(a, b))
            .collect();
        Network::new(points, edges).unwrap()
    }

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    fn qp(x: Q3, y: Q3) -> Point2<Q3> {
        Point2::new(x, y)
    }

    fn qv(x: Q3, y: Q3) -> Vector2<Q3> {
        Vector2::new(x, y)
    }

    fn s3(n: i64, d: i64) -> Q3 {
        Q3::sqrt3() * q(n, d)
    }

    fn double_tripod() -> Network<Q3> {
        let h = Q3::sqrt3();
        mknet(
            vec![
                qp(q(0, 1), q(0, 1)),
                qp(q(1, 1), q(0, 1)),
                qp(q(-1, 1), h.clone()),
                qp(q(-1, 1), h.clone().neg()),
                qp(q(2, 1), h.clone()),
                qp(q(2, 1), h.neg()),
            ],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)],
        )
    }

    /// Caps colored 1, below the central edge 2, above it 3.
    fn colored_double_tripod(
        net: &Network<Q3>,
        delta: &Q3,
        tol: &ToleranceConfig<Q3>,
    ) -> (Polygon<Q3>, crate::partitions::ColoredFaces<Q3>) {
        let omega = polygon_offset_network(net, delta, tol).unwrap();
        let half = delta.clone() * q(1, 2);
        let probes = [
            (qp(half.clone().neg(), q(0, 1)), 1u8),
            (qp(q(1, 1) + half.clone(), q(0, 1)), 1u8),
            (qp(q(1, 2), half.clone().neg()), 2u8),
            (qp(q(1, 2), half), 3u8),
        ];
        let sub = coarse_subdivision(net, &omega, tol).unwrap();
        let colored = color_faces_by_probes(sub, &omega, &probes, tol).unwrap();
        (omega, colored)
    }

    #[test]
    fn double_tripod_reproduces_the_field_table() {
        let tol = ToleranceConfig::exact();
        let net = double_tripod();
        let delta = q(1, 5);
        let (omega, colored) = colored_double_tripod(&net, &delta, &tol);
        let fa = assign_fields(&net, &omega, &colored, &tol).unwrap();

        let cell_at = |p: &Point2<Q3>| fa.cells.locate_face(p, &tol).unwrap();
        let r1 = cell_at(&qp(q(0, 1), q(0, 1)));
        let r2 = cell_at(&qp(q(1, 1), q(0, 1)));
        let r_tu = cell_at(&qp(q(1, 2), q(1, 10)));
        let r_td = cell_at(&qp(q(1, 2), q(-1, 10)));

        assert_eq!(
            fa.fields[r1].clone().unwrap(),
            [
                qv(s3(1, 2), q(-1, 2)),
                qv(q(0, 1), q(1, 1)),
                qv(s3(-1, 2), q(-1, 2)),
            ]
        );
        assert_eq!(
            fa.fields[r2].clone().unwrap(),
            [
                qv(s3(-1, 2), q(-1, 2)),
                qv(q(0, 1), q(1, 1)),
                qv(s3(1, 2), q(-1, 2)),
            ]
        );
        assert_eq!(
            fa.fields[r_tu].clone().unwrap(),
            [
                qv(q(0, 1), q(0, 1)),
                qv(q(0, 1), q(1, 1)),
                qv(q(0, 1), q(-1, 1)),
            ]
        );
        assert_eq!(
            fa.fields[r_td].clone().unwrap(),
            [
                qv(q(0, 1), q(-1, 1)),
                qv(q(0, 1), q(1, 1)),
                qv(q(0, 1), q(0, 1)),
            ]
        );
    }

    #[test]
    fn every_cell_sums_to_zero() {
        let tol = ToleranceConfig::exact();
        let net = double_tripod();
        let (omega, colored) = colored_double_tripod(&net, &q(1, 5), &tol);
        let fa = assign_fields(&net, &omega, &colored, &tol).unwrap();
        let mut assigned = 0;
        for psi in fa.fields.iter().flatten() {
            let sum = psi[0].add(&psi[1]).add(&psi[2]);
            assert!(sum.x.is_zero() && sum.y.is_zero());
            assigned += 1;
        }
        assert_eq!(assigned, 4);
    }

    #[test]
    fn lone_junction_matches_the_table_frame() {
        // A tripod is the local model of every junction cell: same three
        // field vectors as the double tripod's left junction.
        let tol = ToleranceConfig::exact();
        let h = Q3::sqrt3();
        let net = mknet(
            vec![
                qp(q(0, 1), q(0, 1)),
                qp(q(2, 1), q(0, 1)),
                qp(q(-1, 1), h.clone()),
                qp(q(-1, 1), h.neg()),
            ],
            &[(0, 1), (0, 2), (0, 3)],
        );
        let delta = q(1, 5);
        let omega = polygon_offset_network(&net, &delta, &tol).unwrap();
        let half = delta.clone() * q(1, 2);
        let probes = [
            (qp(half.clone().neg(), q(0, 1)), 1u8),
            (qp(q(1, 1), half.clone().neg()), 2u8),
            (qp(q(1, 1), half), 3u8),
        ];
        let sub = coarse_subdivision(&net, &omega, &tol).unwrap();
        let colored = color_faces_by_probes(sub, &omega, &probes, &tol).unwrap();
        let fa = assign_fields(&net, &omega, &colored, &tol).unwrap();
        let cell = fa.cells.locate_face(&qp(q(0, 1), q(0, 1)), &tol).unwrap();
        assert_eq!(
            fa.fields[cell].clone().unwrap(),
            [
                qv(s3(1, 2), q(-1, 2)),
                qv(q(0, 1), q(1, 1)),
                qv(s3(-1, 2), q(-1, 2)),
            ]
        );
        // No chords: the whole domain is that one cell.
        assert_eq!(fa.fields.iter().flatten().count(), 1);
    }

    #[test]
    fn edges_must_separate_distinct_colors() {
        let tol = ToleranceConfig::exact();
        let net = double_tripod();
        let delta = q(1, 5);
        let omega = polygon_offset_network(&net, &delta, &tol).unwrap();
        let half = delta * q(1, 2);
        // Caps and bottom share a color: the lower arms separate nothing.
        let probes = [
            (qp(half.clone().neg(), q(0, 1)), 2u8),
            (qp(q(1, 1) + half.clone(), q(0, 1)), 2u8),
            (qp(q(1, 2), half.clone().neg()), 2u8),
            (qp(q(1, 2), half), 3u8),
        ];
        let sub = coarse_subdivision(&net, &omega, &tol).unwrap();
        let colored = color_faces_by_probes(sub, &omega, &probes, &tol).unwrap();
        let err = assign_fields(&net, &omega, &colored, &tol).unwrap_err();
        assert!(matches!(err, CoreError::InconsistentAssignment(_)));
    }
}
