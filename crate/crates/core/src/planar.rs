//! Planar subdivision of a segment arrangement.
//!
//! Input segments are noded at every pairwise intersection, deduplicated
//! into an undirected graph, and the bounded faces are traced with the
//! half-edge rule "turn clockwise past your twin", which walks every
//! bounded face counterclockwise and every component's outer boundary
//! clockwise. Clockwise cycles are then assigned as holes of the smallest
//! bounded face strictly containing them, so annular regions (a tube around
//! a closed network cycle) come out with correct topology.
//!
//! Faces keep a record of which input segment each piece of their boundary
//! came from; the partition pipeline leans on that provenance to tell
//! network interfaces, domain boundary, and internal cell seams apart.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::geometry::{
    ccw_angle_cmp, segment_intersection, Point2, PointLocation, Polygon, SegIntersection,
    Segment, ToleranceConfig, Vector2,
};
use crate::scalar::Scalar;

/// Piece of an input segment between two arrangement vertices.
#[derive(Clone, Debug)]
pub struct SubEdge {
    pub a: usize,
    pub b: usize,
    /// Index of the input segment this piece came from.
    pub source: usize,
}

#[derive(Clone, Debug)]
pub struct Face<S> {
    pub polygon: Polygon<S>,
}

#[derive(Clone, Debug)]
pub struct Subdivision<S> {
    pub points: Vec<Point2<S>>,
    pub edges: Vec<SubEdge>,
    pub faces: Vec<Face<S>>,
    /// Per sub-edge: (face left of a→b, face left of b→a); `NO_FACE` marks
    /// the unbounded side.
    pub edge_faces: Vec<(usize, usize)>,
}

pub const NO_FACE: usize = usize::MAX;

impl<S: Scalar> Subdivision<S> {
    /// Which faces lie inside the given polygon, decided by one interior
    /// point per face.
    pub fn faces_inside(&self, region: &Polygon<S>, tol: &ToleranceConfig<S>) -> Result<Vec<bool>> {
        let mut inside = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            let p = f.polygon.interior_point()?;
            inside.push(matches!(
                region.locate(&p, &tol.eps_len),
                PointLocation::Inside
            ));
        }
        Ok(inside)
    }

    /// Bounded face whose interior contains the point, if any.
    pub fn locate_face(&self, p: &Point2<S>, tol: &ToleranceConfig<S>) -> Option<usize> {
        (0..self.faces.len()).find(|&f| {
            matches!(
                self.faces[f].polygon.locate(p, &tol.eps_len),
                PointLocation::Inside
            )
        })
    }
}

struct HalfEdgeMesh<S> {
    points: Vec<Point2<S>>,
    edges: Vec<SubEdge>,
}

impl<S: Scalar> HalfEdgeMesh<S> {
    fn origin(&self, h: usize) -> usize {
        let e = &self.edges[h / 2];
        if h % 2 == 0 {
            e.a
        } else {
            e.b
        }
    }

    fn target(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    fn direction(&self, h: usize) -> Vector2<S> {
        self.points[self.origin(h)].to(&self.points[self.target(h)])
    }
}

/// Node the segments at all pairwise intersections and build the planar
/// subdivision. Overlapping (collinear, positively overlapping) input
/// segments are rejected: the pipelines upstream never produce them and
/// silently merging would hide an input error.
pub fn build_subdivision<S: Scalar>(
    segments: &[(Segment<S>, usize)],
    tol: &ToleranceConfig<S>,
) -> Result<Subdivision<S>> {
    let eps = &tol.eps_len;
    let mut points: Vec<Point2<S>> = Vec::new();
    let add_point = |points: &mut Vec<Point2<S>>, p: Point2<S>| -> usize {
        for (i, q) in points.iter().enumerate() {
            if q.approx_eq(&p, eps) {
                return i;
            }
        }
        points.push(p);
        points.len() - 1
    };

    // Cut points per segment, as (vertex id) — parameters recomputed later.
    let mut cuts: Vec<Vec<usize>> = vec![Vec::new(); segments.len()];
    for (i, (seg, _)) in segments.iter().enumerate() {
        let va = add_point(&mut points, seg.a.clone());
        let vb = add_point(&mut points, seg.b.clone());
        cuts[i].push(va);
        cuts[i].push(vb);
    }

    // Bounding boxes in f64 for the quadratic prefilter.
    let boxes: Vec<[f64; 4]> = segments
        .iter()
        .map(|(s, _)| {
            let (a, b) = (s.a.to_f64(), s.b.to_f64());
            [
                a.x.min(b.x),
                a.y.min(b.y),
                a.x.max(b.x),
                a.y.max(b.y),
            ]
        })
        .collect();
    let pad = eps.to_f64().max(1e-12);

    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi[2] + pad < bj[0] || bj[2] + pad < bi[0] || bi[3] + pad < bj[1]
                || bj[3] + pad < bi[1]
            {
                continue;
            }
            match segment_intersection(&segments[i].0, &segments[j].0, tol) {
                SegIntersection::Empty => {}
                SegIntersection::Point(p) => {
                    let v = add_point(&mut points, p);
                    cuts[i].push(v);
                    cuts[j].push(v);
                }
                SegIntersection::Overlap(_) => {
                    return Err(CoreError::InvalidGeometry(format!(
                        "arrangement segments {i} and {j} overlap along a positive length"
                    )));
                }
            }
        }
    }

    // Split each segment at its cut vertices, ordered along the segment.
    let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut edges: Vec<SubEdge> = Vec::new();
    for (i, (seg, source)) in segments.iter().enumerate() {
        let d = seg.dir();
        let dd = d.norm_sq();
        if dd.is_zero() {
            return Err(CoreError::InvalidGeometry(format!(
                "arrangement segment {i} has zero length"
            )));
        }
        let mut params: Vec<(S, usize)> = cuts[i]
            .iter()
            .map(|&v| {
                let t = seg.a.to(&points[v]).dot(&d) / dd.clone();
                (t, v)
            })
            .collect();
        params.sort_by(|x, y| x.0.cmp_total(&y.0));
        params.dedup_by(|x, y| x.1 == y.1);
        for w in params.windows(2) {
            let (va, vb) = (w[0].1, w[1].1);
            if va == vb || points[va].approx_eq(&points[vb], eps) {
                continue;
            }
            let key = (va.min(vb), va.max(vb));
            edge_index.entry(key).or_insert_with(|| {
                edges.push(SubEdge {
                    a: key.0,
                    b: key.1,
                    source: *source,
                });
                edges.len() - 1
            });
        }
    }

    let mesh = HalfEdgeMesh {
        points: points.clone(),
        edges: edges.clone(),
    };
    let nh = 2 * edges.len();

    // Outgoing half-edges per vertex, sorted counterclockwise.
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for h in 0..nh {
        outgoing[mesh.origin(h)].push(h);
    }
    for list in &mut outgoing {
        list.sort_by(|&x, &y| ccw_angle_cmp(&mesh.direction(x), &mesh.direction(y)));
    }
    let next = |h: usize| -> usize {
        let v = mesh.target(h);
        let list = &outgoing[v];
        let idx = list
            .iter()
            .position(|&x| x == (h ^ 1))
            .expect("twin present in outgoing list");
        list[(idx + list.len() - 1) % list.len()]
    };

    // Trace cycles.
    struct Cycle {
        halves: Vec<usize>,
        ring: Vec<usize>,
        area2: f64,
    }
    let mut cycle_of: Vec<usize> = vec![usize::MAX; nh];
    let mut cycles: Vec<Cycle> = Vec::new();
    for h0 in 0..nh {
        if cycle_of[h0] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut halves = Vec::new();
        let mut ring = Vec::new();
        let mut h = h0;
        loop {
            cycle_of[h] = id;
            halves.push(h);
            ring.push(mesh.origin(h));
            h = next(h);
            if h == h0 {
                break;
            }
        }
        let mut area2 = 0.0f64;
        for k in 0..ring.len() {
            let p = points[ring[k]].to_f64();
            let q = points[ring[(k + 1) % ring.len()]].to_f64();
            area2 += p.x * q.y - q.x * p.y;
        }
        cycles.push(Cycle {
            halves,
            ring,
            area2,
        });
    }

    // Positive cycles are bounded faces; the rest are outer walks that may
    // be holes of a containing face from another component.
    let positive: Vec<usize> = (0..cycles.len())
        .filter(|&c| cycles[c].area2 > 0.0)
        .collect();
    let face_of_cycle: BTreeMap<usize, usize> = positive
        .iter()
        .enumerate()
        .map(|(f, &c)| (c, f))
        .collect();
    let mut face_holes: Vec<Vec<Vec<Point2<S>>>> = vec![Vec::new(); positive.len()];
    let mut hole_face_of_cycle: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, cyc) in cycles.iter().enumerate() {
        if cyc.area2 > 0.0 {
            continue;
        }
        let probe = &points[cyc.ring[0]];
        let mut best: Option<(f64, usize)> = None;
        for (f, &pc) in positive.iter().enumerate() {
            let ring_pts: Vec<Point2<S>> =
                cycles[pc].ring.iter().map(|&v| points[v].clone()).collect();
            if matches!(
                crate::geometry::point_in_ring(probe, &ring_pts, eps),
                PointLocation::Inside
            ) {
                let a = cycles[pc].area2;
                if best.map(|(ba, _)| a < ba).unwrap_or(true) {
                    best = Some((a, f));
                }
            }
        }
        if let Some((_, f)) = best {
            let ring_pts: Vec<Point2<S>> =
                cyc.ring.iter().map(|&v| points[v].clone()).collect();
            // Degenerate 2-point cycles (an isolated segment walked on both
            // sides) still claim their containing face for edge_faces but
            // carry no area: they are not polygon holes.
            if ring_pts.len() >= 3 {
                face_holes[f].push(ring_pts);
            }
            hole_face_of_cycle.insert(c, f);
        }
    }

    let mut faces = Vec::with_capacity(positive.len());
    for (f, &pc) in positive.iter().enumerate() {
        let outer: Vec<Point2<S>> = cycles[pc].ring.iter().map(|&v| points[v].clone()).collect();
        faces.push(Face {
            polygon: Polygon::new(outer, face_holes[f].clone())?,
        });
    }

    let mut edge_faces = vec![(NO_FACE, NO_FACE); edges.len()];
    for (c, cyc) in cycles.iter().enumerate() {
        let face = face_of_cycle
            .get(&c)
            .or_else(|| hole_face_of_cycle.get(&c))
            .copied()
            .unwrap_or(NO_FACE);
        for &h in &cyc.halves {
            if h % 2 == 0 {
                edge_faces[h / 2].0 = face;
            } else {
                edge_faces[h / 2].1 = face;
            }
        }
    }

    Ok(Subdivision {
        points,
        edges,
        faces,
        edge_faces,
    })
}
