//! Tubular partition domains: endpoint-extended miter tubes, optionally
//! intersected with a user-supplied polygonal region.

use crate::error::{CoreError, Result};
use crate::geometry::{
    segment_intersection, Point2, PointLocation, Polygon, SegIntersection, ToleranceConfig,
};
use crate::network::{check_minimal, Network};
use crate::offset::polygon_offset_network;
use crate::planar::{build_subdivision, NO_FACE};
use crate::scalar::Scalar;

/// Build the calibration domain Ω around a minimal network: every endpoint
/// edge is lengthened by `delta_prime`, the network is fattened to the
/// mitered tube of half-width `delta` (truncated orthogonally through the
/// extended endpoints), and the result is intersected with `region` when
/// one is supplied. Returns Ω together with the extended network.
pub fn build_partition_domain<S: Scalar>(
    net: &Network<S>,
    delta: &S,
    delta_prime: &S,
    region: Option<&Polygon<S>>,
    tol: &ToleranceConfig<S>,
) -> Result<(Polygon<S>, Network<S>)> {
    let cert = check_minimal(net, tol)?;
    if !cert.is_minimal {
        let first = cert
            .violations
            .first()
            .map(|v| v.detail.clone())
            .unwrap_or_else(|| "unspecified violation".into());
        return Err(CoreError::NotMinimal(first));
    }
    let mut shortest: Option<S> = None;
    for e in 0..net.edges.len() {
        let l = net.edge_length(e)?;
        shortest = Some(match shortest {
            None => l,
            Some(cur) => cur.min_val(l),
        });
    }
    let d = shortest.expect("minimal network has edges");
    let bound = S::sqrt3() * d / S::from_int(8);
    if delta.is_zero() || delta.is_negative() || !(delta.clone() < bound.clone()) {
        return Err(CoreError::ThresholdViolation(format!(
            "tube half-width {} must lie in (0, (√3/8)·d) = (0, {})",
            delta.to_f64(),
            bound.to_f64()
        )));
    }
    if delta_prime.is_zero() || delta_prime.is_negative() || !(delta_prime.clone() < S::one()) {
        return Err(CoreError::InvalidInput(format!(
            "endpoint extension {} must lie in (0, 1)",
            delta_prime.to_f64()
        )));
    }

    // Lengthen every endpoint edge by delta_prime past its tip.
    let mut ext = net.clone();
    let degrees = net.degrees();
    let inc = net.incidence();
    for v in 0..net.points.len() {
        if degrees[v] != 1 {
            continue;
        }
        let (e, _) = inc[v][0];
        let chain = net.edge_chain(e);
        let into_tip = if net.edges[e].to == v {
            chain[chain.len() - 2].to(&chain[chain.len() - 1])
        } else {
            chain[1].to(&chain[0])
        };
        let u = into_tip.unit().ok_or_else(|| {
            CoreError::ExactArithmetic(format!(
                "edge {e} direction has no representable unit vector"
            ))
        })?;
        ext.points[v] = ext.points[v].add(&u.scale(delta_prime));
    }

    let tube = polygon_offset_network(&ext, delta, tol)?;
    let omega = match region {
        None => tube,
        Some(r) => intersect_domains(&tube, r, tol)?,
    };

    // The intersection must not cut the network.
    for p in &ext.points {
        if omega.locate(p, &tol.eps_len) == PointLocation::Outside {
            return Err(CoreError::InvalidGeometry(
                "supplied region clips the extended network".into(),
            ));
        }
    }
    Ok((omega, ext))
}

/// Intersection of two polygons with transversality enforced on the
/// boundary crossings: tangential or overlapping boundary contact is
/// rejected rather than resolved arbitrarily.
fn intersect_domains<S: Scalar>(
    a: &Polygon<S>,
    b: &Polygon<S>,
    tol: &ToleranceConfig<S>,
) -> Result<Polygon<S>> {
    let segs_a = a.boundary_segments();
    let segs_b = b.boundary_segments();
    for sa in &segs_a {
        for sb in &segs_b {
            match segment_intersection(sa, sb, tol) {
                SegIntersection::Empty => {}
                SegIntersection::Overlap(_) => {
                    return Err(CoreError::NonTransverse(
                        "domain boundaries overlap along a segment".into(),
                    ));
                }
                SegIntersection::Point(_) => {
                    let (d1, d2) = (sa.dir(), sb.dir());
                    let c = d1.cross(&d2);
                    let gate =
                        tol.eps_angle.clone() * tol.eps_angle.clone() * d1.norm_sq() * d2.norm_sq();
                    if c.clone() * c <= gate {
                        return Err(CoreError::NonTransverse(
                            "domain boundaries touch tangentially".into(),
                        ));
                    }
                }
            }
        }
    }

    let mut segments = Vec::new();
    for s in segs_a.into_iter().chain(segs_b.into_iter()) {
        let id = segments.len();
        segments.push((s, id));
    }
    let sub = build_subdivision(&segments, tol)?;
    let mut kept = vec![false; sub.faces.len()];
    let mut any = false;
    for (f, face) in sub.faces.iter().enumerate() {
        let p = face.polygon.interior_point()?;
        kept[f] = matches!(a.locate(&p, &tol.eps_len), PointLocation::Inside)
            && matches!(b.locate(&p, &tol.eps_len), PointLocation::Inside);
        any |= kept[f];
    }
    if !any {
        return Err(CoreError::InvalidGeometry(
            "domain intersection is empty".into(),
        ));
    }

    // Directed boundary of the kept region: kept face on the left.
    let is_kept = |f: usize| f != NO_FACE && kept[f];
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sub.points.len()];
    let mut n_directed = 0usize;
    for (k, e) in sub.edges.iter().enumerate() {
        let (fl, fr) = sub.edge_faces[k];
        match (is_kept(fl), is_kept(fr)) {
            (true, false) => {
                succ[e.a].push((e.b, k));
                n_directed += 1;
            }
            (false, true) => {
                succ[e.b].push((e.a, k));
                n_directed += 1;
            }
            _ => {}
        }
    }
    for list in &succ {
        if list.len() > 1 {
            return Err(CoreError::InvalidGeometry(
                "domain intersection pinches at a point".into(),
            ));
        }
    }

    let mut used = vec![false; sub.edges.len()];
    let mut rings: Vec<(f64, Vec<Point2<S>>)> = Vec::new();
    let mut walked = 0usize;
    for start in 0..sub.points.len() {
        if succ[start].is_empty() || used[succ[start][0].1] {
            continue;
        }
        let mut ring = Vec::new();
        let mut v = start;
        loop {
            let (w, k) = succ[v][0];
            if used[k] {
                break;
            }
            used[k] = true;
            walked += 1;
            ring.push(sub.points[v].clone());
            v = w;
            if v == start {
                break;
            }
            if succ[v].is_empty() {
                return Err(CoreError::InvalidGeometry(
                    "domain intersection boundary is not closed".into(),
                ));
            }
        }
        let mut area2 = 0.0f64;
        for i in 0..ring.len() {
            let p = ring[i].to_f64();
            let q = ring[(i + 1) % ring.len()].to_f64();
            area2 += p.x * q.y - q.x * p.y;
        }
        rings.push((area2, ring));
    }
    if walked != n_directed {
        return Err(CoreError::InvalidGeometry(
            "domain intersection boundary walk is incomplete".into(),
        ));
    }
    let positives = rings.iter().filter(|(a2, _)| *a2 > 0.0).count();
    if positives != 1 {
        return Err(CoreError::InvalidGeometry(format!(
            "domain intersection has {positives} components, expected 1"
        )));
    }
    let mut outer = Vec::new();
    let mut holes = Vec::new();
    for (a2, ring) in rings {
        if a2 > 0.0 {
            outer = ring;
        } else {
            holes.push(ring);
        }
    }
    Polygon::new(outer, holes)
}
