//! Proper 3-coloring of the faces of Ω∖Γ.
//!
//! Faces are adjacent when they share a piece of a network edge. A proper
//! coloring makes the three faces around every triple junction pairwise
//! distinct, which is what the partition construction needs. The search is
//! deterministic: faces are visited in breadth-first order from the
//! lowest-index face and always try the smallest color first, with
//! backtracking; inputs whose face graph is not 3-chromatic are reported,
//! not approximated.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{CoreError, Result};
use crate::geometry::{Polygon, ToleranceConfig};
use crate::network::Network;
use crate::planar::NO_FACE;
use crate::scalar::Scalar;

use super::{coarse_subdivision, ColoredFaces};

pub fn three_color_faces<S: Scalar>(
    net: &Network<S>,
    omega: &Polygon<S>,
    tol: &ToleranceConfig<S>,
) -> Result<ColoredFaces<S>> {
    let sub = coarse_subdivision(net, omega, tol)?;
    let inside = sub.faces_inside(omega, tol)?;
    let n = sub.faces.len();

    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (k, _) in sub.edges.iter().enumerate() {
        let (fl, fr) = sub.edge_faces[k];
        if fl == NO_FACE || fr == NO_FACE || fl == fr {
            continue;
        }
        if inside[fl] && inside[fr] {
            adj[fl].insert(fr);
            adj[fr].insert(fl);
        }
    }

    // Deterministic visit order: BFS from the lowest-index inside face,
    // restarting per component.
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if !inside[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            order.push(f);
            for &g in &adj[f] {
                if !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }

    let mut colors = vec![0u8; n];
    if !backtrack(&order, &adj, &mut colors, 0) {
        return Err(CoreError::NoColoring(
            "face adjacency graph is not 3-colorable; the network does not \
             bound hexagon-style face cycles"
                .into(),
        ));
    }
    Ok(ColoredFaces {
        subdivision: sub,
        colors,
    })
}

fn backtrack(order: &[usize], adj: &[BTreeSet<usize>], colors: &mut [u8], pos: usize) -> bool {
    if pos == order.len() {
        return true;
    }
    let f = order[pos];
    for c in 1..=3u8 {
        if adj[f].iter().any(|&g| colors[g] == c) {
            continue;
        }
        colors[f] = c;
        if backtrack(order, adj, colors, pos + 1) {
            return true;
        }
        colors[f] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CoreError;
    use crate::geometry::Point2;
    use crate::network::{Edge, Network};
    use crate::offset::polygon_offset_network;
    use crate::partitions::build_partition_domain;
    use crate::planar::NO_FACE;
    use crate::scalar::{Q3, Scalar};
    use std::ops::Neg;

    fn mknet<S: Scalar>(points: Vec<Point2<S>>, edges: &[(usize, usize)]) -> Network<S> {
        let edges = edges.iter().map(|&(a, b)| Edge::straight(a, b)).collect();
        Network::new(points, edges).unwrap()
    }

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    fn qp(x: Q3, y: Q3) -> Point2<Q3> {
        Point2::new(x, y)
    }

    fn tripod() -> Network<Q3> {
        let h = Q3::sqrt3() * q(1, 2);
        mknet(
            vec![
                qp(q(0, 1), q(0, 1)),
                qp(q(1, 1), q(0, 1)),
                qp(q(-1, 2), h.clone()),
                qp(q(-1, 2), h.neg()),
            ],
            &[(0, 1), (0, 2), (0, 3)],
        )
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

    /// Unit-side hexagon ring with a radial stub at every vertex.
    fn hexagon_with_stubs() -> Network<Q3> {
        let h = Q3::sqrt3() * q(1, 2);
        let ring = [
            qp(q(1, 1), q(0, 1)),
            qp(q(1, 2), h.clone()),
            qp(q(-1, 2), h.clone()),
            qp(q(-1, 1), q(0, 1)),
            qp(q(-1, 2), h.clone().neg()),
            qp(q(1, 2), h.clone().neg()),
        ];
        let mut points: Vec<Point2<Q3>> = ring.to_vec();
        for p in &ring {
            points.push(Point2::new(p.x.clone() * q(2, 1), p.y.clone() * q(2, 1)));
        }
        let mut edges: Vec<(usize, usize)> = (0..6).map(|k| (k, (k + 1) % 6)).collect();
        edges.extend((0..6).map(|k| (k, k + 6)));
        mknet(points, &edges)
    }

    fn assert_proper<S: Scalar>(colored: &ColoredFaces<S>) {
        for (k, _) in colored.subdivision.edges.iter().enumerate() {
            let (fl, fr) = colored.subdivision.edge_faces[k];
            if fl == NO_FACE || fr == NO_FACE {
                continue;
            }
            let (ca, cb) = (colored.colors[fl], colored.colors[fr]);
            if ca > 0 && cb > 0 {
                assert_ne!(ca, cb, "faces {fl} and {fr} share an edge and a color");
            }
        }
    }

    #[test]
    fn tripod_faces_get_three_distinct_colors() {
        let tol = ToleranceConfig::exact();
        let (omega, ext) =
            build_partition_domain(&tripod(), &q(1, 5), &q(1, 5), None, &tol).unwrap();
        let colored = three_color_faces(&ext, &omega, &tol).unwrap();
        let mut used: Vec<u8> = colored.colors.iter().copied().filter(|&c| c > 0).collect();
        used.sort_unstable();
        assert_eq!(used, vec![1, 2, 3]);
        assert_proper(&colored);
    }

    #[test]
    fn double_tripod_reuses_one_color() {
        let tol = ToleranceConfig::exact();
        let (omega, ext) =
            build_partition_domain(&double_tripod(), &q(1, 5), &q(3, 10), None, &tol).unwrap();
        let colored = three_color_faces(&ext, &omega, &tol).unwrap();
        let mut used: Vec<u8> = colored.colors.iter().copied().filter(|&c| c > 0).collect();
        used.sort_unstable();
        assert_eq!(used.len(), 4);
        let distinct: std::collections::BTreeSet<u8> = used.iter().copied().collect();
        assert_eq!(distinct.len(), 3);
        assert_proper(&colored);
    }

    #[test]
    fn hexagon_ring_with_stubs_is_three_colorable() {
        let tol = ToleranceConfig::exact();
        let (omega, ext) =
            build_partition_domain(&hexagon_with_stubs(), &q(1, 5), &q(1, 2), None, &tol)
                .unwrap();
        let colored = three_color_faces(&ext, &omega, &tol).unwrap();
        let used: Vec<u8> = colored.colors.iter().copied().filter(|&c| c > 0).collect();
        assert_eq!(used.len(), 7);
        let distinct: std::collections::BTreeSet<u8> = used.iter().copied().collect();
        assert_eq!(distinct.len(), 3);
        assert_proper(&colored);
        // The ring interior is a single face wedged between the hole and the
        // six ring edges.
        let inner = colored
            .subdivision
            .locate_face(&qp(q(0, 1), q(3, 4)), &tol)
            .unwrap();
        assert!(colored.colors[inner] > 0);
    }

    #[test]
    fn pentagon_star_is_not_three_colorable() {
        // Five faces around an odd ring force a fourth color; the input is
        // deliberately non-minimal (108° corners) to reach this structure.
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        let mut points = Vec::new();
        for k in 0..5 {
            let a = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * (k as f64) / 5.0;
            points.push(Point2::new(a.cos(), a.sin()));
        }
        for k in 0..5 {
            let a = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * (k as f64) / 5.0;
            points.push(Point2::new(1.5 * a.cos(), 1.5 * a.sin()));
        }
        let mut edges: Vec<(usize, usize)> = (0..5).map(|k| (k, (k + 1) % 5)).collect();
        edges.extend((0..5).map(|k| (k, k + 5)));
        let net = mknet(points, &edges);
        let omega = polygon_offset_network(&net, &0.1, &tol).unwrap();
        let err = three_color_faces(&net, &omega, &tol).unwrap_err();
        assert!(matches!(err, CoreError::NoColoring(_)));
    }
}
