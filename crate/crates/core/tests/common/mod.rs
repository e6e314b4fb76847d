//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately second-opinion code: the oracles avoid
//! the library's own formulas (hull bisection instead of the closed-form
//! norm, per-region boundary walks instead of interface sums) so that
//! agreement between the two is evidence, not tautology.

#![allow(dead_code)]

use netcalib::geometry::{generators, Point2, Polygon, Vector2};
use netcalib::network::{Edge, Network};
use netcalib::partitions::PartitionSpec;
use netcalib::scalar::{Q3, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Q3 {
    Q3::from_ratio(n, d)
}

pub fn qp(x: Q3, y: Q3) -> Point2<Q3> {
    Point2::new(x, y)
}

/// Hexagonal-norm oracle: bisect the scaling that lands `v` on the unit
/// hexagon's boundary, testing membership against the convex hull of
/// ±g1, ±g2, ±g3 directly. Accurate to ~1e-14 relative.
pub fn hex_norm_oracle(x: f64, y: f64) -> f64 {
    let r = (x * x + y * y).sqrt();
    if r == 0.0 {
        return 0.0;
    }
    let [g1, g2, g3] = generators::<f64>();
    // Counterclockwise hull of the six hexagon vertices.
    let hull = [
        g1.clone(),
        g2.neg(),
        g3.clone(),
        g1.neg(),
        g2.clone(),
        g3.neg(),
    ];
    let inside = |px: f64, py: f64| -> bool {
        for k in 0..6 {
            let a = &hull[k];
            let b = &hull[(k + 1) % 6];
            let cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
            if cross < 0.0 {
                return false;
            }
        }
        true
    };
    // v/λ ∈ hexagon exactly when λ ≥ ‖v‖; bisect the switch point.
    let mut lo = r / 2.0; // hexagon ⊂ unit disk ⇒ ‖v‖ ≥ |v|
    let mut hi = 2.0 * r; // hexagon ⊃ disk of radius √3/2 ⇒ ‖v‖ ≤ 2|v|/√3
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(x / mid, y / mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Double tripod: junctions at (0,0) and (d,0), four arms of length `arm`
/// along the outward lattice directions. Total length d + 4·arm.
pub fn double_tripod(d: i64, arm: i64) -> Network<Q3> {
    let [_, g2, g3] = generators::<Q3>();
    let o1 = qp(Q3::zero(), Q3::zero());
    let o2 = qp(Q3::from_int(d), Q3::zero());
    let arm_s = Q3::from_int(arm);
    let points = vec![
        o1.clone(),
        o2.clone(),
        o1.add(&g3.scale(&arm_s)),
        o1.add(&g2.scale(&arm_s)),
        o2.add(&g2.neg().scale(&arm_s)),
        o2.add(&g3.neg().scale(&arm_s)),
    ];
    let edges = vec![
        Edge::straight(0, 1),
        Edge::straight(0, 2),
        Edge::straight(0, 3),
        Edge::straight(1, 4),
        Edge::straight(1, 5),
    ];
    Network { points, edges }
}

/// Regular hexagonal ring of circumradius `ring` with six radial stubs out
/// to radius `tip`. Minimal for any 0 < ring < tip; the ring edge length
/// equals the circumradius.
pub fn hex_ring_with_stubs(ring: &Q3, tip: &Q3) -> Network<Q3> {
    let half = q(1, 2);
    let half_s3 = Q3::sqrt3() * q(1, 2);
    // Unit direction of each corner, counterclockwise from the x-axis.
    let dirs = [
        Vector2::new(Q3::one(), Q3::zero()),
        Vector2::new(half.clone(), half_s3.clone()),
        Vector2::new(-half.clone(), half_s3.clone()),
        Vector2::new(-Q3::one(), Q3::zero()),
        Vector2::new(-half.clone(), -half_s3.clone()),
        Vector2::new(half, -half_s3),
    ];
    let origin = qp(Q3::zero(), Q3::zero());
    let mut points: Vec<Point2<Q3>> = dirs
        .iter()
        .map(|u| origin.add(&u.scale(ring)))
        .collect();
    points.extend(dirs.iter().map(|u| origin.add(&u.scale(tip))));
    let mut edges: Vec<Edge<Q3>> = (0..6)
        .map(|k| Edge::straight(k, (k + 1) % 6))
        .collect();
    edges.extend((0..6).map(|k| Edge::straight(k, k + 6)));
    Network { points, edges }
}

/// True for connected acyclic networks (|E| = |V| − 1).
pub fn is_tree<S: Scalar>(net: &Network<S>) -> bool {
    net.is_connected() && net.edges.len() + 1 == net.points.len()
}

/// Same graph with every junction displaced by up to ±scale per coordinate;
/// endpoints stay put, so the result is a valid same-topology competitor.
pub fn perturb_junctions(
    net: &Network<f64>,
    rng: &mut ChaCha8Rng,
    scale: f64,
) -> Network<f64> {
    let deg = net.degrees();
    let mut points = net.points.clone();
    for (v, p) in points.iter_mut().enumerate() {
        if deg[v] != 1 {
            p.x += rng.gen_range(-scale..=scale);
            p.y += rng.gen_range(-scale..=scale);
        }
    }
    Network {
        points,
        edges: net.edges.clone(),
    }
}

/// Bends roughly half the straight edges into two-segment zigzags by
/// pushing the midpoint off the chord. Graph and endpoints are unchanged.
pub fn zigzag_edges(net: &Network<f64>, rng: &mut ChaCha8Rng, amp: f64) -> Network<f64> {
    let mut edges = net.edges.clone();
    for e in edges.iter_mut() {
        if !e.via.is_empty() || !rng.gen_bool(0.5) {
            continue;
        }
        let a = &net.points[e.from];
        let b = &net.points[e.to];
        let chord = a.to(b);
        if let Some(n) = chord.rot90().unit() {
            let off = rng.gen_range(-amp..=amp);
            e.via = vec![a.midpoint(b).add(&n.scale(&off))];
        }
    }
    Network {
        points: net.points.clone(),
        edges,
    }
}

/// Exact point-on-ring-boundary predicate: collinear with a boundary
/// segment and inside its span. Meant for rational-√3 inputs.
fn on_ring<S: Scalar>(p: &Point2<S>, ring: &[Point2<S>]) -> bool {
    for k in 0..ring.len() {
        let a = &ring[k];
        let b = &ring[(k + 1) % ring.len()];
        let ab = a.to(b);
        let ap = a.to(p);
        if !ab.cross(&ap).is_zero() {
            continue;
        }
        let t = ab.dot(&ap);
        if !t.is_negative() && t <= ab.norm_sq() {
            return true;
        }
    }
    false
}

fn on_domain_boundary<S: Scalar>(p: &Point2<S>, omega: &Polygon<S>) -> bool {
    if on_ring(p, &omega.outer) {
        return true;
    }
    omega.holes.iter().any(|h| on_ring(p, h))
}

/// Independent recomputation of the partition energy: walk every region
/// polygon's boundary, keep the segments that do not lie on ∂Ω, and halve
/// the total (each interface is walked once from each side).
pub fn region_perimeter_recompute<S: Scalar>(spec: &PartitionSpec<S>) -> S {
    let mut doubled = S::zero();
    for region in &spec.regions {
        for poly in region {
            let rings = std::iter::once(&poly.outer).chain(poly.holes.iter());
            for ring in rings {
                for k in 0..ring.len() {
                    let a = &ring[k];
                    let b = &ring[(k + 1) % ring.len()];
                    let mid = a.midpoint(b);
                    let interior = !(on_domain_boundary(a, &spec.omega)
                        && on_domain_boundary(b, &spec.omega)
                        && on_domain_boundary(&mid, &spec.omega));
                    if interior {
                        let len = a
                            .to(b)
                            .norm()
                            .expect("region boundary segment has representable length");
                        doubled = doubled + len;
                    }
                }
            }
        }
    }
    doubled * S::from_ratio(1, 2)
}
