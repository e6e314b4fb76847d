//! Networks: finite graphs embedded in the plane by points and polylines.
//!
//! A network is minimal when every edge is a single straight segment, edges
//! meet only at shared vertices, every vertex has degree 1 (endpoint) or 3
//! (junction), and the three unit tangents at each junction sum to zero —
//! the 120° balance condition. `check_minimal` certifies all of that;
//! `canonical_rotation` finds the rotation aligning every edge with the
//! three lattice directions, which later stages rely on.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::geometry::{
    generators, ccw_angle_cmp, segment_intersection, Point2, Rotation, SegIntersection, Segment,
    ToleranceConfig, Vector2,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub from: usize,
    pub to: usize,
    /// Intermediate points; empty means a straight segment.
    pub via: Vec<Point2<S>>,
}

impl<S: Scalar> Edge<S> {
    pub fn straight(from: usize, to: usize) -> Self {
        Edge {
            from,
            to,
            via: Vec::new(),
        }
    }

    pub fn is_straight(&self) -> bool {
        self.via.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network<S> {
    pub points: Vec<Point2<S>>,
    pub edges: Vec<Edge<S>>,
}

impl<S: Scalar> Network<S> {
    pub fn new(points: Vec<Point2<S>>, edges: Vec<Edge<S>>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.from >= points.len() || e.to >= points.len() {
                return Err(CoreError::InvalidInput(format!(
                    "edge {i} references a vertex outside 0..{}",
                    points.len()
                )));
            }
        }
        Ok(Network { points, edges })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.points.len()];
        for e in &self.edges {
            d[e.from] += 1;
            d[e.to] += 1;
        }
        d
    }

    /// Per-vertex list of (edge index, true when the vertex is `from`).
    pub fn incidence(&self) -> Vec<Vec<(usize, bool)>> {
        let mut inc = vec![Vec::new(); self.points.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.from].push((i, true));
            inc[e.to].push((i, false));
        }
        inc
    }

    /// Vertex chain of an edge, endpoints included.
    pub fn edge_chain(&self, e: usize) -> Vec<Point2<S>> {
        let edge = &self.edges[e];
        let mut chain = Vec::with_capacity(edge.via.len() + 2);
        chain.push(self.points[edge.from].clone());
        chain.extend(edge.via.iter().cloned());
        chain.push(self.points[edge.to].clone());
        chain
    }

    pub fn edge_length(&self, e: usize) -> Result<S> {
        let chain = self.edge_chain(e);
        let mut acc = S::zero();
        for w in chain.windows(2) {
            acc = acc + crate::geometry::vector_norm(&w[0].to(&w[1]))?;
        }
        Ok(acc)
    }

    /// Total length: sum of per-edge polyline lengths.
    pub fn length(&self) -> Result<S> {
        let mut acc = S::zero();
        for e in 0..self.edges.len() {
            acc = acc + self.edge_length(e)?;
        }
        Ok(acc)
    }

    /// Straight segments of all edges (polylines contribute their pieces).
    pub fn all_segments(&self) -> Vec<(usize, Segment<S>)> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            let chain = self.edge_chain(e);
            for w in chain.windows(2) {
                out.push((e, Segment::new(w[0].clone(), w[1].clone())));
            }
        }
        out
    }

    /// Direction of the first polyline piece leaving vertex `v` along edge `e`.
    pub fn outgoing_dir(&self, v: usize, e: usize) -> Vector2<S> {
        let chain = self.edge_chain(e);
        if self.edges[e].from == v {
            chain[0].to(&chain[1])
        } else {
            chain[chain.len() - 1].to(&chain[chain.len() - 2])
        }
    }

    pub fn apply_rotation(&self, rot: &Rotation<S>) -> Network<S> {
        Network {
            points: self.points.iter().map(|p| rot.apply_point(p)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    via: e.via.iter().map(|p| rot.apply_point(p)).collect(),
                })
                .collect(),
        }
    }

    pub fn translate(&self, v: &Vector2<S>) -> Network<S> {
        Network {
            points: self.points.iter().map(|p| p.add(v)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    via: e.via.iter().map(|p| p.add(v)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Network<f64> {
        Network {
            points: self.points.iter().map(|p| p.to_f64()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    via: e.via.iter().map(|p| p.to_f64()).collect(),
                })
                .collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.points.is_empty() {
            return true;
        }
        let inc = self.incidence();
        let mut seen = vec![false; self.points.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(e, _) in &inc[v] {
                for u in [self.edges[e].from, self.edges[e].to] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    JunctionOrder,
    Angle,
    Straightness,
    Crossing,
    Loop,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::JunctionOrder => "junction-order",
            ViolationKind::Angle => "angle",
            ViolationKind::Straightness => "straightness",
            ViolationKind::Crossing => "crossing",
            ViolationKind::Loop => "loop",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    /// Numeric size of the defect where one makes sense (radians for angle
    /// violations).
    pub residual: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MinimalityCertificate {
    pub is_minimal: bool,
    pub violations: Vec<Violation>,
    /// Largest junction-balance defect ‖u₁+u₂+u₃‖ observed.
    pub max_balance_residual: f64,
    pub junctions: usize,
    pub endpoints: usize,
}

/// Certify the defining conditions of a minimal network: straight embedded
/// edges meeting only at shared vertices, vertex orders in {1, 3}, and
/// zero-sum unit tangents at every junction.
pub fn check_minimal<S: Scalar>(
    net: &Network<S>,
    tol: &ToleranceConfig<S>,
) -> Result<MinimalityCertificate> {
    if net.points.is_empty() || net.edges.is_empty() {
        return Err(CoreError::InvalidInput(
            "network must have at least one vertex and one edge".into(),
        ));
    }
    // Geometric degeneracies are malformed input, not minimality violations.
    for i in 0..net.points.len() {
        for j in (i + 1)..net.points.len() {
            if net.points[i].approx_eq(&net.points[j], &tol.eps_len) {
                return Err(CoreError::InvalidInput(format!(
                    "vertices {i} and {j} coincide"
                )));
            }
        }
    }
    for e in 0..net.edges.len() {
        let chain = net.edge_chain(e);
        for w in chain.windows(2) {
            if w[0].approx_eq(&w[1], &tol.eps_len) {
                return Err(CoreError::InvalidInput(format!(
                    "edge {e} contains a zero-length piece"
                )));
            }
        }
    }

    let mut violations = Vec::new();
    for (e, edge) in net.edges.iter().enumerate() {
        if edge.from == edge.to {
            violations.push(Violation {
                kind: ViolationKind::Loop,
                detail: format!("edge {e} is a loop at vertex {}", edge.from),
                residual: None,
            });
        }
        if !edge.is_straight() {
            violations.push(Violation {
                kind: ViolationKind::Straightness,
                detail: format!("edge {e} is a polyline with {} bend(s)", edge.via.len()),
                residual: None,
            });
        }
    }

    let degrees = net.degrees();
    let mut junctions = 0usize;
    let mut endpoints = 0usize;
    for (v, &d) in degrees.iter().enumerate() {
        match d {
            1 => endpoints += 1,
            3 => junctions += 1,
            _ => violations.push(Violation {
                kind: ViolationKind::JunctionOrder,
                detail: format!("vertex {v} has order {d}, expected 1 or 3"),
                residual: None,
            }),
        }
    }

    // Junction balance: unit tangents into the network sum to zero.
    let inc = net.incidence();
    let mut max_balance = 0.0f64;
    for (v, list) in inc.iter().enumerate() {
        if list.len() != 3 {
            continue;
        }
        let mut sum = Vector2::<S>::zero();
        for &(e, _) in list {
            let d = net.outgoing_dir(v, e);
            match d.unit() {
                Some(u) => sum = sum.add(&u),
                None => {
                    return Err(CoreError::ExactArithmetic(format!(
                        "edge {e} direction has no representable unit vector"
                    )))
                }
            }
        }
        let res_sq = sum.norm_sq();
        let residual = res_sq.to_f64().max(0.0).sqrt();
        max_balance = max_balance.max(residual);
        // ‖Σu‖ ≤ eps_angle, compared in squares so the exact model needs no
        // square root.
        if res_sq > tol.eps_angle.clone() * tol.eps_angle.clone() {
            violations.push(Violation {
                kind: ViolationKind::Angle,
                detail: format!("junction at vertex {v} is unbalanced"),
                residual: Some(residual),
            });
        }
    }

    // Embeddedness: any two segments may only touch at a shared vertex.
    let segs = net.all_segments();
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|(_, s)| {
            let (a, b) = (s.a.to_f64(), s.b.to_f64());
            [a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y)]
        })
        .collect();
    let pad = tol.eps_len.to_f64().max(1e-12);
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            if boxes[i][2] + pad < boxes[j][0]
                || boxes[j][2] + pad < boxes[i][0]
                || boxes[i][3] + pad < boxes[j][1]
                || boxes[j][3] + pad < boxes[i][1]
            {
                continue;
            }
            let (ei, si) = &segs[i];
            let (ej, sj) = &segs[j];
            match segment_intersection(si, sj, tol) {
                SegIntersection::Empty => {}
                SegIntersection::Overlap(_) => violations.push(Violation {
                    kind: ViolationKind::Crossing,
                    detail: format!("edges {ei} and {ej} overlap along a segment"),
                    residual: None,
                }),
                SegIntersection::Point(p) => {
                    if !contact_allowed(net, *ei, *ej, i, j, &segs, &p, tol) {
                        violations.push(Violation {
                            kind: ViolationKind::Crossing,
                            detail: format!(
                                "edges {ei} and {ej} meet away from a shared vertex, near ({}, {})",
                                p.x.to_f64(),
                                p.y.to_f64()
                            ),
                            residual: None,
                        });
                    }
                }
            }
        }
    }

    Ok(MinimalityCertificate {
        is_minimal: violations.is_empty(),
        violations,
        max_balance_residual: max_balance,
        junctions,
        endpoints,
    })
}

/// A point contact between two polyline pieces is legitimate when it happens
/// at a shared network vertex, or at the shared internal joint of the same
/// polyline's consecutive pieces.
fn contact_allowed<S: Scalar>(
    net: &Network<S>,
    ei: usize,
    ej: usize,
    segi: usize,
    segj: usize,
    segs: &[(usize, Segment<S>)],
    p: &Point2<S>,
    tol: &ToleranceConfig<S>,
) -> bool {
    if ei == ej {
        // Consecutive pieces of one polyline share a joint.
        return segj == segi + 1 && p.approx_eq(&segs[segi].1.b, &tol.eps_len);
    }
    let (a, b) = (&net.edges[ei], &net.edges[ej]);
    for vi in [a.from, a.to] {
        for vj in [b.from, b.to] {
            if vi == vj && p.approx_eq(&net.points[vi], &tol.eps_len) {
                return true;
            }
        }
    }
    false
}

/// Rotation after which every edge direction lies in {±g₁, ±g₂, ±g₃},
/// normalized to angle in (−π/6, π/6]. Errors with `NotAlignable` when no
/// such rotation exists.
pub fn canonical_rotation<S: Scalar>(
    net: &Network<S>,
    tol: &ToleranceConfig<S>,
) -> Result<Rotation<S>> {
    if net.edges.is_empty() {
        return Err(CoreError::InvalidInput("network has no edges".into()));
    }
    let first = net.edge_chain(0);
    let d0 = first[0].to(&first[1]);
    let u = d0.unit().ok_or_else(|| {
        CoreError::ExactArithmetic("first edge direction has no representable unit vector".into())
    })?;
    let [g1, g2, g3] = generators::<S>();
    let targets = [
        g1.clone(),
        g2.clone(),
        g3.clone(),
        g1.neg(),
        g2.neg(),
        g3.neg(),
    ];
    let mut best: Option<Rotation<S>> = None;
    for w in &targets {
        // The rotation taking u to w: cos = u·w, sin = u×w.
        let rot = Rotation::from_cos_sin(u.dot(w), u.cross(w));
        if rotation_aligns(net, &rot, tol) {
            let theta = rot.angle();
            const SIXTH: f64 = std::f64::consts::PI / 6.0;
            if theta > -SIXTH - 1e-12 && theta <= SIXTH + 1e-12 {
                best = Some(rot);
                break;
            }
            if best.is_none() {
                best = Some(rot);
            }
        }
    }
    best.ok_or_else(|| {
        CoreError::NotAlignable(
            "no rotation brings every edge parallel to a lattice direction".into(),
        )
    })
}

fn rotation_aligns<S: Scalar>(
    net: &Network<S>,
    rot: &Rotation<S>,
    tol: &ToleranceConfig<S>,
) -> bool {
    let gens = generators::<S>();
    for e in 0..net.edges.len() {
        let chain = net.edge_chain(e);
        for w in chain.windows(2) {
            let d = rot.apply_vec(&w[0].to(&w[1]));
            // Parallel to some gᵢ: |d × gᵢ|² ≤ eps²·|d|² (gᵢ are unit).
            let ok = gens.iter().any(|g| {
                let c = d.cross(g);
                c.clone() * c <= tol.eps_angle.clone() * tol.eps_angle.clone() * d.norm_sq()
            });
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Lattice direction index (0, 1, 2 for g₁, g₂, g₃) and sign of a vector
/// already aligned within `eps_angle`. `None` when not aligned.
pub fn aligned_direction<S: Scalar>(
    d: &Vector2<S>,
    tol: &ToleranceConfig<S>,
) -> Option<(usize, i8)> {
    let gens = generators::<S>();
    for (i, g) in gens.iter().enumerate() {
        let c = d.cross(g);
        if c.clone() * c <= tol.eps_angle.clone() * tol.eps_angle.clone() * d.norm_sq() {
            let dot = d.dot(g);
            if dot.is_positive() {
                return Some((i, 1));
            } else if dot.is_negative() {
                return Some((i, -1));
            }
        }
    }
    None
}

// --- Honeycomb generator -------------------------------------------------

/// Honeycomb lattice vertex: sublattice tag (0 or 1) and cell coordinates.
/// Sublattice 0 sits at n·(3/2, √3/2) + m·(3/2, −√3/2); sublattice 1 is
/// shifted by (1, 0). Every edge has unit length and lattice direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct HexVertex {
    tag: u8,
    n: i32,
    m: i32,
}

impl HexVertex {
    fn neighbors(&self) -> [HexVertex; 3] {
        let (n, m) = (self.n, self.m);
        if self.tag == 0 {
            // A(n,m) + g₁ = B(n,m); + g₂ = B(n−1,m); + g₃ = B(n,m−1)
            [
                HexVertex { tag: 1, n, m },
                HexVertex { tag: 1, n: n - 1, m },
                HexVertex { tag: 1, n, m: m - 1 },
            ]
        } else {
            [
                HexVertex { tag: 0, n, m },
                HexVertex { tag: 0, n: n + 1, m },
                HexVertex { tag: 0, n, m: m + 1 },
            ]
        }
    }

    fn embed<S: Scalar>(&self) -> Point2<S> {
        let three_half = S::from_ratio(3, 2);
        let half_s3 = S::sqrt3() * S::from_ratio(1, 2);
        let n = S::from_int(self.n as i64);
        let m = S::from_int(self.m as i64);
        let mut x = (n.clone() + m.clone()) * three_half;
        let y = (n - m) * half_s3;
        if self.tag == 1 {
            x = x + S::one();
        }
        Point2::new(x, y)
    }
}

/// Random connected piece of the unit honeycomb lattice with roughly
/// `junction_budget` triple junctions; deterministic in `seed`. Every output
/// passes `check_minimal`: the closure step promotes any lattice vertex with
/// two chosen neighbors, so no degree-2 vertex survives.
pub fn generate_honeycomb_network<S: Scalar>(seed: u64, junction_budget: u32) -> Network<S> {
    let origin = HexVertex { tag: 0, n: 0, m: 0 };
    if junction_budget == 0 {
        let a: Point2<S> = origin.embed();
        let b: Point2<S> = HexVertex { tag: 1, n: 0, m: 0 }.embed();
        return Network {
            points: vec![a, b],
            edges: vec![Edge::straight(0, 1)],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut junctions: BTreeSet<HexVertex> = BTreeSet::new();
    junctions.insert(origin);
    while junctions.len() < junction_budget as usize {
        let frontier: Vec<HexVertex> = {
            let mut f = BTreeSet::new();
            for j in &junctions {
                for nb in j.neighbors() {
                    if !junctions.contains(&nb) {
                        f.insert(nb);
                    }
                }
            }
            f.into_iter().collect()
        };
        let pick = frontier[rng.gen_range(0..frontier.len())];
        junctions.insert(pick);
    }
    // Closure: a vertex with ≥ 2 chosen neighbors would otherwise end up
    // with degree 2. Each promotion shrinks the boundary edge cut, so this
    // terminates quickly.
    loop {
        let mut promote = None;
        let mut candidates: BTreeSet<HexVertex> = BTreeSet::new();
        for j in &junctions {
            for nb in j.neighbors() {
                if !junctions.contains(&nb) {
                    candidates.insert(nb);
                }
            }
        }
        for c in candidates {
            let in_count = c
                .neighbors()
                .iter()
                .filter(|nb| junctions.contains(nb))
                .count();
            if in_count >= 2 {
                promote = Some(c);
                break;
            }
        }
        match promote {
            Some(c) => {
                junctions.insert(c);
            }
            None => break,
        }
    }
    // Vertex set: junctions plus their outside neighbors (the tips).
    let mut vertex_set: BTreeSet<HexVertex> = junctions.clone();
    for j in &junctions {
        for nb in j.neighbors() {
            vertex_set.insert(nb);
        }
    }
    let verts: Vec<HexVertex> = vertex_set.into_iter().collect();
    let index = |v: &HexVertex| verts.binary_search(v).expect("vertex indexed");
    // Each lattice edge joins a sublattice-0 vertex to a sublattice-1 vertex;
    // emit it once, oriented 0 → 1, when either end is a junction.
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in &junctions {
        for nb in j.neighbors() {
            let (a, b) = if j.tag == 0 { (*j, nb) } else { (nb, *j) };
            edge_set.insert((index(&a), index(&b)));
        }
    }
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
    Network {
        points: verts.iter().map(|v| v.embed()).collect(),
        edges: edges
            .into_iter()
            .map(|(a, b)| Edge::straight(a, b))
            .collect(),
    }
}

/// Sort a junction's incident edges counterclockwise by outgoing direction.
pub fn sort_incident_ccw<S: Scalar>(net: &Network<S>, v: usize, list: &mut Vec<(usize, bool)>) {
    list.sort_by(|&(e1, _), &(e2, _)| {
        ccw_angle_cmp(&net.outgoing_dir(v, e1), &net.outgoing_dir(v, e2))
    });
}
