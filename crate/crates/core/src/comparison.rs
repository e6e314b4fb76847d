//! Constructive length-comparison certificates.
//!
//! Every comparison builds an explicit competitor current carrying the
//! reference network's multiplicities and then verifies, numerically or
//! exactly, the chain L(ref) ≤ 𝐌(T) ≤ L(comp) together with boundary
//! equality. Four entry points cover progressively looser relationships
//! between the two graphs: identical graphs, an embedded homeomorphic copy,
//! a copy found automatically inside a richer graph after collapsing chosen
//! subgraphs, and a poorer graph obtained by collapsing subgraphs of the
//! reference — the last one transferring multiplicities across the quotient
//! and checking the group cancellation sums that make the transfer sound.

use std::collections::{BTreeMap, BTreeSet};

use crate::currents::{
    boundary, induce_current, induce_current_lenient, mass, BoundaryMeasure, CurrentPiece,
    GroupElement, LatticeCurrent,
};
use crate::error::{CoreError, Result};
use crate::geometry::{Point2, Segment, ToleranceConfig};
use crate::network::{aligned_direction, Edge, Network};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ComparisonCertificate<S> {
    pub reference_length: S,
    pub competitor_length: S,
    pub competitor_mass: S,
    pub boundary_match: bool,
    pub verdict: bool,
    pub construction_log: Vec<String>,
}

/// A walk through competitor edges: (edge index, traversed forward?).
pub type EdgePath = Vec<(usize, bool)>;

/// Subgraph selected for collapse: explicit vertex and edge index sets.
#[derive(Clone, Debug)]
pub struct SubgraphSpec {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Collapse instructions plus the endpoint pairing that anchors every
/// comparison. For the richer-competitor search the subgraphs live in the
/// competitor; for the poorer-competitor transfer they live in the
/// reference.
#[derive(Clone, Debug)]
pub struct QuotientSpec {
    pub collapsed: Vec<SubgraphSpec>,
    /// (reference endpoint vertex, competitor vertex) pairs.
    pub endpoint_map: Vec<(usize, usize)>,
}

fn certificate<S: Scalar>(
    reference_length: S,
    competitor_length: S,
    competitor_mass: S,
    boundary_match: bool,
    eps: &S,
    mut log: Vec<String>,
) -> ComparisonCertificate<S> {
    let mass_le_len =
        competitor_mass.clone() <= competitor_length.clone() + eps.clone();
    let ref_le_mass =
        reference_length.clone() <= competitor_mass.clone() + eps.clone();
    let verdict = boundary_match && mass_le_len && ref_le_mass;
    log.push(format!(
        "verify: boundary_match={boundary_match}, mass≤length={mass_le_len}, ref≤mass={ref_le_mass}"
    ));
    ComparisonCertificate {
        reference_length,
        competitor_length,
        competitor_mass,
        boundary_match,
        verdict,
        construction_log: log,
    }
}

fn boundaries_match<S: Scalar>(
    a: &BoundaryMeasure<S>,
    b: &BoundaryMeasure<S>,
    eps: &S,
) -> bool {
    if a.atoms.len() != b.atoms.len() {
        return false;
    }
    let mut used = vec![false; b.atoms.len()];
    'outer: for atom in &a.atoms {
        for (j, other) in b.atoms.iter().enumerate() {
            if !used[j]
                && atom.point.approx_eq(&other.point, eps)
                && atom.coefficient == other.coefficient
            {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Current whose pieces are the competitor's polyline pieces, each carrying
/// the signed group multiplicity assigned to its edge.
fn transferred_current<S: Scalar>(
    comp: &Network<S>,
    edge_mults: &[GroupElement],
    tol: &ToleranceConfig<S>,
) -> Result<LatticeCurrent<S>> {
    let mut pieces = Vec::new();
    for (e, m) in edge_mults.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let chain = comp.edge_chain(e);
        for w in chain.windows(2) {
            if w[0].approx_eq(&w[1], &tol.eps_len) {
                continue; // degenerate piece carries no mass or boundary
            }
            let dir = w[0].to(&w[1]);
            let orientation = dir.unit().ok_or_else(|| {
                CoreError::ExactArithmetic(format!(
                    "competitor edge {e} has a piece whose length is not representable"
                ))
            })?;
            pieces.push(CurrentPiece {
                segment: Segment::new(w[0].clone(), w[1].clone()),
                orientation,
                multiplicity: *m,
            });
        }
    }
    Ok(LatticeCurrent { pieces })
}

fn mult_name(m: &GroupElement) -> String {
    match (m.n, m.m) {
        (1, 0) => "g1".into(),
        (0, 1) => "g2".into(),
        (-1, -1) => "g3".into(),
        (-1, 0) => "-g1".into(),
        (0, -1) => "-g2".into(),
        (1, 1) => "-g3".into(),
        (n, mm) => format!("{n}·g1+{mm}·g2"),
    }
}

/// Compare a competitor on the identical graph with identical endpoint
/// positions; interior vertices may move and edges may become polylines.
pub fn compare_same_topology<S: Scalar>(
    refn: &Network<S>,
    comp: &Network<S>,
    tol: &ToleranceConfig<S>,
) -> Result<ComparisonCertificate<S>> {
    if refn.points.len() != comp.points.len() || refn.edges.len() != comp.edges.len() {
        return Err(CoreError::InvalidComparison(format!(
            "graph mismatch: reference has {} vertices / {} edges, competitor {} / {}",
            refn.points.len(),
            refn.edges.len(),
            comp.points.len(),
            comp.edges.len()
        )));
    }
    for (i, (a, b)) in refn.edges.iter().zip(&comp.edges).enumerate() {
        if a.from != b.from || a.to != b.to {
            return Err(CoreError::InvalidComparison(format!(
                "edge {i} connects {}–{} in the reference but {}–{} in the competitor",
                a.from, a.to, b.from, b.to
            )));
        }
    }
    let degrees = refn.degrees();
    for (v, &d) in degrees.iter().enumerate() {
        if d == 1 && !refn.points[v].approx_eq(&comp.points[v], &tol.eps_len) {
            return Err(CoreError::InvalidComparison(format!(
                "endpoint {v} moved; competitors must keep endpoint positions"
            )));
        }
    }

    let ind = induce_current(refn, tol)?;
    let comp_rot = comp.apply_rotation(&ind.rotation);
    let mut log = vec![format!(
        "aligned reference by rotation θ = {:.6} rad",
        ind.rotation.angle()
    )];
    let mut mults = Vec::with_capacity(refn.edges.len());
    for e in 0..refn.edges.len() {
        let chain = ind.rotated_network.edge_chain(e);
        let d = chain[0].to(&chain[1]);
        let (i, sign) = aligned_direction(&d, tol).ok_or_else(|| {
            CoreError::NotAlignable(format!("edge {e} lost alignment after rotation"))
        })?;
        let m = GroupElement::generator(i).scale(sign as i64);
        log.push(format!(
            "edge {e}: transferred multiplicity {} onto the competitor polyline",
            mult_name(&m)
        ));
        mults.push(m);
    }
    let t = transferred_current(&comp_rot, &mults, tol)?;
    let ref_boundary = boundary(&ind.current, tol);
    let comp_boundary = boundary(&t, tol);
    let bm = boundaries_match(&ref_boundary, &comp_boundary, &tol.eps_len);
    Ok(certificate(
        refn.length()?,
        comp.length()?,
        mass(&t)?,
        bm,
        &tol.eps_len,
        log,
    ))
}

/// Compare against a competitor containing an embedded homeomorphic copy of
/// the reference graph, described by one edge-path per reference edge.
pub fn compare_embedded_copy<S: Scalar>(
    refn: &Network<S>,
    comp: &Network<S>,
    edge_paths: &[EdgePath],
    tol: &ToleranceConfig<S>,
) -> Result<ComparisonCertificate<S>> {
    if edge_paths.len() != refn.edges.len() {
        return Err(CoreError::InvalidComparison(format!(
            "embedding must give one path per reference edge ({} given, {} needed)",
            edge_paths.len(),
            refn.edges.len()
        )));
    }
    let mut vmap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edge_used: BTreeSet<usize> = BTreeSet::new();
    let mut interior_used: BTreeSet<usize> = BTreeSet::new();
    let mut all_vertices_per_path: Vec<Vec<usize>> = Vec::new();

    for (e, path) in edge_paths.iter().enumerate() {
        if path.is_empty() {
            return Err(CoreError::InvalidComparison(format!(
                "reference edge {e} has an empty image path"
            )));
        }
        let mut verts = Vec::with_capacity(path.len() + 1);
        for (k, &(ce, fwd)) in path.iter().enumerate() {
            if ce >= comp.edges.len() {
                return Err(CoreError::InvalidComparison(format!(
                    "path of reference edge {e} uses competitor edge {ce}, out of range"
                )));
            }
            if !edge_used.insert(ce) {
                return Err(CoreError::InvalidComparison(format!(
                    "competitor edge {ce} is used by two image paths"
                )));
            }
            let (s, t) = if fwd {
                (comp.edges[ce].from, comp.edges[ce].to)
            } else {
                (comp.edges[ce].to, comp.edges[ce].from)
            };
            if k == 0 {
                verts.push(s);
            } else if *verts.last().unwrap() != s {
                return Err(CoreError::InvalidComparison(format!(
                    "path of reference edge {e} is not connected at step {k}"
                )));
            }
            verts.push(t);
        }
        let unique: BTreeSet<usize> = verts.iter().copied().collect();
        if unique.len() != verts.len() {
            return Err(CoreError::InvalidComparison(format!(
                "image path of reference edge {e} revisits a competitor vertex"
            )));
        }
        let (first, last) = (verts[0], *verts.last().unwrap());
        for (rv, cv) in [(refn.edges[e].from, first), (refn.edges[e].to, last)] {
            match vmap.get(&rv) {
                Some(&prev) if prev != cv => {
                    return Err(CoreError::InvalidComparison(format!(
                        "reference vertex {rv} maps to both competitor vertices {prev} and {cv}"
                    )))
                }
                _ => {
                    vmap.insert(rv, cv);
                }
            }
        }
        for &iv in &verts[1..verts.len() - 1] {
            if !interior_used.insert(iv) {
                return Err(CoreError::InvalidComparison(format!(
                    "competitor vertex {iv} is interior to two image paths"
                )));
            }
        }
        all_vertices_per_path.push(verts);
    }

    // Injectivity and interior/image disjointness.
    let images: BTreeSet<usize> = vmap.values().copied().collect();
    if images.len() != vmap.len() {
        return Err(CoreError::InvalidComparison(
            "two reference vertices share a competitor image".into(),
        ));
    }
    if let Some(bad) = interior_used.intersection(&images).next() {
        return Err(CoreError::InvalidComparison(format!(
            "competitor vertex {bad} is both a vertex image and a path interior"
        )));
    }
    for v in 0..refn.points.len() {
        if !vmap.contains_key(&v) {
            return Err(CoreError::InvalidComparison(format!(
                "reference vertex {v} is untouched by the embedding"
            )));
        }
    }

    // Restricted competitor on the reference graph.
    let points: Vec<Point2<S>> = (0..refn.points.len())
        .map(|v| comp.points[vmap[&v]].clone())
        .collect();
    let mut edges = Vec::with_capacity(refn.edges.len());
    let mut restricted_log = Vec::new();
    for (e, path) in edge_paths.iter().enumerate() {
        let mut pts: Vec<Point2<S>> = Vec::new();
        for &(ce, fwd) in path {
            let mut chain = comp.edge_chain(ce);
            if !fwd {
                chain.reverse();
            }
            if pts.is_empty() {
                pts.extend(chain);
            } else {
                pts.extend(chain.into_iter().skip(1));
            }
        }
        restricted_log.push(format!(
            "reference edge {e} → competitor path {:?}",
            path.iter()
                .map(|&(ce, fwd)| if fwd { ce as i64 } else { -(ce as i64) - 1 })
                .collect::<Vec<_>>()
        ));
        let via = pts[1..pts.len() - 1].to_vec();
        edges.push(Edge {
            from: refn.edges[e].from,
            to: refn.edges[e].to,
            via,
        });
    }
    let restricted = Network { points, edges };
    let restricted_len = restricted.length()?;
    let base = compare_same_topology(refn, &restricted, tol)?;
    let full_len = comp.length()?;
    let contained = restricted_len.clone() <= full_len.clone() + tol.eps_len.clone();
    let mut log = restricted_log;
    log.extend(base.construction_log.clone());
    log.push(format!(
        "restricted copy length {} ≤ competitor length {}: {contained}",
        restricted_len.to_f64(),
        full_len.to_f64()
    ));
    Ok(ComparisonCertificate {
        reference_length: base.reference_length,
        competitor_length: full_len,
        competitor_mass: base.competitor_mass,
        boundary_match: base.boundary_match,
        verdict: base.verdict && contained,
        construction_log: log,
    })
}

// --- Embedded-copy search in a richer competitor --------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum QNode {
    Plain(usize),
    Coll(usize),
}

#[derive(Clone, Debug)]
struct Chain {
    a: QNode,
    b: QNode,
    steps: Vec<(usize, bool)>,
    /// Quotient nodes strictly between consecutive steps.
    interior: Vec<QNode>,
}

impl Chain {
    fn other(&self, n: QNode) -> QNode {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

fn validate_subgraphs<S: Scalar>(
    host: &Network<S>,
    collapsed: &[SubgraphSpec],
) -> Result<(Vec<Option<usize>>, Vec<Option<usize>>)> {
    let mut vertex_owner: Vec<Option<usize>> = vec![None; host.points.len()];
    let mut edge_owner: Vec<Option<usize>> = vec![None; host.edges.len()];
    for (i, sub) in collapsed.iter().enumerate() {
        if sub.vertices.is_empty() {
            return Err(CoreError::HypothesisViolation(format!(
                "collapsed subgraph {i} has no vertices"
            )));
        }
        let vset: BTreeSet<usize> = sub.vertices.iter().copied().collect();
        for &v in &sub.vertices {
            if v >= host.points.len() {
                return Err(CoreError::InvalidInput(format!(
                    "collapsed subgraph {i} lists vertex {v}, out of range"
                )));
            }
            if vertex_owner[v].replace(i).is_some() {
                return Err(CoreError::HypothesisViolation(format!(
                    "vertex {v} belongs to two collapsed subgraphs"
                )));
            }
        }
        for &e in &sub.edges {
            if e >= host.edges.len() {
                return Err(CoreError::InvalidInput(format!(
                    "collapsed subgraph {i} lists edge {e}, out of range"
                )));
            }
            if !vset.contains(&host.edges[e].from) || !vset.contains(&host.edges[e].to) {
                return Err(CoreError::HypothesisViolation(format!(
                    "edge {e} of collapsed subgraph {i} leaves its vertex set"
                )));
            }
            if edge_owner[e].replace(i).is_some() {
                return Err(CoreError::HypothesisViolation(format!(
                    "edge {e} belongs to two collapsed subgraphs"
                )));
            }
        }
        // Connectivity over the listed edges only.
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack = vec![sub.vertices[0]];
        seen.insert(sub.vertices[0]);
        while let Some(v) = stack.pop() {
            for &e in &sub.edges {
                let (a, b) = (host.edges[e].from, host.edges[e].to);
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        if !vset.iter().all(|v| seen.contains(v)) {
            return Err(CoreError::HypothesisViolation(format!(
                "collapsed subgraph {i} is not connected"
            )));
        }
    }
    // An unlisted edge joining two vertices of one subgraph would become a
    // loop in the quotient.
    for (e, edge) in host.edges.iter().enumerate() {
        if edge_owner[e].is_none() {
            if edge.from == edge.to {
                return Err(CoreError::HypothesisViolation(format!(
                    "edge {e} is a loop"
                )));
            }
            if let (Some(i), Some(j)) = (vertex_owner[edge.from], vertex_owner[edge.to]) {
                if i == j {
                    return Err(CoreError::HypothesisViolation(format!(
                        "edge {e} joins two vertices of collapsed subgraph {i} but is not listed in it"
                    )));
                }
            }
        }
    }
    Ok((vertex_owner, edge_owner))
}

/// Vertex-simple path between two vertices using only the subgraph's edges,
/// avoiding `banned` vertices (endpoints exempt). Paths are enumerated
/// depth-first in index order; the callback returns true to accept.
fn for_each_path<S: Scalar>(
    host: &Network<S>,
    sub: &SubgraphSpec,
    from: usize,
    to: usize,
    banned: &BTreeSet<usize>,
    f: &mut dyn FnMut(&[(usize, bool)], &BTreeSet<usize>) -> bool,
) -> bool {
    fn recurse<S: Scalar>(
        host: &Network<S>,
        sub: &SubgraphSpec,
        cur: usize,
        to: usize,
        banned: &BTreeSet<usize>,
        path: &mut Vec<(usize, bool)>,
        visited: &mut BTreeSet<usize>,
        f: &mut dyn FnMut(&[(usize, bool)], &BTreeSet<usize>) -> bool,
    ) -> bool {
        if cur == to {
            return f(path, visited);
        }
        for &e in &sub.edges {
            let (a, b) = (host.edges[e].from, host.edges[e].to);
            let (next, fwd) = if a == cur {
                (b, true)
            } else if b == cur {
                (a, false)
            } else {
                continue;
            };
            if visited.contains(&next) || (banned.contains(&next) && next != to) {
                continue;
            }
            if path.iter().any(|&(pe, _)| pe == e) {
                continue;
            }
            visited.insert(next);
            path.push((e, fwd));
            if recurse(host, sub, next, to, banned, path, visited, f) {
                return true;
            }
            path.pop();
            visited.remove(&next);
        }
        false
    }
    let mut visited = BTreeSet::new();
    visited.insert(from);
    recurse(host, sub, from, to, banned, &mut Vec::new(), &mut visited, f)
}

fn first_path<S: Scalar>(
    host: &Network<S>,
    sub: &SubgraphSpec,
    from: usize,
    to: usize,
) -> Option<Vec<(usize, bool)>> {
    let mut found = None;
    for_each_path(host, sub, from, to, &BTreeSet::new(), &mut |p, _| {
        found = Some(p.to_vec());
        true
    });
    found
}

/// A branch vertex w plus three pairwise vertex-disjoint (except w) paths
/// w→attachment inside the subgraph. Arms are returned attachment→w.
fn tripod_in_subgraph<S: Scalar>(
    host: &Network<S>,
    sub: &SubgraphSpec,
    attachments: [usize; 3],
) -> Option<(usize, [Vec<(usize, bool)>; 3])> {
    let mut verts = sub.vertices.clone();
    verts.sort_unstable();
    for &w in &verts {
        let [a1, a2, a3] = attachments;
        let mut result: Option<(usize, [Vec<(usize, bool)>; 3])> = None;
        for_each_path(host, sub, a1, w, &BTreeSet::new(), &mut |p1, v1| {
            let mut banned2: BTreeSet<usize> = v1.clone();
            banned2.remove(&w);
            banned2.remove(&a2); // only as start; interior ban still applies
            let p1_owned = p1.to_vec();
            for_each_path(host, sub, a2, w, &banned2, &mut |p2, v2| {
                if v2.intersection(v1).any(|x| *x != w) {
                    return false;
                }
                let mut banned3: BTreeSet<usize> = v1.union(v2).copied().collect();
                banned3.remove(&w);
                banned3.remove(&a3);
                let p2_owned = p2.to_vec();
                let mut done = false;
                for_each_path(host, sub, a3, w, &banned3, &mut |p3, v3| {
                    if v3.iter().any(|x| *x != w && (v1.contains(x) || v2.contains(x))) {
                        return false;
                    }
                    result = Some((
                        w,
                        [p1_owned.clone(), p2_owned.clone(), p3.to_vec()],
                    ));
                    done = true;
                    true
                });
                done
            });
            result.is_some()
        });
        if result.is_some() {
            return result;
        }
    }
    None
}

struct CopySearch<'a, S> {
    refn: &'a Network<S>,
    ref_deg: Vec<usize>,
    chains: &'a [Chain],
    chain_adj: BTreeMap<QNode, Vec<usize>>,
    sq_deg: BTreeMap<QNode, usize>,
    /// (edge, start side is `from`?) in processing order.
    edge_order: Vec<(usize, bool)>,
    rmap: BTreeMap<usize, QNode>,
    image_used: BTreeSet<QNode>,
    chain_used: Vec<bool>,
    reserved: BTreeSet<QNode>,
    /// Per reference edge: SQ path from the processed start side.
    sq_paths: Vec<Vec<(usize, bool)>>,
}

impl<'a, S: Scalar> CopySearch<'a, S> {
    fn solve(&mut self, pos: usize) -> bool {
        if pos == self.edge_order.len() {
            return true;
        }
        let (e, from_side) = self.edge_order[pos];
        let (u, v) = if from_side {
            (self.refn.edges[e].from, self.refn.edges[e].to)
        } else {
            (self.refn.edges[e].to, self.refn.edges[e].from)
        };
        let start = self.rmap[&u];
        let target = self.rmap.get(&v).copied();
        let mut visited = BTreeSet::new();
        visited.insert(start);
        self.extend(pos, e, v, start, target, &mut Vec::new(), &mut visited)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        pos: usize,
        e: usize,
        v_ref: usize,
        cur: QNode,
        target: Option<QNode>,
        path: &mut Vec<(usize, bool)>,
        visited: &mut BTreeSet<QNode>,
    ) -> bool {
        if !path.is_empty() {
            match target {
                Some(t) if cur == t => {
                    if self.commit(pos, e, v_ref, None, path) {
                        return true;
                    }
                }
                None => {
                    let deg_ok = self
                        .sq_deg
                        .get(&cur)
                        .map(|&d| d >= self.ref_deg[v_ref])
                        .unwrap_or(false);
                    if deg_ok && !self.image_used.contains(&cur) && !self.reserved.contains(&cur)
                    {
                        if self.commit(pos, e, v_ref, Some(cur), path) {
                            return true;
                        }
                    }
                }
                _ => {}
            }
            // Never extend through a vertex image.
            if self.image_used.contains(&cur) {
                return false;
            }
        }
        let incident = match self.chain_adj.get(&cur) {
            Some(list) => list.clone(),
            None => return false,
        };
        for ci in incident {
            if self.chain_used[ci] {
                continue;
            }
            let chain = &self.chains[ci];
            let forward = chain.a == cur;
            let w = chain.other(cur);
            if visited.contains(&w) || self.reserved.contains(&w) {
                continue;
            }
            if self.image_used.contains(&w) && target != Some(w) {
                continue;
            }
            self.chain_used[ci] = true;
            path.push((ci, forward));
            visited.insert(w);
            if self.extend(pos, e, v_ref, w, target, path, visited) {
                return true;
            }
            visited.remove(&w);
            path.pop();
            self.chain_used[ci] = false;
        }
        false
    }

    fn commit(
        &mut self,
        pos: usize,
        e: usize,
        v_ref: usize,
        new_image: Option<QNode>,
        path: &[(usize, bool)],
    ) -> bool {
        if let Some(w) = new_image {
            self.rmap.insert(v_ref, w);
            self.image_used.insert(w);
        }
        // Reserve nodes strictly between the endpoints.
        let mut newly_reserved = Vec::new();
        for k in 0..path.len().saturating_sub(1) {
            let (ci, fwd) = path[k];
            let chain = &self.chains[ci];
            let node = if fwd { chain.b } else { chain.a };
            if self.reserved.insert(node) {
                newly_reserved.push(node);
            }
        }
        self.sq_paths[e] = path.to_vec();
        if self.solve(pos + 1) {
            return true;
        }
        self.sq_paths[e].clear();
        for node in newly_reserved {
            self.reserved.remove(&node);
        }
        if let Some(w) = new_image {
            self.rmap.remove(&v_ref);
            self.image_used.remove(&w);
        }
        false
    }
}

/// Search the competitor for an embedded copy of the reference graph after
/// conceptually collapsing the listed competitor subgraphs to points.
/// Returns one competitor edge-path per reference edge, ready for
/// [`compare_embedded_copy`].
pub fn find_embedded_copy<S: Scalar>(
    refn: &Network<S>,
    comp: &Network<S>,
    quotient: &QuotientSpec,
    _tol: &ToleranceConfig<S>,
) -> Result<Vec<EdgePath>> {
    let (vertex_owner, edge_owner) = validate_subgraphs(comp, &quotient.collapsed)?;
    if !refn.is_connected() {
        return Err(CoreError::InvalidComparison(
            "reference network must be connected".into(),
        ));
    }
    let ref_deg = refn.degrees();
    // Anchors: all reference endpoints, mapped to competitor vertices
    // outside every collapsed subgraph.
    let mut anchor_nodes: BTreeMap<usize, QNode> = BTreeMap::new();
    for &(rq, cv) in &quotient.endpoint_map {
        if rq >= refn.points.len() || cv >= comp.points.len() {
            return Err(CoreError::InvalidInput(format!(
                "endpoint pair ({rq}, {cv}) out of range"
            )));
        }
        if ref_deg[rq] != 1 {
            return Err(CoreError::InvalidComparison(format!(
                "reference vertex {rq} in the endpoint map is not an endpoint"
            )));
        }
        if vertex_owner[cv].is_some() {
            return Err(CoreError::HypothesisViolation(format!(
                "matched endpoint image {cv} lies in a collapsed subgraph"
            )));
        }
        if anchor_nodes.insert(rq, QNode::Plain(cv)).is_some() {
            return Err(CoreError::InvalidComparison(format!(
                "reference endpoint {rq} appears twice in the endpoint map"
            )));
        }
    }
    for (v, &d) in ref_deg.iter().enumerate() {
        if d == 1 && !anchor_nodes.contains_key(&v) {
            return Err(CoreError::InvalidComparison(format!(
                "reference endpoint {v} missing from the endpoint map"
            )));
        }
    }

    let node_of = |v: usize| match vertex_owner[v] {
        Some(i) => QNode::Coll(i),
        None => QNode::Plain(v),
    };

    // Quotient edges and degrees.
    let mut qedges: Vec<(QNode, QNode, usize)> = Vec::new();
    for (ce, edge) in comp.edges.iter().enumerate() {
        if edge_owner[ce].is_some() {
            continue;
        }
        let (na, nb) = (node_of(edge.from), node_of(edge.to));
        if na == nb {
            return Err(CoreError::HypothesisViolation(format!(
                "competitor edge {ce} becomes a loop in the quotient"
            )));
        }
        qedges.push((na, nb, ce));
    }
    let mut qadj: BTreeMap<QNode, Vec<usize>> = BTreeMap::new();
    for (i, (a, b, _)) in qedges.iter().enumerate() {
        qadj.entry(*a).or_default().push(i);
        qadj.entry(*b).or_default().push(i);
    }
    let anchors: BTreeSet<QNode> = anchor_nodes.values().copied().collect();
    let kept: BTreeSet<QNode> = qadj
        .keys()
        .filter(|n| qadj[n].len() != 2 || anchors.contains(n))
        .copied()
        .collect();
    for a in &anchors {
        if !qadj.contains_key(a) {
            return Err(CoreError::InvalidComparison(format!(
                "anchored competitor vertex {a:?} has no incident edges"
            )));
        }
    }

    // Chains between kept nodes, smoothing through degree-2 quotient nodes.
    let mut consumed = vec![false; qedges.len()];
    let mut chains: Vec<Chain> = Vec::new();
    for k in &kept {
        for &qi0 in &qadj[k] {
            if consumed[qi0] {
                continue;
            }
            let mut steps = Vec::new();
            let mut interior = Vec::new();
            let mut cur = *k;
            let mut qi = qi0;
            loop {
                consumed[qi] = true;
                let (a, b, ce) = qedges[qi];
                let nxt = if a == cur { b } else { a };
                let fwd = node_of(comp.edges[ce].from) == cur;
                steps.push((ce, fwd));
                if kept.contains(&nxt) {
                    chains.push(Chain {
                        a: *k,
                        b: nxt,
                        steps,
                        interior,
                    });
                    break;
                }
                interior.push(nxt);
                let next_qi = qadj[&nxt]
                    .iter()
                    .copied()
                    .find(|&x| x != qi)
                    .expect("degree-2 node has a second edge");
                cur = nxt;
                qi = next_qi;
            }
        }
    }
    if consumed.iter().any(|c| !c) {
        return Err(CoreError::HypothesisViolation(
            "competitor contains a closed degree-2 curve absent from the reference".into(),
        ));
    }

    let mut chain_adj: BTreeMap<QNode, Vec<usize>> = BTreeMap::new();
    let mut sq_deg: BTreeMap<QNode, usize> = BTreeMap::new();
    for (i, c) in chains.iter().enumerate() {
        chain_adj.entry(c.a).or_default().push(i);
        chain_adj.entry(c.b).or_default().push(i);
        *sq_deg.entry(c.a).or_default() += 1;
        *sq_deg.entry(c.b).or_default() += 1;
    }

    // Edge processing order: breadth-first from the anchors.
    let inc = refn.incidence();
    let mut edge_order = Vec::new();
    let mut edge_seen = vec![false; refn.edges.len()];
    let mut vert_seen = vec![false; refn.points.len()];
    let mut queue: Vec<usize> = anchor_nodes.keys().copied().collect();
    for &q in &queue {
        vert_seen[q] = true;
    }
    let mut qi = 0;
    while qi < queue.len() {
        let u = queue[qi];
        qi += 1;
        for &(e, from_side) in &inc[u] {
            if edge_seen[e] {
                continue;
            }
            edge_seen[e] = true;
            edge_order.push((e, from_side));
            let other = if from_side {
                refn.edges[e].to
            } else {
                refn.edges[e].from
            };
            if !vert_seen[other] {
                vert_seen[other] = true;
                queue.push(other);
            }
        }
    }
    if edge_seen.iter().any(|s| !s) {
        return Err(CoreError::InvalidComparison(
            "reference has edges unreachable from its endpoints".into(),
        ));
    }

    let mut search = CopySearch {
        refn,
        ref_deg: ref_deg.clone(),
        chains: &chains,
        chain_adj,
        sq_deg,
        edge_order,
        rmap: anchor_nodes.clone(),
        image_used: anchors.clone(),
        chain_used: vec![false; chains.len()],
        reserved: BTreeSet::new(),
        sq_paths: vec![Vec::new(); refn.edges.len()],
    };
    if !search.solve(0) {
        return Err(CoreError::HypothesisViolation(
            "no embedded copy of the reference exists under the given collapse".into(),
        ));
    }
    let rmap = search.rmap.clone();
    let mut sq_paths = search.sq_paths.clone();
    // Orient each stored path from the edge's `from` side.
    for &(e, from_side) in &search.edge_order {
        if !from_side {
            let rev: Vec<(usize, bool)> = sq_paths[e]
                .iter()
                .rev()
                .map(|&(ci, fwd)| (ci, !fwd))
                .collect();
            sq_paths[e] = rev;
        }
    }

    // Expand SQ paths to competitor edge paths, resolving collapsed nodes.
    let mut middle_paths: Vec<EdgePath> = Vec::with_capacity(refn.edges.len());
    for e in 0..refn.edges.len() {
        let mut full_steps: Vec<(usize, bool)> = Vec::new();
        let mut between_nodes: Vec<QNode> = Vec::new(); // nodes between steps
        for &(ci, fwd) in &sq_paths[e] {
            let chain = &chains[ci];
            let (steps, interiors, entry_node) = if fwd {
                (chain.steps.clone(), chain.interior.clone(), chain.a)
            } else {
                (
                    chain
                        .steps
                        .iter()
                        .rev()
                        .map(|&(ce, f)| (ce, !f))
                        .collect(),
                    chain.interior.iter().rev().copied().collect(),
                    chain.b,
                )
            };
            if !full_steps.is_empty() {
                between_nodes.push(entry_node);
            }
            for (k, s) in steps.iter().enumerate() {
                if k > 0 {
                    between_nodes.push(interiors[k - 1]);
                }
                full_steps.push(*s);
            }
        }
        // Splice through-paths at collapsed between-nodes.
        let mut expanded: EdgePath = Vec::new();
        for (k, step) in full_steps.iter().enumerate() {
            expanded.push(*step);
            if k + 1 < full_steps.len() {
                if let QNode::Coll(ci) = between_nodes[k] {
                    let arrive = end_vertex(comp, *step);
                    let depart = start_vertex(comp, full_steps[k + 1]);
                    if arrive != depart {
                        let through = first_path(comp, &quotient.collapsed[ci], arrive, depart)
                            .ok_or_else(|| {
                                CoreError::HypothesisViolation(format!(
                                    "no embedded path through collapsed subgraph {ci} between vertices {arrive} and {depart}"
                                ))
                            })?;
                        expanded.extend(through);
                    }
                }
            }
        }
        middle_paths.push(expanded);
    }

    // Resolve collapsed junction images with embedded tripods.
    let mut final_paths = middle_paths;
    let mut coll_junctions: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
    for (rv, node) in &rmap {
        if let QNode::Coll(ci) = node {
            // Which reference edges meet this junction, and at which side.
            for &(e, from_side) in &inc[*rv] {
                coll_junctions.entry(*ci).or_default().push((e, from_side));
            }
        }
    }
    for (ci, edges_here) in &coll_junctions {
        if edges_here.len() != 3 {
            return Err(CoreError::HypothesisViolation(format!(
                "collapsed subgraph {ci} is the image of a vertex of order {}, expected 3",
                edges_here.len()
            )));
        }
        let mut attachments = [0usize; 3];
        for (k, &(e, from_side)) in edges_here.iter().enumerate() {
            attachments[k] = if from_side {
                start_vertex(comp, final_paths[e][0])
            } else {
                end_vertex(comp, *final_paths[e].last().unwrap())
            };
        }
        let (_w, arms) = tripod_in_subgraph(comp, &quotient.collapsed[*ci], attachments)
            .ok_or_else(|| {
                CoreError::HypothesisViolation(format!(
                    "no embedded tripod in collapsed subgraph {ci} joining its attachment points"
                ))
            })?;
        for (k, &(e, from_side)) in edges_here.iter().enumerate() {
            let arm = &arms[k]; // attachment → w
            if from_side {
                // Path starts at the junction: prepend w → attachment.
                let mut pre: EdgePath = arm.iter().rev().map(|&(ce, f)| (ce, !f)).collect();
                pre.extend(final_paths[e].iter().copied());
                final_paths[e] = pre;
            } else {
                final_paths[e].extend(arm.iter().copied());
            }
        }
    }
    Ok(final_paths)
}

fn start_vertex<S>(comp: &Network<S>, step: (usize, bool)) -> usize {
    if step.1 {
        comp.edges[step.0].from
    } else {
        comp.edges[step.0].to
    }
}

fn end_vertex<S>(comp: &Network<S>, step: (usize, bool)) -> usize {
    if step.1 {
        comp.edges[step.0].to
    } else {
        comp.edges[step.0].from
    }
}

/// Convenience composition: find the embedded copy, then compare against it.
pub fn compare_quotient_richer<S: Scalar>(
    refn: &Network<S>,
    comp: &Network<S>,
    quotient: &QuotientSpec,
    tol: &ToleranceConfig<S>,
) -> Result<ComparisonCertificate<S>> {
    let paths = find_embedded_copy(refn, comp, quotient, tol)?;
    compare_embedded_copy(refn, comp, &paths, tol)
}

// --- Poorer competitor via multiplicity transfer ---------------------------

/// Compare against a competitor on the quotient of the reference graph by
/// the listed subgraphs. Verifies the group cancellation sum at every
/// collapsed subgraph, transfers multiplicities to the quotient edges,
/// builds the competitor current, and checks boundary equality and masses.
pub fn compare_quotient_poorer<S: Scalar>(
    refn: &Network<S>,
    comp: &Network<S>,
    quotient: &QuotientSpec,
    tol: &ToleranceConfig<S>,
) -> Result<ComparisonCertificate<S>> {
    let (vertex_owner, edge_owner) = validate_subgraphs(refn, &quotient.collapsed)?;
    let ref_deg = refn.degrees();
    let mut log = Vec::new();

    let ind = induce_current_lenient(refn, tol)?;
    log.push(format!(
        "aligned reference by rotation θ = {:.6} rad",
        ind.rotation.angle()
    ));

    // Signed multiplicity of each reference edge in traversal order from→to.
    let mut edge_mult: Vec<GroupElement> = Vec::with_capacity(refn.edges.len());
    for e in 0..refn.edges.len() {
        let chain = ind.rotated_network.edge_chain(e);
        let d = chain[0].to(&chain[1]);
        let (i, sign) = aligned_direction(&d, tol).ok_or_else(|| {
            CoreError::NotAlignable(format!("edge {e} lost alignment after rotation"))
        })?;
        edge_mult.push(GroupElement::generator(i).scale(sign as i64));
    }

    // Cancellation sum at every collapsed subgraph: heads minus tails of the
    // attached external edges must vanish in the group.
    for (i, _sub) in quotient.collapsed.iter().enumerate() {
        let mut sum = GroupElement::zero();
        let mut terms: Vec<(GroupElement, i8)> = Vec::new();
        for (e, edge) in refn.edges.iter().enumerate() {
            if edge_owner[e].is_some() {
                continue;
            }
            let m = edge_mult[e];
            if vertex_owner[edge.to] == Some(i) {
                sum = sum.add(&m);
                terms.push((m, 1));
            }
            if vertex_owner[edge.from] == Some(i) {
                sum = sum.add(&m.neg());
                terms.push((m, -1));
            }
        }
        if !sum.is_zero() {
            return Err(CoreError::HypothesisViolation(format!(
                "cancellation sum at collapsed subgraph {i} is {} ≠ 0",
                mult_name(&sum)
            )));
        }
        // Two-attachment coherence: equal multiplicities, opposite parity.
        if terms.len() == 2 && !(terms[0].0 == terms[1].0 && terms[0].1 != terms[1].1) {
            return Err(CoreError::HypothesisViolation(format!(
                "collapsed subgraph {i} joins two edges with incoherent orientations"
            )));
        }
        log.push(format!(
            "cancellation sum at collapsed subgraph {i}: 0 over {} attachment(s)",
            terms.len()
        ));
    }

    // Quotient graph nodes and edges.
    let node_of = |v: usize| match vertex_owner[v] {
        Some(i) => QNode::Coll(i),
        None => QNode::Plain(v),
    };
    struct HEdge {
        a: QNode,
        b: QNode,
        mult: GroupElement,
    }
    let mut hedges: Vec<HEdge> = Vec::new();
    for (e, edge) in refn.edges.iter().enumerate() {
        if edge_owner[e].is_some() {
            continue;
        }
        hedges.push(HEdge {
            a: node_of(edge.from),
            b: node_of(edge.to),
            mult: edge_mult[e],
        });
    }
    let mut hnodes: BTreeSet<QNode> = BTreeSet::new();
    for h in &hedges {
        hnodes.insert(h.a);
        hnodes.insert(h.b);
    }
    let hnodes: Vec<QNode> = hnodes.into_iter().collect();
    let hindex: BTreeMap<QNode, usize> = hnodes
        .iter()
        .enumerate()
        .map(|(i, n)| (*n, i))
        .collect();
    let mut hdeg = vec![0usize; hnodes.len()];
    let mut hadj: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); hnodes.len()];
    for (k, h) in hedges.iter().enumerate() {
        let (ia, ib) = (hindex[&h.a], hindex[&h.b]);
        hdeg[ia] += 1;
        hdeg[ib] += 1;
        hadj[ia].entry(ib).or_default().push(k);
        if ia != ib {
            hadj[ib].entry(ia).or_default().push(k);
        }
    }

    if comp.points.len() != hnodes.len() || comp.edges.len() != hedges.len() {
        return Err(CoreError::InvalidComparison(format!(
            "competitor graph has {} vertices / {} edges but the quotient has {} / {}",
            comp.points.len(),
            comp.edges.len(),
            hnodes.len(),
            hedges.len()
        )));
    }

    // Anchors: reference endpoint → competitor vertex.
    let mut anchor_of_comp: BTreeMap<usize, usize> = BTreeMap::new();
    for &(rq, cv) in &quotient.endpoint_map {
        if rq >= refn.points.len() || cv >= comp.points.len() {
            return Err(CoreError::InvalidInput(format!(
                "endpoint pair ({rq}, {cv}) out of range"
            )));
        }
        if ref_deg[rq] != 1 {
            return Err(CoreError::InvalidComparison(format!(
                "reference vertex {rq} in the endpoint map is not an endpoint"
            )));
        }
        if vertex_owner[rq].is_some() {
            return Err(CoreError::HypothesisViolation(format!(
                "reference endpoint {rq} lies in a collapsed subgraph"
            )));
        }
        if !refn.points[rq].approx_eq(&comp.points[cv], &tol.eps_len) {
            return Err(CoreError::InvalidComparison(format!(
                "matched endpoint {rq} and competitor vertex {cv} are at different positions"
            )));
        }
        let hn = hindex
            .get(&QNode::Plain(rq))
            .copied()
            .ok_or_else(|| CoreError::InvalidComparison(format!(
                "reference endpoint {rq} is isolated in the quotient"
            )))?;
        if anchor_of_comp.insert(cv, hn).is_some() {
            return Err(CoreError::InvalidComparison(format!(
                "competitor vertex {cv} anchored twice"
            )));
        }
    }
    for (v, &d) in ref_deg.iter().enumerate() {
        if d == 1 && !quotient.endpoint_map.iter().any(|&(rq, _)| rq == v) {
            return Err(CoreError::InvalidComparison(format!(
                "reference endpoint {v} missing from the endpoint map"
            )));
        }
    }

    // Competitor adjacency.
    let mut cadj: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); comp.points.len()];
    let mut cdeg = vec![0usize; comp.points.len()];
    for (k, edge) in comp.edges.iter().enumerate() {
        cdeg[edge.from] += 1;
        cdeg[edge.to] += 1;
        cadj[edge.from].entry(edge.to).or_default().push(k);
        if edge.from != edge.to {
            cadj[edge.to].entry(edge.from).or_default().push(k);
        }
    }

    // Backtracking isomorphism comp → quotient, anchored at the endpoints.
    // Any isomorphism respecting the anchors yields the same boundary and
    // mass (parallel edges carry multiplicities that sum identically), so
    // the first one found is taken.
    fn iso_search(
        order: &[usize],
        pos: usize,
        cmap: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        cdeg: &[usize],
        hdeg: &[usize],
        cadj: &[BTreeMap<usize, Vec<usize>>],
        hadj: &[BTreeMap<usize, Vec<usize>>],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let cv = order[pos];
        if cmap[cv].is_some() {
            return iso_search(order, pos + 1, cmap, used, cdeg, hdeg, cadj, hadj);
        }
        for hn in 0..hdeg.len() {
            if used[hn] || hdeg[hn] != cdeg[cv] {
                continue;
            }
            let consistent = cadj[cv].iter().all(|(nb, edges_between)| {
                match cmap[*nb] {
                    Some(hnb) => {
                        hadj[hn]
                            .get(&hnb)
                            .map(|v| v.len() == edges_between.len())
                            .unwrap_or(false)
                    }
                    None => true,
                }
            });
            if !consistent {
                continue;
            }
            cmap[cv] = Some(hn);
            used[hn] = true;
            if iso_search(order, pos + 1, cmap, used, cdeg, hdeg, cadj, hadj) {
                return true;
            }
            cmap[cv] = None;
            used[hn] = false;
        }
        false
    }

    let mut cmap: Vec<Option<usize>> = vec![None; comp.points.len()];
    let mut used = vec![false; hnodes.len()];
    for (&cv, &hn) in &anchor_of_comp {
        if hdeg[hn] != cdeg[cv] {
            return Err(CoreError::InvalidComparison(format!(
                "anchored competitor vertex {cv} has degree {} but its quotient image has degree {}",
                cdeg[cv], hdeg[hn]
            )));
        }
        cmap[cv] = Some(hn);
        used[hn] = true;
    }
    // Order: anchored first, then breadth-first outward for early pruning.
    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; comp.points.len()];
    let mut queue: Vec<usize> = anchor_of_comp.keys().copied().collect();
    for &v in &queue {
        seen[v] = true;
    }
    let mut qi = 0;
    while qi < queue.len() {
        let v = queue[qi];
        qi += 1;
        order.push(v);
        for nb in cadj[v].keys() {
            if !seen[*nb] {
                seen[*nb] = true;
                queue.push(*nb);
            }
        }
    }
    for v in 0..comp.points.len() {
        if !seen[v] {
            order.push(v);
        }
    }
    if !iso_search(&order, 0, &mut cmap, &mut used, &cdeg, &hdeg, &cadj, &hadj) {
        return Err(CoreError::InvalidComparison(
            "competitor graph is not isomorphic to the quotient of the reference".into(),
        ));
    }

    // Assign multiplicities to competitor edges through the isomorphism.
    let mut hedge_pool: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, h) in hedges.iter().enumerate() {
        let (ia, ib) = (hindex[&h.a], hindex[&h.b]);
        let key = (ia.min(ib), ia.max(ib));
        hedge_pool.entry(key).or_default().push(k);
    }
    let mut comp_mults: Vec<GroupElement> = Vec::with_capacity(comp.edges.len());
    for (k, edge) in comp.edges.iter().enumerate() {
        let (ca, cb) = (cmap[edge.from].unwrap(), cmap[edge.to].unwrap());
        let key = (ca.min(cb), ca.max(cb));
        let pool = hedge_pool.get_mut(&key).ok_or_else(|| {
            CoreError::InvalidComparison(format!(
                "competitor edge {k} has no counterpart in the quotient"
            ))
        })?;
        let hk = pool.pop().ok_or_else(|| {
            CoreError::InvalidComparison(format!(
                "too many competitor edges between a vertex pair (edge {k})"
            ))
        })?;
        let h = &hedges[hk];
        // Match traversal direction: competitor from→to vs quotient a→b.
        let m = if hindex[&h.a] == ca {
            h.mult
        } else {
            h.mult.neg()
        };
        log.push(format!(
            "competitor edge {k}: assigned multiplicity {}",
            mult_name(&m)
        ));
        comp_mults.push(m);
    }

    let comp_rot = comp.apply_rotation(&ind.rotation);
    let t = transferred_current(&comp_rot, &comp_mults, tol)?;
    let ref_boundary = boundary(&ind.current, tol);
    let comp_boundary = boundary(&t, tol);
    let bm = boundaries_match(&ref_boundary, &comp_boundary, &tol.eps_len);
    Ok(certificate(
        refn.length()?,
        comp.length()?,
        mass(&t)?,
        bm,
        &tol.eps_len,
        log,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;
    use crate::scalar::Q3;

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    /// Double tripod: junctions at (0,0) and (d,0), arms of length `arm`
    /// along the four outward lattice directions.
    fn double_tripod(d: i64, arm: i64) -> Network<Q3> {
        let [_, g2, g3] = generators::<Q3>();
        let o1 = Point2::new(Q3::zero(), Q3::zero());
        let o2 = Point2::new(Q3::from_int(d), Q3::zero());
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

    #[test]
    fn same_topology_self_comparison_is_exact_equality() {
        let net = double_tripod(1, 2);
        let tol = ToleranceConfig::<Q3>::exact();
        let cert = compare_same_topology(&net, &net, &tol).unwrap();
        assert!(cert.verdict);
        assert!(cert.boundary_match);
        assert_eq!(cert.reference_length, cert.competitor_mass);
        assert_eq!(cert.competitor_mass, cert.competitor_length);
        assert_eq!(cert.reference_length, Q3::from_int(9));
    }

    #[test]
    fn displaced_junction_gives_strict_inequality() {
        let net = double_tripod(1, 2).to_f64();
        let mut comp = net.clone();
        comp.points[0] = Point2::new(0.1, 0.0);
        let tol = ToleranceConfig::<f64>::float_default();
        let cert = compare_same_topology(&net, &comp, &tol).unwrap();
        assert!(cert.verdict);
        assert!(cert.competitor_length > cert.reference_length + 1e-6);
    }

    #[test]
    fn zigzag_central_edge_still_compares() {
        let net = double_tripod(1, 2).to_f64();
        let mut comp = net.clone();
        comp.edges[0].via = vec![
            Point2::new(0.3, 0.12),
            Point2::new(0.5, -0.07),
            Point2::new(0.8, 0.05),
        ];
        let tol = ToleranceConfig::<f64>::float_default();
        let cert = compare_same_topology(&net, &comp, &tol).unwrap();
        assert!(cert.verdict);
        assert!(cert.competitor_length > cert.reference_length);
    }

    #[test]
    fn moved_endpoint_is_invalid() {
        let net = double_tripod(1, 2).to_f64();
        let mut comp = net.clone();
        comp.points[2] = Point2::new(comp.points[2].x + 0.5, comp.points[2].y);
        let tol = ToleranceConfig::<f64>::float_default();
        match compare_same_topology(&net, &comp, &tol) {
            Err(CoreError::InvalidComparison(_)) => {}
            other => panic!("expected InvalidComparison, got {other:?}"),
        }
    }

    #[test]
    fn embedded_copy_with_dangling_edge() {
        let refn = Network::<Q3> {
            points: vec![
                Point2::new(Q3::zero(), Q3::zero()),
                Point2::new(Q3::one(), Q3::zero()),
            ],
            edges: vec![Edge::straight(0, 1)],
        };
        // Competitor: same segment subdivided in two, plus a dangling edge.
        let comp = Network::<Q3> {
            points: vec![
                Point2::new(Q3::zero(), Q3::zero()),
                Point2::new(q(1, 2), Q3::zero()),
                Point2::new(Q3::one(), Q3::zero()),
                Point2::new(q(1, 2), Q3::one()),
            ],
            edges: vec![
                Edge::straight(0, 1),
                Edge::straight(1, 2),
                Edge::straight(1, 3),
            ],
        };
        let tol = ToleranceConfig::<Q3>::exact();
        let paths = vec![vec![(0, true), (1, true)]];
        let cert = compare_embedded_copy(&refn, &comp, &paths, &tol).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.competitor_mass, Q3::one());
        assert!(cert.competitor_length > cert.reference_length);
    }

    #[test]
    fn find_copy_through_collapsed_triangle_junction() {
        // Reference: symmetric tripod with unit arms.
        let [g1, g2, g3] = generators::<Q3>();
        let o = Point2::new(Q3::zero(), Q3::zero());
        let refn = Network {
            points: vec![
                o.clone(),
                o.add(&g1.neg()),
                o.add(&g2.neg()),
                o.add(&g3.neg()),
            ],
            edges: vec![
                Edge::straight(0, 1),
                Edge::straight(0, 2),
                Edge::straight(0, 3),
            ],
        };
        // Competitor: small triangle near the origin whose corners carry the
        // three arms; collapsing the triangle leaves a tripod.
        let t = q(1, 10);
        let c0 = Point2::new(g1.x.clone() * t.clone(), g1.y.clone() * t.clone());
        let c1 = Point2::new(g2.x.clone() * t.clone(), g2.y.clone() * t.clone());
        let c2 = Point2::new(g3.x.clone() * t.clone(), g3.y.clone() * t.clone());
        let comp = Network {
            points: vec![
                c0.clone(),
                c1.clone(),
                c2.clone(),
                refn.points[1].clone(),
                refn.points[2].clone(),
                refn.points[3].clone(),
            ],
            edges: vec![
                Edge::straight(0, 1),
                Edge::straight(1, 2),
                Edge::straight(2, 0),
                Edge::straight(0, 3),
                Edge::straight(1, 4),
                Edge::straight(2, 5),
            ],
        };
        let quotient = QuotientSpec {
            collapsed: vec![SubgraphSpec {
                vertices: vec![0, 1, 2],
                edges: vec![0, 1, 2],
            }],
            endpoint_map: vec![(1, 3), (2, 4), (3, 5)],
        };
        let tol = ToleranceConfig::<Q3>::exact();
        let paths = find_embedded_copy(&refn, &comp, &quotient, &tol).unwrap();
        assert_eq!(paths.len(), 3);
        // The copy is a genuine tripod inside the competitor; the comparison
        // may still fail the endpoint check if arms don't land right — here
        // they do by construction.
        for p in &paths {
            assert!(!p.is_empty());
        }
    }

    #[test]
    fn poorer_quotient_cancellation_violation() {
        // Bent two-edge path: g1 then −g2 direction; collapsing the middle
        // vertex leaves a nonzero group sum.
        let [g1, g2, _] = generators::<Q3>();
        let v0 = Point2::new(Q3::zero(), Q3::zero());
        let v1 = v0.add(&g1);
        let v2 = v1.add(&g2.neg());
        let refn = Network {
            points: vec![v0.clone(), v1.clone(), v2.clone()],
            edges: vec![Edge::straight(0, 1), Edge::straight(1, 2)],
        };
        let comp = Network {
            points: vec![v0, v1, v2],
            edges: vec![Edge::straight(0, 1), Edge::straight(1, 2)],
        };
        let quotient = QuotientSpec {
            collapsed: vec![SubgraphSpec {
                vertices: vec![1],
                edges: vec![],
            }],
            endpoint_map: vec![(0, 0), (2, 2)],
        };
        let tol = ToleranceConfig::<Q3>::exact();
        match compare_quotient_poorer(&refn, &comp, &quotient, &tol) {
            Err(CoreError::HypothesisViolation(msg)) => {
                assert!(msg.contains("cancellation"), "{msg}");
            }
            other => panic!("expected HypothesisViolation, got {other:?}"),
        }
    }

    #[test]
    fn poorer_quotient_double_tripod_vs_crossing_star() {
        let refn = double_tripod(1, 2).to_f64();
        // Competitor: X-star with an explicit center joining the same tips.
        let center = Point2::new(0.5, 0.0);
        let comp = Network {
            points: vec![
                center,
                refn.points[2].clone(),
                refn.points[3].clone(),
                refn.points[4].clone(),
                refn.points[5].clone(),
            ],
            edges: vec![
                Edge::straight(0, 1),
                Edge::straight(0, 2),
                Edge::straight(0, 3),
                Edge::straight(0, 4),
            ],
        };
        let quotient = QuotientSpec {
            collapsed: vec![SubgraphSpec {
                vertices: vec![0, 1],
                edges: vec![0],
            }],
            endpoint_map: vec![(2, 1), (3, 2), (4, 3), (5, 4)],
        };
        let tol = ToleranceConfig::<f64>::float_default();
        let cert = compare_quotient_poorer(&refn, &comp, &quotient, &tol).unwrap();
        assert!(cert.boundary_match, "{:?}", cert.construction_log);
        assert!(cert.verdict);
        // 4·√21/2 ≈ 9.165 > 9.
        assert!((cert.competitor_length - 2.0 * 21f64.sqrt()).abs() < 1e-12);
        assert!(cert.competitor_length > cert.reference_length);
    }
}
