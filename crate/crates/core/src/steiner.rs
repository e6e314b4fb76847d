//! Independent shortest-network oracle for up to five terminals.
//!
//! Exhaustively enumerates Steiner tree topologies (terminals plus at most
//! #terminals − 2 degree-3 branch points), optimizes branch positions per
//! topology by sweeping exact Fermat-point updates, and returns the shortest
//! result. Everything here is deliberately independent of the calibration
//! machinery so it can serve as a cross-check oracle: it never consults the
//! hexagonal norm, lattice currents, or alignment.

use std::collections::BTreeSet;

use crate::error::{CoreError, Result};
use crate::geometry::{line_intersection, rotate, Point2};
use crate::network::{Edge, Network};

const CONVERGENCE_REL: f64 = 1e-14;
const MAX_SWEEPS: usize = 10_000;
const COLLAPSE_LEN: f64 = 1e-9;
const TIE_LEN: f64 = 1e-12;

/// Canonical encoding of a tree whose first `n_terminals` labels are fixed
/// and whose remaining labels may be permuted freely: the lexicographically
/// smallest sorted edge list over those permutations.
pub fn canonical_tree_signature(
    n_terminals: usize,
    n_nodes: usize,
    edges: &[(usize, usize)],
) -> Vec<(usize, usize)> {
    let extra: Vec<usize> = (n_terminals..n_nodes).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    permute(&extra, &mut Vec::new(), &mut |perm| {
        let relabel = |v: usize| {
            if v < n_terminals {
                v
            } else {
                perm[v - n_terminals]
            }
        };
        let mut enc: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (relabel(a), relabel(b));
                (x.min(y), x.max(y))
            })
            .collect();
        enc.sort_unstable();
        match &best {
            Some(prev) if *prev <= enc => {}
            _ => best = Some(enc),
        }
    });
    best.unwrap_or_default()
}

fn permute(rest: &[usize], acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if rest.is_empty() {
        f(acc);
        return;
    }
    for (i, &x) in rest.iter().enumerate() {
        let mut next: Vec<usize> = rest.to_vec();
        next.remove(i);
        acc.push(x);
        permute(&next, acc, f);
        acc.pop();
    }
}

/// Decode a Prüfer sequence over `k` labels into the tree's edge list.
fn prufer_decode(seq: &[usize], k: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; k];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    let mut deg = degree.clone();
    let mut seq_rest = seq.to_vec();
    for _ in 0..k.saturating_sub(2) {
        let leaf = (0..k).find(|&v| deg[v] == 1).unwrap();
        let s = seq_rest.remove(0);
        edges.push((leaf.min(s), leaf.max(s)));
        deg[leaf] = 0;
        deg[s] -= 1;
    }
    let remaining: Vec<usize> = (0..k).filter(|&v| deg[v] == 1).collect();
    edges.push((remaining[0].min(remaining[1]), remaining[0].max(remaining[1])));
    edges
}

/// All distinct Steiner topologies for `n` terminals: trees on the terminals
/// plus `s` branch nodes of degree exactly three, for every s ≤ n − 2,
/// deduplicated up to branch-node relabeling.
fn enumerate_topologies(n: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    for s in 0..=n.saturating_sub(2) {
        let k = n + s;
        if k == 2 {
            out.push((s, vec![(0, 1)]));
            continue;
        }
        let seq_len = k - 2;
        let mut seq = vec![0usize; seq_len];
        loop {
            let edges = prufer_decode(&seq, k);
            let mut deg = vec![0usize; k];
            for &(a, b) in &edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            let steiner_ok = (n..k).all(|v| deg[v] == 3);
            let terminal_ok = (0..n).all(|v| (1..=3).contains(&deg[v]));
            if steiner_ok && terminal_ok {
                let sig = canonical_tree_signature(n, k, &edges);
                if seen.insert(sig.clone()) {
                    out.push((s, sig));
                }
            }
            // Next sequence in base-k counting order.
            let mut i = 0;
            loop {
                if i == seq_len {
                    break;
                }
                seq[i] += 1;
                if seq[i] < k {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
            if i == seq_len {
                break;
            }
        }
    }
    out
}

fn dist(a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    a.to(b).norm_sq().sqrt()
}

/// The point minimizing the summed distance to the triangle a, b, c: the
/// vertex if its angle is ≥ 120°, otherwise the first Fermat point obtained
/// by intersecting two Simpson lines.
fn fermat_point(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> Point2<f64> {
    let verts = [a, b, c];
    for i in 0..3 {
        let p = verts[i];
        let u = p.to(verts[(i + 1) % 3]);
        let v = p.to(verts[(i + 2) % 3]);
        let (nu, nv) = (u.norm_sq().sqrt(), v.norm_sq().sqrt());
        if nu < COLLAPSE_LEN || nv < COLLAPSE_LEN {
            return p.clone(); // coincident neighbors: the shared point wins
        }
        if u.dot(&v) <= -0.5 * nu * nv {
            return p.clone(); // angle ≥ 120° at this vertex
        }
    }
    let apex = |base_a: &Point2<f64>, base_b: &Point2<f64>, opposite: &Point2<f64>| {
        let d = base_a.to(base_b);
        let side = d.cross(&base_a.to(opposite));
        let angle = if side > 0.0 {
            -std::f64::consts::FRAC_PI_3
        } else {
            std::f64::consts::FRAC_PI_3
        };
        base_a.add(&rotate(&d, angle))
    };
    let ea = apex(verts[1], verts[2], verts[0]);
    let eb = apex(verts[2], verts[0], verts[1]);
    let d1 = verts[0].to(&ea);
    let d2 = verts[1].to(&eb);
    line_intersection(verts[0], &d1, verts[1], &d2)
        // Nearly degenerate triangle: fall back to the flattest vertex.
        .unwrap_or_else(|| verts[0].clone())
}

fn tree_length(pos: &[Point2<f64>], edges: &[(usize, usize)]) -> f64 {
    edges.iter().map(|&(x, y)| dist(&pos[x], &pos[y])).sum()
}

/// Optimize branch positions for one topology; returns positions and length.
fn optimize_topology(
    terminals: &[Point2<f64>],
    s: usize,
    edges: &[(usize, usize)],
) -> (Vec<Point2<f64>>, f64) {
    let n = terminals.len();
    let k = n + s;
    let cx = terminals.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let cy = terminals.iter().map(|p| p.y).sum::<f64>() / n as f64;
    let mut pos: Vec<Point2<f64>> = terminals.to_vec();
    for j in 0..s {
        // Deterministic jitter breaks symmetric configurations where all
        // branch points would otherwise start coincident.
        pos.push(Point2::new(
            cx + 1e-3 * (j as f64 + 1.0),
            cy + 2e-3 * (j as f64 + 1.0) * if j % 2 == 0 { 1.0 } else { -1.0 },
        ));
    }
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(x, y) in edges {
        neighbors[x].push(y);
        neighbors[y].push(x);
    }
    let mut last = tree_length(&pos, edges);
    for _ in 0..MAX_SWEEPS {
        for v in n..k {
            let nb = &neighbors[v];
            debug_assert_eq!(nb.len(), 3);
            pos[v] = fermat_point(
                &pos[nb[0]].clone(),
                &pos[nb[1]].clone(),
                &pos[nb[2]].clone(),
            );
        }
        let len = tree_length(&pos, edges);
        if last - len <= CONVERGENCE_REL * last.max(1.0) {
            last = len;
            break;
        }
        last = len;
    }
    (pos, last)
}

/// Shortest connected network spanning the terminals, found by exhaustive
/// topology enumeration with per-topology Fermat-point optimization.
/// Returns the length and the optimized network with degenerate branch
/// points collapsed away. Ties between topologies are broken by the
/// lexicographic topology encoding so reruns are reproducible.
pub fn steiner_oracle(terminals: &[Point2<f64>]) -> Result<(f64, Network<f64>)> {
    if terminals.len() < 2 {
        return Err(CoreError::InvalidInput(
            "oracle needs at least two terminals".into(),
        ));
    }
    if terminals.len() > 5 {
        return Err(CoreError::Unsupported(format!(
            "oracle supports at most 5 terminals, got {}",
            terminals.len()
        )));
    }
    let n = terminals.len();
    let mut best: Option<(f64, Vec<(usize, usize)>, Vec<Point2<f64>>)> = None;
    for (s, edges) in enumerate_topologies(n) {
        let (pos, len) = optimize_topology(terminals, s, &edges);
        let better = match &best {
            None => true,
            Some((bl, benc, _)) => {
                len < bl - TIE_LEN || ((len - bl).abs() <= TIE_LEN && edges < *benc)
            }
        };
        if better {
            best = Some((len, edges, pos));
        }
    }
    let (len, edges, pos) = best.expect("at least one topology exists for n >= 2");

    // Collapse edges below the degeneracy threshold: merge their endpoints
    // (keeping terminals as representatives) and drop resulting self-loops.
    let k = pos.len();
    let mut repr: Vec<usize> = (0..k).collect();
    fn find(repr: &mut Vec<usize>, v: usize) -> usize {
        if repr[v] != v {
            let r = find(repr, repr[v]);
            repr[v] = r;
        }
        repr[v]
    }
    for &(x, y) in &edges {
        if dist(&pos[x], &pos[y]) < COLLAPSE_LEN {
            let (rx, ry) = (find(&mut repr, x), find(&mut repr, y));
            if rx != ry {
                // Prefer the smaller label so terminals absorb branch points.
                let (keep, drop) = (rx.min(ry), rx.max(ry));
                repr[drop] = keep;
            }
        }
    }
    let mut kept: Vec<usize> = (0..k).filter(|&v| find(&mut repr, v) == v).collect();
    kept.sort_unstable();
    let index_of = |v: usize, repr: &mut Vec<usize>, kept: &[usize]| {
        let r = find(repr, v);
        kept.binary_search(&r).unwrap()
    };
    let points: Vec<Point2<f64>> = kept.iter().map(|&v| pos[v].clone()).collect();
    let mut net_edges = Vec::new();
    for &(x, y) in &edges {
        let (ix, iy) = (
            index_of(x, &mut repr, &kept),
            index_of(y, &mut repr, &kept),
        );
        if ix != iy {
            net_edges.push(Edge::straight(ix, iy));
        }
    }
    let net = Network {
        points,
        edges: net_edges,
    };
    Ok((len, net))
}
