//! The calibration verifier: every condition is re-derived from the spec
//! and the field assignment, nothing is trusted from the construction.
//!
//! Checks per field Ψ_ij: unit-norm bound in every cell, Ψ_ij·ν_ij = 1 on
//! every interface piece, vanishing normal-component jumps across internal
//! cell boundaries (piecewise-constant fields are divergence-free exactly
//! when those jumps vanish), and the cyclic zero-sum per cell. The verdict
//! is decided in the scalar model — exact in rational-√3 arithmetic — while
//! the report carries float residuals and a line per trace/interface check
//! with the one-sided values spelled out.

use crate::error::{CoreError, Result};
use crate::geometry::{
    segment_intersection, vector_norm, SegIntersection, Segment, ToleranceConfig, Vector2,
};
use crate::planar::NO_FACE;
use crate::scalar::Scalar;

use super::{
    boundary_trace, FieldAssignment, PartitionCalibrationReport, PartitionSpec, PAIRS,
};

fn fmt_vec<S: Scalar>(v: &Vector2<S>) -> String {
    format!("({},{})", v.x.to_f64(), v.y.to_f64())
}

pub fn verify_paired_calibration<S: Scalar>(
    spec: &PartitionSpec<S>,
    fields: &FieldAssignment<S>,
    tol: &ToleranceConfig<S>,
) -> Result<PartitionCalibrationReport> {
    let eps = &tol.eps_field;
    let mut log = Vec::new();
    let mut verdict = true;

    let mut norm_excess = 0f64;
    let mut sum_residual = 0f64;
    // |Ψ| ≤ 1 + eps, squared to stay in the scalar model.
    let norm_gate = (S::one() + eps.clone()) * (S::one() + eps.clone());
    let sum_gate = eps.clone() * eps.clone();
    for (f, slot) in fields.fields.iter().enumerate() {
        let Some(psi) = slot else { continue };
        for (k, p) in psi.iter().enumerate() {
            let n2 = p.norm_sq();
            if n2.clone() > norm_gate.clone() {
                verdict = false;
                log.push(format!(
                    "norm: cell {f} field Σ{}{} has |Ψ| = {} > 1",
                    PAIRS[k].0,
                    PAIRS[k].1,
                    n2.to_f64().sqrt()
                ));
            }
            norm_excess = norm_excess.max(n2.to_f64().sqrt() - 1.0);
        }
        let sum = psi[0].add(&psi[1]).add(&psi[2]);
        let s2 = sum.norm_sq();
        if s2.clone() > sum_gate.clone() {
            verdict = false;
            log.push(format!(
                "sum: cell {f} has Ψ12+Ψ23+Ψ31 = {} ≠ 0",
                fmt_vec(&sum)
            ));
        }
        sum_residual = sum_residual.max(s2.to_f64().sqrt());
    }
    norm_excess = norm_excess.max(0.0);

    let mut interface_residual = 0f64;
    for (n, itf) in spec.interfaces.iter().enumerate() {
        let (i, j) = PAIRS[itf.pair];
        for (cell, len) in split_by_cells(&itf.segment, fields, tol)? {
            let psi = fields.fields[cell].as_ref().ok_or_else(|| {
                CoreError::InvalidGeometry(format!(
                    "interface {n} crosses cell {cell} outside Ω"
                ))
            })?;
            let r = psi[itf.pair].dot(&itf.normal) - S::one();
            if r.abs() > eps.clone() {
                verdict = false;
            }
            interface_residual = interface_residual.max(r.to_f64().abs());
            log.push(format!(
                "interface Σ{i}{j} piece (len {}) in cell {cell}: {}·{} = {}",
                len.to_f64(),
                fmt_vec(&psi[itf.pair]),
                fmt_vec(&itf.normal),
                psi[itf.pair].dot(&itf.normal).to_f64()
            ));
        }
    }

    let mut trace_residual = 0f64;
    for (k, e) in fields.cells.edges.iter().enumerate() {
        let (fl, fr) = fields.cells.edge_faces[k];
        if fl == NO_FACE || fr == NO_FACE {
            continue;
        }
        let (Some(pa), Some(pb)) = (&fields.fields[fl], &fields.fields[fr]) else {
            continue;
        };
        let a = &fields.cells.points[e.a];
        let b = &fields.cells.points[e.b];
        let mut n = a.to(b).rot90().unit().ok_or_else(|| {
            CoreError::ExactArithmetic(
                "cell boundary normal is not representable in the scalar model".into(),
            )
        })?;
        // Deterministic orientation: first nonzero component positive.
        if n.x.is_negative() || (n.x.is_zero() && n.y.is_negative()) {
            n = n.neg();
        }
        for idx in 0..3 {
            let ta = pa[idx].dot(&n);
            let tb = pb[idx].dot(&n);
            let jump = ta.clone() - tb.clone();
            if jump.abs() > eps.clone() {
                verdict = false;
            }
            trace_residual = trace_residual.max(jump.to_f64().abs());
            log.push(format!(
                "trace Σ{}{} across cells {}|{}: {}·{} = {} vs {}·{} = {} → jump {}",
                PAIRS[idx].0,
                PAIRS[idx].1,
                fl,
                fr,
                fmt_vec(&pa[idx]),
                fmt_vec(&n),
                ta.to_f64(),
                fmt_vec(&pb[idx]),
                fmt_vec(&n),
                tb.to_f64(),
                jump.to_f64()
            ));
        }
    }

    Ok(PartitionCalibrationReport {
        norm_excess,
        sum_residual,
        interface_residual,
        trace_residual,
        verdict,
        log,
    })
}

/// Total interface length ½·ΣᵢP(Eᵢ, Ω): each interface counted once.
pub fn perimeter_energy<S: Scalar>(spec: &PartitionSpec<S>) -> Result<S> {
    let mut acc = S::zero();
    for itf in &spec.interfaces {
        acc = acc + vector_norm(&itf.segment.dir())?;
    }
    Ok(acc)
}

/// Flux identity between two partitions with matching boundary traces: the
/// difference fields Φ₁ = 0, Φ₂ = −Ψ₁₂, Φ₃ = Ψ₃₁ integrate identically
/// against both partitions. Returns the largest per-region discrepancy.
pub fn flux_check<S: Scalar>(
    spec_a: &PartitionSpec<S>,
    spec_b: &PartitionSpec<S>,
    fields: &FieldAssignment<S>,
    tol: &ToleranceConfig<S>,
) -> Result<S> {
    compare_traces(spec_a, spec_b, tol)?;
    let fa = flux_of(spec_a, fields, tol)?;
    let fb = flux_of(spec_b, fields, tol)?;
    let mut disc = S::zero();
    for k in 0..3 {
        disc = disc.max_val((fa[k].clone() - fb[k].clone()).abs());
    }
    Ok(disc)
}

fn flux_of<S: Scalar>(
    spec: &PartitionSpec<S>,
    fields: &FieldAssignment<S>,
    tol: &ToleranceConfig<S>,
) -> Result<[S; 3]> {
    let mut flux = [S::zero(), S::zero(), S::zero()];
    for (n, itf) in spec.interfaces.iter().enumerate() {
        let (i, j) = PAIRS[itf.pair];
        for (cell, len) in split_by_cells(&itf.segment, fields, tol)? {
            let psi = fields.fields[cell].as_ref().ok_or_else(|| {
                CoreError::InvalidGeometry(format!(
                    "interface {n} crosses cell {cell} outside Ω"
                ))
            })?;
            let phi = |color: u8| -> Vector2<S> {
                match color {
                    1 => Vector2::zero(),
                    2 => psi[0].neg(),
                    _ => psi[2].clone(),
                }
            };
            let nu_len = itf.normal.scale(&len);
            // Dχ_{E_i} = −ν_ij·H¹ on Σ_ij seen from region i, +ν_ij from j.
            flux[(i - 1) as usize] =
                flux[(i - 1) as usize].clone() - phi(i).dot(&nu_len);
            flux[(j - 1) as usize] =
                flux[(j - 1) as usize].clone() + phi(j).dot(&nu_len);
        }
    }
    Ok(flux)
}

/// Split a segment at its crossings with the cell boundaries; returns the
/// containing cell and length of each piece.
fn split_by_cells<S: Scalar>(
    seg: &Segment<S>,
    fields: &FieldAssignment<S>,
    tol: &ToleranceConfig<S>,
) -> Result<Vec<(usize, S)>> {
    let d = seg.dir();
    let dd = d.norm_sq();
    if dd.is_zero() {
        return Ok(Vec::new());
    }
    let seg_len = vector_norm(&d)?;
    let mut ts: Vec<S> = vec![S::zero(), S::one()];
    for e in &fields.cells.edges {
        let other = Segment::new(
            fields.cells.points[e.a].clone(),
            fields.cells.points[e.b].clone(),
        );
        match segment_intersection(seg, &other, tol) {
            SegIntersection::Empty => {}
            SegIntersection::Point(p) => {
                let t = seg.a.to(&p).dot(&d) / dd.clone();
                if t.is_positive() && t < S::one() {
                    ts.push(t);
                }
            }
            SegIntersection::Overlap(_) => {
                return Err(CoreError::InvalidGeometry(
                    "interface lies along a cell boundary".into(),
                ));
            }
        }
    }
    ts.sort_by(|a, b| a.cmp_total(b));
    let eps_t = if tol.eps_len.is_zero() {
        S::zero()
    } else {
        tol.eps_len.clone() / seg_len.clone()
    };
    let mut out = Vec::new();
    let half = S::from_ratio(1, 2);
    for w in ts.windows(2) {
        let span = w[1].clone() - w[0].clone();
        if !(span > eps_t.clone()) {
            continue;
        }
        let mid = seg.eval(&((w[0].clone() + w[1].clone()) * half.clone()));
        let cell = fields.cells.locate_face(&mid, tol).ok_or_else(|| {
            CoreError::InvalidGeometry(
                "interface piece midpoint is not interior to any cell".into(),
            )
        })?;
        out.push((cell, span * seg_len.clone()));
    }
    Ok(out)
}

/// Identical labeled arc decompositions of ∂Ω, up to refinement.
fn compare_traces<S: Scalar>(
    spec_a: &PartitionSpec<S>,
    spec_b: &PartitionSpec<S>,
    tol: &ToleranceConfig<S>,
) -> Result<()> {
    let ta = boundary_trace(spec_a, tol)?;
    let tb = boundary_trace(spec_b, tol)?;
    use std::collections::BTreeMap;
    let mut keys: Vec<(usize, usize)> = Vec::new();
    let mut by_key_a: BTreeMap<(usize, usize), Vec<(S, S, u8)>> = BTreeMap::new();
    let mut by_key_b: BTreeMap<(usize, usize), Vec<(S, S, u8)>> = BTreeMap::new();
    for (r, k, t0, t1, c) in ta {
        keys.push((r, k));
        by_key_a.entry((r, k)).or_default().push((t0, t1, c));
    }
    for (r, k, t0, t1, c) in tb {
        keys.push((r, k));
        by_key_b.entry((r, k)).or_default().push((t0, t1, c));
    }
    keys.sort();
    keys.dedup();
    let eps_t = tol.eps_len.clone();
    for key in keys {
        let empty = Vec::new();
        let arcs_a = by_key_a.get(&key).unwrap_or(&empty);
        let arcs_b = by_key_b.get(&key).unwrap_or(&empty);
        let mut breaks: Vec<S> = Vec::new();
        for (t0, t1, _) in arcs_a.iter().chain(arcs_b.iter()) {
            breaks.push(t0.clone());
            breaks.push(t1.clone());
        }
        breaks.sort_by(|a, b| a.cmp_total(b));
        breaks.dedup_by(|a, b| (a.clone() - b.clone()).abs() <= eps_t.clone());
        let half = S::from_ratio(1, 2);
        for w in breaks.windows(2) {
            if !((w[1].clone() - w[0].clone()) > eps_t.clone()) {
                continue;
            }
            let mid = (w[0].clone() + w[1].clone()) * half.clone();
            let la = label_at(arcs_a, &mid, &eps_t);
            let lb = label_at(arcs_b, &mid, &eps_t);
            if la.is_none() || lb.is_none() || la != lb {
                return Err(CoreError::InvalidComparison(format!(
                    "boundary traces differ on ring {} segment {}: {:?} vs {:?}",
                    key.0, key.1, la, lb
                )));
            }
        }
    }
    Ok(())
}

fn label_at<S: Scalar>(arcs: &[(S, S, u8)], t: &S, eps_t: &S) -> Option<u8> {
    let mut found: Option<u8> = None;
    for (t0, t1, c) in arcs {
        let lo = t0.clone().min_val(t1.clone()) - eps_t.clone();
        let hi = t0.clone().max_val(t1.clone()) + eps_t.clone();
        if *t >= lo && *t <= hi {
            match found {
                None => found = Some(*c),
                Some(prev) if prev != *c => return None,
                _ => {}
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, PointLocation, Polygon};
    use crate::network::{Edge, Network};
    use crate::offset::polygon_offset_network;
    use crate::partitions::{
        assign_fields, build_partition_domain, build_partition_spec, coarse_subdivision,
        color_faces_by_probes, counterexample_specs, three_color_faces, ColoredFaces,
    };
    use crate::scalar::Q3;
    use std::ops::Neg;

    fn mknet(points: Vec<Point2<Q3>>, edges: &[(usize, usize)]) -> Network<Q3> {
        let edges = edges.iter().map(|&(a, b)| Edge::straight(a, b)).collect();
        Network::new(points, edges).unwrap()
    }

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    fn qp(x: Q3, y: Q3) -> Point2<Q3> {
        Point2::new(x, y)
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

    fn fig_three_setup(
        delta: Q3,
        tol: &ToleranceConfig<Q3>,
    ) -> (
        Network<Q3>,
        Polygon<Q3>,
        ColoredFaces<Q3>,
        PartitionSpec<Q3>,
        FieldAssignment<Q3>,
    ) {
        let net = double_tripod();
        let omega = polygon_offset_network(&net, &delta, tol).unwrap();
        let half = delta * q(1, 2);
        let probes = [
            (qp(half.clone().neg(), q(0, 1)), 1u8),
            (qp(q(1, 1) + half.clone(), q(0, 1)), 1u8),
            (qp(q(1, 2), half.clone().neg()), 2u8),
            (qp(q(1, 2), half), 3u8),
        ];
        let sub = coarse_subdivision(&net, &omega, tol).unwrap();
        let colored = color_faces_by_probes(sub, &omega, &probes, tol).unwrap();
        let spec = build_partition_spec(&omega, &colored).unwrap();
        let fields = assign_fields(&net, &omega, &colored, tol).unwrap();
        (net, omega, colored, spec, fields)
    }

    #[test]
    fn double_tripod_calibration_is_exact() {
        let tol = ToleranceConfig::exact();
        let (_, _, _, spec, fields) = fig_three_setup(q(1, 5), &tol);
        let report = verify_paired_calibration(&spec, &fields, &tol).unwrap();
        assert!(report.verdict, "log: {:#?}", report.log);
        assert_eq!(report.norm_excess, 0.0);
        assert_eq!(report.sum_residual, 0.0);
        assert_eq!(report.interface_residual, 0.0);
        assert_eq!(report.trace_residual, 0.0);
        // The worked jump across the junction-cell/top-wedge chord.
        assert!(
            report
                .log
                .iter()
                .any(|l| l.contains("(0.8660254037844386,-0.5)·(0.5,0.8660254037844386) = 0")),
            "log: {:#?}",
            report.log
        );
    }

    #[test]
    fn corrupting_one_cell_is_detected() {
        let tol = ToleranceConfig::exact();
        let (_, _, _, spec, mut fields) = fig_three_setup(q(1, 5), &tol);
        let r1 = fields
            .cells
            .locate_face(&qp(q(0, 1), q(0, 1)), &tol)
            .unwrap();
        fields.fields[r1].as_mut().unwrap()[0] = Vector2::new(q(1, 1), q(0, 1));
        let report = verify_paired_calibration(&spec, &fields, &tol).unwrap();
        assert!(!report.verdict);
        // |(1,0)·(1/2,√3/2)| against the zero field of the top wedge.
        assert_eq!(report.trace_residual, 0.5);
    }

    #[test]
    fn zero_fields_fail_on_every_interface() {
        let tol = ToleranceConfig::exact();
        let (_, _, _, spec, mut fields) = fig_three_setup(q(1, 5), &tol);
        for slot in fields.fields.iter_mut().flatten() {
            *slot = [Vector2::zero(), Vector2::zero(), Vector2::zero()];
        }
        let report = verify_paired_calibration(&spec, &fields, &tol).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.interface_residual, 1.0);
        assert_eq!(report.trace_residual, 0.0);
    }

    #[test]
    fn perimeter_matches_the_hand_sum() {
        let tol = ToleranceConfig::exact();
        let (omega, ext) =
            build_partition_domain(&double_tripod(), &q(1, 5), &q(3, 10), None, &tol).unwrap();
        let colored = three_color_faces(&ext, &omega, &tol).unwrap();
        let spec = build_partition_spec(&omega, &colored).unwrap();
        // Central edge plus four arms lengthened by 3/10.
        assert_eq!(perimeter_energy(&spec).unwrap(), q(51, 5));
    }

    #[test]
    fn perimeter_agrees_with_per_region_recomputation() {
        let tol = ToleranceConfig::exact();
        let (_, omega, _, spec, _) = fig_three_setup(q(1, 5), &tol);
        let mut doubled = Q3::zero();
        for region in &spec.regions {
            for poly in region {
                for seg in poly.boundary_segments() {
                    let mid = seg.a.midpoint(&seg.b);
                    if omega.locate(&mid, &tol.eps_len) != PointLocation::Boundary {
                        doubled = doubled + vector_norm(&seg.dir()).unwrap();
                    }
                }
            }
        }
        assert_eq!(
            doubled * q(1, 2),
            perimeter_energy(&spec).unwrap()
        );
    }

    #[test]
    fn flux_is_exact_on_the_competitor_pair() {
        let tol = ToleranceConfig::exact();
        let (spec_e, spec_f, net_e, colored_e) =
            counterexample_specs(&q(1, 1), &q(2, 1), &q(3, 5), &q(7, 10), &tol).unwrap();
        let fields = assign_fields(&net_e, &spec_e.omega, &colored_e, &tol).unwrap();
        assert!(flux_check(&spec_e, &spec_f, &fields, &tol)
            .unwrap()
            .is_zero());
        assert!(flux_check(&spec_e, &spec_e, &fields, &tol)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn relabeled_boundary_trace_is_rejected() {
        let tol = ToleranceConfig::exact();
        let (net, omega, _, spec, fields) = fig_three_setup(q(1, 5), &tol);
        let half = q(1, 10);
        // Same faces, bottom and top labels exchanged.
        let probes = [
            (qp(half.clone().neg(), q(0, 1)), 1u8),
            (qp(q(1, 1) + half.clone(), q(0, 1)), 1u8),
            (qp(q(1, 2), half.clone().neg()), 3u8),
            (qp(q(1, 2), half), 2u8),
        ];
        let sub = coarse_subdivision(&net, &omega, &tol).unwrap();
        let swapped = color_faces_by_probes(sub, &omega, &probes, &tol).unwrap();
        let spec_swapped = build_partition_spec(&omega, &swapped).unwrap();
        let err = flux_check(&spec, &spec_swapped, &fields, &tol).unwrap_err();
        assert!(matches!(err, CoreError::InvalidComparison(_)));
    }
}
