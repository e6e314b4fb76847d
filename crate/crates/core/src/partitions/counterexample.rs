//! The double-tripod competitor: trimming the two triple junctions of the
//! Steiner tree for four symmetric endpoints and rejoining the arms with a
//! pair of horizontal segments shortens the partition perimeter as soon as
//! the join offset `h` exceeds (√3/4)·d, where `d` is the central edge
//! length. Both partitions live in the same offset tube and agree on its
//! boundary, so the shorter competitor disproves any hope of certifying the
//! tree through paired partitions alone — the flux identity forces equal
//! calibrated energies while the perimeters differ.

use crate::error::{CoreError, Result};
use crate::geometry::{Point2, PointLocation, Polygon, ToleranceConfig, Vector2};
use crate::network::{Edge, Network};
use crate::offset::polygon_offset_network_unchecked;
use crate::planar::Subdivision;
use crate::scalar::Scalar;

use super::{
    build_partition_spec, coarse_subdivision, perimeter_energy, ColoredFaces, PartitionSpec,
};

#[derive(Debug, Clone)]
pub struct CounterexampleReport<S: Scalar> {
    /// Partition perimeter of the double tripod.
    pub p_e: S,
    /// Partition perimeter of the trimmed-and-joined competitor.
    pub p_f: S,
    /// `p_e - p_f`; equals 4h/√3 − d in closed form.
    pub delta_p: S,
    /// True exactly when the competitor is strictly shorter.
    pub improves: bool,
}

/// Compare the double-tripod partition against the trimmed competitor with
/// join offset `h`, both inside the tube of half-width `delta`.
pub fn counterexample<S: Scalar>(
    d: &S,
    outer_len: &S,
    h: &S,
    delta: &S,
    tol: &ToleranceConfig<S>,
) -> Result<CounterexampleReport<S>> {
    let (spec_e, spec_f, _, _) = counterexample_specs(d, outer_len, h, delta, tol)?;
    let p_e = perimeter_energy(&spec_e)?;
    let p_f = perimeter_energy(&spec_f)?;
    let delta_p = p_e.clone() - p_f.clone();
    Ok(CounterexampleReport {
        improves: delta_p.is_positive(),
        p_e,
        p_f,
        delta_p,
    })
}

/// Build both partitions, the double-tripod network itself and its face
/// coloring, all sharing one tube domain. The tube deliberately skips the
/// calibration threshold on `delta`: the point of the construction is what
/// happens beyond it.
pub fn counterexample_specs<S: Scalar>(
    d: &S,
    outer_len: &S,
    h: &S,
    delta: &S,
    tol: &ToleranceConfig<S>,
) -> Result<(
    PartitionSpec<S>,
    PartitionSpec<S>,
    Network<S>,
    ColoredFaces<S>,
)> {
    if !d.is_positive() || !h.is_positive() || !delta.is_positive() {
        return Err(CoreError::InvalidInput(
            "central length, join offset and tube half-width must be positive".into(),
        ));
    }
    if !(outer_len.clone() > d.clone()) {
        return Err(CoreError::InvalidInput(
            "outer arms must be longer than the central edge".into(),
        ));
    }
    if !(h.clone() < delta.clone()) {
        return Err(CoreError::InvalidGeometry(
            "join offset must stay strictly inside the tube (h < delta)".into(),
        ));
    }
    let two = S::from_int(2);
    // Trimming length along each arm so the joins sit at height ±h.
    let b = two.clone() * h.clone() / S::sqrt3();
    if !(b.clone() < outer_len.clone()) {
        return Err(CoreError::InvalidGeometry(
            "join offset consumes the full arm length".into(),
        ));
    }
    // Tube simplicity: junction miters must not cross mid-edge.
    if !(delta.clone() * two.clone() < S::sqrt3() * d.clone())
        || !(delta.clone() * two.clone() < S::sqrt3() * outer_len.clone())
    {
        return Err(CoreError::InvalidGeometry(
            "tube half-width too large for a simple offset boundary".into(),
        ));
    }

    let half = S::from_ratio(1, 2);
    let hs3 = S::sqrt3() * half.clone();
    let dirs = [
        Vector2::new(half.clone().neg(), hs3.clone()),        // upper-left
        Vector2::new(half.clone().neg(), hs3.clone().neg()),  // lower-left
        Vector2::new(half.clone(), hs3.clone()),              // upper-right
        Vector2::new(half.clone(), hs3.clone().neg()),        // lower-right
    ];
    let o1 = Point2::new(S::zero(), S::zero());
    let o2 = Point2::new(d.clone(), S::zero());
    let roots = [&o1, &o1, &o2, &o2];
    let tips: Vec<Point2<S>> = dirs
        .iter()
        .zip(roots.iter())
        .map(|(u, r)| r.add(&u.scale(outer_len)))
        .collect();

    let mut pts_e = vec![o1.clone(), o2.clone()];
    pts_e.extend(tips.iter().cloned());
    let edges_e = vec![
        Edge::straight(0, 1),
        Edge::straight(0, 2),
        Edge::straight(0, 3),
        Edge::straight(1, 4),
        Edge::straight(1, 5),
    ];
    let net_e = Network::new(pts_e, edges_e)?;
    let omega = polygon_offset_network_unchecked(&net_e, delta, tol)?;

    let sub_e = coarse_subdivision(&net_e, &omega, tol)?;
    let probes_e = [
        (Point2::new(d.clone() * half.clone(), delta.clone() * half.clone()), 3u8),
        (
            Point2::new(d.clone() * half.clone(), (delta.clone() * half.clone()).neg()),
            2u8,
        ),
        (Point2::new((delta.clone() * half.clone()).neg(), S::zero()), 1u8),
        (
            Point2::new(d.clone() + delta.clone() * half.clone(), S::zero()),
            1u8,
        ),
    ];
    let colored_e = color_faces_by_probes(sub_e, &omega, &probes_e, tol)?;
    let spec_e = build_partition_spec(&omega, &colored_e)?;

    // Competitor: arms trimmed back by b, rejoined horizontally at y = ±h.
    let joins = [
        roots[0].add(&dirs[0].scale(&b)),
        roots[1].add(&dirs[1].scale(&b)),
        roots[2].add(&dirs[2].scale(&b)),
        roots[3].add(&dirs[3].scale(&b)),
    ];
    for (k, q) in joins.iter().enumerate() {
        if omega.locate(q, &tol.eps_len) != PointLocation::Inside {
            return Err(CoreError::InvalidGeometry(format!(
                "competitor join corner {k} leaves the tube"
            )));
        }
    }
    let mut pts_f: Vec<Point2<S>> = joins.to_vec();
    pts_f.extend(tips.iter().cloned());
    let edges_f = vec![
        Edge::straight(0, 4),
        Edge::straight(1, 5),
        Edge::straight(2, 6),
        Edge::straight(3, 7),
        Edge::straight(0, 2),
        Edge::straight(1, 3),
    ];
    let net_f = Network::new(pts_f, edges_f)?;
    let sub_f = coarse_subdivision(&net_f, &omega, tol)?;
    let mid_y = (h.clone() + delta.clone()) * half.clone();
    let probes_f = [
        (Point2::new(d.clone() * half.clone(), mid_y.clone()), 3u8),
        (Point2::new(d.clone() * half.clone(), mid_y.neg()), 2u8),
        (Point2::new(d.clone() * half.clone(), S::zero()), 1u8),
    ];
    let colored_f = color_faces_by_probes(sub_f, &omega, &probes_f, tol)?;
    let spec_f = build_partition_spec(&omega, &colored_f)?;

    Ok((spec_e, spec_f, net_e, colored_e))
}

/// Color the faces of a subdivision by interior probe points; every face
/// inside the domain must be reached by exactly one color.
pub fn color_faces_by_probes<S: Scalar>(
    subdivision: Subdivision<S>,
    omega: &Polygon<S>,
    probes: &[(Point2<S>, u8)],
    tol: &ToleranceConfig<S>,
) -> Result<ColoredFaces<S>> {
    let inside = subdivision.faces_inside(omega, tol)?;
    let mut colors = vec![0u8; subdivision.faces.len()];
    for (p, c) in probes {
        let f = subdivision.locate_face(p, tol).ok_or_else(|| {
            CoreError::InvalidGeometry(format!(
                "probe ({},{}) does not land inside a face",
                p.x.to_f64(),
                p.y.to_f64()
            ))
        })?;
        if !inside[f] {
            return Err(CoreError::InvalidGeometry(format!(
                "probe ({},{}) lands outside the domain",
                p.x.to_f64(),
                p.y.to_f64()
            )));
        }
        if colors[f] != 0 && colors[f] != *c {
            return Err(CoreError::InconsistentAssignment(format!(
                "face {f} probed with conflicting colors {} and {c}",
                colors[f]
            )));
        }
        colors[f] = *c;
    }
    for (f, inside_f) in inside.iter().enumerate() {
        if *inside_f && colors[f] == 0 {
            return Err(CoreError::InvalidGeometry(format!(
                "face {f} inside the domain was not probed"
            )));
        }
    }
    Ok(ColoredFaces {
        subdivision,
        colors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ToleranceConfig;
    use crate::scalar::{Q3, Scalar};

    fn q(n: i64, d: i64) -> Q3 {
        Q3::from_ratio(n, d)
    }

    #[test]
    fn threshold_join_height_gives_zero_gain() {
        let tol = ToleranceConfig::exact();
        let h = Q3::sqrt3() * q(1, 4);
        let report = counterexample(&q(1, 1), &q(2, 1), &h, &q(1, 2), &tol).unwrap();
        assert_eq!(report.p_e, q(9, 1));
        assert_eq!(report.p_f, q(9, 1));
        assert!(report.delta_p.is_zero());
        assert!(!report.improves);
    }

    #[test]
    fn tall_joins_beat_the_tree() {
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        let report = counterexample(&1.0, &2.0, &0.6, &0.7, &tol).unwrap();
        let expected = 2.4 / 3f64.sqrt() - 1.0;
        assert!((report.delta_p - expected).abs() < 1e-12);
        assert!(report.improves);
        assert!((report.p_e - 9.0).abs() < 1e-12);
        assert!((report.p_f - (9.0 - expected)).abs() < 1e-12);
    }

    #[test]
    fn short_joins_do_not_improve() {
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        let report = counterexample(&1.0, &2.0, &0.2, &0.7, &tol).unwrap();
        assert!(!report.improves);
        assert!(report.delta_p < 0.0);
    }

    #[test]
    fn gain_changes_sign_at_the_critical_height() {
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        let crit = 3f64.sqrt() / 4.0;
        let below = counterexample(&1.0, &2.0, &(crit - 1e-9), &0.5, &tol).unwrap();
        let above = counterexample(&1.0, &2.0, &(crit + 1e-9), &0.5, &tol).unwrap();
        assert!(!below.improves);
        assert!(above.improves);
    }

    #[test]
    fn infeasible_geometry_is_rejected() {
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        // Joins on or outside the tube boundary.
        for h in [0.7, 0.8] {
            let err = counterexample(&1.0, &2.0, &h, &0.7, &tol).unwrap_err();
            assert!(matches!(err, CoreError::InvalidGeometry(_)));
        }
        // Tube too wide for a simple mitered boundary.
        let err = counterexample(&1.0, &2.0, &0.5, &0.9, &tol).unwrap_err();
        assert!(matches!(err, CoreError::InvalidGeometry(_)));
    }

    #[test]
    fn degenerate_dimensions_are_rejected() {
        let tol: ToleranceConfig<f64> = ToleranceConfig::float_default();
        for (d, outer, h, delta) in [
            (0.0, 2.0, 0.2, 0.5),
            (1.0, 1.0, 0.2, 0.5),
            (1.0, 2.0, 0.0, 0.5),
            (1.0, 2.0, 0.2, 0.0),
        ] {
            let err = counterexample(&d, &outer, &h, &delta, &tol).unwrap_err();
            assert!(matches!(err, CoreError::InvalidInput(_)));
        }
    }
}
