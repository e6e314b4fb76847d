//! Invariant tests, one module per library area. Where the acceptance
//! gates pin specific fixtures, these check the laws behind them: norm
//! axioms, rigid-motion invariance, group cancellation, exact certificate
//! algebra, and detection of deliberately corrupted inputs.

mod common;

use netcalib::comparison::{
    compare_same_topology, find_embedded_copy, QuotientSpec, SubgraphSpec,
};
use netcalib::currents::{
    boundary, induce_current, mass, verify_identity_calibration, GroupElement, LatticeCurrent,
};
use netcalib::geometry::{
    generators, hex_dual_norm, hex_norm, Point2, Polygon, Rotation, Segment, ToleranceConfig,
    Vector2,
};
use netcalib::network::{
    canonical_rotation, check_minimal, generate_honeycomb_network, Edge, Network, ViolationKind,
};
use netcalib::offset::polygon_offset_network;
use netcalib::partitions::{
    assign_fields, build_partition_domain, build_partition_spec, counterexample,
    counterexample_specs, flux_check, perimeter_energy, three_color_faces,
    verify_paired_calibration,
};
use netcalib::scalar::{Q3, Scalar};
use netcalib::steiner::steiner_oracle;
use netcalib::CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::q;

mod geometry_invariants {
    use super::*;

    mod norm_laws {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hex_norm_is_homogeneous(
                x in -3.0..3.0f64,
                y in -3.0..3.0f64,
                t in -3.0..3.0f64,
            ) {
                let v = Vector2::new(x, y);
                let scaled = hex_norm(&v.scale(&t));
                let expected = t.abs() * hex_norm(&v);
                let bound = 1e-12 * expected.max(1.0);
                prop_assert!((scaled - expected).abs() <= bound);
            }

            #[test]
            fn hex_norm_satisfies_the_triangle_inequality(
                ux in -3.0..3.0f64,
                uy in -3.0..3.0f64,
                vx in -3.0..3.0f64,
                vy in -3.0..3.0f64,
            ) {
                let u = Vector2::new(ux, uy);
                let v = Vector2::new(vx, vy);
                prop_assert!(
                    hex_norm(&u.add(&v)) <= hex_norm(&u) + hex_norm(&v) + 1e-12
                );
            }
        }
    }

    #[test]
    fn hexagon_vertices_have_unit_norm_symbolically() {
        let [g1, g2, g3] = generators::<Q3>();
        for v in [g1.clone(), g1.neg(), g2.clone(), g2.neg(), g3.clone(), g3.neg()] {
            assert!(hex_norm(&v) == Q3::one());
        }
    }

    #[test]
    fn dual_norm_matches_the_support_function() {
        let [g1, g2, g3] = generators::<f64>();
        let hull = [g1.clone(), g2.neg(), g3.clone(), g1.neg(), g2.clone(), g3.neg()];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let v = Vector2::new(rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
            // Support over the primal unit ball, sampled along its boundary.
            let mut sup = f64::NEG_INFINITY;
            for k in 0..6 {
                let a = &hull[k];
                let b = &hull[(k + 1) % 6];
                for s in 0..=50 {
                    let t = s as f64 / 50.0;
                    let p = a.scale(&(1.0 - t)).add(&b.scale(&t));
                    sup = sup.max(v.dot(&p));
                }
            }
            assert!((hex_dual_norm(&v) - sup).abs() <= 1e-9);
        }
    }

    fn dist_point_segment(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
        let ab = a.to(b);
        let t = (a.to(p).dot(&ab) / ab.norm_sq()).clamp(0.0, 1.0);
        a.add(&ab.scale(&t)).to(p).norm().unwrap()
    }

    fn rings(poly: &Polygon<f64>) -> Vec<&Vec<Point2<f64>>> {
        std::iter::once(&poly.outer).chain(poly.holes.iter()).collect()
    }

    fn segments_cross(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> bool {
        let orient =
            |p: &Point2<f64>, q: &Point2<f64>, r: &Point2<f64>| p.to(q).cross(&p.to(r)).signum();
        orient(a, b, c) != orient(a, b, d)
            && orient(c, d, a) != orient(c, d, b)
            && orient(a, b, c) != 0.0
            && orient(c, d, a) != 0.0
    }

    #[test]
    fn offset_polygon_clears_the_network() {
        let tol = ToleranceConfig::float_default();
        let delta = 0.1;
        for net in [
            common::double_tripod(1, 2).to_f64(),
            common::hex_ring_with_stubs(&Q3::one(), &Q3::from_int(2)).to_f64(),
        ] {
            let poly = polygon_offset_network(&net, &delta, &tol).unwrap();

            // Simplicity: no two non-adjacent boundary segments cross.
            let mut segs: Vec<(Point2<f64>, Point2<f64>)> = Vec::new();
            for ring in rings(&poly) {
                for k in 0..ring.len() {
                    segs.push((ring[k].clone(), ring[(k + 1) % ring.len()].clone()));
                }
            }
            for i in 0..segs.len() {
                for j in (i + 1)..segs.len() {
                    let share = |p: &Point2<f64>, r: &Point2<f64>| p.to(r).norm().unwrap() < 1e-12;
                    if share(&segs[i].0, &segs[j].0)
                        || share(&segs[i].0, &segs[j].1)
                        || share(&segs[i].1, &segs[j].0)
                        || share(&segs[i].1, &segs[j].1)
                    {
                        continue;
                    }
                    assert!(
                        !segments_cross(&segs[i].0, &segs[i].1, &segs[j].0, &segs[j].1),
                        "offset boundary self-intersects"
                    );
                }
            }

            // Clearance: edge interiors keep distance ≥ δ·(1−1e-9) from ∂Ω,
            // excluding the caps, which run orthogonally through the tips.
            let deg = net.degrees();
            let tips: Vec<&Point2<f64>> = (0..net.points.len())
                .filter(|&v| deg[v] == 1)
                .map(|v| &net.points[v])
                .collect();
            let walls: Vec<&(Point2<f64>, Point2<f64>)> = segs
                .iter()
                .filter(|(u, v)| {
                    !tips.iter().any(|t| dist_point_segment(t, u, v) <= 1e-9)
                })
                .collect();
            let floor = delta * (1.0 - 1e-9);
            for e in 0..net.edges.len() {
                let (a, b) = (
                    &net.points[net.edges[e].from],
                    &net.points[net.edges[e].to],
                );
                for s in 1..=19 {
                    let t = s as f64 / 20.0;
                    let p = a.add(&a.to(b).scale(&t));
                    let d = walls
                        .iter()
                        .map(|(u, v)| dist_point_segment(&p, u, v))
                        .fold(f64::INFINITY, f64::min);
                    assert!(d >= floor, "edge {e} at t={t} clears only {d}");
                }
            }
        }
    }
}

mod network_invariants {
    use super::*;

    #[test]
    fn length_is_rigid_motion_invariant() {
        let net = common::double_tripod(3, 2).to_f64();
        let len = net.length().unwrap();
        let rot = Rotation::from_angle(0.7408);
        let shift = Vector2::new(3.1, -2.2);
        let moved = Network {
            points: net
                .points
                .iter()
                .map(|p| rot.apply_point(p).add(&shift))
                .collect(),
            edges: net
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    via: e.via.iter().map(|p| rot.apply_point(p).add(&shift)).collect(),
                })
                .collect(),
        };
        assert!((moved.length().unwrap() - len).abs() <= 1e-12 * len);
    }

    #[test]
    fn generated_networks_are_minimal_aligned_and_tipped() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        for seed in 0..60u64 {
            let net: Network<Q3> = generate_honeycomb_network(seed, (seed % 9) as u32);
            let cert = check_minimal(&net, &tol).unwrap();
            assert!(cert.is_minimal, "seed {seed}");
            assert!(cert.endpoints >= 1, "seed {seed}");
            let rot = canonical_rotation(&net, &tol).unwrap();
            assert!(rot.angle().abs() <= 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn fourth_junction_leg_is_flagged() {
        let tol = ToleranceConfig::float_default();
        let net = Network {
            points: vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(-1.0, 1.0),
                Point2::new(-1.0, -1.0),
                Point2::new(1.0, -1.0),
            ],
            edges: (1..=4).map(|k| Edge::straight(0, k)).collect(),
        };
        let cert = check_minimal(&net, &tol).unwrap();
        assert!(!cert.is_minimal);
        assert!(cert
            .violations
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::JunctionOrder)));
    }
}

mod current_invariants {
    use super::*;

    #[test]
    fn junction_multiplicities_cancel() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        for seed in [0u64, 3, 7, 11, 19, 23] {
            let net: Network<Q3> = generate_honeycomb_network(seed, 2 + (seed % 6) as u32);
            let ind = induce_current(&net, &tol).unwrap();
            let deg = ind.rotated_network.degrees();
            for (v, p) in ind.rotated_network.points.iter().enumerate() {
                if deg[v] != 3 {
                    continue;
                }
                let mut sum = GroupElement::zero();
                for piece in &ind.current.pieces {
                    if piece.segment.b == *p {
                        sum = sum.add(&piece.multiplicity);
                    }
                    if piece.segment.a == *p {
                        sum = sum.add(&piece.multiplicity.neg());
                    }
                }
                assert!(sum.is_zero(), "junction {v} of seed {seed} does not cancel");
            }
        }
    }

    #[test]
    fn honeycomb_mass_equals_length_exactly() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        for seed in [1u64, 5, 13] {
            let net: Network<Q3> = generate_honeycomb_network(seed, 4);
            let ind = induce_current(&net, &tol).unwrap();
            assert!(mass(&ind.current).unwrap() == net.length().unwrap());
        }
    }

    #[test]
    fn boundary_atoms_are_signed_generators_at_the_tips() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let net: Network<Q3> = generate_honeycomb_network(2, 5);
        let ind = induce_current(&net, &tol).unwrap();
        let b = boundary(&ind.current, &tol);
        let deg = ind.rotated_network.degrees();
        let mut sum = GroupElement::zero();
        for atom in &b.atoms {
            assert!([(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)]
                .contains(&(atom.coefficient.n, atom.coefficient.m)));
            assert!((0..ind.rotated_network.points.len())
                .any(|v| deg[v] == 1 && ind.rotated_network.points[v] == atom.point));
            sum = sum.add(&atom.coefficient);
        }
        assert!(sum.is_zero());
        assert_eq!(
            b.atoms.len(),
            deg.iter().filter(|&&d| d == 1).count(),
            "every tip carries exactly one atom"
        );
    }

    #[test]
    fn corrupting_one_multiplicity_breaks_the_calibration() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let net: Network<Q3> = generate_honeycomb_network(0, 1);
        let ind = induce_current(&net, &tol).unwrap();
        assert!(verify_identity_calibration(&ind.current, 16, &tol)
            .unwrap()
            .passed);
        let others = [
            GroupElement::new(1, 0),
            GroupElement::new(0, 1),
            GroupElement::new(-1, -1),
        ];
        for i in 0..ind.current.pieces.len() {
            let wrong = others
                .iter()
                .find(|g| **g != ind.current.pieces[i].multiplicity)
                .unwrap();
            let mut bad = ind.current.clone();
            bad.pieces[i].multiplicity = *wrong;
            let res = verify_identity_calibration(&bad, 16, &tol);
            assert!(
                matches!(res, Err(CoreError::CalibrationFailure(_))),
                "piece {i} with multiplicity swapped must fail the pairing check"
            );
        }
    }

    #[test]
    fn mass_survives_collinear_subdivision() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let net: Network<Q3> = generate_honeycomb_network(0, 2);
        let ind = induce_current(&net, &tol).unwrap();
        let whole = mass(&ind.current).unwrap();

        let mut split = LatticeCurrent { pieces: Vec::new() };
        for piece in &ind.current.pieces {
            let mid = piece.segment.midpoint();
            let mut first = piece.clone();
            first.segment = Segment::new(piece.segment.a.clone(), mid.clone());
            let mut second = piece.clone();
            second.segment = Segment::new(mid, piece.segment.b.clone());
            split.pieces.push(first);
            split.pieces.push(second);
        }
        assert!(mass(&split).unwrap() == whole);
    }
}

mod comparison_invariants {
    use super::*;

    #[test]
    fn identical_networks_compare_exactly() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let net = common::double_tripod(1, 2);
        let cert = compare_same_topology(&net, &net, &tol).unwrap();
        assert!(cert.verdict && cert.boundary_match);
        assert!(cert.reference_length == cert.competitor_length);
        assert!(cert.competitor_mass == cert.competitor_length);
    }

    #[test]
    fn perturbed_honeycombs_never_win() {
        let tol = ToleranceConfig::float_default();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut ran = 0;
        for seed in 0..200u64 {
            let net: Network<Q3> = generate_honeycomb_network(seed, 2 + (seed % 5) as u32);
            let refn = net.to_f64();
            let pert = common::perturb_junctions(&refn, &mut rng, 0.04);
            let pert = common::zigzag_edges(&pert, &mut rng, 0.04);
            let cert = compare_same_topology(&refn, &pert, &tol).unwrap();
            assert!(cert.verdict, "seed {seed}");
            assert!(cert.boundary_match, "seed {seed}");
            assert!(
                cert.competitor_length >= cert.reference_length - 1e-9,
                "seed {seed}"
            );
            ran += 1;
        }
        assert_eq!(ran, 200);
    }

    #[test]
    fn moved_endpoint_is_rejected() {
        let tol = ToleranceConfig::float_default();
        let refn = common::double_tripod(1, 2).to_f64();
        let mut comp = refn.clone();
        comp.points[2].x += 0.5;
        assert!(matches!(
            compare_same_topology(&refn, &comp, &tol),
            Err(CoreError::InvalidComparison(_))
        ));
    }

    #[test]
    fn embedded_copy_paths_are_vertex_simple() {
        let tol = ToleranceConfig::float_default();
        let refn = common::double_tripod(4, 4).to_f64();
        let s3 = 3f64.sqrt();
        // Triangle at the left junction, diamond lens on the central edge.
        let comp = Network {
            points: vec![
                Point2::new(-1.0, s3),
                Point2::new(-1.0, -s3),
                Point2::new(0.5, 0.0),
                Point2::new(1.5, 0.0),
                Point2::new(2.4, 0.5),
                Point2::new(2.4, -0.5),
                Point2::new(3.3, 0.0),
                Point2::new(4.0, 0.0),
                Point2::new(-2.0, 2.0 * s3),
                Point2::new(-2.0, -2.0 * s3),
                Point2::new(6.0, 2.0 * s3),
                Point2::new(6.0, -2.0 * s3),
            ],
            edges: vec![
                Edge::straight(0, 1),
                Edge::straight(0, 2),
                Edge::straight(1, 2),
                Edge::straight(3, 4),
                Edge::straight(4, 6),
                Edge::straight(3, 5),
                Edge::straight(5, 6),
                Edge::straight(2, 3),
                Edge::straight(6, 7),
                Edge::straight(0, 8),
                Edge::straight(1, 9),
                Edge::straight(7, 10),
                Edge::straight(7, 11),
            ],
        };
        let quot = QuotientSpec {
            collapsed: vec![
                SubgraphSpec { vertices: vec![0, 1, 2], edges: vec![0, 1, 2] },
                SubgraphSpec { vertices: vec![3, 4, 5, 6], edges: vec![3, 4, 5, 6] },
            ],
            endpoint_map: vec![(2, 8), (3, 9), (4, 10), (5, 11)],
        };
        let paths = find_embedded_copy(&refn, &comp, &quot, &tol).unwrap();
        assert_eq!(paths.len(), refn.edges.len());
        for path in &paths {
            assert!(!path.is_empty());
            let mut visited = Vec::new();
            let first = &path[0];
            let start = if first.1 { comp.edges[first.0].from } else { comp.edges[first.0].to };
            visited.push(start);
            let mut at = start;
            for &(e, forward) in path {
                let (tail, head) = if forward {
                    (comp.edges[e].from, comp.edges[e].to)
                } else {
                    (comp.edges[e].to, comp.edges[e].from)
                };
                assert_eq!(tail, at, "path steps must chain");
                assert!(!visited.contains(&head), "path revisits a vertex");
                visited.push(head);
                at = head;
            }
        }
    }

    #[test]
    fn oracle_never_beats_short_trees() {
        for seed in 0..20u64 {
            let net: Network<Q3> = generate_honeycomb_network(seed, (seed % 3) as u32);
            if !common::is_tree(&net) {
                continue;
            }
            let f = net.to_f64();
            let deg = f.degrees();
            let terminals: Vec<Point2<f64>> = (0..f.points.len())
                .filter(|&v| deg[v] == 1)
                .map(|v| f.points[v].clone())
                .collect();
            if terminals.len() > 5 {
                continue;
            }
            let (olen, _) = steiner_oracle(&terminals).unwrap();
            assert!(olen <= f.length().unwrap() + 1e-8, "seed {seed}");
        }
    }
}

mod partition_invariants {
    use super::*;

    #[test]
    fn honeycomb_tubes_calibrate_exactly() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        // 0.9 of the half-width threshold for unit lattice edges.
        let delta = Q3::sqrt3() * q(9, 80);
        let delta_prime = q(1, 2);
        for seed in [1u64, 4, 9] {
            let net: Network<Q3> = generate_honeycomb_network(seed, 2 + (seed % 3) as u32);
            let (omega, ext) =
                build_partition_domain(&net, &delta, &delta_prime, None, &tol).unwrap();
            let colored = three_color_faces(&ext, &omega, &tol).unwrap();
            let spec = build_partition_spec(&omega, &colored).unwrap();
            let fields = assign_fields(&ext, &omega, &colored, &tol).unwrap();
            let rep = verify_paired_calibration(&spec, &fields, &tol).unwrap();
            assert!(rep.verdict, "seed {seed}");
            assert!(
                rep.norm_excess == 0.0
                    && rep.sum_residual == 0.0
                    && rep.interface_residual == 0.0
                    && rep.trace_residual == 0.0,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn corrupted_cell_field_is_detected() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let net = common::double_tripod(1, 2);
        let (omega, ext) = build_partition_domain(&net, &q(1, 5), &q(3, 10), None, &tol).unwrap();
        let colored = three_color_faces(&ext, &omega, &tol).unwrap();
        let spec = build_partition_spec(&omega, &colored).unwrap();
        let fields = assign_fields(&ext, &omega, &colored, &tol).unwrap();
        assert!(verify_paired_calibration(&spec, &fields, &tol).unwrap().verdict);

        let filled: Vec<usize> = (0..fields.fields.len())
            .filter(|&i| fields.fields[i].is_some())
            .collect();
        let mut corrupted = 0;
        for &i in &filled {
            let Some(&j) = filled
                .iter()
                .find(|&&j| fields.fields[j] != fields.fields[i])
            else {
                continue;
            };
            let mut bad = fields.clone();
            let replacement = fields.fields[j].clone();
            bad.fields[i] = replacement;
            let rep = verify_paired_calibration(&spec, &bad, &tol).unwrap();
            assert!(!rep.verdict, "cell {i} with cell {j}'s field goes undetected");
            assert!(
                rep.norm_excess > 0.0
                    || rep.sum_residual > 0.0
                    || rep.interface_residual > 0.0
                    || rep.trace_residual > 0.0,
                "cell {i}: verdict failed but no residual is positive"
            );
            corrupted += 1;
        }
        assert!(corrupted >= 4, "fixture must expose several distinct fields");
    }

    #[test]
    fn perimeter_energy_matches_an_independent_walk() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let mut specs = Vec::new();
        for (net, dp) in [
            (common::double_tripod(1, 2), q(3, 10)),
            (common::hex_ring_with_stubs(&Q3::one(), &Q3::from_int(2)), q(1, 2)),
        ] {
            let (omega, ext) = build_partition_domain(&net, &q(1, 5), &dp, None, &tol).unwrap();
            let colored = three_color_faces(&ext, &omega, &tol).unwrap();
            specs.push(build_partition_spec(&omega, &colored).unwrap());
        }
        let (spec_e, spec_f, _, _) =
            counterexample_specs(&q(1, 1), &q(2, 1), &q(2, 5), &q(3, 5), &tol).unwrap();
        specs.push(spec_e);
        specs.push(spec_f);

        for spec in &specs {
            assert!(perimeter_energy(spec).unwrap() == common::region_perimeter_recompute(spec));
        }
    }

    #[test]
    fn join_height_improvement_matches_the_closed_form() {
        let tol = ToleranceConfig::float_default();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let d = rng.gen_range(0.8..=1.2);
            let outer = d + rng.gen_range(0.5..=1.5);
            let delta = rng.gen_range(0.3..=0.55) * d;
            let h = delta * rng.gen_range(0.1..=0.9);
            let rep = counterexample(&d, &outer, &h, &delta, &tol).unwrap();
            assert!((rep.delta_p - (4.0 * h / 3f64.sqrt() - d)).abs() <= 1e-12);
        }
    }

    #[test]
    fn improvement_flips_exactly_at_the_critical_height() {
        let tol = ToleranceConfig::float_default();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let d = rng.gen_range(0.5..=1.0);
            let crit = 3f64.sqrt() / 4.0 * d;
            let delta = crit + 0.2 * d;
            let outer = 2.0 * d;
            let below = counterexample(&d, &outer, &(crit - 1e-9), &delta, &tol).unwrap();
            let above = counterexample(&d, &outer, &(crit + 1e-9), &delta, &tol).unwrap();
            assert!(!below.improves);
            assert!(above.improves);
        }
    }

    #[test]
    fn flux_matches_across_trace_matched_pairs() {
        let tol: ToleranceConfig<Q3> = ToleranceConfig::exact();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let d = q(80 + rng.gen_range(0..40), 100);
            let outer = d.clone() + q(50 + rng.gen_range(0..100), 100);
            let delta = q(30 + rng.gen_range(0..25), 100);
            let h = delta.clone() * q(10 + rng.gen_range(0..80), 100);
            let (spec_e, spec_f, net_e, colored) =
                counterexample_specs(&d, &outer, &h, &delta, &tol).unwrap();
            let fields = assign_fields(&net_e, &spec_e.omega, &colored, &tol).unwrap();
            assert!(flux_check(&spec_e, &spec_f, &fields, &tol).unwrap().is_zero());
            assert!(flux_check(&spec_e, &spec_e, &fields, &tol).unwrap().is_zero());
        }
    }
}
