//! JSON interchange types shared by the library and the CLI.
//!
//! Every certificate and report has a stable DTO here, and networks,
//! currents, and quotient specs parse from the documented schemas. Output
//! goes through [`to_json_string`], which prints floats with 17 significant
//! digits so values round-trip bit-for-bit and reruns are byte-identical.

use std::collections::BTreeMap;
use serde::{Deserialize, Serialize};

use crate::comparison::{ComparisonCertificate, QuotientSpec, SubgraphSpec};
use crate::currents::{BoundaryMeasure, CalibrationReport, CurrentPiece, GroupElement, LatticeCurrent};
use crate::error::{CoreError, Result};
use crate::geometry::{Point2, Polygon, Segment};
use crate::network::{Edge, MinimalityCertificate, Network};
use crate::partitions::{
    FieldAssignment, PartitionCalibrationReport, PartitionSpec, PAIRS,
};
use crate::scalar::{Q3, Scalar};

/// Scalars constructible from JSON numbers. `f64` accepts any finite value;
/// [`Q3`] snaps to the nearest exactly-representable coordinate.
pub trait JsonScalar: Scalar {
    fn from_json_number(x: f64) -> Result<Self>;
}

impl JsonScalar for f64 {
    fn from_json_number(x: f64) -> Result<f64> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(CoreError::InvalidInput("non-finite coordinate".into()))
        }
    }
}

impl JsonScalar for Q3 {
    fn from_json_number(x: f64) -> Result<Q3> {
        snap_to_q3(x).ok_or_else(|| {
            CoreError::ExactArithmetic(format!(
                "{x} is not within 1e-9 of p/q + (r/s)·√3 with denominators ≤ 24"
            ))
        })
    }
}

/// Snap a float to `p/q + (r/s)·√3` with denominators ≤ 24, the grid all
/// fixture coordinates live on. Returns `None` when nothing is within 1e-9.
pub fn snap_to_q3(x: f64) -> Option<Q3> {
    const MAX_DEN: i64 = 24;
    const EPS: f64 = 1e-9;
    if !x.is_finite() {
        return None;
    }
    let sqrt3 = 3f64.sqrt();
    let rational = |v: f64| -> Option<(i64, i64)> {
        for den in 1..=MAX_DEN {
            let num = (v * den as f64).round();
            if num.abs() > 1e15 {
                return None;
            }
            if (v - num / den as f64).abs() <= EPS {
                return Some((num as i64, den));
            }
        }
        None
    };
    // Pure rational, then a pure multiple of √3: almost every real input.
    if let Some((n, d)) = rational(x) {
        return Some(Q3::from_ratio(n, d));
    }
    if let Some((n, d)) = rational(x / sqrt3) {
        return Some(Q3::from_parts(0, 1, n, d));
    }
    // Mixed a + b·√3: bounded search over the √3 part.
    let bound = x.abs() / sqrt3 + 8.0;
    for den_b in 1..=MAX_DEN {
        let lim = (bound * den_b as f64).ceil() as i64;
        for num_b in -lim..=lim {
            if num_b == 0 {
                continue;
            }
            let rem = x - num_b as f64 * sqrt3 / den_b as f64;
            if let Some((n, d)) = rational(rem) {
                return Some(Q3::from_parts(n, d, num_b, den_b));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with 17-significant-digit floats and deterministic key order.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CoreError::InvalidInput(format!("serialization failed: {e}")))?;
    String::from_utf8(out)
        .map_err(|e| CoreError::InvalidInput(format!("serialization produced invalid UTF-8: {e}")))
}

/// Parse JSON, reporting the line/column diagnostic on failure.
pub fn from_json_str<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| CoreError::InvalidInput(format!("JSON parse error: {e}")))
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexDto {
    pub id: String,
    pub x: f64,
    pub y: f64,
    /// "junction" (degree ≠ 1) or "endpoint" (degree 1).
    pub kind: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDto {
    pub from: String,
    pub to: String,
    /// Full vertex chain including both endpoints; absent means straight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkDto {
    pub vertices: Vec<VertexDto>,
    pub edges: Vec<EdgeDto>,
}

/// Map vertex ids to indices, rejecting duplicates.
pub fn vertex_ids(dto: &NetworkDto) -> Result<BTreeMap<String, usize>> {
    let mut ids = BTreeMap::new();
    for (i, v) in dto.vertices.iter().enumerate() {
        if ids.insert(v.id.clone(), i).is_some() {
            return Err(CoreError::InvalidInput(format!(
                "duplicate vertex id {:?}",
                v.id
            )));
        }
    }
    Ok(ids)
}

pub fn network_from_dto<S: JsonScalar>(dto: &NetworkDto) -> Result<Network<S>> {
    let ids = vertex_ids(dto)?;
    let mut points = Vec::with_capacity(dto.vertices.len());
    for v in &dto.vertices {
        points.push(Point2::new(
            S::from_json_number(v.x)?,
            S::from_json_number(v.y)?,
        ));
    }
    let mut degrees = vec![0usize; dto.vertices.len()];
    let mut edges = Vec::with_capacity(dto.edges.len());
    for (e, edge) in dto.edges.iter().enumerate() {
        let lookup = |id: &String| {
            ids.get(id).copied().ok_or_else(|| {
                CoreError::InvalidInput(format!("edge {e} references unknown vertex id {id:?}"))
            })
        };
        let from = lookup(&edge.from)?;
        let to = lookup(&edge.to)?;
        degrees[from] += 1;
        degrees[to] += 1;
        let via = match &edge.polyline {
            None => Vec::new(),
            Some(chain) => {
                if chain.len() < 2 {
                    return Err(CoreError::InvalidInput(format!(
                        "edge {e}: polyline needs at least the two endpoints"
                    )));
                }
                let pts: Vec<Point2<S>> = chain
                    .iter()
                    .map(|&[x, y]| {
                        Ok(Point2::new(S::from_json_number(x)?, S::from_json_number(y)?))
                    })
                    .collect::<Result<_>>()?;
                if pts[0] != points[from] || pts[pts.len() - 1] != points[to] {
                    return Err(CoreError::InvalidInput(format!(
                        "edge {e}: polyline must start at {:?} and end at {:?}",
                        edge.from, edge.to
                    )));
                }
                pts[1..pts.len() - 1].to_vec()
            }
        };
        edges.push(Edge { from, to, via });
    }
    for (v, vertex) in dto.vertices.iter().enumerate() {
        let want_endpoint = match vertex.kind.as_str() {
            "endpoint" => true,
            "junction" => false,
            other => {
                return Err(CoreError::InvalidInput(format!(
                    "vertex {:?}: unknown kind {other:?}",
                    vertex.id
                )))
            }
        };
        if want_endpoint != (degrees[v] == 1) {
            return Err(CoreError::InvalidInput(format!(
                "vertex {:?} is marked {:?} but has degree {}",
                vertex.id, vertex.kind, degrees[v]
            )));
        }
    }
    Network::new(points, edges)
}

pub fn network_to_dto<S: Scalar>(net: &Network<S>) -> NetworkDto {
    let degrees = net.degrees();
    let vertices = net
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = p.to_f64();
            VertexDto {
                id: format!("v{i}"),
                x: p.x,
                y: p.y,
                kind: if degrees[i] == 1 { "endpoint" } else { "junction" }.into(),
            }
        })
        .collect();
    let edges = (0..net.edges.len())
        .map(|e| {
            let edge = &net.edges[e];
            let polyline = if edge.via.is_empty() {
                None
            } else {
                Some(
                    net.edge_chain(e)
                        .iter()
                        .map(|p| {
                            let p = p.to_f64();
                            [p.x, p.y]
                        })
                        .collect(),
                )
            };
            EdgeDto {
                from: format!("v{}", edge.from),
                to: format!("v{}", edge.to),
                polyline,
            }
        })
        .collect();
    NetworkDto { vertices, edges }
}

// ---------------------------------------------------------------------------
// Minimality certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationDto {
    pub kind: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimalityCertificateDto {
    pub is_minimal: bool,
    pub violations: Vec<ViolationDto>,
    pub max_balance_residual: f64,
    pub junctions: usize,
    pub endpoints: usize,
}

pub fn minimality_to_dto(cert: &MinimalityCertificate) -> MinimalityCertificateDto {
    MinimalityCertificateDto {
        is_minimal: cert.is_minimal,
        violations: cert
            .violations
            .iter()
            .map(|v| ViolationDto {
                kind: v.kind.as_str().into(),
                detail: v.detail.clone(),
                residual: v.residual,
            })
            .collect(),
        max_balance_residual: cert.max_balance_residual,
        junctions: cert.junctions,
        endpoints: cert.endpoints,
    }
}

// ---------------------------------------------------------------------------
// Currents
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceDto {
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Lattice coordinates (n, m) of the multiplicity n·g1 + m·g2.
    pub mult: [i64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurrentDto {
    pub pieces: Vec<PieceDto>,
}

pub fn current_to_dto<S: Scalar>(current: &LatticeCurrent<S>) -> CurrentDto {
    CurrentDto {
        pieces: current
            .pieces
            .iter()
            .map(|p| {
                let a = p.segment.a.to_f64();
                let b = p.segment.b.to_f64();
                PieceDto {
                    a: [a.x, a.y],
                    b: [b.x, b.y],
                    mult: [p.multiplicity.n, p.multiplicity.m],
                }
            })
            .collect(),
    }
}

pub fn current_from_dto<S: JsonScalar>(dto: &CurrentDto) -> Result<LatticeCurrent<S>> {
    let mut pieces = Vec::with_capacity(dto.pieces.len());
    for (i, p) in dto.pieces.iter().enumerate() {
        let a = Point2::new(S::from_json_number(p.a[0])?, S::from_json_number(p.a[1])?);
        let b = Point2::new(S::from_json_number(p.b[0])?, S::from_json_number(p.b[1])?);
        let segment = Segment::new(a, b);
        let orientation = segment.dir().unit().ok_or_else(|| {
            CoreError::InvalidInput(format!("piece {i} has coincident endpoints"))
        })?;
        pieces.push(CurrentPiece {
            segment,
            orientation,
            multiplicity: GroupElement { n: p.mult[0], m: p.mult[1] },
        });
    }
    Ok(LatticeCurrent { pieces })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryAtomDto {
    pub point: [f64; 2],
    pub mult: [i64; 2],
}

pub fn boundary_to_dto<S: Scalar>(boundary: &BoundaryMeasure<S>) -> Vec<BoundaryAtomDto> {
    boundary
        .atoms
        .iter()
        .map(|atom| {
            let p = atom.point.to_f64();
            BoundaryAtomDto {
                point: [p.x, p.y],
                mult: [atom.coefficient.n, atom.coefficient.m],
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationReportDto {
    pub closedness: String,
    pub comass_max: f64,
    pub comass_at_critical: f64,
    pub pieces_checked: usize,
    pub max_residual: f64,
    pub passed: bool,
}

pub fn calibration_to_dto(report: &CalibrationReport) -> CalibrationReportDto {
    CalibrationReportDto {
        closedness: report.closedness.into(),
        comass_max: report.comass_max,
        comass_at_critical: report.comass_at_critical,
        pieces_checked: report.pieces_checked,
        max_residual: report.max_residual,
        passed: report.passed,
    }
}

/// Full output of a current calibration run: mass/length bookkeeping, the
/// boundary atoms, and the form-level report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurrentCertificateDto {
    pub mass: f64,
    pub length: f64,
    pub mass_equals_length: bool,
    pub boundary: Vec<BoundaryAtomDto>,
    /// Lattice sum of all boundary coefficients; (0, 0) for closed inputs.
    pub boundary_sum: [i64; 2],
    pub calibration: CalibrationReportDto,
}

// ---------------------------------------------------------------------------
// Comparison certificates and quotient specs
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonCertificateDto {
    pub reference_length: f64,
    pub competitor_length: f64,
    pub competitor_mass: f64,
    pub boundary_match: bool,
    pub verdict: bool,
    pub construction_log: Vec<String>,
}

pub fn comparison_to_dto<S: Scalar>(cert: &ComparisonCertificate<S>) -> ComparisonCertificateDto {
    ComparisonCertificateDto {
        reference_length: cert.reference_length.to_f64(),
        competitor_length: cert.competitor_length.to_f64(),
        competitor_mass: cert.competitor_mass.to_f64(),
        boundary_match: cert.boundary_match,
        verdict: cert.verdict,
        construction_log: cert.construction_log.clone(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubgraphDto {
    /// Vertex ids in the network owning the collapsed subgraphs.
    pub vertices: Vec<String>,
    /// 0-based indices into that network's edge array.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientSpecDto {
    pub collapse: Vec<SubgraphDto>,
    /// Reference endpoint id → competitor vertex id.
    pub endpoint_map: BTreeMap<String, String>,
}

/// Resolve a quotient spec against the id maps of the two networks.
/// `collapse_ids` is the map of whichever network owns the collapsed
/// subgraphs (competitor for richer mode, reference for poorer).
pub fn quotient_from_dto(
    dto: &QuotientSpecDto,
    collapse_ids: &BTreeMap<String, usize>,
    collapse_edge_count: usize,
    ref_ids: &BTreeMap<String, usize>,
    comp_ids: &BTreeMap<String, usize>,
) -> Result<QuotientSpec> {
    let mut collapsed = Vec::with_capacity(dto.collapse.len());
    for (i, sub) in dto.collapse.iter().enumerate() {
        let mut vertices = Vec::with_capacity(sub.vertices.len());
        for id in &sub.vertices {
            vertices.push(*collapse_ids.get(id).ok_or_else(|| {
                CoreError::InvalidInput(format!(
                    "collapse group {i} references unknown vertex id {id:?}"
                ))
            })?);
        }
        for &e in &sub.edges {
            if e >= collapse_edge_count {
                return Err(CoreError::InvalidInput(format!(
                    "collapse group {i} references edge index {e} out of range"
                )));
            }
        }
        collapsed.push(SubgraphSpec { vertices, edges: sub.edges.clone() });
    }
    let mut endpoint_map = Vec::with_capacity(dto.endpoint_map.len());
    for (ref_id, comp_id) in &dto.endpoint_map {
        let r = *ref_ids.get(ref_id).ok_or_else(|| {
            CoreError::InvalidInput(format!("endpoint_map key {ref_id:?} is not a reference vertex"))
        })?;
        let c = *comp_ids.get(comp_id).ok_or_else(|| {
            CoreError::InvalidInput(format!(
                "endpoint_map value {comp_id:?} is not a competitor vertex"
            ))
        })?;
        endpoint_map.push((r, c));
    }
    Ok(QuotientSpec { collapsed, endpoint_map })
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonDto {
    pub outer: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<[f64; 2]>>,
}

pub fn polygon_from_dto<S: JsonScalar>(dto: &PolygonDto) -> Result<Polygon<S>> {
    let ring = |r: &[[f64; 2]]| -> Result<Vec<Point2<S>>> {
        r.iter()
            .map(|&[x, y]| Ok(Point2::new(S::from_json_number(x)?, S::from_json_number(y)?)))
            .collect()
    };
    let outer = ring(&dto.outer)?;
    let holes = dto.holes.iter().map(|h| ring(h)).collect::<Result<_>>()?;
    Polygon::new(outer, holes)
}

fn ring_to_dto<S: Scalar>(ring: &[Point2<S>]) -> Vec<[f64; 2]> {
    ring.iter()
        .map(|p| {
            let p = p.to_f64();
            [p.x, p.y]
        })
        .collect()
}

pub fn polygon_to_dto<S: Scalar>(poly: &Polygon<S>) -> PolygonDto {
    PolygonDto {
        outer: ring_to_dto(&poly.outer),
        holes: poly.holes.iter().map(|h| ring_to_dto(h)).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterfaceDto {
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// "12", "23", or "31".
    pub label: String,
    pub normal: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionSpecDto {
    pub omega: PolygonDto,
    /// Region polygons for colors 1, 2, 3 in order.
    pub regions: Vec<Vec<PolygonDto>>,
    pub interfaces: Vec<InterfaceDto>,
}

pub fn partition_spec_to_dto<S: Scalar>(spec: &PartitionSpec<S>) -> PartitionSpecDto {
    PartitionSpecDto {
        omega: polygon_to_dto(&spec.omega),
        regions: spec
            .regions
            .iter()
            .map(|region| region.iter().map(polygon_to_dto).collect())
            .collect(),
        interfaces: spec
            .interfaces
            .iter()
            .map(|itf| {
                let a = itf.segment.a.to_f64();
                let b = itf.segment.b.to_f64();
                let (i, j) = PAIRS[itf.pair];
                InterfaceDto {
                    a: [a.x, a.y],
                    b: [b.x, b.y],
                    label: format!("{i}{j}"),
                    normal: [itf.normal.x.to_f64(), itf.normal.y.to_f64()],
                }
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellFieldsDto {
    pub cell: PolygonDto,
    /// [Ψ12, Ψ23, Ψ31], or null for cells outside the domain.
    pub fields: Option<[[f64; 2]; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldAssignmentDto {
    pub cells: Vec<CellFieldsDto>,
}

pub fn fields_to_dto<S: Scalar>(assignment: &FieldAssignment<S>) -> FieldAssignmentDto {
    FieldAssignmentDto {
        cells: assignment
            .cells
            .faces
            .iter()
            .zip(&assignment.fields)
            .map(|(face, fields)| CellFieldsDto {
                cell: polygon_to_dto(&face.polygon),
                fields: fields.as_ref().map(|psi| {
                    [0, 1, 2].map(|k| {
                        let v = &psi[k];
                        [v.x.to_f64(), v.y.to_f64()]
                    })
                }),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionReportDto {
    pub norm_excess: f64,
    pub sum_residual: f64,
    pub interface_residual: f64,
    pub trace_residual: f64,
    pub verdict: bool,
    pub log: Vec<String>,
}

pub fn partition_report_to_dto(report: &PartitionCalibrationReport) -> PartitionReportDto {
    PartitionReportDto {
        norm_excess: report.norm_excess,
        sum_residual: report.sum_residual,
        interface_residual: report.interface_residual,
        trace_residual: report.trace_residual,
        verdict: report.verdict,
        log: report.log.clone(),
    }
}

/// Perimeter comparison of the fattened tree against the taller-join
/// competitor family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleDto {
    #[serde(rename = "P_E")]
    pub p_e: f64,
    #[serde(rename = "P_F")]
    pub p_f: f64,
    #[serde(rename = "delta_P")]
    pub delta_p: f64,
    pub improves: bool,
}

/// Steiner oracle output: the best length found and the realizing network.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleDto {
    pub length: f64,
    pub network: NetworkDto,
}
