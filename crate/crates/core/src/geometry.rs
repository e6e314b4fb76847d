//! Planar primitives and the hexagonal (crystalline) norm pair.
//!
//! The norm's unit ball is the regular hexagon with vertices at ±g₁, ±g₂,
//! ±g₃ where g₁ = (1,0), g₂ = (−1/2, −√3/2), g₃ = −g₁ − g₂. The closed form
//! used here is the polar-facet support form of that hexagon: each facet has
//! outward unit normal in {(0,±1), (±√3/2, ±1/2)} at support distance √3/2,
//! which collapses to three absolute values. Tests validate it against an
//! independent hull-membership bisection oracle.

use std::cmp::Ordering;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Point2 { x, y }
    }

    pub fn to(&self, other: &Point2<S>) -> Vector2<S> {
        Vector2 {
            x: other.x.clone() - self.x.clone(),
            y: other.y.clone() - self.y.clone(),
        }
    }

    pub fn add(&self, v: &Vector2<S>) -> Point2<S> {
        Point2 {
            x: self.x.clone() + v.x.clone(),
            y: self.y.clone() + v.y.clone(),
        }
    }

    pub fn midpoint(&self, other: &Point2<S>) -> Point2<S> {
        let half = S::from_ratio(1, 2);
        Point2 {
            x: (self.x.clone() + other.x.clone()) * half.clone(),
            y: (self.y.clone() + other.y.clone()) * half,
        }
    }

    pub fn dist_sq(&self, other: &Point2<S>) -> S {
        self.to(other).norm_sq()
    }

    pub fn approx_eq(&self, other: &Point2<S>, eps: &S) -> bool {
        (self.x.clone() - other.x.clone()).abs() <= *eps
            && (self.y.clone() - other.y.clone()).abs() <= *eps
    }

    pub fn to_f64(&self) -> Point2<f64> {
        Point2 {
            x: self.x.to_f64(),
            y: self.y.to_f64(),
        }
    }

    /// Lexicographic (x, then y) total order for canonical sorting.
    pub fn cmp_lex(&self, other: &Point2<S>) -> Ordering {
        self.x
            .cmp_total(&other.x)
            .then_with(|| self.y.cmp_total(&other.y))
    }
}

impl<S: Scalar> Vector2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vector2 { x, y }
    }

    pub fn zero() -> Self {
        Vector2 {
            x: S::zero(),
            y: S::zero(),
        }
    }

    pub fn add(&self, other: &Vector2<S>) -> Vector2<S> {
        Vector2 {
            x: self.x.clone() + other.x.clone(),
            y: self.y.clone() + other.y.clone(),
        }
    }

    pub fn sub(&self, other: &Vector2<S>) -> Vector2<S> {
        Vector2 {
            x: self.x.clone() - other.x.clone(),
            y: self.y.clone() - other.y.clone(),
        }
    }

    pub fn neg(&self) -> Vector2<S> {
        Vector2 {
            x: -self.x.clone(),
            y: -self.y.clone(),
        }
    }

    pub fn scale(&self, k: &S) -> Vector2<S> {
        Vector2 {
            x: self.x.clone() * k.clone(),
            y: self.y.clone() * k.clone(),
        }
    }

    pub fn dot(&self, other: &Vector2<S>) -> S {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn cross(&self, other: &Vector2<S>) -> S {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    /// Euclidean length; `None` when the exact model cannot represent it.
    pub fn norm(&self) -> Option<S> {
        self.norm_sq().sqrt()
    }

    /// 90° counterclockwise rotation: (x, y) ↦ (−y, x).
    pub fn rot90(&self) -> Vector2<S> {
        Vector2 {
            x: -self.y.clone(),
            y: self.x.clone(),
        }
    }

    pub fn unit(&self) -> Option<Vector2<S>> {
        let n = self.norm()?;
        if n.is_zero() {
            return None;
        }
        Some(Vector2 {
            x: self.x.clone() / n.clone(),
            y: self.y.clone() / n,
        })
    }

    pub fn to_f64(&self) -> Vector2<f64> {
        Vector2 {
            x: self.x.to_f64(),
            y: self.y.to_f64(),
        }
    }
}

/// Euclidean length of a vector, as a typed error when not representable.
pub fn vector_norm<S: Scalar>(v: &Vector2<S>) -> Result<S> {
    v.norm().ok_or_else(|| {
        CoreError::ExactArithmetic(format!(
            "length of ({}, {}) is not representable in this scalar model",
            v.x, v.y
        ))
    })
}

/// The three lattice generators g₁, g₂, g₃ (unit Euclidean length, pairwise
/// 120°, summing to zero).
pub fn generators<S: Scalar>() -> [Vector2<S>; 3] {
    let half = S::from_ratio(1, 2);
    let hs3 = S::sqrt3() * S::from_ratio(1, 2);
    [
        Vector2::new(S::one(), S::zero()),
        Vector2::new(-half.clone(), -hs3.clone()),
        Vector2::new(-half, hs3),
    ]
}

/// The six vertices of the hexagonal unit ball: ±g₁, ±g₂, ±g₃.
pub fn hexagon_vertices<S: Scalar>() -> [Vector2<S>; 6] {
    let [g1, g2, g3] = generators::<S>();
    let (n1, n2, n3) = (g1.neg(), g2.neg(), g3.neg());
    [g1, g2, g3, n1, n2, n3]
}

/// Norm with the regular hexagon (vertices ±gᵢ) as unit ball.
///
/// ‖v‖ = (2/√3) · max(|y|, |(√3x + y)/2|, |(√3x − y)/2|).
pub fn hex_norm<S: Scalar>(v: &Vector2<S>) -> S {
    let s3 = S::sqrt3();
    let half = S::from_ratio(1, 2);
    let t1 = v.y.clone().abs();
    let t2 = ((s3.clone() * v.x.clone() + v.y.clone()) * half.clone()).abs();
    let t3 = ((s3.clone() * v.x.clone() - v.y.clone()) * half).abs();
    let m = t1.max_val(t2).max_val(t3);
    // 2/√3 = (2/3)·√3
    m * s3 * S::from_ratio(2, 3)
}

/// Dual of [`hex_norm`]: support function of the hexagon,
/// max over the six vertices of ⟨v, w⟩.
pub fn hex_dual_norm<S: Scalar>(v: &Vector2<S>) -> S {
    let mut best: Option<S> = None;
    for w in hexagon_vertices::<S>() {
        let d = v.dot(&w);
        best = Some(match best {
            None => d,
            Some(b) => b.max_val(d),
        });
    }
    best.unwrap()
}

/// Rotation by `theta` radians (counterclockwise), floating point.
pub fn rotate(v: &Vector2<f64>, theta: f64) -> Vector2<f64> {
    Rotation::from_angle(theta).apply_vec(v)
}

/// Rotation stored as (cos, sin) so exact models can rotate without trig.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation<S> {
    pub cos: S,
    pub sin: S,
}

impl<S: Scalar> Rotation<S> {
    pub fn identity() -> Self {
        Rotation {
            cos: S::one(),
            sin: S::zero(),
        }
    }

    pub fn from_cos_sin(cos: S, sin: S) -> Self {
        Rotation { cos, sin }
    }

    pub fn inverse(&self) -> Self {
        Rotation {
            cos: self.cos.clone(),
            sin: -self.sin.clone(),
        }
    }

    pub fn apply_vec(&self, v: &Vector2<S>) -> Vector2<S> {
        Vector2 {
            x: self.cos.clone() * v.x.clone() - self.sin.clone() * v.y.clone(),
            y: self.sin.clone() * v.x.clone() + self.cos.clone() * v.y.clone(),
        }
    }

    pub fn apply_point(&self, p: &Point2<S>) -> Point2<S> {
        let v = self.apply_vec(&Vector2::new(p.x.clone(), p.y.clone()));
        Point2 { x: v.x, y: v.y }
    }

    pub fn angle(&self) -> f64 {
        self.sin.to_f64().atan2(self.cos.to_f64())
    }
}

impl Rotation<f64> {
    pub fn from_angle(theta: f64) -> Self {
        Rotation {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment<S> {
    pub a: Point2<S>,
    pub b: Point2<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn new(a: Point2<S>, b: Point2<S>) -> Self {
        Segment { a, b }
    }

    pub fn dir(&self) -> Vector2<S> {
        self.a.to(&self.b)
    }

    pub fn length(&self) -> Result<S> {
        vector_norm(&self.dir())
    }

    pub fn midpoint(&self) -> Point2<S> {
        self.a.midpoint(&self.b)
    }

    pub fn eval(&self, t: &S) -> Point2<S> {
        self.a.add(&self.dir().scale(t))
    }
}

/// Tolerances for one pipeline run. The exact model uses zeros: every
/// residual that is mathematically zero must come out exactly zero.
#[derive(Clone, Debug)]
pub struct ToleranceConfig<S> {
    pub eps_len: S,
    pub eps_angle: S,
    pub eps_field: S,
}

pub const DEFAULT_EPS_LEN: f64 = 1e-9;
pub const DEFAULT_EPS_ANGLE: f64 = 1e-9;
pub const DEFAULT_EPS_FIELD: f64 = 1e-12;

impl ToleranceConfig<f64> {
    pub fn float_default() -> Self {
        ToleranceConfig {
            eps_len: DEFAULT_EPS_LEN,
            eps_angle: DEFAULT_EPS_ANGLE,
            eps_field: DEFAULT_EPS_FIELD,
        }
    }

    pub fn float(eps_len: f64, eps_angle: f64, eps_field: f64) -> Result<Self> {
        if eps_len <= 0.0 || eps_angle <= 0.0 || eps_field <= 0.0 {
            return Err(CoreError::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        Ok(ToleranceConfig {
            eps_len,
            eps_angle,
            eps_field,
        })
    }
}

impl<S: Scalar> ToleranceConfig<S> {
    pub fn exact() -> Self {
        ToleranceConfig {
            eps_len: S::zero(),
            eps_angle: S::zero(),
            eps_field: S::zero(),
        }
    }

    /// Model-appropriate default: zeros for exact scalars, the documented
    /// float defaults otherwise.
    pub fn for_model() -> Self {
        if S::exact_model() {
            Self::exact()
        } else {
            ToleranceConfig {
                eps_len: S::from_ratio(1, 1_000_000_000),
                eps_angle: S::from_ratio(1, 1_000_000_000),
                eps_field: S::from_ratio(1, 1_000_000_000_000),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SegIntersection<S> {
    Empty,
    Point(Point2<S>),
    Overlap(Segment<S>),
}

/// Intersection of two segments with full classification (transverse point,
/// endpoint touch, collinear overlap). `eps_len` bounds the admitted
/// perpendicular slack; zero in the exact model.
pub fn segment_intersection<S: Scalar>(
    s1: &Segment<S>,
    s2: &Segment<S>,
    tol: &ToleranceConfig<S>,
) -> SegIntersection<S> {
    let r = s1.dir();
    let s = s2.dir();
    let qp = s1.a.to(&s2.a);
    let rxs = r.cross(&s);
    let eps = tol.eps_len.clone();
    // Parallelism gate: |r×s|² ≤ eps²·|r|²·|s|² (an angular criterion that
    // needs no square roots).
    let parallel = {
        let lhs = rxs.clone() * rxs.clone();
        let rhs = eps.clone() * eps.clone() * r.norm_sq() * s.norm_sq();
        lhs <= rhs
    };
    if parallel {
        let qpxr = qp.cross(&r);
        let collinear = {
            let lhs = qpxr.clone() * qpxr.clone();
            let rhs = eps.clone() * eps.clone() * r.norm_sq();
            lhs <= rhs
        };
        if !collinear {
            return SegIntersection::Empty;
        }
        let rr = r.norm_sq();
        if rr.is_zero() {
            return SegIntersection::Empty;
        }
        let t0 = qp.dot(&r) / rr.clone();
        let t1 = t0.clone() + s.dot(&r) / rr.clone();
        let (lo_raw, hi_raw) = if t0 <= t1 {
            (t0, t1)
        } else {
            (t1, t0)
        };
        let eps_t = if eps.is_zero() {
            S::zero()
        } else {
            eps / rr.sqrt().expect("float sqrt")
        };
        let lo = lo_raw.max_val(S::zero());
        let hi = hi_raw.min_val(S::one());
        if hi.clone() - lo.clone() > eps_t {
            SegIntersection::Overlap(Segment::new(s1.eval(&lo), s1.eval(&hi)))
        } else if hi.clone() - lo.clone() >= -eps_t {
            let mid = (lo + hi) * S::from_ratio(1, 2);
            SegIntersection::Point(s1.eval(&mid))
        } else {
            SegIntersection::Empty
        }
    } else {
        let t = qp.cross(&s) / rxs.clone();
        let u = qp.cross(&r) / rxs;
        let eps_t1 = param_eps(&eps, &r);
        let eps_t2 = param_eps(&eps, &s);
        let in1 = t >= -eps_t1.clone() && t <= S::one() + eps_t1;
        let in2 = u >= -eps_t2.clone() && u <= S::one() + eps_t2;
        if in1 && in2 {
            SegIntersection::Point(s1.eval(&t))
        } else {
            SegIntersection::Empty
        }
    }
}

fn param_eps<S: Scalar>(eps: &S, dir: &Vector2<S>) -> S {
    if eps.is_zero() {
        S::zero()
    } else {
        eps.clone() / dir.norm_sq().sqrt().expect("float sqrt")
    }
}

/// Intersection point of two infinite lines given by point + direction.
/// `None` when parallel (exactly, in the scalar model).
pub fn line_intersection<S: Scalar>(
    p1: &Point2<S>,
    d1: &Vector2<S>,
    p2: &Point2<S>,
    d2: &Vector2<S>,
) -> Option<Point2<S>> {
    let denom = d1.cross(d2);
    if denom.is_zero() {
        return None;
    }
    let t = p1.to(p2).cross(d2) / denom;
    Some(p1.add(&d1.scale(&t)))
}

/// Counterclockwise order on directions starting from the positive x-axis.
/// Exact in the exact model (quadrant + cross-product sign), and what the
/// planar subdivision uses to sort edges around a vertex.
pub fn ccw_angle_cmp<S: Scalar>(u: &Vector2<S>, v: &Vector2<S>) -> Ordering {
    fn half<S: Scalar>(w: &Vector2<S>) -> u8 {
        // 0: angle in [0, π), 1: angle in [π, 2π)
        if w.y.is_positive() || (w.y.is_zero() && w.x.is_positive()) {
            0
        } else {
            1
        }
    }
    let (hu, hv) = (half(u), half(v));
    if hu != hv {
        return hu.cmp(&hv);
    }
    let c = u.cross(v);
    if c.is_positive() {
        Ordering::Less
    } else if c.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Boundary,
    Outside,
}

fn on_segment<S: Scalar>(p: &Point2<S>, seg: (&Point2<S>, &Point2<S>), eps: &S) -> bool {
    let d = seg.0.to(seg.1);
    let v = seg.0.to(p);
    let cr = d.cross(&v);
    if cr.clone() * cr > eps.clone() * eps.clone() * d.norm_sq() {
        return false;
    }
    let t = v.dot(&d);
    let tt = d.norm_sq();
    t >= -(eps.clone() * eps.clone()) && t <= tt + eps.clone() * eps.clone()
}

/// Ray-cast point location in a single ring (no holes).
pub fn point_in_ring<S: Scalar>(p: &Point2<S>, ring: &[Point2<S>], eps: &S) -> PointLocation {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = &ring[i];
        let b = &ring[(i + 1) % n];
        if on_segment(p, (a, b), eps) {
            return PointLocation::Boundary;
        }
        // Upward-ray crossing with the half-open rule.
        let (ay, by) = (&a.y, &b.y);
        let cond = (*ay <= p.y && p.y < *by) || (*by <= p.y && p.y < *ay);
        if cond {
            // x-coordinate of the edge at height p.y
            let t = (p.y.clone() - a.y.clone()) / (b.y.clone() - a.y.clone());
            let x = a.x.clone() + t * (b.x.clone() - a.x.clone());
            if x > p.x {
                inside = !inside;
            }
        }
    }
    if inside {
        PointLocation::Inside
    } else {
        PointLocation::Outside
    }
}

/// Simple polygon with optional holes. Outer ring counterclockwise, holes
/// clockwise; rings are canonically rotated to start at their lexicographic
/// minimum so equal polygons serialize identically.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<S> {
    pub outer: Vec<Point2<S>>,
    pub holes: Vec<Vec<Point2<S>>>,
}

pub fn ring_area<S: Scalar>(ring: &[Point2<S>]) -> S {
    let mut acc = S::zero();
    let n = ring.len();
    for i in 0..n {
        let a = &ring[i];
        let b = &ring[(i + 1) % n];
        acc = acc + (a.x.clone() * b.y.clone() - b.x.clone() * a.y.clone());
    }
    acc * S::from_ratio(1, 2)
}

fn canonical_ring<S: Scalar>(mut ring: Vec<Point2<S>>) -> Vec<Point2<S>> {
    let mut min_i = 0;
    for i in 1..ring.len() {
        if ring[i].cmp_lex(&ring[min_i]) == Ordering::Less {
            min_i = i;
        }
    }
    ring.rotate_left(min_i);
    ring
}

impl<S: Scalar> Polygon<S> {
    /// Normalizes orientation (outer CCW, holes CW) and ring start points.
    pub fn new(outer: Vec<Point2<S>>, holes: Vec<Vec<Point2<S>>>) -> Result<Self> {
        if outer.len() < 3 {
            return Err(CoreError::InvalidGeometry(
                "polygon outer ring needs at least 3 vertices".into(),
            ));
        }
        let mut outer = outer;
        if ring_area(&outer).is_negative() {
            outer.reverse();
        }
        if ring_area(&outer).is_zero() {
            return Err(CoreError::InvalidGeometry(
                "polygon outer ring has zero area".into(),
            ));
        }
        let mut hs = Vec::new();
        for mut h in holes {
            if h.len() < 3 {
                return Err(CoreError::InvalidGeometry(
                    "polygon hole needs at least 3 vertices".into(),
                ));
            }
            if ring_area(&h).is_positive() {
                h.reverse();
            }
            hs.push(canonical_ring(h));
        }
        hs.sort_by(|a, b| a[0].cmp_lex(&b[0]));
        Ok(Polygon {
            outer: canonical_ring(outer),
            holes: hs,
        })
    }

    /// Net enclosed area (holes subtract).
    pub fn area(&self) -> S {
        let mut a = ring_area(&self.outer);
        for h in &self.holes {
            a = a + ring_area(h); // hole rings are clockwise: negative
        }
        a
    }

    pub fn locate(&self, p: &Point2<S>, eps: &S) -> PointLocation {
        match point_in_ring(p, &self.outer, eps) {
            PointLocation::Outside => PointLocation::Outside,
            PointLocation::Boundary => PointLocation::Boundary,
            PointLocation::Inside => {
                for h in &self.holes {
                    match point_in_ring(p, h, eps) {
                        PointLocation::Inside => return PointLocation::Outside,
                        PointLocation::Boundary => return PointLocation::Boundary,
                        PointLocation::Outside => {}
                    }
                }
                PointLocation::Inside
            }
        }
    }

    pub fn boundary_segments(&self) -> Vec<Segment<S>> {
        let mut out = Vec::new();
        let mut push_ring = |ring: &[Point2<S>]| {
            let n = ring.len();
            for i in 0..n {
                out.push(Segment::new(ring[i].clone(), ring[(i + 1) % n].clone()));
            }
        };
        push_ring(&self.outer);
        for h in &self.holes {
            push_ring(h);
        }
        out
    }

    /// A strictly interior point: midpoint of the longest outer edge, pushed
    /// inward half the distance to the first boundary re-crossing.
    pub fn interior_point(&self) -> Result<Point2<S>> {
        let n = self.outer.len();
        let mut best = 0usize;
        let mut best_len = S::zero();
        for i in 0..n {
            let l = self.outer[i].to(&self.outer[(i + 1) % n]).norm_sq();
            if l > best_len {
                best_len = l;
                best = i;
            }
        }
        let a = &self.outer[best];
        let b = &self.outer[(best + 1) % n];
        let m = a.midpoint(b);
        let inward = a.to(b).rot90(); // outer is CCW: interior on the left
        let mut t_min: Option<S> = None;
        for seg in self.boundary_segments() {
            // Skip the edge the midpoint sits on.
            if seg.a == *a && seg.b == *b {
                continue;
            }
            let d = seg.dir();
            let denom = inward.cross(&d);
            if denom.is_zero() {
                continue;
            }
            let t = m.to(&seg.a).cross(&d) / denom.clone();
            let u = m.to(&seg.a).cross(&inward) / denom;
            if t.is_positive() && !u.is_negative() && u <= S::one() {
                t_min = Some(match t_min {
                    None => t,
                    Some(cur) => cur.min_val(t),
                });
            }
        }
        let t = t_min.ok_or_else(|| {
            CoreError::InvalidGeometry("no inward crossing found for interior point".into())
        })?;
        Ok(m.add(&inward.scale(&(t * S::from_ratio(1, 2)))))
    }

    /// Pairwise edge check that the boundary is simple (edges meet only at
    /// shared ring vertices).
    pub fn validate_simple(&self, tol: &ToleranceConfig<S>) -> Result<()> {
        let segs = self.boundary_segments();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                match segment_intersection(&segs[i], &segs[j], tol) {
                    SegIntersection::Empty => {}
                    SegIntersection::Point(p) => {
                        let touches_end = |s: &Segment<S>| {
                            p.approx_eq(&s.a, &tol.eps_len) || p.approx_eq(&s.b, &tol.eps_len)
                        };
                        if !(touches_end(&segs[i]) && touches_end(&segs[j])) {
                            return Err(CoreError::InvalidGeometry(format!(
                                "polygon boundary self-intersects near ({}, {})",
                                p.x.to_f64(),
                                p.y.to_f64()
                            )));
                        }
                    }
                    SegIntersection::Overlap(_) => {
                        return Err(CoreError::InvalidGeometry(
                            "polygon boundary contains overlapping edges".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Portions of `seg` lying inside `poly` (or on its boundary when
/// `include_boundary` is set), as parameter subintervals merged into segments.
pub fn clip_segment_to_polygon<S: Scalar>(
    seg: &Segment<S>,
    poly: &Polygon<S>,
    tol: &ToleranceConfig<S>,
    include_boundary: bool,
) -> Vec<Segment<S>> {
    let mut params: Vec<S> = vec![S::zero(), S::one()];
    let dir = seg.dir();
    let dd = dir.norm_sq();
    if dd.is_zero() {
        return Vec::new();
    }
    for bseg in poly.boundary_segments() {
        match segment_intersection(seg, &bseg, tol) {
            SegIntersection::Empty => {}
            SegIntersection::Point(p) => {
                params.push(seg.a.to(&p).dot(&dir) / dd.clone());
            }
            SegIntersection::Overlap(o) => {
                params.push(seg.a.to(&o.a).dot(&dir) / dd.clone());
                params.push(seg.a.to(&o.b).dot(&dir) / dd.clone());
            }
        }
    }
    params.retain(|t| !t.is_negative() && *t <= S::one());
    params.sort_by(|a, b| a.cmp_total(b));
    params.dedup_by(|a, b| (a.clone() - b.clone()).abs() <= tol.eps_len);
    let mut kept: Vec<(S, S)> = Vec::new();
    for w in params.windows(2) {
        let (lo, hi) = (w[0].clone(), w[1].clone());
        if hi.clone() - lo.clone() <= tol.eps_len {
            continue;
        }
        let mid = seg.eval(&((lo.clone() + hi.clone()) * S::from_ratio(1, 2)));
        let loc = poly.locate(&mid, &tol.eps_len);
        let keep = matches!(loc, PointLocation::Inside)
            || (include_boundary && matches!(loc, PointLocation::Boundary));
        if keep {
            match kept.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => kept.push((lo, hi)),
            }
        }
    }
    kept.into_iter()
        .map(|(lo, hi)| Segment::new(seg.eval(&lo), seg.eval(&hi)))
        .collect()
}
