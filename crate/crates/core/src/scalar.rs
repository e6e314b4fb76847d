//! Scalar abstraction shared by the floating-point and exact pipelines.
//!
//! All geometry is generic over [`Scalar`]. Two models are provided:
//! `f64`, and [`Q3`] — the field ℚ(√3) with elements stored as `a + b·√3`
//! for rationals `a`, `b`. Everything the certification pipelines need
//! (line intersections, hexagonal norms, miter offsets, the field table)
//! stays inside ℚ(√3) for lattice-aligned networks, so residuals that are
//! mathematically zero come out exactly zero in that model.
//!
//! Square roots are partial in ℚ(√3): `sqrt` returns `None` when the value
//! has no representation `(u + v√3)²`. Lattice-aligned segment lengths are
//! always representable (the length of `t·gᵢ` is `|t|`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// The constant √3 in this model.
    fn sqrt3() -> Self;
    fn abs(&self) -> Self;
    /// Exact square root where representable; `f64` always succeeds on
    /// non-negative inputs.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Total order used for canonical sorting (ties must be impossible for
    /// distinct values; `f64` uses `total_cmp`).
    fn cmp_total(&self, other: &Self) -> Ordering;
    /// True when arithmetic is exact and tolerances should be zero.
    fn exact_model() -> bool;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
    fn min_val(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
    fn max_val(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn sqrt3() -> Self {
        3f64.sqrt()
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn exact_model() -> bool {
        false
    }
}

/// Element of ℚ(√3): `a + b·√3` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq)]
pub struct Q3 {
    a: BigRational,
    b: BigRational,
}

impl Q3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Q3 { a, b }
    }

    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        Q3 {
            a: BigRational::new(BigInt::from(a_num), BigInt::from(a_den)),
            b: BigRational::new(BigInt::from(b_num), BigInt::from(b_den)),
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt3_part(&self) -> &BigRational {
        &self.b
    }

    /// Sign of `a + b√3`, exact. `a² = 3b²` has no non-trivial rational
    /// solutions, so mixed-sign cases are settled by comparing `a²` with `3b²`.
    pub fn signum(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (0, 0) => 0,
            (s, 0) => s,
            (0, s) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            _ => {
                let a2 = &self.a * &self.a;
                let b2_3 = &self.b * &self.b * BigRational::from_integer(BigInt::from(3));
                match a2.cmp(&b2_3) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => unreachable!("a² = 3b² only at zero"),
                }
            }
        }
    }
}

fn rational_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

impl fmt::Debug for Q3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q3({} + {}·√3)", self.a, self.b)
    }
}

impl fmt::Display for Q3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}√3", self.a, self.b)
        }
    }
}

impl PartialOrd for Q3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q3 {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.clone() - other.clone();
        match d.signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl Add for Q3 {
    type Output = Q3;
    fn add(self, rhs: Q3) -> Q3 {
        Q3 {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Sub for Q3 {
    type Output = Q3;
    fn sub(self, rhs: Q3) -> Q3 {
        Q3 {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl Mul for Q3 {
    type Output = Q3;
    fn mul(self, rhs: Q3) -> Q3 {
        // (a₁ + b₁√3)(a₂ + b₂√3) = a₁a₂ + 3b₁b₂ + (a₁b₂ + a₂b₁)√3
        let three = BigRational::from_integer(BigInt::from(3));
        Q3 {
            a: &self.a * &rhs.a + three * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for Q3 {
    type Output = Q3;
    fn div(self, rhs: Q3) -> Q3 {
        // Multiply by the conjugate: 1/(a + b√3) = (a − b√3)/(a² − 3b²).
        let three = BigRational::from_integer(BigInt::from(3));
        let denom = &rhs.a * &rhs.a - &three * &rhs.b * &rhs.b;
        assert!(!denom.is_zero(), "division by zero in Q3");
        let conj = Q3 {
            a: rhs.a.clone(),
            b: -rhs.b.clone(),
        };
        let num = self * conj;
        Q3 {
            a: num.a / &denom,
            b: num.b / &denom,
        }
    }
}

impl Neg for Q3 {
    type Output = Q3;
    fn neg(self) -> Q3 {
        Q3 {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Scalar for Q3 {
    fn zero() -> Self {
        Q3 {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }
    fn one() -> Self {
        Q3 {
            a: BigRational::from_integer(BigInt::from(1)),
            b: BigRational::zero(),
        }
    }
    fn from_int(n: i64) -> Self {
        Q3 {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
        }
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Q3 {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
        }
    }
    fn sqrt3() -> Self {
        Q3 {
            a: BigRational::zero(),
            b: BigRational::from_integer(BigInt::from(1)),
        }
    }
    fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn sqrt(&self) -> Option<Self> {
        match self.signum() {
            -1 => None,
            0 => Some(Q3::zero()),
            _ => {
                if self.b.is_zero() {
                    // √a ∈ ℚ(√3) exactly when a = r² (root r) or a = 3r²
                    // (root r√3).
                    if let Some(r) = rational_sqrt(&self.a) {
                        return Some(Q3 {
                            a: r,
                            b: BigRational::zero(),
                        });
                    }
                    let third = &self.a / BigRational::from_integer(BigInt::from(3));
                    return rational_sqrt(&third).map(|r| Q3 {
                        a: BigRational::zero(),
                        b: r,
                    });
                }
                if self.a.is_zero() {
                    // b√3 is a square in ℚ(√3) only when b = 0.
                    return None;
                }
                // (u + v√3)² = u² + 3v² + 2uv√3 ⇒ u² + 3v² = a, 2uv = b.
                // Eliminating v: u² = (a ± √(a² − 3b²)) / 2.
                let three = BigRational::from_integer(BigInt::from(3));
                let two = BigRational::from_integer(BigInt::from(2));
                let disc = &self.a * &self.a - &three * &self.b * &self.b;
                let s = rational_sqrt(&disc)?;
                for u2 in [(&self.a + &s) / &two, (&self.a - &s) / &two] {
                    if u2.is_negative() {
                        continue;
                    }
                    if let Some(u) = rational_sqrt(&u2) {
                        if u.is_zero() {
                            continue;
                        }
                        let v = &self.b / (&two * &u);
                        let cand = Q3 { a: u, b: v };
                        let cand = if cand.signum() < 0 { -cand } else { cand };
                        if cand.clone() * cand.clone() == *self {
                            return Some(cand);
                        }
                    }
                }
                None
            }
        }
    }

    fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().expect("rational out of f64 range");
        let b = self.b.to_f64().expect("rational out of f64 range");
        a + b * 3f64.sqrt()
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn exact_model() -> bool {
        true
    }
}

/// Best rational approximation of `x` with denominator ≤ `max_den`
/// (continued-fraction convergents, clamped).
fn best_rational(x: f64, max_den: i64) -> (i64, i64) {
    let mut p0: i64 = 1;
    let mut q0: i64 = 0;
    let mut p1: i64 = x.floor() as i64;
    let mut q1: i64 = 1;
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor() as i64;
        frac = inv - inv.floor();
        let p2 = match a.checked_mul(p1).and_then(|v| v.checked_add(p0)) {
            Some(v) => v,
            None => break,
        };
        let q2 = match a.checked_mul(q1).and_then(|v| v.checked_add(q0)) {
            Some(v) => v,
            None => break,
        };
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    (p1, q1)
}

/// Snap a float to ℚ(√3), written as a + b√3 with both denominators ≤ 24.
///
/// Two constraints make the answer unambiguous at tolerance 1e-9: the
/// denominator cap keeps distinct candidates separated by ≫ 2·tol (badly
/// approximable √3 bounds the combined-lattice gap well above 1e-7), and a
/// no-cancellation bound |b| ≤ |x|/√3 + 2 excludes representations where a
/// huge rational part cancels a huge multiple of √3 — coordinates produced
/// by rotating and scaling lattice networks never look like that. The scan
/// collects every candidate and refuses ambiguous inputs outright.
pub fn snap_to_q3(x: f64) -> Option<Q3> {
    const MAX_DEN: i64 = 24;
    const TOL: f64 = 1e-9;
    let sqrt3 = 3f64.sqrt();
    let mut found: Option<Q3> = None;
    let mut push = |cand: Q3| -> bool {
        match &found {
            None => {
                found = Some(cand);
                true
            }
            Some(prev) => *prev == cand, // same value rediscovered is fine
        }
    };
    let (p, q) = best_rational(x, MAX_DEN);
    if (x - p as f64 / q as f64).abs() <= TOL {
        push(Q3::from_parts(p, q, 0, 1));
    }
    let b_cap = x.abs() / sqrt3 + 2.0;
    for qb in 1..=MAX_DEN {
        let pb_cap = (b_cap * qb as f64).ceil() as i64;
        for pb_abs in 1..=pb_cap {
            for pb in [pb_abs, -pb_abs] {
                let b = pb as f64 / qb as f64;
                let rest = x - b * sqrt3;
                let (pa, qa) = best_rational(rest, MAX_DEN);
                if (rest - pa as f64 / qa as f64).abs() <= TOL {
                    if !push(Q3::from_parts(pa, qa, pb, qb)) {
                        return None; // ambiguous
                    }
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q3_field_ops() {
        let x = Q3::from_parts(1, 2, -3, 4); // 1/2 − (3/4)√3
        let y = Q3::from_parts(2, 1, 1, 8);
        let prod = x.clone() * y.clone();
        let back = prod / y;
        assert_eq!(back, x);
    }

    #[test]
    fn q3_signum_mixed() {
        // 7/4 − √3 > 0 (1.75 > 1.732…)
        assert_eq!(Q3::from_parts(7, 4, -1, 1).signum(), 1);
        // 12/7 − √3 < 0 (1.714… < 1.732…)
        assert_eq!(Q3::from_parts(12, 7, -1, 1).signum(), -1);
        assert_eq!(Q3::zero().signum(), 0);
    }

    #[test]
    fn q3_sqrt_representable() {
        // (1/2 + (1/3)√3)² = 1/4 + 1/3 + (1/3)√3 = 7/12 + (1/3)√3
        let r = Q3::from_parts(1, 2, 1, 3);
        let sq = r.clone() * r.clone();
        assert_eq!(sq.sqrt().unwrap(), r);
        // 2 + √3 = (1/2)(√3 + 1)² … √(2+√3) = (√6+√2)/2 ∉ ℚ(√3)
        assert!(Q3::from_parts(2, 1, 1, 1).sqrt().is_none());
        assert_eq!(Q3::from_int(4).sqrt().unwrap(), Q3::from_int(2));
        assert!(Q3::from_int(-1).sqrt().is_none());
        // Rational inputs of the form 3r² have root r√3.
        assert_eq!(Q3::from_int(3).sqrt().unwrap(), Q3::sqrt3());
        assert_eq!(
            Q3::from_parts(243, 1600, 0, 1).sqrt().unwrap(),
            Q3::from_parts(0, 1, 9, 40)
        );
        assert!(Q3::from_parts(5, 1, 0, 1).sqrt().is_none());
        // √(0 + b√3) never lands in ℚ(√3) for b ≠ 0.
        assert!(Q3::sqrt3().sqrt().is_none());
    }

    #[test]
    fn snap_recovers_lattice_values() {
        let cases = [
            Q3::from_parts(1, 2, 0, 1),
            Q3::from_parts(0, 1, 1, 2),
            Q3::from_parts(-3, 1, 9, 16),
            Q3::from_parts(7, 3, -5, 6),
        ];
        for c in cases {
            let snapped = snap_to_q3(c.to_f64()).expect("snap failed");
            assert_eq!(snapped, c);
        }
        assert!(snap_to_q3(0.123456789123).is_none());
        assert!(snap_to_q3(std::f64::consts::PI).is_none());
    }
}
