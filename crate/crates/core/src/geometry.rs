//! Exact plane geometry over the rationals.
//!
//! Everything here is exact: orientation tests, segment classification, and
//! the quadratic-in-time collinearity functions that arise when three points
//! move linearly. Roots of those quadratics live in a real quadratic field
//! `Q(sqrt(d))`, represented by [`QuadNum`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("segment has zero length")]
    ZeroLengthSegment,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("negative radicand in quadratic number")]
    NegativeRadicand,
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &BigRational) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rat(x), rat(y))
    }

    pub fn from_fracs(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(frac(xn, xd), frac(yn, yd))
    }

    pub fn norm_squared(&self) -> BigRational {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn lerp(&self, other: &Point, t: &BigRational) -> Point {
        Point::new(
            &self.x + (&other.x - &self.x) * t,
            &self.y + (&other.y - &self.y) * t,
        )
    }

    /// Rational point on the unit circle with stereographic parameter `t`,
    /// i.e. `((1 - t^2) / (1 + t^2), 2t / (1 + t^2))`.
    pub fn on_unit_circle(t: &BigRational) -> Point {
        let t2 = t * t;
        let den = BigRational::one() + &t2;
        Point::new((BigRational::one() - &t2) / &den, (t + t) / den)
    }

    /// Inverse of [`Point::on_unit_circle`]; `None` for `(-1, 0)`.
    pub fn circle_parameter(&self) -> Option<BigRational> {
        let den = BigRational::one() + &self.x;
        if den.is_zero() {
            None
        } else {
            Some(&self.y / den)
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn cross(ax: &BigRational, ay: &BigRational, bx: &BigRational, by: &BigRational) -> BigRational {
    ax * by - ay * bx
}

/// Twice the signed area of triangle `(p, q, r)`.
pub fn signed_area(p: &Point, q: &Point, r: &Point) -> BigRational {
    cross(
        &(&q.x - &p.x),
        &(&q.y - &p.y),
        &(&r.x - &p.x),
        &(&r.y - &p.y),
    )
}

/// Orientation of `(p, q, r)`: positive for a counterclockwise turn.
pub fn orient(p: &Point, q: &Point, r: &Point) -> Sign {
    Sign::of(&signed_area(p, q, r))
}

/// True when `r` lies on the closed segment `[p, q]`.
pub fn on_closed_segment(p: &Point, q: &Point, r: &Point) -> bool {
    if orient(p, q, r) != Sign::Zero {
        return false;
    }
    let d = dot(&r.sub(p), &q.sub(p));
    !d.is_negative() && d <= q.sub(p).norm_squared()
}

fn dot(a: &Point, b: &Point) -> BigRational {
    &a.x * &b.x + &a.y * &b.y
}

/// How two closed segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentRelation {
    Disjoint,
    /// Interiors cross at a single point, no endpoint involved.
    TransversalCross,
    /// The only common point is an endpoint of both segments.
    SharedEndpointOnly,
    /// Collinear overlap, or an endpoint of one lies in the interior of the other.
    Degenerate,
}

/// Classifies the closed segments `[p1, p2]` and `[q1, q2]`.
pub fn segment_relation(
    p1: &Point,
    p2: &Point,
    q1: &Point,
    q2: &Point,
) -> Result<SegmentRelation, GeometryError> {
    if p1 == p2 || q1 == q2 {
        return Err(GeometryError::ZeroLengthSegment);
    }
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);

    if o1 == Sign::Zero && o2 == Sign::Zero {
        return Ok(collinear_relation(p1, p2, q1, q2));
    }
    let straddles = |a: Sign, b: Sign| a.as_i8() * b.as_i8() <= 0;
    if !(straddles(o1, o2) && straddles(o3, o4)) {
        return Ok(SegmentRelation::Disjoint);
    }
    if [o1, o2, o3, o4].iter().all(|&s| s != Sign::Zero) {
        return Ok(SegmentRelation::TransversalCross);
    }
    // The lines are distinct, so the unique intersection point is an endpoint
    // of at least one segment.
    let shared = p1 == q1 || p1 == q2 || p2 == q1 || p2 == q2;
    Ok(if shared {
        SegmentRelation::SharedEndpointOnly
    } else {
        SegmentRelation::Degenerate
    })
}

fn collinear_relation(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> SegmentRelation {
    // Project onto the direction of p, parametrize p1 -> 0, p2 -> |p|^2.
    let dir = p2.sub(p1);
    let proj = |r: &Point| dot(&r.sub(p1), &dir);
    let (plo, phi) = (BigRational::zero(), dir.norm_squared());
    let (mut qlo, mut qhi) = (proj(q1), proj(q2));
    if qlo > qhi {
        std::mem::swap(&mut qlo, &mut qhi);
    }
    match (qhi.cmp(&plo), phi.cmp(&qlo)) {
        (Ordering::Less, _) | (_, Ordering::Less) => SegmentRelation::Disjoint,
        (Ordering::Equal, _) | (_, Ordering::Equal) => SegmentRelation::SharedEndpointOnly,
        _ => SegmentRelation::Degenerate,
    }
}

/// Element `a + b * sqrt(d)` of a real quadratic field.
///
/// Canonical form: `b == 0` whenever `d` is zero or a rational square, and then
/// `d` is stored as zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: BigRational,
    b: BigRational,
    d: BigRational,
}

impl QuadNum {
    pub fn new(a: BigRational, b: BigRational, d: BigRational) -> Result<Self, GeometryError> {
        if d.is_negative() {
            return Err(GeometryError::NegativeRadicand);
        }
        if b.is_zero() || d.is_zero() {
            return Ok(QuadNum::rational(a));
        }
        if let Some(root) = rational_sqrt(&d) {
            return Ok(QuadNum::rational(a + b * root));
        }
        Ok(QuadNum { a, b, d })
    }

    pub fn rational(a: BigRational) -> Self {
        QuadNum {
            a,
            b: BigRational::zero(),
            d: BigRational::zero(),
        }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn d(&self) -> &BigRational {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn sign(&self) -> Sign {
        let sa = Sign::of(&self.a);
        let sb = Sign::of(&self.b);
        if sb == Sign::Zero {
            return sa;
        }
        if sa == Sign::Zero || sa == sb {
            return sb;
        }
        // Opposite signs: compare a^2 with b^2 d.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Sign::Zero,
        }
    }

    fn field(&self, other: &QuadNum) -> BigRational {
        if self.is_rational() {
            other.d.clone()
        } else {
            debug_assert!(other.is_rational() || other.d == self.d);
            self.d.clone()
        }
    }

    pub fn add(&self, other: &QuadNum) -> QuadNum {
        let d = self.field(other);
        QuadNum::new(&self.a + &other.a, &self.b + &other.b, d).expect("radicand is nonnegative")
    }

    pub fn sub(&self, other: &QuadNum) -> QuadNum {
        let d = self.field(other);
        QuadNum::new(&self.a - &other.a, &self.b - &other.b, d).expect("radicand is nonnegative")
    }

    /// Product; both operands must lie in the same field `Q(sqrt(d))`.
    pub fn mul(&self, other: &QuadNum) -> QuadNum {
        let d = self.field(other);
        let a = &self.a * &other.a + &self.b * &other.b * &d;
        let b = &self.a * &other.b + &self.b * &other.a;
        QuadNum::new(a, b, d).expect("radicand is nonnegative")
    }

    pub fn add_rational(&self, r: &BigRational) -> QuadNum {
        QuadNum {
            a: &self.a + r,
            b: self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Approximate value, for display and test diagnostics only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact square root of a nonnegative rational, if it is a rational square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    let n = integer_sqrt(q.numer())?;
    let d = integer_sqrt(q.denom())?;
    Some(BigRational::new(n, d))
}

/// `c2 t^2 + c1 t + c0` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPoly {
    pub c2: BigRational,
    pub c1: BigRational,
    pub c0: BigRational,
}

impl QuadPoly {
    pub fn new(c2: BigRational, c1: BigRational, c0: BigRational) -> Self {
        QuadPoly { c2, c1, c0 }
    }

    pub fn is_zero(&self) -> bool {
        self.c2.is_zero() && self.c1.is_zero() && self.c0.is_zero()
    }

    /// Coefficients from the constant term upward.
    pub fn coeffs(&self) -> [BigRational; 3] {
        [self.c0.clone(), self.c1.clone(), self.c2.clone()]
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        (&self.c2 * t + &self.c1) * t + &self.c0
    }

    pub fn sign_at(&self, t0: &QuadNum) -> Sign {
        sign_at(&self.coeffs(), t0)
    }
}

/// Linear motion `start + t (end - start)` of a point, as `(offset, velocity)`.
fn motion(start: &Point, end: &Point) -> (Point, Point) {
    (start.clone(), end.sub(start))
}

fn rel_motion(p: &(Point, Point), base: &(Point, Point)) -> (Point, Point) {
    (p.0.sub(&base.0), p.1.sub(&base.1))
}

fn cross_poly(u: &(Point, Point), w: &(Point, Point)) -> QuadPoly {
    let c0 = cross(&u.0.x, &u.0.y, &w.0.x, &w.0.y);
    let c1 = cross(&u.0.x, &u.0.y, &w.1.x, &w.1.y) + cross(&u.1.x, &u.1.y, &w.0.x, &w.0.y);
    let c2 = cross(&u.1.x, &u.1.y, &w.1.x, &w.1.y);
    QuadPoly::new(c2, c1, c0)
}

fn dot_poly(u: &(Point, Point), w: &(Point, Point)) -> QuadPoly {
    let c0 = dot(&u.0, &w.0);
    let c1 = dot(&u.0, &w.1) + dot(&u.1, &w.0);
    let c2 = dot(&u.1, &w.1);
    QuadPoly::new(c2, c1, c0)
}

/// Signed area of `(v(t), a(t), b(t))` when each point moves linearly from
/// its start to its end position as `t` runs over `[0, 1]`.
pub fn motion_collinearity_poly(
    v_start: &Point,
    v_end: &Point,
    a_start: &Point,
    a_end: &Point,
    b_start: &Point,
    b_end: &Point,
) -> QuadPoly {
    let v = motion(v_start, v_end);
    let a = rel_motion(&motion(a_start, a_end), &v);
    let b = rel_motion(&motion(b_start, b_end), &v);
    cross_poly(&a, &b)
}

/// `(v(t) - a(t)) . (b(t) - a(t))` under the same linear motion; positive
/// exactly when `v` projects beyond `a` toward `b`.
pub fn motion_projection_poly(
    v_start: &Point,
    v_end: &Point,
    a_start: &Point,
    a_end: &Point,
    b_start: &Point,
    b_end: &Point,
) -> QuadPoly {
    let a = motion(a_start, a_end);
    let va = rel_motion(&motion(v_start, v_end), &a);
    let ba = rel_motion(&motion(b_start, b_end), &a);
    dot_poly(&va, &ba)
}

/// A root of a quadratic with its multiplicity (1 or 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub value: QuadNum,
    pub multiplicity: u8,
}

fn in_open_unit_interval(r: &QuadNum) -> bool {
    r.sign() == Sign::Positive
        && QuadNum::rational(BigRational::one()).sub(r).sign() == Sign::Positive
}

/// Exact roots of `p` in the open interval `(0, 1)`, in increasing order.
pub fn roots_in_open_unit_interval(p: &QuadPoly) -> Result<Vec<Root>, GeometryError> {
    if p.is_zero() {
        return Err(GeometryError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    if p.c2.is_zero() {
        if !p.c1.is_zero() {
            roots.push(Root {
                value: QuadNum::rational(-&p.c0 / &p.c1),
                multiplicity: 1,
            });
        }
    } else {
        let disc = &p.c1 * &p.c1 - rat(4) * &p.c2 * &p.c0;
        let two_a = &p.c2 + &p.c2;
        let centre = -&p.c1 / &two_a;
        match Sign::of(&disc) {
            Sign::Negative => {}
            Sign::Zero => roots.push(Root {
                value: QuadNum::rational(centre),
                multiplicity: 2,
            }),
            Sign::Positive => {
                let half_width = BigRational::one() / two_a.abs();
                for b in [-half_width.clone(), half_width] {
                    let value = QuadNum::new(centre.clone(), b, disc.clone())?;
                    roots.push(Root {
                        value,
                        multiplicity: 1,
                    });
                }
            }
        }
    }
    roots.retain(|r| in_open_unit_interval(&r.value));
    Ok(roots)
}

/// Sign of the polynomial with coefficients `coeffs` (constant term first)
/// at `t0`, computed exactly in `Q(sqrt(d))`.
pub fn sign_at(coeffs: &[BigRational], t0: &QuadNum) -> Sign {
    let mut acc = QuadNum::rational(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(t0).add_rational(c);
    }
    acc.sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)), Sign::Positive);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)), Sign::Zero);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)), Sign::Negative);
    }

    #[test]
    fn segment_relation_examples() {
        let r = |a, b, c, d| segment_relation(&a, &b, &c, &d).unwrap();
        assert_eq!(
            r(p(0, 0), p(1, 1), p(0, 1), p(1, 0)),
            SegmentRelation::TransversalCross
        );
        assert_eq!(
            r(p(0, 0), p(1, 0), p(2, 0), p(3, 0)),
            SegmentRelation::Disjoint
        );
        assert_eq!(
            r(p(0, 0), p(2, 0), p(1, 0), p(1, 1)),
            SegmentRelation::Degenerate
        );
        assert_eq!(
            r(p(0, 0), p(2, 0), p(2, 0), p(3, 5)),
            SegmentRelation::SharedEndpointOnly
        );
        assert_eq!(
            r(p(0, 0), p(2, 0), p(2, 0), p(3, 0)),
            SegmentRelation::SharedEndpointOnly
        );
        assert_eq!(
            r(p(0, 0), p(2, 0), p(1, 0), p(3, 0)),
            SegmentRelation::Degenerate
        );
        assert_eq!(
            r(p(0, 0), p(2, 0), p(3, 1), p(3, -1)),
            SegmentRelation::Disjoint
        );
        assert_eq!(
            segment_relation(&p(0, 0), &p(0, 0), &p(1, 0), &p(1, 1)),
            Err(GeometryError::ZeroLengthSegment)
        );
    }

    #[test]
    fn collinearity_poly_examples() {
        // Static, non-collinear: constant nonzero.
        let f =
            motion_collinearity_poly(&p(0, 1), &p(0, 1), &p(-1, 0), &p(-1, 0), &p(1, 0), &p(1, 0));
        assert!(f.c2.is_zero() && f.c1.is_zero() && !f.c0.is_zero());

        // v sweeps vertically through a static horizontal edge at t = 1/2.
        let f = motion_collinearity_poly(
            &p(0, -1),
            &p(0, 1),
            &p(-1, 0),
            &p(-1, 0),
            &p(1, 0),
            &p(1, 0),
        );
        let roots = roots_in_open_unit_interval(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].value, QuadNum::rational(frac(1, 2)));
        assert_eq!(roots[0].multiplicity, 1);

        // v static on the line of a static edge.
        let f =
            motion_collinearity_poly(&p(3, 0), &p(3, 0), &p(-1, 0), &p(-1, 0), &p(1, 0), &p(1, 0));
        assert!(f.is_zero());
    }

    #[test]
    fn roots_examples() {
        let f = QuadPoly::new(rat(1), rat(-1), frac(3, 16));
        let roots = roots_in_open_unit_interval(&f).unwrap();
        let vals: Vec<_> = roots.iter().map(|r| r.value.clone()).collect();
        assert_eq!(
            vals,
            vec![QuadNum::rational(frac(1, 4)), QuadNum::rational(frac(3, 4))]
        );

        let f = QuadPoly::new(rat(1), rat(0), rat(1));
        assert!(roots_in_open_unit_interval(&f).unwrap().is_empty());

        // (t - 1/2)^2
        let f = QuadPoly::new(rat(1), rat(-1), frac(1, 4));
        let roots = roots_in_open_unit_interval(&f).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert_eq!(roots[0].value, QuadNum::rational(frac(1, 2)));

        assert_eq!(
            roots_in_open_unit_interval(&QuadPoly::new(rat(0), rat(0), rat(0))),
            Err(GeometryError::ZeroPolynomial)
        );
    }

    #[test]
    fn irrational_roots_are_ordered() {
        // 2t^2 - 2t + 1/4 has roots (2 -+ sqrt 2) / 4.
        let f = QuadPoly::new(rat(2), rat(-2), frac(1, 4));
        let roots = roots_in_open_unit_interval(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].value.to_f64() < roots[1].value.to_f64());
        for r in &roots {
            assert!(!r.value.is_rational());
            assert_eq!(f.sign_at(&r.value), Sign::Zero);
        }
    }

    #[test]
    fn sign_at_examples() {
        let half = QuadNum::rational(frac(1, 2));
        assert_eq!(sign_at(&[rat(0), rat(1)], &half), Sign::Positive);

        let sqrt2 = QuadNum::new(rat(0), rat(1), rat(2)).unwrap();
        assert_eq!(sign_at(&[rat(-2), rat(0), rat(1)], &sqrt2), Sign::Zero);

        // 2t - 1 at (1 + sqrt 2) / 4 equals (sqrt 2 - 1) / 2.
        let t0 = QuadNum::new(frac(1, 4), frac(1, 4), rat(2)).unwrap();
        assert_eq!(sign_at(&[rat(-1), rat(2)], &t0), Sign::Positive);
    }

    #[test]
    fn quadnum_canonical_form() {
        let q = QuadNum::new(rat(1), rat(3), frac(4, 9)).unwrap();
        assert!(q.is_rational());
        assert_eq!(q.a(), &rat(3));
        let q = QuadNum::new(rat(1), rat(0), rat(7)).unwrap();
        assert_eq!(q.d(), &rat(0));
        assert_eq!(
            QuadNum::new(rat(0), rat(1), rat(-1)),
            Err(GeometryError::NegativeRadicand)
        );
    }

    #[test]
    fn circle_parameter_round_trip() {
        for t in [frac(0, 1), frac(1, 2), frac(-7, 3), frac(5, 1)] {
            let pt = Point::on_unit_circle(&t);
            assert_eq!(pt.norm_squared(), rat(1));
            assert_eq!(pt.circle_parameter(), Some(t));
        }
        assert_eq!(p(-1, 0).circle_parameter(), None);
    }
}
