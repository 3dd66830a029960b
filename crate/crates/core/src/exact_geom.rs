//! Exact rational arithmetic and the two predicates the rest of the crate
//! is built on: orientation and closed-segment intersection.
//!
//! Nothing in here touches floating point. Every result is a pure function
//! of its inputs and identical across runs and platforms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Builds the rational `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("segments overlap along a sub-segment of positive length")]
    Overlap,
    #[error("degenerate segment: both endpoints are {0}")]
    ZeroLength(Point),
    #[error("malformed rational {text:?}: {reason}")]
    BadRational { text: String, reason: &'static str },
}

/// Parses the text form `p/q` or `p` into a normalized rational.
pub fn parse_rational(text: &str) -> Result<Rational, GeomError> {
    let bad = |reason| GeomError::BadRational {
        text: text.to_string(),
        reason,
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| bad("numerator is not an integer"))?;
    let den = BigInt::from_str(den.trim()).map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Writes `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion for reporting only.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Integer-coordinate shorthand.
    pub fn int(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn sub(&self, other: &Point) -> Dir {
        Dir {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

/// A free vector, used for directions of arcs leaving a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dir {
    pub x: Rational,
    pub y: Rational,
}

impl Dir {
    pub fn cross(&self, other: &Dir) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &Dir) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn neg(&self) -> Dir {
        Dir {
            x: -&self.x,
            y: -&self.y,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Sign of [`Dir::cross`] without building the product when the
    /// components are small.
    pub fn cross_sign(&self, other: &Dir) -> i8 {
        product_sign(&self.x, &other.y, &self.y, &other.x, false).unwrap_or_else(|| signum(&self.cross(other)))
    }

    /// Sign of [`Dir::dot`].
    pub fn dot_sign(&self, other: &Dir) -> i8 {
        product_sign(&self.x, &other.x, &self.y, &other.y, true).unwrap_or_else(|| signum(&self.dot(other)))
    }

    /// Same ray: parallel and pointing the same way.
    pub fn same_ray(&self, other: &Dir) -> bool {
        self.cross_sign(other) == 0 && self.dot_sign(other) > 0
    }

    fn half(&self, base: &Dir) -> u8 {
        let c = base.cross_sign(self);
        if c > 0 || (c == 0 && base.dot_sign(self) > 0) {
            0
        } else {
            1
        }
    }

    /// Compares the counterclockwise angles, measured from `base`, of `self`
    /// and `other`. Both angles live in `[0, 2*pi)`.
    pub fn ccw_cmp(&self, other: &Dir, base: &Dir) -> std::cmp::Ordering {
        let (h1, h2) = (self.half(base), other.half(base));
        if h1 != h2 {
            return h1.cmp(&h2);
        }
        match self.cross_sign(other) {
            1 => std::cmp::Ordering::Less,
            -1 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub p: Point,
    pub q: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Result<Self, GeomError> {
        if p == q {
            return Err(GeomError::ZeroLength(p));
        }
        Ok(Segment { p, q })
    }

    /// True when `r` lies on the closed segment.
    pub fn contains(&self, r: &Point) -> bool {
        orient(&self.p, &self.q, r) == 0 && in_box(&self.p, &self.q, r)
    }
}

/// Sign of a rational as `-1`, `0` or `+1`.
pub fn signum(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of the cross product `(q - p) x (r - p)`: `+1` for a left turn,
/// `-1` for a right turn, `0` when collinear.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i8 {
    if let Some(s) = orient_small(p, q, r) {
        return s;
    }
    let lhs = (&q.x - &p.x) * (&r.y - &p.y);
    let rhs = (&q.y - &p.y) * (&r.x - &p.x);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

/// Numerator and denominator of `v`, when both are below `2^bits`.
fn small_in(v: &Rational, bits: u32) -> Option<(i128, i128)> {
    use num_traits::ToPrimitive;
    let lim = 1i64 << bits;
    let n = v.numer().to_i64().filter(|n| n.abs() < lim)?;
    let d = v.denom().to_i64().filter(|&d| d < lim)?;
    Some((n as i128, d as i128))
}

fn small(v: &Rational) -> Option<(i128, i128)> {
    small_in(v, 15)
}

/// Sign of `a*b + c*d` (when `plus`) or `a*b - c*d`, for 31-bit parts.
fn product_sign(a: &Rational, b: &Rational, c: &Rational, d: &Rational, plus: bool) -> Option<i8> {
    let ((an, ad), (bn, bd)) = (small_in(a, 31)?, small_in(b, 31)?);
    let ((cn, cd), (dn, dd)) = (small_in(c, 31)?, small_in(d, 31)?);
    // Scale both terms by the positive denominator product; each side
    // stays below 2^124.
    let lhs = (an * bn) * (cd * dd);
    let rhs = (cn * dn) * (ad * bd);
    let v = if plus { lhs.checked_add(rhs)? } else { lhs.checked_sub(rhs)? };
    Some(v.signum() as i8)
}

/// [`orient`] in machine integers. Differences of small fractions have
/// 31-bit parts, products 62-bit parts, and the final cross-multiplied
/// comparison stays inside `i128`.
fn orient_small(p: &Point, q: &Point, r: &Point) -> Option<i8> {
    let diff = |a: &Rational, b: &Rational| -> Option<(i128, i128)> {
        let ((an, ad), (bn, bd)) = (small(a)?, small(b)?);
        Some((an * bd - bn * ad, ad * bd))
    };
    let (ax, axd) = diff(&q.x, &p.x)?;
    let (by, byd) = diff(&r.y, &p.y)?;
    let (ay, ayd) = diff(&q.y, &p.y)?;
    let (bx, bxd) = diff(&r.x, &p.x)?;
    // Denominators are positive, so the comparison keeps its direction.
    let lhs = (ax * by) * (ayd * bxd);
    let rhs = (ay * bx) * (axd * byd);
    Some(match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    })
}

pub(crate) fn in_box(a: &Point, b: &Point, r: &Point) -> bool {
    let (xl, xh) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (yl, yh) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    xl <= &r.x && &r.x <= xh && yl <= &r.y && &r.y <= yh
}

/// Intersection of two closed segments.
///
/// Returns the unique common point, `None` when the segments are disjoint,
/// and [`GeomError::Overlap`] when they share a piece of positive length.
pub fn segment_intersect(s1: &Segment, s2: &Segment) -> Result<Option<Point>, GeomError> {
    intersect_closed(&s1.p, &s1.q, &s2.p, &s2.q)
}

/// [`segment_intersect`] on borrowed endpoints, for callers that walk chains
/// without materializing segments.
pub fn intersect_closed(
    p1: &Point,
    q1: &Point,
    p2: &Point,
    q2: &Point,
) -> Result<Option<Point>, GeomError> {
    let d1 = orient(p1, q1, p2);
    let d2 = orient(p1, q1, q2);
    let d3 = orient(p2, q2, p1);
    let d4 = orient(p2, q2, q1);

    if d1 == 0 && d2 == 0 {
        return collinear_meet(p1, q1, p2, q2);
    }
    if d1 * d2 > 0 || d3 * d4 > 0 {
        return Ok(None);
    }
    // Endpoint hits are resolved without division.
    if d1 == 0 {
        return Ok(Some(p2.clone()));
    }
    if d2 == 0 {
        return Ok(Some(q2.clone()));
    }
    if d3 == 0 {
        return Ok(Some(p1.clone()));
    }
    if d4 == 0 {
        return Ok(Some(q1.clone()));
    }
    let r = q1.sub(p1);
    let s = q2.sub(p2);
    let t = p2.sub(p1).cross(&s) / r.cross(&s);
    Ok(Some(Point::new(&p1.x + &t * &r.x, &p1.y + &t * &r.y)))
}

fn collinear_meet(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> Result<Option<Point>, GeomError> {
    // Project on one axis; the segments are on one line.
    let key = |p: &Point| {
        if p1.x != q1.x {
            p.x.clone()
        } else {
            p.y.clone()
        }
    };
    let (a0, a1) = ordered(key(p1), key(q1));
    let (b0, b1) = ordered(key(p2), key(q2));
    let lo = if a0 > b0 { a0 } else { b0 };
    let hi = if a1 < b1 { a1 } else { b1 };
    if lo > hi {
        Ok(None)
    } else if lo < hi {
        Err(GeomError::Overlap)
    } else {
        let hit = [p1, q1]
            .into_iter()
            .find(|p| key(p) == lo)
            .expect("touching collinear segments share an endpoint");
        Ok(Some(hit.clone()))
    }
}

fn ordered(a: Rational, b: Rational) -> (Rational, Rational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(Point::int(a.0, a.1), Point::int(b.0, b.1)).unwrap()
    }

    fn slow_orient(p: &Point, q: &Point, r: &Point) -> i8 {
        signum(&((&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)))
    }

    #[test]
    fn machine_paths_match_big_arithmetic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut pick = |big: bool| {
            let m: i64 = if big { 1 << 40 } else { 1 << 14 };
            let v = rng.random_range(-m..m);
            let d = rng.random_range(1..if big { 1 << 20 } else { 40 });
            rat(v, d)
        };
        for round in 0..4000 {
            let big = round % 4 == 0;
            let pts: Vec<Point> = (0..3).map(|_| Point::new(pick(big), pick(big))).collect();
            assert_eq!(orient(&pts[0], &pts[1], &pts[2]), slow_orient(&pts[0], &pts[1], &pts[2]));
            let (a, b) = (pts[1].sub(&pts[0]), pts[2].sub(&pts[0]));
            assert_eq!(a.cross_sign(&b), signum(&a.cross(&b)));
            assert_eq!(a.dot_sign(&b), signum(&a.dot(&b)));
            // Collinear triples exercise the zero branch.
            let c = Point::new(&pts[0].x + (&pts[1].x - &pts[0].x) * rat(3, 7), &pts[0].y + (&pts[1].y - &pts[0].y) * rat(3, 7));
            assert_eq!(orient(&pts[0], &pts[1], &c), 0);
        }
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(&Point::int(0, 0), &Point::int(1, 0), &Point::int(0, 1)), 1);
        assert_eq!(orient(&Point::int(0, 0), &Point::int(1, 1), &Point::int(2, 2)), 0);
        assert_eq!(orient(&Point::int(0, 0), &Point::int(0, 1), &Point::int(1, 0)), -1);
    }

    #[test]
    fn intersect_examples() {
        let x = segment_intersect(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))).unwrap();
        assert_eq!(x, Some(Point::int(1, 1)));
        let none = segment_intersect(&seg((0, 0), (1, 0)), &seg((0, 1), (1, 1))).unwrap();
        assert_eq!(none, None);
        let err = segment_intersect(&seg((0, 0), (2, 0)), &seg((1, 0), (3, 0)));
        assert_eq!(err, Err(GeomError::Overlap));
    }

    #[test]
    fn collinear_touch_at_endpoint() {
        let hit = segment_intersect(&seg((0, 0), (1, 1)), &seg((1, 1), (3, 3))).unwrap();
        assert_eq!(hit, Some(Point::int(1, 1)));
        let vertical = segment_intersect(&seg((0, 0), (0, 1)), &seg((0, 2), (0, 1))).unwrap();
        assert_eq!(vertical, Some(Point::int(0, 1)));
    }

    #[test]
    fn non_integer_crossing() {
        let p = segment_intersect(&seg((0, 0), (3, 1)), &seg((0, 1), (1, 0)))
            .unwrap()
            .unwrap();
        assert_eq!(p, Point::new(rat(3, 4), rat(1, 4)));
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(0)), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        // Canonical zero and sign on the numerator.
        let z = parse_rational("0/-5").unwrap();
        assert_eq!(z.denom(), &BigInt::from(1));
        assert!(parse_rational("3/-6").unwrap().denom().is_positive());
    }

    #[test]
    fn ccw_order_around_origin() {
        let base = Dir { x: int(1), y: int(0) };
        let up = Dir { x: int(0), y: int(1) };
        let left = Dir { x: int(-1), y: int(0) };
        let down = Dir { x: int(0), y: int(-1) };
        assert_eq!(up.ccw_cmp(&left, &base), std::cmp::Ordering::Less);
        assert_eq!(left.ccw_cmp(&down, &base), std::cmp::Ordering::Less);
        assert_eq!(base.ccw_cmp(&up, &base), std::cmp::Ordering::Less);
        assert_eq!(down.ccw_cmp(&up, &base), std::cmp::Ordering::Greater);
    }
}
