//! Oriented polygonal chains, pairwise contact classification, family
//! validation and the tangency graph.
//!
//! A common point of two chains is a *touch* when, in the cyclic order of
//! the arcs leaving it, the arcs of one chain do not separate the arcs of
//! the other. A chain that merely ends at the point contributes a single arc
//! and can never separate, so endpoint contacts are touches.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exact_geom::{in_box, intersect_closed, orient, Dir, GeomError, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("chain {0} needs at least two vertices")]
    TooShort(u64),
    #[error("chain {id} repeats vertex {at} consecutively")]
    RepeatedVertex { id: u64, at: Point },
    #[error("duplicate chain id {0}")]
    DuplicateId(u64),
    #[error("point {0} is not on the chain")]
    OffChain(Point),
    #[error("empty subchain: endpoints coincide or are out of order")]
    EmptySubchain,
    #[error("{0} is not a touch point of the pair")]
    NotATouch(Point),
    #[error("side of the contact at {0} is ambiguous")]
    AmbiguousSide(Point),
    #[error("degenerate contact between chains {a} and {b}: {reason}")]
    Degenerate { a: u64, b: u64, reason: Degeneracy },
    #[error("family is not 1-intersecting")]
    NotOneIntersecting,
}

/// Why a pair of chains could not be classified.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Degeneracy {
    /// The chains share a sub-segment of positive length.
    Overlap,
    /// Two arcs leave a common point in the same direction.
    CollinearArcs(Point),
    /// A touch whose side cannot be read off (endpoint arcs in line).
    AmbiguousSide(Point),
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::Overlap => write!(f, "shared sub-segment"),
            Degeneracy::CollinearArcs(p) => write!(f, "collinear arcs at {p}"),
            Degeneracy::AmbiguousSide(p) => write!(f, "ambiguous side at {p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum XDir {
    Increasing,
    Decreasing,
    Neither,
}

/// An oriented simple polygonal chain with exact vertices. Orientation is
/// vertex order: the first vertex is the start, the last the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyChain {
    id: u64,
    vertices: Vec<Point>,
    xdir: XDir,
    lo: Point,
    hi: Point,
}

impl PolyChain {
    pub fn new(id: u64, vertices: Vec<Point>) -> Result<Self, CurveError> {
        if vertices.len() < 2 {
            return Err(CurveError::TooShort(id));
        }
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(CurveError::RepeatedVertex {
                    id,
                    at: w[0].clone(),
                });
            }
        }
        let xdir = if vertices.windows(2).all(|w| w[0].x < w[1].x) {
            XDir::Increasing
        } else if vertices.windows(2).all(|w| w[0].x > w[1].x) {
            XDir::Decreasing
        } else {
            XDir::Neither
        };
        let mut lo = vertices[0].clone();
        let mut hi = vertices[0].clone();
        for v in &vertices[1..] {
            if v.x < lo.x {
                lo.x = v.x.clone();
            }
            if v.y < lo.y {
                lo.y = v.y.clone();
            }
            if v.x > hi.x {
                hi.x = v.x.clone();
            }
            if v.y > hi.y {
                hi.y = v.y.clone();
            }
        }
        Ok(PolyChain {
            id,
            vertices,
            xdir,
            lo,
            hi,
        })
    }

    /// Builds a chain from integer coordinates.
    pub fn from_ints(id: u64, coords: &[(i64, i64)]) -> Result<Self, CurveError> {
        Self::new(id, coords.iter().map(|&(x, y)| Point::int(x, y)).collect())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn start(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point {
        self.vertices.last().expect("chains have two vertices")
    }

    pub fn with_id(&self, id: u64) -> PolyChain {
        PolyChain { id, ..self.clone() }
    }

    /// The same point set traversed the other way.
    pub fn reversed(&self) -> PolyChain {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyChain::new(self.id, v).expect("reversal keeps a valid chain")
    }

    /// Strictly increasing x along the orientation.
    pub fn is_x_increasing(&self) -> bool {
        self.xdir == XDir::Increasing
    }

    /// Strictly monotone in x in either direction.
    fn x_sorted(&self) -> bool {
        self.xdir != XDir::Neither
    }

    /// Bounding box as (lower-left, upper-right).
    pub fn bbox(&self) -> (&Point, &Point) {
        (&self.lo, &self.hi)
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// No two non-adjacent edges meet and adjacent edges share only their
    /// common vertex.
    pub fn is_simple(&self) -> bool {
        if self.x_sorted() {
            return true;
        }
        let v = &self.vertices;
        let m = self.segment_count();
        for i in 0..m {
            for j in i + 1..m {
                let hit = intersect_closed(&v[i], &v[i + 1], &v[j], &v[j + 1]);
                match hit {
                    Err(_) => return false,
                    Ok(None) => {}
                    Ok(Some(p)) => {
                        let shared_vertex = j == i + 1 && p == v[j];
                        if !shared_vertex {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Where `p` sits on the chain, if anywhere.
    pub fn locate(&self, p: &Point) -> Option<Location> {
        let v = &self.vertices;
        let range = match self.xdir {
            XDir::Increasing => {
                let i = v.partition_point(|q| q.x < p.x);
                i.saturating_sub(1)..(i + 1).min(v.len())
            }
            XDir::Decreasing => {
                let i = v.partition_point(|q| q.x > p.x);
                i.saturating_sub(1)..(i + 1).min(v.len())
            }
            XDir::Neither => 0..v.len(),
        };
        for i in range.clone() {
            if &v[i] == p {
                return Some(Location::Vertex(i));
            }
        }
        for i in range {
            if i + 1 < v.len()
                && orient(&v[i], &v[i + 1], p) == 0
                && in_box(&v[i], &v[i + 1], p)
            {
                return Some(Location::Edge(i));
            }
        }
        None
    }

    /// Arcs leaving `p`: (towards the end, towards the start).
    pub fn arcs_at(&self, p: &Point) -> Option<(Option<Dir>, Option<Dir>)> {
        let v = &self.vertices;
        match self.locate(p)? {
            Location::Vertex(i) => {
                let fwd = (i + 1 < v.len()).then(|| v[i + 1].sub(p));
                let back = (i > 0).then(|| v[i - 1].sub(p));
                Some((fwd, back))
            }
            Location::Edge(i) => Some((Some(v[i + 1].sub(p)), Some(v[i].sub(p)))),
        }
    }

    /// Position along the chain as (edge index, fraction of that edge).
    pub fn position(&self, p: &Point) -> Option<(usize, Rational)> {
        let v = &self.vertices;
        match self.locate(p)? {
            Location::Vertex(i) => Some((i, Rational::zero())),
            Location::Edge(i) => {
                let t = if v[i].x != v[i + 1].x {
                    (&p.x - &v[i].x) / (&v[i + 1].x - &v[i].x)
                } else {
                    (&p.y - &v[i].y) / (&v[i + 1].y - &v[i].y)
                };
                Some((i, t))
            }
        }
    }
}

/// Location of a point on a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Vertex(usize),
    /// Interior of edge `i` (between vertices `i` and `i + 1`).
    Edge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContactClass {
    Cross,
    Touch,
}

/// Tangency type: (side of the first chain on which the second lies,
/// side of the second chain on which the first lies), relative to the
/// chains' orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TangencyType {
    LL,
    LR,
    RR,
    RL,
}

impl TangencyType {
    pub const ALL: [TangencyType; 4] = [
        TangencyType::LL,
        TangencyType::LR,
        TangencyType::RR,
        TangencyType::RL,
    ];

    fn from_sides(first: Side, second: Side) -> Self {
        match (first, second) {
            (Side::Left, Side::Left) => TangencyType::LL,
            (Side::Left, Side::Right) => TangencyType::LR,
            (Side::Right, Side::Right) => TangencyType::RR,
            (Side::Right, Side::Left) => TangencyType::RL,
        }
    }

    /// The type seen with the roles of the two chains exchanged.
    pub fn swapped(self) -> Self {
        match self {
            TangencyType::LR => TangencyType::RL,
            TangencyType::RL => TangencyType::LR,
            t => t,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TangencyType::LL => "LL",
            TangencyType::LR => "LR",
            TangencyType::RR => "RR",
            TangencyType::RL => "RL",
        }
    }
}

impl fmt::Display for TangencyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Side of the chain with arcs `(fwd, back)` on which all of `others` lie,
/// or `None` if they straddle it or run along it. A missing arc is replaced
/// by the continuation of the other one.
fn side_of(fwd: &Option<Dir>, back: &Option<Dir>, others: &[&Dir]) -> Option<Side> {
    let (f, b) = match (fwd, back) {
        (Some(f), Some(b)) => (f.clone(), b.clone()),
        (Some(f), None) => (f.clone(), f.neg()),
        (None, Some(b)) => (b.neg(), b.clone()),
        (None, None) => return None,
    };
    let mut side = None;
    for d in others {
        if d.same_ray(&f) || d.same_ray(&b) {
            return None;
        }
        let s = if d.ccw_cmp(&b, &f) == Ordering::Less {
            Side::Left
        } else {
            Side::Right
        };
        match side {
            None => side = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    side
}

/// A common point of two chains with its classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonPoint {
    pub point: Point,
    pub class: ContactClass,
}

fn boxes_meet(a: &PolyChain, b: &PolyChain) -> bool {
    a.lo.x <= b.hi.x && b.lo.x <= a.hi.x && a.lo.y <= b.hi.y && b.lo.y <= a.hi.y
}

fn edge_boxes_meet(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> bool {
    let (a, b) = if p1.y <= q1.y { (&p1.y, &q1.y) } else { (&q1.y, &p1.y) };
    let (c, d) = if p2.y <= q2.y { (&p2.y, &q2.y) } else { (&q2.y, &p2.y) };
    if a > d || c > b {
        return false;
    }
    let (a, b) = if p1.x <= q1.x { (&p1.x, &q1.x) } else { (&q1.x, &p1.x) };
    let (c, d) = if p2.x <= q2.x { (&p2.x, &q2.x) } else { (&q2.x, &p2.x) };
    a <= d && c <= b
}

/// Edges of an x-sorted chain in increasing x, as (left, right) endpoints.
fn edges_by_x(c: &PolyChain) -> Vec<(&Point, &Point)> {
    let v = &c.vertices;
    match c.xdir {
        XDir::Increasing => v.windows(2).map(|w| (&w[0], &w[1])).collect(),
        _ => v.windows(2).rev().map(|w| (&w[1], &w[0])).collect(),
    }
}

/// All points shared by the two closed chains, sorted and deduplicated.
pub fn intersection_points(c1: &PolyChain, c2: &PolyChain) -> Result<Vec<Point>, Degeneracy> {
    let mut out = Vec::new();
    if !boxes_meet(c1, c2) {
        return Ok(out);
    }
    let mut test = |p1: &Point, q1: &Point, p2: &Point, q2: &Point| -> Result<(), Degeneracy> {
        if !edge_boxes_meet(p1, q1, p2, q2) {
            return Ok(());
        }
        match intersect_closed(p1, q1, p2, q2) {
            Ok(Some(p)) => out.push(p),
            Ok(None) => {}
            Err(GeomError::Overlap) => return Err(Degeneracy::Overlap),
            Err(_) => unreachable!("chains have no zero-length edges"),
        }
        Ok(())
    };
    if c1.x_sorted() && c2.x_sorted() {
        let e1 = edges_by_x(c1);
        let e2 = edges_by_x(c2);
        let (mut i, mut j) = (0, 0);
        while i < e1.len() && j < e2.len() {
            let (l1, r1) = e1[i];
            let (l2, r2) = e2[j];
            if l1.x <= r2.x && l2.x <= r1.x {
                test(l1, r1, l2, r2)?;
            }
            match r1.x.cmp(&r2.x) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
    } else {
        let v1 = &c1.vertices;
        let v2 = &c2.vertices;
        for a in v1.windows(2) {
            for b in v2.windows(2) {
                test(&a[0], &a[1], &b[0], &b[1])?;
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Every common point of the two closed chains, classified cross or touch.
///
/// Fails when the chains share a sub-segment or when arcs of the two
/// chains leave a common point in the same direction.
pub fn common_points(c1: &PolyChain, c2: &PolyChain) -> Result<Vec<CommonPoint>, Degeneracy> {
    let pts = intersection_points(c1, c2)?;
    let mut out = Vec::with_capacity(pts.len());
    for p in pts {
        let class = classify_point(c1, c2, &p)?;
        out.push(CommonPoint { point: p, class });
    }
    Ok(out)
}

fn classify_point(c1: &PolyChain, c2: &PolyChain, p: &Point) -> Result<ContactClass, Degeneracy> {
    let (f1, b1) = c1.arcs_at(p).expect("intersection point lies on the first chain");
    let (f2, b2) = c2.arcs_at(p).expect("intersection point lies on the second chain");
    let arcs1: Vec<&Dir> = f1.iter().chain(b1.iter()).collect();
    let arcs2: Vec<&Dir> = f2.iter().chain(b2.iter()).collect();
    for a in &arcs1 {
        for b in &arcs2 {
            if a.same_ray(b) {
                return Err(Degeneracy::CollinearArcs(p.clone()));
            }
        }
    }
    if arcs1.len() < 2 || arcs2.len() < 2 {
        return Ok(ContactClass::Touch);
    }
    Ok(match side_of(&f1, &b1, &arcs2) {
        Some(_) => ContactClass::Touch,
        None => ContactClass::Cross,
    })
}

/// Tangency type of a touch point `p` of the pair, with `c1` first.
pub fn tangency_type(c1: &PolyChain, c2: &PolyChain, p: &Point) -> Result<TangencyType, CurveError> {
    let (f1, b1) = c1.arcs_at(p).ok_or_else(|| CurveError::OffChain(p.clone()))?;
    let (f2, b2) = c2.arcs_at(p).ok_or_else(|| CurveError::OffChain(p.clone()))?;
    match classify_point(c1, c2, p) {
        Ok(ContactClass::Touch) => {}
        _ => return Err(CurveError::NotATouch(p.clone())),
    }
    let arcs1: Vec<&Dir> = f1.iter().chain(b1.iter()).collect();
    let arcs2: Vec<&Dir> = f2.iter().chain(b2.iter()).collect();
    let first = side_of(&f1, &b1, &arcs2).ok_or_else(|| CurveError::AmbiguousSide(p.clone()))?;
    let second = side_of(&f2, &b2, &arcs1).ok_or_else(|| CurveError::AmbiguousSide(p.clone()))?;
    Ok(TangencyType::from_sides(first, second))
}

/// Contact between two chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContactKind {
    Disjoint,
    Crossing(Point),
    Tangency(Point, TangencyType),
    /// Two or more common points, each classified.
    Multi(Vec<CommonPoint>),
    Degenerate(Degeneracy),
}

impl ContactKind {
    pub fn point_count(&self) -> usize {
        match self {
            ContactKind::Disjoint | ContactKind::Degenerate(_) => 0,
            ContactKind::Crossing(_) | ContactKind::Tangency(..) => 1,
            ContactKind::Multi(v) => v.len(),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match self {
            ContactKind::Crossing(p) | ContactKind::Tangency(p, _) => vec![p.clone()],
            ContactKind::Multi(v) => v.iter().map(|c| c.point.clone()).collect(),
            _ => Vec::new(),
        }
    }
}

/// Classifies the pair `(c1, c2)`; the tangency type, if any, has `c1` first.
pub fn classify_pair(c1: &PolyChain, c2: &PolyChain) -> ContactKind {
    let pts = match common_points(c1, c2) {
        Ok(p) => p,
        Err(d) => return ContactKind::Degenerate(d),
    };
    match pts.len() {
        0 => ContactKind::Disjoint,
        1 => {
            let cp = pts.into_iter().next().expect("one point");
            match cp.class {
                ContactClass::Cross => ContactKind::Crossing(cp.point),
                ContactClass::Touch => match tangency_type(c1, c2, &cp.point) {
                    Ok(t) => ContactKind::Tangency(cp.point, t),
                    Err(_) => ContactKind::Degenerate(Degeneracy::AmbiguousSide(cp.point)),
                },
            }
        }
        _ => ContactKind::Multi(pts),
    }
}

/// Either end of a chain, or a point on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainPoint {
    Start,
    End,
    At(Point),
}

/// The part of `c` from `a` to `b`, following the orientation of `c`.
pub fn subchain(c: &PolyChain, a: &ChainPoint, b: &ChainPoint) -> Result<PolyChain, CurveError> {
    let resolve = |cp: &ChainPoint| -> Result<(Point, (usize, Rational)), CurveError> {
        let p = match cp {
            ChainPoint::Start => c.start().clone(),
            ChainPoint::End => c.end().clone(),
            ChainPoint::At(p) => p.clone(),
        };
        let pos = c.position(&p).ok_or_else(|| CurveError::OffChain(p.clone()))?;
        Ok((p, pos))
    };
    let (pa, ka) = resolve(a)?;
    let (pb, kb) = resolve(b)?;
    if ka >= kb {
        return Err(CurveError::EmptySubchain);
    }
    let mut verts = vec![pa];
    for (i, v) in c.vertices.iter().enumerate() {
        let k = (i, Rational::zero());
        if k > ka && k < kb {
            verts.push(v.clone());
        }
    }
    verts.push(pb);
    PolyChain::new(c.id, verts)
}

/// Declared properties of a family. Loading a file re-checks them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FamilyFlags {
    pub x_monotone: bool,
    pub bi_infinite: bool,
    pub one_intersecting: bool,
    pub precisely_one: bool,
}

/// A set of chains with optional window, ground line and provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFamily {
    pub chains: Vec<PolyChain>,
    /// Shared x-extent of bi-infinite chains.
    pub window: Option<(Rational, Rational)>,
    /// x-coordinate of the vertical ground line.
    pub ground: Option<Rational>,
    pub flags: FamilyFlags,
    pub seed: Option<u64>,
}

impl CurveFamily {
    pub fn new(chains: Vec<PolyChain>) -> Result<Self, CurveError> {
        let mut seen = BTreeSet::new();
        for c in &chains {
            if !seen.insert(c.id) {
                return Err(CurveError::DuplicateId(c.id));
            }
        }
        Ok(CurveFamily {
            chains,
            window: None,
            ground: None,
            flags: FamilyFlags::default(),
            seed: None,
        })
    }

    pub fn with_window(mut self, lo: Rational, hi: Rational) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn with_ground(mut self, x: Rational) -> Self {
        self.ground = Some(x);
        self
    }

    pub fn with_flags(mut self, flags: FamilyFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&PolyChain> {
        self.chains.iter().find(|c| c.id == id)
    }

    pub fn ids(&self) -> Vec<u64> {
        self.chains.iter().map(|c| c.id).collect()
    }

    /// The sub-family with the given ids, keeping window and ground.
    pub fn restrict(&self, ids: &[u64]) -> CurveFamily {
        let keep: BTreeSet<u64> = ids.iter().copied().collect();
        CurveFamily {
            chains: self.chains.iter().filter(|c| keep.contains(&c.id)).cloned().collect(),
            ..self.clone()
        }
    }
}

/// A non-disjoint pair from a full pairwise scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairContact {
    pub a: u64,
    pub b: u64,
    pub kind: ContactKind,
}

/// Summary of a full pairwise scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub curves: usize,
    pub is_1_intersecting: bool,
    pub is_precisely_1: bool,
    /// Points lying on three or more chains, with the chains through them.
    pub triple_points: Vec<(Point, Vec<u64>)>,
    pub degenerate_pairs: Vec<(u64, u64, Degeneracy)>,
    pub non_simple: Vec<u64>,
    pub all_x_monotone: bool,
    /// False when no ground line is declared.
    pub grounded_ok: bool,
    /// True unless the family is declared bi-infinite and some chain does
    /// not span the window exactly.
    pub window_ok: bool,
    /// Touches where one of the chains ends at the common point.
    pub endpoint_contacts: Vec<(u64, u64, Point)>,
    pub disjoint_pairs: usize,
    pub crossing_pairs: usize,
    pub tangent_pairs: usize,
    pub multi_pairs: usize,
    /// Every pair that is not disjoint, in scan order.
    pub contacts: Vec<PairContact>,
}

impl ValidationReport {
    pub fn tangency_count(&self) -> usize {
        self.tangent_pairs
    }

    /// Declared flags that the scan contradicts, by name.
    pub fn violated_flags(&self, flags: &FamilyFlags) -> Vec<&'static str> {
        let mut out = Vec::new();
        if flags.x_monotone && !self.all_x_monotone {
            out.push("x_monotone");
        }
        if flags.bi_infinite && !self.window_ok {
            out.push("bi_infinite");
        }
        if flags.one_intersecting && !self.is_1_intersecting {
            out.push("one_intersecting");
        }
        if flags.precisely_one && !self.is_precisely_1 {
            out.push("precisely_one");
        }
        out
    }
}

fn grounded_ok(f: &CurveFamily) -> bool {
    let Some(g) = &f.ground else {
        return false;
    };
    f.chains.iter().all(|c| {
        if &c.start().x != g {
            return false;
        }
        let rest = &c.vertices[1..];
        rest.iter().all(|v| &v.x > g) || rest.iter().all(|v| &v.x < g)
    })
}

fn window_ok(f: &CurveFamily) -> bool {
    if !f.flags.bi_infinite {
        return true;
    }
    let Some((lo, hi)) = &f.window else {
        return false;
    };
    f.chains
        .iter()
        .all(|c| c.is_x_increasing() && &c.start().x == lo && &c.end().x == hi)
}

/// Full pairwise scan of the family. Problems are reported, never thrown.
pub fn validate_family(f: &CurveFamily) -> ValidationReport {
    let n = f.chains.len();
    let non_simple: Vec<u64> = f.chains.iter().filter(|c| !c.is_simple()).map(|c| c.id).collect();
    let mut report = ValidationReport {
        curves: n,
        is_1_intersecting: true,
        is_precisely_1: true,
        triple_points: Vec::new(),
        degenerate_pairs: Vec::new(),
        all_x_monotone: f.chains.iter().all(|c| c.is_x_increasing()),
        grounded_ok: grounded_ok(f),
        window_ok: window_ok(f),
        non_simple,
        endpoint_contacts: Vec::new(),
        disjoint_pairs: 0,
        crossing_pairs: 0,
        tangent_pairs: 0,
        multi_pairs: 0,
        contacts: Vec::new(),
    };
    let mut on_point: HashMap<Point, BTreeSet<u64>> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&f.chains[i], &f.chains[j]);
            let kind = classify_pair(a, b);
            match &kind {
                ContactKind::Disjoint => {
                    report.disjoint_pairs += 1;
                    continue;
                }
                ContactKind::Crossing(_) => report.crossing_pairs += 1,
                ContactKind::Tangency(p, _) => {
                    report.tangent_pairs += 1;
                    let ends = |c: &PolyChain| c.start() == p || c.end() == p;
                    if ends(a) || ends(b) {
                        report.endpoint_contacts.push((a.id, b.id, p.clone()));
                    }
                }
                ContactKind::Multi(_) => report.multi_pairs += 1,
                ContactKind::Degenerate(d) => report.degenerate_pairs.push((a.id, b.id, d.clone())),
            }
            for p in kind.points() {
                let set = on_point.entry(p).or_default();
                set.insert(a.id);
                set.insert(b.id);
            }
            report.contacts.push(PairContact {
                a: a.id,
                b: b.id,
                kind,
            });
        }
    }
    let mut triples: Vec<(Point, Vec<u64>)> = on_point
        .into_iter()
        .filter(|(_, s)| s.len() >= 3)
        .map(|(p, s)| (p, s.into_iter().collect()))
        .collect();
    triples.sort();
    report.triple_points = triples;
    report.is_1_intersecting =
        report.multi_pairs == 0 && report.degenerate_pairs.is_empty() && report.non_simple.is_empty();
    report.is_precisely_1 = report.is_1_intersecting && report.disjoint_pairs == 0;
    report
}

/// An edge of the tangency graph; `kind` is read with `a` as first chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangencyEdge {
    pub a: u64,
    pub b: u64,
    pub point: Point,
    pub kind: TangencyType,
}

/// Graph on chain ids whose edges are the touching pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangencyGraph {
    pub vertices: Vec<u64>,
    pub edges: Vec<TangencyEdge>,
}

impl TangencyGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, id: u64) -> usize {
        self.edges.iter().filter(|e| e.a == id || e.b == id).count()
    }

    /// True when the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let index: HashMap<u64, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, index[&e.a]), find(&mut parent, index[&e.b]));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Centre of the star formed by the edges, if they form one.
    pub fn star_center(&self) -> Option<u64> {
        let first = self.edges.first()?;
        [first.a, first.b]
            .into_iter()
            .find(|&c| self.edges.iter().all(|e| e.a == c || e.b == c))
    }

    pub fn count_by_type(&self) -> BTreeMap<TangencyType, usize> {
        let mut m: BTreeMap<TangencyType, usize> = TangencyType::ALL.iter().map(|&t| (t, 0)).collect();
        for e in &self.edges {
            *m.get_mut(&e.kind).expect("all types present") += 1;
        }
        m
    }
}

/// Tangency graph of a validated 1-intersecting family.
pub fn tangency_graph(f: &CurveFamily) -> Result<TangencyGraph, CurveError> {
    let report = validate_family(f);
    tangency_graph_from(f, &report)
}

/// Builds the tangency graph from an existing scan of `f`.
pub fn tangency_graph_from(f: &CurveFamily, report: &ValidationReport) -> Result<TangencyGraph, CurveError> {
    if let Some((a, b, d)) = report.degenerate_pairs.first() {
        return Err(CurveError::Degenerate {
            a: *a,
            b: *b,
            reason: d.clone(),
        });
    }
    if !report.is_1_intersecting {
        return Err(CurveError::NotOneIntersecting);
    }
    let edges = report
        .contacts
        .iter()
        .filter_map(|pc| match &pc.kind {
            ContactKind::Tangency(p, t) => Some(TangencyEdge {
                a: pc.a,
                b: pc.b,
                point: p.clone(),
                kind: *t,
            }),
            _ => None,
        })
        .collect();
    Ok(TangencyGraph {
        vertices: f.ids(),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geom::{int, rat};

    fn chain(id: u64, pts: &[(i64, i64)]) -> PolyChain {
        PolyChain::from_ints(id, pts).unwrap()
    }

    fn line() -> PolyChain {
        chain(0, &[(-1, 0), (3, 0)])
    }

    fn vee() -> PolyChain {
        chain(1, &[(0, 1), (1, 0), (2, 1)])
    }

    #[test]
    fn line_and_vee_touch() {
        let pts = common_points(&line(), &vee()).unwrap();
        assert_eq!(
            pts,
            vec![CommonPoint {
                point: Point::int(1, 0),
                class: ContactClass::Touch
            }]
        );
    }

    #[test]
    fn x_cross_and_disjoint() {
        let a = chain(0, &[(0, 0), (2, 2)]);
        let b = chain(1, &[(0, 2), (2, 0)]);
        let pts = common_points(&a, &b).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].point, Point::int(1, 1));
        assert_eq!(pts[0].class, ContactClass::Cross);
        let c = chain(2, &[(0, 0), (1, 0)]);
        let d = chain(3, &[(0, 1), (1, 1)]);
        assert!(common_points(&c, &d).unwrap().is_empty());
    }

    #[test]
    fn crossing_through_vertices() {
        // Both chains bend exactly at the shared point.
        let a = chain(0, &[(0, 0), (1, 1), (2, 1)]);
        let b = chain(1, &[(0, 2), (1, 1), (2, 0)]);
        assert_eq!(classify_pair(&a, &b), ContactKind::Crossing(Point::int(1, 1)));
        // Same point, but b stays above a's two arcs.
        let c = chain(2, &[(0, 3), (1, 1), (2, 3)]);
        assert!(matches!(classify_pair(&a, &c), ContactKind::Tangency(..)));
    }

    #[test]
    fn tangency_type_convention() {
        let l = line();
        let v = vee();
        let p = Point::int(1, 0);
        assert_eq!(tangency_type(&l, &v, &p).unwrap(), TangencyType::LR);
        assert_eq!(tangency_type(&l, &v.reversed(), &p).unwrap(), TangencyType::LL);
        assert_eq!(tangency_type(&l.reversed(), &v, &p).unwrap(), TangencyType::RR);
        assert_eq!(tangency_type(&v, &l, &p).unwrap(), TangencyType::RL);
    }

    #[test]
    fn tangency_type_rejects_crossing() {
        let a = chain(0, &[(0, 0), (2, 2)]);
        let b = chain(1, &[(0, 2), (2, 0)]);
        assert_eq!(
            tangency_type(&a, &b, &Point::int(1, 1)),
            Err(CurveError::NotATouch(Point::int(1, 1)))
        );
    }

    #[test]
    fn endpoint_contact_is_touch() {
        let a = chain(0, &[(0, 0), (2, 0)]);
        let b = chain(1, &[(1, 0), (1, 1)]);
        let pts = common_points(&a, &b).unwrap();
        assert_eq!(pts[0].class, ContactClass::Touch);
        // The ending chain has the other one on both sides of its line.
        assert_eq!(
            tangency_type(&a, &b, &Point::int(1, 0)),
            Err(CurveError::AmbiguousSide(Point::int(1, 0)))
        );
        // Ending in a corner of the other chain leaves both sides readable.
        let c = chain(2, &[(0, 1), (1, 0), (3, 1)]);
        let d = chain(3, &[(1, 0), (3, -1)]);
        assert_eq!(tangency_type(&c, &d, &Point::int(1, 0)).unwrap(), TangencyType::RL);
    }

    #[test]
    fn shared_segment_is_degenerate() {
        let a = chain(0, &[(0, 0), (2, 0)]);
        let b = chain(1, &[(1, 0), (3, 0), (4, 1)]);
        assert_eq!(common_points(&a, &b), Err(Degeneracy::Overlap));
    }

    #[test]
    fn non_monotone_chains_use_full_scan() {
        let a = chain(0, &[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let b = chain(1, &[(1, -1), (1, 3)]);
        let pts = common_points(&a, &b).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(matches!(classify_pair(&a, &b), ContactKind::Multi(_)));
    }

    #[test]
    fn simplicity() {
        assert!(chain(0, &[(0, 0), (2, 0), (2, 2), (0, 2)]).is_simple());
        assert!(!chain(0, &[(0, 0), (2, 2), (2, 0), (0, 2)]).is_simple());
        assert!(!chain(0, &[(0, 0), (2, 0), (1, 0)]).is_simple());
    }

    #[test]
    fn validate_examples() {
        let concurrent = CurveFamily::new(vec![
            chain(0, &[(-1, 0), (1, 0)]),
            chain(1, &[(0, -1), (0, 1)]),
            chain(2, &[(-1, -1), (1, 1)]),
        ])
        .unwrap();
        let r = validate_family(&concurrent);
        assert_eq!(r.triple_points, vec![(Point::int(0, 0), vec![0, 1, 2])]);

        let twice = CurveFamily::new(vec![
            chain(0, &[(0, 0), (4, 0)]),
            chain(1, &[(0, -1), (1, 1), (2, -1), (3, 1)]),
        ])
        .unwrap();
        let r = validate_family(&twice);
        assert!(!r.is_1_intersecting);
        assert_eq!(r.multi_pairs, 1);
    }

    #[test]
    fn grounded_check() {
        let f = CurveFamily::new(vec![chain(0, &[(0, 0), (1, 1)]), chain(1, &[(0, 2), (1, 3), (2, 0)])])
            .unwrap()
            .with_ground(int(0));
        assert!(validate_family(&f).grounded_ok);
        let back = CurveFamily::new(vec![chain(0, &[(0, 0), (1, 1), (0, 2)])])
            .unwrap()
            .with_ground(int(0));
        assert!(!validate_family(&back).grounded_ok);
    }

    #[test]
    fn pair_counts_add_up() {
        let f = CurveFamily::new(vec![line(), vee(), chain(2, &[(-1, 3), (3, -1)]), chain(3, &[(-1, 5), (3, 5)])])
            .unwrap();
        let r = validate_family(&f);
        assert_eq!(r.disjoint_pairs + r.crossing_pairs + r.tangent_pairs, 6);
        let g = tangency_graph(&f).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn subchain_examples() {
        let v = vee();
        assert_eq!(subchain(&v, &ChainPoint::Start, &ChainPoint::End).unwrap(), v);
        let tail = subchain(&v, &ChainPoint::At(Point::int(1, 0)), &ChainPoint::End).unwrap();
        assert_eq!(tail.vertices(), &[Point::int(1, 0), Point::int(2, 1)]);
        let same = ChainPoint::At(Point::int(1, 0));
        assert_eq!(subchain(&v, &same, &same), Err(CurveError::EmptySubchain));
        let mid = subchain(&v, &ChainPoint::At(Point::new(rat(1, 2), rat(1, 2))), &ChainPoint::End).unwrap();
        assert_eq!(mid.vertices().len(), 3);
        assert!(subchain(&v, &ChainPoint::At(Point::int(5, 5)), &ChainPoint::End).is_err());
    }

    #[test]
    fn forest_and_star() {
        let g = TangencyGraph {
            vertices: vec![0, 1, 2],
            edges: vec![
                TangencyEdge { a: 0, b: 1, point: Point::int(0, 0), kind: TangencyType::LL },
                TangencyEdge { a: 0, b: 2, point: Point::int(1, 0), kind: TangencyType::LL },
            ],
        };
        assert!(g.is_forest());
        assert_eq!(g.star_center(), Some(0));
        let mut cyc = g.clone();
        cyc.edges.push(TangencyEdge { a: 1, b: 2, point: Point::int(2, 0), kind: TangencyType::RR });
        assert!(!cyc.is_forest());
    }
}
