//! Machinery for x-monotone chains: vertical order, lower envelopes,
//! vertical visibility, trapezoidal partitions, cutting search and
//! extension to a shared window.
//!
//! Everything here assumes chains whose vertex x-coordinates strictly
//! increase. Such a chain is the graph of a piecewise linear function on
//! `[start.x, end.x]`, which is what [`y_at`] evaluates.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::{intersection_points, CurveFamily, Degeneracy, FamilyFlags, PolyChain};
use crate::exact_geom::{int, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmonoError {
    #[error("chain {0} is not x-monotone")]
    NotXMonotone(u64),
    #[error("chains {a} and {b} are degenerate: {reason}")]
    Degenerate { a: u64, b: u64, reason: Degeneracy },
    #[error("chains {0} and {1} share no x-interval")]
    NoCommonRange(u64, u64),
    #[error("chains {0} and {1} already meet where their common x-range starts")]
    SharedStart(u64, u64),
    #[error("chain {0} does not span the window")]
    ShortOfWindow(u64),
    #[error("{got} modes given for {want} chains")]
    ModeCount { got: usize, want: usize },
    #[error("parameter out of range: {0}")]
    BadParameter(&'static str),
    #[error("no cutting found in {tries} tries (best: {best_cells} cells, max load {best_load})")]
    Exhausted {
        tries: u32,
        best_cells: usize,
        best_load: usize,
    },
}

/// Strictly increasing vertex x-coordinates.
pub fn is_x_monotone(c: &PolyChain) -> bool {
    c.is_x_increasing()
}

fn require_monotone(f: &CurveFamily) -> Result<(), XmonoError> {
    match f.chains.iter().find(|c| !c.is_x_increasing()) {
        Some(c) => Err(XmonoError::NotXMonotone(c.id())),
        None => Ok(()),
    }
}

/// Height of an x-monotone chain at `x`, or `None` outside its x-range.
pub fn y_at(c: &PolyChain, x: &Rational) -> Option<Rational> {
    let v = c.vertices();
    let i = v.partition_point(|p| &p.x < x);
    if i == v.len() {
        return None;
    }
    if &v[i].x == x {
        return Some(v[i].y.clone());
    }
    if i == 0 {
        return None;
    }
    let (a, b) = (&v[i - 1], &v[i]);
    Some(&a.y + (&b.y - &a.y) * (x - &a.x) / (&b.x - &a.x))
}

/// Slope of the edge leaving `x` to the right.
fn right_slope(c: &PolyChain, x: &Rational) -> Option<Rational> {
    let v = c.vertices();
    let i = v.partition_point(|p| &p.x <= x);
    if i == 0 || i == v.len() {
        return None;
    }
    let (a, b) = (&v[i - 1], &v[i]);
    Some((&b.y - &a.y) / (&b.x - &a.x))
}

fn meet(a: &PolyChain, b: &PolyChain) -> Result<Vec<Point>, XmonoError> {
    intersection_points(a, b).map_err(|reason| XmonoError::Degenerate {
        a: a.id(),
        b: b.id(),
        reason,
    })
}

fn mid(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Whether `c1` starts below `c2`: below everywhere if they never meet,
/// otherwise strictly below just left of their leftmost common point.
pub fn starts_below(c1: &PolyChain, c2: &PolyChain) -> Result<bool, XmonoError> {
    for c in [c1, c2] {
        if !c.is_x_increasing() {
            return Err(XmonoError::NotXMonotone(c.id()));
        }
    }
    let lo = std::cmp::max(&c1.start().x, &c2.start().x);
    let hi = std::cmp::min(&c1.end().x, &c2.end().x);
    if lo >= hi {
        return Err(XmonoError::NoCommonRange(c1.id(), c2.id()));
    }
    let pts = meet(c1, c2)?;
    let probe = match pts.iter().map(|p| &p.x).min() {
        None => mid(lo, hi),
        Some(x) if x == lo => return Err(XmonoError::SharedStart(c1.id(), c2.id())),
        Some(x) => mid(lo, x),
    };
    let y1 = y_at(c1, &probe).expect("probe inside both ranges");
    let y2 = y_at(c2, &probe).expect("probe inside both ranges");
    Ok(y1 < y2)
}

/// A maximal x-interval on which one chain is the lowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopePiece {
    pub lo: Rational,
    pub hi: Rational,
    pub id: u64,
}

/// The x-range every chain must span: the declared window, or else the
/// intersection of all chain ranges.
fn common_window(f: &CurveFamily) -> Result<Option<(Rational, Rational)>, XmonoError> {
    let (lo, hi) = match &f.window {
        Some(w) => w.clone(),
        None => {
            let Some(lo) = f.chains.iter().map(|c| &c.start().x).max() else {
                return Ok(None);
            };
            let hi = f.chains.iter().map(|c| &c.end().x).min().expect("nonempty");
            (lo.clone(), hi.clone())
        }
    };
    for c in &f.chains {
        if c.start().x > lo || c.end().x < hi {
            return Err(XmonoError::ShortOfWindow(c.id()));
        }
    }
    Ok((lo < hi).then_some((lo, hi)))
}

/// Lower envelope over the window, walking from the left: at each step
/// the next breakpoint is the nearest common point where another chain
/// leaves the current one downwards.
pub fn lower_envelope(f: &CurveFamily) -> Result<Vec<EnvelopePiece>, XmonoError> {
    require_monotone(f)?;
    let Some((lo, hi)) = common_window(f)? else {
        return Ok(Vec::new());
    };
    let chains = &f.chains;
    let n = chains.len();
    let mut inter = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let pts = meet(&chains[i], &chains[j])?;
            inter[j][i] = pts.clone();
            inter[i][j] = pts;
        }
    }
    let key = |i: usize, x: &Rational| (y_at(&chains[i], x), right_slope(&chains[i], x));
    let mut cur = (0..n).min_by(|&a, &b| key(a, &lo).cmp(&key(b, &lo))).expect("nonempty");
    let mut x = lo;
    let mut pieces = Vec::new();
    loop {
        let mut best: Option<(Rational, Rational, usize)> = None;
        for j in (0..n).filter(|&j| j != cur) {
            for p in &inter[cur][j] {
                if p.x <= x || p.x >= hi {
                    continue;
                }
                let sj = right_slope(&chains[j], &p.x).expect("inside window");
                let sc = right_slope(&chains[cur], &p.x).expect("inside window");
                if sj < sc {
                    let cand = (p.x.clone(), sj, j);
                    if best.as_ref().is_none_or(|b| (&cand.0, &cand.1) < (&b.0, &b.1)) {
                        best = Some(cand);
                    }
                    // Later points of this pair are further right.
                    break;
                }
            }
        }
        match best {
            None => {
                pieces.push(EnvelopePiece {
                    lo: x,
                    hi,
                    id: chains[cur].id(),
                });
                return Ok(pieces);
            }
            Some((px, _, j)) => {
                pieces.push(EnvelopePiece {
                    lo: x,
                    hi: px.clone(),
                    id: chains[cur].id(),
                });
                x = px;
                cur = j;
            }
        }
    }
}

/// Sorted, distinct x-coordinates of all vertices and pairwise common
/// points, with a disjointness table by chain index.
fn event_xs(chains: &[PolyChain]) -> Result<(Vec<Rational>, Vec<Vec<bool>>), XmonoError> {
    let n = chains.len();
    let mut xs: Vec<Rational> = chains
        .iter()
        .flat_map(|c| c.vertices().iter().map(|v| v.x.clone()))
        .collect();
    let mut disjoint = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let pts = meet(&chains[i], &chains[j])?;
            disjoint[i][j] = pts.is_empty();
            disjoint[j][i] = pts.is_empty();
            xs.extend(pts.into_iter().map(|p| p.x));
        }
    }
    xs.sort();
    xs.dedup();
    Ok((xs, disjoint))
}

/// Disjoint pairs that are consecutive in the vertical order somewhere,
/// as `(smaller id, larger id)`.
pub fn vertical_visibility_pairs(f: &CurveFamily) -> Result<BTreeSet<(u64, u64)>, XmonoError> {
    require_monotone(f)?;
    let chains = &f.chains;
    let (xs, disjoint) = event_xs(chains)?;
    let mut out = BTreeSet::new();
    for w in xs.windows(2) {
        let m = mid(&w[0], &w[1]);
        let mut active: Vec<(Rational, usize)> = chains
            .iter()
            .enumerate()
            .filter_map(|(i, c)| y_at(c, &m).map(|y| (y, i)))
            .collect();
        active.sort();
        for pair in active.windows(2) {
            let (i, j) = (pair[0].1, pair[1].1);
            if disjoint[i][j] {
                let (a, b) = (chains[i].id(), chains[j].id());
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    Ok(out)
}

/// A vertical wall of a cell: its x-coordinate and the open y-interval it
/// bounds (`None` for an unbounded end).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub x: Rational,
    pub y_lo: Option<Rational>,
    pub y_hi: Option<Rational>,
}

/// A generalized trapezoid: chain floor and ceiling (`None` when open)
/// between two vertical walls (`None` when unbounded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trapezoid {
    pub left: Option<Wall>,
    pub right: Option<Wall>,
    pub bottom: Option<u64>,
    pub top: Option<u64>,
}

/// Floor and ceiling of a strip, as indices into the defining chains.
type Strip = (Option<usize>, Option<usize>);

/// Vertical decomposition induced by a set of x-monotone chains.
#[derive(Debug, Clone)]
pub struct Partition {
    pub cells: Vec<Trapezoid>,
    pub defining: Vec<u64>,
    chains: Vec<PolyChain>,
    /// Distinct x-coordinates carrying walls. Slab `k` lies between
    /// `xs[k - 1]` and `xs[k]`.
    xs: Vec<Rational>,
    strips: Vec<Vec<Strip>>,
    strip_cell: Vec<Vec<usize>>,
    /// Whether strip `s` of slab `k` continues across `xs[k]`.
    merged: Vec<Vec<bool>>,
}

fn height(chains: &[PolyChain], i: Option<usize>, x: &Rational) -> Option<Rational> {
    i.map(|i| y_at(&chains[i], x).expect("strip bound spans its slab"))
}

/// `y` lies strictly between the strip's floor and ceiling at `x`.
fn strictly_inside(chains: &[PolyChain], s: &Strip, x: &Rational, y: &Rational) -> bool {
    height(chains, s.0, x).is_none_or(|b| &b < y) && height(chains, s.1, x).is_none_or(|t| y < &t)
}

impl Partition {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Cell whose open interior contains `p`; `None` on a wall or chain.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let k = self.xs.partition_point(|x| x < &p.x);
        let on_line = k < self.xs.len() && self.xs[k] == p.x;
        let s = self.strips[k]
            .iter()
            .position(|s| strictly_inside(&self.chains, s, &p.x, &p.y))?;
        if on_line && !self.merged[k][s] {
            return None;
        }
        Some(self.strip_cell[k][s])
    }

    /// Open x-range of a cell.
    fn x_range(&self, cell: usize) -> (Option<&Rational>, Option<&Rational>) {
        let t = &self.cells[cell];
        (t.left.as_ref().map(|w| &w.x), t.right.as_ref().map(|w| &w.x))
    }

    fn chain_index(&self, id: Option<u64>) -> Option<usize> {
        id.map(|id| self.defining.iter().position(|&d| d == id).expect("cell bound is defining"))
    }
}

/// Decomposition obtained by erecting walls up and down from every chain
/// endpoint and every pairwise common point until the first chain hit.
pub fn trapezoidal_partition(defining: &CurveFamily) -> Result<Partition, XmonoError> {
    require_monotone(defining)?;
    let chains = defining.chains.clone();
    let n = chains.len();
    let mut events: Vec<Point> = Vec::new();
    for c in &chains {
        events.push(c.start().clone());
        events.push(c.end().clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            events.extend(meet(&chains[i], &chains[j])?);
        }
    }
    events.sort();
    events.dedup();
    let mut xs: Vec<Rational> = events.iter().map(|p| p.x.clone()).collect();
    xs.dedup();

    let mut strips: Vec<Vec<Strip>> = Vec::with_capacity(xs.len() + 1);
    for k in 0..=xs.len() {
        let mut order: Vec<usize> = Vec::new();
        if k > 0 && k < xs.len() {
            let m = mid(&xs[k - 1], &xs[k]);
            let mut act: Vec<(Rational, usize)> = (0..n)
                .filter_map(|i| {
                    let c = &chains[i];
                    (c.start().x <= xs[k - 1] && c.end().x >= xs[k]).then(|| (y_at(c, &m).expect("active"), i))
                })
                .collect();
            act.sort();
            order = act.into_iter().map(|(_, i)| i).collect();
        }
        let mut row = Vec::with_capacity(order.len() + 1);
        let mut below = None;
        for &i in &order {
            row.push((below, Some(i)));
            below = Some(i);
        }
        row.push((below, None));
        strips.push(row);
    }

    let mut cells: Vec<Trapezoid> = Vec::new();
    let mut last_slab: Vec<usize> = Vec::new();
    let mut strip_cell: Vec<Vec<usize>> = Vec::with_capacity(strips.len());
    let mut merged: Vec<Vec<bool>> = Vec::with_capacity(strips.len());
    let mut ev = 0;
    for k in 0..strips.len() {
        let mut row_cells = Vec::with_capacity(strips[k].len());
        for s in &strips[k] {
            let from_left = if k == 0 {
                None
            } else {
                let prev = strips[k - 1].iter().position(|t| t == s);
                prev.filter(|&q| merged[k - 1][q]).map(|q| strip_cell[k - 1][q])
            };
            let cell = match from_left {
                Some(c) => c,
                None => {
                    let left = (k > 0).then(|| {
                        let x = xs[k - 1].clone();
                        Wall {
                            y_lo: height(&chains, s.0, &x),
                            y_hi: height(&chains, s.1, &x),
                            x,
                        }
                    });
                    cells.push(Trapezoid {
                        left,
                        right: None,
                        bottom: s.0.map(|i| chains[i].id()),
                        top: s.1.map(|i| chains[i].id()),
                    });
                    last_slab.push(k);
                    cells.len() - 1
                }
            };
            last_slab[cell] = k;
            row_cells.push(cell);
        }
        strip_cell.push(row_cells);
        // Which strips continue across the next wall line.
        let mut row_merged = vec![false; strips[k].len()];
        if k < xs.len() {
            let x = &xs[k];
            let start = ev;
            while ev < events.len() && &events[ev].x == x {
                ev += 1;
            }
            let ys: Vec<&Rational> = events[start..ev].iter().map(|p| &p.y).collect();
            for (s, flag) in strips[k].iter().zip(row_merged.iter_mut()) {
                let b = height(&chains, s.0, x);
                let t = height(&chains, s.1, x);
                *flag = !ys
                    .iter()
                    .any(|y| b.as_ref().is_none_or(|b| b <= *y) && t.as_ref().is_none_or(|t| *y <= t));
            }
        }
        merged.push(row_merged);
    }
    for (cell, &k) in last_slab.iter().enumerate() {
        if k < xs.len() {
            let x = xs[k].clone();
            let t = &cells[cell];
            let idx = |id: Option<u64>| id.map(|id| chains.iter().position(|c| c.id() == id).expect("bound"));
            let (b, tp) = (idx(t.bottom), idx(t.top));
            cells[cell].right = Some(Wall {
                y_lo: height(&chains, b, &x),
                y_hi: height(&chains, tp, &x),
                x,
            });
        }
    }
    Ok(Partition {
        cells,
        defining: chains.iter().map(|c| c.id()).collect(),
        chains,
        xs,
        strips,
        strip_cell,
        merged,
    })
}

/// Chains meeting the open interior of one cell, split by whether an
/// endpoint lies inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellStats {
    pub cell: usize,
    /// No endpoint inside the cell.
    pub long: Vec<u64>,
    /// At least one endpoint inside the cell.
    pub short: Vec<u64>,
}

impl CellStats {
    pub fn load(&self) -> usize {
        self.long.len() + self.short.len()
    }
}

/// x-coordinates of common points, keyed by the ordered id pair.
type PairTable = HashMap<(u64, u64), Vec<Rational>>;

fn pair_key(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

fn insert_pair(table: &mut PairTable, a: &PolyChain, b: &PolyChain) -> Result<(), XmonoError> {
    let key = pair_key(a.id(), b.id());
    if let std::collections::hash_map::Entry::Vacant(slot) = table.entry(key) {
        slot.insert(meet(a, b)?.into_iter().map(|p| p.x).collect());
    }
    Ok(())
}

fn vertex_xs_in<'a>(c: &'a PolyChain, lo: &Rational, hi: &Rational) -> impl Iterator<Item = &'a Rational> {
    let v = c.vertices();
    let a = v.partition_point(|p| &p.x <= lo);
    let b = v.partition_point(|p| &p.x < hi);
    v[a..b.max(a)].iter().map(|p| &p.x)
}

/// `Some(short)` when `c` meets the open cell bounded by floor `b`,
/// ceiling `t` and x-range `(l, r)`.
fn meets_cell(
    c: &PolyChain,
    b: Option<&PolyChain>,
    t: Option<&PolyChain>,
    l: Option<&Rational>,
    r: Option<&Rational>,
    table: &PairTable,
) -> Option<bool> {
    let lo = match l {
        Some(l) if l > &c.start().x => l,
        _ => &c.start().x,
    };
    let hi = match r {
        Some(r) if r < &c.end().x => r,
        _ => &c.end().x,
    };
    if lo >= hi {
        return None;
    }
    let inside = |x: &Rational, y: &Rational| {
        b.is_none_or(|b| &y_at(b, x).expect("floor spans cell") < y)
            && t.is_none_or(|t| y < &y_at(t, x).expect("ceiling spans cell"))
    };
    let mut bps: Vec<&Rational> = vec![lo, hi];
    bps.extend(vertex_xs_in(c, lo, hi));
    for bound in [b, t].into_iter().flatten() {
        bps.extend(vertex_xs_in(bound, lo, hi));
        let xs = &table[&pair_key(c.id(), bound.id())];
        bps.extend(xs.iter().filter(|x| *x > lo && *x < hi));
    }
    bps.sort();
    bps.dedup();
    let hit = bps.windows(2).any(|w| {
        let m = mid(w[0], w[1]);
        inside(&m, &y_at(c, &m).expect("inside range"))
    });
    if !hit {
        return None;
    }
    let strictly_between = |x: &Rational| l.is_none_or(|l| l < x) && r.is_none_or(|r| x < r);
    let short = [c.start(), c.end()]
        .into_iter()
        .any(|e| strictly_between(&e.x) && inside(&e.x, &e.y));
    Some(short)
}

fn stats_with(p: &Partition, f: &CurveFamily, table: &PairTable) -> Vec<CellStats> {
    let defining: BTreeSet<u64> = p.defining.iter().copied().collect();
    // Defining chains lie on cell boundaries and never meet an interior.
    let others: Vec<&PolyChain> = f.chains.iter().filter(|c| !defining.contains(&c.id())).collect();
    (0..p.cells.len())
        .map(|cell| {
            let t = &p.cells[cell];
            let b = p.chain_index(t.bottom).map(|i| &p.chains[i]);
            let tp = p.chain_index(t.top).map(|i| &p.chains[i]);
            let (l, r) = p.x_range(cell);
            let mut long = Vec::new();
            let mut short = Vec::new();
            for c in &others {
                match meets_cell(c, b, tp, l, r, table) {
                    Some(true) => short.push(c.id()),
                    Some(false) => long.push(c.id()),
                    None => {}
                }
            }
            long.sort_unstable();
            short.sort_unstable();
            CellStats { cell, long, short }
        })
        .collect()
}

/// Per-cell long and short chains of `f`. Chains of `f` whose id is a
/// defining id are taken to be those defining chains.
pub fn cell_stats(p: &Partition, f: &CurveFamily) -> Result<Vec<CellStats>, XmonoError> {
    require_monotone(f)?;
    let mut table = PairTable::new();
    let defining: BTreeSet<u64> = p.defining.iter().copied().collect();
    for c in f.chains.iter().filter(|c| !defining.contains(&c.id())) {
        for d in &p.chains {
            insert_pair(&mut table, c, d)?;
        }
    }
    Ok(stats_with(p, f, &table))
}

/// Settings for [`cutting_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingParams {
    pub r: u64,
    /// Allowed cells per `r²`.
    pub c_max: u64,
    pub seed: u64,
    pub tries: u32,
    /// Sample size is `sample_factor · r`, capped at the family size.
    pub sample_factor: u64,
}

impl CuttingParams {
    pub fn new(r: u64, c_max: u64, seed: u64, tries: u32) -> Self {
        CuttingParams {
            r,
            c_max,
            seed,
            tries,
            sample_factor: 4,
        }
    }
}

/// A verified cutting.
#[derive(Debug, Clone)]
pub struct Cutting {
    pub subset: Vec<u64>,
    pub partition: Partition,
    pub stats: Vec<CellStats>,
    pub max_load: usize,
    /// Index of the successful try.
    pub attempt: u32,
}

/// Random-sample-and-verify search for a subset whose partition has at
/// most `c_max·r²` cells, each met by at most `n/r` chains of `f`.
pub fn cutting_search(f: &CurveFamily, params: &CuttingParams) -> Result<Cutting, XmonoError> {
    require_monotone(f)?;
    let n = f.chains.len();
    if n == 0 {
        return Err(XmonoError::BadParameter("family is empty"));
    }
    if params.r == 0 {
        return Err(XmonoError::BadParameter("r must be positive"));
    }
    let r = params.r;
    let mut table = PairTable::new();
    for i in 0..n {
        for j in i + 1..n {
            insert_pair(&mut table, &f.chains[i], &f.chains[j])?;
        }
    }
    let size = (params.sample_factor.saturating_mul(r)).min(n as u64) as usize;
    let cell_cap = params.c_max.saturating_mul(r.saturating_mul(r));
    let mut best = (usize::MAX, usize::MAX);
    let mut evaluate = |subset: Vec<u64>, attempt: u32| -> Result<Option<Cutting>, XmonoError> {
        let partition = trapezoidal_partition(&f.restrict(&subset))?;
        let stats = stats_with(&partition, f, &table);
        let max_load = stats.iter().map(CellStats::load).max().unwrap_or(0);
        let cells = partition.cell_count();
        if (cells as u64) <= cell_cap && (max_load as u64).saturating_mul(r) <= n as u64 {
            return Ok(Some(Cutting {
                subset,
                partition,
                stats,
                max_load,
                attempt,
            }));
        }
        if (max_load, cells) < (best.1, best.0) {
            best = (cells, max_load);
        }
        Ok(None)
    };
    if r == 1 {
        if let Some(c) = evaluate(Vec::new(), 0)? {
            return Ok(c);
        }
    }
    if size == n {
        if let Some(c) = evaluate(f.ids(), 0)? {
            return Ok(c);
        }
        return Err(XmonoError::Exhausted {
            tries: 1,
            best_cells: best.0,
            best_load: best.1,
        });
    }
    for t in 0..params.tries {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(u64::from(t));
        let mut idx = sample(&mut rng, n, size).into_vec();
        idx.sort_unstable();
        let subset = idx.into_iter().map(|i| f.chains[i].id()).collect();
        if let Some(c) = evaluate(subset, t)? {
            return Ok(c);
        }
    }
    Err(XmonoError::Exhausted {
        tries: params.tries,
        best_cells: best.0,
        best_load: best.1,
    })
}

/// Direction of the steep edges added by [`biinfinite_extend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendMode {
    /// Both added edges climb away from the chain.
    Above,
    /// Both added edges fall away from the chain.
    Below,
}

/// Extends every chain to the window (the declared one, or the vertex
/// x-range widened by one on each side) with edges steeper than any
/// existing edge. The slope is also large enough that an added edge clears
/// the vertical extent of the family before reaching the next vertex
/// abscissa.
pub fn biinfinite_extend(f: &CurveFamily, modes: &[ExtendMode]) -> Result<CurveFamily, XmonoError> {
    require_monotone(f)?;
    if modes.len() != f.chains.len() {
        return Err(XmonoError::ModeCount {
            got: modes.len(),
            want: f.chains.len(),
        });
    }
    let flags = FamilyFlags {
        x_monotone: true,
        bi_infinite: true,
        ..FamilyFlags::default()
    };
    let verts: Vec<&Point> = f.chains.iter().flat_map(|c| c.vertices().iter()).collect();
    if verts.is_empty() {
        return Ok(CurveFamily { flags, ..f.clone() });
    }
    let min_x = verts.iter().map(|p| &p.x).min().expect("nonempty");
    let max_x = verts.iter().map(|p| &p.x).max().expect("nonempty");
    let (lo, hi) = match &f.window {
        Some(w) => w.clone(),
        None => (min_x - int(1), max_x + int(1)),
    };
    if let Some(c) = f.chains.iter().find(|c| c.start().x < lo || c.end().x > hi) {
        return Err(XmonoError::ShortOfWindow(c.id()));
    }
    let min_y = verts.iter().map(|p| &p.y).min().expect("nonempty");
    let max_y = verts.iter().map(|p| &p.y).max().expect("nonempty");
    let span = max_y - min_y + int(1);
    let mut xs: Vec<&Rational> = verts.iter().map(|p| &p.x).collect();
    xs.sort();
    xs.dedup();
    let min_dx = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .expect("chains have two distinct abscissas");
    let max_slope = f
        .chains
        .iter()
        .flat_map(|c| c.vertices().windows(2).map(|w| ((&w[1].y - &w[0].y) / (&w[1].x - &w[0].x)).abs()))
        .max()
        .expect("nonempty");
    let bound = std::cmp::max(max_slope + Rational::one(), span * int(2) / min_dx);
    let steep = bound.ceil();
    let mut chains = Vec::with_capacity(f.chains.len());
    for (c, mode) in f.chains.iter().zip(modes) {
        let s = match mode {
            ExtendMode::Above => steep.clone(),
            ExtendMode::Below => -steep.clone(),
        };
        let mut v = Vec::with_capacity(c.vertices().len() + 2);
        let (a, z) = (c.start(), c.end());
        if a.x > lo {
            v.push(Point::new(lo.clone(), &a.y + &s * (&a.x - &lo)));
        }
        v.extend(c.vertices().iter().cloned());
        if z.x < hi {
            v.push(Point::new(hi.clone(), &z.y + &s * (&hi - &z.x)));
        }
        chains.push(PolyChain::new(c.id(), v).expect("extension keeps a valid chain"));
    }
    let mut out = CurveFamily::new(chains).expect("ids unchanged");
    out.window = Some((lo, hi));
    out.flags = flags;
    out.seed = f.seed;
    out.ground = None;
    Ok(out)
}
