//! Bipartite-graph toolkit: degree splitting and pruning, K₂,₁ and K₂,₂
//! double counting, sparse sub-bineighborhood checks, bad 4-tuples, the
//! H⁺ extension, small-pattern containment and the reverse-order test for
//! families of linear orders.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::{classify_pair, ContactKind, CurveFamily, TangencyType};
use crate::exact_geom::{int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is out of range")]
    OutOfRange(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph has no vertices")]
    NoVertices,
    #[error("graph has no edges")]
    NoEdges,
    #[error("pattern has {0} vertices, more than the supported 10")]
    PatternTooLarge(usize),
    #[error("the two counting formulas disagree: {0} vs {1}")]
    Inconsistent(u64, u64),
    #[error("parameter out of range: {0}")]
    BadParameter(&'static str),
    #[error("chains {0} and {1} do not form a valid contact")]
    BadContact(u64, u64),
}

/// One of the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// A vertex, named by side and index within the side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    A(usize),
    B(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::A(i) => write!(f, "a{i}"),
            Vertex::B(i) => write!(f, "b{i}"),
        }
    }
}

/// Simple bipartite graph with sorted adjacency lists on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    adj_a: Vec<Vec<usize>>,
    adj_b: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from `(a, b)` pairs; duplicates are rejected.
    pub fn new(na: usize, nb: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut adj_a = vec![Vec::new(); na];
        let mut adj_b = vec![Vec::new(); nb];
        for (a, b) in edges {
            if a >= na || b >= nb {
                return Err(GraphError::OutOfRange(a, b));
            }
            adj_a[a].push(b);
            adj_b[b].push(a);
        }
        for (a, list) in adj_a.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(a, w[0]));
            }
        }
        for list in &mut adj_b {
            list.sort_unstable();
        }
        Ok(BipartiteGraph { adj_a, adj_b })
    }

    pub fn complete(na: usize, nb: usize) -> Self {
        Self::new(na, nb, (0..na).flat_map(|a| (0..nb).map(move |b| (a, b)))).expect("simple")
    }

    pub fn na(&self) -> usize {
        self.adj_a.len()
    }

    pub fn nb(&self) -> usize {
        self.adj_b.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.na() + self.nb()
    }

    pub fn edge_count(&self) -> usize {
        self.adj_a.iter().map(Vec::len).sum()
    }

    pub fn neighbors_a(&self, a: usize) -> &[usize] {
        &self.adj_a[a]
    }

    pub fn neighbors_b(&self, b: usize) -> &[usize] {
        &self.adj_b[b]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        match v {
            Vertex::A(a) => self.adj_a[a].len(),
            Vertex::B(b) => self.adj_b[b].len(),
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj_a[a].binary_search(&b).is_ok()
    }

    /// All edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj_a
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.na()).map(Vertex::A).chain((0..self.nb()).map(Vertex::B))
    }

    /// The same graph with the sides exchanged.
    pub fn swapped(&self) -> BipartiteGraph {
        BipartiteGraph {
            adj_a: self.adj_b.clone(),
            adj_b: self.adj_a.clone(),
        }
    }

    fn side(&self, s: Side) -> (&[Vec<usize>], &[Vec<usize>]) {
        match s {
            Side::A => (&self.adj_a, &self.adj_b),
            Side::B => (&self.adj_b, &self.adj_a),
        }
    }
}

fn common_count(x: &[usize], y: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Exact average degree `2|E| / |V|`.
pub fn avg_degree(g: &BipartiteGraph) -> Result<Rational, GraphError> {
    if g.vertex_count() == 0 {
        return Err(GraphError::NoVertices);
    }
    Ok(Rational::new(
        BigInt::from(2 * g.edge_count()),
        BigInt::from(g.vertex_count()),
    ))
}

/// A split graph with the original vertex behind every new vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularized {
    pub graph: BipartiteGraph,
    pub origin_a: Vec<usize>,
    pub origin_b: Vec<usize>,
}

/// Copy index of each neighbour slot, per vertex, plus the copies' origins.
fn split_side(adj: &[Vec<usize>], d: usize) -> (Vec<usize>, Vec<usize>) {
    let mut base = Vec::with_capacity(adj.len());
    let mut origin = Vec::new();
    for (v, list) in adj.iter().enumerate() {
        base.push(origin.len());
        let copies = list.len().div_ceil(d).max(1);
        origin.extend(std::iter::repeat_n(v, copies));
    }
    (base, origin)
}

/// Splits every vertex of degree above `d` into copies of degree `d` plus
/// one remainder copy, handing out neighbours in ascending-id chunks.
pub fn near_regularize(g: &BipartiteGraph, d: usize) -> Result<Regularized, GraphError> {
    if d == 0 {
        return Err(GraphError::BadParameter("d must be positive"));
    }
    let (base_a, origin_a) = split_side(&g.adj_a, d);
    let (base_b, origin_b) = split_side(&g.adj_b, d);
    let mut edges = Vec::with_capacity(g.edge_count());
    for (a, list) in g.adj_a.iter().enumerate() {
        for (i, &b) in list.iter().enumerate() {
            let j = g.adj_b[b].binary_search(&a).expect("symmetric adjacency");
            edges.push((base_a[a] + i / d, base_b[b] + j / d));
        }
    }
    let graph = BipartiteGraph::new(origin_a.len(), origin_b.len(), edges)?;
    Ok(Regularized {
        graph,
        origin_a,
        origin_b,
    })
}

/// A pruned graph with the surviving original indices, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pruned {
    pub graph: BipartiteGraph,
    pub kept_a: Vec<usize>,
    pub kept_b: Vec<usize>,
}

/// Repeatedly deletes vertices of degree below `t`.
pub fn prune_min_degree(g: &BipartiteGraph, t: &Rational) -> Result<Pruned, GraphError> {
    let order: Vec<Vertex> = g.vertices().collect();
    prune_min_degree_in_order(g, t, &order)
}

/// [`prune_min_degree`] examining vertices first in the given order. The
/// result does not depend on the order.
pub fn prune_min_degree_in_order(g: &BipartiteGraph, t: &Rational, order: &[Vertex]) -> Result<Pruned, GraphError> {
    if t.is_negative() {
        return Err(GraphError::BadParameter("threshold must be nonnegative"));
    }
    let mut deg_a: Vec<usize> = g.adj_a.iter().map(Vec::len).collect();
    let mut deg_b: Vec<usize> = g.adj_b.iter().map(Vec::len).collect();
    let mut gone_a = vec![false; g.na()];
    let mut gone_b = vec![false; g.nb()];
    let low = |d: usize| &Rational::from_integer(BigInt::from(d)) < t;
    let mut queue: VecDeque<Vertex> = order.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        match v {
            Vertex::A(a) => {
                if gone_a[a] || !low(deg_a[a]) {
                    continue;
                }
                gone_a[a] = true;
                for &b in &g.adj_a[a] {
                    if !gone_b[b] {
                        deg_b[b] -= 1;
                        queue.push_back(Vertex::B(b));
                    }
                }
            }
            Vertex::B(b) => {
                if gone_b[b] || !low(deg_b[b]) {
                    continue;
                }
                gone_b[b] = true;
                for &a in &g.adj_b[b] {
                    if !gone_a[a] {
                        deg_a[a] -= 1;
                        queue.push_back(Vertex::A(a));
                    }
                }
            }
        }
    }
    let kept_a: Vec<usize> = (0..g.na()).filter(|&a| !gone_a[a]).collect();
    let kept_b: Vec<usize> = (0..g.nb()).filter(|&b| !gone_b[b]).collect();
    let mut new_b = vec![usize::MAX; g.nb()];
    for (i, &b) in kept_b.iter().enumerate() {
        new_b[b] = i;
    }
    let edges = kept_a.iter().enumerate().flat_map(|(i, &a)| {
        let new_b = &new_b;
        g.adj_a[a].iter().filter(|&&b| !gone_b[b]).map(move |&b| (i, new_b[b]))
    });
    let graph = BipartiteGraph::new(kept_a.len(), kept_b.len(), edges.collect::<Vec<_>>())?;
    Ok(Pruned { graph, kept_a, kept_b })
}

/// Paths of length two whose ends lie on `side`, counted once through
/// common neighbourhoods of end pairs and once through the degrees of the
/// middle vertices.
pub fn count_k21(g: &BipartiteGraph, side: Side) -> Result<u64, GraphError> {
    let (ends, middles) = g.side(side);
    let mut by_pairs = 0u64;
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            by_pairs += common_count(&ends[i], &ends[j]) as u64;
        }
    }
    let by_degrees: u64 = middles.iter().map(|l| choose2(l.len() as u64)).sum();
    if by_pairs != by_degrees {
        return Err(GraphError::Inconsistent(by_pairs, by_degrees));
    }
    Ok(by_pairs)
}

/// How [`count_k22`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum K22Method {
    /// Sum over pairs on side A of C(common neighbours, 2).
    Pairs,
    /// A quarter of the cross edges inside each edge's bineighborhood.
    Edges,
}

pub fn count_k22(g: &BipartiteGraph, method: K22Method) -> u64 {
    match method {
        K22Method::Pairs => {
            let mut total = 0u64;
            for i in 0..g.na() {
                for j in i + 1..g.na() {
                    total += choose2(common_count(&g.adj_a[i], &g.adj_a[j]) as u64);
                }
            }
            total
        }
        K22Method::Edges => {
            let mut total = 0u64;
            for (a, nb_a) in g.adj_a.iter().enumerate() {
                for &b in nb_a {
                    for &a2 in g.adj_b[b].iter().filter(|&&x| x != a) {
                        // Common neighbours of a and a2 other than b.
                        total += common_count(nb_a, &g.adj_a[a2]) as u64 - 1;
                    }
                }
            }
            debug_assert_eq!(total % 4, 0);
            total / 4
        }
    }
}

/// Budget `f(x) = q·x^e` with `q, e ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsenessBudget {
    pub q: Rational,
    pub e: Rational,
}

impl SparsenessBudget {
    pub fn new(q: Rational, e: Rational) -> Result<Self, GraphError> {
        if q.is_negative() || e.is_negative() {
            return Err(GraphError::BadParameter("budget needs q >= 0 and e >= 0"));
        }
        Ok(SparsenessBudget { q, e })
    }

    /// Sign of `edges − f(size)`, exactly.
    pub fn compare(&self, edges: u64, size: u64) -> Ordering {
        // edges^b · den(q)^b  vs  num(q)^b · size^a, where e = a/b.
        let a = self.e.numer().to_u32().expect("exponent numerator fits u32");
        let b = self.e.denom().to_u32().expect("exponent denominator fits u32");
        let lhs = num_traits::pow(BigInt::from(edges), b as usize) * num_traits::pow(self.q.denom().clone(), b as usize);
        let rhs = num_traits::pow(self.q.numer().clone(), b as usize) * num_traits::pow(BigInt::from(size), a as usize);
        lhs.cmp(&rhs)
    }

    /// `f(size)` exactly, when the exponent is an integer.
    pub fn exact(&self, size: u64) -> Option<Rational> {
        self.e.is_integer().then(|| {
            let p = self.e.to_integer().to_usize().expect("small exponent");
            &self.q * Rational::from_integer(num_traits::pow(BigInt::from(size), p))
        })
    }

    pub fn approx(&self, size: u64) -> f64 {
        to_f64(&self.q) * (size as f64).powf(to_f64(&self.e))
    }

    fn slack(&self, edges: u64, size: u64) -> Slack {
        let exact = self.exact(size).map(|f| int(edges as i64) - f);
        let value = match &exact {
            Some(r) => to_f64(r),
            None => edges as f64 - self.approx(size),
        };
        Slack {
            edges,
            size,
            sign: self.compare(edges, size),
            value,
            exact,
        }
    }
}

/// `edges − f(size)` for one sub-bineighborhood (or one bound on it).
/// The sign is always exact; the value is exact only for integer exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Slack {
    pub edges: u64,
    pub size: u64,
    pub sign: Ordering,
    pub value: f64,
    pub exact: Option<Rational>,
}

impl Slack {
    fn rank(&self, other: &Slack) -> Ordering {
        self.sign
            .cmp(&other.sign)
            .then(self.value.partial_cmp(&other.value).unwrap_or(Ordering::Equal))
    }
}

fn worse(best: Option<Slack>, cand: Slack) -> Option<Slack> {
    match best {
        Some(b) if b.rank(&cand) != Ordering::Less => Some(b),
        _ => Some(cand),
    }
}

/// How a worst slack was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlackMode {
    /// Maximum over every admissible pair.
    Exhaustive,
    /// An upper bound from `min(|U|·|V|, all cross edges)`, shown to stay
    /// within budget; the reported slack is that bound.
    Bounded,
    /// Maximum over random admissible pairs: a lower bound only.
    Sampled,
}

impl SlackMode {
    pub fn name(self) -> &'static str {
        match self {
            SlackMode::Exhaustive => "exhaustive",
            SlackMode::Bounded => "bounded",
            SlackMode::Sampled => "sampled",
        }
    }
}

/// Work limits for sub-bineighborhood scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    /// Largest smaller-side size searched exhaustively.
    pub limit: usize,
    pub samples: usize,
    pub seed: u64,
    /// Try the `min(|U|·|V|, all cross edges)` bound before searching.
    pub use_bound: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            limit: 16,
            samples: 100_000,
            seed: 0,
            use_bound: true,
        }
    }
}

/// Worst slack over the sub-bineighborhoods of one vertex pair; `None`
/// when no admissible pair exists.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSlack {
    pub u: Vertex,
    pub v: Vertex,
    pub worst: Option<Slack>,
    pub mode: SlackMode,
}

/// Max over disjoint `U ⊆ N(u)∖{v}`, `V ⊆ N(v)∖{u}`, not both empty, of
/// `|E(U, V)| − f(|U| + |V|)`.
pub fn sub_bineighborhood_violation(
    g: &BipartiteGraph,
    u: Vertex,
    v: Vertex,
    f: &SparsenessBudget,
    opts: &ScanOptions,
) -> Result<PairSlack, GraphError> {
    if u == v {
        return Err(GraphError::BadParameter("u and v must differ"));
    }
    let restricted = |x: Vertex, other: Vertex| -> Vec<usize> {
        let (list, skip) = match (x, other) {
            (Vertex::A(a), Vertex::B(b)) => (&g.adj_a[a], Some(b)),
            (Vertex::B(b), Vertex::A(a)) => (&g.adj_b[b], Some(a)),
            (Vertex::A(a), _) => (&g.adj_a[a], None),
            (Vertex::B(b), _) => (&g.adj_b[b], None),
        };
        list.iter().copied().filter(|&w| Some(w) != skip).collect()
    };
    let xs = restricted(u, v);
    let ys = restricted(v, u);
    let done = |worst, mode| Ok(PairSlack { u, v, worst, mode });
    if xs.is_empty() && ys.is_empty() {
        return done(None, SlackMode::Exhaustive);
    }
    let cross_sides = matches!((u, v), (Vertex::A(_), Vertex::B(_)) | (Vertex::B(_), Vertex::A(_)));
    if !cross_sides {
        // Both sets lie on one side, so no cross edge is possible.
        return done(Some(f.slack(0, 1)), SlackMode::Exhaustive);
    }
    // Orient so that `xs ⊆ B` and `ys ⊆ A`.
    let (xs, ys) = match u {
        Vertex::A(_) => (xs, ys),
        Vertex::B(_) => (ys, xs),
    };
    let (small, large, small_in_a) = if ys.len() <= xs.len() { (&ys, &xs, true) } else { (&xs, &ys, false) };
    let adjacent = |s: usize, l: usize| if small_in_a { g.has_edge(s, l) } else { g.has_edge(l, s) };
    let total_edges: u64 = small
        .iter()
        .map(|&s| large.iter().filter(|&&l| adjacent(s, l)).count() as u64)
        .sum();
    let (p, q) = (small.len() as u64, large.len() as u64);

    let mut bound: Option<Slack> = None;
    let mut certified = true;
    for s in 1..=p + q {
        let lo = s.saturating_sub(q);
        let hi = s.min(p);
        let half = (s / 2).clamp(lo, hi);
        let cap = [half, (s.div_ceil(2)).clamp(lo, hi)]
            .iter()
            .map(|&k| k * (s - k))
            .max()
            .expect("two candidates");
        let slack = f.slack(cap.min(total_edges), s);
        certified &= slack.sign != Ordering::Greater;
        bound = worse(bound, slack);
    }
    if certified && opts.use_bound {
        return done(bound, SlackMode::Bounded);
    }

    if small.len() <= opts.limit.min(30) {
        // Bitmask of small-side neighbours for every large-side vertex.
        let masks: Vec<u32> = large
            .iter()
            .map(|&l| {
                small
                    .iter()
                    .enumerate()
                    .filter(|&(_, &s)| adjacent(s, l))
                    .fold(0u32, |m, (i, _)| m | (1 << i))
            })
            .collect();
        let mut best_by_size = vec![0u64; (p + q + 1) as usize];
        let mut degs = vec![0u32; masks.len()];
        for mask in 0u32..(1u32 << p) {
            for (d, m) in degs.iter_mut().zip(&masks) {
                *d = (m & mask).count_ones();
            }
            degs.sort_unstable_by(|a, b| b.cmp(a));
            let base = u64::from(mask.count_ones());
            let mut acc = 0u64;
            for w in 0..=q as usize {
                if w > 0 {
                    acc += u64::from(degs[w - 1]);
                }
                let s = (base + w as u64) as usize;
                best_by_size[s] = best_by_size[s].max(acc);
            }
        }
        let mut worst = None;
        for (s, &e) in best_by_size.iter().enumerate().skip(1) {
            worst = worse(worst, f.slack(e, s as u64));
        }
        return done(worst, SlackMode::Exhaustive);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = None;
    for _ in 0..opts.samples {
        let pick_small: Vec<usize> = (0..small.len()).filter(|_| rng.random_bool(0.5)).collect();
        let pick_large: Vec<usize> = (0..large.len()).filter(|_| rng.random_bool(0.5)).collect();
        let size = (pick_small.len() + pick_large.len()) as u64;
        if size == 0 {
            continue;
        }
        let edges = pick_small
            .iter()
            .map(|&i| pick_large.iter().filter(|&&j| adjacent(small[i], large[j])).count() as u64)
            .sum();
        worst = worse(worst, f.slack(edges, size));
    }
    done(worst, SlackMode::Sampled)
}

/// Which vertex pairs [`check_f_sparse`] examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    AllPairs,
    Adjacent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// Nothing exceeded the budget, but some pair was only sampled.
    NoViolationFound,
    Fails,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::NoViolationFound => "no violation found",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub scope: Scope,
    pub pairs: Vec<PairSlack>,
    pub verdict: Verdict,
}

impl SparsityReport {
    pub fn worst(&self) -> Option<&PairSlack> {
        self.pairs
            .iter()
            .filter(|p| p.worst.is_some())
            .max_by(|x, y| x.worst.as_ref().expect("some").rank(y.worst.as_ref().expect("some")))
    }
}

pub fn check_f_sparse(
    g: &BipartiteGraph,
    f: &SparsenessBudget,
    scope: Scope,
    opts: &ScanOptions,
) -> Result<SparsityReport, GraphError> {
    let pairs: Vec<(Vertex, Vertex)> = match scope {
        Scope::Adjacent => g.edges().into_iter().map(|(a, b)| (Vertex::A(a), Vertex::B(b))).collect(),
        Scope::AllPairs => {
            let all: Vec<Vertex> = g.vertices().collect();
            (0..all.len())
                .flat_map(|i| (i + 1..all.len()).map(move |j| (i, j)))
                .map(|(i, j)| (all[i], all[j]))
                .collect()
        }
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        out.push(sub_bineighborhood_violation(g, u, v, f, opts)?);
    }
    let fails = out
        .iter()
        .any(|p| p.worst.as_ref().is_some_and(|s| s.sign == Ordering::Greater));
    let sampled = out.iter().any(|p| p.mode == SlackMode::Sampled);
    let verdict = if fails {
        Verdict::Fails
    } else if sampled {
        Verdict::NoViolationFound
    } else {
        Verdict::Holds
    };
    Ok(SparsityReport {
        scope,
        pairs: out,
        verdict,
    })
}

/// Result of scanning `A × B` for bad 4-tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bad4Report {
    /// Pairs `(a, b)` admitting a bad 4-tuple.
    pub bad: Vec<(usize, usize)>,
    pub scanned: usize,
    pub exhaustive: usize,
    pub bounded: usize,
    pub sampled: usize,
    /// True when the pair budget stopped the scan early.
    pub truncated: bool,
}

/// Looks for `(a, b, A', B')` with `B' ⊆ N(a)∖{b}`, `A' ⊆ N(b)∖{a}` and
/// more than `q·(|A'|+|B'|)^c` edges between `A'` and `B'`, over all
/// `(a, b) ∈ A × B`, examining at most `max_pairs` pairs when given.
pub fn bad_4tuple_scan(
    g: &BipartiteGraph,
    q: &Rational,
    c: &Rational,
    opts: &ScanOptions,
    max_pairs: Option<usize>,
) -> Result<Bad4Report, GraphError> {
    if !q.is_positive() {
        return Err(GraphError::BadParameter("q must be positive"));
    }
    if c <= &Rational::one() {
        return Err(GraphError::BadParameter("c must exceed 1"));
    }
    let f = SparsenessBudget::new(q.clone(), c.clone())?;
    let mut report = Bad4Report::default();
    'scan: for a in 0..g.na() {
        for b in 0..g.nb() {
            if max_pairs.is_some_and(|m| report.scanned >= m) {
                report.truncated = true;
                break 'scan;
            }
            let pair_opts = ScanOptions {
                seed: opts.seed ^ ((a as u64) << 32 | b as u64),
                ..opts.clone()
            };
            let r = sub_bineighborhood_violation(g, Vertex::A(a), Vertex::B(b), &f, &pair_opts)?;
            report.scanned += 1;
            match r.mode {
                SlackMode::Exhaustive => report.exhaustive += 1,
                SlackMode::Bounded => report.bounded += 1,
                SlackMode::Sampled => report.sampled += 1,
            }
            if r.worst.is_some_and(|s| s.sign == Ordering::Greater) {
                report.bad.push((a, b));
            }
        }
    }
    Ok(report)
}

/// `H` plus an adjacent pair `a'`, `b'` with `a'` joined to all of side B
/// and `b'` to all of side A. The new vertices get the last indices.
pub fn h_plus(h: &BipartiteGraph) -> Result<BipartiteGraph, GraphError> {
    if h.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let (na, nb) = (h.na(), h.nb());
    let mut edges = h.edges();
    edges.push((na, nb));
    edges.extend((0..nb).map(|b| (na, b)));
    edges.extend((0..na).map(|a| (a, nb)));
    BipartiteGraph::new(na + 1, nb + 1, edges)
}

/// Whether `g` has a subgraph isomorphic to `h`, with sides mapped to
/// sides in either orientation. `h` may have at most 10 vertices.
pub fn contains_subgraph(g: &BipartiteGraph, h: &BipartiteGraph) -> Result<bool, GraphError> {
    if h.vertex_count() > 10 {
        return Err(GraphError::PatternTooLarge(h.vertex_count()));
    }
    Ok(embeds(g, h) || embeds(g, &h.swapped()))
}

fn embeds(g: &BipartiteGraph, h: &BipartiteGraph) -> bool {
    if h.na() > g.na() || h.nb() > g.nb() {
        return false;
    }
    let mut order: Vec<Vertex> = h.vertices().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
    let mut map_a = vec![usize::MAX; h.na()];
    let mut map_b = vec![usize::MAX; h.nb()];
    let mut used_a = vec![false; g.na()];
    let mut used_b = vec![false; g.nb()];

    struct Search<'a> {
        g: &'a BipartiteGraph,
        h: &'a BipartiteGraph,
        order: &'a [Vertex],
    }
    fn go(
        s: &Search<'_>,
        i: usize,
        map_a: &mut [usize],
        map_b: &mut [usize],
        used_a: &mut [bool],
        used_b: &mut [bool],
    ) -> bool {
        let Some(&v) = s.order.get(i) else {
            return true;
        };
        match v {
            Vertex::A(x) => {
                for y in 0..s.g.na() {
                    if used_a[y] {
                        continue;
                    }
                    let fits = s.h.adj_a[x]
                        .iter()
                        .all(|&hb| map_b[hb] == usize::MAX || s.g.has_edge(y, map_b[hb]));
                    if fits {
                        used_a[y] = true;
                        map_a[x] = y;
                        if go(s, i + 1, map_a, map_b, used_a, used_b) {
                            return true;
                        }
                        map_a[x] = usize::MAX;
                        used_a[y] = false;
                    }
                }
            }
            Vertex::B(x) => {
                for y in 0..s.g.nb() {
                    if used_b[y] {
                        continue;
                    }
                    let fits = s.h.adj_b[x]
                        .iter()
                        .all(|&ha| map_a[ha] == usize::MAX || s.g.has_edge(map_a[ha], y));
                    if fits {
                        used_b[y] = true;
                        map_b[x] = y;
                        if go(s, i + 1, map_a, map_b, used_a, used_b) {
                            return true;
                        }
                        map_b[x] = usize::MAX;
                        used_b[y] = false;
                    }
                }
            }
        }
        false
    }
    let s = Search { g, h, order: &order };
    go(&s, 0, &mut map_a, &mut map_b, &mut used_a, &mut used_b)
}

/// Two lists sharing three symbols in the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseWitness {
    pub i: usize,
    pub j: usize,
    pub triple: [u64; 3],
}

/// Checks that no two lists have a common subsequence of length three.
/// Returns the first offending pair of lists with such a triple.
pub fn intersection_reverse_check(lists: &[Vec<u64>]) -> Result<(), ReverseWitness> {
    for i in 0..lists.len() {
        for j in i + 1..lists.len() {
            if let Some(triple) = common_triple(&lists[i], &lists[j]) {
                return Err(ReverseWitness { i, j, triple });
            }
        }
    }
    Ok(())
}

fn common_triple(x: &[u64], y: &[u64]) -> Option<[u64; 3]> {
    let (n, m) = (x.len(), y.len());
    // lcs[i][j]: longest common subsequence of x[i..] and y[j..].
    let mut lcs = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if x[i] == y[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    if lcs[0][0] < 3 {
        return None;
    }
    let mut out = Vec::with_capacity(3);
    let (mut i, mut j) = (0, 0);
    while out.len() < 3 {
        if x[i] == y[j] {
            out.push(x[i]);
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Some([out[0], out[1], out[2]])
}

/// For every chain `b` of `blue`, the ids of `red` chains touching it with
/// the given type (red chain first), ordered along `b`.
pub fn tangency_order_lists(
    red: &CurveFamily,
    blue: &CurveFamily,
    kind: TangencyType,
) -> Result<BTreeMap<u64, Vec<u64>>, GraphError> {
    let mut out = BTreeMap::new();
    for b in &blue.chains {
        let mut hits = Vec::new();
        for a in &red.chains {
            match classify_pair(a, b) {
                ContactKind::Tangency(p, t) => {
                    if t == kind {
                        hits.push((b.position(&p).expect("touch point lies on b"), a.id()));
                    }
                }
                ContactKind::Disjoint | ContactKind::Crossing(_) => {}
                ContactKind::Multi(_) | ContactKind::Degenerate(_) => {
                    return Err(GraphError::BadContact(a.id(), b.id()));
                }
            }
        }
        hits.sort();
        out.insert(b.id(), hits.into_iter().map(|(_, id)| id).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geom::rat;

    fn k22() -> BipartiteGraph {
        BipartiteGraph::complete(2, 2)
    }

    fn path3() -> BipartiteGraph {
        BipartiteGraph::new(2, 1, [(0, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(BipartiteGraph::new(1, 1, [(0, 0), (0, 0)]), Err(GraphError::DuplicateEdge(0, 0)));
        assert_eq!(BipartiteGraph::new(1, 1, [(0, 1)]), Err(GraphError::OutOfRange(0, 1)));
    }

    #[test]
    fn average_degree() {
        assert_eq!(avg_degree(&k22()).unwrap(), int(2));
        assert_eq!(avg_degree(&BipartiteGraph::complete(1, 1)).unwrap(), int(1));
        assert_eq!(avg_degree(&BipartiteGraph::new(3, 2, []).unwrap()).unwrap(), int(0));
        assert_eq!(avg_degree(&BipartiteGraph::new(0, 0, []).unwrap()), Err(GraphError::NoVertices));
    }

    #[test]
    fn splitting() {
        let star = BipartiteGraph::complete(1, 9);
        let r = near_regularize(&star, 3).unwrap();
        assert_eq!(r.graph.vertex_count(), 12);
        assert_eq!(r.graph.edge_count(), 9);
        assert_eq!(r.origin_a, vec![0, 0, 0]);
        assert!((0..3).all(|a| r.graph.degree(Vertex::A(a)) == 3));

        let big = BipartiteGraph::complete(1, 10);
        let r = near_regularize(&big, 3).unwrap();
        let degs: Vec<usize> = (0..r.graph.na()).map(|a| r.graph.degree(Vertex::A(a))).collect();
        assert_eq!(degs, vec![3, 3, 3, 1]);

        let g = k22();
        assert_eq!(near_regularize(&g, 2).unwrap().graph, g);
    }

    #[test]
    fn pruning() {
        let p = prune_min_degree(&path3(), &int(2)).unwrap();
        assert_eq!(p.graph.vertex_count(), 0);
        assert_eq!(prune_min_degree(&k22(), &int(2)).unwrap().graph, k22());
        // C6 as a bipartite graph.
        let c6 = BipartiteGraph::new(3, 3, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)]).unwrap();
        assert_eq!(prune_min_degree(&c6, &int(2)).unwrap().graph, c6);
        assert_eq!(prune_min_degree(&c6, &rat(5, 2)).unwrap().graph.vertex_count(), 0);
    }

    #[test]
    fn k21_counts() {
        assert_eq!(count_k21(&k22(), Side::A).unwrap(), 2);
        // Star with its centre in A: the pairs are the leaves on side B.
        let star = BipartiteGraph::complete(1, 3);
        assert_eq!(count_k21(&star, Side::B).unwrap(), 3);
        assert_eq!(count_k21(&star, Side::A).unwrap(), 0);
        assert_eq!(count_k21(&path3(), Side::A).unwrap(), 1);
    }

    #[test]
    fn k22_counts() {
        for m in [K22Method::Pairs, K22Method::Edges] {
            assert_eq!(count_k22(&k22(), m), 1);
            assert_eq!(count_k22(&BipartiteGraph::complete(3, 3), m), 9);
            assert_eq!(count_k22(&path3(), m), 0);
        }
    }

    #[test]
    fn slack_examples() {
        let opts = ScanOptions::default();
        let linear = SparsenessBudget::new(int(1), int(1)).unwrap();
        let r = sub_bineighborhood_violation(&k22(), Vertex::A(0), Vertex::B(0), &linear, &opts).unwrap();
        assert_eq!(r.worst.unwrap().exact, Some(int(-1)));

        let zero = SparsenessBudget::new(int(0), int(1)).unwrap();
        let k33 = BipartiteGraph::complete(3, 3);
        let r = sub_bineighborhood_violation(&k33, Vertex::A(0), Vertex::B(0), &zero, &opts).unwrap();
        let w = r.worst.unwrap();
        assert_eq!((w.exact, w.size, r.mode), (Some(int(4)), 4, SlackMode::Exhaustive));

        let edge = BipartiteGraph::complete(1, 1);
        let r = sub_bineighborhood_violation(&edge, Vertex::A(0), Vertex::B(0), &zero, &opts).unwrap();
        assert!(r.worst.is_none());
    }

    #[test]
    fn sparse_verdicts() {
        let opts = ScanOptions::default();
        let linear = SparsenessBudget::new(int(1), int(1)).unwrap();
        let c6 = BipartiteGraph::new(3, 3, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)]).unwrap();
        assert_eq!(check_f_sparse(&c6, &linear, Scope::AllPairs, &opts).unwrap().verdict, Verdict::Holds);
        let zero = SparsenessBudget::new(int(0), int(0)).unwrap();
        let k44 = BipartiteGraph::complete(4, 4);
        assert_eq!(check_f_sparse(&k44, &zero, Scope::Adjacent, &opts).unwrap().verdict, Verdict::Fails);
        let empty = BipartiteGraph::new(3, 3, []).unwrap();
        assert_eq!(check_f_sparse(&empty, &zero, Scope::AllPairs, &opts).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn budget_comparison_is_exact() {
        let f = SparsenessBudget::new(int(1), rat(3, 2)).unwrap();
        // 4^{3/2} = 8 exactly.
        assert_eq!(f.compare(8, 4), Ordering::Equal);
        assert_eq!(f.compare(9, 4), Ordering::Greater);
        assert_eq!(f.exact(4), None);
        let sq = SparsenessBudget::new(rat(1, 2), int(2)).unwrap();
        assert_eq!(sq.exact(3), Some(rat(9, 2)));
    }

    #[test]
    fn bad_tuples() {
        let opts = ScanOptions::default();
        let c4 = k22();
        let r = bad_4tuple_scan(&c4, &int(1), &rat(3, 2), &opts, None).unwrap();
        assert!(r.bad.is_empty());
        assert_eq!(r.scanned, 4);
        let k88 = BipartiteGraph::complete(8, 8);
        let r = bad_4tuple_scan(&k88, &rat(1, 100), &rat(3, 2), &opts, None).unwrap();
        assert_eq!(r.bad.len(), 64);
        let r = bad_4tuple_scan(&k88, &rat(1, 100), &rat(3, 2), &opts, Some(5)).unwrap();
        assert!(r.truncated);
        assert!(bad_4tuple_scan(&k88, &int(1), &int(1), &opts, None).is_err());
    }

    #[test]
    fn h_plus_examples() {
        let e = BipartiteGraph::complete(1, 1);
        assert_eq!(h_plus(&e).unwrap(), k22());
        let hp = h_plus(&k22()).unwrap();
        assert_eq!((hp.na(), hp.nb(), hp.edge_count()), (3, 3, 9));
        assert_eq!(h_plus(&BipartiteGraph::new(2, 2, []).unwrap()), Err(GraphError::NoEdges));
    }

    #[test]
    fn containment() {
        assert!(contains_subgraph(&k22(), &k22()).unwrap());
        let tree = BipartiteGraph::new(2, 3, [(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        assert!(!contains_subgraph(&tree, &k22()).unwrap());
        let k33 = BipartiteGraph::complete(3, 3);
        assert!(contains_subgraph(&k33, &h_plus(&BipartiteGraph::complete(1, 1)).unwrap()).unwrap());
        // Only fits with the sides exchanged.
        let star = BipartiteGraph::complete(1, 3);
        assert!(contains_subgraph(&star.swapped(), &star).unwrap());
        assert!(contains_subgraph(&k33, &BipartiteGraph::complete(6, 5)).is_err());
    }

    #[test]
    fn forced_exhaustive_agrees_with_bound() {
        let f = SparsenessBudget::new(int(5000), rat(3, 2)).unwrap();
        let k55 = BipartiteGraph::complete(5, 5);
        let bounded = sub_bineighborhood_violation(&k55, Vertex::A(0), Vertex::B(0), &f, &ScanOptions::default()).unwrap();
        let opts = ScanOptions { use_bound: false, ..ScanOptions::default() };
        let exact = sub_bineighborhood_violation(&k55, Vertex::A(0), Vertex::B(0), &f, &opts).unwrap();
        assert_eq!((bounded.mode, exact.mode), (SlackMode::Bounded, SlackMode::Exhaustive));
        // Complete graphs reach the bound: 4·4 edges at size 8 is the worst.
        assert_eq!(bounded.worst, exact.worst);
    }

    #[test]
    fn order_lists_follow_the_blue_chain() {
        use crate::curves::PolyChain;
        let blue = CurveFamily::new(vec![PolyChain::from_ints(0, &[(0, 0), (10, 0)]).unwrap()]).unwrap();
        let red = CurveFamily::new(vec![
            PolyChain::from_ints(5, &[(3, 1), (2, 0), (1, 1)]).unwrap(),
            PolyChain::from_ints(3, &[(7, 1), (6, 0), (5, 1)]).unwrap(),
            PolyChain::from_ints(9, &[(8, 1), (9, 0), (10, 2)]).unwrap(),
        ])
        .unwrap();
        let ll = tangency_order_lists(&red, &blue, TangencyType::LL).unwrap();
        assert_eq!(ll[&0], vec![5, 3]);
        let rl = tangency_order_lists(&red, &blue, TangencyType::RL).unwrap();
        assert_eq!(rl[&0], vec![9]);
        let none = CurveFamily::new(vec![PolyChain::from_ints(1, &[(0, 5), (1, 5)]).unwrap()]).unwrap();
        assert!(tangency_order_lists(&none, &blue, TangencyType::LL).unwrap()[&0].is_empty());
    }

    #[test]
    fn reverse_check() {
        assert_eq!(
            intersection_reverse_check(&[vec![1, 2, 3], vec![1, 2, 3]]),
            Err(ReverseWitness { i: 0, j: 1, triple: [1, 2, 3] })
        );
        assert_eq!(intersection_reverse_check(&[vec![1, 2, 3], vec![3, 2, 1]]), Ok(()));
        assert_eq!(intersection_reverse_check(&[vec![1, 9, 2, 3], vec![4, 1, 2, 5, 3]]).unwrap_err().triple, [1, 2, 3]);
        assert_eq!(intersection_reverse_check(&[]), Ok(()));
    }
}
