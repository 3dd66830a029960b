//! Brute-force oracles shared by the integration suites. They use only the
//! exact primitives (`y_at`, `intersection_points`, `classify_pair`) and
//! recompute everything else from scratch.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use tangencies::curves::{classify_pair, intersection_points, ContactKind, CurveFamily, PolyChain};
use tangencies::exact_geom::{int, Rational};
use tangencies::extremal_graph::BipartiteGraph;
use tangencies::xmono::{y_at, EnvelopePiece, Partition, Trapezoid};

/// Every vertex abscissa and every pairwise common-point abscissa.
pub fn event_xs(f: &CurveFamily) -> Vec<Rational> {
    let mut xs: Vec<Rational> = f.chains.iter().flat_map(|c| c.vertices().iter().map(|p| p.x.clone())).collect();
    for (i, a) in f.chains.iter().enumerate() {
        for b in &f.chains[i + 1..] {
            xs.extend(intersection_points(a, b).expect("non-degenerate").into_iter().map(|p| p.x));
        }
    }
    xs.sort();
    xs.dedup();
    xs
}

fn lowest_at(f: &CurveFamily, x: &Rational) -> Option<u64> {
    f.chains
        .iter()
        .filter_map(|c| y_at(c, x).map(|y| (y, c.id())))
        .min()
        .map(|(_, id)| id)
}

/// Compares envelope pieces with the pointwise minimum at every midpoint
/// between consecutive events inside the window.
pub fn check_envelope(f: &CurveFamily, pieces: &[EnvelopePiece]) -> Result<usize, String> {
    let (lo, hi) = f.window.clone().ok_or("family has no window")?;
    for w in pieces.windows(2) {
        if w[0].hi != w[1].lo || w[0].id == w[1].id {
            return Err(format!("pieces {:?} and {:?} do not abut as maximal pieces", w[0], w[1]));
        }
    }
    if pieces.first().map(|p| &p.lo) != Some(&lo) || pieces.last().map(|p| &p.hi) != Some(&hi) {
        return Err("pieces do not span the window".into());
    }
    let mut xs: Vec<Rational> = event_xs(f).into_iter().filter(|x| x >= &lo && x <= &hi).collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort();
    xs.dedup();
    let mut checked = 0;
    for w in xs.windows(2) {
        let m = (&w[0] + &w[1]) / int(2);
        let want = lowest_at(f, &m);
        let got = pieces.iter().find(|p| p.lo < m && m < p.hi).map(|p| p.id);
        if want != got {
            return Err(format!("at x = {m}: oracle {want:?}, envelope {got:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Disjoint pairs adjacent in the vertical order at some generic abscissa,
/// sampled at the thirds of every event interval.
pub fn visibility_oracle(f: &CurveFamily) -> BTreeSet<(u64, u64)> {
    let xs = event_xs(f);
    let n = f.chains.len();
    let disjoint: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && classify_pair(&f.chains[i], &f.chains[j]) == ContactKind::Disjoint).collect())
        .collect();
    let mut out = BTreeSet::new();
    for w in xs.windows(2) {
        for t in [1, 2] {
            let x = &w[0] + (&w[1] - &w[0]) * Rational::new(t.into(), 3.into());
            let mut column: Vec<(Rational, usize)> = (0..n).filter_map(|i| y_at(&f.chains[i], &x).map(|y| (y, i))).collect();
            column.sort();
            for p in column.windows(2) {
                let (i, j) = (p[0].1, p[1].1);
                if disjoint[i][j] {
                    let (a, b) = (f.chains[i].id(), f.chains[j].id());
                    out.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    out
}

pub fn strictly_inside(cell: &Trapezoid, floor: Option<&PolyChain>, roof: Option<&PolyChain>, x: &Rational, y: &Rational) -> bool {
    let in_x = cell.left.as_ref().is_none_or(|w| &w.x < x) && cell.right.as_ref().is_none_or(|w| x < &w.x);
    in_x && floor.is_none_or(|c| &y_at(c, x).expect("floor spans cell") < y)
        && roof.is_none_or(|c| y < &y_at(c, x).expect("roof spans cell"))
}

/// `(meets the open cell, has an endpoint inside it)` for one chain.
pub fn chain_vs_cell(f: &CurveFamily, cell: &Trapezoid, c: &PolyChain) -> (bool, bool) {
    let floor = cell.bottom.map(|id| f.get(id).expect("floor in family"));
    let roof = cell.top.map(|id| f.get(id).expect("roof in family"));
    let mut lo = c.start().x.clone();
    let mut hi = c.end().x.clone();
    if let Some(w) = &cell.left {
        lo = lo.max(w.x.clone());
    }
    if let Some(w) = &cell.right {
        hi = hi.min(w.x.clone());
    }
    let endpoint_inside = [c.start(), c.end()]
        .iter()
        .any(|p| strictly_inside(cell, floor, roof, &p.x, &p.y));
    if lo >= hi {
        return (false, endpoint_inside);
    }
    let mut cuts: Vec<Rational> = vec![lo.clone(), hi.clone()];
    for g in [Some(c), floor, roof].into_iter().flatten() {
        cuts.extend(g.vertices().iter().map(|p| p.x.clone()));
    }
    for g in [floor, roof].into_iter().flatten() {
        if g.id() != c.id() {
            cuts.extend(intersection_points(c, g).expect("non-degenerate").into_iter().map(|p| p.x));
        }
    }
    cuts.retain(|x| x >= &lo && x <= &hi);
    cuts.sort();
    cuts.dedup();
    let meets = cuts.windows(2).any(|w| {
        let m = (&w[0] + &w[1]) / int(2);
        let y = y_at(c, &m).expect("inside chain range");
        strictly_inside(cell, floor, roof, &m, &y)
    });
    (meets, endpoint_inside)
}

/// Per cell: ids meeting its interior, and those with an endpoint inside.
pub fn cell_loads(f: &CurveFamily, p: &Partition) -> Vec<(BTreeSet<u64>, BTreeSet<u64>)> {
    p.cells
        .iter()
        .map(|cell| {
            let mut meet = BTreeSet::new();
            let mut short = BTreeSet::new();
            for c in &f.chains {
                let (m, e) = chain_vs_cell(f, cell, c);
                if m {
                    meet.insert(c.id());
                    if e {
                        short.insert(c.id());
                    }
                }
            }
            (meet, short)
        })
        .collect()
}

/// True when the undirected graph has no cycle.
pub fn acyclic(edges: &[(u64, u64)]) -> bool {
    let mut parent = std::collections::HashMap::<u64, u64>::new();
    fn root(p: &mut std::collections::HashMap<u64, u64>, x: u64) -> u64 {
        let up = *p.entry(x).or_insert(x);
        if up == x {
            x
        } else {
            let r = root(p, up);
            p.insert(x, r);
            r
        }
    }
    edges.iter().all(|&(a, b)| {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent.insert(ra, rb);
        ra != rb
    })
}

/// K2,2 subgraphs by checking all four edges of every pair of pairs.
pub fn brute_k22(g: &BipartiteGraph) -> u64 {
    let mut n = 0;
    for a1 in 0..g.na() {
        for a2 in a1 + 1..g.na() {
            for b1 in 0..g.nb() {
                for b2 in b1 + 1..g.nb() {
                    if g.has_edge(a1, b1) && g.has_edge(a1, b2) && g.has_edge(a2, b1) && g.has_edge(a2, b2) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Incidences of the grid of size `k`, and the points on each line,
/// straight from the definition.
pub fn brute_grid(k: i64) -> (u64, Vec<usize>) {
    let mut total = 0;
    let mut per_line = Vec::new();
    for m in 0..2 * k {
        for c in 0..2 * k * k {
            let on = (0..k).filter(|&a| (0..4 * k * k).contains(&(m * a + c))).count();
            per_line.push(on);
            total += on as u64;
        }
    }
    (total, per_line)
}

/// Some two lists share three symbols in the same order.
pub fn brute_same_order_triple(lists: &[Vec<u64>]) -> bool {
    for (i, x) in lists.iter().enumerate() {
        for y in &lists[i + 1..] {
            let shared: Vec<u64> = x.iter().copied().filter(|s| y.contains(s)).collect();
            let pos = |l: &Vec<u64>, s: u64| l.iter().position(|&t| t == s).unwrap();
            for p in 0..shared.len() {
                for q in p + 1..shared.len() {
                    for r in q + 1..shared.len() {
                        let (a, b, c) = (shared[p], shared[q], shared[r]);
                        if pos(y, a) < pos(y, b) && pos(y, b) < pos(y, c) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Surviving vertices of repeated low-degree deletion, by full rescans.
pub fn naive_prune(g: &BipartiteGraph, t: &Rational) -> (Vec<usize>, Vec<usize>) {
    let mut alive_a: HashSet<usize> = (0..g.na()).collect();
    let mut alive_b: HashSet<usize> = (0..g.nb()).collect();
    loop {
        let low = |d: usize| &int(d as i64) < t;
        let da: Vec<usize> = alive_a
            .iter()
            .copied()
            .filter(|&a| low(g.neighbors_a(a).iter().filter(|b| alive_b.contains(b)).count()))
            .collect();
        let db: Vec<usize> = alive_b
            .iter()
            .copied()
            .filter(|&b| low(g.neighbors_b(b).iter().filter(|a| alive_a.contains(a)).count()))
            .collect();
        if da.is_empty() && db.is_empty() {
            break;
        }
        for a in da {
            alive_a.remove(&a);
        }
        for b in db {
            alive_b.remove(&b);
        }
    }
    let mut a: Vec<usize> = alive_a.into_iter().collect();
    let mut b: Vec<usize> = alive_b.into_iter().collect();
    a.sort();
    b.sort();
    (a, b)
}
