//! Seeded and deterministic curve families and bipartite graphs: the vee
//! fan, wiring diagrams (doubling and random), two-grounded instances,
//! random segments, the point-line incidence grid, the grounded
//! incidence-to-tangency family and random bipartite graphs.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::{classify_pair, validate_family, ContactKind, CurveError, CurveFamily, FamilyFlags, PolyChain};
use crate::exact_geom::{int, orient, rat, Point, Rational};
use crate::extremal_graph::BipartiteGraph;
use crate::xmono::y_at;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("gave up after {0} attempts")]
    Exhausted(usize),
    #[error("generated family failed its own check: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameter(msg.into())
}

/// Drops interior vertices lying on the segment through their neighbours.
pub(crate) fn simplify(vertices: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last() == Some(&v) {
            continue;
        }
        while out.len() >= 2 && orient(&out[out.len() - 2], &out[out.len() - 1], &v) == 0 {
            out.pop();
        }
        out.push(v);
    }
    out
}

fn half(p: usize) -> Rational {
    rat(2 * p as i64 + 1, 2)
}

/// Base line `y = 0` (id 0) plus, for `i = 0..n-1`, a vee with apex
/// `(i, 0)` and slopes ±1 (id `i + 1`). Every vee touches the base and
/// crosses every other vee once, so the tangency graph is a star.
pub fn gen_vee_fan(n: usize, window: Option<(Rational, Rational)>) -> Result<CurveFamily, GenError> {
    if n < 2 {
        return Err(bad("vee fan needs n >= 2"));
    }
    let (lo, hi) = window.unwrap_or_else(|| (int(-1), int(n as i64 - 1)));
    let last_apex = int(n as i64 - 2);
    if !(lo < int(0) && hi > last_apex) {
        return Err(bad("window must contain every apex strictly inside"));
    }
    let mut chains = vec![PolyChain::new(0, vec![Point::new(lo.clone(), int(0)), Point::new(hi.clone(), int(0))])?];
    for i in 0..n - 1 {
        let apex = int(i as i64);
        let arm = |x: &Rational| Point::new(x.clone(), (x - &apex).abs());
        chains.push(PolyChain::new(
            i as u64 + 1,
            vec![arm(&lo), Point::new(apex.clone(), int(0)), arm(&hi)],
        )?);
    }
    Ok(CurveFamily::new(chains)?.with_window(lo, hi).with_flags(FamilyFlags {
        x_monotone: true,
        bi_infinite: true,
        one_intersecting: true,
        precisely_one: true,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Swap,
    Kiss,
}

/// Wires on integer heights, advanced in rounds of two x-units. A swap
/// exchanges neighbours with a crossing at the round's midpoint; a kiss
/// brings them together at the midpoint and back apart.
struct Wiring {
    at: Vec<usize>,
    pos: Vec<usize>,
    verts: Vec<Vec<Point>>,
    rounds: usize,
}

impl Wiring {
    fn new(n: usize) -> Self {
        Wiring {
            at: (0..n).collect(),
            pos: (0..n).collect(),
            verts: (0..n).map(|w| vec![Point::int(-1, w as i64)]).collect(),
            rounds: 0,
        }
    }

    fn apply(&mut self, events: &[(usize, Event)]) {
        let x0 = 2 * self.rounds as i64;
        let mut moved = vec![false; self.at.len()];
        for &(p, e) in events {
            let (lo, up) = (self.at[p], self.at[p + 1]);
            moved[lo] = true;
            moved[up] = true;
            match e {
                Event::Swap => {
                    self.verts[lo].push(Point::int(x0 + 2, p as i64 + 1));
                    self.verts[up].push(Point::int(x0 + 2, p as i64));
                    self.at.swap(p, p + 1);
                    self.pos[lo] = p + 1;
                    self.pos[up] = p;
                }
                Event::Kiss => {
                    let mid = Point::new(int(x0 + 1), half(p));
                    self.verts[lo].push(mid.clone());
                    self.verts[lo].push(Point::int(x0 + 2, p as i64));
                    self.verts[up].push(mid);
                    self.verts[up].push(Point::int(x0 + 2, p as i64 + 1));
                }
            }
        }
        for (w, verts) in self.verts.iter_mut().enumerate() {
            if !moved[w] {
                verts.push(Point::int(x0 + 2, self.pos[w] as i64));
            }
        }
        self.rounds += 1;
    }

    fn finish(self) -> Result<CurveFamily, GenError> {
        let end = 2 * self.rounds as i64 + 1;
        let chains = self
            .verts
            .into_iter()
            .enumerate()
            .map(|(w, mut v)| {
                v.push(Point::int(end, self.pos[w] as i64));
                PolyChain::new(w as u64, simplify(v))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CurveFamily::new(chains)?.with_window(int(-1), int(end)))
    }
}

/// `2^k` bi-infinite x-monotone wires, 1-intersecting, with
/// `k·2^(k-1)` touching pairs.
///
/// Stage `j` pairs every wire with the one differing in bit `j`: inside
/// each block of `2^(j+1)` positions the two halves are interleaved by
/// adjacent swaps, then every interleaved pair kisses. Each pair of wires
/// swaps or kisses at most once overall.
pub fn gen_doubling(k: u32) -> Result<CurveFamily, GenError> {
    if !(1..=12).contains(&k) {
        return Err(bad("doubling needs 1 <= k <= 12"));
    }
    let n = 1usize << k;
    let mut w = Wiring::new(n);
    for j in 0..k {
        let size = 1usize << (j + 1);
        let mut target = vec![0usize; n];
        for s in (0..n).step_by(size) {
            let block = &w.at[s..s + size];
            let lower: Vec<usize> = block.iter().copied().filter(|x| x >> j & 1 == 0).collect();
            let upper: Vec<usize> = block.iter().copied().filter(|x| x >> j & 1 == 1).collect();
            for (i, (&x, &y)) in lower.iter().zip(&upper).enumerate() {
                debug_assert_eq!(x ^ y, 1 << j);
                target[x] = s + 2 * i;
                target[y] = s + 2 * i + 1;
            }
        }
        let mut parity = 0;
        while (0..n).any(|p| target[w.at[p]] != p) {
            let swaps: Vec<(usize, Event)> = (parity..n - 1)
                .step_by(2)
                .filter(|&p| target[w.at[p]] > target[w.at[p + 1]])
                .map(|p| (p, Event::Swap))
                .collect();
            if !swaps.is_empty() {
                w.apply(&swaps);
            }
            parity ^= 1;
        }
        let kisses: Vec<(usize, Event)> = (0..n).step_by(2).map(|p| (p, Event::Kiss)).collect();
        w.apply(&kisses);
    }
    Ok(w.finish()?.with_flags(FamilyFlags {
        x_monotone: true,
        bi_infinite: true,
        one_intersecting: true,
        precisely_one: false,
    }))
}

/// Parameters of a random wiring diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWiring {
    pub n: usize,
    pub seed: u64,
    /// Chance that an adjacent pair which has not met yet meets this round.
    pub event_prob: f64,
    /// Chance that a meeting is a kiss rather than a swap.
    pub kiss_prob: f64,
    /// `Some(r)`: stop after `r` rounds. `None`: run until every pair has
    /// met, restricting kisses so that this always happens.
    pub rounds: Option<usize>,
    pub max_attempts: usize,
}

impl RandomWiring {
    /// Every pair meets exactly once.
    pub fn precise(n: usize, seed: u64) -> Self {
        RandomWiring {
            n,
            seed,
            event_prob: 0.5,
            kiss_prob: 0.5,
            rounds: None,
            max_attempts: 1,
        }
    }

    /// A fixed number of rounds; pairs meet at most once.
    pub fn partial(n: usize, seed: u64, rounds: usize) -> Self {
        RandomWiring {
            n,
            seed,
            event_prob: 0.5,
            kiss_prob: 0.4,
            rounds: Some(rounds),
            max_attempts: 1,
        }
    }
}

/// Random bi-infinite x-monotone 1-intersecting wires. Wire `w` enters at
/// height `w`.
pub fn gen_random_wiring(p: &RandomWiring) -> Result<CurveFamily, GenError> {
    if p.n < 2 {
        return Err(bad("random wiring needs n >= 2"));
    }
    if !(p.event_prob > 0.0 && p.event_prob <= 1.0 && (0.0..=1.0).contains(&p.kiss_prob)) {
        return Err(bad("probabilities out of range"));
    }
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.max_attempts.max(1) {
        let mut w = Wiring::new(n);
        let mut met = vec![vec![false; n]; n];
        let open = |w: &Wiring, met: &Vec<Vec<bool>>, q: usize| !met[w.at[q]][w.at[q + 1]];
        let mut parity = 0;
        let mut round = 0;
        loop {
            match p.rounds {
                Some(r) if round >= r => break,
                None if !(0..n - 1).any(|q| open(&w, &met, q)) => break,
                _ => {}
            }
            let mut events = Vec::new();
            for q in (parity..n - 1).step_by(2) {
                if open(&w, &met, q) && rng.random_bool(p.event_prob) {
                    let (a, b) = (w.at[q], w.at[q + 1]);
                    // In precise mode a kiss is a swap followed by exchanging
                    // the two wires' names, which is only harmless when both
                    // have met the same wires so far.
                    let same_history = (0..n).all(|x| x == a || x == b || met[a][x] == met[b][x]);
                    let kiss = (p.rounds.is_some() || same_history) && rng.random_bool(p.kiss_prob);
                    let e = if kiss { Event::Kiss } else { Event::Swap };
                    met[a][b] = true;
                    met[b][a] = true;
                    events.push((q, e));
                }
            }
            if !events.is_empty() {
                w.apply(&events);
            }
            parity ^= 1;
            round += 1;
        }
        let all_met = (0..n).all(|a| (0..n).all(|b| a == b || met[a][b]));
        if p.rounds.is_some() || all_met {
            return Ok(w.finish()?.with_seed(p.seed).with_flags(FamilyFlags {
                x_monotone: true,
                bi_infinite: true,
                one_intersecting: true,
                precisely_one: all_met,
            }));
        }
    }
    Err(GenError::Exhausted(p.max_attempts))
}

/// The part of an x-increasing chain over `[lo, hi]`.
fn clip(c: &PolyChain, lo: &Rational, hi: &Rational) -> Result<PolyChain, GenError> {
    let at = |x: &Rational| -> Result<Point, GenError> {
        let y = y_at(c, x).ok_or_else(|| bad("clip bound outside the chain"))?;
        Ok(Point::new(x.clone(), y))
    };
    let mut v = vec![at(lo)?];
    v.extend(c.vertices().iter().filter(|p| &p.x > lo && &p.x < hi).cloned());
    v.push(at(hi)?);
    Ok(PolyChain::new(c.id(), v)?)
}

/// Where the two grounds of a [`TwoGrounded`] instance sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundSides {
    /// Red grounded on the left, blue on the right and running leftward.
    Opposite,
    /// Both grounded on one vertical line, red below blue.
    Same,
}

/// Two grounded families: every chain of `red` starts on `red.ground`
/// and avoids blue's ground, and symmetrically for `blue`. Together they
/// are 1-intersecting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoGrounded {
    pub red: CurveFamily,
    pub blue: CurveFamily,
}

/// Splits a random wiring of `n` wires into two grounded families.
pub fn gen_two_grounded(n: usize, seed: u64, sides: GroundSides) -> Result<TwoGrounded, GenError> {
    if n < 2 {
        return Err(bad("two-grounded instance needs n >= 2"));
    }
    let wires = gen_random_wiring(&RandomWiring::partial(n, seed, 3 * n))?;
    let (lo, hi) = wires.window.clone().expect("wirings carry a window");
    let split = n / 2;
    let flags = FamilyFlags {
        x_monotone: sides == GroundSides::Same,
        one_intersecting: true,
        ..FamilyFlags::default()
    };
    let mut red = Vec::new();
    let mut blue = Vec::new();
    match sides {
        GroundSides::Opposite => {
            // Clip points sit a third past an integer, away from every event.
            let span = &hi - &lo;
            let red_end = &lo + (&span * rat(3, 4)).floor() + rat(1, 3);
            let blue_start = &lo + (&span * rat(1, 4)).floor() + rat(1, 3);
            for c in &wires.chains {
                if (c.id() as usize) < split {
                    red.push(clip(c, &lo, &red_end)?);
                } else {
                    blue.push(clip(c, &blue_start, &hi)?.reversed());
                }
            }
        }
        GroundSides::Same => {
            for c in &wires.chains {
                if (c.id() as usize) < split {
                    red.push(c.clone());
                } else {
                    blue.push(c.clone());
                }
            }
        }
    }
    let blue_ground = match sides {
        GroundSides::Opposite => hi,
        GroundSides::Same => lo.clone(),
    };
    Ok(TwoGrounded {
        red: CurveFamily::new(red)?.with_ground(lo).with_flags(flags).with_seed(seed),
        blue: CurveFamily::new(blue)?.with_ground(blue_ground).with_flags(flags).with_seed(seed),
    })
}

/// `n` segments with integer endpoints in `[0, span]²`, no vertical
/// segment, and no degenerate overlap, triple point or contact at an
/// endpoint. Candidates breaking these rules are redrawn.
pub fn gen_random_segments(n: usize, span: i64, seed: u64) -> Result<CurveFamily, GenError> {
    if span < 2 {
        return Err(bad("segment span must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chains: Vec<PolyChain> = Vec::with_capacity(n);
    let mut points: HashSet<Point> = HashSet::new();
    let budget = 1000 * (n + 1);
    let mut tries = 0;
    while chains.len() < n {
        tries += 1;
        if tries > budget {
            return Err(GenError::Exhausted(budget));
        }
        let (x1, x2) = (rng.random_range(0..=span), rng.random_range(0..=span));
        if x1 == x2 {
            continue;
        }
        let (y1, y2) = (rng.random_range(0..=span), rng.random_range(0..=span));
        let (p, q) = if x1 < x2 { ((x1, y1), (x2, y2)) } else { ((x2, y2), (x1, y1)) };
        let s = PolyChain::from_ints(chains.len() as u64, &[p, q])?;
        let mut fresh = Vec::new();
        let ok = chains.iter().all(|c| match classify_pair(c, &s) {
            ContactKind::Disjoint => true,
            ContactKind::Crossing(x) => {
                let at_end = [c.start(), c.end(), s.start(), s.end()].contains(&&x);
                fresh.push(x);
                !at_end
            }
            _ => false,
        });
        let distinct = fresh.iter().collect::<HashSet<_>>().len() == fresh.len();
        if ok && distinct && fresh.iter().all(|x| !points.contains(x)) {
            points.extend(fresh);
            chains.push(s);
        }
    }
    Ok(CurveFamily::new(chains)?.with_seed(seed).with_flags(FamilyFlags {
        x_monotone: true,
        one_intersecting: true,
        ..FamilyFlags::default()
    }))
}

/// Points `{0..k-1} × {0..4k²-1}` and lines `y = m·x + c` with
/// `0 <= m < 2k`, `0 <= c < 2k²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceInstance {
    pub k: u64,
    /// `(a, b)` pairs, sorted.
    pub points: Vec<(i64, i64)>,
    /// `(m, c)` pairs, sorted.
    pub lines: Vec<(i64, i64)>,
}

impl IncidenceInstance {
    /// Point-line incidences, counted over all pairs.
    pub fn incidences(&self) -> u64 {
        self.points
            .iter()
            .map(|&(a, b)| self.lines.iter().filter(|&&(m, c)| m * a + c == b).count() as u64)
            .sum()
    }

    /// Lines through the point `(a, b)`, by increasing slope.
    pub fn lines_through(&self, a: i64, b: i64) -> Vec<(i64, i64)> {
        let k = self.k as i64;
        (0..2 * k)
            .map(|m| (m, b - m * a))
            .filter(|&(_, c)| (0..2 * k * k).contains(&c))
            .collect()
    }
}

pub fn gen_incidence_grid(k: u64) -> Result<IncidenceInstance, GenError> {
    if !(1..=64).contains(&k) {
        return Err(bad("incidence grid needs 1 <= k <= 64"));
    }
    let k = k as i64;
    let points = (0..k).flat_map(|a| (0..4 * k * k).map(move |b| (a, b))).collect();
    let lines = (0..2 * k).flat_map(|m| (0..2 * k * k).map(move |c| (m, c))).collect();
    Ok(IncidenceInstance { k: k as u64, points, lines })
}

fn smallest_prime_above(n: u64) -> u64 {
    (n + 1..)
        .find(|&p| p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .expect("primes are unbounded")
}

/// Largest `eps` accepted by [`gen_grounded_family`].
pub fn default_grounded_eps(k: u64) -> Rational {
    rat(1, 8 * k as i64)
}

/// Grounded family realising the incidence grid of size `k` as tangencies:
/// `8k³` x-monotone 1-intersecting chains starting on a vertical ground
/// line, with exactly one touching pair per point-line incidence (`4k⁴`).
///
/// Each line becomes a chain following the line, dipping by `λm²` on a
/// short flat piece around every grid column. Those pieces are tangent to
/// the parabola `y = b + (x-a)²/(4λ)` over each grid point, so a point
/// chain running along that parabola touches exactly the lines through
/// its point. Point chains travel from the ground just above the lowest
/// line through their point; points on no line travel horizontally.
///
/// `eps` controls the bump width and defaults to `1/(8k)`, the largest
/// value accepted. The result is checked before it is returned.
pub fn gen_grounded_family(k: u64, eps: Option<Rational>) -> Result<CurveFamily, GenError> {
    if !(1..=6).contains(&k) {
        return Err(bad("grounded family needs 1 <= k <= 6"));
    }
    let eps = eps.unwrap_or_else(|| default_grounded_eps(k));
    if !eps.is_positive() || eps > default_grounded_eps(k) {
        return Err(bad(format!("eps must lie in (0, 1/{}]", 8 * k)));
    }
    let grid = gen_incidence_grid(k)?;
    let ki = k as i64;
    let prime = smallest_prime_above(16 * k) as i64;
    let x_ground = -(rat(1, 2) + rat(1, prime));
    let x_end = int(ki) - rat(1, 2) + rat(1, prime);
    let r_out = &eps * int(3);
    let r_in = &eps * rat(3, 2);
    let two = BigInt::from(2);
    let delta_min = &eps / Rational::from_integer(num_traits::pow(two.clone(), (k - 1) as usize));
    let lambda = &delta_min / int(64 * ki * ki);
    let line_at = |m: i64, c: i64, x: &Rational| int(m) * x + int(c);
    let dip = |m: i64| -(&lambda * int(m * m));

    let line_vertices = |m: i64, c: i64, upto: Option<i64>| -> Vec<Point> {
        let mut v = vec![Point::new(x_ground.clone(), line_at(m, c, &x_ground))];
        for a in 0..upto.unwrap_or(ki) {
            let a = int(a);
            for (dx, lowered) in [(-&r_out, false), (-&r_in, true), (r_in.clone(), true), (r_out.clone(), false)] {
                let x = &a + dx;
                let y = line_at(m, c, &x) + if lowered { dip(m) } else { Rational::zero() };
                v.push(Point::new(x, y));
            }
        }
        if upto.is_none() {
            v.push(Point::new(x_end.clone(), line_at(m, c, &x_end)));
        }
        v
    };

    let mut chains = Vec::with_capacity(grid.lines.len() + grid.points.len());
    for (id, &(m, c)) in grid.lines.iter().enumerate() {
        chains.push(PolyChain::new(id as u64, simplify(line_vertices(m, c, None)))?);
    }

    // Points sharing a lowest line get distinct offsets, by column.
    let mut by_lowest: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    for &(a, b) in &grid.points {
        if let Some(&low) = grid.lines_through(a, b).first() {
            by_lowest.entry(low).or_default().push(a);
        }
    }
    let theta = rat(1, 16 * ki);
    let first_point_id = grid.lines.len() as u64;
    for (i, &(a, b)) in grid.points.iter().enumerate() {
        let id = first_point_id + i as u64;
        let through = grid.lines_through(a, b);
        let Some(&(m1, c1)) = through.first() else {
            let y = int(b) + rat(1, 2) + int(a) * &theta;
            chains.push(PolyChain::new(
                id,
                vec![Point::new(x_ground.clone(), y.clone()), Point::new(int(a), y)],
            )?);
            continue;
        };
        let rank = by_lowest[&(m1, c1)].iter().position(|&x| x == a).expect("listed");
        let delta = &eps / Rational::from_integer(num_traits::pow(two.clone(), rank));
        let mut v: Vec<Point> = line_vertices(m1, c1, Some(a))
            .into_iter()
            .map(|p| Point::new(p.x, p.y + &delta))
            .collect();
        let ax = int(a);
        for (dx, lowered) in [(-&r_out, false), (-&r_in, true), (-&eps, true)] {
            let x = &ax + dx;
            let y = line_at(m1, c1, &x) + if lowered { dip(m1) } else { Rational::zero() } + &delta;
            v.push(Point::new(x, y));
        }
        let on_parabola = |s: i64| {
            Point::new(&ax + &lambda * int(2 * s), int(b) + &lambda * int(s * s))
        };
        v.extend(through.iter().map(|&(m, _)| on_parabola(m)));
        v.push(on_parabola(through.last().expect("nonempty").0 + 1));
        chains.push(PolyChain::new(id, simplify(v))?);
    }

    let family = CurveFamily::new(chains)?.with_ground(x_ground).with_flags(FamilyFlags {
        x_monotone: true,
        one_intersecting: true,
        ..FamilyFlags::default()
    });
    let report = validate_family(&family);
    let expected = grid.incidences() as usize;
    let mut problems = Vec::new();
    if !report.grounded_ok {
        problems.push("not grounded".to_string());
    }
    problems.extend(report.violated_flags(&family.flags).iter().map(|s| s.to_string()));
    if report.tangency_count() != expected {
        problems.push(format!("{} tangencies, expected {expected}", report.tangency_count()));
    }
    if !problems.is_empty() {
        return Err(GenError::SelfCheck(problems.join(", ")));
    }
    Ok(family)
}

/// Edge probability `n^{-(2-c)/(3-c)}` for [`gen_random_bipartite`].
pub fn random_bipartite_density(n: u64, c: &Rational) -> f64 {
    let c = crate::exact_geom::to_f64(c);
    (n as f64).powf(-(2.0 - c) / (3.0 - c))
}

fn threshold_for(num: &BigUint, den: &BigUint, root: u32) -> BigUint {
    // Largest t with t^root · num <= 2^(64·root) · den.
    let cap = BigUint::one() << (64 * root as usize);
    let rhs = cap * den;
    let (mut lo, mut hi) = (BigUint::zero(), BigUint::one() << 64usize);
    while lo < hi {
        let mid: BigUint = (&lo + &hi + 1u32) >> 1usize;
        if num_traits::pow(mid.clone(), root as usize) * num <= rhs {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    lo
}

fn sample_bipartite(na: usize, nb: usize, threshold: &BigUint, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let always = threshold.bits() > 64;
    let t = threshold.iter_u64_digits().next().unwrap_or(0);
    let mut edges = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            if always || rng.next_u64() < t {
                edges.push((a, b));
            }
        }
    }
    BipartiteGraph::new(na, nb, edges).expect("distinct pairs")
}

/// `n × n` bipartite graph keeping each edge with probability
/// `n^{-(2-c)/(3-c)}`, for `1 < c < 2`. An edge is kept when a 64-bit draw
/// falls below an exact integer threshold.
pub fn gen_random_bipartite(n: usize, c: &Rational, seed: u64) -> Result<BipartiteGraph, GenError> {
    if n < 2 {
        return Err(bad("n must be at least 2"));
    }
    if !(c > &int(1) && c < &int(2)) {
        return Err(bad("c must lie strictly between 1 and 2"));
    }
    let e = (int(2) - c) / (int(3) - c);
    let a = e.numer().to_biguint().expect("positive");
    let b = e.denom().to_biguint().expect("positive");
    let root: u32 = b.try_into().map_err(|_| bad("exponent denominator too large"))?;
    let exponent: u32 = a.try_into().map_err(|_| bad("exponent numerator too large"))?;
    let n_pow = num_traits::pow(BigUint::from(n), exponent as usize);
    let t = threshold_for(&n_pow, &BigUint::one(), root);
    Ok(sample_bipartite(n, n, &t, seed))
}

/// `na × nb` bipartite graph keeping each edge with probability `p`.
pub fn gen_bipartite_gnp(na: usize, nb: usize, p: &Rational, seed: u64) -> Result<BipartiteGraph, GenError> {
    if p.is_negative() || p > &int(1) {
        return Err(bad("p must lie in [0, 1]"));
    }
    let t = (Rational::from_integer(BigInt::one() << 64usize) * p).floor().to_integer();
    Ok(sample_bipartite(na, nb, &t.to_biguint().expect("nonnegative"), seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::tangency_graph;

    #[test]
    fn vee_fan_is_a_star() {
        let f = gen_vee_fan(5, None).unwrap();
        let r = validate_family(&f);
        assert!(r.violated_flags(&f.flags).is_empty());
        assert_eq!(r.tangency_count(), 4);
        let g = tangency_graph(&f).unwrap();
        assert_eq!(g.star_center(), Some(0));
        assert!(gen_vee_fan(1, None).is_err());
        assert!(gen_vee_fan(3, Some((int(0), int(5)))).is_err());
    }

    #[test]
    fn simplify_drops_collinear() {
        let v = vec![Point::int(0, 0), Point::int(1, 1), Point::int(2, 2), Point::int(3, 0)];
        assert_eq!(simplify(v), vec![Point::int(0, 0), Point::int(2, 2), Point::int(3, 0)]);
    }

    #[test]
    fn doubling_small() {
        for k in 1..=4u32 {
            let f = gen_doubling(k).unwrap();
            let r = validate_family(&f);
            assert!(r.violated_flags(&f.flags).is_empty(), "k={k}");
            assert!(r.triple_points.is_empty());
            assert_eq!(f.len(), 1 << k);
            assert_eq!(r.tangency_count(), k as usize * (1 << (k - 1)), "k={k}");
        }
        assert!(gen_doubling(0).is_err());
    }

    #[test]
    fn random_wiring_precise() {
        for seed in 0..4 {
            let f = gen_random_wiring(&RandomWiring::precise(8, seed)).unwrap();
            let r = validate_family(&f);
            assert!(r.is_precisely_1 && r.window_ok, "seed {seed}");
            assert!(r.tangency_count() > 0 || seed > 0);
        }
    }

    #[test]
    fn random_wiring_is_reproducible() {
        let p = RandomWiring::partial(6, 42, 10);
        assert_eq!(gen_random_wiring(&p).unwrap(), gen_random_wiring(&p).unwrap());
        assert!(validate_family(&gen_random_wiring(&p).unwrap()).is_1_intersecting);
    }

    #[test]
    fn two_grounded_hypotheses() {
        for sides in [GroundSides::Opposite, GroundSides::Same] {
            let t = gen_two_grounded(8, 3, sides).unwrap();
            let rr = validate_family(&t.red);
            let rb = validate_family(&t.blue);
            assert!(rr.grounded_ok && rb.grounded_ok);
            let mut all = t.red.chains.clone();
            all.extend(t.blue.chains.iter().cloned());
            assert!(validate_family(&CurveFamily::new(all).unwrap()).is_1_intersecting);
        }
    }

    #[test]
    fn random_segments_are_clean() {
        let f = gen_random_segments(30, 50, 9).unwrap();
        let r = validate_family(&f);
        assert!(r.is_1_intersecting && r.triple_points.is_empty() && r.endpoint_contacts.is_empty());
        assert_eq!(f.len(), 30);
    }

    #[test]
    fn incidence_counts() {
        for k in 1..=4u64 {
            let g = gen_incidence_grid(k).unwrap();
            assert_eq!(g.points.len() as u64, 4 * k * k * k);
            assert_eq!(g.lines.len() as u64, 4 * k * k * k);
            assert_eq!(g.incidences(), 4 * k.pow(4));
        }
        assert!(gen_incidence_grid(0).is_err());
    }

    #[test]
    fn grounded_small() {
        for k in 1..=2u64 {
            let f = gen_grounded_family(k, None).unwrap();
            assert_eq!(f.len() as u64, 8 * k * k * k);
            assert_eq!(validate_family(&f).tangency_count() as u64, 4 * k.pow(4));
        }
        assert!(gen_grounded_family(2, Some(rat(1, 8))).is_err());
        assert!(gen_grounded_family(2, Some(int(0))).is_err());
        assert!(gen_grounded_family(2, Some(rat(1, 100))).is_ok());
    }

    #[test]
    fn random_bipartite_threshold() {
        // c = 3/2 gives p = n^{-1/3}; for n = 64 that is exactly 1/4.
        let t = threshold_for(&BigUint::from(64u32), &BigUint::one(), 3);
        assert_eq!(t, BigUint::one() << 62usize);
        let g = gen_random_bipartite(64, &rat(3, 2), 1).unwrap();
        assert_eq!(g, gen_random_bipartite(64, &rat(3, 2), 1).unwrap());
        let e = g.edge_count() as f64;
        assert!((e - 1024.0).abs() < 200.0, "{e}");
        assert!(gen_random_bipartite(64, &int(2), 1).is_err());
        assert_eq!(gen_bipartite_gnp(3, 3, &int(1), 0).unwrap().edge_count(), 9);
        assert_eq!(gen_bipartite_gnp(3, 3, &int(0), 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn random_bipartite_density_formula() {
        let p = random_bipartite_density(16, &rat(3, 2));
        assert!((p * 256.0 - 101.6).abs() < 0.05, "{}", p * 256.0);
        assert!((random_bipartite_density(49, &int(1)) - 1.0 / 7.0).abs() < 1e-12);
    }
}
