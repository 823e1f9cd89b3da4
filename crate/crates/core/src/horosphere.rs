//! Horocyclic products of two trees (Diestel-Leader graphs).
//!
//! A vertex is a pair `(x, y)` of tree vertices whose heights sum to zero.
//! Two vertices are adjacent when both coordinates move along tree edges,
//! necessarily in opposite height directions. With the same coefficient
//! group on both sides this is the horosphere on which `G wr Z` acts; with
//! groups of orders 2 and 3 it is `DL(2, 3)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Limits};
use crate::group::FiniteGroup;
use crate::tree::{distance_unchecked, Tree, TreeVertex};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HVertex {
    x: TreeVertex,
    y: TreeVertex,
}

impl HVertex {
    pub fn new(x: TreeVertex, y: TreeVertex) -> Result<Self> {
        if x.height() + y.height() != 0 {
            return Err(Error::InvalidVertex(format!("heights {} and {} do not sum to zero", x.height(), y.height())));
        }
        Ok(HVertex { x, y })
    }

    pub(crate) fn new_unchecked(x: TreeVertex, y: TreeVertex) -> Self {
        debug_assert_eq!(x.height() + y.height(), 0);
        HVertex { x, y }
    }

    /// The pair of roots `((0 |), (0 |))`.
    pub fn base() -> Self {
        HVertex { x: TreeVertex::root(), y: TreeVertex::root() }
    }

    pub fn x(&self) -> &TreeVertex {
        &self.x
    }

    pub fn y(&self) -> &TreeVertex {
        &self.y
    }

    /// Height of the left coordinate.
    pub fn height(&self) -> i64 {
        self.x.height()
    }

    /// Parses `[(h | ..), (-h | ..)]`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [x, y], got {s:?}")))?;
        let split = body.find(')').ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        let (x, rest) = body.split_at(split + 1);
        let y = rest.trim_start().strip_prefix(',').ok_or_else(|| Error::Parse(format!("missing ',' in {s:?}")))?;
        HVertex::new(TreeVertex::parse(x)?, TreeVertex::parse(y)?)
    }
}

impl fmt::Display for HVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

impl fmt::Debug for HVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Outcome of [`Horosphere::find_long_cycle`].
#[derive(Debug, Clone, Serialize)]
pub struct CycleSearch {
    /// Closed walk without repeated vertices; the last vertex is adjacent to the first.
    #[serde(serialize_with = "ser_display_vec")]
    pub cycle: Option<Vec<HVertex>>,
    pub min_length: usize,
    /// Radius of the ball in which the cycle was found, or the largest searched.
    pub radius: u32,
    pub ball_vertices: usize,
    /// Graph diameter of the cycle's vertex set in the horosphere metric.
    pub diameter: Option<u64>,
    /// Shortest fundamental cycle seen in the last ball searched.
    pub shortest_seen: Option<usize>,
}

fn ser_display_vec<S: serde::Serializer>(v: &Option<Vec<HVertex>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(list) => s.collect_seq(list.iter().map(ToString::to_string)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug)]
pub struct Horosphere {
    left: Tree,
    right: Tree,
}

impl Horosphere {
    /// `H_G`: both factors over the same group.
    pub fn lamplighter(group: Arc<FiniteGroup>) -> Self {
        Horosphere { left: Tree::new(group.clone()), right: Tree::new(group) }
    }

    /// Two independent coefficient groups, e.g. orders 2 and 3 for `DL(2, 3)`.
    pub fn mixed(left: Arc<FiniteGroup>, right: Arc<FiniteGroup>) -> Self {
        Horosphere { left: Tree::new(left), right: Tree::new(right) }
    }

    /// `DL(q, r)` over cyclic coefficient groups.
    pub fn dl(q: usize, r: usize) -> Result<Self> {
        Ok(Self::mixed(Arc::new(FiniteGroup::cyclic(q)?), Arc::new(FiniteGroup::cyclic(r)?)))
    }

    pub fn left(&self) -> &Tree {
        &self.left
    }

    pub fn right(&self) -> &Tree {
        &self.right
    }

    /// Vertex degree `q + r`.
    pub fn degree(&self) -> usize {
        self.left.branching() + self.right.branching()
    }

    pub fn contains(&self, v: &HVertex) -> bool {
        self.left.contains(&v.x) && self.right.contains(&v.y)
    }

    fn check(&self, v: &HVertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(format!("{v} is not a vertex of this horosphere")))
        }
    }

    /// First the `r` moves with `x` up and `y` down, then the `q` moves with
    /// `x` down and `y` up, each in group-element order.
    pub fn neighbors(&self, v: &HVertex) -> Vec<HVertex> {
        let mut out = Vec::with_capacity(self.degree());
        let xp = v.x.parent();
        for g in self.right.group().elements() {
            out.push(HVertex { x: xp.clone(), y: v.y.child(g) });
        }
        let yp = v.y.parent();
        for g in self.left.group().elements() {
            out.push(HVertex { x: v.x.child(g), y: yp.clone() });
        }
        out
    }

    pub fn ball(&self, center: &HVertex, rad: u32, limits: Limits) -> Result<FiniteGraph<HVertex>> {
        self.check(center)?;
        FiniteGraph::ball(center.clone(), rad, limits, |v| self.neighbors(v))
    }

    /// Layer sizes `|S_0|, .., |S_rad|` around `base`.
    pub fn sphere_profile(&self, base: &HVertex, rad: u32, limits: Limits) -> Result<Vec<usize>> {
        let ball = self.ball(base, rad, limits)?;
        let mut sizes = ball.layer_sizes().expect("balls record depths");
        sizes.resize(rad as usize + 1, 0);
        Ok(sizes)
    }

    /// Graph distance by bidirectional breadth-first search.
    pub fn distance(&self, u: &HVertex, v: &HVertex, limits: Limits) -> Result<u64> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(0);
        }
        let mut seen = [FxHashMap::default(), FxHashMap::default()];
        seen[0].insert(u.clone(), 0u64);
        seen[1].insert(v.clone(), 0u64);
        let mut frontier = [vec![u.clone()], vec![v.clone()]];
        let mut depth = [0u64, 0u64];
        loop {
            let side = usize::from(frontier[1].len() < frontier[0].len());
            let other = 1 - side;
            let mut next = Vec::new();
            let mut best: Option<u64> = None;
            for w in &frontier[side] {
                for n in self.neighbors(w) {
                    if seen[side].contains_key(&n) {
                        continue;
                    }
                    if let Some(&d) = seen[other].get(&n) {
                        let total = depth[side] + 1 + d;
                        best = Some(best.map_or(total, |b| b.min(total)));
                    }
                    seen[side].insert(n.clone(), depth[side] + 1);
                    next.push(n);
                }
            }
            if let Some(d) = best {
                return Ok(d);
            }
            let total = seen[0].len() + seen[1].len();
            limits.check(total as u128)?;
            depth[side] += 1;
            frontier[side] = next;
        }
    }

    /// Endpoint of a random walk of `steps` uniform neighbor moves.
    pub fn random_walk(&self, start: &HVertex, steps: usize, rng: &mut impl Rng) -> HVertex {
        let mut v = start.clone();
        for _ in 0..steps {
            let mut next = self.neighbors(&v);
            v = next.swap_remove(rng.gen_range(0..next.len()));
        }
        v
    }

    /// Closed-form distance `d(x, x') + d(y, y') - |h(x) - h(x')|`.
    pub fn distance_formula(&self, u: &HVertex, v: &HVertex) -> Result<u64> {
        self.check(u)?;
        self.check(v)?;
        Ok(distance_formula_unchecked(u, v))
    }

    /// Looks for a simple cycle of length at least `min_length` in balls of
    /// growing radius around `base`, up to `max_radius`.
    ///
    /// Candidates are the fundamental cycles of the BFS tree: two geodesics
    /// from their branch point closed by one non-tree edge. Such a cycle of
    /// length `L` has diameter at least `L / 2 - 1`, so long cycles here are
    /// also wide. The longest candidate in the first successful ball is
    /// returned.
    pub fn find_long_cycle(
        &self,
        base: &HVertex,
        min_length: usize,
        max_radius: u32,
        limits: Limits,
    ) -> Result<CycleSearch> {
        if min_length < 3 {
            return Err(Error::InvalidArgument("cycle length bound must be at least 3".into()));
        }
        self.check(base)?;
        let mut report =
            CycleSearch { cycle: None, min_length, radius: 0, ball_vertices: 1, diameter: None, shortest_seen: None };
        let first = ((min_length as u32).saturating_sub(1)) / 2;
        for rad in first.clamp(1, max_radius.max(1))..=max_radius {
            let ball = self.ball(base, rad, limits)?;
            report.radius = rad;
            report.ball_vertices = ball.len();
            let (best, shortest) = longest_fundamental_cycle(&ball);
            report.shortest_seen = shortest;
            if let Some(cycle) = best.filter(|c| c.len() >= min_length) {
                let verts: Vec<HVertex> = cycle.iter().map(|&i| ball.vertex(i).clone()).collect();
                let mut diam = 0;
                for (i, a) in verts.iter().enumerate() {
                    for b in &verts[i + 1..] {
                        diam = diam.max(distance_formula_unchecked(a, b));
                    }
                }
                report.diameter = Some(diam);
                report.cycle = Some(verts);
                return Ok(report);
            }
        }
        Ok(report)
    }
}

pub(crate) fn distance_formula_unchecked(u: &HVertex, v: &HVertex) -> u64 {
    let dh = (u.height() - v.height()).unsigned_abs();
    distance_unchecked(&u.x, &v.x) + distance_unchecked(&u.y, &v.y) - dh
}

/// Longest fundamental cycle of the BFS tree of a ball (as vertex indices),
/// and the shortest cycle length among them.
fn longest_fundamental_cycle<V>(ball: &FiniteGraph<V>) -> (Option<Vec<u32>>, Option<usize>) {
    let depth = ball.depths().expect("balls record depths");
    let n = ball.adjacency().len();
    let mut parent = vec![u32::MAX; n];
    for v in 1..n as u32 {
        parent[v as usize] = *ball
            .neighbors(v)
            .iter()
            .find(|&&w| depth[w as usize] + 1 == depth[v as usize])
            .expect("every non-root ball vertex has a BFS parent");
    }
    let mut best: Option<(usize, u32, u32)> = None;
    let mut shortest: Option<usize> = None;
    for u in 0..n as u32 {
        for &w in ball.neighbors(u) {
            if w <= u || parent[u as usize] == w || parent[w as usize] == u {
                continue;
            }
            let (mut a, mut b) = (u, w);
            let mut len = 1;
            while a != b {
                if depth[a as usize] >= depth[b as usize] {
                    a = parent[a as usize];
                } else {
                    b = parent[b as usize];
                }
                len += 1;
            }
            shortest = Some(shortest.map_or(len, |s| s.min(len)));
            if best.is_none_or(|(l, _, _)| len > l) {
                best = Some((len, u, w));
            }
        }
    }
    let cycle = best.map(|(_, u, w)| {
        let (mut a, mut b) = (u, w);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            if depth[a as usize] >= depth[b as usize] {
                a = parent[a as usize];
                left.push(a);
            } else {
                b = parent[b as usize];
                right.push(b);
            }
        }
        // left ends at the branch point; right ends there too
        right.pop();
        left.extend(right.into_iter().rev());
        left
    });
    (cycle, shortest)
}
