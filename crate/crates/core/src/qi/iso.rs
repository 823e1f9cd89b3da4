//! Root-preserving isomorphism of finite graphs, and the relabeling map
//! between horospheres whose coefficient groups have equal order.
//!
//! Both graphs are placed side by side in one ordered partition. Colors
//! start from (distance to root, degree) and are refined until equitable,
//! splitting only against cells that changed. A cell holding unequal numbers
//! of vertices from the two graphs rules the current branch out. When a cell
//! with more than one vertex from each side remains, one vertex on the left
//! is paired in turn with each right vertex of that cell, and the search
//! backtracks by undoing the recorded splits.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Limits, UNREACHED};
use crate::group::FiniteGroup;
use crate::horosphere::{HVertex, Horosphere};

/// Ordered partition of the vertices of both graphs.
///
/// A cell is a range of `elems` and is named by its first position.
struct Partition {
    elems: Vec<u32>,
    pos: Vec<u32>,
    cell: Vec<u32>,
    len: Vec<u32>,
    /// Number of left-graph vertices in each cell.
    left: Vec<u32>,
    /// `(cell, new cell)` for every split, in order.
    trail: Vec<(u32, u32)>,
    n1: u32,
}

impl Partition {
    fn is_left(&self, v: u32) -> bool {
        v < self.n1
    }

    fn balanced(&self, c: u32) -> bool {
        2 * self.left[c as usize] == self.len[c as usize]
    }

    fn members(&self, c: u32) -> &[u32] {
        &self.elems[c as usize..(c + self.len[c as usize]) as usize]
    }

    fn swap(&mut self, a: u32, b: u32) {
        let (va, vb) = (self.elems[a as usize], self.elems[b as usize]);
        self.elems.swap(a as usize, b as usize);
        self.pos[va as usize] = b;
        self.pos[vb as usize] = a;
    }

    /// Splits cell `c` so that its first `at` elements stay in `c`.
    fn split(&mut self, c: u32, at: u32) -> u32 {
        let total = self.len[c as usize];
        debug_assert!(at > 0 && at < total);
        let new = c + at;
        let mut moved_left = 0;
        for p in new..c + total {
            let v = self.elems[p as usize];
            self.cell[v as usize] = new;
            moved_left += u32::from(self.is_left(v));
        }
        self.len[c as usize] = at;
        self.len[new as usize] = total - at;
        self.left[c as usize] -= moved_left;
        self.left[new as usize] = moved_left;
        self.trail.push((c, new));
        new
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, new) = self.trail.pop().expect("trail above mark");
            let l = self.len[new as usize];
            for p in new..new + l {
                let v = self.elems[p as usize];
                self.cell[v as usize] = c;
            }
            self.len[c as usize] += l;
            self.left[c as usize] += self.left[new as usize];
        }
    }
}

struct Refiner<'a> {
    adj: &'a [Vec<u32>],
    part: Partition,
    queue: Vec<u32>,
    queued: Vec<bool>,
    count: Vec<u32>,
    touched: Vec<u32>,
}

impl Refiner<'_> {
    fn enqueue(&mut self, c: u32) {
        if !self.queued[c as usize] {
            self.queued[c as usize] = true;
            self.queue.push(c);
        }
    }

    fn clear_queue(&mut self) {
        for c in self.queue.drain(..) {
            self.queued[c as usize] = false;
        }
    }

    /// Refines to the coarsest equitable partition; `false` as soon as a
    /// cell becomes unbalanced.
    fn refine(&mut self) -> bool {
        while let Some(s) = self.queue.pop() {
            self.queued[s as usize] = false;
            let splitter: Vec<u32> = self.part.members(s).to_vec();
            for &u in &splitter {
                for &w in &self.adj[u as usize] {
                    if self.count[w as usize] == 0 {
                        self.touched.push(w);
                    }
                    self.count[w as usize] += 1;
                }
            }
            let mut touched = std::mem::take(&mut self.touched);
            touched.sort_unstable_by_key(|&w| (self.part.cell[w as usize], self.count[w as usize]));
            let mut i = 0;
            let mut ok = true;
            while i < touched.len() {
                let c = self.part.cell[touched[i] as usize];
                let mut j = i;
                while j < touched.len() && self.part.cell[touched[j] as usize] == c {
                    j += 1;
                }
                if ok {
                    ok = self.split_cell(c, &touched[i..j]);
                }
                i = j;
            }
            for &w in &touched {
                self.count[w as usize] = 0;
            }
            touched.clear();
            self.touched = touched;
            if !ok {
                self.clear_queue();
                return false;
            }
        }
        true
    }

    /// Splits cell `c` by neighbor count; `group` holds the touched members
    /// sorted by count. Parts are ordered untouched first, then by count.
    fn split_cell(&mut self, c: u32, group: &[u32]) -> bool {
        let total = self.part.len[c as usize];
        let untouched = total - group.len() as u32;
        if untouched == 0 {
            let first = self.count[group[0] as usize];
            if group.iter().all(|&w| self.count[w as usize] == first) {
                return true;
            }
        }
        // Move the touched members to the tail of the cell, in count order.
        let end = c + total;
        for (k, &w) in group.iter().enumerate() {
            let target = end - group.len() as u32 + k as u32;
            let p = self.part.pos[w as usize];
            if p != target {
                self.part.swap(p, target);
            }
        }
        let was_queued = self.queued[c as usize];
        let mut parts = vec![c];
        let mut start = c + untouched;
        let mut current = c;
        let mut k = 0;
        while k < group.len() {
            let cnt = self.count[group[k] as usize];
            let mut m = k;
            while m < group.len() && self.count[group[m] as usize] == cnt {
                m += 1;
            }
            if start > current {
                current = self.part.split(current, start - current);
                parts.push(current);
            }
            start += (m - k) as u32;
            k = m;
        }
        if parts.len() == 1 {
            return true;
        }
        if parts.iter().any(|&p| !self.part.balanced(p)) {
            return false;
        }
        if was_queued {
            for &p in &parts[1..] {
                self.enqueue(p);
            }
        } else {
            let largest = *parts
                .iter()
                .max_by_key(|&&p| (self.part.len[p as usize], std::cmp::Reverse(p)))
                .expect("parts nonempty");
            for &p in &parts {
                if p != largest {
                    self.enqueue(p);
                }
            }
        }
        true
    }

    /// Puts `v` and `w` first in their cell and splits them off.
    fn individualize(&mut self, v: u32, w: u32) -> bool {
        let c = self.part.cell[v as usize];
        debug_assert_eq!(c, self.part.cell[w as usize]);
        let pv = self.part.pos[v as usize];
        self.part.swap(pv, c);
        let pw = self.part.pos[w as usize];
        self.part.swap(pw, c + 1);
        self.part.split(c, 2);
        self.enqueue(c);
        self.refine()
    }
}

struct Frame {
    mark: usize,
    scan: u32,
    v: u32,
    candidates: Vec<u32>,
    next: usize,
}

fn depth_and_degree<V>(g: &FiniteGraph<V>, root: u32) -> Vec<(u32, u32)> {
    let depth = g.bfs_from(root);
    (0..g.len() as u32).map(|i| (depth[i as usize], g.degree(i) as u32)).collect()
}

/// Whether some graph isomorphism maps `root1` to `root2`.
pub fn ball_isomorphic<V, W>(g1: &FiniteGraph<V>, root1: u32, g2: &FiniteGraph<W>, root2: u32) -> bool {
    let (n1, n2) = (g1.len(), g2.len());
    if n1 != n2 || g1.edge_count() != g2.edge_count() {
        return false;
    }
    if n1 == 0 {
        return true;
    }
    if root1 as usize >= n1 || root2 as usize >= n2 {
        return false;
    }
    let n = n1 + n2;
    let mut adj: Vec<Vec<u32>> = g1.adjacency().to_vec();
    adj.extend(g2.adjacency().iter().map(|l| l.iter().map(|&w| w + n1 as u32).collect()));

    let mut key: Vec<((u32, u32), u32)> = Vec::with_capacity(n);
    key.extend(depth_and_degree(g1, root1).into_iter().enumerate().map(|(i, k)| (k, i as u32)));
    key.extend(depth_and_degree(g2, root2).into_iter().enumerate().map(|(i, k)| (k, (i + n1) as u32)));
    key.sort_unstable();

    let mut part = Partition {
        elems: key.iter().map(|&(_, v)| v).collect(),
        pos: vec![0; n],
        cell: vec![0; n],
        len: vec![0; n],
        left: vec![0; n],
        trail: Vec::new(),
        n1: n1 as u32,
    };
    for (p, &v) in part.elems.iter().enumerate() {
        part.pos[v as usize] = p as u32;
    }
    let mut cells = Vec::new();
    let mut p = 0;
    while p < n {
        let mut q = p;
        while q < n && key[q].0 == key[p].0 {
            q += 1;
        }
        for &(_, v) in &key[p..q] {
            part.cell[v as usize] = p as u32;
        }
        part.len[p] = (q - p) as u32;
        part.left[p] = key[p..q].iter().filter(|&&(_, v)| (v as usize) < n1).count() as u32;
        cells.push(p as u32);
        p = q;
    }
    if cells.iter().any(|&c| !part.balanced(c)) {
        return false;
    }

    let mut rf =
        Refiner { adj: &adj, part, queue: Vec::new(), queued: vec![false; n], count: vec![0; n], touched: Vec::new() };
    for &c in &cells {
        rf.enqueue(c);
    }
    if !rf.refine() {
        return false;
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut scan = 0u32;
    loop {
        // Leftmost cell with more than one vertex per side.
        while (scan as usize) < n && rf.part.len[scan as usize] == 2 {
            scan += 2;
        }
        if scan as usize >= n {
            if is_isomorphism(&rf.part, &adj, n1) {
                return true;
            }
        } else {
            let members = rf.part.members(scan);
            let v = *members.iter().find(|&&v| (v as usize) < n1).expect("balanced cell");
            let mut candidates: Vec<u32> = members.iter().copied().filter(|&w| w as usize >= n1).collect();
            candidates.sort_unstable();
            stack.push(Frame { mark: rf.part.trail.len(), scan, v, candidates, next: 0 });
        }
        // Try the next pairing on the deepest frame with one left.
        loop {
            let Some(frame) = stack.last_mut() else {
                return false;
            };
            rf.part.undo_to(frame.mark);
            if frame.next == frame.candidates.len() {
                stack.pop();
                continue;
            }
            let (v, w) = (frame.v, frame.candidates[frame.next]);
            frame.next += 1;
            scan = frame.scan;
            if rf.individualize(v, w) {
                break;
            }
        }
    }
}

/// With every cell a pair `{left, right}`, checks that the induced
/// bijection preserves adjacency.
fn is_isomorphism(part: &Partition, adj: &[Vec<u32>], n1: usize) -> bool {
    let mut map = vec![0u32; n1];
    for c in (0..part.elems.len()).step_by(2) {
        let (a, b) = (part.elems[c], part.elems[c + 1]);
        let (l, r) = if (a as usize) < n1 { (a, b) } else { (b, a) };
        if l as usize >= n1 || (r as usize) < n1 {
            return false;
        }
        map[l as usize] = r;
    }
    (0..n1).all(|u| {
        let mut img: Vec<u32> = adj[u].iter().map(|&w| map[w as usize]).collect();
        let mut want = adj[map[u] as usize].clone();
        img.sort_unstable();
        want.sort_unstable();
        img == want
    })
}

/// Vertex bijection between `H_{G^k}` and `H_{H^j}` when `|G|^k = |H|^j`.
///
/// The tree over a group depends only on the group's order, so the map
/// keeps heights and addresses and reads each coefficient index of `G^k`
/// as the same index of `H^j`.
#[derive(Clone, Debug)]
pub struct RelabelIso {
    source: Horosphere,
    target: Horosphere,
}

pub fn relabel_iso(g: Arc<FiniteGroup>, k: usize, h: Arc<FiniteGroup>, j: usize) -> Result<RelabelIso> {
    let gk = (g.order() as u128).checked_pow(k as u32);
    let hj = (h.order() as u128).checked_pow(j as u32);
    if gk != hj || gk.is_none() {
        return Err(Error::HypothesisViolated(format!(
            "|G|^k = {}^{k} differs from |H|^j = {}^{j}",
            g.order(),
            h.order()
        )));
    }
    let source = Horosphere::lamplighter(Arc::new(g.direct_power(k)?));
    let target = Horosphere::lamplighter(Arc::new(h.direct_power(j)?));
    Ok(RelabelIso { source, target })
}

impl RelabelIso {
    pub fn source(&self) -> &Horosphere {
        &self.source
    }

    pub fn target(&self) -> &Horosphere {
        &self.target
    }

    pub fn map(&self, v: &HVertex) -> Result<HVertex> {
        if !self.source.contains(v) {
            return Err(Error::InvalidVertex(format!("{v} is not a source vertex")));
        }
        Ok(v.clone())
    }

    /// Maps the source ball of radius `radius` at the base vertex onto the
    /// target ball and checks that edges correspond and that the balls are
    /// isomorphic as rooted graphs.
    pub fn verify(&self, radius: u32, limits: Limits) -> Result<RelabelCheck> {
        let base = HVertex::base();
        let a = self.source.ball(&base, radius, limits)?;
        let b = self.target.ball(&base, radius, limits)?;
        let mut edges_preserved = a.len() == b.len() && a.edge_count() == b.edge_count();
        if edges_preserved {
            let img: Vec<u32> = a
                .vertices()
                .iter()
                .map(|v| self.map(v).ok().and_then(|w| b.index_of(&w)).unwrap_or(UNREACHED))
                .collect();
            edges_preserved = img.iter().all(|&i| i != UNREACHED)
                && a.edges().all(|(u, v)| b.has_edge(img[u as usize], img[v as usize]));
        }
        let isomorphic = ball_isomorphic(&a, 0, &b, 0);
        Ok(RelabelCheck { radius, vertices: a.len(), edges: a.edge_count(), edges_preserved, isomorphic })
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct RelabelCheck {
    pub radius: u32,
    pub vertices: usize,
    pub edges: usize,
    pub edges_preserved: bool,
    pub isomorphic: bool,
}
