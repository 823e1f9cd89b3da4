//! The regular `(q+1)`-valent tree built from Laurent series over a group
//! of order `q`.
//!
//! Every series `a` traces a line; two lines are glued at height `t` when
//! the series agree on all exponents `< -t`. A vertex at integer height `h`
//! is therefore determined by the coefficients at exponents `<= -h-1`,
//! which is the finite *address* stored in a [`TreeVertex`]. Moving to the
//! parent forgets the coefficient at `-h-1`; each child fixes the
//! coefficient at `-h`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Limits};
use crate::group::{Elem, FiniteGroup};
use crate::laurent::{parse_terms, same_group, write_terms, GroupLaurent};

/// Canonical tree vertex: a height and the address below it.
///
/// `digits` lists the address from the deepest (most negative) exponent up
/// to exponent `-height-1`; its first entry is never the identity, so the
/// encoding is unique.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    height: i64,
    digits: Vec<Elem>,
}

impl TreeVertex {
    /// `(0, {})`, the point of height 0 on the identity line.
    pub fn root() -> Self {
        TreeVertex { height: 0, digits: Vec::new() }
    }

    pub fn on_axis(height: i64) -> Self {
        TreeVertex { height, digits: Vec::new() }
    }

    /// Builds a vertex from its height and address entries. Every exponent
    /// must be at most `-height-1`; identity entries are dropped.
    pub fn new(height: i64, address: impl IntoIterator<Item = (i64, Elem)>) -> Result<Self> {
        let top = -height - 1;
        let mut entries: Vec<(i64, Elem)> = address.into_iter().filter(|&(_, g)| g != 0).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        if let Some(&(i, _)) = entries.iter().find(|&&(i, _)| i > top) {
            return Err(Error::InvalidVertex(format!("address exponent {i} above {top} at height {height}")));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidVertex("repeated address exponent".into()));
        }
        let Some(&(low, _)) = entries.first() else {
            return Ok(TreeVertex::on_axis(height));
        };
        let mut digits = vec![0; (top - low + 1) as usize];
        for (i, g) in entries {
            digits[(i - low) as usize] = g;
        }
        Ok(TreeVertex { height, digits })
    }

    #[inline]
    pub fn height(&self) -> i64 {
        self.height
    }

    /// Exponent of `digits[0]`, the deepest stored coordinate.
    #[inline]
    fn low(&self) -> i64 {
        -self.height - self.digits.len() as i64
    }

    /// Deepest non-identity address exponent.
    pub fn min_index(&self) -> Option<i64> {
        (!self.digits.is_empty()).then(|| self.low())
    }

    /// Address coefficient at exponent `i`; identity outside the stored range.
    pub fn digit_at(&self, i: i64) -> Elem {
        let low = self.low();
        if i < low || i > -self.height - 1 {
            0
        } else {
            self.digits[(i - low) as usize]
        }
    }

    /// Non-identity address entries in ascending exponent order.
    pub fn address(&self) -> impl Iterator<Item = (i64, Elem)> + '_ {
        let low = self.low();
        self.digits.iter().enumerate().filter(|&(_, &g)| g != 0).map(move |(p, &g)| (low + p as i64, g))
    }

    /// The representative series with identity coefficients above the address.
    pub fn representative(&self, group: Arc<FiniteGroup>) -> GroupLaurent {
        GroupLaurent::from_sorted(group, self.address().collect())
    }

    /// Neighbor toward the end at infinity.
    pub fn parent(&self) -> TreeVertex {
        let mut digits = self.digits.clone();
        digits.pop();
        TreeVertex { height: self.height + 1, digits }
    }

    /// The child placing `g` at exponent `-height`.
    pub fn child(&self, g: Elem) -> TreeVertex {
        let mut digits = Vec::with_capacity(self.digits.len() + 1);
        digits.extend_from_slice(&self.digits);
        if !(digits.is_empty() && g == 0) {
            digits.push(g);
        }
        TreeVertex { height: self.height - 1, digits }
    }

    /// `n . x`: raises the height by `n`. The address is reindexed by
    /// `i -> i - n`, which leaves the stored digits unchanged.
    pub fn shifted(&self, n: i64) -> TreeVertex {
        TreeVertex { height: self.height + n, digits: self.digits.clone() }
    }

    pub(crate) fn from_raw(height: i64, mut digits: Vec<Elem>) -> TreeVertex {
        let lead = digits.iter().take_while(|&&g| g == 0).count();
        digits.drain(..lead);
        TreeVertex { height, digits }
    }

    /// Parses `(h | i:g, j:h)`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (h | ..), got {s:?}")))?;
        let (h, rest) = body.split_once('|').ok_or_else(|| Error::Parse(format!("missing '|' in {s:?}")))?;
        let height = h.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        TreeVertex::new(height, parse_terms(rest)?)
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} |", self.height)?;
        if !self.digits.is_empty() {
            f.write_str(" ")?;
            write_terms(f, self.address())?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The tree over a fixed coefficient group.
#[derive(Clone, Debug)]
pub struct Tree {
    group: Arc<FiniteGroup>,
}

impl Tree {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        Tree { group }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Number of children of each vertex; the valence is one more.
    pub fn branching(&self) -> usize {
        self.group.order()
    }

    pub fn contains(&self, v: &TreeVertex) -> bool {
        v.digits.iter().all(|&g| self.group.contains(g))
    }

    fn check(&self, v: &TreeVertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(format!("{v} has a coefficient outside a group of order {}", self.group.order())))
        }
    }

    fn check_series(&self, a: &GroupLaurent) -> Result<()> {
        if same_group(a.group(), &self.group) {
            Ok(())
        } else {
            Err(Error::IncompatibleOperands("series and tree use different coefficient groups"))
        }
    }

    /// The point at height `t` on the line of `a`.
    pub fn vertex_of(&self, a: &GroupLaurent, t: i64) -> Result<TreeVertex> {
        self.check_series(a)?;
        let top = -t - 1;
        Ok(TreeVertex::new(t, a.terms().iter().copied().take_while(|&(i, _)| i <= top))
            .expect("entries below the top exponent"))
    }

    /// The `q` children in group-element order.
    pub fn children(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        self.group.elements().map(|g| v.child(g)).collect()
    }

    /// Parent first, then the children.
    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = Vec::with_capacity(self.group.order() + 1);
        out.push(v.parent());
        out.extend(self.group.elements().map(|g| v.child(g)));
        out
    }

    /// Graph distance, via the first common ancestor toward infinity.
    pub fn distance(&self, u: &TreeVertex, v: &TreeVertex) -> Result<u64> {
        self.check(u)?;
        self.check(v)?;
        Ok(distance_unchecked(u, v))
    }

    /// `a . rho_b(t) = rho_ab(t)`: left-multiplies the address by the
    /// coefficients of `a` below the vertex.
    pub fn act_series(&self, a: &GroupLaurent, v: &TreeVertex) -> Result<TreeVertex> {
        self.check_series(a)?;
        Ok(act_series_unchecked(&self.group, a, v))
    }

    /// `n . rho_a(t) = rho_(n.a)(t + n)`.
    pub fn act_shift(&self, n: i64, v: &TreeVertex) -> TreeVertex {
        v.shifted(n)
    }

    /// `(a, n) . x = a . (n . x)`.
    pub fn act_affine(&self, a: &GroupLaurent, n: i64, v: &TreeVertex) -> Result<TreeVertex> {
        self.check_series(a)?;
        Ok(act_series_unchecked(&self.group, a, &v.shifted(n)))
    }

    /// Number of vertices within distance `r` of any vertex.
    pub fn ball_size(&self, r: u32) -> u128 {
        let q = self.group.order() as u128;
        if q == 1 {
            return 2 * r as u128 + 1;
        }
        let pow = q.saturating_pow(r);
        1u128.saturating_add((q + 1).saturating_mul(pow - 1) / (q - 1))
    }

    pub fn ball(&self, center: &TreeVertex, r: u32, limits: Limits) -> Result<FiniteGraph<TreeVertex>> {
        self.check(center)?;
        limits.check(self.ball_size(r))?;
        FiniteGraph::ball(center.clone(), r, limits, |v| self.neighbors(v))
    }
}

pub(crate) fn act_series_unchecked(group: &FiniteGroup, a: &GroupLaurent, v: &TreeVertex) -> TreeVertex {
    let top = -v.height - 1;
    let terms = a.terms();
    let below = terms.partition_point(|&(i, _)| i <= top);
    if below == 0 {
        return v.clone();
    }
    let low = terms[0].0.min(if v.digits.is_empty() { top } else { v.low() });
    let mut digits = vec![0; (top - low + 1) as usize];
    let vlow = v.low();
    for (p, &g) in v.digits.iter().enumerate() {
        digits[(vlow + p as i64 - low) as usize] = g;
    }
    for &(i, g) in &terms[..below] {
        let slot = &mut digits[(i - low) as usize];
        *slot = group.mul(g, *slot);
    }
    TreeVertex::from_raw(v.height, digits)
}

pub(crate) fn distance_unchecked(u: &TreeVertex, v: &TreeVertex) -> u64 {
    let top_h = u.height.max(v.height);
    // The ancestors at height H coincide iff the addresses agree at all
    // exponents <= -H-1; find the smallest exponent where they differ.
    let mut join = top_h;
    let top = -top_h - 1;
    let low = match (u.min_index(), v.min_index()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => top + 1,
    };
    if let Some(i) = (low..=top).find(|&i| u.digit_at(i) != v.digit_at(i)) {
        join = join.max(-i);
    }
    (2 * join - u.height - v.height) as u64
}
