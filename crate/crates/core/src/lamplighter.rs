//! The lamplighter group `G wr Z = G[t, 1/t] x| Z` and its action on the
//! horosphere `H_G`.
//!
//! An element `(a, n)` is a finitely supported configuration `a` and a shift
//! `n`; the product is `(a, n)(b, m) = (a (n . b), n + m)` where
//! `n . sum g_i t^i = sum g_i t^(i-n)`. The group acts on `T_G x T_G` by
//! `c . (x, y) = (c . x, sigma(c) . y)`, with `sigma` reversing the
//! configuration and negating the shift, and this action preserves `H_G`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Limits};
use crate::group::{Elem, FiniteGroup};
use crate::horosphere::{HVertex, Horosphere};
use crate::laurent::{same_group, GroupLaurent};
use crate::tree::act_series_unchecked;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LampElement {
    cfg: GroupLaurent,
    shift: i64,
}

impl LampElement {
    pub fn new(cfg: GroupLaurent, shift: i64) -> Self {
        LampElement { cfg, shift }
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        LampElement { cfg: GroupLaurent::identity(group), shift: 0 }
    }

    pub fn cfg(&self) -> &GroupLaurent {
        &self.cfg
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.cfg.group()
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.cfg.is_identity()
    }

    /// Parses `({i:g, ..} | m)`.
    pub fn parse(group: Arc<FiniteGroup>, s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (cfg | m), got {s:?}")))?;
        let (cfg, m) = body.rsplit_once('|').ok_or_else(|| Error::Parse(format!("missing '|' in {s:?}")))?;
        let shift = m.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(LampElement { cfg: GroupLaurent::parse(group, cfg)?, shift })
    }
}

impl fmt::Display for LampElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.cfg, self.shift)
    }
}

impl fmt::Debug for LampElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for LampElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Configuration order first (support size, then lexicographic), then shift.
impl Ord for LampElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cfg.cmp(&other.cfg).then(self.shift.cmp(&other.shift))
    }
}

/// Result of [`Lamplighter::orbit_covers`].
#[derive(Clone, Debug)]
pub struct OrbitCover {
    pub covered: bool,
    pub window: i64,
    /// For each ball vertex, an element of the window moving the base vertex onto it.
    pub witnesses: Vec<Option<LampElement>>,
}

impl OrbitCover {
    pub fn uncovered(&self) -> usize {
        self.witnesses.iter().filter(|w| w.is_none()).count()
    }
}

/// `G wr Z` together with the horosphere it acts on.
#[derive(Clone, Debug)]
pub struct Lamplighter {
    group: Arc<FiniteGroup>,
    space: Horosphere,
}

impl Lamplighter {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        let space = Horosphere::lamplighter(group.clone());
        Lamplighter { group, space }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn horosphere(&self) -> &Horosphere {
        &self.space
    }

    pub fn identity(&self) -> LampElement {
        LampElement::identity(self.group.clone())
    }

    /// Convenience constructor from `(exponent, element)` pairs.
    pub fn element(&self, pairs: &[(i64, Elem)], shift: i64) -> Result<LampElement> {
        Ok(LampElement::new(GroupLaurent::from_pairs(self.group.clone(), pairs.iter().copied())?, shift))
    }

    fn check(&self, u: &LampElement) -> Result<()> {
        if same_group(u.group(), &self.group) {
            Ok(())
        } else {
            Err(Error::IncompatibleOperands("lamplighter element over a different group"))
        }
    }

    fn check_vertex(&self, v: &HVertex) -> Result<()> {
        if self.space.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(format!("{v} is not a vertex of this horosphere")))
        }
    }

    pub fn mul(&self, u: &LampElement, v: &LampElement) -> Result<LampElement> {
        self.check(u)?;
        self.check(v)?;
        Ok(mul_unchecked(u, v))
    }

    pub fn inv(&self, u: &LampElement) -> LampElement {
        LampElement { cfg: u.cfg.inv().shift(-u.shift), shift: -u.shift }
    }

    pub fn sigma(&self, u: &LampElement) -> LampElement {
        LampElement { cfg: u.cfg.reverse(), shift: -u.shift }
    }

    /// The diagonal action `(x, y) -> (u . x, sigma(u) . y)`.
    pub fn act_h(&self, u: &LampElement, v: &HVertex) -> Result<HVertex> {
        self.check(u)?;
        self.check_vertex(v)?;
        Ok(act_h_unchecked(&self.group, u, v))
    }

    /// Some element moving the base vertex onto `v`, with the identity
    /// coefficient at the one exponent the action does not see.
    ///
    /// At shift `m` the left coordinate reads the configuration at exponents
    /// `<= -m-1` and the right coordinate reads the reversed configuration at
    /// exponents `>= -m+1`; exponent `-m` is free.
    pub fn orbit_witness(&self, v: &HVertex) -> Result<LampElement> {
        self.check_vertex(v)?;
        let m = v.height();
        let mut pairs: Vec<(i64, Elem)> = v.x().address().collect();
        pairs.extend(v.y().address().map(|(j, g)| (-j, g)));
        pairs.sort_unstable_by_key(|&(i, _)| i);
        Ok(LampElement::new(GroupLaurent::from_sorted(self.group.clone(), pairs), m))
    }

    /// All elements with support in `[-window, window]` and `|shift| <= window`
    /// fixing `v`, in ascending order.
    ///
    /// A nonzero shift moves heights, so only shift 0 can fix `v`. At shift 0
    /// the action multiplies each address coefficient by the configuration
    /// coefficient at the same (left) or mirrored (right) exponent, so an
    /// element fixes `v` exactly when each of its single lamps does. The
    /// search tests every single lamp in the window and enumerates the
    /// product of the surviving choices.
    pub fn stabilizer_probe(&self, v: &HVertex, window: i64, limits: Limits) -> Result<Vec<LampElement>> {
        self.check_vertex(v)?;
        if window < 0 {
            return Err(Error::InvalidArgument(format!("negative window {window}")));
        }
        let mut choices: Vec<(i64, Vec<Elem>)> = Vec::new();
        let mut total: u128 = 1;
        for i in -window..=window {
            let fixing: Vec<Elem> = self
                .group
                .elements()
                .filter(|&g| {
                    let lamp = LampElement::new(GroupLaurent::from_sorted(self.group.clone(), single(i, g)), 0);
                    act_h_unchecked(&self.group, &lamp, v) == *v
                })
                .collect();
            total = total.saturating_mul(fixing.len() as u128);
            if fixing.len() > 1 {
                choices.push((i, fixing));
            }
        }
        limits.check(total)?;
        let mut out = vec![Vec::new()];
        for (i, fixing) in &choices {
            let mut next = Vec::with_capacity(out.len() * fixing.len());
            for partial in &out {
                for &g in fixing {
                    let mut p: Vec<(i64, Elem)> = partial.clone();
                    if g != 0 {
                        p.push((*i, g));
                    }
                    next.push(p);
                }
            }
            out = next;
        }
        let mut elems: Vec<LampElement> =
            out.into_iter().map(|p| LampElement::new(GroupLaurent::from_sorted(self.group.clone(), p), 0)).collect();
        elems.sort();
        Ok(elems)
    }

    /// Whether every vertex of `ball` is `u . base` for some `u` with support
    /// in `[-window, window]` and `|shift| <= window`.
    ///
    /// The elements reaching a vertex form one coset of the base stabilizer
    /// and differ only at the free exponent, so the witness from
    /// [`Lamplighter::orbit_witness`] has the smallest support among them and
    /// decides membership. Each witness is re-checked through [`Lamplighter::act_h`].
    pub fn orbit_covers(&self, ball: &FiniteGraph<HVertex>, window: i64) -> Result<OrbitCover> {
        let base = HVertex::base();
        let mut witnesses = Vec::with_capacity(ball.len());
        for v in ball.vertices() {
            let u = self.orbit_witness(v)?;
            let inside = u.shift.abs() <= window
                && u.cfg.min_index().is_none_or(|i| i >= -window)
                && u.cfg.max_index().is_none_or(|i| i <= window);
            if inside && act_h_unchecked(&self.group, &u, &base) == *v {
                witnesses.push(Some(u));
            } else {
                witnesses.push(None);
            }
        }
        let covered = witnesses.iter().all(Option::is_some);
        Ok(OrbitCover { covered, window, witnesses })
    }

    /// Generators moving the base vertex to each of its `2q` neighbors, in
    /// the horosphere's neighbor order, closed under inverses.
    ///
    /// The neighbor `(parent, child(e))` is reached by `({-1: e, 0: e}, 1)`
    /// (identity entries dropped), and `(child(e), parent)` by the inverse of
    /// the generator for `e^-1`, `({0: e, 1: e}, -1)`. Any choice at exponent
    /// `-1` would reach the same neighbor; pairing it with `e` is the least
    /// choice, in [`LampElement`] order, that keeps the set closed under
    /// inverses.
    pub fn edge_generators(&self) -> Vec<LampElement> {
        let g = &self.group;
        let up = |e: Elem| {
            let pairs = if e == 0 { Vec::new() } else { vec![(-1, e), (0, e)] };
            LampElement::new(GroupLaurent::from_sorted(g.clone(), pairs), 1)
        };
        let mut out: Vec<LampElement> = g.elements().map(up).collect();
        out.extend(g.elements().map(|e| self.inv(&up(g.inv(e)))));
        out
    }

    /// Ball of radius `r` around the identity in the Cayley graph with edges
    /// `u ~ us`, `s` in `gens`.
    pub fn cayley_ball(&self, gens: &[LampElement], r: u32, limits: Limits) -> Result<FiniteGraph<LampElement>> {
        for s in gens {
            self.check(s)?;
            if s.is_identity() {
                return Err(Error::InvalidArgument("generating set contains the identity".into()));
            }
            if !gens.contains(&self.inv(s)) {
                return Err(Error::InvalidArgument(format!("generating set lacks the inverse of {s}")));
            }
        }
        FiniteGraph::ball(self.identity(), r, limits, |u| gens.iter().map(|s| mul_unchecked(u, s)).collect())
    }

    /// Word length of `u` if it is at most `max_len`.
    pub fn word_length(
        &self,
        gens: &[LampElement],
        u: &LampElement,
        max_len: u32,
        limits: Limits,
    ) -> Result<Option<u32>> {
        self.check(u)?;
        let ball = self.cayley_ball(gens, max_len, limits)?;
        Ok(ball.index_of(u).map(|i| ball.depths().expect("balls record depths")[i as usize]))
    }
}

fn single(i: i64, g: Elem) -> Vec<(i64, Elem)> {
    if g == 0 {
        Vec::new()
    } else {
        vec![(i, g)]
    }
}

pub(crate) fn mul_unchecked(u: &LampElement, v: &LampElement) -> LampElement {
    LampElement { cfg: u.cfg.mul_unchecked(&v.cfg.shift(u.shift)), shift: u.shift + v.shift }
}

pub(crate) fn act_h_unchecked(group: &FiniteGroup, u: &LampElement, v: &HVertex) -> HVertex {
    let x = act_series_unchecked(group, &u.cfg, &v.x().shifted(u.shift));
    let y = act_series_unchecked(group, &u.cfg.reverse(), &v.y().shifted(-u.shift));
    HVertex::new_unchecked(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeVertex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn lamp(q: usize) -> Lamplighter {
        Lamplighter::new(Arc::new(FiniteGroup::cyclic(q).unwrap()))
    }

    fn random(l: &Lamplighter, rng: &mut ChaCha8Rng) -> LampElement {
        let q = l.group().order() as Elem;
        let pairs: Vec<(i64, Elem)> = (-3..=3).map(|i| (i, rng.gen_range(0..q))).collect();
        l.element(&pairs, rng.gen_range(-3..=3)).unwrap()
    }

    #[test]
    fn product_examples() {
        let l = lamp(2);
        let id = l.identity();
        let v = l.element(&[(0, 1)], 0).unwrap();
        assert_eq!(l.mul(&id, &v).unwrap(), v);
        let t = l.element(&[], 1).unwrap();
        assert_eq!(l.mul(&t, &v).unwrap(), l.element(&[(-1, 1)], 1).unwrap());
        assert_eq!(l.inv(&id), id);
        assert_eq!(l.inv(&l.element(&[], 5).unwrap()), l.element(&[], -5).unwrap());
        let other = lamp(3);
        assert!(l.mul(&other.identity(), &v).is_err());
    }

    #[test]
    fn sigma_examples() {
        let l = lamp(3);
        assert_eq!(l.sigma(&l.identity()), l.identity());
        assert_eq!(l.sigma(&l.element(&[(2, 1)], 3).unwrap()), l.element(&[(-2, 1)], -3).unwrap());
    }

    #[test]
    fn group_laws_and_sigma_on_random_elements() {
        let l = lamp(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (a, b, c) = (random(&l, &mut rng), random(&l, &mut rng), random(&l, &mut rng));
            let ab_c = l.mul(&l.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = l.mul(&a, &l.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            assert!(l.mul(&l.inv(&a), &a).unwrap().is_identity());
            assert!(l.mul(&a, &l.inv(&a)).unwrap().is_identity());
            let ab = l.mul(&a, &b).unwrap();
            assert_eq!(l.sigma(&ab), l.mul(&l.sigma(&a), &l.sigma(&b)).unwrap());
            assert_eq!(l.sigma(&l.sigma(&a)), a);
        }
    }

    #[test]
    fn action_examples() {
        let l = lamp(2);
        let base = HVertex::base();
        let ball = l.horosphere().ball(&base, 2, Limits::default()).unwrap();
        for v in ball.vertices() {
            assert_eq!(l.act_h(&l.identity(), v).unwrap(), *v);
        }
        let t = l.element(&[], 1).unwrap();
        assert_eq!(l.act_h(&t, &base).unwrap(), HVertex::new(TreeVertex::on_axis(1), TreeVertex::on_axis(-1)).unwrap());
        assert_eq!(l.act_h(&l.element(&[(0, 1)], 0).unwrap(), &base).unwrap(), base);
    }

    #[test]
    fn action_composes_and_preserves_edges() {
        let l = lamp(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ball = l.horosphere().ball(&HVertex::base(), 3, Limits::default()).unwrap();
        for _ in 0..40 {
            let (u, w) = (random(&l, &mut rng), random(&l, &mut rng));
            let uw = l.mul(&u, &w).unwrap();
            for v in ball.vertices() {
                let img = l.act_h(&u, v).unwrap();
                assert_eq!(l.act_h(&uw, v).unwrap(), l.act_h(&u, &l.act_h(&w, v).unwrap()).unwrap());
                assert_eq!(img.x().height(), v.x().height() + u.shift());
                assert_eq!(img.y().height(), v.y().height() - u.shift());
            }
            for (a, b) in ball.edges() {
                let ia = l.act_h(&u, ball.vertex(a)).unwrap();
                let ib = l.act_h(&u, ball.vertex(b)).unwrap();
                assert!(l.horosphere().neighbors(&ia).contains(&ib));
            }
        }
    }

    /// Every element with support and shift in the window, by brute force.
    fn window_elements(l: &Lamplighter, w: i64) -> Vec<LampElement> {
        let q = l.group().order() as u64;
        let n = (2 * w + 1) as u32;
        let mut out = Vec::new();
        for code in 0..q.pow(n) {
            let mut c = code;
            let mut pairs = Vec::new();
            for i in -w..=w {
                pairs.push((i, (c % q) as Elem));
                c /= q;
            }
            for m in -w..=w {
                out.push(l.element(&pairs, m).unwrap());
            }
        }
        out
    }

    #[test]
    fn stabilizer_matches_brute_force() {
        for (q, w) in [(2, 3), (3, 2)] {
            let l = lamp(q);
            let all = window_elements(&l, w);
            let ball = l.horosphere().ball(&HVertex::base(), 2, Limits::default()).unwrap();
            for v in ball.vertices().iter().take(12) {
                let mut brute: Vec<LampElement> =
                    all.iter().filter(|u| l.act_h(u, v).unwrap() == *v).cloned().collect();
                brute.sort();
                let probe = l.stabilizer_probe(v, w, Limits::default()).unwrap();
                assert_eq!(probe, brute);
                // the free exponent sits inside this window for these vertices
                assert_eq!(probe.len(), q);
                for a in &probe {
                    for b in &probe {
                        assert!(probe.contains(&l.mul(a, b).unwrap()));
                    }
                }
            }
        }
        let l = lamp(2);
        let base = l.stabilizer_probe(&HVertex::base(), 8, Limits::default()).unwrap();
        assert_eq!(base, vec![l.identity(), l.element(&[(0, 1)], 0).unwrap()]);
    }

    #[test]
    fn orbit_cover_matches_enumerated_orbit() {
        let l = lamp(2);
        let w = 3;
        let orbit: HashSet<HVertex> =
            window_elements(&l, w).iter().map(|u| l.act_h(u, &HVertex::base()).unwrap()).collect();
        for center in [HVertex::base(), HVertex::parse("[(1 | -3:1), (-1 | 0:1)]").unwrap()] {
            let ball = l.horosphere().ball(&center, 3, Limits::default()).unwrap();
            let cover = l.orbit_covers(&ball, w).unwrap();
            for (v, wit) in ball.vertices().iter().zip(&cover.witnesses) {
                assert_eq!(wit.is_some(), orbit.contains(v), "{v}");
                if let Some(u) = wit {
                    assert_eq!(l.act_h(u, &HVertex::base()).unwrap(), *v);
                }
            }
        }
        let b0 = l.horosphere().ball(&HVertex::base(), 0, Limits::default()).unwrap();
        let c0 = l.orbit_covers(&b0, 0).unwrap();
        assert!(c0.covered);
        assert_eq!(c0.witnesses[0], Some(l.identity()));
    }

    #[test]
    fn edge_generators_reach_each_neighbor() {
        for q in 1..=4 {
            let l = lamp(q);
            let s = l.edge_generators();
            assert_eq!(s.len(), 2 * q);
            let base = HVertex::base();
            let images: Vec<HVertex> = s.iter().map(|u| l.act_h(u, &base).unwrap()).collect();
            assert_eq!(images, l.horosphere().neighbors(&base));
            for u in &s {
                assert!(u.shift() == 1 || u.shift() == -1);
                assert!(s.contains(&l.inv(u)));
            }
        }
    }

    #[test]
    fn cayley_star_and_word_lengths() {
        let l = lamp(2);
        let s = l.edge_generators();
        let b1 = l.cayley_ball(&s, 1, Limits::default()).unwrap();
        assert_eq!(b1.len(), 5);
        assert_eq!(b1.edge_count(), 4);
        let id_step = l.word_length(&s, &s[1], 3, Limits::default()).unwrap();
        assert_eq!(id_step, Some(1));
        let bad = vec![l.element(&[], 1).unwrap()];
        assert!(l.cayley_ball(&bad, 1, Limits::default()).is_err());
    }

    #[test]
    fn text_form() {
        let l = lamp(3);
        let u = l.element(&[(-1, 2), (0, 2)], 1).unwrap();
        assert_eq!(u.to_string(), "({-1:2, 0:2} | 1)");
        assert_eq!(LampElement::parse(l.group().clone(), "({-1:2, 0:2} | 1)").unwrap(), u);
        assert_eq!(LampElement::parse(l.group().clone(), "({} | 0)").unwrap(), l.identity());
        assert!(LampElement::parse(l.group().clone(), "{} | 0").is_err());
    }
}
