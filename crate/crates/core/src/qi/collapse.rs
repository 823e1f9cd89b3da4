//! Collapsing `T_G` onto `T_{G^k}` and `H_G` onto `H_{G^k}`.
//!
//! Every vertical path spanning heights `[lk, lk + k - 1]` collapses to a
//! point, which identifies each vertex with its ancestor at the top height
//! `lk + k - 1` of its block; the point gets height `l`. That ancestor is
//! determined by the coefficients at exponents `<= -(l + 1)k`, and the
//! coefficients at exponents `(j - 1)k + 1, .., jk` are packed into the one
//! `G^k` coefficient at exponent `j`, component `i` holding exponent
//! `(j - 1)k + 1 + i`.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{fit_qi, hausdorff_vertices, map_equivalent, min_additive, sample_pairs, QIReport, Rational};
use crate::error::{Error, Result};
use crate::graph::Limits;
use crate::group::{encode_tuple, Elem, FiniteGroup};
use crate::horosphere::{distance_formula_unchecked, HVertex, Horosphere};
use crate::tree::{distance_unchecked, Tree, TreeVertex};

#[derive(Clone, Debug)]
pub struct Collapse {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    k: usize,
}

impl Collapse {
    pub fn new(group: Arc<FiniteGroup>, k: usize) -> Result<Self> {
        let target = Arc::new(group.direct_power(k)?);
        Ok(Collapse { source: group, target, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn source_tree(&self) -> Tree {
        Tree::new(self.source.clone())
    }

    pub fn target_tree(&self) -> Tree {
        Tree::new(self.target.clone())
    }

    pub fn source_horosphere(&self) -> Horosphere {
        Horosphere::lamplighter(self.source.clone())
    }

    pub fn target_horosphere(&self) -> Horosphere {
        Horosphere::lamplighter(self.target.clone())
    }

    pub fn vertex(&self, v: &TreeVertex) -> TreeVertex {
        let k = self.k as i64;
        let q = self.source.order();
        let height = v.height().div_euclid(k);
        let top = -(height + 1) * k;
        let mut blocks: Vec<(i64, Vec<Elem>)> = Vec::new();
        for (e, g) in v.address().take_while(|&(e, _)| e <= top) {
            let j = (e + k - 1).div_euclid(k);
            if blocks.last().is_none_or(|b| b.0 != j) {
                blocks.push((j, vec![0; self.k]));
            }
            blocks.last_mut().expect("block pushed").1[(e - 1).rem_euclid(k) as usize] = g;
        }
        let entries = blocks.into_iter().map(|(j, comps)| (j, encode_tuple(q, comps)));
        TreeVertex::new(height, entries).expect("packed exponents lie below the new top")
    }

    /// Collapses both coordinates. When `k` does not divide the height the
    /// two new heights sum to `-1`; the right coordinate then moves to its
    /// parent, and the flag reports that correction.
    pub fn h(&self, v: &HVertex) -> (HVertex, bool) {
        let x = self.vertex(v.x());
        let y = self.vertex(v.y());
        if x.height() + y.height() == 0 {
            (HVertex::new_unchecked(x, y), false)
        } else {
            debug_assert_eq!(x.height() + y.height(), -1);
            (HVertex::new_unchecked(x, y.parent()), true)
        }
    }

    fn check(&self, v: &TreeVertex) -> Result<()> {
        if self.source_tree().contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(format!("{v} is not a vertex of the source tree")))
        }
    }

    /// Everything measured by [`collapse_pairs`] and the horosphere
    /// comparison, for one tree ball and one horosphere ball at the base.
    pub fn measure(
        &self,
        tree_radius: u32,
        h_radius: u32,
        grid: &[Rational],
        seed: u64,
        limits: Limits,
    ) -> Result<CollapseReport> {
        let root = TreeVertex::root();
        let (pairs, exhaustive) = collapse_pairs(self, &root, tree_radius, limits, seed)?;
        let (kk, c) = fit_qi(&pairs, grid)?;
        let k = Rational::from_integer(self.k as i64);
        let law = pairs
            .iter()
            .map(|&(d, dc)| {
                let diff = Rational::from_integer(dc as i64) - Rational::from_integer(d as i64) / k;
                if diff < Rational::from_integer(0) {
                    -diff
                } else {
                    diff
                }
            })
            .max()
            .unwrap_or_default();

        let ball = self.source_tree().ball(&root, tree_radius, limits)?;
        let shift_k: Vec<TreeVertex> = ball.vertices().iter().map(|v| self.vertex(&v.shifted(self.k as i64))).collect();
        let shift_1: Vec<TreeVertex> = ball.vertices().iter().map(|v| self.vertex(v).shifted(1)).collect();
        let commute = map_equivalent(&shift_k, &shift_1, distance_unchecked)?;

        let hz = self.h_image_hausdorff(h_radius, limits)?;
        Ok(CollapseReport {
            qi: QIReport {
                k: kk,
                c,
                pairs: pairs.len(),
                density: None,
                domain: format!("T over a group of order {}", self.source.order()),
                codomain: format!("T over a group of order {}", self.target.order()),
                radius: Some(tree_radius),
                exhaustive,
            },
            c_at_k: min_additive(&pairs, k),
            law_deviation: law,
            shift_commutation: commute,
            h_radius,
            target_radius: hz.target_radius,
            hausdorff: hz.distance,
            corrected: hz.corrected,
            image_size: hz.image_size,
        })
    }

    /// Hausdorff distance between the image of the radius-`h_radius` ball of
    /// `H_G` and the radius-`ceil(h_radius / k)` ball of `H_{G^k}`, both at
    /// the base vertex, measured in a surrounding ball of `H_{G^k}`.
    pub fn h_image_hausdorff(&self, h_radius: u32, limits: Limits) -> Result<HImage> {
        let base = HVertex::base();
        let src = self.source_horosphere().ball(&base, h_radius, limits)?;
        let mut corrected = 0;
        let mut image: Vec<HVertex> = Vec::with_capacity(src.len());
        let mut seen = FxHashMap::default();
        for v in src.vertices() {
            let (w, fix) = self.h(v);
            corrected += usize::from(fix);
            if seen.insert(w.clone(), ()).is_none() {
                image.push(w);
            }
        }
        let target_radius = h_radius.div_ceil(self.k as u32);
        let th = self.target_horosphere();
        let tball = th.ball(&base, target_radius, limits)?;
        let reach =
            image.iter().chain(tball.vertices()).map(|w| distance_formula_unchecked(&base, w)).max().unwrap_or(0);
        // Geodesics between points of the two sets stay within this margin
        // whenever the reported distance is at most the margin.
        let ambient = th.ball(&base, reach as u32 + AMBIENT_MARGIN, limits)?;
        let distance = hausdorff_vertices(&image, tball.vertices(), &ambient)?;
        Ok(HImage { distance, target_radius, corrected, image_size: image.len() })
    }
}

const AMBIENT_MARGIN: u32 = 4;

#[derive(Clone, Debug, Serialize)]
pub struct HImage {
    pub distance: u64,
    pub target_radius: u32,
    pub corrected: usize,
    pub image_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    #[serde(flatten)]
    pub qi: QIReport,
    /// Least additive constant at multiplicative constant `k`.
    #[serde(serialize_with = "super::ser_ratio")]
    pub c_at_k: Rational,
    /// Largest `|d' - d/k|` over the measured tree pairs.
    #[serde(serialize_with = "super::ser_ratio")]
    pub law_deviation: Rational,
    /// Sup-distance between collapse after shifting by `k` and shifting by 1 after collapse.
    pub shift_commutation: u64,
    pub h_radius: u32,
    pub target_radius: u32,
    pub hausdorff: u64,
    /// Image vertices whose right coordinate was moved to restore the height sum.
    pub corrected: usize,
    pub image_size: usize,
}

/// `(d, d')` for vertex pairs of the radius-`radius` ball of `T_G` around
/// `center`: the source distance and the distance between the collapsed
/// vertices.
pub fn collapse_pairs(
    c: &Collapse,
    center: &TreeVertex,
    radius: u32,
    limits: Limits,
    seed: u64,
) -> Result<(Vec<(u64, u64)>, bool)> {
    c.check(center)?;
    let ball = c.source_tree().ball(center, radius, limits)?;
    let images: Vec<TreeVertex> = ball.vertices().par_iter().map(|v| c.vertex(v)).collect();
    let (idx, exhaustive) = sample_pairs(ball.len(), seed);
    let pairs = idx
        .par_iter()
        .map(|&(i, j)| {
            let d = distance_unchecked(ball.vertex(i), ball.vertex(j));
            let dc = distance_unchecked(&images[i as usize], &images[j as usize]);
            (d, dc)
        })
        .collect();
    Ok((pairs, exhaustive))
}
