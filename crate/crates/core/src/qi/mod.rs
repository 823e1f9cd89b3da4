//! Quasi-isometry measurement.
//!
//! A map `phi` is a `(K, C)` quasi-isometric embedding when
//! `d(y1, y2) / K - C <= d(phi y1, phi y2) <= K d(y1, y2) + C` for all
//! pairs. Maps are measured on finite samples as lists of
//! `(d_source, d_image)` pairs; [`fit_qi`] finds the least additive constant
//! over a grid of exact rational multiplicative constants.

mod collapse;
mod iso;
mod orbit;

pub use collapse::{collapse_pairs, Collapse, CollapseReport};
pub use iso::{ball_isomorphic, relabel_iso, RelabelIso};
pub use orbit::orbit_qi;

use std::hash::Hash;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, UNREACHED};

pub type Rational = Ratio<i64>;

/// Balls up to this many vertices are measured on all pairs.
pub const ALL_PAIRS_LIMIT: usize = 2000;
/// Number of random pairs drawn from larger balls.
pub const SAMPLED_PAIRS: usize = 100_000;

/// Fitted constants for a sampled map.
#[derive(Clone, Debug, Serialize)]
pub struct QIReport {
    #[serde(rename = "K", serialize_with = "ser_ratio")]
    pub k: Rational,
    #[serde(rename = "C", serialize_with = "ser_ratio")]
    pub c: Rational,
    pub pairs: usize,
    /// Every point of the target region lies within this distance of the image.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<u64>,
    pub domain: String,
    pub codomain: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    pub exhaustive: bool,
}

impl QIReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Which inequality a pair breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub d_source: u64,
    pub d_image: u64,
    pub side: Side,
}

fn r(n: u64) -> Rational {
    Rational::from_integer(n as i64)
}

fn check_constants(k: Rational, c: Rational) -> Result<()> {
    if k < Rational::from_integer(1) || c < Rational::from_integer(0) {
        return Err(Error::InvalidArgument(format!("need K >= 1 and C >= 0, got K = {k}, C = {c}")));
    }
    Ok(())
}

/// First pair breaking either inequality, or `None` when all hold.
pub fn verify_qi(pairs: &[(u64, u64)], k: Rational, c: Rational) -> Result<Option<Violation>> {
    check_constants(k, c)?;
    for (index, &(ds, di)) in pairs.iter().enumerate() {
        let (s, i) = (r(ds), r(di));
        let side = if s / k - c > i {
            Side::Lower
        } else if i > k * s + c {
            Side::Upper
        } else {
            continue;
        };
        return Ok(Some(Violation { index, d_source: ds, d_image: di, side }));
    }
    Ok(None)
}

/// Least `C` making `(K, C)` hold on every pair.
pub fn min_additive(pairs: &[(u64, u64)], k: Rational) -> Rational {
    pairs
        .iter()
        .map(|&(ds, di)| {
            let (s, i) = (r(ds), r(di));
            (i - k * s).max(s / k - i)
        })
        .fold(Rational::from_integer(0), Rational::max)
}

/// `{1, 9/8, 5/4, 3/2, 2, 3, .., 16}`, plus `extra` when given.
pub fn default_grid(extra: Option<i64>) -> Vec<Rational> {
    let mut grid = vec![Rational::from_integer(1), Rational::new(9, 8), Rational::new(5, 4), Rational::new(3, 2)];
    grid.extend((2..=16).map(Rational::from_integer));
    if let Some(k) = extra {
        grid.push(Rational::from_integer(k));
    }
    grid.sort();
    grid.dedup();
    grid
}

/// The grid point with the least `C`; ties go to the smaller `K`.
pub fn fit_qi(pairs: &[(u64, u64)], grid: &[Rational]) -> Result<(Rational, Rational)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no distance pairs to fit"));
    }
    if grid.is_empty() {
        return Err(Error::EmptyInput("empty K grid"));
    }
    for &k in grid {
        check_constants(k, Rational::from_integer(0))?;
    }
    let costs: Vec<Rational> = grid.par_iter().map(|&k| min_additive(pairs, k)).collect();
    let (k, c) = grid.iter().zip(costs).min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(b.0))).expect("grid is nonempty");
    Ok((*k, c))
}

/// Largest sampled distance between `f(y)` and `g(y)`.
pub fn map_equivalent<V>(f: &[V], g: &[V], metric: impl Fn(&V, &V) -> u64 + Sync) -> Result<u64>
where
    V: Sync,
{
    if f.len() != g.len() {
        return Err(Error::InvalidArgument(format!("maps sampled on {} and {} points", f.len(), g.len())));
    }
    Ok(f.par_iter().zip(g).map(|(a, b)| metric(a, b)).max().unwrap_or(0))
}

/// Hausdorff distance between two vertex sets of `ambient`, measured with
/// the graph metric of `ambient`.
pub fn hausdorff<V>(a: &[u32], b: &[u32], ambient: &FiniteGraph<V>) -> Result<u64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("Hausdorff distance needs nonempty sets"));
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| v as usize >= ambient.len()) {
        return Err(Error::InvalidArgument(format!("vertex {v} is not in the ambient graph")));
    }
    let to_a = ambient.multi_source_bfs(a);
    let to_b = ambient.multi_source_bfs(b);
    let far = |dist: &[u32], set: &[u32]| set.iter().map(|&v| dist[v as usize]).max().unwrap_or(0);
    let d = far(&to_b, a).max(far(&to_a, b));
    if d == UNREACHED {
        return Err(Error::InvalidArgument("the sets lie in different components".into()));
    }
    Ok(d as u64)
}

/// [`hausdorff`] for vertex values, located in `ambient` by lookup.
pub fn hausdorff_vertices<V>(a: &[V], b: &[V], ambient: &FiniteGraph<V>) -> Result<u64>
where
    V: Clone + Eq + Hash + std::fmt::Display,
{
    let locate = |set: &[V]| -> Result<Vec<u32>> {
        set.iter()
            .map(|v| {
                ambient.index_of(v).ok_or_else(|| Error::InvalidArgument(format!("{v} is outside the ambient ball")))
            })
            .collect()
    };
    hausdorff(&locate(a)?, &locate(b)?, ambient)
}

/// Index pairs to measure on an `n`-vertex sample: all pairs `i < j` up to
/// [`ALL_PAIRS_LIMIT`] vertices, otherwise [`SAMPLED_PAIRS`] seeded draws.
pub fn sample_pairs(n: usize, seed: u64) -> (Vec<(u32, u32)>, bool) {
    if n <= ALL_PAIRS_LIMIT {
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                out.push((i, j));
            }
        }
        (out, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = (0..SAMPLED_PAIRS).map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32))).collect();
        (out, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Limits;

    #[test]
    fn verify_examples() {
        let id: Vec<(u64, u64)> = (0..20).map(|d| (d, d)).collect();
        assert_eq!(verify_qi(&id, Rational::from_integer(1), Rational::from_integer(0)).unwrap(), None);
        let v = verify_qi(&[(3, 3), (10, 1)], Rational::from_integer(2), Rational::from_integer(0)).unwrap().unwrap();
        assert_eq!((v.index, v.side), (1, Side::Lower));
        let v = verify_qi(&[(1, 5)], Rational::from_integer(2), Rational::from_integer(2)).unwrap().unwrap();
        assert_eq!(v.side, Side::Upper);
        assert!(verify_qi(&id, Rational::new(1, 2), Rational::from_integer(0)).is_err());
    }

    #[test]
    fn fit_examples() {
        let grid = default_grid(None);
        let id: Vec<(u64, u64)> = (0..20).map(|d| (d, d)).collect();
        assert_eq!(fit_qi(&id, &grid).unwrap(), (Rational::from_integer(1), Rational::from_integer(0)));
        let dbl: Vec<(u64, u64)> = (0..20).map(|d| (d, 2 * d)).collect();
        assert_eq!(fit_qi(&dbl, &grid).unwrap(), (Rational::from_integer(2), Rational::from_integer(0)));
        // constant map on a set of diameter 8
        let constant: Vec<(u64, u64)> = (0..=8).map(|d| (d, 0)).collect();
        assert_eq!(min_additive(&constant, Rational::from_integer(1)), Rational::from_integer(8));
        assert!(fit_qi(&[], &grid).is_err());
    }

    #[test]
    fn fitted_constants_verify() {
        let pairs = vec![(4, 7), (9, 5), (1, 2), (12, 20), (0, 1)];
        let (k, c) = fit_qi(&pairs, &default_grid(None)).unwrap();
        assert_eq!(verify_qi(&pairs, k, c).unwrap(), None);
    }

    #[test]
    fn report_json() {
        let rep = QIReport {
            k: Rational::new(3, 2),
            c: Rational::from_integer(4),
            pairs: 10,
            density: Some(1),
            domain: "a".into(),
            codomain: "b".into(),
            radius: None,
            exhaustive: true,
        };
        assert_eq!(
            rep.to_json(),
            r#"{"K":"3/2","C":"4","pairs":10,"density":1,"domain":"a","codomain":"b","exhaustive":true}"#
        );
    }

    #[test]
    fn hausdorff_examples() {
        let line = FiniteGraph::ball(0i64, 6, Limits::default(), |&x| vec![x - 1, x + 1]).unwrap();
        let at = |x: i64| line.index_of(&x).unwrap();
        assert_eq!(hausdorff(&[at(2), at(3)], &[at(2), at(3)], &line).unwrap(), 0);
        assert_eq!(hausdorff(&[at(-2)], &[at(3)], &line).unwrap(), 5);
        assert_eq!(hausdorff(&[at(0)], &[at(0), at(4)], &line).unwrap(), 4);
        assert!(hausdorff(&[], &[at(0)], &line).is_err());
        assert_eq!(hausdorff_vertices(&[1i64], &[-1], &line).unwrap(), 2);
    }

    #[test]
    fn map_equivalent_examples() {
        let f: Vec<i64> = (0..10).collect();
        let g: Vec<i64> = f.iter().map(|x| x + 1).collect();
        let metric = |a: &i64, b: &i64| (a - b).unsigned_abs();
        assert_eq!(map_equivalent(&f, &f, metric).unwrap(), 0);
        assert_eq!(map_equivalent(&f, &g, metric).unwrap(), 1);
        assert!(map_equivalent(&f, &g[..3], metric).is_err());
    }

    #[test]
    fn pair_sampling() {
        let (all, exact) = sample_pairs(5, 0);
        assert!(exact);
        assert_eq!(all.len(), 10);
        let (a, exact) = sample_pairs(ALL_PAIRS_LIMIT + 1, 9);
        assert!(!exact);
        assert_eq!(a.len(), SAMPLED_PAIRS);
        assert_eq!(a, sample_pairs(ALL_PAIRS_LIMIT + 1, 9).0);
    }
}
