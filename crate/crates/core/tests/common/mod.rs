#![allow(dead_code)]

use std::sync::Arc;

use dlgeo::{Elem, FiniteGroup, GroupLaurent, LampElement, Lamplighter};
use rand::Rng;

pub fn cyclic(q: usize) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(q).unwrap())
}

/// The symmetric group on three points, elements listed with the identity
/// first; the table is built by composing permutations.
pub fn s3() -> Arc<FiniteGroup> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|&x| x == p).unwrap() as Elem;
    let rows: Vec<Vec<Elem>> =
        perms.iter().map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
    Arc::new(FiniteGroup::from_table(&rows).unwrap())
}

/// A series with independent uniform coefficients at exponents `lo..=hi`.
pub fn random_series(group: &Arc<FiniteGroup>, rng: &mut impl Rng, lo: i64, hi: i64) -> GroupLaurent {
    let q = group.order() as Elem;
    let pairs: Vec<(i64, Elem)> = (lo..=hi).map(|i| (i, rng.gen_range(0..q))).collect();
    GroupLaurent::from_pairs(group.clone(), pairs).unwrap()
}

pub fn random_lamp(lamp: &Lamplighter, rng: &mut impl Rng, w: i64) -> LampElement {
    LampElement::new(random_series(lamp.group(), rng, -w, w), rng.gen_range(-w..=w))
}

/// Every series supported in `lo..=hi`.
pub fn all_series(group: &Arc<FiniteGroup>, lo: i64, hi: i64) -> Vec<GroupLaurent> {
    let q = group.order() as u64;
    let n = (hi - lo + 1) as u32;
    (0..q.pow(n))
        .map(|mut code| {
            let pairs: Vec<(i64, Elem)> = (lo..=hi)
                .map(|i| {
                    let g = (code % q) as Elem;
                    code /= q;
                    (i, g)
                })
                .collect();
            GroupLaurent::from_pairs(group.clone(), pairs).unwrap()
        })
        .collect()
}
