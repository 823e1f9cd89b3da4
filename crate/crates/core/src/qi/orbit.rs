//! The orbit map `u -> u . base` from `G wr Z`, with the word metric of the
//! edge generators, to the horosphere `H_G`.

use rayon::prelude::*;

use super::{fit_qi, sample_pairs, QIReport, Rational};
use crate::error::{Error, Result};
use crate::graph::{Limits, UNREACHED};
use crate::horosphere::HVertex;
use crate::lamplighter::{act_h_unchecked, mul_unchecked, Lamplighter};

/// Measures the orbit map on the Cayley ball of radius `radius`.
///
/// Both metrics are invariant under the group, so `|u^-1 v|` is read off a
/// Cayley ball of radius `2 * radius` and the horosphere distance of
/// `u . base` and `v . base` is the BFS depth of `u^-1 v . base` in the
/// horosphere ball of the same radius. `density` is the largest distance
/// from a vertex of the radius-`radius` horosphere ball to the image,
/// measured inside the larger ball.
pub fn orbit_qi(lamp: &Lamplighter, radius: u32, grid: &[Rational], seed: u64, limits: Limits) -> Result<QIReport> {
    let gens = lamp.edge_generators();
    let wide = 2 * radius;
    let cayley = lamp.cayley_ball(&gens, wide, limits)?;
    let word = cayley.depths().expect("balls record depths");
    let inner = word.partition_point(|&d| d <= radius);

    let base = HVertex::base();
    let space = lamp.horosphere().ball(&base, wide, limits)?;
    let h_depth = space.depths().expect("balls record depths");

    let group = lamp.group();
    let (idx, exhaustive) = sample_pairs(inner, seed);
    let pairs: Vec<(u64, u64)> = idx
        .par_iter()
        .map(|&(i, j)| {
            let u = cayley.vertex(i);
            let v = cayley.vertex(j);
            let w = mul_unchecked(&lamp.inv(u), v);
            let dw = cayley.index_of(&w).map(|t| word[t as usize]);
            let dh = space.index_of(&act_h_unchecked(group, &w, &base)).map(|t| h_depth[t as usize]);
            match (dw, dh) {
                (Some(a), Some(b)) => Ok((a as u64, b as u64)),
                _ => Err(Error::InvalidArgument(format!("pair ({u}, {v}) left the measured balls"))),
            }
        })
        .collect::<Result<_>>()?;
    let (k, c) = fit_qi(&pairs, grid)?;

    let image: Vec<u32> = cayley.vertices()[..inner]
        .par_iter()
        .map(|u| space.index_of(&act_h_unchecked(group, u, &base)).unwrap_or(UNREACHED))
        .collect();
    if image.contains(&UNREACHED) {
        return Err(Error::InvalidArgument("orbit image left the measured ball".into()));
    }
    let to_image = space.multi_source_bfs(&image);
    let density = (0..space.len()).filter(|&i| h_depth[i] <= radius).map(|i| to_image[i]).max().unwrap_or(0);

    Ok(QIReport {
        k,
        c,
        pairs: pairs.len(),
        density: Some(density as u64),
        domain: format!("Cayley graph of G wr Z, |G| = {}, edge generators", group.order()),
        codomain: format!("H_G, |G| = {}", group.order()),
        radius: Some(radius),
        exhaustive,
    })
}
