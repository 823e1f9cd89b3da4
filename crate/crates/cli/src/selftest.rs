//! A reduced run of the library's invariant checks, sized to finish in a
//! few seconds. Prints one PASS/FAIL line per check.

use std::sync::Arc;
use std::time::Instant;

use dlgeo::qi::{default_grid, orbit_qi, relabel_iso, Collapse, Rational};
use dlgeo::{Elem, FiniteGroup, GroupLaurent, HVertex, Horosphere, Lamplighter, Limits, Tree, TreeVertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, Ctx};

type Check = fn(&mut ChaCha8Rng, Limits) -> Result<String, String>;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let checks: [(&str, Check); 9] = [
        ("group tables", groups),
        ("series ultrametric", ultrametric),
        ("tree regularity", tree),
        ("affine action", action),
        ("horosphere degree and distance", horosphere),
        ("lamplighter laws and stabilizer", lamplighter),
        ("orbit map constants", orbit),
        ("relabeling and collapse", relabel_and_collapse),
        ("long cycle", cycle),
    ];
    let mut out = String::new();
    let mut failed = Vec::new();
    for (name, check) in checks {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let start = Instant::now();
        let verdict = check(&mut rng, ctx.limits);
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => out.push_str(&format!("{name}: PASS [{secs:.2}s] {detail}\n")),
            Err(detail) => {
                out.push_str(&format!("{name}: FAIL [{secs:.2}s] {detail}\n"));
                failed.push(name);
            }
        }
    }
    out.push_str(&format!("selftest: {} passed, {} failed\n", checks.len() - failed.len(), failed.len()));
    ctx.emit(&out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s3() -> Arc<FiniteGroup> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap() as Elem;
    let rows: Vec<Vec<Elem>> =
        perms.iter().map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
    Arc::new(FiniteGroup::from_table(&rows).expect("S3 table"))
}

fn cyclic(q: usize) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(q).expect("positive order"))
}

fn random_series(g: &Arc<FiniteGroup>, rng: &mut ChaCha8Rng, span: i64) -> GroupLaurent {
    let order = g.order() as Elem;
    let mut terms: Vec<(i64, Elem)> = Vec::new();
    for i in -span..=span {
        if rng.gen_bool(0.4) {
            terms.push((i, rng.gen_range(0..order)));
        }
    }
    GroupLaurent::from_pairs(g.clone(), terms).expect("valid terms")
}

fn err(e: dlgeo::Error) -> String {
    e.to_string()
}

fn groups(_: &mut ChaCha8Rng, _: Limits) -> Result<String, String> {
    let s3 = s3();
    ensure(!s3.is_abelian(), || "S3 came out abelian".into())?;
    let cube = cyclic(2).direct_power(3).map_err(err)?;
    ensure(cube.order() == 8 && cube.is_abelian(), || "Z2^3 has the wrong shape".into())?;
    ensure(cube.elements().all(|a| cube.mul(a, a) == 0), || "Z2^3 has an element of order 4".into())?;
    let mut broken = cyclic(3).rows();
    broken[1].swap(0, 1);
    ensure(FiniteGroup::from_table(&broken).is_err(), || "a non-group table was accepted".into())?;
    Ok("S3, Z2^3 and a broken table".into())
}

fn ultrametric(rng: &mut ChaCha8Rng, _: Limits) -> Result<String, String> {
    let mut n = 0;
    for g in [cyclic(2), cyclic(3), s3()] {
        for _ in 0..1000 {
            let [a, b, c, h] = [0; 4].map(|_| random_series(&g, rng, 6));
            let d = |x: &GroupLaurent, y: &GroupLaurent| x.dist(y).expect("same group");
            ensure(d(&a, &c) >= d(&a, &b).min(d(&b, &c)), || format!("ultrametric fails on {a} {b} {c}"))?;
            let ha = h.mul(&a).map_err(err)?;
            let hb = h.mul(&b).map_err(err)?;
            let ah = a.mul(&h).map_err(err)?;
            let bh = b.mul(&h).map_err(err)?;
            ensure(d(&ha, &hb) == d(&a, &b) && d(&ah, &bh) == d(&a, &b), || format!("not bi-invariant: {a} {b} {h}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} triples"))
}

fn tree(_: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let mut total = 0;
    for q in [2, 3, 4] {
        let t = Tree::new(cyclic(q));
        let center = TreeVertex::parse("(1 | -3:1)").map_err(err)?;
        let ball = t.ball(&center, 4, limits).map_err(err)?;
        let depth = ball.depths().expect("balls record depths");
        for i in 0..ball.len() as u32 {
            if depth[i as usize] < 4 {
                ensure(ball.degree(i) == q + 1, || format!("degree {} in T_Z{q}", ball.degree(i)))?;
            }
            let d = t.distance(&center, ball.vertex(i)).map_err(err)?;
            ensure(d == depth[i as usize] as u64, || format!("distance {d} disagrees with BFS in T_Z{q}"))?;
        }
        ensure(ball.edge_count() + 1 == ball.len(), || "tree ball has a cycle".into())?;
        total += ball.len();
    }
    Ok(format!("{total} vertices"))
}

fn action(rng: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let g = s3();
    let t = Tree::new(g.clone());
    let ball = t.ball(&TreeVertex::root(), 3, limits).map_err(err)?;
    for _ in 0..20 {
        let a = random_series(&g, rng, 4);
        let n = rng.gen_range(-3..=3);
        for (u, v) in ball.edges() {
            let x = t.act_affine(&a, n, ball.vertex(u)).map_err(err)?;
            let y = t.act_affine(&a, n, ball.vertex(v)).map_err(err)?;
            ensure(t.distance(&x, &y).map_err(err)? == 1, || format!("edge {u}-{v} not preserved"))?;
            ensure(x.height() == ball.vertex(u).height() + n, || "height not shifted by n".into())?;
        }
    }
    Ok(format!("20 affine maps on {} edges", ball.edge_count()))
}

fn horosphere(_: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let mut parts = Vec::new();
    for (name, hs) in [
        ("H_Z2", Horosphere::lamplighter(cyclic(2))),
        ("H_S3", Horosphere::lamplighter(s3())),
        ("DL(2,3)", Horosphere::dl(2, 3).map_err(err)?),
    ] {
        let base = HVertex::base();
        let ball = hs.ball(&base, 5, limits).map_err(err)?;
        let depth = ball.depths().expect("balls record depths");
        ensure(ball.is_connected(), || format!("{name} ball is disconnected"))?;
        for i in 0..ball.len() as u32 {
            if depth[i as usize] < 5 {
                ensure(ball.degree(i) == hs.degree(), || format!("{name}: degree {}", ball.degree(i)))?;
            }
            let d = hs.distance_formula(&base, ball.vertex(i)).map_err(err)?;
            ensure(d == depth[i as usize] as u64, || format!("{name}: formula {d} vs BFS {}", depth[i as usize]))?;
        }
        parts.push(format!("{name} {} vertices", ball.len()));
    }
    Ok(parts.join(", "))
}

fn lamplighter(rng: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let lamp = Lamplighter::new(s3());
    let g = lamp.group().clone();
    let x = HVertex::parse("[(1 | -3:2, -2:5), (-1 | -1:4)]").map_err(err)?;
    for _ in 0..500 {
        let u = dlgeo::LampElement::new(random_series(&g, rng, 4), rng.gen_range(-3..=3));
        let v = dlgeo::LampElement::new(random_series(&g, rng, 4), rng.gen_range(-3..=3));
        let uv = lamp.mul(&u, &v).map_err(err)?;
        ensure(lamp.mul(&u, &lamp.inv(&u)).map_err(err)?.is_identity(), || format!("{u} has no inverse"))?;
        ensure(lamp.sigma(&uv) == lamp.mul(&lamp.sigma(&u), &lamp.sigma(&v)).map_err(err)?, || {
            "the involution is not a homomorphism".into()
        })?;
        let step = lamp.act_h(&v, &x).map_err(err)?;
        ensure(lamp.act_h(&uv, &x).map_err(err)? == lamp.act_h(&u, &step).map_err(err)?, || {
            "act_h is not an action".into()
        })?;
    }
    let mut sizes = Vec::new();
    for q in [2, 3] {
        let lamp = Lamplighter::new(cyclic(q));
        let stab = lamp.stabilizer_probe(&HVertex::base(), 6, limits).map_err(err)?;
        ensure(stab.len() == q, || format!("stabilizer of size {} over Z{q}", stab.len()))?;
        let ball = lamp.horosphere().ball(&HVertex::base(), 3, limits).map_err(err)?;
        ensure(lamp.orbit_covers(&ball, 6).map_err(err)?.covered, || format!("orbit misses the Z{q} ball"))?;
        sizes.push(stab.len());
    }
    Ok(format!("500 element pairs; stabilizer sizes {sizes:?}; radius-3 balls covered"))
}

fn orbit(_: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let lamp = Lamplighter::new(cyclic(2));
    let rep = orbit_qi(&lamp, 3, &default_grid(None), 0, limits).map_err(err)?;
    ensure(rep.k == Rational::from_integer(1), || format!("K = {}", rep.k))?;
    Ok(format!("K={} C={} density {:?} over {} pairs", rep.k, rep.c, rep.density, rep.pairs))
}

fn relabel_and_collapse(_: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let iso = relabel_iso(cyclic(2), 2, cyclic(4), 1).map_err(err)?;
    let check = iso.verify(3, limits).map_err(err)?;
    ensure(check.isomorphic && check.edges_preserved, || "Z2^2 and Z4 balls not matched".into())?;
    let c = Collapse::new(cyclic(2), 2).map_err(err)?;
    let rep = c.measure(5, 4, &default_grid(Some(2)), 0, limits).map_err(err)?;
    ensure(rep.law_deviation <= Rational::from_integer(2), || format!("|d' - d/2| = {}", rep.law_deviation))?;
    ensure(rep.hausdorff <= 3, || format!("Hausdorff {}", rep.hausdorff))?;
    Ok(format!(
        "relabeling on {} vertices; collapse deviation {} and Hausdorff {}",
        check.vertices, rep.law_deviation, rep.hausdorff
    ))
}

fn cycle(_: &mut ChaCha8Rng, limits: Limits) -> Result<String, String> {
    let hs = Horosphere::dl(2, 2).map_err(err)?;
    let search = hs.find_long_cycle(&HVertex::base(), 12, 8, limits).map_err(err)?;
    let len = search.cycle.as_ref().map(Vec::len).ok_or("no cycle of length 12")?;
    Ok(format!("length {len} at radius {}", search.radius))
}
