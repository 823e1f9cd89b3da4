use dlgeo::qi::{default_grid, orbit_qi, relabel_iso, Collapse, Rational};
use dlgeo::{Error, HVertex, Horosphere, Lamplighter, Tree, TreeVertex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::parse::{self, GroupArg};
use crate::{
    BallArgs, CliError, CollapseArgs, Ctx, CyclesArgs, DistArgs, GraphFormat, IsocheckArgs, OrbitArgs, ProfileArgs,
    QiOrbitArgs, SpaceArgs, TableFormat, TreeBallArgs,
};

type PairDistance = Box<dyn Fn(usize, usize) -> u64>;

fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn group_arg(ctx: &Ctx, flag: &Option<String>) -> Result<GroupArg, CliError> {
    let text =
        flag.clone().or_else(|| ctx.config.group.clone()).ok_or_else(|| CliError::usage("--group is required"))?;
    GroupArg::parse(&text)
}

/// Flags describe the space on their own when any is given; otherwise the config does.
fn space_arg(ctx: &Ctx, s: &SpaceArgs) -> Result<Horosphere, CliError> {
    if s.group.is_some() || s.right.is_some() || s.dl.is_some() {
        parse::horosphere(s.group.as_deref(), s.right.as_deref(), s.dl.as_deref())
    } else {
        let c = &ctx.config;
        parse::horosphere(c.group.as_deref(), c.right.as_deref(), c.dl.as_deref())
    }
}

fn grid_arg(ctx: &Ctx, flag: &Option<String>, extra: Option<i64>) -> Result<Vec<Rational>, CliError> {
    match flag.as_ref().or(ctx.config.grid.as_ref()) {
        Some(text) => parse::grid(text),
        None => Ok(default_grid(extra)),
    }
}

fn h_vertex(text: Option<&str>) -> Result<HVertex, CliError> {
    Ok(text.map(HVertex::parse).transpose()?.unwrap_or_else(HVertex::base))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

pub fn tree_ball(ctx: &Ctx, a: &TreeBallArgs) -> Result<(), CliError> {
    let tree = Tree::new(group_arg(ctx, &a.group)?.group()?);
    let center = a.center.as_deref().map(TreeVertex::parse).transpose()?.unwrap_or_else(TreeVertex::root);
    let ball = tree.ball(&center, pick(a.radius, ctx.config.radius, 3), ctx.limits)?;
    ctx.emit(&match a.format {
        GraphFormat::Dot => ball.to_dot("tree"),
        GraphFormat::Json => ball.to_json(),
    })
}

pub fn dl_ball(ctx: &Ctx, a: &BallArgs) -> Result<(), CliError> {
    let hs = space_arg(ctx, &a.space)?;
    let ball = hs.ball(&h_vertex(a.center.as_deref())?, pick(a.radius, ctx.config.radius, 3), ctx.limits)?;
    ctx.emit(&match a.format {
        GraphFormat::Dot => ball.to_dot("horosphere"),
        GraphFormat::Json => ball.to_json(),
    })
}

/// One row per unordered pair of distinct ball vertices.
pub fn dist(ctx: &Ctx, a: &DistArgs) -> Result<(), CliError> {
    let radius = pick(a.radius, ctx.config.radius, 2);
    let (labels, table): (Vec<String>, PairDistance) = if a.tree {
        if a.space.right.is_some() || a.space.dl.is_some() {
            return Err(CliError::usage("--tree takes only --group"));
        }
        let tree = Tree::new(group_arg(ctx, &a.space.group)?.group()?);
        let center = a.center.as_deref().map(TreeVertex::parse).transpose()?.unwrap_or_else(TreeVertex::root);
        let ball = tree.ball(&center, radius, ctx.limits)?;
        check_pairs(ctx, ball.len())?;
        let vs = ball.vertices().to_vec();
        (
            vs.iter().map(ToString::to_string).collect(),
            Box::new(move |i, j| tree.distance(&vs[i], &vs[j]).expect("same tree")),
        )
    } else {
        let hs = space_arg(ctx, &a.space)?;
        let ball = hs.ball(&h_vertex(a.center.as_deref())?, radius, ctx.limits)?;
        check_pairs(ctx, ball.len())?;
        let vs = ball.vertices().to_vec();
        (
            vs.iter().map(ToString::to_string).collect(),
            Box::new(move |i, j| hs.distance_formula(&vs[i], &vs[j]).expect("same horosphere")),
        )
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v", "distance"]).map_err(csv_err)?;
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            w.write_record([labels[i].as_str(), labels[j].as_str(), &table(i, j).to_string()]).map_err(csv_err)?;
        }
    }
    ctx.emit(&csv_text(w)?)
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Core(Error::Io(e.into_error())))?;
    Ok(String::from_utf8(bytes).expect("utf-8 rows"))
}

fn check_pairs(ctx: &Ctx, n: usize) -> Result<(), CliError> {
    let rows = n as u128 * (n as u128).saturating_sub(1) / 2;
    ctx.limits.check(rows)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(Error::Io(e.into()))
}

pub fn profile(ctx: &Ctx, a: &ProfileArgs) -> Result<(), CliError> {
    let hs = space_arg(ctx, &a.space)?;
    let radius = pick(a.radius, ctx.config.radius, 4);
    let count = pick(a.basepoints, ctx.config.basepoints, 1);
    let walk = pick(a.walk, ctx.config.walk, 16);
    if count == 0 {
        return Err(CliError::usage("--basepoints must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut bases = vec![HVertex::base()];
    while bases.len() < count {
        bases.push(hs.random_walk(&HVertex::base(), walk, &mut rng));
    }
    let profiles = bases.iter().map(|b| hs.sphere_profile(b, radius, ctx.limits)).collect::<dlgeo::Result<Vec<_>>>()?;
    let identical = profiles.windows(2).all(|w| w[0] == w[1]);
    let text = match a.format {
        TableFormat::Csv if a.long => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["basepoint", "radius", "size"]).map_err(csv_err)?;
            for (b, p) in profiles.iter().enumerate() {
                for (r, size) in p.iter().enumerate() {
                    w.serialize((b, r, size)).map_err(csv_err)?;
                }
            }
            csv_text(w)?
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record((0..=radius).map(|i| format!("s{i}"))).map_err(csv_err)?;
            for p in &profiles {
                w.write_record(p.iter().map(ToString::to_string)).map_err(csv_err)?;
            }
            csv_text(w)?
        }
        TableFormat::Json => to_json(&json!({
            "radius": radius,
            "basepoints": bases.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "profiles": profiles,
            "identical": identical,
        })),
    };
    ctx.emit(&text)?;
    if a.require_identical && !identical {
        return Err(CliError::Failed("sphere profiles differ between basepoints".into()));
    }
    Ok(())
}

pub fn orbit(ctx: &Ctx, a: &OrbitArgs) -> Result<(), CliError> {
    let lamp = Lamplighter::new(group_arg(ctx, &a.group)?.group()?);
    let radius = pick(a.radius, ctx.config.radius, 5);
    let window = pick(a.window, ctx.config.window, 8);
    let ball = lamp.horosphere().ball(&HVertex::base(), radius, ctx.limits)?;
    let cover = lamp.orbit_covers(&ball, window)?;
    let vertex = h_vertex(a.vertex.as_deref())?;
    let stab = lamp.stabilizer_probe(&vertex, window, ctx.limits)?;
    let order = lamp.group().order();
    // the free lamp of a height-h vertex sits at -h; outside the window it is not counted
    let expected = (vertex.height().abs() <= window).then_some(order);
    ctx.emit(&to_json(&json!({
        "group_order": order,
        "radius": radius,
        "window": window,
        "ball_vertices": ball.len(),
        "covered": cover.covered,
        "uncovered": cover.uncovered(),
        "stabilizer": {
            "vertex": vertex.to_string(),
            "size": stab.len(),
            "expected": expected,
            "elements": stab.iter().map(ToString::to_string).collect::<Vec<_>>(),
        },
    })))?;
    if !cover.covered {
        return Err(CliError::Failed(format!("{} ball vertices outside the window orbit", cover.uncovered())));
    }
    if let Some(e) = expected.filter(|&e| e != stab.len()) {
        return Err(CliError::Failed(format!("stabilizer has {} elements, expected {e}", stab.len())));
    }
    Ok(())
}

pub fn qi_orbit(ctx: &Ctx, a: &QiOrbitArgs) -> Result<(), CliError> {
    let lamp = Lamplighter::new(group_arg(ctx, &a.group)?.group()?);
    let grid = grid_arg(ctx, &a.grid, None)?;
    let radius = pick(a.radius, ctx.config.radius, 4);
    let report = orbit_qi(&lamp, radius, &grid, ctx.seed, ctx.limits)?;
    if let Some(path) = &a.growth_csv {
        let ball = lamp.cayley_ball(&lamp.edge_generators(), radius, ctx.limits)?;
        let spheres = ball.layer_sizes().expect("balls record depths");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["length", "sphere", "ball"]).map_err(csv_err)?;
        let mut total = 0;
        for (r, s) in spheres.iter().enumerate() {
            total += s;
            w.serialize((r, s, total)).map_err(csv_err)?;
        }
        std::fs::write(path, csv_text(w)?)?;
    }
    ctx.emit(&to_json(&report))
}

pub fn collapse(ctx: &Ctx, a: &CollapseArgs) -> Result<(), CliError> {
    let k = pick(a.k, ctx.config.k, 2);
    let c = Collapse::new(group_arg(ctx, &a.group)?.group()?, k)?;
    let grid = grid_arg(ctx, &a.grid, Some(k as i64))?;
    let tree_radius = pick(a.tree_radius, ctx.config.tree_radius, 6);
    let h_radius = pick(a.h_radius, ctx.config.h_radius, 2 * k as u32);
    let bound: Rational =
        a.max_deviation.parse().map_err(|_| CliError::usage(format!("bad --max-deviation {:?}", a.max_deviation)))?;
    let report = c.measure(tree_radius, h_radius, &grid, ctx.seed, ctx.limits)?;
    ctx.emit(&to_json(&report))?;
    if report.law_deviation > bound {
        return Err(CliError::Failed(format!("|d' - d/k| reached {} > {bound}", report.law_deviation)));
    }
    if report.hausdorff > a.max_hausdorff {
        return Err(CliError::Failed(format!("Hausdorff distance {} > {}", report.hausdorff, a.max_hausdorff)));
    }
    Ok(())
}

pub fn isocheck(ctx: &Ctx, a: &IsocheckArgs) -> Result<(), CliError> {
    let left = GroupArg::parse(&a.left)?;
    let right = GroupArg::parse(&a.right)?;
    let radius = pick(a.radius, ctx.config.radius, 5);
    let iso = relabel_iso(left.base.clone(), left.power, right.base.clone(), right.power)?;
    let check = iso.verify(radius, ctx.limits)?;
    let verdict = check.isomorphic && check.edges_preserved;
    ctx.emit(&to_json(&json!({
        "left": left.text,
        "right": right.text,
        "radius": check.radius,
        "vertices": check.vertices,
        "edges": check.edges,
        "edges_preserved": check.edges_preserved,
        "isomorphic": check.isomorphic,
        "verdict": verdict,
    })))?;
    if verdict {
        Ok(())
    } else {
        Err(CliError::Failed(format!("radius-{radius} balls are not matched by the relabeling")))
    }
}

pub fn cycles(ctx: &Ctx, a: &CyclesArgs) -> Result<(), CliError> {
    let hs = space_arg(ctx, &a.space)?;
    let min_length = pick(a.min_length, ctx.config.min_length, 20);
    let max_radius = pick(a.max_radius, ctx.config.max_radius, 12);
    let search = hs.find_long_cycle(&HVertex::base(), min_length, max_radius, ctx.limits)?;
    ctx.emit(&to_json(&search))?;
    match search.cycle {
        Some(_) => Ok(()),
        None => Err(CliError::Failed(format!("no simple cycle of length {min_length} within radius {max_radius}"))),
    }
}
