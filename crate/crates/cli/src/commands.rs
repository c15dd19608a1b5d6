//! Subcommand bodies. Input errors become [`Failure::Usage`] (exit 2),
//! errors while running become [`Failure::Run`] (exit 1).

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::json;
use symmlab::continuum::{compare_continuum, disk_torsion_error, GridConfig, GridDomain, Shape};
use symmlab::graphs::{build_space, product, torus_graded_order, torus_lex_order, GroundSpace, Order, ProductSpace, SpaceSpec};
use symmlab::rearrange::natural_reflections;
use symmlab::solver::{factor_graph, random_instance, ProblemConfig};
use symmlab::suite::{determinism, render, run_checks};
use symmlab::verify::{
    all_orders, check_dirichlet_rearrangement, check_hardy_littlewood, check_proposition, convolution_cells,
    faber_krahn_table, find_valid_order, plateau_thetas, run_polarization, sweep_orders, Mode, SearchConfig,
    MAX_EXHAUSTIVE_ORDER,
};
use symmlab::{compare_elliptic, compare_parabolic, solve_elliptic, ComparisonReport, Error, Phi, ProblemSpec};

use crate::sink::{Entry, Expect};
use crate::Options;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

type Out = Result<Vec<Entry>, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn run(e: Error) -> Failure {
    Failure::Run(e.to_string())
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("malformed config {}: {e}", path.display())))
}

fn search(opts: &Options, mode: Mode, samples: usize, restarts: usize) -> Result<SearchConfig, Failure> {
    let cfg = SearchConfig {
        mode: opts.mode.unwrap_or(mode),
        samples: opts.samples.unwrap_or(samples),
        restarts: opts.restarts.unwrap_or(restarts),
        seed: opts.seed,
        tolerance: opts.tolerance.unwrap_or(symmlab::verify::DEFAULT_TOLERANCE),
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn space_spec(opts: &Options, default: &str) -> Result<SpaceSpec, Failure> {
    match (&opts.config, &opts.space) {
        (Some(path), _) => read_config(path),
        (None, Some(s)) => s.parse().map_err(usage),
        (None, None) => default.parse().map_err(usage),
    }
}

fn space(opts: &Options, default: &str) -> Result<(SpaceSpec, GroundSpace), Failure> {
    let spec = space_spec(opts, default)?;
    let sp = build_space(&spec).map_err(usage)?;
    Ok((spec, sp))
}

fn t_grid(opts: &Options, default: &[f64]) -> Result<Vec<f64>, Failure> {
    let t = opts.t.clone().unwrap_or_else(|| default.to_vec());
    if t.is_empty() || t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(usage("--t needs nonnegative finite times"));
    }
    Ok(t)
}

pub fn verify_hl(opts: &Options) -> Out {
    let (_, sp) = space(opts, "line:10")?;
    let cfg = search(opts, Mode::RandomFunctions, 10_000, 1)?;
    let r = check_hardy_littlewood(&sp, &cfg).map_err(run)?;
    Ok(vec![Entry::from_report(&r, Expect::Holds)])
}

pub fn verify_conv(opts: &Options) -> Out {
    let (_, sp) = space(opts, "line:4")?;
    let t = t_grid(opts, &[0.1, 1.0, 10.0])?;
    let cfg = search(opts, Mode::ExhaustiveIndicators, 1_000, 1)?;
    let cells = convolution_cells(&sp, &t, &cfg).map_err(run)?;
    Ok(cells.iter().map(|r| Entry::from_report(r, Expect::Holds)).collect())
}

pub fn verify_dirichlet(opts: &Options) -> Out {
    let (_, sp) = space(opts, "cycle:8")?;
    let cfg = search(opts, Mode::GradientAscent, 10_000, 100)?;
    let r = check_dirichlet_rearrangement(&sp, &cfg).map_err(run)?;
    Ok(vec![Entry::from_report(&r, Expect::Holds)])
}

/// `canonical`, `exhaustive`, torus names `lex`/`graded`/`graded-reversed`,
/// or explicit permutations separated by `;`.
fn parse_orders(text: &str, spec: &SpaceSpec, sp: &GroundSpace) -> Result<Vec<Vec<usize>>, Failure> {
    let n = sp.vertex_count();
    match text {
        "canonical" => return Ok(vec![sp.order().as_slice().to_vec()]),
        "exhaustive" => {
            if n > MAX_EXHAUSTIVE_ORDER {
                return Err(usage(format!("exhaustive orders need at most {MAX_EXHAUSTIVE_ORDER} vertices, got {n}")));
            }
            return Ok(all_orders(n));
        }
        _ => {}
    }
    text.split(';')
        .map(|part| {
            let part = part.trim();
            let named = match (spec, part) {
                (SpaceSpec::Torus { m, dims }, "lex") => Some(torus_lex_order(*m, *dims)),
                (SpaceSpec::Torus { m, dims }, "graded") => Some(torus_graded_order(*m, *dims, false)),
                (SpaceSpec::Torus { m, dims }, "graded-reversed") => Some(torus_graded_order(*m, *dims, true)),
                _ => None,
            };
            let perm = match named {
                Some(p) => p,
                None => part
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|e| usage(format!("bad order {part:?}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            Order::new(perm.clone()).map_err(usage)?;
            if perm.len() != n {
                return Err(usage(format!("order {part:?} has {} entries, space has {n}", perm.len())));
            }
            Ok(perm)
        })
        .collect()
}

pub fn counterexample(opts: &Options) -> Out {
    let (spec, sp) = space(opts, "cube")?;
    let orders = parse_orders(opts.orders.as_deref().unwrap_or("canonical"), &spec, &sp)?;
    let cfg = search(opts, Mode::GradientAscent, 20, 5)?;
    let cfg = SearchConfig { tolerance: opts.tolerance.unwrap_or(1e-6), ..cfg };
    let sweep = sweep_orders(&sp, &orders, &cfg).map_err(run)?;
    let mut e = Entry::from_report(&sweep.report, Expect::Fails);
    e.ok = sweep.orders_violated == sweep.orders_tested && sweep.orders_tested > 0;
    e.tested = sweep.orders_tested as u64;
    Ok(vec![e])
}

/// No valid order exists on the cube or the `Z_3^2` torus; there the search
/// is expected to come back empty.
pub fn valid_order(opts: &Options) -> Out {
    let (spec, sp) = space(opts, "octahedron")?;
    let expect = match spec {
        SpaceSpec::Hypercube { dim } if dim >= 3 => Expect::Fails,
        SpaceSpec::Torus { .. } => Expect::Fails,
        _ => Expect::Holds,
    };
    let t = t_grid(opts, &[0.1, 1.0, 10.0])?;
    let cfg = search(opts, Mode::ExhaustiveIndicators, 1_000, 1)?;
    let found = find_valid_order(&sp, &t, &cfg).map_err(run)?;
    let entry = |order: Option<&[usize]>| Entry {
        check: "valid-order".into(),
        instance: sp.name().into(),
        expect,
        tested: 1,
        margin: f64::NAN,
        ok: order.is_some() == (expect == Expect::Holds),
        lines: vec![json!({ "check_name": "valid-order", "instance": sp.name(), "order": order })],
    };
    let Some(order) = found else {
        return Ok(vec![entry(None)]);
    };
    let mut out = vec![entry(Some(order.as_slice()))];
    let with = sp.with_order(order).map_err(run)?;
    let cells = convolution_cells(&with, &t, &cfg).map_err(run)?;
    out.extend(cells.iter().map(|r| Entry::from_report(r, Expect::Holds)));
    Ok(out)
}

pub fn faber_krahn(opts: &Options) -> Out {
    // `tree:DEGREE,MAX_SIZE`
    let text = opts.space.as_deref().unwrap_or("tree:3,6");
    let (degree, max_size) = match text.parse::<SpaceSpec>().map_err(usage)? {
        SpaceSpec::Tree { degree, depth } => (degree, depth),
        _ => return Err(usage("faber-krahn takes --space tree:DEGREE,MAX_SIZE")),
    };
    let rows = faber_krahn_table(degree, max_size).map_err(usage)?;
    let tol = opts.tolerance.unwrap_or(symmlab::verify::DEFAULT_TOLERANCE);
    Ok(rows
        .iter()
        .map(|row| Entry {
            check: "faber-krahn".into(),
            instance: format!("degree {degree} size {}", row.size),
            expect: Expect::Holds,
            tested: row.subsets as u64,
            margin: row.margin,
            ok: row.margin >= -tol,
            lines: vec![json!({ "check_name": "faber-krahn", "degree": degree, "row": row })],
        })
        .collect())
}

pub fn polarize(opts: &Options) -> Out {
    let (spec, sp) = space(opts, "line:10")?;
    let refl = natural_reflections(&spec, sp.order()).map_err(usage)?;
    let cfg = search(opts, Mode::RandomFunctions, 1_000, 1)?;
    let o = run_polarization(&sp, &refl, &cfg).map_err(run)?;
    let mut e = Entry::from_report(&o.report, Expect::Holds);
    e.ok &= o.stalled == 0;
    e.lines = vec![json!({
        "check_name": "polarization",
        "report": o.report.clone().strip_timing(),
        "converged": o.converged,
        "stalled": o.stalled,
        "max_sweeps": o.max_sweeps,
        "max_distance": o.max_distance,
    })];
    Ok(vec![e])
}

/// `M*N` with shorthand factors; `N` defaults to a point.
fn product_space(opts: &Options) -> Result<ProductSpace, Failure> {
    let text = opts.space.as_deref().unwrap_or("line:10*cycle:5");
    let (m, n) = text.split_once('*').unwrap_or((text, "point"));
    let m = build_space(&m.parse().map_err(usage)?).map_err(usage)?;
    Ok(product(&m, &factor_graph(n).map_err(usage)?))
}

/// The configured problem, or `--samples` random ones alternating `φ`.
fn problems(opts: &Options, default_count: usize) -> Result<Vec<ProblemSpec>, Failure> {
    if let Some(path) = &opts.config {
        let cfg: ProblemConfig = read_config(path)?;
        return Ok(vec![cfg.build().map_err(usage)?]);
    }
    let prod = product_space(opts)?;
    let mut rng = search(opts, Mode::RandomFunctions, 1, 1)?.rng();
    (0..opts.samples.unwrap_or(default_count))
        .map(|i| {
            let phi = if i % 2 == 0 { Phi::Zero } else { Phi::Reciprocal { a: 1.0 } };
            random_instance(&prod, phi, &mut rng).map_err(usage)
        })
        .collect()
}

fn comparison_entry(check: &str, i: usize, r: ComparisonReport) -> Entry {
    Entry {
        check: check.into(),
        instance: format!("{} #{i}", r.instance),
        expect: Expect::Holds,
        tested: 1,
        margin: r.worst_margin(),
        ok: r.passed,
        lines: vec![json!({ "check_name": check, "index": i, "report": r })],
    }
}

pub fn compare_elliptic_cmd(opts: &Options) -> Out {
    problems(opts, 20)?
        .iter()
        .enumerate()
        .map(|(i, p)| Ok(comparison_entry("elliptic-comparison", i, compare_elliptic(p).map_err(run)?)))
        .collect()
}

pub fn compare_parabolic_cmd(opts: &Options) -> Out {
    let dt = 1e-2;
    let horizon = t_grid(opts, &[2.0])?[0];
    let steps = ((horizon / dt).round() as usize).max(1);
    let problems = problems(opts, 10)?;
    if problems.iter().any(|p| p.initial.is_none()) {
        return Err(usage("compare-parabolic needs an \"initial\" field in the problem config"));
    }
    problems
        .iter()
        .enumerate()
        .map(|(i, p)| Ok(comparison_entry("parabolic-comparison", i, compare_parabolic(p, dt, steps).map_err(run)?)))
        .collect()
}

pub fn proposition(opts: &Options) -> Out {
    problems(opts, 20)?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let u = solve_elliptic(p).map_err(run)?;
            let mut r = check_proposition(&u, p, &plateau_thetas(p, 5)).map_err(run)?;
            r.instance = format!("{} #{i}", r.instance);
            r.witness = None;
            r.witness_partner = None;
            Ok(Entry::from_report(&r, Expect::Holds))
        })
        .collect()
}

pub fn continuum(opts: &Options) -> Out {
    let domains: Vec<GridDomain> = match &opts.config {
        Some(path) => vec![read_config::<GridConfig>(path)?.build().map_err(usage)?],
        None => {
            let shape: Shape = opts.space.as_deref().unwrap_or("square").parse().map_err(usage)?;
            [1.0 / 64.0, 1.0 / 128.0]
                .iter()
                .map(|&h| GridDomain::new(&shape, h).map_err(usage))
                .collect::<Result<_, _>>()?
        }
    };
    let mut out = Vec::new();
    for dom in &domains {
        let r = compare_continuum(dom, 1.0).map_err(run)?;
        out.push(Entry::from_report(&r, Expect::Holds));
    }
    if opts.config.is_none() && opts.space.as_deref().is_some_and(|s| s.starts_with("disk")) {
        let (a, b) = (
            disk_torsion_error(1.0 / 64.0).map_err(run)?,
            disk_torsion_error(1.0 / 128.0).map_err(run)?,
        );
        let order = (a / b).log2();
        out.push(Entry {
            check: "disk-poisson-order".into(),
            instance: "h=1/64,1/128".into(),
            expect: Expect::Holds,
            tested: 2,
            margin: order - 1.9,
            ok: order >= 1.9,
            lines: vec![json!({ "check_name": "disk-poisson-order", "error_h64": a, "error_h128": b, "order": order })],
        });
    }
    Ok(out)
}

/// The acceptance suite; one table row per criterion.
pub fn all(opts: &Options) -> Out {
    let first = run_checks(opts.seed).map_err(run)?;
    let second = run_checks(opts.seed).map_err(run)?;
    let twelve = determinism(&render(&first), &render(&second));
    Ok(first
        .iter()
        .chain(Some(&twelve))
        .map(|o| Entry {
            check: format!("criterion-{:02}", o.id),
            instance: o.name.into(),
            expect: Expect::Holds,
            tested: o.lines.len() as u64,
            margin: f64::NAN,
            ok: o.passed,
            lines: o
                .lines
                .iter()
                .map(|l| serde_json::from_str(l).expect("suite lines are JSON"))
                .chain(Some(json!({ "check_name": "criterion", "criterion": o.id, "name": o.name, "passed": o.passed, "summary": o.summary })))
                .collect(),
        })
        .collect())
}
