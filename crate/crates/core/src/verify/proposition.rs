//! Distributional inequality for the rearranged solution, tested against
//! symmetric decreasing test functions.

use crate::error::{Error, Result};
use crate::graphs::VertexSet;
use crate::operators::{heat_kernel, laplacian};
use crate::rearrange::{is_steiner_symmetric, similarly_ordered_companion_fiberwise, steiner_rearrange, DiscreteFunction};
use crate::solver::{elliptic_residual, rearrange_on_domain, symmetric_domain, ProblemSpec};

use super::{Report, Tracker, SearchConfig, DEFAULT_TOLERANCE};

/// Residual above which `u` is not accepted as a solution.
const SOLUTION_TOL: f64 = 1e-8;
/// Times for the heat-kernel step of the chain.
const CHAIN_TIMES: [f64; 2] = [1e-3, 1e-2];

/// Plateau test functions: 1 on the first `j` vertices of each fiber of the
/// symmetrized domain, for `count` values of `j` spread over the longest fiber.
pub fn plateau_thetas(p: &ProblemSpec, count: usize) -> Vec<DiscreteFunction> {
    let space = &p.product;
    let sym = symmetric_domain(space, &p.omega);
    let longest = (0..space.n_count())
        .map(|y| space.fiber(y).filter(|&v| sym.contains(v)).count())
        .max()
        .unwrap_or(0);
    (1..=count)
        .map(|i| {
            let j = (i * longest).div_ceil(count).max(1);
            let mut out = vec![0.0; space.vertex_count()];
            for y in 0..space.n_count() {
                for v in space.fiber(y).take(j) {
                    if sym.contains(v) {
                        out[v] = 1.0;
                    }
                }
            }
            DiscreteFunction::new(out)
        })
        .collect()
}

/// For each `θ`: `Σ θ (φ(u^#) + ψ^# u^# + λ^#) - Σ θ (-Δ u^#)`, and for each
/// `θ` and small `t`: `Σ θ K_t u^# - Σ θ̃ K_t u` with `θ̃` the fiberwise
/// companion of `θ` ordered like `u`.
pub fn check_proposition(u: &DiscreteFunction, problem: &ProblemSpec, thetas: &[DiscreteFunction]) -> Result<Report> {
    let space = &problem.product;
    let n = space.vertex_count();
    let residual = elliptic_residual(problem, u)?;
    if !(residual <= SOLUTION_TOL) {
        return Err(Error::Precondition(format!("u is not a solution (residual {residual:e})")));
    }
    let sym = symmetric_domain(space, &problem.omega);
    let mask = sym.mask(n);
    for (i, th) in thetas.iter().enumerate() {
        th.check_len(n)?;
        th.check_nonnegative()?;
        if !is_steiner_symmetric(th, space, 0.0) || (0..n).any(|v| !mask[v] && th.values()[v] != 0.0) {
            return Err(Error::Precondition(format!(
                "theta {i} is not symmetric decreasing with support in the symmetrized domain"
            )));
        }
    }
    let us = steiner_rearrange(u, space)?;
    let psi = rearrange_on_domain(&problem.psi, space, &problem.omega)?;
    let lam = rearrange_on_domain(&problem.lam, space, &problem.omega)?;
    let lap = laplacian(space.graph(), &us, &sym)?;
    let rhs: Vec<f64> = (0..n)
        .map(|v| {
            let s = us.values()[v];
            problem.phi.eval(s) + psi.values()[v] * s + lam.values()[v]
        })
        .collect();
    let rhs = DiscreteFunction::new(rhs);
    let neg_lap = DiscreteFunction::new(lap.values().iter().map(|x| -x).collect());
    let kernels = CHAIN_TIMES
        .iter()
        .map(|&t| heat_kernel(space.graph(), &VertexSet::full(n), t))
        .collect::<Result<Vec<_>>>()?;
    let cfg = SearchConfig {
        tolerance: DEFAULT_TOLERANCE,
        ..Default::default()
    };
    let mut tr = Tracker::new("proposition", "distributional");
    let mut chain = Tracker::new("proposition-chain", "heat-kernel");
    for th in thetas {
        tr.observe(th.dot(&rhs) - th.dot(&neg_lap), || (th.clone(), Some(u.clone())));
        let companion = similarly_ordered_companion_fiberwise(th, u, space)?;
        for k in &kernels {
            let m = k.bilinear(th, &us) - k.bilinear(&companion, u);
            chain.observe(m, || (th.clone(), Some(companion.clone())));
        }
    }
    let name = space.m_space().name().to_string();
    let mut a = tr.finish(&cfg);
    let mut b = chain.finish(&cfg);
    a.instance = name.clone();
    b.instance = name;
    Ok(a.merge(&b).with_note(format!("residual={residual:.3e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_space, product, Graph, SpaceSpec};
    use crate::solver::{factor_graph, random_instance, solve_elliptic, symmetrize_problem, Phi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_instances_satisfy_inequality() {
        let m = build_space(&SpaceSpec::Line { n: 4 }).unwrap();
        let prod = product(&m, &factor_graph("cycle:3").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let p = random_instance(&prod, Phi::Reciprocal { a: 1.0 }, &mut rng).unwrap();
            let u = solve_elliptic(&p).unwrap();
            let r = check_proposition(&u, &p, &plateau_thetas(&p, 5)).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn symmetric_problem_gives_equality() {
        let m = build_space(&SpaceSpec::Line { n: 3 }).unwrap();
        let prod = product(&m, &Graph::single_vertex());
        let mut p = ProblemSpec::new(prod, VertexSet::full(7), Phi::Reciprocal { a: 1.0 });
        p.lam = DiscreteFunction::constant(7, 1.0);
        let p = symmetrize_problem(&p).unwrap();
        let u = solve_elliptic(&p).unwrap();
        let thetas = plateau_thetas(&p, 3);
        let r = check_proposition(&u, &p, &thetas).unwrap();
        assert!(r.worst_margin.abs() < 1e-9, "{}", r.worst_margin);
        let zero = check_proposition(&u, &p, &[DiscreteFunction::zeros(7)]).unwrap();
        assert_eq!(zero.worst_margin, 0.0);
    }

    #[test]
    fn preconditions() {
        let m = build_space(&SpaceSpec::Line { n: 2 }).unwrap();
        let prod = product(&m, &Graph::single_vertex());
        let mut p = ProblemSpec::new(prod, VertexSet::full(5), Phi::Zero);
        p.lam = DiscreteFunction::constant(5, 1.0);
        let u = solve_elliptic(&p).unwrap();
        let bad_theta = DiscreteFunction::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(check_proposition(&u, &p, &[bad_theta]).is_err());
        let not_solution = DiscreteFunction::constant(5, 1.0);
        assert!(check_proposition(&not_solution, &p, &plateau_thetas(&p, 2)).is_err());
    }
}
