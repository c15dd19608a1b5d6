//! Property tests for the structural invariants of rearrangements,
//! operators, reports and the solver.

use proptest::prelude::*;
use symmlab::graphs::{build_space, product, GroundSpace, SpaceSpec, VertexSet};
use symmlab::operators::{dirichlet_eigenvalue, dirichlet_energy, heat_kernel, laplacian};
use symmlab::rearrange::{natural_reflections, polarize, rearrange_function, DiscreteFunction};
use symmlab::solver::{factor_graph, solve_elliptic, Phi, ProblemSpec};
use symmlab::{Report, Graph};

fn spaces() -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        (1usize..6).prop_map(|n| SpaceSpec::Line { n }),
        (3usize..10).prop_map(|m| SpaceSpec::Cycle { m }),
        (3usize..5, 1usize..3).prop_map(|(degree, depth)| SpaceSpec::Tree { degree, depth }),
        Just(SpaceSpec::Octahedron),
    ]
}

/// A space with a nonnegative function and a second one on it.
fn space_and_pair() -> impl Strategy<Value = (GroundSpace, Vec<f64>, Vec<f64>)> {
    spaces().prop_flat_map(|spec| {
        let sp = build_space(&spec).unwrap();
        let n = sp.vertex_count();
        (Just(sp), prop::collection::vec(0.0f64..10.0, n), prop::collection::vec(0.0f64..10.0, n))
    })
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn report(name: &str, margin: f64) -> Report {
    Report {
        check_name: name.into(),
        instance: format!("{name}-space"),
        instances_tested: 1,
        worst_margin: margin,
        witness: None,
        witness_partner: None,
        passed: margin >= -1e-9,
        tolerance: 1e-9,
        seed: 0,
        notes: vec![],
        elapsed: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_is_equimeasurable((sp, f, _) in space_and_pair()) {
        let fs = rearrange_function(&DiscreteFunction::new(f.clone()), sp.order()).unwrap();
        prop_assert_eq!(sorted_desc(fs.values()), sorted_desc(&f));
        // largest value at the origin, decreasing along the order
        let along: Vec<f64> = sp.order().as_slice().iter().map(|&v| fs.values()[v]).collect();
        prop_assert_eq!(along, sorted_desc(&f));
    }

    #[test]
    fn rearrangement_is_idempotent((sp, f, _) in space_and_pair()) {
        let once = rearrange_function(&DiscreteFunction::new(f), sp.order()).unwrap();
        let twice = rearrange_function(&once, sp.order()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn hardy_littlewood((sp, f, g) in space_and_pair()) {
        let (f, g) = (DiscreteFunction::new(f), DiscreteFunction::new(g));
        let lhs = f.dot(&g);
        // oracle: pairing sorted value lists
        let rhs: f64 = sorted_desc(f.values()).iter().zip(sorted_desc(g.values())).map(|(a, b)| a * b).sum();
        let fs = rearrange_function(&f, sp.order()).unwrap();
        let gs = rearrange_function(&g, sp.order()).unwrap();
        prop_assert!((fs.dot(&gs) - rhs).abs() <= 1e-9 * (1.0 + rhs));
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn product_edge_count(a in spaces(), b in spaces()) {
        let (ga, gb) = (build_space(&a).unwrap(), build_space(&b).unwrap());
        let p = product(&ga, gb.graph());
        let expected = ga.graph().edge_count() * gb.vertex_count() + ga.vertex_count() * gb.graph().edge_count();
        prop_assert_eq!(p.graph().edge_count(), expected);
        prop_assert_eq!(p.vertex_count(), ga.vertex_count() * gb.vertex_count());
    }

    #[test]
    fn summation_by_parts((sp, f, g) in space_and_pair()) {
        let n = sp.vertex_count();
        let full = VertexSet::full(n);
        let (f, g) = (DiscreteFunction::new(f), DiscreteFunction::new(g));
        let g_lap = laplacian(sp.graph(), &g, &full).unwrap();
        let f_lap = laplacian(sp.graph(), &f, &full).unwrap();
        // <f, Δg> = <Δf, g>, and -<f, Δf> is the energy
        let scale = 1.0 + f.dot(&f) + g.dot(&g);
        prop_assert!((f.dot(&g_lap) - f_lap.dot(&g)).abs() <= 1e-9 * scale);
        prop_assert!((-f.dot(&f_lap) - dirichlet_energy(sp.graph(), &f)).abs() <= 1e-9 * scale);
    }

    #[test]
    fn heat_semigroup((sp, f, _) in space_and_pair(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let full = VertexSet::full(sp.vertex_count());
        let f = DiscreteFunction::new(f);
        let ks = heat_kernel(sp.graph(), &full, s).unwrap();
        let kt = heat_kernel(sp.graph(), &full, t).unwrap();
        let kst = heat_kernel(sp.graph(), &full, s + t).unwrap();
        let lhs = ks.apply(&kt.apply(&f));
        let rhs = kst.apply(&f);
        prop_assert!(lhs.sup_distance(&rhs) <= 1e-9 * (1.0 + f.values().iter().sum::<f64>()));
        // positivity and sub-Markov row sums
        for r in kst.row_sums() {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn eigenvalue_decreases_with_domain(spec in spaces(), bits in any::<u64>(), extra in any::<u64>()) {
        let sp = build_space(&spec).unwrap();
        let n = sp.vertex_count();
        let keep = |b: u64, v: usize| b >> (v % 64) & 1 == 1;
        let small: Vec<usize> = (0..n).filter(|&v| keep(bits, v) || v == sp.origin()).collect();
        let large: Vec<usize> = (0..n).filter(|&v| small.contains(&v) || keep(extra, v)).collect();
        let a = dirichlet_eigenvalue(sp.graph(), &VertexSet::new(small)).unwrap();
        let b = dirichlet_eigenvalue(sp.graph(), &VertexSet::new(large)).unwrap();
        prop_assert!(b <= a + 1e-10);
    }

    #[test]
    fn polarization_keeps_distribution_and_lowers_energy(n in 2usize..7, f in prop::collection::vec(0.0f64..5.0, 13)) {
        let spec = SpaceSpec::Line { n };
        let sp = build_space(&spec).unwrap();
        let f = DiscreteFunction::new(f[..sp.vertex_count()].to_vec());
        for r in natural_reflections(&spec, sp.order()).unwrap() {
            let p = polarize(&f, &r).unwrap();
            prop_assert_eq!(sorted_desc(p.values()), sorted_desc(f.values()));
            prop_assert!(dirichlet_energy(sp.graph(), &p) <= dirichlet_energy(sp.graph(), &f) + 1e-9);
        }
    }

    #[test]
    fn report_merge_is_associative_and_commutative(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
        na in "[a-c]", nb in "[a-c]", nc in "[a-c]",
    ) {
        let (x, y, z) = (report(&na, a), report(&nb, b), report(&nc, c));
        prop_assert_eq!(x.merge(&y), y.merge(&x));
        prop_assert_eq!(x.merge(&y).merge(&z), x.merge(&y.merge(&z)));
        prop_assert_eq!(x.merge(&y).worst_margin, a.min(b));
    }

    #[test]
    fn solution_is_monotone_in_source(
        lam in prop::collection::vec(0.0f64..2.0, 15),
        bump in prop::collection::vec(0.0f64..1.0, 15),
        reciprocal in any::<bool>(),
    ) {
        let m = build_space(&SpaceSpec::Line { n: 2 }).unwrap();
        let prod = product(&m, &factor_graph("cycle:3").unwrap());
        let phi = if reciprocal { Phi::Reciprocal { a: 1.0 } } else { Phi::Zero };
        let mut low = ProblemSpec::new(prod, VertexSet::full(15), phi);
        low.lam = DiscreteFunction::new(lam.clone());
        let mut high = low.clone();
        high.lam = DiscreteFunction::new(lam.iter().zip(&bump).map(|(a, b)| a + b).collect());
        let (u, v) = (solve_elliptic(&low).unwrap(), solve_elliptic(&high).unwrap());
        for (a, b) in u.values().iter().zip(v.values()) {
            prop_assert!(*a <= b + 1e-10);
        }
    }
}

#[test]
fn single_vertex_factor_gives_a_copy() {
    let sp = build_space(&SpaceSpec::Cycle { m: 5 }).unwrap();
    let p = product(&sp, &Graph::single_vertex());
    assert_eq!(p.graph().edge_count(), sp.graph().edge_count());
}
