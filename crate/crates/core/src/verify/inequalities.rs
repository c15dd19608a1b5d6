//! Hardy–Littlewood, heat-kernel convolution and Dirichlet-energy rearrangement checks.

use crate::error::{Error, Result};
use crate::graphs::{GroundSpace, Order, VertexSet};
use crate::operators::{dirichlet_energy, Kernel, SpectralKernel};
use crate::rearrange::{rearrange_function, DiscreteFunction};

use super::{coordinate_ascent, random_nonnegative, Mode, Report, SearchConfig, Tracker};

/// Largest vertex count for which all indicator pairs are enumerated in the
/// Hardy–Littlewood check.
const HL_EXHAUSTIVE_MAX: usize = 16;
/// Largest vertex count for exhaustive indicator pairs in kernel checks.
pub(crate) const KERNEL_EXHAUSTIVE_MAX: usize = 12;

/// `Σ f g <= Σ f^# g^#`.
pub fn check_hardy_littlewood(space: &GroundSpace, cfg: &SearchConfig) -> Result<Report> {
    cfg.validate()?;
    let order = space.order();
    let n = space.vertex_count();
    let mut tr = Tracker::new("hardy-littlewood", space.name());
    let mut rng = cfg.rng();
    for _ in 0..cfg.samples {
        let f = random_nonnegative(&mut rng, n);
        let g = random_nonnegative(&mut rng, n);
        let lhs = f.dot(&g);
        let rhs = rearrange_function(&f, order)?.dot(&rearrange_function(&g, order)?);
        tr.observe(rhs - lhs, || (f.clone(), Some(g.clone())));
    }
    if cfg.mode == Mode::ExhaustiveIndicators && n <= HL_EXHAUSTIVE_MAX {
        // For indicators both sides are integers: |A ∩ B| <= min(|A|, |B|).
        let full = 1u64 << n;
        let mut worst = (i64::MAX, 0u64, 0u64);
        for a in 0..full {
            let ca = a.count_ones() as i64;
            for b in 0..full {
                let m = ca.min(b.count_ones() as i64) - (a & b).count_ones() as i64;
                if m < worst.0 {
                    worst = (m, a, b);
                }
            }
        }
        tr.add_count(full * full - 1);
        let (m, a, b) = worst;
        tr.observe(m as f64, || {
            (
                DiscreteFunction::indicator(n, &VertexSet::from_bits(a)),
                Some(DiscreteFunction::indicator(n, &VertexSet::from_bits(b))),
            )
        });
    }
    Ok(tr.finish(cfg))
}

/// Cumulative sums `C[a][b] = Σ_{i<a, j<b} K(v_i, v_j)`.
fn ball_pair_sums(k: &Kernel, order: &Order) -> Vec<Vec<f64>> {
    let n = order.len();
    let mut c = vec![vec![0.0; n + 1]; n + 1];
    for a in 1..=n {
        let va = order.vertex(a - 1);
        let mut row = 0.0;
        for b in 1..=n {
            row += k.get(va, order.vertex(b - 1));
            c[a][b] = c[a - 1][b] + row;
        }
    }
    c
}

/// Worst margin over all indicator pairs: `min_{A,B} C[|A|][|B|] - K(A, B)`,
/// with the minimizing pair.
pub(crate) fn exhaustive_indicator_margin(k: &Kernel, order: &Order) -> (f64, u64, u64) {
    let n = order.len();
    let c = ball_pair_sums(k, order);
    let full = 1usize << n;
    let mut worst = (f64::INFINITY, 0u64, 0u64);
    let mut ka = vec![0.0; n];
    let mut sums = vec![0.0; full];
    for a in 0..full {
        for (y, slot) in ka.iter_mut().enumerate() {
            *slot = (0..n).filter(|&x| a >> x & 1 == 1).map(|x| k.get(x, y)).sum();
        }
        let ca = a.count_ones() as usize;
        sums[0] = 0.0;
        for b in 1..full {
            let low = b.trailing_zeros() as usize;
            sums[b] = sums[b & (b - 1)] + ka[low];
            let m = c[ca][b.count_ones() as usize] - sums[b];
            if m < worst.0 {
                worst = (m, a as u64, b as u64);
            }
        }
        let m = c[ca][0];
        if m < worst.0 {
            worst = (m, a as u64, 0);
        }
    }
    worst
}

/// Per-time reports for `Σ f K_t g <= Σ f^# K_t g^#`.
pub fn convolution_cells(space: &GroundSpace, t_grid: &[f64], cfg: &SearchConfig) -> Result<Vec<Report>> {
    cfg.validate()?;
    if t_grid.is_empty() {
        return Err(Error::Precondition("t_grid must be nonempty".into()));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    let n = space.vertex_count();
    let order = space.order();
    let spectral = SpectralKernel::new(space.graph(), &VertexSet::full(n))?;
    let exhaustive = cfg.mode == Mode::ExhaustiveIndicators && n <= KERNEL_EXHAUSTIVE_MAX;
    let mut out = Vec::with_capacity(t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let k = spectral.at(t)?;
        let mut tr = Tracker::new("convolution-rearrangement", format!("{} t={t}", space.name()));
        if exhaustive {
            let (m, a, b) = exhaustive_indicator_margin(&k, order);
            tr.add_count((1u64 << (2 * n)) - 1);
            tr.observe(m, || {
                (
                    DiscreteFunction::indicator(n, &VertexSet::from_bits(a)),
                    Some(DiscreteFunction::indicator(n, &VertexSet::from_bits(b))),
                )
            });
        } else {
            let mut rng = cfg.rng_for(ti as u64);
            for _ in 0..cfg.samples {
                let f = random_nonnegative(&mut rng, n);
                let g = random_nonnegative(&mut rng, n);
                let lhs = k.bilinear(&f, &g);
                let rhs = k.bilinear(&rearrange_function(&f, order)?, &rearrange_function(&g, order)?);
                tr.observe(rhs - lhs, || (f.clone(), Some(g.clone())));
            }
        }
        let mut r = tr.finish(cfg);
        r.notes.push(format!("mode={}", if exhaustive { "exhaustive-indicators" } else { "random-functions" }));
        out.push(r);
    }
    Ok(out)
}

/// Worst margin over all times in `t_grid`.
pub fn check_convolution_rearrangement(space: &GroundSpace, t_grid: &[f64], cfg: &SearchConfig) -> Result<Report> {
    let cells = convolution_cells(space, t_grid, cfg)?;
    Ok(Report::merge_all(&cells).expect("t_grid is nonempty"))
}

/// `E(f) >= E(f^#)` over random functions plus ascent-refined candidates
/// (`cfg.restarts` of them) that try to minimize the margin.
pub fn check_dirichlet_rearrangement(space: &GroundSpace, cfg: &SearchConfig) -> Result<Report> {
    cfg.validate()?;
    let g = space.graph();
    let order = space.order();
    let n = space.vertex_count();
    let margin = |f: &DiscreteFunction| -> f64 {
        let fs = rearrange_function(f, order).expect("length checked");
        dirichlet_energy(g, f) - dirichlet_energy(g, &fs)
    };
    let mut tr = Tracker::new("dirichlet-rearrangement", space.name());
    let mut rng = cfg.rng();
    for _ in 0..cfg.samples {
        let f = random_nonnegative(&mut rng, n);
        tr.observe(margin(&f), || (f.clone(), None));
    }
    let mut rng = cfg.rng_for(1);
    for _ in 0..cfg.restarts {
        let start = random_nonnegative(&mut rng, n).into_values();
        let mut obj = |v: &[f64]| -margin(&DiscreteFunction::new(v.to_vec()));
        let (best, _) = coordinate_ascent(start, 12, &mut rng, &mut obj);
        let f = DiscreteFunction::new(best);
        tr.observe(margin(&f), || (f.clone(), None));
    }
    Ok(tr.finish(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_space;
    use crate::operators::heat_kernel;

    fn space(s: &str) -> GroundSpace {
        build_space(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn hl_equality_case_and_example() {
        let s = space("line:1");
        let f = DiscreteFunction::new(vec![1.0, 3.0, 2.0]);
        let g = DiscreteFunction::new(vec![2.0, 0.0, 1.0]);
        let lhs = f.dot(&g);
        let rhs = rearrange_function(&f, s.order()).unwrap().dot(&rearrange_function(&g, s.order()).unwrap());
        assert_eq!((lhs, rhs, rhs - lhs), (4.0, 8.0, 4.0));
        let ff = rearrange_function(&f, s.order()).unwrap();
        assert_eq!(ff.dot(&ff), f.dot(&f));
    }

    #[test]
    fn hl_exhaustive_small() {
        let cfg = SearchConfig {
            mode: Mode::ExhaustiveIndicators,
            samples: 200,
            ..Default::default()
        };
        let r = check_hardy_littlewood(&space("cycle:5"), &cfg).unwrap();
        assert!(r.passed);
        assert!(r.worst_margin.abs() < 1e-12);
        assert_eq!(r.instances_tested, 200 + 1024);
    }

    #[test]
    fn conv_zero_time_indicator_equality() {
        let s = space("cycle:4");
        let k = heat_kernel(s.graph(), &VertexSet::full(4), 0.0).unwrap();
        let (m, _, _) = exhaustive_indicator_margin(&k, s.order());
        assert_eq!(m, 0.0);
    }

    #[test]
    fn conv_cycle_four_example() {
        let s = space("cycle:4");
        let k = heat_kernel(s.graph(), &VertexSet::full(4), 1.0).unwrap();
        let a = DiscreteFunction::indicator(4, &VertexSet::new([0, 2]));
        let b = DiscreteFunction::indicator(4, &VertexSet::new([1, 3]));
        let a_s = DiscreteFunction::indicator(4, &VertexSet::new([0, 1]));
        let b_s = DiscreteFunction::indicator(4, &VertexSet::new([0, 1]));
        assert_eq!(rearrange_function(&a, s.order()).unwrap(), a_s);
        let lhs = k.bilinear(&a, &b);
        let rhs = k.bilinear(&a_s, &b_s);
        assert!(rhs - lhs >= 0.0);
        let (m, _, _) = exhaustive_indicator_margin(&k, s.order());
        assert!(m >= -1e-12);
    }

    #[test]
    fn conv_rejects_bad_grid() {
        let s = space("cycle:4");
        let cfg = SearchConfig::default();
        assert!(matches!(convolution_cells(&s, &[1.0, -0.5], &cfg), Err(Error::NegativeTime(_))));
        assert!(convolution_cells(&s, &[], &cfg).is_err());
    }

    #[test]
    fn dirichlet_line_example() {
        let s = space("line:2");
        // labels -2..2
        let f = DiscreteFunction::new(vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(dirichlet_energy(s.graph(), &f), 4.0);
        let fs = rearrange_function(&f, s.order()).unwrap();
        assert_eq!(fs.values(), &[0.0, 0.0, 1.0, 1.0, 0.0]);
        assert_eq!(dirichlet_energy(s.graph(), &fs), 2.0);
        let c = DiscreteFunction::constant(5, 0.0);
        assert_eq!(dirichlet_energy(s.graph(), &c), 0.0);
    }

    #[test]
    fn dirichlet_holds_on_small_spaces() {
        let cfg = SearchConfig {
            samples: 2000,
            restarts: 20,
            seed: 3,
            ..Default::default()
        };
        for s in ["line:4", "cycle:6", "tree:3,2", "octahedron"] {
            let r = check_dirichlet_rearrangement(&space(s), &cfg).unwrap();
            assert!(r.passed, "{s}: {}", r.worst_margin);
        }
    }
}
