//! Counterexample search for the energy inequality and search for orders
//! under which the kernel inequality holds.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{Graph, GroundSpace, Order, VertexSet};
use crate::operators::{dirichlet_energy, Kernel, SpectralKernel};
use crate::rearrange::{rearrange_function, DiscreteFunction};

use super::inequalities::{check_convolution_rearrangement, KERNEL_EXHAUSTIVE_MAX};
use super::{coordinate_ascent, random_nonnegative, Mode, Report, SearchConfig};

/// Largest vertex count for exhaustive order search.
pub const MAX_EXHAUSTIVE_ORDER: usize = 10;
/// Largest vertex count for the nested two-level scan (3^n pairs).
const TWO_LEVEL_MAX: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationSource {
    TwoLevelScan,
    CoordinateAscent,
}

/// Energy quadratic form restricted to indicator vectors of subsets.
struct IndicatorForm {
    n: usize,
    nbr: Vec<u32>,
    ambient: Vec<i64>,
}

impl IndicatorForm {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let nbr = (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
            .collect();
        let ambient = (0..n).map(|v| g.ambient_degree(v) as i64).collect();
        IndicatorForm { n, nbr, ambient }
    }

    /// `<1_S, L 1_T> = Σ_{v in S} (ambient(v) - |N(v) ∩ T|)`, for `v` in `S ∩ T`,
    /// minus adjacency terms otherwise.
    fn cross(&self, s: u32, t: u32) -> i64 {
        let mut total = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if t >> v & 1 == 1 {
                total += self.ambient[v];
            }
            total -= (self.nbr[v] & t).count_ones() as i64;
        }
        total
    }
}

/// Gain `E(f^#) - E(f)` maximized over `f = c1 1_S1 + c2 1_S2` with
/// `c1, c2 >= 0` and `c1 + c2 = 1`, given the coefficient matrix
/// `[[p, r], [r, q]]` of the gain quadratic form.
fn best_two_level(p: i64, q: i64, r: i64) -> Option<(f64, f64)> {
    let (p, q, r) = (p as f64, q as f64, r as f64);
    let gain = |s: f64| p * s * s + 2.0 * r * s * (1.0 - s) + q * (1.0 - s) * (1.0 - s);
    let mut best = (gain(1.0), 1.0);
    if gain(0.0) > best.0 {
        best = (gain(0.0), 0.0);
    }
    let denom = p + q - 2.0 * r;
    if denom < 0.0 {
        let s = (q - r) / denom;
        if (0.0..=1.0).contains(&s) && gain(s) > best.0 {
            best = (gain(s), s);
        }
    }
    (best.0 > 0.0).then_some(best)
}

/// Scans nested pairs `S1 ⊂ S2` for a two-level violation.
fn two_level_scan(form: &IndicatorForm, order: &Order, tol: f64) -> Option<DiscreteFunction> {
    let n = form.n;
    let mut balls = vec![0u32; n + 1];
    for j in 0..n {
        balls[j + 1] = balls[j] | 1 << order.vertex(j);
    }
    let full = 1u32 << n;
    let quad: Vec<i64> = (0..full).map(|s| form.cross(s, s)).collect();
    for s2 in 1..full {
        let b = s2.count_ones() as usize;
        let q = quad[balls[b] as usize] - quad[s2 as usize];
        let mut s1 = (s2 - 1) & s2;
        loop {
            let a = s1.count_ones() as usize;
            let p = quad[balls[a] as usize] - quad[s1 as usize];
            let r = form.cross(balls[a], balls[b]) - form.cross(s1, s2);
            if let Some((gain, s)) = best_two_level(p, q, r) {
                if gain > tol {
                    let mut v = vec![0.0; n];
                    for (x, slot) in v.iter_mut().enumerate() {
                        if s2 >> x & 1 == 1 {
                            *slot += 1.0 - s;
                        }
                        if s1 >> x & 1 == 1 {
                            *slot += s;
                        }
                    }
                    return Some(DiscreteFunction::new(v));
                }
            }
            if s1 == 0 {
                break;
            }
            s1 = (s1 - 1) & s2;
        }
    }
    None
}

/// `E(f^#) - E(f)` under `order`.
fn energy_gain(g: &Graph, order: &Order, f: &DiscreteFunction) -> f64 {
    let fs = rearrange_function(f, order).expect("length checked");
    dirichlet_energy(g, &fs) - dirichlet_energy(g, f)
}

/// Searches for `f` (scaled to max value 1) with `E(f^#) > E(f) + cfg.tolerance`.
///
/// Small graphs first get an exact scan of all two-level functions over nested
/// pairs of sets; then `cfg.restarts` random starts are refined by coordinate
/// ascent on `E(f^#) - E(f)`. Every returned witness is re-checked with a
/// fresh rearrangement and energy evaluation. Returning `None` does not prove
/// the inequality.
pub fn find_violation(space: &GroundSpace, order: &Order, cfg: &SearchConfig) -> Result<Option<DiscreteFunction>> {
    Ok(best_violation(space, order, cfg)?.map(|(f, _, _)| f))
}

/// Like [`find_violation`], also returning the gain and how it was found.
pub fn best_violation(
    space: &GroundSpace,
    order: &Order,
    cfg: &SearchConfig,
) -> Result<Option<(DiscreteFunction, f64, ViolationSource)>> {
    cfg.validate()?;
    let g = space.graph();
    let n = g.vertex_count();
    if order.len() != n {
        return Err(Error::InvalidOrder {
            vertex_count: n,
            reason: format!("order has {} entries", order.len()),
        });
    }
    let audit = |f: DiscreteFunction, src| {
        let gain = energy_gain(g, order, &f);
        (gain > cfg.tolerance).then_some((f, gain, src))
    };
    if n <= TWO_LEVEL_MAX && cfg.mode != Mode::RandomFunctions {
        let form = IndicatorForm::new(g);
        if let Some(f) = two_level_scan(&form, order, cfg.tolerance) {
            if let Some(hit) = audit(f, ViolationSource::TwoLevelScan) {
                return Ok(Some(hit));
            }
        }
    }
    let mut rng = cfg.rng();
    for _ in 0..cfg.restarts {
        let start = random_nonnegative(&mut rng, n).into_values();
        let mut obj = |v: &[f64]| energy_gain(g, order, &DiscreteFunction::new(v.to_vec()));
        let (best, gain) = coordinate_ascent(start, cfg.samples.clamp(1, 50), &mut rng, &mut obj);
        if gain > cfg.tolerance {
            let max = best.iter().copied().fold(0.0, f64::max);
            let f = DiscreteFunction::new(best.iter().map(|v| v / max).collect());
            if let Some(hit) = audit(f, ViolationSource::CoordinateAscent) {
                return Ok(Some(hit));
            }
        }
    }
    Ok(None)
}

/// Results of running the violation search across many orders.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSweep {
    pub orders_tested: usize,
    pub orders_violated: usize,
    /// Smallest gain among orders with a witness.
    pub weakest_gain: f64,
    /// An order with no witness, if any.
    pub unviolated: Option<Vec<usize>>,
    pub report: Report,
}

/// Runs [`best_violation`] for every order in `orders` (in parallel, merged
/// in input order). The report's margin is `-weakest_gain` when every order
/// is violated, otherwise 0 with the unviolated order noted.
pub fn sweep_orders(space: &GroundSpace, orders: &[Vec<usize>], cfg: &SearchConfig) -> Result<OrderSweep> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let results: Vec<Result<Option<(DiscreteFunction, f64, ViolationSource)>>> = orders
        .par_iter()
        .map(|perm| {
            let order = Order::new(perm.clone())?;
            best_violation(space, &order, cfg)
        })
        .collect();
    let mut violated = 0;
    let mut weakest: Option<(f64, usize, DiscreteFunction)> = None;
    let mut unviolated = None;
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Some((f, gain, _)) => {
                violated += 1;
                if weakest.as_ref().is_none_or(|w| gain < w.0) {
                    weakest = Some((gain, i, f));
                }
            }
            None => {
                if unviolated.is_none() {
                    unviolated = Some(orders[i].clone());
                }
            }
        }
    }
    let all = violated == orders.len() && !orders.is_empty();
    let weakest_gain = weakest.as_ref().map_or(0.0, |w| w.0);
    let worst_margin = if all { -weakest_gain } else { 0.0 };
    let mut notes = vec![format!("orders_tested={}", orders.len()), format!("orders_violated={violated}")];
    let (witness, partner) = match &weakest {
        Some((_, i, f)) => {
            notes.push(format!("weakest_order={:?}", orders[*i]));
            (
                Some(f.values().iter().copied().enumerate().collect()),
                Some(orders[*i].iter().enumerate().map(|(j, &v)| (j, v as f64)).collect()),
            )
        }
        None => (None, None),
    };
    if let Some(u) = &unviolated {
        notes.push(format!("unviolated_order={u:?}"));
    }
    let report = Report {
        check_name: "dirichlet-violation-sweep".into(),
        instance: space.name().to_string(),
        instances_tested: orders.len() as u64,
        worst_margin,
        witness,
        witness_partner: partner,
        passed: worst_margin >= -cfg.tolerance,
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        notes,
        elapsed: Some(started.elapsed().as_secs_f64()),
    };
    Ok(OrderSweep {
        orders_tested: orders.len(),
        orders_violated: violated,
        weakest_gain,
        unviolated,
        report,
    })
}

/// `max_{|A|=a, |B|=b} K(A, B)` for all sizes.
fn best_pair_sums(k: &Kernel, n: usize) -> Vec<Vec<f64>> {
    let full = 1usize << n;
    let mut best = vec![vec![f64::NEG_INFINITY; n + 1]; n + 1];
    let mut ka = vec![0.0; n];
    let mut sums = vec![0.0; full];
    for a in 0..full {
        for (y, slot) in ka.iter_mut().enumerate() {
            *slot = (0..n).filter(|&x| a >> x & 1 == 1).map(|x| k.get(x, y)).sum();
        }
        let ca = a.count_ones() as usize;
        for b in 0..full {
            if b > 0 {
                let low = b.trailing_zeros() as usize;
                sums[b] = sums[b & (b - 1)] + ka[low];
            }
            let cb = b.count_ones() as usize;
            if sums[b] > best[ca][cb] {
                best[ca][cb] = sums[b];
            }
        }
    }
    best
}

/// Depth-first search over orders, pruning a prefix as soon as one of its
/// ball pairs falls short of the best pair of sets of the same sizes.
fn dfs_valid_order(kernels: &[Kernel], bests: &[Vec<Vec<f64>>], n: usize, tol: f64) -> Option<Vec<usize>> {
    struct State<'a> {
        kernels: &'a [Kernel],
        bests: &'a [Vec<Vec<f64>>],
        n: usize,
        tol: f64,
        prefix: Vec<usize>,
        used: Vec<bool>,
        // cum[t][a][b] for the current prefix
        cum: Vec<Vec<Vec<f64>>>,
    }
    fn go(s: &mut State) -> bool {
        let k = s.prefix.len();
        if k == s.n {
            return true;
        }
        for v in 0..s.n {
            if s.used[v] {
                continue;
            }
            let mut ok = true;
            for (ti, kern) in s.kernels.iter().enumerate() {
                // row[b] = K(v, ball_b) over the current prefix
                let mut row = vec![0.0; k + 1];
                for b in 1..=k {
                    row[b] = row[b - 1] + kern.get(v, s.prefix[b - 1]);
                }
                let cum = &mut s.cum[ti];
                for a in 0..=k {
                    cum[a][k + 1] = cum[a][k] + row[a];
                    cum[k + 1][a] = cum[a][k + 1];
                }
                cum[k + 1][k + 1] = cum[k][k + 1] + row[k] + kern.get(v, v);
                for a in 0..=k + 1 {
                    if cum[a][k + 1] < s.bests[ti][a][k + 1] - s.tol {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                s.used[v] = true;
                s.prefix.push(v);
                if go(s) {
                    return true;
                }
                s.prefix.pop();
                s.used[v] = false;
            }
        }
        false
    }
    let mut st = State {
        kernels,
        bests,
        n,
        tol,
        prefix: Vec::with_capacity(n),
        used: vec![false; n],
        cum: vec![vec![vec![0.0; n + 1]; n + 1]; kernels.len()],
    };
    go(&mut st).then_some(st.prefix)
}

/// Finds an order under which the kernel inequality holds on every indicator
/// pair at every time in `t_grid`.
///
/// Exhaustive (pruned depth-first over all `n!` orders) when `n <=
/// MAX_EXHAUSTIVE_ORDER`; larger spaces require `Mode::RandomFunctions`, which
/// tries `cfg.samples` random orders against a randomized kernel check.
pub fn find_valid_order(space: &GroundSpace, t_grid: &[f64], cfg: &SearchConfig) -> Result<Option<Order>> {
    cfg.validate()?;
    if t_grid.is_empty() {
        return Err(Error::Precondition("t_grid must be nonempty".into()));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    let n = space.vertex_count();
    if n <= MAX_EXHAUSTIVE_ORDER && cfg.mode != Mode::RandomFunctions {
        let spectral = SpectralKernel::new(space.graph(), &VertexSet::full(n))?;
        let kernels: Vec<Kernel> = t_grid.iter().map(|&t| spectral.at(t)).collect::<Result<_>>()?;
        let bests: Vec<_> = kernels.iter().map(|k| best_pair_sums(k, n)).collect();
        return dfs_valid_order(&kernels, &bests, n, cfg.tolerance)
            .map(Order::new)
            .transpose();
    }
    if cfg.mode != Mode::RandomFunctions {
        return Err(Error::TooLarge(format!(
            "{n} vertices exceeds the exhaustive order search limit of {MAX_EXHAUSTIVE_ORDER}; use random mode"
        )));
    }
    let mut rng = cfg.rng();
    let check_cfg = SearchConfig {
        mode: if n <= KERNEL_EXHAUSTIVE_MAX {
            Mode::ExhaustiveIndicators
        } else {
            Mode::RandomFunctions
        },
        ..*cfg
    };
    for _ in 0..cfg.samples {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let candidate = space.with_order(Order::new(perm)?)?;
        if check_convolution_rearrangement(&candidate, t_grid, &check_cfg)?.passed {
            return Ok(Some(candidate.order().clone()));
        }
    }
    Ok(None)
}

/// All `n!` permutations of `0..n`, in lexicographic order.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_space, SpaceSpec};

    fn space(s: &str) -> GroundSpace {
        build_space(&s.parse().unwrap()).unwrap()
    }

    fn cfg() -> SearchConfig {
        SearchConfig {
            mode: Mode::GradientAscent,
            samples: 20,
            restarts: 20,
            seed: 11,
            tolerance: 1e-9,
        }
    }

    #[test]
    fn indicator_form_matches_energy() {
        let s = space("line:3");
        let form = IndicatorForm::new(s.graph());
        for set in [0b0000001u32, 0b0011100, 0b1010101, 0b1111111] {
            let f = DiscreteFunction::indicator(7, &VertexSet::from_bits(set as u64));
            assert_eq!(form.cross(set, set) as f64, dirichlet_energy(s.graph(), &f));
        }
    }

    #[test]
    fn two_level_optimum() {
        assert_eq!(best_two_level(-1, -1, -1), None);
        assert_eq!(best_two_level(2, -1, 0).unwrap(), (2.0, 1.0));
        // p = q = -1, r = 2: gain(s) = -s^2 + 4 s (1 - s) - (1 - s)^2, max 1/2 at s = 1/2
        let (g, s) = best_two_level(-1, -1, 2).unwrap();
        assert!((g - 0.5).abs() < 1e-12 && (s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_violation_on_line() {
        let s = space("line:3");
        assert!(find_violation(&s, s.order(), &cfg()).unwrap().is_none());
    }

    #[test]
    fn cube_natural_order_is_violated() {
        let s = space("cube");
        let f = find_violation(&s, s.order(), &cfg()).unwrap().unwrap();
        let fs = rearrange_function(&f, s.order()).unwrap();
        assert!(dirichlet_energy(s.graph(), &fs) - dirichlet_energy(s.graph(), &f) > 1e-6);
    }

    #[test]
    fn ascent_alone_finds_cube_violation() {
        let s = space("cube");
        let c = SearchConfig {
            mode: Mode::RandomFunctions,
            restarts: 200,
            ..cfg()
        };
        let hit = best_violation(&s, s.order(), &c).unwrap();
        let (_, gain, src) = hit.expect("ascent should find the cube violation");
        assert_eq!(src, ViolationSource::CoordinateAscent);
        assert!(gain > 1e-9);
    }

    #[test]
    fn valid_order_line() {
        let s = space("line:2");
        let o = find_valid_order(&s, &[0.1, 1.0, 10.0], &cfg()).unwrap().unwrap();
        let labels: Vec<String> = o.as_slice().iter().map(|&v| s.graph().label(v)).collect();
        let canonical = ["0", "1", "-1", "2", "-2"];
        let mirrored = ["0", "-1", "1", "-2", "2"];
        assert!(labels == canonical || labels == mirrored, "{labels:?}");
    }

    #[test]
    fn valid_order_octahedron() {
        let s = space("octahedron");
        let o = find_valid_order(&s, &[0.1, 1.0, 10.0], &cfg()).unwrap().unwrap();
        let fixed = s.with_order(o).unwrap();
        let c = SearchConfig {
            mode: Mode::ExhaustiveIndicators,
            tolerance: 1e-10,
            ..cfg()
        };
        assert!(check_convolution_rearrangement(&fixed, &[0.1, 1.0, 10.0], &c).unwrap().passed);
    }

    #[test]
    fn valid_order_size_limit() {
        let s = build_space(&SpaceSpec::Cycle { m: 12 }).unwrap();
        assert!(matches!(find_valid_order(&s, &[1.0], &cfg()), Err(Error::TooLarge(_))));
    }

    #[test]
    fn cube_has_no_valid_order() {
        assert_eq!(find_valid_order(&space("cube"), &[0.1, 1.0, 10.0], &cfg()).unwrap(), None);
    }

    #[test]
    fn order_search_agrees_with_brute_force() {
        let exhaustive = SearchConfig {
            mode: Mode::ExhaustiveIndicators,
            tolerance: 1e-10,
            ..cfg()
        };
        let paw = crate::graphs::Graph::new(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let spaces = [
            space("hypercube:2"),
            space("cycle:5"),
            GroundSpace::new(paw, Order::identity(4)).unwrap(),
        ];
        for s in spaces {
            for t in [[0.5], [3.0]] {
                let found = find_valid_order(&s, &t, &cfg()).unwrap();
                let brute = all_orders(s.vertex_count()).into_iter().any(|perm| {
                    let cand = s.with_order(Order::new(perm).unwrap()).unwrap();
                    check_convolution_rearrangement(&cand, &t, &exhaustive).unwrap().passed
                });
                assert_eq!(found.is_some(), brute, "{} t={}", s.name(), t[0]);
                if let Some(o) = found {
                    let cand = s.with_order(o).unwrap();
                    assert!(check_convolution_rearrangement(&cand, &t, &exhaustive).unwrap().passed);
                }
            }
        }
    }
}
