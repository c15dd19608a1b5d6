//! Brute-force and randomized verification of rearrangement inequalities.
//!
//! Every checker is a pure function of its inputs and [`SearchConfig`]; random
//! draws come from a ChaCha stream seeded by `cfg.seed`, so reports are
//! reproducible bit for bit.

mod counterexample;
mod faber_krahn;
mod inequalities;
mod polarization;
mod proposition;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::DiscreteFunction;

pub use counterexample::{
    all_orders, best_violation, find_valid_order, find_violation, sweep_orders, OrderSweep, ViolationSource, MAX_EXHAUSTIVE_ORDER,
};
pub use faber_krahn::{check_faber_krahn, connected_rooted_subsets, faber_krahn_table, FaberKrahnRow};
pub use inequalities::{
    check_convolution_rearrangement, check_dirichlet_rearrangement, check_hardy_littlewood, convolution_cells,
};
pub use polarization::{check_polarization_convergence, run_polarization, PolarizationOutcome};
pub use proposition::{check_proposition, plateau_thetas};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExhaustiveIndicators,
    RandomFunctions,
    GradientAscent,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive-indicators" | "exhaustive" => Ok(Mode::ExhaustiveIndicators),
            "random-functions" | "random" => Ok(Mode::RandomFunctions),
            "gradient-ascent" | "ascent" => Ok(Mode::GradientAscent),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ExhaustiveIndicators => "exhaustive-indicators",
            Mode::RandomFunctions => "random-functions",
            Mode::GradientAscent => "gradient-ascent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: Mode,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::RandomFunctions,
            samples: 1000,
            restarts: 10,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.restarts == 0 {
            return Err(Error::Precondition("samples and restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Independent stream for sub-task `k`.
    pub fn rng_for(&self, k: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(k + 1);
        r
    }
}

/// A function given as `(vertex, value)` pairs.
pub type Witness = Vec<(usize, f64)>;

fn witness_of(f: &DiscreteFunction) -> Witness {
    f.values().iter().copied().enumerate().collect()
}

/// Outcome of a verification run. `worst_margin` is the minimum of RHS - LHS
/// over all tested instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check_name: String,
    pub instance: String,
    pub instances_tested: u64,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_partner: Option<Witness>,
    pub passed: bool,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock seconds; left out of serialized reports unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl Report {
    pub fn strip_timing(mut self) -> Self {
        self.elapsed = None;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Combines two reports by minimum margin. Associative and commutative.
    pub fn merge(&self, other: &Report) -> Report {
        let pick_self = match self.worst_margin.total_cmp(&other.worst_margin) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                let a = serde_json::to_string(&(&self.witness, &self.witness_partner)).unwrap_or_default();
                let b = serde_json::to_string(&(&other.witness, &other.witness_partner)).unwrap_or_default();
                a <= b
            }
        };
        let best = if pick_self { self } else { other };
        let mut names: Vec<&str> = self.check_name.split('|').chain(other.check_name.split('|')).collect();
        names.sort();
        names.dedup();
        let mut instances: Vec<String> = self
            .instance
            .split('|')
            .chain(other.instance.split('|'))
            .map(str::to_string)
            .collect();
        instances.sort();
        instances.dedup();
        let mut notes: Vec<String> = self.notes.iter().chain(&other.notes).cloned().collect();
        notes.sort();
        notes.dedup();
        let tolerance = self.tolerance.min(other.tolerance);
        Report {
            check_name: names.join("|"),
            instance: instances.join("|"),
            instances_tested: self.instances_tested + other.instances_tested,
            worst_margin: best.worst_margin,
            witness: best.witness.clone(),
            witness_partner: best.witness_partner.clone(),
            passed: self.passed && other.passed,
            tolerance,
            seed: self.seed.min(other.seed),
            notes,
            elapsed: match (self.elapsed, other.elapsed) {
                (Some(a), Some(b)) => Some(a + b),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn merge_all<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Option<Report> {
        reports.into_iter().fold(None, |acc: Option<Report>, r| match acc {
            None => Some(r.clone()),
            Some(a) => Some(a.merge(r)),
        })
    }
}

/// Accumulates margins and keeps the witness of the worst one.
pub(crate) struct Tracker {
    name: String,
    instance: String,
    count: u64,
    worst: f64,
    witness: Option<(Witness, Option<Witness>)>,
    started: Instant,
}

impl Tracker {
    pub(crate) fn new(name: &str, instance: impl Into<String>) -> Self {
        Tracker {
            name: name.to_string(),
            instance: instance.into(),
            count: 0,
            worst: f64::INFINITY,
            witness: None,
            started: Instant::now(),
        }
    }

    pub(crate) fn observe(
        &mut self,
        margin: f64,
        witness: impl FnOnce() -> (DiscreteFunction, Option<DiscreteFunction>),
    ) {
        self.count += 1;
        if margin < self.worst {
            self.worst = margin;
            let (f, g) = witness();
            self.witness = Some((witness_of(&f), g.as_ref().map(witness_of)));
        }
    }

    pub(crate) fn add_count(&mut self, extra: u64) {
        self.count += extra;
    }

    pub(crate) fn finish(self, cfg: &SearchConfig) -> Report {
        let worst = if self.count == 0 { 0.0 } else { self.worst };
        let passed = worst >= -cfg.tolerance;
        let (witness, partner) = match self.witness {
            Some((w, p)) => (Some(w), p),
            None => (None, None),
        };
        Report {
            check_name: self.name,
            instance: self.instance,
            instances_tested: self.count,
            worst_margin: worst,
            witness,
            witness_partner: partner,
            passed,
            tolerance: cfg.tolerance,
            seed: cfg.seed,
            notes: Vec::new(),
            elapsed: Some(self.started.elapsed().as_secs_f64()),
        }
    }
}

/// Random nonnegative test function drawn from a mixture of shapes: smooth
/// uniform, skewed powers, sparse, and small integers (which produce ties).
pub fn random_nonnegative(rng: &mut impl Rng, n: usize) -> DiscreteFunction {
    let kind = rng.gen_range(0..4);
    let values = (0..n)
        .map(|_| match kind {
            0 => rng.gen::<f64>(),
            1 => rng.gen::<f64>().powi(rng.gen_range(2..6)),
            2 => {
                if rng.gen_bool(0.5) {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            }
            _ => rng.gen_range(0..4) as f64 / 3.0,
        })
        .collect();
    DiscreteFunction::new(values)
}

/// Coordinate ascent on `objective` over functions with values in `[0, 1]`.
///
/// Each coordinate is moved to the best of a small candidate set: the
/// endpoints, the values of the other coordinates (creating ties and rank
/// swaps), midpoints to neighbouring sorted values, and a local perturbation.
pub(crate) fn coordinate_ascent(
    mut f: Vec<f64>,
    sweeps: usize,
    rng: &mut impl Rng,
    objective: &mut impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let n = f.len();
    let mut best = objective(&f);
    for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..n {
            let current = f[i];
            let mut sorted: Vec<f64> = f.clone();
            sorted.sort_by(|a, b| a.total_cmp(b));
            let pos = sorted.partition_point(|&v| v < current);
            let mut cands = vec![0.0, 1.0, (current + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0)];
            for k in [pos.saturating_sub(1), pos + 1] {
                if let Some(&v) = sorted.get(k) {
                    cands.push(v);
                    cands.push(0.5 * (v + current));
                }
            }
            let mut best_val = current;
            for c in cands {
                f[i] = c;
                let obj = objective(&f);
                if obj > best + 1e-15 {
                    best = obj;
                    best_val = c;
                    improved = true;
                }
            }
            f[i] = best_val;
        }
        if !improved {
            break;
        }
    }
    (f, best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(name: &str, margin: f64, count: u64) -> Report {
        let cfg = SearchConfig::default();
        let mut t = Tracker::new(name, name);
        t.observe(margin, || (DiscreteFunction::new(vec![margin]), None));
        t.add_count(count - 1);
        t.finish(&cfg).strip_timing()
    }

    #[test]
    fn merge_is_commutative_and_associative() {
        let a = report("a", 0.5, 3);
        let b = report("b", -0.25, 2);
        let c = report("c", 0.0, 7);
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        let m = a.merge(&b).merge(&c);
        assert_eq!(m.worst_margin, -0.25);
        assert_eq!(m.instances_tested, 12);
        assert!(!m.passed);
        assert!(m.witness.is_some());
    }

    #[test]
    fn failing_reports_carry_witness() {
        let r = report("x", -1.0, 1);
        assert!(!r.passed);
        assert_eq!(r.witness, Some(vec![(0, -1.0)]));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = SearchConfig { samples: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SearchConfig { tolerance: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert_eq!("exhaustive-indicators".parse::<Mode>().unwrap(), Mode::ExhaustiveIndicators);
        assert!("nope".parse::<Mode>().is_err());
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let cfg = SearchConfig { seed: 42, ..Default::default() };
        let a = random_nonnegative(&mut cfg.rng(), 16);
        let b = random_nonnegative(&mut cfg.rng(), 16);
        assert_eq!(a, b);
        assert!(a.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
