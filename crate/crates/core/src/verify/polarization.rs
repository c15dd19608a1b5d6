//! Iterated two-point polarization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::GroundSpace;
use crate::operators::dirichlet_energy;
use crate::rearrange::{polarize, rearrange_function, DiscreteFunction, Reflection};

use super::{random_nonnegative, Report, SearchConfig, Tracker};

/// Cap on full passes through the reflection list per function.
const MAX_SWEEPS: usize = 100_000;
const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationOutcome {
    pub report: Report,
    /// Functions whose fixed point equals the rearrangement.
    pub converged: usize,
    /// Functions stuck at a fixed point other than the rearrangement.
    pub stalled: usize,
    pub max_sweeps: usize,
    /// Largest sup-distance between a fixed point and the rearrangement.
    pub max_distance: f64,
}

/// Polarizes `f` through `reflections` in turn until a full pass changes
/// nothing. Returns the fixed point, the number of passes that changed `f`
/// and the smallest single-step energy decrease.
fn iterate(space: &GroundSpace, f: &DiscreteFunction, reflections: &[Reflection]) -> Result<(DiscreteFunction, usize, f64)> {
    let g = space.graph();
    let mut cur = f.clone();
    let mut energy = dirichlet_energy(g, &cur);
    let mut worst_step = f64::INFINITY;
    for sweep in 0..MAX_SWEEPS {
        let mut changed = false;
        for r in reflections {
            let next = polarize(&cur, r)?;
            if next != cur {
                let e = dirichlet_energy(g, &next);
                // relative to the energy scale so large values do not trip the tolerance
                worst_step = worst_step.min((energy - e) / energy.max(1.0));
                energy = e;
                cur = next;
                changed = true;
            }
        }
        if !changed {
            return Ok((cur, sweep, worst_step));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        last_change: f64::NAN,
    })
}

/// Margin per function: the smallest energy decrease over single steps.
/// Fixed points that differ from `f^#` are counted as stalls, not failures.
pub fn run_polarization(space: &GroundSpace, reflections: &[Reflection], cfg: &SearchConfig) -> Result<PolarizationOutcome> {
    cfg.validate()?;
    if reflections.is_empty() {
        return Err(Error::Precondition("at least one reflection is required".into()));
    }
    for r in reflections {
        r.check_compatible(space.order())?;
    }
    let n = space.vertex_count();
    let mut tr = Tracker::new("polarization", space.name());
    let mut rng = cfg.rng();
    let (mut converged, mut stalled, mut max_sweeps, mut max_distance) = (0, 0, 0, 0.0f64);
    for _ in 0..cfg.samples {
        let f = random_nonnegative(&mut rng, n);
        let (fixed, sweeps, step) = iterate(space, &f, reflections)?;
        let target = rearrange_function(&f, space.order())?;
        let d = fixed.sup_distance(&target);
        max_distance = max_distance.max(d);
        max_sweeps = max_sweeps.max(sweeps);
        if d < CONVERGENCE_TOL {
            converged += 1;
        } else {
            stalled += 1;
        }
        let margin = if step.is_finite() { step } else { 0.0 };
        tr.observe(margin, || (f.clone(), Some(fixed.clone())));
    }
    let mut report = tr.finish(cfg);
    report.notes = vec![
        format!("converged={converged}"),
        format!("stalled={stalled}"),
        format!("max_sweeps={max_sweeps}"),
        format!("reflections={}", reflections.len()),
    ];
    Ok(PolarizationOutcome {
        report,
        converged,
        stalled,
        max_sweeps,
        max_distance,
    })
}

pub fn check_polarization_convergence(
    space: &GroundSpace,
    reflections: &[Reflection],
    cfg: &SearchConfig,
) -> Result<Report> {
    Ok(run_polarization(space, reflections, cfg)?.report)
}
