//! Rearrangements of sets and functions, fiberwise (Steiner) rearrangement on
//! products, two-point polarization and the similarly ordered companion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Order, ProductSpace, SpaceSpec, VertexSet};

/// Real values indexed by vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteFunction(Vec<f64>);

impl DiscreteFunction {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        DiscreteFunction(values)
    }

    pub fn zeros(n: usize) -> Self {
        DiscreteFunction(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        DiscreteFunction(vec![c; n])
    }

    pub fn indicator(n: usize, set: &VertexSet) -> Self {
        let mut v = vec![0.0; n];
        for i in set.iter() {
            v[i] = 1.0;
        }
        DiscreteFunction(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &DiscreteFunction) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn sup_distance(&self, other: &DiscreteFunction) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Values sorted in decreasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// `{x : f(x) > t}`.
    pub fn superlevel_set(&self, t: f64) -> VertexSet {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v > t).then_some(i))
            .collect()
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.0.iter().position(|&v| v < 0.0) {
            Some(vertex) => Err(Error::NegativeValue {
                vertex,
                value: self.0[vertex],
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}

impl From<Vec<f64>> for DiscreteFunction {
    fn from(v: Vec<f64>) -> Self {
        DiscreteFunction::new(v)
    }
}

/// Vertices sorted by decreasing value, ties broken by order rank.
fn descending_by_value(values: &[f64], order: &Order) -> Vec<usize> {
    let mut idx: Vec<usize> = order.as_slice().to_vec();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

pub fn rearrange_set(set: &VertexSet, order: &Order) -> VertexSet {
    order
        .initial_segment(set.len())
        .expect("a subset is never larger than the vertex set")
}

/// `f^#`: the j-th largest value of `f` placed at the j-th vertex of the order.
pub fn rearrange_function(f: &DiscreteFunction, order: &Order) -> Result<DiscreteFunction> {
    f.check_len(order.len())?;
    let sorted = f.sorted_desc();
    let mut out = vec![0.0; order.len()];
    for (j, &v) in order.as_slice().iter().enumerate() {
        out[v] = sorted[j];
    }
    Ok(DiscreteFunction(out))
}

/// Rearranges every fiber `u(., y)` along the M order independently.
pub fn steiner_rearrange(u: &DiscreteFunction, space: &ProductSpace) -> Result<DiscreteFunction> {
    u.check_len(space.vertex_count())?;
    let mut out = vec![0.0; u.len()];
    let mut fiber = Vec::with_capacity(space.m_count());
    for y in 0..space.n_count() {
        fiber.clear();
        fiber.extend(space.fiber(y).map(|v| u.values()[v]));
        fiber.sort_by(|a, b| b.total_cmp(a));
        for (j, v) in space.fiber(y).enumerate() {
            out[v] = fiber[j];
        }
    }
    Ok(DiscreteFunction(out))
}

/// Whether `u` is fiberwise decreasing along the M order, up to `tol`.
pub fn is_steiner_symmetric(u: &DiscreteFunction, space: &ProductSpace, tol: f64) -> bool {
    (0..space.n_count()).all(|y| {
        let f: Vec<f64> = space.fiber(y).map(|v| u.values()[v]).collect();
        f.windows(2).all(|w| w[0] >= w[1] - tol)
    })
}

/// Two-point structure: an involution on the vertices plus the side that
/// receives the larger value.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    pairing: Vec<usize>,
    front: Vec<bool>,
}

impl Reflection {
    pub fn new(pairing: Vec<usize>, front: Vec<bool>) -> Result<Self> {
        if front.len() != pairing.len() {
            return Err(Error::LengthMismatch {
                expected: pairing.len(),
                actual: front.len(),
            });
        }
        for (a, &b) in pairing.iter().enumerate() {
            if b >= pairing.len() || pairing[b] != a {
                return Err(Error::NotAnInvolution(a));
            }
            if b != a && front[a] == front[b] {
                return Err(Error::Precondition(format!(
                    "pair ({a}, {b}) must have exactly one front member"
                )));
            }
        }
        Ok(Reflection { pairing, front })
    }

    /// The front member of each pair is the one of smaller order rank.
    pub fn from_pairing(pairing: Vec<usize>, order: &Order) -> Result<Self> {
        if pairing.len() != order.len() {
            return Err(Error::LengthMismatch {
                expected: order.len(),
                actual: pairing.len(),
            });
        }
        let front = pairing
            .iter()
            .enumerate()
            .map(|(a, &b)| b < pairing.len() && (a == b || order.rank(a) < order.rank(b)))
            .collect();
        Reflection::new(pairing, front)
    }

    pub fn partner(&self, v: usize) -> usize {
        self.pairing[v]
    }

    pub fn is_front(&self, v: usize) -> bool {
        self.front[v]
    }

    pub fn len(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairing.is_empty()
    }

    /// Front members precede their partners in `order`.
    pub fn check_compatible(&self, order: &Order) -> Result<()> {
        for (a, &b) in self.pairing.iter().enumerate() {
            if a != b && self.front[a] && order.rank(a) > order.rank(b) {
                return Err(Error::IncompatibleReflection(a, b));
            }
        }
        Ok(())
    }
}

/// Max of each pair to the front member, min to the back member.
pub fn polarize(f: &DiscreteFunction, r: &Reflection) -> Result<DiscreteFunction> {
    f.check_len(r.len())?;
    let mut out = f.values().to_vec();
    for a in 0..r.len() {
        let b = r.partner(a);
        if a < b {
            let (fa, fb) = (f.values()[a], f.values()[b]);
            let (hi, lo) = if fa >= fb { (fa, fb) } else { (fb, fa) };
            if r.is_front(a) {
                out[a] = hi;
                out[b] = lo;
            } else {
                out[a] = lo;
                out[b] = hi;
            }
        }
    }
    Ok(DiscreteFunction(out))
}

/// Integer reflections `x -> c - x` of the line segment or cycle, with fronts
/// taken from the canonical order.
///
/// On a line segment a vertex whose mirror image falls outside the segment is
/// left fixed; for every `c` such a vertex is the front member of its pair in
/// the infinite line, so for nonnegative functions vanishing off the segment
/// this is exactly polarization on the line.
pub fn natural_reflections(spec: &SpaceSpec, order: &Order) -> Result<Vec<Reflection>> {
    match *spec {
        SpaceSpec::Line { n } => {
            let n = n as i64;
            let count = (2 * n + 1) as usize;
            (-2 * n..=2 * n)
                .map(|c| {
                    let pairing = (0..count)
                        .map(|i| {
                            let x = i as i64 - n;
                            let y = c - x;
                            if (-n..=n).contains(&y) {
                                (y + n) as usize
                            } else {
                                i
                            }
                        })
                        .collect();
                    Reflection::from_pairing(pairing, order)
                })
                .collect()
        }
        SpaceSpec::Cycle { m } => (0..m)
            .map(|c| {
                let pairing = (0..m).map(|x| (c + m - x) % m).collect();
                Reflection::from_pairing(pairing, order)
            })
            .collect(),
        _ => Err(Error::Precondition(format!(
            "no natural reflection family for {spec}"
        ))),
    }
}

/// `θ̃`: the j-th largest value of `theta` at the vertex holding the j-th
/// largest value of `u` (ties in `u` broken by order rank).
pub fn similarly_ordered_companion(
    theta: &DiscreteFunction,
    u: &DiscreteFunction,
    order: &Order,
) -> Result<DiscreteFunction> {
    theta.check_len(order.len())?;
    u.check_len(order.len())?;
    let sorted = theta.sorted_desc();
    let mut out = vec![0.0; order.len()];
    for (j, v) in descending_by_value(u.values(), order).into_iter().enumerate() {
        out[v] = sorted[j];
    }
    Ok(DiscreteFunction(out))
}

/// Fiberwise companion on a product: within each fiber, `theta`'s values are
/// matched against the ordering of `u`.
pub fn similarly_ordered_companion_fiberwise(
    theta: &DiscreteFunction,
    u: &DiscreteFunction,
    space: &ProductSpace,
) -> Result<DiscreteFunction> {
    let n = space.vertex_count();
    theta.check_len(n)?;
    u.check_len(n)?;
    let order = space.m_space().order();
    let mut out = vec![0.0; n];
    for y in 0..space.n_count() {
        let fiber_index = |x: usize| space.index(x, y);
        let th = DiscreteFunction(
            (0..space.m_count()).map(|x| theta.values()[fiber_index(x)]).collect(),
        );
        let uf = DiscreteFunction((0..space.m_count()).map(|x| u.values()[fiber_index(x)]).collect());
        let c = similarly_ordered_companion(&th, &uf, order)?;
        for x in 0..space.m_count() {
            out[fiber_index(x)] = c.values()[x];
        }
    }
    Ok(DiscreteFunction(out))
}
