//! Semilinear elliptic and parabolic difference equations on product spaces,
//! and the comparison of their solutions with the symmetrized problem.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{build_space, product, Graph, ProductSpace, SpaceSpec, VertexSet};
use crate::operators::{dirichlet_eigenvalue, dirichlet_matrix, j_transform, laplacian, star_function};
use crate::rearrange::{is_steiner_symmetric, steiner_rearrange, DiscreteFunction};

const MAX_ITER: usize = 100_000;
const STEP_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
pub const COMPARISON_TOLERANCE: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-10;

/// Nonlinearity `φ`, continuous and decreasing on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Zero,
    /// `s ↦ a / (1 + s)`
    Reciprocal { a: f64 },
    /// `s ↦ max(a - b s, 0)`
    LinearDecreasing { a: f64, b: f64 },
}

impl Phi {
    /// Negative arguments are clamped to 0.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match *self {
            Phi::Zero => 0.0,
            Phi::Reciprocal { a } => a / (1.0 + s),
            Phi::LinearDecreasing { a, b } => (a - b * s).max(0.0),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match *self {
            Phi::Zero => 0.0,
            Phi::Reciprocal { a } => -a / ((1.0 + s) * (1.0 + s)),
            Phi::LinearDecreasing { a, b } => {
                if a - b * s > 0.0 {
                    -b
                } else {
                    0.0
                }
            }
        }
    }

    /// Lipschitz constant on `[0, ∞)`.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Phi::Zero => 0.0,
            Phi::Reciprocal { a } => a,
            Phi::LinearDecreasing { b, .. } => b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Phi::Zero => true,
            Phi::Reciprocal { a } => a >= 0.0 && a.is_finite(),
            Phi::LinearDecreasing { a, b } => a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("phi {self} must be nonnegative at 0 and decreasing")))
        }
    }
}

impl FromStr for Phi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid phi {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let phi = match s.split_once(':') {
            None if s == "zero" => Phi::Zero,
            Some(("reciprocal", a)) => Phi::Reciprocal { a: num(a)? },
            Some(("linear-decreasing", rest)) => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Phi::LinearDecreasing { a: num(a)?, b: num(b)? }
            }
            _ => return Err(bad()),
        };
        phi.validate()?;
        Ok(phi)
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Zero => write!(f, "zero"),
            Phi::Reciprocal { a } => write!(f, "reciprocal:{a}"),
            Phi::LinearDecreasing { a, b } => write!(f, "linear-decreasing:{a},{b}"),
        }
    }
}

/// How the `ψ^# u` term of the symmetrized equation is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiCoupling {
    /// `-Δv = φ(v) + ψ^# v + λ^#`
    #[default]
    OwnUnknown,
    /// `-Δv = φ(v) + ψ^# u^# + λ^#` with `u` the solution of the original problem.
    OriginalSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub product: ProductSpace,
    pub omega: VertexSet,
    pub phi: Phi,
    pub psi: DiscreteFunction,
    pub lam: DiscreteFunction,
    pub initial: Option<DiscreteFunction>,
}

impl ProblemSpec {
    /// `ψ = λ = 0`, no initial condition.
    pub fn new(product: ProductSpace, omega: VertexSet, phi: Phi) -> Self {
        let n = product.vertex_count();
        ProblemSpec {
            product,
            omega,
            phi,
            psi: DiscreteFunction::zeros(n),
            lam: DiscreteFunction::zeros(n),
            initial: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.product.vertex_count();
        if self.omega.is_empty() {
            return Err(Error::EmptySet);
        }
        if !self.omega.is_subset_of(n) {
            return Err(Error::InvalidGraph("omega contains a vertex outside the product".into()));
        }
        self.phi.validate()?;
        self.psi.check_len(n)?;
        self.lam.check_len(n)?;
        if self.psi.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("psi must be finite".into()));
        }
        self.lam.check_nonnegative()?;
        if let Some(init) = &self.initial {
            init.check_len(n)?;
            init.check_nonnegative()?;
            let mask = self.omega.mask(n);
            if let Some(v) = (0..n).find(|&v| !mask[v] && init.values()[v] != 0.0) {
                return Err(Error::Precondition(format!("initial condition is nonzero at {v} outside omega")));
            }
        }
        let sym = symmetric_domain(&self.product, &self.omega);
        let lambda1 = dirichlet_eigenvalue(self.product.graph(), &sym)?;
        let psi_sup = self.psi.values().iter().enumerate().filter(|&(v, _)| self.omega.contains(v)).map(|(_, &p)| p).fold(f64::NEG_INFINITY, f64::max);
        if psi_sup >= lambda1 {
            return Err(Error::Unsolvable(format!(
                "sup psi = {psi_sup} is not below the first Dirichlet eigenvalue {lambda1} of the symmetrized domain"
            )));
        }
        Ok(())
    }
}

/// Fiberwise initial segments with the same cardinalities as `omega`.
pub fn symmetric_domain(space: &ProductSpace, omega: &VertexSet) -> VertexSet {
    let mut out = Vec::with_capacity(omega.len());
    for y in 0..space.n_count() {
        let count = space.fiber(y).filter(|&v| omega.contains(v)).count();
        out.extend((0..count).map(|r| space.at_rank(r, y)));
    }
    VertexSet::new(out)
}

/// Rearranges the restriction of `f` to `omega` onto the symmetric domain,
/// fiber by fiber. Zero off the symmetric domain.
pub fn rearrange_on_domain(f: &DiscreteFunction, space: &ProductSpace, omega: &VertexSet) -> Result<DiscreteFunction> {
    f.check_len(space.vertex_count())?;
    let mut out = vec![0.0; space.vertex_count()];
    for y in 0..space.n_count() {
        let mut vals: Vec<f64> = space.fiber(y).filter(|&v| omega.contains(v)).map(|v| f.values()[v]).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        for (r, val) in vals.into_iter().enumerate() {
            out[space.at_rank(r, y)] = val;
        }
    }
    Ok(DiscreteFunction::new(out))
}

/// The symmetrized problem under the default coupling.
pub fn symmetrize_problem(p: &ProblemSpec) -> Result<ProblemSpec> {
    symmetrize_problem_with(p, PsiCoupling::OwnUnknown, None)
}

/// `u` is required for [`PsiCoupling::OriginalSolution`].
pub fn symmetrize_problem_with(p: &ProblemSpec, coupling: PsiCoupling, u: Option<&DiscreteFunction>) -> Result<ProblemSpec> {
    let space = &p.product;
    let omega = symmetric_domain(space, &p.omega);
    let psi = rearrange_on_domain(&p.psi, space, &p.omega)?;
    let lam = rearrange_on_domain(&p.lam, space, &p.omega)?;
    let initial = p
        .initial
        .as_ref()
        .map(|f| rearrange_on_domain(f, space, &p.omega))
        .transpose()?;
    let (psi, lam) = match coupling {
        PsiCoupling::OwnUnknown => (psi, lam),
        PsiCoupling::OriginalSolution => {
            let u = u.ok_or_else(|| Error::Precondition("the original solution is required for this coupling".into()))?;
            let us = steiner_rearrange(u, space)?;
            let source: Vec<f64> = lam
                .values()
                .iter()
                .zip(psi.values())
                .zip(us.values())
                .map(|((l, p), u)| l + p * u)
                .collect();
            (DiscreteFunction::zeros(space.vertex_count()), DiscreteFunction::new(source))
        }
    };
    Ok(ProblemSpec {
        product: space.clone(),
        omega,
        phi: p.phi,
        psi,
        lam,
        initial,
    })
}

/// `L_D - diag(ψ) + shift I` on the domain's index space.
fn system_matrix(graph: &Graph, omega: &VertexSet, psi: &DiscreteFunction, shift: f64) -> DMatrix<f64> {
    let mut a = dirichlet_matrix(graph, omega);
    for (i, v) in omega.iter().enumerate() {
        a[(i, i)] += shift - psi.values()[v];
    }
    a
}

fn cholesky(a: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a).ok_or_else(|| Error::Unsolvable(format!("{what} is not positive definite")))
}

/// Factored operator for repeated solves of `A u = φ(u) + rhs`.
struct System<'a> {
    a: DMatrix<f64>,
    shifted: Cholesky<f64, Dyn>,
    phi: &'a Phi,
}

impl<'a> System<'a> {
    fn new(a: DMatrix<f64>, phi: &'a Phi) -> Result<Self> {
        let k = a.nrows();
        cholesky(a.clone(), "L_D - diag(psi)")?;
        let shifted = cholesky(&a + DMatrix::identity(k, k) * phi.lipschitz(), "the shifted operator")?;
        Ok(System { a, shifted, phi })
    }

    /// Solves for `u >= 0`, starting from 0.
    ///
    /// Shifted monotone iteration `(A + cI) u_{k+1} = c u_k + φ(u_k) + rhs`
    /// with `c = Lip(φ)`: `A + cI` is a positive definite Z-matrix, so its
    /// inverse is entrywise nonnegative and the iterates increase. If the
    /// iteration is slow, Newton steps finish once changes are small.
    fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let (a, phi) = (&self.a, self.phi);
        let k = a.nrows();
        let c = phi.lipschitz();
        let residual = |u: &DVector<f64>| a * u - u.map(|s| phi.eval(s)) - rhs;
        let mut u = DVector::zeros(k);
        let mut change = f64::INFINITY;
        let mut iter = 0;
        while iter < MAX_ITER {
            iter += 1;
            let next = self.shifted.solve(&(&u * c + u.map(|s| phi.eval(s)) + rhs));
            change = (&next - &u).amax();
            u = next;
            if change < STEP_TOL * (1.0 + u.amax()) || (iter >= 200 && change < 1e-6) {
                break;
            }
        }
        if change >= 1e-6 {
            return Err(Error::NoConvergence {
                iterations: iter,
                last_change: change,
            });
        }
        for _ in 0..50 {
            let r = residual(&u);
            if r.amax() <= 1e-13 * (1.0 + u.amax()) {
                break;
            }
            let mut j = a.clone();
            for i in 0..k {
                j[(i, i)] -= phi.derivative(u[i]);
            }
            let Some(step) = Cholesky::new(j).map(|ch| ch.solve(&r)) else {
                break;
            };
            u -= &step;
            if step.amax() < 1e-15 * (1.0 + u.amax()) {
                break;
            }
        }
        let r = residual(&u).amax();
        if !(r <= RESIDUAL_TOL) {
            return Err(Error::NoConvergence {
                iterations: iter,
                last_change: r,
            });
        }
        if u.iter().any(|&s| s < -1e-12) {
            return Err(Error::Unsolvable("solution is not nonnegative".into()));
        }
        Ok(u.map(|s| s.max(0.0)))
    }
}

fn scatter(omega: &VertexSet, n: usize, u: &DVector<f64>) -> DiscreteFunction {
    let mut out = vec![0.0; n];
    for (i, v) in omega.iter().enumerate() {
        out[v] = u[i];
    }
    DiscreteFunction::new(out)
}

fn gather(omega: &VertexSet, f: &DiscreteFunction) -> DVector<f64> {
    DVector::from_iterator(omega.len(), omega.iter().map(|v| f.values()[v]))
}

/// `‖-Δu - φ(u) - ψu - λ‖∞` over omega, evaluated with the graph Laplacian.
pub fn elliptic_residual(p: &ProblemSpec, u: &DiscreteFunction) -> Result<f64> {
    let lap = laplacian(p.product.graph(), u, &p.omega)?;
    Ok(p.omega
        .iter()
        .map(|v| {
            let uv = u.values()[v];
            (-lap.values()[v] - p.phi.eval(uv) - p.psi.values()[v] * uv - p.lam.values()[v]).abs()
        })
        .fold(0.0, f64::max))
}

/// Nonnegative solution of `-Δu = φ(u) + ψu + λ` on omega, zero elsewhere.
pub fn solve_elliptic(p: &ProblemSpec) -> Result<DiscreteFunction> {
    p.validate()?;
    let a = system_matrix(p.product.graph(), &p.omega, &p.psi, 0.0);
    let u = System::new(a, &p.phi)?.solve(&gather(&p.omega, &p.lam))?;
    Ok(scatter(&p.omega, p.product.vertex_count(), &u))
}

/// Implicit Euler for `∂_t u = Δu + φ(u) + ψu + λ`; `steps + 1` snapshots.
pub fn solve_parabolic(p: &ProblemSpec, dt: f64, steps: usize) -> Result<Vec<DiscreteFunction>> {
    p.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition("dt must be positive".into()));
    }
    let init = p
        .initial
        .as_ref()
        .ok_or_else(|| Error::Precondition("parabolic problems need an initial condition".into()))?;
    let n = p.product.vertex_count();
    let sys = System::new(system_matrix(p.product.graph(), &p.omega, &p.psi, 1.0 / dt), &p.phi)?;
    let lam = gather(&p.omega, &p.lam);
    let mut u = gather(&p.omega, init);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(init.clone());
    for _ in 0..steps {
        u = sys.solve(&(&lam + &u / dt))?;
        out.push(scatter(&p.omega, n, &u));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub instance: String,
    /// `min (Jv - u^I)`.
    pub star_margin: f64,
    /// `min_{y,c} Σ_x (v - c)_+ - Σ_x (u - c)_+` over breakpoints `c`.
    pub plateau_margin: f64,
    /// Per fiber `y`: `v(O, y) - max_x u(x, y)`.
    pub max_margins: Vec<f64>,
    /// Per fiber `y`: `Σ v^p - Σ u^p` for `p = 1, 2, 3`.
    pub phi_means: Vec<[f64; 3]>,
    pub symmetric_v: bool,
    /// The star and plateau margins agree on sign.
    pub equivalence_consistent: bool,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<usize>,
    /// Discretization slack `c·dt` added to the tolerance (parabolic only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    /// Worst deficit at `dt` and at `dt/2` (parabolic only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deficits: Option<[f64; 2]>,
}

impl ComparisonReport {
    /// Smallest of all margins.
    pub fn worst_margin(&self) -> f64 {
        let phi = self.phi_means.iter().flatten().copied();
        self.max_margins
            .iter()
            .copied()
            .chain(phi)
            .fold(self.star_margin.min(self.plateau_margin), f64::min)
    }
}

struct Margins {
    star: f64,
    plateau: f64,
    max: Vec<f64>,
    phi: Vec<[f64; 3]>,
    symmetric: bool,
}

fn margins(space: &ProductSpace, u: &DiscreteFunction, v: &DiscreteFunction) -> Result<Margins> {
    let jv = j_transform(v, space)?;
    let ui = star_function(u, space)?;
    let star = jv
        .values()
        .iter()
        .zip(ui.values())
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    let mut plateau = f64::INFINITY;
    let mut max = Vec::with_capacity(space.n_count());
    let mut phi = Vec::with_capacity(space.n_count());
    for y in 0..space.n_count() {
        let uf: Vec<f64> = space.fiber(y).map(|w| u.values()[w]).collect();
        let vf: Vec<f64> = space.fiber(y).map(|w| v.values()[w]).collect();
        for &c in uf.iter().chain(&vf).chain(&[0.0]) {
            let s = |f: &[f64]| f.iter().map(|&x| (x - c).max(0.0)).sum::<f64>();
            plateau = plateau.min(s(&vf) - s(&uf));
        }
        max.push(vf[0] - uf.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let pow = |f: &[f64], p: i32| f.iter().map(|x| x.powi(p)).sum::<f64>();
        phi.push([1, 2, 3].map(|p| pow(&vf, p) - pow(&uf, p)));
    }
    Ok(Margins {
        star,
        plateau,
        max,
        phi,
        symmetric: is_steiner_symmetric(v, space, SYMMETRY_TOL),
    })
}

fn instance_label(p: &ProblemSpec) -> String {
    format!(
        "{}x{} |omega|={} phi={}",
        p.product.m_space().name(),
        p.product.n_count(),
        p.omega.len(),
        p.phi
    )
}

fn sign_agrees(a: f64, b: f64) -> bool {
    (a >= -COMPARISON_TOLERANCE) == (b >= -COMPARISON_TOLERANCE)
}

pub fn compare_elliptic(p: &ProblemSpec) -> Result<ComparisonReport> {
    compare_elliptic_with(p, PsiCoupling::OwnUnknown)
}

/// Solves the original and symmetrized problems and compares `u` with `v`.
pub fn compare_elliptic_with(p: &ProblemSpec, coupling: PsiCoupling) -> Result<ComparisonReport> {
    let u = solve_elliptic(p)?;
    let q = symmetrize_problem_with(p, coupling, Some(&u))?;
    let v = solve_elliptic(&q)?;
    let m = margins(&p.product, &u, &v)?;
    let mut r = ComparisonReport {
        instance: instance_label(p),
        star_margin: m.star,
        plateau_margin: m.plateau,
        max_margins: m.max,
        phi_means: m.phi,
        symmetric_v: m.symmetric,
        equivalence_consistent: sign_agrees(m.star, m.plateau),
        passed: false,
        snapshots: None,
        slack: None,
        deficits: None,
    };
    r.passed = r.worst_margin() >= -COMPARISON_TOLERANCE && r.symmetric_v;
    Ok(r)
}

fn parabolic_margins(p: &ProblemSpec, q: &ProblemSpec, dt: f64, steps: usize) -> Result<(Margins, usize)> {
    let us = solve_parabolic(p, dt, steps)?;
    let vs = solve_parabolic(q, dt, steps)?;
    let ny = p.product.n_count();
    let mut acc = Margins {
        star: f64::INFINITY,
        plateau: f64::INFINITY,
        max: vec![f64::INFINITY; ny],
        phi: vec![[f64::INFINITY; 3]; ny],
        symmetric: true,
    };
    for (u, v) in us.iter().zip(&vs) {
        let m = margins(&p.product, u, v)?;
        acc.star = acc.star.min(m.star);
        acc.plateau = acc.plateau.min(m.plateau);
        for y in 0..ny {
            acc.max[y] = acc.max[y].min(m.max[y]);
            for k in 0..3 {
                acc.phi[y][k] = acc.phi[y][k].min(m.phi[y][k]);
            }
        }
        acc.symmetric &= m.symmetric;
    }
    Ok((acc, us.len()))
}

fn deficit(m: &Margins) -> f64 {
    let worst = m.max.iter().copied().fold(m.star.min(m.plateau), f64::min);
    (-worst).max(0.0)
}

/// Snapshot-wise comparison. The tolerance is widened by `c·dt`, with `c`
/// estimated from a second run at `dt/2` over the same horizon; the run
/// passes only if that second run's deficit is at most half the first's.
pub fn compare_parabolic(p: &ProblemSpec, dt: f64, steps: usize) -> Result<ComparisonReport> {
    let q = symmetrize_problem(p)?;
    let (m, snaps) = parabolic_margins(p, &q, dt, steps)?;
    let (m_half, _) = parabolic_margins(p, &q, dt / 2.0, steps * 2)?;
    let (d, d_half) = (deficit(&m), deficit(&m_half));
    let c = (d / dt).max(d_half / (dt / 2.0));
    let slack = c * dt;
    let halves = d_half <= 0.5 * d + COMPARISON_TOLERANCE;
    let mut r = ComparisonReport {
        instance: format!("{} dt={dt} steps={steps}", instance_label(p)),
        star_margin: m.star,
        plateau_margin: m.plateau,
        max_margins: m.max,
        phi_means: m.phi,
        symmetric_v: m.symmetric && m_half.symmetric,
        equivalence_consistent: sign_agrees(m.star, m.plateau),
        passed: false,
        snapshots: Some(snaps),
        slack: Some(slack),
        deficits: Some([d, d_half]),
    };
    r.passed = r.worst_margin() >= -(COMPARISON_TOLERANCE + slack) && halves && r.symmetric_v;
    Ok(r)
}

/// Random problem on `product`: omega keeps each vertex with probability
/// 0.7, `λ >= 0` and `0 <= ψ <= λ1/2` on omega, and a random initial
/// condition supported in omega.
pub fn random_instance(product: &ProductSpace, phi: Phi, rng: &mut impl Rng) -> Result<ProblemSpec> {
    let n = product.vertex_count();
    let mut members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
    if members.is_empty() {
        members.push(rng.gen_range(0..n));
    }
    let omega = VertexSet::new(members);
    let g = product.graph();
    let lambda1 = dirichlet_eigenvalue(g, &omega)?.min(dirichlet_eigenvalue(g, &symmetric_domain(product, &omega))?);
    let on = |f: &mut dyn FnMut() -> f64| -> DiscreteFunction {
        DiscreteFunction::new((0..n).map(|v| if omega.contains(v) { f() } else { 0.0 }).collect())
    };
    let psi_scale = 0.5 * lambda1 * rng.gen::<f64>();
    let mut r1 = || psi_scale * rng.gen::<f64>();
    let psi = on(&mut r1);
    let mut r2 = || if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) };
    let lam = on(&mut r2);
    let mut r3 = || if rng.gen_bool(0.5) { 0.0 } else { rng.gen::<f64>() };
    let initial = on(&mut r3);
    Ok(ProblemSpec {
        product: product.clone(),
        omega,
        phi,
        psi,
        lam,
        initial: Some(initial),
    })
}

/// A dense array or a named constant field (`"zero"`, `"const:c"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Dense(Vec<f64>),
}

impl FieldSpec {
    fn build(&self, n: usize, omega: &VertexSet) -> Result<DiscreteFunction> {
        match self {
            FieldSpec::Dense(v) => {
                if v.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: v.len(),
                    });
                }
                Ok(DiscreteFunction::new(v.clone()))
            }
            FieldSpec::Named(s) if s == "zero" => Ok(DiscreteFunction::zeros(n)),
            FieldSpec::Named(s) => {
                let c: f64 = s
                    .strip_prefix("const:")
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("invalid field {s:?}")))?;
                Ok(DiscreteFunction::new(
                    (0..n).map(|v| if omega.contains(v) { c } else { 0.0 }).collect(),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    /// `"all"`
    Named(String),
    /// `(M label, N index)` pairs.
    Pairs(Vec<(String, usize)>),
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// Shorthand for the symmetrized factor, e.g. `line:10`.
    pub m: String,
    /// Shorthand for the other factor, or `point`.
    #[serde(default = "point")]
    pub n: String,
    pub omega: OmegaSpec,
    #[serde(default = "zero_phi")]
    pub phi: String,
    #[serde(default = "zero_field")]
    pub psi: FieldSpec,
    #[serde(default = "zero_field")]
    pub lam: FieldSpec,
    #[serde(default)]
    pub initial: Option<FieldSpec>,
}

fn point() -> String {
    "point".into()
}

fn zero_phi() -> String {
    "zero".into()
}

fn zero_field() -> FieldSpec {
    FieldSpec::Named("zero".into())
}

/// Parses an N-factor shorthand: `point` or any space shorthand.
pub fn factor_graph(s: &str) -> Result<Graph> {
    match s {
        "point" | "pt" => Ok(Graph::single_vertex()),
        _ => Ok(build_space(&s.parse::<SpaceSpec>()?)?.graph().clone()),
    }
}

impl ProblemConfig {
    pub fn build(&self) -> Result<ProblemSpec> {
        let m = build_space(&self.m.parse::<SpaceSpec>()?)?;
        let n_graph = factor_graph(&self.n)?;
        let prod = product(&m, &n_graph);
        let total = prod.vertex_count();
        let omega = match &self.omega {
            OmegaSpec::Named(s) if s == "all" => VertexSet::full(total),
            OmegaSpec::Named(s) => return Err(Error::Parse(format!("invalid omega {s:?}"))),
            OmegaSpec::Pairs(pairs) => pairs
                .iter()
                .map(|(label, y)| {
                    let x = m
                        .graph()
                        .vertex_by_label(label)
                        .ok_or_else(|| Error::Parse(format!("unknown vertex label {label:?}")))?;
                    if *y >= prod.n_count() {
                        return Err(Error::OutOfRange(format!("fiber index {y}")));
                    }
                    Ok(prod.index(x, *y))
                })
                .collect::<Result<Vec<usize>>>()
                .map(VertexSet::new)?,
        };
        let spec = ProblemSpec {
            phi: self.phi.parse()?,
            psi: self.psi.build(total, &omega)?,
            lam: self.lam.build(total, &omega)?,
            initial: self.initial.as_ref().map(|f| f.build(total, &omega)).transpose()?,
            product: prod,
            omega,
        };
        spec.validate()?;
        Ok(spec)
    }
}
