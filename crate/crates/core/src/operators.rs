//! Discrete Laplacian, Dirichlet heat kernels, Dirichlet energy, the star
//! function and its ball-sum transform, and Dirichlet eigenvalues.
//!
//! Sign convention: `(Δf)(x) = Σ_{y~x} (f(y) - f(x))` with the ambient degree
//! of `x`, so edges into the implicit exterior contribute `-f(x)`. The
//! positive semidefinite operator is `L = D_ambient - A`, and Dirichlet
//! conditions on a domain are realized by restricting rows and columns.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graphs::{Graph, ProductSpace, VertexSet};
use crate::rearrange::{steiner_rearrange, DiscreteFunction};

/// Dense `L_D`: ambient degree minus adjacency, restricted to `domain`.
pub fn dirichlet_matrix(graph: &Graph, domain: &VertexSet) -> DMatrix<f64> {
    let idx = domain.as_slice();
    let k = idx.len();
    let mut pos = vec![usize::MAX; graph.vertex_count()];
    for (i, &v) in idx.iter().enumerate() {
        pos[v] = i;
    }
    let mut m = DMatrix::zeros(k, k);
    for (i, &v) in idx.iter().enumerate() {
        m[(i, i)] = graph.ambient_degree(v) as f64;
        for &w in graph.neighbors(v) {
            if pos[w] != usize::MAX {
                m[(i, pos[w])] = -1.0;
            }
        }
    }
    m
}

/// `Δf` evaluated on `domain`; values of `f` outside `domain` are read as 0
/// and the output vanishes outside `domain`.
pub fn laplacian(graph: &Graph, f: &DiscreteFunction, domain: &VertexSet) -> Result<DiscreteFunction> {
    f.check_len(graph.vertex_count())?;
    let mask = domain.mask(graph.vertex_count());
    let val = |v: usize| if mask[v] { f.values()[v] } else { 0.0 };
    let mut out = vec![0.0; graph.vertex_count()];
    for x in domain.iter() {
        let fx = val(x);
        let mut s = -(graph.exterior_degree(x) as f64) * fx;
        for &y in graph.neighbors(x) {
            s += val(y) - fx;
        }
        out[x] = s;
    }
    Ok(DiscreteFunction::new(out))
}

/// `E(f) = Σ_{edges} (f(x) - f(y))^2`, counting edges into the exterior
/// (where `f = 0`) for truncated spaces. Equals `<f, L f>`.
pub fn dirichlet_energy(graph: &Graph, f: &DiscreteFunction) -> f64 {
    let v = f.values();
    let inner: f64 = graph
        .edges()
        .iter()
        .map(|&(a, b)| (v[a] - v[b]).powi(2))
        .sum();
    let exterior: f64 = (0..graph.vertex_count())
        .map(|x| graph.exterior_degree(x) as f64 * v[x] * v[x])
        .sum();
    inner + exterior
}

/// Symmetric nonnegative vertex-pair matrix `exp(-t L_D)`, zero outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub t: f64,
    pub entries: DMatrix<f64>,
    pub boundary_domain: Option<VertexSet>,
}

impl Kernel {
    pub fn vertex_count(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[(x, y)]
    }

    /// `Σ_{x,y} f(x) K(x,y) g(y)`.
    pub fn bilinear(&self, f: &DiscreteFunction, g: &DiscreteFunction) -> f64 {
        let n = self.vertex_count();
        let mut total = 0.0;
        for x in 0..n {
            let fx = f.values()[x];
            if fx == 0.0 {
                continue;
            }
            let row: f64 = (0..n).map(|y| self.entries[(x, y)] * g.values()[y]).sum();
            total += fx * row;
        }
        total
    }

    pub fn apply(&self, f: &DiscreteFunction) -> DiscreteFunction {
        let v = &self.entries * DVector::from_column_slice(f.values());
        DiscreteFunction::new(v.iter().copied().collect())
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }
}

/// Eigendecomposition of `L_D`, reusable across times.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    n: usize,
    domain: VertexSet,
    full: bool,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SpectralKernel {
    pub fn new(graph: &Graph, domain: &VertexSet) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::EmptySet);
        }
        if !domain.is_subset_of(graph.vertex_count()) {
            return Err(Error::Precondition("domain has vertices outside the graph".into()));
        }
        let eigen = SymmetricEigen::new(dirichlet_matrix(graph, domain));
        Ok(SpectralKernel {
            n: graph.vertex_count(),
            domain: domain.clone(),
            full: domain.len() == graph.vertex_count(),
            eigen,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    pub fn at(&self, t: f64) -> Result<Kernel> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let q = &self.eigen.eigenvectors;
        let k = self.domain.len();
        let mut scaled = q.clone();
        for (j, &lam) in self.eigen.eigenvalues.iter().enumerate() {
            let e = (-t * lam).exp();
            for i in 0..k {
                scaled[(i, j)] *= e;
            }
        }
        let small = &scaled * q.transpose();
        let mut entries = DMatrix::zeros(self.n, self.n);
        let idx = self.domain.as_slice();
        for i in 0..k {
            for j in 0..k {
                // exact symmetry
                let v = 0.5 * (small[(i, j)] + small[(j, i)]);
                entries[(idx[i], idx[j])] = if t == 0.0 {
                    if i == j { 1.0 } else { 0.0 }
                } else {
                    v
                };
            }
        }
        Ok(Kernel {
            t,
            entries,
            boundary_domain: (!self.full).then(|| self.domain.clone()),
        })
    }
}

/// `K_t = exp(-t L_D)` by symmetric eigendecomposition.
pub fn heat_kernel(graph: &Graph, domain: &VertexSet, t: f64) -> Result<Kernel> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    SpectralKernel::new(graph, domain)?.at(t)
}

/// Tensor product of factor kernels, indexed like [`ProductSpace`].
pub fn product_kernel(ka: &Kernel, kb: &Kernel) -> Result<Kernel> {
    if ka.t != kb.t {
        return Err(Error::TimeMismatch(ka.t, kb.t));
    }
    let (na, nb) = (ka.vertex_count(), kb.vertex_count());
    let entries = ka.entries.kronecker(&kb.entries);
    let domain = match (&ka.boundary_domain, &kb.boundary_domain) {
        (None, None) => None,
        (da, db) => {
            let da = da.clone().unwrap_or_else(|| VertexSet::full(na));
            let db = db.clone().unwrap_or_else(|| VertexSet::full(nb));
            Some(
                da.iter()
                    .flat_map(|x| db.iter().map(move |y| x * nb + y))
                    .collect(),
            )
        }
    };
    Ok(Kernel {
        t: ka.t,
        entries,
        boundary_domain: domain,
    })
}

/// Ball sums along the M order: `Jv(v_j, y) = Σ_{i <= j} v(v_i, y)`.
pub fn j_transform(v: &DiscreteFunction, space: &ProductSpace) -> Result<DiscreteFunction> {
    v.check_len(space.vertex_count())?;
    let mut out = vec![0.0; v.len()];
    for y in 0..space.n_count() {
        let mut acc = 0.0;
        for w in space.fiber(y) {
            acc += v.values()[w];
            out[w] = acc;
        }
    }
    Ok(DiscreteFunction::new(out))
}

/// Star function `u^I = J(u^#)`: partial sums of each fiber's sorted values.
pub fn star_function(u: &DiscreteFunction, space: &ProductSpace) -> Result<DiscreteFunction> {
    u.check_nonnegative()?;
    j_transform(&steiner_rearrange(u, space)?, space)
}

/// Smallest eigenvalue of `L_D` on `set`.
pub fn dirichlet_eigenvalue(graph: &Graph, set: &VertexSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = dirichlet_matrix(graph, set);
    let ev = m.symmetric_eigenvalues();
    Ok(ev.iter().copied().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_space, product, SpaceSpec};
    use approx::assert_abs_diff_eq;

    fn space(s: &str) -> crate::graphs::GroundSpace {
        build_space(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let c4 = space("cycle:4");
        let f = DiscreteFunction::new(vec![1.0, 0.0, 0.0, 0.0]);
        let l = laplacian(c4.graph(), &f, &VertexSet::full(4)).unwrap();
        assert_eq!(l.values(), &[-2.0, 1.0, 0.0, 1.0]);

        let ones = DiscreteFunction::constant(4, 3.0);
        let l = laplacian(c4.graph(), &ones, &VertexSet::full(4)).unwrap();
        assert!(l.values().iter().all(|&v| v == 0.0));

        let line = space("line:2");
        let origin = line.origin();
        let mut v = vec![0.0; 5];
        v[origin] = 1.0;
        let l = laplacian(line.graph(), &DiscreteFunction::new(v), &VertexSet::new([origin])).unwrap();
        assert_eq!(l.values()[origin], -2.0);
    }

    #[test]
    fn energy_examples() {
        let c4 = space("cycle:4");
        assert_eq!(dirichlet_energy(c4.graph(), &DiscreteFunction::constant(4, 1.0)), 0.0);
        assert_eq!(dirichlet_energy(c4.graph(), &DiscreteFunction::new(vec![1.0, 0.0, 0.0, 0.0])), 2.0);
        let l1 = space("line:1");
        assert_eq!(dirichlet_energy(l1.graph(), &DiscreteFunction::new(vec![0.0, 1.0, 0.0])), 2.0);
    }

    #[test]
    fn kernel_at_zero_is_identity() {
        let t = space("tree:3,2");
        let k = heat_kernel(t.graph(), &VertexSet::full(10), 0.0).unwrap();
        assert_eq!(k.entries, DMatrix::identity(10, 10));
        assert!(matches!(heat_kernel(t.graph(), &VertexSet::full(10), -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn two_vertex_kernel() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let k = heat_kernel(&g, &VertexSet::full(2), t).unwrap();
            let e = (-2.0 * t).exp();
            assert_abs_diff_eq!(k.get(0, 0), (1.0 + e) / 2.0, epsilon = 1e-14);
            assert_abs_diff_eq!(k.get(0, 1), (1.0 - e) / 2.0, epsilon = 1e-14);
            assert_eq!(k.get(0, 1), k.get(1, 0));
        }
    }

    #[test]
    fn cycle_kernel_is_stochastic() {
        let c4 = space("cycle:4");
        let k = heat_kernel(c4.graph(), &VertexSet::full(4), 1.0).unwrap();
        assert!(k.boundary_domain.is_none());
        for s in k.row_sums() {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_kernel_of_paths_is_grid_kernel() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let full = VertexSet::full(2);
        let k = heat_kernel(&g, &full, 1.0).unwrap();
        let pk = product_kernel(&k, &k).unwrap();
        // 2x2 grid with index x*2 + y
        let grid = Graph::new(4, [(0, 1), (2, 3), (0, 2), (1, 3)]).unwrap();
        let gk = heat_kernel(&grid, &VertexSet::full(4), 1.0).unwrap();
        assert!((pk.entries - gk.entries).amax() <= 1e-10);

        let k2 = heat_kernel(&g, &full, 2.0).unwrap();
        assert!(matches!(product_kernel(&k, &k2), Err(Error::TimeMismatch(..))));
    }

    #[test]
    fn product_kernel_with_point_factor() {
        let point = Graph::single_vertex();
        let ka = heat_kernel(&point, &VertexSet::full(1), 0.0).unwrap();
        let c3 = space("cycle:3");
        let kb = heat_kernel(c3.graph(), &VertexSet::full(3), 0.0).unwrap();
        assert_eq!(product_kernel(&ka, &kb).unwrap().entries, kb.entries);
    }

    #[test]
    fn star_and_j() {
        let m = build_space(&SpaceSpec::Cycle { m: 3 }).unwrap();
        let p = product(&m, &Graph::single_vertex());
        let u = DiscreteFunction::new(vec![1.0, 3.0, 2.0]);
        let star = star_function(&u, &p).unwrap();
        let along: Vec<f64> = p.fiber(0).map(|v| star.values()[v]).collect();
        assert_eq!(along, vec![3.0, 5.0, 6.0]);
        assert!(star_function(&DiscreteFunction::zeros(3), &p).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            star_function(&DiscreteFunction::new(vec![-1.0, 0.0, 0.0]), &p),
            Err(Error::NegativeValue { .. })
        ));

        let mut ind = vec![0.0; 3];
        ind[m.origin()] = 1.0;
        let j = j_transform(&DiscreteFunction::new(ind), &p).unwrap();
        assert!(j.values().iter().all(|&v| v == 1.0));

        let mut signed = vec![0.0; 3];
        signed[m.order().vertex(1)] = -1.0;
        signed[m.order().vertex(0)] = 1.0;
        let j = j_transform(&DiscreteFunction::new(signed), &p).unwrap();
        let along: Vec<f64> = p.fiber(0).map(|v| j.values()[v]).collect();
        assert_eq!(along, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn tree_eigenvalues() {
        let t = space("tree:3,2");
        let g = t.graph();
        assert_abs_diff_eq!(dirichlet_eigenvalue(g, &VertexSet::new([0])).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dirichlet_eigenvalue(g, &VertexSet::new([0, 1])).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            dirichlet_eigenvalue(g, &VertexSet::new([0, 1, 2, 3])).unwrap(),
            3.0 - 3f64.sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(dirichlet_eigenvalue(g, &VertexSet::empty()).unwrap_err(), Error::EmptySet);
    }
}
