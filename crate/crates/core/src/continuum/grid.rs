//! Node grids over planar domains, Schwarz symmetrization of sampled
//! functions, and a Cauchy–Crofton boundary length.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar shape, centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `[-1/2, 1/2]^2`
    Square,
    /// `[-a/2, a/2] x [-b/2, b/2]`
    Rect { a: f64, b: f64 },
    /// Disk of radius `r` (unit disk by default).
    Disk { r: f64 },
    /// The unit square without its upper right quarter.
    LShape,
    /// Interior cells read from a plain PBM file, one node per pixel.
    MaskFile(PathBuf),
}

impl Shape {
    /// Strict interior test; boundary points are outside.
    fn inside(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Square => x.abs() < 0.5 && y.abs() < 0.5,
            Shape::Rect { a, b } => x.abs() < 0.5 * a && y.abs() < 0.5 * b,
            Shape::Disk { r } => x * x + y * y < r * r,
            Shape::LShape => x.abs() < 0.5 && y.abs() < 0.5 && !(x >= 0.0 && y >= 0.0),
            Shape::MaskFile(_) => unreachable!("mask files are rasterized directly"),
        }
    }

    fn half_extent(&self) -> f64 {
        match self {
            Shape::Square | Shape::LShape => 0.5,
            Shape::Rect { a, b } => 0.5 * a.max(*b),
            Shape::Disk { r } => *r,
            Shape::MaskFile(_) => unreachable!("mask files are rasterized directly"),
        }
    }

    fn exact_area(&self) -> Option<f64> {
        match self {
            Shape::Square => Some(1.0),
            Shape::Rect { a, b } => Some(a * b),
            Shape::Disk { r } => Some(PI * r * r),
            Shape::LShape => Some(0.75),
            Shape::MaskFile(_) => None,
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid shape {s:?}"));
        let num = |t: &str| -> Result<f64> {
            t.trim().parse::<f64>().ok().filter(|v| *v > 0.0 && v.is_finite()).ok_or_else(bad)
        };
        Ok(match s.split_once(':') {
            None => match s {
                "square" => Shape::Square,
                "disk" => Shape::Disk { r: 1.0 },
                "l-shape" => Shape::LShape,
                _ => return Err(bad()),
            },
            Some(("rect", rest)) => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Shape::Rect { a: num(a)?, b: num(b)? }
            }
            Some(("disk", r)) => Shape::Disk { r: num(r)? },
            Some(("mask-file", path)) => Shape::MaskFile(PathBuf::from(path)),
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Square => write!(f, "square"),
            Shape::Rect { a, b } => write!(f, "rect:{a},{b}"),
            Shape::Disk { r } if *r == 1.0 => write!(f, "disk"),
            Shape::Disk { r } => write!(f, "disk:{r}"),
            Shape::LShape => write!(f, "l-shape"),
            Shape::MaskFile(p) => write!(f, "mask-file:{}", p.display()),
        }
    }
}

/// On-disk domain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    pub shape: String,
    /// PBM file for `"shape": "mask-file"`.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridDomain> {
        let shape = match (self.shape.as_str(), &self.path) {
            ("mask-file", Some(p)) => Shape::MaskFile(p.clone()),
            ("mask-file", None) => return Err(Error::Parse("mask-file needs a path".into())),
            (s, _) => s.parse()?,
        };
        GridDomain::new(&shape, self.h)
    }
}

/// Directions `+x, -x, +y, -y`.
pub(crate) const DIRS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Nodes `(x0 + i h, y0 + j h)` for `i < nx`, `j < ny`; interior nodes never
/// touch the array edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: (f64, f64),
    pub mask: Vec<bool>,
    /// Per interior node and direction: fraction of the step to the boundary
    /// (1 when the neighbour is interior or the boundary passes through it).
    pub(crate) fractions: Vec<[f64; 4]>,
    area: f64,
    label: String,
}

impl GridDomain {
    pub fn new(shape: &Shape, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::OutOfRange(format!("mesh width {h}")));
        }
        if let Shape::MaskFile(p) = shape {
            return Self::from_pbm_file(p, h);
        }
        let half = shape.half_extent();
        let steps = (half / h).ceil() as usize + 1;
        let n = 2 * steps + 1;
        let x0 = -(steps as f64) * h;
        let coord = |i: usize| x0 + i as f64 * h;
        let mut mask = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                mask[i * n + j] = shape.inside(coord(i), coord(j));
            }
        }
        let mut fractions = vec![[1.0; 4]; n * n];
        for i in 0..n {
            for j in 0..n {
                if !mask[i * n + j] {
                    continue;
                }
                let (x, y) = (coord(i), coord(j));
                for (d, &(dx, dy)) in DIRS.iter().enumerate() {
                    let ni = (i as isize + dx) as usize;
                    let nj = (j as isize + dy) as usize;
                    if mask[ni * n + nj] {
                        continue;
                    }
                    let (mut lo, mut hi) = (0.0, 1.0);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if shape.inside(x + mid * h * dx as f64, y + mid * h * dy as f64) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    // boundaries through grid nodes give exactly 1
                    fractions[i * n + j][d] = if 1.0 - hi < 1e-12 { 1.0 } else { hi };
                }
            }
        }
        let dom = GridDomain {
            h,
            nx: n,
            ny: n,
            origin: (x0, x0),
            mask,
            fractions,
            area: shape.exact_area().expect("analytic shape"),
            label: format!("{shape} h={h}"),
        };
        dom.check()?;
        Ok(dom)
    }

    pub fn from_pbm_file(path: &Path, h: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let rows = parse_pbm(&text)?;
        let mut dom = Self::from_mask_rows(&rows, h)?;
        dom.label = format!("mask-file:{} h={h}", path.display());
        Ok(dom)
    }

    /// `rows[r][c]` true for interior; row 0 is the top. One cell of exterior
    /// padding is added on every side.
    pub fn from_mask_rows(rows: &[Vec<bool>], h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::OutOfRange(format!("mesh width {h}")));
        }
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("mask rows have different lengths".into()));
        }
        let (nx, ny) = (width + 2, height + 2);
        let mut mask = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                mask[(c + 1) * ny + (height - r)] = b;
            }
        }
        let count = mask.iter().filter(|&&b| b).count();
        let dom = GridDomain {
            h,
            nx,
            ny,
            origin: (-0.5 * (nx - 1) as f64 * h, -0.5 * (ny - 1) as f64 * h),
            mask,
            fractions: vec![[1.0; 4]; nx * ny],
            area: count as f64 * h * h,
            label: format!("mask h={h}"),
        };
        dom.check()?;
        Ok(dom)
    }

    fn check(&self) -> Result<()> {
        if !self.mask.iter().any(|&b| b) {
            return Err(Error::EmptySet);
        }
        for i in 0..self.nx {
            for j in 0..self.ny {
                let edge = i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny;
                if edge && self.mask[self.index(i, j)] {
                    return Err(Error::InvalidGraph("interior node on the grid edge".into()));
                }
            }
        }
        Ok(())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx / self.ny, idx % self.ny);
        (self.origin.0 + i as f64 * self.h, self.origin.1 + j as f64 * self.h)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Exact area for analytic shapes, `h^2` times the node count for masks.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Samples `f` at interior nodes; zero elsewhere.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                if self.mask[idx] {
                    let (x, y) = self.coords(idx);
                    f(x, y)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub(crate) fn neighbor(&self, idx: usize, d: usize) -> usize {
        let (dx, dy) = DIRS[d];
        let (i, j) = (idx / self.ny, idx % self.ny);
        self.index((i as isize + dx) as usize, (j as isize + dy) as usize)
    }
}

/// Plain (`P1`) portable bitmap; `1` pixels are interior.
pub fn parse_pbm(text: &str) -> Result<Vec<Vec<bool>>> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P1") {
        return Err(Error::Parse("expected a plain PBM (P1) header".into()));
    }
    let mut dim = || -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("missing PBM dimensions".into()))
    };
    let (w, hgt) = (dim()?, dim()?);
    let bits: Vec<bool> = tokens
        .flat_map(str::chars)
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("invalid PBM pixel {c:?}"))),
        })
        .collect::<Result<_>>()?;
    if bits.len() != w * hgt {
        return Err(Error::Parse(format!("expected {} pixels, found {}", w * hgt, bits.len())));
    }
    Ok(bits.chunks(w.max(1)).map(<[bool]>::to_vec).collect())
}

/// Radial profile `v(r)` sampled at increasing radii starting from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// `2π ∫ v(r) r dr` by the trapezoid rule.
    pub fn mass(&self) -> f64 {
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| PI * (r[1] - r[0]) * (v[0] * r[0] + v[1] * r[1]))
            .sum()
    }

    /// `2π ∫ v'(r)^2 r dr` with difference quotients at interval midpoints.
    pub fn dirichlet_integral(&self) -> f64 {
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| {
                let dr = r[1] - r[0];
                let dv = (v[1] - v[0]) / dr;
                dv * dv * 2.0 * PI * 0.5 * (r[0] + r[1]) * dr
            })
            .sum()
    }
}

/// Schwarz symmetrization of `f` (on any node set with spacing `h`).
///
/// Each node carries area `h^2`, so the level set `{f > t}` has area `h^2`
/// times a node count; at radius `r` the profile takes the value of rank
/// `floor(π r^2 / h^2)` in the descending sort, i.e. the smallest `t` whose
/// level set fits in the disk of radius `r`. Radii are `0, h, 2h, ...` up to
/// one step past the support.
pub fn schwarz_profile(f: &[f64], h: f64) -> Result<RadialProfile> {
    if let Some((i, &v)) = f.iter().enumerate().find(|&(_, &v)| !(v >= 0.0)) {
        return Err(Error::NegativeValue { vertex: i, value: v });
    }
    let mut sorted: Vec<f64> = f.iter().copied().filter(|&v| v > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let count = sorted.len();
    let r_max = (count as f64 * h * h / PI).sqrt() + h;
    let steps = (r_max / h).ceil() as usize + 1;
    let mut radii = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let r = i as f64 * h;
        let rank = (PI * r * r / (h * h)).floor() as usize;
        radii.push(r);
        values.push(sorted.get(rank).copied().unwrap_or(0.0));
    }
    Ok(RadialProfile { radii, values })
}

/// Schwarz symmetrization of a grid function on `dom`.
pub fn schwarz_rearrange_grid(dom: &GridDomain, f: &[f64]) -> Result<RadialProfile> {
    if f.len() != dom.len() {
        return Err(Error::LengthMismatch {
            expected: dom.len(),
            actual: f.len(),
        });
    }
    if let Some(idx) = (0..dom.len()).find(|&i| !dom.mask[i] && f[i] != 0.0) {
        return Err(Error::Precondition(format!("function is nonzero outside the domain at node {idx}")));
    }
    schwarz_profile(f, dom.h)
}

/// Boundary length of the node set by the Cauchy–Crofton formula over four
/// line directions: every cut axis edge counts `π h / 8`, every cut diagonal
/// `π h / (8 √2)`.
pub fn cut_boundary_length(dom: &GridDomain) -> f64 {
    let (axis, diag) = (PI * dom.h / 8.0, PI * dom.h / (8.0 * 2f64.sqrt()));
    let at = |i: usize, j: usize| dom.mask[dom.index(i, j)];
    let mut total = 0.0;
    for i in 0..dom.nx - 1 {
        for j in 0..dom.ny - 1 {
            let a = at(i, j);
            if a != at(i + 1, j) {
                total += axis;
            }
            if a != at(i, j + 1) {
                total += axis;
            }
            if a != at(i + 1, j + 1) {
                total += diag;
            }
            if at(i + 1, j) != at(i, j + 1) {
                total += diag;
            }
        }
    }
    total
}

/// `P / √A` for each shape at roughly `cells` interior nodes, using the
/// grid's own node count for the area.
pub fn isoperimetric_battery(cells: usize) -> Result<Vec<(String, f64)>> {
    [Shape::Disk { r: 1.0 }, Shape::Square, Shape::Rect { a: 2.0, b: 0.5 }, Shape::LShape]
        .into_iter()
        .map(|s| {
            let area = s.exact_area().expect("analytic shape");
            let dom = GridDomain::new(&s, (area / cells as f64).sqrt())?;
            let a = dom.interior_count() as f64 * dom.h * dom.h;
            Ok((s.to_string(), cut_boundary_length(&dom) / a.sqrt()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse() {
        for s in ["square", "disk", "disk:0.5", "rect:2,0.5", "l-shape"] {
            assert_eq!(s.parse::<Shape>().unwrap().to_string(), s);
        }
        assert!("triangle".parse::<Shape>().is_err());
        assert!("rect:2".parse::<Shape>().is_err());
    }

    #[test]
    fn square_grid_is_aligned() {
        let dom = GridDomain::new(&Shape::Square, 1.0 / 8.0).unwrap();
        assert_eq!(dom.interior_count(), 49);
        assert!(dom.fractions.iter().flatten().all(|&t| t == 1.0));
    }

    #[test]
    fn disk_fractions_hit_the_circle() {
        let dom = GridDomain::new(&Shape::Disk { r: 1.0 }, 0.1).unwrap();
        for idx in 0..dom.len() {
            if !dom.mask[idx] {
                continue;
            }
            let (x, y) = dom.coords(idx);
            for (d, &(dx, dy)) in DIRS.iter().enumerate() {
                let t = dom.fractions[idx][d];
                if t < 1.0 {
                    let (px, py) = (x + t * 0.1 * dx as f64, y + t * 0.1 * dy as f64);
                    assert!(((px * px + py * py).sqrt() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pbm_round_trip() {
        let rows = parse_pbm("P1\n# a plus\n3 3\n0 1 0\n1 1 1\n0 1 0\n").unwrap();
        assert_eq!(rows[1], vec![true, true, true]);
        let dom = GridDomain::from_mask_rows(&rows, 0.5).unwrap();
        assert_eq!((dom.nx, dom.ny, dom.interior_count()), (5, 5, 5));
        assert!((dom.area() - 1.25).abs() < 1e-15);
        assert!(parse_pbm("P4\n1 1\n0").is_err());
        assert!(parse_pbm("P1\n2 2\n0 1 0").is_err());
    }

    #[test]
    fn indicator_profile() {
        let dom = GridDomain::new(&Shape::Square, 1.0 / 32.0).unwrap();
        let f = dom.sample(|_, _| 2.0);
        let p = schwarz_rearrange_grid(&dom, &f).unwrap();
        let radius = (dom.interior_count() as f64 / PI).sqrt() / 32.0;
        for (&r, &v) in p.radii.iter().zip(&p.values) {
            let expected = if r < radius { 2.0 } else { 0.0 };
            assert_eq!(v, expected, "r = {r}");
        }
    }

    #[test]
    fn profile_mass_close_to_grid_mass() {
        let h = 1.0 / 64.0;
        let dom = GridDomain::new(&Shape::Square, h).unwrap();
        let f = dom.sample(|x, y| (PI * x).cos() * (PI * y).cos() * (1.0 + 0.3 * x));
        let p = schwarz_rearrange_grid(&dom, &f).unwrap();
        let grid: f64 = f.iter().sum::<f64>() * h * h;
        assert!((p.mass() - grid).abs() < 0.02 * grid);
    }

    #[test]
    fn radial_function_is_nearly_fixed() {
        let h = 1.0 / 64.0;
        let dom = GridDomain::new(&Shape::Disk { r: 1.0 }, h).unwrap();
        let f = dom.sample(|x, y| 1.0 - (x * x + y * y));
        let p = schwarz_rearrange_grid(&dom, &f).unwrap();
        for (&r, &v) in p.radii.iter().zip(&p.values) {
            if r < 0.95 {
                // one cell of radius shift at most
                assert!((v - (1.0 - r * r)).abs() < 2.0 * (r + h) * 2.0 * h + 1e-12, "r = {r}");
            }
        }
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!(schwarz_profile(&[1.0, -1.0], 0.1), Err(Error::NegativeValue { vertex: 1, .. })));
    }

    #[test]
    fn disk_has_least_boundary() {
        let table = isoperimetric_battery(4000).unwrap();
        let disk = table[0].1;
        assert!((disk - 2.0 * PI.sqrt()).abs() < 0.05 * disk, "{table:?}");
        assert!(table[1..].iter().all(|(_, p)| *p > disk), "{table:?}");
    }
}
