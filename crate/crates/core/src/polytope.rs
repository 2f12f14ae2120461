//! Exact desk-scale geometry of symmetric V-polytopes: hull construction,
//! origin-cone triangulation, exact volume / covariance / isotropic constant,
//! membership, Monte Carlo ℓ₁ averages, and the two facet-combinatorial
//! upper bounds for the mean squared norm and the mean ℓ₁ norm.

use nalgebra::DMatrix;

use crate::distributions::dirichlet_uniform;
use crate::exponent::dot;
use crate::hull::{convex_hull, RawHull, DEFAULT_HULL_TOL};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Hard cap on the ambient dimension.
pub const MAX_DIM: usize = 8;
/// Hard cap on the generator count for exhaustive subset enumeration.
pub const MAX_SUBSET_GENERATORS: usize = 24;
/// Membership slack for [`SymmetricPolytope::contains`].
pub const CONTAINS_TOL: f64 = 1e-9;

/// A facet: unit outward normal, positive offset, incident vertex indices
/// (into the signed point list, sorted).
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

/// The symmetric convex hull `conv{±X_1, …, ±X_N}` of `N` generators,
/// with its facet structure and the subset of signed points that are extreme.
///
/// Immutable after construction; safe to share read-only across workers.
#[derive(Debug, Clone)]
pub struct SymmetricPolytope {
    dim: usize,
    generators: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>, // generators then their negations
    vertices: Vec<usize>,
    facets: Vec<Facet>,
}

impl SymmetricPolytope {
    /// Build the hull with the default predicate tolerance.
    pub fn from_generators(generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_generators_with_tol(generators, DEFAULT_HULL_TOL)
    }

    pub fn from_generators_with_tol(generators: Vec<Vec<f64>>, rel_tol: f64) -> Result<Self> {
        let n = generators.first().map_or(0, Vec::len);
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Capability(format!(
                "polytope dimension {n} outside supported range 2..={MAX_DIM}"
            )));
        }
        for g in &generators {
            if g.len() != n {
                return Err(Error::InvalidArgument(
                    "generators have inconsistent dimensions".into(),
                ));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite generator".into()));
            }
        }
        let mut points = generators.clone();
        points.extend(
            generators
                .iter()
                .map(|g| g.iter().map(|v| -v).collect::<Vec<f64>>()),
        );
        let RawHull { facets: raw, vertices } = convex_hull(&points, n, rel_tol)?;
        let facets: Vec<Facet> = raw
            .into_iter()
            .map(|f| Facet {
                normal: f.normal,
                offset: f.offset,
                vertices: f.verts,
            })
            .collect();
        for f in &facets {
            if f.offset <= 0.0 {
                return Err(Error::Degenerate(
                    "origin is not strictly interior to the hull".into(),
                ));
            }
        }
        // Negation is exact in floating point, so vertex symmetry must be too.
        let vertex_set: std::collections::HashSet<Vec<u64>> = vertices
            .iter()
            .map(|&v| points[v].iter().map(|c| c.to_bits()).collect())
            .collect();
        for &v in &vertices {
            let neg: Vec<u64> = points[v].iter().map(|c| (-c).to_bits()).collect();
            if !vertex_set.contains(&neg) {
                return Err(Error::Degenerate(
                    "vertex set is not symmetric under negation".into(),
                ));
            }
        }
        Ok(Self {
            dim: n,
            generators,
            points,
            vertices,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// All 2N signed points; index `i + N` is the negation of index `i`.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Indices of the extreme signed points, sorted.
    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertices
    }

    pub fn vertex_points(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.iter().map(|&v| self.points[v].as_slice())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Half-space membership with [`CONTAINS_TOL`] slack.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.facets
            .iter()
            .all(|f| dot(&f.normal, x) <= f.offset + CONTAINS_TOL)
    }
}

/// An origin-cone cell: the convex hull of the origin and `n` points.
#[derive(Debug, Clone)]
pub struct Simplex {
    verts: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(verts: Vec<Vec<f64>>) -> Result<Self> {
        let n = verts.len();
        if n == 0 || verts.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidArgument(
                "simplex needs n points of dimension n".into(),
            ));
        }
        Ok(Self { verts })
    }

    pub fn dim(&self) -> usize {
        self.verts.len()
    }

    pub fn verts(&self) -> &[Vec<f64>] {
        &self.verts
    }
}

/// `|det[v_1 … v_n]| / n!`.
pub fn simplex_volume(s: &Simplex) -> f64 {
    let n = s.dim();
    let m = DMatrix::from_fn(n, n, |r, c| s.verts[c][r]);
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    m.determinant().abs() / factorial
}

/// Exact second-moment matrix `∫_S x xᵀ dx` of the origin-cone simplex:
/// `vol(S)/((n+1)(n+2)) · (Σ v_i v_iᵀ + s sᵀ)` with `s = Σ v_i`.
pub fn simplex_second_moment(s: &Simplex) -> DMatrix<f64> {
    let n = s.dim();
    let vol = simplex_volume(s);
    let mut acc = DMatrix::zeros(n, n);
    let mut sum = vec![0.0; n];
    for v in &s.verts {
        for i in 0..n {
            sum[i] += v[i];
            for j in 0..n {
                acc[(i, j)] += v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            acc[(i, j)] += sum[i] * sum[j];
        }
    }
    acc * (vol / ((n + 1) as f64 * (n + 2) as f64))
}

/// Sort order for vertex indices by coordinate lexicographic comparison.
fn canonical_order(points: &[Vec<f64>], ids: &mut [usize]) {
    ids.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Triangulate the region spanned by `ids` (extreme points of a full-dim
/// `d`-polytope given in `pts`) into `d`-simplices, fanning from the
/// lexicographically smallest vertex.
fn triangulate_pointset(pts: &[Vec<f64>], d: usize) -> Result<Vec<Vec<usize>>> {
    if pts.len() == d + 1 {
        return Ok(vec![(0..=d).collect()]);
    }
    if d == 1 {
        let lo = (0..pts.len()).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
        let hi = (0..pts.len()).max_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
        return Ok(vec![vec![lo, hi]]);
    }
    let hull = convex_hull(pts, d, DEFAULT_HULL_TOL)?;
    let mut hull_verts = hull.vertices.clone();
    canonical_order(pts, &mut hull_verts);
    let apex = hull_verts[0];
    let mut out = Vec::new();
    for facet in &hull.facets {
        if facet.verts.contains(&apex) {
            continue;
        }
        for mut cell in triangulate_face(pts, &facet.verts, d)? {
            cell.insert(0, apex);
            out.push(cell);
        }
    }
    Ok(out)
}

/// Triangulate one facet (a `(d-1)`-polytope living on a hyperplane in
/// `R^d`) into `(d-1)`-simplices, returned as index lists of size `d`.
fn triangulate_face(pts: &[Vec<f64>], verts: &[usize], d: usize) -> Result<Vec<Vec<usize>>> {
    let mut ordered = verts.to_vec();
    canonical_order(pts, &mut ordered);
    if ordered.len() == d {
        return Ok(vec![ordered]);
    }
    // Project onto an orthonormal basis of the facet hyperplane.
    let base = &pts[ordered[0]];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for &v in &ordered[1..] {
        if basis.len() == d - 1 {
            break;
        }
        let mut r: Vec<f64> = pts[v].iter().zip(base).map(|(a, b)| a - b).collect();
        for b in &basis {
            let c = dot(&r, b);
            for (rv, bv) in r.iter_mut().zip(b) {
                *rv -= c * bv;
            }
        }
        let len = crate::exponent::l2_norm(&r);
        if len > 1e-12 {
            for x in &mut r {
                *x /= len;
            }
            basis.push(r);
        }
    }
    if basis.len() != d - 1 {
        return Err(Error::Degenerate(
            "facet does not span a hyperplane".into(),
        ));
    }
    let projected: Vec<Vec<f64>> = ordered
        .iter()
        .map(|&v| {
            let diff: Vec<f64> = pts[v].iter().zip(base).map(|(a, b)| a - b).collect();
            basis.iter().map(|b| dot(&diff, b)).collect()
        })
        .collect();
    let cells = triangulate_pointset(&projected, d - 1)?;
    Ok(cells
        .into_iter()
        .map(|cell| cell.into_iter().map(|i| ordered[i]).collect())
        .collect())
}

/// Origin-cone triangulation: one fan per facet, apexed at the facet's
/// lexicographically smallest vertex, each cell coned to the origin.
/// Cell volumes sum to the polytope volume and interiors are disjoint.
pub fn triangulate(p: &SymmetricPolytope) -> Result<Vec<Simplex>> {
    let mut out = Vec::new();
    for facet in &p.facets {
        for cell in triangulate_face(&p.points, &facet.vertices, p.dim)? {
            let verts: Vec<Vec<f64>> = cell.into_iter().map(|v| p.points[v].clone()).collect();
            out.push(Simplex { verts });
        }
    }
    Ok(out)
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Volume, barycenter and covariance of the uniform probability measure on
/// a polytope (second moments about the barycenter, which is 0 by symmetry).
#[derive(Debug, Clone)]
pub struct BodySummary {
    pub volume: f64,
    pub barycenter: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

pub(crate) fn summary_from_simplices(simplices: &[Simplex], n: usize) -> Result<BodySummary> {
    if simplices.is_empty() {
        return Err(Error::Degenerate("empty triangulation".into()));
    }
    let mut vol = Compensated::default();
    let mut first = vec![Compensated::default(); n];
    let mut second = vec![Compensated::default(); n * n];
    for s in simplices {
        let v = simplex_volume(s);
        vol.add(v);
        let m = simplex_second_moment(s);
        for i in 0..n {
            // ∫_S x dx = vol · (Σ verts) / (n + 1) for an origin-apex cell.
            let ci: f64 = s.verts.iter().map(|w| w[i]).sum::<f64>() / (n as f64 + 1.0);
            first[i].add(v * ci);
            for j in 0..n {
                second[i * n + j].add(m[(i, j)]);
            }
        }
    }
    let volume = vol.value();
    if !(volume > 0.0) {
        return Err(Error::Degenerate("polytope volume is not positive".into()));
    }
    let barycenter: Vec<f64> = first.iter().map(|c| c.value() / volume).collect();
    let covariance = DMatrix::from_fn(n, n, |i, j| second[i * n + j].value() / volume);
    Ok(BodySummary {
        volume,
        barycenter,
        covariance,
    })
}

/// Triangulates and integrates; the covariance accumulation is compensated
/// so the determinant stays stable under the later 1/(2n)-th root.
pub fn body_summary(p: &SymmetricPolytope) -> Result<BodySummary> {
    summary_from_simplices(&triangulate(p)?, p.dim)
}

/// Isotropic constant of a centered body from its summary:
/// `det(covariance)^{1/(2n)} / volume^{1/n}`, the closed-form minimum of the
/// defining affine-invariant integral.
pub fn isotropic_constant(summary: &BodySummary, n: usize) -> Result<f64> {
    if summary.covariance.nrows() != n || summary.covariance.ncols() != n {
        return Err(Error::InvalidArgument(
            "covariance dimension mismatch".into(),
        ));
    }
    let eigen = summary.covariance.clone().symmetric_eigen();
    let mut log_det = 0.0;
    for &ev in eigen.eigenvalues.iter() {
        if !(ev > 0.0) {
            return Err(Error::Degenerate(
                "covariance is not positive definite".into(),
            ));
        }
        log_det += ev.ln();
    }
    Ok((log_det / (2.0 * n as f64) - summary.volume.ln() / n as f64).exp())
}

pub(crate) fn mc_l1_over_simplices(
    simplices: &[Simplex],
    n: usize,
    rng: &mut RandomSource,
    samples: usize,
) -> Result<(f64, f64)> {
    if samples < 1_000 {
        return Err(Error::InvalidArgument(
            "Monte Carlo integral needs at least 1000 samples".into(),
        ));
    }
    let vols: Vec<f64> = simplices.iter().map(simplex_volume).collect();
    let mut cumulative = Vec::with_capacity(vols.len());
    let mut total = 0.0;
    for &v in &vols {
        total += v;
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::Degenerate("triangulation has zero volume".into()));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut coords = vec![0.0f64; n];
    for k in 0..samples {
        let target = rng.uniform() * total;
        let idx = cumulative.partition_point(|&c| c <= target).min(vols.len() - 1);
        // Uniform point in the cell: Dirichlet weights over origin + n verts.
        let w = dirichlet_uniform(n + 1, rng);
        coords.iter_mut().for_each(|c| *c = 0.0);
        for (wi, vert) in w[1..].iter().zip(&simplices[idx].verts) {
            for (c, v) in coords.iter_mut().zip(vert) {
                *c += wi * v;
            }
        }
        let val: f64 = coords.iter().map(|c| c.abs()).sum();
        let delta = val - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (val - mean);
    }
    let se = (m2 / (samples as f64 - 1.0) / samples as f64).sqrt();
    Ok((mean, se))
}

/// Unbiased Monte Carlo estimate of `(1/vol) ∫_P ‖x‖₁ dx` with its standard
/// error: cells chosen with probability proportional to volume, points via
/// exponential-spacing Dirichlet weights.
pub fn mc_integral_l1(
    p: &SymmetricPolytope,
    rng: &mut RandomSource,
    samples: usize,
) -> Result<(f64, f64)> {
    mc_l1_over_simplices(&triangulate(p)?, p.dim, rng, samples)
}

struct SubsetScan<'a> {
    points: &'a [Vec<f64>],
    sq_norms: Vec<f64>,
    n: usize,
    best: f64,
}

impl<'a> SubsetScan<'a> {
    /// Depth-first walk of n-subsets keeping prefix sums, so each node
    /// costs one vector add.
    fn walk(&mut self, start: usize, depth: usize, sum: &mut Vec<f64>, sq: f64) {
        if depth == self.n {
            self.best = self.best.max(sq + dot(sum, sum));
            return;
        }
        for i in start..=self.points.len() - (self.n - depth) {
            for (s, v) in sum.iter_mut().zip(&self.points[i]) {
                *s += v;
            }
            self.walk(i + 1, depth + 1, sum, sq + self.sq_norms[i]);
            for (s, v) in sum.iter_mut().zip(&self.points[i]) {
                *s -= v;
            }
        }
    }
}

/// Exhaustive value of
/// `(1/((n+1)(n+2))) · sup over n-subsets E of the signed points ±X_i of
///  [Σ_{i∈E} ‖P_i‖₂² + ‖Σ_{i∈E} P_i‖₂²]`,
/// an upper bound for `(1/vol) ∫_P ‖x‖₂² dx`.
///
/// The sup runs over the polytope's full vertex candidate list (all 2N
/// signed points), matching the bound's per-cone derivation: restricting it
/// to one sign per generator can fall below the exact mean squared norm.
pub fn subset_sup_bound(p: &SymmetricPolytope) -> Result<f64> {
    let n = p.dim;
    let count = p.generators.len();
    if count > MAX_SUBSET_GENERATORS {
        return Err(Error::Capability(format!(
            "subset enumeration capped at {MAX_SUBSET_GENERATORS} generators, got {count}"
        )));
    }
    if count < n {
        return Err(Error::InvalidArgument(
            "fewer generators than the dimension".into(),
        ));
    }
    let sq_norms: Vec<f64> = p.points.iter().map(|g| dot(g, g)).collect();
    let mut scan = SubsetScan {
        points: &p.points,
        sq_norms,
        n,
        best: f64::NEG_INFINITY,
    };
    let mut sum = vec![0.0f64; n];
    scan.walk(0, 0, &mut sum, 0.0);
    Ok(scan.best / ((n + 1) as f64 * (n + 2) as f64))
}

/// Max over simplicial facets `F = conv{v_1…v_n}` and sign patterns ε of
/// `((1+√2)/n) · ‖ε_1 v_1 + … + ε_n v_n‖₁`, an upper bound for
/// `(1/vol) ∫_P ‖x‖₁ dx`. Non-simplicial facets are a capability error;
/// generic random inputs are simplicial.
pub fn facet_l1_bound(p: &SymmetricPolytope) -> Result<f64> {
    let n = p.dim;
    let mut best = f64::NEG_INFINITY;
    let mut sum = vec![0.0f64; n];
    let mut signs = vec![1.0f64; n];
    for facet in &p.facets {
        if facet.vertices.len() != n {
            return Err(Error::Capability(format!(
                "facet with {} vertices is not simplicial",
                facet.vertices.len()
            )));
        }
        let verts: Vec<&[f64]> = facet
            .vertices
            .iter()
            .map(|&v| p.points[v].as_slice())
            .collect();
        sum.iter_mut().for_each(|v| *v = 0.0);
        signs.iter_mut().for_each(|s| *s = 1.0);
        for v in &verts {
            for (s, x) in sum.iter_mut().zip(*v) {
                *s += x;
            }
        }
        best = best.max(sum.iter().map(|v| v.abs()).sum());
        // Gray-code walk over the 2^n sign patterns: one flip per step.
        for k in 1u64..(1 << n) {
            let bit = k.trailing_zeros() as usize;
            signs[bit] = -signs[bit];
            let step = 2.0 * signs[bit];
            for (s, x) in sum.iter_mut().zip(verts[bit]) {
                *s += step * x;
            }
            best = best.max(sum.iter().map(|v| v.abs()).sum());
        }
    }
    Ok((1.0 + 2f64.sqrt()) / n as f64 * best)
}
