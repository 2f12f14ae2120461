//! Incremental beneath–beyond convex hull for point sets in dimension 2..=8.
//!
//! Facets are carried as unit outward normals with offsets; visibility of a
//! candidate point is the signed distance to a facet hyperplane, which is the
//! signed-volume predicate up to positive ridge-volume scaling. Coplanar
//! simplicial pieces are merged afterwards through ridge adjacency, so
//! structured inputs (cubes, cross-polytopes) come out with their true facet
//! combinatorics while generic inputs stay simplicial.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::exponent::{dot, l2_norm};
use crate::{Error, Result};

/// Default relative tolerance for hull predicates.
pub const DEFAULT_HULL_TOL: f64 = 1e-9;

/// One facet of a hull: unit outward normal, offset, and the incident
/// extreme points (sorted indices into the input point list).
#[derive(Debug, Clone)]
pub struct RawFacet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub verts: Vec<usize>,
}

/// Facets plus the extreme points of the input set.
#[derive(Debug, Clone)]
pub struct RawHull {
    pub facets: Vec<RawFacet>,
    pub vertices: Vec<usize>,
}

struct WorkFacet {
    verts: Vec<usize>, // sorted, exactly dim entries
    normal: Vec<f64>,
    offset: f64,
    alive: bool,
}

/// Generalized cross product: the vector orthogonal to `dim - 1` row
/// vectors, with components given by alternating-sign minors.
fn generalized_cross(rows: &[Vec<f64>], dim: usize) -> Vec<f64> {
    debug_assert_eq!(rows.len(), dim - 1);
    let mut out = vec![0.0; dim];
    for (j, slot) in out.iter_mut().enumerate() {
        let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, c| {
            let col = if c < j { c } else { c + 1 };
            rows[r][col]
        });
        let det = minor.determinant();
        *slot = if j % 2 == 0 { det } else { -det };
    }
    out
}

/// Unit normal and offset of the hyperplane through `dim` points.
/// Fails when the points are affinely dependent relative to their scale.
fn hyperplane(points: &[Vec<f64>], verts: &[usize], dim: usize) -> Result<(Vec<f64>, f64)> {
    let base = &points[verts[0]];
    let rows: Vec<Vec<f64>> = verts[1..]
        .iter()
        .map(|&v| points[v].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let raw = generalized_cross(&rows, dim);
    let norm = l2_norm(&raw);
    let row_scale: f64 = rows.iter().map(|r| l2_norm(r).max(f64::MIN_POSITIVE)).product();
    if !(norm > 1e-12 * row_scale) {
        return Err(Error::Degenerate(
            "facet points are affinely dependent".into(),
        ));
    }
    let normal: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let offset = dot(&normal, base);
    Ok((normal, offset))
}

/// Greedy affinely independent seed: `dim + 1` point indices spanning the
/// full dimension, or a degeneracy error.
fn initial_simplex(points: &[Vec<f64>], dim: usize, tol: f64) -> Result<Vec<usize>> {
    let first = (0..points.len())
        .max_by(|&a, &b| l2_norm(&points[a]).total_cmp(&l2_norm(&points[b])))
        .expect("nonempty point set");
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for i in 0..points.len() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r: Vec<f64> = points[i]
                .iter()
                .zip(&points[first])
                .map(|(a, b)| a - b)
                .collect();
            for b in &basis {
                let c = dot(&r, b);
                for (rv, bv) in r.iter_mut().zip(b) {
                    *rv -= c * bv;
                }
            }
            let len = l2_norm(&r);
            if best.as_ref().map_or(true, |(_, l, _)| len > *l) {
                best = Some((i, len, r));
            }
        }
        match best {
            Some((i, len, mut r)) if len > tol => {
                for v in &mut r {
                    *v /= len;
                }
                basis.push(r);
                chosen.push(i);
            }
            _ => {
                return Err(Error::Degenerate(format!(
                    "points span only {} of {} dimensions",
                    basis.len(),
                    dim
                )))
            }
        }
    }
    Ok(chosen)
}

struct HullBuilder<'a> {
    points: &'a [Vec<f64>],
    dim: usize,
    tol: f64,
    interior: Vec<f64>,
    facets: Vec<WorkFacet>,
    // sorted ridge -> one or two incident live facets
    ridges: HashMap<Vec<usize>, (usize, Option<usize>)>,
}

impl<'a> HullBuilder<'a> {
    fn oriented_facet(&self, mut verts: Vec<usize>) -> Result<WorkFacet> {
        verts.sort_unstable();
        let (mut normal, mut offset) = hyperplane(self.points, &verts, self.dim)?;
        let side = dot(&normal, &self.interior) - offset;
        if side.abs() <= f64::MIN_POSITIVE {
            return Err(Error::Degenerate(
                "interior reference point lies on a facet hyperplane".into(),
            ));
        }
        if side > 0.0 {
            for v in &mut normal {
                *v = -*v;
            }
            offset = -offset;
        }
        Ok(WorkFacet {
            verts,
            normal,
            offset,
            alive: true,
        })
    }

    fn register(&mut self, id: usize) -> Result<()> {
        let verts = self.facets[id].verts.clone();
        for drop in 0..verts.len() {
            let mut ridge = verts.clone();
            ridge.remove(drop);
            match self.ridges.get_mut(&ridge) {
                None => {
                    self.ridges.insert(ridge, (id, None));
                }
                Some((_, slot @ None)) => *slot = Some(id),
                Some(_) => {
                    return Err(Error::Degenerate(
                        "ridge incident to more than two facets".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    fn unregister(&mut self, id: usize) {
        let verts = self.facets[id].verts.clone();
        for drop in 0..verts.len() {
            let mut ridge = verts.clone();
            ridge.remove(drop);
            if let Some(pair) = self.ridges.get_mut(&ridge) {
                if pair.0 == id {
                    match pair.1.take() {
                        Some(other) => pair.0 = other,
                        None => {
                            self.ridges.remove(&ridge);
                        }
                    }
                } else if pair.1 == Some(id) {
                    pair.1 = None;
                }
            }
        }
    }

    fn insert_point(&mut self, idx: usize) -> Result<()> {
        let x = &self.points[idx];
        let visible: Vec<usize> = self
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot(&f.normal, x) - f.offset > self.tol)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            return Ok(());
        }
        let mut is_visible = vec![false; self.facets.len()];
        for &f in &visible {
            is_visible[f] = true;
        }
        // Horizon: ridges of visible facets whose partner stays hidden.
        let mut horizon: Vec<Vec<usize>> = Vec::new();
        for &f in &visible {
            let verts = self.facets[f].verts.clone();
            for drop in 0..verts.len() {
                let mut ridge = verts.clone();
                ridge.remove(drop);
                let &(a, b) = self.ridges.get(&ridge).ok_or_else(|| {
                    Error::Degenerate("hull topology lost a ridge".into())
                })?;
                let other = if a == f { b } else { Some(a) };
                let other = other
                    .ok_or_else(|| Error::Degenerate("open ridge in closed hull".into()))?;
                if !is_visible[other] {
                    horizon.push(ridge);
                }
            }
        }
        for &f in &visible {
            self.facets[f].alive = false;
            self.unregister(f);
        }
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(idx);
            let facet = self.oriented_facet(verts)?;
            let id = self.facets.len();
            self.facets.push(facet);
            self.register(id)?;
        }
        Ok(())
    }
}

/// Merge ridge-adjacent coplanar facets; group id is the smallest member.
/// Two facets merge only when each one's vertices lie on the other's
/// hyperplane within tolerance, so near-flat dihedral angles on generic
/// inputs never trigger a false merge.
fn coplanar_groups(
    points: &[Vec<f64>],
    facets: &[WorkFacet],
    ridges: &HashMap<Vec<usize>, (usize, Option<usize>)>,
    tol: f64,
) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..facets.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let on_plane = |f: &WorkFacet, g: &WorkFacet| {
        g.verts
            .iter()
            .all(|&v| (dot(&f.normal, &points[v]) - f.offset).abs() <= tol)
    };
    for &(a, b) in ridges.values() {
        let Some(b) = b else { continue };
        if !facets[a].alive || !facets[b].alive {
            continue;
        }
        if on_plane(&facets[a], &facets[b]) && on_plane(&facets[b], &facets[a]) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }
    (0..facets.len()).map(|i| find(&mut parent, i)).collect()
}

/// Convex hull of full-dimensional `points` in dimension `2..=8`.
pub fn convex_hull(points: &[Vec<f64>], dim: usize, rel_tol: f64) -> Result<RawHull> {
    if !(2..=8).contains(&dim) {
        return Err(Error::Capability(format!(
            "hull dimension {dim} outside supported range 2..=8"
        )));
    }
    if points.len() < dim + 1 {
        return Err(Error::Degenerate(format!(
            "{} points cannot span dimension {dim}",
            points.len()
        )));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, expected {dim}",
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
    }
    let scale = points
        .iter()
        .map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(Error::Degenerate("all points are zero".into()));
    }
    let tol = rel_tol * scale;

    let seed = initial_simplex(points, dim, tol)?;
    let mut interior = vec![0.0; dim];
    for &i in &seed {
        for (c, v) in interior.iter_mut().zip(&points[i]) {
            *c += v / seed.len() as f64;
        }
    }
    let mut builder = HullBuilder {
        points,
        dim,
        tol,
        interior,
        facets: Vec::new(),
        ridges: HashMap::new(),
    };
    for drop in 0..seed.len() {
        let verts: Vec<usize> = seed
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != drop)
            .map(|(_, &v)| v)
            .collect();
        let facet = builder.oriented_facet(verts)?;
        let id = builder.facets.len();
        builder.facets.push(facet);
        builder.register(id)?;
    }
    for idx in 0..points.len() {
        if !seed.contains(&idx) {
            builder.insert_point(idx)?;
        }
    }

    let groups = coplanar_groups(points, &builder.facets, &builder.ridges, tol);
    let mut merged: HashMap<usize, Vec<usize>> = HashMap::new(); // root -> vert union
    for (id, facet) in builder.facets.iter().enumerate() {
        if !facet.alive {
            continue;
        }
        let entry = merged.entry(groups[id]).or_default();
        for &v in &facet.verts {
            if !entry.contains(&v) {
                entry.push(v);
            }
        }
    }
    let mut roots: Vec<usize> = merged.keys().copied().collect();
    roots.sort_unstable();

    // A point is extreme iff it lies on at least `dim` distinct facet
    // hyperplanes; points swallowed by a merge or interior to a face drop out.
    let mut incidence: HashMap<usize, usize> = HashMap::new();
    for root in &roots {
        for &v in &merged[root] {
            *incidence.entry(v).or_insert(0) += 1;
        }
    }
    let mut vertices: Vec<usize> = incidence
        .iter()
        .filter(|(_, &count)| count >= dim)
        .map(|(&v, _)| v)
        .collect();
    vertices.sort_unstable();

    let mut facets = Vec::with_capacity(roots.len());
    for root in roots {
        let rep = &builder.facets[root];
        let mut verts: Vec<usize> = merged[&root]
            .iter()
            .copied()
            .filter(|v| vertices.binary_search(v).is_ok())
            .collect();
        verts.sort_unstable();
        if verts.len() < dim {
            return Err(Error::Degenerate(
                "merged facet has fewer incident vertices than the dimension".into(),
            ));
        }
        facets.push(RawFacet {
            normal: rep.normal.clone(),
            offset: rep.offset,
            verts,
        });
    }

    // Global sanity: every input point beneath every facet, incident
    // vertices on their hyperplanes.
    for facet in &facets {
        for p in points {
            if dot(&facet.normal, p) - facet.offset > tol {
                return Err(Error::Degenerate(
                    "hull misses a point beyond a facet".into(),
                ));
            }
        }
        for &v in &facet.verts {
            if (dot(&facet.normal, &points[v]) - facet.offset).abs() > tol {
                return Err(Error::Degenerate(
                    "facet vertex off its hyperplane".into(),
                ));
            }
        }
    }

    Ok(RawHull { facets, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_vectors(n: usize) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for s in [1.0, -1.0] {
            for i in 0..n {
                let mut p = vec![0.0; n];
                p[i] = s;
                pts.push(p);
            }
        }
        pts
    }

    #[test]
    fn cross_polytope_3d() {
        let hull = convex_hull(&unit_vectors(3), 3, DEFAULT_HULL_TOL).unwrap();
        assert_eq!(hull.vertices.len(), 6);
        assert_eq!(hull.facets.len(), 8);
        for f in &hull.facets {
            assert_eq!(f.verts.len(), 3);
            // All normals are (±1,±1,±1)/√3 with offset 1/√3.
            assert!((f.offset - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_from_vertices() {
        let mut pts = Vec::new();
        for i in 0..8u32 {
            pts.push(vec![
                if i & 1 == 0 { 1.0 } else { -1.0 },
                if i & 2 == 0 { 1.0 } else { -1.0 },
                if i & 4 == 0 { 1.0 } else { -1.0 },
            ]);
        }
        let hull = convex_hull(&pts, 3, DEFAULT_HULL_TOL).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        assert_eq!(hull.facets.len(), 6);
        for f in &hull.facets {
            assert_eq!(f.verts.len(), 4);
            assert!((f.offset - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_point_not_a_vertex() {
        // ±e₁ strictly inside conv{±2e₁, ±e₂}.
        let pts = vec![
            vec![1.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![-2.0, 0.0],
            vec![0.0, -1.0],
        ];
        let hull = convex_hull(&pts, 2, DEFAULT_HULL_TOL).unwrap();
        assert_eq!(hull.vertices, vec![1, 2, 4, 5]);
        assert_eq!(hull.facets.len(), 4);
    }

    #[test]
    fn point_on_edge_interior_dropped() {
        // (0.5, 0.5) lies inside the segment from e₁ to e₂.
        let pts = vec![
            vec![0.5, 0.5],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let hull = convex_hull(&pts, 2, DEFAULT_HULL_TOL).unwrap();
        assert_eq!(hull.vertices, vec![1, 2, 3, 4]);
        assert_eq!(hull.facets.len(), 4);
        for f in &hull.facets {
            assert_eq!(f.verts.len(), 2);
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let line = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            convex_hull(&line, 2, DEFAULT_HULL_TOL),
            Err(Error::Degenerate(_))
        ));
        let small = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert!(convex_hull(&small, 2, DEFAULT_HULL_TOL).is_err());
        assert!(matches!(
            convex_hull(&unit_vectors(9), 9, DEFAULT_HULL_TOL),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn cross_polytope_dimensions_up_to_7() {
        for n in 2..=7 {
            let hull = convex_hull(&unit_vectors(n), n, DEFAULT_HULL_TOL).unwrap();
            assert_eq!(hull.vertices.len(), 2 * n, "n = {n}");
            assert_eq!(hull.facets.len(), 1 << n, "n = {n}");
        }
    }

    #[test]
    fn random_points_all_on_hull() {
        // Points on the Euclidean sphere are all extreme.
        use crate::distributions::sample_cone;
        use crate::exponent::PExponent;
        use crate::rng::RandomSource;
        let mut rng = RandomSource::new(7, 0);
        let p2 = PExponent::new(2.0).unwrap();
        for n in 2..=5 {
            let pts: Vec<Vec<f64>> = (0..12)
                .map(|_| sample_cone(n, p2, &mut rng).into_coords())
                .collect();
            let hull = convex_hull(&pts, n, DEFAULT_HULL_TOL).unwrap();
            assert_eq!(hull.vertices.len(), 12, "n = {n}");
            for f in &hull.facets {
                assert_eq!(f.verts.len(), n);
                assert!(f.offset > 0.0);
            }
        }
    }
}
