//! Python bindings: seeded samplers, the symmetric-polytope geometry, the
//! closed-form moment oracles, and single-trial execution.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lplab::distributions as dist;
use lplab::exponent::{lp_norm, Exponent, PExponent};
use lplab::harness;
use lplab::moments;
use lplab::polytope;
use lplab::rng::RandomSource;

fn err(e: lplab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pexp(p: f64) -> PyResult<PExponent> {
    PExponent::new(p).map_err(err)
}

/// `‖x‖_p`; `p = inf` gives the max norm.
#[pyfunction]
fn norm(x: Vec<f64>, p: f64) -> PyResult<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(lp_norm(&x, Exponent::Max));
    }
    Ok(lp_norm(&x, pexp(p)?.as_exponent()))
}

#[pyfunction]
#[pyo3(signature = (n, p, count, seed, stream = 0))]
fn sample_gg(n: usize, p: f64, count: usize, seed: u64, stream: u64) -> PyResult<Vec<Vec<f64>>> {
    let pe = pexp(p)?;
    let mut rng = RandomSource::new(seed, stream);
    Ok((0..count).map(|_| dist::sample_gg_vector(n, pe, &mut rng)).collect())
}

#[pyfunction]
#[pyo3(signature = (n, p, count, seed, stream = 0))]
fn sample_cone(n: usize, p: f64, count: usize, seed: u64, stream: u64) -> PyResult<Vec<Vec<f64>>> {
    let pe = pexp(p)?;
    let mut rng = RandomSource::new(seed, stream);
    Ok((0..count)
        .map(|_| dist::sample_cone(n, pe, &mut rng).into_coords())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, p, count, seed, stream = 0))]
fn sample_ball(n: usize, p: f64, count: usize, seed: u64, stream: u64) -> PyResult<Vec<Vec<f64>>> {
    let pe = pexp(p)?;
    let mut rng = RandomSource::new(seed, stream);
    Ok((0..count).map(|_| dist::sample_uniform_ball(n, pe, &mut rng)).collect())
}

/// Radial projection x ↦ x/‖x‖_p; errors on the zero vector.
#[pyfunction]
fn minkowski_map(x: Vec<f64>, p: f64) -> PyResult<Vec<f64>> {
    Ok(dist::minkowski_map(&x, pexp(p)?).map_err(err)?.into_coords())
}

#[pyfunction]
fn gamma_ratio_moment(n: usize, p: f64, q: f64) -> PyResult<f64> {
    Ok(moments::gamma_ratio_moment(n, pexp(p)?, q))
}

#[pyfunction]
fn gk_equiv(a: Vec<f64>, p: f64, q: usize) -> PyResult<f64> {
    moments::gk_equiv(&a, pexp(p)?, q).map_err(err)
}

#[pyfunction]
fn cone_moment_estimate(n: usize, p: f64, q: f64, theta: Vec<f64>) -> PyResult<f64> {
    let query = moments::MomentQuery::new(n, pexp(p)?, q, theta).map_err(err)?;
    moments::cone_moment_estimate(&query).map_err(err)
}

#[pyfunction]
fn empirical_lq(samples: Vec<f64>, q: f64) -> PyResult<f64> {
    moments::empirical_lq(&samples, q).map_err(err)
}

#[pyfunction]
fn psi2_estimate(samples: Vec<f64>, q_max: usize) -> PyResult<f64> {
    moments::psi2_estimate(&samples, q_max).map_err(err)
}

#[pyfunction]
fn bernstein_bound(eps: f64, n_terms: usize, c: f64) -> f64 {
    moments::bernstein_bound(eps, n_terms, c)
}

#[pyfunction]
fn ball_volume(n: usize, p: f64) -> PyResult<f64> {
    Ok(moments::lp_ball_volume(n, pexp(p)?))
}

/// Symmetric convex hull of ±generators with its exact geometry.
#[pyclass]
struct SymmetricPolytope {
    inner: polytope::SymmetricPolytope,
    summary: polytope::BodySummary,
}

#[pymethods]
impl SymmetricPolytope {
    #[new]
    fn new(generators: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = polytope::SymmetricPolytope::from_generators(generators).map_err(err)?;
        let summary = polytope::body_summary(&inner).map_err(err)?;
        Ok(Self { inner, summary })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    fn num_facets(&self) -> usize {
        self.inner.num_facets()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertex_points().map(<[f64]>::to_vec).collect()
    }

    fn volume(&self) -> f64 {
        self.summary.volume
    }

    fn vol_radius(&self) -> f64 {
        self.summary.volume.powf(1.0 / self.inner.dim() as f64)
    }

    fn barycenter(&self) -> Vec<f64> {
        self.summary.barycenter.clone()
    }

    fn covariance(&self) -> Vec<Vec<f64>> {
        let n = self.inner.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.summary.covariance[(i, j)]).collect())
            .collect()
    }

    fn isotropic_constant(&self) -> PyResult<f64> {
        polytope::isotropic_constant(&self.summary, self.inner.dim()).map_err(err)
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }

    #[pyo3(signature = (samples, seed, stream = 0))]
    fn mc_l1(&self, samples: usize, seed: u64, stream: u64) -> PyResult<(f64, f64)> {
        let mut rng = RandomSource::new(seed, stream);
        polytope::mc_integral_l1(&self.inner, &mut rng, samples).map_err(err)
    }

    fn subset_sup_bound(&self) -> PyResult<f64> {
        polytope::subset_sup_bound(&self.inner).map_err(err)
    }

    fn facet_l1_bound(&self) -> PyResult<f64> {
        polytope::facet_l1_bound(&self.inner).map_err(err)
    }
}

/// One seeded trial; returns the record as a dict.
#[pyfunction]
#[pyo3(signature = (p, n, n_points, seed, stream = 0, mc_samples = 2000))]
fn run_trial(
    py: Python<'_>,
    p: f64,
    n: usize,
    n_points: usize,
    seed: u64,
    stream: u64,
    mc_samples: usize,
) -> PyResult<PyObject> {
    let pe = pexp(p)?;
    let mut rng = RandomSource::new(seed, stream);
    let rec = harness::run_trial(pe, n, n_points, &mut rng, mc_samples);
    let d = PyDict::new_bound(py);
    d.set_item("p", rec.p)?;
    d.set_item("n", rec.n)?;
    d.set_item("N", rec.n_points)?;
    d.set_item("seed_stream", rec.seed_stream)?;
    d.set_item("status", &rec.status)?;
    d.set_item("l_isotropic", rec.l_isotropic)?;
    d.set_item("vol_radius", rec.vol_radius)?;
    d.set_item("trace_cov", rec.trace_cov)?;
    d.set_item("l1_mean", rec.l1_mean)?;
    d.set_item("l1_se", rec.l1_se)?;
    d.set_item("subset_bound", rec.subset_bound)?;
    d.set_item("facet_bound", rec.facet_bound)?;
    d.set_item("coupling_ok", rec.coupling_ok)?;
    d.set_item("regime_ok", rec.regime_ok)?;
    d.set_item("notes", &rec.notes)?;
    Ok(d.into())
}

/// `n+1 <= N <= exp(sqrt(n))`.
#[pyfunction]
fn check_regime(n: usize, n_points: usize) -> bool {
    harness::check_regime(n, n_points)
}

#[pymodule]
fn lplab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gg, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cone, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ball, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_map, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_ratio_moment, m)?)?;
    m.add_function(wrap_pyfunction!(gk_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(cone_moment_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_lq, m)?)?;
    m.add_function(wrap_pyfunction!(psi2_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(check_regime, m)?)?;
    m.add_class::<SymmetricPolytope>()?;
    Ok(())
}
