//! Seeded sampling of the generalized Gaussian law with density
//! `e^{-|t|^p} / (2Γ(1+1/p))`, the cone probability measure on the ℓ_p
//! sphere, the uniform measure on the ℓ_p ball, and the radial projection
//! coupling these two.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::exponent::{lp_norm, PExponent};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// How close `‖coords‖_p` must be to 1 for a point to count as on-sphere.
pub const SPHERE_NORM_TOL: f64 = 1e-12;

/// A point of the ℓ_p unit sphere, carrying the exponent it was built for.
#[derive(Debug, Clone)]
pub struct SpherePoint {
    coords: Vec<f64>,
    p: PExponent,
}

impl SpherePoint {
    /// Validating constructor; rejects coordinates whose p-norm is further
    /// than [`SPHERE_NORM_TOL`] from 1.
    pub fn new(coords: Vec<f64>, p: PExponent) -> Result<Self> {
        let defect = (lp_norm(&coords, p.as_exponent()) - 1.0).abs();
        if !defect.is_finite() || defect > SPHERE_NORM_TOL {
            return Err(Error::Degenerate(format!(
                "point is off the l_{} sphere by {defect:.3e}",
                p.get()
            )));
        }
        Ok(Self { coords, p })
    }

    fn new_unchecked(coords: Vec<f64>, p: PExponent) -> Self {
        Self { coords, p }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    /// `| ‖coords‖_p − 1 |`, for diagnostics.
    pub fn norm_defect(&self) -> f64 {
        (lp_norm(&self.coords, self.p.as_exponent()) - 1.0).abs()
    }
}

/// One draw with density `e^{-|t|^p} / (2Γ(1+1/p))`.
///
/// Uses the exact reduction `|g| = W^{1/p}` with `W ~ Gamma(1/p, 1)` and an
/// independent random sign. The Gamma sampler is Marsaglia–Tsang, with the
/// shape-boost identity `Gamma(α) = Gamma(α+1)·U^{1/α}` for shapes below 1,
/// which holds for every p ≥ 1 without rejection blowup.
pub fn sample_gg_scalar(p: PExponent, rng: &mut RandomSource) -> f64 {
    let gamma = Gamma::new(1.0 / p.get(), 1.0).expect("valid gamma shape");
    gg_draw(&gamma, p.get(), rng)
}

fn gg_draw(gamma: &Gamma<f64>, p: f64, rng: &mut RandomSource) -> f64 {
    let w: f64 = gamma.sample(rng);
    rng.sign() * w.powf(1.0 / p)
}

/// `n` independent generalized Gaussian draws.
pub fn sample_gg_vector(n: usize, p: PExponent, rng: &mut RandomSource) -> Vec<f64> {
    assert!(n >= 1);
    let gamma = Gamma::new(1.0 / p.get(), 1.0).expect("valid gamma shape");
    (0..n).map(|_| gg_draw(&gamma, p.get(), rng)).collect()
}

/// One point on the ℓ_p unit sphere with cone-measure law: `Y = G / ‖G‖_p`.
/// The floating-point-only event `‖G‖_p = 0` is handled by resampling.
pub fn sample_cone(n: usize, p: PExponent, rng: &mut RandomSource) -> SpherePoint {
    loop {
        let mut g = sample_gg_vector(n, p, rng);
        let norm = lp_norm(&g, p.as_exponent());
        if norm > 0.0 && norm.is_finite() {
            for v in &mut g {
                *v /= norm;
            }
            return SpherePoint::new_unchecked(g, p);
        }
    }
}

/// One point uniform in the ℓ_p unit ball: `U^{1/n} · Y` with `U` uniform on
/// `[0, 1]` independent of the cone-distributed direction `Y`.
pub fn sample_uniform_ball(n: usize, p: PExponent, rng: &mut RandomSource) -> Vec<f64> {
    let y = sample_cone(n, p, rng);
    let r = rng.uniform().powf(1.0 / n as f64);
    y.into_coords().into_iter().map(|v| r * v).collect()
}

/// Radial projection `x ↦ x / ‖x‖_p` onto the ℓ_p sphere.
///
/// A zero input has no radial image; callers that feed random points should
/// resample on this error.
pub fn minkowski_map(x: &[f64], p: PExponent) -> Result<SpherePoint> {
    let norm = lp_norm(x, p.as_exponent());
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate(
            "cannot radially project the zero vector onto the sphere".into(),
        ));
    }
    Ok(SpherePoint::new_unchecked(
        x.iter().map(|v| v / norm).collect(),
        p,
    ))
}

/// Exponential-spacing Dirichlet weights: `k` coordinates of the uniform
/// distribution on the standard simplex.
pub(crate) fn dirichlet_uniform(k: usize, rng: &mut RandomSource) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            // -ln(U) with U in (0, 1]; Exp(1) spacings.
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..=1.0);
            -u.ln()
        })
        .collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}
