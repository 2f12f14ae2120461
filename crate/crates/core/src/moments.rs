//! Closed-form moment oracles and tail machinery: the Gamma-ratio radial
//! moment, the Gluskin–Kwapień-style equivalence expression for `⟨a, G⟩`
//! moments, ψ₂-norm estimation from samples, and the Bernstein tail bound.

use statrs::function::gamma::ln_gamma;

use crate::exponent::{lp_norm, Exponent, PExponent};
use crate::{Error, Result};

/// Absolute values sorted non-increasing (the non-increasing rearrangement).
pub fn rearrange_abs(a: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

/// `Γ((n+q)/p) / Γ(n/p)`, the q-th moment of `‖G‖_p` for the generalized
/// Gaussian vector `G`. Computed via log-Gamma differences so arguments
/// beyond the factorial overflow range stay finite.
pub fn gamma_ratio_moment(n: usize, p: PExponent, q: f64) -> f64 {
    assert!(n >= 1 && q >= 0.0);
    let pf = p.get();
    (ln_gamma((n as f64 + q) / pf) - ln_gamma(n as f64 / pf)).exp()
}

/// Volume of the unit ℓ_p ball, `(2Γ(1+1/p))^n / Γ(1+n/p)`.
pub fn lp_ball_volume(n: usize, p: PExponent) -> f64 {
    let inv_p = 1.0 / p.get();
    (n as f64 * (2.0f64.ln() + ln_gamma(1.0 + inv_p)) - ln_gamma(1.0 + n as f64 * inv_p)).exp()
}

/// The two-term moment expression `q^{1/p} ‖(a*_i)_{i≤q}‖_{p*} + √q ‖(a*_i)_{i>q}‖₂`
/// over the non-increasing rearrangement `a*`. For `q ≥ n` the tail is empty
/// and the value reduces to `q^{1/p} ‖a‖_{p*}`.
pub fn gk_equiv(a: &[f64], p: PExponent, q: usize) -> Result<f64> {
    if q < 1 {
        return Err(Error::InvalidArgument("gk_equiv requires q >= 1".into()));
    }
    let sorted = rearrange_abs(a);
    let head_len = q.min(sorted.len());
    let qf = q as f64;
    let head = lp_norm(&sorted[..head_len], p.conjugate());
    let tail = lp_norm(&sorted[head_len..], Exponent::Finite(2.0));
    Ok(qf.powf(1.0 / p.get()) * head + qf.sqrt() * tail)
}

/// A direction-and-order query for the cone-measure moment oracle.
#[derive(Debug, Clone)]
pub struct MomentQuery {
    pub n: usize,
    pub p: PExponent,
    pub q: f64,
    pub theta: Vec<f64>,
}

impl MomentQuery {
    pub fn new(n: usize, p: PExponent, q: f64, theta: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("moment query requires n >= 1".into()));
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "moment order q = {q} must be >= 1"
            )));
        }
        if theta.len() != n {
            return Err(Error::InvalidArgument(format!(
                "direction has {} coordinates, expected {}",
                theta.len(),
                n
            )));
        }
        Ok(Self { n, p, q, theta })
    }
}

/// Representative value of `(E|⟨Y, θ⟩|^q)^{1/q}` for `Y` cone-distributed on
/// the ℓ_p sphere: the Gamma-ratio radial factor times the `gk_equiv`
/// expression. `q` must be an integer since the split indexes coordinates.
pub fn cone_moment_estimate(query: &MomentQuery) -> Result<f64> {
    if query.q.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cone moment estimate requires integer q, got {}",
            query.q
        )));
    }
    let q = query.q as usize;
    let pf = query.p.get();
    let nf = query.n as f64;
    let radial = ((ln_gamma(nf / pf) - ln_gamma((nf + query.q) / pf)) / query.q).exp();
    Ok(radial * gk_equiv(&query.theta, query.p, q)?)
}

/// Empirical L_q norm `((1/m) Σ |s_i|^q)^{1/q}`.
///
/// The largest magnitude is factored out so high orders neither overflow nor
/// lose the leading term.
pub fn empirical_lq(samples: &[f64], q: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(
            "empirical L_q needs at least 2 samples".into(),
        ));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("order q = {q} must be >= 1")));
    }
    let m = samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let mean: f64 =
        samples.iter().map(|&s| (s.abs() / m).powf(q)).sum::<f64>() / samples.len() as f64;
    Ok(m * mean.powf(1.0 / q))
}

/// ψ₂-norm estimate: `max over integer q in [2, q_max] of ‖·‖_{L_q} / √q`.
pub fn psi2_estimate(samples: &[f64], q_max: usize) -> Result<f64> {
    if q_max < 2 {
        return Err(Error::InvalidArgument("psi2 estimate needs q_max >= 2".into()));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(
            "psi2 estimate needs at least 2 samples".into(),
        ));
    }
    let m = samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let ratios: Vec<f64> = samples.iter().map(|&s| s.abs() / m).collect();
    let inv_len = 1.0 / samples.len() as f64;
    // Running elementwise powers: one multiply per sample per order.
    let mut powers = ratios.clone();
    let mut best = f64::NEG_INFINITY;
    for q in 2..=q_max {
        for (p, r) in powers.iter_mut().zip(&ratios) {
            *p *= r;
        }
        let lq = m * (powers.iter().sum::<f64>() * inv_len).powf(1.0 / q as f64);
        best = best.max(lq / (q as f64).sqrt());
    }
    Ok(best)
}

/// Default moment-order cap for [`psi2_estimate`]: `min(64, ⌈2·log₂ m⌉)`.
/// Beyond that the empirical moments are dominated by the sample maximum.
pub fn default_psi2_qmax(m: usize) -> usize {
    let cap = (2.0 * (m.max(2) as f64).log2()).ceil() as usize;
    cap.clamp(2, 64)
}

/// Subgaussian tail bound `2·exp(−ε²N / (8c²))` for a sum of `N` independent
/// mean-zero terms with ψ₂ norms at most `c`.
pub fn bernstein_bound(eps: f64, n_terms: usize, c: f64) -> f64 {
    assert!(eps >= 0.0 && n_terms >= 1 && c > 0.0);
    2.0 * (-(eps * eps * n_terms as f64) / (8.0 * c * c)).exp()
}

/// Two-sided multiplicative band for equivalence-up-to-constants checks:
/// a ratio r passes when `1/C ≤ r ≤ C`.
#[derive(Debug, Clone, Copy)]
pub struct EquivalenceBand {
    c: f64,
}

impl EquivalenceBand {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "equivalence band C = {c} must be >= 1"
            )));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn contains(&self, ratio: f64) -> bool {
        ratio.is_finite() && ratio >= 1.0 / self.c && ratio <= self.c
    }
}
