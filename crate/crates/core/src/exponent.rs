use crate::{Error, Result};

/// Order of an ℓ_p norm: a finite exponent in `[1, ∞)` or the max norm.
///
/// The max norm is an explicit variant rather than a large float so that
/// conjugate-exponent arithmetic stays exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Max,
}

/// The ball parameter `p ∈ [1, ∞)` together with its conjugate exponent
/// `p*` satisfying `1/p + 1/p* = 1` (with `1/Max` read as 0).
///
/// Construction rejects `p < 1`, `p = ∞` and non-finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    p_star: Exponent,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        let p_star = if p == 1.0 {
            Exponent::Max
        } else {
            Exponent::Finite(p / (p - 1.0))
        };
        Ok(Self { p, p_star })
    }

    pub fn get(&self) -> f64 {
        self.p
    }

    pub fn conjugate(&self) -> Exponent {
        self.p_star
    }

    pub fn as_exponent(&self) -> Exponent {
        Exponent::Finite(self.p)
    }

    /// `‖x‖_p` for this exponent.
    pub fn norm(&self, x: &[f64]) -> f64 {
        lp_norm(x, self.as_exponent())
    }
}

/// `‖x‖_p = (Σ|x_i|^p)^{1/p}`, with the max-norm sentinel meaning `max|x_i|`.
pub fn lp_norm(x: &[f64], order: Exponent) -> f64 {
    match order {
        Exponent::Max => x.iter().fold(0.0, |m, &v| m.max(v.abs())),
        Exponent::Finite(p) => {
            if p == 1.0 {
                x.iter().map(|v| v.abs()).sum()
            } else if p == 2.0 {
                x.iter().map(|v| v * v).sum::<f64>().sqrt()
            } else {
                // Factor out the largest magnitude so large p does not overflow.
                let m = x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
                m * s.powf(1.0 / p)
            }
        }
    }
}

/// Euclidean norm shorthand.
pub fn l2_norm(x: &[f64]) -> f64 {
    lp_norm(x, Exponent::Finite(2.0))
}

/// Standard scalar product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_exponents() {
        assert!(PExponent::new(0.5).is_err());
        assert!(PExponent::new(f64::INFINITY).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(PExponent::new(-2.0).is_err());
        assert!(PExponent::new(1.0).is_ok());
    }

    #[test]
    fn conjugate_identity() {
        for &p in &[1.0, 1.5, 2.0, 3.0, 5.0, 17.0] {
            let pe = PExponent::new(p).unwrap();
            match pe.conjugate() {
                Exponent::Max => assert_eq!(p, 1.0),
                Exponent::Finite(ps) => {
                    assert_relative_eq!(1.0 / p + 1.0 / ps, 1.0, max_relative = 1e-14);
                }
            }
        }
    }

    #[test]
    fn norm_examples() {
        let p2 = PExponent::new(2.0).unwrap();
        let p1 = PExponent::new(1.0).unwrap();
        assert_relative_eq!(p2.norm(&[3.0, 4.0]), 5.0);
        assert_relative_eq!(p1.norm(&[1.0, -1.0, 1.0]), 3.0);
        assert_relative_eq!(lp_norm(&[1.0, -2.0, 0.0], Exponent::Max), 2.0);
        assert_eq!(lp_norm(&[], Exponent::Max), 0.0);
        assert_eq!(lp_norm(&[0.0, 0.0], Exponent::Finite(3.0)), 0.0);
    }

    #[test]
    fn norm_large_p_no_overflow() {
        let x = [1e200, -2e200];
        let v = lp_norm(&x, Exponent::Finite(100.0));
        assert!(v.is_finite() && v >= 2e200);
    }
}
