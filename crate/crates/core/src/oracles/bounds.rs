use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keeps the strict inequalities defining `alpha` and `eps0` strict.
const SAFETY: f64 = 0.999;

/// Uniform lower bound `u_eps >= alpha` for `m < 0`, valid for `eps < eps0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub alpha: f64,
    pub eps0: f64,
}

/// `alpha` and `eps0` for the subsolution `eps |x|^2/2 + alpha`, where
/// `g0` is the infimum of the datum and the domain lies in `B(0, R)`.
pub fn eps_lower_bound(m: f64, g0: f64, radius: f64) -> Result<LowerBound> {
    if !(m < 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("lower bound needs m < 0, got {m}")));
    }
    if !(g0 > 0.0 && g0.is_finite()) || !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("lower bound needs G0 > 0 and R > 0, got G0 = {g0}, R = {radius}")));
    }
    let r2 = radius * radius;
    let first = (2f64.powf(3.0 - m) * (1.0 + r2).powf(1.5)).powf(-1.0 / (1.0 - m));
    let alpha = SAFETY * first.min(g0);
    let eps0 = SAFETY
        * ((g0 - alpha) / r2)
            .min(alpha / (2.0 * m.abs() * r2 * (1.0 + r2)))
            .min(2.0 * alpha / (2.0 + r2));
    Ok(LowerBound { alpha, eps0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ball_inverse_mobility() {
        let b = eps_lower_bound(-1.0, 1.0, 1.0).unwrap();
        let alpha = 0.999 * (16.0 * 2f64.powf(1.5)).powf(-0.5);
        assert_relative_eq!(b.alpha, alpha, max_relative = 1e-14);
        assert_relative_eq!(b.alpha, 0.999 * 0.14865, epsilon = 5e-6);
        assert_relative_eq!(b.eps0, 0.999 * alpha / 4.0, max_relative = 1e-14);
        assert_relative_eq!(b.eps0, 0.03713, epsilon = 5e-5);
    }

    #[test]
    fn small_datum_binds() {
        let b = eps_lower_bound(-1.0, 0.01, 1.0).unwrap();
        assert_relative_eq!(b.alpha, 0.999 * 0.01, max_relative = 1e-14);
    }

    #[test]
    fn rejects_nonnegative_m() {
        assert!(eps_lower_bound(0.5, 1.0, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn alpha_below_datum(m in -4.0f64..-0.01, g0 in 1e-3f64..1e3, r in 0.1f64..10.0) {
            let b = eps_lower_bound(m, g0, r).unwrap();
            proptest::prop_assert!(b.alpha > 0.0 && b.alpha < g0);
            proptest::prop_assert!(b.eps0 > 0.0);
        }
    }
}
