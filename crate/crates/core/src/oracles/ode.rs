//! Backward RK4 tables for the radial profile ODEs, with Hermite dense output.

use crate::error::{Error, Result};

/// Base number of steps across `[0, R]`.
const BASE_STEPS: f64 = 1e4;
/// Relative agreement required between two successive step halvings.
const SETTLE_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 8;

/// Solution of `y' = rhs(rho, y)` sampled on `rho_k = R - k step`.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    pub radius: f64,
    pub step: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl ProfileTable {
    pub fn rho(&self, k: usize) -> f64 {
        self.radius - k as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Smallest radius covered.
    pub fn rho_min(&self) -> f64 {
        self.rho(self.len() - 1)
    }

    /// Cubic Hermite interpolation; `rho` is clamped to the covered range.
    pub fn eval(&self, rho: f64) -> f64 {
        let last = self.len() - 1;
        let t = ((self.radius - rho) / self.step).clamp(0.0, last as f64);
        let k = (t.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return self.y[0];
        }
        let s = t - k as f64;
        // moving from node k to k+1 decreases rho, so derivatives flip sign
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (d0, d1) = (-self.dy[k] * self.step, -self.dy[k + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}

fn rk4_backward<F, S>(rhs: &F, radius: f64, y_end: f64, step: f64, rho_floor: f64, stop: &S) -> Result<ProfileTable>
where
    F: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> bool,
{
    let max_steps = ((radius - rho_floor) / step).floor() as usize;
    let mut y = vec![y_end];
    let mut dy = vec![rhs(radius, y_end)];
    let mut cur = y_end;
    for k in 0..max_steps {
        let rho = radius - k as f64 * step;
        if stop(rho, cur) {
            break;
        }
        let h = -step;
        let k1 = rhs(rho, cur);
        let k2 = rhs(rho + 0.5 * h, cur + 0.5 * h * k1);
        let k3 = rhs(rho + 0.5 * h, cur + 0.5 * h * k2);
        let k4 = rhs(rho + h, cur + h * k3);
        cur += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !cur.is_finite() {
            return Err(Error::Validity(format!(
                "profile ODE blew up near rho = {:.6e}",
                rho + h
            )));
        }
        y.push(cur);
        dy.push(rhs(rho + h, cur));
    }
    Ok(ProfileTable { radius, step, y, dy })
}

/// Integrates from `rho = R` toward `rho_floor`, stopping after the first
/// node where `stop` holds, halving the step until two successive tables
/// agree to a relative `1e-8` on their common nodes.
pub fn integrate_backward<F, S>(rhs: F, radius: f64, y_end: f64, rho_floor: f64, stop: S) -> Result<ProfileTable>
where
    F: Fn(f64, f64) -> f64,
    S: Fn(f64, f64) -> bool,
{
    let mut step = radius / BASE_STEPS;
    let mut coarse = rk4_backward(&rhs, radius, y_end, step, rho_floor, &stop)?;
    for _ in 0..MAX_HALVINGS {
        step *= 0.5;
        let fine = rk4_backward(&rhs, radius, y_end, step, rho_floor, &stop)?;
        let common = coarse.len().min(fine.len().div_ceil(2));
        let diff = (0..common)
            .map(|k| {
                let (a, b) = (coarse.y[k], fine.y[2 * k]);
                (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        coarse = fine;
        if diff < SETTLE_TOL {
            return Ok(coarse);
        }
    }
    Err(Error::Validity("profile ODE did not settle under step halving".into()))
}

/// Bisection for a sign change of `g` on `[lo, hi]`, `g(lo) < 0 <= g(hi)`.
pub fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay_backward() {
        // y' = y, y(1) = e  =>  y = e^rho
        let t = integrate_backward(|_, y| y, 1.0, 1f64.exp(), 0.0, |_, _| false).unwrap();
        assert_relative_eq!(t.y[t.len() - 1], 1.0, max_relative = 1e-10);
        assert_relative_eq!(t.eval(0.37), 0.37f64.exp(), max_relative = 1e-10);
    }

    #[test]
    fn stops_on_predicate() {
        let t = integrate_backward(|_, _| 1.0, 2.0, 5.0, 0.0, |_, y| y < 4.5).unwrap();
        assert!(t.rho_min() > 1.49 && t.rho_min() < 1.5);
    }

    #[test]
    fn bisection_root() {
        let r = bisect(0.0, 2.0, |x| x * x - 2.0);
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-14);
    }
}
