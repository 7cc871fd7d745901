//! Closed-form radial solutions.

use super::ode::bisect;
use super::{Certificate, OracleKind, OracleParams, OracleSolution, Profile};
use crate::error::{Error, Result};

fn check_geometry(dim: u32, radius: f64) -> Result<()> {
    if dim == 0 || !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Validity(format!("need N >= 1 and R > 0, got N = {dim}, R = {radius}")));
    }
    Ok(())
}

fn finite(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Validity(format!("{name} must be finite, got {x}")));
    }
    Ok(())
}

/// Radial constant `U` of the flat solution for a constant source `F`:
/// `U - F = U^m N/R` for `m < 0`, `U + U^m N/R = F` for `m > 0`.
pub fn constant_solution(m: f64, f: f64, dim: u32, radius: f64) -> Result<f64> {
    check_geometry(dim, radius)?;
    finite("F", f)?;
    if m == 0.0 || !m.is_finite() {
        return Err(Error::Validity(format!("constant solution needs a finite m != 0, got {m}")));
    }
    let k = dim as f64 / radius;
    let scale = f.abs().max(1.0);
    if m > 0.0 {
        if f < 0.0 {
            return Err(Error::Validity(format!("m > 0 needs F >= 0, got {f}")));
        }
        if f == 0.0 {
            return Ok(0.0);
        }
        let g = |u: f64| u + u.powf(m) * k - f;
        return Ok(bisect_to(0.0, f, scale, g));
    }
    // U - F - U^m N/R is increasing on (0, inf) and runs from -inf to +inf
    let g = |u: f64| u - f - u.powf(m) * k;
    let mut hi = f.max(0.0) + k.max(1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while g(lo) >= 0.0 {
        lo *= 0.5;
    }
    Ok(bisect_to(lo, hi, scale, g))
}

fn bisect_to(mut lo: f64, mut hi: f64, scale: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        if hi - lo < 1e-14 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    bisect(lo, hi, g)
}

/// `u = U` with boundary datum `G`; valid for `G >= U` when `m < 0` and
/// `G <= U` when `m > 0`.
pub fn constant_solution_oracle(m: f64, f: f64, dim: u32, radius: f64, g: f64) -> Result<OracleSolution> {
    finite("G", g)?;
    let u = constant_solution(m, f, dim, radius)?;
    let (hypothesis, holds) = if m < 0.0 { ("G >= U", g >= u) } else { ("G <= U", g <= u) };
    if !holds {
        return Err(Error::Validity(format!("constant solution needs {hypothesis}, got G = {g}, U = {u}")));
    }
    let params = OracleParams {
        m,
        f,
        dim,
        radius,
        g: Some(g),
        plateau: Some(u),
        boundary_flux: Some((u - f) * radius / dim as f64),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::Constant,
        params,
        Certificate::new(hypothesis, g, u, true),
        Profile::Constant(u),
    ))
}

/// `m = 1`, `F = 0`: `u = G (R/N)^{N-1} e^{N-R}` on `[0, N)` and
/// `G (R/rho)^{N-1} e^{rho-R}` on `[N, R]`.
pub fn m1_profile(dim: u32, radius: f64, g: f64) -> Result<OracleSolution> {
    check_geometry(dim, radius)?;
    finite("G", g)?;
    let n = dim as f64;
    if radius <= n {
        return Err(Error::Validity(format!("m = 1 profile needs R > N, got R = {radius}, N = {dim}")));
    }
    if g <= 0.0 {
        return Err(Error::Validity(format!("m = 1 profile needs G > 0, got {g}")));
    }
    let params = OracleParams {
        m: 1.0,
        f: 0.0,
        dim,
        radius,
        g: Some(g),
        interface: Some(n),
        plateau: Some(g * (radius / n).powf(n - 1.0) * (n - radius).exp()),
        boundary_flux: Some(g),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::M1Profile,
        params,
        Certificate::new("R > N", radius, n, true),
        Profile::M1 { dim, radius, g },
    ))
}

/// `m > 1`, `F = 0`: `u = G` whenever `G^{m-1} >= R/N`.
pub fn superlinear_constant(m: f64, dim: u32, radius: f64, g: f64) -> Result<OracleSolution> {
    check_geometry(dim, radius)?;
    finite("G", g)?;
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::Validity(format!("superlinear constant needs m > 1, got {m}")));
    }
    if g <= 0.0 {
        return Err(Error::Validity(format!("superlinear constant needs G > 0, got {g}")));
    }
    let lhs = g.powf(m - 1.0);
    let rhs = radius / dim as f64;
    if lhs < rhs {
        return Err(Error::Validity(format!("G^(m-1) >= R/N fails: {lhs} < {rhs}")));
    }
    let params = OracleParams {
        m,
        f: 0.0,
        dim,
        radius,
        g: Some(g),
        plateau: Some(g),
        boundary_flux: Some(g * rhs),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::SuperlinearConst,
        params,
        Certificate::new("G^(m-1) >= R/N", lhs, rhs, true),
        Profile::Constant(g),
    ))
}

/// `m > 1`, `N = 1`, `F = 0`:
/// `u = (G^{m-1} + (1-m)/m (R - rho))_+^{1/(m-1)}` for `G < ((m-1)R/m)^{1/(m-1)}`.
pub fn compact_support(m: f64, radius: f64, g: f64) -> Result<OracleSolution> {
    check_geometry(1, radius)?;
    finite("G", g)?;
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::Validity(format!("compact support needs m > 1, got {m}")));
    }
    if g <= 0.0 {
        return Err(Error::Validity(format!("compact support needs G > 0, got {g}")));
    }
    let threshold = ((m - 1.0) * radius / m).powf(1.0 / (m - 1.0));
    if g >= threshold {
        return Err(Error::Validity(format!(
            "compact support needs G < ((m-1)R/m)^(1/(m-1)) = {threshold}, got {g}"
        )));
    }
    let edge = radius - m * g.powf(m - 1.0) / (m - 1.0);
    let params = OracleParams {
        m,
        f: 0.0,
        dim: 1,
        radius,
        g: Some(g),
        interface: Some(edge),
        plateau: Some(0.0),
        boundary_flux: Some(g.powf(m)),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::CompactSupport,
        params,
        Certificate::new("G < ((m-1)R/m)^(1/(m-1))", g, threshold, true),
        Profile::Compact { m, radius, g },
    ))
}

fn check_jump(alpha: f64, beta: f64, r: f64, radius: f64) -> Result<()> {
    for (name, x) in [("alpha", alpha), ("beta", beta), ("r", r)] {
        finite(name, x)?;
    }
    if !(beta > 0.0 && alpha >= beta) {
        return Err(Error::Validity(format!("need alpha >= beta > 0, got alpha = {alpha}, beta = {beta}")));
    }
    if !(r > 0.0 && r < radius) {
        return Err(Error::Validity(format!("need 0 < r < R, got r = {r}, R = {radius}")));
    }
    Ok(())
}

/// Source `alpha` on `B_r`, `beta` outside, datum `g = beta`: `u = beta`
/// when the director `w = C x` (inside) / `C r^N x/rho^N` stays in the unit ball.
pub fn jump_constant_example(
    m: f64,
    dim: u32,
    radius: f64,
    r: f64,
    alpha: f64,
    beta: f64,
) -> Result<OracleSolution> {
    check_geometry(dim, radius)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Validity(format!("jump example needs m > 0, got {m}")));
    }
    check_jump(alpha, beta, r, radius)?;
    let n = dim as f64;
    let c = (alpha - beta) / (n * beta.powf(m));
    let inner = c * r;
    let outer = c * r.powf(n) / radius.powf(n - 1.0);
    let worst = inner.max(outer);
    if worst > 1.0 {
        return Err(Error::Validity(format!(
            "|w| <= 1 fails: (alpha-beta)/(N beta^m) r = {inner}, .. r^N/R^(N-1) = {outer}"
        )));
    }
    let params = OracleParams {
        m,
        f: beta,
        dim,
        radius,
        g: Some(beta),
        interface: Some(r),
        plateau: Some(beta),
        alpha: Some(alpha),
        beta: Some(beta),
        boundary_flux: Some(-(alpha - beta) * r.powf(n) / (n * radius.powf(n - 1.0))),
    };
    Ok(OracleSolution::new(
        OracleKind::JumpConst,
        params,
        Certificate::new("(alpha-beta)/(N beta^m) max(r, r^N/R^(N-1)) <= 1", worst, 1.0, true),
        Profile::Constant(beta),
    ))
}

/// `m = 1`, `N = 1`, source `alpha` on `[0, r)`, `beta` outside, datum
/// `G <= beta`, `(alpha-beta) r/beta > 1`: `u = A = alpha r/(r+1)` on
/// `[0, r]` and `beta + (A - beta) e^{r-rho}` beyond.
pub fn jump_m1_example(alpha: f64, beta: f64, r: f64, radius: f64) -> Result<OracleSolution> {
    check_geometry(1, radius)?;
    check_jump(alpha, beta, r, radius)?;
    let lhs = (alpha - beta) * r / beta;
    if lhs <= 1.0 {
        return Err(Error::Validity(format!("(alpha-beta) r/beta > 1 fails: {lhs}")));
    }
    let a = alpha * r / (r + 1.0);
    let h_r = beta + (a - beta) * (r - radius).exp();
    let params = OracleParams {
        m: 1.0,
        f: beta,
        dim: 1,
        radius,
        g: Some(beta),
        interface: Some(r),
        plateau: Some(a),
        alpha: Some(alpha),
        beta: Some(beta),
        boundary_flux: Some(-h_r),
    };
    Ok(OracleSolution::new(
        OracleKind::JumpM1,
        params,
        Certificate::new("(alpha-beta) r/beta > 1", lhs, 1.0, true),
        Profile::JumpM1 { plateau: a, beta, r },
    ))
}
