//! ODE-defined profiles for `0 < m < 1`: a flat core `h(r)` on `B_r` glued
//! to the increasing branch `h` on `[r, R]`, where `r` is the zero of
//! `H_N(rho) = h - F - h^m N/rho`.

use super::ode::{bisect, integrate_backward, ProfileTable};
use super::{Certificate, OracleKind, OracleParams, OracleSolution, Profile};
use crate::error::{Error, Result};

fn check_sublinear(m: f64, f: f64, dim: u32, radius: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Validity(format!("profile needs 0 < m < 1, got {m}")));
    }
    if dim == 0 || !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Validity(format!("need N >= 1 and R > 0, got N = {dim}, R = {radius}")));
    }
    if !(f.is_finite() && f >= 0.0) {
        return Err(Error::Validity(format!("profile needs F >= 0, got {f}")));
    }
    Ok(())
}

fn h_n(m: f64, f: f64, n: f64, rho: f64, h: f64) -> f64 {
    h - f - h.powf(m) * n / rho
}

/// `(N-1) y/rho`, identically zero in one dimension.
fn curvature(n: f64, y: f64, rho: f64) -> f64 {
    if n == 1.0 {
        0.0
    } else {
        (n - 1.0) * y / rho
    }
}

/// Lowest integration radius: `0` is only reachable when `N = 1`.
fn floor_for(dim: u32, radius: f64) -> f64 {
    if dim == 1 {
        0.0
    } else {
        radius * 1e-6
    }
}

/// First sign change of `H` scanning inward from `R`, refined by bisection
/// on the Hermite interpolant.
fn locate_interface(table: &ProfileTable, hn: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let hn_at = |rho: f64| hn(rho, table.eval(rho));
    for k in 1..table.len() {
        if hn(table.rho(k), table.y[k]) < 0.0 {
            return Ok(bisect(table.rho(k), table.rho(k - 1), hn_at));
        }
    }
    Err(Error::Validity(format!(
        "H_N has no sign change on [{:.6e}, {:.6e}]: H_N = {:.6e} .. {:.6e}",
        table.rho_min(),
        table.radius,
        hn(table.rho_min(), table.y[table.len() - 1]),
        hn(table.radius, table.y[0]),
    )))
}

/// Solution for constant source `F` and datum `G`, `0 < m < 1`.
pub fn sublinear_profile(m: f64, f: f64, dim: u32, radius: f64, g: f64) -> Result<OracleSolution> {
    check_sublinear(m, f, dim, radius)?;
    let n = dim as f64;
    let hn = |rho: f64, h: f64| h_n(m, f, n, rho, h);
    let at_r = hn(radius, g);
    if !(g > f) || !(at_r >= 0.0) {
        return Err(Error::Validity(format!(
            "profile needs G > F and H_N(R) >= 0, got G = {g}, F = {f}, H_N(R) = {at_r:.6e}"
        )));
    }
    let rhs = move |rho: f64, h: f64| {
        if h <= 0.0 {
            return 0.0;
        }
        (h.powf(1.0 - m) * (h - f) - curvature(n, h, rho)) / m
    };
    let table = integrate_backward(rhs, radius, g, floor_for(dim, radius), move |rho, h| hn(rho, h) < 0.0)?;
    let interface = if at_r == 0.0 { radius } else { locate_interface(&table, hn)? };
    let plateau = table.eval(interface);
    let params = OracleParams {
        m,
        f,
        dim,
        radius,
        g: Some(g),
        interface: Some(interface),
        plateau: Some(plateau),
        boundary_flux: Some(g.powf(m)),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::SublinearProfile,
        params,
        Certificate::new("H_N(R) = G - F - G^m N/R >= 0", at_r, 0.0, true),
        Profile::Tabulated { interface, plateau, table, exponent: None },
    ))
}

/// Upper barrier `u_bar` for every datum, from `v_bar = h_bar^{m-1}` with
/// `v_bar(R) = 0`; `u_bar = +inf` at `rho = R`.
pub fn barrier_profile(m: f64, f_sup: f64, dim: u32, radius: f64) -> Result<OracleSolution> {
    check_sublinear(m, f_sup, dim, radius)?;
    let n = dim as f64;
    let p = 1.0 / (m - 1.0);
    let hn_v = move |rho: f64, v: f64| {
        if v <= 0.0 {
            f64::INFINITY
        } else {
            h_n(m, f_sup, n, rho, v.powf(p))
        }
    };
    let rhs = move |rho: f64, v: f64| {
        let v = v.max(0.0);
        (m - 1.0) / m * (1.0 - f_sup * v.powf(1.0 / (1.0 - m)) - curvature(n, v, rho))
    };
    let table = integrate_backward(rhs, radius, 0.0, floor_for(dim, radius), move |rho, v| hn_v(rho, v) < 0.0)?;
    let interface = locate_interface(&table, hn_v)?;
    let plateau = table.eval(interface).powf(p);
    let params = OracleParams {
        m,
        f: f_sup,
        dim,
        radius,
        interface: Some(interface),
        plateau: Some(plateau),
        ..Default::default()
    };
    Ok(OracleSolution::new(
        OracleKind::Barrier,
        params,
        Certificate::new("0 < m < 1", m, 1.0, true),
        Profile::Tabulated { interface, plateau, table, exponent: Some(p) },
    ))
}

/// `(rho, H_N(rho))` along the tabulated branch of a sublinear profile.
pub fn hn_trace(oracle: &OracleSolution) -> Vec<(f64, f64)> {
    let Some(table) = oracle.table() else { return Vec::new() };
    let p = &oracle.params;
    let n = p.dim as f64;
    (0..table.len())
        .filter_map(|k| {
            let rho = table.rho(k);
            let h = match oracle.kind {
                OracleKind::Barrier => table.y[k].max(0.0).powf(1.0 / (p.m - 1.0)),
                _ => table.y[k],
            };
            (rho > 0.0 && h.is_finite()).then(|| (rho, h_n(p.m, p.f, n, rho, h)))
        })
        .collect()
}
