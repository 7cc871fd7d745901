//! Problem definition and the radial finite-volume mesh.
//!
//! Everything here is immutable once built; solver instances share these
//! types read-only.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    /// Singular case: mobility blows up at zero, domain `(0, inf)`.
    Decreasing,
    /// Degenerate case: mobility vanishes at zero, domain `[0, inf)`.
    Increasing,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied mobility `phi'(s)` together with its derivative.
#[derive(Clone)]
pub struct GeneralMobility {
    value: ScalarFn,
    derivative: ScalarFn,
    monotonicity: Monotonicity,
}

impl GeneralMobility {
    /// Samples the law on a geometric grid of its domain and rejects it if it
    /// is not strictly monotone in the declared direction there.
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        monotonicity: Monotonicity,
    ) -> Result<Self> {
        let mut prev: Option<f64> = None;
        let mut s = 1e-6;
        while s <= 1e6 {
            let v = value(s);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "general mobility must be finite and nonnegative, got {v} at s = {s}"
                )));
            }
            if let Some(p) = prev {
                let ok = match monotonicity {
                    Monotonicity::Increasing => v > p,
                    Monotonicity::Decreasing => v < p,
                };
                if !ok {
                    return Err(Error::Domain(format!(
                        "general mobility is not strictly {monotonicity:?} near s = {s}"
                    )));
                }
            }
            prev = Some(v);
            s *= 2.0;
        }
        Ok(Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            monotonicity,
        })
    }
}

impl fmt::Debug for GeneralMobility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralMobility")
            .field("monotonicity", &self.monotonicity)
            .finish_non_exhaustive()
    }
}

/// The coefficient multiplying the saturated direction field in the flux.
#[derive(Debug, Clone)]
pub enum MobilityLaw {
    /// `s^m`, regularized to `(eps + s)^m`.
    Power { m: f64 },
    General(GeneralMobility),
}

impl MobilityLaw {
    pub fn power(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Config(format!("mobility exponent must be finite, got {m}")));
        }
        if m == 0.0 {
            return Err(Error::Config(
                "mobility exponent m = 0 (total variation flow) is not supported".into(),
            ));
        }
        Ok(MobilityLaw::Power { m })
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            MobilityLaw::Power { m } if *m < 0.0 => Monotonicity::Decreasing,
            MobilityLaw::Power { .. } => Monotonicity::Increasing,
            MobilityLaw::General(g) => g.monotonicity,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.monotonicity() == Monotonicity::Decreasing
    }

    /// The power-law exponent, if this is a power law.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            MobilityLaw::Power { m } => Some(*m),
            MobilityLaw::General(_) => None,
        }
    }
}

/// Regularized mobility at `s >= 0`.
///
/// Power laws evaluate `(eps + s)^m`. General decreasing laws are floored at
/// `s = eps`, general increasing laws at `s = 0`.
pub fn mobility_eval(law: &MobilityLaw, s: f64, eps: f64) -> Result<f64> {
    match law {
        MobilityLaw::Power { m } => {
            let base = eps + s;
            if *m < 0.0 && base <= 0.0 {
                return Err(Error::SingularMobility(base));
            }
            Ok(base.max(0.0).powf(*m))
        }
        MobilityLaw::General(g) => match g.monotonicity {
            Monotonicity::Decreasing => {
                let arg = s.max(eps);
                if arg <= 0.0 {
                    return Err(Error::SingularMobility(arg));
                }
                Ok((g.value)(arg))
            }
            Monotonicity::Increasing => Ok((g.value)(s.max(0.0))),
        },
    }
}

/// Derivative of [`mobility_eval`] with respect to `s`.
pub fn mobility_derivative(law: &MobilityLaw, s: f64, eps: f64) -> Result<f64> {
    match law {
        MobilityLaw::Power { m } => {
            let base = eps + s;
            if base <= 0.0 {
                if *m < 1.0 {
                    return Err(Error::SingularMobility(base));
                }
                return Ok(if *m == 1.0 { 1.0 } else { 0.0 });
            }
            Ok(m * base.powf(m - 1.0))
        }
        MobilityLaw::General(g) => match g.monotonicity {
            Monotonicity::Decreasing if s < eps => Ok(0.0),
            Monotonicity::Decreasing if s <= 0.0 => Err(Error::SingularMobility(s)),
            Monotonicity::Increasing if s < 0.0 => Ok(0.0),
            _ => Ok((g.derivative)(s)),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    /// The ball `B_R(0)` in `N` dimensions, reduced to the radius.
    RadialBall,
    /// The interval `(0, R)`; forces `N = 1`.
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dim: u32,
    pub radius: f64,
    pub mode: DomainMode,
}

impl DomainSpec {
    pub fn ball(dim: u32, radius: f64) -> Result<Self> {
        Self::new(dim, radius, DomainMode::RadialBall)
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(1, length, DomainMode::Interval)
    }

    pub fn new(dim: u32, radius: f64, mode: DomainMode) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Config("dimension N must be at least 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {radius}")));
        }
        if mode == DomainMode::Interval && dim != 1 {
            return Err(Error::Config("interval mode requires N = 1".into()));
        }
        Ok(Self { dim, radius, mode })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SourceField {
    Constant(f64),
    /// `values[j]` holds on `[breakpoints[j-1], breakpoints[j])`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// One value per cell center.
    Sampled(Vec<f64>),
}

impl SourceField {
    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Config(format!(
                "piecewise source needs {} values for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("piecewise breakpoints must be strictly increasing".into()));
        }
        Ok(SourceField::PiecewiseConstant { breakpoints, values })
    }

    fn values(&self) -> &[f64] {
        match self {
            SourceField::Constant(c) => std::slice::from_ref(c),
            SourceField::PiecewiseConstant { values, .. } => values,
            SourceField::Sampled(v) => v,
        }
    }

    pub fn sup(&self) -> f64 {
        self.values().iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub fn inf(&self) -> f64 {
        self.values().iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundarySpec {
    /// Datum at `rho = R`; `inner` is the datum at `rho = 0` (interval mode only).
    Dirichlet { outer: f64, inner: Option<f64> },
    NeumannZero,
}

impl BoundarySpec {
    pub fn dirichlet(g: f64) -> Self {
        BoundarySpec::Dirichlet { outer: g, inner: None }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundarySpec::Dirichlet { .. })
    }

    /// Sup norm of the boundary data (0 for Neumann).
    pub fn sup(&self) -> f64 {
        match *self {
            BoundarySpec::Dirichlet { outer, inner } => outer.max(inner.unwrap_or(0.0)),
            BoundarySpec::NeumannZero => 0.0,
        }
    }

    /// Lower bound `G_0` of the boundary data.
    pub fn inf(&self) -> Option<f64> {
        match *self {
            BoundarySpec::Dirichlet { outer, inner } => Some(outer.min(inner.unwrap_or(outer))),
            BoundarySpec::NeumannZero => None,
        }
    }
}

/// `u - f = div(phi'(u) Du/|Du|)` on a radial domain with boundary data.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub mobility: MobilityLaw,
    pub domain: DomainSpec,
    pub source: SourceField,
    pub boundary: BoundarySpec,
}

impl ProblemSpec {
    pub fn new(
        mobility: MobilityLaw,
        domain: DomainSpec,
        source: SourceField,
        boundary: BoundarySpec,
    ) -> Result<Self> {
        let spec = Self { mobility, domain, source, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = self.source.values();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("source values must be finite".into()));
        }
        if self.source.inf() < 0.0 {
            return Err(Error::Domain(format!(
                "source must be nonnegative (f >= 0), got inf f = {}",
                self.source.inf()
            )));
        }
        if let SourceField::PiecewiseConstant { breakpoints, .. } = &self.source {
            if breakpoints.iter().any(|&b| !(b > 0.0 && b < self.domain.radius)) {
                return Err(Error::Config("piecewise breakpoints must lie inside (0, R)".into()));
            }
        }
        match self.boundary {
            BoundarySpec::Dirichlet { outer, inner } => {
                if inner.is_some() && self.domain.mode != DomainMode::Interval {
                    return Err(Error::Config(
                        "an inner Dirichlet datum needs interval mode; the ball center is a symmetry point"
                            .into(),
                    ));
                }
                for g in std::iter::once(outer).chain(inner) {
                    if !(g.is_finite() && g >= 0.0) {
                        return Err(Error::Domain(format!("boundary datum must be g >= 0, got {g}")));
                    }
                    if self.mobility.is_singular() && g <= 0.0 {
                        return Err(Error::Domain(format!(
                            "m<0 requires g >= G0 > 0 on the boundary, got g = {g}"
                        )));
                    }
                }
            }
            BoundarySpec::NeumannZero => {
                if self.mobility.is_singular() && self.source.inf() <= 0.0 {
                    return Err(Error::Domain(
                        "m<0 with zero-flux boundary requires inf f > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `max(||f||_inf, ||g||_inf)`.
    pub fn data_sup(&self) -> f64 {
        self.source.sup().max(self.boundary.sup())
    }

    /// `max(||f||, ||g||, 1)`, the reference scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.data_sup().max(1.0)
    }
}

/// Uniform cell-centered radial mesh on `[0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub radius: f64,
    pub dim: u32,
    pub mode: DomainMode,
    /// `n + 1` face radii.
    pub faces: Vec<f64>,
    /// `n` cell-center radii.
    pub centers: Vec<f64>,
    /// Face measures `rho^(N-1)` (unit sphere factor dropped).
    pub areas: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl Grid {
    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// Volume-weighted sum of `values`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.volumes.iter().zip(values).map(|(v, u)| v * u).sum()
    }
}

pub fn build_grid(domain: &DomainSpec, n: usize) -> Result<Grid> {
    if n < MIN_CELLS {
        return Err(Error::Config(format!("grid needs at least {MIN_CELLS} cells, got {n}")));
    }
    let r = domain.radius;
    let h = r / n as f64;
    let dim = domain.dim as i32;
    let faces: Vec<f64> = (0..=n)
        .map(|i| if i == n { r } else { i as f64 * h })
        .collect();
    let centers = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let areas = faces.iter().map(|&p| if dim == 1 { 1.0 } else { p.powi(dim - 1) }).collect();
    let volumes = faces
        .windows(2)
        .map(|w| (w[1].powi(dim) - w[0].powi(dim)) / dim as f64)
        .collect();
    Ok(Grid {
        n,
        h,
        radius: r,
        dim: domain.dim,
        mode: domain.mode,
        faces,
        centers,
        areas,
        volumes,
    })
}

/// Cell-centered values on a particular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Config(format!(
                "field has {} values but the grid has {} cells",
                values.len(),
                grid.n
            )));
        }
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate { cell });
        }
        Ok(Self { values })
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { values: vec![c; grid.n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

impl std::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Samples `source` at the cell centers.
///
/// A breakpoint lying exactly on a center assigns that cell to the left piece.
pub fn sample_source(source: &SourceField, grid: &Grid) -> Result<Field> {
    if source.inf() < 0.0 {
        return Err(Error::Domain(format!("source must be nonnegative, got {}", source.inf())));
    }
    let values = match source {
        SourceField::Constant(c) => vec![*c; grid.n],
        SourceField::PiecewiseConstant { breakpoints, values } => grid
            .centers
            .iter()
            .map(|&rho| values[breakpoints.iter().filter(|&&b| b < rho).count()])
            .collect(),
        SourceField::Sampled(v) => v.clone(),
    };
    Field::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn flat_grid() {
        let g = build_grid(&DomainSpec::ball(1, 1.0).unwrap(), 4).unwrap();
        assert_eq!(g.faces, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(g.areas.iter().all(|&a| a == 1.0));
        assert!(g.volumes.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn planar_radial_grid_volumes() {
        // n = 2 is below the solver minimum, so go through the raw formula
        let g = build_grid(&DomainSpec::ball(2, 1.0).unwrap(), 4).unwrap();
        assert_eq!(g.areas[0], 0.0);
        // cells merged pairwise reproduce the n = 2 volumes .125 and .375
        assert_relative_eq!(g.volumes[0] + g.volumes[1], 0.125, epsilon = 1e-15);
        assert_relative_eq!(g.volumes[2] + g.volumes[3], 0.375, epsilon = 1e-15);
        assert_relative_eq!(g.areas[2], 0.5);
    }

    #[test]
    fn ball_volume_telescopes() {
        let g = build_grid(&DomainSpec::ball(3, 2.0).unwrap(), 8).unwrap();
        assert_relative_eq!(g.total_volume(), 8.0 / 3.0, epsilon = 8.0 * f64::EPSILON * 8.0 / 3.0);
    }

    #[test]
    fn too_few_cells() {
        assert!(matches!(
            build_grid(&DomainSpec::ball(1, 1.0).unwrap(), 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn interval_forces_one_dimension() {
        assert!(DomainSpec::new(2, 1.0, DomainMode::Interval).is_err());
    }

    #[test]
    fn piecewise_sampling_by_center_membership() {
        let g = build_grid(&DomainSpec::ball(1, 1.0).unwrap(), 10).unwrap();
        let f = SourceField::piecewise(vec![0.1], vec![1.2, 1.0]).unwrap();
        let s = sample_source(&f, &g).unwrap();
        assert_eq!(s[0], 1.2);
        assert!(s.values()[1..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn breakpoint_on_center_takes_left_piece() {
        let g = build_grid(&DomainSpec::ball(1, 1.0).unwrap(), 4).unwrap();
        let f = SourceField::piecewise(vec![0.375], vec![5.0, 1.0]).unwrap();
        let s = sample_source(&f, &g).unwrap();
        assert_eq!(s.values(), &[5.0, 5.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_and_sampled_sources() {
        let g = build_grid(&DomainSpec::ball(1, 1.0).unwrap(), 6).unwrap();
        assert!(sample_source(&SourceField::Constant(2.0), &g).unwrap().values().iter().all(|&v| v == 2.0));
        let table = vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        assert_eq!(sample_source(&SourceField::Sampled(table.clone()), &g).unwrap().values(), &table[..]);
        assert!(sample_source(&SourceField::Sampled(vec![1.0; 5]), &g).is_err());
        assert!(matches!(
            sample_source(&SourceField::Constant(-1.0), &g),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mobility_examples() {
        let lin = MobilityLaw::power(1.0).unwrap();
        assert_eq!(mobility_eval(&lin, 3.0, 0.0).unwrap(), 3.0);
        let inv = MobilityLaw::power(-1.0).unwrap();
        assert_relative_eq!(mobility_eval(&inv, 0.5, 0.5).unwrap(), 1.0);
        let sq = MobilityLaw::power(2.0).unwrap();
        assert_relative_eq!(mobility_eval(&sq, 2.0, 0.1).unwrap(), 4.41, epsilon = 1e-14);
        assert!(matches!(mobility_eval(&inv, 0.0, 0.0), Err(Error::SingularMobility(_))));
        assert!(MobilityLaw::power(0.0).is_err());
    }

    #[test]
    fn general_law_floors_decreasing_at_eps() {
        let law = MobilityLaw::General(
            GeneralMobility::new(|s| 1.0 / (1.0 + s * s).sqrt() / s, |s| -(1.0 + 2.0 * s * s) / (s * s * (1.0 + s * s).powf(1.5)), Monotonicity::Decreasing).unwrap(),
        );
        let floored = mobility_eval(&law, 0.0, 0.1).unwrap();
        assert_relative_eq!(floored, mobility_eval(&law, 0.1, 0.0).unwrap());
        assert!(law.is_singular());
        assert!(GeneralMobility::new(|s| s, |_| 1.0, Monotonicity::Decreasing).is_err());
    }

    #[test]
    fn spec_cross_field_rules() {
        let d = DomainSpec::ball(1, 1.0).unwrap();
        let sing = MobilityLaw::power(-1.0).unwrap();
        assert!(ProblemSpec::new(sing.clone(), d, SourceField::Constant(0.0), BoundarySpec::dirichlet(0.0)).is_err());
        assert!(ProblemSpec::new(sing.clone(), d, SourceField::Constant(0.0), BoundarySpec::dirichlet(1.0)).is_ok());
        assert!(ProblemSpec::new(sing, d, SourceField::Constant(0.0), BoundarySpec::NeumannZero).is_err());
        let inner = BoundarySpec::Dirichlet { outer: 1.0, inner: Some(1.0) };
        assert!(ProblemSpec::new(MobilityLaw::power(1.0).unwrap(), d, SourceField::Constant(0.0), inner).is_err());
    }

    proptest! {
        #[test]
        fn volumes_telescope(dim in 1u32..5, r in 0.1f64..10.0, n in 4usize..500) {
            let g = build_grid(&DomainSpec::ball(dim, r).unwrap(), n).unwrap();
            let exact = r.powi(dim as i32) / dim as f64;
            prop_assert!((g.total_volume() - exact).abs() <= 8.0 * f64::EPSILON * exact);
        }

        #[test]
        fn mobility_monotone(m in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0], a in 0.0f64..10.0, b in 0.0f64..10.0, eps in 1e-6f64..0.5) {
            let law = MobilityLaw::power(m).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let (mlo, mhi) = (mobility_eval(&law, lo, eps).unwrap(), mobility_eval(&law, hi, eps).unwrap());
            match law.monotonicity() {
                Monotonicity::Increasing => prop_assert!(mhi > mlo),
                Monotonicity::Decreasing => prop_assert!(mhi < mlo),
            }
        }

        #[test]
        fn sampling_preserves_sup(vals in prop::collection::vec(0.0f64..5.0, 1..5), n in 4usize..64) {
            let k = vals.len();
            let bps: Vec<f64> = (1..k).map(|j| j as f64 / k as f64).collect();
            let src = SourceField::piecewise(bps, vals).unwrap();
            let g = build_grid(&DomainSpec::ball(1, 1.0).unwrap(), n).unwrap();
            prop_assert!(sample_source(&src, &g).unwrap().max() <= src.sup());
        }
    }
}
