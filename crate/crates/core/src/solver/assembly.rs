//! Cell balances `(u_i - f_i) V_i - [a z]_{i-1/2}^{i+1/2}` and their Jacobian.

use crate::error::{Error, Result};
use crate::model::{sample_source, BoundarySpec, DomainMode, Field, Grid, ProblemSpec};
use crate::solver::flux::{face_flux_jac, FaceFlux, Regularization};
use crate::tridiag::Tridiagonal;

/// A problem frozen on a grid at one regularization level.
#[derive(Debug, Clone)]
pub struct Discretization<'a> {
    pub spec: &'a ProblemSpec,
    pub grid: &'a Grid,
    pub source: Field,
    pub reg: Regularization,
}

impl<'a> Discretization<'a> {
    pub fn new(spec: &'a ProblemSpec, grid: &'a Grid, reg: Regularization) -> Result<Self> {
        if !(reg.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", reg.eps)));
        }
        if !(reg.delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", reg.delta)));
        }
        let source = sample_source(&spec.source, grid)?;
        Ok(Self { spec, grid, source, reg })
    }

    /// All `n + 1` face fluxes, inner face first.
    pub fn face_fluxes(&self, u: &[f64]) -> Result<Vec<FaceFlux>> {
        let n = self.grid.n;
        if let Some(cell) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate { cell });
        }
        let law = &self.spec.mobility;
        let h = self.grid.h;
        let mut out = Vec::with_capacity(n + 1);

        out.push(match (self.grid.mode, self.spec.boundary) {
            (DomainMode::Interval, BoundarySpec::Dirichlet { inner: Some(g0), .. }) => {
                face_flux_jac(g0, u[0], 0.5 * h, law, &self.reg)?
            }
            // symmetry center or zero-flux wall
            _ => FaceFlux::ZERO,
        });
        for i in 1..n {
            out.push(face_flux_jac(u[i - 1], u[i], h, law, &self.reg)?);
        }
        out.push(match self.spec.boundary {
            BoundarySpec::Dirichlet { outer, .. } => face_flux_jac(u[n - 1], outer, 0.5 * h, law, &self.reg)?,
            BoundarySpec::NeumannZero => FaceFlux::ZERO,
        });
        Ok(out)
    }

    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let fluxes = self.face_fluxes(u)?;
        Ok(self.residual_from(u, &fluxes))
    }

    fn residual_from(&self, u: &[f64], fluxes: &[FaceFlux]) -> Vec<f64> {
        let g = self.grid;
        let f = self.source.values();
        (0..g.n)
            .map(|i| {
                (u[i] - f[i]) * g.volumes[i] - (g.areas[i + 1] * fluxes[i + 1].z - g.areas[i] * fluxes[i].z)
            })
            .collect()
    }

    /// Residual and its tridiagonal Jacobian.
    pub fn linearize(&self, u: &[f64]) -> Result<(Vec<f64>, Tridiagonal)> {
        let fluxes = self.face_fluxes(u)?;
        let r = self.residual_from(u, &fluxes);
        let g = self.grid;
        let n = g.n;
        let mut jac = Tridiagonal::zeros(n);
        for i in 0..n {
            // face i sits to the left of cell i, face i+1 to the right
            let left = &fluxes[i];
            let right = &fluxes[i + 1];
            jac.diag[i] = g.volumes[i] - g.areas[i + 1] * right.dz_dleft + g.areas[i] * left.dz_dright;
            if i > 0 {
                jac.lower[i - 1] = g.areas[i] * left.dz_dleft;
            }
            if i + 1 < n {
                jac.upper[i] = -g.areas[i + 1] * right.dz_dright;
            }
        }
        Ok((r, jac))
    }

    /// Scaled residual norm `max_i |r_i| / V_i`: the pointwise equation error.
    pub fn scaled_norm(&self, r: &[f64]) -> f64 {
        r.iter()
            .zip(&self.grid.volumes)
            .map(|(ri, v)| (ri / v).abs())
            .fold(0.0, f64::max)
    }
}

/// Cell residuals of the regularized problem at `u`.
pub fn assemble_residual(u: &Field, spec: &ProblemSpec, grid: &Grid, reg: Regularization) -> Result<Field> {
    let disc = Discretization::new(spec, grid, reg)?;
    let r = disc.residual(u.values())?;
    Field::new(grid, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, DomainSpec, MobilityLaw, SourceField};
    use crate::solver::flux::FaceMobility;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reg(eps: f64) -> Regularization {
        Regularization { eps, delta: 1e-6, face_mobility: FaceMobility::Max }
    }

    #[test]
    fn neumann_constant_is_exact() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(0.5).unwrap(),
            DomainSpec::ball(3, 1.0).unwrap(),
            SourceField::Constant(1.7),
            BoundarySpec::NeumannZero,
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 16).unwrap();
        let r = assemble_residual(&Field::constant(&grid, 1.7), &spec, &grid, reg(1e-3)).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirichlet_constant_is_exact() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(-1.0).unwrap(),
            DomainSpec::ball(2, 1.5).unwrap(),
            SourceField::Constant(0.8),
            BoundarySpec::dirichlet(0.8),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 12).unwrap();
        let r = assemble_residual(&Field::constant(&grid, 0.8), &spec, &grid, reg(1e-2)).unwrap();
        assert!(r.values().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn outer_ghost_face_golden() {
        // two-cell configuration evaluated by hand with arithmetic face mobility;
        // reproduced on four cells holding the same values
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::ball(1, 1.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::dirichlet(1.0),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 4).unwrap();
        let mean = Regularization { eps: 1.0, delta: 1e-6, face_mobility: FaceMobility::ArithmeticMean };
        let disc = Discretization::new(&spec, &grid, mean).unwrap();
        let fluxes = disc.face_fluxes(&[0.0; 4]).unwrap();
        // ghost spacing h/2 = 0.125, s = 8: z = 1.5 * 8/sqrt(65) + 8
        assert_relative_eq!(fluxes[4].z, 1.5 * 8.0 / 65f64.sqrt() + 8.0, epsilon = 1e-14);

        // exact n = 2 layout: ghost spacing 0.25, s = 4
        let two = Grid {
            n: 2,
            h: 0.5,
            radius: 1.0,
            dim: 1,
            mode: DomainMode::RadialBall,
            faces: vec![0.0, 0.5, 1.0],
            centers: vec![0.25, 0.75],
            areas: vec![1.0, 1.0, 1.0],
            volumes: vec![0.5, 0.5],
        };
        let disc = Discretization::new(&spec, &two, mean).unwrap();
        let r = disc.residual(&[0.0, 0.0]).unwrap();
        let z = 1.5 * 4.0 / 17f64.sqrt() + 4.0;
        assert_relative_eq!(z, 5.4552, epsilon = 1e-4);
        assert_eq!(r[0], 0.0);
        assert_relative_eq!(r[1], -z, epsilon = 1e-14);
    }

    #[test]
    fn non_finite_iterate_is_rejected() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::ball(1, 1.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::dirichlet(1.0),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 4).unwrap();
        let disc = Discretization::new(&spec, &grid, reg(0.1)).unwrap();
        assert!(matches!(
            disc.residual(&[0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFiniteIterate { cell: 1 })
        ));
    }

    #[test]
    fn interval_inner_datum_enters_first_cell() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::interval(1.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::Dirichlet { outer: 0.0, inner: Some(2.0) },
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 4).unwrap();
        let disc = Discretization::new(&spec, &grid, reg(0.1)).unwrap();
        let fl = disc.face_fluxes(&[0.0; 4]).unwrap();
        assert!(fl[0].z < 0.0);
        assert_eq!(fl[4].z, 0.0);
    }

    proptest! {
        #[test]
        fn residual_sum_telescopes(
            m in prop_oneof![Just(-1.0), Just(0.5), Just(1.0), Just(2.0)],
            dim in 1u32..4,
            vals in prop::collection::vec(0.1f64..3.0, 8..40),
            g in 0.2f64..3.0,
        ) {
            let spec = ProblemSpec::new(
                MobilityLaw::power(m).unwrap(),
                DomainSpec::ball(dim, 1.3).unwrap(),
                SourceField::Constant(0.7),
                BoundarySpec::dirichlet(g),
            ).unwrap();
            let grid = build_grid(&spec.domain, vals.len()).unwrap();
            let disc = Discretization::new(&spec, &grid, reg(0.02)).unwrap();
            let fl = disc.face_fluxes(&vals).unwrap();
            let r = disc.residual(&vals).unwrap();
            let lhs: f64 = r.iter().sum();
            let bulk = grid.integrate(&vals) - 0.7 * grid.total_volume();
            let rhs = bulk - grid.areas[grid.n] * fl[grid.n].z;
            let scale = bulk.abs() + fl[grid.n].z.abs() + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * vals.len() as f64);
        }
    }
}
