//! Seeded random problem data for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{BoundarySpec, DomainSpec, MobilityLaw, ProblemSpec, SourceField};

/// Piecewise-constant source with `1..=pieces` pieces, values in `[lo, hi)`.
pub fn random_piecewise_source(rng: &mut impl Rng, radius: f64, pieces: usize, lo: f64, hi: f64) -> SourceField {
    let k = rng.gen_range(1..=pieces.max(1));
    let mut breakpoints: Vec<f64> = (1..k).map(|_| rng.gen_range(0.05..0.95) * radius).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let values = (0..=breakpoints.len()).map(|_| rng.gen_range(lo..hi)).collect();
    SourceField::PiecewiseConstant { breakpoints, values }
}

fn random_domain(rng: &mut impl Rng) -> Result<DomainSpec> {
    DomainSpec::ball(rng.gen_range(1..=3), rng.gen_range(0.5..2.0))
}

/// Source range keeping `inf f > 0` when the mobility is singular.
fn source_range(m: f64) -> (f64, f64) {
    if m < 0.0 {
        (0.25, 2.0)
    } else {
        (0.0, 2.0)
    }
}

/// Two Dirichlet problems with the same mobility and domain, independent
/// sources and ordered data `g1 <= g2`.
pub fn random_contraction_pair(m: f64, seed: u64) -> Result<(ProblemSpec, ProblemSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let law = MobilityLaw::power(m)?;
    let domain = random_domain(&mut rng)?;
    let (lo, hi) = source_range(m);
    let f1 = random_piecewise_source(&mut rng, domain.radius, 4, lo, hi);
    let f2 = random_piecewise_source(&mut rng, domain.radius, 4, lo, hi);
    let g1 = rng.gen_range(0.25..2.0);
    let g2 = g1 + rng.gen_range(0.0..1.0);
    Ok((
        ProblemSpec::new(law.clone(), domain, f1, BoundarySpec::dirichlet(g1))?,
        ProblemSpec::new(law, domain, f2, BoundarySpec::dirichlet(g2))?,
    ))
}

pub fn random_neumann_spec(m: f64, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = random_domain(&mut rng)?;
    let (lo, hi) = source_range(m);
    let f = random_piecewise_source(&mut rng, domain.radius, 4, lo, hi);
    ProblemSpec::new(MobilityLaw::power(m)?, domain, f, BoundarySpec::NeumannZero)
}

/// Smooth positive state `a + b sin(c rho + d)` on the given centers.
pub fn random_state(rng: &mut impl Rng, centers: &[f64]) -> Vec<f64> {
    let a = rng.gen_range(0.6..2.0);
    let b = rng.gen_range(0.0..0.5);
    let c = rng.gen_range(0.5..8.0);
    let d = rng.gen_range(0.0..std::f64::consts::TAU);
    centers.iter().map(|&r| a + b * (c * r + d).sin()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let (a, _) = random_contraction_pair(0.5, 7).unwrap();
        let (b, _) = random_contraction_pair(0.5, 7).unwrap();
        assert_eq!(a.source, b.source);
        assert_eq!(a.domain, b.domain);
    }

    #[test]
    fn singular_sources_stay_positive() {
        for seed in 0..50 {
            let s = random_neumann_spec(-1.0, seed).unwrap();
            assert!(s.source.inf() >= 0.25);
            let (s1, s2) = random_contraction_pair(-1.0, seed).unwrap();
            assert!(s1.boundary.sup() <= s2.boundary.sup());
        }
    }
}
