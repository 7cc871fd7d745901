//! Tridiagonal direct solve with partial pivoting (the `gtsv` elimination).

use crate::error::{Error, Result};

/// A tridiagonal matrix stored by diagonals.
///
/// Row `i` reads `lower[i-1] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Entry `(row, col)`, zero off the band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diag[row]
        } else if col + 1 == row {
            self.lower[col]
        } else if row + 1 == col {
            self.upper[row]
        } else {
            0.0
        }
    }

    /// Solves `A x = rhs`, consuming a copy of the factors.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut dl = self.lower.clone();
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut b = rhs.to_vec();
        if n == 1 {
            if d[0] == 0.0 {
                return Err(Error::SingularSystem { row: 0 });
            }
            return Ok(vec![b[0] / d[0]]);
        }
        // second superdiagonal fill-in lives in `dl` after a row swap
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularSystem { row: i });
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let tb = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tb - fact * b[i + 1];
            }
        }
        if d[n - 1] == 0.0 {
            return Err(Error::SingularSystem { row: n - 1 });
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
        if let Some(row) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::SingularSystem { row });
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_laplacian() {
        let n = 5;
        let a = Tridiagonal {
            lower: vec![-1.0; n - 1],
            diag: vec![2.0; n],
            upper: vec![-1.0; n - 1],
        };
        let x: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
        let b = a.mul_vec(&x);
        let y = a.solve(&b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn needs_pivoting() {
        // zero leading diagonal forces a row interchange
        let a = Tridiagonal {
            lower: vec![1.0, 1.0],
            diag: vec![0.0, 0.0, 3.0],
            upper: vec![2.0, 1.0],
        };
        let x = vec![1.0, -2.0, 0.5];
        let y = a.solve(&a.mul_vec(&x)).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-13, "{p} vs {q}");
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = Tridiagonal {
            lower: vec![1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0],
        };
        assert!(matches!(a.solve(&[1.0, 2.0]), Err(Error::SingularSystem { .. })));
    }

    proptest! {
        #[test]
        fn residual_small(
            n in 1usize..40,
            seed in prop::collection::vec(-1.0f64..1.0, 160),
        ) {
            let lower: Vec<f64> = seed[..n.saturating_sub(1)].to_vec();
            let upper: Vec<f64> = seed[40..40 + n.saturating_sub(1)].to_vec();
            let diag: Vec<f64> = seed[80..80 + n].iter().map(|v| v + 3.0 * v.signum()).collect();
            let x: Vec<f64> = seed[120..120 + n].to_vec();
            let a = Tridiagonal { lower, diag, upper };
            let y = a.solve(&a.mul_vec(&x)).unwrap();
            for (p, q) in x.iter().zip(&y) {
                prop_assert!((p - q).abs() < 1e-10);
            }
        }
    }
}
