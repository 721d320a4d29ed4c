use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::{MatrixSample, MatrixShape};
use crate::error::{Error, Result, SeedTag};

/// Eigenvalues of `X X^* / N` within this distance below zero are roundoff
/// and clamped to 0.
pub const NEGATIVE_CLAMP_TOL: f64 = 1e-10;

const MAX_SWEEPS_PER_DIM: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Eigenvalues of `X X^* / cols`.
    Covariance { cols: usize },
    /// Eigenvalues of `X` itself.
    Unnormalized,
}

/// Real eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub scaling: Scaling,
}

impl Spectrum {
    /// `lambda_k`, with `k` counted from 1 at the largest eigenvalue.
    pub fn kth_largest(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.eigenvalues.len() {
            return Err(Error::Domain(format!(
                "eigenvalue index {k} outside 1..={}",
                self.eigenvalues.len()
            )));
        }
        Ok(self.eigenvalues[k - 1])
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Descending eigenvalues of a hermitian matrix. Equal eigenvalues keep the
/// order in which the solver produced them.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>, tag: Option<SeedTag>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let max_iter = MAX_SWEEPS_PER_DIM * n.max(1);
    let mut values: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        SymmetricEigen::try_new(real, f64::EPSILON, max_iter)
            .ok_or(Error::NonConvergence { tag })?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
            .ok_or(Error::NonConvergence { tag })?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric {
            tag,
            detail: "non-finite eigenvalue".into(),
        });
    }
    // stable: ties stay in solver order
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `X X^* / N` for an `n x N` matrix.
pub fn covariance_matrix(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let scale = Complex64::new(1.0 / x.ncols() as f64, 0.0);
    (x * x.adjoint()) * scale
}

/// Clamps eigenvalues in `[-NEGATIVE_CLAMP_TOL, 0)` to zero and rejects
/// anything more negative.
pub(crate) fn clamp_nonnegative(values: &mut [f64], tag: Option<SeedTag>) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -NEGATIVE_CLAMP_TOL {
            return Err(Error::Numeric {
                tag,
                detail: format!("covariance eigenvalue {v} is negative beyond tolerance"),
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Descending eigenvalues of `X X^* / N`.
pub fn covariance_spectrum(x: &MatrixSample) -> Result<Spectrum> {
    let MatrixShape::Rectangular { cols, .. } = x.shape() else {
        return Err(Error::Shape(
            "covariance spectrum needs a rectangular sample".into(),
        ));
    };
    let mut eigenvalues = hermitian_eigenvalues(covariance_matrix(x.entries()), x.seed_tag())?;
    clamp_nonnegative(&mut eigenvalues, x.seed_tag())?;
    Ok(Spectrum {
        eigenvalues,
        scaling: Scaling::Covariance { cols },
    })
}

/// Descending eigenvalues of a symmetric or hermitian sample, unnormalized.
pub fn symmetric_spectrum(x: &MatrixSample) -> Result<Spectrum> {
    if !matches!(x.shape(), MatrixShape::Symmetric { .. }) {
        return Err(Error::Shape(
            "symmetric spectrum needs a symmetric sample".into(),
        ));
    }
    Ok(Spectrum {
        eigenvalues: hermitian_eigenvalues(x.entries().clone(), x.seed_tag())?,
        scaling: Scaling::Unnormalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::ensemble::{
        sample_hermitian, sample_rectangular, sample_symmetric, EntryDistribution,
    };

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn one_by_one_covariance() {
        let x = MatrixSample::real_rectangular(&DMatrix::from_element(1, 1, 1.0)).unwrap();
        let s = covariance_spectrum(&x).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0]);
        assert_eq!(s.scaling, Scaling::Covariance { cols: 1 });
    }

    #[test]
    fn identity_covariance() {
        for n in [1, 3, 6] {
            let x = MatrixSample::real_rectangular(&DMatrix::identity(n, n)).unwrap();
            let s = covariance_spectrum(&x).unwrap();
            assert_close(&s.eigenvalues, &vec![1.0 / n as f64; n], 1e-15);
        }
    }

    /// Closed-form oracle: roots of t^2 - tr t + det for a 2x2 symmetric matrix.
    fn quadratic_roots(a: f64, b: f64, d: f64) -> [f64; 2] {
        let tr = a + d;
        let det = a * d - b * b;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        [tr / 2.0 + disc, tr / 2.0 - disc]
    }

    #[test]
    fn two_by_three_matches_quadratic() {
        for stream in 0..64 {
            let x =
                sample_rectangular(2, 3, EntryDistribution::Rademacher, SeedTag::new(4, stream))
                    .unwrap();
            let e = x.entries().map(|z| z.re);
            let (r0, r1) = (e.row(0), e.row(1));
            let a = r0.dot(&r0) / 3.0;
            let b = r0.dot(&r1) / 3.0;
            let d = r1.dot(&r1) / 3.0;
            let s = covariance_spectrum(&x).unwrap();
            assert_close(&s.eigenvalues, &quadratic_roots(a, b, d), 1e-12);
        }
    }

    #[test]
    fn diagonal_symmetric_sorts() {
        let x = MatrixSample::real_symmetric(&DMatrix::from_diagonal(&nalgebra::dvector![
            0.2, -1.0, 0.9, 0.2
        ]))
        .unwrap();
        let s = symmetric_spectrum(&x).unwrap();
        assert_close(&s.eigenvalues, &[0.9, 0.2, 0.2, -1.0], 1e-15);
    }

    #[test]
    fn negation_reverses_spectrum() {
        for stream in 0..16 {
            let x = sample_symmetric(5, EntryDistribution::UniformReal, SeedTag::new(8, stream))
                .unwrap();
            let neg = MatrixSample::symmetric(-x.entries().clone()).unwrap();
            let a = symmetric_spectrum(&x).unwrap().eigenvalues;
            let mut b: Vec<f64> = symmetric_spectrum(&neg)
                .unwrap()
                .eigenvalues
                .iter()
                .map(|v| -v)
                .collect();
            b.reverse();
            assert_close(&a, &b, 1e-12);
        }
    }

    /// Cubic oracle: trigonometric roots of det(tI - A) for symmetric 3x3 A.
    fn cubic_roots(a: &DMatrix<f64>) -> Vec<f64> {
        let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        let q = a.trace() / 3.0;
        let p2 =
            (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        if p == 0.0 {
            return vec![q; 3];
        }
        let b = (a - DMatrix::identity(3, 3) * q) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        vec![e1, 3.0 * q - e1 - e3, e3]
    }

    #[test]
    fn three_by_three_matches_cubic() {
        for stream in 0..64 {
            let x = sample_symmetric(3, EntryDistribution::Rademacher, SeedTag::new(6, stream))
                .unwrap();
            let real = x.entries().map(|z| z.re);
            let s = symmetric_spectrum(&x).unwrap();
            assert_close(&s.eigenvalues, &cubic_roots(&real), 1e-10);
        }
    }

    #[test]
    fn hermitian_spectrum_is_real_and_traces_match() {
        for stream in 0..16 {
            let x = sample_hermitian(6, EntryDistribution::ComplexDisk, SeedTag::new(10, stream))
                .unwrap();
            let s = symmetric_spectrum(&x).unwrap();
            let tr: f64 = x.entries().diagonal().iter().map(|z| z.re).sum();
            assert!((s.eigenvalues.iter().sum::<f64>() - tr).abs() < 1e-12);
            let frob: f64 = x.entries().iter().map(|z| z.norm_sqr()).sum();
            assert!((s.eigenvalues.iter().map(|v| v * v).sum::<f64>() - frob).abs() < 1e-10);
        }
    }

    #[test]
    fn shape_mismatch_errors() {
        let rect =
            sample_rectangular(2, 3, EntryDistribution::Rademacher, SeedTag::new(0, 0)).unwrap();
        assert!(matches!(symmetric_spectrum(&rect), Err(Error::Shape(_))));
        let sym = sample_symmetric(2, EntryDistribution::Rademacher, SeedTag::new(0, 0)).unwrap();
        assert!(matches!(covariance_spectrum(&sym), Err(Error::Shape(_))));
    }

    #[test]
    fn clamp_rejects_real_negativity() {
        let mut v = vec![1.0, -1e-12];
        clamp_nonnegative(&mut v, None).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
        let mut v = vec![1.0, -1e-6];
        assert!(matches!(
            clamp_nonnegative(&mut v, None),
            Err(Error::Numeric { .. })
        ));
    }

    #[test]
    fn kth_largest_indexing() {
        let s = Spectrum {
            eigenvalues: vec![3.0, 2.0, 1.0],
            scaling: Scaling::Unnormalized,
        };
        assert_eq!(s.kth_largest(1).unwrap(), 3.0);
        assert_eq!(s.kth_largest(3).unwrap(), 1.0);
        assert!(s.kth_largest(0).is_err());
        assert!(s.kth_largest(4).is_err());
    }
}
