use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SeedTag};

pub(crate) const MODULUS_TOL: f64 = 1e-15;

/// Law of a single matrix entry. Every variant is supported on the closed
/// complex unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryDistribution {
    /// `+1` or `-1` with equal probability.
    #[serde(alias = "RADEMACHER")]
    Rademacher,
    /// Uniform on `[-1, 1]`.
    #[serde(alias = "UNIFORM_REAL")]
    UniformReal,
    /// Uniform on `{1, -1, i, -i}`.
    #[serde(alias = "COMPLEX_RADEMACHER")]
    ComplexRademacher,
    /// Uniform on the closed unit disk.
    #[serde(alias = "COMPLEX_DISK")]
    ComplexDisk,
}

impl EntryDistribution {
    pub fn is_real(self) -> bool {
        matches!(
            self,
            EntryDistribution::Rademacher | EntryDistribution::UniformReal
        )
    }

    /// `E|X|^2`
    pub fn variance(self) -> f64 {
        match self {
            EntryDistribution::Rademacher | EntryDistribution::ComplexRademacher => 1.0,
            EntryDistribution::UniformReal => 1.0 / 3.0,
            EntryDistribution::ComplexDisk => 0.5,
        }
    }

    /// Real-valued law used on the diagonal of hermitian samples.
    pub fn real_counterpart(self) -> EntryDistribution {
        match self {
            EntryDistribution::Rademacher | EntryDistribution::ComplexRademacher => {
                EntryDistribution::Rademacher
            }
            EntryDistribution::UniformReal | EntryDistribution::ComplexDisk => {
                EntryDistribution::UniformReal
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            EntryDistribution::Rademacher => {
                Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
            }
            EntryDistribution::UniformReal => Complex64::new(rng.random_range(-1.0..=1.0), 0.0),
            EntryDistribution::ComplexRademacher => match rng.random_range(0..4u8) {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(-1.0, 0.0),
                2 => Complex64::new(0.0, 1.0),
                _ => Complex64::new(0.0, -1.0),
            },
            // rejection from the bounding square
            EntryDistribution::ComplexDisk => loop {
                let re: f64 = rng.random_range(-1.0..=1.0);
                let im: f64 = rng.random_range(-1.0..=1.0);
                if re * re + im * im <= 1.0 {
                    break Complex64::new(re, im);
                }
            },
        }
    }

    /// The finite support of the entry law, if it has one.
    pub fn finite_support(self) -> Option<Vec<Complex64>> {
        match self {
            EntryDistribution::Rademacher => {
                Some(vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)])
            }
            EntryDistribution::ComplexRademacher => Some(vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ]),
            EntryDistribution::UniformReal | EntryDistribution::ComplexDisk => None,
        }
    }
}

/// Independent random stream for one sample: ChaCha8 keyed by the base seed,
/// with the stream number selecting one of its 2^64 streams.
pub fn stream_rng(tag: SeedTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(tag.base_seed);
    rng.set_stream(tag.stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixShape {
    /// `n x n`, equal to its conjugate transpose.
    Symmetric { n: usize },
    /// `n x N`
    Rectangular { rows: usize, cols: usize },
}

/// One realization of a bounded-entry random matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSample {
    shape: MatrixShape,
    entries: DMatrix<Complex64>,
    seed_tag: Option<SeedTag>,
}

fn check_modulus(entries: &DMatrix<Complex64>) -> Result<()> {
    match entries
        .iter()
        .find(|z| z.norm().is_nan() || z.norm() > 1.0 + MODULUS_TOL)
    {
        Some(z) => Err(Error::Domain(format!("entry {z} has modulus above 1"))),
        None => Ok(()),
    }
}

impl MatrixSample {
    pub fn rectangular(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("matrix must be at least 1x1".into()));
        }
        check_modulus(&entries)?;
        Ok(Self {
            shape: MatrixShape::Rectangular {
                rows: entries.nrows(),
                cols: entries.ncols(),
            },
            entries,
            seed_tag: None,
        })
    }

    pub fn real_rectangular(entries: &DMatrix<f64>) -> Result<Self> {
        Self::rectangular(entries.map(|x| Complex64::new(x, 0.0)))
    }

    /// A hermitian (or real symmetric) matrix.
    pub fn symmetric(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.is_empty() || !entries.is_square() {
            return Err(Error::Shape(
                "symmetric sample must be square and non-empty".into(),
            ));
        }
        check_modulus(&entries)?;
        let n = entries.nrows();
        for i in 0..n {
            for j in i..n {
                if entries[(i, j)] != entries[(j, i)].conj() {
                    return Err(Error::Domain(format!(
                        "entries ({i},{j}) and ({j},{i}) are not conjugate"
                    )));
                }
            }
        }
        Ok(Self {
            shape: MatrixShape::Symmetric { n },
            entries,
            seed_tag: None,
        })
    }

    pub fn real_symmetric(entries: &DMatrix<f64>) -> Result<Self> {
        Self::symmetric(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn shape(&self) -> MatrixShape {
        self.shape
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn seed_tag(&self) -> Option<SeedTag> {
        self.seed_tag
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn column(&self, j: usize) -> DVector<Complex64> {
        self.entries.column(j).into_owned()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }
}

/// `rows x cols` matrix with i.i.d. entries, filled column by column from
/// the stream named by `tag`.
pub fn sample_rectangular(
    rows: usize,
    cols: usize,
    dist: EntryDistribution,
    tag: SeedTag,
) -> Result<MatrixSample> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!(
            "cannot sample a {rows}x{cols} matrix"
        )));
    }
    let mut rng = stream_rng(tag);
    let entries = DMatrix::from_fn(rows, cols, |_, _| dist.sample(&mut rng));
    Ok(MatrixSample {
        shape: MatrixShape::Rectangular { rows, cols },
        entries,
        seed_tag: Some(tag),
    })
}

/// Real symmetric `n x n` matrix: entries on and above the diagonal are
/// i.i.d., the rest mirrored. Complex laws are rejected; use
/// [`sample_hermitian`] for those.
pub fn sample_symmetric(n: usize, dist: EntryDistribution, tag: SeedTag) -> Result<MatrixSample> {
    if !dist.is_real() {
        return Err(Error::Config(format!(
            "{dist:?} is complex; a real symmetric ensemble needs a real entry law"
        )));
    }
    sample_hermitian(n, dist, tag)
}

/// Hermitian `n x n` matrix: the upper triangle is i.i.d. from `dist`, the
/// diagonal from its real counterpart, the lower triangle conjugate-mirrored.
pub fn sample_hermitian(n: usize, dist: EntryDistribution, tag: SeedTag) -> Result<MatrixSample> {
    if n == 0 {
        return Err(Error::Shape("cannot sample a 0x0 matrix".into()));
    }
    let mut rng = stream_rng(tag);
    let diag = dist.real_counterpart();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = if i == j {
                diag.sample(&mut rng)
            } else {
                dist.sample(&mut rng)
            };
            entries[(i, j)] = z;
            entries[(j, i)] = z.conj();
        }
    }
    Ok(MatrixSample {
        shape: MatrixShape::Symmetric { n },
        entries,
        seed_tag: Some(tag),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn rademacher_scalar_support() {
        for stream in 0..50 {
            let x =
                sample_rectangular(1, 1, EntryDistribution::Rademacher, SeedTag::new(3, stream))
                    .unwrap();
            let z = x.entries()[(0, 0)];
            assert!(z == Complex64::new(1.0, 0.0) || z == Complex64::new(-1.0, 0.0));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        for dist in [
            EntryDistribution::Rademacher,
            EntryDistribution::UniformReal,
            EntryDistribution::ComplexRademacher,
            EntryDistribution::ComplexDisk,
        ] {
            let tag = SeedTag::new(11, 42);
            let a = sample_rectangular(5, 7, dist, tag).unwrap();
            let b = sample_rectangular(5, 7, dist, tag).unwrap();
            assert_eq!(a, b);
            let c = sample_rectangular(5, 7, dist, SeedTag::new(11, 43)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn uniform_entry_mean() {
        let m = 10_000;
        let mean: f64 = (0..m)
            .map(|s| {
                sample_rectangular(1, 1, EntryDistribution::UniformReal, SeedTag::new(5, s))
                    .unwrap()
                    .entries()[(0, 0)]
                    .re
            })
            .sum::<f64>()
            / m as f64;
        // three standard errors, sd = 1/sqrt(3)
        assert!(
            mean.abs() < 3.0 * (1.0 / 3f64.sqrt()) / 100.0,
            "mean {mean}"
        );
    }

    #[test]
    fn entry_second_moments() {
        let mut rng = stream_rng(SeedTag::new(9, 0));
        for dist in [
            EntryDistribution::Rademacher,
            EntryDistribution::UniformReal,
            EntryDistribution::ComplexRademacher,
            EntryDistribution::ComplexDisk,
        ] {
            let m = 40_000;
            let mut second = 0.0;
            for _ in 0..m {
                let z = dist.sample(&mut rng);
                assert!(z.norm() <= 1.0);
                if dist.is_real() {
                    assert_eq!(z.im, 0.0);
                }
                second += z.norm_sqr();
            }
            let second = second / m as f64;
            // |X|^2 lies in [0, 1], so its sd is at most 1/2
            assert!(
                (second - dist.variance()).abs() < 4.0 * 0.5 / (m as f64).sqrt(),
                "{dist:?}: {second}"
            );
        }
    }

    #[test]
    fn symmetric_one_by_one() {
        let x = sample_symmetric(1, EntryDistribution::UniformReal, SeedTag::new(1, 1)).unwrap();
        assert_eq!(x.shape(), MatrixShape::Symmetric { n: 1 });
        assert_eq!(x.entries()[(0, 0)].im, 0.0);
    }

    #[test]
    fn symmetric_rejects_complex_law() {
        let err =
            sample_symmetric(3, EntryDistribution::ComplexDisk, SeedTag::new(0, 0)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn hermitian_mirrors_by_conjugation() {
        for stream in 0..20 {
            for dist in [
                EntryDistribution::ComplexDisk,
                EntryDistribution::ComplexRademacher,
                EntryDistribution::Rademacher,
            ] {
                let x = sample_hermitian(6, dist, SeedTag::new(2, stream)).unwrap();
                let e = x.entries();
                for i in 0..6 {
                    assert_eq!(e[(i, i)].im, 0.0);
                    for j in 0..6 {
                        assert_eq!(e[(i, j)], e[(j, i)].conj());
                    }
                }
                assert!(MatrixSample::symmetric(e.clone()).is_ok());
            }
        }
    }

    #[test]
    fn two_by_two_rademacher_covers_eight_matrices_evenly() {
        // enumeration oracle: (x11, x12, x22) ranges over {-1, 1}^3
        let mut expected = Vec::new();
        for a in [-1i8, 1] {
            for b in [-1i8, 1] {
                for c in [-1i8, 1] {
                    expected.push((a, b, c));
                }
            }
        }
        let m = 16_000u64;
        let mut counts: HashMap<(i8, i8, i8), u64> = HashMap::new();
        for s in 0..m {
            let x =
                sample_symmetric(2, EntryDistribution::Rademacher, SeedTag::new(77, s)).unwrap();
            let e = x.entries();
            assert_eq!(e[(0, 1)], e[(1, 0)]);
            let key = (e[(0, 0)].re as i8, e[(0, 1)].re as i8, e[(1, 1)].re as i8);
            *counts.entry(key).or_default() += 1;
        }
        let mut seen: Vec<_> = counts.keys().copied().collect();
        seen.sort();
        assert_eq!(seen, expected);
        // chi-square with 7 degrees of freedom; 24.3 is the 0.999 quantile
        let e = m as f64 / 8.0;
        let chi2: f64 = counts.values().map(|c| (*c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 24.3, "chi2 {chi2}");
    }

    #[test]
    fn constructors_validate() {
        let big = DMatrix::from_element(2, 2, 1.5);
        assert!(MatrixSample::real_rectangular(&big).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(MatrixSample::real_symmetric(&asym).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]);
        assert!(MatrixSample::real_symmetric(&ok).is_ok());
    }
}
