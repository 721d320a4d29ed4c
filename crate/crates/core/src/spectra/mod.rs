//! Bounded-entry random matrices and their spectra.

mod eigen;
mod ensemble;
mod mp;
mod perturbation;

pub use eigen::{
    covariance_matrix, covariance_spectrum, hermitian_eigenvalues, symmetric_spectrum, Scaling,
    Spectrum, NEGATIVE_CLAMP_TOL,
};
pub use ensemble::{
    sample_hermitian, sample_rectangular, sample_symmetric, stream_rng, EntryDistribution,
    MatrixSample, MatrixShape,
};
pub use mp::{ks_distance, mp_distance, mp_histogram, Cdf, MarchenkoPastur, SpectralBin};
pub use perturbation::{
    column_bound_check, column_perturbation_extreme, BoundViolation, ColumnBoundReport,
    ColumnCandidates, ColumnDelta, DEFAULT_CANDIDATE_CAP, SPECTRAL_TOL,
};
