//! Dense complex-matrix kernel: norms, Hermitian eigendecomposition, SVD,
//! skew-Hermitian matrix exponentials, Haar-random unitaries and
//! re-unitarization.
//!
//! Everything here is a pure function on immutable inputs; the only mutable
//! object is the caller-owned RNG handed to [`haar_unitary`].

mod cmatrix;
mod factor;
mod random;

pub use cmatrix::{CMatrix, MatError, C64};
pub use factor::{
    complete_unitary_columns, expm_skew, herm_eig, ky_fan_norm, reunitarize, singular_values,
    svd, SkewExpFactor, SpectralData, SpectralKind,
};
pub use random::haar_unitary;
