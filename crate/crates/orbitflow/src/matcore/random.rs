use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cmatrix::{CMatrix, MatError, C64};

/// Matrix with i.i.d. standard complex Gaussian entries
/// (`(x + iy)/sqrt(2)`, x and y standard normal).
pub(crate) fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * inv_sqrt2, im * inv_sqrt2)
    })
}

/// Haar-distributed random unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal divided out, which makes the Q factor unique and
/// Haar-distributed.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> Result<CMatrix, MatError> {
    if n == 0 {
        return Err(MatError::ZeroDimension);
    }
    for _ in 0..16 {
        let g = ginibre(n, n, rng);
        let qr = g.to_na().qr();
        let r = qr.r();
        if (0..n).any(|i| r[(i, i)].norm() < 1e-100) {
            continue; // measure-zero degenerate draw
        }
        let q = CMatrix::from_na(&qr.q());
        let phases: Vec<C64> = (0..n).map(|i| r[(i, i)] / r[(i, i)].norm()).collect();
        return Ok(CMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]));
    }
    Err(MatError::FactorizationFailed)
}
