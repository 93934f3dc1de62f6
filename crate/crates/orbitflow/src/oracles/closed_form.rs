//! Closed-form optimum for the Hermitian-plus-skew-Hermitian approximation
//! problem, spectral nearest-orbit distances, and analytic lower bounds.

use nalgebra::linalg::Schur;
use num_complex::Complex64 as C64;

use crate::matcore::{herm_eig, singular_values, CMatrix, MatError};

const SYMMETRY_RTOL: f64 = 1e-8;
const SCHUR_MAX_ITERS: usize = 100_000;

fn symmetry_tol(m: &CMatrix) -> f64 {
    SYMMETRY_RTOL * m.frobenius_norm().max(1.0)
}

/// The four sorted spectra entering the Hermitian-plus-skew optimum:
/// eigenvalues of `A`, of `-iB`, of `(C+C*)/2` and of `-i(C-C*)/2`, each
/// descending.
#[derive(Debug, Clone)]
pub struct HermSkewSpectra {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// Closed-form min and max of `||X A X* + Y B Y* - C||` over unitary `X, Y`
/// for Hermitian `A` and skew-Hermitian `B`, with unitaries attaining the
/// minimum.
#[derive(Debug, Clone)]
pub struct HermSkewOptimum {
    pub min_value: f64,
    pub max_value: f64,
    pub u_opt: CMatrix,
    pub v_opt: CMatrix,
    pub spectra: HermSkewSpectra,
}

/// Optimal Frobenius distance between `C` and sums `X A X* + Y B Y*`
/// (`A` Hermitian, `B` skew-Hermitian, `X`, `Y` unitary).
///
/// Splitting `C = F + iG` into Hermitian `F = (C+C*)/2` and
/// `G = -i(C-C*)/2`, the Hermitian and skew parts of the distance decouple
/// and each reduces to a nearest-isospectral-Hermitian alignment:
/// the minimum pairs descending spectra with descending, the maximum pairs
/// descending with ascending, and
/// `min^2 = sum_j (f_j - a_j)^2 + (g_j - b_j)^2`.
///
/// The returned `u_opt`, `v_opt` satisfy
/// `||u_opt A u_opt* + v_opt B v_opt* - C|| = min_value`.
pub fn herm_skew_min_max(
    a: &CMatrix,
    b: &CMatrix,
    c: &CMatrix,
) -> Result<HermSkewOptimum, MatError> {
    let n = a.require_square()?;
    b.same_shape(a)?;
    c.same_shape(a)?;
    let dev_a = a.hermitian_deviation();
    if dev_a > symmetry_tol(a) {
        return Err(MatError::NotHermitian { deviation: dev_a });
    }
    let dev_b = b.skew_deviation();
    if dev_b > symmetry_tol(b) {
        return Err(MatError::NotSkewHermitian { deviation: dev_b });
    }

    let minus_i = C64::new(0.0, -1.0);
    let eig_a = herm_eig(a)?;
    let eig_b = herm_eig(&b.scale(minus_i))?;
    let f_mat = c.herm_part()?;
    let g_mat = c.skew_part()?.scale(minus_i);
    let eig_f = herm_eig(&f_mat)?;
    let eig_g = herm_eig(&g_mat)?;

    let paired = |x: &[f64], y: &[f64], rev: bool| -> f64 {
        (0..n)
            .map(|j| {
                let yj = if rev { y[n - 1 - j] } else { y[j] };
                (x[j] - yj).powi(2)
            })
            .sum()
    };
    let min_sq = paired(&eig_f.values, &eig_a.values, false)
        + paired(&eig_g.values, &eig_b.values, false);
    let max_sq = paired(&eig_f.values, &eig_a.values, true)
        + paired(&eig_g.values, &eig_b.values, true);

    // Minimizers: rotate A's descending eigenbasis onto F's, and -iB's onto
    // G's, so that u A u* = Q_F diag(a) Q_F* and v B v* = i Q_G diag(b) Q_G*.
    let u_opt = &eig_f.vectors * &eig_a.vectors.adjoint();
    let v_opt = &eig_g.vectors * &eig_b.vectors.adjoint();

    Ok(HermSkewOptimum {
        min_value: min_sq.max(0.0).sqrt(),
        max_value: max_sq.max(0.0).sqrt(),
        u_opt,
        v_opt,
        spectra: HermSkewSpectra {
            a: eig_a.values,
            b: eig_b.values,
            f: eig_f.values,
            g: eig_g.values,
        },
    })
}

/// Min and max Frobenius distance between the unitary similarity orbit of
/// Hermitian `A` and Hermitian `C`: sorted-spectrum alignment gives
/// `(||a↓ - c↓||, ||a↓ - c↑||)`.
pub fn hermitian_nearest(a: &CMatrix, c: &CMatrix) -> Result<(f64, f64), MatError> {
    let n = a.require_square()?;
    c.same_shape(a)?;
    for (m, name) in [(a, "A"), (c, "C")] {
        let dev = m.hermitian_deviation();
        if dev > symmetry_tol(m) {
            let _ = name;
            return Err(MatError::NotHermitian { deviation: dev });
        }
    }
    let av = herm_eig(a)?.values;
    let cv = herm_eig(c)?.values;
    let min = (0..n)
        .map(|j| (av[j] - cv[j]).powi(2))
        .sum::<f64>()
        .sqrt();
    let max = (0..n)
        .map(|j| (av[j] - cv[n - 1 - j]).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((min, max))
}

/// Distance between the unitary equivalence orbit of `A` and the matrix `C`:
/// `||s(A)↓ - s(C)↓||_2`. Zero exactly when the singular values coincide.
pub fn equivalence_nearest(a: &CMatrix, c: &CMatrix) -> Result<f64, MatError> {
    c.same_shape(a)?;
    let sa = singular_values(a)?;
    let sc = singular_values(c)?;
    Ok(sa
        .iter()
        .zip(&sc)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Frobenius lower bound `|tr A - tr B| / sqrt(n)` on `||S^-1 A S - T^-1 B T||`
/// for any invertible `S`, `T`; in particular for unitary ones.
pub fn similarity_trace_bound(a: &CMatrix, b: &CMatrix) -> Result<f64, MatError> {
    let n = a.require_square()?;
    b.same_shape(a)?;
    Ok((a.trace() - b.trace()).norm() / (n as f64).sqrt())
}

/// Eigenvalues of a general square complex matrix via Schur decomposition,
/// unordered.
pub fn complex_eigenvalues(m: &CMatrix) -> Result<Vec<C64>, MatError> {
    let n = m.require_square()?;
    m.validate_finite()?;
    let schur = Schur::try_new(m.to_na(), f64::EPSILON, SCHUR_MAX_ITERS)
        .ok_or(MatError::FactorizationFailed)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Infimum of `||S^-1 A S - bI||` over invertible `S`:
/// `sqrt(sum_i |a_i - b|^2)` with `a_i` the eigenvalues of `A`. The infimum
/// need not be attained.
pub fn similarity_to_scalar_inf(a: &CMatrix, b: C64) -> Result<f64, MatError> {
    let eigs = complex_eigenvalues(a)?;
    Ok(eigs.iter().map(|z| (z - b).norm_sqr()).sum::<f64>().sqrt())
}

/// Hermitian embedding `[[0, A], [A*, 0]]` whose eigenvalues are the
/// singular values of `A` with both signs, padded with zeros.
pub fn tilde_embed(a: &CMatrix) -> CMatrix {
    let (n, m) = a.shape();
    CMatrix::from_fn(n + m, n + m, |i, j| {
        if i < n && j >= n {
            a[(i, j - n)]
        } else if i >= n && j < n {
            a[(j, i - n)].conj()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
