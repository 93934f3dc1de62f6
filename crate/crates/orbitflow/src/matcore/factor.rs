//! Factorizations: Hermitian eigendecomposition, SVD, polar re-unitarization
//! and the eigendecomposition-based skew-Hermitian exponential.
//!
//! The dense factorizations are delegated to nalgebra; wrappers here enforce
//! the crate's symmetry tolerances, sort conventions and full (square)
//! factor shapes.

use num_complex::Complex64 as C64;

use super::cmatrix::{CMatrix, MatError};

/// Relative symmetrization tolerance for "Hermitian" / "skew-Hermitian"
/// inputs: deviations up to `1e-8 * max(1, ||M||)` are symmetrized away,
/// anything larger is an error.
pub(crate) const SYMMETRY_RTOL: f64 = 1e-8;

const EIG_MAX_ITERS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    Eigen,
    Singular,
}

/// Sorted spectral values together with the basis attaining them.
///
/// `values` is non-increasing. For `Eigen` data the columns of `vectors` are
/// the corresponding orthonormal eigenvectors; for `Singular` data they are
/// the right singular vectors.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub kind: SpectralKind,
}

fn symmetry_tol(m: &CMatrix) -> f64 {
    SYMMETRY_RTOL * m.frobenius_norm().max(1.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// The input is symmetrized as `(H + H*)/2` before factorization; deviations
/// beyond the symmetrization tolerance are rejected.
pub fn herm_eig(h: &CMatrix) -> Result<SpectralData, MatError> {
    let n = h.require_square()?;
    h.validate_finite()?;
    let dev = h.hermitian_deviation();
    if dev > symmetry_tol(h) {
        return Err(MatError::NotHermitian { deviation: dev });
    }
    let sym = h.herm_part()?;
    let se = sym
        .to_na()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITERS)
        .ok_or(MatError::FactorizationFailed)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());

    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok(SpectralData {
        values,
        vectors,
        kind: SpectralKind::Eigen,
    })
}

/// Singular value decomposition `M = U * diag(s) * V` with square unitary
/// factors (`U` is rows x rows, `V` is cols x cols) and `s` sorted descending.
///
/// Note the convention: `V` is the whole right factor, so `M = U Σ V` without
/// a further adjoint.
pub fn svd(m: &CMatrix) -> Result<(CMatrix, SpectralData, CMatrix), MatError> {
    m.validate_finite()?;
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    let f = m
        .to_na()
        .try_svd(true, true, f64::EPSILON, EIG_MAX_ITERS)
        .ok_or(MatError::FactorizationFailed)?;
    let u_thin = CMatrix::from_na(f.u.as_ref().expect("svd requested u"));
    let v_t_thin = CMatrix::from_na(f.v_t.as_ref().expect("svd requested v_t"));
    let values: Vec<f64> = f.singular_values.iter().copied().collect();
    debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));

    let u = if rows == p {
        u_thin
    } else {
        complete_unitary_columns(&u_thin)
    };
    // Complete V by completing the column space of V* and transposing back.
    let v = if cols == p {
        v_t_thin
    } else {
        complete_unitary_columns(&v_t_thin.adjoint()).adjoint()
    };
    let spectral = SpectralData {
        values,
        vectors: v.adjoint(),
        kind: SpectralKind::Singular,
    };
    Ok((u, spectral, v))
}

/// Singular values only, sorted descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>, MatError> {
    m.validate_finite()?;
    let sv = m.to_na().singular_values();
    let mut values: Vec<f64> = sv.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(values)
}

/// Extend `k` orthonormal columns (n x k, k <= n) to a full n x n unitary.
///
/// Deterministic: at each step the standard basis vector with the largest
/// out-of-span residual is orthonormalized and appended.
pub fn complete_unitary_columns(q: &CMatrix) -> CMatrix {
    let (n, k) = q.shape();
    assert!(k <= n, "more columns than rows cannot be orthonormal");
    let mut cols: Vec<Vec<C64>> = (0..k)
        .map(|j| (0..n).map(|i| q[(i, j)]).collect())
        .collect();
    while cols.len() < n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for c in 0..n {
            let mut v: Vec<C64> = (0..n)
                .map(|i| if i == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                .collect();
            // two Gram-Schmidt sweeps for orthogonality at working precision
            for _ in 0..2 {
                for col in &cols {
                    let inner: C64 = col.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ci) in v.iter_mut().zip(col) {
                        *vi -= inner * ci;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, mut v) = best.expect("n > 0");
        assert!(norm > 1e-8, "unitary completion lost rank");
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Reusable factorization of a skew-Hermitian matrix for evaluating
/// `exp(t * Omega)` at many step sizes `t`.
///
/// `i*Omega` is Hermitian with eigendecomposition `W diag(lambda) W*`, so
/// `exp(t*Omega) = W diag(exp(-i t lambda)) W*`, which is unitary by
/// construction.
#[derive(Debug, Clone)]
pub struct SkewExpFactor {
    eigvecs: CMatrix,
    eigvals: Vec<f64>,
}

impl SkewExpFactor {
    pub fn new(omega: &CMatrix) -> Result<Self, MatError> {
        omega.require_square()?;
        let dev = omega.skew_deviation();
        if dev > symmetry_tol(omega) {
            return Err(MatError::NotSkewHermitian { deviation: dev });
        }
        // i * (Omega - Omega*)/2 is exactly Hermitian.
        let herm = omega.skew_part()?.scale(C64::new(0.0, 1.0));
        let eig = herm_eig(&herm)?;
        Ok(Self {
            eigvecs: eig.vectors,
            eigvals: eig.values,
        })
    }

    /// `exp(t * Omega)`.
    pub fn exp_scaled(&self, t: f64) -> CMatrix {
        let n = self.eigvals.len();
        // W diag(e^{-i t lambda}) then * W*
        let mut scaled = CMatrix::zeros(n, n);
        for j in 0..n {
            let phase = C64::from_polar(1.0, -t * self.eigvals[j]);
            for i in 0..n {
                scaled[(i, j)] = self.eigvecs[(i, j)] * phase;
            }
        }
        &scaled * &self.eigvecs.adjoint()
    }
}

/// Exponential of a skew-Hermitian matrix; the result is unitary to working
/// precision.
pub fn expm_skew(omega: &CMatrix) -> Result<CMatrix, MatError> {
    Ok(SkewExpFactor::new(omega)?.exp_scaled(1.0))
}

/// Nearest unitary (polar factor) of a near-unitary matrix.
///
/// Rejects inputs with `||M*M - I|| > 1e-2`; this is drift repair, not a
/// general polar decomposition.
pub fn reunitarize(m: &CMatrix) -> Result<CMatrix, MatError> {
    m.require_square()?;
    let dev = m.unitary_deviation();
    if !dev.is_finite() || dev > 1e-2 {
        return Err(MatError::NotNearUnitary { deviation: dev });
    }
    let (u, _s, v) = svd(m)?;
    Ok(&u * &v)
}

/// Ky Fan k-norm: the sum of the k largest singular values.
pub fn ky_fan_norm(m: &CMatrix, k: usize) -> Result<f64, MatError> {
    let max = m.rows().min(m.cols());
    if k == 0 || k > max {
        return Err(MatError::KyFanRange { k, max });
    }
    let values = singular_values(m)?;
    Ok(values[..k].iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::haar_unitary;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn example2_a() -> CMatrix {
        CMatrix::from_real(3, 3, &[2.0, 5.0, 11.0, 5.0, 8.0, 15.0, 11.0, 15.0, 16.0]).unwrap()
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha12Rng) -> CMatrix {
        use rand_distr::{Distribution, StandardNormal};
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            )
        });
        g.herm_part().unwrap()
    }

    #[test]
    fn herm_eig_sorts_descending() {
        let d = CMatrix::diag_real(&[1.0, 3.0, 2.0]);
        let eig = herm_eig(&d).unwrap();
        assert_eq!(eig.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn herm_eig_symmetric_2x2() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let eig = herm_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_reference_spectrum() {
        let eig = herm_eig(&example2_a()).unwrap();
        let expected = [32.1504, -0.4830, -5.6674];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-4, "{v} vs {e}");
        }
    }

    #[test]
    fn herm_eig_reconstructs() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in [2usize, 5, 9] {
            let h = random_hermitian(n, &mut rng);
            let eig = herm_eig(&h).unwrap();
            let lam = CMatrix::diag_real(&eig.values);
            let recon = &(&eig.vectors * &lam) * &eig.vectors.adjoint();
            let scale = h.frobenius_norm().max(1.0);
            assert!((&recon - &h).frobenius_norm() <= 1e-10 * scale);
            assert!(eig.vectors.unitary_deviation() < 1e-12);
            // vectors* H vectors diagonal within tolerance
            let d = &(&eig.vectors.adjoint() * &h) * &eig.vectors;
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += d[(i, j)].norm_sqr();
                    }
                }
            }
            assert!(off.sqrt() < 1e-10 * scale);
        }
    }

    #[test]
    fn herm_eig_rejects_nonsymmetric() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eig(&m), Err(MatError::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&r), Err(MatError::NotSquare { .. })));
    }

    #[test]
    fn svd_of_descending_diagonal() {
        let d = CMatrix::diag_real(&[5.0, 2.0, 1.0]);
        let (_, s, _) = svd(&d).unwrap();
        assert!(s
            .values
            .iter()
            .zip([5.0, 2.0, 1.0])
            .all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn svd_of_unitary_is_all_ones() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let q = haar_unitary(4, &mut rng).unwrap();
        let (_, s, _) = svd(&q).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn svd_of_permuted_diagonal() {
        let m = CMatrix::from_real(2, 2, &[0.0, 2.0, 1.0, 0.0]).unwrap();
        let (_, s, _) = svd(&m).unwrap();
        assert!((s.values[0] - 2.0).abs() < 1e-14);
        assert!((s.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_full_factors_rectangular() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        use rand_distr::{Distribution, StandardNormal};
        let m = CMatrix::from_fn(3, 5, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let (u, s, v) = svd(&m).unwrap();
        assert_eq!(u.shape(), (3, 3));
        assert_eq!(v.shape(), (5, 5));
        assert!(u.unitary_deviation() < 1e-10);
        assert!(v.unitary_deviation() < 1e-10);
        let sigma = CMatrix::rect_diag_real(3, 5, &s.values);
        let recon = &(&u * &sigma) * &v;
        let scale = m.frobenius_norm().max(1.0);
        assert!((&recon - &m).frobenius_norm() <= 1e-10 * scale);
    }

    #[test]
    fn svd_values_invariant_under_unitaries() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        use rand_distr::{Distribution, StandardNormal};
        let m = CMatrix::from_fn(4, 6, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let q = haar_unitary(4, &mut rng).unwrap();
        let w = haar_unitary(6, &mut rng).unwrap();
        let s0 = singular_values(&m).unwrap();
        let s1 = singular_values(&(&(&q * &m) * &w)).unwrap();
        for (a, b) in s0.iter().zip(&s1) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn expm_zero_is_identity() {
        let w = expm_skew(&CMatrix::zeros(3, 3)).unwrap();
        assert!((&w - &CMatrix::identity(3)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn expm_diagonal_phases() {
        let thetas = [0.3, -1.1, 2.0];
        let omega = CMatrix::diag(&thetas.map(|t| C64::new(0.0, t)));
        let w = expm_skew(&omega).unwrap();
        for (i, t) in thetas.iter().enumerate() {
            assert!((w[(i, i)] - C64::from_polar(1.0, *t)).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_planar_rotation() {
        let t = 0.7f64;
        let omega = CMatrix::from_real(2, 2, &[0.0, t, -t, 0.0]).unwrap();
        let w = expm_skew(&omega).unwrap();
        let expected =
            CMatrix::from_real(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]).unwrap();
        assert!((&w - &expected).frobenius_norm() < 1e-13);
        assert!(w.unitary_deviation() < 1e-12);
    }

    #[test]
    fn expm_rejects_non_skew() {
        let m = CMatrix::identity(2);
        assert!(matches!(expm_skew(&m), Err(MatError::NotSkewHermitian { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn expm_one_parameter_group(seed in 0u64..1000, s in -2.0f64..2.0, t in -2.0f64..2.0) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let g = random_hermitian(3, &mut rng);
            let omega = g.scale(C64::new(0.0, 1.0)); // i * Hermitian is skew
            let f = SkewExpFactor::new(&omega).unwrap();
            let lhs = f.exp_scaled(s + t);
            let rhs = &f.exp_scaled(s) * &f.exp_scaled(t);
            prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-10);
        }

        #[test]
        fn ky_fan_monotone_in_k(seed in 0u64..1000) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            use rand_distr::{Distribution, StandardNormal};
            let m = CMatrix::from_fn(4, 3, |_, _| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let mut prev = 0.0;
            for k in 1..=3 {
                let v = ky_fan_norm(&m, k).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn reunitarize_fixes_small_drift() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let q = haar_unitary(4, &mut rng).unwrap();
        let w = reunitarize(&q).unwrap();
        assert!((&w - &q).frobenius_norm() < 1e-13);

        let scaled = CMatrix::identity(3).scale_re(1.001);
        let w = reunitarize(&scaled).unwrap();
        assert!((&w - &CMatrix::identity(3)).frobenius_norm() < 1e-13);

        // perturbation check against the polar-factor contract
        use rand_distr::{Distribution, StandardNormal};
        let noise = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        })
        .scale_re(1e-6);
        let w = reunitarize(&(&q + &noise)).unwrap();
        assert!(w.unitary_deviation() < 1e-13);
        assert!((&w - &q).frobenius_norm() <= 1e-5);
    }

    #[test]
    fn reunitarize_rejects_far_from_unitary() {
        let m = CMatrix::identity(3).scale_re(2.0);
        assert!(matches!(
            reunitarize(&m),
            Err(MatError::NotNearUnitary { .. })
        ));
    }

    #[test]
    fn ky_fan_reference_values() {
        let m = CMatrix::diag_real(&[14.0, 2.0]);
        assert!((ky_fan_norm(&m, 1).unwrap() - 14.0).abs() < 1e-12);
        assert!((ky_fan_norm(&m, 2).unwrap() - 16.0).abs() < 1e-12);
        let id = CMatrix::identity(5);
        for k in 1..=5 {
            assert!((ky_fan_norm(&id, k).unwrap() - k as f64).abs() < 1e-12);
        }
        assert!(matches!(
            ky_fan_norm(&m, 0),
            Err(MatError::KyFanRange { .. })
        ));
        assert!(matches!(
            ky_fan_norm(&m, 3),
            Err(MatError::KyFanRange { .. })
        ));
    }
}
