//! Feasibility certificates: the polygon condition for absolute values,
//! permutation search for diagonal decompositions, and the Ky Fan norm
//! necessary condition for sums of equivalence orbits.

use thiserror::Error;

use crate::matcore::{singular_values, CMatrix, MatError};

/// Relative slack when comparing Ky Fan sums, so that exact equality cases
/// count as holding despite roundoff.
const KYFAN_RTOL: f64 = 1e-10;

/// Hard cap for the exhaustive permutation search.
pub const DECOMPOSITION_MAX_DIM: usize = 8;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("lengths must be positive, entry {index} is {value}")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("at least one length is required")]
    Empty,
    #[error("vector {index} has length {got}, expected {expected}")]
    LengthMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("entries must be non-negative, vector {vector} entry {index} is {value}")]
    NegativeEntry {
        vector: usize,
        index: usize,
        value: f64,
    },
    #[error("n = {n} exceeds the exhaustive search cap {max}")]
    TooLarge { n: usize, max: usize },
    #[error("need a target and at least one operand")]
    TooFewMatrices,
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Constructive evidence attached to a feasibility verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityWitness {
    /// Index k with `sum_j a_j - 2 a_k < 0`.
    ViolatingIndex(usize),
    /// Matrix index i and norm order k with `2 ||A_i||_k > sum_j ||A_j||_k`.
    ViolatingNorm { matrix: usize, k: usize },
    /// Row assignments: `perms[j][i]` is the index of `v_j` placed on row i.
    Permutations(Vec<Vec<usize>>),
}

/// Outcome of one feasibility test.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub condition: &'static str,
    pub holds: bool,
    pub witness: Option<FeasibilityWitness>,
}

/// Do the given positive lengths close up into a (possibly degenerate)
/// polygon? Holds iff `sum_j a_j - 2 a_k >= 0` for every k, equivalently iff
/// some phases `e^{i t_j}` make the signed sum vanish.
pub fn polygon_check(lengths: &[f64]) -> Result<FeasibilityReport, FeasibilityError> {
    if lengths.is_empty() {
        return Err(FeasibilityError::Empty);
    }
    for (index, &value) in lengths.iter().enumerate() {
        if !(value > 0.0) {
            return Err(FeasibilityError::NonPositiveLength { index, value });
        }
    }
    let total: f64 = lengths.iter().sum();
    let violation = lengths
        .iter()
        .enumerate()
        .find(|(_, &a)| total - 2.0 * a < 0.0);
    Ok(match violation {
        Some((k, _)) => FeasibilityReport {
            condition: "polygon",
            holds: false,
            witness: Some(FeasibilityWitness::ViolatingIndex(k)),
        },
        None => FeasibilityReport {
            condition: "polygon",
            holds: true,
            witness: None,
        },
    })
}

/// Polygon condition for one row of a diagonal decomposition. Zero entries
/// contribute nothing and are dropped; an all-zero row trivially holds.
pub(crate) fn polygon_row_holds(row: &[f64]) -> bool {
    let mut total = 0.0;
    let mut max = 0.0f64;
    let mut nonzero = 0usize;
    for &a in row {
        if a > 0.0 {
            total += a;
            max = max.max(a);
            nonzero += 1;
        }
    }
    nonzero == 0 || total - 2.0 * max >= 0.0
}

/// Search for permutations `P_1..P_N` such that every row of
/// `[v0 | P_1 v_1 | ... | P_N v_N]` satisfies the polygon condition — the
/// certificate that `diag(v0)` equals a sum of phased permuted diagonals of
/// the `v_j`.
///
/// Exhaustive with row-wise pruning (candidates enumerated in index order,
/// first witness returned); capped at n <= 8.
pub fn diagonal_decomposition_search(
    v0: &[f64],
    vs: &[Vec<f64>],
) -> Result<FeasibilityReport, FeasibilityError> {
    let n = v0.len();
    if n == 0 {
        return Err(FeasibilityError::Empty);
    }
    if n > DECOMPOSITION_MAX_DIM {
        return Err(FeasibilityError::TooLarge {
            n,
            max: DECOMPOSITION_MAX_DIM,
        });
    }
    if vs.is_empty() {
        return Err(FeasibilityError::TooFewMatrices);
    }
    for (index, v) in vs.iter().enumerate() {
        if v.len() != n {
            return Err(FeasibilityError::LengthMismatch {
                index,
                got: v.len(),
                expected: n,
            });
        }
    }
    for (vector, v) in std::iter::once(v0).chain(vs.iter().map(|v| v.as_slice())).enumerate() {
        for (index, &value) in v.iter().enumerate() {
            if value < 0.0 {
                return Err(FeasibilityError::NegativeEntry {
                    vector,
                    index,
                    value,
                });
            }
        }
    }

    let big_n = vs.len();
    let mut used = vec![0u16; big_n]; // bitmask of consumed indices per vector
    let mut perms = vec![vec![0usize; n]; big_n];
    let mut row = vec![0.0f64; big_n + 1];

    fn assign(
        row_idx: usize,
        j: usize,
        n: usize,
        vs: &[Vec<f64>],
        v0: &[f64],
        used: &mut [u16],
        perms: &mut [Vec<usize>],
        row: &mut [f64],
    ) -> bool {
        if j == vs.len() {
            if !polygon_row_holds(row) {
                return false;
            }
            let next = row_idx + 1;
            if next == n {
                return true;
            }
            row[0] = v0[next];
            return assign(next, 0, n, vs, v0, used, perms, row);
        }
        for cand in 0..n {
            if used[j] & (1 << cand) != 0 {
                continue;
            }
            used[j] |= 1 << cand;
            perms[j][row_idx] = cand;
            row[j + 1] = vs[j][cand];
            if assign(row_idx, j + 1, n, vs, v0, used, perms, row) {
                return true;
            }
            used[j] &= !(1 << cand);
        }
        false
    }

    row[0] = v0[0];
    let found = assign(0, 0, n, vs, v0, &mut used, &mut perms, &mut row);
    Ok(FeasibilityReport {
        condition: "diagonal-decomposition",
        holds: found,
        witness: found.then_some(FeasibilityWitness::Permutations(perms)),
    })
}

/// Necessary condition for the target to lie in a sum of equivalence orbits:
/// `2 ||A_i||_k <= sum_j ||A_j||_k` for every matrix i and every Ky Fan
/// order k. `matrices[0]` is the target; the witness is the first violating
/// pair in (i, k) order.
pub fn kyfan_necessary(matrices: &[CMatrix]) -> Result<FeasibilityReport, FeasibilityError> {
    if matrices.len() < 2 {
        return Err(FeasibilityError::TooFewMatrices);
    }
    let shape = matrices[0].shape();
    for m in &matrices[1..] {
        m.same_shape(&matrices[0]).map_err(MatError::from)?;
    }
    let p = shape.0.min(shape.1);
    // prefix sums of sorted singular values: prefix[i][k] = ||A_i||_k
    let mut prefix: Vec<Vec<f64>> = Vec::with_capacity(matrices.len());
    for m in matrices {
        let s = singular_values(m)?;
        let mut acc = Vec::with_capacity(p + 1);
        acc.push(0.0);
        for k in 0..p {
            acc.push(acc[k] + s[k]);
        }
        prefix.push(acc);
    }
    for (i, pre) in prefix.iter().enumerate() {
        for k in 1..=p {
            let total: f64 = prefix.iter().map(|q| q[k]).sum();
            if 2.0 * pre[k] > total + KYFAN_RTOL * total.max(1.0) {
                return Ok(FeasibilityReport {
                    condition: "ky-fan",
                    holds: false,
                    witness: Some(FeasibilityWitness::ViolatingNorm { matrix: i, k }),
                });
            }
        }
    }
    Ok(FeasibilityReport {
        condition: "ky-fan",
        holds: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polygon_reference_cases() {
        assert!(polygon_check(&[3.0, 4.0, 5.0]).unwrap().holds);

        let r = polygon_check(&[10.0, 1.0, 2.0]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(FeasibilityWitness::ViolatingIndex(0)));

        // degenerate 2-gon holds with equality
        assert!(polygon_check(&[1.0, 1.0]).unwrap().holds);

        assert!(matches!(
            polygon_check(&[1.0, 0.0]),
            Err(FeasibilityError::NonPositiveLength { .. })
        ));
        assert!(matches!(polygon_check(&[]), Err(FeasibilityError::Empty)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn polygon_is_permutation_and_scale_invariant(
            mut lengths in proptest::collection::vec(0.01f64..100.0, 2..6),
            scale in 0.01f64..50.0,
            rot in 0usize..6,
        ) {
            let base = polygon_check(&lengths).unwrap().holds;
            let scaled: Vec<f64> = lengths.iter().map(|x| x * scale).collect();
            prop_assert_eq!(polygon_check(&scaled).unwrap().holds, base);
            lengths.rotate_left(rot % lengths.len());
            prop_assert_eq!(polygon_check(&lengths).unwrap().holds, base);
        }
    }

    #[test]
    fn decomposition_identity_case() {
        let r = diagonal_decomposition_search(&[1.0, 2.0, 3.0], &[vec![1.0, 2.0, 3.0]])
            .unwrap();
        assert!(r.holds);
        assert_eq!(
            r.witness,
            Some(FeasibilityWitness::Permutations(vec![vec![0, 1, 2]]))
        );
    }

    #[test]
    fn decomposition_scalar_infeasible() {
        let r = diagonal_decomposition_search(&[10.0], &[vec![1.0], vec![2.0]]).unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_none());
    }

    #[test]
    fn decomposition_needs_permutation() {
        // rows must be re-matched: (5,1) vs (1,5) works only after permuting
        let r = diagonal_decomposition_search(&[6.0, 2.0], &[vec![5.0, 1.0], vec![1.0, 5.0]])
            .unwrap();
        assert!(r.holds);
    }

    #[test]
    fn decomposition_zero_rows_hold() {
        // padding zeros: a zero side contributes niente, all-zero rows pass
        let r = diagonal_decomposition_search(
            &[3.0, 0.0],
            &[vec![2.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert!(r.holds);
    }

    #[test]
    fn decomposition_input_validation() {
        assert!(matches!(
            diagonal_decomposition_search(&[1.0; 9], &[vec![1.0; 9]]),
            Err(FeasibilityError::TooLarge { .. })
        ));
        assert!(matches!(
            diagonal_decomposition_search(&[1.0], &[vec![1.0, 2.0]]),
            Err(FeasibilityError::LengthMismatch { .. })
        ));
        assert!(matches!(
            diagonal_decomposition_search(&[1.0], &[vec![-1.0]]),
            Err(FeasibilityError::NegativeEntry { .. })
        ));
        assert!(matches!(
            diagonal_decomposition_search(&[1.0], &[]),
            Err(FeasibilityError::TooFewMatrices)
        ));
    }

    #[test]
    fn kyfan_reference_triple_holds() {
        let a0 = CMatrix::diag_real(&[14.0, 2.0]);
        let a1 = CMatrix::diag_real(&[8.0, 0.0]);
        let a2 = CMatrix::diag_real(&[7.0, 4.0]);
        let r = kyfan_necessary(&[a0, a1, a2]).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn kyfan_detects_trace_norm_gap() {
        // diag(N^2, N+1) + zero padding vs N copies of diag(N, 1), N = 2
        let a0 = CMatrix::diag_real(&[4.0, 3.0, 0.0]);
        let aj = CMatrix::diag_real(&[2.0, 1.0, 0.0]);
        let r = kyfan_necessary(&[a0, aj.clone(), aj]).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(FeasibilityWitness::ViolatingNorm { matrix: 0, k: 3 })
        );
    }

    #[test]
    fn kyfan_equal_matrices_hold() {
        let a = CMatrix::diag_real(&[3.0, 1.0]);
        let r = kyfan_necessary(&[a.clone(), a.clone(), a]).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn kyfan_shape_mismatch() {
        let a = CMatrix::zeros(2, 2);
        let b = CMatrix::zeros(2, 3);
        assert!(kyfan_necessary(&[a, b]).is_err());
    }
}
