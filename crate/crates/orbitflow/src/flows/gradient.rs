//! Objective, residuals and the skew-Hermitian descent directions for the
//! three orbit actions.
//!
//! With `act_j` the j-th orbit term and `R_j = A0 - sum_{v != j} act_v` the
//! j-th residual, the squared objective decreases along `exp(t*Omega) g_j`
//! at rate `-2 <Omega_j, Omega>` for
//!
//! - similarity:  `Omega_j = -[act_j, R_j*]_s`
//! - equivalence: `Omega_Uj = -(U_j A_j V_j R_j*)_s`,
//!                `Omega_Vj = -(V_j R_j* U_j A_j)_s`
//! - congruence:  `Omega_j = -(act_j R_j* + (R_j* act_j)^t)_s`
//!
//! where `(X)_s = (X - X*)/2`. The Hermitian `act act*` terms drop out of the
//! skew part, which is what makes these exact gradients of the squared
//! objective under the bi-invariant metric.

use crate::matcore::CMatrix;

use super::{FlowError, GroupElements, OrbitKind, OrbitProblem};

/// One orbit term under the current group elements.
pub(crate) fn action(problem: &OrbitProblem, g: &GroupElements, j: usize) -> CMatrix {
    let a = &problem.operands()[j];
    let u = &g.lefts[j];
    match problem.kind() {
        OrbitKind::Similarity => &(u * a) * &u.adjoint(),
        OrbitKind::Equivalence => {
            let v = &g.rights.as_ref().expect("validated elements")[j];
            &(u * a) * v
        }
        OrbitKind::Congruence => &(u * a) * &u.transpose(),
    }
}

pub(crate) fn actions(problem: &OrbitProblem, g: &GroupElements) -> Vec<CMatrix> {
    (0..problem.orbit_count())
        .map(|j| action(problem, g, j))
        .collect()
}

fn sum_minus_target(problem: &OrbitProblem, acts: &[CMatrix]) -> CMatrix {
    let mut sum = -problem.target();
    for a in acts {
        sum = &sum + a;
    }
    sum
}

/// `||sum_j act(g_j, A_j) - A0||` (Frobenius norm, not squared).
pub fn objective(problem: &OrbitProblem, g: &GroupElements) -> Result<f64, FlowError> {
    Ok(objective_sq(problem, g)?.sqrt())
}

/// Squared objective; the quantity the line search monitors.
pub fn objective_sq(problem: &OrbitProblem, g: &GroupElements) -> Result<f64, FlowError> {
    g.validate_for(problem)?;
    let acts = actions(problem, g);
    Ok(sum_minus_target(problem, &acts).frobenius_norm().powi(2))
}

/// `A0` minus every orbit term except the j-th, under the current elements.
pub fn residual(
    problem: &OrbitProblem,
    g: &GroupElements,
    j: usize,
) -> Result<CMatrix, FlowError> {
    g.validate_for(problem)?;
    problem.check_index(j)?;
    let acts = actions(problem, g);
    Ok(residual_from_actions(problem.target(), &acts, j))
}

pub(crate) fn residual_from_actions(target: &CMatrix, acts: &[CMatrix], j: usize) -> CMatrix {
    let mut r = target.clone();
    for (v, act) in acts.iter().enumerate() {
        if v != j {
            r = &r - act;
        }
    }
    r
}

fn similarity_direction(act: &CMatrix, residual: &CMatrix) -> CMatrix {
    // -[act, R*]_s
    let r_adj = residual.adjoint();
    let comm = &(act * &r_adj) - &(&r_adj * act);
    -&comm.skew_part().expect("square by construction")
}

fn equivalence_directions(
    u: &CMatrix,
    a: &CMatrix,
    v: &CMatrix,
    residual: &CMatrix,
) -> (CMatrix, CMatrix) {
    let r_adj = residual.adjoint();
    let ua = u * a;
    let uav = &ua * v;
    let omega_u = -&(&uav * &r_adj).skew_part().expect("square");
    let omega_v = -&(&(v * &r_adj) * &ua).skew_part().expect("square");
    (omega_u, omega_v)
}

fn congruence_direction(act: &CMatrix, residual: &CMatrix) -> CMatrix {
    let r_adj = residual.adjoint();
    let m = &(act * &r_adj) + &(&r_adj * act).transpose();
    -&m.skew_part().expect("square")
}

/// Descent direction for the j-th similarity term: apply `exp(t*Omega) U_j`
/// with small `t > 0` to decrease the objective.
pub fn gradient_similarity(
    problem: &OrbitProblem,
    g: &GroupElements,
    j: usize,
) -> Result<CMatrix, FlowError> {
    problem.expect_kind(OrbitKind::Similarity)?;
    g.validate_for(problem)?;
    problem.check_index(j)?;
    let acts = actions(problem, g);
    let r = residual_from_actions(problem.target(), &acts, j);
    Ok(similarity_direction(&acts[j], &r))
}

/// Descent directions `(Omega_U, Omega_V)` for the j-th equivalence term.
pub fn gradient_equivalence(
    problem: &OrbitProblem,
    g: &GroupElements,
    j: usize,
) -> Result<(CMatrix, CMatrix), FlowError> {
    problem.expect_kind(OrbitKind::Equivalence)?;
    g.validate_for(problem)?;
    problem.check_index(j)?;
    let acts = actions(problem, g);
    let r = residual_from_actions(problem.target(), &acts, j);
    let v = &g.rights.as_ref().expect("validated")[j];
    Ok(equivalence_directions(
        &g.lefts[j],
        &problem.operands()[j],
        v,
        &r,
    ))
}

/// Descent direction for the j-th t-congruence term.
pub fn gradient_congruence(
    problem: &OrbitProblem,
    g: &GroupElements,
    j: usize,
) -> Result<CMatrix, FlowError> {
    problem.expect_kind(OrbitKind::Congruence)?;
    g.validate_for(problem)?;
    problem.check_index(j)?;
    let acts = actions(problem, g);
    let r = residual_from_actions(problem.target(), &acts, j);
    Ok(congruence_direction(&acts[j], &r))
}

/// All descent directions of one state, mirroring the element layout.
#[derive(Debug, Clone)]
pub struct GradientSet {
    pub lefts: Vec<CMatrix>,
    pub rights: Option<Vec<CMatrix>>,
}

impl GradientSet {
    /// `sup_j ||Omega_j||` over every direction, the gradient stopping
    /// quantity.
    pub fn sup_norm(&self) -> f64 {
        self.iter_all()
            .map(|m| m.frobenius_norm())
            .fold(0.0, f64::max)
    }

    /// `sum_j ||Omega_j||^2`; the squared objective decreases at rate
    /// `-2 * sq_norm_sum()` along the simultaneous update.
    pub fn sq_norm_sum(&self) -> f64 {
        self.iter_all().map(|m| m.frobenius_norm().powi(2)).sum()
    }

    pub(crate) fn iter_all(&self) -> impl Iterator<Item = &CMatrix> {
        self.lefts.iter().chain(self.rights.iter().flatten())
    }
}

/// Descent directions for every orbit term at once, sharing one pass over
/// the orbit actions.
pub fn gradients(problem: &OrbitProblem, g: &GroupElements) -> Result<GradientSet, FlowError> {
    g.validate_for(problem)?;
    let acts = actions(problem, g);
    gradients_from_actions(problem, g, &acts)
}

pub(crate) fn gradients_from_actions(
    problem: &OrbitProblem,
    g: &GroupElements,
    acts: &[CMatrix],
) -> Result<GradientSet, FlowError> {
    let count = problem.orbit_count();
    let mut lefts = Vec::with_capacity(count);
    let mut rights = matches!(problem.kind(), OrbitKind::Equivalence)
        .then(|| Vec::with_capacity(count));
    for j in 0..count {
        let r = residual_from_actions(problem.target(), acts, j);
        match problem.kind() {
            OrbitKind::Similarity => lefts.push(similarity_direction(&acts[j], &r)),
            OrbitKind::Congruence => lefts.push(congruence_direction(&acts[j], &r)),
            OrbitKind::Equivalence => {
                let v = &g.rights.as_ref().expect("validated")[j];
                let (ou, ov) =
                    equivalence_directions(&g.lefts[j], &problem.operands()[j], v, &r);
                lefts.push(ou);
                rights.as_mut().expect("equivalence").push(ov);
            }
        }
    }
    Ok(GradientSet { lefts, rights })
}
