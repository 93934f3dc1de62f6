//! Coupled gradient flows on the unitary group for the three orbit actions,
//! with Armijo backtracking line search, stopping rules and a deterministic
//! multi-restart driver.
//!
//! For an orbit problem with target `A0` and operands `A1..AN`, the flows
//! minimize `||sum_j act(g_j, A_j) - A0||` where `act` is `U A U*`
//! (similarity), `U A V` (equivalence) or `U A U^t` (t-congruence). All group
//! elements are updated simultaneously each iteration by geodesic steps
//! `exp(t * Omega_j)` along the skew-Hermitian descent directions derived in
//! [`gradient`].

mod driver;
mod gradient;

pub use driver::{
    flow_step, multi_restart, run_flow, FlowState, MultiRestartResult, RestartStats, StepRecord,
};
pub use gradient::{
    gradient_congruence, gradient_equivalence, gradient_similarity, gradients, objective,
    objective_sq, residual, GradientSet,
};

use rand::Rng;
use thiserror::Error;

use crate::matcore::{haar_unitary, reunitarize, CMatrix, MatError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FlowError {
    #[error("orbit problem needs at least one operand")]
    EmptyOperands,
    #[error("operand {index} has shape {rows}x{cols}, expected {erows}x{ecols}")]
    OperandShape {
        index: usize,
        rows: usize,
        cols: usize,
        erows: usize,
        ecols: usize,
    },
    #[error("{kind:?} orbits need a square target, got {rows}x{cols}")]
    TargetNotSquare {
        kind: OrbitKind,
        rows: usize,
        cols: usize,
    },
    #[error("operation requires kind {expected:?}, problem has {got:?}")]
    KindMismatch { expected: OrbitKind, got: OrbitKind },
    #[error("orbit term index {index} out of range for {count} terms")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("group elements do not match the problem: {0}")]
    BadElements(String),
    #[error("invalid flow configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// The three unitary orbit actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    /// `{ U A U* : U unitary }`
    Similarity,
    /// `{ U A V : U, V unitary }`
    Equivalence,
    /// `{ U A U^t : U unitary }`, plain transpose
    Congruence,
}

impl OrbitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitKind::Similarity => "similarity",
            OrbitKind::Equivalence => "equivalence",
            OrbitKind::Congruence => "congruence",
        }
    }
}

/// An orbit approximation problem: minimize
/// `||sum_j act(g_j, A_j) - target||` over the group elements `g_j`.
///
/// Validated on construction: similarity and congruence need all matrices
/// square of one size; equivalence needs all matrices of one (possibly
/// rectangular) shape. At least one operand is required.
#[derive(Debug, Clone)]
pub struct OrbitProblem {
    kind: OrbitKind,
    target: CMatrix,
    operands: Vec<CMatrix>,
}

impl OrbitProblem {
    pub fn new(
        kind: OrbitKind,
        target: CMatrix,
        operands: Vec<CMatrix>,
    ) -> Result<Self, FlowError> {
        if operands.is_empty() {
            return Err(FlowError::EmptyOperands);
        }
        target.validate_finite()?;
        let square = !matches!(kind, OrbitKind::Equivalence);
        if square && !target.is_square() {
            return Err(FlowError::TargetNotSquare {
                kind,
                rows: target.rows(),
                cols: target.cols(),
            });
        }
        let (erows, ecols) = target.shape();
        for (index, op) in operands.iter().enumerate() {
            op.validate_finite()?;
            if op.shape() != (erows, ecols) {
                return Err(FlowError::OperandShape {
                    index,
                    rows: op.rows(),
                    cols: op.cols(),
                    erows,
                    ecols,
                });
            }
        }
        Ok(Self {
            kind,
            target,
            operands,
        })
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn target(&self) -> &CMatrix {
        &self.target
    }

    pub fn operands(&self) -> &[CMatrix] {
        &self.operands
    }

    /// Number of orbit terms N.
    pub fn orbit_count(&self) -> usize {
        self.operands.len()
    }

    /// (n, m) shape shared by target and operands.
    pub fn dims(&self) -> (usize, usize) {
        self.target.shape()
    }

    /// Indices of all-zero operands. A zero operand contributes nothing to
    /// the sum; callers may want to warn about it.
    pub fn zero_operands(&self) -> Vec<usize> {
        self.operands
            .iter()
            .enumerate()
            .filter(|(_, a)| a.frobenius_norm() == 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    fn expect_kind(&self, expected: OrbitKind) -> Result<(), FlowError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(FlowError::KindMismatch {
                expected,
                got: self.kind,
            })
        }
    }

    fn check_index(&self, index: usize) -> Result<(), FlowError> {
        if index < self.orbit_count() {
            Ok(())
        } else {
            Err(FlowError::IndexOutOfRange {
                index,
                count: self.orbit_count(),
            })
        }
    }
}

/// Unitarity drift beyond which a maintained group element is re-polarized.
pub const UNITARY_DRIFT_TOL: f64 = 1e-9;

/// The group elements of one flow state: one left unitary per orbit term,
/// plus one right unitary per term for equivalence orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElements {
    pub lefts: Vec<CMatrix>,
    pub rights: Option<Vec<CMatrix>>,
}

impl GroupElements {
    /// Identity elements for the given problem.
    pub fn identity(problem: &OrbitProblem) -> Self {
        let (n, m) = problem.dims();
        let count = problem.orbit_count();
        let lefts = vec![CMatrix::identity(n); count];
        let rights = matches!(problem.kind(), OrbitKind::Equivalence)
            .then(|| vec![CMatrix::identity(m); count]);
        Self { lefts, rights }
    }

    /// Independent Haar-random elements, drawn lefts first then rights.
    pub fn haar(problem: &OrbitProblem, rng: &mut impl Rng) -> Result<Self, MatError> {
        let (n, m) = problem.dims();
        let count = problem.orbit_count();
        let mut lefts = Vec::with_capacity(count);
        for _ in 0..count {
            lefts.push(haar_unitary(n, rng)?);
        }
        let rights = if matches!(problem.kind(), OrbitKind::Equivalence) {
            let mut rs = Vec::with_capacity(count);
            for _ in 0..count {
                rs.push(haar_unitary(m, rng)?);
            }
            Some(rs)
        } else {
            None
        };
        Ok(Self { lefts, rights })
    }

    pub fn validate_for(&self, problem: &OrbitProblem) -> Result<(), FlowError> {
        let (n, m) = problem.dims();
        let count = problem.orbit_count();
        let want_rights = matches!(problem.kind(), OrbitKind::Equivalence);
        if self.lefts.len() != count {
            return Err(FlowError::BadElements(format!(
                "{} left elements for {} orbit terms",
                self.lefts.len(),
                count
            )));
        }
        for u in &self.lefts {
            if u.shape() != (n, n) {
                return Err(FlowError::BadElements(format!(
                    "left element is {}x{}, expected {n}x{n}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        match (&self.rights, want_rights) {
            (None, false) => {}
            (Some(rs), true) => {
                if rs.len() != count {
                    return Err(FlowError::BadElements(format!(
                        "{} right elements for {} orbit terms",
                        rs.len(),
                        count
                    )));
                }
                for v in rs {
                    if v.shape() != (m, m) {
                        return Err(FlowError::BadElements(format!(
                            "right element is {}x{}, expected {m}x{m}",
                            v.rows(),
                            v.cols()
                        )));
                    }
                }
            }
            (None, true) => {
                return Err(FlowError::BadElements(
                    "equivalence orbits need right elements".into(),
                ))
            }
            (Some(_), false) => {
                return Err(FlowError::BadElements(
                    "right elements are only meaningful for equivalence orbits".into(),
                ))
            }
        }
        Ok(())
    }

    /// Worst `||U*U - I||` over all maintained elements.
    pub fn max_unitary_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for u in self.iter_all() {
            worst = worst.max(u.unitary_deviation());
        }
        worst
    }

    /// Re-polarize every element whose drift exceeds `tol` (or all of them
    /// when `force` is set). Returns the worst drift seen beforehand.
    pub fn reunitarize_drifted(&mut self, tol: f64, force: bool) -> Result<f64, MatError> {
        let mut worst = 0.0f64;
        let fix = |u: &mut CMatrix, worst: &mut f64| -> Result<(), MatError> {
            let dev = u.unitary_deviation();
            *worst = worst.max(dev);
            if force || dev > tol {
                *u = reunitarize(u)?;
            }
            Ok(())
        };
        for u in &mut self.lefts {
            fix(u, &mut worst)?;
        }
        if let Some(rs) = &mut self.rights {
            for v in rs {
                fix(v, &mut worst)?;
            }
        }
        Ok(worst)
    }

    fn iter_all(&self) -> impl Iterator<Item = &CMatrix> {
        self.lefts.iter().chain(self.rights.iter().flatten())
    }
}

/// Step-size policy, tolerances and budgets for one flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Iteration budget per restart.
    pub max_iters: usize,
    /// Stop when `sup_j ||Omega_j||` falls below this.
    pub grad_tol: f64,
    /// Stop when the relative decrease of the squared objective over a
    /// 10-iteration window falls below this.
    pub obj_tol: f64,
    /// Scale on the first step; the step actually tried at iteration 0 is
    /// `initial_step / (1 + sup_j ||Omega_j||)`.
    pub initial_step: f64,
    /// Backtracking shrink factor, in (0, 1).
    pub backtrack_factor: f64,
    /// Step growth applied after two consecutive first-try acceptances.
    pub growth_factor: f64,
    /// Restart budget for [`multi_restart`].
    pub restarts: usize,
    /// Base seed; restart r derives its generator from (seed, r).
    pub seed: u64,
    /// Re-polarize all elements every this many iterations.
    pub reunitarize_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: 1e-8,
            obj_tol: 1e-12,
            initial_step: 1.0,
            backtrack_factor: 0.5,
            growth_factor: 1.5,
            restarts: 20,
            seed: 0,
            reunitarize_every: 50,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |msg: &str| Err(FlowError::BadConfig(msg.into()));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.grad_tol > 0.0) || !(self.obj_tol > 0.0) {
            return bad("grad_tol and obj_tol must be positive");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial_step must be positive");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if !(self.growth_factor > 1.0) {
            return bad("growth_factor must exceed 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.reunitarize_every == 0 {
            return bad("reunitarize_every must be positive");
        }
        Ok(())
    }
}

/// Why a flow run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStatus {
    /// `sup_j ||Omega_j|| < grad_tol`.
    ConvergedGradient,
    /// Objective progress stalled: window decrease below `obj_tol`, or the
    /// line search underflowed at a critical point.
    ConvergedObjective,
    /// `max_iters` reached.
    BudgetExhausted,
}

impl FlowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowStatus::ConvergedGradient => "converged_gradient",
            FlowStatus::ConvergedObjective => "converged_objective",
            FlowStatus::BudgetExhausted => "budget_exhausted",
        }
    }
}

/// One recorded iteration: squared objective after the step, the sup gradient
/// norm before it, and the accepted step size (0 when no step was taken).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective_sq: f64,
    pub grad_sup_norm: f64,
    pub step: f64,
}

/// Outcome of one flow run.
#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Final (= best, by monotonicity) objective value — the norm, not its
    /// square.
    pub best_objective: f64,
    pub best_elements: GroupElements,
    pub trace: Vec<TracePoint>,
    pub status: FlowStatus,
    pub restart_index: usize,
    /// Worst `||U*U - I||` observed after any iteration.
    pub max_unitary_drift: f64,
}

impl FlowResult {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |t| t.iteration)
    }

    /// First iteration whose squared objective falls below `threshold`.
    pub fn iterations_to_threshold(&self, threshold: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|t| t.objective_sq < threshold)
            .map(|t| t.iteration)
    }
}
