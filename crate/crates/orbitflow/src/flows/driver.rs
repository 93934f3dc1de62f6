//! Flow iteration, stopping rules and the deterministic multi-restart driver.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::matcore::SkewExpFactor;

use super::gradient::{actions, gradients_from_actions, objective_sq};
use super::{
    FlowConfig, FlowError, FlowResult, FlowStatus, GroupElements, OrbitProblem, TracePoint,
    UNITARY_DRIFT_TOL,
};

/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Below this trial step the line search reports a critical point.
const STEP_UNDERFLOW: f64 = 1e-16;
/// Consecutive first-try acceptances before the base step grows.
const GROWTH_STREAK: u32 = 2;
/// Width of the relative-decrease stopping window, in iterations.
const OBJ_WINDOW: usize = 10;

/// Mutable state of one flow run.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub elements: GroupElements,
    pub objective_sq: f64,
    base_step: Option<f64>,
    first_try_streak: u32,
    iteration: usize,
    max_drift: f64,
}

impl FlowState {
    pub fn new(problem: &OrbitProblem, elements: GroupElements) -> Result<Self, FlowError> {
        elements.validate_for(problem)?;
        let objective_sq = objective_sq(problem, &elements)?;
        Ok(Self {
            elements,
            objective_sq,
            base_step: None,
            first_try_streak: 0,
            iteration: 0,
            max_drift: 0.0,
        })
    }

    pub fn max_unitary_drift(&self) -> f64 {
        self.max_drift
    }
}

/// What one call to [`flow_step`] did.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    /// Accepted step size; 0 when the state was already critical.
    pub accepted_step: f64,
    /// Squared objective after the step.
    pub objective_sq: f64,
    /// `sup_j ||Omega_j||` at the pre-step state.
    pub grad_sup_norm: f64,
    /// Set when backtracking underflowed without finding a decrease.
    pub critical_point: bool,
}

fn apply_step(
    elements: &GroupElements,
    left_factors: &[SkewExpFactor],
    right_factors: Option<&[SkewExpFactor]>,
    t: f64,
) -> GroupElements {
    let lefts = elements
        .lefts
        .iter()
        .zip(left_factors)
        .map(|(u, f)| &f.exp_scaled(t) * u)
        .collect();
    let rights = elements.rights.as_ref().map(|vs| {
        vs.iter()
            .zip(right_factors.expect("equivalence factors"))
            .map(|(v, f)| &f.exp_scaled(t) * v)
            .collect()
    });
    GroupElements { lefts, rights }
}

/// One simultaneous geodesic update of all group elements, with backtracking
/// so the squared objective strictly decreases (or a critical point is
/// reported and the state left untouched).
pub fn flow_step(
    problem: &OrbitProblem,
    config: &FlowConfig,
    state: &mut FlowState,
) -> Result<StepRecord, FlowError> {
    let acts = actions(problem, &state.elements);
    let grads = gradients_from_actions(problem, &state.elements, &acts)?;
    let grad_sup_norm = grads.sup_norm();
    let decrease_rate = -2.0 * grads.sq_norm_sum();

    if decrease_rate == 0.0 {
        // exact critical point: nothing to do
        state.iteration += 1;
        return Ok(StepRecord {
            accepted_step: 0.0,
            objective_sq: state.objective_sq,
            grad_sup_norm,
            critical_point: true,
        });
    }

    let left_factors: Vec<SkewExpFactor> = grads
        .lefts
        .iter()
        .map(SkewExpFactor::new)
        .collect::<Result<_, _>>()?;
    let right_factors: Option<Vec<SkewExpFactor>> = grads
        .rights
        .as_ref()
        .map(|rs| rs.iter().map(SkewExpFactor::new).collect::<Result<_, _>>())
        .transpose()?;

    let base = state
        .base_step
        .unwrap_or(config.initial_step / (1.0 + grad_sup_norm));

    let mut t = base;
    let mut trial = 0u32;
    loop {
        let candidate = apply_step(
            &state.elements,
            &left_factors,
            right_factors.as_deref(),
            t,
        );
        let cand_sq = objective_sq(problem, &candidate)?;
        if cand_sq <= state.objective_sq + ARMIJO_C1 * t * decrease_rate {
            if trial == 0 {
                state.first_try_streak += 1;
            } else {
                state.first_try_streak = 0;
            }
            let mut next_base = t;
            if state.first_try_streak >= GROWTH_STREAK {
                next_base = t * config.growth_factor;
                state.first_try_streak = 0;
            }
            state.base_step = Some(next_base);
            state.elements = candidate;
            state.iteration += 1;
            let drift = state
                .elements
                .reunitarize_drifted(
                    UNITARY_DRIFT_TOL,
                    state.iteration % config.reunitarize_every == 0,
                )?;
            state.max_drift = state.max_drift.max(drift);
            state.objective_sq = cand_sq;
            return Ok(StepRecord {
                accepted_step: t,
                objective_sq: cand_sq,
                grad_sup_norm,
                critical_point: false,
            });
        }
        t *= config.backtrack_factor;
        trial += 1;
        if t < STEP_UNDERFLOW {
            // no decrease found: critical point, reported but not fatal
            state.iteration += 1;
            return Ok(StepRecord {
                accepted_step: 0.0,
                objective_sq: state.objective_sq,
                grad_sup_norm,
                critical_point: true,
            });
        }
    }
}

/// Run the coupled flow from `initial` until a stopping rule fires.
///
/// The trace records iteration 0 (the initial state) and one point per
/// iteration; its squared-objective column is non-increasing, strictly
/// decreasing on accepted steps.
pub fn run_flow(
    problem: &OrbitProblem,
    config: &FlowConfig,
    initial: GroupElements,
) -> Result<FlowResult, FlowError> {
    config.validate()?;
    let mut state = FlowState::new(problem, initial)?;
    let initial_grads = super::gradients(problem, &state.elements)?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        objective_sq: state.objective_sq,
        grad_sup_norm: initial_grads.sup_norm(),
        step: 0.0,
    }];

    let mut status = FlowStatus::BudgetExhausted;
    for k in 1..=config.max_iters {
        if trace[k - 1].grad_sup_norm < config.grad_tol {
            status = FlowStatus::ConvergedGradient;
            break;
        }
        let rec = flow_step(problem, config, &mut state)?;
        trace.push(TracePoint {
            iteration: k,
            objective_sq: rec.objective_sq,
            grad_sup_norm: rec.grad_sup_norm,
            step: rec.accepted_step,
        });
        if rec.critical_point {
            status = FlowStatus::ConvergedObjective;
            break;
        }
        if k >= OBJ_WINDOW {
            let before = trace[k - OBJ_WINDOW].objective_sq;
            let decrease = before - rec.objective_sq;
            if before <= f64::MIN_POSITIVE || decrease / before < config.obj_tol {
                status = FlowStatus::ConvergedObjective;
                break;
            }
        }
    }
    // Re-check the gradient rule when the loop ran to the end.
    if status == FlowStatus::BudgetExhausted
        && trace.last().map_or(false, |t| t.grad_sup_norm < config.grad_tol)
    {
        status = FlowStatus::ConvergedGradient;
    }

    Ok(FlowResult {
        best_objective: state.objective_sq.sqrt(),
        best_elements: state.elements,
        trace,
        status,
        restart_index: 0,
        max_unitary_drift: state.max_drift,
    })
}

/// Mean and root-mean-square deviation of the per-restart final squared
/// objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartStats {
    pub finals_sq: Vec<f64>,
    pub mean_sq: f64,
    pub rmsd_sq: f64,
}

impl RestartStats {
    fn from_finals(finals_sq: Vec<f64>) -> Self {
        let n = finals_sq.len() as f64;
        let mean_sq = finals_sq.iter().sum::<f64>() / n;
        let rmsd_sq =
            (finals_sq.iter().map(|x| (x - mean_sq).powi(2)).sum::<f64>() / n).sqrt();
        Self {
            finals_sq,
            mean_sq,
            rmsd_sq,
        }
    }
}

/// All restarts of a multi-restart search, in restart order.
#[derive(Debug, Clone)]
pub struct MultiRestartResult {
    pub results: Vec<FlowResult>,
    pub best_index: usize,
    pub stats: RestartStats,
}

impl MultiRestartResult {
    pub fn best(&self) -> &FlowResult {
        &self.results[self.best_index]
    }
}

/// RNG for restart `r` of a search seeded with `seed`: same key, stream `r`,
/// so restarts are independent and the whole search is reproducible and
/// parallelizable.
pub(crate) fn restart_rng(seed: u64, r: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// Run `config.restarts` independent flows from Haar-random starting points
/// and keep them all; the best is the lowest final objective, ties broken by
/// the lowest restart index. Deterministic for a fixed seed regardless of
/// thread count.
pub fn multi_restart(
    problem: &OrbitProblem,
    config: &FlowConfig,
) -> Result<MultiRestartResult, FlowError> {
    config.validate()?;
    let results: Vec<FlowResult> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(config.seed, r as u64);
            let initial = GroupElements::haar(problem, &mut rng)?;
            let mut res = run_flow(problem, config, initial)?;
            res.restart_index = r;
            Ok(res)
        })
        .collect::<Result<_, FlowError>>()?;

    let best_index = results
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            a.best_objective
                .partial_cmp(&b.best_objective)
                .unwrap()
                .then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .expect("restarts >= 1");
    let stats =
        RestartStats::from_finals(results.iter().map(|r| r.best_objective.powi(2)).collect());
    Ok(MultiRestartResult {
        results,
        best_index,
        stats,
    })
}
