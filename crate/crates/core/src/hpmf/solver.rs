use std::time::Instant;

use super::updates::{
    consensus_fold, objective, relative_change, update_aux, update_duals_from, update_u, update_v,
};
use super::{init_state, HpmfConfig, HpmfError, ModeState, ObservationProblem};
use crate::scalar::Scalar;
use crate::tensor::{unfold_mode, DenseTensor, Matrix};

/// One step of a mode sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    U,
    V,
    G,
    H,
    R,
    M,
    Duals,
}

/// Observation hooks into a solver run.
///
/// Step callbacks are only issued when [`Probe::observe_steps`] returns true,
/// since they require a copy of the mode state before each step; a probe that
/// observes steps forces the sequential mode sweep.
pub trait Probe<T> {
    fn observe_steps(&self) -> bool {
        false
    }

    /// Called after each step of a mode sweep with the state before and after.
    /// `x_unf` is the unfolding the sweep is fitting.
    fn step(
        &mut self,
        _iteration: usize,
        _step: Step,
        _before: &ModeState<T>,
        _after: &ModeState<T>,
        _x_unf: &Matrix<T>,
    ) {
    }

    /// Called with each new consensus tensor (`iteration` counts from 1).
    fn iterate(&mut self, _iteration: usize, _x: &DenseTensor<T>, _states: &[ModeState<T>]) {}
}

/// A probe that observes nothing.
pub struct NoProbe;

impl<T> Probe<T> for NoProbe {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub relative_change: f64,
    pub objective: f64,
    /// Seconds since the solver started, or 0 when timing is disabled.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionReport<T> {
    pub recovered: DenseTensor<T>,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
    pub ranks: Vec<usize>,
}

/// Runs the solver to convergence or `cfg.max_iters` iterations.
pub fn run_hpmf<T: Scalar>(
    problem: &ObservationProblem<T>,
    cfg: &HpmfConfig,
) -> Result<CompletionReport<T>, HpmfError> {
    run_hpmf_with_probe(problem, cfg, &mut NoProbe)
}

pub fn run_hpmf_with_probe<T: Scalar>(
    problem: &ObservationProblem<T>,
    cfg: &HpmfConfig,
    probe: &mut impl Probe<T>,
) -> Result<CompletionReport<T>, HpmfError> {
    let start = Instant::now();
    let (mut x, mut states) = init_state(problem, cfg)?;
    let ranks = states.iter().map(|s| s.rank).collect();
    let mu = T::lit(cfg.mu);
    let cap = T::lit(cfg.penalty_cap * cfg.penalty_factor());
    let mut trace = Vec::new();
    let mut converged = false;

    for k in 1..=cfg.max_iters {
        let unfoldings = (1..=states.len())
            .map(|n| unfold_mode(&x, n))
            .collect::<Result<Vec<_>, _>>()?;

        let products = if cfg.parallel && !probe.observe_steps() {
            sweep_parallel(&mut states, &unfoldings, k)?
        } else {
            let mut out = Vec::with_capacity(states.len());
            for (state, unf) in states.iter_mut().zip(&unfoldings) {
                out.push(sweep_mode(state, unf, k, probe).map_err(|e| abort(e, k, state.mode))?);
            }
            out
        };

        let next = consensus_fold(&products, &cfg.alpha, problem)?;
        if !next.is_finite() {
            return Err(HpmfError::NumericalAbort {
                iteration: k,
                mode: 0,
                detail: "consensus tensor is not finite".into(),
            });
        }
        probe.iterate(k, &next, &states);
        let change = relative_change(&next, &x)?;
        let obj = objective(&states, &next)?;
        for s in &mut states {
            s.penalties.continue_by(mu, cap);
        }
        x = next;
        trace.push(IterationRecord {
            iteration: k,
            relative_change: change.as_f64(),
            objective: obj.as_f64(),
            wall_seconds: if cfg.record_timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
        if change < T::lit(cfg.tol) {
            converged = true;
            break;
        }
    }

    Ok(CompletionReport {
        recovered: x,
        iterations: trace.len(),
        trace,
        converged,
        ranks,
    })
}

fn abort(e: HpmfError, iteration: usize, mode: usize) -> HpmfError {
    if e.is_numerical() {
        HpmfError::NumericalAbort {
            iteration,
            mode,
            detail: e.to_string(),
        }
    } else {
        e
    }
}

fn sweep_parallel<T: Scalar>(
    states: &mut [ModeState<T>],
    unfoldings: &[Matrix<T>],
    iteration: usize,
) -> Result<Vec<Matrix<T>>, HpmfError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = states
            .iter_mut()
            .zip(unfoldings)
            .map(|(state, unf)| {
                scope.spawn(move || {
                    let mode = state.mode;
                    sweep_mode(state, unf, iteration, &mut NoProbe)
                        .map_err(|e| abort(e, iteration, mode))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mode sweep panicked"))
            .collect()
    })
}

/// One full pass over a mode: U, V, the four splits, the product `U V`, and
/// the duals. Returns `U V`.
fn sweep_mode<T: Scalar>(
    state: &mut ModeState<T>,
    x_unf: &Matrix<T>,
    iteration: usize,
    probe: &mut impl Probe<T>,
) -> Result<Matrix<T>, HpmfError> {
    let alpha = state.weights.alpha;
    let watch = probe.observe_steps();
    let snapshot = |state: &ModeState<T>| watch.then(|| state.clone());

    let before = snapshot(state);
    state.u = update_u(state, x_unf, alpha)?;
    report(probe, iteration, Step::U, before, state, x_unf);

    let before = snapshot(state);
    state.v = update_v(state, x_unf, alpha)?;
    report(probe, iteration, Step::V, before, state, x_unf);

    let p = state.penalties;
    let w = state.weights;

    let before = snapshot(state);
    let lu = state.ops.tv_u_apply(&state.u);
    state.g = update_aux(&lu, &state.lam, p.beta_u, w.lambda_u)?;
    report(probe, iteration, Step::G, before, state, x_unf);

    let before = snapshot(state);
    let cv = state.ops.tv_v_apply(&state.v);
    state.h = update_aux(&cv, &state.pi, p.beta_v, w.lambda_v)?;
    report(probe, iteration, Step::H, before, state, x_unf);

    let before = snapshot(state);
    let bu = state.ops.dct_u.matmul(&state.u);
    state.r = update_aux(&bu, &state.phi, p.omega_u, w.rho_u)?;
    report(probe, iteration, Step::R, before, state, x_unf);

    let before = snapshot(state);
    let dv = state.ops.dct_v.matmul(&state.v);
    state.m = update_aux(&dv, &state.gam, p.omega_v, w.rho_v)?;
    report(probe, iteration, Step::M, before, state, x_unf);

    let product = state.product();

    // U and V are fixed since the split steps, so their products carry over
    let before = snapshot(state);
    update_duals_from(state, [lu, cv, bu, dv]);
    report(probe, iteration, Step::Duals, before, state, x_unf);

    if !state.is_finite() || !product.is_finite() {
        return Err(HpmfError::NonFiniteUpdate("mode state"));
    }
    Ok(product)
}

fn report<T: Scalar>(
    probe: &mut impl Probe<T>,
    iteration: usize,
    step: Step,
    before: Option<ModeState<T>>,
    after: &ModeState<T>,
    x_unf: &Matrix<T>,
) {
    if let Some(before) = before {
        probe.step(iteration, step, &before, after, x_unf);
    }
}
