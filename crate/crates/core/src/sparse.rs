//! Sparse coefficient recovery for the linear model t = T*omega.
//!
//! The equality-constrained l1 problem is solved through its penalized
//! relaxation min 0.5*||T*omega - t||^2 + lambda*||omega||_1 with an
//! accelerated proximal-gradient scheme (backtracking step size, momentum
//! restart whenever the objective would rise, so the objective is
//! non-increasing). A brute-force l0 search over small supports provides an
//! independent oracle for small instances.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default relative-change stopping tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Residual norm below which a support is considered an exact fit in
/// [`brute_force_l0`].
pub const EXACT_FIT_RESIDUAL: f64 = 1e-8;

/// One l1 recovery instance: dictionary T (p x m), probe t (p), penalty
/// weight, and stopping parameters.
#[derive(Debug, Clone)]
pub struct BpProblem<'a> {
    pub dictionary: &'a DMatrix<f64>,
    pub probe: &'a DVector<f64>,
    /// Absolute l1 penalty weight; callers typically derive it from
    /// ||T^T t||_inf (see the classifier's solver parameters).
    pub lambda: f64,
    /// Relative change in omega below which the solve stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> BpProblem<'a> {
    pub fn new(dictionary: &'a DMatrix<f64>, probe: &'a DVector<f64>, lambda: f64) -> Self {
        BpProblem {
            dictionary,
            probe,
            lambda,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_stopping(mut self, tol: f64, max_iter: usize) -> Self {
        self.tol = tol;
        self.max_iter = max_iter;
        self
    }

    fn validate(&self) -> Result<(), SolverError> {
        let (p, m) = (self.dictionary.nrows(), self.dictionary.ncols());
        if p == 0 || m == 0 {
            return Err(SolverError::EmptyDictionary);
        }
        if self.probe.len() != p {
            return Err(SolverError::DimensionMismatch {
                rows: p,
                probe_len: self.probe.len(),
            });
        }
        if self.dictionary.iter().any(|v| !v.is_finite())
            || self.probe.iter().any(|v| !v.is_finite())
        {
            return Err(SolverError::NonFinite);
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(SolverError::InvalidParameter("lambda must be >= 0"));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(SolverError::InvalidParameter("tol must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidParameter("max_iter must be >= 1"));
        }
        Ok(())
    }
}

/// Recovered coefficients plus solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSolution {
    pub omega: DVector<f64>,
    pub iterations: usize,
    /// ||T*omega - t||_2, recomputed from the returned omega.
    pub residual_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("dictionary has no rows or no columns")]
    EmptyDictionary,
    #[error("probe length {probe_len} does not match dictionary rows {rows}")]
    DimensionMismatch { rows: usize, probe_len: usize },
    #[error("non-finite entry in dictionary or probe")]
    NonFinite,
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("l0 search guard: m={m} columns, max_k={max_k} (limits: m <= 20, 1 <= max_k <= 4)")]
    OracleGuard { m: usize, max_k: usize },
}

/// Solves the penalized relaxation of basis pursuit.
///
/// Hitting `max_iter` without meeting `tol` is not an error; the result is
/// returned with `converged = false`.
pub fn solve_bp(problem: &BpProblem) -> Result<SparseSolution, SolverError> {
    solve_with_trace(problem, None)
}

/// Elementwise soft threshold: sign(v) * max(|v| - tau, 0).
pub fn soft_threshold(v: &DVector<f64>, tau: f64) -> DVector<f64> {
    v.map(|x| {
        let shrunk = x.abs() - tau;
        if shrunk > 0.0 {
            shrunk.copysign(x)
        } else {
            0.0
        }
    })
}

/// Penalized objective 0.5*||T*omega - t||^2 + lambda*||omega||_1.
fn objective(dictionary: &DMatrix<f64>, probe: &DVector<f64>, omega: &DVector<f64>, lambda: f64) -> f64 {
    0.5 * (dictionary * omega - probe).norm_squared() + lambda * omega.iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest eigenvalue of T^T T by power iteration (deterministic start).
fn gram_spectral_bound(dictionary: &DMatrix<f64>) -> f64 {
    let m = dictionary.ncols();
    let mut v = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..200 {
        let w = dictionary.tr_mul(&(dictionary * &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        v = w / norm;
        if (next - estimate).abs() <= 1e-12 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate
}

/// One proximal-gradient step from `point` with backtracking on the local
/// Lipschitz estimate. Returns the new iterate and its objective value;
/// `step_bound` grows until the quadratic upper bound holds, which makes a
/// step taken from the previous iterate a guaranteed descent step.
fn prox_step(
    dictionary: &DMatrix<f64>,
    probe: &DVector<f64>,
    lambda: f64,
    point: &DVector<f64>,
    step_bound: &mut f64,
) -> (DVector<f64>, f64) {
    let residual = dictionary * point - probe;
    let smooth_at_point = 0.5 * residual.norm_squared();
    let gradient = dictionary.tr_mul(&residual);
    for _ in 0..64 {
        let lipschitz = *step_bound;
        let candidate = soft_threshold(&(point - &gradient / lipschitz), lambda / lipschitz);
        let diff = &candidate - point;
        let smooth_at_candidate = 0.5 * (dictionary * &candidate - probe).norm_squared();
        let quadratic_bound = smooth_at_point
            + gradient.dot(&diff)
            + 0.5 * lipschitz * diff.norm_squared();
        if smooth_at_candidate <= quadratic_bound + 1e-12 * quadratic_bound.abs().max(1.0) {
            let value = smooth_at_candidate
                + lambda * candidate.iter().map(|v| v.abs()).sum::<f64>();
            return (candidate, value);
        }
        *step_bound *= 2.0;
    }
    // Unreachable for finite inputs; fall back to the (over-damped) last try.
    let lipschitz = *step_bound;
    let candidate = soft_threshold(&(point - &gradient / lipschitz), lambda / lipschitz);
    let value = objective(dictionary, probe, &candidate, lambda);
    (candidate, value)
}

fn solve_with_trace(
    problem: &BpProblem,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<SparseSolution, SolverError> {
    problem.validate()?;
    let dictionary = problem.dictionary;
    let probe = problem.probe;
    let lambda = problem.lambda;
    let m = dictionary.ncols();

    let spectral = gram_spectral_bound(dictionary);
    if spectral == 0.0 {
        // All-zero dictionary: the gradient vanishes at omega = 0, which is
        // therefore optimal.
        return Ok(SparseSolution {
            omega: DVector::zeros(m),
            iterations: 0,
            residual_norm: probe.norm(),
            converged: true,
        });
    }
    let mut step_bound = spectral * 1.01;

    let mut current = DVector::zeros(m);
    let mut current_value = objective(dictionary, probe, &current, lambda);
    let mut extrapolated = current.clone();
    let mut momentum = 1.0_f64;
    let mut iterations = 0;
    let mut converged = false;
    if let Some(trace) = trace.as_deref_mut() {
        trace.push(current_value);
    }

    for iter in 1..=problem.max_iter {
        iterations = iter;
        let (mut next, mut next_value) =
            prox_step(dictionary, probe, lambda, &extrapolated, &mut step_bound);
        if next_value > current_value {
            // Momentum overshot: restart from the last accepted iterate,
            // where the backtracked step cannot increase the objective.
            (next, next_value) = prox_step(dictionary, probe, lambda, &current, &mut step_bound);
            momentum = 1.0;
        }
        let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / momentum_next;
        extrapolated = &next + (&next - &current) * beta;

        let change = (&next - &current).norm();
        let scale = next.norm().max(1e-12);
        current = next;
        current_value = next_value;
        momentum = momentum_next;
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(current_value);
        }
        if change <= problem.tol * scale {
            converged = true;
            break;
        }
    }

    let residual_norm = (dictionary * &current - probe).norm();
    Ok(SparseSolution {
        omega: current,
        iterations,
        residual_norm,
        converged,
    })
}

/// Exhaustive minimum-cardinality search: enumerates all supports of size
/// 1..=max_k, least-squares-fits each, and returns the smallest support
/// whose residual is below [`EXACT_FIT_RESIDUAL`] (ties broken by smaller
/// residual, then lexicographic support). If no support fits, the best
/// found is returned with `converged = false`.
///
/// Guarded to m <= 20 columns and max_k <= 4.
pub fn brute_force_l0(
    dictionary: &DMatrix<f64>,
    probe: &DVector<f64>,
    max_k: usize,
) -> Result<SparseSolution, SolverError> {
    let (p, m) = (dictionary.nrows(), dictionary.ncols());
    if p == 0 || m == 0 {
        return Err(SolverError::EmptyDictionary);
    }
    if probe.len() != p {
        return Err(SolverError::DimensionMismatch {
            rows: p,
            probe_len: probe.len(),
        });
    }
    if m > 20 || max_k == 0 || max_k > 4 {
        return Err(SolverError::OracleGuard { m, max_k });
    }
    if dictionary.iter().any(|v| !v.is_finite()) || probe.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite);
    }

    let mut evaluated = 0usize;
    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;

    for k in 1..=max_k.min(m) {
        let mut level_best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
        for_each_combination(m, k, &mut |support| {
            evaluated += 1;
            let sub = dictionary.select_columns(support.iter());
            let coefficients = sub
                .clone()
                .svd(true, true)
                .solve(probe, 1e-12)
                .expect("SVD computed with U and V");
            let residual = (sub * &coefficients - probe).norm();
            if level_best
                .as_ref()
                .is_none_or(|(best_res, _, _)| residual < *best_res)
            {
                level_best = Some((residual, support.to_vec(), coefficients.clone()));
            }
            if best
                .as_ref()
                .is_none_or(|(best_res, _, _)| residual < *best_res)
            {
                best = Some((residual, support.to_vec(), coefficients));
            }
        });
        if let Some((residual, support, coefficients)) = &level_best {
            if *residual < EXACT_FIT_RESIDUAL {
                return Ok(assemble_solution(
                    m,
                    support,
                    coefficients,
                    *residual,
                    evaluated,
                    true,
                ));
            }
        }
    }

    let (residual, support, coefficients) = best.expect("at least one support evaluated");
    Ok(assemble_solution(
        m,
        &support,
        &coefficients,
        residual,
        evaluated,
        false,
    ))
}

fn assemble_solution(
    m: usize,
    support: &[usize],
    coefficients: &DVector<f64>,
    residual_norm: f64,
    iterations: usize,
    converged: bool,
) -> SparseSolution {
    let mut omega = DVector::zeros(m);
    for (slot, &column) in support.iter().enumerate() {
        omega[column] = coefficients[slot];
    }
    SparseSolution {
        omega,
        iterations,
        residual_norm,
        converged,
    }
}

/// Calls `f` for every size-k subset of 0..m in lexicographic order.
fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    debug_assert!(k >= 1 && k <= m);
    let mut indices: Vec<usize> = (0..k).collect();
    loop {
        f(&indices);
        let mut slot = k;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            if indices[slot] != slot + m - k {
                break;
            }
            if slot == 0 {
                return;
            }
        }
        indices[slot] += 1;
        for later in slot + 1..k {
            indices[later] = indices[later - 1] + 1;
        }
    }
}
