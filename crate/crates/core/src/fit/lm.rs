//! Damped Gauss-Newton (Levenberg-Marquardt) least squares with a
//! finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative step for the central-difference Jacobian, about `eps^(1/3)`.
const JACOBIAN_STEP: f64 = 6.0e-6;
const MAX_DAMPING: f64 = 1e16;
const MIN_DAMPING: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Bound on the scaled gradient, see [`FitResult::gradient_norm`].
    pub gradient_tol: f64,
    /// Relative parameter change below which iteration stops.
    pub step_tol: f64,
    pub initial_damping: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iterations: 200,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            initial_damping: 1e-3,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be positive"));
        }
        for (name, v) in [
            ("gradient_tol", self.gradient_tol),
            ("step_tol", self.step_tol),
            ("initial_damping", self.initial_damping),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Measured values with optional 1-sigma uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    values: Vec<f64>,
    sigmas: Option<Vec<f64>>,
}

impl Observations {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::build(values, None)
    }

    pub fn with_sigmas(values: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        Self::build(values, Some(sigmas))
    }

    fn build(values: Vec<f64>, sigmas: Option<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("no observations"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("observations must be finite"));
        }
        if let Some(s) = &sigmas {
            if s.len() != values.len() {
                return Err(Error::invalid(format!(
                    "{} sigmas for {} observations",
                    s.len(),
                    values.len()
                )));
            }
            if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::invalid("uncertainties must be positive"));
            }
        }
        Ok(Observations { values, sigmas })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigmas(&self) -> Option<&[f64]> {
        self.sigmas.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_weighted(&self) -> bool {
        self.sigmas.is_some()
    }

    fn weights(&self) -> Vec<f64> {
        match &self.sigmas {
            Some(s) => s.iter().map(|s| 1.0 / (s * s)).collect(),
            None => vec![1.0; self.values.len()],
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    ZeroResidual,
    StepSize,
    /// Damping grew without finding a lower objective.
    Stagnated,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub params: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// `sqrt(chi_square)`.
    pub residual_norm: f64,
    /// Weighted sum of squared residuals.
    pub chi_square: f64,
    pub dof: usize,
    /// `max_j |J_j^T W r| / (||J_j||_W ||y||_W)` at the solution: the cosine
    /// between each Jacobian column and the residual, scaled by the relative
    /// residual size. Invariant under rescaling of data and parameters.
    pub gradient_norm: f64,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    /// Whether per-point uncertainties weighted the fit. Unweighted fits
    /// scale the covariance by the reduced chi-square.
    pub weighted: bool,
    /// Objective value after each accepted step, starting with the initial
    /// guess.
    pub objective_history: Vec<f64>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<(f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.params[i], self.sigmas[i]))
    }

    pub fn reduced_chi_square(&self) -> f64 {
        self.chi_square / self.dof.max(1) as f64
    }

    pub(crate) fn with_names(mut self, names: &[&str]) -> Self {
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Maps the parameters through `transform` (element-wise pairs of map
    /// and derivative), propagating the covariance to first order.
    pub(crate) fn transformed(mut self, transform: &[ParamMap]) -> Self {
        let d: Vec<f64> = transform
            .iter()
            .zip(&self.params)
            .map(|((_, deriv), &p)| deriv(p))
            .collect();
        for (row, di) in self.covariance.iter_mut().zip(&d) {
            for (c, dk) in row.iter_mut().zip(&d) {
                *c *= di * dk;
            }
        }
        for (i, (map, _)) in transform.iter().enumerate() {
            self.params[i] = map(self.params[i]);
            self.sigmas[i] = self.covariance[i][i].max(0.0).sqrt();
        }
        self
    }
}

/// A parameter map and its derivative.
pub(crate) type ParamMap = (fn(f64) -> f64, fn(f64) -> f64);

fn evaluate<M>(model: &M, theta: &[f64], expected: usize) -> Result<Vec<f64>>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let pred = model(theta)?;
    if pred.len() != expected {
        return Err(Error::invalid(format!(
            "model returned {} values for {} observations",
            pred.len(),
            expected
        )));
    }
    if pred.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(pred)
}

fn step_size(theta_j: f64, scale_j: f64) -> f64 {
    let mag = theta_j.abs().max(1e-3 * scale_j.abs());
    if mag > 0.0 {
        JACOBIAN_STEP * mag
    } else {
        JACOBIAN_STEP
    }
}

/// Central-difference Jacobian of the model predictions, `n x p`.
pub(crate) fn jacobian<M>(model: &M, theta: &[f64], scale: &[f64], n: usize) -> Result<DMatrix<f64>>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p = theta.len();
    let mut jac = DMatrix::zeros(n, p);
    let mut probe = theta.to_vec();
    for j in 0..p {
        let h = step_size(theta[j], scale[j]);
        probe[j] = theta[j] + h;
        let up = evaluate(model, &probe, n)?;
        probe[j] = theta[j] - h;
        let down = evaluate(model, &probe, n)?;
        probe[j] = theta[j];
        let width = (theta[j] + h) - (theta[j] - h);
        for i in 0..n {
            jac[(i, j)] = (up[i] - down[i]) / width;
        }
    }
    Ok(jac)
}

/// Central-difference Jacobian used by the fitter, exposed for diagnostics.
pub fn finite_difference_jacobian<M>(model: M, theta: &[f64]) -> Result<Vec<Vec<f64>>>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = model(theta)?.len();
    let jac = jacobian(&model, theta, theta, n)?;
    Ok((0..n)
        .map(|i| (0..theta.len()).map(|j| jac[(i, j)]).collect())
        .collect())
}

fn chi_square(y: &[f64], pred: &[f64], w: &[f64]) -> f64 {
    y.iter()
        .zip(pred)
        .zip(w)
        .map(|((y, p), w)| w * (y - p) * (y - p))
        .sum()
}

struct Normal {
    a: DMatrix<f64>,
    g: DVector<f64>,
    gradient_norm: f64,
}

fn normal_equations(jac: &DMatrix<f64>, y: &[f64], pred: &[f64], w: &[f64]) -> Normal {
    let (n, p) = jac.shape();
    let mut a: DMatrix<f64> = DMatrix::zeros(p, p);
    let mut g: DVector<f64> = DVector::zeros(p);
    for i in 0..n {
        let r = y[i] - pred[i];
        for j in 0..p {
            let wj = w[i] * jac[(i, j)];
            g[j] += wj * r;
            for k in 0..=j {
                a[(j, k)] += wj * jac[(i, k)];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            a[(k, j)] = a[(j, k)];
        }
    }
    let y_norm = y.iter().zip(w).map(|(y, w)| w * y * y).sum::<f64>().sqrt();
    // all-zero data: fall back to the absolute gradient
    let y_norm = if y_norm > 0.0 { y_norm } else { 1.0 };
    let gradient_norm = (0..p)
        .map(|j| {
            let col = a[(j, j)].sqrt();
            if col == 0.0 {
                0.0
            } else {
                g[j].abs() / (col * y_norm)
            }
        })
        .fold(0.0, f64::max);
    Normal {
        a,
        g,
        gradient_norm,
    }
}

/// Solves `(A + damping diag(A)) step = g` in the variables scaled by
/// `sqrt(diag(A))`, which keeps Cholesky well conditioned when parameters
/// differ by many orders of magnitude.
fn damped_step(normal: &Normal, damping: f64) -> Option<DVector<f64>> {
    let scale = column_scale(&normal.a)?;
    let p = scale.len();
    let mut m = DMatrix::from_fn(p, p, |i, k| normal.a[(i, k)] * scale[i] * scale[k]);
    for j in 0..p {
        m[(j, j)] = 1.0 + damping;
    }
    let rhs = DVector::from_fn(p, |j, _| normal.g[j] * scale[j]);
    let x = m.cholesky()?.solve(&rhs);
    let step = DVector::from_fn(p, |j, _| x[j] * scale[j]);
    step.iter().all(|v| v.is_finite()).then_some(step)
}

fn column_scale(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    (0..a.nrows())
        .map(|j| {
            let d = a[(j, j)];
            (d > 0.0 && d.is_finite()).then(|| 1.0 / d.sqrt())
        })
        .collect()
}

/// `A^-1` through the same diagonal scaling as [`damped_step`].
fn scaled_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let scale = column_scale(a)?;
    let p = scale.len();
    let m = DMatrix::from_fn(p, p, |i, k| a[(i, k)] * scale[i] * scale[k]);
    let inv = m.cholesky()?.inverse();
    let out = DMatrix::from_fn(p, p, |i, k| inv[(i, k)] * scale[i] * scale[k]);
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Minimises `sum_i w_i (y_i - model(theta)_i)^2` from `theta0`.
///
/// `model` maps a parameter vector to one prediction per observation.
/// Returns a non-converged result (not an error) when the iteration budget
/// runs out; returns [`Error::SingularNormalEquations`] when the covariance
/// at the solution cannot be formed.
pub fn least_squares<M>(
    model: M,
    data: &Observations,
    theta0: &[f64],
    cfg: &FitConfig,
) -> Result<FitResult>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    if theta0.is_empty() {
        return Err(Error::invalid("no parameters to fit"));
    }
    if theta0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial parameters must be finite"));
    }
    let y = data.values();
    let n = y.len();
    let p = theta0.len();
    let w = data.weights();

    let mut theta = theta0.to_vec();
    let mut pred = evaluate(&model, &theta, n)?;
    let mut chi2 = chi_square(y, &pred, &w);
    let mut history = vec![chi2];
    let mut damping = cfg.initial_damping;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        if chi2 == 0.0 {
            termination = Termination::ZeroResidual;
            break;
        }
        iterations += 1;
        let jac = jacobian(&model, &theta, theta0, n)?;
        let normal = normal_equations(&jac, y, &pred, &w);
        if normal.gradient_norm <= cfg.gradient_tol {
            // one near-undamped step removes the residual bias left by the
            // damping of the last accepted step
            if let Some(step) = damped_step(&normal, MIN_DAMPING) {
                let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
                if let Ok(trial_pred) = evaluate(&model, &trial, n) {
                    let trial_chi2 = chi_square(y, &trial_pred, &w);
                    if trial_chi2 < chi2 {
                        theta = trial;
                        pred = trial_pred;
                        chi2 = trial_chi2;
                        history.push(chi2);
                    }
                }
            }
            termination = Termination::Gradient;
            break;
        }

        let mut accepted = false;
        let mut small_step = false;
        while damping <= MAX_DAMPING {
            let Some(step) = damped_step(&normal, damping) else {
                break;
            };
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            match evaluate(&model, &trial, n) {
                Ok(trial_pred) => {
                    let trial_chi2 = chi_square(y, &trial_pred, &w);
                    if trial_chi2 < chi2 {
                        let step_norm = step.norm();
                        let theta_norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
                        small_step = step_norm <= cfg.step_tol * (theta_norm + cfg.step_tol);
                        theta = trial;
                        pred = trial_pred;
                        chi2 = trial_chi2;
                        history.push(chi2);
                        damping = (damping / 10.0).max(MIN_DAMPING);
                        accepted = true;
                        break;
                    }
                }
                Err(Error::NonFinite) | Err(Error::InvalidInput(_)) | Err(Error::PeakSearch(_)) => {
                }
                Err(e) => return Err(e),
            }
            damping *= 10.0;
        }

        if !accepted {
            // the damped system could not be solved or never improved:
            // try one sweep of derivative-free coordinate search
            match coordinate_search(&model, &theta, y, &w, chi2, n) {
                Some((t, pr, c)) => {
                    theta = t;
                    pred = pr;
                    chi2 = c;
                    history.push(chi2);
                    damping = cfg.initial_damping;
                    continue;
                }
                None => {
                    termination = Termination::Stagnated;
                    break;
                }
            }
        }
        if small_step {
            termination = Termination::StepSize;
            break;
        }
    }

    let jac = jacobian(&model, &theta, theta0, n)?;
    let normal = normal_equations(&jac, y, &pred, &w);
    let converged = chi2 == 0.0 || normal.gradient_norm <= cfg.gradient_tol;
    if converged && termination != Termination::ZeroResidual {
        termination = if chi2 == 0.0 {
            Termination::ZeroResidual
        } else {
            Termination::Gradient
        };
    }

    let inverse = scaled_inverse(&normal.a).ok_or(Error::SingularNormalEquations)?;
    let dof = n.saturating_sub(p);
    let scale = if data.is_weighted() {
        1.0
    } else {
        chi2 / dof.max(1) as f64
    };
    let covariance: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|k| inverse[(i, k)] * scale).collect())
        .collect();
    let sigmas = (0..p).map(|i| covariance[i][i].max(0.0).sqrt()).collect();

    Ok(FitResult {
        names: (0..p).map(|i| format!("p{i}")).collect(),
        params: theta,
        sigmas,
        covariance,
        residual_norm: chi2.sqrt(),
        chi_square: chi2,
        dof,
        gradient_norm: normal.gradient_norm,
        converged,
        termination,
        iterations,
        weighted: data.is_weighted(),
        objective_history: history,
    })
}

type Trial = (Vec<f64>, Vec<f64>, f64);

fn coordinate_search<M>(
    model: &M,
    theta: &[f64],
    y: &[f64],
    w: &[f64],
    chi2: f64,
    n: usize,
) -> Option<Trial>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut best: Option<Trial> = None;
    let mut best_chi2 = chi2;
    for j in 0..theta.len() {
        let mut h = 0.1 * theta[j].abs().max(1e-3);
        while h > 1e-12 * theta[j].abs().max(1e-300) {
            for sign in [1.0, -1.0] {
                let mut t = best
                    .as_ref()
                    .map_or_else(|| theta.to_vec(), |b| b.0.clone());
                t[j] += sign * h;
                if let Ok(pr) = evaluate(model, &t, n) {
                    let c = chi_square(y, &pr, w);
                    if c < best_chi2 {
                        best_chi2 = c;
                        best = Some((t, pr, c));
                    }
                }
            }
            if best.is_some() {
                break;
            }
            h *= 0.25;
        }
    }
    best
}
