//! Multi-start maximization of coherent information over channel inputs,
//! maximization of `χ^{Q'} − χ^{E'}` over pure-state ensembles, and
//! parameter sweeps over the standard channel families.
//!
//! Both optimizers use the same ascent: central finite-difference gradients
//! on an unconstrained real parameterization, a step along the normalized
//! gradient with backtracking halving, and a doubling of the trial step after
//! each accepted move. Restarts run in parallel with generator seeds
//! `seed + restart index` and are merged in index order.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply, Family, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmath::{random_density_with, rng_from_seed, ComplexMatrix, DimensionList, C64};
use crate::quantities::{coherent_information, entropy_exchange, privacy_bound, verify_identity};
use crate::states::{DensityOperator, Ensemble, PureState};

/// Finite-difference step on each real coordinate.
pub const FD_STEP: f64 = 1e-5;
const MIN_STEP: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub tol_obj: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            step_init: 0.1,
            tol_obj: 1e-7,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Domain("restarts and max_iters must be positive".into()));
        }
        if !(self.step_init > 0.0 && self.tol_obj > 0.0 && self.step_init.is_finite()) {
            return Err(Error::Domain("step_init and tol_obj must be positive".into()));
        }
        if self.tol_obj >= self.step_init {
            return Err(Error::Domain(format!(
                "tol_obj {} must be smaller than step_init {}",
                self.tol_obj, self.step_init
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct AscentRun {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

fn gradient(f: &(dyn Fn(&[f64]) -> f64 + Sync), x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + FD_STEP;
            let up = f(&probe);
            probe[i] = orig - FD_STEP;
            let down = f(&probe);
            probe[i] = orig;
            let g = (up - down) / (2.0 * FD_STEP);
            if g.is_finite() {
                g
            } else {
                0.0
            }
        })
        .collect()
}

fn ascend(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: Vec<f64>, cfg: &OptimizerConfig) -> AscentRun {
    let mut x = x0;
    let mut value = f(&x);
    let mut step = cfg.step_init;
    for _ in 0..cfg.max_iters {
        let g = gradient(f, &x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return AscentRun { x, value, converged: true };
        }
        let mut t = step;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + t * gi / norm).collect();
            let v = f(&trial);
            if v.is_finite() && v >= value + ARMIJO * t * norm {
                break Some((trial, v));
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        let Some((trial, v)) = accepted else {
            return AscentRun { x, value, converged: true };
        };
        let improvement = v - value;
        x = trial;
        value = v;
        if improvement < cfg.tol_obj {
            return AscentRun { x, value, converged: true };
        }
        step = (2.0 * t).min(1e3 * cfg.step_init);
    }
    AscentRun {
        x,
        value,
        converged: false,
    }
}

/// Index of the best run; ties go to the lowest index.
fn best_index(runs: &[AscentRun]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    best
}

fn matrix_from_params(x: &[f64], dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        C64::new(x[k], x[k + 1])
    })
}

fn params_from_matrix(a: &ComplexMatrix) -> Vec<f64> {
    a.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// `ρ = A A† / Tr(A A†)`.
fn density_from_params(x: &[f64], dim: usize) -> Option<DensityOperator> {
    let a = matrix_from_params(x, dim);
    let gram = &a * &a.adjoint();
    let tr = gram.trace().re;
    if !tr.is_finite() || tr <= 1e-300 {
        return None;
    }
    let dims = DimensionList::single(dim).ok()?;
    Some(DensityOperator::from_trusted(gram.scale_real(1.0 / tr), dims))
}

/// Outcome of [`maximize_coherent_information`].
#[derive(Clone, Debug)]
pub struct OptimizerResult {
    pub best_input: DensityOperator,
    /// Largest coherent information found; a lower bound on the achievable privacy.
    pub best_value: f64,
    /// `(restart index, final value)` per restart.
    pub trace_of_runs: Vec<(usize, f64)>,
    /// Whether the best restart met the convergence criterion.
    pub converged: bool,
}

/// Multi-start ascent of `I^Q(ρ)` over `ρ = AA†/Tr(AA†)`.
///
/// Restart 0 starts at the maximally mixed input; the others at random
/// full-rank densities. Only local maxima are claimed.
pub fn maximize_coherent_information(ch: &QuantumChannel, cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    cfg.validate()?;
    let dim = ch.dim_in();
    let objective = |x: &[f64]| -> f64 {
        density_from_params(x, dim)
            .and_then(|rho| coherent_information(ch, &rho).ok())
            .unwrap_or(f64::NEG_INFINITY)
    };

    let starts = (0..cfg.restarts)
        .map(|r| -> Result<Vec<f64>> {
            if r == 0 {
                return Ok(params_from_matrix(&ComplexMatrix::identity(dim)));
            }
            let mut rng = rng_from_seed(cfg.seed.wrapping_add(r as u64));
            let rho = random_density_with(dim, dim, &mut rng)?;
            let sqrt = crate::qmath::hermitian_eigensystem(&rho)?.reconstruct_with(|x| x.max(0.0).sqrt());
            Ok(params_from_matrix(&sqrt))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<AscentRun> = starts
        .into_par_iter()
        .map(|x0| ascend(&objective, x0, cfg))
        .collect();

    let best = best_index(&runs);
    let best_input = density_from_params(&runs[best].x, dim)
        .ok_or_else(|| Error::Numeric("optimizer produced a degenerate input".into()))?;
    let best_input = DensityOperator::new(best_input.matrix().clone())?;
    let best_value = coherent_information(ch, &best_input)?;
    Ok(OptimizerResult {
        best_input,
        best_value,
        trace_of_runs: runs.iter().enumerate().map(|(i, r)| (i, r.value)).collect(),
        converged: runs[best].converged,
    })
}

/// Outcome of [`maximize_privacy_bound`].
#[derive(Clone, Debug)]
pub struct PrivacyOptimum {
    pub ensemble: Ensemble,
    /// `χ^{Q'} − χ^{E'}` of `ensemble`.
    pub delta_chi: f64,
    /// `|Δχ − I^Q(average of ensemble)|`.
    pub identity_residual: f64,
    pub trace_of_runs: Vec<(usize, f64)>,
    pub converged: bool,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Parameters: `n` unnormalized complex vectors followed by `n` weight logits.
fn ensemble_from_params(x: &[f64], dim: usize, n: usize) -> Option<Ensemble> {
    let (vecs, logits) = x.split_at(2 * dim * n);
    let states = (0..n)
        .map(|k| {
            let v = ComplexMatrix::from_fn(dim, 1, |i, _| {
                let o = 2 * (k * dim + i);
                C64::new(vecs[o], vecs[o + 1])
            });
            PureState::normalized(v).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Ensemble::pure(softmax(logits), states).ok()
}

/// Multi-start ascent of `χ^{Q'} − χ^{E'}` over ensembles of `n_signals` pure states.
///
/// Restart 0 starts from uniformly weighted computational-basis states.
pub fn maximize_privacy_bound(ch: &QuantumChannel, n_signals: usize, cfg: &OptimizerConfig) -> Result<PrivacyOptimum> {
    if n_signals < 2 {
        return Err(Error::Domain(format!(
            "privacy-bound optimization needs at least 2 signals, got {n_signals}"
        )));
    }
    cfg.validate()?;
    let dim = ch.dim_in();
    let objective = |x: &[f64]| -> f64 {
        ensemble_from_params(x, dim, n_signals)
            .and_then(|e| privacy_bound(ch, &e).ok())
            .unwrap_or(f64::NEG_INFINITY)
    };

    let starts: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|r| {
            let mut x = vec![0.0; 2 * dim * n_signals + n_signals];
            if r == 0 {
                for k in 0..n_signals {
                    x[2 * (k * dim + k % dim)] = 1.0;
                }
            } else {
                let mut rng = rng_from_seed(cfg.seed.wrapping_add(r as u64));
                for v in x.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
            }
            x
        })
        .collect();

    let runs: Vec<AscentRun> = starts
        .into_par_iter()
        .map(|x0| ascend(&objective, x0, cfg))
        .collect();

    let best = best_index(&runs);
    let ensemble = ensemble_from_params(&runs[best].x, dim, n_signals)
        .ok_or_else(|| Error::Numeric("optimizer produced a degenerate ensemble".into()))?;
    let delta_chi = privacy_bound(ch, &ensemble)?;
    let identity_residual = verify_identity(ch, &ensemble)?;
    Ok(PrivacyOptimum {
        ensemble,
        delta_chi,
        identity_residual,
        trace_of_runs: runs.iter().enumerate().map(|(i, r)| (i, r.value)).collect(),
        converged: runs[best].converged,
    })
}

/// How a sweep chooses the channel input at each parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputPolicy {
    #[serde(rename = "max-mixed")]
    MaxMixed,
    #[serde(rename = "optimized")]
    Optimized,
}

impl InputPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            InputPolicy::MaxMixed => "max-mixed",
            InputPolicy::Optimized => "optimized",
        }
    }
}

impl FromStr for InputPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-mixed" => Ok(InputPolicy::MaxMixed),
            "optimized" => Ok(InputPolicy::Optimized),
            other => Err(Error::Domain(format!("unknown input policy '{other}'"))),
        }
    }
}

impl fmt::Display for InputPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a sweep; `coherent_info = s_output − s_exchange`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub param: f64,
    pub s_output: f64,
    pub s_exchange: f64,
    pub coherent_info: f64,
    pub input_policy: InputPolicy,
}

/// Evaluates the family at every grid point. Identity sweeps use a qubit.
///
/// Grid point `i` of an optimized sweep uses seed `cfg.seed + i`.
pub fn sweep(family: Family, params: &[f64], policy: InputPolicy, cfg: &OptimizerConfig) -> Result<Vec<SweepRecord>> {
    if params.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let channels = params
        .iter()
        .map(|&p| family.build(p, 2))
        .collect::<Result<Vec<_>>>()?;
    if policy == InputPolicy::Optimized {
        cfg.validate()?;
    }
    channels
        .par_iter()
        .zip(params)
        .enumerate()
        .map(|(i, (ch, &param))| {
            let input = match policy {
                InputPolicy::MaxMixed => DensityOperator::maximally_mixed(ch.dim_in())?,
                InputPolicy::Optimized => {
                    let point_cfg = OptimizerConfig {
                        seed: cfg.seed.wrapping_add(i as u64),
                        ..*cfg
                    };
                    maximize_coherent_information(ch, &point_cfg)?.best_input
                }
            };
            let s_output = apply(ch, &input)?.entropy()?;
            let s_exchange = entropy_exchange(ch, &input)?;
            Ok(SweepRecord {
                param,
                s_output,
                s_exchange,
                coherent_info: s_output - s_exchange,
                input_policy: policy,
            })
        })
        .collect()
}

/// `steps` evenly spaced points from `from` to `to` inclusive; a single step yields `[from]`.
pub fn uniform_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() || from > to {
        return Err(Error::Domain(format!("invalid grid {from}..{to} with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + h * i as f64 })
        .collect())
}
