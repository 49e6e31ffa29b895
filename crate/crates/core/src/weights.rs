//! Weight pairs `(W_L, W_R)` and data-adaptive diagonal weighting.
//!
//! Diagonal weights are parametrised as in the leverage-score bounds:
//! `W = diag(sqrt(w))` with `w` the squared diagonal. Tuned weights live on
//! the floored simplex `{w >= eps, sum(w) = 1}`, i.e. `||W||_F = 1`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::LiftingBasis;
use crate::linalg::singular_values;
use crate::scores::{subspace_of, weighted_leverage_scores, SubspacePair};
use crate::signal::SampleSet;
use crate::solver::{complete, CompletionResult, Mode, SolverConfig};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    left: CMatrix,
    right: CMatrix,
    diagonals: Option<(Vec<f64>, Vec<f64>)>,
}

impl WeightPair {
    pub fn identity(dims: (usize, usize)) -> Self {
        Self {
            left: CMatrix::identity(dims.0, dims.0),
            right: CMatrix::identity(dims.1, dims.1),
            diagonals: Some((vec![1.0; dims.0], vec![1.0; dims.1])),
        }
    }

    /// Diagonal weights from their (nonnegative) diagonal entries.
    pub fn diagonal(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        for side in [&left, &right] {
            if side.is_empty() {
                return Err(Error::invalid("empty weight diagonal"));
            }
            if side.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::invalid("weight diagonals must be finite and nonnegative"));
            }
            if side.iter().all(|&v| v == 0.0) {
                return Err(Error::invalid("weight matrix has zero Frobenius norm"));
            }
        }
        let to_matrix = |d: &[f64]| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d.len(),
                d.iter().map(|&v| C64::new(v, 0.0)),
            ))
        };
        Ok(Self {
            left: to_matrix(&left),
            right: to_matrix(&right),
            diagonals: Some((left, right)),
        })
    }

    /// Arbitrary square weight matrices.
    pub fn dense(left: CMatrix, right: CMatrix) -> Result<Self> {
        if !left.is_square() || !right.is_square() {
            return Err(Error::invalid("weight matrices must be square"));
        }
        Ok(Self {
            left,
            right,
            diagonals: None,
        })
    }

    pub fn left(&self) -> &CMatrix {
        &self.left
    }

    pub fn right(&self) -> &CMatrix {
        &self.right
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.nrows())
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonals.is_some()
    }

    /// Diagonal entries of `(W_L, W_R)` when diagonal.
    pub fn diagonals(&self) -> Option<(&[f64], &[f64])> {
        self.diagonals.as_ref().map(|(l, r)| (l.as_slice(), r.as_slice()))
    }

    /// Squared diagonal entries `(w_L, w_R)` when diagonal.
    pub fn squared_diagonals(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.diagonals.as_ref().map(|(l, r)| {
            (
                l.iter().map(|v| v * v).collect(),
                r.iter().map(|v| v * v).collect(),
            )
        })
    }

    pub fn check_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: self.dims(),
            });
        }
        Ok(())
    }

    /// Copy with `||W_L||_F = ||W_R||_F = 1`.
    pub fn normalized(&self) -> Self {
        let nl = self.left.norm();
        let nr = self.right.norm();
        Self {
            left: self.left.unscale(nl),
            right: self.right.unscale(nr),
            diagonals: self.diagonals.as_ref().map(|(l, r)| {
                (
                    l.iter().map(|v| v / nl).collect(),
                    r.iter().map(|v| v / nr).collect(),
                )
            }),
        }
    }

    pub fn to_record(&self) -> Option<WeightRecord> {
        self.diagonals.as_ref().map(|(l, r)| WeightRecord {
            left: l.clone(),
            right: r.clone(),
        })
    }
}

/// Serialized diagonal weights: the diagonal entries of `W_L` and `W_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl WeightRecord {
    pub fn to_weights(&self) -> Result<WeightPair> {
        WeightPair::diagonal(self.left.clone(), self.right.clone())
    }
}

pub fn identity_weights(dims: (usize, usize)) -> WeightPair {
    WeightPair::identity(dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    /// Maximum number of coordinate sweeps.
    pub max_iters: usize,
    /// Floor on every squared diagonal entry.
    pub epsilon: f64,
    /// Stop once a sweep improves the objective by less than this fraction.
    pub rel_decrease_tol: f64,
    /// Initial multiplicative step per coordinate.
    pub initial_step: f64,
    /// Relative singular-value threshold for the pilot subspace.
    pub pilot_rank_tol: f64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            max_iters: 20,
            epsilon: 1e-3,
            rel_decrease_tol: 1e-6,
            initial_step: 4.0,
            pilot_rank_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub weights: WeightPair,
    /// Objective `sum_{n not in Omega} mu_n` at the returned weights.
    pub objective: f64,
    /// Objective at identity weights.
    pub baseline: f64,
    /// Objective after each sweep.
    pub history: Vec<f64>,
    /// Set when a singular Gram matrix forced a return to identity weights.
    pub fell_back: bool,
}

impl TuneOutcome {
    pub fn improved(&self) -> bool {
        self.objective < self.baseline
    }
}

/// Objective `sum_{n not in Omega} mu~_n(W)` for diagonal weights, using the
/// subspace of the unweighted pilot lift.
pub fn weighting_objective(
    basis: &LiftingBasis,
    missing: &[usize],
    pilot: &SubspacePair,
    weights: &WeightPair,
) -> Result<f64> {
    let sub = pilot.reweighted(weights)?;
    let mu = weighted_leverage_scores(basis, weights, &sub)?;
    Ok(missing.iter().map(|&n| mu.values[n]).sum())
}

// Maps positive parameters onto the floored simplex {w >= eps, sum w = 1}.
fn to_simplex(v: &[f64], eps: f64) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    let free = 1.0 - eps * v.len() as f64;
    v.iter().map(|x| eps + free * x / total).collect()
}

fn weights_from(vl: &[f64], vr: &[f64], eps: f64) -> Result<WeightPair> {
    let root = |w: Vec<f64>| w.into_iter().map(f64::sqrt).collect::<Vec<_>>();
    WeightPair::diagonal(root(to_simplex(vl, eps)), root(to_simplex(vr, eps)))
}

/// Diagonal weights lowering `sum_{n not in Omega} mu~_n` by multiplicative
/// coordinate descent from identity weights. Returns identity weights when
/// nothing strictly better is found.
pub fn tune_diagonal_weights(
    basis: &LiftingBasis,
    omega: &SampleSet,
    pilot: &SubspacePair,
    config: &TuneConfig,
) -> Result<TuneOutcome> {
    let (d1, d2) = basis.dims();
    if omega.universe() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            actual: omega.universe(),
        });
    }
    let eps = config.epsilon;
    if !(eps > 0.0) || eps * d1.max(d2) as f64 >= 1.0 {
        return Err(Error::invalid(format!("weight floor {eps} infeasible for {d1}x{d2}")));
    }
    let identity = WeightPair::identity((d1, d2));
    let missing = omega.missing();
    let identity_outcome = |baseline: f64, fell_back: bool| TuneOutcome {
        weights: identity.clone(),
        objective: baseline,
        baseline,
        history: Vec::new(),
        fell_back,
    };
    if missing.is_empty() {
        return Ok(identity_outcome(0.0, false));
    }

    let baseline = weighting_objective(basis, &missing, pilot, &identity)?;
    let mut params = [vec![1.0; d1], vec![1.0; d2]];
    // Paired moves scale row i of both sides together; the left and right
    // terms of the score tie at symmetric points, where one-sided moves stall.
    let moves: Vec<Vec<(usize, usize)>> = (0..d1.min(d2))
        .map(|i| vec![(0, i), (1, i)])
        .chain((0..d1).map(|i| vec![(0, i)]))
        .chain((0..d2).map(|i| vec![(1, i)]))
        .collect();
    let mut steps = vec![config.initial_step; moves.len()];
    let mut best = baseline;
    let mut history = Vec::with_capacity(config.max_iters);

    let eval = |params: &[Vec<f64>; 2]| -> Result<f64> {
        let w = weights_from(&params[0], &params[1], eps)?;
        weighting_objective(basis, &missing, pilot, &w)
    };

    for _ in 0..config.max_iters {
        let before = best;
        for (mv, step) in moves.iter().zip(steps.iter_mut()) {
            let mut moved = false;
            for factor in [*step, 1.0 / *step] {
                let mut trial = params.clone();
                for &(side, i) in mv {
                    trial[side][i] *= factor;
                }
                let value = match eval(&trial) {
                    Ok(v) => v,
                    Err(Error::SingularWeights { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if value < best {
                    best = value;
                    params = trial;
                    moved = true;
                    break;
                }
            }
            if !moved {
                *step = step.sqrt();
            }
        }
        debug_assert!(best <= before);
        history.push(best);
        let stalled = steps.iter().all(|&s| s - 1.0 < MIN_STEP);
        if (best < before && before - best <= config.rel_decrease_tol * before.abs()) || stalled {
            break;
        }
    }

    if !(best < baseline) {
        return Ok(TuneOutcome {
            history,
            ..identity_outcome(baseline, false)
        });
    }
    match weights_from(&params[0], &params[1], eps) {
        Ok(weights) => Ok(TuneOutcome {
            weights,
            objective: best,
            baseline,
            history,
            fell_back: false,
        }),
        Err(_) => Ok(identity_outcome(baseline, true)),
    }
}

/// Multiplicative steps closer to 1 than this are treated as converged.
const MIN_STEP: f64 = 1e-4;

/// Result of [`two_stage_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub weights: WeightPair,
    pub result: CompletionResult,
    pub stage_one: CompletionResult,
    pub tuning: Option<TuneOutcome>,
    /// Whether the weighted re-solve was kept over the stage-one estimate.
    pub stage_two_kept: bool,
}

/// Fraction of the nuclear norm of `L(g)` carried past the leading `rank`
/// singular values.
pub fn spectral_tail(basis: &LiftingBasis, g: &[C64], rank: usize) -> Result<f64> {
    let sv = singular_values(&basis.lift(g)?)?;
    let total: f64 = sv.iter().sum();
    if !(total > 0.0) {
        return Ok(0.0);
    }
    Ok(sv.iter().skip(rank).sum::<f64>() / total)
}

/// Identity-weight completion, then weights tuned on the subspace of the
/// stage-one estimate, then a weighted re-solve. The weighted estimate is kept
/// only when its lift has a strictly smaller spectral tail past the pilot rank;
/// otherwise, and whenever tuning fails, the stage-one result is returned.
pub fn two_stage_pipeline(
    basis: &LiftingBasis,
    omega: &SampleSet,
    observed: &[C64],
    mode: Mode,
    solver: &SolverConfig,
    tune: &TuneConfig,
) -> Result<PipelineOutput> {
    let identity = WeightPair::identity(basis.dims());
    let stage_one = complete(basis, &identity, omega, observed, mode, solver)?;
    let fallback = |stage_one: CompletionResult, tuning| PipelineOutput {
        weights: identity.clone(),
        result: stage_one.clone(),
        stage_one,
        tuning,
        stage_two_kept: false,
    };
    if omega.len() == basis.len() {
        return Ok(fallback(stage_one, None));
    }

    let pilot = match subspace_of(basis, &stage_one.estimate, tune.pilot_rank_tol) {
        Ok(p) => p,
        Err(e) => {
            warn!("pilot subspace unavailable: {e}");
            return Ok(fallback(stage_one, None));
        }
    };
    let tuning = match tune_diagonal_weights(basis, omega, &pilot, tune) {
        Ok(t) => t,
        Err(e) => {
            warn!("weight tuning failed: {e}");
            return Ok(fallback(stage_one, None));
        }
    };
    if !tuning.improved() || tuning.fell_back {
        return Ok(fallback(stage_one, Some(tuning)));
    }
    let result = complete(basis, &tuning.weights, omega, observed, mode, solver)?;
    let rank = pilot.rank();
    let tail_one = spectral_tail(basis, &stage_one.estimate, rank)?;
    let tail_two = spectral_tail(basis, &result.estimate, rank)?;
    if !(tail_two < tail_one) {
        return Ok(fallback(stage_one, Some(tuning)));
    }
    Ok(PipelineOutput {
        weights: tuning.weights.clone(),
        result,
        stage_one,
        tuning: Some(tuning),
        stage_two_kept: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::hankel_basis;
    use crate::scores::{leverage_scores, DEFAULT_RANK_TOL};
    use crate::signal::{rng_from_seed, sample_uniform_m, synthesize, Mixture};

    #[test]
    fn identity_pair() {
        let w = identity_weights((30, 30));
        assert_eq!(w.left(), &CMatrix::identity(30, 30));
        assert!(w.is_diagonal());
        let n = w.normalized();
        assert!((n.left().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_validation() {
        assert!(WeightPair::diagonal(vec![1.0, -1.0], vec![1.0]).is_err());
        assert!(WeightPair::diagonal(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(WeightPair::diagonal(vec![], vec![1.0]).is_err());
        assert!(WeightPair::dense(CMatrix::zeros(2, 3), CMatrix::identity(2, 2)).is_err());
        let w = WeightPair::diagonal(vec![1.0, 2.0], vec![3.0]).unwrap();
        let rec = w.to_record().unwrap();
        assert_eq!(rec.to_weights().unwrap(), w);
    }

    #[test]
    fn simplex_map_respects_floor() {
        let w = to_simplex(&[1e-9, 5.0, 1.0, 1e6], 1e-3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&v| v >= 1e-3));
    }

    #[test]
    fn full_observation_returns_identity() {
        let basis = hankel_basis(15, 8).unwrap();
        let mut rng = rng_from_seed(1);
        let x = synthesize(&Mixture::random(15, 2, 0.0, &mut rng).unwrap());
        let pilot = subspace_of(&basis, &x, DEFAULT_RANK_TOL).unwrap();
        let out = tune_diagonal_weights(&basis, &SampleSet::full(15), &pilot, &TuneConfig::default()).unwrap();
        assert_eq!(out.weights, WeightPair::identity((8, 8)));
        assert_eq!(out.objective, 0.0);
    }

    #[test]
    fn tuning_never_exceeds_identity_objective() {
        let basis = hankel_basis(29, 15).unwrap();
        let mut rng = rng_from_seed(2);
        for seed in 0..5 {
            let x = synthesize(&Mixture::random(29, 3, 0.0, &mut rng).unwrap());
            let omega = sample_uniform_m(29, 14, seed).unwrap();
            let pilot = subspace_of(&basis, &x, DEFAULT_RANK_TOL).unwrap();
            let mu = leverage_scores(&basis, &pilot).unwrap();
            let plain: f64 = omega.missing().iter().map(|&n| mu.values[n]).sum();
            let out = tune_diagonal_weights(&basis, &omega, &pilot, &TuneConfig::default()).unwrap();
            assert!(out.objective <= plain + 1e-9);
            assert!((out.baseline - plain).abs() < 1e-9);
            assert!(out.history.windows(2).all(|h| h[1] <= h[0]));
            let (wl, wr) = out.weights.squared_diagonals().unwrap();
            for w in [&wl, &wr] {
                if out.improved() {
                    assert!(w.iter().all(|&v| v >= 1e-3 - 1e-15));
                    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
