//! Leverage scores of lifted signals and the recovery diagnostics built on
//! them.
//!
//! Every score reduces to sums over the support of a basis element, because
//! `A_n` has a single nonzero per column: `||P A_n||_F^2` is a sum of
//! diagonal entries of the column-space projector, and `||A_n P||_F^2` a sum
//! of small blocks of the row-space projector.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lifting::LiftingBasis;
use crate::linalg::thin_svd;
use crate::weights::WeightPair;
use crate::{CMatrix, C64};

/// Default relative threshold for the numerical rank of a lifted matrix.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Gram matrices worse conditioned than this are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Column and row spaces of a rank-`K` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePair {
    pub left: CMatrix,
    pub right: CMatrix,
    pub singular_values: Vec<f64>,
}

impl SubspacePair {
    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    /// Subspaces of `W_L M W_R^H` given those of `M`, for invertible weights.
    pub fn reweighted(&self, weights: &WeightPair) -> Result<SubspacePair> {
        let left = orthonormal_basis(&(weights.left() * &self.left))?;
        let right = orthonormal_basis(&(weights.right() * &self.right))?;
        Ok(SubspacePair {
            left,
            right,
            singular_values: self.singular_values.clone(),
        })
    }

    /// Largest squared row norm of the left and right bases.
    pub fn coherences(&self) -> (f64, f64) {
        (max_row_norm_sq(&self.left), max_row_norm_sq(&self.right))
    }
}

fn max_row_norm_sq(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn orthonormal_basis(m: &CMatrix) -> Result<CMatrix> {
    let svd = thin_svd(m)?;
    let s_max = svd.s.first().copied().unwrap_or(0.0);
    let s_min = svd.s.last().copied().unwrap_or(0.0);
    if !(s_min > 0.0) || s_max / s_min > MAX_GRAM_CONDITION.sqrt() {
        return Err(Error::SingularWeights {
            condition: if s_min > 0.0 { (s_max / s_min).powi(2) } else { f64::INFINITY },
        });
    }
    Ok(svd.u)
}

/// Truncated SVD of `m`, keeping singular values above `rank_tol * sigma_max`.
pub fn subspace_of_matrix(m: &CMatrix, rank_tol: f64) -> Result<SubspacePair> {
    let svd = thin_svd(m)?;
    let s_max = svd.s.first().copied().unwrap_or(0.0);
    if s_max == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let keep = svd.s.iter().take_while(|&&s| s > rank_tol * s_max).count();
    Ok(SubspacePair {
        left: svd.u.columns(0, keep).into_owned(),
        right: svd.v.columns(0, keep).into_owned(),
        singular_values: svd.s[..keep].to_vec(),
    })
}

/// Subspaces of the lift `L(x)`.
pub fn subspace_of(basis: &LiftingBasis, x: &[C64], rank_tol: f64) -> Result<SubspacePair> {
    subspace_of_matrix(&basis.lift(x)?, rank_tol)
}

/// Per-sample scores together with the rank they were computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub rank_used: usize,
}

impl ScoreVector {
    /// Two-column text: 1-based index and value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{} {:.6}", i + 1, v);
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn check_subspace(basis: &LiftingBasis, sub: &SubspacePair) -> Result<()> {
    let (d1, d2) = basis.dims();
    if sub.left.nrows() != d1 || sub.right.nrows() != d2 || sub.left.ncols() != sub.right.ncols() {
        return Err(Error::DimensionMismatch {
            expected: (d1, d2),
            actual: (sub.left.nrows(), sub.right.nrows()),
        });
    }
    if sub.rank() == 0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(())
}

// Cells of a pattern grouped by row: row -> columns.
fn rows_of(pattern: &[(usize, usize)]) -> BTreeMap<usize, Vec<usize>> {
    let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(r, c) in pattern {
        rows.entry(r).or_default().push(c);
    }
    rows
}

/// Unweighted leverage scores
/// `mu_n = (N/K) max(||U^H A_n||_F^2, ||A_n V||_F^2)`.
///
/// The row-side term is taken as `||A_n V||_F^2`; `A_n V^H` does not have
/// compatible shapes.
pub fn leverage_scores(basis: &LiftingBasis, sub: &SubspacePair) -> Result<ScoreVector> {
    check_subspace(basis, sub)?;
    let k = sub.rank();
    let n = basis.len();
    let scale = n as f64 / k as f64;
    let u_rows: Vec<f64> = sub
        .left
        .row_iter()
        .map(|r| r.iter().map(|v| v.norm_sqr()).sum())
        .collect();
    let values = (0..n)
        .map(|i| {
            let pattern = basis.pattern(i);
            let inv_w = 1.0 / pattern.len() as f64;
            let left: f64 = pattern.iter().map(|&(r, _)| u_rows[r]).sum::<f64>() * inv_w;
            let mut right = 0.0;
            for cols in rows_of(pattern).values() {
                for j in 0..k {
                    let s: C64 = cols.iter().map(|&c| sub.right[(c, j)]).sum();
                    right += s.norm_sqr();
                }
            }
            right *= inv_w;
            scale * left.max(right)
        })
        .collect();
    Ok(ScoreVector { values, rank_used: k })
}

/// Oblique projectors induced by a weight pair, as dense Hermitian matrices
/// `B (B^H B)^{-1} B^H` with `B = W_L^H U` (left) and `B = W_R^H V` (right).
#[derive(Debug, Clone)]
pub struct WeightedProjectors {
    pub left: CMatrix,
    pub right: CMatrix,
}

fn projector(b: &CMatrix) -> Result<CMatrix> {
    let gram = b.adjoint() * b;
    let eig = gram.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::SingularWeights { condition });
    }
    let inv = gram.try_inverse().ok_or(Error::SingularWeights { condition })?;
    Ok(b * inv * b.adjoint())
}

impl WeightedProjectors {
    /// `sub` must span the column and row spaces of `W_L L(x) W_R^H`.
    pub fn new(weights: &WeightPair, sub: &SubspacePair) -> Result<Self> {
        let left = projector(&(weights.left().adjoint() * &sub.left))?;
        let right = projector(&(weights.right().adjoint() * &sub.right))?;
        Ok(Self { left, right })
    }

    /// `(||P_U(A_n)||_F^2, ||P_V(A_n)||_F^2)`.
    pub fn element_norms(&self, basis: &LiftingBasis, n: usize) -> (f64, f64) {
        let pattern = basis.pattern(n);
        let inv_w = 1.0 / pattern.len() as f64;
        let left: f64 = pattern.iter().map(|&(r, _)| self.left[(r, r)].re).sum::<f64>() * inv_w;
        let mut right = 0.0;
        for cols in rows_of(pattern).values() {
            for &a in cols {
                for &b in cols {
                    right += self.right[(a, b)].re;
                }
            }
        }
        (left, right * inv_w)
    }
}

/// Weighted leverage scores `(N/K) max(||P_U(A_n)||_F^2, ||P_V(A_n)||_F^2)`
/// where `sub` is the subspace pair of `W_L L(x) W_R^H`.
pub fn weighted_leverage_scores(
    basis: &LiftingBasis,
    weights: &WeightPair,
    sub: &SubspacePair,
) -> Result<ScoreVector> {
    check_subspace(basis, sub)?;
    weights.check_dims(basis.dims())?;
    let proj = WeightedProjectors::new(weights, sub)?;
    let k = sub.rank();
    let scale = basis.len() as f64 / k as f64;
    let values = (0..basis.len())
        .map(|n| {
            let (l, r) = proj.element_norms(basis, n);
            scale * l.max(r)
        })
        .collect();
    Ok(ScoreVector { values, rank_used: k })
}

/// `R_L = sum_n ||A_n . A_n||_{inf->inf}`, the largest row sum of the
/// entrywise square of each element.
pub fn lifting_coefficient(basis: &LiftingBasis) -> f64 {
    (0..basis.len())
        .map(|n| {
            let pattern = basis.pattern(n);
            let widest = rows_of(pattern).values().map(Vec::len).max().unwrap_or(0);
            widest as f64 / pattern.len() as f64
        })
        .sum()
}

/// Sampling-probability floor
/// `min(1, max(1, R_L^2 c mu_n K^2 log N) / N)` with `c = 192^2 (b1 + 1)`.
pub fn probability_floor(scores: &ScoreVector, r_l: f64, n: usize, k: usize, b1: f64) -> Result<Vec<f64>> {
    if b1 < 3.0 {
        return Err(Error::invalid(format!("b1 must be >= 3, got {b1}")));
    }
    let c = 192.0f64.powi(2) * (b1 + 1.0);
    let log_n = (n as f64).ln();
    let kk = (k * k) as f64;
    Ok(scores
        .values
        .iter()
        .map(|&mu| {
            let inner = (r_l * r_l * c * mu * kk * log_n).max(1.0);
            (inner / n as f64).min(1.0)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherenceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Compares `1 / (8 sqrt(log N))` with
/// `min_i omega_i min(||P_U(A_i)||_F^2, ||P_V(A_i)||_F^2)`.
pub fn incoherence_check(
    basis: &LiftingBasis,
    weights: &WeightPair,
    sub: &SubspacePair,
) -> Result<IncoherenceCheck> {
    check_subspace(basis, sub)?;
    weights.check_dims(basis.dims())?;
    let proj = WeightedProjectors::new(weights, sub)?;
    let lhs = 1.0 / (8.0 * (basis.len() as f64).ln().sqrt());
    let rhs = (0..basis.len())
        .map(|n| {
            let (l, r) = proj.element_norms(basis, n);
            basis.support_count(n) as f64 * l.min(r)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(IncoherenceCheck {
        lhs,
        rhs,
        pass: lhs <= rhs,
    })
}

fn check_scores(basis: &LiftingBasis, scores: &ScoreVector) -> Result<()> {
    if scores.values.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            actual: scores.values.len(),
        });
    }
    if let Some(i) = scores.values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!("score {} is not positive", i + 1)));
    }
    Ok(())
}

/// `||M||_{A,inf} = max_n |N <A_n, M> / (K mu_n sqrt(omega_n))|`.
pub fn a_norm_inf(basis: &LiftingBasis, scores: &ScoreVector, m: &CMatrix) -> Result<f64> {
    check_scores(basis, scores)?;
    let big_n = basis.len() as f64;
    let k = scores.rank_used as f64;
    Ok((0..basis.len())
        .map(|n| {
            let w = basis.support_count(n) as f64;
            (basis.inner(n, m) * big_n).norm() / (k * scores.values[n] * w.sqrt())
        })
        .fold(0.0, f64::max))
}

/// `||M||_{A,2} = sqrt(sum_n N |<A_n, M>|^2 / (K mu_n omega_n))`, the form
/// under which `||F0||_{A,2}^2 <= 2 K R_L`.
pub fn a_norm_2(basis: &LiftingBasis, scores: &ScoreVector, m: &CMatrix) -> Result<f64> {
    check_scores(basis, scores)?;
    let big_n = basis.len() as f64;
    let k = scores.rank_used as f64;
    Ok((0..basis.len())
        .map(|n| {
            let w = basis.support_count(n) as f64;
            big_n * basis.inner(n, m).norm_sqr() / (k * scores.values[n] * w)
        })
        .sum::<f64>()
        .sqrt())
}

/// `beta = (N/K) max(c_U, c_V)` where `c_U`, `c_V` are the largest squared
/// row norms of `U` and `V`, so that `floor(N / (beta K)) = floor(1 / c)`.
pub fn corollary_beta(n: usize, sub: &SubspacePair) -> f64 {
    let (cu, cv) = sub.coherences();
    n as f64 / sub.rank() as f64 * cu.max(cv)
}

/// Upper bound on `mu_n K / N` for diagonal weights
/// `W = diag(sqrt(w))`: the larger of `||W_L A_n||_F^2` and
/// `||A_n W_R^T||_F^2`, each divided by the sum of the
/// `floor(N / (beta K))` smallest `w` on that side.
pub fn diag_weight_bound(basis: &LiftingBasis, weights: &WeightPair, beta: f64, k: usize) -> Result<Vec<f64>> {
    weights.check_dims(basis.dims())?;
    let (wl, wr) = weights
        .squared_diagonals()
        .ok_or_else(|| Error::invalid("diagonal weights required"))?;
    if k == 0 || !(beta > 0.0) {
        return Err(Error::invalid("beta and rank must be positive"));
    }
    let count = (basis.len() as f64 / (beta * k as f64)).floor() as usize;
    if count == 0 {
        return Err(Error::invalid("empty partial sum: floor(N / (beta K)) = 0"));
    }
    let smallest_sum = |w: &[f64]| {
        let mut s = w.to_vec();
        s.sort_by(f64::total_cmp);
        s.iter().take(count).sum::<f64>()
    };
    let (sl, sr) = (smallest_sum(&wl), smallest_sum(&wr));
    Ok((0..basis.len())
        .map(|n| {
            let pattern = basis.pattern(n);
            let inv_w = 1.0 / pattern.len() as f64;
            let num_l: f64 = pattern.iter().map(|&(r, _)| wl[r]).sum::<f64>() * inv_w;
            let num_r: f64 = pattern.iter().map(|&(_, c)| wr[c]).sum::<f64>() * inv_w;
            (num_l / sl).max(num_r / sr)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{double_hankel_basis, hankel_basis};
    use crate::signal::{rng_from_seed, synthesize, Mixture};
    use crate::weights::WeightPair;

    fn ones(n: usize) -> Vec<C64> {
        vec![C64::new(1.0, 0.0); n]
    }

    #[test]
    fn all_ones_subspace() {
        let b = hankel_basis(3, 2).unwrap();
        let sub = subspace_of(&b, &ones(3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(sub.rank(), 1);
        let u0 = sub.left[(0, 0)];
        // up to a global phase
        let ratio = sub.left[(1, 0)] / u0;
        assert!((ratio - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((u0.norm() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_has_no_subspace() {
        let b = hankel_basis(3, 2).unwrap();
        assert!(matches!(
            subspace_of(&b, &[C64::new(0.0, 0.0); 3], DEFAULT_RANK_TOL),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn mixture_rank_matches_order() {
        let mut rng = rng_from_seed(3);
        let b = hankel_basis(59, 30).unwrap();
        for k in 1..=6 {
            let m = Mixture::random(59, k, 0.02, &mut rng).unwrap();
            let sub = subspace_of(&b, &synthesize(&m), DEFAULT_RANK_TOL).unwrap();
            assert_eq!(sub.rank(), k);
        }
    }

    #[test]
    fn all_ones_scores() {
        let b = hankel_basis(3, 2).unwrap();
        let sub = subspace_of(&b, &ones(3), DEFAULT_RANK_TOL).unwrap();
        let mu = leverage_scores(&b, &sub).unwrap();
        for v in &mu.values {
            assert!((v - 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn full_space_scores_are_bounded() {
        let b = hankel_basis(9, 5).unwrap();
        let sub = SubspacePair {
            left: CMatrix::identity(5, 5),
            right: CMatrix::identity(5, 5),
            singular_values: vec![1.0; 5],
        };
        let mu = leverage_scores(&b, &sub).unwrap();
        assert!(mu.values.iter().all(|&v| v <= 9.0 / 5.0 + 1e-12));
    }

    #[test]
    fn identity_weights_reduce_to_plain_scores() {
        let mut rng = rng_from_seed(4);
        for basis in [hankel_basis(59, 30).unwrap(), double_hankel_basis(59, 40).unwrap()] {
            let m = Mixture::random(59, 3, 0.0, &mut rng).unwrap();
            let sub = subspace_of(&basis, &synthesize(&m), DEFAULT_RANK_TOL).unwrap();
            let plain = leverage_scores(&basis, &sub).unwrap();
            let w = WeightPair::identity(basis.dims());
            let weighted = weighted_leverage_scores(&basis, &w, &sub).unwrap();
            for (a, b) in plain.values.iter().zip(&weighted.values) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weighted_scores_are_scale_invariant() {
        let mut rng = rng_from_seed(5);
        let basis = hankel_basis(21, 11).unwrap();
        let m = Mixture::random(21, 2, 0.0, &mut rng).unwrap();
        let x = synthesize(&m);
        let wl: Vec<f64> = (0..11).map(|i| 0.5 + 0.1 * i as f64).collect();
        let wr: Vec<f64> = (0..11).map(|i| 2.0 - 0.1 * i as f64).collect();
        let w = WeightPair::diagonal(wl.clone(), wr.clone()).unwrap();
        let sub = subspace_of(&basis, &x, DEFAULT_RANK_TOL).unwrap().reweighted(&w).unwrap();
        let a = weighted_leverage_scores(&basis, &w, &sub).unwrap();
        let scaled = WeightPair::diagonal(wl.iter().map(|v| 2.0 * v).collect(), wr.clone()).unwrap();
        let b = weighted_leverage_scores(&basis, &scaled, &sub).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn reweighted_subspace_matches_direct_svd() {
        let mut rng = rng_from_seed(6);
        let basis = hankel_basis(15, 8).unwrap();
        let x = synthesize(&Mixture::random(15, 2, 0.0, &mut rng).unwrap());
        let w = WeightPair::diagonal((0..8).map(|i| 1.0 + i as f64).collect(), vec![0.7; 8]).unwrap();
        let sub = subspace_of(&basis, &x, DEFAULT_RANK_TOL).unwrap().reweighted(&w).unwrap();
        let direct = subspace_of_matrix(&(w.left() * basis.lift(&x).unwrap() * w.right().adjoint()), DEFAULT_RANK_TOL).unwrap();
        let pa = &sub.left * sub.left.adjoint();
        let pb = &direct.left * direct.left.adjoint();
        assert!((pa - pb).camax() < 1e-9);
    }

    #[test]
    fn singular_weights_fail_loudly() {
        let basis = hankel_basis(3, 2).unwrap();
        let sub = subspace_of(&basis, &ones(3), DEFAULT_RANK_TOL).unwrap();
        let w = WeightPair::dense(CMatrix::zeros(2, 2), CMatrix::identity(2, 2)).unwrap();
        assert!(matches!(
            weighted_leverage_scores(&basis, &w, &sub),
            Err(Error::SingularWeights { .. })
        ));
    }

    #[test]
    fn lifting_coefficient_values() {
        assert!((lifting_coefficient(&hankel_basis(3, 2).unwrap()) - 2.5).abs() < 1e-15);
        let h29: f64 = (1..=29).map(|k| 1.0 / k as f64).sum();
        let r = lifting_coefficient(&hankel_basis(59, 30).unwrap());
        assert!((r - (2.0 * h29 + 1.0 / 30.0)).abs() < 1e-12);

        // wrap-around Hankel on an N x N grid: every element has N cells
        let n = 6;
        let patterns = (0..n)
            .map(|k| (0..n).map(|i| (i, (k + n - i) % n)).collect())
            .collect();
        let wrap = LiftingBasis::from_patterns((n, n), patterns, vec![(n as f64).sqrt(); n]).unwrap();
        assert!(crate::lifting::validate_basis(&wrap).all_passed());
        assert!((lifting_coefficient(&wrap) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probability_floor_branches() {
        let huge = ScoreVector { values: vec![1e6; 4], rank_used: 1 };
        assert!(probability_floor(&huge, 1.0, 4, 1, 3.0).unwrap().iter().all(|&p| p == 1.0));
        let tiny = ScoreVector { values: vec![1e-12; 4], rank_used: 1 };
        assert!(probability_floor(&tiny, 1.0, 4, 1, 3.0).unwrap().iter().all(|&p| p == 0.25));
        assert!(probability_floor(&tiny, 1.0, 4, 1, 2.0).is_err());
    }

    #[test]
    fn incoherence_examples() {
        let b = hankel_basis(3, 2).unwrap();
        let sub = subspace_of(&b, &ones(3), DEFAULT_RANK_TOL).unwrap();
        let chk = incoherence_check(&b, &WeightPair::identity((2, 2)), &sub).unwrap();
        assert!((chk.rhs - 0.5).abs() < 1e-12);
        assert!((chk.lhs - 1.0 / (8.0 * 3f64.ln().sqrt())).abs() < 1e-15);
        assert!(chk.pass);

        let b = hankel_basis(5, 3).unwrap();
        let mut e1 = CMatrix::zeros(3, 1);
        e1[(0, 0)] = C64::new(1.0, 0.0);
        let mut f1 = CMatrix::zeros(3, 1);
        f1[(0, 0)] = C64::new(1.0, 0.0);
        let sub = SubspacePair { left: e1, right: f1, singular_values: vec![1.0] };
        let chk = incoherence_check(&b, &WeightPair::identity((3, 3)), &sub).unwrap();
        assert_eq!(chk.rhs, 0.0);
        assert!(!chk.pass);
    }

    #[test]
    fn a_norms_of_zero() {
        let b = hankel_basis(5, 3).unwrap();
        let s = ScoreVector { values: vec![1.0; 5], rank_used: 1 };
        assert_eq!(a_norm_inf(&b, &s, &CMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert_eq!(a_norm_2(&b, &s, &CMatrix::zeros(3, 3)).unwrap(), 0.0);
        let bad = ScoreVector { values: vec![0.0; 5], rank_used: 1 };
        assert!(a_norm_inf(&b, &bad, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn diag_bound_identity_and_huge_entry() {
        let b = hankel_basis(15, 8).unwrap();
        let id = WeightPair::identity(b.dims());
        let bound = diag_weight_bound(&b, &id, 15.0 / 2.0 * 0.25, 2).unwrap();
        // floor(15 / (1.875 * 2)) = 4
        assert!(bound.iter().all(|&v| (v - 0.25).abs() < 1e-15));

        let mut wl = [1.0; 8];
        wl[7] = 1e9;
        let w = WeightPair::diagonal(wl.iter().map(|v: &f64| v.sqrt()).collect(), vec![1.0; 8]).unwrap();
        let b2 = diag_weight_bound(&b, &w, 15.0 / 2.0 * 0.25, 2).unwrap();
        // elements away from row 7 only see the smallest-entry denominator
        assert!((b2[0] - 0.25).abs() < 1e-15);
        assert!(diag_weight_bound(&b, &id, 100.0, 2).is_err());
    }

    #[test]
    fn scores_text() {
        let s = ScoreVector { values: vec![1.5, 0.25], rank_used: 1 };
        assert_eq!(s.to_text(), "1 1.500000\n2 0.250000\n");
    }
}
