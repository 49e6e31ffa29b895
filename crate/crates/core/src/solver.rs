//! Weighted nuclear-norm completion by ADMM with singular value thresholding.
//!
//! The program
//!
//! ```text
//! minimize ||W_L L(g) W_R^H||_*  subject to  P_Omega(g) = y_Omega
//!                                    (or ||P_Omega(g) - y_Omega||_2 <= sqrt(M) eta)
//! ```
//!
//! is split as `Z = T(g)` with `T(g) = W_L L(g) W_R^H`. Each iteration runs a
//! least-squares `g` step, an SVT step on `Z` and a scaled dual update. With
//! diagonal weights the images `T(e_n)` have disjoint supports, so the `g`
//! step decouples per coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::LiftingBasis;
use crate::linalg::{singular_values, thin_svd};
use crate::signal::SampleSet;
use crate::weights::WeightPair;
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Initial ADMM penalty.
    pub rho: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Relative error below which a recovery counts as a success.
    pub success_threshold: f64,
    /// Residual balancing of the penalty.
    pub adapt_rho: bool,
    /// Inner conjugate-gradient cap for non-diagonal weights.
    pub cg_max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            rho: 1.0,
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            success_threshold: 1e-3,
            adapt_rho: true,
            cg_max_iters: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.rho, self.abs_tol, self.rel_tol, self.success_threshold];
        if self.max_iters < 1 || positive.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Config(format!("invalid solver config {self:?}")));
        }
        Ok(())
    }
}

/// Data-fidelity constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    Noiseless,
    /// `||P_Omega(g) - y_Omega||_2 <= sqrt(M) eta`.
    Noisy { eta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub estimate: Vec<C64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `||W_L L(estimate) W_R^H||_*`.
    pub objective: f64,
    pub converged: bool,
}

/// Proximal operator of `tau ||.||_*`. Fails only on non-finite input.
pub fn svt(m: &CMatrix, tau: f64) -> Result<CMatrix> {
    let svd = thin_svd(m)?;
    let keep = svd.s.iter().take_while(|&&s| s > tau).count();
    let mut scaled = svd.u.columns(0, keep).into_owned();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::new(svd.s[k] - tau, 0.0);
    }
    Ok(scaled * svd.v.columns(0, keep).adjoint())
}

/// Sum of singular values; NaN for non-finite input.
pub fn nuclear_norm(m: &CMatrix) -> f64 {
    singular_values(m).map_or(f64::NAN, |s| s.iter().sum())
}

/// `||truth - estimate||_2 / ||truth||_2`.
pub fn relative_error(truth: &[C64], estimate: &[C64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: estimate.len(),
        });
    }
    let norm = l2(truth);
    if norm == 0.0 {
        return Err(Error::invalid("relative error against a zero vector"));
    }
    let diff: f64 = truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}

/// `||W_L (L(a) - L(b)) W_R^H||_F`.
pub fn lifted_error(basis: &LiftingBasis, weights: &WeightPair, a: &[C64], b: &[C64]) -> Result<f64> {
    let op = WeightedLift::new(basis, weights)?;
    let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    op.check_len(&diff)?;
    Ok(op.apply(&diff).norm())
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `T(g) = W_L L(g) W_R^H` with a sparse fast path for diagonal weights.
pub struct WeightedLift<'a> {
    basis: &'a LiftingBasis,
    weights: &'a WeightPair,
    // Diagonal path: per element, cells with their real factor, and ||T e_n||^2.
    cells: Option<Vec<Vec<(usize, usize, f64)>>>,
    gram_diag: Vec<f64>,
}

impl<'a> WeightedLift<'a> {
    pub fn new(basis: &'a LiftingBasis, weights: &'a WeightPair) -> Result<Self> {
        weights.check_dims(basis.dims())?;
        let (cells, gram_diag) = match weights.diagonals() {
            Some((l, r)) => {
                let cells: Vec<Vec<(usize, usize, f64)>> = (0..basis.len())
                    .map(|n| {
                        let base = basis.coefficients()[n] * basis.entry_value(n);
                        basis
                            .pattern(n)
                            .iter()
                            .map(|&(i, j)| (i, j, base * l[i] * r[j]))
                            .collect()
                    })
                    .collect();
                let gram = cells
                    .iter()
                    .map(|c| c.iter().map(|&(_, _, f)| f * f).sum())
                    .collect();
                (Some(cells), gram)
            }
            None => (None, Vec::new()),
        };
        Ok(Self {
            basis,
            weights,
            cells,
            gram_diag,
        })
    }

    fn check_len(&self, g: &[C64]) -> Result<()> {
        if g.len() != self.basis.len() {
            return Err(Error::LengthMismatch {
                expected: self.basis.len(),
                actual: g.len(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, g: &[C64]) -> CMatrix {
        let (d1, d2) = self.basis.dims();
        match &self.cells {
            Some(cells) => {
                let mut m = CMatrix::zeros(d1, d2);
                for (n, c) in cells.iter().enumerate() {
                    for &(i, j, f) in c {
                        m[(i, j)] += g[n] * f;
                    }
                }
                m
            }
            None => {
                let lifted = self.basis.lift(g).expect("length checked by caller");
                self.weights.left() * lifted * self.weights.right().adjoint()
            }
        }
    }

    /// Hilbert adjoint `T^*(X)`.
    pub fn adjoint(&self, x: &CMatrix) -> Vec<C64> {
        match &self.cells {
            Some(cells) => cells
                .iter()
                .map(|c| c.iter().map(|&(i, j, f)| x[(i, j)] * f).sum())
                .collect(),
            None => {
                let inner = self.weights.left().adjoint() * x * self.weights.right();
                self.basis
                    .conjugate_transpose_apply(&inner)
                    .expect("dimensions checked at construction")
            }
        }
    }
}

/// Solves the weighted completion program for the samples `observed` on
/// `omega`. Iteration exhaustion is reported through `converged = false`.
pub fn complete(
    basis: &LiftingBasis,
    weights: &WeightPair,
    omega: &SampleSet,
    observed: &[C64],
    mode: Mode,
    config: &SolverConfig,
) -> Result<CompletionResult> {
    config.validate()?;
    let n = basis.len();
    if omega.is_empty() {
        return Err(Error::invalid("no observed samples"));
    }
    if omega.universe() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: omega.universe(),
        });
    }
    if observed.len() != omega.len() {
        return Err(Error::LengthMismatch {
            expected: omega.len(),
            actual: observed.len(),
        });
    }
    if observed.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("observed samples"));
    }
    let radius = match mode {
        Mode::Noiseless => 0.0,
        Mode::Noisy { eta } => {
            if !(eta >= 0.0) || !eta.is_finite() {
                return Err(Error::invalid(format!("noise bound {eta} must be >= 0")));
            }
            (omega.len() as f64).sqrt() * eta
        }
    };

    let op = WeightedLift::new(basis, weights)?;
    if op.cells.is_some() && op.gram_diag.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::SingularWeights {
            condition: f64::INFINITY,
        });
    }
    let mask = omega.mask();
    let mut data = vec![C64::new(0.0, 0.0); n];
    for (&i, &v) in omega.indices().iter().zip(observed) {
        data[i] = v;
    }
    let g_step = GStep {
        op: &op,
        mask: &mask,
        data: &data,
        omega,
        radius,
        cg_max_iters: config.cg_max_iters,
    };

    let (d1, d2) = basis.dims();
    let sqrt_cells = ((d1 * d2) as f64).sqrt();
    let mut rho = config.rho;
    let mut g = data.clone();
    let mut z = op.apply(&g);
    let mut u = CMatrix::zeros(d1, d2);
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=config.max_iters {
        iterations = it;
        g = g_step.solve(&(&z - &u), &g)?;
        let tg = op.apply(&g);
        let z_next = svt(&(&tg + &u), 1.0 / rho)?;
        let r = &tg - &z_next;
        u += &r;
        primal = r.norm();
        dual = rho * (&z_next - &z).norm();
        z = z_next;

        let eps_pri = sqrt_cells * config.abs_tol + config.rel_tol * tg.norm().max(z.norm());
        let eps_dual = sqrt_cells * config.abs_tol + config.rel_tol * rho * u.norm();
        if primal <= eps_pri && dual <= eps_dual {
            converged = true;
            break;
        }
        if !primal.is_finite() {
            return Err(Error::NonFinite("ADMM iterate"));
        }
        if config.adapt_rho && it % 10 == 0 {
            if primal > 10.0 * dual {
                rho *= 2.0;
                u /= C64::new(2.0, 0.0);
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u *= C64::new(2.0, 0.0);
            }
        }
    }

    let objective = nuclear_norm(&op.apply(&g));
    Ok(CompletionResult {
        estimate: g,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        objective,
        converged,
    })
}

struct GStep<'a, 'b> {
    op: &'a WeightedLift<'b>,
    mask: &'a [bool],
    data: &'a [C64],
    omega: &'a SampleSet,
    radius: f64,
    cg_max_iters: usize,
}

impl GStep<'_, '_> {
    /// Minimizes `||T(g) - target||_F` over the constraint set.
    fn solve(&self, target: &CMatrix, warm: &[C64]) -> Result<Vec<C64>> {
        if self.op.cells.is_some() {
            Ok(self.solve_diagonal(target))
        } else {
            self.solve_dense(target, warm)
        }
    }

    fn solve_diagonal(&self, target: &CMatrix) -> Vec<C64> {
        let h = &self.op.gram_diag;
        let proj = self.op.adjoint(target);
        let mut g: Vec<C64> = proj.iter().zip(h).map(|(p, &hn)| p / hn).collect();
        if self.radius == 0.0 {
            for &i in self.omega.indices() {
                g[i] = self.data[i];
            }
            return g;
        }
        // Weighted projection onto the ball: minimize sum h_n |g_n - c_n|^2
        // with sum_{n in Omega} |g_n - y_n|^2 <= r^2.
        let idx = self.omega.indices();
        let dev: Vec<C64> = idx.iter().map(|&i| g[i] - self.data[i]).collect();
        let norm_at = |lambda: f64| -> f64 {
            idx.iter()
                .zip(&dev)
                .map(|(&i, d)| (d * (h[i] / (h[i] + lambda))).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        if norm_at(0.0) <= self.radius {
            return g;
        }
        let mut hi = 1.0;
        while norm_at(hi) > self.radius {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) > self.radius {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let lambda = hi;
        for (&i, d) in idx.iter().zip(&dev) {
            g[i] = self.data[i] + d * (h[i] / (h[i] + lambda));
        }
        clamp_to_ball(&mut g, self.data, idx, self.radius);
        g
    }

    fn solve_dense(&self, target: &CMatrix, warm: &[C64]) -> Result<Vec<C64>> {
        let exact = self.radius == 0.0;
        let free = |i: usize| !(exact && self.mask[i]);
        let mut g = warm.to_vec();
        if exact {
            for &i in self.omega.indices() {
                g[i] = self.data[i];
            }
        }
        // CG on the normal equations restricted to the free coordinates.
        let restrict = |v: Vec<C64>| -> Vec<C64> {
            v.into_iter()
                .enumerate()
                .map(|(i, x)| if free(i) { x } else { C64::new(0.0, 0.0) })
                .collect()
        };
        let normal = |p: &[C64]| restrict(self.op.adjoint(&self.op.apply(p)));
        let mut r = restrict(self.op.adjoint(&(target - self.op.apply(&g))));
        let mut p = r.clone();
        let mut rs = dot(&r, &r).re;
        let tol = 1e-28 * dot(&self.op.adjoint(target), &self.op.adjoint(target)).re.max(1e-300);
        for _ in 0..self.cg_max_iters {
            if rs <= tol {
                break;
            }
            let ap = normal(&p);
            let pap = dot(&p, &ap).re;
            if !(pap > 0.0) {
                return Err(Error::SingularWeights {
                    condition: f64::INFINITY,
                });
            }
            let alpha = rs / pap;
            for i in 0..g.len() {
                g[i] += p[i] * alpha;
                r[i] -= ap[i] * alpha;
            }
            let rs_next = dot(&r, &r).re;
            let beta = rs_next / rs;
            for i in 0..p.len() {
                p[i] = r[i] + p[i] * beta;
            }
            rs = rs_next;
        }
        if !exact {
            clamp_to_ball(&mut g, self.data, self.omega.indices(), self.radius);
        }
        Ok(g)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

// Euclidean projection of the observed coordinates onto the data ball.
fn clamp_to_ball(g: &mut [C64], data: &[C64], idx: &[usize], radius: f64) {
    let norm = idx
        .iter()
        .map(|&i| (g[i] - data[i]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if norm > radius {
        let s = radius / norm;
        for &i in idx {
            g[i] = data[i] + (g[i] - data[i]) * s;
        }
    }
}
