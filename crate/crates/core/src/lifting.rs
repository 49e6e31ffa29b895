//! Lifting bases and the lifting operator.
//!
//! A lifting basis is a family of `N` sparse `d1 x d2` matrices `A_n`, each
//! with all nonzeros equal to `1/sqrt(omega_n)`, unit Frobenius norm, disjoint
//! supports and at most one nonzero per column. Together with positive
//! coefficients `a_n` it defines the lift `L(x) = sum_n a_n x_n A_n`.
//!
//! Supports are stored as coordinate lists; a dense matrix only appears as the
//! output of [`LiftingBasis::lift`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Matrix structures with a built-in basis constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Hankel,
    DoubleHankel,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Hankel => "hankel",
            Structure::DoubleHankel => "double-hankel",
        })
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hankel" => Ok(Structure::Hankel),
            "double-hankel" => Ok(Structure::DoubleHankel),
            other => Err(Error::invalid(format!("unknown structure `{other}`"))),
        }
    }
}

/// `(structure, N, d)` triple used in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub structure: Structure,
    pub n: usize,
    pub d: usize,
}

impl BasisDescriptor {
    pub fn build(&self) -> Result<LiftingBasis> {
        match self.structure {
            Structure::Hankel => hankel_basis(self.n, self.d),
            Structure::DoubleHankel => double_hankel_basis(self.n, self.d),
        }
    }
}

/// Lifting basis `{A_n}` with coefficients `{a_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingBasis {
    n: usize,
    dims: (usize, usize),
    patterns: Vec<Vec<(usize, usize)>>,
    coefficients: Vec<f64>,
}

impl LiftingBasis {
    /// Builds a basis from explicit 0-based supports. Only shapes and cell
    /// bounds are checked here; the basis conditions are reported by
    /// [`validate_basis`].
    pub fn from_patterns(
        dims: (usize, usize),
        patterns: Vec<Vec<(usize, usize)>>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        if patterns.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: patterns.len(),
                actual: coefficients.len(),
            });
        }
        if patterns.is_empty() {
            return Err(Error::invalid("basis needs at least one element"));
        }
        for p in &patterns {
            if let Some(&(r, c)) = p.iter().find(|&&(r, c)| r >= dims.0 || c >= dims.1) {
                return Err(Error::invalid(format!(
                    "cell ({r}, {c}) outside {}x{}",
                    dims.0, dims.1
                )));
            }
        }
        Ok(Self {
            n: patterns.len(),
            dims,
            patterns,
            coefficients,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Support of `A_n` as 0-based `(row, col)` cells.
    pub fn pattern(&self, n: usize) -> &[(usize, usize)] {
        &self.patterns[n]
    }

    pub fn patterns(&self) -> &[Vec<(usize, usize)>] {
        &self.patterns
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `omega_n = ||A_n||_0`.
    pub fn support_count(&self, n: usize) -> usize {
        self.patterns[n].len()
    }

    pub fn support_counts(&self) -> Vec<usize> {
        self.patterns.iter().map(Vec::len).collect()
    }

    /// Value of every nonzero of `A_n`.
    pub fn entry_value(&self, n: usize) -> f64 {
        1.0 / (self.patterns[n].len() as f64).sqrt()
    }

    /// Frobenius inner product `<A_n, M>`.
    pub fn inner(&self, n: usize, m: &CMatrix) -> C64 {
        let s: C64 = self.patterns[n].iter().map(|&(r, c)| m[(r, c)]).sum();
        s * self.entry_value(n)
    }

    fn check_len(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn check_dims(&self, m: &CMatrix) -> Result<()> {
        if m.shape() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                actual: m.shape(),
            });
        }
        Ok(())
    }

    /// `L(x) = sum_n a_n x_n A_n`.
    pub fn lift(&self, x: &[C64]) -> Result<CMatrix> {
        self.check_len(x)?;
        let mut m = CMatrix::zeros(self.dims.0, self.dims.1);
        for (n, pattern) in self.patterns.iter().enumerate() {
            let v = x[n] * (self.coefficients[n] * self.entry_value(n));
            for &(r, c) in pattern {
                m[(r, c)] += v;
            }
        }
        Ok(m)
    }

    /// Back projection `L^+(M)_n = <A_n, M> / a_n`, the left inverse of
    /// [`lift`](Self::lift).
    pub fn adjoint(&self, m: &CMatrix) -> Result<Vec<C64>> {
        self.check_dims(m)?;
        Ok((0..self.n)
            .map(|n| self.inner(n, m) / self.coefficients[n])
            .collect())
    }

    /// Hilbert-space adjoint `L^*(M)_n = a_n <A_n, M>`.
    pub fn conjugate_transpose_apply(&self, m: &CMatrix) -> Result<Vec<C64>> {
        self.check_dims(m)?;
        Ok((0..self.n)
            .map(|n| self.inner(n, m) * self.coefficients[n])
            .collect())
    }
}

/// Hankel basis: `L(x)[i, j] = x_{i + j - 1}` on a `d x (N - d + 1)` grid.
pub fn hankel_basis(n: usize, d: usize) -> Result<LiftingBasis> {
    if d < 1 || d > n {
        return Err(Error::invalid(format!("pencil {d} outside 1..={n}")));
    }
    let cols = n - d + 1;
    let patterns: Vec<Vec<(usize, usize)>> = (0..n).map(|k| antidiagonal(k, d, cols, 0)).collect();
    let coefficients = patterns.iter().map(|p| (p.len() as f64).sqrt()).collect();
    LiftingBasis::from_patterns((d, cols), patterns, coefficients)
}

/// Double-Hankel basis: `[H_d(x) | H_d(reverse(x))]` on a
/// `d x 2(N - d + 1)` grid.
pub fn double_hankel_basis(n: usize, d: usize) -> Result<LiftingBasis> {
    if d < 1 || d > n {
        return Err(Error::invalid(format!("pencil {d} outside 1..={n}")));
    }
    let cols = n - d + 1;
    let patterns: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|k| {
            let mut p = antidiagonal(k, d, cols, 0);
            p.extend(antidiagonal(n - 1 - k, d, cols, cols));
            p
        })
        .collect();
    let coefficients = patterns.iter().map(|p| (p.len() as f64).sqrt()).collect();
    LiftingBasis::from_patterns((d, 2 * cols), patterns, coefficients)
}

// Cells (i, j) of a rows x cols block with i + j == k, columns shifted.
fn antidiagonal(k: usize, rows: usize, cols: usize, col_offset: usize) -> Vec<(usize, usize)> {
    let lo = k.saturating_sub(cols - 1);
    let hi = k.min(rows - 1);
    (lo..=hi).map(|i| (i, k - i + col_offset)).collect()
}

/// Outcome of one basis condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First offending element (0-based) on failure.
    pub first_offender: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisReport {
    pub checks: Vec<ConditionCheck>,
}

impl BasisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for BasisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match (c.passed, c.first_offender) {
                (true, _) => writeln!(f, "PASS {}", c.name)?,
                (false, Some(n)) => writeln!(f, "FAIL {} (element {})", c.name, n + 1)?,
                (false, None) => writeln!(f, "FAIL {}", c.name)?,
            }
        }
        Ok(())
    }
}

pub const CHECK_UNIT_NORM: &str = "unit-frobenius-norm";
pub const CHECK_EQUAL_POSITIVE: &str = "equal-positive-entries";
pub const CHECK_ORTHOGONAL: &str = "orthogonality";
pub const CHECK_COLUMN_SPARSE: &str = "one-nonzero-per-column";
pub const CHECK_COEFFICIENTS: &str = "positive-coefficients";

/// Checks the four lifting-basis conditions and `a_n > 0`.
///
/// Repeated cells inside one element accumulate, so they show up as a norm
/// or equal-entry failure; a cell shared between elements is an
/// orthogonality failure reported at the later element.
pub fn validate_basis(basis: &LiftingBasis) -> BasisReport {
    let mut unit_norm = None;
    let mut equal = None;
    let mut orthogonal = None;
    let mut column_sparse = None;
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();

    for (n, pattern) in basis.patterns.iter().enumerate() {
        let mut values: HashMap<(usize, usize), f64> = HashMap::new();
        let v = if pattern.is_empty() { 0.0 } else { basis.entry_value(n) };
        for &cell in pattern {
            *values.entry(cell).or_default() += v;
        }
        let norm_sq: f64 = values.values().map(|v| v * v).sum();
        if unit_norm.is_none() && (norm_sq - 1.0).abs() > 1e-12 {
            unit_norm = Some(n);
        }
        let first = values.values().next().copied().unwrap_or(0.0);
        if equal.is_none()
            && (values.is_empty() || values.values().any(|&x| x <= 0.0 || (x - first).abs() > 1e-15))
        {
            equal = Some(n);
        }
        let mut cols = HashSet::new();
        if column_sparse.is_none() && !values.keys().all(|&(_, c)| cols.insert(c)) {
            column_sparse = Some(n);
        }
        for &cell in values.keys() {
            if owner.insert(cell, n).is_some() && orthogonal.is_none() {
                orthogonal = Some(n);
            }
        }
    }
    let coeff = basis.coefficients.iter().position(|&a| !(a > 0.0));

    let mk = |name, off: Option<usize>| ConditionCheck {
        name,
        passed: off.is_none(),
        first_offender: off,
    };
    BasisReport {
        checks: vec![
            mk(CHECK_UNIT_NORM, unit_norm),
            mk(CHECK_EQUAL_POSITIVE, equal),
            mk(CHECK_ORTHOGONAL, orthogonal),
            mk(CHECK_COLUMN_SPARSE, column_sparse),
            mk(CHECK_COEFFICIENTS, coeff),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn smallest_hankel() {
        let b = hankel_basis(3, 2).unwrap();
        assert_eq!(b.dims(), (2, 2));
        assert_eq!(b.pattern(0), &[(0, 0)]);
        assert_eq!(b.pattern(1), &[(0, 1), (1, 0)]);
        assert_eq!(b.pattern(2), &[(1, 1)]);
        let a = b.coefficients();
        assert_eq!(a[0], 1.0);
        assert!((a[1] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a[2], 1.0);
        assert!((b.entry_value(1) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn n59_hankel_profile() {
        let b = hankel_basis(59, 30).unwrap();
        assert_eq!(b.dims(), (30, 30));
        let expect: Vec<usize> = (1..=59).map(|n: usize| n.min(60 - n)).collect();
        assert_eq!(b.support_counts(), expect);
    }

    #[test]
    fn row_vector_lift() {
        let b = hankel_basis(5, 1).unwrap();
        assert_eq!(b.dims(), (1, 5));
        assert!(b.support_counts().iter().all(|&w| w == 1));
        assert!(b.coefficients().iter().all(|&a| a == 1.0));
    }

    #[test]
    fn rejects_bad_pencil() {
        assert!(hankel_basis(5, 0).is_err());
        assert!(hankel_basis(5, 6).is_err());
        assert!(double_hankel_basis(5, 0).is_err());
        assert!(double_hankel_basis(5, 6).is_err());
    }

    #[test]
    fn double_hankel_small() {
        let b = double_hankel_basis(3, 2).unwrap();
        assert_eq!(b.dims(), (2, 4));
        let mut p = b.pattern(1).to_vec();
        p.sort();
        assert_eq!(p, vec![(0, 1), (0, 3), (1, 0), (1, 2)]);
        assert_eq!(b.support_count(1), 4);
        assert_eq!(double_hankel_basis(59, 40).unwrap().dims(), (40, 40));
    }

    #[test]
    fn lift_examples() {
        let h = hankel_basis(3, 2).unwrap();
        let m = h.lift(&re(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(m, CMatrix::from_row_slice(2, 2, &re(&[1.0, 2.0, 2.0, 3.0])));
        assert_eq!(h.lift(&re(&[0.0; 3])).unwrap(), CMatrix::zeros(2, 2));
        assert!(h.lift(&re(&[1.0; 4])).is_err());

        let dh = double_hankel_basis(3, 2).unwrap();
        let m = dh.lift(&re(&[1.0, 2.0, 3.0])).unwrap();
        let expect = CMatrix::from_row_slice(2, 4, &re(&[1.0, 2.0, 3.0, 2.0, 2.0, 3.0, 2.0, 1.0]));
        assert!((m - expect).camax() < 1e-14);
    }

    #[test]
    fn adjoint_examples() {
        let h = hankel_basis(3, 2).unwrap();
        assert_eq!(h.adjoint(&CMatrix::zeros(2, 2)).unwrap(), re(&[0.0; 3]));
        let m = CMatrix::from_row_slice(2, 2, &re(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(h.adjoint(&m).unwrap(), re(&[1.0, 0.0, 0.0]));
        assert!(h.adjoint(&CMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn hankel_matches_antidiagonal_formula() {
        let b = hankel_basis(11, 4).unwrap();
        let x: Vec<C64> = (0..11).map(|i| C64::new(i as f64, -(i as f64) * 0.5)).collect();
        let m = b.lift(&x).unwrap();
        for i in 0..4 {
            for j in 0..8 {
                assert!((m[(i, j)] - x[i + j]).norm() < 1e-14);
            }
        }
        let a2: f64 = b.coefficients().iter().map(|a| a * a).sum();
        assert!((a2 - 32.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_adjoint_identity() {
        let b = double_hankel_basis(9, 5).unwrap();
        let x: Vec<C64> = (0..9).map(|i| C64::new((i * i) as f64 * 0.1, 1.0 - i as f64)).collect();
        let m = CMatrix::from_fn(5, 10, |r, c| C64::new(r as f64 - 0.3 * c as f64, (r * c) as f64 * 0.01));
        let lhs = b.lift(&x).unwrap().zip_fold(&m, C64::new(0.0, 0.0), |acc, a, b| acc + a.conj() * b);
        let lt = b.conjugate_transpose_apply(&m).unwrap();
        let rhs: C64 = x.iter().zip(&lt).map(|(a, b)| a.conj() * b).sum();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn built_in_bases_validate() {
        assert!(validate_basis(&hankel_basis(59, 30).unwrap()).all_passed());
        assert!(validate_basis(&double_hankel_basis(59, 40).unwrap()).all_passed());
        assert!(validate_basis(&hankel_basis(7, 7).unwrap()).all_passed());
    }

    #[test]
    fn injected_defects_are_reported() {
        let h = hankel_basis(4, 2).unwrap();
        let mut patterns = h.patterns().to_vec();
        patterns[2].push((0, 0));
        let bad = LiftingBasis::from_patterns(h.dims(), patterns, h.coefficients().to_vec()).unwrap();
        let report = validate_basis(&bad);
        let ortho = report.check(CHECK_ORTHOGONAL).unwrap();
        assert!(!ortho.passed);
        assert_eq!(ortho.first_offender, Some(2));

        // two nonzeros in one column
        let bad = LiftingBasis::from_patterns((2, 1), vec![vec![(0, 0), (1, 0)]], vec![1.0]).unwrap();
        let report = validate_basis(&bad);
        assert!(!report.check(CHECK_COLUMN_SPARSE).unwrap().passed);
        assert!(report.check(CHECK_ORTHOGONAL).unwrap().passed);

        let bad = LiftingBasis::from_patterns((1, 1), vec![vec![(0, 0)]], vec![0.0]).unwrap();
        assert!(!validate_basis(&bad).check(CHECK_COEFFICIENTS).unwrap().passed);

        let bad = LiftingBasis::from_patterns((1, 2), vec![vec![(0, 0), (0, 0)]], vec![1.0]).unwrap();
        let report = validate_basis(&bad);
        assert!(!report.check(CHECK_UNIT_NORM).unwrap().passed);
    }

    #[test]
    fn report_display() {
        let text = validate_basis(&hankel_basis(5, 3).unwrap()).to_string();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }

    #[test]
    fn structure_names_parse() {
        for s in [Structure::Hankel, Structure::DoubleHankel] {
            assert_eq!(s.to_string().parse::<Structure>().unwrap(), s);
        }
        assert!("toeplitz".parse::<Structure>().is_err());
    }
}
