//! Exponential mixtures, bounded noise and random sampling patterns.
//!
//! Samples are indexed `n = 1..=N` in the signal model; in memory every
//! vector is 0-based, so element `i` holds sample `n = i + 1`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::C64;

/// Seedable generator used by every stochastic routine in the crate.
pub type SignalRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SignalRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One term `b z^n` of a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub coefficient: C64,
    pub base: C64,
}

/// Ground-truth model `y_n = sum_k b_k z_k^n`, `n = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    n_samples: usize,
    components: Vec<Component>,
}

impl Mixture {
    pub fn new(n_samples: usize, components: Vec<Component>) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::invalid("mixture needs at least one sample"));
        }
        if components.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        for c in &components {
            if !(c.base.re.is_finite() && c.base.im.is_finite()) || c.base.norm() == 0.0 {
                return Err(Error::invalid(format!("invalid base {}", c.base)));
            }
            if !(c.coefficient.re.is_finite() && c.coefficient.im.is_finite()) {
                return Err(Error::NonFinite("mixture coefficient"));
            }
        }
        Ok(Self {
            n_samples,
            components,
        })
    }

    /// Mixture with unit-modulus bases `e^{i 2 pi f_k}` for the given
    /// frequencies.
    pub fn from_frequencies(n_samples: usize, coefficients: &[C64], frequencies: &[f64]) -> Result<Self> {
        if coefficients.len() != frequencies.len() {
            return Err(Error::LengthMismatch {
                expected: coefficients.len(),
                actual: frequencies.len(),
            });
        }
        let components = coefficients
            .iter()
            .zip(frequencies)
            .map(|(&b, &f)| Component {
                coefficient: b,
                base: C64::from_polar(1.0, TAU * f),
            })
            .collect();
        Self::new(n_samples, components)
    }

    /// Draws `k` frequencies i.i.d. uniform on `[0, 1)` and unit-modulus
    /// coefficients with uniform phase. With `min_separation > 0` frequencies
    /// are redrawn until their wrap-around distance is at least that value.
    pub fn random(n_samples: usize, k: usize, min_separation: f64, rng: &mut SignalRng) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if min_separation * k as f64 >= 1.0 {
            return Err(Error::invalid(format!(
                "cannot place {k} frequencies {min_separation} apart on the unit circle"
            )));
        }
        let mut freqs: Vec<f64> = Vec::with_capacity(k);
        while freqs.len() < k {
            let f: f64 = rng.random();
            let ok = freqs.iter().all(|&g| {
                let d = (f - g).abs();
                d.min(1.0 - d) >= min_separation
            });
            if ok {
                freqs.push(f);
            }
        }
        let coeffs: Vec<C64> = (0..k)
            .map(|_| C64::from_polar(1.0, TAU * rng.random::<f64>()))
            .collect();
        Self::from_frequencies(n_samples, &coeffs, &freqs)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// Plain-text record: an `N <n>` line followed by one component per line
    /// as `Re(b) Im(b) Re(z) Im(z)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("N {}\n", self.n_samples);
        for c in &self.components {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                c.coefficient.re, c.coefficient.im, c.base.re, c.base.im
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_samples = None;
        let mut components = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix("N ").or_else(|| line.strip_prefix("N\t")) {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(e.to_string()))?;
                n_samples = Some(n);
                continue;
            }
            let fields = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(e.to_string()))?;
            if fields.len() != 4 {
                return Err(parse_err(format!("expected 4 fields, found {}", fields.len())));
            }
            components.push(Component {
                coefficient: C64::new(fields[0], fields[1]),
                base: C64::new(fields[2], fields[3]),
            });
        }
        let n = n_samples.ok_or(Error::Parse {
            line: 0,
            message: "missing `N <n>` header".into(),
        })?;
        Self::new(n, components)
    }
}

/// Evaluates the mixture at `n = 1..=N`.
pub fn synthesize(mixture: &Mixture) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); mixture.n_samples];
    for c in &mixture.components {
        let mut power = c.base;
        for v in y.iter_mut() {
            *v += c.coefficient * power;
            power *= c.base;
        }
    }
    y
}

/// Bounded additive noise, `|e_n| <= amplitude_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub amplitude_bound: f64,
    pub seed: u64,
}

/// Adds noise drawn uniformly on the complex disk of radius `eta`.
pub fn add_noise(y: &[C64], spec: &NoiseSpec) -> Result<Vec<C64>> {
    let eta = spec.amplitude_bound;
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::invalid(format!("noise bound must be >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Ok(y.to_vec());
    }
    let mut rng = rng_from_seed(spec.seed);
    Ok(y.iter()
        .map(|&v| {
            let r = eta * rng.random::<f64>().sqrt();
            let theta = TAU * rng.random::<f64>();
            v + C64::from_polar(r, theta)
        })
        .collect())
}

/// Observed index set with optional inclusion probabilities and values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    universe: usize,
    indices: Vec<usize>,
    probabilities: Option<Vec<f64>>,
    values: Option<Vec<C64>>,
}

impl SampleSet {
    /// Builds a set from 0-based indices; they are sorted and deduplicated.
    pub fn new(universe: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= universe {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    len: universe,
                });
            }
        }
        Ok(Self {
            universe,
            indices,
            probabilities: None,
            values: None,
        })
    }

    pub fn full(universe: usize) -> Self {
        Self {
            universe,
            indices: (0..universe).collect(),
            probabilities: Some(vec![1.0; universe]),
            values: None,
        }
    }

    pub fn with_probabilities(mut self, p: Vec<f64>) -> Result<Self> {
        validate_probabilities(&p)?;
        if p.len() != self.universe {
            return Err(Error::LengthMismatch {
                expected: self.universe,
                actual: p.len(),
            });
        }
        self.probabilities = Some(p);
        Ok(self)
    }

    /// Attaches the observed values `P_Omega(y)`.
    pub fn observe(mut self, y: &[C64]) -> Result<Self> {
        if y.len() != self.universe {
            return Err(Error::LengthMismatch {
                expected: self.universe,
                actual: y.len(),
            });
        }
        self.values = Some(project(y, &self)?);
        Ok(self)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Sorted 0-based indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn probabilities(&self) -> Option<&[f64]> {
        self.probabilities.as_deref()
    }

    pub fn values(&self) -> Option<&[C64]> {
        self.values.as_deref()
    }

    /// Membership mask of length `N`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.universe];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }

    /// Complement of the set within `0..N`.
    pub fn missing(&self) -> Vec<usize> {
        let mask = self.mask();
        (0..self.universe).filter(|&i| !mask[i]).collect()
    }

    /// Index list: `N <n>` then one 1-based index per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("N {}\n", self.universe);
        for &i in &self.indices {
            let _ = writeln!(out, "{}", i + 1);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut universe = None;
        let mut indices = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix('N') {
                universe = Some(rest.trim().parse::<usize>().map_err(|e| parse_err(e.to_string()))?);
                continue;
            }
            let one_based = line.parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
            if one_based == 0 {
                return Err(parse_err("indices are 1-based".into()));
            }
            indices.push(one_based - 1);
        }
        let universe = universe.ok_or(Error::Parse {
            line: 0,
            message: "missing `N <n>` header".into(),
        })?;
        Self::new(universe, indices)
    }
}

fn validate_probabilities(p: &[f64]) -> Result<()> {
    match p.iter().position(|&v| !(v > 0.0 && v <= 1.0)) {
        Some(i) => Err(Error::invalid(format!(
            "probability p[{i}] = {} outside (0, 1]",
            p[i]
        ))),
        None => Ok(()),
    }
}

/// Includes each index `n` independently with probability `p[n]`.
pub fn sample_bernoulli(probabilities: &[f64], seed: u64) -> Result<SampleSet> {
    validate_probabilities(probabilities)?;
    let mut rng = rng_from_seed(seed);
    let indices = probabilities
        .iter()
        .enumerate()
        .filter(|&(_, &p)| rng.random::<f64>() < p)
        .map(|(i, _)| i)
        .collect();
    Ok(SampleSet {
        universe: probabilities.len(),
        indices,
        probabilities: Some(probabilities.to_vec()),
        values: None,
    })
}

/// Uniformly random subset of fixed size `m`.
pub fn sample_uniform_m(n: usize, m: usize, seed: u64) -> Result<SampleSet> {
    if m < 1 || m > n {
        return Err(Error::invalid(format!("sample count {m} outside 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut indices = index::sample(&mut rng, n, m).into_vec();
    indices.sort_unstable();
    Ok(SampleSet {
        universe: n,
        indices,
        probabilities: Some(vec![m as f64 / n as f64; n]),
        values: None,
    })
}

/// `P_Omega(y)`: the observed entries in increasing index order.
pub fn project(y: &[C64], omega: &SampleSet) -> Result<Vec<C64>> {
    omega
        .indices
        .iter()
        .map(|&i| {
            y.get(i).copied().ok_or(Error::IndexOutOfRange {
                index: i,
                len: y.len(),
            })
        })
        .collect()
}

/// Inverse of [`project`]: places `values` on `omega`, zeros elsewhere.
pub fn embed(values: &[C64], omega: &SampleSet) -> Result<Vec<C64>> {
    if values.len() != omega.len() {
        return Err(Error::LengthMismatch {
            expected: omega.len(),
            actual: values.len(),
        });
    }
    let mut y = vec![C64::new(0.0, 0.0); omega.universe];
    for (&i, &v) in omega.indices.iter().zip(values) {
        y[i] = v;
    }
    Ok(y)
}
