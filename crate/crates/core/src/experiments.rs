//! Monte-Carlo harness: phase-transition grids over `(M, K)`, noise sweeps
//! and the plain-text `.dat` mesh format consumed by plotting tools.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::{BasisDescriptor, LiftingBasis, Structure};
use crate::signal::{add_noise, project, rng_from_seed, sample_uniform_m, synthesize, Mixture, NoiseSpec};
use crate::solver::{complete, lifted_error, relative_error, Mode, SolverConfig};
use crate::weights::{two_stage_pipeline, TuneConfig, WeightPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Identity,
    TwoStage,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Weighting::Identity),
            "two-stage" => Ok(Weighting::TwoStage),
            other => Err(Error::invalid(format!("unknown weighting `{other}`"))),
        }
    }
}

impl std::fmt::Display for Weighting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Weighting::Identity => "identity",
            Weighting::TwoStage => "two-stage",
        })
    }
}

/// Everything a single trial needs besides `(M, K, seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialSettings {
    pub weighting: Weighting,
    /// Minimum wrap-around distance between drawn frequencies (0 disables).
    pub min_separation: f64,
    pub solver: SolverConfig,
    pub tune: TuneConfig,
}

impl Default for TrialSettings {
    fn default() -> Self {
        Self {
            weighting: Weighting::Identity,
            min_separation: 0.0,
            solver: SolverConfig::default(),
            tune: TuneConfig::default(),
        }
    }
}

/// Phase-transition grid; also the schema of experiment files (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub n: usize,
    pub structure: Structure,
    pub d: usize,
    pub sample_counts: Vec<usize>,
    pub sparsity_levels: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub settings: TrialSettings,
}

impl PhaseGrid {
    /// Desk-scale default: `M = 5, 10, ..., 55`, `K = 1..=10`, 20 trials.
    pub fn desk_default(structure: Structure, d: usize) -> Self {
        Self {
            n: 59,
            structure,
            d,
            sample_counts: (1..=11).map(|i| 5 * i).collect(),
            sparsity_levels: (1..=10).collect(),
            trials: 20,
            base_seed: 0,
            settings: TrialSettings::default(),
        }
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        BasisDescriptor {
            structure: self.structure,
            n: self.n,
            d: self.d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.sample_counts.is_empty() || self.sparsity_levels.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        if let Some(m) = self.sample_counts.iter().find(|&&m| m < 1 || m > self.n) {
            return Err(Error::Config(format!("sample count {m} outside 1..={}", self.n)));
        }
        if self.sparsity_levels.contains(&0) {
            return Err(Error::Config("sparsity levels must be >= 1".into()));
        }
        self.settings.solver.validate()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let grid: PhaseGrid = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Per-cell success rates, `rates[k_index][m_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessSurface {
    pub sample_counts: Vec<usize>,
    pub sparsity_levels: Vec<usize>,
    pub rates: Vec<Vec<f64>>,
    /// Trials that ended in a solver error, per cell.
    pub failures: Vec<Vec<usize>>,
}

impl SuccessSurface {
    pub fn rate(&self, m: usize, k: usize) -> Option<f64> {
        let mi = self.sample_counts.iter().position(|&v| v == m)?;
        let ki = self.sparsity_levels.iter().position(|&v| v == k)?;
        Some(self.rates[ki][mi])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub rel_error: f64,
    pub iterations: usize,
    /// Solver error message when the trial failed to run.
    pub error: Option<String>,
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, a hash of `(base_seed, M, K, trial)`.
pub fn cell_seed(base_seed: u64, m: usize, k: usize, trial: usize) -> u64 {
    [m as u64, k as u64, trial as u64]
        .iter()
        .fold(mix(base_seed), |acc, &v| mix(acc ^ v))
}

/// One draw: random `K`-component mixture, uniform `M`-subset, completion,
/// thresholded relative error. Solver errors become failed trials.
pub fn run_trial(basis: &LiftingBasis, settings: &TrialSettings, m: usize, k: usize, seed: u64) -> TrialOutcome {
    let failed = |e: Error| TrialOutcome {
        success: false,
        rel_error: f64::INFINITY,
        iterations: 0,
        error: Some(e.to_string()),
    };
    let n = basis.len();
    let mut rng = rng_from_seed(mix(seed ^ 0x5167));
    let mixture = match Mixture::random(n, k, settings.min_separation, &mut rng) {
        Ok(x) => x,
        Err(e) => return failed(e),
    };
    let y = synthesize(&mixture);
    let omega = match sample_uniform_m(n, m, mix(seed ^ 0x0A3E)) {
        Ok(o) => o,
        Err(e) => return failed(e),
    };
    let observed = project(&y, &omega).expect("indices drawn within range");
    let result = match settings.weighting {
        Weighting::Identity => complete(
            basis,
            &WeightPair::identity(basis.dims()),
            &omega,
            &observed,
            Mode::Noiseless,
            &settings.solver,
        ),
        Weighting::TwoStage => two_stage_pipeline(
            basis,
            &omega,
            &observed,
            Mode::Noiseless,
            &settings.solver,
            &settings.tune,
        )
        .map(|out| out.result),
    };
    match result {
        Ok(res) => {
            let rel = relative_error(&y, &res.estimate).unwrap_or(f64::INFINITY);
            TrialOutcome {
                success: rel <= settings.solver.success_threshold,
                rel_error: rel,
                iterations: res.iterations,
                error: None,
            }
        }
        Err(e) => failed(e),
    }
}

/// Mean success rate per `(M, K)` cell; trials run on the rayon pool.
pub fn phase_transition(grid: &PhaseGrid) -> Result<SuccessSurface> {
    grid.validate()?;
    let basis = grid.descriptor().build()?;
    let jobs: Vec<(usize, usize, usize)> = (0..grid.sparsity_levels.len())
        .flat_map(|ki| {
            (0..grid.sample_counts.len()).flat_map(move |mi| (0..grid.trials).map(move |t| (ki, mi, t)))
        })
        .collect();
    let outcomes: Vec<(usize, usize, TrialOutcome)> = jobs
        .par_iter()
        .map(|&(ki, mi, t)| {
            let (m, k) = (grid.sample_counts[mi], grid.sparsity_levels[ki]);
            let seed = cell_seed(grid.base_seed, m, k, t);
            (ki, mi, run_trial(&basis, &grid.settings, m, k, seed))
        })
        .collect();

    let (nk, nm) = (grid.sparsity_levels.len(), grid.sample_counts.len());
    let mut successes = vec![vec![0usize; nm]; nk];
    let mut failures = vec![vec![0usize; nm]; nk];
    for (ki, mi, out) in outcomes {
        successes[ki][mi] += out.success as usize;
        failures[ki][mi] += out.error.is_some() as usize;
    }
    let rates = successes
        .iter()
        .map(|row| row.iter().map(|&s| s as f64 / grid.trials as f64).collect())
        .collect();
    Ok(SuccessSurface {
        sample_counts: grid.sample_counts.clone(),
        sparsity_levels: grid.sparsity_levels.clone(),
        rates,
        failures,
    })
}

/// Mesh text: `M K C` header, then one `m k rate` row per cell, K-major.
pub fn format_dat(surface: &SuccessSurface) -> String {
    let mut out = String::from("M K C\n");
    for (ki, &k) in surface.sparsity_levels.iter().enumerate() {
        for (mi, &m) in surface.sample_counts.iter().enumerate() {
            let _ = writeln!(out, "{} {} {:.6}", m, k, surface.rates[ki][mi]);
        }
    }
    out
}

pub fn parse_dat(text: &str) -> Result<SuccessSurface> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.split_whitespace().collect::<Vec<_>>() == ["M", "K", "C"] => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected `M K C` header".into(),
            })
        }
    }
    let mut cells = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let err = |message: String| Error::Parse { line: i + 1, message };
        if f.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", f.len())));
        }
        let m = f[0].parse::<usize>().map_err(|e| err(e.to_string()))?;
        let k = f[1].parse::<usize>().map_err(|e| err(e.to_string()))?;
        let c = f[2].parse::<f64>().map_err(|e| err(e.to_string()))?;
        cells.push((m, k, c));
    }
    let mut sample_counts: Vec<usize> = Vec::new();
    let mut sparsity_levels: Vec<usize> = Vec::new();
    for &(m, k, _) in &cells {
        if !sample_counts.contains(&m) {
            sample_counts.push(m);
        }
        if !sparsity_levels.contains(&k) {
            sparsity_levels.push(k);
        }
    }
    if cells.len() != sample_counts.len() * sparsity_levels.len() {
        return Err(Error::Parse {
            line: 0,
            message: "cells do not form a complete mesh".into(),
        });
    }
    let mut rates = vec![vec![f64::NAN; sample_counts.len()]; sparsity_levels.len()];
    for (m, k, c) in cells {
        let mi = sample_counts.iter().position(|&v| v == m).expect("collected");
        let ki = sparsity_levels.iter().position(|&v| v == k).expect("collected");
        rates[ki][mi] = c;
    }
    let failures = vec![vec![0; sample_counts.len()]; sparsity_levels.len()];
    Ok(SuccessSurface {
        sample_counts,
        sparsity_levels,
        rates,
        failures,
    })
}

/// Path of the metadata sidecar written next to a `.dat` file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.toml");
    path.with_file_name(name)
}

/// Writes the mesh file and a TOML sidecar holding the grid that produced it.
pub fn emit_dat(surface: &SuccessSurface, grid: &PhaseGrid, path: &Path) -> Result<()> {
    fs::write(path, format_dat(surface)).map_err(|e| Error::io(path, e))?;
    let meta = sidecar_path(path);
    fs::write(&meta, grid.to_toml()?).map_err(|e| Error::io(&meta, e))?;
    Ok(())
}

/// CSV mirror of the mesh.
pub fn format_csv(surface: &SuccessSurface) -> String {
    format_dat(surface)
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                "m,k,rate\n".to_string()
            } else {
                format!("{}\n", l.split_whitespace().collect::<Vec<_>>().join(","))
            }
        })
        .collect()
}

/// Noise sweep over a fixed set of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepSpec {
    pub n: usize,
    pub structure: Structure,
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub etas: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub min_separation: f64,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSweepTable {
    /// `(eta, mean lifted-domain error)`.
    pub rows: Vec<(f64, f64)>,
    /// Least-squares slope of `log error` against `log eta` over `eta > 0`.
    pub slope: Option<f64>,
}

impl NoiseSweepTable {
    pub fn to_text(&self) -> String {
        let mut out = String::from("eta error\n");
        for (eta, err) in &self.rows {
            let _ = writeln!(out, "{eta:.6e} {err:.6e}");
        }
        if let Some(s) = self.slope {
            let _ = writeln!(out, "# slope {s:.6}");
        }
        out
    }
}

/// Mean `||L(y_hat) - L(y)||_F` (identity weights) per noise level. Trial `t`
/// uses the same mixture and sample set at every `eta`; only the noise
/// realisation changes.
pub fn noise_sweep(spec: &NoiseSweepSpec) -> Result<NoiseSweepTable> {
    if spec.trials < 1 || spec.etas.is_empty() {
        return Err(Error::Config("noise sweep needs trials and eta values".into()));
    }
    if let Some(eta) = spec.etas.iter().find(|&&e| !(e >= 0.0)) {
        return Err(Error::Config(format!("noise level {eta} must be >= 0")));
    }
    let basis = BasisDescriptor {
        structure: spec.structure,
        n: spec.n,
        d: spec.d,
    }
    .build()?;
    let weights = WeightPair::identity(basis.dims());

    let per_eta: Vec<Result<f64>> = spec
        .etas
        .par_iter()
        .enumerate()
        .map(|(ei, &eta)| {
            let mut total = 0.0;
            for t in 0..spec.trials {
                let seed = cell_seed(spec.base_seed, spec.m, spec.k, t);
                let mut rng = rng_from_seed(mix(seed ^ 0x5167));
                let y = synthesize(&Mixture::random(spec.n, spec.k, spec.min_separation, &mut rng)?);
                let omega = sample_uniform_m(spec.n, spec.m, mix(seed ^ 0x0A3E))?;
                let noisy = add_noise(
                    &y,
                    &NoiseSpec {
                        amplitude_bound: eta,
                        seed: mix(seed ^ (ei as u64 + 1)),
                    },
                )?;
                let observed = project(&noisy, &omega)?;
                let mode = if eta == 0.0 { Mode::Noiseless } else { Mode::Noisy { eta } };
                let res = complete(&basis, &weights, &omega, &observed, mode, &spec.solver)?;
                total += lifted_error(&basis, &weights, &res.estimate, &y)?;
            }
            Ok(total / spec.trials as f64)
        })
        .collect();

    let rows = spec
        .etas
        .iter()
        .zip(per_eta)
        .map(|(&eta, r)| r.map(|e| (eta, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseSweepTable {
        slope: log_log_slope(&rows),
        rows,
    })
}

fn log_log_slope(rows: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(eta, err)| *eta > 0.0 && *err > 0.0)
        .map(|(eta, err)| (eta.ln(), err.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Spearman rank correlation, with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &p in &idx[i..=j] {
                r[p] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return if vx == vy { 1.0 } else { 0.0 };
    }
    cov / (vx * vy).sqrt()
}
