#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use harmonic_lift::experiments::{
    emit_dat, format_dat, noise_sweep, phase_transition, NoiseSweepSpec, PhaseGrid, TrialSettings, Weighting,
};
use harmonic_lift::lifting::{validate_basis, BasisDescriptor, LiftingBasis, Structure};
use harmonic_lift::scores::{
    incoherence_check, leverage_scores, lifting_coefficient, probability_floor, subspace_of, weighted_leverage_scores,
};
use harmonic_lift::signal::{
    add_noise, project, rng_from_seed, sample_uniform_m, synthesize, Mixture, NoiseSpec, SampleSet,
};
use harmonic_lift::solver::{complete, relative_error, Mode, SolverConfig};
use harmonic_lift::weights::{tune_diagonal_weights, two_stage_pipeline, TuneConfig, WeightPair, WeightRecord};
use harmonic_lift::{Error, Result, C64};

/// Default worker count for `phase` and `noise-sweep`.
const THREADS_ENV: &str = "HARMONIC_LIFT_THREADS";

#[derive(Parser)]
#[command(name = "harmonic-lift", version, about = "Lifted low-rank completion of exponential mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a mixture and print its samples.
    Synth(Common),
    /// Leverage scores of a mixture's lift.
    Scores(Common),
    /// Complete one sampled instance.
    Complete(Common),
    /// Tune diagonal weights on a pilot estimate.
    Tune(Common),
    /// Phase-transition grid, written as a `.dat` mesh.
    Phase(Common),
    /// Lifted-domain error against the noise level.
    NoiseSweep(Common),
    /// Check the lifting basis conditions.
    ValidateBasis(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; flags and `--set` take precedence over its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file. The resolved config is echoed to `<out>.config.toml`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override any config key, e.g. `--set solver.max_iters=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    structure: Option<Structure>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    weighting: Option<Weighting>,
    #[arg(long)]
    trials: Option<usize>,
    /// Mixture record to use instead of a random draw.
    #[arg(long)]
    mixture: Option<PathBuf>,
    /// Sample index list to use instead of a uniform draw.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Diagonal weights (TOML with `left` and `right` arrays).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Worker threads (default from HARMONIC_LIFT_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    n: usize,
    structure: Structure,
    d: usize,
    k: usize,
    m: usize,
    #[serde(alias = "base_seed")]
    seed: u64,
    eta: f64,
    min_separation: f64,
    weighting: Weighting,
    b1: f64,
    rank_tol: f64,
    trials: usize,
    sample_counts: Vec<usize>,
    sparsity_levels: Vec<usize>,
    etas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mixture: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<PathBuf>,
    solver: SolverConfig,
    tune: TuneConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = PhaseGrid::desk_default(Structure::Hankel, 30);
        Self {
            n: grid.n,
            structure: grid.structure,
            d: grid.d,
            k: 2,
            m: 40,
            seed: 0,
            eta: 0.0,
            min_separation: 0.0,
            weighting: Weighting::Identity,
            b1: 3.0,
            rank_tol: harmonic_lift::scores::DEFAULT_RANK_TOL,
            trials: grid.trials,
            sample_counts: grid.sample_counts,
            sparsity_levels: grid.sparsity_levels,
            etas: vec![0.0, 1e-4, 1e-3, 1e-2],
            mixture: None,
            samples: None,
            weights: None,
            solver: SolverConfig::default(),
            tune: TuneConfig::default(),
        }
    }
}

impl RunConfig {
    fn basis(&self) -> Result<LiftingBasis> {
        BasisDescriptor {
            structure: self.structure,
            n: self.n,
            d: self.d,
        }
        .build()
    }

    fn mixture(&self) -> Result<Mixture> {
        match &self.mixture {
            Some(path) => Mixture::from_text(&read(path)?),
            None => Mixture::random(self.n, self.k, self.min_separation, &mut rng_from_seed(self.seed)),
        }
    }

    fn sample_set(&self) -> Result<SampleSet> {
        match &self.samples {
            Some(path) => SampleSet::from_text(&read(path)?),
            None => sample_uniform_m(self.n, self.m, self.seed.wrapping_add(1)),
        }
    }

    fn weight_pair(&self, basis: &LiftingBasis) -> Result<WeightPair> {
        match &self.weights {
            Some(path) => {
                let rec: WeightRecord = toml::from_str(&read(path)?).map_err(|e| Error::Config(e.to_string()))?;
                let w = rec.to_weights()?;
                w.check_dims(basis.dims())?;
                Ok(w)
            }
            None => Ok(WeightPair::identity(basis.dims())),
        }
    }

    fn mode(&self) -> Mode {
        if self.eta > 0.0 {
            Mode::Noisy { eta: self.eta }
        } else {
            Mode::Noiseless
        }
    }

    /// Samples of the mixture, with bounded noise when `eta > 0`.
    fn signal(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let y = synthesize(&self.mixture()?);
        let noisy = if self.eta > 0.0 {
            add_noise(
                &y,
                &NoiseSpec {
                    amplitude_bound: self.eta,
                    seed: self.seed.wrapping_add(2),
                },
            )?
        } else {
            y.clone()
        };
        Ok((y, noisy))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| config_error(format!("bad key `{key}`")))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| config_error(format!("`{part}` is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn resolve(c: &Common) -> Result<RunConfig> {
    let mut table = match &c.config {
        Some(path) => toml::from_str::<toml::Table>(&read(path)?).map_err(config_error)?,
        None => toml::Table::new(),
    };
    for item in &c.overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| config_error(format!("expected KEY=VALUE, got `{item}`")))?;
        set_path(&mut table, key.trim(), parse_value(raw.trim()))?;
    }
    let mut flag = |key: &str, v: Option<toml::Value>| -> Result<()> {
        match v {
            Some(v) => set_path(&mut table, key, v),
            None => Ok(()),
        }
    };
    let int = |v: Option<usize>| v.map(|x| toml::Value::Integer(x as i64));
    let text = |v: Option<String>| v.map(toml::Value::String);
    let path = |v: &Option<PathBuf>| text(v.as_ref().map(|p| p.display().to_string()));
    flag("seed", c.seed.map(|x| toml::Value::Integer(x as i64)))?;
    flag("structure", text(c.structure.map(|s| s.to_string())))?;
    flag("n", int(c.n))?;
    flag("d", int(c.d))?;
    flag("k", int(c.k))?;
    flag("m", int(c.m))?;
    flag("eta", c.eta.map(toml::Value::Float))?;
    flag("weighting", text(c.weighting.map(|w| w.to_string())))?;
    flag("trials", int(c.trials))?;
    flag("mixture", path(&c.mixture))?;
    flag("samples", path(&c.samples))?;
    flag("weights", path(&c.weights))?;
    let cfg: RunConfig = table.try_into().map_err(config_error)?;
    cfg.solver.validate()?;
    if !(cfg.eta >= 0.0) {
        return Err(config_error("eta must be >= 0"));
    }
    Ok(cfg)
}

fn synth(cfg: &RunConfig) -> Result<String> {
    let (_, y) = cfg.signal()?;
    let mut out = String::new();
    for (i, v) in y.iter().enumerate() {
        let _ = writeln!(out, "{} {:.6} {:.6}", i + 1, v.re, v.im);
    }
    Ok(out)
}

fn scores(cfg: &RunConfig) -> Result<String> {
    let basis = cfg.basis()?;
    let weights = cfg.weight_pair(&basis)?;
    let (y, _) = cfg.signal()?;
    let sub = subspace_of(&basis, &y, cfg.rank_tol)?;
    let mu = match cfg.weights {
        None => leverage_scores(&basis, &sub)?,
        Some(_) => weighted_leverage_scores(&basis, &weights, &sub.reweighted(&weights)?)?,
    };
    let r_l = lifting_coefficient(&basis);
    let floor = probability_floor(&mu, r_l, cfg.n, sub.rank(), cfg.b1)?;
    let inco = incoherence_check(&basis, &weights, &sub)?;
    let mut out = mu.to_text();
    let _ = writeln!(out, "# rank {}", sub.rank());
    let _ = writeln!(out, "# lifting_coefficient {r_l:.6}");
    let _ = writeln!(out, "# min_probability_floor {:.6}", floor.iter().cloned().fold(f64::INFINITY, f64::min));
    let _ = writeln!(out, "# incoherence {:.6} {:.6} {}", inco.lhs, inco.rhs, inco.pass);
    Ok(out)
}

fn complete_cmd(cfg: &RunConfig) -> Result<String> {
    let basis = cfg.basis()?;
    let (y, noisy) = cfg.signal()?;
    let omega = cfg.sample_set()?;
    let observed = project(&noisy, &omega)?;
    let result = match cfg.weighting {
        Weighting::Identity => complete(&basis, &cfg.weight_pair(&basis)?, &omega, &observed, cfg.mode(), &cfg.solver)?,
        Weighting::TwoStage => {
            two_stage_pipeline(&basis, &omega, &observed, cfg.mode(), &cfg.solver, &cfg.tune)?.result
        }
    };
    let rel = relative_error(&y, &result.estimate)?;
    let mut out = String::new();
    let _ = writeln!(out, "rel_error {rel:.6e}");
    let _ = writeln!(out, "success {}", rel <= cfg.solver.success_threshold);
    let _ = writeln!(out, "iterations {}", result.iterations);
    let _ = writeln!(out, "converged {}", result.converged);
    let _ = writeln!(out, "objective {:.6}", result.objective);
    Ok(out)
}

fn tune(cfg: &RunConfig) -> Result<String> {
    let basis = cfg.basis()?;
    let (_, noisy) = cfg.signal()?;
    let omega = cfg.sample_set()?;
    let observed = project(&noisy, &omega)?;
    let identity = WeightPair::identity(basis.dims());
    let pilot = complete(&basis, &identity, &omega, &observed, cfg.mode(), &cfg.solver)?;
    let sub = subspace_of(&basis, &pilot.estimate, cfg.tune.pilot_rank_tol)?;
    let outcome = tune_diagonal_weights(&basis, &omega, &sub, &cfg.tune)?;
    let rec = outcome.weights.to_record().expect("tuned weights are diagonal");
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "baseline = {:.6}", outcome.baseline);
    let _ = writeln!(out, "objective = {:.6}", outcome.objective);
    let _ = writeln!(out, "left = [{}]", list(&rec.left));
    let _ = writeln!(out, "right = [{}]", list(&rec.right));
    Ok(out)
}

fn grid(cfg: &RunConfig) -> PhaseGrid {
    PhaseGrid {
        n: cfg.n,
        structure: cfg.structure,
        d: cfg.d,
        sample_counts: cfg.sample_counts.clone(),
        sparsity_levels: cfg.sparsity_levels.clone(),
        trials: cfg.trials,
        base_seed: cfg.seed,
        settings: TrialSettings {
            weighting: cfg.weighting,
            min_separation: cfg.min_separation,
            solver: cfg.solver,
            tune: cfg.tune,
        },
    }
}

fn noise(cfg: &RunConfig) -> Result<String> {
    let table = noise_sweep(&NoiseSweepSpec {
        n: cfg.n,
        structure: cfg.structure,
        d: cfg.d,
        k: cfg.k,
        m: cfg.m,
        etas: cfg.etas.clone(),
        trials: cfg.trials,
        base_seed: cfg.seed,
        min_separation: cfg.min_separation,
        solver: cfg.solver,
    })?;
    Ok(table.to_text())
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn echo_config(out: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    if let Some(path) = out {
        let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".config.toml");
        let side = path.with_file_name(name);
        let text = toml::to_string(cfg).map_err(config_error)?;
        fs::write(&side, text).map_err(|e| Error::io(&side, e))?;
    }
    Ok(())
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let from_env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(config_error)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    let (common, kind) = match &command {
        Command::Synth(c) => (c, "synth"),
        Command::Scores(c) => (c, "scores"),
        Command::Complete(c) => (c, "complete"),
        Command::Tune(c) => (c, "tune"),
        Command::Phase(c) => (c, "phase"),
        Command::NoiseSweep(c) => (c, "noise-sweep"),
        Command::ValidateBasis(c) => (c, "validate-basis"),
    };
    let cfg = resolve(common)?;
    let out = common.out.as_deref();
    let text = match kind {
        "synth" => synth(&cfg)?,
        "scores" => scores(&cfg)?,
        "complete" => complete_cmd(&cfg)?,
        "tune" => tune(&cfg)?,
        "phase" => {
            init_threads(common.threads)?;
            let grid = grid(&cfg);
            let surface = phase_transition(&grid)?;
            match out {
                Some(path) => {
                    emit_dat(&surface, &grid, path)?;
                    echo_config(out, &cfg)?;
                    return Ok(());
                }
                None => format_dat(&surface),
            }
        }
        "noise-sweep" => {
            init_threads(common.threads)?;
            noise(&cfg)?
        }
        _ => validate_basis(&cfg.basis()?).to_string(),
    };
    write_out(out, &text)?;
    echo_config(out, &cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
