use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use strict_epi::Tolerances;

use crate::args::{AnalyzeArgs, CrosscheckArgs, EngineArgs, Mode, ToleranceArgs};

pub const SEED_ENV: &str = "STRICT_EPI_SEED";

/// Anything that maps to exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}", self.0)
    }
}

impl From<String> for InputError {
    fn from(s: String) -> Self {
        InputError(s)
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    function: Option<String>,
    dim: Option<usize>,
    domain: Option<String>,
    #[serde(rename = "box")]
    bounds: Option<String>,
    mode: Option<Mode>,
    samples: Option<usize>,
    lines: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    json: Option<bool>,
    timing: Option<bool>,
    corpus: Option<PathBuf>,
    tol_rank: Option<f64>,
    tol_aff: Option<f64>,
    tol_orth: Option<f64>,
    tol_strict: Option<f64>,
    tol_sc: Option<f64>,
    tol_eq: Option<f64>,
    probe_radius: Option<f64>,
    blowup_threshold: Option<f64>,
    height_cap: Option<f64>,
}

impl FileConfig {
    fn tol(&self) -> ToleranceArgs {
        ToleranceArgs {
            tol_rank: self.tol_rank,
            tol_aff: self.tol_aff,
            tol_orth: self.tol_orth,
            tol_strict: self.tol_strict,
            tol_sc: self.tol_sc,
            tol_eq: self.tol_eq,
            probe_radius: self.probe_radius,
            blowup_threshold: self.blowup_threshold,
            height_cap: self.height_cap,
        }
    }
}

fn read_config(path: Option<&Path>) -> Result<FileConfig, InputError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| InputError(format!("config {}: {e}", path.display())))
}

/// Settings common to every engine run, after merging defaults, the config
/// file, flags and the environment.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub samples: usize,
    pub lines: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
    pub json: bool,
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub function: String,
    pub dim: usize,
    pub domain: String,
    pub bounds: String,
    pub mode: Mode,
    pub engine: EngineConfig,
}

fn tolerances(flags: &ToleranceArgs, file: &ToleranceArgs) -> Result<Tolerances, InputError> {
    let mut tol = Tolerances::default();
    let pick = |a: Option<f64>, b: Option<f64>, slot: &mut f64| {
        if let Some(v) = a.or(b) {
            *slot = v;
        }
    };
    pick(flags.tol_rank, file.tol_rank, &mut tol.rank_rel);
    pick(flags.tol_aff, file.tol_aff, &mut tol.aff);
    pick(flags.tol_orth, file.tol_orth, &mut tol.orth);
    pick(flags.tol_strict, file.tol_strict, &mut tol.strict);
    pick(flags.tol_sc, file.tol_sc, &mut tol.sc);
    pick(flags.tol_eq, file.tol_eq, &mut tol.eq);
    pick(flags.probe_radius, file.probe_radius, &mut tol.probe_radius);
    pick(flags.blowup_threshold, file.blowup_threshold, &mut tol.blowup_threshold);
    pick(flags.height_cap, file.height_cap, &mut tol.height_cap);
    tol.validate()?;
    Ok(tol)
}

fn seed_from_env() -> Result<Option<u64>, InputError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| InputError(format!("{SEED_ENV}=`{s}` is not a seed"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(InputError(format!("{SEED_ENV}: {e}"))),
    }
}

fn engine(flags: &EngineArgs, file: &FileConfig) -> Result<EngineConfig, InputError> {
    let cfg = EngineConfig {
        samples: flags.samples.or(file.samples).unwrap_or(1000),
        lines: flags.lines.or(file.lines).unwrap_or(64),
        trials: flags.trials.or(file.trials).unwrap_or(2000),
        seed: seed_from_env()?.or(flags.seed).or(file.seed).unwrap_or(42),
        tol: tolerances(&flags.tol, &file.tol())?,
        json: flags.json || file.json.unwrap_or(false),
        timing: flags.timing || file.timing.unwrap_or(false),
    };
    if cfg.samples == 0 || cfg.trials == 0 {
        return Err(InputError("--samples and --trials must be at least 1".into()));
    }
    Ok(cfg)
}

pub fn analyze_config(args: &AnalyzeArgs) -> Result<RunConfig, InputError> {
    let file = read_config(args.engine.config.as_deref())?;
    let function =
        args.function.clone().or(file.function.clone()).ok_or_else(|| InputError("missing --function".into()))?;
    let dim = args.dim.or(file.dim).ok_or_else(|| InputError("missing --dim".into()))?;
    let bounds = args.bounds.clone().or(file.bounds.clone()).unwrap_or_else(|| vec!["-10:10"; dim].join(","));
    Ok(RunConfig {
        function,
        dim,
        domain: args.domain.clone().or(file.domain.clone()).unwrap_or_default(),
        bounds,
        mode: args.mode.or(file.mode).unwrap_or(Mode::All),
        engine: engine(&args.engine, &file)?,
    })
}

pub fn crosscheck_config(args: &CrosscheckArgs) -> Result<(Option<PathBuf>, EngineConfig), InputError> {
    let file = read_config(args.engine.config.as_deref())?;
    let corpus = args.corpus.clone().or(file.corpus.clone());
    Ok((corpus, engine(&args.engine, &file)?))
}
