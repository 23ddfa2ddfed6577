use std::path::Path;
use std::time::Instant;

use strict_epi::analysis::{line_restriction_verdict, main_theorem_verdict, AnalysisError};
use strict_epi::geometry::affine_hull;
use strict_epi::model::{parse, parse_constraints, DomainError, ParseError, SamplingBox};
use strict_epi::oracle::{builtin_corpus, crosscheck, oracle_epigraph_strict_convexity, parse_corpus, Budget};
use strict_epi::{DomainSpec, FunctionSpec, PointCloud, Status, Verdict, VerdictMode};

use crate::args::{HullArgs, Mode};
use crate::config::{EngineConfig, InputError, RunConfig};
use crate::report;

/// Text for stdout and the process exit code.
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::Certified => 0,
        Status::Refuted => 1,
        Status::Inconclusive => 2,
    }
}

/// A parse error with a caret under the offending position.
fn located(flag: &str, src: &str, err: &ParseError) -> InputError {
    let mut msg = format!("--{flag}: {err}");
    if let Some(pos) = err.position() {
        msg.push_str(&format!("\n  {src}\n  {}^", " ".repeat(pos)));
    }
    InputError(msg)
}

fn build_spec(cfg: &RunConfig) -> Result<FunctionSpec, InputError> {
    let f = parse(&cfg.function, cfg.dim).map_err(|e| located("function", &cfg.function, &e))?;
    let constraints = parse_constraints(&cfg.domain, cfg.dim).map_err(|e| located("domain", &cfg.domain, &e))?;
    let bounds = SamplingBox::parse(&cfg.bounds, cfg.dim).map_err(|e| InputError(format!("--box: {e}")))?;
    let domain =
        DomainSpec::new(cfg.dim, constraints, bounds, &cfg.engine.tol).map_err(|e| InputError(e.to_string()))?;
    Ok(FunctionSpec::new(f, domain))
}

fn engine_error(e: AnalysisError) -> InputError {
    match e {
        AnalysisError::Domain(DomainError::RegionTooThin { accepted, attempts }) => InputError(format!(
            "the domain is empty or too thin to sample ({accepted} of {attempts} draws landed in it)"
        )),
        other => InputError(other.to_string()),
    }
}

/// One engine's verdict, tagged with the engine that produced it.
pub struct EngineRun {
    pub mode: VerdictMode,
    pub verdict: Verdict,
}

/// Combined verdict of several engines: their common decisive status, or
/// `Inconclusive` when none is decisive or two decisive ones differ.
pub fn combine(runs: &[EngineRun]) -> (Status, bool) {
    let decisive: Vec<Status> = runs.iter().map(|r| r.verdict.overall).filter(|s| s.is_decisive()).collect();
    let agree = decisive.windows(2).all(|w| w[0] == w[1]);
    let overall = if agree { decisive.first().copied().unwrap_or(Status::Inconclusive) } else { Status::Inconclusive };
    (overall, agree)
}

pub fn analyze(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let start = Instant::now();
    let spec = build_spec(cfg)?;
    let e = &cfg.engine;
    let modes: &[VerdictMode] = match cfg.mode {
        Mode::MainTheorem => &[VerdictMode::MainTheorem],
        Mode::Lines => &[VerdictMode::Lines],
        Mode::Oracle => &[VerdictMode::Oracle],
        Mode::All => &[VerdictMode::MainTheorem, VerdictMode::Lines, VerdictMode::Oracle],
    };
    let mut runs = Vec::with_capacity(modes.len());
    for &mode in modes {
        let verdict = match mode {
            VerdictMode::MainTheorem => main_theorem_verdict(&spec, e.samples, e.seed, &e.tol),
            VerdictMode::Lines => line_restriction_verdict(&spec, e.lines, e.samples, e.seed, &e.tol),
            VerdictMode::Oracle => oracle_epigraph_strict_convexity(&spec, e.trials, e.seed, &e.tol),
        }
        .map_err(engine_error)?;
        runs.push(EngineRun { mode, verdict });
    }
    let (overall, agree) = combine(&runs);
    let elapsed_ms = e.timing.then(|| start.elapsed().as_millis() as u64);
    let agreement = (runs.len() > 1).then_some(agree);
    let stdout = if e.json {
        report::analyze_json(cfg, overall, agreement, &runs, elapsed_ms)
    } else {
        report::analyze_text(cfg, overall, agreement, &runs, elapsed_ms)
    };
    Ok(Outcome { code: exit_code(overall), stdout })
}

pub fn hull(args: &HullArgs) -> Result<Outcome, InputError> {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| InputError(format!("cannot read {}: {e}", args.csv.display())))?;
    let cloud = PointCloud::from_csv(&text).map_err(|e| InputError(format!("{}: {e}", args.csv.display())))?;
    let h = affine_hull(&cloud, &strict_epi::Tolerances::default());
    let stdout = if args.json { report::hull_json(&cloud, &h) } else { report::hull_text(&cloud, &h) };
    Ok(Outcome { code: 0, stdout })
}

pub fn run_crosscheck(corpus: Option<&Path>, e: &EngineConfig) -> Result<Outcome, InputError> {
    let start = Instant::now();
    let entries = match corpus {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|err| InputError(format!("cannot read {}: {err}", path.display())))?;
            parse_corpus(&text, &e.tol).map_err(|err| InputError(format!("{}: {err}", path.display())))?
        }
        None => builtin_corpus(&e.tol),
    };
    let budget = Budget { k: e.samples, lines: e.lines, trials: e.trials };
    let rep = crosscheck(&entries, budget, e.seed, &e.tol);
    let elapsed_ms = e.timing.then(|| start.elapsed().as_millis() as u64);
    let stdout =
        if e.json { report::crosscheck_json(&rep, elapsed_ms) } else { report::crosscheck_text(&rep, elapsed_ms) };
    Ok(Outcome { code: if rep.passed() { 0 } else { 2 }, stdout })
}
