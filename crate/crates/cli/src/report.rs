use std::fmt::Write as _;

use serde::Serialize;
use strict_epi::oracle::CrosscheckReport;
use strict_epi::{AffineSubspace, ConditionId, ConditionReport, PointCloud, Status, Vector, Verdict, Witness};

use crate::commands::EngineRun;
use crate::config::RunConfig;

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    verdict: Status,
    mode: &'static str,
    conditions: Vec<ConditionJson<'a>>,
    agreement: Option<bool>,
    engines: Vec<EngineJson>,
    stats: Stats,
}

#[derive(Serialize)]
struct ConditionJson<'a> {
    engine: &'static str,
    id: ConditionId,
    status: Status,
    witness: Option<&'a Witness>,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct EngineJson {
    engine: &'static str,
    verdict: Status,
}

#[derive(Serialize)]
struct Stats {
    seed: u64,
    k: usize,
    lines: usize,
    trials: usize,
    elapsed_ms: Option<u64>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn analyze_json(
    cfg: &RunConfig,
    overall: Status,
    agreement: Option<bool>,
    runs: &[EngineRun],
    elapsed_ms: Option<u64>,
) -> String {
    let conditions = runs
        .iter()
        .flat_map(|r| {
            r.verdict.conditions.iter().map(move |c| ConditionJson {
                engine: r.mode.as_str(),
                id: c.id,
                status: c.status,
                witness: c.witness.as_ref(),
                samples: c.samples_used,
                note: c.note.as_deref(),
            })
        })
        .collect();
    let e = &cfg.engine;
    to_json(&AnalyzeJson {
        verdict: overall,
        mode: cfg.mode.as_str(),
        conditions,
        agreement,
        engines: runs.iter().map(|r| EngineJson { engine: r.mode.as_str(), verdict: r.verdict.overall }).collect(),
        stats: Stats { seed: e.seed, k: e.samples, lines: e.lines, trials: e.trials, elapsed_ms },
    })
}

fn mark(s: Status) -> &'static str {
    match s {
        Status::Certified => "[x]",
        Status::Refuted => "[!]",
        Status::Inconclusive => "[?]",
    }
}

fn points(ps: &[Vector]) -> String {
    ps.iter().map(Vector::to_string).collect::<Vec<_>>().join(", ")
}

fn witness_lines(out: &mut String, w: &Witness) {
    let _ = writeln!(out, "        witness: {}", w.kind.as_str());
    let _ = writeln!(out, "          points: {}", points(&w.points));
    if !w.values.is_empty() {
        let vals: Vec<String> = w.values.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "          values: [{}]", vals.join(", "));
    }
}

fn checklist_line(out: &mut String, label: &str, text: &str, status: Status, detail: &str) {
    let head = if label.is_empty() { text.to_string() } else { format!("{label} {text}") };
    let dots = ".".repeat(55usize.saturating_sub(head.len()));
    let _ = writeln!(out, "  {} {head} {dots} {status}{detail}", mark(status));
}

fn condition_status(v: &Verdict, id: ConditionId) -> Status {
    v.condition(id).map_or(Status::Inconclusive, |c| c.status)
}

fn witnesses<'a>(out: &mut String, reports: impl IntoIterator<Item = &'a ConditionReport>) {
    let mut last_note: Option<&str> = None;
    for c in reports {
        if let Some(w) = &c.witness {
            witness_lines(out, w);
        }
        if let Some(note) = c.note.as_deref().filter(|n| Some(*n) != last_note) {
            let _ = writeln!(out, "        note: {note}");
            last_note = Some(note);
        }
    }
}

/// The three hypotheses of the characterization as a checklist.
fn hypotheses(out: &mut String, v: &Verdict) {
    let convex = condition_status(v, ConditionId::DomainConvexOpen);
    checklist_line(out, "(i)  ", "C is convex and relatively open", convex, "");
    witnesses(out, v.condition(ConditionId::DomainConvexOpen));

    let strict = condition_status(v, ConditionId::FStrictlyConvex);
    let cont = condition_status(v, ConditionId::FContinuous);
    let detail = format!(" (strictly convex: {strict}, continuous: {cont})");
    checklist_line(out, "(ii) ", "f is strictly convex and continuous on C", strict.and(cont), &detail);
    witnesses(out, [ConditionId::FStrictlyConvex, ConditionId::FContinuous].iter().filter_map(|&id| v.condition(id)));

    let blowup = condition_status(v, ConditionId::BoundaryBlowup);
    checklist_line(out, "(iii)", "f(x) -> +inf at every point of rb(C)", blowup, "");
    witnesses(out, v.condition(ConditionId::BoundaryBlowup));
}

fn engine_title(run: &EngineRun) -> &'static str {
    match run.mode {
        strict_epi::VerdictMode::MainTheorem => "main-theorem engine",
        strict_epi::VerdictMode::Lines => "line-restriction engine",
        strict_epi::VerdictMode::Oracle => "epigraph oracle",
    }
}

pub fn analyze_text(
    cfg: &RunConfig,
    overall: Status,
    agreement: Option<bool>,
    runs: &[EngineRun],
    elapsed_ms: Option<u64>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "f = {}   (n = {})", cfg.function, cfg.dim);
    let constraints: Vec<String> =
        cfg.domain.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| format!("{s} < 0")).collect();
    if constraints.is_empty() {
        let _ = writeln!(out, "C = the flat of the box (no constraints), sampled within {}", cfg.bounds);
    } else {
        let _ = writeln!(out, "C = {{ {} }} within the box {}", constraints.join(", "), cfg.bounds);
    }
    for run in runs {
        let _ = writeln!(out, "\n{}: {}", engine_title(run), run.verdict.overall);
        match run.mode {
            strict_epi::VerdictMode::Oracle => {
                let s = condition_status(&run.verdict, ConditionId::SetStrictlyConvex);
                checklist_line(&mut out, "", "Epi f is strictly convex (set-level)", s, "");
                witnesses(&mut out, &run.verdict.conditions);
            }
            _ => hypotheses(&mut out, &run.verdict),
        }
    }
    out.push('\n');
    if let Some(agree) = agreement {
        let _ = writeln!(out, "engines agree: {}", if agree { "yes" } else { "NO" });
    }
    let summary = match overall {
        Status::Certified => "Epi f is strictly convex (sampled certification)",
        Status::Refuted => "Epi f is not strictly convex",
        Status::Inconclusive if agreement == Some(false) => "undecided: the engines disagree",
        Status::Inconclusive => "undecided at these sample sizes and tolerances",
    };
    let _ = writeln!(out, "verdict: {} - {summary}", overall.as_str().to_uppercase());
    let e = &cfg.engine;
    let _ = write!(out, "seed {}, k = {}, lines = {}, trials = {}", e.seed, e.samples, e.lines, e.trials);
    if let Some(ms) = elapsed_ms {
        let _ = write!(out, ", {ms} ms");
    }
    out.push('\n');
    out
}

#[derive(Serialize)]
struct HullJson<'a> {
    dim: usize,
    ambient_dim: usize,
    points: usize,
    base: &'a Vector,
    basis: &'a [Vector],
}

pub fn hull_json(cloud: &PointCloud, h: &AffineSubspace) -> String {
    to_json(&HullJson {
        dim: h.dim(),
        ambient_dim: h.ambient_dim(),
        points: cloud.len(),
        base: h.base(),
        basis: h.basis(),
    })
}

pub fn hull_text(cloud: &PointCloud, h: &AffineSubspace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "points: {} in R^{}", cloud.len(), h.ambient_dim());
    let _ = writeln!(out, "dim: {}", h.dim());
    let _ = writeln!(out, "base: {}", h.base());
    let _ = writeln!(out, "basis:");
    for b in h.basis() {
        let _ = writeln!(out, "  {b}");
    }
    out
}

#[derive(Serialize)]
struct CrosscheckJson<'a> {
    passed: bool,
    disagreements: usize,
    mismatches: usize,
    #[serde(flatten)]
    report: &'a CrosscheckReport,
    elapsed_ms: Option<u64>,
}

pub fn crosscheck_json(rep: &CrosscheckReport, elapsed_ms: Option<u64>) -> String {
    to_json(&CrosscheckJson {
        passed: rep.passed(),
        disagreements: rep.disagreements(),
        mismatches: rep.mismatches(),
        report: rep,
        elapsed_ms,
    })
}

pub fn crosscheck_text(rep: &CrosscheckReport, elapsed_ms: Option<u64>) -> String {
    let mut out = String::new();
    let width = rep.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let expected: Vec<String> = rep
        .rows
        .iter()
        .map(|r| match r.expected_failing {
            Some(id) => format!("{} ({})", r.expected, id.as_str()),
            None => r.expected.to_string(),
        })
        .collect();
    let ew = expected.iter().map(String::len).max().unwrap_or(8).max(8);
    let _ = writeln!(
        out,
        "{:width$}  {:12}  {:12}  {:12}  {:ew$}  result",
        "name", "main-theorem", "lines", "oracle", "expected"
    );
    for (r, expected) in rep.rows.iter().zip(&expected) {
        let result = match (r.agreement, r.expectation_met) {
            (true, true) => "ok",
            (false, _) => "DISAGREE",
            (true, false) => "MISMATCH",
        };
        let _ = writeln!(
            out,
            "{:width$}  {:12}  {:12}  {:12}  {expected:ew$}  {result}",
            r.name,
            r.main_theorem.as_str(),
            r.lines.as_str(),
            r.oracle.as_str(),
        );
        if let Some(err) = &r.error {
            let _ = writeln!(out, "{:width$}  error: {err}", "");
        }
    }
    let _ = write!(
        out,
        "\n{} entries, {} disagreements, {} expectation mismatches (seed {})",
        rep.rows.len(),
        rep.disagreements(),
        rep.mismatches(),
        rep.seed
    );
    if let Some(ms) = elapsed_ms {
        let _ = write!(out, ", {ms} ms");
    }
    out.push('\n');
    out
}
