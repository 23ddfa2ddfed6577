use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::checks::{
    approach_ladder, bounded_witness, discontinuity, distinct_pair, oscillation_witness, probe_pair, LadderOutcome,
    PairOutcome, CONTINUITY_RADII,
};
use super::{AnalysisError, ConditionId, ConditionReport, Verdict, VerdictMode, Witness, WitnessKind};
use crate::geometry::{slice_through, LineSlice, Vector};
use crate::model::{sample_domain_stream, FunctionSpec, Objective};
use crate::{rng, Status, Tolerances};

const GRID: usize = 32;
const PAIR_T: [f64; 3] = [0.25, 0.5, 0.75];

fn all_conditions(status: Status, note: &str) -> Vec<ConditionReport> {
    ConditionId::MAIN
        .iter()
        .map(|&id| ConditionReport { id, status, witness: None, samples_used: 0, note: Some(note.to_string()) })
        .collect()
}

fn convexity_1d(
    spec: &FunctionSpec,
    slice: &LineSlice,
    grid: &[f64],
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> ConditionReport {
    let id = ConditionId::FStrictlyConvex;
    let d = &spec.domain;
    let mut pairs: Vec<(f64, f64)> = grid.windows(3).map(|w| (w[0], w[2])).collect();
    let mut r = rng::stream(seed, rng::tag::PAIRS, 0);
    let len = slice.length();
    for _ in 0..(k / 10).max(GRID) {
        let a = slice.lower + len * r.random_range(0.001..0.999);
        let b = slice.lower + len * r.random_range(0.001..0.999);
        if a != b {
            pairs.push((a, b));
        }
    }
    let mut borderline = 0;
    for (a, b) in &pairs {
        match probe_pair(&spec.f, d, &slice.point(*a), &slice.point(*b), &PAIR_T, tol) {
            PairOutcome::Violation(w) => return ConditionReport::refuted(id, w, pairs.len()),
            PairOutcome::Borderline => borderline += 1,
            PairOutcome::Fine => {}
        }
    }
    let rep = ConditionReport::certified(id, pairs.len() * PAIR_T.len());
    if borderline > 0 {
        rep.with_note(format!("{borderline} near-equal pairs without a flat segment"))
    } else {
        rep
    }
}

fn continuity_1d(spec: &FunctionSpec, slice: &LineSlice, grid: &[f64], tol: &Tolerances) -> ConditionReport {
    let id = ConditionId::FContinuous;
    let mut samples = 0;
    for &t in grid {
        let x = slice.point(t);
        let Ok(fx) = spec.f.value(&x) else {
            return ConditionReport::refuted(id, discontinuity(&x), samples + 1);
        };
        let mut rows: Vec<Vec<Option<(Vector, f64)>>> = Vec::new();
        for r in CONTINUITY_RADII {
            let mut row = Vec::new();
            for s in [r, -r] {
                if !slice.contains_parameter(t + s) {
                    row.push(None);
                    continue;
                }
                let p = slice.point(t + s);
                samples += 1;
                match spec.f.value(&p) {
                    Ok(v) => row.push(Some((p, v))),
                    Err(_) => return ConditionReport::refuted(id, discontinuity(&p), samples),
                }
            }
            rows.push(row);
        }
        if let Some(wit) = oscillation_witness(spec, &x, fx, &rows, tol) {
            return ConditionReport::refuted(id, wit, samples);
        }
    }
    ConditionReport::certified(id, samples)
}

/// The finite end at parameter `t`, pushed outward until it is no longer a
/// region member.
fn end_point(spec: &FunctionSpec, slice: &LineSlice, t: f64, outward: f64) -> Vector {
    let mut s = t;
    let mut p = slice.point(s);
    for _ in 0..8 {
        if !spec.domain.region_member(&p) {
            break;
        }
        s += outward * 1e-14 * (1.0 + s.abs());
        p = slice.point(s);
    }
    p
}

fn blowup_1d(spec: &FunctionSpec, slice: &LineSlice, tol: &Tolerances) -> ConditionReport {
    let id = ConditionId::BoundaryBlowup;
    let mut ends = Vec::new();
    if slice.lower_finite {
        ends.push((end_point(spec, slice, slice.lower, -1.0), slice.direction.clone()));
    }
    if slice.upper_finite {
        ends.push((end_point(spec, slice, slice.upper, 1.0), &slice.direction * -1.0));
    }
    if ends.is_empty() {
        return ConditionReport::certified(id, 0).with_note("no finite endpoint");
    }
    let mut samples = 0;
    let mut undecided = false;
    for (x0, inward) in &ends {
        let ladder = approach_ladder(&spec.f, &spec.domain, x0, inward, slice.length(), tol);
        samples += ladder.values.len();
        match ladder.outcome {
            LadderOutcome::Bounded => return ConditionReport::refuted(id, bounded_witness(x0, &ladder), samples),
            LadderOutcome::Undecided => undecided = true,
            LadderOutcome::BlowsUp => {}
        }
    }
    if undecided {
        ConditionReport::inconclusive(id, samples)
    } else {
        ConditionReport::certified(id, samples)
    }
}

/// One-dimensional analysis of `f` restricted to a line slice: strict
/// convexity on a parameter grid and random pairs, continuity by
/// oscillation, and blow-up at each finite end.
pub fn analyze_1d(spec: &FunctionSpec, slice: &LineSlice, k: usize, seed: u64, tol: &Tolerances) -> Verdict {
    if slice.missed {
        return Verdict::from_conditions(
            VerdictMode::Lines,
            all_conditions(Status::Inconclusive, "line misses the domain"),
            seed,
            tol,
        );
    }
    if slice.degenerate {
        return Verdict::from_conditions(
            VerdictMode::Lines,
            all_conditions(Status::Certified, "degenerate slice"),
            seed,
            tol,
        );
    }
    let len = slice.length();
    let grid: Vec<f64> = (0..GRID).map(|i| slice.lower + len * (i as f64 + 0.5) / GRID as f64).collect();
    let conditions = vec![
        ConditionReport::certified(ConditionId::DomainConvexOpen, 0).with_note("open interval by construction"),
        convexity_1d(spec, slice, &grid, k, seed, tol),
        continuity_1d(spec, slice, &grid, tol),
        blowup_1d(spec, slice, tol),
    ];
    Verdict::from_conditions(VerdictMode::Lines, conditions, seed, tol)
}

struct LineJob {
    base: Vector,
    direction: Vector,
    /// Second sampled member on the line, for pair lines.
    other: Option<Vector>,
}

enum LineResult {
    Nonconvex(Witness),
    Analyzed(Verdict),
}

fn outside_point(spec: &FunctionSpec, a: &Vector, b: &Vector, upper: f64) -> Witness {
    let len = a.dist(b);
    let t = (1..=64)
        .map(|j| (upper + (len - upper) * j as f64 / 65.0) / len)
        .find(|&t| !spec.domain.region_member(&a.lerp(b, t)))
        .unwrap_or(upper / len);
    Witness::new(WitnessKind::NonconvexDomain, vec![a.clone(), b.clone(), a.lerp(b, t)], vec![t])
}

fn run_line(spec: &FunctionSpec, job: &LineJob, k: usize, seed: u64, tol: &Tolerances) -> LineResult {
    let slice = slice_through(&spec.domain, &job.base, &job.direction);
    if let Some(b) = &job.other {
        let tb = job.base.dist(b);
        if !slice.contains_parameter(tb) {
            return LineResult::Nonconvex(outside_point(spec, &job.base, b, slice.upper.min(tb)));
        }
    }
    LineResult::Analyzed(analyze_1d(spec, &slice, k, seed, tol))
}

/// Reduction to lines: `m_lines` lines through random pairs of members plus
/// `2n` axis-aligned lines, each analyzed in one dimension.
pub fn line_restriction_verdict(
    spec: &FunctionSpec,
    m_lines: usize,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict, AnalysisError> {
    let d = &spec.domain;
    let n = d.dim();
    let pool = sample_domain_stream(d, (2 * m_lines + 2).max(16), seed, 1)?;
    let pts = pool.points();
    let mut jobs = Vec::new();
    for i in 0..m_lines {
        let mut r = rng::stream(seed, rng::tag::LINES, i as u64);
        let Some((a, b)) = distinct_pair(&mut r, pts.len()) else {
            continue;
        };
        if pts[a] == pts[b] {
            continue;
        }
        jobs.push(LineJob { base: pts[a].clone(), direction: &pts[b] - &pts[a], other: Some(pts[b].clone()) });
    }
    for rep in 0..2 {
        let mut r = rng::stream(seed, rng::tag::LINES, (m_lines + rep) as u64);
        let base = &pts[r.random_range(0..pts.len())];
        for j in 0..n {
            jobs.push(LineJob { base: base.clone(), direction: Vector::unit(n, j), other: None });
        }
    }
    let results: Vec<LineResult> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let line_seed = rng::stream(seed, rng::tag::SLICES, i as u64).next_u64();
            run_line(spec, job, k, line_seed, tol)
        })
        .collect();

    let mut conditions: Vec<ConditionReport> =
        ConditionId::MAIN.iter().map(|&id| ConditionReport::certified(id, 0)).collect();
    let mut degenerate = 0;
    for (i, (job, res)) in jobs.iter().zip(results).enumerate() {
        let line = format!("line {i} through {} along {}", job.base, job.direction);
        let reports = match res {
            LineResult::Nonconvex(w) => vec![ConditionReport::refuted(ConditionId::DomainConvexOpen, w, 1)],
            LineResult::Analyzed(v) => {
                if v.conditions.iter().any(|c| c.note.as_deref() == Some("degenerate slice")) {
                    degenerate += 1;
                }
                v.conditions
            }
        };
        for rep in reports {
            let slot = conditions.iter_mut().find(|c| c.id == rep.id).expect("main condition");
            slot.samples_used += rep.samples_used;
            let worse = matches!(
                (slot.status, rep.status),
                (Status::Certified, Status::Inconclusive) | (Status::Certified | Status::Inconclusive, Status::Refuted)
            );
            if worse {
                slot.status = rep.status;
                slot.witness = rep.witness;
                slot.note = Some(line.clone());
            }
        }
    }
    let summary = format!("{} lines analyzed, {degenerate} degenerate", jobs.len());
    for c in conditions.iter_mut().filter(|c| c.status == Status::Certified) {
        c.note = Some(summary.clone());
    }
    Ok(Verdict::from_conditions(VerdictMode::Lines, conditions, seed, tol))
}
