use rayon::prelude::*;

use crate::analysis::{
    approach_ladder, distinct_pair, epi_interior_member, AnalysisError, ConditionId, ConditionReport, EpiKind,
    EpigraphHandle, LadderOutcome, Verdict, VerdictMode, Witness, WitnessKind,
};
use crate::geometry::{boundary_on_ray, RayHit, Vector};
use crate::model::{sample_domain_stream, DomainSpec, EvalError, FunctionSpec, Objective};
use crate::{rng, Status, Tolerances};

const POOL: usize = 200;
const LIFTS: [f64; 3] = [0.0, 0.5, 2.0];
const COLUMN_RAYS: usize = 32;
const COLUMN_LIFTS: [f64; 3] = [0.0, 0.5, 2.0];
const STRUCTURED_CENTERS: usize = 64;
const PAIR_STEPS: [f64; 3] = [0.25, 0.05, 0.01];
const SEGMENT_T: [f64; 3] = [0.25, 0.5, 0.75];
const CHUNK: usize = 256;

/// A point of the epigraph's closure together with an epigraph point
/// within `reach` of it.
#[derive(Debug, Clone)]
struct ClosurePoint {
    p: Vector,
    near: Vector,
    reach: f64,
}

impl ClosurePoint {
    fn on_epigraph(x: &Vector, r: f64) -> Self {
        let p = x.with_height(r);
        ClosurePoint { near: p.clone(), p, reach: 0.0 }
    }
}

enum SegmentOutcome {
    Interior,
    Unresolved,
    Fails(Witness),
}

fn test_segment<O: Objective + ?Sized>(
    h: &EpigraphHandle<'_, O>,
    a: &ClosurePoint,
    b: &ClosurePoint,
    tol: &Tolerances,
) -> SegmentOutcome {
    if a.p == b.p {
        return SegmentOutcome::Interior;
    }
    let mut unresolved = false;
    for t in SEGMENT_T {
        let (zx, zr) = a.p.lerp(&b.p, t).split_height();
        let outside = !h.domain.region_member(&zx);
        let fz = if outside { None } else { Some(h.f.value(&zx)) };
        match fz {
            Some(Err(_)) => {
                return SegmentOutcome::Fails(Witness::new(WitnessKind::Discontinuity, vec![zx], vec![]));
            }
            Some(Ok(v)) if v < zr - tol.strict => match epi_interior_member(h, &zx, zr, tol) {
                Status::Certified => {}
                _ => unresolved = true,
            },
            _ => {
                let w = Witness::new(
                    WitnessKind::BoundarySegment,
                    vec![a.p.clone(), b.p.clone(), a.near.clone(), b.near.clone()],
                    vec![t, a.reach.max(b.reach)],
                );
                return SegmentOutcome::Fails(w);
            }
        }
    }
    if unresolved {
        SegmentOutcome::Unresolved
    } else {
        SegmentOutcome::Interior
    }
}

/// Graph points at `x +- s u` for the first step `s` keeping both ends in
/// the domain.
fn graph_pair<O: Objective + ?Sized>(
    f: &O,
    d: &DomainSpec,
    x: &Vector,
    u: &Vector,
) -> Option<(ClosurePoint, ClosurePoint)> {
    let extent = d.bounds().extent();
    PAIR_STEPS.iter().find_map(|&s| {
        let (a, b) = (x.offset(u, -s * extent), x.offset(u, s * extent));
        if !(d.domain_member(&a) && d.domain_member(&b)) {
            return None;
        }
        let (fa, fb) = (f.value(&a).ok()?, f.value(&b).ok()?);
        Some((ClosurePoint::on_epigraph(&a, fa), ClosurePoint::on_epigraph(&b, fb)))
    })
}

/// The probed direction along which `f` curves least at `x`, by second
/// differences of values only.
fn flattest_direction<O: Objective + ?Sized>(
    f: &O,
    d: &DomainSpec,
    x: &Vector,
    fx: f64,
    i: usize,
    seed: u64,
) -> Option<Vector> {
    let flat = d.flat();
    let h = 1e-3 * d.bounds().extent();
    let mut dirs: Vec<Vector> = flat.basis().to_vec();
    let mut r = rng::stream(seed, rng::tag::ORACLE, (1 << 32) + i as u64);
    dirs.extend((0..8).filter_map(|_| rng::unit_direction(&mut r, flat)));
    dirs.into_iter()
        .filter_map(|u| {
            let (a, b) = (x.offset(&u, h), x.offset(&u, -h));
            if !(d.region_member(&a) && d.region_member(&b)) {
                return None;
            }
            let curvature = (f.value(&a).ok()? - 2.0 * fx + f.value(&b).ok()?).abs();
            Some((curvature, u))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, u)| u)
}

/// Strict convexity of `Epi f` straight from the set definition: open
/// segments between closure points must stay in the relative interior
/// (inside `Aff(C) x R`).
///
/// Closure points are lifted graph points `(x, f(x) + u)`, and boundary
/// columns `(x0, L + u)` wherever `f` stays bounded approaching a boundary
/// point `x0`. Segments are drawn between column points, along axis and
/// flattest directions, and at random; `trials` bounds the total.
pub fn oracle_epigraph_strict_convexity(
    spec: &FunctionSpec,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict, AnalysisError> {
    let id = ConditionId::SetStrictlyConvex;
    let d = &spec.domain;
    let f = &spec.f;
    let finish = |report: ConditionReport| Verdict::from_conditions(VerdictMode::Oracle, vec![report], seed, tol);
    let pool = sample_domain_stream(d, POOL, seed, 2)?;
    let pts = pool.points();
    let mut values = Vec::with_capacity(pts.len());
    for x in pts {
        match f.value(x) {
            Ok(v) => values.push(v),
            Err(_) => {
                let w = Witness::new(WitnessKind::Discontinuity, vec![x.clone()], vec![]);
                return Ok(finish(ConditionReport::refuted(id, w, values.len() + 1)));
            }
        }
    }

    let mut closure: Vec<ClosurePoint> = pts
        .iter()
        .zip(&values)
        .flat_map(|(x, &v)| LIFTS.iter().map(move |u| ClosurePoint::on_epigraph(x, v + u)))
        .collect();

    let mut pairs: Vec<(ClosurePoint, ClosurePoint)> = Vec::new();
    let mut columns = 0;
    if d.flat().dim() > 0 {
        for (i, p) in pts.iter().enumerate().take(COLUMN_RAYS) {
            let mut r = rng::stream(seed, rng::tag::ORACLE, i as u64);
            let Some(u) = rng::unit_direction(&mut r, d.flat()) else {
                continue;
            };
            let RayHit::Boundary { point: x0, t, .. } = boundary_on_ray(d, p, &u) else {
                continue;
            };
            let ladder = approach_ladder(f, d, &x0, &(&u * -1.0), t, tol);
            if ladder.outcome != LadderOutcome::Bounded {
                continue;
            }
            let (Some(&last), Some(a)) = (ladder.values.last(), ladder.points.last()) else {
                continue;
            };
            let m = ladder.values.len();
            let rise = if m >= 2 { (last - ladder.values[m - 2]).max(0.0) } else { 0.0 };
            let base = last + rise;
            if base > tol.height_cap {
                continue;
            }
            let column: Vec<ClosurePoint> = COLUMN_LIFTS
                .iter()
                .map(|lift| {
                    let h = (base + lift).min(tol.height_cap);
                    ClosurePoint { p: x0.with_height(h), near: a.with_height(h), reach: a.dist(&x0) }
                })
                .collect();
            for (j, k) in [(0, 2), (0, 1), (1, 2)] {
                pairs.push((column[j].clone(), column[k].clone()));
            }
            closure.extend(column);
            columns += 1;
        }
    }

    let quarter = trials / 4;
    let mut axis = Vec::new();
    let mut flattest = Vec::new();
    for (i, (x, &fx)) in pts.iter().zip(&values).take(STRUCTURED_CENTERS).enumerate() {
        for u in d.flat().basis() {
            axis.extend(graph_pair(f, d, x, u));
        }
        if let Some(u) = flattest_direction(f, d, x, fx, i, seed) {
            flattest.extend(graph_pair(f, d, x, &u));
        }
    }
    axis.truncate(quarter);
    flattest.truncate(quarter);
    pairs.extend(axis);
    pairs.extend(flattest);
    let mut index = 0u64;
    while pairs.len() < trials.max(1) {
        let mut r = rng::stream(seed, rng::tag::PAIRS, (1 << 40) + index);
        index += 1;
        let Some((a, b)) = distinct_pair(&mut r, closure.len()) else {
            break;
        };
        pairs.push((closure[a].clone(), closure[b].clone()));
    }

    let h = EpigraphHandle::new(f, d, EpiKind::Epi);
    let mut unresolved = 0;
    let mut tested = 0;
    for chunk in pairs.chunks(CHUNK) {
        let outcomes: Vec<SegmentOutcome> = chunk.par_iter().map(|(a, b)| test_segment(&h, a, b, tol)).collect();
        tested += chunk.len();
        for o in outcomes {
            match o {
                SegmentOutcome::Fails(w) => {
                    let note = format!("{columns} boundary columns");
                    return Ok(finish(ConditionReport::refuted(id, w, tested * SEGMENT_T.len()).with_note(note)));
                }
                SegmentOutcome::Unresolved => unresolved += 1,
                SegmentOutcome::Interior => {}
            }
        }
    }
    let samples = tested * SEGMENT_T.len();
    let report = if unresolved > 0 {
        ConditionReport::inconclusive(id, samples).with_note(format!("{unresolved} of {tested} segments unresolved"))
    } else {
        ConditionReport::certified(id, samples).with_note(format!("{tested} segments, {columns} boundary columns"))
    };
    Ok(finish(report))
}

/// A one-dimensional step function on `(lo, lo + step * len]`: cell `i` is
/// `(lo + i step, lo + (i+1) step]` and carries `values[i]`. Points outside
/// take the nearest cell's value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, step: f64, values: Vec<f64>) -> Self {
        assert!(step > 0.0 && !values.is_empty(), "grid needs a positive step and at least one cell");
        GridFunction { lo, step, values }
    }
}

impl Objective for GridFunction {
    fn value(&self, x: &Vector) -> Result<f64, EvalError> {
        if x.dim() != 1 {
            return Err(EvalError::Dimension { expected: 1, found: x.dim() });
        }
        let cell = ((x[0] - self.lo) / self.step).ceil() - 1.0;
        let i = cell.clamp(0.0, (self.values.len() - 1) as f64) as usize;
        Ok(self.values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::usc_at;

    fn spec(f: &str, dim: usize, cons: &str, bounds: &str) -> FunctionSpec {
        FunctionSpec::parse(f, dim, cons, bounds, &Tolerances::default()).unwrap()
    }

    #[test]
    fn disc_has_a_vertical_boundary_segment() {
        let tol = Tolerances::default();
        let s = spec("x^2+y^2", 2, "x^2+y^2-1", "-1:1,-1:1");
        let v = oracle_epigraph_strict_convexity(&s, 2000, 42, &tol).unwrap();
        assert_eq!(v.overall, Status::Refuted);
        let w = v.witness().unwrap();
        assert_eq!(w.kind, WitnessKind::BoundarySegment);
        let (p, q) = (w.points[0].split_height(), w.points[1].split_height());
        assert!(p.0.dist(&q.0) < 1e-12, "segment is vertical");
        assert!((p.0.norm() - 1.0).abs() < 1e-6);
        assert!((p.1 - 1.0).abs() < 1e-3);
        assert!(w.replay(&s, &tol));
    }

    #[test]
    fn example_and_affine() {
        let tol = Tolerances::default();
        let ex = spec("1/((1-x^2)*(1-y^2))", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        let v = oracle_epigraph_strict_convexity(&ex, 2000, 42, &tol).unwrap();
        assert_eq!(v.overall, Status::Certified, "{:?}", v.conditions);
        let affine = spec("x", 1, "", "-10:10");
        let v = oracle_epigraph_strict_convexity(&affine, 500, 42, &tol).unwrap();
        assert_eq!(v.overall, Status::Refuted);
        assert!(v.witness().unwrap().replay(&affine, &tol));
    }

    #[test]
    fn grid_step_breaks_upper_semicontinuity() {
        let tol = Tolerances::default();
        let d = DomainSpec::parse(1, "", "-1:1", &tol).unwrap();
        let up = GridFunction::new(-1.0, 0.5, vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(up.value(&Vector::new(vec![0.0])).unwrap(), 0.0);
        assert_eq!(usc_at(&up, &d, &Vector::new(vec![0.0]), &tol), Status::Refuted);
        assert_eq!(usc_at(&up, &d, &Vector::new(vec![0.25]), &tol), Status::Certified);
        let down = GridFunction::new(-1.0, 0.5, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(usc_at(&down, &d, &Vector::new(vec![0.0]), &tol), Status::Certified);
    }
}
