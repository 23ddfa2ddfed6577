use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use super::verdict::ladder_is_bounded;
use super::{AnalysisError, ConditionId, ConditionReport, Verdict, VerdictMode, Witness, WitnessKind};
use crate::geometry::{affine_hull, boundary_on_ray, relative_interior_probe, PointCloud, RayHit, Vector, WithHull};
use crate::model::{sample_domain, value_gradient_hessian, DomainSpec, EvalError, FunctionSpec, Objective};
use crate::{rng, Status, Tolerances};

const DOMAIN_T: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const CONVEX_T: [f64; 3] = [0.25, 0.5, 0.75];
pub(crate) const CONTINUITY_RADII: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];
const APPROACH: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const APPROACH_EXTENSION: [f64; 3] = [1e-7, 1e-8, 1e-9];
const SEGMENT_HALF_LENGTHS: [f64; 4] = [0.5, 0.1, 0.01, 1e-3];
const MIN_FLAT_FRACTION: f64 = 1e-3;

pub(crate) fn distinct_pair<R: Rng>(rng: &mut R, n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Some((a, b))
}

/// First non-`None` item in index order.
fn first_found<T: Send>(items: Vec<Option<T>>) -> Option<T> {
    items.into_iter().flatten().next()
}

pub(crate) fn discontinuity(x: &Vector) -> Witness {
    Witness::new(WitnessKind::Discontinuity, vec![x.clone()], vec![])
}

/// Whether `f` agrees with its chord at the five points `t = j/6` of `[x, y]`.
pub(crate) fn flat_segment<O: Objective + ?Sized>(
    f: &O,
    domain: &DomainSpec,
    x: &Vector,
    y: &Vector,
    fx: f64,
    fy: f64,
    tol: &Tolerances,
) -> bool {
    (1..=5).all(|j| {
        let t = j as f64 / 6.0;
        let z = x.lerp(y, t);
        let chord = (1.0 - t) * fx + t * fy;
        domain.region_member(&z) && f.value(&z).is_ok_and(|fz| (fz - chord).abs() <= tol.eq_at(chord))
    })
}

pub(crate) enum PairOutcome {
    Fine,
    Violation(Witness),
    /// Near-equality that the five-point test did not confirm.
    Borderline,
}

/// Midpoint probe on one pair: a violation of convexity, or equality along
/// the whole segment, refutes strict convexity.
pub(crate) fn probe_pair<O: Objective + ?Sized>(
    f: &O,
    domain: &DomainSpec,
    x: &Vector,
    y: &Vector,
    ts: &[f64],
    tol: &Tolerances,
) -> PairOutcome {
    let (fx, fy) = match (f.value(x), f.value(y)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(_), _) => return PairOutcome::Violation(discontinuity(x)),
        (_, Err(_)) => return PairOutcome::Violation(discontinuity(y)),
    };
    let dist2 = x.dist(y).powi(2);
    // Shorter segments match their chord to rounding for any smooth f.
    let resolvable = x.dist(y) >= MIN_FLAT_FRACTION * domain.bounds().extent();
    let mut borderline = false;
    for &t in ts {
        let z = x.lerp(y, t);
        if !domain.region_member(&z) {
            continue;
        }
        let Ok(fz) = f.value(&z) else {
            return PairOutcome::Violation(discontinuity(&z));
        };
        let chord = (1.0 - t) * fx + t * fy;
        let eq = tol.eq_at(chord);
        if fz > chord + eq {
            return PairOutcome::Violation(Witness::new(
                WitnessKind::MidpointViolation,
                vec![x.clone(), y.clone()],
                vec![t, fx, fy, fz, 0.0],
            ));
        }
        let gap = tol.sc * t * (1.0 - t) * dist2;
        if fz > chord - gap.max(eq) {
            if resolvable && flat_segment(f, domain, x, y, fx, fy, tol) {
                let zm = x.lerp(y, 0.5);
                let fm = f.value(&zm).unwrap_or(f64::NAN);
                let chord_m = 0.5 * (fx + fy);
                return PairOutcome::Violation(Witness::new(
                    WitnessKind::MidpointViolation,
                    vec![x.clone(), y.clone()],
                    vec![0.5, fx, fy, fm, tol.eq_at(chord_m)],
                ));
            }
            borderline = true;
        }
    }
    if borderline {
        PairOutcome::Borderline
    } else {
        PairOutcome::Fine
    }
}

/// Convexity of `C` by segment probes and relative openness by ball probes
/// inside the hull of the samples.
pub fn check_domain_convex_open(
    d: &DomainSpec,
    pool: &PointCloud,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> ConditionReport {
    let id = ConditionId::DomainConvexOpen;
    let pts = pool.points();
    let found = first_found(
        (0..k)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::stream(seed, rng::tag::DOMAIN, i as u64);
                let (a, b) = distinct_pair(&mut r, pts.len())?;
                let (x, y) = (&pts[a], &pts[b]);
                DOMAIN_T.iter().find_map(|&t| {
                    let z = x.lerp(y, t);
                    (!d.domain_member(&z))
                        .then(|| Witness::new(WitnessKind::NonconvexDomain, vec![x.clone(), y.clone(), z], vec![t]))
                })
            })
            .collect(),
    );
    let pair_samples = k * DOMAIN_T.len();
    if let Some(w) = found {
        return ConditionReport::refuted(id, w, pair_samples);
    }

    let hull = affine_hull(pool, tol);
    let body = WithHull { inner: d, hull };
    let radii = tol.refining_radii();
    let m = (k / 10).max(1).min(pts.len());
    let outcomes: Vec<_> = pts[..m]
        .par_iter()
        .map(|v| relative_interior_probe(v, &body, &radii, tol).expect("pool points share the dimension"))
        .collect();
    let samples = pair_samples + m;
    for (v, o) in pts.iter().zip(&outcomes) {
        if o.status == Status::Refuted {
            let dir = o.exit_direction.clone().unwrap_or_else(|| Vector::zeros(v.dim()));
            let points = std::iter::once(v.clone()).chain(tol.exit_steps.iter().map(|&s| v.offset(&dir, s))).collect();
            let w = Witness::new(WitnessKind::NonconvexDomain, points, tol.exit_steps.clone());
            return ConditionReport::refuted(id, w, samples);
        }
    }
    let unresolved = outcomes.iter().filter(|o| o.status == Status::Inconclusive).count();
    if unresolved > 0 {
        return ConditionReport::inconclusive(id, samples)
            .with_note(format!("{unresolved} of {m} openness probes unresolved"));
    }
    ConditionReport::certified(id, samples).with_note(format!("relative dimension {}", body.hull.dim()))
}

enum HessianOutcome {
    Skipped,
    Positive(bool),
    Negative,
    Witness(Witness),
}

fn hessian_probe(spec: &FunctionSpec, p: &Vector, j: usize, seed: u64, tol: &Tolerances) -> HessianOutcome {
    let d = &spec.domain;
    let flat = d.flat();
    if flat.dim() == 0 {
        return HessianOutcome::Skipped;
    }
    let h = match value_gradient_hessian(&spec.f, p) {
        Ok((_, _, h)) => h,
        Err(EvalError::NonDifferentiable(_)) => return HessianOutcome::Skipped,
        Err(_) => return HessianOutcome::Witness(discontinuity(p)),
    };
    let basis = flat.basis();
    let m = basis.len();
    let b = DMatrix::from_fn(d.dim(), m, |r, c| basis[c][r]);
    let projected = b.transpose() * &h * &b;
    let eig = SymmetricEigen::new(projected);
    let (imin, &lmin) =
        eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty spectrum");
    let lmax = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let scale = 1e-8 * (1.0 + lmax.abs());
    let v = flat.direction_from_coords(eig.eigenvectors.column(imin).as_slice());
    let extent = d.bounds().extent();

    if lmin.abs() <= scale || lmin < -scale {
        let concave = lmin < -scale;
        for &hl in &SEGMENT_HALF_LENGTHS {
            let s = hl * extent;
            let (x, y) = (p.offset(&v, -s), p.offset(&v, s));
            if !(d.domain_member(&x) && d.domain_member(&y)) {
                continue;
            }
            let (Ok(fx), Ok(fy), Ok(fp)) = (spec.f.value(&x), spec.f.value(&y), spec.f.value(p)) else {
                continue;
            };
            let chord = 0.5 * (fx + fy);
            if concave && fp > chord + tol.eq_at(chord) {
                return HessianOutcome::Witness(Witness::new(
                    WitnessKind::MidpointViolation,
                    vec![x, y],
                    vec![0.5, fx, fy, fp, 0.0],
                ));
            }
            if !concave && flat_segment(&spec.f, d, &x, &y, fx, fy, tol) {
                let fm = spec.f.value(&x.lerp(&y, 0.5)).unwrap_or(fp);
                return HessianOutcome::Witness(Witness::new(
                    WitnessKind::MidpointViolation,
                    vec![x, y],
                    vec![0.5, fx, fy, fm, tol.eq_at(chord)],
                ));
            }
        }
        if concave {
            return HessianOutcome::Negative;
        }
    }
    let mut r = rng::stream(seed, rng::tag::HESSIAN, j as u64);
    let u = rng::unit_direction(&mut r, flat).expect("positive-dimensional flat");
    let hu = &h * nalgebra::DVector::from_column_slice(u.coords());
    let curvature: f64 = u.coords().iter().zip(hu.iter()).map(|(a, b)| a * b).sum();
    HessianOutcome::Positive(curvature > 0.0)
}

/// Midpoint probes on random pairs plus a projected-Hessian probe.
pub fn check_strict_convexity(
    spec: &FunctionSpec,
    pool: &PointCloud,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> ConditionReport {
    let id = ConditionId::FStrictlyConvex;
    let d = &spec.domain;
    let pts = pool.points();
    if let Some(x) = pts.iter().find(|x| spec.f.value(x).is_err()) {
        return ConditionReport::refuted(id, discontinuity(x), 1);
    }
    let outcomes: Vec<Option<PairOutcome>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, rng::tag::PAIRS, i as u64);
            let (a, b) = distinct_pair(&mut r, pts.len())?;
            Some(probe_pair(&spec.f, d, &pts[a], &pts[b], &CONVEX_T, tol))
        })
        .collect();
    let mut samples = k * CONVEX_T.len();
    let mut borderline = 0;
    for o in outcomes.into_iter().flatten() {
        match o {
            PairOutcome::Violation(w) => return ConditionReport::refuted(id, w, samples),
            PairOutcome::Borderline => borderline += 1,
            PairOutcome::Fine => {}
        }
    }

    let m = (k / 10).max(1).min(pts.len());
    let hess: Vec<HessianOutcome> =
        pts[..m].par_iter().enumerate().map(|(j, p)| hessian_probe(spec, p, j, seed, tol)).collect();
    samples += m;
    let (mut positive, mut negative, mut skipped) = (0, 0, 0);
    for h in hess {
        match h {
            HessianOutcome::Witness(w) => return ConditionReport::refuted(id, w, samples),
            HessianOutcome::Positive(p) => positive += usize::from(p),
            HessianOutcome::Negative => negative += 1,
            HessianOutcome::Skipped => skipped += 1,
        }
    }
    let note = format!(
        "{borderline} near-equal pairs without a flat segment; hessian: {positive} positive directions, {skipped} skipped"
    );
    if negative > 0 {
        return ConditionReport::inconclusive(id, samples)
            .with_note(format!("{note}; {negative} negative eigenvalues without a witness"));
    }
    ConditionReport::certified(id, samples).with_note(note)
}

/// Directions probed around a point: `±` the flat's basis, then random.
fn ball_directions(d: &DomainSpec, seed: u64, tag: u64, index: u64, random: usize) -> Vec<Vector> {
    let flat = d.flat();
    let mut dirs: Vec<Vector> = flat.basis().iter().flat_map(|b| [b.clone(), b * -1.0]).collect();
    let mut r = rng::stream(seed, tag, index);
    dirs.extend((0..random).filter_map(|_| rng::unit_direction(&mut r, flat)));
    dirs
}

/// Largest value of `f` on the probe ball around `x`, at the first radius
/// whose probe points all lie in the region: a local upper bound.
pub fn local_upper_bound<O: Objective + ?Sized>(f: &O, d: &DomainSpec, x: &Vector, seed: u64) -> Option<(f64, f64)> {
    let dirs = ball_directions(d, seed, rng::tag::CONTINUITY, u64::MAX, 8);
    let fx = f.value(x).ok()?;
    for r in CONTINUITY_RADII {
        let pts: Vec<Vector> = dirs.iter().map(|u| x.offset(u, r)).collect();
        if pts.iter().all(|p| d.region_member(p)) {
            let mut m = fx;
            for p in &pts {
                m = m.max(f.value(p).ok()?);
            }
            return Some((r, m));
        }
    }
    None
}

enum ContinuityOutcome {
    Fine(Option<f64>),
    Witness(Witness),
}

/// Oscillation around `x` that fails to shrink. `rows[i]` holds the probes
/// at the `i`-th radius, largest first. A radius whose whole row lies in the
/// region sets the scale; when the next radius still deviates by more than
/// half of it, either every smaller radius does too, or bisection towards the
/// deviating point must end on a jump or an evaluation failure.
pub(crate) fn oscillation_witness(
    spec: &FunctionSpec,
    x: &Vector,
    fx: f64,
    rows: &[Vec<Option<(Vector, f64)>>],
    tol: &Tolerances,
) -> Option<Witness> {
    fn deviation(row: &[Option<(Vector, f64)>], fx: f64) -> Option<(&Vector, f64)> {
        row.iter().flatten().map(|(q, v)| (q, (v - fx).abs())).max_by(|a, b| a.1.total_cmp(&b.1))
    }
    for (i, big) in rows.iter().enumerate() {
        if big.iter().any(Option::is_none) || i + 1 == rows.len() {
            continue;
        }
        let (_, osc_big) = deviation(big, fx)?;
        let threshold = 0.5 * osc_big + tol.eq_at(fx);
        let smaller: Vec<_> = rows[i + 1..].iter().map(|r| deviation(r, fx)).collect();
        let Some((q, osc_small)) = smaller[0] else {
            continue;
        };
        if osc_small <= threshold {
            continue;
        }
        if smaller.iter().all(|d| d.is_some_and(|(_, o)| o > threshold)) {
            let (q, osc_small) = smaller.last().copied().flatten()?;
            return Some(Witness::new(
                WitnessKind::Discontinuity,
                vec![x.clone(), q.clone()],
                vec![osc_big, osc_small],
            ));
        }
        return localize_jump(spec, x, q, tol);
    }
    None
}

/// Bisect `[a, b]`, keeping the half with the larger change of `f`. A jump
/// survives down to adjacent floating-point points; a continuous change
/// halves with the interval.
fn localize_jump(spec: &FunctionSpec, a: &Vector, b: &Vector, tol: &Tolerances) -> Option<Witness> {
    let d = &spec.domain;
    let value = |p: &Vector| spec.f.value(p).ok();
    let (mut a, mut b) = (a.clone(), b.clone());
    let (mut fa, mut fb) = (value(&a)?, value(&b)?);
    let start = (fb - fa).abs();
    for _ in 0..200 {
        let m = a.lerp(&b, 0.5);
        if m == a || m == b {
            break;
        }
        if !d.region_member(&m) {
            return None;
        }
        let Some(fm) = value(&m) else {
            return Some(discontinuity(&m));
        };
        if (fm - fa).abs() >= (fb - fm).abs() {
            (b, fb) = (m, fm);
        } else {
            (a, fa) = (m, fm);
        }
    }
    let jump = (fb - fa).abs();
    (jump > 0.5 * start + tol.eq_at(fa))
        .then(|| Witness::new(WitnessKind::Discontinuity, vec![a, b], vec![start, jump]))
}

fn continuity_at(spec: &FunctionSpec, x: &Vector, i: usize, seed: u64, tol: &Tolerances) -> ContinuityOutcome {
    let d = &spec.domain;
    let Ok(fx) = spec.f.value(x) else {
        return ContinuityOutcome::Witness(discontinuity(x));
    };
    let dirs = ball_directions(d, seed, rng::tag::CONTINUITY, i as u64, 8);
    // values[r][j]: f at radius r along direction j, when a member.
    let mut values: Vec<Vec<Option<(Vector, f64)>>> = Vec::with_capacity(CONTINUITY_RADII.len());
    for r in CONTINUITY_RADII {
        let mut row = Vec::with_capacity(dirs.len());
        for u in &dirs {
            let p = x.offset(u, r);
            if !d.region_member(&p) {
                row.push(None);
                continue;
            }
            match spec.f.value(&p) {
                Ok(v) => row.push(Some((p, v))),
                Err(_) => return ContinuityOutcome::Witness(discontinuity(&p)),
            }
        }
        values.push(row);
    }
    if let Some(w) = oscillation_witness(spec, x, fx, &values, tol) {
        return ContinuityOutcome::Witness(w);
    }
    let bound = values
        .iter()
        .find(|row| row.iter().all(Option::is_some))
        .map(|row| row.iter().flatten().fold(fx, |m, (_, v)| m.max(*v)));
    ContinuityOutcome::Fine(bound)
}

/// Oscillation on shrinking balls must contract; local upper bounds are
/// recorded as a by-product.
pub fn check_continuity(
    spec: &FunctionSpec,
    pool: &PointCloud,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> ConditionReport {
    let id = ConditionId::FContinuous;
    let pts = pool.points();
    let m = k.min(pts.len());
    let outcomes: Vec<ContinuityOutcome> =
        pts[..m].par_iter().enumerate().map(|(i, x)| continuity_at(spec, x, i, seed, tol)).collect();
    let samples = m * (CONTINUITY_RADII.len() * (2 * spec.domain.flat().dim() + 8) + 1);
    let mut bounded = 0;
    let mut largest = f64::NEG_INFINITY;
    for o in outcomes {
        match o {
            ContinuityOutcome::Witness(w) => return ConditionReport::refuted(id, w, samples),
            ContinuityOutcome::Fine(Some(b)) => {
                bounded += 1;
                largest = largest.max(b);
            }
            ContinuityOutcome::Fine(None) => {}
        }
    }
    let note = if bounded > 0 {
        format!("local upper bounds at {bounded} of {m} points, largest {largest:.6e}")
    } else {
        "no ball fit inside the region".to_string()
    };
    ConditionReport::certified(id, samples).with_note(note)
}

/// How an approach ladder ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOutcome {
    BlowsUp,
    Bounded,
    Undecided,
}

/// Values of `f` approaching the boundary point `x0` along `x0 + s * inward`.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub points: Vec<Vector>,
    pub values: Vec<f64>,
    pub outcome: LadderOutcome,
}

fn increasing(values: &[f64]) -> bool {
    values.len() >= 3 && values[values.len() - 3..].windows(2).all(|w| w[1] > w[0])
}

/// Evaluate `f` at distances `1e-1 .. 1e-6` from `x0` (extended to `1e-9`
/// while values keep growing below the threshold), skipping rungs at or
/// beyond `max_dist` and rungs outside the region.
pub fn approach_ladder<O: Objective + ?Sized>(
    f: &O,
    d: &DomainSpec,
    x0: &Vector,
    inward: &Vector,
    max_dist: f64,
    tol: &Tolerances,
) -> Ladder {
    let mut points = Vec::new();
    let mut values = Vec::new();
    let rung = |s: f64, points: &mut Vec<Vector>, values: &mut Vec<f64>| {
        if s >= max_dist {
            return true;
        }
        let a = x0.offset(inward, s);
        if !d.region_member(&a) {
            return true;
        }
        match f.value(&a) {
            Ok(v) => {
                points.push(a);
                values.push(v);
                true
            }
            Err(_) => false,
        }
    };
    let mut clean = APPROACH.iter().all(|&s| rung(s, &mut points, &mut values));
    for &s in &APPROACH_EXTENSION {
        let growing = increasing(&values) && !ladder_is_bounded(&values, tol);
        let last = values.last().copied().unwrap_or(f64::NEG_INFINITY);
        if !clean || !growing || last >= tol.blowup_threshold {
            break;
        }
        clean = rung(s, &mut points, &mut values);
    }
    let outcome = if ladder_is_bounded(&values, tol) {
        LadderOutcome::Bounded
    } else if increasing(&values) && values[values.len() - 1] >= tol.blowup_threshold {
        LadderOutcome::BlowsUp
    } else {
        LadderOutcome::Undecided
    };
    Ladder { points, values, outcome }
}

pub(crate) fn bounded_witness(x0: &Vector, ladder: &Ladder) -> Witness {
    let points = std::iter::once(x0.clone()).chain(ladder.points.iter().cloned()).collect();
    Witness::new(WitnessKind::BoundedAtBoundary, points, ladder.values.clone())
}

/// Boundary points found by bisection along random rays; `f` must climb an
/// escalating ladder towards each.
pub fn check_boundary_blowup(
    spec: &FunctionSpec,
    pool: &PointCloud,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> ConditionReport {
    let id = ConditionId::BoundaryBlowup;
    let d = &spec.domain;
    let pts = pool.points();
    if d.flat().dim() == 0 {
        return ConditionReport::certified(id, 0).with_note("relative boundary is empty");
    }
    let results: Vec<Option<(Vector, Ladder)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let p = &pts[i % pts.len()];
            let mut r = rng::stream(seed, rng::tag::RAYS, i as u64);
            let u = rng::unit_direction(&mut r, d.flat())?;
            match boundary_on_ray(d, p, &u) {
                RayHit::Boundary { point, t, .. } => {
                    let ladder = approach_ladder(&spec.f, d, &point, &(&u * -1.0), t, tol);
                    Some((point, ladder))
                }
                _ => None,
            }
        })
        .collect();
    let hits = results.iter().flatten().count();
    let samples: usize = results.iter().flatten().map(|(_, l)| l.values.len()).sum();
    if hits == 0 {
        return ConditionReport::certified(id, k).with_note("no relative boundary reached inside the box");
    }
    let mut undecided = 0;
    for (x0, ladder) in results.iter().flatten() {
        match ladder.outcome {
            LadderOutcome::Bounded => return ConditionReport::refuted(id, bounded_witness(x0, ladder), samples),
            LadderOutcome::Undecided => undecided += 1,
            LadderOutcome::BlowsUp => {}
        }
    }
    if undecided > 0 {
        ConditionReport::inconclusive(id, samples).with_note(format!("{undecided} of {hits} approaches undecided"))
    } else {
        ConditionReport::certified(id, samples).with_note(format!("{hits} boundary approaches blow up"))
    }
}

/// The three hypotheses of the analytic characterization, in order: domain,
/// strict convexity and continuity, blow-up. All checks always run.
pub fn main_theorem_verdict(
    spec: &FunctionSpec,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict, AnalysisError> {
    let pool = sample_domain(&spec.domain, k, seed)?;
    let conditions = vec![
        check_domain_convex_open(&spec.domain, &pool, k, seed, tol),
        check_strict_convexity(spec, &pool, k, seed, tol),
        check_continuity(spec, &pool, k, seed, tol),
        check_boundary_blowup(spec, &pool, k, seed, tol),
    ];
    Ok(Verdict::from_conditions(VerdictMode::MainTheorem, conditions, seed, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: &str, dim: usize, cons: &str, bounds: &str) -> FunctionSpec {
        FunctionSpec::parse(f, dim, cons, bounds, &Tolerances::default()).unwrap()
    }

    fn run(s: &FunctionSpec) -> Verdict {
        main_theorem_verdict(s, 300, 42, &Tolerances::default()).unwrap()
    }

    #[test]
    fn disc_fails_only_blowup() {
        let tol = Tolerances::default();
        let s = spec("x^2+y^2", 2, "x^2+y^2-1", "-1:1,-1:1");
        let v = run(&s);
        assert_eq!(v.overall, Status::Refuted);
        assert_eq!(v.failing(), vec![ConditionId::BoundaryBlowup]);
        for c in &v.conditions[..3] {
            assert_eq!(c.status, Status::Certified, "{:?}", c);
        }
        let w = v.witness().unwrap();
        assert_eq!(w.kind, WitnessKind::BoundedAtBoundary);
        assert!(w.replay(&s, &tol));
        assert!(w.values.iter().all(|&x| x <= 1.0));
    }

    #[test]
    fn example_function_is_certified() {
        let s = spec("1/((1-x^2)*(1-y^2))", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        let v = run(&s);
        assert_eq!(v.overall, Status::Certified, "{:#?}", v.conditions);
    }

    #[test]
    fn flat_direction_is_refuted() {
        let tol = Tolerances::default();
        let s = spec("x^2", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        let v = run(&s);
        let c = v.condition(ConditionId::FStrictlyConvex).unwrap();
        assert_eq!(c.status, Status::Refuted);
        assert!(c.witness.as_ref().unwrap().replay(&s, &tol));
    }

    #[test]
    fn abs_is_not_strictly_convex() {
        let tol = Tolerances::default();
        let s = spec("abs(x)", 1, "", "-10:10");
        let v = run(&s);
        let c = v.condition(ConditionId::FStrictlyConvex).unwrap();
        assert_eq!(c.status, Status::Refuted);
        assert!(c.witness.as_ref().unwrap().replay(&s, &tol));
        assert_eq!(v.condition(ConditionId::BoundaryBlowup).unwrap().status, Status::Certified);
    }

    #[test]
    fn annulus_is_not_convex() {
        let tol = Tolerances::default();
        let s = spec("x^2+y^2", 2, "0.25-x^2-y^2; x^2+y^2-1", "-1:1,-1:1");
        let v = run(&s);
        let c = v.condition(ConditionId::DomainConvexOpen).unwrap();
        assert_eq!(c.status, Status::Refuted);
        let w = c.witness.as_ref().unwrap();
        assert_eq!(w.kind, WitnessKind::NonconvexDomain);
        assert!(w.replay(&s, &tol));
    }

    #[test]
    fn pole_inside_the_domain_is_discontinuous() {
        let tol = Tolerances::default();
        let s = spec("1/x", 1, "", "-0.01:0.01");
        let pool = sample_domain(&s.domain, 1000, 42).unwrap();
        let c = check_continuity(&s, &pool, 1000, 42, &tol);
        assert_eq!(c.status, Status::Refuted);
        assert!(c.witness.as_ref().unwrap().replay(&s, &tol));
    }

    #[test]
    fn constant_is_continuous() {
        let tol = Tolerances::default();
        let s = spec("1", 2, "", "-1:1,-1:1");
        let pool = sample_domain(&s.domain, 50, 1).unwrap();
        assert_eq!(check_continuity(&s, &pool, 50, 1, &tol).status, Status::Certified);
    }

    #[test]
    fn example_ladder_blows_up() {
        let tol = Tolerances::default();
        let s = spec("1/((1-x^2)*(1-y^2))", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        let l =
            approach_ladder(&s.f, &s.domain, &Vector::new(vec![1.0, 0.3]), &Vector::new(vec![-1.0, 0.0]), 1.0, &tol);
        assert_eq!(l.outcome, LadderOutcome::BlowsUp);
        assert!(*l.values.last().unwrap() >= 1e6);
    }
}
