use std::fmt;

use serde::Serialize;

use crate::geometry::{Segment, Vector};
use crate::model::{FunctionSpec, Objective};
use crate::{Status, Tolerances};

/// Which hypothesis a report speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    DomainConvexOpen,
    FStrictlyConvex,
    FContinuous,
    BoundaryBlowup,
    /// Set-level strict convexity, reported by the oracles.
    SetStrictlyConvex,
}

impl ConditionId {
    pub const MAIN: [ConditionId; 4] = [
        ConditionId::DomainConvexOpen,
        ConditionId::FStrictlyConvex,
        ConditionId::FContinuous,
        ConditionId::BoundaryBlowup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::DomainConvexOpen => "domain_convex_open",
            ConditionId::FStrictlyConvex => "f_strictly_convex",
            ConditionId::FContinuous => "f_continuous",
            ConditionId::BoundaryBlowup => "boundary_blowup",
            ConditionId::SetStrictlyConvex => "set_strictly_convex",
        }
    }

    pub fn from_name(s: &str) -> Option<ConditionId> {
        [
            ConditionId::DomainConvexOpen,
            ConditionId::FStrictlyConvex,
            ConditionId::FContinuous,
            ConditionId::BoundaryBlowup,
            ConditionId::SetStrictlyConvex,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    MidpointViolation,
    BoundarySegment,
    BoundedAtBoundary,
    NonconvexDomain,
    Discontinuity,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::MidpointViolation => "midpoint_violation",
            WitnessKind::BoundarySegment => "boundary_segment",
            WitnessKind::BoundedAtBoundary => "bounded_at_boundary",
            WitnessKind::NonconvexDomain => "nonconvex_domain",
            WitnessKind::Discontinuity => "discontinuity",
        }
    }
}

/// Concrete data refuting a condition.
///
/// Layouts, by kind:
///
/// * `midpoint_violation`: points `[x, y]`, values `[t, f(x), f(y), f(z), gap]`
///   with `z = (1-t)x + ty`. Violation: `f(z) >= (1-t)f(x) + t f(y) - gap`.
/// * `nonconvex_domain`: either points `[x, y, z]`, values `[t]` (members
///   `x`, `y` whose segment point `z` is not a member), or points
///   `[v, p_1, ..., p_m]`, values `[s_1, ..., s_m]` (member `v` whose
///   neighbours `p_i` at distance `s_i` all lie outside the region).
/// * `bounded_at_boundary`: points `[x0, a_1, ..., a_m]`, values
///   `[f(a_1), ..., f(a_m)]`; `x0` is not a member, the `a_i` approach it and
///   the values level off or decrease.
/// * `discontinuity`: points `[x]`, no values (evaluation fails at a member);
///   or points `[x, q]`, values `[osc_big, osc_small]` where `|f(q)-f(x)|`
///   exceeds `osc_big / 2` although `q` is at least a hundred times closer
///   than the points behind `osc_big`.
/// * `boundary_segment`: points `[P, Q, P', Q']` in `R^(n+1)`, values
///   `[t, reach]`. `P'`, `Q'` are epigraph points within `reach` of the
///   closure points `P`, `Q`; `Z = (1-t)P + tQ` lies outside the region or on
///   or below the graph. For convex bodies the layout is `[a, b]`, `[t]`
///   and `Z` fails the relative-interior probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub points: Vec<Vector>,
    pub values: Vec<f64>,
}

impl Witness {
    pub fn new(kind: WitnessKind, points: Vec<Vector>, values: Vec<f64>) -> Self {
        Witness { kind, points, values }
    }

    /// Recheck the stored violation using only evaluation and domain
    /// membership.
    pub fn replay(&self, spec: &FunctionSpec, tol: &Tolerances) -> bool {
        let d = &spec.domain;
        let f = |x: &Vector| spec.f.value(x).ok();
        match self.kind {
            WitnessKind::MidpointViolation => {
                let ([x, y], [t, _, _, _, gap]) = (&self.points[..], &self.values[..]) else {
                    return false;
                };
                let z = x.lerp(y, *t);
                if !(d.domain_member(x) && d.domain_member(y) && d.domain_member(&z)) || x == y {
                    return false;
                }
                match (f(x), f(y), f(&z)) {
                    (Some(fx), Some(fy), Some(fz)) => fz >= (1.0 - t) * fx + t * fy - gap,
                    _ => false,
                }
            }
            WitnessKind::NonconvexDomain => {
                if let ([x, y, z], [t]) = (&self.points[..], &self.values[..]) {
                    let on_segment = z.dist(&x.lerp(y, *t)) <= tol.aff;
                    on_segment && d.domain_member(x) && d.domain_member(y) && !d.region_member(z)
                } else {
                    let Some((v, rest)) = self.points.split_first() else {
                        return false;
                    };
                    !rest.is_empty()
                        && rest.len() == self.values.len()
                        && d.region_member(v)
                        && rest
                            .iter()
                            .zip(&self.values)
                            .all(|(p, s)| !d.region_member(p) && (p.dist(v) - s).abs() <= tol.aff)
                }
            }
            WitnessKind::BoundedAtBoundary => {
                let Some((x0, approach)) = self.points.split_first() else {
                    return false;
                };
                if d.region_member(x0) || approach.len() != self.values.len() || approach.len() < 2 {
                    return false;
                }
                for (a, &v) in approach.iter().zip(&self.values) {
                    match f(a) {
                        Some(fa) if d.region_member(a) && (fa - v).abs() <= tol.eq_at(v) => {}
                        _ => return false,
                    }
                }
                let dists: Vec<f64> = approach.iter().map(|a| a.dist(x0)).collect();
                dists.windows(2).all(|w| w[1] < w[0]) && ladder_is_bounded(&self.values, tol)
            }
            WitnessKind::Discontinuity => match (&self.points[..], &self.values[..]) {
                ([x], []) => d.region_member(x) && f(x).is_none(),
                ([x, q], [big, _]) => match (f(x), f(q)) {
                    (Some(fx), Some(fq)) => {
                        d.region_member(x) && d.region_member(q) && (fq - fx).abs() > 0.5 * big + tol.eq_at(fx)
                    }
                    _ => d.region_member(x) && d.region_member(q),
                },
                _ => false,
            },
            WitnessKind::BoundarySegment => {
                let ([p, q, pa, qa], [t, reach]) = (&self.points[..], &self.values[..]) else {
                    return false;
                };
                if p == q || !(0.0 < *t && *t < 1.0) {
                    return false;
                }
                for (c, a) in [(p, pa), (q, qa)] {
                    let (ax, ar) = a.split_height();
                    let near = c.dist(a) <= reach + tol.aff;
                    let in_epi = d.region_member(&ax) && f(&ax).is_some_and(|fa| fa <= ar + tol.eq_at(ar));
                    if !(near && in_epi) {
                        return false;
                    }
                }
                let (zx, zr) = p.lerp(q, *t).split_height();
                !d.region_member(&zx) || f(&zx).is_none_or(|fz| fz >= zr - tol.strict)
            }
        }
    }

    /// The open segment stored in a segment-shaped witness.
    pub fn segment(&self) -> Option<Segment> {
        match self.kind {
            WitnessKind::BoundarySegment | WitnessKind::MidpointViolation if self.points.len() >= 2 => {
                Some(Segment::open(self.points[0].clone(), self.points[1].clone()))
            }
            _ => None,
        }
    }
}

/// A finite approach ladder has stopped growing: either the last step
/// decreases, or the increments contract by at least half.
pub(crate) fn ladder_is_bounded(values: &[f64], tol: &Tolerances) -> bool {
    let m = values.len();
    if m < 2 {
        return false;
    }
    let last = values[m - 1] - values[m - 2];
    if last <= 0.0 {
        return true;
    }
    if m < 3 {
        return false;
    }
    let prev = values[m - 2] - values[m - 3];
    prev <= 0.0 || last <= 0.5 * prev + tol.eq_at(values[m - 1])
}

/// Outcome for one hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub status: Status,
    pub witness: Option<Witness>,
    pub samples_used: usize,
    /// Free-form diagnostics (certificates, skipped work, offending line).
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn certified(id: ConditionId, samples_used: usize) -> Self {
        ConditionReport { id, status: Status::Certified, witness: None, samples_used, note: None }
    }

    pub fn refuted(id: ConditionId, witness: Witness, samples_used: usize) -> Self {
        ConditionReport { id, status: Status::Refuted, witness: Some(witness), samples_used, note: None }
    }

    pub fn inconclusive(id: ConditionId, samples_used: usize) -> Self {
        ConditionReport { id, status: Status::Inconclusive, witness: None, samples_used, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMode {
    MainTheorem,
    Oracle,
    Lines,
}

impl VerdictMode {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictMode::MainTheorem => "main_theorem",
            VerdictMode::Oracle => "oracle",
            VerdictMode::Lines => "lines",
        }
    }
}

impl fmt::Display for VerdictMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tri-state outcome of one engine with its per-condition breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub overall: Status,
    pub mode: VerdictMode,
    pub conditions: Vec<ConditionReport>,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Wall time, when the caller asked for it.
    pub elapsed_ms: Option<u64>,
}

impl Verdict {
    /// Overall status follows the conditions: Certified iff all are,
    /// Refuted iff any is.
    pub fn from_conditions(mode: VerdictMode, conditions: Vec<ConditionReport>, seed: u64, tol: &Tolerances) -> Self {
        let overall = Status::all(conditions.iter().map(|c| c.status));
        Verdict { overall, mode, conditions, seed, tolerances: tol.clone(), elapsed_ms: None }
    }

    pub fn condition(&self, id: ConditionId) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn failing(&self) -> Vec<ConditionId> {
        self.conditions.iter().filter(|c| c.status == Status::Refuted).map(|c| c.id).collect()
    }

    /// First stored witness of a refuted condition.
    pub fn witness(&self) -> Option<&Witness> {
        self.conditions.iter().filter(|c| c.status == Status::Refuted).find_map(|c| c.witness.as_ref())
    }
}

/// Objective wrapper evaluating `-f`.
pub(crate) struct Negated<'a, O: ?Sized>(pub &'a O);

impl<O: Objective + ?Sized> Objective for Negated<'_, O> {
    fn value(&self, x: &Vector) -> Result<f64, crate::model::EvalError> {
        self.0.value(x).map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: &str, dim: usize, cons: &str, bounds: &str) -> FunctionSpec {
        FunctionSpec::parse(f, dim, cons, bounds, &Tolerances::default()).unwrap()
    }

    #[test]
    fn overall_follows_conditions() {
        let tol = Tolerances::default();
        let w = Witness::new(WitnessKind::Discontinuity, vec![Vector::zeros(1)], vec![]);
        let v = Verdict::from_conditions(
            VerdictMode::MainTheorem,
            vec![
                ConditionReport::certified(ConditionId::DomainConvexOpen, 1),
                ConditionReport::inconclusive(ConditionId::FContinuous, 1),
                ConditionReport::refuted(ConditionId::FStrictlyConvex, w, 1),
            ],
            0,
            &tol,
        );
        assert_eq!(v.overall, Status::Refuted);
        assert_eq!(v.failing(), vec![ConditionId::FStrictlyConvex]);
        let v = Verdict::from_conditions(
            VerdictMode::Lines,
            vec![
                ConditionReport::certified(ConditionId::DomainConvexOpen, 1),
                ConditionReport::inconclusive(ConditionId::FContinuous, 1),
            ],
            0,
            &tol,
        );
        assert_eq!(v.overall, Status::Inconclusive);
    }

    #[test]
    fn midpoint_witness_replays_on_flat_function() {
        let tol = Tolerances::default();
        let s = spec("x^2", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        let w = Witness::new(
            WitnessKind::MidpointViolation,
            vec![Vector::new(vec![0.0, -0.5]), Vector::new(vec![0.0, 0.5])],
            vec![0.5, 0.0, 0.0, 0.0, 1e-9],
        );
        assert!(w.replay(&s, &tol));
        let strict = spec("x^2+y^2", 2, "x^2-1; y^2-1", "-1:1,-1:1");
        assert!(!w.replay(&strict, &tol));
    }

    #[test]
    fn nonconvex_domain_witness() {
        let tol = Tolerances::default();
        let s = spec("x", 2, "0.25-x^2-y^2; x^2+y^2-1", "-1:1,-1:1");
        let x = Vector::new(vec![-0.75, 0.0]);
        let y = Vector::new(vec![0.75, 0.0]);
        let w = Witness::new(WitnessKind::NonconvexDomain, vec![x.clone(), y.clone(), x.lerp(&y, 0.5)], vec![0.5]);
        assert!(w.replay(&s, &tol));
    }

    #[test]
    fn ladder_shapes() {
        let tol = Tolerances::default();
        assert!(ladder_is_bounded(&[0.81, 0.98, 0.998, 0.9998], &tol));
        assert!(ladder_is_bounded(&[3.0, 2.0, 1.0], &tol));
        assert!(!ladder_is_bounded(&[5.0, 50.0, 500.0], &tol));
    }
}
