use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::analysis::{distinct_pair, ConditionId, ConditionReport, Verdict, VerdictMode, Witness, WitnessKind};
use crate::geometry::{
    affine_hull, relative_interior_member, relative_interior_probe, AffineSubspace, Body, PointCloud, PolytopeBody,
    Vector,
};
use crate::model::{sample_domain_stream, DomainError, DomainSpec};
use crate::{rng, Status, Tolerances};

const SEGMENT_T: [f64; 3] = [0.25, 0.5, 0.75];
const EXTRA_MEMBERS: usize = 64;
const LIMIT_RAYS: usize = 64;

#[derive(Debug, Clone)]
enum Membership {
    Polytope(PolytopeBody),
    /// Region intersected with its sampling box.
    Region(DomainSpec),
}

impl Membership {
    fn contains(&self, v: &Vector) -> bool {
        match self {
            Membership::Polytope(p) => p.contains(v),
            Membership::Region(d) => d.domain_member(v),
        }
    }
}

/// A convex body known through generators: either their convex hull, or a
/// constraint region (within its box) that the generators were sampled from.
#[derive(Debug, Clone)]
pub struct SampledBody {
    generators: PointCloud,
    hull: AffineSubspace,
    membership: Membership,
    aff_tol: f64,
}

impl SampledBody {
    /// The convex hull of `generators`.
    pub fn polytope(generators: PointCloud, tol: &Tolerances) -> Self {
        let poly = PolytopeBody::new(generators.clone(), tol);
        let hull = poly.hull().clone();
        SampledBody { generators, hull, membership: Membership::Polytope(poly), aff_tol: tol.aff }
    }

    /// A constraint region, with `n` sampled generators.
    pub fn region(domain: DomainSpec, n: usize, seed: u64, tol: &Tolerances) -> Result<Self, DomainError> {
        let generators = sample_domain_stream(&domain, n, seed, 3)?;
        let hull = affine_hull(&generators, tol);
        Ok(SampledBody { generators, hull, membership: Membership::Region(domain), aff_tol: tol.aff })
    }

    pub fn generators(&self) -> &PointCloud {
        &self.generators
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self.membership, Membership::Polytope(_))
    }
}

impl Body for SampledBody {
    fn hull(&self) -> &AffineSubspace {
        &self.hull
    }

    fn contains(&self, v: &Vector) -> bool {
        self.hull.contains(v, self.aff_tol) && self.membership.contains(v)
    }
}

/// A random convex combination of the generators (flat Dirichlet weights).
fn random_member<R: Rng>(r: &mut R, gens: &[Vector]) -> Vector {
    let w: Vec<f64> = (0..gens.len()).map(|_| r.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    let mut acc = vec![0.0; gens[0].dim()];
    for (g, wi) in gens.iter().zip(&w) {
        for (a, x) in acc.iter_mut().zip(g.coords()) {
            *a += wi / total * x;
        }
    }
    Vector::new(acc)
}

/// Last member on the ray `c + s u` found by doubling then bisection.
fn limit_point<B: Body + ?Sized>(body: &B, c: &Vector, u: &Vector, scale: f64) -> Option<Vector> {
    let mut hi = scale.max(1e-12);
    let mut lo = 0.0;
    let mut doublings = 0;
    while body.contains(&c.offset(u, hi)) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if body.contains(&c.offset(u, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(c.offset(u, lo))
}

/// Points standing in for the relative closure: generators, random convex
/// combinations, and limit points along rays from the centroid.
fn closure_proxies(body: &SampledBody, seed: u64) -> Vec<Vector> {
    let gens = body.generators.points();
    let mut pts = gens.to_vec();
    let mut r = rng::stream(seed, rng::tag::BODY, 0);
    pts.extend((0..EXTRA_MEMBERS).map(|_| random_member(&mut r, gens)));
    let c = body.generators.centroid();
    if body.hull.dim() > 0 && body.contains(&c) {
        let scale = gens.iter().map(|g| g.dist(&c)).fold(0.0, f64::max);
        for i in 0..LIMIT_RAYS {
            let mut r = rng::stream(seed, rng::tag::BODY, 1 + i as u64);
            if let Some(u) = rng::unit_direction(&mut r, &body.hull) {
                pts.extend(limit_point(body, &c, &u, scale));
            }
        }
    }
    pts
}

fn diameter(pts: &[Vector]) -> f64 {
    let c = PointCloud::new(pts.to_vec()).map(|p| p.centroid()).unwrap_or_else(|_| pts[0].clone());
    2.0 * pts.iter().map(|p| p.dist(&c)).fold(0.0, f64::max)
}

enum SegmentOutcome {
    Inside,
    Unresolved,
    Leaves(Witness),
}

/// Strict convexity of a sampled body, straight from the definition: open
/// segments between closure proxies must stay in the relative interior.
///
/// Pairs closer than `1e-3` of the body's diameter are skipped: their
/// segment points lie within the probe resolution of the boundary.
pub fn oracle_strict_convexity(body: &SampledBody, trials: usize, seed: u64, tol: &Tolerances) -> Verdict {
    let id = ConditionId::SetStrictlyConvex;
    let pts = closure_proxies(body, seed);
    let g = body.generators.len();
    let min_sep = 1e-3 * diameter(&pts);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(trials);
    'gen: for i in 0..g {
        for j in i + 1..g {
            if pairs.len() >= trials / 2 {
                break 'gen;
            }
            pairs.push((i, j));
        }
    }
    let mut index = 0u64;
    while pairs.len() < trials {
        let mut r = rng::stream(seed, rng::tag::ORACLE, index);
        index += 1;
        match distinct_pair(&mut r, pts.len()) {
            Some(p) => pairs.push(p),
            None => break,
        }
    }
    let radii = tol.refining_radii();
    let outcomes: Vec<SegmentOutcome> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&pts[i], &pts[j]);
            if a.dist(b) < min_sep {
                return SegmentOutcome::Inside;
            }
            let mut unresolved = false;
            for t in SEGMENT_T {
                let z = a.lerp(b, t);
                match relative_interior_probe(&z, body, &radii, tol).expect("one ambient dimension").status {
                    Status::Refuted => {
                        let w = Witness::new(WitnessKind::BoundarySegment, vec![a.clone(), b.clone()], vec![t]);
                        return SegmentOutcome::Leaves(w);
                    }
                    Status::Inconclusive => unresolved = true,
                    Status::Certified => {}
                }
            }
            if unresolved {
                SegmentOutcome::Unresolved
            } else {
                SegmentOutcome::Inside
            }
        })
        .collect();
    let samples = pairs.len() * SEGMENT_T.len();
    let mut unresolved = 0;
    for o in outcomes {
        match o {
            SegmentOutcome::Leaves(w) => {
                let report = ConditionReport::refuted(id, w, samples);
                return Verdict::from_conditions(VerdictMode::Oracle, vec![report], seed, tol);
            }
            SegmentOutcome::Unresolved => unresolved += 1,
            SegmentOutcome::Inside => {}
        }
    }
    let report = if unresolved > 0 {
        ConditionReport::inconclusive(id, samples).with_note(format!("{unresolved} segments unresolved"))
    } else {
        ConditionReport::certified(id, samples)
    };
    Verdict::from_conditions(VerdictMode::Oracle, vec![report], seed, tol)
}

/// Replay a body-oracle witness: the stored segment point must fail the
/// relative-interior probe.
pub fn replay_body_witness(body: &SampledBody, w: &Witness, tol: &Tolerances) -> bool {
    let ([a, b], [t]) = (&w.points[..], &w.values[..]) else {
        return false;
    };
    w.kind == WitnessKind::BoundarySegment
        && a != b
        && relative_interior_member(&a.lerp(b, *t), body, tol).is_ok_and(|s| s == Status::Refuted)
}

/// The slice of `body` by an affine subspace, with generators found by
/// rejection sampling over the projected extent of the body. `None` when
/// fewer than three members are found.
pub fn slice_body(
    body: &SampledBody,
    plane: &AffineSubspace,
    n: usize,
    seed: u64,
    tol: &Tolerances,
) -> Option<SampledBody> {
    let m = plane.dim();
    let coords: Vec<Vec<f64>> = body.generators.iter().map(|g| plane.coords_of(g)).collect();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for c in &coords {
        for i in 0..m {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    for i in 0..m {
        let pad = 0.25 * (hi[i] - lo[i]) + 1e-9;
        lo[i] -= pad;
        hi[i] += pad;
    }
    let mut r = rng::stream(seed, rng::tag::SLICES, 0);
    let mut members = Vec::new();
    for _ in 0..20_000 {
        if members.len() >= n {
            break;
        }
        let c: Vec<f64> = (0..m).map(|i| r.random_range(lo[i]..=hi[i])).collect();
        let p = plane.point_from_coords(&c);
        if body.contains(&p) {
            members.push(p);
        }
    }
    if members.len() < 3 {
        return None;
    }
    let generators = PointCloud::new(members).expect("common dimension");
    let hull = affine_hull(&generators, tol);
    Some(SampledBody { generators, hull, membership: body.membership.clone(), aff_tol: tol.aff })
}

/// Slices by random planes through three members; the body is strictly
/// convex iff every slice is.
pub fn oracle_plane_slices(body: &SampledBody, m_planes: usize, trials: usize, seed: u64, tol: &Tolerances) -> Verdict {
    let id = ConditionId::SetStrictlyConvex;
    if body.hull.dim() <= 2 {
        return oracle_strict_convexity(body, trials, seed, tol);
    }
    let gens = body.generators.points();
    let mut verdicts = Vec::new();
    let mut skipped = 0;
    for i in 0..m_planes {
        let mut r = rng::stream(seed, rng::tag::SLICES, 1 + i as u64);
        let three: Vec<Vector> = (0..3).map(|_| random_member(&mut r, gens)).collect();
        let plane = affine_hull(&PointCloud::new(three).expect("three points"), tol);
        if plane.dim() < 2 {
            skipped += 1;
            continue;
        }
        match slice_body(body, &plane, 48, seed ^ (i as u64 + 1), tol) {
            Some(s) => verdicts.push(oracle_strict_convexity(&s, trials, seed, tol)),
            None => skipped += 1,
        }
    }
    let samples = verdicts.iter().flat_map(|v| &v.conditions).map(|c| c.samples_used).sum();
    let note = format!("{} slices tested, {skipped} skipped", verdicts.len());
    let report = if let Some(w) = verdicts.iter().find_map(|v| v.witness().cloned()) {
        ConditionReport::refuted(id, w, samples)
    } else if verdicts.iter().any(|v| v.overall == Status::Inconclusive) || verdicts.is_empty() {
        ConditionReport::inconclusive(id, samples)
    } else {
        ConditionReport::certified(id, samples)
    };
    Verdict::from_conditions(VerdictMode::Oracle, vec![report.with_note(note)], seed, tol)
}

/// Whether the centroid of the generators is a relative-interior point.
pub fn ri_nonempty_check(body: &SampledBody, tol: &Tolerances) -> bool {
    let c = body.generators.centroid();
    relative_interior_probe(&c, body, &tol.refining_radii(), tol).is_ok_and(|o| o.status == Status::Certified)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn polygon(n: usize) -> PointCloud {
        let pts = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                Vector::new(vec![a.cos(), a.sin()])
            })
            .collect();
        PointCloud::new(pts).unwrap()
    }

    #[test]
    fn square_is_not_strictly_convex() {
        let t = tol();
        let sq = SampledBody::polytope(
            PointCloud::from_rows(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, -1.0], &[-1.0, 1.0]]).unwrap(),
            &t,
        );
        let v = oracle_strict_convexity(&sq, 500, 1, &t);
        assert_eq!(v.overall, Status::Refuted);
        assert!(replay_body_witness(&sq, v.witness().unwrap(), &t));
    }

    #[test]
    fn polygon_versus_disc() {
        let t = tol();
        let gon = SampledBody::polytope(polygon(64), &t);
        assert_eq!(oracle_strict_convexity(&gon, 500, 1, &t).overall, Status::Refuted);
        let disc = DomainSpec::parse(2, "x^2+y^2-1", "-1:1,-1:1", &t).unwrap();
        let body = SampledBody::region(disc, 64, 1, &t).unwrap();
        assert_eq!(oracle_strict_convexity(&body, 500, 1, &t).overall, Status::Certified);
        assert!(ri_nonempty_check(&body, &t));
    }

    #[test]
    fn segment_is_strictly_convex_in_its_hull() {
        let t = tol();
        let seg = SampledBody::polytope(PointCloud::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap(), &t);
        assert_eq!(oracle_strict_convexity(&seg, 500, 1, &t).overall, Status::Certified);
        assert!(ri_nonempty_check(&seg, &t));
        let point = SampledBody::polytope(PointCloud::from_rows(&[&[2.0, 3.0]]).unwrap(), &t);
        assert!(ri_nonempty_check(&point, &t));
    }

    #[test]
    fn ball_slices_and_cube_face_slice() {
        let t = tol();
        let ball = DomainSpec::parse(3, "x^2+y^2+z^2-1", "-1:1,-1:1,-1:1", &t).unwrap();
        let body = SampledBody::region(ball, 64, 2, &t).unwrap();
        assert_eq!(oracle_plane_slices(&body, 16, 200, 3, &t).overall, Status::Certified);
        let corners: Vec<Vector> =
            (0..8).map(|i| Vector::new((0..3).map(|b| if i >> b & 1 == 1 { 1.0 } else { -1.0 }).collect())).collect();
        let cube = SampledBody::polytope(PointCloud::new(corners).unwrap(), &t);
        let plane = AffineSubspace::new(Vector::zeros(3), &[Vector::unit(3, 0), Vector::unit(3, 1)]).unwrap();
        let s = slice_body(&cube, &plane, 48, 4, &t).unwrap();
        assert_eq!(oracle_strict_convexity(&s, 300, 5, &t).overall, Status::Refuted);
    }
}
