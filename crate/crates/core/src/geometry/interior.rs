use super::{AffineSubspace, GeometryError, Vector};
use crate::rng;
use crate::{Status, Tolerances};

/// A set handle that relative-topology probes can query.
///
/// Implemented by polytopes (convex hulls of point clouds), domain regions,
/// sublevel sets and epigraph slabs.
pub trait Body {
    fn hull(&self) -> &AffineSubspace;
    fn contains(&self, v: &Vector) -> bool;

    fn ambient_dim(&self) -> usize {
        self.hull().ambient_dim()
    }
}

impl<B: Body + ?Sized> Body for &B {
    fn hull(&self) -> &AffineSubspace {
        (**self).hull()
    }
    fn contains(&self, v: &Vector) -> bool {
        (**self).contains(v)
    }
}

/// A body probed within a different affine hull, e.g. one estimated from
/// samples.
pub struct WithHull<B> {
    pub inner: B,
    pub hull: AffineSubspace,
}

impl<B: Body> Body for WithHull<B> {
    fn hull(&self) -> &AffineSubspace {
        &self.hull
    }
    fn contains(&self, v: &Vector) -> bool {
        self.inner.contains(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub status: Status,
    /// Radius of the certified ball.
    pub radius: Option<f64>,
    /// A direction leaving the body at every exit step, or `None` when the
    /// point itself is not a member.
    pub exit_direction: Option<Vector>,
}

impl ProbeOutcome {
    fn refuted(exit_direction: Option<Vector>) -> Self {
        ProbeOutcome { status: Status::Refuted, radius: None, exit_direction }
    }
}

/// Probe directions: `±` each hull basis vector, then random unit vectors
/// of the direction space.
fn probe_directions(hull: &AffineSubspace, tol: &Tolerances) -> Vec<Vector> {
    let mut dirs = Vec::with_capacity(2 * hull.dim() + tol.random_directions);
    for b in hull.basis() {
        dirs.push(b.clone());
        dirs.push(b * -1.0);
    }
    let mut rng = rng::stream(tol.probe_seed, rng::tag::PROBE, hull.dim() as u64);
    for _ in 0..tol.random_directions {
        if let Some(d) = rng::unit_direction(&mut rng, hull) {
            dirs.push(d);
        }
    }
    dirs
}

/// Relative-interior probe with a ladder of ball radii.
///
/// Certified when, for some radius in `radii`, every probe direction stays in
/// the body. Refuted when the point is not a member, or when some direction
/// leaves the body at every configured exit step. Inconclusive otherwise.
pub fn relative_interior_probe<B: Body + ?Sized>(
    v: &Vector,
    body: &B,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<ProbeOutcome, GeometryError> {
    let hull = body.hull();
    if v.dim() != hull.ambient_dim() {
        return Err(GeometryError::DimensionMismatch { expected: hull.ambient_dim(), found: v.dim() });
    }
    if !hull.contains(v, tol.aff) || !body.contains(v) {
        return Ok(ProbeOutcome::refuted(None));
    }
    if hull.dim() == 0 {
        return Ok(ProbeOutcome { status: Status::Certified, radius: Some(0.0), exit_direction: None });
    }
    let dirs = probe_directions(hull, tol);
    let mut failing: Vec<usize> = Vec::new();
    for &r in radii {
        failing.clear();
        failing.extend((0..dirs.len()).filter(|&i| !body.contains(&v.offset(&dirs[i], r))));
        if failing.is_empty() {
            return Ok(ProbeOutcome { status: Status::Certified, radius: Some(r), exit_direction: None });
        }
    }
    // `failing` now holds the directions leaving at the smallest radius.
    for i in failing {
        if tol.exit_steps.iter().all(|&s| !body.contains(&v.offset(&dirs[i], s))) {
            return Ok(ProbeOutcome::refuted(Some(dirs[i].clone())));
        }
    }
    Ok(ProbeOutcome { status: Status::Inconclusive, radius: None, exit_direction: None })
}

/// Relative-interior membership at the configured probe radius.
pub fn relative_interior_member<B: Body + ?Sized>(
    v: &Vector,
    body: &B,
    tol: &Tolerances,
) -> Result<Status, GeometryError> {
    Ok(relative_interior_probe(v, body, &[tol.probe_radius], tol)?.status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PointCloud, PolytopeBody};

    #[test]
    fn center_and_vertex_of_cross_polytope() {
        let tol = Tolerances::default();
        let body = PolytopeBody::new(
            PointCloud::from_rows(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]).unwrap(),
            &tol,
        );
        let center = relative_interior_member(&Vector::new(vec![0.0, 0.0]), &body, &tol).unwrap();
        assert_eq!(center, Status::Certified);
        let vertex = relative_interior_member(&Vector::new(vec![1.0, 0.0]), &body, &tol).unwrap();
        assert_eq!(vertex, Status::Refuted);
        let outside = relative_interior_member(&Vector::new(vec![2.0, 0.0]), &body, &tol).unwrap();
        assert_eq!(outside, Status::Refuted);
    }

    #[test]
    fn relative_not_ambient_interior() {
        let tol = Tolerances::default();
        let body = PolytopeBody::new(PointCloud::from_rows(&[&[0.0, 3.0], &[1.0, 3.0]]).unwrap(), &tol);
        let s = relative_interior_member(&Vector::new(vec![0.5, 3.0]), &body, &tol).unwrap();
        assert_eq!(s, Status::Certified);
        let end = relative_interior_member(&Vector::new(vec![1.0, 3.0]), &body, &tol).unwrap();
        assert_eq!(end, Status::Refuted);
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let tol = Tolerances::default();
        let body = PolytopeBody::new(PointCloud::from_rows(&[&[0.0, 0.0]]).unwrap(), &tol);
        assert!(relative_interior_member(&Vector::zeros(3), &body, &tol).is_err());
    }

    #[test]
    fn single_point_body_is_its_own_relative_interior() {
        let tol = Tolerances::default();
        let body = PolytopeBody::new(PointCloud::from_rows(&[&[2.0, -1.0]]).unwrap(), &tol);
        let s = relative_interior_member(&Vector::new(vec![2.0, -1.0]), &body, &tol).unwrap();
        assert_eq!(s, Status::Certified);
    }
}
