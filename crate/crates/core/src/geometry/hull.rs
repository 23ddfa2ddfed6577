use nalgebra::DMatrix;
use serde::Serialize;

use super::{GeometryError, PointCloud, Vector};
use crate::Tolerances;

/// Affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSubspace {
    base: Vector,
    basis: Vec<Vector>,
}

impl AffineSubspace {
    /// Build from a base point and arbitrary spanning directions; the
    /// directions are orthonormalized in order and dependent ones dropped.
    pub fn new(base: Vector, directions: &[Vector]) -> Result<Self, GeometryError> {
        let n = base.dim();
        let mut basis: Vec<Vector> = Vec::new();
        for d in directions {
            if d.dim() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found: d.dim() });
            }
            let scale = d.norm();
            let r = orthogonal_residual(d, &basis);
            if scale > 0.0 && r.norm() > 1e-12 * scale {
                basis.push(r.normalized().expect("nonzero residual"));
            }
        }
        Ok(AffineSubspace { base, basis })
    }

    pub fn point(base: Vector) -> Self {
        AffineSubspace { base, basis: Vec::new() }
    }

    /// Straight line through `base` along `direction`.
    pub fn line(base: Vector, direction: &Vector) -> Result<Self, GeometryError> {
        let sub = AffineSubspace::new(base, std::slice::from_ref(direction))?;
        if sub.dim() != 1 {
            return Err(GeometryError::NotALine(sub.dim()));
        }
        Ok(sub)
    }

    /// All of R^n.
    pub fn whole(n: usize) -> Self {
        AffineSubspace { base: Vector::zeros(n), basis: (0..n).map(|i| Vector::unit(n, i)).collect() }
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    /// Coordinates of `v - base` in the basis.
    pub fn coords_of(&self, v: &Vector) -> Vec<f64> {
        let d = v - &self.base;
        self.basis.iter().map(|b| b.dot(&d)).collect()
    }

    pub fn point_from_coords(&self, coords: &[f64]) -> Vector {
        let mut p = self.base.clone();
        for (b, c) in self.basis.iter().zip(coords) {
            p = p.offset(b, *c);
        }
        p
    }

    pub fn direction_from_coords(&self, coords: &[f64]) -> Vector {
        let mut d = Vector::zeros(self.ambient_dim());
        for (b, c) in self.basis.iter().zip(coords) {
            d = d.offset(b, *c);
        }
        d
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &Vector) -> Vector {
        self.point_from_coords(&self.coords_of(v))
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        orthogonal_residual(&(v - &self.base), &self.basis).norm()
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        v.dim() == self.ambient_dim() && self.residual(v) <= tol
    }

    /// Distance from the direction `d` to the direction space.
    pub fn direction_residual(&self, d: &Vector) -> f64 {
        orthogonal_residual(d, &self.basis).norm()
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis.iter().enumerate().all(|(j, b)| {
                let expected = if i == j { 1.0 } else { 0.0 };
                (a.dot(b) - expected).abs() <= tol
            })
        })
    }

    /// `self x other` in R^{n+m}.
    pub fn product(&self, other: &AffineSubspace) -> AffineSubspace {
        let n = self.ambient_dim();
        let m = other.ambient_dim();
        let base = self.base.concat(&other.base);
        let mut basis: Vec<Vector> = self.basis.iter().map(|b| b.concat(&Vector::zeros(m))).collect();
        basis.extend(other.basis.iter().map(|b| Vector::zeros(n).concat(b)));
        AffineSubspace { base, basis }
    }

    /// `self x R`: the ambient flat of an epigraph over `self`.
    pub fn with_vertical(&self) -> AffineSubspace {
        self.product(&AffineSubspace::whole(1))
    }

    /// Same dimension and mutual membership of bases and directions.
    pub fn same_as(&self, other: &AffineSubspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && self.contains(&other.base, tol)
            && other.contains(&self.base, tol)
            && other.basis.iter().all(|d| self.direction_residual(d) <= tol)
            && self.basis.iter().all(|d| other.direction_residual(d) <= tol)
    }
}

fn orthogonal_residual(v: &Vector, basis: &[Vector]) -> Vector {
    // Two passes of modified Gram-Schmidt keep the residual orthogonal to
    // working precision.
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&r);
            r = r.offset(b, -c);
        }
    }
    r
}

/// Smallest affine subspace containing the cloud, at the rank tolerance
/// `tol.rank_rel * sigma_max` of the centered point matrix.
///
/// The base is the first point; the basis comes from Gram-Schmidt over the
/// remaining points in input order.
pub fn affine_hull(cloud: &PointCloud, tol: &Tolerances) -> AffineSubspace {
    let base = cloud.points()[0].clone();
    let n = cloud.ambient_dim();
    let centered: Vec<Vector> = cloud.points()[1..].iter().map(|p| p - &base).collect();
    if centered.is_empty() || n == 0 {
        return AffineSubspace::point(base);
    }
    let matrix = DMatrix::from_fn(n, centered.len(), |i, j| centered[j][i]);
    let singular = matrix.singular_values();
    let sigma_max = singular.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return AffineSubspace::point(base);
    }
    let cutoff = tol.rank_rel * sigma_max;
    let rank = singular.iter().filter(|&&s| s > cutoff).count();

    let mut basis: Vec<Vector> = Vec::with_capacity(rank);
    for v in &centered {
        if basis.len() == rank {
            break;
        }
        let r = orthogonal_residual(v, &basis);
        if r.norm() > cutoff {
            basis.push(r.normalized().expect("residual above cutoff"));
        }
    }
    // Greedy order can stall on clusters of tiny residuals; fall back to the
    // largest remaining residual.
    while basis.len() < rank {
        let best = centered
            .iter()
            .map(|v| orthogonal_residual(v, &basis))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonempty");
        match best.normalized() {
            Some(u) => basis.push(u),
            None => break,
        }
    }
    AffineSubspace { base, basis }
}

/// Hull of the Cartesian product cloud `A x B`.
pub fn affine_hull_product(a: &PointCloud, b: &PointCloud, tol: &Tolerances) -> AffineSubspace {
    let points: Vec<Vector> = a.iter().flat_map(|p| b.iter().map(move |q| p.concat(q))).collect();
    let cloud = PointCloud::new(points).expect("product of nonempty clouds is nonempty");
    affine_hull(&cloud, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn single_point_has_dimension_zero() {
        let h = affine_hull(&PointCloud::from_rows(&[&[0.0, 0.0]]).unwrap(), &tol());
        assert_eq!(h.dim(), 0);
        assert_eq!(h.base(), &Vector::new(vec![0.0, 0.0]));
    }

    #[test]
    fn two_points_span_a_line() {
        let h = affine_hull(&PointCloud::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap(), &tol());
        assert_eq!(h.dim(), 1);
        assert_eq!(h.basis()[0], Vector::new(vec![1.0, 0.0]));
    }

    #[test]
    fn three_points_span_the_plane_z_zero() {
        let cloud = PointCloud::from_rows(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
        let h = affine_hull(&cloud, &tol());
        assert_eq!(h.dim(), 2);
        assert!(h.contains(&Vector::new(vec![3.0, -7.0, 0.0]), 1e-12));
        assert!(!h.contains(&Vector::new(vec![0.0, 0.0, 1e-3]), 1e-7));
        assert!(h.is_orthonormal(1e-10));
    }

    #[test]
    fn repeated_points_do_not_add_dimensions() {
        let cloud = PointCloud::from_rows(&[&[1.0, 1.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]).unwrap();
        assert_eq!(affine_hull(&cloud, &tol()).dim(), 1);
    }

    #[test]
    fn product_of_line_and_point() {
        let a = PointCloud::from_rows(&[&[0.0], &[1.0]]).unwrap();
        let b = PointCloud::from_rows(&[&[5.0]]).unwrap();
        let h = affine_hull_product(&a, &b, &tol());
        assert_eq!(h.dim(), 1);
        assert!(h.contains(&Vector::new(vec![17.0, 5.0]), 1e-9));
        assert!(h.same_as(&affine_hull(&a, &tol()).product(&affine_hull(&b, &tol())), 1e-9));

        let origin = PointCloud::from_rows(&[&[0.0]]).unwrap();
        let h0 = affine_hull_product(&origin, &origin, &tol());
        assert_eq!(h0.dim(), 0);
        assert_eq!(h0.base(), &Vector::zeros(2));
    }

    #[test]
    fn line_constructor_rejects_zero_direction() {
        assert!(AffineSubspace::line(Vector::zeros(2), &Vector::zeros(2)).is_err());
    }
}
