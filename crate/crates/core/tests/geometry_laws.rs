use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strict_epi::geometry::{
    affine_hull, affine_hull_product, relative_boundary_of_line_slice, relative_interior_member, segment_point,
};
use strict_epi::{AffineSubspace, DomainSpec, PointCloud, Status, Tolerances, Vector};

fn random_vector(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-half..half)).collect())
}

/// A cloud of `k` points spread over a random flat of dimension `d` in R^n,
/// together with that flat's spanning data.
fn cloud_on_flat(rng: &mut ChaCha8Rng, n: usize, d: usize, k: usize) -> (PointCloud, Vector, Vec<Vector>) {
    let base = random_vector(rng, n, 3.0);
    let dirs: Vec<Vector> = (0..d).map(|_| random_vector(rng, n, 1.0)).collect();
    let mut points = vec![base.clone()];
    for _ in 1..k {
        let mut p = base.clone();
        for dir in &dirs {
            p = p.offset(dir, rng.random_range(-2.0..2.0));
        }
        points.push(p);
    }
    (PointCloud::new(points).unwrap(), base, dirs)
}

fn random_member(rng: &mut ChaCha8Rng, hull: &AffineSubspace) -> Vector {
    let coords: Vec<f64> = (0..hull.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
    hull.point_from_coords(&coords)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hull_recovers_generating_flat(seed in any::<u64>(), n in 1usize..=5, extra in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(0..=n);
        let (cloud, base, dirs) = cloud_on_flat(&mut rng, n, d, d + 1 + extra);
        let tol = Tolerances::default();
        let hull = affine_hull(&cloud, &tol);
        let truth = AffineSubspace::new(base, &dirs).unwrap();
        prop_assert_eq!(hull.dim(), truth.dim());
        prop_assert!(hull.same_as(&truth, 1e-7));
        prop_assert!(hull.is_orthonormal(tol.orth));
        for p in &cloud {
            prop_assert!(hull.contains(p, tol.aff));
        }
    }

    #[test]
    fn hull_is_idempotent(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(0..=n);
        let (cloud, _, _) = cloud_on_flat(&mut rng, n, d, d + 3);
        let tol = Tolerances::default();
        let hull = affine_hull(&cloud, &tol);
        let resampled: Vec<Vector> = (0..d + 4).map(|_| random_member(&mut rng, &hull)).collect();
        let again = affine_hull(&PointCloud::new(resampled.clone()).unwrap(), &tol);
        prop_assert_eq!(again.dim(), hull.dim());
        prop_assert!(again.same_as(&hull, 1e-7));
        for p in &resampled {
            prop_assert!(hull.contains(p, 1e-7));
        }
    }

    #[test]
    fn hull_is_monotone(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(0..=n);
        let (big, _, _) = cloud_on_flat(&mut rng, n, d, d + 5);
        let take = rng.random_range(1..=big.len());
        let small = PointCloud::new(big.points()[..take].to_vec()).unwrap();
        let tol = Tolerances::default();
        let (ha, hb) = (affine_hull(&small, &tol), affine_hull(&big, &tol));
        prop_assert!(ha.dim() <= hb.dim());
        prop_assert!(hb.contains(ha.base(), 1e-7));
        for dir in ha.basis() {
            prop_assert!(hb.direction_residual(dir) <= 1e-7);
        }
    }

    #[test]
    fn segment_point_lies_in_pair_hull(seed in any::<u64>(), n in 1usize..=6, t in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_vector(&mut rng, n, 10.0), random_vector(&mut rng, n, 10.0));
        let z = segment_point(&a, &b, t).unwrap();
        let hull = affine_hull(&PointCloud::new(vec![a.clone(), b.clone()]).unwrap(), &Tolerances::default());
        prop_assert!(hull.contains(&z, 1e-9 * (1.0 + a.norm() + b.norm())));
        // Independent check: z - a is parallel to b - a with ratio t.
        for i in 0..n {
            prop_assert!((z[i] - (a[i] + t * (b[i] - a[i]))).abs() <= 1e-12 * (1.0 + a[i].abs() + b[i].abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn product_law(seed in any::<u64>(), n1 in 1usize..=3, n2 in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = rng.random_range(0..=n1);
        let d2 = rng.random_range(0..=n2);
        let (a, _, _) = cloud_on_flat(&mut rng, n1, d1, d1 + 2);
        let (b, _, _) = cloud_on_flat(&mut rng, n2, d2, d2 + 2);
        let tol = Tolerances::default();
        let (ha, hb) = (affine_hull(&a, &tol), affine_hull(&b, &tol));
        let joint = affine_hull_product(&a, &b, &tol);
        let product = ha.product(&hb);
        prop_assert_eq!(joint.dim(), ha.dim() + hb.dim());
        for _ in 0..20 {
            let p = random_member(&mut rng, &product);
            prop_assert!(joint.contains(&p, 1e-7));
            let q = random_member(&mut rng, &joint);
            let (qa, qb) = (Vector::new(q.coords()[..n1].to_vec()), Vector::new(q.coords()[n1..].to_vec()));
            prop_assert!(ha.contains(&qa, 1e-7) && hb.contains(&qb, 1e-7));
        }
    }
}

/// Random ellipse (n = 2) or ellipsoid (n = 3) with axis-aligned semi-axes,
/// centered inside its sampling box.
fn random_ellipsoid(rng: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> (DomainSpec, Vec<f64>, Vec<f64>) {
    let names = ["x", "y", "z"];
    let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let axes: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..2.0)).collect();
    let terms: Vec<String> = (0..n).map(|i| format!("((({}) - ({})) / {})^2", names[i], center[i], axes[i])).collect();
    let constraint = format!("{} - 1", terms.join(" + "));
    let bounds: Vec<String> = (0..n).map(|i| format!("{}:{}", center[i] - axes[i], center[i] + axes[i])).collect();
    let d = DomainSpec::parse(n, &constraint, &bounds.join(","), tol).unwrap();
    (d, center, axes)
}

fn ellipsoid_value(x: &Vector, center: &[f64], axes: &[f64]) -> f64 {
    (0..center.len()).map(|i| ((x[i] - center[i]) / axes[i]).powi(2)).sum::<f64>() - 1.0
}

#[test]
fn line_slice_endpoints_are_relative_boundary_points() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..20 {
        let n = 2 + case % 2;
        let (domain, center, axes) = random_ellipsoid(&mut rng, n, &tol);
        // A base point well inside, so the line certainly meets the region.
        let base = Vector::new((0..n).map(|i| center[i] + 0.5 * axes[i] * rng.random_range(-1.0..1.0)).collect());
        let dir = random_vector(&mut rng, n, 1.0);
        let line = AffineSubspace::line(base.clone(), &dir).unwrap();
        let slice = relative_boundary_of_line_slice(&domain, &line).unwrap();
        let ends = slice.endpoints();
        assert_eq!(ends.len(), 2, "case {case}: a line through an ellipsoid has two boundary points");
        for (end, inward) in [(slice.lower, 1.0), (slice.upper, -1.0)] {
            let e = slice.point(end);
            assert!(line.contains(&e, 1e-9), "case {case}: endpoint on the line");
            assert!(ellipsoid_value(&e, &center, &axes).abs() < 1e-9, "case {case}: endpoint on the ellipsoid");
            assert_eq!(relative_interior_member(&e, &domain, &tol).unwrap(), Status::Refuted, "case {case}");
            for step in [1e-3, 1e-6, 1e-9] {
                assert!(domain.region_member(&slice.point(end + inward * step)), "case {case}: approach {step}");
            }
        }
    }
}
