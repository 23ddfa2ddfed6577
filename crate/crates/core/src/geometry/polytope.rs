use super::{affine_hull, AffineSubspace, Body, PointCloud, Vector};
use crate::Tolerances;

/// Convex hull of a point cloud, with exact (LP) membership.
#[derive(Debug, Clone)]
pub struct PolytopeBody {
    generators: PointCloud,
    hull: AffineSubspace,
    /// Generator coordinates in the hull frame.
    frame: Vec<Vec<f64>>,
    aff_tol: f64,
}

impl PolytopeBody {
    pub fn new(generators: PointCloud, tol: &Tolerances) -> Self {
        let hull = affine_hull(&generators, tol);
        PolytopeBody::with_hull(generators, hull, tol)
    }

    pub fn with_hull(generators: PointCloud, hull: AffineSubspace, tol: &Tolerances) -> Self {
        let frame = generators.iter().map(|g| hull.coords_of(g)).collect();
        PolytopeBody { generators, hull, frame, aff_tol: tol.aff }
    }

    pub fn generators(&self) -> &PointCloud {
        &self.generators
    }
}

impl Body for PolytopeBody {
    fn hull(&self) -> &AffineSubspace {
        &self.hull
    }

    fn contains(&self, v: &Vector) -> bool {
        self.hull.contains(v, self.aff_tol) && convex_hull_contains(&self.frame, &self.hull.coords_of(v))
    }
}

/// Whether `target` is a convex combination of `points` (all of one
/// dimension), decided by a phase-one simplex with Bland's rule.
pub fn convex_hull_contains(points: &[Vec<f64>], target: &[f64]) -> bool {
    let m = points.len();
    if m == 0 {
        return false;
    }
    let d = target.len();
    let rows = d + 1;
    let cols = m + rows + 1;
    let rhs = cols - 1;
    let scale = 1.0 + points.iter().flatten().chain(target.iter()).fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let feasibility_tol = 1e-11 * scale;
    let pivot_eps = 1e-12;

    let mut t = vec![vec![0.0; cols]; rows];
    for i in 0..rows {
        let b = if i < d { target[i] } else { 1.0 };
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, p) in points.iter().enumerate() {
            t[i][j] = sign * if i < d { p[i] } else { 1.0 };
        }
        t[i][m + i] = 1.0;
        t[i][rhs] = sign * b;
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();

    for _ in 0..10_000 {
        // Reduced cost of column j under the phase-one objective.
        let reduced = |t: &Vec<Vec<f64>>, basis: &Vec<usize>, j: usize| -> f64 {
            let cost = |k: usize| if k >= m && k < m + rows { 1.0 } else { 0.0 };
            cost(j) - (0..rows).map(|i| cost(basis[i]) * t[i][j]).sum::<f64>()
        };
        let entering = (0..m + rows).find(|&j| !basis.contains(&j) && reduced(&t, &basis, j) < -pivot_eps);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            if t[i][e] > pivot_eps {
                let ratio = t[i][rhs] / t[i][e];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = t[r][e];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            let factor = row[e];
            if i != r && factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        basis[r] = e;
    }
    let infeasibility: f64 = (0..rows).filter(|&i| basis[i] >= m).map(|i| t[i][rhs].abs()).sum();
    infeasibility <= feasibility_tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]
    }

    #[test]
    fn square_membership() {
        let sq = square();
        assert!(convex_hull_contains(&sq, &[0.0, 0.0]));
        assert!(convex_hull_contains(&sq, &[1.0, 0.3]));
        assert!(convex_hull_contains(&sq, &[-1.0, -1.0]));
        assert!(!convex_hull_contains(&sq, &[1.0 + 1e-8, 0.3]));
        assert!(!convex_hull_contains(&sq, &[0.0, -1.0 - 1e-9]));
        assert!(!convex_hull_contains(&sq, &[3.0, 3.0]));
    }

    #[test]
    fn many_gon_edges_are_sharp() {
        let k = 64;
        let gon: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let mid: Vec<f64> = (0..2).map(|c| 0.5 * (gon[3][c] + gon[4][c])).collect();
        assert!(convex_hull_contains(&gon, &mid));
        let out: Vec<f64> = mid.iter().map(|c| c * (1.0 + 1e-8)).collect();
        assert!(!convex_hull_contains(&gon, &out));
    }

    #[test]
    fn zero_dimensional_frame() {
        assert!(convex_hull_contains(&[vec![], vec![]], &[]));
    }
}
