use super::{AffineSubspace, GeometryError, Vector};
use crate::model::DomainSpec;

/// Where a ray from a region member leaves the region.
#[derive(Debug, Clone, PartialEq)]
pub enum RayHit {
    /// The ray meets `rb(C)` inside the sampling box. `point` is the first
    /// non-member found by bisection and `inner` the last member; they lie
    /// within rounding of each other.
    Boundary { point: Vector, inner: Vector, t: f64 },
    /// The ray reaches the sampling box while still inside the region.
    Unbounded { t: f64 },
    /// The ray cannot move: a zero direction, a direction leaving the flat of
    /// pinned coordinates, or a start point outside the region.
    Blocked,
}

/// Bisect for the boundary of `domain` along `p + t u`, `t >= 0`.
pub fn boundary_on_ray(domain: &DomainSpec, p: &Vector, u: &Vector) -> RayHit {
    if !domain.region_member(p) {
        return RayHit::Blocked;
    }
    let Some(t_box) = domain.bounds().exit_parameter(p, u) else {
        return RayHit::Blocked;
    };
    if t_box <= 0.0 {
        return RayHit::Blocked;
    }
    if domain.region_member(&p.offset(u, t_box)) {
        return RayHit::Unbounded { t: t_box };
    }
    let (mut lo, mut hi) = (0.0_f64, t_box);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if domain.region_member(&p.offset(u, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RayHit::Boundary { point: p.offset(u, hi), inner: p.offset(u, lo), t: hi }
}

/// The interval `C ∩ L` of a line, parametrized as `base + t direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSlice {
    pub base: Vector,
    /// Unit direction.
    pub direction: Vector,
    pub lower: f64,
    pub upper: f64,
    /// Whether each end is a relative-boundary point of `C`; an infinite end
    /// is cut at the sampling box.
    pub lower_finite: bool,
    pub upper_finite: bool,
    /// The line meets `C` in a single point.
    pub degenerate: bool,
    /// The line misses `C`.
    pub missed: bool,
}

impl LineSlice {
    fn miss(base: Vector, direction: Vector) -> Self {
        LineSlice {
            base,
            direction,
            lower: 0.0,
            upper: 0.0,
            lower_finite: false,
            upper_finite: false,
            degenerate: false,
            missed: true,
        }
    }

    pub fn point(&self, t: f64) -> Vector {
        self.base.offset(&self.direction, t)
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains_parameter(&self, t: f64) -> bool {
        !self.missed && t > self.lower && t < self.upper
    }

    /// Finite endpoints (relative-boundary points of `C` on the line).
    pub fn endpoints(&self) -> Vec<Vector> {
        if self.missed || self.degenerate {
            return Vec::new();
        }
        let mut out = Vec::new();
        if self.lower_finite {
            out.push(self.point(self.lower));
        }
        if self.upper_finite {
            out.push(self.point(self.upper));
        }
        out
    }
}

/// Slice of `C` along `base + t direction` where `base` is a region member.
pub fn slice_through(domain: &DomainSpec, base: &Vector, direction: &Vector) -> LineSlice {
    let Some(u) = direction.normalized() else {
        return LineSlice::miss(base.clone(), direction.clone());
    };
    if !domain.region_member(base) {
        return LineSlice::miss(base.clone(), u);
    }
    let back = &u * -1.0;
    let (upper, upper_finite) = match boundary_on_ray(domain, base, &u) {
        RayHit::Boundary { t, .. } => (t, true),
        RayHit::Unbounded { t } => (t, false),
        RayHit::Blocked => (0.0, false),
    };
    let (lower, lower_finite) = match boundary_on_ray(domain, base, &back) {
        RayHit::Boundary { t, .. } => (-t, true),
        RayHit::Unbounded { t } => (-t, false),
        RayHit::Blocked => (0.0, false),
    };
    let degenerate = upper - lower <= 1e-12 * (1.0 + base.norm());
    LineSlice {
        base: base.clone(),
        direction: u,
        lower,
        upper,
        lower_finite: lower_finite && !degenerate,
        upper_finite: upper_finite && !degenerate,
        degenerate,
        missed: false,
    }
}

/// Endpoints of `C ∩ L` for a straight line `L`: zero, one or two finite
/// relative-boundary points, with unbounded ends omitted.
pub fn relative_boundary_of_line_slice(domain: &DomainSpec, line: &AffineSubspace) -> Result<LineSlice, GeometryError> {
    if line.dim() != 1 {
        return Err(GeometryError::NotALine(line.dim()));
    }
    if line.ambient_dim() != domain.dim() {
        return Err(GeometryError::DimensionMismatch { expected: domain.dim(), found: line.ambient_dim() });
    }
    let base = line.base().clone();
    let u = line.basis()[0].clone();
    if domain.region_member(&base) {
        return Ok(slice_through(domain, &base, &u));
    }
    // Look for a member along the part of the line inside the box.
    let b = domain.bounds();
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..domain.dim() {
        if u[i] != 0.0 {
            let a = (b.lo()[i] - base[i]) / u[i];
            let c = (b.hi()[i] - base[i]) / u[i];
            t0 = t0.max(a.min(c));
            t1 = t1.min(a.max(c));
        } else if base[i] < b.lo()[i] || base[i] > b.hi()[i] {
            return Ok(LineSlice::miss(base, u));
        }
    }
    if !(t0.is_finite() && t1.is_finite()) || t0 > t1 {
        return Ok(LineSlice::miss(base, u));
    }
    const SCAN: usize = 4096;
    for k in 0..=SCAN {
        let t = t0 + (t1 - t0) * (k as f64 + 0.5) / (SCAN as f64 + 1.0);
        let p = base.offset(&u, t);
        if domain.region_member(&p) {
            let mut slice = slice_through(domain, &p, &u);
            // Re-anchor the parametrization at the line's own base point.
            slice.lower += t;
            slice.upper += t;
            slice.base = base;
            return Ok(slice);
        }
    }
    Ok(LineSlice::miss(base, u))
}
