use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use super::eval::{eval, EvalError};
use super::expr::Expr;
use super::parser::{parse_constraints, ParseError};
use crate::geometry::{AffineSubspace, Body, PointCloud, Vector};
use crate::rng;
use crate::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid sampling box: {0}")]
    InvalidBox(String),
    #[error("region too thin: accepted {accepted} of {attempts} draws (rate below 1e-4)")]
    RegionTooThin { accepted: usize, attempts: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// Per-coordinate finite intervals used for all randomized probing.
/// A coordinate with `lo == hi` is pinned: the domain lies in that
/// hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SamplingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, DomainError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(DomainError::InvalidBox("bounds must have one interval per coordinate".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(DomainError::InvalidBox(format!("coordinate {}: need finite lo <= hi", i + 1)));
            }
        }
        Ok(SamplingBox { lo, hi })
    }

    /// `[-half, half]^n`.
    pub fn symmetric(n: usize, half: f64) -> Self {
        SamplingBox { lo: vec![-half; n], hi: vec![half; n] }
    }

    /// Parse `"lo1:hi1,lo2:hi2,..."`.
    pub fn parse(src: &str, n: usize) -> Result<Self, DomainError> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (i, item) in src.split(',').enumerate() {
            let (l, h) =
                item.split_once(':').ok_or_else(|| DomainError::InvalidBox(format!("interval {} lacks `:`", i + 1)))?;
            let num = |s: &str| {
                s.trim()
                    .replace('\u{2212}', "-")
                    .parse::<f64>()
                    .map_err(|_| DomainError::InvalidBox(format!("`{}` is not a number", s.trim())))
            };
            lo.push(num(l)?);
            hi.push(num(h)?);
        }
        if lo.len() != n {
            return Err(DomainError::InvalidBox(format!("expected {n} intervals, found {}", lo.len())));
        }
        SamplingBox::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.lo[i] == self.hi[i]
    }

    pub fn contains(&self, v: &Vector, slack: f64) -> bool {
        v.coords().iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| *x >= l - slack && *x <= h + slack)
    }

    /// Largest edge length.
    pub fn extent(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).fold(0.0, f64::max)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        Vector::new(
            self.lo.iter().zip(&self.hi).map(|(&l, &h)| if l == h { l } else { rng.random_range(l..h) }).collect(),
        )
    }

    /// Parameter at which `p + t u` (`t >= 0`) leaves the box; `None` when the
    /// ray stays inside forever (only for `u = 0`).
    pub fn exit_parameter(&self, p: &Vector, u: &Vector) -> Option<f64> {
        let mut t = f64::INFINITY;
        for i in 0..self.dim() {
            let ui = u[i];
            if ui > 0.0 {
                t = t.min((self.hi[i] - p[i]) / ui);
            } else if ui < 0.0 {
                t = t.min((self.lo[i] - p[i]) / ui);
            }
        }
        t.is_finite().then_some(t.max(0.0))
    }
}

/// Classification of a point against a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainStatus {
    Member,
    /// Some constraint satisfies `|g(v)| <= tol_strict`.
    NearBoundary,
    Outside,
    OutsideBox,
    /// A constraint could not be evaluated; treated as non-member.
    EvalError(EvalError),
}

/// Open region `{x : g_i(x) < 0 for all i}` together with a sampling box.
///
/// Pinned box coordinates restrict the region to an affine flat; the other
/// box faces only bound sampling and are not part of the region.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    dim: usize,
    constraints: Vec<Expr>,
    bounds: SamplingBox,
    flat: AffineSubspace,
    tol_strict: f64,
    tol_aff: f64,
}

impl DomainSpec {
    pub fn new(dim: usize, constraints: Vec<Expr>, bounds: SamplingBox, tol: &Tolerances) -> Result<Self, DomainError> {
        if bounds.dim() != dim {
            return Err(DomainError::InvalidBox(format!("box has {} intervals for dimension {dim}", bounds.dim())));
        }
        let mut base = Vector::zeros(dim);
        let mut free = Vec::new();
        let mut coords = base.clone().into_coords();
        for (i, c) in coords.iter_mut().enumerate() {
            if bounds.is_pinned(i) {
                *c = bounds.lo()[i];
            } else {
                free.push(Vector::unit(dim, i));
            }
        }
        base = Vector::new(coords);
        let flat = AffineSubspace::new(base, &free).expect("unit directions");
        Ok(DomainSpec { dim, constraints, bounds, flat, tol_strict: tol.strict, tol_aff: tol.aff })
    }

    /// Parse semicolon-separated constraints and a box description.
    pub fn parse(dim: usize, constraints: &str, bounds: &str, tol: &Tolerances) -> Result<Self, DomainError> {
        let cs = parse_constraints(constraints, dim)?;
        let b = SamplingBox::parse(bounds, dim)?;
        DomainSpec::new(dim, cs, b, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn bounds(&self) -> &SamplingBox {
        &self.bounds
    }

    /// `Aff(C)`: the flat cut out by pinned coordinates.
    pub fn flat(&self) -> &AffineSubspace {
        &self.flat
    }

    pub fn tol_strict(&self) -> f64 {
        self.tol_strict
    }

    /// Constraint-only classification (box faces ignored, pinned
    /// coordinates enforced).
    fn classify_region(&self, v: &Vector) -> DomainStatus {
        if v.dim() != self.dim {
            return DomainStatus::Outside;
        }
        for i in 0..self.dim {
            if self.bounds.is_pinned(i) && (v[i] - self.bounds.lo()[i]).abs() > self.tol_aff {
                return DomainStatus::Outside;
            }
        }
        let mut near = false;
        for g in &self.constraints {
            match eval(g, v.coords()) {
                Ok(val) if val < -self.tol_strict => {}
                Ok(val) if val <= self.tol_strict => near = true,
                Ok(_) => return DomainStatus::Outside,
                Err(e) => return DomainStatus::EvalError(e),
            }
        }
        if near {
            DomainStatus::NearBoundary
        } else {
            DomainStatus::Member
        }
    }

    /// Full classification including the sampling box.
    pub fn classify(&self, v: &Vector) -> DomainStatus {
        match self.classify_region(v) {
            DomainStatus::Member if !self.bounds.contains(v, self.tol_aff) => DomainStatus::OutsideBox,
            other => other,
        }
    }

    /// Member of the region and inside the sampling box.
    pub fn domain_member(&self, v: &Vector) -> bool {
        self.classify(v) == DomainStatus::Member
    }

    /// Member of the region `C`, irrespective of the sampling box.
    pub fn region_member(&self, v: &Vector) -> bool {
        self.classify_region(v) == DomainStatus::Member
    }
}

impl Body for DomainSpec {
    fn hull(&self) -> &AffineSubspace {
        &self.flat
    }
    fn contains(&self, v: &Vector) -> bool {
        self.region_member(v)
    }
}

/// `k` points uniform in the sampling box conditioned on domain membership.
pub fn sample_domain(d: &DomainSpec, k: usize, seed: u64) -> Result<PointCloud, DomainError> {
    sample_domain_stream(d, k, seed, 0)
}

/// As [`sample_domain`], drawing from stream `stream` of the seed.
pub fn sample_domain_stream(d: &DomainSpec, k: usize, seed: u64, stream: u64) -> Result<PointCloud, DomainError> {
    if k == 0 {
        return Err(DomainError::NoSamples);
    }
    const MIN_RATE: f64 = 1e-4;
    const PATIENCE: usize = 100_000;
    let cap = PATIENCE.max(k.saturating_mul(20_000));
    let mut rng = rng::stream(seed, rng::tag::SAMPLE, stream);
    let mut out = Vec::with_capacity(k);
    let mut attempts = 0usize;
    while out.len() < k {
        let v = d.bounds.sample(&mut rng);
        attempts += 1;
        if d.domain_member(&v) {
            out.push(v);
        }
        let too_thin = attempts >= PATIENCE && (out.len() as f64) < MIN_RATE * attempts as f64;
        if too_thin || attempts >= cap {
            return Err(DomainError::RegionTooThin { accepted: out.len(), attempts });
        }
    }
    Ok(PointCloud::new(out).expect("k >= 1 points of one dimension"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> DomainSpec {
        DomainSpec::parse(2, "x^2+y^2-1", "-1:1,-1:1", &Tolerances::default()).unwrap()
    }

    #[test]
    fn disc_membership() {
        let d = disc();
        assert!(d.domain_member(&Vector::new(vec![0.0, 0.0])));
        assert_eq!(d.classify(&Vector::new(vec![1.0, 0.0])), DomainStatus::NearBoundary);
        assert!(!d.domain_member(&Vector::new(vec![1.0, 0.0])));
        assert_eq!(d.classify(&Vector::new(vec![1.0, 1.0])), DomainStatus::Outside);
    }

    #[test]
    fn empty_constraints_accept_the_box() {
        let d = DomainSpec::parse(2, "", "-3:3,-3:3", &Tolerances::default()).unwrap();
        assert!(d.domain_member(&Vector::new(vec![2.9, -1.0])));
        assert_eq!(d.classify(&Vector::new(vec![4.0, 0.0])), DomainStatus::OutsideBox);
        assert!(d.region_member(&Vector::new(vec![4.0, 0.0])));
    }

    #[test]
    fn constraint_eval_error_is_non_member() {
        let d = DomainSpec::parse(1, "log(x)", "-1:1", &Tolerances::default()).unwrap();
        assert!(matches!(d.classify(&Vector::new(vec![-0.5])), DomainStatus::EvalError(_)));
        assert!(!d.domain_member(&Vector::new(vec![-0.5])));
        assert!(d.domain_member(&Vector::new(vec![0.5])));
    }

    #[test]
    fn pinned_coordinates_define_the_flat() {
        let d = DomainSpec::parse(2, "", "-2:2,0.5:0.5", &Tolerances::default()).unwrap();
        assert_eq!(d.flat().dim(), 1);
        assert!(d.domain_member(&Vector::new(vec![1.0, 0.5])));
        assert!(!d.domain_member(&Vector::new(vec![1.0, 0.6])));
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let d = disc();
        let a = sample_domain(&d, 100, 7).unwrap();
        let b = sample_domain(&d, 100, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| d.domain_member(p)));
        let full = DomainSpec::parse(2, "", "-1:1,-1:1", &Tolerances::default()).unwrap();
        let five = sample_domain(&full, 5, 1).unwrap();
        assert_eq!(five.len(), 5);
        assert!(five.iter().all(|p| full.bounds().contains(p, 0.0)));
    }

    #[test]
    fn contradictory_constraints_are_too_thin() {
        let d = DomainSpec::parse(1, "x+1; 1-x", "-2:2", &Tolerances::default()).unwrap();
        assert!(matches!(sample_domain(&d, 3, 0), Err(DomainError::RegionTooThin { accepted: 0, .. })));
    }

    #[test]
    fn box_syntax() {
        let b = SamplingBox::parse("-1:1, 0:2.5", 2).unwrap();
        assert_eq!(b.lo(), &[-1.0, 0.0]);
        assert_eq!(b.hi(), &[1.0, 2.5]);
        assert!(SamplingBox::parse("-1:1", 2).is_err());
        assert!(SamplingBox::parse("1:-1", 1).is_err());
        assert!(SamplingBox::parse("a:1", 1).is_err());
        assert!(SamplingBox::parse("0,1", 1).is_err());
    }
}
