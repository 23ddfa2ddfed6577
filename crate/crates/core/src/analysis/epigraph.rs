use super::verdict::Negated;
use crate::geometry::{relative_interior_probe, AffineSubspace, Body, Vector};
use crate::model::{DomainSpec, Objective};
use crate::{Status, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpiKind {
    /// `f(x) <= r`
    Epi,
    /// `f(x) < r`
    StrictEpi,
}

/// `Epi f` or `Epis f` as a body in `R^(n+1)`, with hull `Aff(C) x R`.
pub struct EpigraphHandle<'a, O: Objective + ?Sized> {
    pub f: &'a O,
    pub domain: &'a DomainSpec,
    pub kind: EpiKind,
    hull: AffineSubspace,
}

impl<'a, O: Objective + ?Sized> EpigraphHandle<'a, O> {
    pub fn new(f: &'a O, domain: &'a DomainSpec, kind: EpiKind) -> Self {
        EpigraphHandle { f, domain, kind, hull: domain.flat().with_vertical() }
    }

    pub fn member(&self, x: &Vector, r: f64) -> bool {
        if !self.domain.domain_member(x) {
            return false;
        }
        let tol = self.domain.tol_strict();
        match (self.f.value(x), self.kind) {
            (Ok(v), EpiKind::Epi) => v <= r + tol,
            (Ok(v), EpiKind::StrictEpi) => v < r - tol,
            (Err(_), _) => false,
        }
    }
}

impl<O: Objective + ?Sized> Body for EpigraphHandle<'_, O> {
    fn hull(&self) -> &AffineSubspace {
        &self.hull
    }

    fn contains(&self, v: &Vector) -> bool {
        let (x, r) = v.split_height();
        if !self.domain.region_member(&x) {
            return false;
        }
        let tol = self.domain.tol_strict();
        match (self.f.value(&x), self.kind) {
            (Ok(fx), EpiKind::Epi) => fx <= r + tol,
            (Ok(fx), EpiKind::StrictEpi) => fx < r - tol,
            (Err(_), _) => false,
        }
    }
}

/// The sublevel set `{x in C : f(x) < level}` inside `Aff(C)`.
struct Sublevel<'a, O: ?Sized> {
    f: &'a O,
    domain: &'a DomainSpec,
    level: f64,
}

impl<O: Objective + ?Sized> Body for Sublevel<'_, O> {
    fn hull(&self) -> &AffineSubspace {
        self.domain.flat()
    }

    fn contains(&self, v: &Vector) -> bool {
        self.domain.region_member(v) && self.f.value(v).is_ok_and(|fv| fv < self.level)
    }
}

/// Whether `(v, r)` lies in the relative interior of `Epi f`, decided by
/// finding a level `r' < r` whose sublevel set contains a ball around `v`.
///
/// Levels tried: `r - 1e-2`, `r - 1e-4`, `r - 1e-6` (those above `f(v)`)
/// and the midpoint `(f(v) + r) / 2`.
pub fn epi_interior_member<O: Objective + ?Sized>(
    h: &EpigraphHandle<'_, O>,
    v: &Vector,
    r: f64,
    tol: &Tolerances,
) -> Status {
    let d = h.domain;
    if v.dim() != d.dim() || !d.region_member(v) {
        return Status::Refuted;
    }
    let Ok(fv) = h.f.value(v) else {
        return Status::Refuted;
    };
    if fv >= r - tol.strict {
        return Status::Refuted;
    }
    let in_c = relative_interior_probe(v, d, &tol.refining_radii(), tol).expect("dimension checked");
    if in_c.status == Status::Refuted {
        return Status::Refuted;
    }
    let radii = tol.graph_radii();
    let mut levels: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|s| r - s).filter(|&l| l > fv).collect();
    levels.push(0.5 * (fv + r));
    let mut all_refuted = true;
    for level in levels {
        let body = Sublevel { f: h.f, domain: d, level };
        match relative_interior_probe(v, &body, &radii, tol).expect("dimension checked").status {
            Status::Certified => return Status::Certified,
            Status::Inconclusive => all_refuted = false,
            Status::Refuted => {}
        }
    }
    if all_refuted {
        Status::Refuted
    } else {
        Status::Inconclusive
    }
}

/// Relative-interior probe of `(v, r)` against the strict epigraph itself,
/// with balls in `Aff(C) x R`.
pub fn strict_epi_interior_member<O: Objective + ?Sized>(
    f: &O,
    domain: &DomainSpec,
    v: &Vector,
    r: f64,
    tol: &Tolerances,
) -> Status {
    let h = EpigraphHandle::new(f, domain, EpiKind::StrictEpi);
    if v.dim() != domain.dim() {
        return Status::Refuted;
    }
    relative_interior_probe(&v.with_height(r), &h, &tol.graph_radii(), tol).expect("dimension checked").status
}

/// Upper semicontinuity at `x0`: `(x0, f(x0) + eps)` must be interior to the
/// epigraph for `eps` in `1e-1, 1e-2, 1e-3`.
pub fn usc_at<O: Objective + ?Sized>(f: &O, domain: &DomainSpec, x0: &Vector, tol: &Tolerances) -> Status {
    let Ok(fx) = f.value(x0) else {
        return Status::Refuted;
    };
    let h = EpigraphHandle::new(f, domain, EpiKind::Epi);
    Status::all([1e-1, 1e-2, 1e-3].iter().map(|eps| epi_interior_member(&h, x0, fx + eps, tol)))
}

/// Check `Epis f = (X x R) \ sigma(Epi(-f))` with `sigma(x, r) = (x, -r)` on
/// the given probes. Probes off the domain or within twice the strict
/// tolerance of the graph are skipped.
pub fn strict_epi_complement_identity<O: Objective + ?Sized>(h: &EpigraphHandle<'_, O>, pts: &[(Vector, f64)]) -> bool {
    let neg = Negated(h.f);
    let mirrored = EpigraphHandle::new(&neg, h.domain, EpiKind::Epi);
    let strict = EpigraphHandle::new(h.f, h.domain, EpiKind::StrictEpi);
    let band = 2.0 * h.domain.tol_strict();
    pts.iter().all(|(x, r)| {
        if !h.domain.domain_member(x) {
            return true;
        }
        match h.f.value(x) {
            Ok(fx) if (fx - r).abs() > band => strict.member(x, *r) == !mirrored.member(x, -r),
            _ => true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FunctionSpec;

    fn square() -> FunctionSpec {
        FunctionSpec::parse("x^2", 1, "", "-10:10", &Tolerances::default()).unwrap()
    }

    #[test]
    fn interior_of_parabola_epigraph() {
        let tol = Tolerances::default();
        let s = square();
        let h = EpigraphHandle::new(&s.f, &s.domain, EpiKind::Epi);
        let o = Vector::zeros(1);
        assert_eq!(epi_interior_member(&h, &o, 1.0, &tol), Status::Certified);
        assert_eq!(epi_interior_member(&h, &o, 0.0, &tol), Status::Refuted);
        assert_eq!(epi_interior_member(&h, &o, -1.0, &tol), Status::Refuted);
        assert_eq!(strict_epi_interior_member(&s.f, &s.domain, &o, 1.0, &tol), Status::Certified);
        assert_eq!(strict_epi_interior_member(&s.f, &s.domain, &o, -1.0, &tol), Status::Refuted);
    }

    #[test]
    fn complement_identity_on_parabola() {
        let s = square();
        let h = EpigraphHandle::new(&s.f, &s.domain, EpiKind::StrictEpi);
        let probes = [(0.0, 1.0), (0.0, -1.0), (2.0, 5.0), (1.0, 1.0)];
        let pts: Vec<_> = probes.iter().map(|&(x, r)| (Vector::new(vec![x]), r)).collect();
        assert!(strict_epi_complement_identity(&h, &pts));
    }

    #[test]
    fn continuous_and_constant_functions_are_usc() {
        let tol = Tolerances::default();
        let s = square();
        assert_eq!(usc_at(&s.f, &s.domain, &Vector::new(vec![1.5]), &tol), Status::Certified);
        let c = FunctionSpec::parse("0", 2, "", "-1:1,-1:1", &tol).unwrap();
        assert_eq!(usc_at(&c.f, &c.domain, &Vector::new(vec![0.2, 0.1]), &tol), Status::Certified);
    }
}
