use serde::Serialize;

/// Numerical tolerances and probe parameters used throughout the crate.
///
/// All values are positive. The defaults are desk-scale choices for
/// well-conditioned problems with coordinates of order one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative rank cutoff: directions whose residual falls below
    /// `rank_rel * sigma_max` do not extend an affine hull.
    pub rank_rel: f64,
    /// Absolute residual for affine-subspace membership.
    pub aff: f64,
    /// Orthonormality tolerance for hull bases.
    pub orth: f64,
    /// Margin separating strict constraint satisfaction from the boundary.
    pub strict: f64,
    /// Coefficient of the strict-convexity gap `sc * t(1-t)|x-y|^2`.
    pub sc: f64,
    /// Equality tolerance (scaled by `1 + |value|`).
    pub eq: f64,
    /// Ball radius for relative-interior probes.
    pub probe_radius: f64,
    /// Steps at which a direction must exit a body to refute interiority.
    pub exit_steps: Vec<f64>,
    /// Random directions added to the axis directions of a probe.
    pub random_directions: usize,
    /// Seed for the probe directions (probes are otherwise deterministic).
    pub probe_seed: u64,
    /// Value an approach ladder must reach to certify blow-up.
    pub blowup_threshold: f64,
    /// Height cap for boundary columns of bounded functions.
    pub height_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-9,
            aff: 1e-7,
            orth: 1e-10,
            strict: 1e-10,
            sc: 1e-9,
            eq: 1e-9,
            probe_radius: 1e-4,
            exit_steps: vec![1e-4, 1e-6, 1e-8],
            random_directions: 32,
            probe_seed: 0x5eed_d1ec,
            blowup_threshold: 1e6,
            height_cap: 1e3,
        }
    }
}

impl Tolerances {
    /// Probe radii tried in turn by refining interior probes: the configured
    /// radius, then each smaller exit step.
    pub fn refining_radii(&self) -> Vec<f64> {
        let mut radii = vec![self.probe_radius];
        radii.extend(self.exit_steps.iter().copied().filter(|&s| s < self.probe_radius));
        radii
    }

    /// Refining radii continued down to `1e-14` in steps of 100, for probes
    /// of sets bounded by the graph of a steep function.
    pub fn graph_radii(&self) -> Vec<f64> {
        let mut radii = self.refining_radii();
        let mut r = radii.last().copied().unwrap_or(self.probe_radius);
        while r > 1e-14 {
            r *= 1e-2;
            radii.push(r);
        }
        radii
    }

    /// `eq * (1 + |scale|)`.
    pub fn eq_at(&self, scale: f64) -> f64 {
        self.eq * (1.0 + scale.abs())
    }

    /// True when every tolerance is strictly positive and finite.
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("rank_rel", self.rank_rel),
            ("aff", self.aff),
            ("orth", self.orth),
            ("strict", self.strict),
            ("sc", self.sc),
            ("eq", self.eq),
            ("probe_radius", self.probe_radius),
            ("blowup_threshold", self.blowup_threshold),
            ("height_cap", self.height_cap),
        ];
        for (name, value) in named {
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("tolerance `{name}` must be positive, got {value}"));
            }
        }
        if self.exit_steps.is_empty() || self.exit_steps.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("exit steps must be a nonempty list of positive values".into());
        }
        Ok(())
    }
}
