use super::{Scenario, ScenarioError};

const FILES: &[(&str, &str)] = &[
    ("arithmetic_lower_bound", include_str!("../../scenarios/arithmetic_lower_bound.json")),
    ("bonavero_half_interval", include_str!("../../scenarios/bonavero_half_interval.json")),
    ("bonavero_limit", include_str!("../../scenarios/bonavero_limit.json")),
    ("det_slope_random", include_str!("../../scenarios/det_slope_random.json")),
    ("dual_isometry_random", include_str!("../../scenarios/dual_isometry_random.json")),
    ("energy_ray_family", include_str!("../../scenarios/energy_ray_family.json")),
    ("envelope_coherence", include_str!("../../scenarios/envelope_coherence.json")),
    ("exponent_bridge", include_str!("../../scenarios/exponent_bridge.json")),
    ("filtration_linear", include_str!("../../scenarios/filtration_linear.json")),
    ("legendre_involution", include_str!("../../scenarios/legendre_involution.json")),
    ("lkna_expansion", include_str!("../../scenarios/lkna_expansion.json")),
    ("quantization_smooth", include_str!("../../scenarios/quantization_smooth.json")),
    ("slope_bridge", include_str!("../../scenarios/slope_bridge.json")),
    ("toric_ray_halfslope", include_str!("../../scenarios/toric_ray_halfslope.json")),
];

/// A scenario shipped with the library.
#[derive(Debug, Clone)]
pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

impl Bundled {
    pub fn scenario(&self) -> Result<Scenario, ScenarioError> {
        Scenario::parse(self.text)
    }
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn bundled(name: &str) -> Option<Bundled> {
    FILES.iter().find(|(n, _)| *n == name).map(|(name, text)| Bundled { name, text })
}
