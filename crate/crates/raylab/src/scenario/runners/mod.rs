mod bonavero;
mod energy;
mod filtration;
mod herm;
mod nonarch;
mod quantization;

pub use energy::{involution_errors, InvolutionErrors};

use super::{Outcome, ScenarioRunner};

pub(super) fn all() -> Vec<Box<dyn ScenarioRunner>> {
    vec![
        Box::new(herm::HermSlope),
        Box::new(energy::EnergyDuality),
        Box::new(bonavero::Bonavero),
        Box::new(nonarch::LknaConvergence),
        Box::new(quantization::Quantization),
        Box::new(filtration::FiltrationCurve),
    ]
}

/// `max` that keeps a NaN, so a broken measurement fails its assertion.
fn fmax(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
