//! Inputs shared by the benchmarks.

use qwe_core::code::library;
use qwe_core::network::builders::surface_code;
use qwe_core::{ContractionPlan, StabilizerGroup, Strategy, TensorNetwork, WeightScheme};

/// Codes small enough to enumerate by counting.
pub fn counting_codes() -> Vec<(&'static str, StabilizerGroup)> {
    vec![
        ("five_qubit", library::five_qubit()),
        ("steane", library::steane()),
        ("qutrit_three", library::qutrit_three()),
    ]
}

/// The 25-qubit surface code and its greedy plan.
pub fn surface() -> (TensorNetwork, ContractionPlan) {
    let net = surface_code(4, 4, WeightScheme::shor_laflamme(2)).unwrap();
    let plan = net.plan(Strategy::Greedy);
    (net, plan)
}

/// A `3 × cols` strip with the double scheme and its greedy plan.
pub fn strip(cols: usize) -> (TensorNetwork, ContractionPlan) {
    let net = surface_code(3, cols, WeightScheme::double(2)).unwrap();
    let plan = net.plan(Strategy::Greedy);
    (net, plan)
}
