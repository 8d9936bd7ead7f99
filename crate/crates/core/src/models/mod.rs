//! Model geometries: cyclic weights, surfaces of revolution, the cone
//! approximation family and the perturbed Fubini–Study potential.

pub mod cone;
pub mod cyclic;
pub mod perturbed;
pub mod profile;

pub use cone::{eval_f_k, ConeApprox};
pub use cyclic::{make_cyclic_weights, CyclicWeights};
pub use perturbed::PerturbedPotential;
pub use profile::{rescale_to_area, RevolutionProfile, Shape};

/// Value and first two derivatives of a 1-D function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }
}
