//! Bergman kernels on ℂP¹ (surfaces of revolution and perturbed
//! Fubini–Study metrics) and on ℂPⁿ with the Fubini–Study metric.

pub mod cpn;
pub mod gram;
pub mod potential;
pub mod revolution;

pub use cpn::{cpn_fs_exact, cpn_oracle_at_unit_point, cpn_oracle_float};
pub use gram::{gram_matrix, rho_gram, GramMatrix, GramModel};
pub use potential::{build_potential, PotentialTable, TableOptions};
pub use revolution::{monomial_norms, peak_section_tail, rho_revolution, MonomialNorms, PeakSection, RevolutionKernel};

/// One kernel sample. `r` is the radial coordinate used for region tests
/// (geodesic distance for revolution metrics, `|z|` in a chart for the Gram path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub r: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// Area weight when the sample is a quadrature node, otherwise 0.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats {
    pub inf: f64,
    pub sup: f64,
    pub argmin: f64,
    pub integral: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelField {
    pub m: u32,
    pub samples: Vec<Sample>,
    pub stats: FieldStats,
}
