pub mod error;
pub mod numeric;
pub mod quadrature;
pub mod models;
pub mod orbifold_kernel;
pub mod resonance;
pub mod gram_kernel;
pub mod analysis;
pub mod cli;
