use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser, Serialize)]
#[command(name = "bergman", version, about = "Bergman kernels of model polarized Kähler spaces")]
pub struct Cli {
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true, env = "BERGMAN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Kernel of ℂⁿ/ℤ_q at a point, closed form and series oracle
    OrbifoldEval(OrbifoldEvalArgs),
    /// Scan the orbifold kernel along a ray t·√r and report its minimum
    OrbifoldRay(OrbifoldRayArgs),
    /// Build and verify a resonance certificate
    Resonance(WeightsArgs),
    /// Find a point where the orbifold kernel drops below 1
    Subunity(SubunityArgs),
    /// Kernel of a surface of revolution along the meridian
    Revolution(RevolutionArgs),
    /// Gram matrix of the perturbed sphere
    Gram(GramArgs),
    /// Fubini–Study kernel on ℂPⁿ
    Cpn(CpnArgs),
    /// First expansion coefficient from two tensor powers
    Tyz(TyzArgs),
    /// L^p deviation of the normalised kernel from 1
    Lp(LpArgs),
    /// sup |log ρ_m|/m over a list of tensor powers
    Fscurrent(FsCurrentArgs),
    /// Sweep the cone-approximation family over (k, m)
    ConeSweep(ConeSweepArgs),
    /// Run a JSON config file
    Config(ConfigArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WeightsArgs {
    /// Weights p/q, comma separated (e.g. 1/3,1/5)
    #[arg(long)]
    pub weights: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbifoldEvalArgs {
    #[arg(long)]
    pub weights: String,
    /// Point coordinates, comma separated; each real or complex like 1+0.5i
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    /// Tail tolerance for the series oracle
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbifoldRayArgs {
    #[arg(long)]
    pub weights: String,
    /// Direction r ≥ 0, comma separated (defaults to all ones)
    #[arg(long, value_delimiter = ',')]
    pub direction: Vec<f64>,
    #[arg(long, default_value_t = 3.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 600)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SubunityArgs {
    #[arg(long)]
    pub weights: String,
    #[arg(long, default_value_t = 50)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Round sphere
    Round,
    /// Smoothed cone-approximation member f_k
    Cone,
    /// Limit profile with an exact cone of angle 2π/3
    Limit,
    /// Sampled profile read from an r,psi CSV file
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value_t = ProfileKind::Round)]
    pub profile: ProfileKind,
    /// Index of the cone-approximation member
    #[arg(long, default_value_t = 20)]
    pub k: u32,
    /// Profile file for --profile csv
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Degree: the profile is rescaled to this area
    #[arg(long, default_value_t = 1)]
    pub d: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct RevolutionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub m: u32,
    /// Number of equally spaced radii from pole to pole
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Write k,log_N_k instead of the kernel
    #[arg(long)]
    pub norms: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GramArgs {
    /// Oscillation frequency of the perturbation (0 for none)
    #[arg(long, default_value_t = 6)]
    pub k: u32,
    #[arg(long)]
    pub m: u32,
    /// Write the matrix as i,j,re,im rows
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CpnArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct TyzArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 10)]
    pub m1: u32,
    #[arg(long, default_value_t = 20)]
    pub m2: u32,
    /// Radius at which to compare a₁ with S/2
    #[arg(long, default_value_t = 0.3)]
    pub r: f64,
    /// Use the exact ℂPⁿ kernel of this dimension instead of a profile
    #[arg(long)]
    pub cpn: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct LpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    /// Use the perturbed sphere with this frequency instead of a profile
    #[arg(long)]
    pub perturbed: Option<u32>,
    #[arg(long)]
    pub m: u32,
    /// Exponent; "inf" for the sup norm
    #[arg(long, default_value = "1")]
    pub p: String,
    /// Ball radius around the pole (chart radius for the perturbed sphere)
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FsCurrentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub perturbed: Option<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 40, 80])]
    pub ms: Vec<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConeSweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 40])]
    pub ks: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![25, 100, 400])]
    pub ms: Vec<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConfigArgs {
    pub path: PathBuf,
}
