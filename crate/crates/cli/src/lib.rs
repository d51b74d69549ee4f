//! Command-line interface: file-first pipelines over the library, with
//! reproducible seeded sampling and deterministic artifacts.
//!
//! Exit codes: 0 success, 2 validation, 3 integration, 4 verification,
//! 5 solver.

mod commands;
mod output;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;

/// CLI failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: msg.into() }
    }
    fn verification(msg: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFICATION, message: msg.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<pharmonic::SpectralError> for CliError {
    fn from(e: pharmonic::SpectralError) -> Self {
        let code = match e {
            pharmonic::SpectralError::InvalidParam(_) => EXIT_VALIDATION,
            _ => EXIT_INTEGRATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<pharmonic::FieldError> for CliError {
    fn from(e: pharmonic::FieldError) -> Self {
        let code = match e {
            pharmonic::FieldError::Invalid(_) | pharmonic::FieldError::DimensionMismatch { .. } => {
                EXIT_VALIDATION
            }
            pharmonic::FieldError::Spectral(ref s) => match s {
                pharmonic::SpectralError::InvalidParam(_) => EXIT_VALIDATION,
                _ => EXIT_INTEGRATION,
            },
            _ => EXIT_VERIFICATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<pharmonic::GeometryError> for CliError {
    fn from(e: pharmonic::GeometryError) -> Self {
        Self { code: EXIT_VALIDATION, message: e.to_string() }
    }
}

impl From<pharmonic::verify::VerifyError> for CliError {
    fn from(e: pharmonic::verify::VerifyError) -> Self {
        Self { code: EXIT_VERIFICATION, message: e.to_string() }
    }
}

impl From<pharmonic::solver::SolverError> for CliError {
    fn from(e: pharmonic::solver::SolverError) -> Self {
        let code = match e {
            pharmonic::solver::SolverError::InvalidProblem(_)
            | pharmonic::solver::SolverError::MeshGeneration(_) => EXIT_VALIDATION,
            _ => EXIT_SOLVER,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_VALIDATION, message: format!("io error: {e}") }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self { code: EXIT_VALIDATION, message: format!("json error: {e}") }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pharmonic",
    version,
    about = "p-harmonic singular solutions: construction and verification"
)]
pub struct Cli {
    /// Output directory for artifacts
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomized sampling; recorded in every output header
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also print the summary JSON to stdout
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral exponents beta_k: closed form vs shooting
    Beta {
        #[arg(long)]
        p: f64,
        /// Single mode "2" or inclusive range "1..4"
        #[arg(long)]
        k: String,
    },
    /// Tabulate the antiperiodic profile omega_k
    Omega {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
        /// Number of grid intervals on one antiperiod
        #[arg(long, default_value_t = 512)]
        m: usize,
    },
    /// Build a field from a descriptor and export sampled values
    Assemble {
        /// Field descriptor: inline JSON or @path/to/file.json
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Sampling annulus radii around the origin
        #[arg(long, default_value_t = 0.3)]
        r_lo: f64,
        #[arg(long, default_value_t = 1.5)]
        r_hi: f64,
    },
    /// Strong-form p-Laplace residual sweep over a field
    Residual {
        #[arg(long)]
        field: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 0.5)]
        r_lo: f64,
        #[arg(long, default_value_t = 1.5)]
        r_hi: f64,
        /// Reject samples whose (x1, x2)-plane radius is below this
        #[arg(long, default_value_t = 0.4)]
        min_plane_radius: f64,
        /// Pass threshold on |normalized residual|
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
    },
    /// Spherical spectral residual of the 3D separable ansatz
    Spherical {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
    },
    /// Boundary limits |x-a| u(x) over a direction fan
    Limits {
        #[arg(long)]
        field: String,
        /// Boundary point, comma-separated
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        a: String,
        /// Outward normal at a, comma-separated
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        normal: String,
        #[arg(long, default_value_t = 32)]
        directions: usize,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Reflection, eikonal and transformed-coefficient checks on a geometry
    Reflectcheck {
        /// Geometry descriptor: inline JSON or @file
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Solve a p-Laplacian Dirichlet problem on a disk or sector mesh
    Solve {
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        /// Boundary data: zero | constant:<c> | affine-x2 |
        /// separable:<p>:<k> (arc data, zero elsewhere) | exterior-kernel
        #[arg(long, default_value = "zero")]
        bc: String,
    },
    /// Epsilon-exhaustion construction of the fundamental singular solution
    Fundamental {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
    },
    /// Filled contour SVG of a 2D field or a finite-element solution
    Render {
        /// Field descriptor (inline JSON or @file); 2D only
        #[arg(long, conflicts_with_all = ["mesh", "solution"])]
        field: Option<String>,
        /// Mesh JSON path (with --solution)
        #[arg(long, requires = "solution")]
        mesh: Option<PathBuf>,
        /// Solution CSV path (with --mesh)
        #[arg(long, requires = "mesh")]
        solution: Option<PathBuf>,
        /// Window "x0,y0,x1,y1" for field rendering
        #[arg(long, default_value = "-1.2,-1.2,1.2,1.2", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 96)]
        grid: usize,
        /// Output file name (inside --out)
        #[arg(long, default_value = "render.svg")]
        name: String,
    },
}

/// Entry point shared by the binary and the tests.
pub fn run(cli: Cli) -> i32 {
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
