//! Discrete CMC-1 surfaces in hyperbolic space, and discrete minimal surfaces
//! in R³, from pairs of circle patterns on triangulated disks.
//!
//! A pattern assigns a point of the Riemann sphere to each vertex. Two
//! patterns on the same disk define, face by face, the Möbius map taking one
//! triangle of points to the other; after a coherent choice of sign these
//! maps `A` give hyperbolic points `A A*`. When the patterns share their
//! shear coordinates the points span a horospherical net of constant mean
//! curvature one; when they share their intersection angles, an equidistant
//! net. Toda-type edge data produce one-parameter families of such pairs, and
//! the lattice harness in [`convergence`] compares discrete frames and nets
//! with their smooth counterparts as the lattice is refined.

pub mod cli;
pub mod cmc1;
pub mod convergence;
pub mod equidistant;
pub mod io;
pub mod mesh;
pub mod minimal;
pub mod moebius;
pub mod osculating;
pub mod pattern;
pub mod toda;

pub use num_complex::Complex64 as C64;

use thiserror::Error;

/// Any failure of the library, grouped by module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Moebius(#[from] moebius::MoebiusError),
    #[error(transparent)]
    Pattern(#[from] pattern::PatternError),
    #[error(transparent)]
    Osculating(#[from] osculating::OsculatingError),
    #[error(transparent)]
    Cmc1(#[from] cmc1::Cmc1Error),
    #[error(transparent)]
    Equidistant(#[from] equidistant::EquidistantError),
    #[error(transparent)]
    Toda(#[from] toda::TodaError),
    #[error(transparent)]
    Minimal(#[from] minimal::MinimalError),
    #[error(transparent)]
    Convergence(#[from] convergence::ConvergenceError),
    #[error("net has not been measured")]
    UnmeasuredNet,
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> String {
        let s = format!("{self:?}");
        let head = s.split(['(', ' ', '{']).next().unwrap_or("Error");
        match self {
            Error::Mesh(e) => format!("mesh.{}", variant(e)),
            Error::Moebius(e) => format!("moebius.{}", variant(e)),
            Error::Pattern(e) => format!("pattern.{}", variant(e)),
            Error::Osculating(e) => format!("osculating.{}", variant(e)),
            Error::Cmc1(e) => format!("cmc1.{}", variant(e)),
            Error::Equidistant(e) => format!("equidistant.{}", variant(e)),
            Error::Toda(e) => format!("toda.{}", variant(e)),
            Error::Minimal(e) => format!("minimal.{}", variant(e)),
            Error::Convergence(e) => format!("convergence.{}", variant(e)),
            _ => head.to_string(),
        }
    }

    /// Process exit code: 2 usage, 3 input, 4 invalid geometry, 5 unmet
    /// hypotheses, 6 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use convergence::ConvergenceError as C;
        match self {
            Error::Usage(_) => 2,
            Error::Io(_) | Error::Parse(_) => 3,
            Error::Mesh(_) | Error::Pattern(_) | Error::Moebius(_) | Error::Minimal(_) | Error::UnmeasuredNet => 4,
            Error::Convergence(C::NewtonDiverged { .. }) | Error::Convergence(C::DomainExhausted) => 6,
            _ => 5,
        }
    }
}

fn variant<T: std::fmt::Debug>(e: &T) -> String {
    let s = format!("{e:?}");
    s.split(['(', ' ', '{']).next().unwrap_or("").to_string()
}
