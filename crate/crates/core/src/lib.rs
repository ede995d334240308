//! Numerical laboratory for the planar torsion problem with Robin boundary
//! conditions Δu = N in Ω, ∂u/∂ν + βu = 0 on ∂Ω: curved-boundary finite
//! elements on star-shaped domains, Steklov spectra for β-admissibility,
//! boundary integral identity verification, rigidity deficit functionals,
//! and volume-constrained shape-gradient flow of the torsional rigidity.

pub mod error;
pub mod fem;
pub mod geometry;
pub mod identities;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod radial;
pub mod spectral;
pub mod steklov;

pub use error::{Error, Result};
pub use fem::{solve_robin, Admissibility, BoundaryTrace, RobinParameter, RobinSolution};
pub use geometry::{BoundaryCurve, CurvePoint, GeometrySummary};
pub use identities::{deficits, fundamental_identity, sbt_identity, serrin_identity, DeficitReport, IdentityReport};
pub use mesh::{build_mesh, BoundaryEdge, Mesh};
pub use radial::RadialCase;
pub use steklov::{check_admissibility, steklov_spectrum, SteklovSpectrum};
