//! Shooting solver and invariant checks for higher extremal Kähler
//! momentum profiles on pseudo-Hirzebruch surfaces.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod geometry;
pub mod ivp;
pub mod profile;
pub mod quad;
pub mod shoot;

pub use coeffs::{coeffs_from_c, constants_ln, CoeffSet, SectionClass, SurfaceSpec};
pub use geometry::{bando_futaki, class_integrals, cone_check, FutakiReport};
pub use error::{Error, Result};
pub use profile::{recover_phi, ProfileSolution};
pub use ivp::{integrate, u_extended, IvpTrajectory, Status};
pub use shoot::{find_m, phase_curve, scan_c, solve_bvp, solve_bvp_in, solve_bvp_with, BvpSolution, SolveOptions, Threshold};
