//! MV-cycles and MV-polytopes for `GL_n` in the lattice model of the loop
//! Grassmannian.
//!
//! * [`kostant`]: Kostant pictures and their enumeration.
//! * [`collapse`]: collapsing pictures along columns, ancestry.
//! * [`polytope`]: the vertex map `w -> nu(w)`, facets, exact convexity.
//! * [`lattice`]: exact lattices over truncated Laurent series.
//! * [`compat`]: p-flags, compatibility grades, the flag-point parametrization.
//! * [`verify`]: batch sweeps with machine-readable reports.

pub mod collapse;
pub mod compat;
pub mod error;
pub mod field;
pub mod io;
pub mod kostant;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod par;
pub mod perm;
pub mod polytope;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use kostant::{Coweight, KostantPicture, Loop, RootCombination};
pub use par::Exec;
pub use perm::Permutation;
