//! Non-commuting set machinery for unipotent upper-triangular groups over
//! finite fields: exact GF(p^r) arithmetic, UU_n matrices and centralizers,
//! the point structures M / Q / N, line configurations, an exact max-clique
//! solver, and end-to-end verification of the omega formulas and bounds.

pub mod bits;
pub mod clique;
pub mod gf;
pub mod lines;
pub mod rng;
pub mod structures;
pub mod unitriangular;
pub mod verify;
