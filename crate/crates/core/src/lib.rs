//! Triangulation model, Neumann–Zagier data, A-polynomial elimination,
//! state-integral reduction and its numeric verification.

pub mod angles;
pub mod apoly;
pub mod closed;
pub mod fixtures;
pub mod linalg;
pub mod nz;
pub mod oracle;
pub mod reduce;
pub mod tri;
pub mod verify;
