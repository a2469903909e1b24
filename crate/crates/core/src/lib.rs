//! Exact computations with framed quiver cells, residue ideals and shuffle
//! algebras of quantum loop algebras.

pub mod battery;
pub mod error;
pub mod exact_ring;
pub mod par;
pub mod quiver_cells;
pub mod root_data;
pub mod shuffle_mod;
pub mod theta_ideals;

pub use error::{Error, Result};
