//! Higher residue pairings of quasi-homogeneous singularities, computed
//! exactly over Q and over the truncated Witt rings W_m(F_p) = Z/p^m.

pub mod brieskorn;
pub mod coeff;
pub mod error;
pub mod poly;
pub mod residue;
pub mod witt;
pub mod witt_lift;

pub use error::{Error, Result};
