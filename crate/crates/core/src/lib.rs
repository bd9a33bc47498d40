//! Wright-type functions attached to stable processes and the distributions of
//! areas under stable excursions, meanders and conditioned paths.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod index;
pub mod inversion;
pub mod mp;
pub mod quad;
pub mod simulate;
pub mod transforms;
pub mod wright;

pub use error::{Error, Result};
pub use index::StableIndex;
