//! Few-weight linear codes `C_{S×D}` over finite fields: exact field and
//! character-sum arithmetic, code construction, weight distributions and
//! verification of their structural properties.

pub mod analysis;
pub mod charsum;
pub mod cli;
pub mod codes;
pub mod defsets;
pub mod error;
pub mod gf;

pub use error::{Error, Result};
