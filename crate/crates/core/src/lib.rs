//! Parameter-transfer extreme learning machines.

pub mod data;
pub mod elm;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod ptelm;

pub use error::{Error, Result};
