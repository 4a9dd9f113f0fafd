//! Exact computations with finite categories and their presheaf topoi.

pub mod error;
pub mod fincat;
pub mod handle;
pub mod kan;
pub mod presheaf;
pub mod site;
mod unionfind;
pub mod verify;

pub use error::{Error, Result};
