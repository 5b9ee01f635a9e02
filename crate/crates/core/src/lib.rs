//! Exact engine for semi-commuting and commuting differential operators of
//! the Heun family.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod diffop;
pub mod error;
pub mod expr;
pub mod family;
pub mod funcalg;
pub mod semicommute;
pub mod series;

pub use error::{Error, Result};
