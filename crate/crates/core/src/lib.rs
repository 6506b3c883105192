//! Exact computations with loops in the Hawaiian earring, the Specker group
//! and finite models of the James reduced product.

pub mod cli;
pub mod error;
pub mod free_words;
pub mod fuzz;
pub mod james_monoid;
pub mod orders;
pub mod rearrange;
pub mod specker;
pub mod word_expr;

pub use error::{Error, Result};
