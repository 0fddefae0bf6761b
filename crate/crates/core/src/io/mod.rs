//! Text formats and instance generators.

pub mod format;
pub mod generate;
pub mod trace;
