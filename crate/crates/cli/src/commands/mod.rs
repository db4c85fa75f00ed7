pub mod common;
pub mod density;
pub mod probe;
pub mod quarter;
pub mod rectangle;
pub mod sweep;
pub mod zigzag;

pub use common::{CliError, Outcome};
