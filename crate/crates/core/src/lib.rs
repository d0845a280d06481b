pub mod data;
pub mod kinetics;
pub mod pipeline;
pub mod query;
pub mod render;
mod warnings;

pub use warnings::WarningLog;
