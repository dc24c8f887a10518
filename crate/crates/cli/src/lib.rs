//! Library side of the `lrdcp` command-line tool: Monte Carlo rejection
//! tables, CSV ingestion and data analysis, and local Whittle estimation.

pub mod analyze;
pub mod error;
pub mod options;
pub mod simulate;
pub mod whittle;

pub use error::{CliError, CliResult};
