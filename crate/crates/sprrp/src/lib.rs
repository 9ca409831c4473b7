//! Instance files, reports, LP export and the `sprrp` command-line tool for
//! solar-powered rover routing. The algorithms live in `sprrp-core`.

pub mod cli;
pub mod dot;
pub mod format;
pub mod lp;
pub mod report;
pub mod solvers;
pub mod sweep;

pub use format::{parse_instance, serialize_instance, FormatError};
pub use lp::write_lp;
