//! Command line front end, file formats and a threaded partition runner
//! for `hgs-core`.

pub mod cli;
pub mod format;
pub mod runner;
