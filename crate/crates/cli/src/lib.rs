//! Command-line companion to `cursekit-core`: point-set file I/O, table
//! rendering (pretty / CSV / JSON / SVG), and the subcommand implementations
//! behind the `cursekit` binary.

pub mod commands;
pub mod io;
pub mod table;
