//! Command-line front end for the `cspstream` library: file formats,
//! argument parsing, and the exit-code contract.

pub mod cli;
pub mod io;
