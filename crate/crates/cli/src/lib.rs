//! Command-line front end over the verification library: instance
//! generation, point verification, the box→simplex reduction with its
//! certificate, gradient solvers, the end-to-end pipeline, and the
//! game↔program bridges — all emitting machine-readable reports with
//! exact numbers carried as strings.

pub mod cli;
pub mod commands;
pub mod format;
