//! Harness for the hop-loss experiments: sweep execution over
//! topology x anchor-count x radius grids, result persistence, summary
//! tables, plot-ready data files, and self-check suites.

pub mod config;
pub mod plotdata;
pub mod seed;
pub mod summary;
pub mod sweep;
pub mod verify;
