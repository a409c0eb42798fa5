//! File formats: key-value configs, CSV tables, and SVG plots.

pub mod config;
pub mod csv;
pub mod svg;
