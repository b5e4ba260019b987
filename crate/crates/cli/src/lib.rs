//! File formats, pipelines and convergence studies behind the `layerquad` binary.

pub mod io;
pub mod pipeline;
pub mod study;
