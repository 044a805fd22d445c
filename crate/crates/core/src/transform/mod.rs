//! Overlap analysis and the transformation of DT problems to relative systems.

mod confluence;
mod delta;

pub use confluence::{
    confluence_parallel_innermost, is_non_overlapping, is_non_overlapping_with, ConfluenceVerdict,
    Overlap,
};
pub use delta::delta;
