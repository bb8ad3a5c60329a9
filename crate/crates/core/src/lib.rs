//! Staggered quantum walks on tessellated graphs.
//!
//! The walk operator is a product of reflections, one per tessellation of a
//! graph's clique cover. On top of the sparse evolution this crate provides
//! two unitary percolation noise models (breaking polygons and breaking
//! vertices, resampled before every step), spatial search by partial
//! tessellations on grids of `4q`-cliques, the statistics needed to compare
//! noisy walks against the noiseless and classical cases, and dense
//! reference implementations used to verify all of it.

pub mod analysis;
pub mod evolve;
pub mod graph;
pub mod noise;
pub mod oracle;
pub mod rng;
pub mod search;

pub use num_complex::Complex64;
