//! Preprocessing for odd cycle transversal based on tight odd cycle cuts.

pub mod graph;
pub mod separators;
pub mod oct;
pub mod occ;
pub mod covering;
pub mod coloring;
pub mod reduction;
pub mod discovery;
pub mod extraction;
pub mod instances;
