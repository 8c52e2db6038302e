//! Shared inputs for the benchmarks.

use hodgelink_core::synth::{grid_with_size, random_complex, RandomComplexSpec};
use hodgelink_core::SimplicialComplex;

/// Links plus triangles of the grid ladder used for construction timings.
pub const LADDER: [usize; 6] = [1_000, 2_000, 4_000, 8_000, 16_000, 32_000];

pub fn ladder() -> Vec<(usize, SimplicialComplex)> {
    LADDER
        .iter()
        .map(|&n| (n, grid_with_size(n).expect("grid")))
        .collect()
}

/// Random complexes of increasing node count at a fixed density.
pub fn random_ladder(nodes: &[usize], p: f64, fill: f64) -> Vec<(usize, SimplicialComplex)> {
    nodes
        .iter()
        .map(|&n| (n, random_complex(&RandomComplexSpec { nodes: n, p, fill }, n as u64).expect("complex")))
        .collect()
}
