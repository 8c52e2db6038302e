//! Snowball sampling of connected sub-networks.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::metrics::NodeMetadata;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledNetwork {
    pub parent: String,
    pub index: usize,
    /// Original ids of the sampled nodes, ascending.
    pub nodes: Vec<u64>,
    pub complex: SimplicialComplex,
    pub metadata: NodeMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    /// Inclusive node-count range.
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Failed draws tolerated per requested network.
    pub attempts_per_network: usize,
}

impl SampleSpec {
    pub fn new(count: usize, min_nodes: usize, max_nodes: usize) -> Self {
        SampleSpec {
            count,
            min_nodes,
            max_nodes,
            attempts_per_network: 100,
        }
    }
}

/// Breadth-first growth from `start`, visiting neighbours in random order,
/// until `target` nodes are collected. `None` if the component is too small.
fn snowball(x: &SimplicialComplex, start: usize, target: usize, rng: &mut impl Rng) -> Option<Vec<usize>> {
    let mut seen = vec![false; x.n0()];
    let mut taken = vec![start];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        let mut nb = x.neighbors(u);
        nb.shuffle(rng);
        for v in nb {
            if taken.len() == target {
                return Some(taken);
            }
            if !seen[v] {
                seen[v] = true;
                taken.push(v);
                queue.push_back(v);
            }
        }
    }
    (taken.len() == target).then_some(taken)
}

/// Draws `spec.count` connected induced sub-complexes with at least one
/// filled triangle each. Deterministic for a given seed.
pub fn sample_subnetworks(
    x: &SimplicialComplex,
    meta: &NodeMetadata,
    parent: &str,
    spec: &SampleSpec,
    seed: u64,
) -> Result<Vec<SampledNetwork>> {
    if spec.min_nodes == 0 || spec.min_nodes > spec.max_nodes {
        return Err(Error::Config(format!(
            "invalid size range {}..={}",
            spec.min_nodes, spec.max_nodes
        )));
    }
    let budget = spec.count.saturating_mul(spec.attempts_per_network).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.count);
    let mut attempts = 0;
    if spec.min_nodes <= x.n0() {
        while out.len() < spec.count && attempts < budget {
            attempts += 1;
            let target = rng.gen_range(spec.min_nodes..=spec.max_nodes.min(x.n0()));
            let start = rng.gen_range(0..x.n0());
            let Some(nodes) = snowball(x, start, target, &mut rng) else { continue };
            let sub = x.induced(&nodes)?;
            if sub.n2() == 0 {
                continue;
            }
            out.push(SampledNetwork {
                parent: parent.to_string(),
                index: out.len(),
                nodes: sub.original_ids().to_vec(),
                metadata: meta.slice(&sub),
                complex: sub,
            });
        }
    }
    if out.len() < spec.count {
        return Err(Error::SamplingExhausted {
            attempts,
            found: out.len(),
            requested: spec.count,
        });
    }
    log::info!("sampled {} networks from {parent} in {attempts} draws", out.len());
    Ok(out)
}
