//! Link partitioning through the lifted line graph.
//!
//! The lifted route runs Louvain on all `2 n1` oriented-link states, visiting
//! every reference orientation first and then every reversal. When each
//! lifted degree satisfies `k_i^2 <= 2m` the first local-moving pass pairs
//! each state with its reversal, so the result projects cleanly onto links.
//! The supernode route runs Louvain directly on `A_I + A_II`, the graph with
//! the two orientations of each link merged; for paired partitions both
//! routes optimize the same objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifting::{supernode_graph, LiftedLineGraph};
use crate::louvain::{canonical_labels, louvain, merge_to_count, modularity, natural_order, shuffled_order, Partition};
use crate::stability::{effective_graph, DENSE_STATE_LIMIT};

/// Visiting order of links on the first Louvain level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LinkOrder {
    /// Links in canonical (lexicographic) order.
    #[default]
    Canonical,
    /// A seeded permutation of the links.
    Shuffled(u64),
}

impl LinkOrder {
    pub fn links(self, n1: usize) -> Vec<usize> {
        match self {
            LinkOrder::Canonical => natural_order(n1),
            LinkOrder::Shuffled(seed) => shuffled_order(n1, seed),
        }
    }

    /// All reference states in link order, then all reversed states in the same order.
    pub fn states(self, n1: usize) -> Vec<usize> {
        let links = self.links(n1);
        links.iter().copied().chain(links.iter().map(|&k| k + n1)).collect()
    }

    pub fn seed(self) -> Option<u64> {
        match self {
            LinkOrder::Canonical => None,
            LinkOrder::Shuffled(s) => Some(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOptions {
    /// Markov time; `1` optimizes modularity.
    pub t: usize,
    pub order: LinkOrder,
    /// Largest state count for dense stability matrices.
    pub dense_limit: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            t: 1,
            order: LinkOrder::Canonical,
            dense_limit: DENSE_STATE_LIMIT,
        }
    }
}

/// Result of the degree condition `k_i <= sqrt(2m)` on the lifted graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionStar {
    pub two_m: i64,
    pub max_degree: i64,
    /// States whose degree exceeds `sqrt(2m)`, ascending.
    pub violating: Vec<usize>,
}

impl ConditionStar {
    pub fn holds(&self) -> bool {
        self.violating.is_empty()
    }
}

pub fn check_condition_star(g: &LiftedLineGraph) -> ConditionStar {
    let deg = g.degrees();
    let two_m: i64 = deg.iter().sum();
    let violating = deg
        .iter()
        .enumerate()
        .filter(|&(_, &k)| (k as i128) * (k as i128) > two_m as i128)
        .map(|(s, _)| s)
        .collect();
    ConditionStar {
        two_m,
        max_degree: deg.iter().copied().max().unwrap_or(0),
        violating,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPartition {
    /// Community per oriented-link state.
    pub partition: Partition,
    pub condition_star: ConditionStar,
}

/// Louvain on the lifted adjacency (or its stability matrix for `t > 1`).
pub fn partition_lifted(g: &LiftedLineGraph, opts: &PartitionOptions) -> Result<LiftedPartition> {
    let condition_star = check_condition_star(g);
    if !condition_star.holds() {
        log::warn!(
            "degree condition violated at {} of {} lifted states; orientation pairing is not guaranteed",
            condition_star.violating.len(),
            g.n_states()
        );
    }
    let adj = effective_graph(&g.adjacency().to_f64(), opts.t, opts.dense_limit)?;
    let mut partition = louvain(&adj, &opts.order.states(g.n1()))?;
    partition.t = opts.t;
    Ok(LiftedPartition {
        partition,
        condition_star,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkProjection {
    pub partition: Partition,
    /// Links whose two orientations landed in different communities.
    pub mismatched: Vec<usize>,
}

/// Projects a partition of oriented-link states onto links.
///
/// A link whose orientations disagree takes the smaller of the two community ids.
pub fn project_to_links(p: &Partition) -> Result<LinkProjection> {
    if !p.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: p.len() + 1,
            found: p.len(),
        });
    }
    let n1 = p.len() / 2;
    let mut mismatched = Vec::new();
    let raw: Vec<usize> = (0..n1)
        .map(|k| {
            let (a, b) = (p.assignment[k], p.assignment[k + n1]);
            if a != b {
                mismatched.push(k);
            }
            a.min(b)
        })
        .collect();
    if !mismatched.is_empty() {
        log::warn!("{} links have orientations in different communities", mismatched.len());
    }
    Ok(LinkProjection {
        partition: Partition {
            assignment: canonical_labels(&raw),
            levels: p.levels.clone(),
            score: f64::NAN,
            t: p.t,
        },
        mismatched,
    })
}

/// Louvain on the supernode graph `A_I + A_II`.
pub fn partition_supernode(g: &LiftedLineGraph, opts: &PartitionOptions) -> Result<Partition> {
    let adj = effective_graph(&supernode_graph(g).to_f64(), opts.t, opts.dense_limit)?;
    let mut p = louvain(&adj, &opts.order.links(g.n1()))?;
    p.t = opts.t;
    Ok(p)
}

/// Modularity (or stability at `t`) of a link partition on the supernode graph.
pub fn supernode_score(g: &LiftedLineGraph, assignment: &[usize], t: usize, dense_limit: usize) -> Result<f64> {
    let adj = effective_graph(&supernode_graph(g).to_f64(), t, dense_limit)?;
    modularity(&adj, assignment)
}

/// Link partition produced by the higher-order method.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPartition {
    pub partition: Partition,
    pub condition_star: bool,
    /// The lifted run split some orientation pair and the supernode route was used instead.
    pub used_supernode: bool,
}

/// Full higher-order pipeline: lifted Louvain, projection, supernode fallback
/// on unpaired results, and an optional cap on the number of communities.
///
/// The score is modularity (or stability) on the supernode graph, which equals
/// the lifted objective for paired partitions.
pub fn partition_links(g: &LiftedLineGraph, opts: &PartitionOptions, target: Option<usize>) -> Result<LinkPartition> {
    let lifted = partition_lifted(g, opts)?;
    let projection = project_to_links(&lifted.partition)?;
    let (mut partition, used_supernode) = if projection.mismatched.is_empty() {
        (projection.partition, false)
    } else {
        log::warn!("falling back to the supernode route");
        (partition_supernode(g, opts)?, true)
    };
    let adj = effective_graph(&supernode_graph(g).to_f64(), opts.t, opts.dense_limit)?;
    if let Some(k) = target {
        partition = merge_to_count(&adj, &partition, k)?;
    }
    partition.score = modularity(&adj, &partition.assignment)?;
    partition.t = opts.t;
    Ok(LinkPartition {
        partition,
        condition_star: lifted.condition_star.holds(),
        used_supernode,
    })
}
