//! Link communities of simplicial complexes through the lifted line graph.
//!
//! A complex of nodes, links and filled triangles is turned into a random
//! walk on oriented links. The walk has a lower step (through a shared node),
//! an upper step (through a shared filled triangle) and a lazy self-loop; its
//! projection back onto link flows is driven by the normalized Hodge
//! 1-Laplacian. Louvain on the lifted graph, with both orientations of each
//! link kept together, yields a partition of the links, hence overlapping
//! node communities.

pub mod baselines;
pub mod complex;
pub mod error;
pub mod hodge;
pub mod io;
pub mod lifting;
pub mod louvain;
pub mod metrics;
pub mod partitioner;
pub mod pipeline;
pub mod sample;
pub mod sparse;
pub mod spectral;
pub mod stability;
pub mod synth;

pub use baselines::{dendrogram_cut, line_graph, link_similarity, partition_density, LineGraphKind};
pub use complex::{
    build_complex, BuildOptions, ClosurePolicy, LargeSimplexPolicy, Link, NodeId, SimplicialComplex, Triangle,
    WalkStatus,
};
pub use error::{Error, Result};
pub use hodge::{boundary_1, boundary_2, hodge_l1, normalized_l1, DTot};
pub use lifting::{lift, supernode_graph, transition_matrix, LiftedLineGraph, OrientedLinkId};
pub use louvain::{louvain, modularity, Partition, WeightedGraph};
pub use metrics::{MetricsReport, NodeMetadata};
pub use partitioner::{
    check_condition_star, partition_lifted, partition_links, partition_supernode, project_to_links, LinkOrder,
    PartitionOptions,
};
pub use pipeline::{run_pipeline, Method, RunConfig};
pub use sparse::{SignedSparseMatrix, SparseMatrix};
pub use spectral::{spectrum_decomposition, verify_lifting_identity, SpectrumReport};
pub use stability::{stability, stability_matrix, StabilityMatrix};
