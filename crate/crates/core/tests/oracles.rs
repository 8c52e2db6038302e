mod oracle;

use std::collections::BTreeMap;

use hodgelink_core::louvain::{canonical_labels, merge_to_count};
use hodgelink_core::spectral::{even_eigenpairs, lift_even_eigenvector};
use hodgelink_core::synth::{random_complex, RandomComplexSpec};
use hodgelink_core::{
    build_complex, lift, modularity, partition_lifted, partition_links, partition_supernode, supernode_graph,
    transition_matrix, BuildOptions, PartitionOptions, SimplicialComplex,
};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(s: &[Vec<u64>]) -> SimplicialComplex {
    build_complex(s, BuildOptions::default()).unwrap()
}

fn filled_k3() -> SimplicialComplex {
    complex(&[vec![1, 2, 3]])
}

fn bridged_k3s() -> SimplicialComplex {
    complex(&[vec![1, 2, 3], vec![4, 5, 6], vec![3, 4]])
}

/// A_I + A_II read off the dense lifted adjacency.
fn folded(x: &SimplicialComplex) -> DMatrix<f64> {
    let a = oracle::lifted_adjacency(x);
    let n1 = x.n1();
    DMatrix::from_fn(n1, n1, |k, l| a[(k, l)] + a[(k, l + n1)])
}

#[test]
fn lifted_adjacency_matches_the_combinatorial_construction() {
    let mut fixtures = vec![filled_k3(), bridged_k3s(), complex(&[vec![1, 2], vec![1, 3], vec![1, 4]])];
    for seed in 0..10 {
        fixtures.push(
            random_complex(
                &RandomComplexSpec {
                    nodes: 12,
                    p: 0.4,
                    fill: 0.6,
                },
                seed,
            )
            .unwrap(),
        );
    }
    for x in &fixtures {
        let g = lift(x);
        assert_eq!(g.adjacency().to_dense(), oracle::lifted_adjacency(x));
        assert_eq!(supernode_graph(&g).to_dense(), folded(x));
        let p = transition_matrix(&g).unwrap().to_dense();
        let expected = oracle::column_stochastic(&oracle::lifted_adjacency(x));
        assert!(oracle::max_abs(&(p - expected)) < 1e-15);
    }
}

#[test]
fn supernode_weights_on_small_complexes() {
    // Only one of the two alignments of a pair of links meeting at a node is
    // lower adjacent, so the fold carries 1 per shared node, plus 1 per
    // shared triangle.
    let k3 = supernode_graph(&lift(&filled_k3())).to_dense();
    assert_eq!(k3, DMatrix::from_fn(3, 3, |i, j| if i == j { 10.0 } else { 2.0 }));
    let star = supernode_graph(&lift(&complex(&[vec![1, 2], vec![1, 3], vec![1, 4]]))).to_dense();
    assert_eq!(star, DMatrix::from_fn(3, 3, |i, j| if i == j { 6.0 } else { 1.0 }));
    let edge = supernode_graph(&lift(&complex(&[vec![1, 2]]))).to_dense();
    assert_eq!(edge, DMatrix::from_element(1, 1, 4.0));
}

#[test]
fn supernode_graph_ignores_reference_orientations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..8 {
        let x = random_complex(
            &RandomComplexSpec {
                nodes: 14,
                p: 0.35,
                fill: 0.7,
            },
            seed,
        )
        .unwrap();
        let mut labels: Vec<u64> = x.original_ids().to_vec();
        labels.shuffle(&mut rng);
        let relabel: BTreeMap<u64, u64> = x.original_ids().iter().copied().zip(labels).collect();
        let y = complex(
            &x.simplices()
                .into_iter()
                .map(|s| s.into_iter().map(|v| relabel[&v]).collect())
                .collect::<Vec<_>>(),
        );
        let key = |c: &SimplicialComplex, k: usize| {
            let l = c.links()[k];
            let (a, b) = (c.original_id(l.lo), c.original_id(l.hi));
            (a.min(b), a.max(b))
        };
        let position: BTreeMap<(u64, u64), usize> = (0..y.n1()).map(|k| (key(&y, k), k)).collect();
        let map: Vec<usize> = (0..x.n1())
            .map(|k| {
                let (a, b) = key(&x, k);
                position[&(relabel[&a].min(relabel[&b]), relabel[&a].max(relabel[&b]))]
            })
            .collect();
        let sx = supernode_graph(&lift(&x)).to_dense();
        let sy = supernode_graph(&lift(&y)).to_dense();
        for k in 0..x.n1() {
            for l in 0..x.n1() {
                assert_eq!(sx[(k, l)], sy[(map[k], map[l])]);
            }
        }
    }
}

#[test]
fn filled_triangle_optimum_is_paired_singletons() {
    let x = filled_k3();
    let g = lift(&x);
    let a = oracle::lifted_adjacency(&x);
    let (q, best) = oracle::best_partition(&a);
    assert_eq!(canonical_labels(&best), vec![0, 1, 2, 0, 1, 2]);
    assert!((q - 3.0 * (20.0 / 84.0 - (28.0f64 / 84.0).powi(2))).abs() < 1e-12);

    let lifted = partition_lifted(&g, &PartitionOptions::default()).unwrap();
    assert_eq!(canonical_labels(&lifted.partition.assignment), vec![0, 1, 2, 0, 1, 2]);
    assert!((lifted.partition.score - q).abs() < 1e-12);

    let (qs, s_best) = oracle::best_partition(&folded(&x));
    assert_eq!(s_best, vec![0, 1, 2]);
    assert!((qs - q).abs() < 1e-12);
}

#[test]
fn bridged_triangles_against_exhaustive_search() {
    let x = bridged_k3s();
    let g = lift(&x);
    let s = folded(&x);
    let (q, best) = oracle::best_partition(&s);
    let p = partition_supernode(&g, &PartitionOptions::default()).unwrap();
    let adj = supernode_graph(&g).to_f64();
    let found = modularity(&adj, &p.assignment).unwrap();
    assert!((found - q).abs() < 1e-12, "louvain {found} vs optimum {q} at {best:?}");

    // Best split into two communities, by brute force over all 2-colourings.
    let n = x.n1();
    let mut best2 = (f64::NEG_INFINITY, Vec::new());
    for mask in 1..(1u32 << (n - 1)) {
        let a: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
        let q = oracle::modularity(&s, &a);
        if q > best2.0 {
            best2 = (q, a);
        }
    }
    let merged = partition_links(&g, &PartitionOptions::default(), Some(2)).unwrap();
    assert_eq!(
        canonical_labels(&merged.partition.assignment),
        canonical_labels(&best2.1),
        "merge-to-2 should land on the best bipartition"
    );
    let merged_direct = merge_to_count(&adj, &p, 2).unwrap();
    assert_eq!(merged_direct.n_communities(), 2);
}

#[test]
fn louvain_matches_exhaustive_optimum_on_small_supernode_graphs() {
    for seed in 0..12 {
        let x = random_complex(
            &RandomComplexSpec {
                nodes: 6,
                p: 0.6,
                fill: 0.5,
            },
            seed,
        )
        .unwrap();
        if x.n1() > 9 {
            continue;
        }
        let g = lift(&x);
        let (q, _) = oracle::best_partition(&folded(&x));
        let p = partition_supernode(&g, &PartitionOptions::default()).unwrap();
        let found = modularity(&supernode_graph(&g).to_f64(), &p.assignment).unwrap();
        assert!(found <= q + 1e-12);
        assert!(found >= q - 0.05, "seed {seed}: louvain {found} far below optimum {q}");
    }
}

#[test]
fn even_eigenvectors_lift_to_the_full_walk() {
    for seed in 0..5 {
        let x = random_complex(
            &RandomComplexSpec {
                nodes: 15,
                p: 0.3,
                fill: 0.5,
            },
            seed,
        )
        .unwrap();
        let g = lift(&x);
        for (lambda, v) in even_eigenpairs(&g).unwrap() {
            assert!(lift_even_eigenvector(&g, &v, lambda).unwrap() <= 1e-10);
        }
    }
}

#[test]
fn walk_columns_match_dense_powers() {
    let x = bridged_k3s();
    let g = lift(&x);
    let p = oracle::column_stochastic(&oracle::lifted_adjacency(&x));
    for t in [0, 1, 4, 9] {
        let lib = hodgelink_core::spectral::transition_column(&g, 3, t).unwrap();
        let dense = oracle::walk_column(&p, 3, t);
        for (a, b) in lib.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
