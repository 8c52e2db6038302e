//! Simplicial complexes up to dimension two.
//!
//! Node ids given by the caller are arbitrary non-negative integers; they are
//! remapped to a dense `0..n0` table on construction and the original ids are
//! kept for output. Every link and triangle is stored in its reference
//! orientation (ascending node order), and both sequences are sorted
//! lexicographically. That order is the basis order of every matrix built
//! from the complex.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `0..n0`.
pub type NodeId = usize;

/// A 1-simplex in reference orientation, `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub lo: NodeId,
    pub hi: NodeId,
}

impl Link {
    /// Builds the link `{a, b}` in reference orientation. Panics if `a == b`.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        assert_ne!(a, b, "a link needs two distinct nodes");
        Link {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.lo == node || self.hi == node
    }

    /// The endpoint that is not `node`, if `node` is an endpoint.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.lo == node {
            Some(self.hi)
        } else if self.hi == node {
            Some(self.lo)
        } else {
            None
        }
    }
}

/// A filled triangle in reference orientation, `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triangle {
    pub a: NodeId,
    pub b: NodeId,
    pub c: NodeId,
}

impl Triangle {
    pub fn new(x: NodeId, y: NodeId, z: NodeId) -> Self {
        let mut v = [x, y, z];
        v.sort_unstable();
        assert!(v[0] < v[1] && v[1] < v[2], "a triangle needs three distinct nodes");
        Triangle {
            a: v[0],
            b: v[1],
            c: v[2],
        }
    }

    /// Boundary links in the order `[b,c]`, `[a,c]`, `[a,b]` with signs `+1, -1, +1`.
    pub fn faces(&self) -> [(Link, i64); 3] {
        [
            (Link { lo: self.b, hi: self.c }, 1),
            (Link { lo: self.a, hi: self.c }, -1),
            (Link { lo: self.a, hi: self.b }, 1),
        ]
    }
}

/// What to do with a triangle whose boundary links were not declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ClosurePolicy {
    /// Add the missing faces.
    #[default]
    Complete,
    /// Fail with [`Error::ClosureViolation`].
    Reject,
}

/// What to do with input simplices of more than three nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LargeSimplexPolicy {
    /// Fail with [`Error::SimplexTooLarge`].
    #[default]
    Reject,
    /// Insert every subset of size two and three.
    ProjectCliques,
    /// Skip the simplex.
    Drop,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub closure: ClosurePolicy,
    pub large: LargeSimplexPolicy,
}

/// Outcome of the connectivity / bipartiteness check on the graph skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkStatus {
    Ok,
    Disconnected,
    Bipartite,
}

/// An immutable simplicial complex of nodes, links and filled triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    original_ids: Vec<u64>,
    links: Vec<Link>,
    triangles: Vec<Triangle>,
    link_index: HashMap<Link, usize>,
    node_degree: Vec<usize>,
    link_degree: Vec<usize>,
    incident: Vec<Vec<usize>>,
}

/// Builds a complex from simplices given as node-id sets.
///
/// Duplicate simplices are merged. With [`ClosurePolicy::Complete`] missing
/// boundary links of triangles are added; with [`ClosurePolicy::Reject`] they
/// are an error. Nodes of declared simplices are always present.
pub fn build_complex(simplices: &[Vec<u64>], opts: BuildOptions) -> Result<SimplicialComplex> {
    if simplices.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut nodes: BTreeSet<u64> = BTreeSet::new();
    let mut links: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut triangles: BTreeSet<(u64, u64, u64)> = BTreeSet::new();
    let mut projected = 0usize;
    let mut dropped = 0usize;

    for raw in simplices {
        let mut s = raw.clone();
        s.sort_unstable();
        if s.is_empty() {
            continue;
        }
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSimplex(raw.clone()));
        }
        match s.len() {
            1 => {
                nodes.insert(s[0]);
            }
            2 => {
                nodes.extend(&s);
                links.insert((s[0], s[1]));
            }
            3 => {
                nodes.extend(&s);
                triangles.insert((s[0], s[1], s[2]));
            }
            size => match opts.large {
                LargeSimplexPolicy::Reject => {
                    return Err(Error::SimplexTooLarge {
                        simplex: raw.clone(),
                        size,
                    })
                }
                LargeSimplexPolicy::Drop => dropped += 1,
                LargeSimplexPolicy::ProjectCliques => {
                    projected += 1;
                    nodes.extend(&s);
                    for i in 0..size {
                        for j in i + 1..size {
                            links.insert((s[i], s[j]));
                            for k in j + 1..size {
                                triangles.insert((s[i], s[j], s[k]));
                            }
                        }
                    }
                }
            },
        }
    }
    if projected > 0 {
        log::info!("projected {projected} simplices of size > 3 onto their links and triangles");
    }
    if dropped > 0 {
        log::info!("dropped {dropped} simplices of size > 3");
    }
    if nodes.is_empty() {
        return Err(Error::EmptyInput);
    }

    for &(a, b, c) in &triangles {
        for face in [(a, b), (a, c), (b, c)] {
            if !links.contains(&face) {
                match opts.closure {
                    ClosurePolicy::Reject => {
                        return Err(Error::ClosureViolation {
                            simplex: vec![a, b, c],
                            face: vec![face.0, face.1],
                        })
                    }
                    ClosurePolicy::Complete => {
                        links.insert(face);
                    }
                }
            }
        }
    }

    let original_ids: Vec<u64> = nodes.into_iter().collect();
    let dense: HashMap<u64, usize> = original_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    // Sorting by original id keeps the dense remap monotone, so the tuple
    // order of the sets carries over to the dense links and triangles.
    let links: Vec<Link> = links.into_iter().map(|(a, b)| Link::new(dense[&a], dense[&b])).collect();
    let triangles: Vec<Triangle> = triangles
        .into_iter()
        .map(|(a, b, c)| Triangle::new(dense[&a], dense[&b], dense[&c]))
        .collect();
    SimplicialComplex::assemble(original_ids, links, triangles)
}

impl SimplicialComplex {
    /// Builds a complex directly on dense node ids `0..n0`.
    ///
    /// Links and triangles may be given in any orientation and order.
    pub fn from_dense(
        n0: usize,
        links: impl IntoIterator<Item = (NodeId, NodeId)>,
        triangles: impl IntoIterator<Item = [NodeId; 3]>,
        closure: ClosurePolicy,
    ) -> Result<Self> {
        let mut link_set: BTreeSet<Link> = BTreeSet::new();
        for (a, b) in links {
            if a == b {
                return Err(Error::DegenerateSimplex(vec![a as u64, b as u64]));
            }
            if a.max(b) >= n0 {
                return Err(Error::DimensionMismatch {
                    expected: n0,
                    found: a.max(b) + 1,
                });
            }
            link_set.insert(Link::new(a, b));
        }
        let mut tri_set: BTreeSet<Triangle> = BTreeSet::new();
        for [a, b, c] in triangles {
            if a == b || b == c || a == c {
                return Err(Error::DegenerateSimplex(vec![a as u64, b as u64, c as u64]));
            }
            let t = Triangle::new(a, b, c);
            if t.c >= n0 {
                return Err(Error::DimensionMismatch {
                    expected: n0,
                    found: t.c + 1,
                });
            }
            for (face, _) in t.faces() {
                if !link_set.contains(&face) {
                    match closure {
                        ClosurePolicy::Reject => {
                            return Err(Error::ClosureViolation {
                                simplex: vec![t.a as u64, t.b as u64, t.c as u64],
                                face: vec![face.lo as u64, face.hi as u64],
                            })
                        }
                        ClosurePolicy::Complete => {
                            link_set.insert(face);
                        }
                    }
                }
            }
            tri_set.insert(t);
        }
        if n0 == 0 {
            return Err(Error::EmptyInput);
        }
        Self::assemble(
            (0..n0 as u64).collect(),
            link_set.into_iter().collect(),
            tri_set.into_iter().collect(),
        )
    }

    fn assemble(original_ids: Vec<u64>, links: Vec<Link>, triangles: Vec<Triangle>) -> Result<Self> {
        let n0 = original_ids.len();
        let link_index: HashMap<Link, usize> = links.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut node_degree = vec![0usize; n0];
        let mut incident = vec![Vec::new(); n0];
        for (k, l) in links.iter().enumerate() {
            node_degree[l.lo] += 1;
            node_degree[l.hi] += 1;
            incident[l.lo].push(k);
            incident[l.hi].push(k);
        }
        let mut link_degree = vec![0usize; links.len()];
        for t in &triangles {
            for (face, _) in t.faces() {
                let k = *link_index
                    .get(&face)
                    .ok_or(Error::UnknownLink(face.lo, face.hi))?;
                link_degree[k] += 1;
            }
        }
        Ok(SimplicialComplex {
            original_ids,
            links,
            triangles,
            link_index,
            node_degree,
            link_degree,
            incident,
        })
    }

    pub fn n0(&self) -> usize {
        self.original_ids.len()
    }

    pub fn n1(&self) -> usize {
        self.links.len()
    }

    pub fn n2(&self) -> usize {
        self.triangles.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn original_id(&self, node: NodeId) -> u64 {
        self.original_ids[node]
    }

    /// Column index of `link` in every link-indexed matrix.
    pub fn link_index(&self, link: Link) -> Option<usize> {
        self.link_index.get(&link).copied()
    }

    pub fn node_degree(&self, node: NodeId) -> usize {
        self.node_degree[node]
    }

    pub fn link_degree(&self, link: usize) -> usize {
        self.link_degree[link]
    }

    /// Indices of the links containing `node`, ascending.
    pub fn incident_links(&self, node: NodeId) -> &[usize] {
        &self.incident[node]
    }

    /// Neighbors of `node` in the graph skeleton, ascending.
    pub fn neighbors(&self, node: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.incident[node]
            .iter()
            .map(|&k| self.links[k].other(node).expect("incident link"))
            .collect();
        out.sort_unstable();
        out
    }

    /// Co-face counts `(deg(i), deg(j), deg({i,j}))` of a link and its endpoints.
    pub fn degrees(&self, link: Link) -> Result<(usize, usize, usize)> {
        let k = self.link_index(link).ok_or(Error::UnknownLink(link.lo, link.hi))?;
        Ok((self.node_degree[link.lo], self.node_degree[link.hi], self.link_degree[k]))
    }

    /// `deg(i) + deg(j) + 3 deg({i,j})` for link index `k`.
    pub fn total_degree(&self, k: usize) -> usize {
        let l = self.links[k];
        self.node_degree[l.lo] + self.node_degree[l.hi] + 3 * self.link_degree[k]
    }

    /// Breadth-first 2-colouring of the graph skeleton.
    pub fn validate_walk_assumptions(&self) -> WalkStatus {
        let n = self.n0();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        colour[0] = Some(false);
        queue.push_back(0);
        let mut seen = 1;
        let mut odd_cycle = false;
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &k in &self.incident[u] {
                let v = self.links[k].other(u).unwrap();
                match colour[v] {
                    None => {
                        colour[v] = Some(!cu);
                        seen += 1;
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => odd_cycle = true,
                    _ => {}
                }
            }
        }
        if seen < n {
            WalkStatus::Disconnected
        } else if !odd_cycle {
            WalkStatus::Bipartite
        } else {
            WalkStatus::Ok
        }
    }

    /// Every simplex of the complex in original ids: nodes, then links, then triangles.
    pub fn simplices(&self) -> Vec<Vec<u64>> {
        let id = |v: NodeId| self.original_ids[v];
        let mut out: Vec<Vec<u64>> = (0..self.n0()).map(|v| vec![id(v)]).collect();
        out.extend(self.links.iter().map(|l| vec![id(l.lo), id(l.hi)]));
        out.extend(self.triangles.iter().map(|t| vec![id(t.a), id(t.b), id(t.c)]));
        out
    }

    /// Sub-complex induced by a node subset: a link or triangle is kept iff all
    /// its nodes are kept. Original ids are preserved.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<SimplicialComplex> {
        let mut keep: Vec<NodeId> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut local = vec![usize::MAX; self.n0()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let links: Vec<Link> = self
            .links
            .iter()
            .filter(|l| local[l.lo] != usize::MAX && local[l.hi] != usize::MAX)
            .map(|l| Link::new(local[l.lo], local[l.hi]))
            .collect();
        let triangles: Vec<Triangle> = self
            .triangles
            .iter()
            .filter(|t| [t.a, t.b, t.c].iter().all(|&v| local[v] != usize::MAX))
            .map(|t| Triangle::new(local[t.a], local[t.b], local[t.c]))
            .collect();
        let ids = keep.iter().map(|&v| self.original_ids[v]).collect();
        SimplicialComplex::assemble(ids, links, triangles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete() -> BuildOptions {
        BuildOptions::default()
    }

    fn filled_k3() -> SimplicialComplex {
        build_complex(&[vec![1, 2, 3]], complete()).unwrap()
    }

    #[test]
    fn closure_of_single_triangle() {
        let x = filled_k3();
        assert_eq!((x.n0(), x.n1(), x.n2()), (3, 3, 1));
    }

    #[test]
    fn open_triangle_has_no_two_simplex() {
        let x = build_complex(&[vec![1, 2], vec![2, 3], vec![1, 3]], complete()).unwrap();
        assert_eq!((x.n0(), x.n1(), x.n2()), (3, 3, 0));
    }

    #[test]
    fn reject_policy_reports_missing_face() {
        let opts = BuildOptions {
            closure: ClosurePolicy::Reject,
            ..Default::default()
        };
        let err = build_complex(&[vec![1, 2, 3]], opts).unwrap_err();
        assert!(matches!(err, Error::ClosureViolation { .. }));
        let ok = build_complex(&[vec![1, 2, 3], vec![1, 2], vec![2, 3], vec![1, 3]], opts).unwrap();
        assert_eq!(ok.n2(), 1);
    }

    #[test]
    fn large_simplices() {
        let err = build_complex(&[vec![1, 2, 3, 4]], complete()).unwrap_err();
        assert!(matches!(err, Error::SimplexTooLarge { size: 4, .. }));
        let projected = build_complex(
            &[vec![1, 2, 3, 4]],
            BuildOptions {
                large: LargeSimplexPolicy::ProjectCliques,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((projected.n0(), projected.n1(), projected.n2()), (4, 6, 4));
        let dropped = build_complex(
            &[vec![1, 2, 3, 4], vec![1, 2]],
            BuildOptions {
                large: LargeSimplexPolicy::Drop,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((dropped.n0(), dropped.n1()), (2, 1));
    }

    #[test]
    fn empty_and_degenerate_inputs() {
        assert!(matches!(build_complex(&[], complete()), Err(Error::EmptyInput)));
        assert!(matches!(
            build_complex(&[vec![4, 4]], complete()),
            Err(Error::DegenerateSimplex(_))
        ));
    }

    #[test]
    fn duplicates_are_merged_and_ids_remapped() {
        let x = build_complex(&[vec![30, 10], vec![10, 30], vec![20, 10, 30]], complete()).unwrap();
        assert_eq!(x.original_ids(), &[10, 20, 30]);
        assert_eq!(x.n1(), 3);
        assert_eq!(x.links()[0], Link { lo: 0, hi: 1 });
        assert_eq!(x.n2(), 1);
    }

    #[test]
    fn degrees_on_small_complexes() {
        let x = filled_k3();
        assert_eq!(x.degrees(Link::new(0, 1)).unwrap(), (2, 2, 1));
        let edge = build_complex(&[vec![1, 2]], complete()).unwrap();
        assert_eq!(edge.degrees(Link::new(0, 1)).unwrap(), (1, 1, 0));
        assert!(matches!(edge.degrees(Link::new(0, 5)), Err(Error::UnknownLink(0, 5))));
    }

    #[test]
    fn walk_assumptions() {
        assert_eq!(filled_k3().validate_walk_assumptions(), WalkStatus::Ok);
        let path = build_complex(&[vec![1, 2], vec![2, 3]], complete()).unwrap();
        assert_eq!(path.validate_walk_assumptions(), WalkStatus::Bipartite);
        let two = build_complex(&[vec![1, 2], vec![3, 4]], complete()).unwrap();
        assert_eq!(two.validate_walk_assumptions(), WalkStatus::Disconnected);
    }

    #[test]
    fn handshake_identities_and_roundtrip() {
        let x = build_complex(
            &[vec![1, 2, 3], vec![2, 3, 4], vec![4, 5], vec![5, 1], vec![9]],
            complete(),
        )
        .unwrap();
        let node_sum: usize = (0..x.n0()).map(|v| x.node_degree(v)).sum();
        assert_eq!(node_sum, 2 * x.n1());
        let link_sum: usize = (0..x.n1()).map(|k| x.link_degree(k)).sum();
        assert_eq!(link_sum, 3 * x.n2());
        let again = build_complex(&x.simplices(), complete()).unwrap();
        assert_eq!(again, x);
    }

    #[test]
    fn induced_keeps_only_full_simplices() {
        let x = build_complex(&[vec![1, 2, 3], vec![3, 4]], complete()).unwrap();
        let sub = x.induced(&[0, 1, 3]).unwrap();
        assert_eq!(sub.original_ids(), &[1, 2, 4]);
        assert_eq!((sub.n1(), sub.n2()), (1, 0));
        let sub = x.induced(&[0, 1, 2]).unwrap();
        assert_eq!((sub.n1(), sub.n2()), (3, 1));
    }
}
