//! Half-edge trivalent graphs on four vertices.
//!
//! Half-edges are the integers `0..12`; edge `e` owns half-edges `2e` and
//! `2e + 1`. A [`TrivalentGraph`] records the vertex of every half-edge, and
//! an [`EdgeOrientedGraph`] adds a per-edge flag saying which of the two
//! half-edges comes first. Reversing an edge flips that flag and nothing else,
//! so half-edge identities survive reversal.
//!
//! Vertex ids are `0..4` internally and `1..=4` in every external format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::perm;
use crate::{Error, Result};

pub const NV: usize = 4;
pub const NE: usize = 6;
pub const NH: usize = 12;

pub type Vertex = usize;
pub type Edge = usize;
pub type HalfEdge = usize;

pub fn edge_of(h: HalfEdge) -> Edge {
    h / 2
}

pub fn partner(h: HalfEdge) -> HalfEdge {
    h ^ 1
}

/// Letter-and-index name of a half-edge, e.g. `a1`, `f2`.
pub fn half_edge_name(h: HalfEdge) -> String {
    format!("{}{}", (b'a' + (h / 2) as u8) as char, h % 2 + 1)
}

/// Inverse of [`half_edge_name`].
pub fn parse_half_edge(s: &str) -> Result<HalfEdge> {
    let b = s.as_bytes();
    if b.len() == 2 && (b'a'..=b'f').contains(&b[0]) && (b[1] == b'1' || b[1] == b'2') {
        Ok(2 * (b[0] - b'a') as usize + (b[1] - b'1') as usize)
    } else {
        Err(Error::Invalid(format!("bad half-edge name {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrivalentGraph {
    vertex_of: [u8; NH],
}

impl TrivalentGraph {
    /// Builds a graph from the vertex of each half-edge.
    pub fn new(vertex_of: [Vertex; NH]) -> Result<Self> {
        let mut count = [0usize; NV];
        for &v in &vertex_of {
            if v >= NV {
                return Err(Error::Invalid(format!("vertex id {v} out of range")));
            }
            count[v] += 1;
        }
        if count.iter().any(|&c| c != 3) {
            return Err(Error::Invalid(format!(
                "every vertex needs exactly three half-edges, got {count:?}"
            )));
        }
        Ok(Self { vertex_of: vertex_of.map(|v| v as u8) })
    }

    pub fn vertex_of(&self, h: HalfEdge) -> Vertex {
        self.vertex_of[h] as Vertex
    }

    /// The three half-edges at `v`, ascending.
    pub fn half_edges_at(&self, v: Vertex) -> [HalfEdge; 3] {
        let mut out = [0; 3];
        let mut k = 0;
        for h in 0..NH {
            if self.vertex_of(h) == v {
                out[k] = h;
                k += 1;
            }
        }
        out
    }

    /// Endpoints of `e` as (vertex of `2e`, vertex of `2e+1`).
    pub fn ends(&self, e: Edge) -> (Vertex, Vertex) {
        (self.vertex_of(2 * e), self.vertex_of(2 * e + 1))
    }

    pub fn is_loop(&self, e: Edge) -> bool {
        let (a, b) = self.ends(e);
        a == b
    }

    pub fn has_loops(&self) -> bool {
        (0..NE).any(|e| self.is_loop(e))
    }

    /// Number of edges joining `u` and `v` (loops at `u` when `u == v`).
    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        (0..NE)
            .filter(|&e| {
                let (a, b) = self.ends(e);
                (a == u && b == v) || (a == v && b == u)
            })
            .count()
    }

    pub fn is_connected(&self) -> bool {
        let mut comp: Vec<usize> = (0..NV).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            if c[x] != x {
                let r = find(c, c[x]);
                c[x] = r;
            }
            c[x]
        }
        for e in 0..NE {
            let (a, b) = self.ends(e);
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra] = rb;
        }
        let r0 = find(&mut comp, 0);
        (1..NV).all(|v| find(&mut comp, v) == r0)
    }

    /// Underlying shape, when the graph is loop-free.
    pub fn shape(&self) -> Option<Shape> {
        if self.has_loops() || !self.is_connected() {
            return None;
        }
        let max = (0..NV)
            .flat_map(|u| (u + 1..NV).map(move |v| (u, v)))
            .map(|(u, v)| self.multiplicity(u, v))
            .max()
            .unwrap_or(0);
        match max {
            1 => Some(Shape::Tetrahedron),
            2 => Some(Shape::DoubleTheta),
            _ => None,
        }
    }

    /// All automorphisms of the unoriented graph.
    pub fn automorphisms(&self) -> Vec<HalfEdgePerm> {
        automorphisms_impl(self, None)
    }
}

/// The two connected loop-free trivalent graphs on four vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Tetrahedron,
    DoubleTheta,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeOrientedGraph {
    base: TrivalentGraph,
    flipped: [bool; NE],
}

impl EdgeOrientedGraph {
    /// Orients every edge from half-edge `2e` to `2e + 1`.
    pub fn new(base: TrivalentGraph) -> Self {
        Self { base, flipped: [false; NE] }
    }

    pub fn with_flips(base: TrivalentGraph, flipped: [bool; NE]) -> Self {
        Self { base, flipped }
    }

    /// Builds a graph whose edge `k` runs `edges[k].0 → edges[k].1`
    /// (0-based vertex ids).
    pub fn from_directed(edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if edges.len() != NE {
            return Err(Error::Invalid(format!("expected {NE} edges, got {}", edges.len())));
        }
        let mut vertex_of = [0; NH];
        for (k, &(t, h)) in edges.iter().enumerate() {
            vertex_of[2 * k] = t;
            vertex_of[2 * k + 1] = h;
        }
        Ok(Self::new(TrivalentGraph::new(vertex_of)?))
    }

    pub fn base(&self) -> &TrivalentGraph {
        &self.base
    }

    pub fn flips(&self) -> [bool; NE] {
        self.flipped
    }

    pub fn first(&self, e: Edge) -> HalfEdge {
        2 * e + self.flipped[e] as usize
    }

    pub fn second(&self, e: Edge) -> HalfEdge {
        2 * e + 1 - self.flipped[e] as usize
    }

    pub fn tail(&self, e: Edge) -> Vertex {
        self.base.vertex_of(self.first(e))
    }

    pub fn head(&self, e: Edge) -> Vertex {
        self.base.vertex_of(self.second(e))
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        (0..NE).filter(|&e| self.tail(e) == v).count()
    }

    /// Reverses exactly the edges in `r`.
    pub fn reverse_edges(&self, r: &[Edge]) -> Self {
        let mut out = self.clone();
        for &e in r {
            out.flipped[e] = !out.flipped[e];
        }
        out
    }

    /// Reverses the edges whose bit is set in `mask`.
    pub fn reverse_mask(&self, mask: u8) -> Self {
        let mut out = self.clone();
        for e in 0..NE {
            if mask >> e & 1 == 1 {
                out.flipped[e] = !out.flipped[e];
            }
        }
        out
    }

    /// The involution reversing every edge.
    pub fn reverse_all(&self) -> Self {
        self.reverse_mask(0b111111)
    }

    /// Edges with both endpoints in the vertex set `mask` (bit `v` for vertex `v`).
    pub fn edges_within(&self, mask: u8) -> Vec<Edge> {
        (0..NE)
            .filter(|&e| mask >> self.tail(e) & 1 == 1 && mask >> self.head(e) & 1 == 1)
            .collect()
    }

    /// Edges sharing both endpoints with `e` (including `e`), i.e. `E_A`
    /// for `A` the endpoint set of `e`.
    pub fn parallel_class(&self, e: Edge) -> Vec<Edge> {
        let mask = (1u8 << self.tail(e)) | (1u8 << self.head(e));
        self.edges_within(mask)
    }

    /// True when `e` joins two distinct vertices and has no parallel edge.
    pub fn is_one_edge(&self, e: Edge) -> bool {
        self.tail(e) != self.head(e) && self.parallel_class(e).len() == 1
    }

    pub fn directed_edges(&self) -> Vec<DirectedEdgeView> {
        let mut seen: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
        (0..NE)
            .map(|e| {
                let key = (self.tail(e), self.head(e));
                let tag = seen.entry(key).or_insert(0);
                let v = DirectedEdgeView { edge: e, tail: key.0, head: key.1, tag: *tag };
                *tag += 1;
                v
            })
            .collect()
    }

    /// Rebuilds a graph from its directed-edge view.
    pub fn from_view(view: &[DirectedEdgeView]) -> Result<Self> {
        let mut edges = vec![(0, 0); NE];
        let mut seen = [false; NE];
        for v in view {
            if v.edge >= NE || seen[v.edge] {
                return Err(Error::Invalid("edge ids in view must be 0..6, each once".into()));
            }
            seen[v.edge] = true;
            edges[v.edge] = (v.tail, v.head);
        }
        Self::from_directed(&edges)
    }

    /// Automorphisms, optionally required to preserve every edge orientation.
    pub fn automorphisms(&self, respect_orientation: bool) -> Vec<HalfEdgePerm> {
        if respect_orientation {
            automorphisms_impl(&self.base, Some(self))
        } else {
            automorphisms_impl(&self.base, None)
        }
    }

    /// Applies a vertex relabeling `pi` and returns the directed edges
    /// `(pi(tail), pi(head))` indexed by edge.
    fn relabeled(&self, pi: &[usize]) -> [(u8, u8); NE] {
        let mut out = [(0, 0); NE];
        for (e, slot) in out.iter_mut().enumerate() {
            *slot = (pi[self.tail(e)] as u8, pi[self.head(e)] as u8);
        }
        out
    }
}

/// Derived view of a directed edge; `tag` numbers parallel copies of the
/// same `(tail, head)` pair in edge-id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedEdgeView {
    pub edge: Edge,
    pub tail: Vertex,
    pub head: Vertex,
    pub tag: usize,
}

/// A bijection of the twelve half-edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdgePerm(pub [HalfEdge; NH]);

impl HalfEdgePerm {
    pub fn identity() -> Self {
        Self(std::array::from_fn(|h| h))
    }

    pub fn apply(&self, h: HalfEdge) -> HalfEdge {
        self.0[h]
    }

    /// The induced map on edges.
    pub fn edge_map(&self) -> [Edge; NE] {
        std::array::from_fn(|e| edge_of(self.0[2 * e]))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|h| self.0[other.0[h]]))
    }

    pub fn inverse(&self) -> Self {
        let mut out = [0; NH];
        for (h, &x) in self.0.iter().enumerate() {
            out[x] = h;
        }
        Self(out)
    }
}

fn automorphisms_impl(g: &TrivalentGraph, oriented: Option<&EdgeOrientedGraph>) -> Vec<HalfEdgePerm> {
    // Directed multiplicity when orientation matters, symmetric otherwise.
    let mult = |u: Vertex, v: Vertex| -> usize {
        match oriented {
            Some(og) => (0..NE).filter(|&e| og.tail(e) == u && og.head(e) == v).count(),
            None => g.multiplicity(u, v),
        }
    };
    let mut m = [[0usize; NV]; NV];
    for (u, row) in m.iter_mut().enumerate() {
        for (v, x) in row.iter_mut().enumerate() {
            *x = mult(u, v);
        }
    }
    let mut out = Vec::new();
    let mut pi = [usize::MAX; NV];
    let mut used = [false; NV];
    vertex_backtrack(g, oriented, &m, 0, &mut pi, &mut used, &mut out);
    out.sort();
    out
}

fn vertex_backtrack(
    g: &TrivalentGraph,
    oriented: Option<&EdgeOrientedGraph>,
    m: &[[usize; NV]; NV],
    v: Vertex,
    pi: &mut [usize; NV],
    used: &mut [bool; NV],
    out: &mut Vec<HalfEdgePerm>,
) {
    if v == NV {
        let mut map = [usize::MAX; NH];
        let mut used_e = [false; NE];
        edge_backtrack(g, oriented, pi, 0, &mut map, &mut used_e, out);
        return;
    }
    for img in 0..NV {
        if used[img] {
            continue;
        }
        // Every already-placed vertex must keep its adjacency to `v`.
        let ok = (0..=v).all(|u| {
            let pu = if u == v { img } else { pi[u] };
            m[u][v] == m[pu][img] && m[v][u] == m[img][pu]
        });
        if !ok {
            continue;
        }
        pi[v] = img;
        used[img] = true;
        vertex_backtrack(g, oriented, m, v + 1, pi, used, out);
        used[img] = false;
        pi[v] = usize::MAX;
    }
}

fn edge_backtrack(
    g: &TrivalentGraph,
    oriented: Option<&EdgeOrientedGraph>,
    pi: &[usize; NV],
    e: Edge,
    map: &mut [HalfEdge; NH],
    used: &mut [bool; NE],
    out: &mut Vec<HalfEdgePerm>,
) {
    if e == NE {
        out.push(HalfEdgePerm(*map));
        return;
    }
    let (h0, h1) = match oriented {
        Some(og) => (og.first(e), og.second(e)),
        None => (2 * e, 2 * e + 1),
    };
    let (a, b) = (pi[g.vertex_of(h0)], pi[g.vertex_of(h1)]);
    for f in 0..NE {
        if used[f] {
            continue;
        }
        let (k0, k1) = match oriented {
            Some(og) => (og.first(f), og.second(f)),
            None => (2 * f, 2 * f + 1),
        };
        // Unoriented edges may be traversed either way; for a loop both
        // traversals land at the same vertex and give distinct maps.
        let mut choices: Vec<(HalfEdge, HalfEdge)> = Vec::with_capacity(2);
        if g.vertex_of(k0) == a && g.vertex_of(k1) == b {
            choices.push((k0, k1));
        }
        if oriented.is_none() && g.vertex_of(k1) == a && g.vertex_of(k0) == b {
            choices.push((k1, k0));
        }
        for (x0, x1) in choices {
            used[f] = true;
            map[h0] = x0;
            map[h1] = x1;
            edge_backtrack(g, oriented, pi, e + 1, map, used, out);
            used[f] = false;
        }
    }
}

/// Names of the canonical graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphName {
    T1,
    T2,
    W1,
    W2,
    #[serde(rename = "T_less")]
    TLess,
}

impl GraphName {
    /// The four graphs of the invariant's defining sum.
    pub const FAMILY: [GraphName; 4] = [GraphName::T1, GraphName::T2, GraphName::W1, GraphName::W2];

    pub fn as_str(self) -> &'static str {
        match self {
            GraphName::T1 => "T1",
            GraphName::T2 => "T2",
            GraphName::W1 => "W1",
            GraphName::W2 => "W2",
            GraphName::TLess => "T_less",
        }
    }

    pub fn shape(self) -> Shape {
        match self {
            GraphName::W1 | GraphName::W2 => Shape::DoubleTheta,
            _ => Shape::Tetrahedron,
        }
    }

    /// The image under reversing all edges, for the four family graphs.
    pub fn reversed(self) -> Option<GraphName> {
        match self {
            GraphName::T1 => Some(GraphName::T2),
            GraphName::T2 => Some(GraphName::T1),
            GraphName::W1 => Some(GraphName::W2),
            GraphName::W2 => Some(GraphName::W1),
            GraphName::TLess => None,
        }
    }

    pub fn is_reversed_family(self) -> bool {
        matches!(self, GraphName::T2 | GraphName::W2)
    }
}

impl fmt::Display for GraphName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T1" => Ok(GraphName::T1),
            "T2" => Ok(GraphName::T2),
            "W1" => Ok(GraphName::W1),
            "W2" => Ok(GraphName::W2),
            "T_less" | "Tless" | "T-less" => Ok(GraphName::TLess),
            _ => Err(Error::Usage(format!(
                "unknown graph {s:?}; expected one of T1, T2, W1, W2, T_less"
            ))),
        }
    }
}

// Edges in letter order a..f, 1-based (tail, head).
const T1_EDGES: [(Vertex, Vertex); NE] = [(4, 2), (1, 2), (1, 3), (3, 4), (2, 3), (1, 4)];
const W1_EDGES: [(Vertex, Vertex); NE] = [(3, 4), (1, 2), (1, 2), (4, 3), (2, 4), (1, 3)];

fn from_one_based(edges: &[(Vertex, Vertex); NE]) -> EdgeOrientedGraph {
    let zero: Vec<_> = edges.iter().map(|&(t, h)| (t - 1, h - 1)).collect();
    EdgeOrientedGraph::from_directed(&zero).expect("canonical graph tables are valid")
}

/// The named graph, with edges `a..f` as edge ids `0..6`.
///
/// `T2` and `W2` share half-edges with `T1` and `W1` and differ only in
/// edge orientation; `T_less` is `T1` with edge `a` reversed.
pub fn canonical_graph(name: GraphName) -> EdgeOrientedGraph {
    match name {
        GraphName::T1 => from_one_based(&T1_EDGES),
        GraphName::T2 => from_one_based(&T1_EDGES).reverse_all(),
        GraphName::W1 => from_one_based(&W1_EDGES),
        GraphName::W2 => from_one_based(&W1_EDGES).reverse_all(),
        GraphName::TLess => from_one_based(&T1_EDGES).reverse_edges(&[0]),
    }
}

/// A bijection from edges to labels `1..=6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling([u8; NE]);

impl Labeling {
    pub fn identity() -> Self {
        Self([1, 2, 3, 4, 5, 6])
    }

    /// `labels[e]` is the label of edge `e`.
    pub fn new(labels: [u8; NE]) -> Result<Self> {
        let mut seen = [false; NE + 1];
        for &l in &labels {
            if !(1..=NE as u8).contains(&l) || seen[l as usize] {
                return Err(Error::Invalid(format!("labels must be a permutation of 1..=6, got {labels:?}")));
            }
            seen[l as usize] = true;
        }
        Ok(Self(labels))
    }

    pub fn from_slice(labels: &[u8]) -> Result<Self> {
        let arr: [u8; NE] = labels
            .try_into()
            .map_err(|_| Error::Invalid(format!("expected 6 labels, got {}", labels.len())))?;
        Self::new(arr)
    }

    pub fn labels(&self) -> [u8; NE] {
        self.0
    }

    pub fn label(&self, e: Edge) -> u8 {
        self.0[e]
    }

    pub fn edge_with_label(&self, l: u8) -> Edge {
        self.0.iter().position(|&x| x == l).expect("label in 1..=6")
    }

    /// Exchanges the labels carried by edges `e` and `f`.
    pub fn swap_edges(&self, e: Edge, f: Edge) -> Self {
        let mut out = *self;
        out.0.swap(e, f);
        out
    }

    /// Lexicographic index in `0..720`.
    pub fn index(&self) -> usize {
        let p: Vec<usize> = self.0.iter().map(|&l| l as usize - 1).collect();
        perm::rank(&p)
    }

    pub fn from_index(i: usize) -> Self {
        let p = perm::unrank(NE, i);
        Self(std::array::from_fn(|k| p[k] as u8 + 1))
    }

    /// All 720 labelings in index order.
    pub fn all() -> Vec<Labeling> {
        (0..720).map(Self::from_index).collect()
    }
}

/// Cyclic order of the half-edges at each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexOrientation {
    cycles: [[HalfEdge; 3]; NV],
}

impl VertexOrientation {
    pub fn new(g: &TrivalentGraph, cycles: [[HalfEdge; 3]; NV]) -> Result<Self> {
        for (v, c) in cycles.iter().enumerate() {
            let mut got = *c;
            got.sort();
            if got != g.half_edges_at(v) {
                return Err(Error::Invalid(format!(
                    "cyclic order at vertex {} must list exactly its half-edges",
                    v + 1
                )));
            }
        }
        Ok(Self { cycles })
    }

    /// Half-edges at each vertex in ascending order.
    pub fn ascending(g: &TrivalentGraph) -> Self {
        Self { cycles: std::array::from_fn(|v| g.half_edges_at(v)) }
    }

    /// The drawn orientations of `T1` and `W1` (also valid for `T2`, `W2`,
    /// which share their half-edges).
    pub fn drawn(name: GraphName) -> Result<Self> {
        let names: [[&str; 3]; NV] = match name {
            GraphName::T1 | GraphName::T2 => [
                ["c1", "b1", "f1"],
                ["a2", "b2", "e1"],
                ["e2", "c2", "d1"],
                ["d2", "f2", "a1"],
            ],
            GraphName::W1 | GraphName::W2 => [
                ["f1", "b1", "c1"],
                ["e1", "c2", "b2"],
                ["d2", "f2", "a1"],
                ["a2", "e2", "d1"],
            ],
            GraphName::TLess => {
                return Err(Error::Usage("no drawn vertex-orientation for T_less".into()))
            }
        };
        let mut cycles = [[0; 3]; NV];
        for (v, row) in names.iter().enumerate() {
            for (k, s) in row.iter().enumerate() {
                cycles[v][k] = parse_half_edge(s)?;
            }
        }
        Self::new(canonical_graph(name).base(), cycles)
    }

    pub fn cycle(&self, v: Vertex) -> [HalfEdge; 3] {
        self.cycles[v]
    }

    pub fn cycles(&self) -> [[HalfEdge; 3]; NV] {
        self.cycles
    }

    /// Reverses the cyclic order at `v` (one AS move).
    pub fn flip(&self, v: Vertex) -> Self {
        let mut out = self.clone();
        out.cycles[v].swap(1, 2);
        out
    }

    /// Rotates the stored starting point at `v`; the cyclic order is unchanged.
    pub fn rotate(&self, v: Vertex) -> Self {
        let mut out = self.clone();
        out.cycles[v].rotate_left(1);
        out
    }

    /// Position of `h` in the cyclic order at its vertex.
    pub fn position(&self, h: HalfEdge) -> (Vertex, usize) {
        for (v, c) in self.cycles.iter().enumerate() {
            if let Some(k) = c.iter().position(|&x| x == h) {
                return (v, k);
            }
        }
        unreachable!("half-edge {h} missing from orientation")
    }
}

/// Isomorphism invariant of a labeled edge-oriented graph: the
/// lexicographically least `(tail, head)` list by label over all vertex
/// relabelings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledKey([(u8, u8); NE]);

pub fn labeled_key(g: &EdgeOrientedGraph, j: &Labeling) -> LabeledKey {
    let mut best: Option<[(u8, u8); NE]> = None;
    for pi in perm::all_permutations(NV) {
        let rel = g.relabeled(&pi);
        let mut by_label = [(0, 0); NE];
        for (e, &d) in rel.iter().enumerate() {
            by_label[j.label(e) as usize - 1] = d;
        }
        if best.is_none_or(|b| by_label < b) {
            best = Some(by_label);
        }
    }
    LabeledKey(best.expect("S4 is nonempty"))
}

/// Returns a label- and orientation-preserving isomorphism
/// `(g1, j1) → (g2, j2)` as a half-edge bijection, if one exists.
pub fn labeled_isomorphic(
    g1: &EdgeOrientedGraph,
    j1: &Labeling,
    g2: &EdgeOrientedGraph,
    j2: &Labeling,
) -> Option<HalfEdgePerm> {
    let mut pi = [usize::MAX; NV];
    let mut map = [0; NH];
    for e in 0..NE {
        let f = j2.edge_with_label(j1.label(e));
        for (v1, v2) in [(g1.tail(e), g2.tail(f)), (g1.head(e), g2.head(f))] {
            if pi[v1] == usize::MAX {
                pi[v1] = v2;
            } else if pi[v1] != v2 {
                return None;
            }
        }
        map[g1.first(e)] = g2.first(f);
        map[g1.second(e)] = g2.second(f);
    }
    if pi.contains(&usize::MAX) || !perm::is_permutation(&pi) {
        return None;
    }
    Some(HalfEdgePerm(map))
}

/// Which half of the defining sum a graph belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Labeled `T1` and `W1`.
    Direct,
    /// Labeled `T2` and `W2`, the images under reversing all edges.
    Reversed,
}

impl Family {
    pub fn graphs(self) -> [GraphName; 2] {
        match self {
            Family::Direct => [GraphName::T1, GraphName::W1],
            Family::Reversed => [GraphName::T2, GraphName::W2],
        }
    }

    pub fn of(name: GraphName) -> Option<Family> {
        match name {
            GraphName::T1 | GraphName::W1 => Some(Family::Direct),
            GraphName::T2 | GraphName::W2 => Some(Family::Reversed),
            GraphName::TLess => None,
        }
    }
}

/// One isomorphism class of labeled graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D1Class {
    pub id: usize,
    pub graph: GraphName,
    /// Least labeling (in index order) among the class members.
    pub labeling: Labeling,
    /// Number of labelings of `graph` in this class.
    pub size: usize,
    pub key: LabeledKey,
}

/// Isomorphism classes of labeled graphs of one family.
#[derive(Clone, Debug)]
pub struct D1 {
    pub family: Family,
    pub classes: Vec<D1Class>,
    index: HashMap<LabeledKey, usize>,
}

/// Classes of labeled `T1` and labeled `W1`.
pub fn enumerate_d1() -> D1 {
    D1::new(Family::Direct)
}

impl D1 {
    pub fn new(family: Family) -> Self {
        let mut classes: Vec<D1Class> = Vec::new();
        let mut index: HashMap<LabeledKey, usize> = HashMap::new();
        for name in family.graphs() {
            let g = canonical_graph(name);
            for j in Labeling::all() {
                let key = labeled_key(&g, &j);
                match index.get(&key) {
                    Some(&id) => classes[id].size += 1,
                    None => {
                        let id = classes.len();
                        index.insert(key, id);
                        classes.push(D1Class { id, graph: name, labeling: j, size: 1, key });
                    }
                }
            }
        }
        Self { family, classes, index }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn count(&self, name: GraphName) -> usize {
        self.classes.iter().filter(|c| c.graph == name).count()
    }

    /// Class of an arbitrary labeled graph, if it belongs to this family.
    pub fn class_of(&self, g: &EdgeOrientedGraph, j: &Labeling) -> Option<usize> {
        self.index.get(&labeled_key(g, j)).copied()
    }

    pub fn graph_of(&self, id: usize) -> EdgeOrientedGraph {
        canonical_graph(self.classes[id].graph)
    }

    /// True when the edge labeled `l` has no parallel partner.
    pub fn in_d1_l(&self, id: usize, l: u8) -> bool {
        let c = &self.classes[id];
        let g = canonical_graph(c.graph);
        g.is_one_edge(c.labeling.edge_with_label(l))
    }

    pub fn d1_l(&self, l: u8) -> Vec<usize> {
        (0..self.len()).filter(|&id| self.in_d1_l(id, l)).collect()
    }

    /// The classes with the same collapse along label `l` as class `id`.
    pub fn collapse_fiber(&self, id: usize, l: u8) -> Result<Vec<usize>> {
        if !self.in_d1_l(id, l) {
            return Err(Error::Precondition(format!(
                "class {id} is not in D1({l}): the edge labeled {l} has a parallel partner"
            )));
        }
        let c = &self.classes[id];
        let g = canonical_graph(c.graph);
        let col = collapse_edge(&g, &c.labeling, c.labeling.edge_with_label(l))?;
        let mut out = Vec::new();
        for (cand, cj) in col.uncollapse(l) {
            if let Some(k) = self.class_of(&cand, &cj) {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

/// A labeled edge-oriented multigraph on three vertices obtained by
/// contracting one edge. Vertex 0 is the merged vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsedGraph {
    /// `(tail, head, label)` for the five surviving edges, sorted by label.
    pub edges: Vec<(Vertex, Vertex, u8)>,
    /// Old vertex id → new vertex id.
    pub vertex_map: [Vertex; NV],
}

impl CollapsedGraph {
    pub fn valences(&self) -> [usize; 3] {
        let mut v = [0; 3];
        for &(t, h, _) in &self.edges {
            v[t] += 1;
            v[h] += 1;
        }
        v
    }

    /// Canonical form under relabeling the three vertices.
    pub fn key(&self) -> Vec<(u8, u8, u8)> {
        perm::all_permutations(3)
            .into_iter()
            .map(|pi| {
                self.edges
                    .iter()
                    .map(|&(t, h, l)| (l, pi[t] as u8, pi[h] as u8))
                    .collect::<Vec<_>>()
            })
            .min()
            .expect("S3 is nonempty")
    }

    /// Every way of splitting the merged vertex back into an edge labeled
    /// `l`: three pairings of its four edge-ends, times two orientations of
    /// the new edge. Returned graphs carry the identity labeling.
    pub fn uncollapse(&self, l: u8) -> Vec<(EdgeOrientedGraph, Labeling)> {
        // Edge-ends at the merged vertex: (index into self.edges, is_tail).
        let mut ends = Vec::new();
        for (i, &(t, h, _)) in self.edges.iter().enumerate() {
            if t == 0 {
                ends.push((i, true));
            }
            if h == 0 {
                ends.push((i, false));
            }
        }
        if ends.len() != 4 {
            return Vec::new();
        }
        let pairings = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
        let mut out = Vec::new();
        for p in pairings {
            for swap in [false, true] {
                let far = if swap { [p[0], p[1]] } else { [p[2], p[3]] };
                // Merged vertex splits into 0 (tail of the new edge) and 3.
                let mut edges: Vec<(Vertex, Vertex, u8)> = self.edges.clone();
                for &k in &far {
                    let (i, is_tail) = ends[k];
                    if is_tail {
                        edges[i].0 = 3;
                    } else {
                        edges[i].1 = 3;
                    }
                }
                edges.push((0, 3, l));
                edges.sort_by_key(|e| e.2);
                let list: Vec<_> = edges.iter().map(|&(t, h, _)| (t, h)).collect();
                if let Ok(g) = EdgeOrientedGraph::from_directed(&list) {
                    out.push((g, Labeling::identity()));
                }
            }
        }
        out
    }
}

/// Contracts edge `e`, keeping the other five edges with their orientation
/// and labels.
pub fn collapse_edge(g: &EdgeOrientedGraph, j: &Labeling, e: Edge) -> Result<CollapsedGraph> {
    if e >= NE {
        return Err(Error::Invalid(format!("edge id {e} out of range")));
    }
    if g.tail(e) == g.head(e) {
        return Err(Error::Precondition("cannot collapse a loop".into()));
    }
    if g.parallel_class(e).len() != 1 {
        return Err(Error::Precondition(format!(
            "edge {} has a parallel partner; collapse needs a one-edge face",
            half_edge_name(2 * e).chars().next().unwrap_or('?')
        )));
    }
    let (t, h) = (g.tail(e), g.head(e));
    let mut vertex_map = [0; NV];
    let mut next = 1;
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if v == t || v == h {
            *slot = 0;
        } else {
            *slot = next;
            next += 1;
        }
    }
    let mut edges: Vec<_> = (0..NE)
        .filter(|&f| f != e)
        .map(|f| (vertex_map[g.tail(f)], vertex_map[g.head(f)], j.label(f)))
        .collect();
    edges.sort_by_key(|x| x.2);
    Ok(CollapsedGraph { edges, vertex_map })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeType {
    TypeOne,
    TypeTwo,
}

/// Type-two edges touch the unique vertex that is the tail of three edges.
pub fn edge_type(g: &EdgeOrientedGraph, e: Edge) -> Result<EdgeType> {
    if !g.is_one_edge(e) {
        return Err(Error::Precondition("edge type is only defined for one-edges".into()));
    }
    // In reversed graphs the source of three edges becomes a sink.
    let mut sources: Vec<Vertex> = (0..NV).filter(|&v| g.out_degree(v) == 3).collect();
    if sources.is_empty() {
        sources = (0..NV).filter(|&v| g.out_degree(v) == 0).collect();
    }
    let [v1] = sources[..] else {
        return Err(Error::Internal(format!(
            "expected a unique vertex with all three edges pointing the same way, found {}",
            sources.len()
        )));
    };
    Ok(if g.tail(e) == v1 || g.head(e) == v1 { EdgeType::TypeTwo } else { EdgeType::TypeOne })
}

/// One edge of the external JSON form; vertices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub tail: usize,
    pub head: usize,
    pub label: u8,
}

/// `{vertices: 4, edges: [{tail, head, label}]}`, edges sorted by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    pub fn from_graph(g: &EdgeOrientedGraph, j: &Labeling) -> Self {
        let mut edges: Vec<EdgeJson> = (0..NE)
            .map(|e| EdgeJson { tail: g.tail(e) + 1, head: g.head(e) + 1, label: j.label(e) })
            .collect();
        edges.sort_by_key(|e| e.label);
        Self { vertices: NV, edges }
    }

    /// Rebuilds the graph with edge `k` carrying label `k + 1`.
    pub fn to_graph(&self) -> Result<(EdgeOrientedGraph, Labeling)> {
        if self.vertices != NV {
            return Err(Error::Invalid(format!("only 4-vertex graphs are supported, got {}", self.vertices)));
        }
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| e.label);
        if edges.iter().enumerate().any(|(k, e)| e.label as usize != k + 1) {
            return Err(Error::Invalid("labels must be exactly 1..=6".into()));
        }
        if edges.iter().any(|e| !(1..=NV).contains(&e.tail) || !(1..=NV).contains(&e.head)) {
            return Err(Error::Invalid("vertex ids must be in 1..=4".into()));
        }
        let list: Vec<_> = edges.iter().map(|e| (e.tail - 1, e.head - 1)).collect();
        Ok((EdgeOrientedGraph::from_directed(&list)?, Labeling::identity()))
    }
}
