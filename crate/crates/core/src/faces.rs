//! Boundary faces of the four-point configuration space and the ledger that
//! partitions every boundary term into cancelling blocks.
//!
//! A term is `(graph, labeling, face)` with the graph one of `T1, T2, W1, W2`.
//! Terms of vanishing classes form singleton blocks. Anomalous, double-edge
//! and triangular terms are paired by explicit rules; each pairing is checked
//! to be a fixed-point-free involution, and its face map is checked to
//! reverse orientation and to carry every edge of the partner onto the edge
//! of the original carrying the same label. One-edge terms are grouped by
//! edge-collapse fibers and checked with the weight system.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::diagram_space;
use crate::diagrams::VertexOrientedDiagram;
use crate::graphs::{
    canonical_graph, collapse_edge, edge_type, EdgeOrientedGraph, EdgeType, Family, GraphName, Labeling, Shape,
    VertexOrientation, D1, NE, NV,
};
use crate::orient::{orientation_sign, STANDARD_NUMBERING};
use crate::perm;
use crate::rational::{self, q, qi, Q};
use crate::{Error, Result};

/// `F(A)` (points of `A` collide) or `F(A, ∞)` (points of `A` escape).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    /// Bit `v` set when vertex `v` (0-based) is in `A`.
    pub set: u8,
    pub at_infinity: bool,
}

impl Face {
    pub fn new(set: u8, at_infinity: bool) -> Result<Self> {
        let n = set.count_ones();
        if set > 0b1111 || (at_infinity && n < 1) || (!at_infinity && n < 2) {
            return Err(Error::Invalid(format!("no face for set {set:#06b} (at infinity: {at_infinity})")));
        }
        Ok(Self { set, at_infinity })
    }

    pub fn size(&self) -> usize {
        self.set.count_ones() as usize
    }

    pub fn contains(&self, v: usize) -> bool {
        self.set >> v & 1 == 1
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..NV).filter(|&v| self.contains(v)).collect()
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.vertices().iter().map(|v| (v + 1).to_string()).collect();
        if self.at_infinity {
            write!(f, "F({{{}}},inf)", names.join(","))
        } else {
            write!(f, "F({{{}}})", names.join(","))
        }
    }
}

/// The 11 collision faces followed by the 15 faces at infinity.
pub fn enumerate_faces() -> Vec<Face> {
    let finite = (1u8..16).filter(|s| s.count_ones() >= 2).map(|s| Face { set: s, at_infinity: false });
    let infinite = (1u8..16).map(|s| Face { set: s, at_infinity: true });
    finite.chain(infinite).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceClass {
    Infinite,
    Anomalous,
    DegenerateScaling,
    DegenerateNoEdge,
    DoubleEdge,
    Triangular,
    OneEdge,
}

impl FaceClass {
    pub const ALL: [FaceClass; 7] = [
        FaceClass::Infinite,
        FaceClass::Anomalous,
        FaceClass::DegenerateScaling,
        FaceClass::DegenerateNoEdge,
        FaceClass::DoubleEdge,
        FaceClass::Triangular,
        FaceClass::OneEdge,
    ];

    pub fn vanishes(self) -> bool {
        matches!(self, FaceClass::Infinite | FaceClass::DegenerateScaling | FaceClass::DegenerateNoEdge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceTerm {
    pub graph: GraphName,
    pub labeling: Labeling,
    pub face: Face,
}

impl fmt::Display for FaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.labeling.labels().iter().map(|x| x.to_string()).collect();
        write!(f, "({}, [{}], {})", self.graph, l.join(""), self.face)
    }
}

fn family_graph(name: GraphName) -> Result<EdgeOrientedGraph> {
    if name == GraphName::TLess {
        return Err(Error::Invalid("T_less does not appear in the boundary ledger".into()));
    }
    Ok(canonical_graph(name))
}

/// Classifies a term by the structure of `E_A`.
pub fn classify(term: &FaceTerm) -> Result<FaceClass> {
    let g = family_graph(term.graph)?;
    let face = term.face;
    if face.at_infinity {
        return Ok(FaceClass::Infinite);
    }
    let inside = g.edges_within(face.set).len();
    Ok(match (term.graph.shape(), face.size(), inside) {
        (_, 4, _) => FaceClass::Anomalous,
        (Shape::Tetrahedron, 3, _) => FaceClass::Triangular,
        (Shape::DoubleTheta, 3, _) => FaceClass::DegenerateScaling,
        (_, 2, 0) => FaceClass::DegenerateNoEdge,
        (_, 2, 2) => FaceClass::DoubleEdge,
        (_, 2, 1) => FaceClass::OneEdge,
        _ => return Err(Error::Internal(format!("unclassifiable term {term}"))),
    })
}

/// Deliberate corruptions of the ledger rules, used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Anomalous terms are paired with themselves.
    AnomalousSelfPartner,
    /// The `{1,2}` double-edge rule swaps only the antiparallel pair.
    DoubleEdgeSingleSwap,
    /// The triangular rule swaps `e_vw` with `e_wx` instead of `e_xv`.
    TriangularWrongPair,
    /// The double-theta weight is taken to be 1.
    ThetaWeightOne,
    /// Terms on edgeless two-point faces are classified as one-edge.
    NoEdgeAsOneEdge,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::AnomalousSelfPartner,
        Mutation::DoubleEdgeSingleSwap,
        Mutation::TriangularWrongPair,
        Mutation::ThetaWeightOne,
        Mutation::NoEdgeAsOneEdge,
    ];
}

/// A face map: a permutation of the base points (vertices outside `A`, plus
/// the collision point at index 4) and an integer linear map on the
/// positions of the colliding points.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FaceMap {
    beta: [usize; NV + 1],
    lin: [[i64; NV]; NV],
}

const MERGED: usize = NV;

impl FaceMap {
    fn identity() -> Self {
        let mut lin = [[0; NV]; NV];
        for (i, row) in lin.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self { beta: [0, 1, 2, 3, MERGED], lin }
    }

    fn negate_on(set: u8) -> Self {
        let mut m = Self::identity();
        for v in 0..NV {
            if set >> v & 1 == 1 {
                m.lin[v][v] = -1;
            }
        }
        m
    }

    /// Orientation sign on the face: the fiber map acts on `(R^3)^A` modulo
    /// translations and dilations, the base map permutes `R^3` blocks.
    fn orientation(&self, set: u8) -> Result<i8> {
        let a: Vec<usize> = (0..NV).filter(|&v| set >> v & 1 == 1).collect();
        let sums: Vec<i64> = a.iter().map(|&r| a.iter().map(|&c| self.lin[r][c]).sum()).collect();
        let lambda = sums[0];
        if lambda == 0 || sums.iter().any(|&s| s != lambda) {
            return Err(Error::Internal("fiber map does not commute with translations".into()));
        }
        let k = a.len();
        let det: i64 = perm::all_permutations(k)
            .iter()
            .map(|p| perm::signature(p) as i64 * (0..k).map(|i| self.lin[a[i]][a[p[i]]]).product::<i64>())
            .sum();
        let quotient = det / lambda;
        let base: Vec<usize> = (0..NV).filter(|&v| set >> v & 1 == 0).chain([MERGED]).collect();
        let pos: Vec<usize> = base
            .iter()
            .map(|&b| base.iter().position(|&x| x == self.beta[b]).expect("beta permutes base points"))
            .collect();
        // Each R^3 block has odd dimension, so block signs enter linearly.
        Ok((quotient.signum() as i8) * perm::signature(&pos))
    }
}

/// Where an edge lands on a collision face.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Descriptor {
    /// Both ends collide: the direction `c(head) − c(tail)` as a combination
    /// of the colliding positions.
    Fiber([i64; NV]),
    /// At least one end stays apart: the pair of base points.
    Base(usize, usize),
}

fn descriptor(g: &EdgeOrientedGraph, e: usize, set: u8) -> Descriptor {
    let (t, h) = (g.tail(e), g.head(e));
    let inside = |v: usize| set >> v & 1 == 1;
    if inside(t) && inside(h) {
        let mut d = [0; NV];
        d[h] += 1;
        d[t] -= 1;
        Descriptor::Fiber(d)
    } else {
        let pt = |v: usize| if inside(v) { MERGED } else { v };
        Descriptor::Base(pt(t), pt(h))
    }
}

fn transport(d: &Descriptor, f: &FaceMap) -> Descriptor {
    match d {
        Descriptor::Fiber(x) => {
            let mut out = [0; NV];
            for (b, o) in out.iter_mut().enumerate() {
                *o = (0..NV).map(|a| x[a] * f.lin[a][b]).sum();
            }
            Descriptor::Fiber(out)
        }
        Descriptor::Base(p, q) => Descriptor::Base(f.beta[*p], f.beta[*q]),
    }
}

/// Checks that pulling the partner's forms back along `f` reproduces the
/// original forms edge by edge, and that `f` reverses orientation.
fn check_transport(term: &FaceTerm, partner: &FaceTerm, f: &FaceMap) -> std::result::Result<(), String> {
    let g = family_graph(term.graph).map_err(|e| e.to_string())?;
    let gp = family_graph(partner.graph).map_err(|e| e.to_string())?;
    let set = term.face.set;
    for ep in 0..NE {
        let e = term.labeling.edge_with_label(partner.labeling.label(ep));
        if transport(&descriptor(&gp, ep, set), f) != descriptor(&g, e, set) {
            return Err(format!(
                "face map does not carry the partner's edge labeled {} onto the original's",
                partner.labeling.label(ep)
            ));
        }
    }
    match f.orientation(set) {
        Ok(-1) => Ok(()),
        Ok(_) => Err("face map preserves orientation".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Partner of an anomalous term: the all-reversed graph with the transported
/// labeling. Edge ids are preserved by reversal, so the label array is the same.
pub fn pair_anomalous(term: &FaceTerm) -> Result<(FaceTerm, i8)> {
    anomalous_rule(term, None).map(|(p, _)| (p, -1))
}

fn anomalous_rule(term: &FaceTerm, m: Option<Mutation>) -> Result<(FaceTerm, FaceMap)> {
    if classify(term)? != FaceClass::Anomalous {
        return Err(Error::Precondition(format!("{term} is not anomalous")));
    }
    let graph = if m == Some(Mutation::AnomalousSelfPartner) {
        term.graph
    } else {
        term.graph.reversed().expect("family graph")
    };
    Ok((FaceTerm { graph, ..*term }, FaceMap::negate_on(0b1111)))
}

/// Partner of a double-edge term. An antiparallel pair inside `A` is swapped
/// (fiber negation); for a same-direction pair, the antiparallel pair outside
/// `A` and the two remaining edges are swapped (exchange of the two outside
/// vertices).
pub fn pair_double_edge(term: &FaceTerm) -> Result<(FaceTerm, i8)> {
    double_edge_rule(term, None).map(|(p, _)| (p, -1))
}

fn double_edge_rule(term: &FaceTerm, m: Option<Mutation>) -> Result<(FaceTerm, FaceMap)> {
    if classify(term)? != FaceClass::DoubleEdge {
        return Err(Error::Precondition(format!("{term} is not a double-edge term")));
    }
    let g = family_graph(term.graph)?;
    let set = term.face.set;
    let pair = g.edges_within(set);
    let (p0, p1) = (pair[0], pair[1]);
    let j = term.labeling;
    if g.tail(p0) != g.tail(p1) {
        return Ok((FaceTerm { labeling: j.swap_edges(p0, p1), ..*term }, FaceMap::negate_on(set)));
    }
    let outside = 0b1111 & !set;
    let anti = g.edges_within(outside);
    let rest: Vec<usize> = (0..NE).filter(|e| !pair.contains(e) && !anti.contains(e)).collect();
    let mut labeling = j.swap_edges(anti[0], anti[1]);
    if m != Some(Mutation::DoubleEdgeSingleSwap) {
        labeling = labeling.swap_edges(rest[0], rest[1]);
    }
    let out: Vec<usize> = (0..NV).filter(|v| outside >> v & 1 == 1).collect();
    let mut f = FaceMap::identity();
    f.beta.swap(out[0], out[1]);
    Ok((FaceTerm { labeling, ..*term }, f))
}

/// Roles `(v, w, x)` of the triangle spanned by `A`.
pub fn triangular_roles(g: &EdgeOrientedGraph, j: &Labeling, set: u8) -> Result<(usize, usize, usize)> {
    let tri = g.edges_within(set);
    if tri.len() != 3 || set.count_ones() != 3 {
        return Err(Error::Precondition("triangular roles need three vertices spanning a triangle".into()));
    }
    let a: Vec<usize> = (0..NV).filter(|v| set >> v & 1 == 1).collect();
    let out_deg = |v| tri.iter().filter(|&&e| g.tail(e) == v).count();
    let v = if a.iter().all(|&v| out_deg(v) == 1) {
        let top = *tri.iter().max_by_key(|&&e| j.label(e)).expect("three edges");
        *a.iter().find(|&&v| g.tail(top) != v && g.head(top) != v).expect("vertex off the edge")
    } else {
        let in_deg = |v| tri.iter().filter(|&&e| g.head(e) == v).count();
        *a.iter()
            .find(|&&v| out_deg(v) == 1 && in_deg(v) == 1)
            .ok_or_else(|| Error::Internal("no vertex with one in- and one out-edge".into()))?
    };
    let e_vw = *tri.iter().find(|&&e| g.tail(e) == v).expect("v has an out-edge");
    let w = g.head(e_vw);
    let x = *a.iter().find(|&&u| u != v && u != w).expect("three vertices");
    Ok((v, w, x))
}

fn edge_between(g: &EdgeOrientedGraph, from: usize, to: usize) -> usize {
    (0..NE).find(|&e| g.tail(e) == from && g.head(e) == to).expect("directed edge exists")
}

/// Partner of a triangular term: the labels of `e_vw` and `e_xv` exchanged.
pub fn pair_triangular(term: &FaceTerm) -> Result<(FaceTerm, i8)> {
    triangular_rule(term, None).map(|(p, _)| (p, -1))
}

fn triangular_rule(term: &FaceTerm, m: Option<Mutation>) -> Result<(FaceTerm, FaceMap)> {
    if classify(term)? != FaceClass::Triangular {
        return Err(Error::Precondition(format!("{term} is not triangular")));
    }
    let g = family_graph(term.graph)?;
    let (v, w, x) = triangular_roles(&g, &term.labeling, term.face.set)?;
    let e_vw = edge_between(&g, v, w);
    let other = if m == Some(Mutation::TriangularWrongPair) {
        (0..NE).find(|&e| (g.tail(e), g.head(e)) == (w, x) || (g.tail(e), g.head(e)) == (x, w))
    } else {
        (0..NE).find(|&e| (g.tail(e), g.head(e)) == (x, v))
    }
    .expect("triangle edge exists");
    let mut f = FaceMap::identity();
    f.lin[v] = [0; NV];
    f.lin[v][v] = -1;
    f.lin[v][w] = 1;
    f.lin[v][x] = 1;
    Ok((FaceTerm { labeling: term.labeling.swap_edges(e_vw, other), ..*term }, f))
}

/// One member of a collapse fiber.
#[derive(Clone, Debug, Serialize)]
pub struct FiberMember {
    pub graph: GraphName,
    pub labels: [u8; NE],
    /// Sign relative to the first tetrahedral member.
    pub sign: i8,
    /// Weight of the graph with an orientation compatible with its numbering.
    #[serde(with = "rational::serde_str")]
    pub weight: Q,
}

/// An IHX triple: the collapse fiber of one class along one label.
#[derive(Clone, Debug, Serialize)]
pub struct OneEdgeBlock {
    pub family: Family,
    pub label: u8,
    pub edge_type: Option<EdgeType>,
    pub members: Vec<FiberMember>,
    #[serde(with = "rational::serde_str")]
    pub weighted_sum: Q,
}

/// Signed, weighted collapse fiber of `class` along label `l`.
pub fn one_edge_block(d1: &D1, class: usize, l: u8) -> Result<OneEdgeBlock> {
    one_edge_block_with(d1, class, l, None)
}

fn one_edge_block_with(d1: &D1, class: usize, l: u8, m: Option<Mutation>) -> Result<OneEdgeBlock> {
    let fiber = d1.collapse_fiber(class, l)?;
    let mut order = fiber.clone();
    order.sort_by_key(|&c| (d1.classes[c].graph.shape(), c));
    let space = diagram_space();
    let reference = &d1.classes[order[0]];
    let ref_graph = canonical_graph(reference.graph);
    let ref_edge = reference.labeling.edge_with_label(l);
    let ref_col = collapse_edge(&ref_graph, &reference.labeling, ref_edge)?;
    let mut members = Vec::new();
    let mut sum = Q::zero();
    for &c in &order {
        let cls = &d1.classes[c];
        let g = canonical_graph(cls.graph);
        let e = cls.labeling.edge_with_label(l);
        let col = collapse_edge(&g, &cls.labeling, e)?;
        // Vertex bijection reference → member: tails and heads of the
        // collapsed edge correspond, the other two follow the labeled
        // isomorphism of the collapsed graphs.
        let mut cmap = [usize::MAX; 3];
        cmap[0] = 0;
        for (&(t0, h0, l0), &(t1, h1, l1)) in ref_col.edges.iter().zip(&col.edges) {
            debug_assert_eq!(l0, l1);
            for (a, b) in [(t0, t1), (h0, h1)] {
                if cmap[a] == usize::MAX {
                    cmap[a] = b;
                } else if cmap[a] != b {
                    return Err(Error::Internal("collapsed graphs in a fiber are not isomorphic".into()));
                }
            }
        }
        let mut pi = [usize::MAX; NV];
        pi[ref_graph.tail(ref_edge)] = g.tail(e);
        pi[ref_graph.head(ref_edge)] = g.head(e);
        for u in 0..NV {
            let k = ref_col.vertex_map[u];
            if k != 0 {
                pi[u] = (0..NV).find(|&v| col.vertex_map[v] == cmap[k] && cmap[k] != 0).expect("vertex image");
            }
        }
        let vo = VertexOrientation::drawn(cls.graph)?;
        let mut weight = space.weight(&VertexOrientedDiagram::new(g.base().clone(), vo.clone())?)?;
        if m == Some(Mutation::ThetaWeightOne) && cls.graph.shape() == Shape::DoubleTheta {
            weight = Q::one();
        }
        let osign = orientation_sign(&g, &vo, &STANDARD_NUMBERING)?;
        let raw = perm::signature(&pi) * osign;
        members.push((cls, raw, weight));
    }
    let base_sign = members[0].1;
    let members: Vec<FiberMember> = members
        .into_iter()
        .map(|(cls, raw, weight)| {
            let sign = raw * base_sign;
            sum += qi(sign as i64) * &weight;
            FiberMember { graph: cls.graph, labels: cls.labeling.labels(), sign, weight }
        })
        .collect();
    let edge_type = edge_type(&ref_graph, ref_edge).ok();
    Ok(OneEdgeBlock { family: d1.family, label: l, edge_type, members, weighted_sum: sum })
}

/// Exact prefactor identities linking the two forms of the invariant.
#[derive(Clone, Debug, Serialize)]
pub struct Reconciliation {
    #[serde(with = "rational::serde_str")]
    pub tetra_expanded: Q,
    #[serde(with = "rational::serde_str")]
    pub tetra_direct: Q,
    #[serde(with = "rational::serde_str")]
    pub theta_expanded: Q,
    #[serde(with = "rational::serde_str")]
    pub theta_direct: Q,
    pub t1_automorphisms: usize,
    pub w1_automorphisms: usize,
    pub t1_classes: usize,
    pub w1_classes: usize,
    /// `coefficient · |Aut| = 3 · w` for T (coefficient 1) and W (coefficient 3).
    pub one_edge_coefficients_match: bool,
    pub all_hold: bool,
}

pub fn reconcile_coefficients() -> Reconciliation {
    let d1 = D1::new(Family::Direct);
    let two = qi(2);
    let p2 = |k: u32| qi(1i64 << k);
    // Two orientation assignments per shape, 2^4 from the defining sum,
    // 2^6 from expanding the antisymmetrised forms; 1/3 on tetrahedra.
    let tetra_expanded = &two / (p2(4) * qi(3) * p2(6));
    let tetra_direct = q(1, 1) / (p2(6) * qi(24));
    let theta_expanded = &two / (p2(4) * p2(6));
    let theta_direct = q(1, 1) / (p2(6) * qi(8));
    let t_aut = canonical_graph(GraphName::T1).automorphisms(true).len();
    let w_aut = canonical_graph(GraphName::W1).automorphisms(true).len();
    let (t_cls, w_cls) = (d1.count(GraphName::T1), d1.count(GraphName::W1));
    let wt = crate::diagrams::drawn_weight(GraphName::T1).unwrap_or_default();
    let ww = crate::diagrams::drawn_weight(GraphName::W1).unwrap_or_default();
    let one_edge = qi(t_aut as i64) == qi(3) * wt && qi(3 * w_aut as i64) == qi(3) * ww;
    let all_hold = tetra_expanded == tetra_direct
        && theta_expanded == theta_direct
        && 720 == t_aut * t_cls
        && 720 == w_aut * w_cls
        && one_edge;
    Reconciliation {
        tetra_expanded,
        tetra_direct,
        theta_expanded,
        theta_direct,
        t1_automorphisms: t_aut,
        w1_automorphisms: w_aut,
        t1_classes: t_cls,
        w1_classes: w_cls,
        one_edge_coefficients_match: one_edge,
        all_hold,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub term: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct BlockCounts {
    pub singletons: usize,
    pub anomalous_pairs: usize,
    pub double_edge_pairs: usize,
    pub triangular_pairs: usize,
    pub one_edge_triples: usize,
    pub vanishing_hypotheses_checked: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberSummary {
    pub family: Family,
    pub label: u8,
    pub d1_l: usize,
    pub fibers: usize,
    pub type_one: usize,
    pub type_two: usize,
}

/// A two-term cancellation block.
#[derive(Clone, Debug, Serialize)]
pub struct PairBlock {
    pub class: FaceClass,
    pub term: String,
    pub partner: String,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerReport {
    pub total_terms: usize,
    pub per_class_counts: BTreeMap<GraphName, BTreeMap<FaceClass, usize>>,
    pub blocks_checked: BlockCounts,
    pub one_edge_fibers: Vec<FiberSummary>,
    pub coefficient_reconciliation: Reconciliation,
    pub complete: bool,
    pub disjoint: bool,
    pub violations: Vec<Violation>,
    pub all_green: bool,
    pub mutation: Option<Mutation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pair_blocks: Vec<PairBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub one_edge_blocks: Vec<OneEdgeBlock>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LedgerOptions {
    pub mutation: Option<Mutation>,
    /// Keep every block in the report (large).
    pub keep_blocks: bool,
}

const NF: usize = 26;

fn term_index(g: usize, j: usize, f: usize) -> usize {
    (g * 720 + j) * NF + f
}

/// Full ledger with the correct rules.
pub fn verify_ledger() -> LedgerReport {
    verify_ledger_with(LedgerOptions::default())
}

pub fn verify_ledger_with(opts: LedgerOptions) -> LedgerReport {
    let m = opts.mutation;
    let faces = enumerate_faces();
    let graphs = GraphName::FAMILY;
    let labelings = Labeling::all();
    let face_index: HashMap<Face, usize> = faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let total = graphs.len() * labelings.len() * faces.len();

    // Classification, in parallel over (graph, labeling).
    let classes: Vec<FaceClass> = (0..graphs.len() * 720)
        .into_par_iter()
        .flat_map_iter(|gj| {
            let (g, j) = (graphs[gj / 720], labelings[gj % 720]);
            faces
                .iter()
                .map(move |&face| {
                    let c = classify(&FaceTerm { graph: g, labeling: j, face }).expect("family term");
                    if m == Some(Mutation::NoEdgeAsOneEdge) && c == FaceClass::DegenerateNoEdge {
                        FaceClass::OneEdge
                    } else {
                        c
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let mut per_class_counts: BTreeMap<GraphName, BTreeMap<FaceClass, usize>> = BTreeMap::new();
    for (gi, g) in graphs.iter().enumerate() {
        let counts = per_class_counts.entry(*g).or_default();
        for c in FaceClass::ALL {
            counts.insert(c, 0);
        }
        // Tallies are per labeling; every labeling has the same profile.
        for f in 0..NF {
            *counts.get_mut(&classes[term_index(gi, 0, f)]).expect("class key") += 1;
        }
    }

    let mut coverage = vec![0u8; total];
    let mut violations = Vec::new();
    let mut counts = BlockCounts::default();
    let mut pair_blocks = Vec::new();
    let term_at = |idx: usize| FaceTerm {
        graph: graphs[idx / NF / 720],
        labeling: labelings[idx / NF % 720],
        face: faces[idx % NF],
    };
    let index_of = |t: &FaceTerm| {
        let g = graphs.iter().position(|x| *x == t.graph).expect("family graph");
        term_index(g, t.labeling.index(), face_index[&t.face])
    };

    for idx in 0..total {
        let class = classes[idx];
        let term = term_at(idx);
        match class {
            FaceClass::Infinite | FaceClass::DegenerateScaling | FaceClass::DegenerateNoEdge => {
                if let Err(msg) = check_vanishing(&term, class) {
                    violations.push(Violation { rule: format!("{class:?}"), term: Some(term.to_string()), message: msg });
                    continue;
                }
                counts.vanishing_hypotheses_checked += 1;
                counts.singletons += 1;
                coverage[idx] += 1;
            }
            FaceClass::Anomalous | FaceClass::DoubleEdge | FaceClass::Triangular => {
                let rule = |t: &FaceTerm| match class {
                    FaceClass::Anomalous => anomalous_rule(t, m),
                    FaceClass::DoubleEdge => double_edge_rule(t, m),
                    _ => triangular_rule(t, m),
                };
                let fail = |msg: String| Violation {
                    rule: format!("{class:?}"),
                    term: Some(term.to_string()),
                    message: msg,
                };
                let (partner, f) = match rule(&term) {
                    Ok(x) => x,
                    Err(e) => {
                        violations.push(fail(e.to_string()));
                        continue;
                    }
                };
                let pidx = index_of(&partner);
                if pidx == idx {
                    violations.push(fail("pairing has a fixed point".into()));
                    continue;
                }
                if classes[pidx] != class || partner.face != term.face {
                    violations.push(fail(format!("partner {partner} is not in the same class and face")));
                    continue;
                }
                match rule(&partner) {
                    Ok((back, _)) if back == term => {}
                    Ok((back, _)) => {
                        violations.push(fail(format!("pairing is not an involution: {partner} maps to {back}")));
                        continue;
                    }
                    Err(e) => {
                        violations.push(fail(e.to_string()));
                        continue;
                    }
                }
                if let Err(msg) = check_transport(&term, &partner, &f) {
                    violations.push(fail(msg));
                    continue;
                }
                if idx < pidx {
                    coverage[idx] += 1;
                    coverage[pidx] += 1;
                    match class {
                        FaceClass::Anomalous => counts.anomalous_pairs += 1,
                        FaceClass::DoubleEdge => counts.double_edge_pairs += 1,
                        _ => counts.triangular_pairs += 1,
                    }
                    if opts.keep_blocks {
                        pair_blocks.push(PairBlock {
                            class,
                            term: term.to_string(),
                            partner: partner.to_string(),
                            sign: -1,
                        });
                    }
                }
            }
            FaceClass::OneEdge => {}
        }
    }

    // One-edge terms, grouped by collapse fibers in each family.
    let mut one_edge_fibers = Vec::new();
    let mut one_edge_blocks = Vec::new();
    for family in [Family::Direct, Family::Reversed] {
        let d1 = D1::new(family);
        // fiber_of[l][class] = fiber number, or usize::MAX.
        let mut fiber_of = vec![vec![usize::MAX; d1.len()]; NE + 1];
        for l in 1..=NE as u8 {
            let members = d1.d1_l(l);
            let mut summary = FiberSummary { family, label: l, d1_l: members.len(), fibers: 0, type_one: 0, type_two: 0 };
            for &c in &members {
                if fiber_of[l as usize][c] != usize::MAX {
                    continue;
                }
                let block = match one_edge_block_with(&d1, c, l, m) {
                    Ok(b) => b,
                    Err(e) => {
                        violations.push(Violation { rule: "OneEdge".into(), term: None, message: e.to_string() });
                        continue;
                    }
                };
                let fiber = d1.collapse_fiber(c, l).expect("checked above");
                let fid = summary.fibers;
                summary.fibers += 1;
                match block.edge_type {
                    Some(EdgeType::TypeOne) => summary.type_one += 1,
                    Some(EdgeType::TypeTwo) => summary.type_two += 1,
                    None => {}
                }
                let desc = format!("{family:?} fiber of class {c} along label {l}");
                let shapes: Vec<Shape> = fiber.iter().map(|&k| d1.classes[k].graph.shape()).collect();
                let tetras = shapes.iter().filter(|s| **s == Shape::Tetrahedron).count();
                if fiber.len() != 3 || tetras != 2 {
                    violations.push(Violation {
                        rule: "OneEdge".into(),
                        term: None,
                        message: format!("{desc} has {} members ({tetras} tetrahedral), expected 3 (2)", fiber.len()),
                    });
                }
                if !block.weighted_sum.is_zero() {
                    violations.push(Violation {
                        rule: "OneEdge".into(),
                        term: None,
                        message: format!("{desc} has weighted signed sum {}", rational::to_string(&block.weighted_sum)),
                    });
                }
                for &k in &fiber {
                    if fiber_of[l as usize][k] != usize::MAX {
                        violations.push(Violation {
                            rule: "OneEdge".into(),
                            term: None,
                            message: format!("class {k} lies in two fibers along label {l}"),
                        });
                    }
                    fiber_of[l as usize][k] = fid;
                }
                counts.one_edge_triples += 1;
                if opts.keep_blocks {
                    one_edge_blocks.push(block);
                }
            }
            one_edge_fibers.push(summary);
        }
        // Coverage of the individual terms.
        for (gi, g) in graphs.iter().enumerate() {
            if Family::of(*g) != Some(family) {
                continue;
            }
            let graph = canonical_graph(*g);
            for (ji, j) in labelings.iter().enumerate() {
                let class = d1.class_of(&graph, j).expect("family member");
                for (fi, face) in faces.iter().enumerate() {
                    let idx = term_index(gi, ji, fi);
                    if classes[idx] != FaceClass::OneEdge {
                        continue;
                    }
                    let inside = graph.edges_within(face.set);
                    let [e] = inside[..] else {
                        violations.push(Violation {
                            rule: "OneEdge".into(),
                            term: Some(term_at(idx).to_string()),
                            message: format!("classified one-edge but spans {} edges", inside.len()),
                        });
                        continue;
                    };
                    if fiber_of[j.label(e) as usize][class] != usize::MAX {
                        coverage[idx] += 1;
                    }
                }
            }
        }
    }

    let mut complete = true;
    let mut disjoint = true;
    for (idx, &c) in coverage.iter().enumerate() {
        if c == 0 {
            complete = false;
            if violations.len() < 1000 {
                violations.push(Violation {
                    rule: "coverage".into(),
                    term: Some(term_at(idx).to_string()),
                    message: "term is not covered by any block".into(),
                });
            }
        } else if c > 1 {
            disjoint = false;
            violations.push(Violation {
                rule: "coverage".into(),
                term: Some(term_at(idx).to_string()),
                message: format!("term is covered by {c} blocks"),
            });
        }
    }
    let coefficient_reconciliation = reconcile_coefficients();
    if !coefficient_reconciliation.all_hold {
        violations.push(Violation {
            rule: "coefficients".into(),
            term: None,
            message: "coefficient reconciliation failed".into(),
        });
    }
    let all_green = violations.is_empty() && complete && disjoint;
    LedgerReport {
        total_terms: total,
        per_class_counts,
        blocks_checked: counts,
        one_edge_fibers,
        coefficient_reconciliation,
        complete,
        disjoint,
        violations,
        all_green,
        mutation: m,
        pair_blocks,
        one_edge_blocks,
    }
}

/// Structural hypotheses under which a face term vanishes.
fn check_vanishing(term: &FaceTerm, class: FaceClass) -> std::result::Result<(), String> {
    let g = family_graph(term.graph).map_err(|e| e.to_string())?;
    let set = term.face.set;
    let inside = g.edges_within(set).len();
    match class {
        FaceClass::Infinite if term.face.size() == NV => Ok(()),
        FaceClass::Infinite => {
            // Forms on edges touching A factor through a space of dimension
            // 3|A| − 1 (plus the homotopy parameter), but have degree
            // 2(|E_C| + |E_A|), which is larger once E_C is nonempty.
            let crossing = (0..NE)
                .filter(|&e| (set >> g.tail(e) & 1) != (set >> g.head(e) & 1))
                .count();
            let a = term.face.size();
            if 3 * a != crossing + 2 * inside {
                return Err("valence count 3|A| = |E_C| + 2|E_A| fails".into());
            }
            if crossing == 0 || 2 * (crossing + inside) <= 3 * a {
                return Err("degree does not exceed dimension".into());
            }
            Ok(())
        }
        FaceClass::DegenerateScaling => {
            // u2 is joined twice to u3 and once to u1; u1 and u3 are not adjacent.
            let a = term.face.vertices();
            let mult = |u, v| g.base().multiplicity(u, v);
            let ok = perm::all_permutations(3).iter().any(|p| {
                let (u1, u2, u3) = (a[p[0]], a[p[1]], a[p[2]]);
                mult(u2, u3) == 2 && mult(u1, u2) == 1 && mult(u1, u3) == 0
            });
            if ok {
                Ok(())
            } else {
                Err("no vertex labelling with a double edge u2u3, an edge u1u2 and no edge u1u3".into())
            }
        }
        FaceClass::DegenerateNoEdge => {
            if inside == 0 {
                Ok(())
            } else {
                Err("E_A is not empty".into())
            }
        }
        _ => Err(format!("{class:?} is not a vanishing class")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_counts() {
        let f = enumerate_faces();
        assert_eq!(f.len(), 26);
        assert_eq!(f.iter().filter(|x| !x.at_infinity).count(), 11);
    }

    #[test]
    fn face_maps_reverse_orientation() {
        assert_eq!(FaceMap::negate_on(0b1111).orientation(0b1111).unwrap(), -1);
        assert_eq!(FaceMap::negate_on(0b1100).orientation(0b1100).unwrap(), -1);
        let mut swap = FaceMap::identity();
        swap.beta.swap(2, 3);
        assert_eq!(swap.orientation(0b0011).unwrap(), -1);
        assert_eq!(FaceMap::identity().orientation(0b0011).unwrap(), 1);
    }
}
