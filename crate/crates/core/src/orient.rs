//! Sign of the comparison between two orderings of the half-edges: one read
//! off vertex by vertex, one read off edge by edge.

use serde::Serialize;

use crate::graphs::{half_edge_name, Edge, EdgeOrientedGraph, HalfEdge, TrivalentGraph, VertexOrientation, NE, NH, NV};
use crate::perm;
use crate::{Error, Result};

/// A total order on the twelve half-edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfEdgeOrder(Vec<HalfEdge>);

impl HalfEdgeOrder {
    pub fn new(order: Vec<HalfEdge>) -> Result<Self> {
        if order.len() != NH || !perm::is_permutation(&order) {
            return Err(Error::Invalid("a half-edge order must list each of the 12 half-edges once".into()));
        }
        Ok(Self(order))
    }

    pub fn as_slice(&self) -> &[HalfEdge] {
        &self.0
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|&h| half_edge_name(h)).collect()
    }

    /// Signature of the permutation carrying `self` onto `other`.
    pub fn sign_to(&self, other: &HalfEdgeOrder) -> i8 {
        let mut pos = [0usize; NH];
        for (i, &h) in other.0.iter().enumerate() {
            pos[h] = i;
        }
        let p: Vec<usize> = self.0.iter().map(|&h| pos[h]).collect();
        perm::signature(&p)
    }
}

/// A numbering of the vertices: `numbering[v]` is the number (1..=4) of vertex `v`.
pub type Numbering = [u8; NV];

pub const STANDARD_NUMBERING: Numbering = [1, 2, 3, 4];

fn check_numbering(n: &Numbering) -> Result<()> {
    let p: Vec<usize> = n.iter().map(|&x| (x as usize).wrapping_sub(1)).collect();
    if perm::is_permutation(&p) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("numbering must be a bijection onto 1..=4, got {n:?}")))
    }
}

/// Vertices in numbering order, each contributing its cyclic order as stored.
pub fn order_from_vertices(g: &TrivalentGraph, vo: &VertexOrientation, numbering: &Numbering) -> Result<HalfEdgeOrder> {
    check_numbering(numbering)?;
    VertexOrientation::new(g, vo.cycles())?;
    let mut by_number = [0; NV];
    for (v, &n) in numbering.iter().enumerate() {
        by_number[n as usize - 1] = v;
    }
    let order = by_number.iter().flat_map(|&v| vo.cycle(v)).collect();
    HalfEdgeOrder::new(order)
}

/// Edges in `edge_order`, each contributing (first, second).
pub fn order_from_edges(g: &EdgeOrientedGraph, edge_order: &[Edge]) -> Result<HalfEdgeOrder> {
    if edge_order.len() != NE || !perm::is_permutation(edge_order) {
        return Err(Error::Invalid("edge order must list each edge once".into()));
    }
    let order = edge_order.iter().flat_map(|&e| [g.first(e), g.second(e)]).collect();
    HalfEdgeOrder::new(order)
}

/// +1 when the orientation induced by the (edge-orientation, vertex-orientation)
/// pair agrees with the one induced by the vertex numbering.
pub fn orientation_sign(g: &EdgeOrientedGraph, vo: &VertexOrientation, numbering: &Numbering) -> Result<i8> {
    let from_v = order_from_vertices(g.base(), vo, numbering)?;
    let from_e = order_from_edges(g, &[0, 1, 2, 3, 4, 5])?;
    Ok(from_v.sign_to(&from_e))
}

/// Everything the `orient-check` command prints.
#[derive(Clone, Debug, Serialize)]
pub struct OrientReport {
    pub vertex_order: Vec<String>,
    pub edge_order: Vec<String>,
    pub sign: i8,
}

pub fn orient_report(g: &EdgeOrientedGraph, vo: &VertexOrientation, numbering: &Numbering) -> Result<OrientReport> {
    let v = order_from_vertices(g.base(), vo, numbering)?;
    let e = order_from_edges(g, &[0, 1, 2, 3, 4, 5])?;
    Ok(OrientReport { vertex_order: v.names(), edge_order: e.names(), sign: v.sign_to(&e) })
}
