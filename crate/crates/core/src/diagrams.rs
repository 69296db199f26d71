//! Vertex-oriented diagrams on four trivalent vertices, the antisymmetry and
//! Jacobi relations among them, and the weight system.
//!
//! A diagram is stored as a fixed-point-free involution on twelve *slots*:
//! slot `3v + s` is the `s`-th half-edge in the cyclic order at vertex `v`.
//! Two diagrams are isomorphic (preserving vertex orientations) exactly when
//! one is carried to the other by a vertex permutation combined with a
//! rotation of the slots at each vertex, so the canonical key is the least
//! partner array over those 24 · 3⁴ relabelings.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::graphs::{GraphName, Shape, TrivalentGraph, VertexOrientation, NH, NV};
use crate::linalg;
use crate::perm;
use crate::rational::{self, Q};
use crate::{Error, Result};

/// Partner array on the twelve slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching([u8; NH]);

impl Matching {
    pub fn new(partner: [usize; NH]) -> Result<Self> {
        for (p, &q) in partner.iter().enumerate() {
            if q >= NH || q == p || partner[q] != p {
                return Err(Error::Invalid("slot partner array must be a fixed-point-free involution".into()));
            }
        }
        Ok(Self(partner.map(|x| x as u8)))
    }

    pub fn partner(&self, p: usize) -> usize {
        self.0[p] as usize
    }

    pub fn is_connected(&self) -> bool {
        let mut reach = 1u8;
        loop {
            let mut next = reach;
            for p in 0..NH {
                if reach >> (p / 3) & 1 == 1 {
                    next |= 1 << (self.partner(p) / 3);
                }
            }
            if next == reach {
                return reach == 0b1111;
            }
            reach = next;
        }
    }

    pub fn has_loop(&self) -> bool {
        (0..NH).any(|p| p / 3 == self.partner(p) / 3)
    }

    /// Conjugates by the slot relabeling `sigma`.
    pub fn relabel(&self, sigma: &[usize; NH]) -> Self {
        let mut out = [0u8; NH];
        for p in 0..NH {
            out[sigma[p]] = sigma[self.partner(p)] as u8;
        }
        Self(out)
    }

    /// Reverses the cyclic order at `v`.
    pub fn flip(&self, v: usize) -> Self {
        let mut sigma: [usize; NH] = std::array::from_fn(|p| p);
        sigma.swap(3 * v + 1, 3 * v + 2);
        self.relabel(&sigma)
    }

    /// Least relabeling over vertex permutations and per-vertex rotations.
    pub fn canonical(&self) -> Self {
        symmetry_group().iter().map(|s| self.relabel(s)).min().expect("group is nonempty")
    }

    /// The underlying multigraph as a half-edge graph whose half-edges are
    /// numbered edge by edge, with the matching vertex orientation.
    pub fn to_graph(&self) -> (TrivalentGraph, VertexOrientation) {
        let mut slot_to_half = [0usize; NH];
        let mut vertex_of = [0usize; NH];
        let mut k = 0;
        for p in 0..NH {
            let q = self.partner(p);
            if p < q {
                slot_to_half[p] = 2 * k;
                slot_to_half[q] = 2 * k + 1;
                vertex_of[2 * k] = p / 3;
                vertex_of[2 * k + 1] = q / 3;
                k += 1;
            }
        }
        let g = TrivalentGraph::new(vertex_of).expect("matching yields a trivalent graph");
        let cycles = std::array::from_fn(|v| std::array::from_fn(|s| slot_to_half[3 * v + s]));
        let vo = VertexOrientation::new(&g, cycles).expect("slots list each vertex's half-edges");
        (g, vo)
    }
}

/// The 1944 slot relabelings: a vertex permutation followed by a rotation at
/// each vertex.
pub fn symmetry_group() -> &'static [[usize; NH]] {
    static GROUP: OnceLock<Vec<[usize; NH]>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut out = Vec::with_capacity(1944);
        for pi in perm::all_permutations(NV) {
            for rot in 0..81usize {
                let r = [rot % 3, rot / 3 % 3, rot / 9 % 3, rot / 27];
                out.push(std::array::from_fn(|p| 3 * pi[p / 3] + (p % 3 + r[p / 3]) % 3));
            }
        }
        out
    })
}

/// A trivalent graph with a cyclic order at each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrientedDiagram {
    pub base: TrivalentGraph,
    pub vo: VertexOrientation,
}

impl VertexOrientedDiagram {
    pub fn new(base: TrivalentGraph, vo: VertexOrientation) -> Result<Self> {
        let vo = VertexOrientation::new(&base, vo.cycles())?;
        Ok(Self { base, vo })
    }

    /// The slot matching with vertex `v`'s cyclic order in slots `3v..3v+3`.
    pub fn matching(&self) -> Matching {
        let mut slot = [0usize; NH];
        for v in 0..NV {
            for (s, &h) in self.vo.cycle(v).iter().enumerate() {
                slot[h] = 3 * v + s;
            }
        }
        let mut partner = [0usize; NH];
        for e in 0..NH / 2 {
            partner[slot[2 * e]] = slot[2 * e + 1];
            partner[slot[2 * e + 1]] = slot[2 * e];
        }
        Matching::new(partner).expect("edges pair distinct slots")
    }

    pub fn key(&self) -> Matching {
        self.matching().canonical()
    }

    /// A named graph with its drawn vertex orientation.
    pub fn drawn(name: GraphName) -> Result<Self> {
        let g = crate::graphs::canonical_graph(name);
        Self::new(g.base().clone(), VertexOrientation::drawn(name)?)
    }
}

/// Sparse rational combination of diagram classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramVector(BTreeMap<Matching, Q>);

impl DiagramVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(d: &VertexOrientedDiagram) -> Self {
        let mut v = Self::new();
        v.add(d.key(), Q::one());
        v
    }

    /// Adds `c · [key]`; `key` is canonicalised first.
    pub fn add(&mut self, key: Matching, c: Q) {
        let key = key.canonical();
        let entry = self.0.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Matching, &Q)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Total of the coefficients, counted with multiplicity.
    pub fn coefficient_sum(&self) -> Q {
        self.0.values().fold(Q::zero(), |a, b| a + b)
    }
}

/// Relation generators of one kind.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub generators: Vec<DiagramVector>,
}

fn all_matchings(order: &[usize]) -> Vec<Matching> {
    fn rec(order: &[usize], partner: &mut [usize; NH], used: &mut [bool; NH], out: &mut Vec<Matching>) {
        let Some(&p) = order.iter().find(|&&p| !used[p]) else {
            out.push(Matching(partner.map(|x| x as u8)));
            return;
        };
        used[p] = true;
        for &q in order {
            if used[q] {
                continue;
            }
            used[q] = true;
            partner[p] = q;
            partner[q] = p;
            rec(order, partner, used, out);
            used[q] = false;
        }
        used[p] = false;
    }
    let mut out = Vec::with_capacity(10395);
    rec(order, &mut [0; NH], &mut [false; NH], &mut out);
    out
}

/// Canonical keys of all connected diagrams, generated by visiting slot
/// matchings in the given slot order. Sorted.
pub fn enumerate_diagrams_with_order(order: &[usize]) -> Vec<Matching> {
    let group = symmetry_group();
    let mut seen: HashSet<Matching> = HashSet::new();
    let mut classes = Vec::new();
    for m in all_matchings(order) {
        if !m.is_connected() || seen.contains(&m) {
            continue;
        }
        let orbit: Vec<Matching> = group.iter().map(|s| m.relabel(s)).collect();
        classes.push(*orbit.iter().min().expect("orbit is nonempty"));
        seen.extend(orbit);
    }
    classes.sort();
    classes
}

/// Canonical keys of all connected vertex-oriented diagrams, sorted.
pub fn enumerate_diagrams() -> Vec<Matching> {
    let order: Vec<usize> = (0..NH).collect();
    enumerate_diagrams_with_order(&order)
}

/// `[D] + [D flipped at v]` for every class and vertex, deduplicated.
pub fn antisymmetry_relations(classes: &[Matching]) -> RelationSet {
    let mut seen = BTreeSet::new();
    let mut generators = Vec::new();
    for m in classes {
        for v in 0..NV {
            let mut r = DiagramVector::new();
            r.add(*m, Q::one());
            r.add(m.flip(v), Q::one());
            if seen.insert(r.0.clone().into_iter().collect::<Vec<_>>()) {
                generators.push(r);
            }
        }
    }
    RelationSet { generators }
}

/// The three terms of the Jacobi relation around the edge between slot `p`
/// and its partner, which must sit at a different vertex. Reading the
/// neighbourhood as `u = (e, x, y)` and `w = (e, z, t)`, the legs `x, y, z`
/// are cycled while `t` stays put.
pub fn jacobi_terms(m: &Matching, p: usize) -> Option<[Matching; 3]> {
    let q = m.partner(p);
    let (u, w) = (p / 3, q / 3);
    if u == w {
        return None;
    }
    let x = 3 * u + (p % 3 + 1) % 3;
    let y = 3 * u + (p % 3 + 2) % 3;
    let z = 3 * w + (q % 3 + 1) % 3;
    let mut second: [usize; NH] = std::array::from_fn(|s| s);
    // u = (e, y, z), w = (e, x, t)
    second[y] = x;
    second[z] = y;
    second[x] = z;
    let mut third: [usize; NH] = std::array::from_fn(|s| s);
    // u = (e, z, x), w = (e, y, t)
    third[z] = x;
    third[x] = y;
    third[y] = z;
    Some([*m, m.relabel(&second), m.relabel(&third)])
}

/// All Jacobi generators, deduplicated.
pub fn jacobi_relations(classes: &[Matching]) -> RelationSet {
    let mut seen = BTreeSet::new();
    let mut generators = Vec::new();
    for m in classes {
        for p in 0..NH {
            let Some(terms) = jacobi_terms(m, p) else { continue };
            let mut r = DiagramVector::new();
            for t in terms {
                r.add(t, Q::one());
            }
            if seen.insert(r.0.clone().into_iter().collect::<Vec<_>>()) {
                generators.push(r);
            }
        }
    }
    RelationSet { generators }
}

/// The quotient of the diagram span by all relations, and the weight system.
#[derive(Clone, Debug)]
pub struct DiagramSpace {
    pub classes: Vec<Matching>,
    index: HashMap<Matching, usize>,
    pub antisymmetry: RelationSet,
    pub jacobi: RelationSet,
    pub rank: usize,
    pub dimension: usize,
    /// Surviving basis class (the drawn tetrahedron), when the quotient is
    /// one-dimensional.
    pub basis: Option<Matching>,
    /// `w` on each class, normalised by `w(drawn T1) = 1`.
    weights: Option<Vec<Q>>,
}

impl DiagramSpace {
    pub fn compute() -> Self {
        let classes = enumerate_diagrams();
        let antisymmetry = antisymmetry_relations(&classes);
        let jacobi = jacobi_relations(&classes);
        let mut space = Self {
            index: classes.iter().enumerate().map(|(i, m)| (*m, i)).collect(),
            classes,
            antisymmetry,
            jacobi,
            rank: 0,
            dimension: 0,
            basis: None,
            weights: None,
        };
        let rows: Vec<&DiagramVector> = space.relations().collect();
        let (rank, kernel) = space.eliminate(&rows);
        space.rank = rank;
        space.dimension = space.classes.len() - rank;
        let tetra = VertexOrientedDiagram::drawn(GraphName::T1).expect("T1 is drawn").key();
        if let [w] = &kernel[..] {
            let t = &w[space.index[&tetra]];
            if !t.is_zero() {
                space.weights = Some(w.iter().map(|x| x / t).collect());
                space.basis = Some(tetra);
            }
        }
        space
    }

    pub fn relations(&self) -> impl Iterator<Item = &DiagramVector> {
        self.antisymmetry.generators.iter().chain(&self.jacobi.generators)
    }

    /// Rank of the relation matrix and a basis of its right kernel.
    fn eliminate(&self, rows: &[&DiagramVector]) -> (usize, Vec<Vec<Q>>) {
        let m = self.relation_matrix(rows);
        let rank = linalg::rank(&m);
        (rank, linalg::null_space(&m, self.classes.len()))
    }

    pub fn relation_matrix(&self, rows: &[&DiagramVector]) -> Vec<Vec<Q>> {
        rows.iter()
            .map(|r| {
                let mut row = vec![Q::zero(); self.classes.len()];
                for (k, c) in r.terms() {
                    row[self.index[k]] += c;
                }
                row
            })
            .collect()
    }

    /// Quotient dimension when the relations are fed in the given order.
    pub fn dimension_with_order(&self, order: &[usize]) -> usize {
        let all: Vec<&DiagramVector> = self.relations().collect();
        let rows: Vec<&DiagramVector> = order.iter().map(|&i| all[i]).collect();
        self.classes.len() - self.eliminate(&rows).0
    }

    pub fn class_index(&self, key: &Matching) -> Option<usize> {
        self.index.get(&key.canonical()).copied()
    }

    pub fn weight_of_class(&self, key: &Matching) -> Result<Q> {
        let weights = self
            .weights
            .as_ref()
            .ok_or_else(|| Error::Internal("quotient is not one-dimensional; no weight system".into()))?;
        let i = self
            .class_index(key)
            .ok_or_else(|| Error::Domain("diagram is not a connected 4-vertex diagram".into()))?;
        Ok(weights[i].clone())
    }

    pub fn weight(&self, d: &VertexOrientedDiagram) -> Result<Q> {
        if !d.base.is_connected() {
            return Err(Error::Domain("diagram is not connected".into()));
        }
        self.weight_of_class(&d.matching())
    }

    pub fn weight_vector(&self, v: &DiagramVector) -> Result<Q> {
        v.terms().try_fold(Q::zero(), |acc, (k, c)| Ok(acc + c * self.weight_of_class(k)?))
    }

    /// Shape of the class's underlying graph, `None` for loop diagrams.
    pub fn shape(&self, key: &Matching) -> Option<Shape> {
        key.to_graph().0.shape()
    }

    /// The relation matrix as CSV: one header row of class ids, one row per
    /// generator, then a final `weight` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("relation,kind");
        for i in 0..self.classes.len() {
            s.push_str(&format!(",d{i}"));
        }
        s.push('\n');
        let rows: Vec<(&str, &DiagramVector)> = self
            .antisymmetry
            .generators
            .iter()
            .map(|g| ("AS", g))
            .chain(self.jacobi.generators.iter().map(|g| ("Jacobi", g)))
            .collect();
        let m = self.relation_matrix(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        for (i, ((kind, _), row)) in rows.iter().zip(&m).enumerate() {
            s.push_str(&format!("r{i},{kind}"));
            for c in row {
                s.push(',');
                s.push_str(&rational::to_string(c));
            }
            s.push('\n');
        }
        if let Some(w) = &self.weights {
            s.push_str("weight,w");
            for c in w {
                s.push(',');
                s.push_str(&rational::to_string(c));
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> WeightsSummary {
        let w = |name| {
            VertexOrientedDiagram::drawn(name)
                .and_then(|d| self.weight(&d))
                .map(|q| rational::to_string(&q))
                .unwrap_or_else(|e| e.to_string())
        };
        let classes = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, k)| ClassSummary {
                id: format!("d{i}"),
                slots: k.0.iter().map(|&x| x as usize).collect(),
                shape: self.shape(k),
                has_loop: k.has_loop(),
                weight: self.weights.as_ref().map(|ws| rational::to_string(&ws[i])),
            })
            .collect();
        WeightsSummary {
            tetra: w(GraphName::T1),
            double_theta: w(GraphName::W1),
            dim: self.dimension,
            class_count: self.classes.len(),
            antisymmetry_generators: self.antisymmetry.generators.len(),
            jacobi_generators: self.jacobi.generators.len(),
            rank: self.rank,
            basis: self.basis.map(|b| format!("d{}", self.index[&b])),
            classes,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub id: String,
    pub slots: Vec<usize>,
    pub shape: Option<Shape>,
    pub has_loop: bool,
    pub weight: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightsSummary {
    pub tetra: String,
    pub double_theta: String,
    pub dim: usize,
    pub class_count: usize,
    pub antisymmetry_generators: usize,
    pub jacobi_generators: usize,
    pub rank: usize,
    pub basis: Option<String>,
    pub classes: Vec<ClassSummary>,
}

/// The shared, lazily computed diagram space.
pub fn diagram_space() -> &'static DiagramSpace {
    static SPACE: OnceLock<DiagramSpace> = OnceLock::new();
    SPACE.get_or_init(DiagramSpace::compute)
}

/// Convenience: `w` of a named graph with its drawn orientation.
pub fn drawn_weight(name: GraphName) -> Result<Q> {
    diagram_space().weight(&VertexOrientedDiagram::drawn(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn one_dimensional_with_expected_weights() {
        let s = diagram_space();
        assert_eq!(s.dimension, 1);
        assert_eq!(drawn_weight(GraphName::T1).unwrap(), qi(1));
        assert_eq!(drawn_weight(GraphName::W1).unwrap(), qi(2));
    }

    #[test]
    fn weight_annihilates_generators() {
        let s = diagram_space();
        for r in s.relations() {
            assert_eq!(s.weight_vector(r).unwrap(), qi(0));
        }
    }
}
