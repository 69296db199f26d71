use lambda2::diagrams::*;
use lambda2::graphs::*;
use lambda2::linalg;
use lambda2::rational::{qi, Q};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_matchings() -> Vec<[usize; NH]> {
    fn rec(p: [usize; NH], used: u16, out: &mut Vec<[usize; NH]>) {
        let Some(a) = (0..NH).find(|&i| used >> i & 1 == 0) else {
            out.push(p);
            return;
        };
        for b in a + 1..NH {
            if used >> b & 1 == 0 {
                let mut q = p;
                q[a] = b;
                q[b] = a;
                rec(q, used | 1 << a | 1 << b, out);
            }
        }
    }
    let mut out = Vec::new();
    rec([0; NH], 0, &mut out);
    out
}

fn connected(p: &[usize; NH]) -> bool {
    let mut comp: [usize; NV] = [0, 1, 2, 3];
    fn find(c: &mut [usize; NV], x: usize) -> usize {
        if c[x] == x { x } else { let r = find(c, c[x]); c[x] = r; r }
    }
    for s in 0..NH {
        let (a, b) = (find(&mut comp, s / 3), find(&mut comp, p[s] / 3));
        comp[a] = b;
    }
    (0..NV).all(|v| find(&mut comp, v) == find(&mut comp, 0))
}

/// Orbit count of connected slot matchings under vertex permutations and
/// per-vertex rotations, by Burnside's lemma.
fn burnside_class_count() -> usize {
    let matchings: Vec<_> = all_matchings().into_iter().filter(connected).collect();
    let mut group = Vec::new();
    for pi in lambda2::perm::all_permutations(NV) {
        for r in 0..81 {
            let rot = [r % 3, r / 3 % 3, r / 9 % 3, r / 27];
            let g: [usize; NH] = std::array::from_fn(|s| 3 * pi[s / 3] + (s % 3 + rot[s / 3]) % 3);
            group.push(g);
        }
    }
    let fixed: usize = group
        .iter()
        .map(|g| matchings.iter().filter(|m| (0..NH).all(|s| m[g[s]] == g[m[s]])).count())
        .sum();
    assert_eq!(fixed % group.len(), 0);
    fixed / group.len()
}

#[test]
fn class_count_matches_burnside() {
    let n = burnside_class_count();
    assert_eq!(enumerate_diagrams().len(), n);
    assert_eq!(n, 11);
    let mut order: Vec<usize> = (0..NH).collect();
    order.reverse();
    assert_eq!(enumerate_diagrams_with_order(&order), enumerate_diagrams());
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    assert_eq!(enumerate_diagrams_with_order(&order), enumerate_diagrams());
}

#[test]
fn loop_free_classes_have_the_two_shapes() {
    let s = diagram_space();
    let shapes: std::collections::BTreeSet<_> = s.classes.iter().filter(|m| !m.has_loop()).filter_map(|m| s.shape(m)).collect();
    assert_eq!(shapes.into_iter().collect::<Vec<_>>(), vec![Shape::Tetrahedron, Shape::DoubleTheta]);
    for m in &s.classes {
        assert_eq!(m.canonical(), *m);
    }
}

#[test]
fn quotient_is_one_dimensional() {
    let s = diagram_space();
    assert_eq!(s.dimension, 1);
    assert_eq!(s.basis, Some(VertexOrientedDiagram::drawn(GraphName::T1).unwrap().key()));
    let n = s.antisymmetry.generators.len() + s.jacobi.generators.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        order.shuffle(&mut rng);
        assert_eq!(s.dimension_with_order(&order), 1);
    }
    // A redundant relation leaves the rank alone.
    let mut rows: Vec<&DiagramVector> = s.relations().collect();
    rows.push(rows[0]);
    rows.push(rows[n - 1]);
    assert_eq!(linalg::rank(&s.relation_matrix(&rows)), s.rank);
}

#[test]
fn generators_are_sums_of_unit_terms() {
    // Terms may fall into the same class, so a three-term Jacobi generator
    // can read `[a] + 2[b]` or even `3[a]`.
    let s = diagram_space();
    let integral = |g: &DiagramVector| g.terms().all(|(_, c)| c.is_integer() && c > &Q::zero());
    for g in &s.jacobi.generators {
        assert_eq!(g.coefficient_sum(), qi(3));
        assert!(integral(g));
    }
    assert!(s.jacobi.generators.iter().any(|g| g.terms().count() == 3 && g.terms().all(|(_, c)| c.is_one())));
    for g in &s.antisymmetry.generators {
        assert_eq!(g.coefficient_sum(), qi(2));
        assert!(integral(g));
        let terms: Vec<_> = g.terms().collect();
        if terms.len() == 1 {
            assert!(terms[0].0.has_loop());
        }
    }
}

#[test]
fn weight_values() {
    let s = diagram_space();
    assert_eq!(drawn_weight(GraphName::T1).unwrap(), qi(1));
    assert_eq!(drawn_weight(GraphName::W1).unwrap(), qi(2));
    for r in s.relations() {
        assert!(s.weight_vector(r).unwrap().is_zero());
    }
    for m in &s.classes {
        let w = s.weight_of_class(m).unwrap();
        if m.has_loop() {
            assert!(w.is_zero());
        }
        for v in 0..NV {
            assert_eq!(s.weight_of_class(&m.flip(v)).unwrap(), -w.clone());
        }
    }
}

fn diag(ends: [usize; NH], cycles: [[usize; 3]; NV]) -> VertexOrientedDiagram {
    let g = TrivalentGraph::new(ends).unwrap();
    let vo = VertexOrientation::new(&g, cycles).unwrap();
    VertexOrientedDiagram::new(g, vo).unwrap()
}

#[test]
fn ihx_triple_weights() {
    let s = diagram_space();
    let theta = diag([0, 3, 3, 2, 2, 3, 0, 1, 0, 1, 1, 2], [[0, 8, 6], [7, 9, 10], [11, 3, 4], [5, 2, 1]]);
    let t2 = diag([0, 2, 1, 2, 0, 1, 0, 3, 3, 1, 2, 3], [[0, 6, 4], [5, 9, 2], [3, 1, 10], [8, 7, 11]]);
    let t3 = diag([0, 2, 1, 2, 0, 3, 3, 1, 0, 1, 2, 3], [[0, 8, 4], [7, 9, 2], [3, 1, 10], [5, 11, 6]]);
    assert_eq!(theta.base.shape(), Some(Shape::DoubleTheta));
    assert_eq!(t2.base.shape(), Some(Shape::Tetrahedron));
    assert_eq!(t3.base.shape(), Some(Shape::Tetrahedron));
    let w: Vec<Q> = [&theta, &t2, &t3].iter().map(|d| s.weight(d).unwrap()).collect();
    assert_eq!(w, vec![qi(2), qi(-1), qi(-1)]);
    let mut v = DiagramVector::new();
    for d in [&theta, &t2, &t3] {
        v.add(d.key(), Q::one());
    }
    assert!(s.jacobi.generators.contains(&v));
    assert!(s.weight_vector(&v).unwrap().is_zero());
}

#[test]
fn disconnected_diagrams_are_rejected() {
    // Two theta graphs side by side.
    let g = TrivalentGraph::new([0, 1, 0, 1, 0, 1, 2, 3, 2, 3, 2, 3]).unwrap();
    let vo = VertexOrientation::ascending(&g);
    let d = VertexOrientedDiagram { base: g, vo };
    assert!(matches!(diagram_space().weight(&d), Err(lambda2::Error::Domain(_))));
}
