use lambda2::graphs::*;
use lambda2::orient::*;
use proptest::prelude::*;

fn order(names: &str) -> HalfEdgeOrder {
    HalfEdgeOrder::new(names.split(',').map(|s| parse_half_edge(s.trim()).unwrap()).collect()).unwrap()
}

/// Each line must differ from the next by an even permutation; the
/// first is the vertex-induced order and the last is a reshuffle of whole
/// edge pairs.
fn check_reduction(name: GraphName, lines: &[&str]) {
    let g = canonical_graph(name);
    let vo = VertexOrientation::drawn(name).unwrap();
    let from_v = order_from_vertices(g.base(), &vo, &STANDARD_NUMBERING).unwrap();
    assert_eq!(from_v, order(lines[0]));
    for w in lines.windows(2) {
        assert_eq!(order(w[0]).sign_to(&order(w[1])), 1, "{} -> {}", w[0], w[1]);
    }
    let last = order(lines[lines.len() - 1]);
    let pairs: Vec<Edge> = last.as_slice().chunks(2).map(|c| edge_of(c[0])).collect();
    for (c, &e) in last.as_slice().chunks(2).zip(&pairs) {
        assert_eq!(c, [g.first(e), g.second(e)]);
    }
    let from_e = order_from_edges(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(last.sign_to(&from_e), 1);
    assert_eq!(orientation_sign(&g, &vo, &STANDARD_NUMBERING).unwrap(), 1);
}

#[test]
fn reduction_chain_t1() {
    check_reduction(
        GraphName::T1,
        &[
            "c1,b1,f1,a2,b2,e1,e2,c2,d1,d2,f2,a1",
            "d1,d2,e1,e2,c1,b1,b2,f1,a2,c2,f2,a1",
            "b1,b2,d1,d2,e1,e2,c1,f1,f2,a2,c2,a1",
            "b1,b2,d1,d2,e1,e2,f1,f2,c1,c2,a1,a2",
        ],
    );
}

#[test]
fn reduction_chain_w1() {
    check_reduction(
        GraphName::W1,
        &[
            "f1,b1,c1,e1,c2,b2,d2,f2,a1,a2,e2,d1",
            "a1,a2,f1,b1,c1,c2,b2,e1,d2,f2,e2,d1",
            "a1,a2,c1,c2,f1,b1,b2,e1,e2,d2,f2,d1",
            "a1,a2,b1,b2,c1,c2,e1,e2,f1,f2,d1,d2",
        ],
    );
}

#[test]
fn named_orders() {
    let t1 = canonical_graph(GraphName::T1);
    let e = order_from_edges(&t1, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(e.names().join(","), "a1,a2,b1,b2,c1,c2,d1,d2,e1,e2,f1,f2");
    let vo = VertexOrientation::drawn(GraphName::T1).unwrap();
    assert_eq!(orientation_sign(&t1, &vo.flip(0), &STANDARD_NUMBERING).unwrap(), -1);
    let r = orient_report(&canonical_graph(GraphName::W1), &VertexOrientation::drawn(GraphName::W1).unwrap(), &STANDARD_NUMBERING)
        .unwrap();
    assert_eq!(r.vertex_order.join(","), "f1,b1,c1,e1,c2,b2,d2,f2,a1,a2,e2,d1");
    assert_eq!(r.sign, 1);
}

#[test]
fn bad_numbering_is_rejected() {
    let g = canonical_graph(GraphName::T1);
    let vo = VertexOrientation::drawn(GraphName::T1).unwrap();
    assert!(orientation_sign(&g, &vo, &[1, 1, 3, 4]).is_err());
    assert!(order_from_edges(&g, &[0, 1, 2, 3, 4]).is_err());
}

#[derive(Debug, Clone)]
struct Case {
    graph: GraphName,
    vo: VertexOrientation,
    numbering: Numbering,
    flips: u8,
}

fn case() -> impl Strategy<Value = Case> {
    let names = prop::sample::select(vec![GraphName::T1, GraphName::T2, GraphName::W1, GraphName::W2, GraphName::TLess]);
    (names, prop::array::uniform4(0u8..6), 0usize..24, 0u8..64).prop_map(|(graph, twists, p, flips)| {
        // Each vertex gets one of its six linear orders: 3 rotations × 2 flips.
        // Reversals keep the underlying graph, so T1/W1 drawings serve all.
        let drawn = if graph.shape() == Shape::Tetrahedron { GraphName::T1 } else { GraphName::W1 };
        let mut vo = VertexOrientation::drawn(drawn).unwrap();
        for (v, &t) in twists.iter().enumerate() {
            if t >= 3 {
                vo = vo.flip(v);
            }
            for _ in 0..t % 3 {
                vo = vo.rotate(v);
            }
        }
        let pi = lambda2::perm::unrank(NV, p);
        let numbering = std::array::from_fn(|v| pi[v] as u8 + 1);
        Case { graph, vo, numbering, flips }
    })
}

fn sign(c: &Case) -> i8 {
    let g = canonical_graph(c.graph).reverse_mask(c.flips);
    orientation_sign(&g, &c.vo, &c.numbering).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn as_flip_negates(c in case(), v in 0usize..NV) {
        let flipped = Case { vo: c.vo.flip(v), ..c.clone() };
        prop_assert_eq!(sign(&flipped), -sign(&c));
    }

    #[test]
    fn edge_reversal_negates(c in case(), e in 0usize..NE) {
        let reversed = Case { flips: c.flips ^ (1 << e), ..c.clone() };
        prop_assert_eq!(sign(&reversed), -sign(&c));
    }

    #[test]
    fn vertex_transposition_negates(c in case(), a in 0usize..NV, b in 0usize..NV) {
        prop_assume!(a != b);
        let mut n = c.numbering;
        n.swap(a, b);
        let swapped = Case { numbering: n, ..c.clone() };
        prop_assert_eq!(sign(&swapped), -sign(&c));
    }

    #[test]
    fn cyclic_start_is_invisible(c in case(), v in 0usize..NV) {
        let rotated = Case { vo: c.vo.rotate(v), ..c.clone() };
        prop_assert_eq!(sign(&rotated), sign(&c));
    }

    #[test]
    fn edge_enumeration_order_is_invisible(c in case(), p in 0usize..720) {
        let g = canonical_graph(c.graph).reverse_mask(c.flips);
        let from_v = order_from_vertices(g.base(), &c.vo, &c.numbering).unwrap();
        let edge_order = lambda2::perm::unrank(NE, p);
        let from_e = order_from_edges(&g, &edge_order).unwrap();
        prop_assert_eq!(from_v.sign_to(&from_e), sign(&c));
    }
}
