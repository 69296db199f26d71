use lambda2::graphs::*;
use lambda2::perm;
use proptest::prelude::*;

/// Automorphism count from vertex permutations alone: a vertex map that
/// preserves (directed) edge multiplicities extends to `Π m!` half-edge maps.
fn oracle_automorphisms(edges: &[(usize, usize)], directed: bool) -> usize {
    let mult = |u: usize, v: usize| {
        edges
            .iter()
            .filter(|&&(a, b)| (a, b) == (u, v) || (!directed && (a, b) == (v, u)))
            .count()
    };
    let fact = |m: usize| (1..=m).product::<usize>();
    let mut total = 0;
    for pi in perm::all_permutations(NV) {
        let ok = (0..NV).all(|u| (0..NV).all(|v| mult(u, v) == mult(pi[u], pi[v])));
        if ok {
            let mut ext = 1;
            for u in 0..NV {
                for v in 0..NV {
                    if directed || u < v {
                        ext *= fact(mult(u, v));
                    }
                }
            }
            total += ext;
        }
    }
    total
}

fn directed(g: &EdgeOrientedGraph) -> Vec<(usize, usize)> {
    (0..NE).map(|e| (g.tail(e), g.head(e))).collect()
}

#[test]
fn automorphism_counts_match_oracle() {
    for name in [GraphName::T1, GraphName::W1, GraphName::T2, GraphName::W2, GraphName::TLess] {
        let g = canonical_graph(name);
        let d = directed(&g);
        assert_eq!(g.base().automorphisms().len(), oracle_automorphisms(&d, false), "{name}");
        assert_eq!(g.automorphisms(true).len(), oracle_automorphisms(&d, true), "{name} oriented");
    }
    assert_eq!(canonical_graph(GraphName::T1).base().automorphisms().len(), 24);
    assert_eq!(canonical_graph(GraphName::W1).base().automorphisms().len(), 16);
    assert_eq!(canonical_graph(GraphName::T1).automorphisms(true).len(), 3);
    assert_eq!(canonical_graph(GraphName::W1).automorphisms(true).len(), 2);
}

#[test]
fn canonical_graphs_are_trivalent_and_connected() {
    for name in GraphName::FAMILY {
        let g = canonical_graph(name);
        assert!(g.base().is_connected());
        assert!(!g.base().has_loops());
        for v in 0..NV {
            assert_eq!(g.base().half_edges_at(v).len(), 3);
        }
    }
    let t1 = directed(&canonical_graph(GraphName::T1));
    for e in [(1, 2), (2, 3), (3, 1)] {
        assert!(t1.contains(&e), "T1 lacks the 2→3→4→2 cycle edge {e:?}");
    }
    let w1 = directed(&canonical_graph(GraphName::W1));
    assert_eq!(w1.iter().filter(|&&e| e == (0, 1)).count(), 2);
    assert!(w1.contains(&(2, 3)) && w1.contains(&(3, 2)));
    let t1 = canonical_graph(GraphName::T1);
    assert_eq!((0..NV).filter(|&v| t1.out_degree(v) == 3).collect::<Vec<_>>(), vec![0]);
}

#[test]
fn full_reversal_exchanges_families() {
    let id = Labeling::identity();
    for (a, b) in [(GraphName::T1, GraphName::T2), (GraphName::W1, GraphName::W2)] {
        let r = canonical_graph(a).reverse_all();
        assert!(labeled_isomorphic(&r, &id, &canonical_graph(b), &id).is_some());
        assert_eq!(r.reverse_all(), canonical_graph(a));
    }
    let t1 = canonical_graph(GraphName::T1);
    assert_eq!(t1.reverse_edges(&[]), t1);
    let tl = canonical_graph(GraphName::TLess);
    assert_eq!(t1.reverse_edges(&[0]), tl);
}

#[test]
fn labeled_isomorphism_witnesses() {
    let t1 = canonical_graph(GraphName::T1);
    let w1 = canonical_graph(GraphName::W1);
    let j = Labeling::new([3, 1, 6, 2, 5, 4]).unwrap();
    let w = labeled_isomorphic(&t1, &j, &t1, &j).unwrap();
    assert_eq!(w, HalfEdgePerm::identity());
    for sigma in t1.automorphisms(true) {
        let m = sigma.edge_map();
        let mut labels = [0; NE];
        for e in 0..NE {
            labels[m[e]] = j.label(e);
        }
        let j2 = Labeling::new(labels).unwrap();
        let w = labeled_isomorphic(&t1, &j, &t1, &j2).unwrap();
        assert_eq!(w.edge_map(), m);
    }
    assert!(labeled_isomorphic(&t1, &j, &w1, &j).is_none());
}

#[test]
fn d1_counts_follow_burnside() {
    // Non-identity orientation automorphisms move an edge, so they fix no
    // labeling and every orbit has full size.
    for (family, t, w) in [(Family::Direct, GraphName::T1, GraphName::W1), (Family::Reversed, GraphName::T2, GraphName::W2)] {
        let d1 = D1::new(family);
        let at = canonical_graph(t).automorphisms(true).len();
        let aw = canonical_graph(w).automorphisms(true).len();
        assert_eq!(d1.count(t), 720 / at);
        assert_eq!(d1.count(w), 720 / aw);
        assert_eq!(d1.len(), 600);
        assert!(d1.classes.iter().all(|c| c.size == canonical_graph(c.graph).automorphisms(true).len()));
        for c in &d1.classes {
            let g = canonical_graph(c.graph);
            assert_eq!(d1.class_of(&g, &c.labeling), Some(c.id));
        }
    }
}

#[test]
fn collapse_examples() {
    let t1 = canonical_graph(GraphName::T1);
    let j = Labeling::identity();
    let c = collapse_edge(&t1, &j, 4).unwrap();
    let mut v = c.valences();
    v.sort();
    assert_eq!(v, [3, 3, 4]);
    assert_eq!(c.edges.len(), 5);
    let w1 = canonical_graph(GraphName::W1);
    assert!(matches!(collapse_edge(&w1, &j, 1), Err(lambda2::Error::Precondition(_))));

    assert_eq!(edge_type(&t1, 1).unwrap(), EdgeType::TypeTwo);
    assert_eq!(edge_type(&t1, 3).unwrap(), EdgeType::TypeOne);
    assert_eq!(edge_type(&w1, 5).unwrap(), EdgeType::TypeTwo);
    assert_eq!(edge_type(&w1, 4).unwrap(), EdgeType::TypeOne);

    // The two edge types collapse to shapes with different out-degree at the
    // merged vertex.
    let out0 = |c: &CollapsedGraph| c.edges.iter().filter(|e| e.0 == 0).count();
    let one = collapse_edge(&t1, &j, 3).unwrap();
    let two = collapse_edge(&t1, &j, 1).unwrap();
    assert_ne!(out0(&one), out0(&two));
}

#[test]
fn collapse_fibers_partition_d1_l() {
    for family in [Family::Direct, Family::Reversed] {
        let d1 = D1::new(family);
        for l in 1..=NE as u8 {
            let members = d1.d1_l(l);
            let mut seen = vec![false; d1.len()];
            let mut fibers = 0;
            for &id in &members {
                let fiber = d1.collapse_fiber(id, l).unwrap();
                assert_eq!(fiber.len(), 3, "fiber of {id} over {l}");
                let shapes: Vec<Shape> = fiber.iter().map(|&k| d1.classes[k].graph.shape()).collect();
                assert_eq!(shapes.iter().filter(|&&s| s == Shape::Tetrahedron).count(), 2);
                for &k in &fiber {
                    assert_eq!(d1.collapse_fiber(k, l).unwrap(), fiber);
                }
                let keys: Vec<_> = fiber
                    .iter()
                    .map(|&k| {
                        let c = &d1.classes[k];
                        collapse_edge(&canonical_graph(c.graph), &c.labeling, c.labeling.edge_with_label(l)).unwrap().key()
                    })
                    .collect();
                assert!(keys.windows(2).all(|w| w[0] == w[1]));
                if !seen[id] {
                    fibers += 1;
                    for &k in &fiber {
                        assert!(!seen[k]);
                        seen[k] = true;
                    }
                }
            }
            assert_eq!(fibers * 3, members.len());
            let outside = d1.classes.iter().filter(|c| !d1.in_d1_l(c.id, l));
            for c in outside {
                assert!(d1.collapse_fiber(c.id, l).is_err());
            }
        }
    }
}

#[test]
fn json_round_trip() {
    for name in GraphName::FAMILY {
        let g = canonical_graph(name);
        let j = Labeling::new([2, 4, 6, 1, 3, 5]).unwrap();
        let json = GraphJson::from_graph(&g, &j);
        let (g2, j2) = json.to_graph().unwrap();
        assert!(labeled_isomorphic(&g, &j, &g2, &j2).is_some());
        let view = g.directed_edges();
        assert_eq!(EdgeOrientedGraph::from_view(&view).unwrap().directed_edges(), view);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn labeling_index_round_trips(i in 0usize..720) {
        let j = Labeling::from_index(i);
        prop_assert_eq!(j.index(), i);
    }

    #[test]
    fn reversal_is_an_involution(mask in 0u8..64, g in 0usize..4) {
        let g = canonical_graph(GraphName::FAMILY[g]);
        prop_assert_eq!(g.reverse_mask(mask).reverse_mask(mask), g.clone());
        let r: Vec<Edge> = (0..NE).filter(|e| mask >> e & 1 == 1).collect();
        prop_assert_eq!(g.reverse_edges(&r), g.reverse_mask(mask));
    }

    #[test]
    fn relabel_then_collapse_commutes(i in 0usize..720, e in 0usize..NE) {
        // Renaming labels by a permutation renames the collapsed labels too.
        let t1 = canonical_graph(GraphName::T1);
        let j = Labeling::from_index(i);
        let sigma = Labeling::from_index((i * 7 + 11) % 720);
        let relabeled = Labeling::new(j.labels().map(|l| sigma.label(l as usize - 1))).unwrap();
        let a = collapse_edge(&t1, &j, e).unwrap();
        let b = collapse_edge(&t1, &relabeled, e).unwrap();
        let mut renamed: Vec<_> = a.edges.iter().map(|&(t, h, l)| (t, h, sigma.label(l as usize - 1))).collect();
        renamed.sort_by_key(|x| x.2);
        prop_assert_eq!(renamed, b.edges);
    }
}
