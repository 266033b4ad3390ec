use std::collections::BTreeSet;

use proptest::prelude::*;

use copshield_core::corpus;
use copshield_core::territory::{
    boundary_no_x, check_no_x, cop_territory, extend_with_boundary, robber_territory, territory_of_nodes,
};
use copshield_core::{augment_kites, detect_x_crossings, Node, OnePlaneGraph, Planarization};

fn ids(p: &Planarization, edges: impl IntoIterator<Item = usize>) -> BTreeSet<u32> {
    edges.into_iter().map(|e| p.edge(e).id).collect()
}

/// FIG2 with H = (a, c, z, b), z the crossing of (a,b) and (c,d).
fn fig2_h() -> (Planarization, BTreeSet<Node>) {
    let p = Planarization::new(&corpus::named("FIG2").unwrap()).unwrap();
    let v = |l| p.vertex(l).unwrap();
    let h: BTreeSet<Node> = [v(1), v(3), p.dummy(0), v(2)].into();
    (p, h)
}

#[test]
fn fig2_cop_territory() {
    let (p, h) = fig2_h();
    let c = ids(&p, cop_territory(&p, &h));
    // caption: (a,b), (c,d), (f,a), (f,c), e1, e2
    let caption: BTreeSet<u32> = [0, 1, 5, 7, 9, 10].into();
    assert!(caption.is_subset(&c));
    // the original (a,c) is incident to two guarded vertices and is in C(H) too
    let extra: Vec<u32> = c.difference(&caption).copied().collect();
    assert_eq!(extra, vec![2]);
}

#[test]
fn fig2_robber_territory() {
    let (p, h) = fig2_h();
    let view = territory_of_nodes(&p, &h, p.vertex(6).unwrap()).unwrap();
    let edges: BTreeSet<(u32, u32)> = view
        .edges(&p)
        .into_iter()
        .map(|e| {
            let (a, b) = (p.label(p.edge(e).u), p.label(p.edge(e).v));
            (a.min(b), a.max(b))
        })
        .collect();
    // (g,e), (g,f), (g,h), (e,d)
    assert_eq!(edges, [(5, 7), (6, 7), (7, 8), (4, 5)].into());
    assert!(check_no_x(&p, &view));
}

#[test]
fn empty_h() {
    let p = Planarization::new(&corpus::named("FIG2").unwrap()).unwrap();
    assert!(cop_territory(&p, &BTreeSet::new()).is_empty());
    let view = territory_of_nodes(&p, &BTreeSet::new(), 3).unwrap();
    assert_eq!(view.vertices().len(), p.n_g());
}

#[test]
fn k4x_dummy_territory() {
    let p = Planarization::new(&corpus::named("K4X").unwrap()).unwrap();
    let h: BTreeSet<Node> = [p.dummy(0)].into();
    assert_eq!(ids(&p, cop_territory(&p, &h)), [4, 5].into());
    let view = territory_of_nodes(&p, &h, 0).unwrap();
    assert!(check_no_x(&p, &view));
    // every endpoint of the crossing is in the component, so all four half-edges
    let frag = extend_with_boundary(&p, &view, p.dummy(0));
    assert_eq!(frag.vertices.len(), 5);
    assert_eq!(frag.edges.len(), 4 + 4);
    assert!(detect_x_crossings(&frag).unwrap().is_empty());
}

fn fig3() -> (Planarization, BTreeSet<Node>) {
    let g = corpus::named("FIG3").unwrap();
    let p = Planarization::new(&g).unwrap();
    // the drawn path u-v-w, with the dummy where (u,c) crosses (v,w)
    let h = p.restrict_ids(&[], &[0, 1]).unwrap();
    (p, h.nodes)
}

#[test]
fn fig3_boundary_sets() {
    let (p, h) = fig3();
    let view = territory_of_nodes(&p, &h, p.vertex(4).unwrap()).unwrap();
    let s = |l: u32| ids(&p, view.boundary_of(p.vertex(l).unwrap()).iter().copied());
    // u=1 v=2 w=3 a=4 b=5 c=6 d=7 e=8
    assert_eq!(s(1), [3, 4].into()); // (u,a), (u,b), not (u,c)
    assert_eq!(s(2), [5].into()); // (v,c)
    assert_eq!(s(3), [6, 7].into()); // (w,d), (w,e)
}

#[test]
fn fig3_extend_with_u() {
    let (p, h) = fig3();
    let view = territory_of_nodes(&p, &h, p.vertex(4).unwrap()).unwrap();
    let u = p.vertex(1).unwrap();
    let frag = extend_with_boundary(&p, &view, u);
    let mut expected: BTreeSet<u32> = ids(&p, view.edges(&p));
    expected.extend([3, 4]);
    let got: BTreeSet<u32> = frag.edges.iter().map(|e| e.id).collect();
    assert_eq!(got, expected);
    assert!(frag.vertices.contains(&1));
    assert!(detect_x_crossings(&frag).unwrap().is_empty());
    // a node without boundary leaves R unchanged
    let lonely = h.iter().copied().find(|&n| !view.adjacent(n));
    if let Some(n) = lonely {
        let frag = extend_with_boundary(&p, &view, n);
        assert_eq!(frag.edges.len(), view.edges(&p).len());
    }
}

#[test]
fn robber_on_guarded_vertex_rejected() {
    let (p, h) = fig3();
    assert!(territory_of_nodes(&p, &h, p.vertex(1).unwrap()).is_err());
    let sub = p.restrict_ids(&[], &[0]).unwrap();
    assert!(robber_territory(&p, &sub, p.vertex(2).unwrap()).is_err());
}

#[test]
fn bare_crossing_territory_has_x() {
    // crossing (1,3)x(2,4) joined only through 5: no consecutive edge
    let mut g = OnePlaneGraph::from_pairs(1..=5, &[(1, 3), (2, 4), (1, 5), (5, 2)]);
    g.crossings.push([0, 1]);
    let p = Planarization::new(&g).unwrap();
    let view = territory_of_nodes(&p, &BTreeSet::new(), 0).unwrap();
    assert!(!check_no_x(&p, &view));
}

fn augmented(seed: u64, n: usize) -> Planarization {
    let g = corpus::random_in_ghat(n, seed).unwrap();
    Planarization::new(&augment_kites(&g, true).unwrap().0).unwrap()
}

fn subset(p: &Planarization, mask: u64) -> BTreeSet<Node> {
    (0..p.node_count()).filter(|&n| mask >> (n % 64) & 1 == 1 && (n * 7 + 3) % 3 != 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cop_territory_is_monotone(seed in 0u64..5_000, n in 4usize..20, m1: u64, m2: u64) {
        let p = augmented(seed, n);
        let small = subset(&p, m1 & m2);
        let big = subset(&p, m1);
        prop_assert!(small.is_subset(&big));
        prop_assert!(cop_territory(&p, &small).is_subset(&cop_territory(&p, &big)));
    }

    #[test]
    fn observations_hold_on_augmented_inputs(seed in 0u64..5_000, n in 4usize..20, mask: u64, r in 0usize..64) {
        let p = augmented(seed, n);
        let h = subset(&p, mask);
        let Some(robber) = (0..p.n_g()).map(|i| (i + r) % p.n_g()).find(|v| !h.contains(v)) else { return Ok(()) };
        let view = territory_of_nodes(&p, &h, robber).unwrap();
        prop_assert!(check_no_x(&p, &view));
        for &w in &h {
            prop_assert!(boundary_no_x(&p, &view, w));
            let frag = extend_with_boundary(&p, &view, w);
            prop_assert!(detect_x_crossings(&frag).unwrap().is_empty());
            if !p.is_dummy(w) {
                for &e in view.boundary_of(w) {
                    let ed = p.edge(e);
                    // never an edge between two vertices of H
                    prop_assert!(!(h.contains(&ed.u) && h.contains(&ed.v)));
                    prop_assert!(view.contains(ed.other(w)));
                }
            }
        }
    }
}
