//! x-crossing detection and kite-edge augmentation.

use serde::Serialize;

use crate::error::GraphError;
use crate::graph::{Edge, EdgeEnd, EdgeId, OnePlaneGraph, VertexId};
use crate::planar::Planarization;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KiteRecord {
    pub crossing: usize,
    pub kite: EdgeId,
    pub ends: (VertexId, VertexId),
    pub inserted: bool,
}

/// Indices into `g.crossings` of the crossings whose four endpoints span no
/// edge besides the two crossing edges.
pub fn detect_x_crossings(g: &OnePlaneGraph) -> Result<Vec<usize>, GraphError> {
    let p = Planarization::new(g)?;
    Ok(x_crossings(&p))
}

pub fn x_crossings(p: &Planarization) -> Vec<usize> {
    (0..p.crossings().len())
        .filter(|&c| {
            p.crossing(c)
                .consecutive_pairs()
                .iter()
                .all(|&(a, b)| !p.gadj(a).iter().any(|&(y, _)| y == b))
        })
        .collect()
}

/// Designates or inserts a kite edge for every non-x crossing. With `strict`
/// an x-crossing is an error; otherwise x-crossings are skipped.
pub fn augment_kites(g: &OnePlaneGraph, strict: bool) -> Result<(OnePlaneGraph, Vec<KiteRecord>), GraphError> {
    let mut out = g.clone();
    let p = Planarization::new(g)?;
    let xs = x_crossings(&p);
    if strict {
        if let Some(&c) = xs.first() {
            let [a, b] = g.crossings[c];
            return Err(GraphError::XCrossing(a, b));
        }
    }
    let mut records = Vec::new();
    let mut next_id = g.max_edge_id().map_or(0, |m| m + 1);
    let crossed = g.crossed_edges();
    for (c, &[ea, eb]) in g.crossings.iter().enumerate() {
        if xs.contains(&c) {
            continue;
        }
        let a = *out.edge(ea).unwrap();
        let b = *out.edge(eb).unwrap();
        // (p, q) with q following p in the dummy's rotation [a.u, b.u, a.v, b.v]
        let pairs = [(a.u, b.u), (b.u, a.v), (a.v, b.v), (b.v, a.u)];
        let kite = out
            .edges
            .iter()
            .filter(|e| !crossed.contains(&e.id))
            .filter_map(|e| {
                let &(pp, qq) = pairs.iter().find(|&&(pp, qq)| e.joins(pp, qq))?;
                let ok = match &out.rotation {
                    None => true,
                    Some(_) => faces_dummy(&out, e, pp, qq, &a, &b),
                };
                ok.then_some(e.id)
            })
            .min();
        if let Some(k) = kite {
            let e = out.edge(k).unwrap();
            records.push(KiteRecord { crossing: c, kite: k, ends: (e.u, e.v), inserted: false });
            continue;
        }
        let template = out
            .edges
            .iter()
            .filter(|e| pairs.iter().any(|&(pp, qq)| e.joins(pp, qq)))
            .min_by_key(|e| e.id)
            .copied()
            .expect("non-x crossing has a consecutive edge");
        let (pp, qq) = *pairs.iter().find(|&&(pp, qq)| template.joins(pp, qq)).unwrap();
        let new = Edge::new(next_id, template.u, template.v);
        next_id += 1;
        out.edges.push(new);
        if let Some(rot) = out.rotation.as_mut() {
            // kite end right after the crossing end at q, right before it at p
            let cross_at = |v: VertexId| if a.has(v) { a } else { b };
            let (cp, cq) = (cross_at(pp), cross_at(qq));
            let ring = rot.get_mut(&qq).unwrap();
            let i = ring.iter().position(|x| *x == EdgeEnd::new(cq.id, cq.end_at(qq).unwrap())).unwrap();
            ring.insert(i + 1, EdgeEnd::new(new.id, new.end_at(qq).unwrap()));
            let ring = rot.get_mut(&pp).unwrap();
            let i = ring.iter().position(|x| *x == EdgeEnd::new(cp.id, cp.end_at(pp).unwrap())).unwrap();
            ring.insert(i, EdgeEnd::new(new.id, new.end_at(pp).unwrap()));
        }
        records.push(KiteRecord { crossing: c, kite: new.id, ends: (new.u, new.v), inserted: true });
    }
    Ok((out, records))
}

/// Whether `e` sits between the crossing half-edges so that p, dummy, q bound a face.
fn faces_dummy(g: &OnePlaneGraph, e: &Edge, p: VertexId, q: VertexId, a: &Edge, b: &Edge) -> bool {
    let rot = g.rotation.as_ref().unwrap();
    let cross_at = |v: VertexId| if a.has(v) { a } else { b };
    let at = |v: VertexId, offset: isize| -> Option<EdgeEnd> {
        let ring = rot.get(&v)?;
        let c = cross_at(v);
        let i = ring.iter().position(|x| *x == EdgeEnd::new(c.id, c.end_at(v).unwrap()))?;
        let n = ring.len() as isize;
        Some(ring[((i as isize + offset).rem_euclid(n)) as usize])
    };
    at(q, 1) == Some(EdgeEnd::new(e.id, e.end_at(q).unwrap()))
        && at(p, -1) == Some(EdgeEnd::new(e.id, e.end_at(p).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate;

    fn bare() -> OnePlaneGraph {
        let mut g = OnePlaneGraph::from_pairs(1..=4, &[(1, 3), (2, 4)]);
        g.crossings.push([0, 1]);
        g
    }

    #[test]
    fn bare_crossing_detected() {
        assert_eq!(detect_x_crossings(&bare()).unwrap(), vec![0]);
        assert!(matches!(augment_kites(&bare(), true), Err(GraphError::XCrossing(0, 1))));
        let (g, recs) = augment_kites(&bare(), false).unwrap();
        assert!(recs.is_empty());
        assert_eq!(g, bare());
    }

    #[test]
    fn crossed_consecutive_edge_gets_copy() {
        let mut g = bare();
        // (1,2) is consecutive for crossing 0 but is itself crossed by (5,6)
        g.vertices.extend([5, 6]);
        g.edges.push(Edge::new(2, 1, 2));
        g.edges.push(Edge::new(3, 5, 6));
        g.crossings.push([2, 3]);
        g.edges.push(Edge::new(4, 5, 1));
        let (out, recs) = augment_kites(&g, true).unwrap();
        assert!(validate(&out).is_empty());
        assert_eq!(recs[0], KiteRecord { crossing: 0, kite: 5, ends: (1, 2), inserted: true });
        assert!(!out.crossed_edges().contains(&5));
        // crossing 1 = {(1,2),(5,6)} has the uncrossed (5,1)
        assert_eq!(recs[1], KiteRecord { crossing: 1, kite: 4, ends: (5, 1), inserted: false });
    }
}
