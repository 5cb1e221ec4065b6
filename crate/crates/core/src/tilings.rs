//! Rectangular tilings of a rectangle, their associated edge-weighted
//! network, and tiling substitution of an edge.
//!
//! Each horizontal line covering some tile side becomes a vertex, each tile
//! an edge from its bottom line to its top line with weight width/height.
//! The tile heights form a canonical vector field that satisfies Kirchhoff's
//! laws with the bottom and top lines of the outer rectangle as poles.
//! All geometry is exact rational arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{divergence, is_conservative, VectorField};
use crate::graph::{VertexId, WeightedGraph};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::{Error, Result};

/// Axis-aligned rectangle with exact rational position and positive size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: Rat,
    pub y: Rat,
    pub w: Rat,
    pub h: Rat,
}

impl Rect {
    pub fn new(x: Rat, y: Rat, w: Rat, h: Rat) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> Rat {
        &self.x + &self.w
    }

    pub fn top(&self) -> Rat {
        &self.y + &self.h
    }

    pub fn area(&self) -> Rat {
        &self.w * &self.h
    }

    fn interiors_overlap(&self, other: &Rect) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.top()
            && other.y < self.top()
    }
}

/// A validated subdivision of an outer rectangle into tiles.
///
/// Validity is exact area bookkeeping: every tile lies inside the outer
/// rectangle, tile interiors are pairwise disjoint, and the tile areas sum
/// to the outer area. Together these force a gap-free cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    outer: Rect,
    tiles: Vec<Rect>,
}

impl Tiling {
    pub fn new(outer: Rect, tiles: Vec<Rect>) -> Result<Self> {
        for r in std::iter::once(&outer).chain(&tiles) {
            if !r.w.is_positive() || !r.h.is_positive() {
                return Err(Error::Tiling("rectangle with nonpositive size".into()));
            }
        }
        for r in &tiles {
            if r.x < outer.x || r.y < outer.y || r.right() > outer.right() || r.top() > outer.top()
            {
                return Err(Error::Tiling("tile outside the outer rectangle".into()));
            }
        }
        for (i, a) in tiles.iter().enumerate() {
            for b in &tiles[i + 1..] {
                if a.interiors_overlap(b) {
                    return Err(Error::Tiling("tile interiors overlap".into()));
                }
            }
        }
        let total: Rat = tiles.iter().map(Rect::area).sum();
        if total != outer.area() {
            return Err(Error::Tiling("tile areas do not sum to the outer area".into()));
        }
        Ok(Tiling { outer, tiles })
    }

    pub fn outer(&self) -> &Rect {
        &self.outer
    }

    pub fn tiles(&self) -> &[Rect] {
        &self.tiles
    }

    /// Width over height of the outer rectangle.
    pub fn aspect(&self) -> Rat {
        &self.outer.w / &self.outer.h
    }
}

/// The network of a tiling: one vertex per horizontal line (labelled by
/// rank in ascending y order, unit vertex weights), one edge per tile, the
/// tile-height vector field, and the two pole vertices.
#[derive(Clone, Debug)]
pub struct TilingNetwork {
    pub graph: WeightedGraph,
    pub field: VectorField,
    pub bottom_pole: VertexId,
    pub top_pole: VertexId,
    /// y-coordinates of the horizontal lines, ascending; index = vertex label.
    pub levels: Vec<Rat>,
}

/// Build the edge-weighted network and canonical vector field of a tiling.
///
/// Vertices are the horizontal lines through tile sides, labelled `0..L` in
/// ascending y order with vertex weight 1. Each tile becomes an edge from
/// its bottom line to its top line with weight `w/h`; the field assigns
/// every edge the height of its tile, oriented bottom to top. The returned
/// poles are the lines through the bottom and top sides of the outer
/// rectangle.
pub fn tiling_to_network(t: &Tiling) -> Result<TilingNetwork> {
    let mut lines: BTreeSet<Rat> = BTreeSet::new();
    for r in t.tiles() {
        lines.insert(r.y.clone());
        lines.insert(r.top());
    }
    let levels: Vec<Rat> = lines.into_iter().collect();
    let label_of = |y: &Rat| -> Result<i64> {
        levels
            .binary_search(y)
            .map(|i| i as i64)
            .map_err(|_| Error::Tiling("pole line missing from the tiling".into()))
    };
    let bottom = label_of(&t.outer().y)?;
    let top = label_of(&t.outer().top())?;

    let vertices: Vec<(VertexId, Rat)> = (0..levels.len() as i64)
        .map(|l| (VertexId::single(l), Rat::one()))
        .collect();
    let edges: Vec<(VertexId, VertexId, Rat)> = t
        .tiles()
        .iter()
        .map(|r| {
            Ok((
                VertexId::single(label_of(&r.y)?),
                VertexId::single(label_of(&r.top())?),
                &r.w / &r.h,
            ))
        })
        .collect::<Result<_>>()?;
    let graph = WeightedGraph::new(vertices, edges)?;

    // Tiles sharing a bottom and top line share their height, so the field
    // value of an edge is the level gap between its endpoints.
    let values: Vec<Rat> = graph
        .edges()
        .iter()
        .map(|e| {
            let lo = e.u.labels()[0] as usize;
            let hi = e.v.labels()[0] as usize;
            &levels[hi] - &levels[lo]
        })
        .collect();
    let field = VectorField::new(&graph, values)?;

    Ok(TilingNetwork {
        graph,
        field,
        bottom_pole: VertexId::single(bottom),
        top_pole: VertexId::single(top),
        levels,
    })
}

/// Kirchhoff's laws for a vector field with poles `a`, `b`: the divergence
/// vanishes off the poles and the field is conservative.
pub fn kirchhoff_check(
    g: &WeightedGraph,
    f: &VectorField,
    a: &VertexId,
    b: &VertexId,
) -> Result<bool> {
    g.vertex_index(a)?;
    g.vertex_index(b)?;
    let div = divergence(g, f)?;
    for (v, value) in div.values() {
        if v != a && v != b && !value.is_zero() {
            return Ok(false);
        }
    }
    is_conservative(g, f)
}

/// Replace a nonloop edge by the network of a tiling whose outer rectangle
/// has aspect ratio `w/h` equal to the edge weight.
///
/// The bottom pole is identified with the smaller endpoint of the edge and
/// the top pole with the larger one. Interior lines become fresh vertices
/// labelled consecutively above the largest label in the graph, in
/// ascending y order; their weights default to 1 and may be overridden
/// through `new_weights`, keyed by the fresh ids.
pub fn substitute_edge(
    g: &WeightedGraph,
    e: usize,
    t: &Tiling,
    new_weights: &BTreeMap<VertexId, Rat>,
) -> Result<WeightedGraph> {
    let rec = g.edge(e)?.clone();
    if rec.is_loop() {
        return Err(Error::Loops(format!("edge {e} is a loop")));
    }
    if rec.weight != t.aspect() {
        return Err(Error::AspectMismatch);
    }
    let network = tiling_to_network(t)?;
    let line_count = network.levels.len();
    let base = g
        .vertices()
        .iter()
        .flat_map(|(id, _)| id.labels().iter().copied())
        .max()
        .expect("graph with an edge has a vertex")
        + 1;

    // line label -> vertex id in the host graph
    let map_line = |l: i64| -> VertexId {
        if l == 0 {
            rec.u.clone()
        } else if l == line_count as i64 - 1 {
            rec.v.clone()
        } else {
            VertexId::single(base + l - 1)
        }
    };

    let fresh: Vec<VertexId> = (1..line_count as i64 - 1)
        .map(|l| VertexId::single(base + l - 1))
        .collect();
    for (id, w) in new_weights {
        if !fresh.contains(id) {
            return Err(Error::UnknownVertex(id.to_string()));
        }
        if !w.is_positive() {
            return Err(Error::Weights(format!(
                "interior vertex {id} assigned nonpositive weight"
            )));
        }
    }

    let mut vertices: Vec<(VertexId, Rat)> = g.vertices().to_vec();
    for id in &fresh {
        let w = new_weights.get(id).cloned().unwrap_or_else(Rat::one);
        vertices.push((id.clone(), w));
    }
    let mut edges: Vec<(VertexId, VertexId, Rat)> = g
        .edges()
        .iter()
        .filter(|r| r.id != e)
        .map(|r| (r.u.clone(), r.v.clone(), r.weight.clone()))
        .collect();
    for r in network.graph.edges() {
        edges.push((
            map_line(r.u.labels()[0]),
            map_line(r.v.labels()[0]),
            r.weight.clone(),
        ));
    }
    WeightedGraph::new(vertices, edges)
}

#[derive(Serialize, Deserialize)]
struct RectDto {
    x: String,
    y: String,
    w: String,
    h: String,
}

#[derive(Serialize, Deserialize)]
struct TilingDto {
    outer: RectDto,
    tiles: Vec<RectDto>,
}

fn rect_to_dto(r: &Rect) -> RectDto {
    RectDto {
        x: format_rat(&r.x),
        y: format_rat(&r.y),
        w: format_rat(&r.w),
        h: format_rat(&r.h),
    }
}

fn rect_from_dto(d: &RectDto) -> Result<Rect> {
    Ok(Rect::new(
        parse_rat(&d.x)?,
        parse_rat(&d.y)?,
        parse_rat(&d.w)?,
        parse_rat(&d.h)?,
    ))
}

pub fn parse_tiling(document: &str) -> Result<Tiling> {
    let dto: TilingDto =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let outer = rect_from_dto(&dto.outer)?;
    let tiles = dto.tiles.iter().map(rect_from_dto).collect::<Result<_>>()?;
    Tiling::new(outer, tiles)
}

pub fn serialize_tiling(t: &Tiling) -> String {
    let dto = TilingDto {
        outer: rect_to_dto(t.outer()),
        tiles: t.tiles().iter().map(rect_to_dto).collect(),
    };
    serde_json::to_string(&dto).expect("tiling serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LaplacianKind;
    use crate::rat::{int, rat};
    use crate::spectra::{eigenvalues, interlaces};

    fn r(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect::new(int(x), int(y), int(w), int(h))
    }

    fn vid(label: i64) -> VertexId {
        VertexId::single(label)
    }

    /// Height 3, width 6, five tiles; lines at y = 0, 2, 3.
    fn worked_example() -> Tiling {
        Tiling::new(
            r(0, 0, 6, 3),
            vec![
                r(0, 0, 1, 2),
                r(0, 2, 1, 1),
                r(1, 0, 2, 3),
                r(3, 0, 3, 2),
                r(3, 2, 3, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_tilings() {
        assert!(matches!(
            Tiling::new(r(0, 0, 2, 2), vec![r(0, 0, 2, 2), r(0, 0, 1, 1)]),
            Err(Error::Tiling(_))
        ));
        assert!(matches!(
            Tiling::new(r(0, 0, 2, 2), vec![r(0, 0, 1, 2)]),
            Err(Error::Tiling(_))
        ));
        assert!(matches!(
            Tiling::new(r(0, 0, 2, 2), vec![r(1, 1, 2, 2), r(0, 0, 1, 1), r(0, 1, 1, 1), r(1, 0, 1, 1)]),
            Err(Error::Tiling(_))
        ));
        assert!(matches!(
            Tiling::new(r(0, 0, 2, 0), vec![]),
            Err(Error::Tiling(_))
        ));
    }

    #[test]
    fn single_tile_gives_two_vertex_network() {
        let t = Tiling::new(r(0, 0, 5, 2), vec![r(0, 0, 5, 2)]).unwrap();
        let net = tiling_to_network(&t).unwrap();
        assert_eq!(net.graph.vertex_count(), 2);
        assert_eq!(net.graph.edge_count(), 1);
        assert_eq!(net.graph.edges()[0].weight, rat(5, 2));
        assert_eq!(net.field.coefficients(), &[int(2)]);
        assert_eq!(net.bottom_pole, vid(0));
        assert_eq!(net.top_pole, vid(1));
    }

    #[test]
    fn side_by_side_equal_tiles_give_parallel_pair() {
        let t = Tiling::new(r(0, 0, 2, 1), vec![r(0, 0, 1, 1), r(1, 0, 1, 1)]).unwrap();
        let net = tiling_to_network(&t).unwrap();
        assert_eq!(net.graph.vertex_count(), 2);
        assert_eq!(net.graph.edge_count(), 2);
        assert!(net
            .graph
            .edges()
            .iter()
            .all(|e| e.u == vid(0) && e.v == vid(1) && e.weight == int(1)));
    }

    #[test]
    fn worked_example_network() {
        let net = tiling_to_network(&worked_example()).unwrap();
        assert_eq!(net.levels, vec![int(0), int(2), int(3)]);
        assert_eq!(net.graph.vertex_count(), 3);
        let triples: Vec<(VertexId, VertexId, Rat)> = net
            .graph
            .edges()
            .iter()
            .map(|e| (e.u.clone(), e.v.clone(), e.weight.clone()))
            .collect();
        assert_eq!(
            triples,
            vec![
                (vid(0), vid(1), rat(1, 2)),
                (vid(0), vid(1), rat(3, 2)),
                (vid(0), vid(2), rat(2, 3)),
                (vid(1), vid(2), int(1)),
                (vid(1), vid(2), int(3)),
            ]
        );
        assert_eq!(
            net.field.coefficients(),
            &[int(2), int(2), int(3), int(1), int(1)]
        );
        assert_eq!(net.bottom_pole, vid(0));
        assert_eq!(net.top_pole, vid(2));
    }

    #[test]
    fn worked_example_satisfies_kirchhoff() {
        let net = tiling_to_network(&worked_example()).unwrap();
        assert!(kirchhoff_check(&net.graph, &net.field, &net.bottom_pole, &net.top_pole).unwrap());
        // Net flux: total outer width out of the bottom pole, into the top.
        let div = divergence(&net.graph, &net.field).unwrap();
        assert_eq!(div.value(&vid(0)).unwrap(), &int(-6));
        assert_eq!(div.value(&vid(1)).unwrap(), &int(0));
        assert_eq!(div.value(&vid(2)).unwrap(), &int(6));
    }

    #[test]
    fn zero_field_satisfies_kirchhoff_for_any_poles() {
        let net = tiling_to_network(&worked_example()).unwrap();
        let zero = VectorField::zero(&net.graph);
        for a in 0..3 {
            for b in 0..3 {
                assert!(kirchhoff_check(&net.graph, &zero, &vid(a), &vid(b)).unwrap());
            }
        }
    }

    #[test]
    fn perturbed_field_fails_kirchhoff() {
        let net = tiling_to_network(&worked_example()).unwrap();
        let mut values: Vec<Rat> = net.field.coefficients().to_vec();
        values[0] += int(1);
        let bent = VectorField::new(&net.graph, values).unwrap();
        assert!(!kirchhoff_check(&net.graph, &bent, &net.bottom_pole, &net.top_pole).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let t = worked_example();
        let parsed = parse_tiling(&serialize_tiling(&t)).unwrap();
        assert_eq!(parsed, t);
        assert!(matches!(parse_tiling("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn substitute_single_tile_is_identity() {
        let g = WeightedGraph::new(
            vec![(vid(0), int(2)), (vid(1), int(3))],
            vec![(vid(0), vid(1), rat(5, 2))],
        )
        .unwrap();
        let t = Tiling::new(r(0, 0, 5, 2), vec![r(0, 0, 5, 2)]).unwrap();
        let h = substitute_edge(&g, 0, &t, &BTreeMap::new()).unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn substitute_rejects_mismatched_aspect_and_loops() {
        let g = crate::fixtures::running_example();
        let t = Tiling::new(r(0, 0, 5, 2), vec![r(0, 0, 5, 2)]).unwrap();
        // Edge 1 has weight 1, the outer aspect is 5/2.
        assert!(matches!(
            substitute_edge(&g, 1, &t, &BTreeMap::new()),
            Err(Error::AspectMismatch)
        ));
        // Edge 0 is the loop.
        assert!(matches!(
            substitute_edge(&g, 0, &t, &BTreeMap::new()),
            Err(Error::Loops(_))
        ));
    }

    #[test]
    fn substitute_stacked_tiles_subdivides_edge() {
        let g = WeightedGraph::new(
            vec![(vid(0), int(1)), (vid(1), int(1))],
            vec![(vid(0), vid(1), int(2))],
        )
        .unwrap();
        let t = Tiling::new(
            Rect::new(int(0), int(0), int(2), int(1)),
            vec![
                Rect::new(int(0), int(0), int(2), rat(1, 2)),
                Rect::new(int(0), rat(1, 2), int(2), rat(1, 2)),
            ],
        )
        .unwrap();
        let weights: BTreeMap<VertexId, Rat> = [(vid(2), rat(5, 2))].into_iter().collect();
        let h = substitute_edge(&g, 0, &t, &weights).unwrap();
        assert_eq!(
            h.vertices(),
            &[(vid(0), int(1)), (vid(1), int(1)), (vid(2), rat(5, 2))]
        );
        let triples: Vec<(VertexId, VertexId, Rat)> = h
            .edges()
            .iter()
            .map(|e| (e.u.clone(), e.v.clone(), e.weight.clone()))
            .collect();
        assert_eq!(
            triples,
            vec![(vid(0), vid(2), int(4)), (vid(1), vid(2), int(4))]
        );

        let mu = eigenvalues(&h, LaplacianKind::Weighted).unwrap();
        let lambda = eigenvalues(&g, LaplacianKind::Weighted).unwrap();
        assert!(interlaces(&mu, &lambda, 1).unwrap());
    }

    #[test]
    fn substitute_worked_example_into_weight_two_edge() {
        let g = crate::fixtures::running_example();
        // Edge 2 joins vertices 0 and 1 with weight 2; outer aspect 6/3 = 2.
        let weights: BTreeMap<VertexId, Rat> = [(vid(4), rat(7, 3))].into_iter().collect();
        let h = substitute_edge(&g, 2, &worked_example(), &weights).unwrap();
        assert_eq!(h.vertex_count(), 5);
        assert_eq!(h.vertex_weight(&vid(4)).unwrap(), &rat(7, 3));
        assert_eq!(h.edge_count(), g.edge_count() - 1 + 5);

        let mu = eigenvalues(&h, LaplacianKind::Weighted).unwrap();
        let lambda = eigenvalues(&g, LaplacianKind::Weighted).unwrap();
        assert!(interlaces(&mu, &lambda, 1).unwrap());
    }

    #[test]
    fn substitute_rejects_bad_interior_weights() {
        let g = WeightedGraph::new(
            vec![(vid(0), int(1)), (vid(1), int(1))],
            vec![(vid(0), vid(1), int(2))],
        )
        .unwrap();
        let t = Tiling::new(
            Rect::new(int(0), int(0), int(2), int(1)),
            vec![
                Rect::new(int(0), int(0), int(2), rat(1, 2)),
                Rect::new(int(0), rat(1, 2), int(2), rat(1, 2)),
            ],
        )
        .unwrap();
        let stray: BTreeMap<VertexId, Rat> = [(vid(9), int(1))].into_iter().collect();
        assert!(matches!(
            substitute_edge(&g, 0, &t, &stray),
            Err(Error::UnknownVertex(_))
        ));
        let negative: BTreeMap<VertexId, Rat> = [(vid(2), int(-1))].into_iter().collect();
        assert!(matches!(
            substitute_edge(&g, 0, &t, &negative),
            Err(Error::Weights(_))
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Guillotine subdivision driven by a script of cut choices.
        fn guillotine(outer: Rect, script: &[(bool, u8)], depth: usize) -> Vec<Rect> {
            if depth >= script.len() {
                return vec![outer];
            }
            let (vertical, num) = script[depth];
            let f = rat(1 + (num % 3) as i64, 4);
            if vertical {
                let cut = &outer.w * &f;
                let left = Rect::new(
                    outer.x.clone(),
                    outer.y.clone(),
                    cut.clone(),
                    outer.h.clone(),
                );
                let right = Rect::new(
                    &outer.x + &cut,
                    outer.y.clone(),
                    &outer.w - &cut,
                    outer.h.clone(),
                );
                let mut out = guillotine(left, script, depth + 1);
                out.extend(guillotine(right, script, depth + 1));
                out
            } else {
                let cut = &outer.h * &f;
                let lower = Rect::new(
                    outer.x.clone(),
                    outer.y.clone(),
                    outer.w.clone(),
                    cut.clone(),
                );
                let upper = Rect::new(
                    outer.x.clone(),
                    &outer.y + &cut,
                    outer.w.clone(),
                    &outer.h - &cut,
                );
                let mut out = guillotine(lower, script, depth + 1);
                out.extend(guillotine(upper, script, depth + 1));
                out
            }
        }

        fn arb_tiling() -> impl Strategy<Value = Tiling> {
            (
                1i64..5,
                1i64..5,
                proptest::collection::vec((any::<bool>(), any::<u8>()), 0..4),
            )
                .prop_map(|(w, h, script)| {
                    let outer = Rect::new(int(0), int(0), int(w), int(h));
                    let tiles = guillotine(outer.clone(), &script, 0);
                    Tiling::new(outer, tiles).unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn network_always_satisfies_kirchhoff(t in arb_tiling()) {
                let net = tiling_to_network(&t).unwrap();
                prop_assert!(kirchhoff_check(
                    &net.graph,
                    &net.field,
                    &net.bottom_pole,
                    &net.top_pole
                )
                .unwrap());
            }

            #[test]
            fn substitution_interlaces(t in arb_tiling(), uw in 1i64..5) {
                let aspect = t.aspect();
                let g = WeightedGraph::new(
                    vec![(vid(0), int(uw)), (vid(1), int(2))],
                    vec![(vid(0), vid(1), aspect)],
                )
                .unwrap();
                let h = substitute_edge(&g, 0, &t, &BTreeMap::new()).unwrap();
                let k = h.vertex_count() - g.vertex_count();
                let mu = eigenvalues(&h, LaplacianKind::Weighted).unwrap();
                let lambda = eigenvalues(&g, LaplacianKind::Weighted).unwrap();
                prop_assert!(interlaces(&mu, &lambda, k).unwrap());
            }
        }
    }
}
