//! Deterministic seeded generators for randomised verification suites.
//!
//! Every generator is driven by an explicit [`SplitMix64`] stream so a run
//! is reproducible from its seed alone, across platforms and thread
//! schedules. Suites derive one independent stream per item with
//! [`item_rng`].

use std::collections::BTreeSet;

use crate::graph::{VertexId, VertexPartition, WeightedGraph};
use crate::rat::{int, rat, Rat};
use crate::tilings::{Rect, Tiling};

/// SplitMix64 generator. Small state, full 64-bit output, equidistributed;
/// plenty for test-case generation.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n`. The modulo bias is negligible for the
    /// small ranges used here.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        self.next_u64() % n
    }

    /// True with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Independent stream for item `index` of a suite run under `seed`.
pub fn item_rng(seed: u64, index: u64) -> SplitMix64 {
    let mixed = SplitMix64::new(seed ^ index.wrapping_mul(0xA24B_AED4_963E_E407)).next_u64();
    SplitMix64::new(mixed)
}

/// Weight menu shared by all generators: small exact rationals exercising
/// integer, sub-unit, and non-dyadic cases.
pub fn weight_menu() -> Vec<Rat> {
    vec![int(1), rat(1, 2), int(2), int(3), rat(5, 3), int(7)]
}

fn menu_vertices(rng: &mut SplitMix64, n: usize) -> Vec<(VertexId, Rat)> {
    let menu = weight_menu();
    (0..n)
        .map(|i| (VertexId::single(i as i64), rng.pick(&menu).clone()))
        .collect()
}

fn random_endpoints(
    rng: &mut SplitMix64,
    n: usize,
    existing: &[(usize, usize)],
    allow_loops: bool,
) -> (usize, usize) {
    if allow_loops && rng.chance(1, 10) {
        let v = rng.below(n as u64) as usize;
        return (v, v);
    }
    let nonloops: Vec<&(usize, usize)> = existing.iter().filter(|(u, v)| u != v).collect();
    if !nonloops.is_empty() && rng.chance(1, 5) {
        return **rng.pick(&nonloops);
    }
    let u = rng.below(n as u64) as usize;
    let mut v = rng.below(n as u64 - 1) as usize;
    if v >= u {
        v += 1;
    }
    (u.min(v), u.max(v))
}

fn finish_graph(
    rng: &mut SplitMix64,
    vertices: Vec<(VertexId, Rat)>,
    pairs: &[(usize, usize)],
) -> WeightedGraph {
    let menu = weight_menu();
    let edges: Vec<(VertexId, VertexId, Rat)> = pairs
        .iter()
        .map(|&(u, v)| {
            (
                VertexId::single(u as i64),
                VertexId::single(v as i64),
                rng.pick(&menu).clone(),
            )
        })
        .collect();
    WeightedGraph::new(vertices, edges).expect("generated graphs are well formed")
}

/// Random multigraph: 2 to 8 vertices, at most 16 edges, loops with
/// probability 1/10 and deliberate parallels with probability 1/5.
pub fn random_graph(rng: &mut SplitMix64) -> WeightedGraph {
    random_graph_impl(rng, true)
}

/// Like [`random_graph`] but never generates loops.
pub fn random_loopless_graph(rng: &mut SplitMix64) -> WeightedGraph {
    random_graph_impl(rng, false)
}

fn random_graph_impl(rng: &mut SplitMix64, allow_loops: bool) -> WeightedGraph {
    let n = 2 + rng.below(7) as usize;
    let vertices = menu_vertices(rng, n);
    let m = rng.below(17) as usize;
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let e = random_endpoints(rng, n, &pairs, allow_loops);
        pairs.push(e);
    }
    finish_graph(rng, vertices, &pairs)
}

/// Random connected multigraph on 2 to `max_n` vertices: a random spanning
/// tree plus up to 6 extra edges drawn like [`random_graph`].
pub fn random_connected_graph(rng: &mut SplitMix64, max_n: usize) -> WeightedGraph {
    random_connected_impl(rng, max_n, true)
}

/// Like [`random_connected_graph`] but never generates loops.
pub fn random_connected_loopless_graph(rng: &mut SplitMix64, max_n: usize) -> WeightedGraph {
    random_connected_impl(rng, max_n, false)
}

fn random_connected_impl(rng: &mut SplitMix64, max_n: usize, allow_loops: bool) -> WeightedGraph {
    assert!(max_n >= 2);
    let n = 2 + rng.below(max_n as u64 - 1) as usize;
    let vertices = menu_vertices(rng, n);
    let mut pairs: Vec<(usize, usize)> = (1..n)
        .map(|i| {
            let parent = rng.below(i as u64) as usize;
            (parent, i)
        })
        .collect();
    for _ in 0..rng.below(7) {
        let e = random_endpoints(rng, n, &pairs, allow_loops);
        pairs.push(e);
    }
    finish_graph(rng, vertices, &pairs)
}

/// Random forest with unit edge weights and integer vertex weights in
/// 1..=4; each vertex after the first attaches to an earlier one with
/// probability 3/4.
pub fn random_forest(rng: &mut SplitMix64, max_n: usize) -> WeightedGraph {
    assert!(max_n >= 1);
    let n = 1 + rng.below(max_n as u64) as usize;
    let vertices: Vec<(VertexId, Rat)> = (0..n)
        .map(|i| (VertexId::single(i as i64), int(1 + rng.below(4) as i64)))
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        if rng.chance(3, 4) {
            let parent = rng.below(i as u64) as usize;
            edges.push((
                VertexId::single(parent as i64),
                VertexId::single(i as i64),
                int(1),
            ));
        }
    }
    WeightedGraph::new(vertices, edges).expect("generated forests are well formed")
}

/// Random partition of the vertex set into nonempty blocks.
pub fn random_partition(rng: &mut SplitMix64, g: &WeightedGraph) -> VertexPartition {
    let n = g.vertex_count();
    let k = 1 + rng.below(n as u64) as usize;
    let mut blocks = vec![Vec::new(); k];
    for (id, _) in g.vertices() {
        blocks[rng.below(k as u64) as usize].push(id.clone());
    }
    VertexPartition::new(blocks)
}

/// Random nonempty proper subset of the vertices.
pub fn random_vertex_subset(rng: &mut SplitMix64, g: &WeightedGraph) -> BTreeSet<VertexId> {
    let n = g.vertex_count();
    assert!((2..=63).contains(&n));
    let mask = 1 + rng.below((1u64 << n) - 2);
    g.vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, (id, _))| id.clone())
        .collect()
}

/// Random guillotine tiling of `outer`: repeatedly splits a tile at a
/// fraction 1/4, 1/2, or 3/4, alternating direction at random.
pub fn random_tiling(rng: &mut SplitMix64, outer: Rect, max_splits: usize) -> Tiling {
    let fractions = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut tiles = vec![outer.clone()];
    for _ in 0..rng.below(max_splits as u64 + 1) {
        let index = rng.below(tiles.len() as u64) as usize;
        let t = tiles.swap_remove(index);
        let f = rng.pick(&fractions).clone();
        if rng.chance(1, 2) {
            let left = f.clone() * &t.w;
            tiles.push(Rect::new(t.x.clone(), t.y.clone(), left.clone(), t.h.clone()));
            tiles.push(Rect::new(t.x + left.clone(), t.y, t.w - left, t.h));
        } else {
            let bottom = f.clone() * &t.h;
            tiles.push(Rect::new(
                t.x.clone(),
                t.y.clone(),
                t.w.clone(),
                bottom.clone(),
            ));
            tiles.push(Rect::new(t.x, t.y + bottom.clone(), t.w, t.h - bottom));
        }
    }
    Tiling::new(outer, tiles).expect("guillotine construction tiles the rectangle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilings::{kirchhoff_check, tiling_to_network};
    use num::One;

    #[test]
    fn splitmix_reference_sequence() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn same_seed_same_graphs() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..10 {
            assert_eq!(random_graph(&mut a), random_graph(&mut b));
        }
        let mut c = item_rng(7, 3);
        let mut d = item_rng(7, 3);
        assert_eq!(random_connected_graph(&mut c, 10), random_connected_graph(&mut d, 10));
    }

    #[test]
    fn item_streams_differ() {
        let firsts: BTreeSet<u64> = (0..8).map(|i| item_rng(99, i).next_u64()).collect();
        assert_eq!(firsts.len(), 8);
    }

    #[test]
    fn graphs_respect_advertised_ranges() {
        let menu = weight_menu();
        let mut rng = SplitMix64::new(1);
        for _ in 0..200 {
            let g = random_graph(&mut rng);
            assert!((2..=8).contains(&g.vertex_count()));
            assert!(g.edge_count() <= 16);
            for e in g.edges() {
                assert!(menu.contains(&e.weight));
            }
            for (_, w) in g.vertices() {
                assert!(menu.contains(w));
            }
        }
    }

    #[test]
    fn loopless_and_connected_generators_hold_their_promises() {
        let mut rng = SplitMix64::new(2);
        for _ in 0..100 {
            assert!(random_loopless_graph(&mut rng).is_loopless());
            let c = random_connected_graph(&mut rng, 10);
            assert!(c.is_connected());
            assert!(c.vertex_count() <= 10);
            let cl = random_connected_loopless_graph(&mut rng, 10);
            assert!(cl.is_connected() && cl.is_loopless());
        }
    }

    #[test]
    fn forests_are_forests() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let f = random_forest(&mut rng, 10);
            assert!(f.vertex_count() <= 10);
            // Acyclic: every edge reduces the component count by one.
            assert_eq!(
                f.component_count(),
                f.vertex_count() - f.edge_count()
            );
            for e in f.edges() {
                assert!(e.weight.is_one());
            }
            for (_, w) in f.vertices() {
                assert!(w.is_integer());
                assert!(*w >= int(1) && *w <= int(4));
            }
        }
    }

    #[test]
    fn partitions_and_subsets_are_valid() {
        let mut rng = SplitMix64::new(4);
        for _ in 0..100 {
            let g = random_graph(&mut rng);
            let p = random_partition(&mut rng, &g);
            assert!(p.validate_for(&g).is_ok());
            let s = random_vertex_subset(&mut rng, &g);
            assert!(!s.is_empty());
            assert!(s.len() < g.vertex_count());
        }
    }

    #[test]
    fn random_tilings_validate_and_satisfy_the_flow_laws() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let outer = Rect::new(int(0), int(0), int(2), int(3));
            let t = random_tiling(&mut rng, outer, 6);
            let network = tiling_to_network(&t).unwrap();
            assert!(kirchhoff_check(
                &network.graph,
                &network.field,
                &network.bottom_pole,
                &network.top_pole,
            )
            .unwrap());
        }
    }
}
