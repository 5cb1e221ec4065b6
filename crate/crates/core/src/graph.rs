//! Immutable weighted multigraphs and their structural operations.
//!
//! A vertex is identified by the sorted set of original integer labels merged
//! into it, so contraction and quotienting produce stable, order-independent
//! identities. Edges are unordered endpoint pairs with positive rational
//! weights; loops and parallel edges are allowed. Edge ids are positions in
//! the canonically sorted edge list and are regenerated by every operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{format_rat, int, parse_rat, Rat};
use crate::{Error, Result};

/// Sorted set of original integer labels naming one vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(Vec<i64>);

impl VertexId {
    /// Builds an id from labels; sorts and deduplicates. Panics on empty input.
    pub fn new(labels: impl IntoIterator<Item = i64>) -> Self {
        let mut v: Vec<i64> = labels.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        assert!(!v.is_empty(), "vertex id needs at least one label");
        VertexId(v)
    }

    pub fn single(label: i64) -> Self {
        VertexId(vec![label])
    }

    pub fn labels(&self) -> &[i64] {
        &self.0
    }

    /// Union of the two label sets.
    pub fn merged(&self, other: &VertexId) -> Self {
        VertexId::new(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for label in &self.0 {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{label}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for VertexId {
    type Err = Error;

    /// Parses the `Display` form, e.g. `"3"` or `"1+4"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for part in s.split('+') {
            let label: i64 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("malformed vertex id {s:?}")))?;
            labels.push(label);
        }
        if labels.is_empty() {
            return Err(Error::Parse(format!("malformed vertex id {s:?}")));
        }
        Ok(VertexId::new(labels))
    }
}

/// Position of an edge in the canonical edge list of one specific graph.
/// Structural operations renumber; an id never outlives the graph it came from.
pub type EdgeId = usize;

/// One edge: unordered endpoints (stored with `u <= v`) and a positive weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Rat,
}

impl EdgeRecord {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint other than `at`; `at` itself for a loop.
    pub fn other(&self, at: &VertexId) -> &VertexId {
        if *at == self.u {
            &self.v
        } else {
            &self.u
        }
    }
}

/// Immutable vertex- and edge-weighted multigraph.
///
/// Vertices are kept sorted by id and edges sorted by (endpoints, weight), so
/// equal graphs have equal representations and every traversal is
/// deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    vertices: Vec<(VertexId, Rat)>,
    edges: Vec<EdgeRecord>,
}

impl WeightedGraph {
    /// Validating constructor. Endpoints must name vertices, weights must be
    /// positive, and vertex ids must be pairwise disjoint as label sets.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, Rat)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Rat)>,
    ) -> Result<Self> {
        Self::assemble(vertices.into_iter().collect(), edges.into_iter().collect())
    }

    /// Graph with no vertices and no edges.
    pub fn empty() -> Self {
        WeightedGraph {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// All vertex weights 1, all edge weights 1, vertices labelled `0..n`.
    pub fn unweighted(n: usize, edge_pairs: &[(i64, i64)]) -> Self {
        let vertices = (0..n as i64).map(|l| (VertexId::single(l), int(1)));
        let edges = edge_pairs
            .iter()
            .map(|&(a, b)| (VertexId::single(a), VertexId::single(b), int(1)));
        Self::new(vertices, edges).expect("unweighted construction is valid")
    }

    fn assemble(
        vertices: Vec<(VertexId, Rat)>,
        edge_list: Vec<(VertexId, VertexId, Rat)>,
    ) -> Result<Self> {
        let mut vertices = vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        let mut seen_labels: BTreeSet<i64> = BTreeSet::new();
        for (id, weight) in &vertices {
            if !weight.is_positive() {
                return Err(Error::Parse(format!(
                    "nonpositive weight {} on vertex {id}",
                    format_rat(weight)
                )));
            }
            for label in id.labels() {
                if !seen_labels.insert(*label) {
                    return Err(Error::Parse(format!(
                        "label {label} appears in more than one vertex id"
                    )));
                }
            }
        }
        let ids: BTreeSet<&VertexId> = vertices.iter().map(|(id, _)| id).collect();
        let mut edges: Vec<(VertexId, VertexId, Rat)> = Vec::with_capacity(edge_list.len());
        for (a, b, weight) in edge_list {
            if !weight.is_positive() {
                return Err(Error::Parse(format!(
                    "nonpositive weight {} on edge {a}-{b}",
                    format_rat(&weight)
                )));
            }
            for end in [&a, &b] {
                if !ids.contains(end) {
                    return Err(Error::Parse(format!("edge endpoint {end} is not a vertex")));
                }
            }
            let (u, v) = if a <= b { (a, b) } else { (b, a) };
            edges.push((u, v, weight));
        }
        edges.sort_by(|x, y| (&x.0, &x.1, &x.2).cmp(&(&y.0, &y.1, &y.2)));
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, (u, v, weight))| EdgeRecord { id, u, v, weight })
            .collect();
        Ok(WeightedGraph { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices as (id, weight) pairs, sorted by id.
    pub fn vertices(&self) -> &[(VertexId, Rat)] {
        &self.vertices
    }

    /// Edges in canonical order; `edges()[e].id == e`.
    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Result<&EdgeRecord> {
        self.edges.get(e).ok_or(Error::UnknownEdge(e))
    }

    /// Position of `v` in the sorted vertex list.
    pub fn vertex_index(&self, v: &VertexId) -> Result<usize> {
        self.vertices
            .binary_search_by(|(id, _)| id.cmp(v))
            .map_err(|_| Error::UnknownVertex(v.to_string()))
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertex_index(v).is_ok()
    }

    pub fn vertex_weight(&self, v: &VertexId) -> Result<&Rat> {
        Ok(&self.vertices[self.vertex_index(v)?].1)
    }

    /// Total vertex weight υ(V).
    pub fn total_vertex_weight(&self) -> Rat {
        self.vertices
            .iter()
            .fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    /// Total edge weight ε(E).
    pub fn total_edge_weight(&self) -> Rat {
        self.edges
            .iter()
            .fold(Rat::zero(), |acc, e| acc + &e.weight)
    }

    /// Weighted degree: Σ ε over incident edges with loops counted twice.
    pub fn degree(&self, v: &VertexId) -> Result<Rat> {
        self.vertex_index(v)?;
        let mut d = Rat::zero();
        for e in &self.edges {
            if e.u == *v {
                d += &e.weight;
            }
            if e.v == *v {
                d += &e.weight;
            }
        }
        Ok(d)
    }

    /// Ids of edges incident to `v` (loops included once).
    pub fn incident_edges(&self, v: &VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.u == *v || e.v == *v)
            .map(|e| e.id)
            .collect()
    }

    pub fn is_loopless(&self) -> bool {
        self.edges.iter().all(|e| !e.is_loop())
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.vertices
            .iter()
            .any(|(id, _)| self.incident_edges(id).is_empty())
    }

    /// Nonloop neighbour lists by vertex index, each sorted by
    /// (neighbour index, edge id).
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            if e.is_loop() {
                continue;
            }
            let iu = self.vertex_index(&e.u).expect("endpoint is a vertex");
            let iv = self.vertex_index(&e.v).expect("endpoint is a vertex");
            adj[iu].push((iv, e.id));
            adj[iv].push((iu, e.id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Connected components as sorted lists of vertex indices, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(at) = queue.pop_front() {
                for &(next, _) in &adj[at] {
                    if !seen[next] {
                        seen[next] = true;
                        comp.push(next);
                        queue.push_back(next);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Number of components that are 2-colourable; a loop anywhere in a
    /// component disqualifies it.
    pub fn bipartite_component_count(&self) -> usize {
        let adj = self.adjacency();
        let mut looped = vec![false; self.vertices.len()];
        for e in &self.edges {
            if e.is_loop() {
                let i = self.vertex_index(&e.u).expect("endpoint is a vertex");
                looped[i] = true;
            }
        }
        let mut colour: Vec<Option<bool>> = vec![None; self.vertices.len()];
        let mut count = 0;
        for start in 0..self.vertices.len() {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut ok = !looped[start];
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(at) = queue.pop_front() {
                let c = colour[at].expect("coloured before queueing");
                for &(next, _) in &adj[at] {
                    match colour[next] {
                        None => {
                            colour[next] = Some(!c);
                            if looped[next] {
                                ok = false;
                            }
                            queue.push_back(next);
                        }
                        Some(cn) if cn == c => ok = false,
                        Some(_) => {}
                    }
                }
            }
            if ok {
                count += 1;
            }
        }
        count
    }

    /// G − e: the edge removed, everything else untouched.
    pub fn delete_edge(&self, e: EdgeId) -> Result<WeightedGraph> {
        self.edge(e)?;
        let edges = self
            .edges
            .iter()
            .filter(|rec| rec.id != e)
            .map(|rec| (rec.u.clone(), rec.v.clone(), rec.weight.clone()))
            .collect();
        Self::assemble(self.vertices.clone(), edges)
    }

    /// G with the listed edges removed; vertices preserved.
    pub fn without_edges(&self, drop: &BTreeSet<EdgeId>) -> Result<WeightedGraph> {
        for &e in drop {
            self.edge(e)?;
        }
        let edges = self
            .edges
            .iter()
            .filter(|rec| !drop.contains(&rec.id))
            .map(|rec| (rec.u.clone(), rec.v.clone(), rec.weight.clone()))
            .collect();
        Self::assemble(self.vertices.clone(), edges)
    }

    /// G with the listed vertices and all their incident edges removed.
    pub fn without_vertices(&self, drop: &BTreeSet<VertexId>) -> Result<WeightedGraph> {
        for v in drop {
            self.vertex_index(v)?;
        }
        let vertices = self
            .vertices
            .iter()
            .filter(|(id, _)| !drop.contains(id))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|rec| !drop.contains(&rec.u) && !drop.contains(&rec.v))
            .map(|rec| (rec.u.clone(), rec.v.clone(), rec.weight.clone()))
            .collect();
        Self::assemble(vertices, edges)
    }

    /// Subgraph consisting of the listed edges and exactly their endpoints.
    pub fn induced_by_edges(&self, keep: &BTreeSet<EdgeId>) -> Result<WeightedGraph> {
        let mut ids: BTreeSet<VertexId> = BTreeSet::new();
        for &e in keep {
            let rec = self.edge(e)?;
            ids.insert(rec.u.clone());
            ids.insert(rec.v.clone());
        }
        let vertices = self
            .vertices
            .iter()
            .filter(|(id, _)| ids.contains(id))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|rec| keep.contains(&rec.id))
            .map(|rec| (rec.u.clone(), rec.v.clone(), rec.weight.clone()))
            .collect();
        Self::assemble(vertices, edges)
    }

    /// G/e: endpoints merged into one vertex weighing υ(u)+υ(v); edges parallel
    /// to `e` become loops on the merged vertex.
    pub fn contract_edge(&self, e: EdgeId) -> Result<WeightedGraph> {
        let rec = self.edge(e)?.clone();
        if rec.is_loop() {
            return Err(Error::LoopContraction);
        }
        let merged = rec.u.merged(&rec.v);
        let map_id = |id: &VertexId| {
            if *id == rec.u || *id == rec.v {
                merged.clone()
            } else {
                id.clone()
            }
        };
        let mut vertices: Vec<(VertexId, Rat)> = Vec::with_capacity(self.vertices.len() - 1);
        let mut merged_weight = Rat::zero();
        for (id, w) in &self.vertices {
            if *id == rec.u || *id == rec.v {
                merged_weight += w;
            } else {
                vertices.push((id.clone(), w.clone()));
            }
        }
        vertices.push((merged.clone(), merged_weight));
        let edges = self
            .edges
            .iter()
            .filter(|other| other.id != e)
            .map(|other| (map_id(&other.u), map_id(&other.v), other.weight.clone()))
            .collect();
        Self::assemble(vertices, edges)
    }

    /// G/π: one vertex per block with the block's υ-sum; every edge retained,
    /// intra-block edges becoming loops.
    pub fn quotient(&self, partition: &VertexPartition) -> Result<WeightedGraph> {
        partition.validate_for(self)?;
        let mut block_of: BTreeMap<&VertexId, usize> = BTreeMap::new();
        for (b, block) in partition.blocks().iter().enumerate() {
            for id in block {
                block_of.insert(id, b);
            }
        }
        let mut merged_ids: Vec<VertexId> = Vec::new();
        let mut weights: Vec<Rat> = vec![Rat::zero(); partition.blocks().len()];
        for block in partition.blocks() {
            let labels = block.iter().flat_map(|id| id.labels().iter().copied());
            merged_ids.push(VertexId::new(labels));
        }
        for (id, w) in &self.vertices {
            weights[block_of[id]] += w;
        }
        let vertices = merged_ids
            .iter()
            .cloned()
            .zip(weights)
            .collect::<Vec<_>>();
        let edges = self
            .edges
            .iter()
            .map(|rec| {
                (
                    merged_ids[block_of[&rec.u]].clone(),
                    merged_ids[block_of[&rec.v]].clone(),
                    rec.weight.clone(),
                )
            })
            .collect();
        Self::assemble(vertices, edges)
    }

    /// G+H: vertex weights add on shared ids, edge multisets concatenate.
    /// Distinct ids must not overlap as label sets.
    pub fn merge(&self, other: &WeightedGraph) -> Result<WeightedGraph> {
        let mut weights: BTreeMap<VertexId, Rat> = BTreeMap::new();
        for (id, w) in self.vertices.iter().chain(other.vertices.iter()) {
            *weights.entry(id.clone()).or_insert_with(Rat::zero) += w;
        }
        let vertices: Vec<(VertexId, Rat)> = weights.into_iter().collect();
        let edges = self
            .edges
            .iter()
            .chain(other.edges.iter())
            .map(|rec| (rec.u.clone(), rec.v.clone(), rec.weight.clone()))
            .collect();
        Self::assemble(vertices, edges).map_err(|e| match e {
            Error::Parse(msg) => Error::InvalidVertexSet(msg),
            other => other,
        })
    }

    /// Loops dropped, parallel classes collapsed to single edges carrying the
    /// class's ε-sum. Leaves the weighted Laplacian matrix unchanged.
    pub fn simplify(&self) -> WeightedGraph {
        let mut classes: BTreeMap<(VertexId, VertexId), Rat> = BTreeMap::new();
        for rec in &self.edges {
            if rec.is_loop() {
                continue;
            }
            *classes
                .entry((rec.u.clone(), rec.v.clone()))
                .or_insert_with(Rat::zero) += &rec.weight;
        }
        let edges = classes.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        Self::assemble(self.vertices.clone(), edges).expect("simplify preserves validity")
    }
}

/// Disjoint nonempty blocks of vertex ids covering the whole vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    blocks: Vec<Vec<VertexId>>,
}

impl VertexPartition {
    /// Normalises block contents and block order; emptiness is checked against
    /// a graph by [`VertexPartition::validate_for`].
    pub fn new(blocks: impl IntoIterator<Item = Vec<VertexId>>) -> Self {
        let mut blocks: Vec<Vec<VertexId>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort();
                b.dedup();
                b
            })
            .filter(|b| !b.is_empty())
            .collect();
        blocks.sort();
        VertexPartition { blocks }
    }

    /// All blocks singletons.
    pub fn discrete(g: &WeightedGraph) -> Self {
        Self::new(g.vertices().iter().map(|(id, _)| vec![id.clone()]))
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    /// Number of blocks with at least two members.
    pub fn coarse_block_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.len() >= 2).count()
    }

    /// Checks the blocks cover each vertex of `g` exactly once.
    pub fn validate_for(&self, g: &WeightedGraph) -> Result<()> {
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        for block in &self.blocks {
            for id in block {
                if !g.contains_vertex(id) {
                    return Err(Error::InvalidPartition(format!("{id} is not a vertex")));
                }
                if !seen.insert(id) {
                    return Err(Error::InvalidPartition(format!("{id} appears twice")));
                }
            }
        }
        if seen.len() != g.vertex_count() {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {} of {} vertices",
                seen.len(),
                g.vertex_count()
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    id: Vec<i64>,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    u: Vec<i64>,
    v: Vec<i64>,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

/// Parses the graph-JSON wire format, rationals read exactly.
pub fn parse_graph(document: &str) -> Result<WeightedGraph> {
    let doc: GraphDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for v in doc.vertices {
        if v.id.is_empty() {
            return Err(Error::Parse("vertex with empty id".into()));
        }
        vertices.push((VertexId::new(v.id), parse_rat(&v.weight)?));
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in doc.edges {
        if e.u.is_empty() || e.v.is_empty() {
            return Err(Error::Parse("edge with empty endpoint id".into()));
        }
        edges.push((VertexId::new(e.u), VertexId::new(e.v), parse_rat(&e.weight)?));
    }
    WeightedGraph::new(vertices, edges)
}

/// Serialises to graph-JSON; parsing the output reproduces the graph exactly.
pub fn serialize_graph(g: &WeightedGraph) -> String {
    let doc = GraphDoc {
        vertices: g
            .vertices()
            .iter()
            .map(|(id, w)| VertexDoc {
                id: id.labels().to_vec(),
                weight: format_rat(w),
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                u: e.u.labels().to_vec(),
                v: e.v.labels().to_vec(),
                weight: format_rat(&e.weight),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("graph document serialises")
}
