//! Symmetric functions in the power-sum basis, the chromatic symmetric
//! function of integer vertex-weighted multigraphs, its specialisations to
//! ordinary polynomials, and the census of small free trees.
//!
//! The chromatic symmetric function is computed by the deletion-contraction
//! recurrence with loops collapsing to zero; the homomorphism sending
//! `p_α` to `(Π α_i) t^{ℓ(α)}` recovers the scaled characteristic
//! polynomial on forests, and `p_α ↦ t^{ℓ(α)}` recovers the chromatic
//! polynomial.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::WeightedGraph;
use crate::poly::RatPoly;
use crate::rat::{format_rat, parse_rat, Rat};
use crate::{Error, Result};

/// Integer partition: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts the parts weakly decreasing; zero parts are rejected.
    pub fn new(parts: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut parts: Vec<u32> = parts.into_iter().collect();
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Weights("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// ℓ(α), the number of parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// |α|, the sum of the parts.
    pub fn sum(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    /// Multiset union, the exponent rule `p_α · p_β = p_{α ⊎ β}`.
    pub fn concat(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }
}

/// Element of the algebra of symmetric functions written in the power-sum
/// basis. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PSym {
    terms: BTreeMap<Partition, Rat>,
}

impl PSym {
    pub fn zero() -> Self {
        PSym::default()
    }

    /// Single term `c · p_α`.
    pub fn monomial(partition: Partition, coefficient: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(partition, coefficient);
        }
        PSym { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Partition, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, partition: &Partition) -> Rat {
        self.terms.get(partition).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &PSym) -> PSym {
        let mut terms = self.terms.clone();
        for (p, c) in &other.terms {
            let entry = terms.entry(p.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(p);
            }
        }
        PSym { terms }
    }

    pub fn sub(&self, other: &PSym) -> PSym {
        let mut terms = self.terms.clone();
        for (p, c) in &other.terms {
            let entry = terms.entry(p.clone()).or_insert_with(Rat::zero);
            *entry -= c;
            if entry.is_zero() {
                terms.remove(p);
            }
        }
        PSym { terms }
    }

    /// True iff every stored partition sums to `degree`.
    pub fn is_homogeneous_of_degree(&self, degree: u64) -> bool {
        self.terms.keys().all(|p| p.sum() == degree)
    }
}

/// Bilinear product with `p_α · p_β = p_{α ⊎ β}`.
pub fn p_mul(a: &PSym, b: &PSym) -> PSym {
    let mut terms: BTreeMap<Partition, Rat> = BTreeMap::new();
    for (pa, ca) in &a.terms {
        for (pb, cb) in &b.terms {
            let key = pa.concat(pb);
            let entry = terms.entry(key).or_insert_with(Rat::zero);
            *entry += ca * cb;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    PSym { terms }
}

/// Chromatic symmetric function of an integer vertex-weighted multigraph.
///
/// Requires every edge weight to be 1 (the function does not see edge
/// weights) and every vertex weight to be a positive integer. Computed by
/// deletion-contraction on the first edge, with any loop collapsing the
/// whole term to zero and the edgeless base case contributing `p_α` for
/// `α` the sorted vertex weights.
pub fn csf(g: &WeightedGraph) -> Result<PSym> {
    for e in g.edges() {
        if !e.weight.is_one() {
            return Err(Error::Weights(
                "chromatic symmetric function needs unit edge weights".into(),
            ));
        }
    }
    for (v, w) in g.vertices() {
        if !w.is_integer() || !w.is_positive() {
            return Err(Error::Weights(format!(
                "vertex {v} weight is not a positive integer"
            )));
        }
    }
    Ok(csf_recursive(g))
}

fn vertex_weight_partition(g: &WeightedGraph) -> Partition {
    Partition::new(
        g.vertices()
            .iter()
            .map(|(_, w)| w.to_integer().to_u32().expect("validated integer weight")),
    )
    .expect("positive validated weights")
}

fn csf_recursive(g: &WeightedGraph) -> PSym {
    if g.edges().iter().any(|e| e.is_loop()) {
        return PSym::zero();
    }
    if g.edge_count() == 0 {
        return PSym::monomial(vertex_weight_partition(g), Rat::one());
    }
    let deleted = g.delete_edge(0).expect("edge 0 exists");
    let contracted = g.contract_edge(0).expect("edge 0 is not a loop");
    csf_recursive(&deleted).sub(&csf_recursive(&contracted))
}

/// The homomorphism `p_α ↦ (Π α_i) t^{ℓ(α)}`, extended linearly. On the
/// chromatic symmetric function of a forest this recovers the scaled
/// characteristic polynomial.
pub fn phi(x: &PSym) -> RatPoly {
    let mut out = RatPoly::zero();
    for (partition, coefficient) in x.terms() {
        let mut product = BigInt::one();
        for &part in partition.parts() {
            product *= BigInt::from(part);
        }
        let scale = coefficient * Rat::from_integer(product);
        out = out.add(&RatPoly::monomial(scale, partition.length()));
    }
    out
}

/// The specialisation `p_α ↦ t^{ℓ(α)}`, extended linearly; sends the
/// chromatic symmetric function to the chromatic polynomial.
pub fn chromatic_polynomial(x: &PSym) -> RatPoly {
    let mut out = RatPoly::zero();
    for (partition, coefficient) in x.terms() {
        out = out.add(&RatPoly::monomial(coefficient.clone(), partition.length()));
    }
    out
}

/// Census of all free trees on a fixed vertex count: pairwise chromatic
/// symmetric function collisions and characteristic polynomial collisions.
#[derive(Clone, Debug)]
pub struct CensusReport {
    pub vertex_count: usize,
    pub trees: Vec<WeightedGraph>,
    /// Index pairs of trees with equal chromatic symmetric function.
    pub csf_collisions: Vec<(usize, usize)>,
    /// Index pairs of trees with equal characteristic polynomial.
    pub charpoly_collisions: Vec<(usize, usize)>,
}

/// Canonical level sequences of rooted trees, levels starting at 1, in
/// reverse lexicographic order.
fn rooted_level_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut s: Vec<usize> = (1..=n).collect();
    loop {
        out.push(s.clone());
        let Some(p) = (0..n).rev().find(|&i| s[i] > 2) else {
            break;
        };
        let q = (0..p)
            .rev()
            .find(|&i| s[i] == s[p] - 1)
            .expect("every deep vertex has a parent");
        for i in p..n {
            s[i] = s[i - (p - q)];
        }
    }
    out
}

fn edges_of_level_sequence(s: &[usize]) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(s.len().saturating_sub(1));
    for i in 1..s.len() {
        let parent = (0..i)
            .rev()
            .find(|&j| s[j] == s[i] - 1)
            .expect("every non-root has a parent");
        edges.push((parent, i));
    }
    edges
}

/// Subtree encoding with sorted child encodings; equal strings iff the
/// rooted trees are isomorphic.
fn rooted_encoding(adjacency: &[Vec<usize>], root: usize, parent: Option<usize>) -> String {
    let mut children: Vec<String> = adjacency[root]
        .iter()
        .filter(|&&u| Some(u) != parent)
        .map(|&u| rooted_encoding(adjacency, u, Some(root)))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// One or two central vertices of a tree, found by peeling leaves.
fn tree_centers(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            degree[v] = 0;
            for &u in &adjacency[v] {
                if degree[u] > 1 {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        layer = next;
    }
    layer
}

/// Isomorphism-invariant encoding of a free tree: the minimum rooted
/// encoding over its centers.
fn canonical_tree_form(edges: &[(usize, usize)], n: usize) -> String {
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    tree_centers(&adjacency)
        .into_iter()
        .map(|c| rooted_encoding(&adjacency, c, None))
        .min()
        .expect("a tree has a center")
}

/// All free trees on `n` vertices up to isomorphism, as unit-weighted
/// graphs, in the deterministic order of the generator.
fn free_trees(n: usize) -> Vec<WeightedGraph> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for s in rooted_level_sequences(n) {
        let edges = edges_of_level_sequence(&s);
        if seen.insert(canonical_tree_form(&edges, n)) {
            let pairs: Vec<(i64, i64)> = edges
                .iter()
                .map(|&(a, b)| (a as i64, b as i64))
                .collect();
            out.push(WeightedGraph::unweighted(n, &pairs));
        }
    }
    out
}

/// Enumerate the free trees on `n` vertices, compute each chromatic
/// symmetric function and characteristic polynomial, and report every
/// colliding pair of either kind.
pub fn tree_census(n: usize) -> Result<CensusReport> {
    if !(2..=10).contains(&n) {
        return Err(Error::SizeLimit(format!(
            "tree census covers 2 to 10 vertices, got {n}"
        )));
    }
    let trees = free_trees(n);
    let functions: Vec<PSym> = trees.iter().map(|t| csf(t).expect("unit weights")).collect();
    let polynomials: Vec<RatPoly> = trees.iter().map(crate::charpoly::charpoly).collect();

    let mut csf_collisions = Vec::new();
    let mut charpoly_collisions = Vec::new();
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            if functions[i] == functions[j] {
                csf_collisions.push((i, j));
            }
            if polynomials[i] == polynomials[j] {
                charpoly_collisions.push((i, j));
            }
        }
    }
    Ok(CensusReport {
        vertex_count: n,
        trees,
        csf_collisions,
        charpoly_collisions,
    })
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    partition: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PSymDto {
    terms: Vec<TermDto>,
}

pub fn serialize_psym(x: &PSym) -> String {
    let dto = PSymDto {
        terms: x
            .terms()
            .iter()
            .map(|(p, c)| TermDto {
                partition: p.parts().to_vec(),
                coeff: format_rat(c),
            })
            .collect(),
    };
    serde_json::to_string(&dto).expect("symmetric function serialization cannot fail")
}

pub fn parse_psym(document: &str) -> Result<PSym> {
    let dto: PSymDto =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = PSym::zero();
    for term in dto.terms {
        let partition = Partition::new(term.partition)?;
        out = out.add(&PSym::monomial(partition, parse_rat(&term.coeff)?));
    }
    Ok(out)
}
