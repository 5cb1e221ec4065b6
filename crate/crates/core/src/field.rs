//! Discrete vector calculus on weighted graphs.
//!
//! Scalar fields live on vertices with the inner product weighted by υ;
//! vector fields live on edges with the inner product weighted by ε. The
//! gradient and (negative) divergence defined here are adjoint, and their
//! compositions are the weighted Laplacian `∂∇` and the edge Laplacian `∇∂`.
//! Everything in this module is exact rational arithmetic.
//!
//! A vector field stores, per edge, the rational coefficient of the unit
//! vector along the edge's canonical orientation, which runs from the
//! lexicographically smaller endpoint id to the larger. Loops have a
//! degenerate direction space and carry the fixed value zero.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::matrix::RatMatrix;
use crate::rat::{format_rat, parse_rat, Rat};
use crate::{Error, Result};

/// Rational-valued function on the vertex set of a carrier graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarField {
    values: BTreeMap<VertexId, Rat>,
}

impl ScalarField {
    pub fn new(values: BTreeMap<VertexId, Rat>) -> Self {
        ScalarField { values }
    }

    /// Field from per-vertex values in the graph's vertex order.
    pub fn from_values(g: &WeightedGraph, values: &[Rat]) -> Result<Self> {
        if values.len() != g.vertex_count() {
            return Err(Error::DomainMismatch(format!(
                "{} values for {} vertices",
                values.len(),
                g.vertex_count()
            )));
        }
        Ok(ScalarField {
            values: g
                .vertices()
                .iter()
                .map(|(id, _)| id.clone())
                .zip(values.iter().cloned())
                .collect(),
        })
    }

    pub fn constant(g: &WeightedGraph, c: Rat) -> Self {
        ScalarField {
            values: g
                .vertices()
                .iter()
                .map(|(id, _)| (id.clone(), c.clone()))
                .collect(),
        }
    }

    /// Indicator of a vertex subset.
    pub fn indicator<'a>(
        g: &WeightedGraph,
        members: impl IntoIterator<Item = &'a VertexId>,
    ) -> Self {
        let mut f = Self::constant(g, Rat::zero());
        for id in members {
            f.values.insert(id.clone(), Rat::one());
        }
        f
    }

    pub fn value(&self, v: &VertexId) -> Result<&Rat> {
        self.values
            .get(v)
            .ok_or_else(|| Error::DomainMismatch(format!("no value at vertex {v}")))
    }

    pub fn values(&self) -> &BTreeMap<VertexId, Rat> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Zero::is_zero)
    }

    /// Checks the domain is exactly the vertex set of `g`.
    pub fn check_domain(&self, g: &WeightedGraph) -> Result<()> {
        if self.values.len() != g.vertex_count() {
            return Err(Error::DomainMismatch(format!(
                "{} values for {} vertices",
                self.values.len(),
                g.vertex_count()
            )));
        }
        for (id, _) in g.vertices() {
            if !self.values.contains_key(id) {
                return Err(Error::DomainMismatch(format!("no value at vertex {id}")));
            }
        }
        Ok(())
    }
}

/// Rational coefficients of the canonical unit vectors, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    values: Vec<Rat>,
}

impl VectorField {
    /// Builds from per-edge coefficients; loops must carry zero.
    pub fn new(g: &WeightedGraph, values: Vec<Rat>) -> Result<Self> {
        if values.len() != g.edge_count() {
            return Err(Error::DomainMismatch(format!(
                "{} values for {} edges",
                values.len(),
                g.edge_count()
            )));
        }
        for e in g.edges() {
            if e.is_loop() && !values[e.id].is_zero() {
                return Err(Error::DomainMismatch(format!(
                    "nonzero coefficient on loop edge {}",
                    e.id
                )));
            }
        }
        Ok(VectorField { values })
    }

    pub fn zero(g: &WeightedGraph) -> Self {
        VectorField {
            values: vec![Rat::zero(); g.edge_count()],
        }
    }

    /// Indicator of a single nonloop edge along its canonical orientation.
    pub fn unit(g: &WeightedGraph, e: EdgeId) -> Result<Self> {
        let rec = g.edge(e)?;
        if rec.is_loop() {
            return Err(Error::DomainMismatch(format!("edge {e} is a loop")));
        }
        let mut f = Self::zero(g);
        f.values[e] = Rat::one();
        Ok(f)
    }

    pub fn coefficient(&self, e: EdgeId) -> Result<&Rat> {
        self.values
            .get(e)
            .ok_or(Error::UnknownEdge(e))
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn check_domain(&self, g: &WeightedGraph) -> Result<()> {
        if self.values.len() != g.edge_count() {
            return Err(Error::DomainMismatch(format!(
                "{} values for {} edges",
                self.values.len(),
                g.edge_count()
            )));
        }
        Ok(())
    }
}

/// Traversal direction of one curve step relative to canonical orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Walk through nonloop edges; consecutive steps chain head-to-tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub from: VertexId,
    pub to: VertexId,
    pub steps: Vec<(EdgeId, Direction)>,
}

impl Curve {
    pub fn empty(at: VertexId) -> Self {
        Curve {
            from: at.clone(),
            to: at,
            steps: Vec::new(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.from == self.to
    }

    /// Verifies every step exists, is not a loop, and chains correctly.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        g.vertex_index(&self.from)?;
        g.vertex_index(&self.to)?;
        let mut at = self.from.clone();
        for &(e, dir) in &self.steps {
            let rec = g.edge(e)?;
            if rec.is_loop() {
                return Err(Error::InvalidCurve(format!("step through loop edge {e}")));
            }
            let (tail, head) = match dir {
                Direction::Forward => (&rec.u, &rec.v),
                Direction::Backward => (&rec.v, &rec.u),
            };
            if *tail != at {
                return Err(Error::InvalidCurve(format!(
                    "step through edge {e} starts at {tail}, not {at}"
                )));
            }
            at = head.clone();
        }
        if at != self.to {
            return Err(Error::InvalidCurve(format!(
                "curve ends at {at}, declared endpoint {}",
                self.to
            )));
        }
        Ok(())
    }
}

/// Which Laplacian a matrix or spectrum refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `W_υ⁻¹ (D − A)` with the graph's own vertex weights.
    Weighted,
    /// `D − A`, vertex weights ignored.
    Combinatorial,
    /// `W_d⁻¹ (D − A)` with the degree measure as vertex weights.
    Normalised,
}

/// `⟨f, h⟩_υ = Σ_v υ(v) f(v) h(v)`.
pub fn inner_scalar(g: &WeightedGraph, f: &ScalarField, h: &ScalarField) -> Result<Rat> {
    f.check_domain(g)?;
    h.check_domain(g)?;
    let mut acc = Rat::zero();
    for (id, w) in g.vertices() {
        acc += w * f.value(id)? * h.value(id)?;
    }
    Ok(acc)
}

/// `⟨F, H⟩_ε = Σ_e ε(e) F(e) H(e)` over nonloop edges.
pub fn inner_vector(g: &WeightedGraph, f: &VectorField, h: &VectorField) -> Result<Rat> {
    f.check_domain(g)?;
    h.check_domain(g)?;
    let mut acc = Rat::zero();
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        acc += &e.weight * f.coefficient(e.id)? * h.coefficient(e.id)?;
    }
    Ok(acc)
}

/// `∇f`: per nonloop edge with canonical orientation u→v, the coefficient
/// `f(v) − f(u)`; zero on loops.
pub fn gradient(g: &WeightedGraph, f: &ScalarField) -> Result<VectorField> {
    f.check_domain(g)?;
    let mut values = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        if e.is_loop() {
            values.push(Rat::zero());
        } else {
            values.push(f.value(&e.v)? - f.value(&e.u)?);
        }
    }
    Ok(VectorField { values })
}

/// `∂F`, the negative divergence:
/// `∂F(v) = Σ_{uv ∈ E, u≠v} (ε(uv)/υ(v)) F(uv)·v_{→uv}`.
pub fn divergence(g: &WeightedGraph, f: &VectorField) -> Result<ScalarField> {
    f.check_domain(g)?;
    let mut sums: BTreeMap<VertexId, Rat> = g
        .vertices()
        .iter()
        .map(|(id, _)| (id.clone(), Rat::zero()))
        .collect();
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let c = f.coefficient(e.id)?;
        // Coefficient is along u→v, so the flow enters at v and leaves at u.
        *sums.get_mut(&e.v).expect("endpoint present") += &e.weight * c;
        *sums.get_mut(&e.u).expect("endpoint present") -= &e.weight * c;
    }
    let values = g
        .vertices()
        .iter()
        .map(|(id, w)| {
            let s = sums.remove(id).expect("every vertex summed");
            (id.clone(), s / w)
        })
        .collect();
    Ok(ScalarField { values })
}

/// Laplacian matrix in the graph's vertex order.
pub fn laplacian_matrix(g: &WeightedGraph, kind: LaplacianKind) -> Result<RatMatrix> {
    let n = g.vertex_count();
    let mut m = RatMatrix::zero(n, n);
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let iu = g.vertex_index(&e.u)?;
        let iv = g.vertex_index(&e.v)?;
        *m.at_mut(iu, iu) += &e.weight;
        *m.at_mut(iv, iv) += &e.weight;
        *m.at_mut(iu, iv) -= &e.weight;
        *m.at_mut(iv, iu) -= &e.weight;
    }
    let scales: Vec<Rat> = match kind {
        LaplacianKind::Combinatorial => return Ok(m),
        LaplacianKind::Weighted => g.vertices().iter().map(|(_, w)| w.clone()).collect(),
        LaplacianKind::Normalised => {
            let mut degrees = Vec::with_capacity(n);
            for (id, _) in g.vertices() {
                let d = g.degree(id)?;
                if d.is_zero() {
                    return Err(Error::IsolatedVertex(id.to_string()));
                }
                degrees.push(d);
            }
            degrees
        }
    };
    for (i, s) in scales.iter().enumerate() {
        for j in 0..n {
            let scaled = &*m.at(i, j) / s;
            *m.at_mut(i, j) = scaled;
        }
    }
    Ok(m)
}

/// Ids of nonloop edges in id order: the index set of the edge Laplacian.
pub fn nonloop_edge_ids(g: &WeightedGraph) -> Vec<EdgeId> {
    g.edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| e.id)
        .collect()
}

/// Matrix of `∇∂` in the basis of canonical edge indicators, indexed by
/// [`nonloop_edge_ids`].
pub fn edge_laplacian_matrix(g: &WeightedGraph) -> Result<RatMatrix> {
    let ids = nonloop_edge_ids(g);
    let mut m = RatMatrix::zero(ids.len(), ids.len());
    for (j, &ej) in ids.iter().enumerate() {
        let image = gradient(g, &divergence(g, &VectorField::unit(g, ej)?)?)?;
        for (i, &ei) in ids.iter().enumerate() {
            *m.at_mut(i, j) = image.coefficient(ei)?.clone();
        }
    }
    Ok(m)
}

/// Deterministic spanning forest: BFS from the smallest vertex id of each
/// component, neighbours visited in sorted order. Returns per-vertex parent
/// links (parent index, connecting edge) and the forest's edge ids.
pub(crate) fn bfs_forest(g: &WeightedGraph) -> (Vec<Option<(usize, EdgeId)>>, Vec<EdgeId>) {
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut parent: Vec<Option<(usize, EdgeId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut forest = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(at) = queue.pop_front() {
            for &(next, e) in &adj[at] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((at, e));
                    forest.push(e);
                    queue.push_back(next);
                }
            }
        }
    }
    forest.sort_unstable();
    (parent, forest)
}

/// Forest path from vertex index `a` to vertex index `b` as curve steps.
fn forest_path(
    g: &WeightedGraph,
    parent: &[Option<(usize, EdgeId)>],
    a: usize,
    b: usize,
) -> Vec<(EdgeId, Direction)> {
    let ancestors = |mut at: usize| {
        let mut chain = vec![at];
        while let Some((p, _)) = parent[at] {
            chain.push(p);
            at = p;
        }
        chain
    };
    let up_a = ancestors(a);
    let up_b = ancestors(b);
    let meet = *up_a
        .iter()
        .find(|x| up_b.contains(x))
        .expect("same component");
    let mut steps = Vec::new();
    let mut at = a;
    while at != meet {
        let (p, e) = parent[at].expect("below the meet point");
        let rec = &g.edges()[e];
        let dir = if g.vertex_index(&rec.u).expect("endpoint") == at {
            Direction::Forward
        } else {
            Direction::Backward
        };
        steps.push((e, dir));
        at = p;
    }
    let mut down = Vec::new();
    let mut at = b;
    while at != meet {
        let (p, e) = parent[at].expect("below the meet point");
        let rec = &g.edges()[e];
        // Walking down from the meet, the step enters at `at`.
        let dir = if g.vertex_index(&rec.v).expect("endpoint") == at {
            Direction::Forward
        } else {
            Direction::Backward
        };
        down.push((e, dir));
        at = p;
    }
    down.reverse();
    steps.extend(down);
    steps
}

/// One simple closed curve per non-forest nonloop edge: the edge traversed
/// canonically, then the forest path back.
pub fn fundamental_cycle_curves(g: &WeightedGraph) -> Vec<Curve> {
    let (parent, forest) = bfs_forest(g);
    let forest: std::collections::BTreeSet<EdgeId> = forest.into_iter().collect();
    let mut curves = Vec::new();
    for e in g.edges() {
        if e.is_loop() || forest.contains(&e.id) {
            continue;
        }
        let iu = g.vertex_index(&e.u).expect("endpoint");
        let iv = g.vertex_index(&e.v).expect("endpoint");
        let mut steps = vec![(e.id, Direction::Forward)];
        steps.extend(forest_path(g, &parent, iv, iu));
        curves.push(Curve {
            from: e.u.clone(),
            to: e.u.clone(),
            steps,
        });
    }
    curves
}

/// Fundamental cycle and cut bases w.r.t. the fixed BFS spanning forest.
///
/// Cycles are indicator fields `1_{C/ε}` of the fundamental closed curves
/// (coefficients ±1/ε along the cycle); cuts are gradient fields `1_{∇S}` of
/// the forest-edge sides. Counts are m′−n+k and n−k, with m′ the number of
/// nonloop edges and k the number of components.
pub fn cycle_cut_bases(g: &WeightedGraph) -> (Vec<VectorField>, Vec<VectorField>) {
    let mut cycles = Vec::new();
    for curve in fundamental_cycle_curves(g) {
        let mut values = vec![Rat::zero(); g.edge_count()];
        for &(e, dir) in &curve.steps {
            let w = &g.edges()[e].weight;
            let contribution = match dir {
                Direction::Forward => Rat::one() / w,
                Direction::Backward => -(Rat::one() / w),
            };
            values[e] += contribution;
        }
        cycles.push(VectorField { values });
    }
    let (parent, forest) = bfs_forest(g);
    let mut cuts = Vec::new();
    for &fe in &forest {
        let rec = &g.edges()[fe];
        let head = g.vertex_index(&rec.v).expect("endpoint");
        let side = forest_side(g, &parent, fe, head);
        let members: Vec<&VertexId> = side
            .iter()
            .map(|&i| &g.vertices()[i].0)
            .collect();
        let indicator = ScalarField::indicator(g, members);
        cuts.push(gradient(g, &indicator).expect("indicator is total"));
    }
    (cycles, cuts)
}

/// Vertex indices on `start`'s side of the forest after removing edge `cut`.
fn forest_side(
    g: &WeightedGraph,
    parent: &[Option<(usize, EdgeId)>],
    cut: EdgeId,
    start: usize,
) -> Vec<usize> {
    // Forest adjacency only, minus the cut edge.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (child, link) in parent.iter().enumerate() {
        if let Some((p, e)) = link {
            if *e != cut {
                adj[child].push(*p);
                adj[*p].push(child);
            }
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut side = vec![start];
    while let Some(at) = queue.pop_front() {
        for &next in &adj[at] {
            if !seen[next] {
                seen[next] = true;
                side.push(next);
                queue.push_back(next);
            }
        }
    }
    side
}

/// `∫ F` along the curve: Σ over steps of ±coefficient.
pub fn line_integral(g: &WeightedGraph, f: &VectorField, c: &Curve) -> Result<Rat> {
    f.check_domain(g)?;
    c.validate(g)?;
    let mut acc = Rat::zero();
    for &(e, dir) in &c.steps {
        match dir {
            Direction::Forward => acc += f.coefficient(e)?,
            Direction::Backward => acc -= f.coefficient(e)?,
        }
    }
    Ok(acc)
}

/// True iff the line integral of `F` vanishes on every fundamental cycle,
/// which characterises membership in the cut space.
pub fn is_conservative(g: &WeightedGraph, f: &VectorField) -> Result<bool> {
    f.check_domain(g)?;
    for curve in fundamental_cycle_curves(g) {
        if !line_integral(g, f, &curve)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    field: BTreeMap<String, String>,
}

/// Parses a scalar field keyed by vertex id strings (`"1"`, `"2+5"`).
pub fn parse_scalar_field(g: &WeightedGraph, document: &str) -> Result<ScalarField> {
    let doc: FieldDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let mut values = BTreeMap::new();
    for (key, text) in doc.field {
        let id: VertexId = key.parse()?;
        values.insert(id, parse_rat(&text)?);
    }
    let f = ScalarField { values };
    f.check_domain(g)?;
    Ok(f)
}

pub fn serialize_scalar_field(f: &ScalarField) -> String {
    let doc = FieldDoc {
        field: f
            .values
            .iter()
            .map(|(id, v)| (id.to_string(), format_rat(v)))
            .collect(),
    };
    serde_json::to_string(&doc).expect("field document serialises")
}

/// Parses a vector field keyed by decimal edge ids.
pub fn parse_vector_field(g: &WeightedGraph, document: &str) -> Result<VectorField> {
    let doc: FieldDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let mut values = vec![Rat::zero(); g.edge_count()];
    for (key, text) in doc.field {
        let e: EdgeId = key
            .parse()
            .map_err(|_| Error::Parse(format!("malformed edge id {key:?}")))?;
        if e >= g.edge_count() {
            return Err(Error::UnknownEdge(e));
        }
        values[e] = parse_rat(&text)?;
    }
    VectorField::new(g, values)
}

pub fn serialize_vector_field(f: &VectorField) -> String {
    let doc = FieldDoc {
        field: f
            .values
            .iter()
            .enumerate()
            .map(|(e, v)| (e.to_string(), format_rat(v)))
            .collect(),
    };
    serde_json::to_string(&doc).expect("field document serialises")
}
