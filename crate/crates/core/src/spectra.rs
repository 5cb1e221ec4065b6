//! Floating-point Laplacian spectra and interlacing verifiers.
//!
//! Eigenvalues come from a hand-rolled cyclic Jacobi iteration on the
//! symmetric conjugate `W^{−1/2} L W^{−1/2}`, which shares the spectrum of
//! the (generally nonsymmetric) weighted Laplacian `W⁻¹L`. On top of that
//! sit verifiers for each eigenvalue interlacing statement: edge
//! deletion-contraction chains, quotients, merges, subgraph deletion, and
//! single-vertex weight decrease. Exact claims stay exact: the verifier for
//! deletion-contraction also re-derives the polynomial identity
//! `P_G = P_{G−e} − ε(e)·P_{G/e}` in rational arithmetic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::charpoly::charpoly;
use crate::field::{laplacian_matrix, LaplacianKind};
use crate::graph::{EdgeId, VertexId, VertexPartition, WeightedGraph};
use crate::rat::{rat_to_f64, Rat};
use crate::{Error, Result};

/// Absolute tolerance for all interlacing comparisons and kernel counting.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Convergence threshold on the off-diagonal Frobenius norm.
const JACOBI_THRESHOLD: f64 = 1e-13;

/// Sweep cap before the iteration reports failure.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Ascending eigenvalue list with the tolerance its comparisons use.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    tol: f64,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values, tol }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Number of eigenvalues within `tol` of zero.
    pub fn kernel_multiplicity(&self) -> usize {
        self.multiplicity_near(0.0)
    }

    /// Number of eigenvalues within `tol` of `x`.
    pub fn multiplicity_near(&self, x: f64) -> usize {
        self.values.iter().filter(|v| (*v - x).abs() <= self.tol).count()
    }

    pub fn min_is_nonnegative(&self) -> bool {
        self.values.first().is_none_or(|v| *v >= -self.tol)
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumDoc {
    eigenvalues: Vec<f64>,
    tol: f64,
}

pub fn serialize_spectrum(s: &Spectrum) -> String {
    let doc = SpectrumDoc {
        eigenvalues: s.values.clone(),
        tol: s.tol,
    };
    serde_json::to_string(&doc).expect("spectrum document serialises")
}

pub fn parse_spectrum(document: &str) -> Result<Spectrum> {
    let doc: SpectrumDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Spectrum::new(doc.eigenvalues, doc.tol))
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += a[p][q] * a[p][q];
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns ascending
/// eigenvalues and matching orthonormal eigenvectors.
pub(crate) fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut vectors = vec![vec![0.0; n]; n];
    for (i, row) in vectors.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_THRESHOLD {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if tau.abs() < 1e150 {
                    tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
                } else {
                    1.0 / (2.0 * tau)
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                for row in vectors.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= JACOBI_THRESHOLD {
        return Err(Error::NoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let columns = order
        .iter()
        .map(|&i| (0..n).map(|k| vectors[k][i]).collect())
        .collect();
    Ok((values, columns))
}

/// Positive per-vertex masses for the symmetric conjugation under `kind`.
fn conjugation_weights(g: &WeightedGraph, kind: LaplacianKind) -> Result<Vec<f64>> {
    match kind {
        LaplacianKind::Combinatorial => Ok(vec![1.0; g.vertex_count()]),
        LaplacianKind::Weighted => Ok(g
            .vertices()
            .iter()
            .map(|(_, w)| rat_to_f64(w))
            .collect()),
        LaplacianKind::Normalised => {
            let mut out = Vec::with_capacity(g.vertex_count());
            for (id, _) in g.vertices() {
                let d = g.degree(id)?;
                if d == Rat::default() {
                    return Err(Error::IsolatedVertex(id.to_string()));
                }
                out.push(rat_to_f64(&d));
            }
            Ok(out)
        }
    }
}

fn conjugated_laplacian(g: &WeightedGraph, kind: LaplacianKind) -> Result<Vec<Vec<f64>>> {
    let weights = conjugation_weights(g, kind)?;
    let l = laplacian_matrix(g, LaplacianKind::Combinatorial)
        .expect("combinatorial laplacian always exists")
        .to_f64();
    let n = weights.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = l[i][j] / (weights[i] * weights[j]).sqrt();
        }
    }
    Ok(a)
}

/// Laplacian spectrum of the requested kind, ascending, default tolerance.
pub fn eigenvalues(g: &WeightedGraph, kind: LaplacianKind) -> Result<Spectrum> {
    let (values, _) = symmetric_eigen(conjugated_laplacian(g, kind)?)?;
    Ok(Spectrum::new(values, DEFAULT_TOL))
}

/// Weighted-Laplacian eigenpairs: ascending eigenvalues and eigenvectors of
/// `W⁻¹L` (conjugate vectors mapped back through `W^{−1/2}`).
pub(crate) fn weighted_eigenpairs(g: &WeightedGraph) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let weights = conjugation_weights(g, LaplacianKind::Weighted)?;
    let (values, conjugate) = symmetric_eigen(conjugated_laplacian(g, LaplacianKind::Weighted)?)?;
    let vectors = conjugate
        .into_iter()
        .map(|col| {
            col.into_iter()
                .zip(&weights)
                .map(|(x, w)| x / w.sqrt())
                .collect()
        })
        .collect();
    Ok((values, vectors))
}

/// Shifted interlacing `A_i ≤ B_i ≤ A_{i+k}`, all comparisons slack by the
/// larger of the two tolerances. Sizes must satisfy `|B| = |A| − k`.
pub fn interlaces(a: &Spectrum, b: &Spectrum, k: usize) -> Result<bool> {
    if a.len() < k || b.len() != a.len() - k {
        return Err(Error::SpectrumSize {
            expected: a.len().saturating_sub(k),
            got: b.len(),
        });
    }
    let tol = a.tol.max(b.tol);
    for i in 0..b.len() {
        if a.values[i] > b.values[i] + tol || b.values[i] > a.values[i + k] + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One-sided comparison helper honouring the convention that out-of-range
/// indices impose no constraint. `lhs[i] ≤ rhs[j]` for 1-based `i`, `j`.
fn le_at(lhs: &Spectrum, i: isize, rhs: &Spectrum, j: isize, tol: f64) -> bool {
    let (n, m) = (lhs.len() as isize, rhs.len() as isize);
    if i < 1 || i > n || j < 1 || j > m {
        return true;
    }
    lhs.values[(i - 1) as usize] <= rhs.values[(j - 1) as usize] + tol
}

/// Full deletion-contraction verification for one nonloop edge:
///
/// - the float chain `μ₁ ≤ λ₁ ≤ ν₁ ≤ μ₂ ≤ … ≤ ν_{n−1} ≤ μ_n ≤ λ_n` over the
///   spectra of G, G−e, G/e;
/// - the exact polynomial identity `P_G = P_{G−e} − ε(e)·P_{G/e}`;
/// - each float ν is a root of the exact `P_{G/e}` within 1e−6 of its
///   residual scale.
pub fn verify_delcon_chain(g: &WeightedGraph, e: EdgeId) -> Result<bool> {
    let rec = g.edge(e)?;
    if rec.is_loop() {
        return Err(Error::LoopContraction);
    }
    let weight = rec.weight.clone();
    let deleted = g.delete_edge(e)?;
    let contracted = g.contract_edge(e)?;
    let lambda = eigenvalues(g, LaplacianKind::Weighted)?;
    let mu = eigenvalues(&deleted, LaplacianKind::Weighted)?;
    let nu = eigenvalues(&contracted, LaplacianKind::Weighted)?;
    let tol = lambda.tol;
    let n = lambda.len();
    for i in 1..=n as isize {
        if !le_at(&mu, i, &lambda, i, tol)
            || !le_at(&lambda, i, &nu, i, tol)
            || !le_at(&nu, i, &mu, i + 1, tol)
        {
            return Ok(false);
        }
    }
    let p_g = charpoly(g);
    let p_del = charpoly(&deleted);
    let p_con = charpoly(&contracted);
    if p_g != p_del.sub(&p_con.scale(&weight)) {
        return Ok(false);
    }
    for &root in nu.values() {
        if p_con.eval_f64(root).abs() > 1e-6 * p_con.residual_scale(root) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quotient interlacing for the requested Laplacian kind:
/// weighted and normalised get `λ_i ≤ μ_i ≤ λ_{i+k}`; combinatorial gets the
/// weaker `λ_i ≤ μ_i ≤ λ_{i+q+k}` where q counts blocks of size ≥ 2.
pub fn verify_quotient(
    g: &WeightedGraph,
    partition: &VertexPartition,
    kind: LaplacianKind,
) -> Result<bool> {
    partition.validate_for(g)?;
    let quotient = g.quotient(partition)?;
    let lambda = eigenvalues(g, kind)?;
    let mu = eigenvalues(&quotient, kind)?;
    let k = g.vertex_count() - quotient.vertex_count();
    match kind {
        LaplacianKind::Weighted | LaplacianKind::Normalised => interlaces(&lambda, &mu, k),
        LaplacianKind::Combinatorial => {
            let q = partition.coarse_block_count();
            let tol = lambda.tol;
            for i in 1..=mu.len() as isize {
                if !le_at(&lambda, i, &mu, i, tol)
                    || !le_at(&mu, i, &lambda, i + (q + k) as isize, tol)
                {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Merge interlacing `μ_{i−s+c+k} ≤ λ_i ≤ μ_{i+s−b}` between the weighted
/// spectra of `g` and of the merge `g + h`, where h has s vertices and c
/// components, k vertices of h are new, and b of h's eigenvalues reach
/// `λ_n − tol` (ties count toward b; a failure caused by a strict tie is
/// worth investigating rather than masking).
pub fn verify_merge(g: &WeightedGraph, h: &WeightedGraph) -> Result<bool> {
    let merged = g.merge(h)?;
    let lambda = eigenvalues(g, LaplacianKind::Weighted)?;
    let mu = eigenvalues(&merged, LaplacianKind::Weighted)?;
    let n = lambda.len();
    if n == 0 {
        return Ok(true);
    }
    let eta = eigenvalues(h, LaplacianKind::Weighted)?;
    let tol = lambda.tol;
    let top = lambda.values[n - 1];
    let s = h.vertex_count() as isize;
    let c = h.component_count() as isize;
    let k = (merged.vertex_count() - g.vertex_count()) as isize;
    let b = eta.values.iter().filter(|x| **x >= top - tol).count() as isize;
    for i in 1..=n as isize {
        if !le_at(&mu, i - s + c + k, &lambda, i, tol)
            || !le_at(&lambda, i, &mu, i + s - b, tol)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Subgraph-deletion interlacing. `r` is the deleted edge set, `s` a set of
/// vertices isolated by the deletion which are removed as well. For the
/// weighted and combinatorial kinds the bounds are
/// `λ_{i−s+c+k} ≤ μ_i ≤ λ_{i+k}`; the normalised kind instead bounds above
/// by `λ_{i+s−b}` with b the number of bipartite components among the
/// deleted edges, and requires `s` to be all of the isolated vertices.
pub fn verify_subgraph_deletion(
    g: &WeightedGraph,
    r: &BTreeSet<EdgeId>,
    s: &BTreeSet<VertexId>,
    kind: LaplacianKind,
) -> Result<bool> {
    let remainder = g.without_edges(r)?;
    for v in s {
        if remainder.degree(v)? != Rat::default() {
            return Err(Error::InvalidVertexSet(format!(
                "vertex {v} is not isolated after deleting the edges"
            )));
        }
    }
    if kind == LaplacianKind::Normalised {
        for (id, _) in remainder.vertices() {
            if remainder.degree(id)? == Rat::default() && !s.contains(id) {
                return Err(Error::InvalidVertexSet(format!(
                    "normalised deletion must remove every isolated vertex, missing {id}"
                )));
            }
        }
    }
    let target = remainder.without_vertices(s)?;
    let pulled = g.induced_by_edges(r)?;
    let lambda = eigenvalues(g, kind)?;
    let mu = eigenvalues(&target, kind)?;
    let tol = lambda.tol;
    let k = s.len() as isize;
    let sv = pulled.vertex_count() as isize;
    let c = pulled.component_count() as isize;
    let b = pulled.bipartite_component_count() as isize;
    for i in 1..=mu.len() as isize {
        let upper = match kind {
            LaplacianKind::Normalised => i + sv - b,
            _ => i + k,
        };
        if !le_at(&lambda, i - sv + c + k, &mu, i, tol) || !le_at(&mu, i, &lambda, upper, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Interlacing `λ_1 ≤ μ_1 ≤ λ_2 ≤ … ≤ λ_n ≤ μ_n` after decreasing the
/// weight of one vertex to `new_weight`.
pub fn verify_vertex_weight_decrease(
    g: &WeightedGraph,
    v: &VertexId,
    new_weight: &Rat,
) -> Result<bool> {
    let old = g.vertex_weight(v)?;
    if *new_weight <= Rat::default() || new_weight >= old {
        return Err(Error::Weights(format!(
            "new weight must lie strictly between 0 and the current weight of {v}"
        )));
    }
    let decreased = WeightedGraph::new(
        g.vertices()
            .iter()
            .map(|(id, w)| {
                let w = if id == v { new_weight.clone() } else { w.clone() };
                (id.clone(), w)
            })
            .collect::<Vec<_>>(),
        g.edges()
            .iter()
            .map(|e| (e.u.clone(), e.v.clone(), e.weight.clone()))
            .collect::<Vec<_>>(),
    )?;
    let lambda = eigenvalues(g, LaplacianKind::Weighted)?;
    let mu = eigenvalues(&decreased, LaplacianKind::Weighted)?;
    let tol = lambda.tol;
    for i in 1..=lambda.len() as isize {
        if !le_at(&lambda, i, &mu, i, tol) || !le_at(&mu, i, &lambda, i + 1, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cross-validation of the exact and float paths: the roots of the scaled
/// characteristic polynomial, expanded by multiplicity, must match the
/// Jacobi spectrum pairwise within `tol`.
pub fn float_spectrum_matches_charpoly(g: &WeightedGraph, tol: f64) -> Result<bool> {
    let spectrum = eigenvalues(g, LaplacianKind::Weighted)?;
    let mut exact = Vec::with_capacity(g.vertex_count());
    if g.vertex_count() > 0 {
        for (root, mult) in charpoly(g).real_roots() {
            for _ in 0..mult {
                exact.push(root);
            }
        }
    }
    if exact.len() != spectrum.len() {
        return Ok(false);
    }
    Ok(exact
        .iter()
        .zip(spectrum.values())
        .all(|(a, b)| (a - b).abs() <= tol))
}
