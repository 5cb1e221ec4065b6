//! Isoperimetric cuts and the spectral bounds they certify: the weighted
//! Cheeger inequality, sweep cuts from mean-zero scalar fields, and the
//! independence and chromatic bounds driven by the largest eigenvalue.
//!
//! Cut ratios and quadratic forms are exact rationals; only eigenvalues
//! enter as floats, slackened by [`crate::spectra::DEFAULT_TOL`].

use std::collections::BTreeSet;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::field::{gradient, inner_scalar, inner_vector, LaplacianKind, ScalarField};
use crate::graph::{VertexId, WeightedGraph};
use crate::rat::{f64_to_rat, format_rat, parse_rat, rat_to_f64, Rat};
use crate::spectra::{eigenvalues, weighted_eigenpairs, DEFAULT_TOL};
use crate::{Error, Result};

/// Exhaustive cut search is limited to this many vertices.
pub const BRUTE_FORCE_CAP: usize = 16;

/// Denominator used when a float eigenvector is rationalised into a field.
const SWEEP_FIELD_DENOMINATOR: u64 = 1 << 31;

/// One cut with its exact boundary weight and isoperimetric ratio. The
/// `constant` field carries the global minimum when the report came from
/// exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutReport {
    pub cut: Vec<VertexId>,
    pub boundary_weight: Rat,
    pub ratio: Rat,
    pub constant: Option<Rat>,
}

/// Total weight of edges with exactly one endpoint in `s`. Loops never
/// cross a cut.
pub fn boundary_weight(g: &WeightedGraph, s: &BTreeSet<VertexId>) -> Result<Rat> {
    for v in s {
        g.vertex_index(v)?;
    }
    let mut total = Rat::zero();
    for e in g.edges() {
        if s.contains(&e.u) != s.contains(&e.v) {
            total += &e.weight;
        }
    }
    Ok(total)
}

/// Isoperimetric ratio θ(s) = ε(∇s) / min(υ(s), υ(sᶜ)) of a proper
/// nonempty vertex set.
pub fn isoperimetric_ratio(g: &WeightedGraph, s: &BTreeSet<VertexId>) -> Result<Rat> {
    if s.is_empty() || s.len() >= g.vertex_count() {
        return Err(Error::InvalidVertexSet(
            "cut must be a proper nonempty vertex set".into(),
        ));
    }
    let numerator = boundary_weight(g, s)?;
    let mut inside = Rat::zero();
    let mut outside = Rat::zero();
    for (v, w) in g.vertices() {
        if s.contains(v) {
            inside += w;
        } else {
            outside += w;
        }
    }
    Ok(numerator / inside.min(outside))
}

/// Exact Rayleigh quotient ⟨∇f, ∇f⟩ / ⟨f, f⟩ of a nonzero scalar field.
pub fn rayleigh_quotient(g: &WeightedGraph, f: &ScalarField) -> Result<Rat> {
    f.check_domain(g)?;
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    let grad = gradient(g, f)?;
    Ok(inner_vector(g, &grad, &grad)? / inner_scalar(g, f, f)?)
}

/// Largest ratio of weighted degree to vertex weight.
pub fn max_degree_ratio(g: &WeightedGraph) -> Result<Rat> {
    let mut best: Option<Rat> = None;
    for (v, w) in g.vertices() {
        let ratio = g.degree(v)? / w;
        best = Some(match best {
            Some(b) => b.max(ratio),
            None => ratio,
        });
    }
    best.ok_or_else(|| Error::SizeLimit("graph has no vertices".into()))
}

fn check_brute_size(g: &WeightedGraph) -> Result<()> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::SizeLimit(
            "cut search needs at least two vertices".into(),
        ));
    }
    if n > BRUTE_FORCE_CAP {
        return Err(Error::SizeLimit(format!(
            "cut search is capped at {BRUTE_FORCE_CAP} vertices, got {n}"
        )));
    }
    Ok(())
}

/// Exhaustive minimum of θ over all proper nonempty vertex sets.
///
/// Ties break towards the lexicographically least sorted vertex list, so
/// the report is deterministic.
pub fn isoperimetric_constant(g: &WeightedGraph) -> Result<CutReport> {
    check_brute_size(g)?;
    let n = g.vertex_count();
    let ids: Vec<&VertexId> = g.vertices().iter().map(|(v, _)| v).collect();
    let weights: Vec<&Rat> = g.vertices().iter().map(|(_, w)| w).collect();
    let total: Rat = weights.iter().copied().cloned().sum();

    // Edge endpoints as index pairs; loops drop out of every boundary.
    let pairs: Vec<(usize, usize, &Rat)> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| {
            (
                g.vertex_index(&e.u).expect("endpoint exists"),
                g.vertex_index(&e.v).expect("endpoint exists"),
                &e.weight,
            )
        })
        .collect();

    let mut best: Option<(Rat, Rat, Vec<VertexId>)> = None;
    for mask in 1u32..(1u32 << n) - 1 {
        let mut inside = Rat::zero();
        for (i, w) in weights.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inside += *w;
            }
        }
        let outside = &total - &inside;
        let mut boundary = Rat::zero();
        for (a, b, w) in &pairs {
            if (mask >> a) & 1 != (mask >> b) & 1 {
                boundary += *w;
            }
        }
        let ratio = boundary.clone() / inside.min(outside);
        let cut: Vec<VertexId> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| ids[i].clone())
            .collect();
        let better = match &best {
            None => true,
            Some((r, _, c)) => ratio < *r || (ratio == *r && cut < *c),
        };
        if better {
            best = Some((ratio, boundary, cut));
        }
    }
    let (ratio, boundary, cut) = best.expect("n >= 2 yields at least two cuts");
    Ok(CutReport {
        cut,
        boundary_weight: boundary,
        constant: Some(ratio.clone()),
        ratio,
    })
}

/// Best threshold cut S_t = {v : f(v) ≤ t} of a nonzero mean-zero field.
///
/// The returned cut satisfies θ(S_t)²/2 ≤ RQ(f) · max d/υ, which is
/// asserted exactly; thresholds run over the distinct values of `f`.
pub fn sweep_cut(g: &WeightedGraph, f: &ScalarField) -> Result<CutReport> {
    if g.vertex_count() < 2 {
        return Err(Error::SizeLimit(
            "sweep needs at least two vertices".into(),
        ));
    }
    f.check_domain(g)?;
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    let mut distinct: Vec<&Rat> = f.values().values().collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() == 1 {
        return Err(Error::ConstantField);
    }
    let mean: Rat = g
        .vertices()
        .iter()
        .map(|(v, w)| f.value(v).expect("domain checked") * w)
        .sum();
    if !mean.is_zero() {
        return Err(Error::NotMeanZero);
    }

    let mut best: Option<(Rat, Rat, BTreeSet<VertexId>)> = None;
    for &t in &distinct[..distinct.len() - 1] {
        let s: BTreeSet<VertexId> = g
            .vertices()
            .iter()
            .filter(|(v, _)| f.value(v).expect("domain checked") <= t)
            .map(|(v, _)| v.clone())
            .collect();
        let ratio = isoperimetric_ratio(g, &s)?;
        if best.as_ref().map_or(true, |(r, _, _)| ratio < *r) {
            let boundary = boundary_weight(g, &s)?;
            best = Some((ratio, boundary, s));
        }
    }
    let (ratio, boundary, s) = best.expect("a nonconstant field has a proper level set");

    let guarantee = rayleigh_quotient(g, f)? * max_degree_ratio(g)?;
    if &ratio * &ratio > guarantee.clone() + guarantee {
        return Err(Error::Internal(
            "sweep cut violates the spectral guarantee".into(),
        ));
    }
    Ok(CutReport {
        cut: s.into_iter().collect(),
        boundary_weight: boundary,
        ratio,
        constant: None,
    })
}

/// Subtract the υ-weighted mean so the field integrates to zero.
pub fn mean_zero_project(g: &WeightedGraph, f: &ScalarField) -> Result<ScalarField> {
    f.check_domain(g)?;
    let mean: Rat = g
        .vertices()
        .iter()
        .map(|(v, w)| f.value(v).expect("domain checked") * w)
        .sum();
    let shift = mean / g.total_vertex_weight();
    let values: Vec<Rat> = g
        .vertices()
        .iter()
        .map(|(v, _)| f.value(v).expect("domain checked") - &shift)
        .collect();
    ScalarField::from_values(g, &values)
}

/// Rationalised second eigenvector of the weighted Laplacian, projected to
/// exact mean zero; the canonical input for [`sweep_cut`].
pub fn spectral_sweep_field(g: &WeightedGraph) -> Result<ScalarField> {
    if g.vertex_count() < 2 {
        return Err(Error::SizeLimit(
            "sweep field needs at least two vertices".into(),
        ));
    }
    let (_, vectors) = weighted_eigenpairs(g)?;
    let values: Vec<Rat> = vectors[1]
        .iter()
        .map(|&x| f64_to_rat(x, SWEEP_FIELD_DENOMINATOR))
        .collect();
    let f = ScalarField::from_values(g, &values)?;
    let projected = mean_zero_project(g, &f)?;
    if projected.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(projected)
}

/// Both sides of the weighted Cheeger inequality:
/// λ₂/2 ≤ θ ≤ √(2 λ₂ max d/υ), with θ exact and λ₂ float.
pub fn cheeger_check(g: &WeightedGraph) -> Result<bool> {
    let report = isoperimetric_constant(g)?;
    let theta = rat_to_f64(&report.ratio);
    let lambda2 = eigenvalues(g, LaplacianKind::Weighted)?.values()[1].max(0.0);
    let ratio = rat_to_f64(&max_degree_ratio(g)?);
    let lower = lambda2 / 2.0 <= theta + DEFAULT_TOL;
    let upper = theta <= (2.0 * lambda2 * ratio).sqrt() + DEFAULT_TOL;
    Ok(lower && upper)
}

/// Index sets of vertices that can enter an independent set: loopless, by
/// the convention that a loop joins a vertex to itself.
fn independence_candidates(g: &WeightedGraph) -> Vec<usize> {
    let mut looped = vec![false; g.vertex_count()];
    for e in g.edges() {
        if e.is_loop() {
            let i = g.vertex_index(&e.u).expect("endpoint exists");
            looped[i] = true;
        }
    }
    (0..g.vertex_count()).filter(|&i| !looped[i]).collect()
}

/// Verify υ(S) ≤ υ(V)(λₙ − d(S)/υ(S))/λₙ for every nonempty independent
/// set S, enumerated by brute force.
pub fn independence_check(g: &WeightedGraph) -> Result<bool> {
    check_brute_size(g)?;
    if g.edges().iter().all(|e| e.is_loop()) {
        return Err(Error::NoEdges(
            "independence bound needs a nonloop edge".into(),
        ));
    }
    let candidates = independence_candidates(g);
    let mut adjacency = vec![0u32; g.vertex_count()];
    for e in g.edges() {
        if !e.is_loop() {
            let a = g.vertex_index(&e.u)?;
            let b = g.vertex_index(&e.v)?;
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
    }
    let lambda_n = eigenvalues(g, LaplacianKind::Weighted)?
        .max()
        .expect("nonempty spectrum");
    let total_weight = rat_to_f64(&g.total_vertex_weight());

    let k = candidates.len();
    for mask in 1u32..1u32 << k {
        let mut bits = 0u32;
        for (j, &i) in candidates.iter().enumerate() {
            if mask & (1 << j) != 0 {
                bits |= 1 << i;
            }
        }
        if candidates
            .iter()
            .any(|&i| bits & (1 << i) != 0 && adjacency[i] & bits != 0)
        {
            continue;
        }
        let mut weight = Rat::zero();
        let mut degree = Rat::zero();
        for &i in &candidates {
            if bits & (1 << i) != 0 {
                let (v, w) = &g.vertices()[i];
                weight += w;
                degree += g.degree(v)?;
            }
        }
        let lhs = rat_to_f64(&weight);
        let rhs = total_weight * (lambda_n - rat_to_f64(&(degree / weight))) / lambda_n;
        if lhs > rhs + DEFAULT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

fn colourable(adjacency: &[u32], order: &[usize], colours: &mut [u32], at: usize, k: u32) -> bool {
    if at == order.len() {
        return true;
    }
    let v = order[at];
    let mut used = 0;
    for &u in &order[..at] {
        if adjacency[v] & (1 << u) != 0 {
            used |= 1 << colours[u];
        }
    }
    let mut highest = 0;
    for &u in &order[..at] {
        highest = highest.max(colours[u] + 1);
    }
    // Colours beyond the first unused one are symmetric; skip them.
    for c in 0..k.min(highest + 1) {
        if used & (1 << c) == 0 {
            colours[v] = c;
            if colourable(adjacency, order, colours, at + 1, k) {
                return true;
            }
        }
    }
    false
}

/// Chromatic number of the loop-free simple support by backtracking.
fn chromatic_number(g: &WeightedGraph) -> u32 {
    let n = g.vertex_count();
    let mut adjacency = vec![0u32; n];
    let mut any = false;
    for e in g.edges() {
        if !e.is_loop() {
            let a = g.vertex_index(&e.u).expect("endpoint exists");
            let b = g.vertex_index(&e.v).expect("endpoint exists");
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
            any = true;
        }
    }
    if !any {
        return if n == 0 { 0 } else { 1 };
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(adjacency[i].count_ones()));
    let mut colours = vec![0u32; n];
    for k in 2..=n as u32 {
        if colourable(&adjacency, &order, &mut colours, 0, k) {
            return k;
        }
    }
    n as u32
}

/// Chromatic number versus the spectral lower bound λₙ/(λₙ − 2ε(E)/υ(V)).
///
/// Returns the exact χ, the float bound, and whether χ clears the bound.
pub fn chromatic_check(g: &WeightedGraph) -> Result<(u32, f64, bool)> {
    check_brute_size(g)?;
    if !g.is_loopless() {
        return Err(Error::Loops(
            "chromatic number is undefined with loops".into(),
        ));
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges("chromatic bound needs an edge".into()));
    }
    let chi = chromatic_number(g);
    let lambda_n = eigenvalues(g, LaplacianKind::Weighted)?
        .max()
        .expect("nonempty spectrum");
    let shift = rat_to_f64(&((g.total_edge_weight() + g.total_edge_weight()) / g.total_vertex_weight()));
    let denominator = lambda_n - shift;
    if denominator <= 0.0 {
        return Err(Error::Internal(
            "largest eigenvalue does not clear twice the mean edge weight".into(),
        ));
    }
    let bound = lambda_n / denominator;
    Ok((chi, bound, f64::from(chi) >= bound - DEFAULT_TOL))
}

#[derive(Serialize, Deserialize)]
struct CutReportDto {
    cut: Vec<String>,
    boundary: String,
    ratio: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<String>,
}

pub fn serialize_cut_report(report: &CutReport) -> String {
    let dto = CutReportDto {
        cut: report.cut.iter().map(|v| v.to_string()).collect(),
        boundary: format_rat(&report.boundary_weight),
        ratio: format_rat(&report.ratio),
        constant: report.constant.as_ref().map(format_rat),
    };
    serde_json::to_string(&dto).expect("cut report serialization cannot fail")
}

pub fn parse_cut_report(document: &str) -> Result<CutReport> {
    let dto: CutReportDto =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let cut = dto
        .cut
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<VertexId>>>()?;
    Ok(CutReport {
        cut,
        boundary_weight: parse_rat(&dto.boundary)?,
        ratio: parse_rat(&dto.ratio)?,
        constant: dto.constant.as_deref().map(parse_rat).transpose()?,
    })
}
