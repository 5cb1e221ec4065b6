//! The scaled characteristic polynomial `P(t) = det(tW_υ − L_ε)` by two
//! independent routes, plus spanning-forest expansions of its coefficients.
//!
//! The determinant route evaluates exact determinants at t = 0..n and
//! interpolates; the deletion-contraction route recurses on edges. The two
//! must agree everywhere, and the coefficients must match weighted forest
//! sums with alternating signs, which the tests and the verification suites
//! exercise against exhaustive enumeration.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::field::{laplacian_matrix, LaplacianKind};
use crate::graph::{EdgeId, EdgeRecord, VertexId, WeightedGraph};
use crate::poly::RatPoly;
use crate::rat::{int, Rat};
use crate::{Error, Result};

/// Vertex cap for exhaustive forest enumeration.
pub const FOREST_ENUMERATION_CAP: usize = 9;

/// Weighted spanning-forest sums grouped by component count.
///
/// Entry `k − 1` covers the k-component spanning forests: the total weight
/// `c_k = Σ_F Π_{T∈F} (Σ_{v∈T} υ(v) · Π_{e∈T} ε(e))` and the number of such
/// forests. `c_n` is always `Π υ(v)` (the edgeless forest), and `c_k = 0`
/// below the component count of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestWeightReport {
    pub coefficients: Vec<Rat>,
    pub counts: Vec<u64>,
}

impl ForestWeightReport {
    /// `c_k`, 1-based.
    pub fn coefficient(&self, k: usize) -> &Rat {
        &self.coefficients[k - 1]
    }

    /// Number of spanning forests with exactly `k` components, 1-based.
    pub fn forest_count(&self, k: usize) -> u64 {
        self.counts[k - 1]
    }
}

fn vertex_weight_product(g: &WeightedGraph) -> Rat {
    g.vertices()
        .iter()
        .fold(Rat::one(), |acc, (_, w)| acc * w)
}

/// `P(t) = det(tW_υ − L_ε)` via exact determinants at t = 0..n and Lagrange
/// interpolation. Degree n, leading coefficient Π υ(v), constant term 0
/// whenever the graph has a vertex.
pub fn charpoly(g: &WeightedGraph) -> RatPoly {
    let n = g.vertex_count();
    let l = laplacian_matrix(g, LaplacianKind::Combinatorial)
        .expect("combinatorial laplacian always exists");
    let mut points = Vec::with_capacity(n + 1);
    for t in 0..=n as i64 {
        let mut m = l.scale(&int(-1));
        for (i, (_, w)) in g.vertices().iter().enumerate() {
            *m.at_mut(i, i) += int(t) * w;
        }
        points.push((int(t), m.det()));
    }
    RatPoly::lagrange_interpolate(&points)
}

/// Same polynomial by deletion-contraction:
/// `P_G = P_{G−e} − ε(e)·P_{G/e}` on the least edge after simplification,
/// bottoming out at `(Π υ(v))·tⁿ` on edgeless graphs.
pub fn charpoly_dc(g: &WeightedGraph) -> RatPoly {
    let s = g.simplify();
    if s.edge_count() == 0 {
        return RatPoly::monomial(vertex_weight_product(&s), s.vertex_count());
    }
    let e = &s.edges()[0];
    let weight = e.weight.clone();
    let deleted = s.delete_edge(0).expect("edge 0 exists");
    let contracted = s.contract_edge(0).expect("simplified graphs are loopless");
    charpoly_dc(&deleted).sub(&charpoly_dc(&contracted).scale(&weight))
}

/// Union-find over vertex positions; the smallest index stays the root, so
/// component representatives are canonical.
#[derive(Clone)]
struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// False iff `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Vertex positions grouped by component, keyed by representative.
    fn components(&self) -> std::collections::BTreeMap<usize, Vec<usize>> {
        let mut out: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in 0..self.parent.len() {
            out.entry(self.find(x)).or_default().push(x);
        }
        out
    }
}

/// Visits every acyclic subset of the nonloop edges exactly once, with the
/// union-find state of its endpoints.
fn for_each_forest(
    g: &WeightedGraph,
    visit: &mut impl FnMut(&[EdgeId], &DisjointSets),
) {
    let nonloop: Vec<&EdgeRecord> = g.edges().iter().filter(|e| !e.is_loop()).collect();
    let ends: Vec<(usize, usize)> = nonloop
        .iter()
        .map(|e| {
            (
                g.vertex_index(&e.u).expect("endpoint is a vertex"),
                g.vertex_index(&e.v).expect("endpoint is a vertex"),
            )
        })
        .collect();
    fn recurse(
        i: usize,
        nonloop: &[&EdgeRecord],
        ends: &[(usize, usize)],
        taken: &mut Vec<EdgeId>,
        ds: &DisjointSets,
        visit: &mut impl FnMut(&[EdgeId], &DisjointSets),
    ) {
        if i == nonloop.len() {
            visit(taken, ds);
            return;
        }
        recurse(i + 1, nonloop, ends, taken, ds, visit);
        let mut joined = ds.clone();
        if joined.union(ends[i].0, ends[i].1) {
            taken.push(nonloop[i].id);
            recurse(i + 1, nonloop, ends, taken, &joined, visit);
            taken.pop();
        }
    }
    recurse(
        0,
        &nonloop,
        &ends,
        &mut Vec::new(),
        &DisjointSets::new(g.vertex_count()),
        visit,
    );
}

/// Exhaustive spanning-forest sums: for each component count k, the total
/// tree-factorised weight and the number of forests. Feasible only at desk
/// scale, hence the vertex cap.
pub fn forest_coefficients(g: &WeightedGraph) -> Result<ForestWeightReport> {
    let n = g.vertex_count();
    if n > FOREST_ENUMERATION_CAP {
        return Err(Error::SizeLimit(format!(
            "forest enumeration needs at most {FOREST_ENUMERATION_CAP} vertices, got {n}"
        )));
    }
    let mut coefficients = vec![Rat::zero(); n];
    let mut counts = vec![0u64; n];
    for_each_forest(g, &mut |taken, ds| {
        let k = n - taken.len();
        let mut weight = Rat::one();
        for (root, members) in ds.components() {
            let mut tree = Rat::zero();
            for &m in &members {
                tree += &g.vertices()[m].1;
            }
            for &e in taken {
                let rec = &g.edges()[e];
                let iu = g.vertex_index(&rec.u).expect("endpoint is a vertex");
                if ds.find(iu) == root {
                    tree *= &rec.weight;
                }
            }
            weight *= tree;
        }
        coefficients[k - 1] += weight;
        counts[k - 1] += 1;
    });
    Ok(ForestWeightReport {
        coefficients,
        counts,
    })
}

/// Principal minor `det L^Ŝ` of the edge-weight Laplacian, rows and columns
/// of `roots` deleted. Computed both by fraction-free elimination and by
/// enumerating spanning forests in which every component holds exactly one
/// root; the routes must agree and the common value is returned.
pub fn rooted_minor(g: &WeightedGraph, roots: &BTreeSet<VertexId>) -> Result<Rat> {
    let mut root_positions = BTreeSet::new();
    for v in roots {
        root_positions.insert(g.vertex_index(v)?);
    }
    let keep: Vec<usize> = (0..g.vertex_count())
        .filter(|i| !root_positions.contains(i))
        .collect();
    let l = laplacian_matrix(g, LaplacianKind::Combinatorial)
        .expect("combinatorial laplacian always exists");
    let by_minor = l.submatrix(&keep, &keep).det();

    let mut by_forests = Rat::zero();
    for_each_forest(g, &mut |taken, ds| {
        for members in ds.components().values() {
            let root_count = members
                .iter()
                .filter(|m| root_positions.contains(m))
                .count();
            if root_count != 1 {
                return;
            }
        }
        let mut weight = Rat::one();
        for &e in taken {
            weight *= &g.edges()[e].weight;
        }
        by_forests += weight;
    });

    if by_minor != by_forests {
        return Err(Error::Internal(format!(
            "rooted minor mismatch: elimination {by_minor} vs forest sum {by_forests}"
        )));
    }
    Ok(by_minor)
}

/// Checks the matrix-forest sign pattern: the t^k coefficient of `P` must be
/// `(−1)^{n−k} c_k`, with c_0 = 0.
pub fn matches_forest_expansion(g: &WeightedGraph, p: &RatPoly) -> Result<bool> {
    let n = g.vertex_count();
    let report = forest_coefficients(g)?;
    if !p.coeff(0).is_zero() && n >= 1 {
        return Ok(false);
    }
    for k in 1..=n {
        let expected = if (n - k) % 2 == 0 {
            report.coefficient(k).clone()
        } else {
            -report.coefficient(k).clone()
        };
        if p.coeff(k) != expected {
            return Ok(false);
        }
    }
    Ok(p.degree() == Some(n) || (n == 0 && p.degree() == Some(0)))
}

/// True iff the graph's forest sums say it is connected: `c_1 > 0`.
pub fn connected_by_forest_sum(report: &ForestWeightReport) -> bool {
    !report.coefficients.is_empty() && report.coefficients[0].is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_example, triangle, weighted_edge};
    use crate::graph::VertexPartition;
    use crate::rat::rat;

    fn poly(coeffs: &[Rat]) -> RatPoly {
        RatPoly::from_coeffs(coeffs.to_vec())
    }

    #[test]
    fn single_vertex_scales_t() {
        let g = WeightedGraph::new([(VertexId::single(0), rat(5, 2))], []).unwrap();
        assert_eq!(charpoly(&g), poly(&[int(0), rat(5, 2)]));
        assert_eq!(charpoly_dc(&g), poly(&[int(0), rat(5, 2)]));
    }

    #[test]
    fn empty_graph_gives_one() {
        let g = WeightedGraph::empty();
        assert_eq!(charpoly(&g), RatPoly::one());
        assert_eq!(charpoly_dc(&g), RatPoly::one());
    }

    #[test]
    fn k2_charpoly() {
        let g = WeightedGraph::unweighted(2, &[(0, 1)]);
        // det [[t−1, −(−1)... ]]: expanding tI − L gives t² − 2t.
        assert_eq!(charpoly(&g), poly(&[int(0), int(-2), int(1)]));
        // One recursion step by hand: t² − 1·(2t).
        assert_eq!(charpoly_dc(&g), poly(&[int(0), int(-2), int(1)]));
    }

    #[test]
    fn k3_charpoly_and_forests() {
        let g = triangle();
        let expect = poly(&[int(0), int(9), int(-6), int(1)]);
        assert_eq!(charpoly(&g), expect);
        assert_eq!(charpoly_dc(&g), expect);
        let report = forest_coefficients(&g).unwrap();
        assert_eq!(report.coefficient(1), &int(9));
        assert_eq!(report.coefficient(2), &int(6));
        assert_eq!(report.coefficient(3), &int(1));
        assert_eq!(report.forest_count(1), 3);
        assert_eq!(report.forest_count(2), 3);
        assert_eq!(report.forest_count(3), 1);
        assert!(matches_forest_expansion(&g, &expect).unwrap());
    }

    #[test]
    fn weighted_edge_charpoly() {
        // Symbolic 2×2 determinant: ab·t² − w(a+b)·t.
        let g = weighted_edge(int(2), int(1), int(3));
        let expect = poly(&[int(0), int(-9), int(2)]);
        assert_eq!(charpoly(&g), expect);
        assert_eq!(charpoly_dc(&g), expect);
        let report = forest_coefficients(&g).unwrap();
        assert_eq!(report.coefficient(1), &int(9));
        assert_eq!(report.coefficient(2), &int(2));
        assert_eq!(report.counts, vec![1, 1]);
    }

    #[test]
    fn edgeless_base_case() {
        let g = WeightedGraph::new(
            [(VertexId::single(0), int(3)), (VertexId::single(1), int(2))],
            [],
        )
        .unwrap();
        assert_eq!(charpoly_dc(&g), poly(&[int(0), int(0), int(6)]));
        let report = forest_coefficients(&g).unwrap();
        assert_eq!(report.coefficients, vec![int(0), int(6)]);
        assert!(!connected_by_forest_sum(&report));
    }

    #[test]
    fn routes_agree_on_running_example() {
        let g = running_example();
        let p = charpoly(&g);
        assert_eq!(p, charpoly_dc(&g));
        assert_eq!(p.degree(), Some(4));
        assert_eq!(p.coeff(4), vertex_weight_product(&g));
        assert!(p.coeff(0).is_zero());
        assert!(matches_forest_expansion(&g, &p).unwrap());
    }

    #[test]
    fn invariant_under_simplify_and_loops() {
        let g = running_example();
        assert_eq!(charpoly(&g), charpoly(&g.simplify()));
        let mut edges: Vec<(VertexId, VertexId, Rat)> = g
            .edges()
            .iter()
            .map(|e| (e.u.clone(), e.v.clone(), e.weight.clone()))
            .collect();
        edges.push((VertexId::single(2), VertexId::single(2), rat(7, 3)));
        let looped = WeightedGraph::new(g.vertices().to_vec(), edges).unwrap();
        assert_eq!(charpoly(&looped), charpoly(&g));
    }

    #[test]
    fn disjoint_union_multiplies() {
        let a = triangle();
        let b = WeightedGraph::new(
            [(VertexId::single(7), int(2)), (VertexId::single(8), int(1))],
            [(VertexId::single(7), VertexId::single(8), int(3))],
        )
        .unwrap();
        let both = a.merge(&b).unwrap();
        assert_eq!(charpoly(&both), charpoly(&a).mul(&charpoly(&b)));
    }

    /// Substitution t ↦ c·t, used to state the weight-scaling laws.
    fn stretch(p: &RatPoly, c: &Rat) -> RatPoly {
        let coeffs = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let mut power = Rat::one();
                for _ in 0..k {
                    power *= c;
                }
                a * power
            })
            .collect();
        RatPoly::from_coeffs(coeffs)
    }

    #[test]
    fn weight_scaling_laws() {
        let g = running_example();
        let c = rat(3, 2);
        let n = g.vertex_count();
        // Scaling υ by c turns P(t) into P(ct).
        let scaled_v = WeightedGraph::new(
            g.vertices()
                .iter()
                .map(|(id, w)| (id.clone(), w * &c))
                .collect::<Vec<_>>(),
            g.edges()
                .iter()
                .map(|e| (e.u.clone(), e.v.clone(), e.weight.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(charpoly(&scaled_v), stretch(&charpoly(&g), &c));
        // Scaling ε by c turns P(t) into cⁿ·P(t/c).
        let scaled_e = WeightedGraph::new(
            g.vertices().to_vec(),
            g.edges()
                .iter()
                .map(|e| (e.u.clone(), e.v.clone(), &e.weight * &c))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mut cn = Rat::one();
        for _ in 0..n {
            cn *= &c;
        }
        let inv = Rat::one() / &c;
        assert_eq!(
            charpoly(&scaled_e),
            stretch(&charpoly(&g), &inv).scale(&cn)
        );
    }

    #[test]
    fn quotient_drops_degree_but_keeps_total_weight() {
        // Lead coefficient is Π υ, so quotients change it predictably.
        let g = triangle();
        let pi = VertexPartition::new([
            vec![VertexId::single(0), VertexId::single(1)],
            vec![VertexId::single(2)],
        ]);
        let q = g.quotient(&pi).unwrap();
        let p = charpoly(&q);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.coeff(2), int(2));
    }

    #[test]
    fn disconnected_graph_has_zero_low_coefficients() {
        let g = WeightedGraph::unweighted(4, &[(0, 1), (2, 3)]);
        let report = forest_coefficients(&g).unwrap();
        assert!(report.coefficient(1).is_zero());
        assert_eq!(report.forest_count(1), 0);
        assert!(report.coefficient(2).is_positive());
        assert!(!connected_by_forest_sum(&report));
        assert!(connected_by_forest_sum(
            &forest_coefficients(&triangle()).unwrap()
        ));
    }

    #[test]
    fn forest_enumeration_cap() {
        let g = WeightedGraph::unweighted(10, &[]);
        assert!(matches!(
            forest_coefficients(&g),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn rooted_minor_hand_values() {
        let k2 = WeightedGraph::unweighted(2, &[(0, 1)]);
        let s: BTreeSet<VertexId> = [VertexId::single(0)].into();
        assert_eq!(rooted_minor(&k2, &s).unwrap(), int(1));
        let k3 = triangle();
        // Deleting one row and column leaves [[2,−1],[−1,2]] with det 3,
        // matching the spanning-tree count.
        for v in 0..3 {
            let s: BTreeSet<VertexId> = [VertexId::single(v)].into();
            assert_eq!(rooted_minor(&k3, &s).unwrap(), int(3));
        }
    }

    #[test]
    fn rooted_minor_edge_cases() {
        let g = triangle();
        let all: BTreeSet<VertexId> = g.vertices().iter().map(|(id, _)| id.clone()).collect();
        assert_eq!(rooted_minor(&g, &all).unwrap(), int(1));
        assert_eq!(rooted_minor(&g, &BTreeSet::new()).unwrap(), int(0));
        let foreign: BTreeSet<VertexId> = [VertexId::single(9)].into();
        assert!(rooted_minor(&g, &foreign).is_err());
    }

    #[test]
    fn rooted_minor_weighted_pair_of_roots() {
        // Path 0−1−2 with edge weights 2 and 5; roots {0, 2}. The only
        // 2-rooted forests are the single edges and the empty pairing is
        // excluded because component {1} holds no root: 2 + 5.
        let g = WeightedGraph::new(
            [
                (VertexId::single(0), int(1)),
                (VertexId::single(1), int(1)),
                (VertexId::single(2), int(1)),
            ],
            [
                (VertexId::single(0), VertexId::single(1), int(2)),
                (VertexId::single(1), VertexId::single(2), int(5)),
            ],
        )
        .unwrap();
        let s: BTreeSet<VertexId> = [VertexId::single(0), VertexId::single(2)].into();
        assert_eq!(rooted_minor(&g, &s).unwrap(), int(7));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
            (
                1usize..6,
                proptest::collection::vec((0i64..6, 0i64..6, 1i64..5), 0..8),
            )
                .prop_map(|(n, raw)| {
                    let vertices: Vec<(VertexId, Rat)> = (0..n as i64)
                        .map(|l| (VertexId::single(l), rat(2 + (l % 3), 1 + (l % 2))))
                        .collect();
                    let edges: Vec<(VertexId, VertexId, Rat)> = raw
                        .into_iter()
                        .filter(|(a, b, _)| (*a as usize) < n && (*b as usize) < n)
                        .map(|(a, b, w)| (VertexId::single(a), VertexId::single(b), rat(w, 2)))
                        .collect();
                    WeightedGraph::new(vertices, edges).unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn determinant_route_equals_recursion(g in arb_graph()) {
                prop_assert_eq!(charpoly(&g), charpoly_dc(&g));
            }

            #[test]
            fn coefficients_match_forest_sums(g in arb_graph()) {
                let p = charpoly(&g);
                prop_assert!(matches_forest_expansion(&g, &p).unwrap());
            }

            #[test]
            fn structure_of_charpoly(g in arb_graph()) {
                let p = charpoly(&g);
                prop_assert_eq!(p.degree(), Some(g.vertex_count()));
                prop_assert_eq!(p.coeff(g.vertex_count()), vertex_weight_product(&g));
                prop_assert!(p.coeff(0).is_zero());
                let report = forest_coefficients(&g).unwrap();
                prop_assert_eq!(connected_by_forest_sum(&report), g.is_connected());
            }
        }
    }
}
