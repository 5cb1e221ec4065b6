//! Batch front end: compute artifacts from graph-JSON files and run the
//! seeded verification suites.
//!
//! Results go to standard out as JSON lines; human-readable summaries and
//! error messages go to the error stream. Exit codes: 0 success, 1 failed
//! property, 2 parse error, 3 precondition violation.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use lapforge_core::bounds::{
    cheeger_check, chromatic_check, independence_check, isoperimetric_constant,
    serialize_cut_report, spectral_sweep_field, sweep_cut,
};
use lapforge_core::charpoly::charpoly;
use lapforge_core::corpus::{
    item_rng, random_connected_graph, random_connected_loopless_graph, random_forest,
    random_graph, random_loopless_graph, random_partition, random_tiling, random_vertex_subset,
    weight_menu, SplitMix64,
};
use lapforge_core::field::LaplacianKind;
use lapforge_core::graph::{parse_graph, serialize_graph, VertexId, WeightedGraph};
use lapforge_core::poly::serialize_poly;
use lapforge_core::rat::{int, rat, Rat};
use lapforge_core::reduction::{addition_reduction_residual, kron_reduce, star_mesh};
use lapforge_core::spectra::{
    eigenvalues, interlaces, serialize_spectrum, verify_delcon_chain, verify_merge,
    verify_quotient, verify_subgraph_deletion, verify_vertex_weight_decrease,
};
use lapforge_core::symfunc::{csf, phi, serialize_psym, tree_census};
use lapforge_core::tilings::{kirchhoff_check, substitute_edge, tiling_to_network, Rect};
use lapforge_core::Error;

#[derive(Parser)]
#[command(name = "lapforge", version, about = "Weighted-Laplacian toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an artifact from a graph-JSON file.
    Compute {
        #[command(subcommand)]
        what: ComputeWhat,
    },
    /// Run a seeded verification suite and report JSON lines per item.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weighted,
    Combinatorial,
    Normalised,
}

impl From<KindArg> for LaplacianKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Weighted => LaplacianKind::Weighted,
            KindArg::Combinatorial => LaplacianKind::Combinatorial,
            KindArg::Normalised => LaplacianKind::Normalised,
        }
    }
}

#[derive(Subcommand)]
enum ComputeWhat {
    /// Scaled characteristic polynomial with exact coefficients.
    Charpoly { file: PathBuf },
    /// Laplacian eigenvalues, ascending.
    Eigenvalues {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Weighted)]
        kind: KindArg,
    },
    /// Chromatic symmetric function in the power-sum basis.
    Csf { file: PathBuf },
    /// Exact isoperimetric constant over all cuts.
    Theta { file: PathBuf },
    /// Kron reduction eliminating the comma-separated vertex list.
    Kron { vertices: String, file: PathBuf },
    /// Star-mesh transform at one vertex.
    Starmesh { vertex: String, file: PathBuf },
}

#[derive(Args)]
struct SeededArgs {
    /// Corpus seed; the same seed reproduces the report byte for byte.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of corpus items.
    #[arg(long, default_value_t = 100)]
    count: usize,
}

#[derive(Subcommand)]
enum Suite {
    /// Exact deletion-contraction identity for the characteristic polynomial.
    Delcon(SeededArgs),
    /// Eigenvalue interlacing for edge deletion-contraction, quotients,
    /// merges, subgraph deletion, and vertex weight decrease.
    Interlace(SeededArgs),
    /// Star-mesh and Kron reduction identities.
    Reduction(SeededArgs),
    /// Rectangle tilings: flow laws and substitution interlacing.
    Tilings(SeededArgs),
    /// Cheeger, sweep-cut, independence, and chromatic bounds.
    Bounds(SeededArgs),
    /// Chromatic symmetric function bridge to the characteristic polynomial.
    Csf(SeededArgs),
    /// Free-tree census on n vertices with collision counts.
    Census { n: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { what } => run_compute(what),
        Command::Verify { suite } => run_verify(suite),
    }
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::Parse(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn load_graph(path: &PathBuf) -> Result<WeightedGraph, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    parse_graph(&text).map_err(|e| {
        eprintln!("cannot parse {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn parse_vertex(text: &str) -> Result<VertexId, ExitCode> {
    text.parse::<VertexId>().map_err(|e| {
        eprintln!("bad vertex {text:?}: {e}");
        ExitCode::from(2)
    })
}

fn run_compute(what: ComputeWhat) -> ExitCode {
    let outcome: Result<String, Error> = match &what {
        ComputeWhat::Charpoly { file } => match load_graph(file) {
            Ok(g) => Ok(serialize_poly(&charpoly(&g))),
            Err(code) => return code,
        },
        ComputeWhat::Eigenvalues { file, kind } => match load_graph(file) {
            Ok(g) => eigenvalues(&g, (*kind).into()).map(|s| serialize_spectrum(&s)),
            Err(code) => return code,
        },
        ComputeWhat::Csf { file } => match load_graph(file) {
            Ok(g) => csf(&g).map(|x| serialize_psym(&x)),
            Err(code) => return code,
        },
        ComputeWhat::Theta { file } => match load_graph(file) {
            Ok(g) => isoperimetric_constant(&g).map(|r| serialize_cut_report(&r)),
            Err(code) => return code,
        },
        ComputeWhat::Kron { vertices, file } => {
            let g = match load_graph(file) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let mut set = BTreeSet::new();
            for part in vertices.split(',').filter(|p| !p.is_empty()) {
                match parse_vertex(part) {
                    Ok(id) => {
                        set.insert(id);
                    }
                    Err(code) => return code,
                }
            }
            kron_reduce(&g, &set).map(|h| serialize_graph(&h))
        }
        ComputeWhat::Starmesh { vertex, file } => {
            let g = match load_graph(file) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let v = match parse_vertex(vertex) {
                Ok(v) => v,
                Err(code) => return code,
            };
            star_mesh(&g, &v).map(|h| serialize_graph(&h))
        }
    };
    match outcome {
        Ok(artifact) => {
            println!("{artifact}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            exit_code_for(&e)
        }
    }
}

/// One verification item: `Ok(())` on pass, otherwise a human detail plus
/// JSON dumps sufficient to reproduce the failure in isolation.
type ItemResult = Result<(), (String, Vec<(&'static str, Value)>)>;

fn graph_value(g: &WeightedGraph) -> Value {
    serde_json::from_str(&serialize_graph(g)).expect("graph serialization is valid JSON")
}

fn fail(detail: impl Into<String>, dumps: Vec<(&'static str, Value)>) -> ItemResult {
    Err((detail.into(), dumps))
}

fn run_verify(suite: Suite) -> ExitCode {
    match suite {
        Suite::Delcon(a) => run_suite("delcon", &a, delcon_item),
        Suite::Interlace(a) => run_suite("interlace", &a, interlace_item),
        Suite::Reduction(a) => run_suite("reduction", &a, reduction_item),
        Suite::Tilings(a) => run_suite("tilings", &a, tilings_item),
        Suite::Bounds(a) => run_suite("bounds", &a, bounds_item),
        Suite::Csf(a) => run_suite("csf", &a, csf_item),
        Suite::Census { n } => run_census(n),
    }
}

fn run_suite(
    name: &str,
    args: &SeededArgs,
    item: impl Fn(&mut SplitMix64) -> ItemResult + Sync,
) -> ExitCode {
    let mut results: Vec<(usize, bool, Value)> = (0..args.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = item_rng(args.seed, index as u64);
            match item(&mut rng) {
                Ok(()) => (
                    index,
                    true,
                    json!({"suite": name, "index": index, "status": "pass"}),
                ),
                Err((detail, dumps)) => {
                    let mut line = json!({
                        "suite": name,
                        "index": index,
                        "status": "fail",
                        "detail": detail,
                    });
                    for (key, value) in dumps {
                        line[key] = value;
                    }
                    (index, false, line)
                }
            }
        })
        .collect();
    results.sort_by_key(|r| r.0);
    let passed = results.iter().filter(|r| r.1).count();
    for (_, _, line) in &results {
        println!("{line}");
    }
    eprintln!("{name}: {passed}/{} pass", args.count);
    if passed == args.count {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn delcon_item(rng: &mut SplitMix64) -> ItemResult {
    let g = random_graph(rng);
    let nonloops: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| e.id)
        .collect();
    if nonloops.is_empty() {
        return Ok(());
    }
    let e = *rng.pick(&nonloops);
    let weight = g.edge(e).expect("edge exists").weight.clone();
    let deleted = g.delete_edge(e).expect("edge exists");
    let contracted = g.contract_edge(e).expect("edge is not a loop");
    let lhs = charpoly(&g);
    let rhs = charpoly(&deleted).sub(&charpoly(&contracted).scale(&weight));
    if lhs == rhs {
        Ok(())
    } else {
        fail(
            format!("characteristic polynomial recursion fails at edge {e}"),
            vec![("graph", graph_value(&g)), ("edge", json!(e))],
        )
    }
}

fn interlace_item(rng: &mut SplitMix64) -> ItemResult {
    let g = random_connected_graph(rng, 8);
    let dump = || vec![("graph", graph_value(&g))];

    let nonloops: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| e.id)
        .collect();
    if !nonloops.is_empty() {
        let e = *rng.pick(&nonloops);
        match verify_delcon_chain(&g, e) {
            Ok(true) => {}
            Ok(false) => {
                return fail(
                    format!("deletion-contraction eigenvalue chain fails at edge {e}"),
                    vec![("graph", graph_value(&g)), ("edge", json!(e))],
                )
            }
            Err(err) => return fail(format!("deletion-contraction chain error: {err}"), dump()),
        }
    }

    let partition = random_partition(rng, &g);
    for kind in [
        LaplacianKind::Weighted,
        LaplacianKind::Combinatorial,
        LaplacianKind::Normalised,
    ] {
        match verify_quotient(&g, &partition, kind) {
            Ok(true) => {}
            Ok(false) => return fail(format!("quotient interlacing fails ({kind:?})"), dump()),
            Err(err) => return fail(format!("quotient error ({kind:?}): {err}"), dump()),
        }
    }

    let h = random_graph(rng);
    match verify_merge(&g, &h) {
        Ok(true) => {}
        Ok(false) => {
            return fail(
                "merge interlacing fails",
                vec![("graph", graph_value(&g)), ("merged", graph_value(&h))],
            )
        }
        Err(err) => return fail(format!("merge error: {err}"), dump()),
    }

    let r: BTreeSet<usize> = g
        .edges()
        .iter()
        .map(|e| e.id)
        .filter(|_| rng.chance(1, 3))
        .collect();
    let remainder = g.without_edges(&r).expect("edge ids are valid");
    let s: BTreeSet<VertexId> = remainder
        .vertices()
        .iter()
        .filter(|(id, _)| remainder.degree(id).expect("vertex exists") == int(0))
        .map(|(id, _)| id.clone())
        .collect();
    for kind in [
        LaplacianKind::Weighted,
        LaplacianKind::Combinatorial,
        LaplacianKind::Normalised,
    ] {
        match verify_subgraph_deletion(&g, &r, &s, kind) {
            Ok(true) => {}
            Ok(false) => {
                return fail(
                    format!("subgraph deletion interlacing fails ({kind:?})"),
                    vec![("graph", graph_value(&g)), ("edges", json!(r))],
                )
            }
            Err(err) => return fail(format!("subgraph deletion error ({kind:?}): {err}"), dump()),
        }
    }

    let (v, old) = {
        let pair = g.vertices()[rng.below(g.vertex_count() as u64) as usize].clone();
        (pair.0, pair.1)
    };
    let lowered = old * rat(1, 2);
    match verify_vertex_weight_decrease(&g, &v, &lowered) {
        Ok(true) => {}
        Ok(false) => return fail(format!("weight decrease interlacing fails at {v}"), dump()),
        Err(err) => return fail(format!("weight decrease error: {err}"), dump()),
    }

    let spectrum = match eigenvalues(&g, LaplacianKind::Normalised) {
        Ok(s) => s,
        Err(err) => return fail(format!("normalised spectrum error: {err}"), dump()),
    };
    if !spectrum.min_is_nonnegative() {
        return fail("normalised eigenvalue below zero", dump());
    }
    if spectrum.max().is_some_and(|m| m > 2.0 + spectrum.tol()) {
        return fail("normalised eigenvalue above two", dump());
    }
    if spectrum.multiplicity_near(2.0) != g.bipartite_component_count() {
        return fail(
            "multiplicity of eigenvalue two differs from the bipartite component count",
            dump(),
        );
    }
    Ok(())
}

fn reduction_item(rng: &mut SplitMix64) -> ItemResult {
    let menu = weight_menu();

    // Addition-reduction at a loopless vertex with positive degree.
    let g = random_connected_graph(rng, 8);
    let candidates: Vec<VertexId> = g
        .vertices()
        .iter()
        .map(|(id, _)| id.clone())
        .filter(|id| {
            g.incident_edges(id)
                .iter()
                .all(|&e| !g.edge(e).expect("edge exists").is_loop())
        })
        .filter(|id| g.degree(id).expect("vertex exists") != int(0))
        .collect();
    if !candidates.is_empty() {
        let v = rng.pick(&candidates).clone();
        let eta = rng.pick(&menu).clone();
        match addition_reduction_residual(&g, &v, &eta) {
            Ok(residual) if residual.is_zero() => {}
            Ok(_) => {
                return fail(
                    format!("addition-reduction residual is nonzero at {v}"),
                    vec![("graph", graph_value(&g))],
                )
            }
            Err(err) => {
                return fail(
                    format!("addition-reduction error: {err}"),
                    vec![("graph", graph_value(&g))],
                )
            }
        }
    }

    // Kron reduction versus meshing the eliminated vertices one at a time,
    // in a random order, then simplifying.
    let h = random_connected_loopless_graph(rng, 8);
    let mut order: Vec<VertexId> = random_vertex_subset(rng, &h).into_iter().collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.below(i as u64 + 1) as usize);
    }
    // Merging parallel classes between steps keeps edge counts bounded and
    // leaves each step's single-vertex Schur complement unchanged.
    let mut chain = h.clone();
    let mut chain_ok = true;
    for v in &order {
        match star_mesh(&chain, v) {
            Ok(next) => chain = next.simplify(),
            Err(_) => {
                chain_ok = false;
                break;
            }
        }
    }
    let s: BTreeSet<VertexId> = order.iter().cloned().collect();
    let reduced = match kron_reduce(&h, &s) {
        Ok(r) => r,
        Err(err) => {
            return fail(
                format!("Kron reduction error: {err}"),
                vec![("graph", graph_value(&h))],
            )
        }
    };
    if chain_ok && chain.simplify() != reduced {
        return fail(
            "Kron reduction disagrees with the star-mesh chain",
            vec![("graph", graph_value(&h)), ("reduced", graph_value(&reduced))],
        );
    }

    // Interlacing between the network and its reduction.
    let lambda = eigenvalues(&h, LaplacianKind::Weighted).expect("spectrum exists");
    let mu = eigenvalues(&reduced, LaplacianKind::Weighted).expect("spectrum exists");
    match interlaces(&lambda, &mu, s.len()) {
        Ok(true) => Ok(()),
        Ok(false) => fail(
            "Kron reduction breaks eigenvalue interlacing",
            vec![("graph", graph_value(&h))],
        ),
        Err(err) => fail(
            format!("Kron interlacing error: {err}"),
            vec![("graph", graph_value(&h))],
        ),
    }
}

fn tilings_item(rng: &mut SplitMix64) -> ItemResult {
    let menu = weight_menu();

    // A random guillotine tiling satisfies both flow laws.
    let outer = Rect::new(
        int(0),
        int(0),
        rng.pick(&menu).clone(),
        rng.pick(&menu).clone(),
    );
    let tiling = random_tiling(rng, outer, 6);
    let network = match tiling_to_network(&tiling) {
        Ok(n) => n,
        Err(err) => return fail(format!("tiling network error: {err}"), vec![]),
    };
    match kirchhoff_check(
        &network.graph,
        &network.field,
        &network.bottom_pole,
        &network.top_pole,
    ) {
        Ok(true) => {}
        Ok(false) => {
            return fail(
                "tiling network violates the flow laws",
                vec![("graph", graph_value(&network.graph))],
            )
        }
        Err(err) => return fail(format!("flow law error: {err}"), vec![]),
    }

    // Substituting a matching-aspect tiling for an edge interlaces spectra.
    let g = random_connected_graph(rng, 8);
    let nonloops: Vec<usize> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| e.id)
        .collect();
    let e = *rng.pick(&nonloops);
    let aspect = g.edge(e).expect("edge exists").weight.clone();
    let patch = random_tiling(rng, Rect::new(int(0), int(0), aspect, int(1)), 5);
    let patch_network = tiling_to_network(&patch).expect("tiling is valid");
    let interior = patch_network.levels.len().saturating_sub(2);
    let base = g
        .vertices()
        .iter()
        .flat_map(|(id, _)| id.labels().iter().copied())
        .max()
        .expect("graph has vertices")
        + 1;
    let weights: std::collections::BTreeMap<VertexId, Rat> = (0..interior)
        .map(|l| (VertexId::single(base + l as i64), rng.pick(&menu).clone()))
        .collect();
    let substituted = match substitute_edge(&g, e, &patch, &weights) {
        Ok(s) => s,
        Err(err) => {
            return fail(
                format!("substitution error: {err}"),
                vec![("graph", graph_value(&g)), ("edge", json!(e))],
            )
        }
    };
    let mu = eigenvalues(&substituted, LaplacianKind::Weighted).expect("spectrum exists");
    let lambda = eigenvalues(&g, LaplacianKind::Weighted).expect("spectrum exists");
    let k = substituted.vertex_count() - g.vertex_count();
    match interlaces(&mu, &lambda, k) {
        Ok(true) => Ok(()),
        Ok(false) => fail(
            "substitution breaks eigenvalue interlacing",
            vec![
                ("graph", graph_value(&g)),
                ("substituted", graph_value(&substituted)),
            ],
        ),
        Err(err) => fail(format!("substitution interlacing error: {err}"), vec![]),
    }
}

fn bounds_item(rng: &mut SplitMix64) -> ItemResult {
    let g = random_connected_graph(rng, 10);
    match cheeger_check(&g) {
        Ok(true) => {}
        Ok(false) => {
            return fail(
                "Cheeger inequality fails",
                vec![("graph", graph_value(&g))],
            )
        }
        Err(err) => return fail(format!("Cheeger error: {err}"), vec![("graph", graph_value(&g))]),
    }

    match spectral_sweep_field(&g) {
        Ok(f) => match sweep_cut(&g, &f) {
            // The spectral guarantee is asserted inside sweep_cut.
            Ok(_) => {}
            Err(Error::ConstantField | Error::NotMeanZero) => {}
            Err(err) => {
                return fail(
                    format!("sweep cut error: {err}"),
                    vec![("graph", graph_value(&g))],
                )
            }
        },
        Err(Error::ZeroField) => {}
        Err(err) => {
            return fail(
                format!("sweep field error: {err}"),
                vec![("graph", graph_value(&g))],
            )
        }
    }

    let small = loop {
        let candidate = random_loopless_graph(rng);
        if candidate.vertex_count() <= 7 {
            break candidate;
        }
    };
    match independence_check(&small) {
        Ok(true) => {}
        Ok(false) => {
            return fail(
                "independence bound fails",
                vec![("graph", graph_value(&small))],
            )
        }
        Err(Error::NoEdges(_)) => {}
        Err(err) => {
            return fail(
                format!("independence error: {err}"),
                vec![("graph", graph_value(&small))],
            )
        }
    }
    match chromatic_check(&small) {
        Ok((_, _, true)) => Ok(()),
        Ok((chi, bound, false)) => fail(
            format!("chromatic bound fails: chi={chi}, bound={bound}"),
            vec![("graph", graph_value(&small))],
        ),
        Err(Error::NoEdges(_)) => Ok(()),
        Err(err) => fail(
            format!("chromatic error: {err}"),
            vec![("graph", graph_value(&small))],
        ),
    }
}

fn csf_item(rng: &mut SplitMix64) -> ItemResult {
    let f = random_forest(rng, 10);
    let x = match csf(&f) {
        Ok(x) => x,
        Err(err) => return fail(format!("symmetric function error: {err}"), vec![]),
    };
    let degree: u64 = lapforge_core::rat::format_rat(&f.total_vertex_weight())
        .parse()
        .expect("integer total weight");
    if !x.is_homogeneous_of_degree(degree) {
        return fail(
            "chromatic symmetric function is not homogeneous",
            vec![("graph", graph_value(&f))],
        );
    }
    if phi(&x) == charpoly(&f) {
        Ok(())
    } else {
        fail(
            "power-sum specialisation disagrees with the characteristic polynomial",
            vec![("graph", graph_value(&f))],
        )
    }
}

fn run_census(n: usize) -> ExitCode {
    const EXPECTED: [(usize, usize); 9] = [
        (2, 1),
        (3, 1),
        (4, 2),
        (5, 3),
        (6, 6),
        (7, 11),
        (8, 23),
        (9, 47),
        (10, 106),
    ];
    let report = match tree_census(n) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return exit_code_for(&e);
        }
    };
    let expected = EXPECTED
        .iter()
        .find(|(size, _)| *size == n)
        .map(|(_, count)| *count)
        .expect("size range checked by the census");
    let line = json!({
        "suite": "census",
        "n": n,
        "trees": report.trees.len(),
        "expected_trees": expected,
        "csf_collisions": report.csf_collisions.len(),
        "charpoly_collisions": report.charpoly_collisions.len(),
    });
    println!("{line}");
    eprintln!(
        "census {n}: trees={}, collisions={}",
        report.trees.len(),
        report.csf_collisions.len()
    );
    if report.trees.len() == expected && report.csf_collisions.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
