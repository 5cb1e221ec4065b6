//! Hand-built graphs shared across unit tests.

use crate::graph::{VertexId, WeightedGraph};
use crate::rat::{int, Rat};

/// Four vertices weighted 1,2,1,3; seven edges including a weight-3 loop at
/// vertex 0 and a parallel pair (weights 2,1) between vertices 0 and 1.
pub(crate) fn running_example() -> WeightedGraph {
    WeightedGraph::new(
        [
            (VertexId::single(0), int(1)),
            (VertexId::single(1), int(2)),
            (VertexId::single(2), int(1)),
            (VertexId::single(3), int(3)),
        ],
        [
            (VertexId::single(0), VertexId::single(3), int(1)),
            (VertexId::single(2), VertexId::single(3), int(2)),
            (VertexId::single(1), VertexId::single(3), int(1)),
            (VertexId::single(1), VertexId::single(2), int(3)),
            (VertexId::single(0), VertexId::single(1), int(2)),
            (VertexId::single(0), VertexId::single(1), int(1)),
            (VertexId::single(0), VertexId::single(0), int(3)),
        ],
    )
    .unwrap()
}

/// Two vertices with weights `a`, `b` joined by one edge of weight `w`.
pub(crate) fn weighted_edge(a: Rat, b: Rat, w: Rat) -> WeightedGraph {
    WeightedGraph::new(
        [(VertexId::single(0), a), (VertexId::single(1), b)],
        [(VertexId::single(0), VertexId::single(1), w)],
    )
    .unwrap()
}

/// Unit-weight triangle.
pub(crate) fn triangle() -> WeightedGraph {
    WeightedGraph::unweighted(3, &[(0, 1), (0, 2), (1, 2)])
}
