//! Source-problem instances: parsers, emitters and seeded generators.

mod cnf;
mod cvp;
mod generate;
mod graph;

pub use cnf::{parse_dimacs, CnfFormula, Literal};
pub use cvp::{parse_cvp, CvpInstance};
pub use generate::{
    gen_boundary_cvp, gen_random_cvp, gen_random_graph, gen_random_ksat, gen_random_network,
    RationalRange,
};
pub use graph::{
    parse_graph, parse_graph_document, GraphDocument, HalfCliqueQuery, VertexCoverQuery,
    WeightedGraph,
};
