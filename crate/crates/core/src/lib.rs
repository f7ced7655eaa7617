//! Random-hypergraph construction of vertex-critical graphs that stay
//! `k`-chromatic after deleting any `r` edges, with exact checkers for every
//! property the construction relies on.

pub mod certificate;
pub mod construct;
pub mod export;
pub mod hypergraph;
pub mod lemmas;
pub mod matching;
pub mod oracles;
pub mod params;
pub mod sampler;
pub mod sparsity;
pub mod subsets;

pub use certificate::{check_certificate, verify_construction, Certificate, CheckReport, VerifyOptions};
pub use hypergraph::{Edge, Graph, Hypergraph, IdMap, Matching, StructureError, Vertex};
pub use params::{derive_params, ConstructionParams, ParamError, Seed};
