//! An ASHACL processor: validates RDF data graphs against shapes graphs and
//! produces validation reports.
//!
//! The usual entry points are [`engine::validate_graph`] and
//! [`engine::conforms`]; graphs are read with [`turtle::parse`].

pub mod cli;
pub mod components;
pub mod engine;
pub mod error;
pub mod graph;
pub mod iso;
pub mod path;
pub mod shapes;
pub mod term;
pub mod turtle;
pub mod vocab;

pub use engine::{conforms, validate_graph, Limits, ResultsStructure, Validator};
pub use error::{Failure, FailureCode};
pub use graph::{BlankAllocator, BlankScope, Graph};
pub use path::{compile_path, encode_path, eval_path, path_equivalent, IllFormedPath, PathExpr, PathRule};
pub use shapes::{Shape, ShapesGraph};
pub use term::{BlankNode, Iri, Literal, Term, Triple};
pub use turtle::{parse, serialize, Format, ParseDiagnostic};
