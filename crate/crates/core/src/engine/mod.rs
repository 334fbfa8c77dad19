//! Validation: results structures, the three validation levels, and
//! validation reports.

mod report;

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use report::{build_report, validate_results_graph, ResultRule, ResultsDiagnostic};

use crate::components::{eval_constraint, Constraint, ViolationRecord};
use crate::error::{Failure, FailureCode};
use crate::graph::{BlankAllocator, Graph};
use crate::path::encode_path;
use crate::shapes::{complete_targets, value_nodes, Shape, ShapesGraph};
use crate::term::Term;
use crate::vocab::{rdf, sh};

/// Budgets that turn runaway validations into [`FailureCode::ResourceLimit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of top-level results in one validation.
    pub max_results: usize,
    /// Maximum nesting of shape-inducing conformance checks.
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_results: 100_000, max_depth: 64 }
    }
}

/// A results graph together with its top-level validation results.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultsStructure {
    pub graph: Graph,
    pub top_level: BTreeSet<Term>,
}

impl ResultsStructure {
    pub fn empty(allocator: &Arc<BlankAllocator>) -> Self {
        ResultsStructure { graph: Graph::with_allocator(allocator.clone()), top_level: BTreeSet::new() }
    }

    pub fn conforms(&self) -> bool {
        self.top_level.is_empty()
    }
}

/// Union of graphs and of top-level sets. Blank nodes are shared, not
/// renamed, so all inputs must come from one allocator.
pub fn combine(structures: impl IntoIterator<Item = ResultsStructure>) -> ResultsStructure {
    let mut iter = structures.into_iter();
    let Some(mut out) = iter.next() else {
        return ResultsStructure::default();
    };
    for r in iter {
        out.graph.extend(r.graph.iter().cloned());
        out.top_level.extend(r.top_level);
    }
    out
}

/// Writes a validation result for `record` into `into` and returns its node.
pub fn build_result(record: &ViolationRecord<'_>, shapes: &Graph, into: &mut Graph) -> Term {
    let r = into.fresh_blank();
    let add = |g: &mut Graph, p: &str, o: Term| {
        g.add(r.clone(), Term::iri(p), o);
    };
    let shape = record.shape;
    let c = record.constraint;
    add(into, rdf::TYPE, Term::iri(sh::VALIDATION_RESULT));
    add(into, sh::FOCUS_NODE, record.focus.clone());
    if let Some(v) = &record.value {
        add(into, sh::VALUE_NODE, v.clone());
    }
    if let Some(path) = &shape.path {
        let encoded = encode_path(path, into);
        add(into, sh::RESULT_PATH, encoded);
    }
    add(into, sh::SOURCE_SHAPE, shape.node.clone());
    add(into, sh::SOURCE_CONSTRAINT_COMPONENT, Term::iri(c.component.iri()));
    add(into, sh::RESULT_SEVERITY, shape.severity.clone());
    for message in result_messages(shape) {
        add(into, sh::RESULT_MESSAGE, message);
    }
    let def = c.component.def();
    for (p, x) in c.parameter_values() {
        let param = p.as_iri().unwrap_or_default();
        if def.is_list_taking(param) {
            let members = shapes.list_members(x).unwrap_or_default();
            let list = into.add_list(&members);
            add(into, param, list);
        } else {
            add(into, param, x.clone());
        }
    }
    r
}

/// The shape's language-tagged messages, one per tag (the smallest wins).
fn result_messages(shape: &Shape) -> Vec<Term> {
    let mut by_tag: BTreeMap<String, &Term> = BTreeMap::new();
    for m in &shape.messages {
        let Some(tag) = m.as_literal().and_then(|l| l.lang()) else {
            continue;
        };
        let slot = by_tag.entry(tag.to_ascii_lowercase()).or_insert(m);
        if m.as_literal().map(|l| l.lexical()) < slot.as_literal().map(|l| l.lexical()) {
            *slot = m;
        }
    }
    by_tag.into_values().cloned().collect()
}

/// Validates data against a checked shapes graph.
pub struct Validator<'a> {
    data: &'a Graph,
    shapes: &'a ShapesGraph,
    limits: Limits,
    allocator: Arc<BlankAllocator>,
    results: Cell<usize>,
}

impl<'a> Validator<'a> {
    pub fn new(data: &'a Graph, shapes: &'a ShapesGraph, limits: Limits) -> Self {
        let allocator = Arc::new(BlankAllocator::new());
        // results must never reuse a blank id that may appear as a focus or value node
        for g in [data, shapes.graph()] {
            if let Some(max) = g.max_blank_id() {
                allocator.reserve(max);
            }
        }
        Validator { data, shapes, limits, allocator, results: Cell::new(0) }
    }

    pub fn data(&self) -> &Graph {
        self.data
    }

    pub fn shapes(&self) -> &ShapesGraph {
        self.shapes
    }

    pub fn allocator(&self) -> &Arc<BlankAllocator> {
        &self.allocator
    }

    fn empty(&self) -> ResultsStructure {
        ResultsStructure::empty(&self.allocator)
    }

    fn shape(&self, node: &Term) -> Result<&'a Shape, Failure> {
        self.shapes
            .shape(node)
            .ok_or_else(|| Failure::new(FailureCode::IllFormedShapesGraph, format!("{node} is not a shape")))
    }

    /// Whether `v` conforms to the shape at `node`, without building results.
    pub fn conforms_term(&self, v: &Term, node: &Term, depth: usize) -> Result<bool, Failure> {
        if depth > self.limits.max_depth {
            return Err(Failure::new(
                FailureCode::ResourceLimit,
                format!("conformance checks nested deeper than {}", self.limits.max_depth),
            ));
        }
        let shape = self.shape(node)?;
        if shape.deactivated {
            return Ok(true);
        }
        let values = value_nodes(v, self.data, shape);
        for c in &shape.constraints {
            let records = eval_constraint(c, v, &values, self.data, shape, self.shapes.graph(), |w, x| {
                self.conforms_term(w, x, depth + 1)
            })?;
            if !records.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The results of one constraint for one focus node.
    pub fn validate_constraint(
        &self,
        f: &Term,
        values: &BTreeSet<Term>,
        c: &Constraint,
        shape: &Shape,
    ) -> Result<ResultsStructure, Failure> {
        let records = eval_constraint(c, f, values, self.data, shape, self.shapes.graph(), |w, x| {
            self.conforms_term(w, x, 1)
        })?;
        let total = self.results.get() + records.len();
        if total > self.limits.max_results {
            return Err(Failure::new(
                FailureCode::ResourceLimit,
                format!("more than {} validation results", self.limits.max_results),
            ));
        }
        self.results.set(total);
        let mut out = self.empty();
        for record in &records {
            let r = build_result(record, self.shapes.graph(), &mut out.graph);
            out.top_level.insert(r);
        }
        Ok(out)
    }

    /// Validates the term `f` against `shape`.
    pub fn validate_term(&self, f: &Term, shape: &Shape) -> Result<ResultsStructure, Failure> {
        if shape.deactivated {
            return Ok(self.empty());
        }
        let values = value_nodes(f, self.data, shape);
        let mut parts = vec![self.empty()];
        for c in &shape.constraints {
            parts.push(self.validate_constraint(f, &values, c, shape)?);
        }
        Ok(combine(parts))
    }

    /// Validates every complete target of `shape`.
    pub fn validate_shape(&self, shape: &Shape) -> Result<ResultsStructure, Failure> {
        let mut parts = vec![self.empty()];
        for t in complete_targets(shape, self.data) {
            parts.push(self.validate_term(&t, shape)?);
        }
        Ok(combine(parts))
    }

    /// Validates the data graph against every shape.
    pub fn validate(&self) -> Result<ResultsStructure, Failure> {
        let mut parts = vec![self.empty()];
        for shape in self.shapes.shapes() {
            parts.push(self.validate_shape(shape)?);
        }
        Ok(combine(parts))
    }

    /// Whether the data graph conforms, stopping at the first violation.
    pub fn conforms(&self) -> Result<bool, Failure> {
        for shape in self.shapes.shapes() {
            for t in complete_targets(shape, self.data) {
                if !self.conforms_term(&t, &shape.node, 0)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Validates against the shape at `node`; with `focus`, only that term.
    pub fn validate_focus(&self, node: &Term, focus: Option<&Term>) -> Result<ResultsStructure, Failure> {
        let shape = self.shape(node)?;
        match focus {
            Some(f) => self.validate_term(f, shape),
            None => self.validate_shape(shape),
        }
    }
}

/// Validates `data` against the potential shapes graph `shapes`.
pub fn validate_graph(data: &Graph, shapes: &Graph) -> Result<ResultsStructure, Failure> {
    validate_graph_with(data, shapes, Limits::default())
}

pub fn validate_graph_with(data: &Graph, shapes: &Graph, limits: Limits) -> Result<ResultsStructure, Failure> {
    let sg = ShapesGraph::new(shapes.clone())?;
    Validator::new(data, &sg, limits).validate()
}

/// Whether `data` conforms to `shapes`.
pub fn conforms(data: &Graph, shapes: &Graph) -> Result<bool, Failure> {
    let sg = ShapesGraph::new(shapes.clone())?;
    Validator::new(data, &sg, Limits::default()).conforms()
}
