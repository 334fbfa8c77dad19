//! Shapes: which nodes of a graph are shapes, what they say, and which data
//! nodes they apply to.

mod check;

use std::collections::{BTreeMap, BTreeSet};

pub use check::{check_shape, ShapeDiagnostic, ShapeRule};

use crate::components::{registry, Constraint};
use crate::error::{Failure, FailureCode};
use crate::graph::Graph;
use crate::path::{compile_path, eval_path, PathExpr};
use crate::term::Term;
use crate::vocab::{rdfs, sh};

const TARGET_PREDICATES: [&str; 4] = [sh::TARGET_NODE, sh::TARGET_CLASS, sh::TARGET_SUBJECTS_OF, sh::TARGET_OBJECTS_OF];

/// Nodes typed `sh:Shape` (possibly through subclasses) plus subjects of
/// target triples.
pub fn explicit_shapes(g: &Graph) -> BTreeSet<Term> {
    let mut out = g.instances_of(&Term::iri(sh::SHAPE));
    for p in TARGET_PREDICATES {
        out.extend(g.with_predicate(&Term::iri(p)).map(|(s, _)| s.clone()));
    }
    out
}

/// The shapes `s` refers to through shape-inducing parameters.
fn referenced(s: &Term, g: &Graph) -> Vec<Term> {
    let mut out = Vec::new();
    for def in registry() {
        for &p in def.shape_inducing {
            for v in g.values(s, p) {
                if def.is_list_taking(p) {
                    out.extend(g.list_members(v).unwrap_or_default());
                } else {
                    out.push(v.clone());
                }
            }
        }
    }
    out
}

/// The explicit shapes and everything reachable from them through
/// shape-inducing parameters.
pub fn shapes_closure(g: &Graph) -> BTreeSet<Term> {
    let mut seen = explicit_shapes(g);
    let mut stack: Vec<Term> = seen.iter().cloned().collect();
    while let Some(s) = stack.pop() {
        for t in referenced(&s, g) {
            if seen.insert(t.clone()) {
                stack.push(t);
            }
        }
    }
    seen
}

/// A shape of `g` that reaches itself through the refers relation.
pub fn find_recursive_shape(g: &Graph) -> Option<Term> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<Term, Mark> = BTreeMap::new();
    for root in shapes_closure(g) {
        if marks.contains_key(&root) {
            continue;
        }
        // iterative DFS; a back edge to an open node closes a cycle
        let mut stack: Vec<(Term, Vec<Term>)> = vec![(root.clone(), referenced(&root, g))];
        marks.insert(root, Mark::Open);
        while let Some((node, children)) = stack.last_mut() {
            match children.pop() {
                Some(child) => match marks.get(&child) {
                    Some(Mark::Open) => return Some(child),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(child.clone(), Mark::Open);
                        let next = referenced(&child, g);
                        stack.push((child, next));
                    }
                },
                None => {
                    marks.insert(node.clone(), Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    None
}

pub fn is_recursive(g: &Graph) -> bool {
    find_recursive_shape(g).is_some()
}

/// One constraint per combination of mandatory parameter values, for every
/// component whose mandatory parameters all have values on `s`.
pub fn extract_constraints(s: &Term, g: &Graph) -> Vec<Constraint> {
    let mut out = Vec::new();
    for def in registry() {
        let value_sets: Vec<(Term, Vec<Term>)> = def
            .mandatory
            .iter()
            .map(|&p| (Term::iri(p), g.value_set(s, p).into_iter().collect()))
            .collect();
        if value_sets.iter().any(|(_, vs)| vs.is_empty()) {
            continue;
        }
        let optional: Vec<(Term, Term)> = def
            .optional
            .iter()
            .flat_map(|&p| g.value_set(s, p).into_iter().map(move |v| (Term::iri(p), v)))
            .collect();
        let mut combos: Vec<Vec<(Term, Term)>> = vec![Vec::new()];
        for (p, vs) in &value_sets {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    vs.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push((p.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        out.extend(combos.into_iter().map(|mandatory| Constraint {
            component: def.component,
            mandatory,
            optional: optional.clone(),
        }));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetKind {
    Node,
    Class,
    ImplicitClass,
    SubjectsOf,
    ObjectsOf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub argument: Term,
}

/// Everything validation needs to know about one shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub node: Term,
    pub severity: Term,
    pub messages: BTreeSet<Term>,
    pub deactivated: bool,
    pub path: Option<PathExpr>,
    pub constraints: Vec<Constraint>,
    pub targets: Vec<TargetSpec>,
}

impl Shape {
    /// Reads the shape at `node`. Assumes the shape is well-formed; a path
    /// that does not compile is dropped.
    pub fn from_graph(node: &Term, g: &Graph) -> Shape {
        let mut targets = Vec::new();
        let kinds = [
            (sh::TARGET_NODE, TargetKind::Node),
            (sh::TARGET_CLASS, TargetKind::Class),
            (sh::TARGET_SUBJECTS_OF, TargetKind::SubjectsOf),
            (sh::TARGET_OBJECTS_OF, TargetKind::ObjectsOf),
        ];
        for (p, kind) in kinds {
            targets.extend(g.value_set(node, p).into_iter().map(|argument| TargetSpec { kind, argument }));
        }
        if g.is_instance(node, &Term::iri(rdfs::CLASS)) {
            targets.push(TargetSpec { kind: TargetKind::ImplicitClass, argument: node.clone() });
        }
        let path = match g.value_count(node, sh::PATH) {
            1 => g.sole_value(node, sh::PATH).and_then(|p| compile_path(p, g).ok()),
            _ => None,
        };
        Shape {
            node: node.clone(),
            severity: g.sole_value(node, sh::SEVERITY).cloned().unwrap_or_else(|| Term::iri(sh::VIOLATION)),
            messages: g.value_set(node, sh::MESSAGE),
            deactivated: g.values(node, sh::DEACTIVATED).any(Term::is_true_literal),
            path,
            constraints: extract_constraints(node, g),
            targets,
        }
    }

    /// A shape with default severity, no targets, no path and the given
    /// constraints.
    pub fn bare(node: Term, constraints: Vec<Constraint>) -> Shape {
        Shape {
            node,
            severity: Term::iri(sh::VIOLATION),
            messages: BTreeSet::new(),
            deactivated: false,
            path: None,
            constraints,
            targets: Vec::new(),
        }
    }
}

/// The nodes of `d` that `s` targets.
pub fn complete_targets(s: &Shape, d: &Graph) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for t in &s.targets {
        match t.kind {
            TargetKind::Node => {
                out.insert(t.argument.clone());
            }
            TargetKind::Class | TargetKind::ImplicitClass => out.extend(d.instances_of(&t.argument)),
            TargetKind::SubjectsOf => out.extend(d.with_predicate(&t.argument).map(|(s, _)| s.clone())),
            TargetKind::ObjectsOf => out.extend(d.with_predicate(&t.argument).map(|(_, o)| o.clone())),
        }
    }
    out
}

/// The values of `f` along the shape's path, or `f` itself without one.
pub fn value_nodes(f: &Term, d: &Graph, s: &Shape) -> BTreeSet<Term> {
    match &s.path {
        Some(e) => eval_path(f, e, d),
        None => BTreeSet::from([f.clone()]),
    }
}

/// A checked shapes graph with its shapes extracted.
#[derive(Debug)]
pub struct ShapesGraph {
    graph: Graph,
    shapes: BTreeMap<Term, Shape>,
}

impl ShapesGraph {
    /// Fails if any shape is ill-formed, if the graph is recursive, or if
    /// it asks for an entailment regime.
    pub fn new(graph: Graph) -> Result<ShapesGraph, Failure> {
        let closure = shapes_closure(&graph);
        let diagnostics: Vec<ShapeDiagnostic> = closure.iter().flat_map(|s| check_shape(s, &graph)).collect();
        if !diagnostics.is_empty() {
            return Err(Failure::new(
                FailureCode::IllFormedShapesGraph,
                format!("{} ill-formed shape condition(s)", diagnostics.len()),
            )
            .with_diagnostics(diagnostics.iter().map(ToString::to_string).collect()));
        }
        if let Some(s) = find_recursive_shape(&graph) {
            return Err(Failure::new(FailureCode::RecursiveShapesGraph, format!("shape {s} refers to itself")));
        }
        if let Some((_, regime)) = graph.with_predicate(&Term::iri(sh::ENTAILMENT)).next() {
            return Err(Failure::new(
                FailureCode::UnsupportedEntailment,
                format!("entailment regime {regime} is not supported"),
            ));
        }
        let shapes = closure.iter().map(|s| (s.clone(), Shape::from_graph(s, &graph))).collect();
        Ok(ShapesGraph { graph, shapes })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shape(&self, node: &Term) -> Option<&Shape> {
        self.shapes.get(node)
    }

    /// All shapes, in term order.
    pub fn shapes(&self) -> impl Iterator<Item = &Shape> {
        self.shapes.values()
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }
}
