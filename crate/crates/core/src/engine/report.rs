use std::collections::BTreeSet;
use std::fmt;

use super::ResultsStructure;
use crate::components::is_list_taking;
use crate::graph::Graph;
use crate::path::compile_path;
use crate::term::Term;
use crate::vocab::{rdf, sh};

/// Adds a `sh:ValidationReport` node to a copy of the results graph.
pub fn build_report(r: &ResultsStructure) -> Graph {
    let mut g = r.graph.clone();
    let report = g.fresh_blank();
    g.add(report.clone(), Term::iri(rdf::TYPE), Term::iri(sh::VALIDATION_REPORT));
    g.add(report.clone(), Term::iri(sh::CONFORMS), Term::boolean(r.conforms()));
    for result in &r.top_level {
        g.add(report.clone(), Term::iri(sh::RESULT), result.clone());
    }
    g
}

/// Conditions every validation result node of a results graph must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResultRule {
    MissingType,
    FocusNodeCount,
    ValueNodeCount,
    ResultPathCount,
    ResultPathIllFormed,
    SourceShapeCount,
    SourceConstraintComponentCount,
    ResultSeverityCount,
    MessageNotLangString,
    MessageTagRepeated,
    DetailNotResult,
    ListParameterNotList,
}

impl ResultRule {
    pub fn id(self) -> &'static str {
        match self {
            ResultRule::MissingType => "result-missing-type",
            ResultRule::FocusNodeCount => "result-focus-node-count",
            ResultRule::ValueNodeCount => "result-value-node-count",
            ResultRule::ResultPathCount => "result-path-count",
            ResultRule::ResultPathIllFormed => "result-path-ill-formed",
            ResultRule::SourceShapeCount => "result-source-shape-count",
            ResultRule::SourceConstraintComponentCount => "result-source-constraint-component-count",
            ResultRule::ResultSeverityCount => "result-severity-count",
            ResultRule::MessageNotLangString => "result-message-not-lang-string",
            ResultRule::MessageTagRepeated => "result-message-tag-repeated",
            ResultRule::DetailNotResult => "result-detail-not-result",
            ResultRule::ListParameterNotList => "result-list-parameter-not-list",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResultsDiagnostic {
    pub rule: ResultRule,
    pub node: Term,
}

impl fmt::Display for ResultsDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule.id(), self.node)
    }
}

/// Checks every node typed `sh:ValidationResult` in `g`.
pub fn validate_results_graph(g: &Graph) -> Vec<ResultsDiagnostic> {
    let result_class = Term::iri(sh::VALIDATION_RESULT);
    let mut out = Vec::new();
    for node in g.instances_of(&result_class) {
        let mut fail = |rule| out.push(ResultsDiagnostic { rule, node: node.clone() });
        if !g.values(&node, rdf::TYPE).any(|t| *t == result_class) {
            fail(ResultRule::MissingType);
        }
        let exactly_one = [
            (sh::FOCUS_NODE, ResultRule::FocusNodeCount),
            (sh::SOURCE_SHAPE, ResultRule::SourceShapeCount),
            (sh::SOURCE_CONSTRAINT_COMPONENT, ResultRule::SourceConstraintComponentCount),
            (sh::RESULT_SEVERITY, ResultRule::ResultSeverityCount),
        ];
        for (p, rule) in exactly_one {
            if g.value_count(&node, p) != 1 {
                fail(rule);
            }
        }
        if g.value_count(&node, sh::VALUE_NODE) > 1 {
            fail(ResultRule::ValueNodeCount);
        }
        match g.value_count(&node, sh::RESULT_PATH) {
            0 => {}
            1 => {
                let path = g.sole_value(&node, sh::RESULT_PATH).expect("one value");
                if compile_path(path, g).is_err() {
                    fail(ResultRule::ResultPathIllFormed);
                }
            }
            _ => fail(ResultRule::ResultPathCount),
        }
        let mut tags = BTreeSet::new();
        for m in g.values(&node, sh::RESULT_MESSAGE) {
            match m.as_literal().and_then(|l| l.lang()) {
                Some(tag) => {
                    if !tags.insert(tag.to_ascii_lowercase()) {
                        fail(ResultRule::MessageTagRepeated);
                    }
                }
                None => fail(ResultRule::MessageNotLangString),
            }
        }
        if g.values(&node, sh::DETAIL).any(|d| !g.is_instance(d, &result_class)) {
            fail(ResultRule::DetailNotResult);
        }
        let bad_list = g
            .outgoing(&node)
            .any(|(p, v)| p.as_iri().is_some_and(is_list_taking) && g.list_members(v).is_none());
        if bad_list {
            fail(ResultRule::ListParameterNotList);
        }
    }
    out
}
