//! Ill-formed shape detection.

use std::collections::BTreeSet;
use std::fmt;

use crate::components::{integer_value, is_comparable};
use crate::graph::Graph;
use crate::path::{compile_path, PathRule};
use crate::term::Term;
use crate::vocab::{rdfs, sh, xsd};

macro_rules! shape_rules {
    ($($(#[$doc:meta])* $name:ident => $id:literal,)*) => {
        /// A rule whose violation makes a shape ill-formed.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ShapeRule {
            $($(#[$doc])* $name,)*
        }

        impl ShapeRule {
            pub const ALL: &'static [ShapeRule] = &[$(ShapeRule::$name,)*];

            pub fn id(self) -> &'static str {
                match self {
                    $(ShapeRule::$name => $id,)*
                }
            }
        }
    };
}

shape_rules! {
    MultipleSeverity => "multiple-severity",
    MessageNotString => "message-not-string",
    DeactivatedNotBoolean => "deactivated-not-boolean",
    TargetNodeNotIriOrLiteral => "target-node-not-iri-or-literal",
    TargetClassNotIri => "target-class-not-iri",
    ImplicitClassNotIri => "implicit-class-not-iri",
    TargetSubjectsOfNotIri => "target-subjects-of-not-iri",
    TargetObjectsOfNotIri => "target-objects-of-not-iri",
    PathIllFormed => "path-ill-formed",
    MultiplePaths => "multiple-paths",
    ClassNotIri => "class-not-iri",
    DatatypeNotIri => "datatype-not-iri",
    NodeKindInvalid => "node-kind-invalid",
    MinCountNotInteger => "min-count-not-integer",
    MaxCountNotInteger => "max-count-not-integer",
    MinExclusiveNotComparable => "min-exclusive-not-comparable",
    MinInclusiveNotComparable => "min-inclusive-not-comparable",
    MaxExclusiveNotComparable => "max-exclusive-not-comparable",
    MaxInclusiveNotComparable => "max-inclusive-not-comparable",
    MinLengthNotInteger => "min-length-not-integer",
    MaxLengthNotInteger => "max-length-not-integer",
    PatternNotString => "pattern-not-string",
    FlagsNotString => "flags-not-string",
    MultiplePatterns => "multiple-patterns",
    MultipleFlags => "multiple-flags",
    StemNotString => "stem-not-string",
    LanguageInNotStringList => "language-in-not-string-list",
    UniqueLangNotTrue => "unique-lang-not-true",
    EqualsNotIri => "equals-not-iri",
    DisjointNotIri => "disjoint-not-iri",
    LessThanNotIri => "less-than-not-iri",
    LessThanOrEqualsNotIri => "less-than-or-equals-not-iri",
    ShapeNotNode => "shape-not-node",
    NotNotNode => "not-not-node",
    AndNotNodeList => "and-not-node-list",
    OrNotNodeList => "or-not-node-list",
    QualifiedValueShapeNotNode => "qualified-value-shape-not-node",
    QualifiedMinCountNotInteger => "qualified-min-count-not-integer",
    QualifiedMaxCountNotInteger => "qualified-max-count-not-integer",
    MultipleQualifiedValueShapes => "multiple-qualified-value-shapes",
    MultipleQualifiedMinCounts => "multiple-qualified-min-counts",
    MultipleQualifiedMaxCounts => "multiple-qualified-max-counts",
    QualifiedValueShapeWithoutCount => "qualified-value-shape-without-count",
    ClosedNotTrue => "closed-not-true",
    IgnoredPropertiesNotIriList => "ignored-properties-not-iri-list",
    MultipleClosed => "multiple-closed",
    MultipleIgnoredProperties => "multiple-ignored-properties",
    InNotNodeList => "in-not-node-list",
}

impl fmt::Display for ShapeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One violated rule on one shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeDiagnostic {
    pub rule: ShapeRule,
    pub shape: Term,
    /// The offending value, when the rule is about a single value.
    pub value: Option<Term>,
    /// For [`ShapeRule::PathIllFormed`], which path rule failed.
    pub path_rule: Option<PathRule>,
}

impl fmt::Display for ShapeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: shape {}", self.rule, self.shape)?;
        if let Some(v) = &self.value {
            write!(f, " value {v}")?;
        }
        if let Some(p) = self.path_rule {
            write!(f, " ({p})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Check {
    Iri,
    IriOrLiteral,
    Node,
    MessageLiteral,
    Boolean,
    True,
    Integer,
    Comparable,
    String,
    NodeKind,
    StringList,
    NodeList,
    IriList,
}

impl Check {
    fn accepts(self, v: &Term, g: &Graph) -> bool {
        let list_of = |ok: &dyn Fn(&Term) -> bool| g.list_members(v).is_some_and(|m| m.iter().all(ok));
        match self {
            Check::Iri => v.is_iri(),
            Check::IriOrLiteral => !v.is_blank(),
            Check::Node => v.is_node(),
            Check::MessageLiteral => v.as_literal().is_some_and(|l| l.is_lang_string() || l.has_datatype(xsd::STRING)),
            Check::Boolean => v.is_literal_of(xsd::BOOLEAN),
            Check::True => v.is_true_literal(),
            Check::Integer => integer_value(v).is_some(),
            Check::Comparable => is_comparable(v),
            Check::String => v.is_literal_of(xsd::STRING),
            Check::NodeKind => v.is(sh::BLANK_NODE) || v.is(sh::IRI) || v.is(sh::LITERAL),
            Check::StringList => list_of(&|m| m.is_literal_of(xsd::STRING)),
            Check::NodeList => list_of(&|m| m.is_node()),
            Check::IriList => list_of(&|m| m.is_iri()),
        }
    }
}

const VALUE_CHECKS: &[(&str, Check, ShapeRule)] = &[
    (sh::MESSAGE, Check::MessageLiteral, ShapeRule::MessageNotString),
    (sh::DEACTIVATED, Check::Boolean, ShapeRule::DeactivatedNotBoolean),
    (sh::TARGET_NODE, Check::IriOrLiteral, ShapeRule::TargetNodeNotIriOrLiteral),
    (sh::TARGET_CLASS, Check::Iri, ShapeRule::TargetClassNotIri),
    (sh::TARGET_SUBJECTS_OF, Check::Iri, ShapeRule::TargetSubjectsOfNotIri),
    (sh::TARGET_OBJECTS_OF, Check::Iri, ShapeRule::TargetObjectsOfNotIri),
    (sh::CLASS, Check::Iri, ShapeRule::ClassNotIri),
    (sh::DATATYPE, Check::Iri, ShapeRule::DatatypeNotIri),
    (sh::NODE_KIND, Check::NodeKind, ShapeRule::NodeKindInvalid),
    (sh::MIN_COUNT, Check::Integer, ShapeRule::MinCountNotInteger),
    (sh::MAX_COUNT, Check::Integer, ShapeRule::MaxCountNotInteger),
    (sh::MIN_EXCLUSIVE, Check::Comparable, ShapeRule::MinExclusiveNotComparable),
    (sh::MIN_INCLUSIVE, Check::Comparable, ShapeRule::MinInclusiveNotComparable),
    (sh::MAX_EXCLUSIVE, Check::Comparable, ShapeRule::MaxExclusiveNotComparable),
    (sh::MAX_INCLUSIVE, Check::Comparable, ShapeRule::MaxInclusiveNotComparable),
    (sh::MIN_LENGTH, Check::Integer, ShapeRule::MinLengthNotInteger),
    (sh::MAX_LENGTH, Check::Integer, ShapeRule::MaxLengthNotInteger),
    (sh::PATTERN, Check::String, ShapeRule::PatternNotString),
    (sh::FLAGS, Check::String, ShapeRule::FlagsNotString),
    (sh::STEM, Check::String, ShapeRule::StemNotString),
    (sh::LANGUAGE_IN, Check::StringList, ShapeRule::LanguageInNotStringList),
    (sh::UNIQUE_LANG, Check::True, ShapeRule::UniqueLangNotTrue),
    (sh::EQUALS, Check::Iri, ShapeRule::EqualsNotIri),
    (sh::DISJOINT, Check::Iri, ShapeRule::DisjointNotIri),
    (sh::LESS_THAN, Check::Iri, ShapeRule::LessThanNotIri),
    (sh::LESS_THAN_OR_EQUALS, Check::Iri, ShapeRule::LessThanOrEqualsNotIri),
    (sh::SHAPE_PARAM, Check::Node, ShapeRule::ShapeNotNode),
    (sh::NOT, Check::Node, ShapeRule::NotNotNode),
    (sh::AND, Check::NodeList, ShapeRule::AndNotNodeList),
    (sh::OR, Check::NodeList, ShapeRule::OrNotNodeList),
    (sh::QUALIFIED_VALUE_SHAPE, Check::Node, ShapeRule::QualifiedValueShapeNotNode),
    (sh::QUALIFIED_MIN_COUNT, Check::Integer, ShapeRule::QualifiedMinCountNotInteger),
    (sh::QUALIFIED_MAX_COUNT, Check::Integer, ShapeRule::QualifiedMaxCountNotInteger),
    (sh::CLOSED, Check::True, ShapeRule::ClosedNotTrue),
    (sh::IGNORED_PROPERTIES, Check::IriList, ShapeRule::IgnoredPropertiesNotIriList),
    (sh::IN, Check::NodeList, ShapeRule::InNotNodeList),
];

const AT_MOST_ONE: &[(&str, ShapeRule)] = &[
    (sh::SEVERITY, ShapeRule::MultipleSeverity),
    (sh::PATH, ShapeRule::MultiplePaths),
    (sh::PATTERN, ShapeRule::MultiplePatterns),
    (sh::FLAGS, ShapeRule::MultipleFlags),
    (sh::QUALIFIED_VALUE_SHAPE, ShapeRule::MultipleQualifiedValueShapes),
    (sh::QUALIFIED_MIN_COUNT, ShapeRule::MultipleQualifiedMinCounts),
    (sh::QUALIFIED_MAX_COUNT, ShapeRule::MultipleQualifiedMaxCounts),
    (sh::CLOSED, ShapeRule::MultipleClosed),
    (sh::IGNORED_PROPERTIES, ShapeRule::MultipleIgnoredProperties),
];

/// Every rule `s` violates in `g`, one diagnostic per offending value.
pub fn check_shape(s: &Term, g: &Graph) -> BTreeSet<ShapeDiagnostic> {
    let mut out = BTreeSet::new();
    let diag = |rule, value: Option<&Term>| ShapeDiagnostic { rule, shape: s.clone(), value: value.cloned(), path_rule: None };

    for &(param, check, rule) in VALUE_CHECKS {
        for v in g.values(s, param) {
            if !check.accepts(v, g) {
                out.insert(diag(rule, Some(v)));
            }
        }
    }
    for &(param, rule) in AT_MOST_ONE {
        if g.value_count(s, param) > 1 {
            out.insert(diag(rule, None));
        }
    }
    if !s.is_iri() && g.is_instance(s, &Term::iri(rdfs::CLASS)) {
        out.insert(diag(ShapeRule::ImplicitClassNotIri, None));
    }
    for p in g.values(s, sh::PATH) {
        if let Err(e) = compile_path(p, g) {
            out.insert(ShapeDiagnostic { path_rule: Some(e.rule), ..diag(ShapeRule::PathIllFormed, Some(p)) });
        }
    }
    if g.has_values(s, sh::QUALIFIED_VALUE_SHAPE)
        && !g.has_values(s, sh::QUALIFIED_MIN_COUNT)
        && !g.has_values(s, sh::QUALIFIED_MAX_COUNT)
    {
        out.insert(diag(ShapeRule::QualifiedValueShapeWithoutCount, None));
    }
    out
}
