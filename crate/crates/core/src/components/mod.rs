//! The 27 constraint components: their parameter signatures and what each
//! one reports for a focus node and its value nodes.

pub mod sparql;

use std::collections::{BTreeSet, HashMap};

use crate::error::Failure;
use crate::graph::Graph;
use crate::shapes::Shape;
use crate::term::Term;
use crate::vocab::sh;

pub use sparql::{
    compile_regex, integer_value, is_comparable, lang_matches, regex_match, sparql_compare, sparql_str, str_starts,
    CompareOp, RegexError, Tristate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Class,
    Datatype,
    NodeKind,
    MinCount,
    MaxCount,
    MinExclusive,
    MinInclusive,
    MaxExclusive,
    MaxInclusive,
    MinLength,
    MaxLength,
    Pattern,
    Stem,
    LanguageIn,
    UniqueLang,
    Equals,
    Disjoint,
    LessThan,
    LessThanOrEquals,
    Shape,
    Not,
    And,
    Or,
    QualifiedValueShape,
    Closed,
    HasValue,
    In,
}

/// Parameter signature of a constraint component.
#[derive(Debug, PartialEq, Eq)]
pub struct ComponentDef {
    pub component: Component,
    pub iri: &'static str,
    pub mandatory: &'static [&'static str],
    pub optional: &'static [&'static str],
    pub list_taking: &'static [&'static str],
    pub shape_inducing: &'static [&'static str],
}

impl ComponentDef {
    pub fn parameters(&self) -> impl Iterator<Item = &'static str> {
        self.mandatory.iter().chain(self.optional).copied()
    }

    pub fn is_list_taking(&self, param: &str) -> bool {
        self.list_taking.contains(&param)
    }
}

macro_rules! def {
    ($c:ident, $iri:expr, [$($m:expr),*], [$($o:expr),*], [$($l:expr),*], [$($s:expr),*]) => {
        ComponentDef {
            component: Component::$c,
            iri: $iri,
            mandatory: &[$($m),*],
            optional: &[$($o),*],
            list_taking: &[$($l),*],
            shape_inducing: &[$($s),*],
        }
    };
}

static REGISTRY: [ComponentDef; 27] = [
    def!(Class, sh::CLASS_COMPONENT, [sh::CLASS], [], [], []),
    def!(Datatype, sh::DATATYPE_COMPONENT, [sh::DATATYPE], [], [], []),
    def!(NodeKind, sh::NODE_KIND_COMPONENT, [sh::NODE_KIND], [], [], []),
    def!(MinCount, sh::MIN_COUNT_COMPONENT, [sh::MIN_COUNT], [], [], []),
    def!(MaxCount, sh::MAX_COUNT_COMPONENT, [sh::MAX_COUNT], [], [], []),
    def!(MinExclusive, sh::MIN_EXCLUSIVE_COMPONENT, [sh::MIN_EXCLUSIVE], [], [], []),
    def!(MinInclusive, sh::MIN_INCLUSIVE_COMPONENT, [sh::MIN_INCLUSIVE], [], [], []),
    def!(MaxExclusive, sh::MAX_EXCLUSIVE_COMPONENT, [sh::MAX_EXCLUSIVE], [], [], []),
    def!(MaxInclusive, sh::MAX_INCLUSIVE_COMPONENT, [sh::MAX_INCLUSIVE], [], [], []),
    def!(MinLength, sh::MIN_LENGTH_COMPONENT, [sh::MIN_LENGTH], [], [], []),
    def!(MaxLength, sh::MAX_LENGTH_COMPONENT, [sh::MAX_LENGTH], [], [], []),
    def!(Pattern, sh::PATTERN_COMPONENT, [sh::PATTERN], [sh::FLAGS], [], []),
    def!(Stem, sh::STEM_COMPONENT, [sh::STEM], [], [], []),
    def!(LanguageIn, sh::LANGUAGE_IN_COMPONENT, [sh::LANGUAGE_IN], [], [sh::LANGUAGE_IN], []),
    def!(UniqueLang, sh::UNIQUE_LANG_COMPONENT, [sh::UNIQUE_LANG], [], [], []),
    def!(Equals, sh::EQUALS_COMPONENT, [sh::EQUALS], [], [], []),
    def!(Disjoint, sh::DISJOINT_COMPONENT, [sh::DISJOINT], [], [], []),
    def!(LessThan, sh::LESS_THAN_COMPONENT, [sh::LESS_THAN], [], [], []),
    def!(LessThanOrEquals, sh::LESS_THAN_OR_EQUALS_COMPONENT, [sh::LESS_THAN_OR_EQUALS], [], [], []),
    def!(Shape, sh::SHAPE_COMPONENT, [sh::SHAPE_PARAM], [], [], [sh::SHAPE_PARAM]),
    def!(Not, sh::NOT_COMPONENT, [sh::NOT], [], [], [sh::NOT]),
    def!(And, sh::AND_COMPONENT, [sh::AND], [], [sh::AND], [sh::AND]),
    def!(Or, sh::OR_COMPONENT, [sh::OR], [], [sh::OR], [sh::OR]),
    def!(
        QualifiedValueShape,
        sh::QUALIFIED_VALUE_SHAPE_COMPONENT,
        [sh::QUALIFIED_VALUE_SHAPE],
        [sh::QUALIFIED_MIN_COUNT, sh::QUALIFIED_MAX_COUNT],
        [],
        [sh::QUALIFIED_VALUE_SHAPE]
    ),
    def!(Closed, sh::CLOSED_COMPONENT, [sh::CLOSED], [sh::IGNORED_PROPERTIES], [sh::IGNORED_PROPERTIES], []),
    def!(HasValue, sh::HAS_VALUE_COMPONENT, [sh::HAS_VALUE], [], [], []),
    def!(In, sh::IN_COMPONENT, [sh::IN], [], [sh::IN], []),
];

/// Every constraint component, in declaration order.
pub fn registry() -> &'static [ComponentDef] {
    &REGISTRY
}

impl Component {
    pub fn def(self) -> &'static ComponentDef {
        &REGISTRY[self as usize]
    }

    pub fn iri(self) -> &'static str {
        self.def().iri
    }

    pub fn from_iri(iri: &str) -> Option<Component> {
        REGISTRY.iter().find(|d| d.iri == iri).map(|d| d.component)
    }

    pub fn all() -> impl Iterator<Item = Component> {
        REGISTRY.iter().map(|d| d.component)
    }
}

/// Whether `param` is a shape-inducing parameter of some component.
pub fn is_shape_inducing(param: &str) -> bool {
    REGISTRY.iter().any(|d| d.shape_inducing.contains(&param))
}

/// Whether `param` is a list-taking parameter of some component.
pub fn is_list_taking(param: &str) -> bool {
    REGISTRY.iter().any(|d| d.list_taking.contains(&param))
}

/// One binding of a component's parameters on a shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub component: Component,
    pub mandatory: Vec<(Term, Term)>,
    pub optional: Vec<(Term, Term)>,
}

impl Constraint {
    /// All parameter values, mandatory first.
    pub fn parameter_values(&self) -> impl Iterator<Item = &(Term, Term)> {
        self.mandatory.iter().chain(&self.optional)
    }

    /// The value bound to `param`, if any.
    pub fn value(&self, param: &str) -> Option<&Term> {
        self.parameter_values().find(|(p, _)| p.is(param)).map(|(_, v)| v)
    }

    fn mandatory_value(&self, param: &str) -> &Term {
        self.mandatory
            .iter()
            .find(|(p, _)| p.is(param))
            .map(|(_, v)| v)
            .unwrap_or_else(|| panic!("constraint {:?} lacks mandatory {param}", self.component))
    }
}

/// A validation result to be built: a focus node, an optional value node,
/// and the constraint and shape that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationRecord<'a> {
    pub focus: Term,
    pub value: Option<Term>,
    pub constraint: &'a Constraint,
    pub shape: &'a Shape,
}

/// Computes the violations of `c` for focus node `focus` with value nodes
/// `values`. `conforms(v, x)` decides whether `v` conforms to shape `x`; it
/// is only called for the shape-inducing components.
pub fn eval_constraint<'a, F>(
    c: &'a Constraint,
    focus: &Term,
    values: &BTreeSet<Term>,
    data: &Graph,
    shape: &'a Shape,
    shapes: &Graph,
    mut conforms: F,
) -> Result<Vec<ViolationRecord<'a>>, Failure>
where
    F: FnMut(&Term, &Term) -> Result<bool, Failure>,
{
    let record = |value: Option<Term>| ViolationRecord { focus: focus.clone(), value, constraint: c, shape };
    let each = |failing: &dyn Fn(&Term) -> bool| -> Vec<ViolationRecord<'a>> {
        values.iter().filter(|v| failing(v)).map(|v| record(Some(v.clone()))).collect()
    };
    let single = |fires: bool| if fires { vec![record(None)] } else { Vec::new() };
    let param = |p: &str| c.mandatory_value(p);
    let int_param = |p: &str| integer_value(param(p)).unwrap_or(0);
    let count = values.len() as i128;

    Ok(match c.component {
        Component::Class => {
            let class = param(sh::CLASS);
            each(&|v| !data.is_instance(v, class))
        }
        Component::Datatype => {
            let dt = param(sh::DATATYPE).as_iri().unwrap_or_default();
            each(&|v| !v.as_literal().is_some_and(|l| l.has_datatype(dt)))
        }
        Component::NodeKind => {
            let kind = param(sh::NODE_KIND);
            each(&|v| {
                if kind.is(sh::BLANK_NODE) {
                    !v.is_blank()
                } else if kind.is(sh::IRI) {
                    !v.is_iri()
                } else {
                    !v.is_literal()
                }
            })
        }
        Component::MinCount => single(count < int_param(sh::MIN_COUNT)),
        Component::MaxCount => single(count > int_param(sh::MAX_COUNT)),
        Component::MinExclusive => range(values, param(sh::MIN_EXCLUSIVE), CompareOp::Lt, &record),
        Component::MinInclusive => range(values, param(sh::MIN_INCLUSIVE), CompareOp::Le, &record),
        Component::MaxExclusive => range(values, param(sh::MAX_EXCLUSIVE), CompareOp::Gt, &record),
        Component::MaxInclusive => range(values, param(sh::MAX_INCLUSIVE), CompareOp::Ge, &record),
        Component::MinLength => {
            let bound = int_param(sh::MIN_LENGTH);
            each(&|v| sparql_str(v).is_none_or(|s| (s.chars().count() as i128) < bound))
        }
        Component::MaxLength => {
            let bound = int_param(sh::MAX_LENGTH);
            each(&|v| sparql_str(v).is_none_or(|s| (s.chars().count() as i128) > bound))
        }
        Component::Pattern => {
            let pattern = lexical(param(sh::PATTERN));
            let flags = c.value(sh::FLAGS).map_or("", lexical);
            let re = compile_regex(pattern, flags).ok();
            each(&|v| match (sparql_str(v), &re) {
                (Some(s), Some(re)) => !re.is_match(s),
                _ => true,
            })
        }
        Component::Stem => {
            let stem = lexical(param(sh::STEM));
            each(&|v| !v.as_iri().is_some_and(|iri| str_starts(iri, stem)))
        }
        Component::LanguageIn => {
            let ranges = shapes.list_members(param(sh::LANGUAGE_IN)).unwrap_or_default();
            each(&|v| {
                let Some(tag) = v.as_literal().and_then(|l| l.lang()) else {
                    return true;
                };
                !ranges.iter().any(|r| lang_matches(tag, lexical(r)))
            })
        }
        Component::UniqueLang => {
            let mut tags: HashMap<String, usize> = HashMap::new();
            for v in values {
                if let Some(tag) = v.as_literal().and_then(|l| l.lang()) {
                    *tags.entry(tag.to_ascii_lowercase()).or_default() += 1;
                }
            }
            each(&|v| {
                v.as_literal()
                    .and_then(|l| l.lang())
                    .is_some_and(|tag| tags[&tag.to_ascii_lowercase()] > 1)
            })
        }
        Component::Equals => {
            let other = data.value_set(focus, param(sh::EQUALS).as_iri().unwrap_or_default());
            let mut out = each(&|v| !other.contains(v));
            out.extend(other.difference(values).map(|v| record(Some(v.clone()))));
            out
        }
        Component::Disjoint => {
            let other = data.value_set(focus, param(sh::DISJOINT).as_iri().unwrap_or_default());
            each(&|v| other.contains(v))
        }
        Component::LessThan => {
            let other = data.value_set(focus, param(sh::LESS_THAN).as_iri().unwrap_or_default());
            each(&|v| other.iter().any(|w| !sparql_compare(CompareOp::Lt, v, w).is_true()))
        }
        Component::LessThanOrEquals => {
            let other = data.value_set(focus, param(sh::LESS_THAN_OR_EQUALS).as_iri().unwrap_or_default());
            each(&|v| other.iter().any(|w| !sparql_compare(CompareOp::Le, v, w).is_true()))
        }
        Component::Shape => {
            let x = param(sh::SHAPE_PARAM);
            let mut out = Vec::new();
            for v in values {
                if !conforms(v, x)? {
                    out.push(record(Some(v.clone())));
                }
            }
            out
        }
        Component::Not => {
            let x = param(sh::NOT);
            let mut out = Vec::new();
            for v in values {
                if conforms(v, x)? {
                    out.push(record(Some(v.clone())));
                }
            }
            out
        }
        Component::And => {
            let members = shapes.list_members(param(sh::AND)).unwrap_or_default();
            let mut out = Vec::new();
            for v in values {
                let mut all = true;
                for x in &members {
                    if !conforms(v, x)? {
                        all = false;
                        break;
                    }
                }
                if !all {
                    out.push(record(Some(v.clone())));
                }
            }
            out
        }
        Component::Or => {
            let members = shapes.list_members(param(sh::OR)).unwrap_or_default();
            let mut out = Vec::new();
            for v in values {
                let mut any = false;
                for x in &members {
                    if conforms(v, x)? {
                        any = true;
                        break;
                    }
                }
                if !any {
                    out.push(record(Some(v.clone())));
                }
            }
            out
        }
        Component::QualifiedValueShape => {
            let x = param(sh::QUALIFIED_VALUE_SHAPE);
            let mut k: i128 = 0;
            for v in values {
                if conforms(v, x)? {
                    k += 1;
                }
            }
            let below = c.value(sh::QUALIFIED_MIN_COUNT).and_then(integer_value).is_some_and(|m| k < m);
            let above = c.value(sh::QUALIFIED_MAX_COUNT).and_then(integer_value).is_some_and(|n| k > n);
            single(below || above)
        }
        Component::Closed => {
            let mut allowed: BTreeSet<&Term> = shapes
                .values(&shape.node, sh::SHAPE_PARAM)
                .flat_map(|t| shapes.values(t, sh::PATH))
                .filter(|w| w.is_iri())
                .collect();
            let ignored = c
                .value(sh::IGNORED_PROPERTIES)
                .and_then(|i| shapes.list_members(i))
                .unwrap_or_default();
            allowed.extend(ignored.iter());
            data.outgoing(focus)
                .filter(|(q, _)| !allowed.contains(q))
                .map(|(_, o)| record(Some(o.clone())))
                .collect()
        }
        Component::HasValue => single(!values.contains(param(sh::HAS_VALUE))),
        Component::In => {
            let members: BTreeSet<Term> =
                shapes.list_members(param(sh::IN)).unwrap_or_default().into_iter().collect();
            each(&|v| !members.contains(v))
        }
    })
}

fn range<'a>(
    values: &BTreeSet<Term>,
    bound: &Term,
    op: CompareOp,
    record: &dyn Fn(Option<Term>) -> ViolationRecord<'a>,
) -> Vec<ViolationRecord<'a>> {
    values
        .iter()
        .filter(|v| !sparql_compare(op, bound, v).is_true())
        .map(|v| record(Some(v.clone())))
        .collect()
}

fn lexical(t: &Term) -> &str {
    t.as_literal().map_or("", |l| l.lexical())
}
