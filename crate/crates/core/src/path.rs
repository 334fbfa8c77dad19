//! Property paths: recognising the RDF encoding, compiling it to a
//! [`PathExpr`], evaluating expressions over a graph and writing them back
//! out as triples.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::graph::Graph;
use crate::term::Term;
use crate::vocab::{rdf, sh};

/// A property path expression. `Sequence` and `Alternative` always hold at
/// least two parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathExpr {
    Predicate(Term),
    Sequence(Vec<PathExpr>),
    Alternative(Vec<PathExpr>),
    Inverse(Box<PathExpr>),
    ZeroOrMore(Box<PathExpr>),
    OneOrMore(Box<PathExpr>),
    ZeroOrOne(Box<PathExpr>),
}

impl PathExpr {
    pub fn predicate(iri: &str) -> Self {
        PathExpr::Predicate(Term::iri(iri))
    }

    pub fn inverse(inner: PathExpr) -> Self {
        PathExpr::Inverse(Box::new(inner))
    }

    pub fn zero_or_more(inner: PathExpr) -> Self {
        PathExpr::ZeroOrMore(Box::new(inner))
    }

    pub fn one_or_more(inner: PathExpr) -> Self {
        PathExpr::OneOrMore(Box::new(inner))
    }

    pub fn zero_or_one(inner: PathExpr) -> Self {
        PathExpr::ZeroOrOne(Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Predicate(_) => 0,
            PathExpr::Sequence(parts) | PathExpr::Alternative(parts) => {
                1 + parts.iter().map(PathExpr::depth).max().unwrap_or(0)
            }
            PathExpr::Inverse(e) | PathExpr::ZeroOrMore(e) | PathExpr::OneOrMore(e) | PathExpr::ZeroOrOne(e) => {
                1 + e.depth()
            }
        }
    }

    /// Whether the n-ary nodes all have at least two parts.
    pub fn is_well_formed(&self) -> bool {
        match self {
            PathExpr::Predicate(p) => p.is_iri(),
            PathExpr::Sequence(parts) | PathExpr::Alternative(parts) => {
                parts.len() >= 2 && parts.iter().all(PathExpr::is_well_formed)
            }
            PathExpr::Inverse(e) | PathExpr::ZeroOrMore(e) | PathExpr::OneOrMore(e) | PathExpr::ZeroOrOne(e) => {
                e.is_well_formed()
            }
        }
    }
}

/// SPARQL surface syntax.
impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, parts: &[PathExpr], sep: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")
        };
        match self {
            PathExpr::Predicate(p) => write!(f, "{p}"),
            PathExpr::Sequence(parts) => join(f, parts, " / "),
            PathExpr::Alternative(parts) => join(f, parts, " | "),
            PathExpr::Inverse(e) => write!(f, "^({e})"),
            PathExpr::ZeroOrMore(e) => write!(f, "({e})*"),
            PathExpr::OneOrMore(e) => write!(f, "({e})+"),
            PathExpr::ZeroOrOne(e) => write!(f, "({e})?"),
        }
    }
}

/// The three families of ill-formed path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathRule {
    /// A blank node with values for more than one path-constructing key
    /// (`rdf:first`/`rdf:rest` counting as one key).
    MultipleKeys,
    /// A blank node that reaches itself through path-structure edges.
    Cycle,
    /// A term matching zero or several of the seven encoding cases.
    NotExactlyOneCase,
}

impl PathRule {
    pub const ALL: [PathRule; 3] = [PathRule::MultipleKeys, PathRule::Cycle, PathRule::NotExactlyOneCase];

    pub fn id(self) -> &'static str {
        match self {
            PathRule::MultipleKeys => "path-multiple-keys",
            PathRule::Cycle => "path-cycle",
            PathRule::NotExactlyOneCase => "path-not-exactly-one-case",
        }
    }
}

impl fmt::Display for PathRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{node} is an ill-formed property path ({rule})")]
pub struct IllFormedPath {
    pub rule: PathRule,
    pub node: Term,
}

const UNARY_KEYS: [&str; 4] = [sh::INVERSE_PATH, sh::ZERO_OR_MORE_PATH, sh::ONE_OR_MORE_PATH, sh::ZERO_OR_ONE_PATH];

/// Compiles the path encoded at `p` in `g`.
pub fn compile_path(p: &Term, g: &Graph) -> Result<PathExpr, IllFormedPath> {
    Compiler { g, memo: HashMap::new() }.compile(p)
}

struct Compiler<'g> {
    g: &'g Graph,
    memo: HashMap<Term, Result<PathExpr, IllFormedPath>>,
}

impl Compiler<'_> {
    fn compile(&mut self, p: &Term) -> Result<PathExpr, IllFormedPath> {
        if let Some(done) = self.memo.get(p) {
            return done.clone();
        }
        let result = self.compile_uncached(p);
        self.memo.insert(p.clone(), result.clone());
        result
    }

    fn compile_uncached(&mut self, p: &Term) -> Result<PathExpr, IllFormedPath> {
        let g = self.g;
        let fail = |rule| Err(IllFormedPath { rule, node: p.clone() });
        if p.is_blank() {
            if key_count(p, g) > 1 {
                return fail(PathRule::MultipleKeys);
            }
            if on_structural_cycle(p, g) {
                return fail(PathRule::Cycle);
            }
        }
        // No structural cycle passes through p, so recursing into its
        // members and values terminates. Every case is evaluated and exactly
        // one must hold.
        let mut cases: Vec<PathExpr> = Vec::new();
        if p.is_iri() {
            cases.push(PathExpr::Predicate(p.clone()));
        }
        if p.is_blank() {
            if let Some(members) = g.list_members(p) {
                if let Some(parts) = self.members_as_paths(&members) {
                    cases.push(PathExpr::Sequence(parts));
                }
            }
            if let Some(list) = g.sole_value(p, sh::ALTERNATIVE_PATH) {
                if let Some(members) = g.list_members(list) {
                    if let Some(parts) = self.members_as_paths(&members) {
                        cases.push(PathExpr::Alternative(parts));
                    }
                }
            }
            for key in UNARY_KEYS {
                if let Some(v) = g.sole_value(p, key) {
                    if let Ok(inner) = self.compile(v) {
                        let inner = Box::new(inner);
                        cases.push(match key {
                            sh::INVERSE_PATH => PathExpr::Inverse(inner),
                            sh::ZERO_OR_MORE_PATH => PathExpr::ZeroOrMore(inner),
                            sh::ONE_OR_MORE_PATH => PathExpr::OneOrMore(inner),
                            _ => PathExpr::ZeroOrOne(inner),
                        });
                    }
                }
            }
        }
        match <[PathExpr; 1]>::try_from(cases) {
            Ok([only]) => Ok(only),
            Err(_) => fail(PathRule::NotExactlyOneCase),
        }
    }

    fn members_as_paths(&mut self, members: &[Term]) -> Option<Vec<PathExpr>> {
        if members.len() < 2 {
            return None;
        }
        members.iter().map(|m| self.compile(m).ok()).collect()
    }
}

fn key_count(p: &Term, g: &Graph) -> usize {
    let list_key = g.has_values(p, rdf::FIRST) || g.has_values(p, rdf::REST);
    let others = [sh::ALTERNATIVE_PATH]
        .into_iter()
        .chain(UNARY_KEYS)
        .filter(|k| g.has_values(p, k))
        .count();
    usize::from(list_key) + others
}

/// Nodes reachable from `n` by one step of
/// `(rdf:rest* rdf:first) | sh:alternativePath (rdf:rest* rdf:first) |
/// sh:inversePath | sh:zeroOrMorePath | sh:oneOrMorePath | sh:zeroOrOnePath`.
fn structural_successors<'g>(n: &Term, g: &'g Graph) -> BTreeSet<&'g Term> {
    let mut out = BTreeSet::new();
    firsts_along_rest(n, g, &mut out);
    for list in g.values(n, sh::ALTERNATIVE_PATH) {
        firsts_along_rest(list, g, &mut out);
    }
    for key in UNARY_KEYS {
        out.extend(g.values(n, key));
    }
    out
}

/// `rdf:first` values of every cell reachable over `rdf:rest*` from `start`.
fn firsts_along_rest<'g>(start: &Term, g: &'g Graph, out: &mut BTreeSet<&'g Term>) {
    let rest = Term::iri(rdf::REST);
    let first = Term::iri(rdf::FIRST);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(cell) = queue.pop_front() {
        out.extend(g.values_for(&cell, &first));
        for next in g.values_for(&cell, &rest) {
            if seen.insert(next.clone()) {
                queue.push_back(next.clone());
            }
        }
    }
}

/// Whether a non-empty sequence of structural steps leads from `p` back to `p`.
fn on_structural_cycle(p: &Term, g: &Graph) -> bool {
    let mut seen: BTreeSet<&Term> = BTreeSet::new();
    let mut queue: VecDeque<&Term> = structural_successors(p, g).into_iter().collect();
    while let Some(n) = queue.pop_front() {
        if n == p {
            return true;
        }
        if seen.insert(n) {
            queue.extend(structural_successors(n, g));
        }
    }
    false
}

/// All terms `v` such that (`start`, `v`) is a solution of `e` over `g`.
pub fn eval_path(start: &Term, e: &PathExpr, g: &Graph) -> BTreeSet<Term> {
    eval_from(&BTreeSet::from([start.clone()]), e, g, Direction::Forward)
}

/// All terms `s` such that (`s`, `end`) is a solution of `e` over `g`.
pub fn eval_path_inverse(end: &Term, e: &PathExpr, g: &Graph) -> BTreeSet<Term> {
    eval_from(&BTreeSet::from([end.clone()]), e, g, Direction::Backward)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

fn eval_from(starts: &BTreeSet<Term>, e: &PathExpr, g: &Graph, dir: Direction) -> BTreeSet<Term> {
    match e {
        PathExpr::Predicate(p) => starts
            .iter()
            .flat_map(|s| -> Box<dyn Iterator<Item = &Term>> {
                match dir {
                    Direction::Forward => Box::new(g.values_for(s, p)),
                    Direction::Backward => Box::new(g.subjects_for(p, s)),
                }
            })
            .cloned()
            .collect(),
        PathExpr::Inverse(inner) => eval_from(starts, inner, g, dir.flip()),
        PathExpr::Sequence(parts) => {
            let ordered: Box<dyn Iterator<Item = &PathExpr>> = match dir {
                Direction::Forward => Box::new(parts.iter()),
                Direction::Backward => Box::new(parts.iter().rev()),
            };
            ordered.fold(starts.clone(), |acc, part| eval_from(&acc, part, g, dir))
        }
        PathExpr::Alternative(parts) => parts.iter().flat_map(|part| eval_from(starts, part, g, dir)).collect(),
        PathExpr::ZeroOrOne(inner) => {
            let mut out = starts.clone();
            out.extend(eval_from(starts, inner, g, dir));
            out
        }
        PathExpr::ZeroOrMore(inner) => closure(starts, inner, g, dir, true),
        PathExpr::OneOrMore(inner) => closure(starts, inner, g, dir, false),
    }
}

fn closure(starts: &BTreeSet<Term>, step: &PathExpr, g: &Graph, dir: Direction, reflexive: bool) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for start in starts {
        let mut reached: BTreeSet<Term> = BTreeSet::new();
        if reflexive {
            reached.insert(start.clone());
        }
        let mut frontier = eval_from(&BTreeSet::from([start.clone()]), step, g, dir);
        while !frontier.is_empty() {
            let new: BTreeSet<Term> = frontier.into_iter().filter(|t| reached.insert(t.clone())).collect();
            frontier = if new.is_empty() { BTreeSet::new() } else { eval_from(&new, step, g, dir) };
        }
        out.extend(reached);
    }
    out
}

/// Whether two compiled paths denote the same expression.
pub fn path_equivalent(a: &PathExpr, b: &PathExpr) -> bool {
    a == b
}

/// Writes `e` into `g` with fresh blank nodes and returns the node it is
/// encoded at. A predicate path is the bare IRI.
pub fn encode_path(e: &PathExpr, g: &mut Graph) -> Term {
    let keyed = |g: &mut Graph, key: &str, inner: &PathExpr| {
        let value = encode_path(inner, g);
        let node = g.fresh_blank();
        g.add(node.clone(), Term::iri(key), value);
        node
    };
    match e {
        PathExpr::Predicate(p) => p.clone(),
        PathExpr::Sequence(parts) => {
            let members: Vec<Term> = parts.iter().map(|p| encode_path(p, g)).collect();
            g.add_list(&members)
        }
        PathExpr::Alternative(parts) => {
            let members: Vec<Term> = parts.iter().map(|p| encode_path(p, g)).collect();
            let list = g.add_list(&members);
            let node = g.fresh_blank();
            g.add(node.clone(), Term::iri(sh::ALTERNATIVE_PATH), list);
            node
        }
        PathExpr::Inverse(inner) => keyed(g, sh::INVERSE_PATH, inner),
        PathExpr::ZeroOrMore(inner) => keyed(g, sh::ZERO_OR_MORE_PATH, inner),
        PathExpr::OneOrMore(inner) => keyed(g, sh::ONE_OR_MORE_PATH, inner),
        PathExpr::ZeroOrOne(inner) => keyed(g, sh::ZERO_OR_ONE_PATH, inner),
    }
}
