//! Indexed triple store and the derived relations validation is built on:
//! property values, well-formed lists, and instance-of through
//! `rdf:type`/`rdfs:subClassOf`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::term::{BlankNode, Term, Triple};
use crate::vocab::{rdf, rdfs};

/// Hands out blank node ids. Graphs that share one allocator never receive the
/// same fresh id, which is what lets results graphs be unioned without
/// renaming.
#[derive(Debug, Default)]
pub struct BlankAllocator {
    next: AtomicU64,
}

impl BlankAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    /// An allocator whose first id is `first`.
    pub fn starting_at(first: u64) -> Self {
        BlankAllocator { next: AtomicU64::new(first) }
    }

    pub fn allocate(&self) -> BlankNode {
        BlankNode(self.next.fetch_add(1, Ordering::Relaxed))
    }

    /// Makes sure `id` is never handed out.
    pub fn reserve(&self, id: u64) {
        self.next.fetch_max(id.saturating_add(1), Ordering::Relaxed);
    }

    pub fn peek(&self) -> u64 {
        self.next.load(Ordering::Relaxed)
    }
}

type Index = BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>>;

/// How [`Graph::union`] treats blank nodes occurring in several inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlankScope {
    /// Same id, same node. Used to combine results graphs.
    Shared,
    /// Blank nodes of every input after the first are renamed apart.
    Disjoint,
}

/// A set of triples indexed by subject, predicate and object.
#[derive(Clone, Default)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    spo: Index,
    pos: Index,
    osp: Index,
    allocator: Arc<BlankAllocator>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// An empty graph drawing fresh blank nodes from `allocator`.
    pub fn with_allocator(allocator: Arc<BlankAllocator>) -> Self {
        Graph { allocator, ..Default::default() }
    }

    pub fn allocator(&self) -> &Arc<BlankAllocator> {
        &self.allocator
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in (subject, predicate, object) term order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        for term in triple.terms() {
            if let Term::Blank(b) = term {
                self.allocator.reserve(b.id());
            }
        }
        let (s, p, o) = (triple.subject().clone(), triple.predicate().clone(), triple.object().clone());
        add_index(&mut self.spo, s.clone(), p.clone(), o.clone());
        add_index(&mut self.pos, p.clone(), o.clone(), s.clone());
        add_index(&mut self.osp, o, s, p);
        self.triples.insert(triple)
    }

    /// Inserts ⟨s, p, o⟩.
    ///
    /// # Panics
    ///
    /// If `s` is a literal or `p` is not an IRI.
    pub fn add(&mut self, s: Term, p: Term, o: Term) -> bool {
        self.insert(Triple::new(s, p, o))
    }

    pub fn extend(&mut self, triples: impl IntoIterator<Item = Triple>) {
        for t in triples {
            self.insert(t);
        }
    }

    /// A blank node that does not occur in this graph (nor in any graph
    /// sharing its allocator, as long as ids came from the allocator).
    pub fn fresh_blank(&self) -> Term {
        Term::Blank(self.allocator.allocate())
    }

    /// The values of `n` for `p`.
    pub fn values<'a>(&'a self, n: &Term, p: &str) -> impl Iterator<Item = &'a Term> + 'a {
        self.values_for(n, &Term::iri(p))
    }

    pub fn values_for<'a>(&'a self, n: &Term, p: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.spo.get(n).and_then(|by_p| by_p.get(p)).into_iter().flatten()
    }

    pub fn value_set(&self, n: &Term, p: &str) -> BTreeSet<Term> {
        self.values(n, p).cloned().collect()
    }

    /// The sole value of `n` for `p`, if it has exactly one.
    pub fn sole_value(&self, n: &Term, p: &str) -> Option<&Term> {
        let mut it = self.values(n, p);
        match (it.next(), it.next()) {
            (Some(v), None) => Some(v),
            _ => None,
        }
    }

    pub fn value_count(&self, n: &Term, p: &str) -> usize {
        self.values(n, p).count()
    }

    pub fn has_values(&self, n: &Term, p: &str) -> bool {
        self.values(n, p).next().is_some()
    }

    /// Subjects `s` with ⟨s, p, o⟩ in the graph.
    pub fn subjects_for<'a>(&'a self, p: &Term, o: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.pos.get(p).and_then(|by_o| by_o.get(o)).into_iter().flatten()
    }

    /// (predicate, object) pairs of triples with subject `s`.
    pub fn outgoing<'a>(&'a self, s: &Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        self.spo
            .get(s)
            .into_iter()
            .flat_map(|by_p| by_p.iter().flat_map(|(p, os)| os.iter().map(move |o| (p, o))))
    }

    /// (subject, predicate) pairs of triples with object `o`.
    pub fn incoming<'a>(&'a self, o: &Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        self.osp
            .get(o)
            .into_iter()
            .flat_map(|by_s| by_s.iter().flat_map(|(s, ps)| ps.iter().map(move |p| (s, p))))
    }

    /// (subject, object) pairs of triples with predicate `p`.
    pub fn with_predicate<'a>(&'a self, p: &Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        self.pos
            .get(p)
            .into_iter()
            .flat_map(|by_o| by_o.iter().flat_map(|(o, ss)| ss.iter().map(move |s| (s, o))))
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Term> + '_ {
        self.spo.keys()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Term> + '_ {
        self.pos.keys()
    }

    /// Every term in subject or object position.
    pub fn nodes(&self) -> BTreeSet<&Term> {
        self.spo.keys().chain(self.osp.keys()).collect()
    }

    pub fn blank_nodes(&self) -> BTreeSet<BlankNode> {
        self.triples
            .iter()
            .flat_map(|t| t.terms())
            .filter_map(Term::as_blank)
            .collect()
    }

    pub fn max_blank_id(&self) -> Option<u64> {
        self.blank_nodes().into_iter().map(BlankNode::id).max()
    }

    /// Members of the well-formed list at `n`, or `None` when `n` is not one.
    ///
    /// `rdf:nil` is the empty list provided it has no `rdf:first`/`rdf:rest`.
    /// Every other cell must be an IRI or blank node with exactly one
    /// `rdf:first` and exactly one `rdf:rest`, and the `rdf:rest` chain must
    /// reach `rdf:nil` without revisiting a cell.
    pub fn list_members(&self, n: &Term) -> Option<Vec<Term>> {
        let mut members = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cell = n;
        loop {
            if cell.is_literal() {
                return None;
            }
            let first = self.sole_value(cell, rdf::FIRST);
            let rest = self.sole_value(cell, rdf::REST);
            if cell.is(rdf::NIL) {
                let bare = !self.has_values(cell, rdf::FIRST) && !self.has_values(cell, rdf::REST);
                return bare.then_some(members);
            }
            let (Some(first), Some(rest)) = (first, rest) else {
                return None;
            };
            if !seen.insert(cell) {
                return None;
            }
            members.push(first.clone());
            cell = rest;
        }
    }

    /// Whether `n` is an instance of `m`: some path from `n` to `m` starts
    /// with an `rdf:type` triple and continues with zero or more
    /// `rdfs:subClassOf` triples.
    pub fn is_instance(&self, n: &Term, m: &Term) -> bool {
        let sub_class_of = Term::iri(rdfs::SUB_CLASS_OF);
        let mut seen: BTreeSet<&Term> = BTreeSet::new();
        let mut queue: VecDeque<&Term> = self.values(n, rdf::TYPE).collect();
        while let Some(c) = queue.pop_front() {
            if c == m {
                return true;
            }
            if seen.insert(c) {
                queue.extend(self.values_for(c, &sub_class_of));
            }
        }
        false
    }

    /// All ASHACL instances of `class`.
    pub fn instances_of(&self, class: &Term) -> BTreeSet<Term> {
        let rdf_type = Term::iri(rdf::TYPE);
        let sub_class_of = Term::iri(rdfs::SUB_CLASS_OF);
        let mut classes = BTreeSet::from([class]);
        let mut queue = VecDeque::from([class]);
        while let Some(c) = queue.pop_front() {
            for sub in self.subjects_for(&sub_class_of, c) {
                if classes.insert(sub) {
                    queue.push_back(sub);
                }
            }
        }
        classes
            .into_iter()
            .flat_map(|c| self.subjects_for(&rdf_type, c))
            .cloned()
            .collect()
    }

    /// Writes `members` as a fresh list and returns its head.
    pub fn add_list(&mut self, members: &[Term]) -> Term {
        let mut head = Term::iri(rdf::NIL);
        for member in members.iter().rev() {
            let cell = self.fresh_blank();
            self.add(cell.clone(), Term::iri(rdf::FIRST), member.clone());
            self.add(cell.clone(), Term::iri(rdf::REST), head);
            head = cell;
        }
        head
    }

    /// Union of `graphs`. The result draws fresh blanks from the first
    /// graph's allocator.
    pub fn union<'a>(graphs: impl IntoIterator<Item = &'a Graph>, scope: BlankScope) -> Graph {
        let mut graphs = graphs.into_iter();
        let Some(first) = graphs.next() else {
            return Graph::new();
        };
        let mut out = first.clone();
        for g in graphs {
            match scope {
                BlankScope::Shared => out.extend(g.iter().cloned()),
                BlankScope::Disjoint => out.merge(g),
            }
        }
        out
    }

    /// Adds the triples of `other` with its blank nodes renamed to fresh ones.
    pub fn merge(&mut self, other: &Graph) {
        let mut renamed: HashMap<BlankNode, Term> = HashMap::new();
        let mut rename = |t: &Term, g: &Graph| match t {
            Term::Blank(b) => renamed.entry(*b).or_insert_with(|| g.fresh_blank()).clone(),
            t => t.clone(),
        };
        let triples: Vec<Triple> = other
            .iter()
            .map(|t| {
                let s = rename(t.subject(), self);
                let o = rename(t.object(), self);
                Triple::new(s, t.predicate().clone(), o)
            })
            .collect();
        self.extend(triples);
    }

    /// A copy of this graph whose blank ids avoid every blank id of `other`.
    pub fn renamed_apart_from(&self, other: &Graph) -> Graph {
        let allocator = Arc::new(BlankAllocator::new());
        if let Some(max) = other.max_blank_id().max(self.max_blank_id()) {
            allocator.reserve(max);
        }
        let mut out = Graph::with_allocator(allocator);
        out.merge(self);
        out
    }

    /// Checks that every index agrees with the triple set.
    pub fn check_indexes(&self) -> bool {
        let from = |idx: &Index, f: fn(&Term, &Term, &Term) -> Triple| -> BTreeSet<Triple> {
            idx.iter()
                .flat_map(|(a, m)| m.iter().flat_map(move |(b, cs)| cs.iter().map(move |c| f(a, b, c))))
                .collect()
        };
        let spo = from(&self.spo, |s, p, o| Triple::new(s.clone(), p.clone(), o.clone()));
        let pos = from(&self.pos, |p, o, s| Triple::new(s.clone(), p.clone(), o.clone()));
        let osp = from(&self.osp, |o, s, p| Triple::new(s.clone(), p.clone(), o.clone()));
        spo == self.triples && pos == self.triples && osp == self.triples
    }
}

fn add_index(idx: &mut Index, a: Term, b: Term, c: Term) {
    idx.entry(a).or_default().entry(b).or_default().insert(c);
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.triples.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}
