//! Graph isomorphism up to blank node renaming.
//!
//! Blank nodes are first partitioned by iterated neighbourhood hashing; a
//! backtracking search then looks for a bijection within each colour class.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use crate::graph::Graph;
use crate::term::{BlankNode, Term, Triple};

/// Whether some bijection between the blank nodes of `a` and `b` maps the
/// triples of `a` exactly onto the triples of `b`.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ground = |g: &Graph| -> Vec<Triple> {
        g.iter().filter(|t| !has_blank(t)).cloned().collect()
    };
    if ground(a) != ground(b) {
        return false;
    }
    let blanks_a: Vec<BlankNode> = a.blank_nodes().into_iter().collect();
    let blanks_b: Vec<BlankNode> = b.blank_nodes().into_iter().collect();
    if blanks_a.len() != blanks_b.len() {
        return false;
    }
    let touching_a = triples_by_blank(a);
    let touching_b = triples_by_blank(b);

    let mut colors_a: HashMap<BlankNode, u64> = blanks_a.iter().map(|&n| (n, 0)).collect();
    let mut colors_b: HashMap<BlankNode, u64> = blanks_b.iter().map(|&n| (n, 0)).collect();
    let mut classes = 1;
    loop {
        let next_a = refine(&colors_a, &touching_a);
        let next_b = refine(&colors_b, &touching_b);
        if histogram(&next_a) != histogram(&next_b) {
            return false;
        }
        let count = distinct(&next_a);
        colors_a = next_a;
        colors_b = next_b;
        if count <= classes {
            break;
        }
        classes = count;
    }

    let mut order = blanks_a.clone();
    let class_size = histogram(&colors_a);
    order.sort_by_key(|n| (class_size[&colors_a[n]], colors_a[n], *n));

    let mut search = Search {
        b,
        order: &order,
        colors_a: &colors_a,
        blanks_b: &blanks_b,
        colors_b: &colors_b,
        touching_a: &touching_a,
        mapping: HashMap::new(),
        used: HashSet::new(),
    };
    search.extend(0)
}

fn has_blank(t: &Triple) -> bool {
    t.subject().is_blank() || t.object().is_blank()
}

fn triples_by_blank(g: &Graph) -> HashMap<BlankNode, Vec<&Triple>> {
    let mut map: HashMap<BlankNode, Vec<&Triple>> = HashMap::new();
    for t in g.iter() {
        let s = t.subject().as_blank();
        let o = t.object().as_blank();
        if let Some(s) = s {
            map.entry(s).or_default().push(t);
        }
        if let Some(o) = o {
            if Some(o) != s {
                map.entry(o).or_default().push(t);
            }
        }
    }
    map
}

fn hash_term(t: &Term, me: BlankNode, colors: &HashMap<BlankNode, u64>, h: &mut DefaultHasher) {
    match t {
        Term::Blank(b) if *b == me => 0u8.hash(h),
        Term::Blank(b) => {
            1u8.hash(h);
            colors[b].hash(h);
        }
        t => {
            2u8.hash(h);
            t.hash(h);
        }
    }
}

fn refine(colors: &HashMap<BlankNode, u64>, touching: &HashMap<BlankNode, Vec<&Triple>>) -> HashMap<BlankNode, u64> {
    colors
        .iter()
        .map(|(&n, &c)| {
            let mut sigs: Vec<u64> = touching
                .get(&n)
                .into_iter()
                .flatten()
                .map(|t| {
                    let mut h = DefaultHasher::new();
                    hash_term(t.subject(), n, colors, &mut h);
                    t.predicate().hash(&mut h);
                    hash_term(t.object(), n, colors, &mut h);
                    h.finish()
                })
                .collect();
            sigs.sort_unstable();
            let mut h = DefaultHasher::new();
            c.hash(&mut h);
            sigs.hash(&mut h);
            (n, h.finish())
        })
        .collect()
}

fn histogram(colors: &HashMap<BlankNode, u64>) -> BTreeMap<u64, usize> {
    let mut hist = BTreeMap::new();
    for c in colors.values() {
        *hist.entry(*c).or_insert(0) += 1;
    }
    hist
}

fn distinct(colors: &HashMap<BlankNode, u64>) -> usize {
    colors.values().collect::<HashSet<_>>().len()
}

struct Search<'a> {
    b: &'a Graph,
    order: &'a [BlankNode],
    colors_a: &'a HashMap<BlankNode, u64>,
    blanks_b: &'a [BlankNode],
    colors_b: &'a HashMap<BlankNode, u64>,
    touching_a: &'a HashMap<BlankNode, Vec<&'a Triple>>,
    mapping: HashMap<BlankNode, BlankNode>,
    used: HashSet<BlankNode>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        let Some(&next) = self.order.get(depth) else {
            return true;
        };
        let color = self.colors_a[&next];
        for &candidate in self.blanks_b {
            if self.used.contains(&candidate) || self.colors_b[&candidate] != color {
                continue;
            }
            self.mapping.insert(next, candidate);
            self.used.insert(candidate);
            if self.consistent(next) && self.extend(depth + 1) {
                return true;
            }
            self.mapping.remove(&next);
            self.used.remove(&candidate);
        }
        false
    }

    fn consistent(&self, just_mapped: BlankNode) -> bool {
        let image = |t: &Term| -> Option<Term> {
            match t {
                Term::Blank(n) => self.mapping.get(n).map(|m| Term::Blank(*m)),
                t => Some(t.clone()),
            }
        };
        self.touching_a.get(&just_mapped).into_iter().flatten().all(|t| {
            match (image(t.subject()), image(t.object())) {
                (Some(s), Some(o)) => self.b.contains(&Triple::new(s, t.predicate().clone(), o)),
                _ => true,
            }
        })
    }
}
