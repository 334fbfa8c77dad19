//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

#[path = "../support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use ashacl::components::{eval_constraint, Component, Constraint};
use ashacl::engine::{build_report, combine, validate_results_graph};
use ashacl::iso::isomorphic;
use ashacl::path::eval_path_inverse;
use ashacl::shapes::{check_shape, complete_targets, value_nodes, ShapeRule};
use ashacl::vocab::{rdf, rdfs, sh};
use ashacl::{
    compile_path, encode_path, eval_path, parse, serialize, Failure, Format, Graph, Limits, PathExpr, PathRule,
    ResultsStructure, Shape, ShapesGraph, Term, Validator,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use support::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report_of(data: &Graph, shapes: &Graph) -> Result<ResultsStructure, Failure> {
    ashacl::validate_graph(data, shapes)
}

fn end_to_end() -> Outcome {
    let cases = [
        ("example1-shapes.ttl", "people-conforming.ttl", "people-mutated.ttl"),
        ("example2-shapes.ttl", "people-conforming.ttl", "people-mutated.ttl"),
        ("example3-shapes.ttl", "animals-conforming.ttl", "animals-mutated.ttl"),
    ];
    let mut slowest = Duration::ZERO;
    for (i, (shapes, good, bad)) in cases.iter().enumerate() {
        let start = Instant::now();
        let sg = load_fixture(shapes);
        let ok = report_of(&load_fixture(good), &sg).map_err(|e| e.to_string())?;
        ensure(ok.conforms(), || format!("{shapes} on {good}: expected conformance"))?;
        let r = report_of(&load_fixture(bad), &sg).map_err(|e| e.to_string())?;
        ensure(r.top_level.len() == 1, || format!("{shapes} on {bad}: {} results", r.top_level.len()))?;
        let result = r.top_level.iter().next().expect("one result");
        let focus = r.graph.sole_value(result, sh::FOCUS_NODE).cloned();
        let value = r.graph.sole_value(result, sh::VALUE_NODE).cloned();
        let expected = match i {
            0 => focus == Some(ex("alice")),
            1 => focus == Some(ex("alice")) && value == Some(ex("bob")),
            _ => focus == Some(ex("c")),
        };
        ensure(expected, || format!("{shapes}: focus {focus:?} value {value:?}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(took < Duration::from_secs(1), || format!("{shapes} took {took:?}"))?;
    }
    Ok(format!("3 examples, slowest {slowest:?}"))
}

/// A shapes graph holding `c` on ex:s, plus nested shapes for Closed.
fn component_instance(rng: &mut StdRng, component: Component) -> (Constraint, Graph) {
    let nested: Vec<Term> = (0..3).map(|i| ex(&format!("X{i}"))).collect();
    let mut sg = Graph::new();
    let c = random_constraint(rng, component, &mut sg, &nested);
    write_constraint(&mut sg, &ex("s"), &c);
    for _ in 0..rng.gen_range(0..=2) {
        let t = sg.fresh_blank();
        sg.add(ex("s"), iri(sh::SHAPE_PARAM), t.clone());
        let path = if rng.gen_bool(0.8) {
            pick(rng, &[ex("p"), ex("q"), iri(rdf::TYPE)])
        } else {
            encode_path(&PathExpr::inverse(PathExpr::Predicate(ex("r"))), &mut sg)
        };
        sg.add(t, iri(sh::PATH), path);
    }
    (c, sg)
}

fn component_oracles() -> Outcome {
    let start = Instant::now();
    let pool = Pool::all();
    let mut checked = 0;
    for component in Component::all() {
        let mut rng = StdRng::seed_from_u64(0xC0 + component as u64);
        for i in 0..100 {
            let (c, sg) = component_instance(&mut rng, component);
            let table = coin_table(&mut rng);
            let d = random_data(&mut rng, 25);
            let f = pick(&mut rng, &Pool::nodes());
            let values = random_subset(&mut rng, &pool, 5);
            let shape = Shape::bare(ex("s"), vec![c.clone()]);
            let got = eval_constraint(&c, &f, &values, &d, &shape, &sg, |v, x| Ok(table[&(v.clone(), x.clone())]))
                .map_err(|e| e.to_string())?;
            let mut got: Vec<(Term, Option<Term>)> = got.into_iter().map(|r| (r.focus, r.value)).collect();
            got.sort();
            let want = oracle_violations(&c, &f, &values, &d, &ex("s"), &sg, &|v, x| table[&(v.clone(), x.clone())]);
            ensure(got == want, || format!("{component:?} case {i}: got {got:?} want {want:?} for {c:?} V={values:?}"))?;
            checked += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("{checked} instances, 0 divergences, {took:?}"))
}

fn path_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let preds = [ex("p"), ex("q")];
    for i in 0..500 {
        let n = rng.gen_range(1..=8);
        let g = random_small_graph(&mut rng, n, &preds);
        let e = random_path(&mut rng, 3, &preds);
        ensure(e.depth() <= 3, || format!("depth {}", e.depth()))?;
        let start = ex(&format!("v{}", rng.gen_range(0..=n)));
        let got = eval_path(&start, &e, &g);
        let want = oracle_path(&start, &e, &g);
        ensure(got == want, || format!("case {i}: {e:?} from {start}: got {got:?} want {want:?}"))?;
        let mut universe: BTreeSet<Term> = g.iter().flat_map(|t| t.terms().map(Clone::clone)).collect();
        universe.insert(start.clone());
        let back = eval_path_inverse(&start, &e, &g);
        let want_back: BTreeSet<Term> =
            universe.into_iter().filter(|s| oracle_path(s, &e, &g).contains(&start)).collect();
        ensure(back == want_back, || format!("case {i}: inverse of {e:?} to {start}: got {back:?} want {want_back:?}"))?;
    }
    Ok("500 cases, 0 divergences".into())
}

/// A negative and a positive shapes graph body for every shape rule.
fn shape_rule_fixtures(rule: ShapeRule) -> (&'static str, &'static str) {
    use ShapeRule::*;
    match rule {
        MultipleSeverity => ("ex:s sh:severity sh:Warning, sh:Info .", "ex:s sh:severity sh:Warning ."),
        MessageNotString => ("ex:s sh:message 3 .", "ex:s sh:message \"m\"@en, \"n\" ."),
        DeactivatedNotBoolean => ("ex:s sh:deactivated \"yes\" .", "ex:s sh:deactivated false ."),
        TargetNodeNotIriOrLiteral => ("ex:s sh:targetNode [] .", "ex:s sh:targetNode ex:a, \"b\" ."),
        TargetClassNotIri => ("ex:s sh:targetClass \"C\" .", "ex:s sh:targetClass ex:C ."),
        ImplicitClassNotIri => ("_:s a rdfs:Class, sh:Shape .", "ex:s a rdfs:Class, sh:Shape ."),
        TargetSubjectsOfNotIri => ("ex:s sh:targetSubjectsOf [] .", "ex:s sh:targetSubjectsOf ex:p ."),
        TargetObjectsOfNotIri => ("ex:s sh:targetObjectsOf 1 .", "ex:s sh:targetObjectsOf ex:p ."),
        PathIllFormed => ("ex:s sh:path ( ex:p ) .", "ex:s sh:path ( ex:p ex:q ) ."),
        MultiplePaths => ("ex:s sh:path ex:p, ex:q .", "ex:s sh:path ex:p ."),
        ClassNotIri => ("ex:s sh:class [] .", "ex:s sh:class ex:C ."),
        DatatypeNotIri => ("ex:s sh:datatype \"int\" .", "ex:s sh:datatype xsd:integer ."),
        NodeKindInvalid => ("ex:s sh:nodeKind sh:Thing .", "ex:s sh:nodeKind sh:BlankNode ."),
        MinCountNotInteger => ("ex:s sh:minCount 1.0 .", "ex:s sh:minCount 1 ."),
        MaxCountNotInteger => ("ex:s sh:maxCount \"2\" .", "ex:s sh:maxCount 2 ."),
        MinExclusiveNotComparable => ("ex:s sh:minExclusive ex:a .", "ex:s sh:minExclusive 1.5 ."),
        MinInclusiveNotComparable => ("ex:s sh:minInclusive \"x\"@en .", "ex:s sh:minInclusive \"x\" ."),
        MaxExclusiveNotComparable => ("ex:s sh:maxExclusive [] .", "ex:s sh:maxExclusive true ."),
        MaxInclusiveNotComparable => (
            "ex:s sh:maxInclusive \"x\"^^ex:unknown .",
            "ex:s sh:maxInclusive \"2020-01-01T00:00:00Z\"^^xsd:dateTime .",
        ),
        MinLengthNotInteger => ("ex:s sh:minLength \"1\" .", "ex:s sh:minLength 1 ."),
        MaxLengthNotInteger => ("ex:s sh:maxLength ex:one .", "ex:s sh:maxLength 0 ."),
        PatternNotString => ("ex:s sh:pattern \"^a\"@en .", "ex:s sh:pattern \"^a\" ."),
        FlagsNotString => ("ex:s sh:pattern \"a\" ; sh:flags 1 .", "ex:s sh:pattern \"a\" ; sh:flags \"i\" ."),
        MultiplePatterns => ("ex:s sh:pattern \"a\", \"b\" .", "ex:s sh:pattern \"a\" ."),
        MultipleFlags => ("ex:s sh:pattern \"a\" ; sh:flags \"i\", \"s\" .", "ex:s sh:pattern \"a\" ; sh:flags \"is\" ."),
        StemNotString => ("ex:s sh:stem ex:x .", "ex:s sh:stem \"http://\" ."),
        LanguageInNotStringList => ("ex:s sh:languageIn ( \"en\" ex:fr ) .", "ex:s sh:languageIn ( \"en\" \"fr\" ) ."),
        UniqueLangNotTrue => ("ex:s sh:uniqueLang false .", "ex:s sh:uniqueLang true ."),
        EqualsNotIri => ("ex:s sh:equals \"p\" .", "ex:s sh:equals ex:p ."),
        DisjointNotIri => ("ex:s sh:disjoint [] .", "ex:s sh:disjoint ex:p ."),
        LessThanNotIri => ("ex:s sh:lessThan 1 .", "ex:s sh:lessThan ex:p ."),
        LessThanOrEqualsNotIri => ("ex:s sh:lessThanOrEquals [] .", "ex:s sh:lessThanOrEquals ex:p ."),
        ShapeNotNode => ("ex:s sh:shape \"t\" .", "ex:s sh:shape ex:t, [] ."),
        NotNotNode => ("ex:s sh:not 1 .", "ex:s sh:not ex:t ."),
        AndNotNodeList => ("ex:s sh:and ex:t .", "ex:s sh:and ( ex:t [] ) ."),
        OrNotNodeList => ("ex:s sh:or ( ex:t \"u\" ) .", "ex:s sh:or ( ) ."),
        QualifiedValueShapeNotNode => (
            "ex:s sh:qualifiedValueShape \"t\" ; sh:qualifiedMinCount 1 .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1 .",
        ),
        QualifiedMinCountNotInteger => (
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1.5 .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1 .",
        ),
        QualifiedMaxCountNotInteger => (
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMaxCount \"x\" .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMaxCount 3 .",
        ),
        MultipleQualifiedValueShapes => (
            "ex:s sh:qualifiedValueShape ex:t, ex:u ; sh:qualifiedMinCount 1 .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1 .",
        ),
        MultipleQualifiedMinCounts => (
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1, 2 .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMinCount 1 ; sh:qualifiedMaxCount 2 .",
        ),
        MultipleQualifiedMaxCounts => (
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMaxCount 1, 2 .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMaxCount 2 .",
        ),
        QualifiedValueShapeWithoutCount => (
            "ex:s sh:qualifiedValueShape ex:t .",
            "ex:s sh:qualifiedValueShape ex:t ; sh:qualifiedMaxCount 0 .",
        ),
        ClosedNotTrue => ("ex:s sh:closed false .", "ex:s sh:closed true ."),
        IgnoredPropertiesNotIriList => (
            "ex:s sh:closed true ; sh:ignoredProperties ( ex:p [] ) .",
            "ex:s sh:closed true ; sh:ignoredProperties ( ex:p rdf:type ) .",
        ),
        MultipleClosed => ("ex:s sh:closed true, \"1\"^^xsd:boolean .", "ex:s sh:closed true ."),
        MultipleIgnoredProperties => (
            "ex:s sh:closed true ; sh:ignoredProperties ( ex:p ), ( ex:q ) .",
            "ex:s sh:closed true ; sh:ignoredProperties ( ex:p ex:q ) .",
        ),
        InNotNodeList => ("ex:s sh:in ( ex:a ) ; sh:in [ rdf:first ex:a ] .", "ex:s sh:in ( ex:a [] ) ."),
    }
}

fn path_rule_fixtures(rule: PathRule) -> (&'static str, &'static str) {
    match rule {
        PathRule::MultipleKeys => (
            "ex:s sh:path [ sh:inversePath ex:p ; sh:zeroOrMorePath ex:q ] .",
            "ex:s sh:path [ sh:inversePath ex:p ] .",
        ),
        PathRule::Cycle => (
            "ex:s sh:path _:a . _:a sh:oneOrMorePath _:b . _:b sh:inversePath _:a .",
            "ex:s sh:path _:a . _:a sh:oneOrMorePath _:b . _:b sh:inversePath ex:p .",
        ),
        PathRule::NotExactlyOneCase => ("ex:s sh:path \"p\" .", "ex:s sh:path [ sh:alternativePath ( ex:p ex:q ) ] ."),
    }
}

fn all_diagnostics(g: &Graph) -> BTreeSet<(ShapeRule, Option<PathRule>)> {
    g.subjects()
        .flat_map(|s| check_shape(s, g))
        .map(|d| (d.rule, d.path_rule))
        .collect()
}

fn coverage_matrix() -> Outcome {
    let mut fixtures = 0;
    for &rule in ShapeRule::ALL {
        let (neg, pos) = shape_rule_fixtures(rule);
        let header = if rule == ShapeRule::ImplicitClassNotIri { "" } else { "ex:s a sh:Shape .\n" };
        let neg_g = ttl(&format!("{header}{neg}"));
        let got: BTreeSet<ShapeRule> = all_diagnostics(&neg_g).into_iter().map(|(r, _)| r).collect();
        ensure(got == BTreeSet::from([rule]), || format!("negative {}: got {got:?}", rule.id()))?;
        let err = ShapesGraph::new(neg_g).err().ok_or_else(|| format!("negative {} accepted", rule.id()))?;
        ensure(err.diagnostics.iter().all(|d| d.starts_with(rule.id())), || format!("{}: {:?}", rule.id(), err.diagnostics))?;
        let pos_g = ttl(&format!("{header}{pos}"));
        let got = all_diagnostics(&pos_g);
        ensure(got.is_empty(), || format!("positive {}: got {got:?}", rule.id()))?;
        ShapesGraph::new(pos_g).map_err(|e| format!("positive {}: {e}", rule.id()))?;
        fixtures += 2;
    }
    for rule in PathRule::ALL {
        let (neg, pos) = path_rule_fixtures(rule);
        let neg_g = ttl(&format!("ex:s a sh:Shape .\n{neg}"));
        let got = all_diagnostics(&neg_g);
        ensure(got == BTreeSet::from([(ShapeRule::PathIllFormed, Some(rule))]), || format!("negative {}: {got:?}", rule.id()))?;
        let path = neg_g.sole_value(&ex("s"), sh::PATH).expect("path").clone();
        let err = compile_path(&path, &neg_g).err().ok_or_else(|| format!("{} compiled", rule.id()))?;
        ensure(err.rule == rule, || format!("{}: compile reported {}", rule.id(), err.rule))?;
        let pos_g = ttl(&format!("ex:s a sh:Shape .\n{pos}"));
        let got = all_diagnostics(&pos_g);
        ensure(got.is_empty(), || format!("positive {}: {got:?}", rule.id()))?;
        fixtures += 2;
    }
    Ok(format!("{} shape rules, {} path rules, {fixtures} fixtures", ShapeRule::ALL.len(), PathRule::ALL.len()))
}

fn report_validity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut results = 0;
    for i in 0..200 {
        let sg = random_shapes_graph(&mut rng);
        let d = random_data(&mut rng, 25);
        let r = report_of(&d, &sg).map_err(|e| format!("case {i}: {e} {:?}", e.diagnostics))?;
        let report = build_report(&r);
        let diags = validate_results_graph(&report);
        ensure(diags.is_empty(), || format!("case {i}: {diags:?}"))?;
        let edges: BTreeSet<Term> = report.with_predicate(&iri(sh::RESULT)).map(|(_, o)| o.clone()).collect();
        ensure(edges == r.top_level, || format!("case {i}: sh:result edges differ from top level"))?;
        results += r.top_level.len();
    }
    Ok(format!("200 validations, {results} results, 0 diagnostics"))
}

fn list_family(rng_free: usize) -> Vec<Graph> {
    // Every rdf:rest choice per cell: none, nil, any cell, a literal, or two values.
    let n = rng_free;
    let cells: Vec<Term> = (0..n).map(|i| Term::blank(i as u64)).collect();
    let rest_options = n + 4;
    let first_options: &[usize] = if n <= 3 { &[0, 1, 2] } else { &[0, 1] };
    let nil_options: &[usize] = if n <= 3 { &[0, 1, 2] } else { &[0] };
    let mut out = Vec::new();
    let rest_total = rest_options.pow(n as u32);
    let first_total = first_options.len().pow(n as u32);
    for r in 0..rest_total {
        for fi in 0..first_total {
            for &nil in nil_options {
                let mut g = Graph::new();
                let (mut r, mut fi) = (r, fi);
                for (i, cell) in cells.iter().enumerate() {
                    let choice = r % rest_options;
                    r /= rest_options;
                    let rest = iri(rdf::REST);
                    match choice {
                        0 => {}
                        1 => {
                            g.add(cell.clone(), rest, iri(rdf::NIL));
                        }
                        c if c < n + 2 => {
                            g.add(cell.clone(), rest, cells[c - 2].clone());
                        }
                        c if c == n + 2 => {
                            g.add(cell.clone(), rest, Term::string("x"));
                        }
                        _ => {
                            g.add(cell.clone(), rest.clone(), iri(rdf::NIL));
                            g.add(cell.clone(), rest, cells[(i + 1) % n].clone());
                        }
                    }
                    let firsts = first_options[fi % first_options.len()];
                    fi /= first_options.len();
                    let count = [1, 0, 2][firsts];
                    for k in 0..count {
                        g.add(cell.clone(), iri(rdf::FIRST), ex(&format!("m{i}_{k}")));
                    }
                }
                match nil {
                    1 => {
                        g.add(iri(rdf::NIL), iri(rdf::FIRST), ex("m"));
                    }
                    2 => {
                        g.add(iri(rdf::NIL), iri(rdf::REST), iri(rdf::NIL));
                    }
                    _ => {}
                }
                out.push(g);
            }
        }
    }
    out
}

fn instance_family(nodes: usize, self_loops: bool, typed_from: usize) -> impl Iterator<Item = Graph> {
    let ns: Vec<Term> = (0..nodes).map(|i| ex(&format!("k{i}"))).collect();
    let mut edges: Vec<(Term, &'static str, Term)> = Vec::new();
    for i in 0..typed_from {
        for j in 0..nodes {
            edges.push((ns[i].clone(), rdf::TYPE, ns[j].clone()));
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            if self_loops || i != j {
                edges.push((ns[i].clone(), rdfs::SUB_CLASS_OF, ns[j].clone()));
            }
        }
    }
    (0u64..1 << edges.len()).map(move |mask| {
        let mut g = Graph::new();
        for (b, (s, p, o)) in edges.iter().enumerate() {
            if mask & (1 << b) != 0 {
                g.add(s.clone(), iri(p), o.clone());
            }
        }
        g
    })
}

fn list_and_instance() -> Outcome {
    let mut graphs = 0;
    let mut queries = 0;
    for n in 0..=4 {
        for g in list_family(n) {
            graphs += 1;
            let mut starts: Vec<Term> = (0..n).map(|i| Term::blank(i as u64)).collect();
            starts.push(iri(rdf::NIL));
            starts.push(Term::string("x"));
            for s in &starts {
                queries += 1;
                let got = g.list_members(s);
                let want = oracle_list(s, &g);
                ensure(got == want, || format!("list at {s}: got {got:?} want {want:?} in {g:?}"))?;
            }
        }
    }
    let families = [(1, true, 1), (2, true, 2), (3, true, 2), (4, false, 1)];
    for (nodes, self_loops, typed_from) in families {
        let ns: Vec<Term> = (0..nodes).map(|i| ex(&format!("k{i}"))).collect();
        for g in instance_family(nodes, self_loops, typed_from) {
            graphs += 1;
            for n in &ns[..typed_from] {
                for m in &ns {
                    queries += 1;
                    let got = g.is_instance(n, m);
                    ensure(got == oracle_instance(n, m, &g), || format!("is_instance({n}, {m}) = {got} in {g:?}"))?;
                }
                let instances = g.instances_of(n);
                let want: BTreeSet<Term> = ns.iter().filter(|x| oracle_instance(x, n, &g)).cloned().collect();
                ensure(instances == want, || format!("instances_of({n}) = {instances:?} in {g:?}"))?;
            }
        }
    }
    Ok(format!("{graphs} graphs, {queries} queries"))
}

fn permuted(v: &Validator<'_>, rng: &mut StdRng) -> Result<ResultsStructure, Failure> {
    let mut shapes: Vec<&Shape> = v.shapes().shapes().collect();
    shapes.shuffle(rng);
    let mut parts = Vec::new();
    for shape in shapes {
        if shape.deactivated {
            continue;
        }
        let mut targets: Vec<Term> = complete_targets(shape, v.data()).into_iter().collect();
        targets.shuffle(rng);
        for t in targets {
            let values = value_nodes(&t, v.data(), shape);
            let mut constraints: Vec<&Constraint> = shape.constraints.iter().collect();
            constraints.shuffle(rng);
            for c in constraints {
                parts.push(v.validate_constraint(&t, &values, c, shape)?);
            }
        }
    }
    Ok(combine(parts))
}

fn suite(rng: &mut StdRng) -> Vec<(Graph, Graph)> {
    let mut cases = Vec::new();
    for (shapes, data) in [
        ("example1-shapes.ttl", "people-mutated.ttl"),
        ("example2-shapes.ttl", "people-mutated.ttl"),
        ("example3-shapes.ttl", "animals-mutated.ttl"),
        ("example1-shapes.ttl", "people-conforming.ttl"),
        ("example3-shapes.ttl", "people-mutated.ttl"),
    ] {
        cases.push((load_fixture(data), load_fixture(shapes)));
    }
    for _ in 0..40 {
        let sg = random_shapes_graph(rng);
        cases.push((random_data(rng, 25), sg));
    }
    cases
}

fn determinism() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let cases = suite(&mut rng);
    let mut permutations = 0;
    for (i, (d, sg)) in cases.iter().enumerate() {
        let sg = ShapesGraph::new(sg.clone()).map_err(|e| format!("case {i}: {e}"))?;
        let v = Validator::new(d, &sg, Limits::default());
        let reference = build_report(&v.validate().map_err(|e| e.to_string())?);
        for _ in 0..3 {
            let fresh = Validator::new(d, &sg, Limits::default());
            let other = build_report(&permuted(&fresh, &mut rng).map_err(|e| e.to_string())?);
            ensure(isomorphic(&reference, &other), || format!("case {i}: permuted report differs"))?;
            permutations += 1;
        }
        let parts: Vec<ResultsStructure> =
            sg.shapes().map(|s| v.validate_shape(s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let forward = combine(parts.clone());
        let mut shuffled = parts.clone();
        shuffled.shuffle(&mut rng);
        let backward = combine(shuffled);
        ensure(forward.graph == backward.graph && forward.top_level == backward.top_level, || {
            format!("case {i}: combine depends on order")
        })?;
        let twice = combine([forward.clone(), forward.clone()]);
        ensure(twice == forward, || format!("case {i}: combine is not idempotent"))?;
    }
    Ok(format!("{} validations, {permutations} permuted runs", cases.len()))
}

fn odd_terms() -> Vec<Term> {
    vec![
        Term::string("quote \" backslash \\ newline \n tab \t return \r"),
        Term::string("unicode é ✓ 𝄞"),
        Term::lang_string("hallo", "de-CH"),
        Term::typed("x y", "http://example.org/example/dt"),
        Term::typed("2020-01-01T00:00:00Z", ashacl::vocab::xsd::DATE_TIME),
        Term::typed("1e3", ashacl::vocab::xsd::DOUBLE),
        Term::typed("-0.0", ashacl::vocab::xsd::DECIMAL),
        Term::iri("http://example.org/with%20escape#frag"),
        Term::blank(7),
    ]
}

fn round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let odd = odd_terms();
    for i in 0..200 {
        let mut g = random_data(&mut rng, 30);
        for _ in 0..rng.gen_range(0..4) {
            g.add(pick(&mut rng, &Pool::nodes()), ex("p"), pick(&mut rng, &odd));
        }
        for format in [Format::Turtle, Format::NTriples] {
            let text = serialize(&g, format);
            let back = parse(&text, format, None).map_err(|e| format!("graph {i}: {e}\n{text}"))?;
            ensure(isomorphic(&g, &back), || format!("graph {i} ({format:?}) not isomorphic:\n{text}"))?;
        }
    }
    let names = fixture_names();
    for name in &names {
        let g = load_fixture(name);
        let back = parse(&serialize(&g, Format::Turtle), Format::Turtle, None).map_err(|e| format!("{name}: {e}"))?;
        ensure(isomorphic(&g, &back), || format!("{name} not isomorphic"))?;
    }
    let preds = [ex("p"), ex("q"), iri(rdf::TYPE)];
    for i in 0..300 {
        let e = random_path(&mut rng, 4, &preds);
        let mut g = Graph::new();
        let node = encode_path(&e, &mut g);
        let back = compile_path(&node, &g).map_err(|err| format!("path {i}: {err}"))?;
        ensure(back == e, || format!("path {i}: {e:?} came back as {back:?}"))?;
    }
    Ok(format!("200 graphs, {} fixtures, 300 paths", names.len()))
}

fn run_cli(args: &[&std::path::Path]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ashacl"))
        .arg("--data")
        .arg(args[0])
        .arg("--shapes")
        .arg(args[1])
        .output()
        .expect("run ashacl");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn failure_semantics() -> Outcome {
    let names = fixture_names();
    let before: BTreeMap<String, Vec<u8>> =
        names.iter().map(|n| (n.clone(), std::fs::read(fixture(n)).expect("read fixture"))).collect();
    let data = fixture("people-conforming.ttl");
    let (code, err) = run_cli(&[&data, &fixture("recursive-shapes.ttl")]);
    ensure(code == 2 && err.contains("RecursiveShapesGraph"), || format!("recursive: exit {code}: {err}"))?;
    let (code, err) = run_cli(&[&data, &fixture("ill-formed-shapes.ttl")]);
    let g = load_fixture("ill-formed-shapes.ttl");
    let expected: BTreeSet<&str> = g.subjects().flat_map(|s| check_shape(s, &g)).map(|d| d.rule.id()).collect();
    ensure(expected.len() >= 5, || format!("ill-formed fixture violates only {expected:?}"))?;
    ensure(code == 2 && err.contains("IllFormedShapesGraph"), || format!("ill-formed: exit {code}: {err}"))?;
    for id in &expected {
        ensure(err.contains(&format!("  {id}:")), || format!("ill-formed: {id} not listed in {err}"))?;
    }
    let (code, err) = run_cli(&[&data, &fixture("entailment-shapes.ttl")]);
    ensure(code == 2 && err.contains("UnsupportedEntailment"), || format!("entailment: exit {code}: {err}"))?;
    for (shapes, data, want) in [
        ("example1-shapes.ttl", "people-conforming.ttl", 0),
        ("example2-shapes.ttl", "people-mutated.ttl", 1),
        ("example3-shapes.ttl", "animals-mutated.ttl", 1),
    ] {
        let (code, err) = run_cli(&[&fixture(data), &fixture(shapes)]);
        ensure(code == want, || format!("{shapes} on {data}: exit {code}: {err}"))?;
    }
    for (name, bytes) in &before {
        let now = std::fs::read(fixture(name)).expect("read fixture");
        ensure(&now == bytes, || format!("{name} changed"))?;
    }
    Ok(format!("3 failure codes, {} rules listed, {} inputs unchanged", expected.len(), before.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("end-to-end examples", end_to_end),
        ("component oracle equivalence", component_oracles),
        ("path evaluation oracle", path_oracle),
        ("well-formedness coverage matrix", coverage_matrix),
        ("report validity self-check", report_validity),
        ("list and instance oracles", list_and_instance),
        ("determinism and combination laws", determinism),
        ("round trips", round_trip),
        ("failure semantics", failure_semantics),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
