use std::collections::BTreeSet;
use std::sync::Arc;

use kif_core::codec::Ns;
use kif_core::graph::{ntriples, Graph, Literal, Solutions, Term, Triple};
use kif_core::mapper::{translate_pattern, translate_results, MapperStore, MappingSpec, Translation};
use kif_core::model::{
    wd, AnnotationRecord, Decimal, Entity, FilterPattern, Fingerprint, Iri, Item, Quantity, Rank, ReferenceRecord,
    Snak, SnakKind, SnakMask, Statement, TextValue, Value,
};
use kif_core::sample::{Dataset, Sampler};
use kif_core::store::{collect, MemoryStore, Store, StoreOptions};
use proptest::prelude::*;
use rand::Rng;

const INCHI: &str = "InChI=1S/C6H6/c1-2-4-6-5-3-1/h1-6H";

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn pubchem(options: StoreOptions) -> MapperStore {
    let graph = ntriples::parse(&fixture("pubchem.nt")).unwrap();
    let spec = MappingSpec::from_json(&fixture("pubchem-mapping.json")).unwrap();
    MapperStore::rdf(Arc::new(graph), spec, options).unwrap()
}

fn cid(n: u32) -> Entity {
    Entity::Item(wd::item(&format!("Q_PUBCHEM_CID{n}")))
}

fn mass(n: &str) -> Value {
    Quantity::new(n.parse().unwrap(), Some(wd::item("Q28924753")), None, None).unwrap().into()
}

fn inchi_snak() -> Snak {
    Snak::Value(wd::property("P234"), Value::String(INCHI.into()))
}

fn run(store: &dyn Store, p: &FilterPattern) -> BTreeSet<Statement> {
    collect(store.filter(p, None).unwrap()).unwrap().into_iter().collect()
}

#[test]
fn benzene_mass_by_inchi() {
    let store = pubchem(StoreOptions::default());
    let p = FilterPattern::any().with_subject(inchi_snak()).with_property(wd::property("P2067"));
    let got = run(&store, &p);
    let want: BTreeSet<_> =
        [Statement::new(cid(241), Snak::Value(wd::property("P2067"), mass("78.0469970703125")))].into();
    assert_eq!(got, want);
}

#[test]
fn unmapped_property_issues_no_query() {
    let store = pubchem(StoreOptions::default());
    let solubility = FilterPattern::any().with_subject(inchi_snak()).with_property(wd::property("P2177"));
    assert_eq!(run(&store, &solubility).len(), 0);
    let fp = FilterPattern::any().with_subject(Snak::Value(wd::property("P31"), wd::item("Q11173").into()));
    assert_eq!(run(&store, &fp).len(), 0);
    let wikidata_subject = FilterPattern::any().with_subject(wd::item("Q2270"));
    assert_eq!(run(&store, &wikidata_subject).len(), 0);
    let no_values = FilterPattern::any().with_snak_kinds(SnakMask::only(SnakKind::NoValue));
    assert_eq!(run(&store, &no_values).len(), 0);
    assert_eq!(store.count(&solubility).unwrap(), 0);
    assert_eq!(store.request_stats().requests, 0);
}

#[test]
fn wildcard_covers_mapped_vocabulary() {
    let store = pubchem(StoreOptions::default());
    let all = run(&store, &FilterPattern::any());
    assert_eq!(all.len(), 6);
    let mapped: BTreeSet<_> = [wd::property("P234"), wd::property("P2067")].into();
    assert!(all.iter().all(|s| mapped.contains(s.snak.property())));
    let Translation::Query(q) = translate_pattern(store.spec(), &FilterPattern::any(), None, None) else { panic!() };
    assert_eq!(q.values.as_ref().unwrap().rows.len(), 2);
}

#[test]
fn value_constants_translate() {
    let store = pubchem(StoreOptions::default());
    let p = FilterPattern::any().with_value(Fingerprint::value(mass("18.010564682")));
    let got = run(&store, &p);
    assert_eq!(got.len(), 1);
    assert_eq!(got.iter().next().unwrap().subject, cid(962));
    let wrong_unit = Quantity::new("18.010564682".parse().unwrap(), Some(wd::item("Q483261")), None, None).unwrap();
    assert!(run(&store, &FilterPattern::any().with_value(Fingerprint::value(wrong_unit.into()))).is_empty());
}

#[test]
fn small_pages() {
    let store = pubchem(StoreOptions::default().with_page_size(1).with_cache(false));
    assert_eq!(run(&store, &FilterPattern::any().with_property(wd::property("P2067"))).len(), 3);
    assert!(store.request_stats().requests >= 3);
}

#[test]
fn annotations_and_contains() {
    let extra = ReferenceRecord::new([Snak::Value(wd::property("P248"), wd::item("Q278487").into())]).unwrap();
    let store = pubchem(StoreOptions::default().with_extra_reference(extra.clone()));
    let present = Statement::new(cid(241), Snak::Value(wd::property("P2067"), mass("78.0469970703125")));
    let absent = Statement::new(cid(241), Snak::Value(wd::property("P2067"), mass("78.11")));
    let foreign = Statement::new(wd::item("Q2270"), Snak::Value(wd::property("P2177"), mass("0.07")));
    assert!(store.contains(&present).unwrap());
    assert!(!store.contains(&absent).unwrap());
    assert!(!store.contains(&foreign).unwrap());
    let got = store.get_annotations(&[present.clone(), absent.clone(), foreign.clone()]).unwrap();
    let want: BTreeSet<_> = [AnnotationRecord::new([], [extra], Rank::Normal)].into();
    assert_eq!(got[0], (present, want));
    assert!(got[1].1.is_empty());
    assert!(got[2].1.is_empty());
}

#[test]
fn labels_only_with_label_predicate() {
    let store = pubchem(StoreOptions::default());
    let ents = [cid(241), cid(1), Entity::Item(wd::item("Q2270"))];
    let en = store.get_descriptor(&ents, "en").unwrap();
    assert_eq!(en[0].1.label.as_ref().unwrap().content(), "benzene");
    assert!(en[0].1.description.is_none());
    assert!(en[1].1.is_empty() && en[2].1.is_empty());
    assert!(store.get_descriptor(&ents, "fr").unwrap()[0].1.is_empty());

    let mut spec = store.spec().clone();
    spec.label_predicate = None;
    let graph = ntriples::parse(&fixture("pubchem.nt")).unwrap();
    let bare = MapperStore::rdf(Arc::new(graph), spec, StoreOptions::default()).unwrap();
    assert!(bare.get_descriptor(&ents, "en").unwrap()[0].1.is_empty());
    assert_eq!(bare.request_stats().requests, 0);
}

#[test]
fn malformed_literals_are_skipped() {
    let store = pubchem(StoreOptions::default());
    let s = Term::Iri(Iri::new("http://rdf.ncbi.nlm.nih.gov/pubchem/compound/CID5").unwrap());
    let p = Term::Iri(Iri::new("http://semanticscience.org/resource/CHEMINF_000334").unwrap());
    let good = Term::Literal(Literal::typed("12.5", Ns::Xsd.iri("float")));
    let bad = Term::Literal(Literal::typed("twelve", Ns::Xsd.iri("float")));
    let stranger = Term::Iri(Iri::new("http://elsewhere.org/x").unwrap());
    let sols = Solutions {
        variables: vec!["s".into(), "p".into(), "o".into()],
        rows: vec![
            vec![Some(s.clone()), Some(p.clone()), Some(good)],
            vec![Some(s.clone()), Some(p.clone()), Some(bad)],
            vec![Some(stranger), Some(p), Some(Term::Literal(Literal::typed("1", Ns::Xsd.iri("float"))))],
        ],
    };
    let (stmts, diagnostics) = translate_results(store.spec(), &sols);
    assert_eq!(stmts, vec![Statement::new(cid(5), Snak::Value(wd::property("P2067"), mass("12.5")))]);
    assert_eq!(diagnostics.len(), 2);
}

const SYNTHETIC: &str = r#"{
  "name": "synthetic",
  "entity_rules": [{"source": "http://src.example/thing/{n}", "target": "http://www.wikidata.org/entity/Q_SRC{n}"}],
  "property_rules": [
    {"property": "P1", "predicate": "http://src.example/name", "codec": "string"},
    {"property": "P2", "predicate": "http://src.example/page", "codec": "iri"},
    {"property": "P3", "predicate": "http://src.example/related", "codec": "item"},
    {"property": "P4", "predicate": "http://src.example/size", "codec": "decimal-quantity", "unit": "Q11573"},
    {"property": "P5", "predicate": "http://src.example/title", "codec": "text", "language": "en"}
  ]
}"#;

fn src(n: u32) -> Iri {
    Iri::new(format!("http://src.example/thing/{n}")).unwrap()
}

fn tgt(n: u32) -> Entity {
    Entity::Item(wd::item(&format!("Q_SRC{n}")))
}

fn pred(local: &str) -> Iri {
    Iri::new(format!("http://src.example/{local}")).unwrap()
}

/// A source graph and, built independently of the mapper, the target
/// statements it should present.
fn synthetic(s: &mut Sampler) -> (Graph, Dataset) {
    let mut g = Graph::new();
    let mut ds = Dataset::default();
    let n = s.rng().gen_range(0..40);
    for _ in 0..n {
        let subj = s.rng().gen_range(0..8u32);
        let (object, value, property): (Term, Option<Value>, &str) = match s.rng().gen_range(0..7) {
            0 => {
                let x = s.string();
                (Literal::string(&x).into(), Some(Value::String(x)), "P1")
            }
            1 => {
                let i = s.iri();
                (i.clone().into(), Some(Value::Iri(i)), "P2")
            }
            2 => {
                let m = s.rng().gen_range(0..8u32);
                (src(m).into(), Some(Value::Entity(tgt(m))), "P3")
            }
            3 => {
                let d: Decimal = s.decimal();
                let q = Quantity::new(d.clone(), Some(Item(Ns::Wd.iri("Q11573"))), None, None).unwrap();
                (Literal::typed(d.as_str(), Ns::Xsd.iri("decimal")).into(), Some(q.into()), "P4")
            }
            4 => {
                let t = s.text();
                let en = TextValue::new(t.content(), "en").unwrap();
                (Literal::lang(t.content(), "en").into(), Some(Value::Text(en)), "P5")
            }
            5 => (Literal::lang("ailleurs", "fr").into(), None, "P5"),
            _ => (Literal::typed("n/a", Ns::Xsd.iri("decimal")).into(), None, "P4"),
        };
        let local = match property {
            "P1" => "name",
            "P2" => "page",
            "P3" => "related",
            "P4" => "size",
            _ => "title",
        };
        g.insert(Triple::new(src(subj), pred(local), object));
        if let Some(v) = value {
            let stmt = Statement::new(tgt(subj), Snak::Value(wd::property(property), v));
            ds.records.entry(stmt).or_default().insert(AnnotationRecord::default());
        }
    }
    (g, ds)
}

#[test]
fn agrees_with_hand_built_target_store() {
    let spec = MappingSpec::from_json(SYNTHETIC).unwrap();
    let mut s = Sampler::new(11);
    let mut nonempty = 0;
    for _ in 0..40 {
        let (g, ds) = synthetic(&mut s);
        let mapper = MapperStore::rdf(Arc::new(g), spec.clone(), StoreOptions::default().with_page_size(5)).unwrap();
        let memory = MemoryStore::from_dataset(&ds);
        assert_eq!(run(&mapper, &FilterPattern::any()), run(&memory, &FilterPattern::any()));
        for _ in 0..15 {
            let p = s.pattern(&ds);
            let want = run(&memory, &p);
            nonempty += usize::from(!want.is_empty());
            assert_eq!(run(&mapper, &p), want, "{p:?}");
        }
        let stmts: Vec<Statement> = ds.statements().take(5).cloned().collect();
        assert_eq!(mapper.get_annotations(&stmts).unwrap(), memory.get_annotations(&stmts).unwrap());
    }
    assert!(nonempty >= 100, "only {nonempty} patterns matched anything");
}

proptest! {
    #[test]
    fn entity_rewrite_is_a_bijection(n in "[A-Za-z0-9_.-]{1,12}") {
        let spec = MappingSpec::from_json(SYNTHETIC).unwrap();
        let source = Iri::new(format!("http://src.example/thing/{n}")).unwrap();
        let target = spec.to_target(&source).unwrap();
        prop_assert_eq!(target.iri().as_str(), format!("http://www.wikidata.org/entity/Q_SRC{n}"));
        prop_assert_eq!(spec.to_source(&target), Some(source));
    }
}
