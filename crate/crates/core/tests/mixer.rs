use std::collections::BTreeSet;
use std::sync::Arc;

use kif_core::graph::ntriples;
use kif_core::mapper::{MapperStore, MappingSpec};
use kif_core::mixer::MixerStore;
use kif_core::model::{
    wd, AnnotationRecord, Descriptor, Entity, FilterPattern, Quantity, Rank, ReferenceRecord, Snak, Statement, Value,
};
use kif_core::sample::{Dataset, Sampler};
use kif_core::store::{
    collect, MemoryStore, RdfStore, StatementStream, Store, StoreError, StoreHandle, StoreOptions,
};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn pubchem() -> StoreHandle {
    let graph = ntriples::parse(&fixture("pubchem.nt")).unwrap();
    let spec = MappingSpec::from_json(&fixture("pubchem-mapping.json")).unwrap();
    Arc::new(MapperStore::rdf(Arc::new(graph), spec, StoreOptions::default()).unwrap())
}

fn wikidata() -> StoreHandle {
    let ds = Dataset::from_sexp(&fixture("wikidata.sexp")).unwrap();
    Arc::new(RdfStore::rdf(Arc::new(ds.encode().unwrap()), StoreOptions::default()).unwrap())
}

fn stream(store: &dyn Store, p: &FilterPattern, limit: Option<usize>) -> Vec<Statement> {
    collect(store.filter(p, limit).unwrap()).unwrap()
}

fn set(store: &dyn Store, p: &FilterPattern) -> BTreeSet<Statement> {
    stream(store, p, None).into_iter().collect()
}

fn quantity(amount: &str, unit: &str) -> Value {
    Quantity::new(amount.parse().unwrap(), Some(wd::item(unit)), None, None).unwrap().into()
}

fn benzene_mass() -> FilterPattern {
    let inchi = Snak::Value(wd::property("P234"), Value::String("InChI=1S/C6H6/c1-2-4-6-5-3-1/h1-6H".into()));
    FilterPattern::any().with_subject(inchi).with_property(wd::property("P2067"))
}

/// Always fails, to exercise the error policy.
struct Broken;

impl Store for Broken {
    fn options(&self) -> &StoreOptions {
        static OPTIONS: std::sync::OnceLock<StoreOptions> = std::sync::OnceLock::new();
        OPTIONS.get_or_init(StoreOptions::default)
    }

    fn backend(&self) -> &'static str {
        "broken"
    }

    fn filter(&self, _: &FilterPattern, _: Option<usize>) -> Result<StatementStream, StoreError> {
        Err(StoreError::Transport { endpoint: "nowhere".into(), message: "down".into() })
    }

    fn get_annotations(&self, _: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError> {
        Err(StoreError::Transport { endpoint: "nowhere".into(), message: "down".into() })
    }

    fn get_descriptor(&self, _: &[Entity], _: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError> {
        Err(StoreError::Transport { endpoint: "nowhere".into(), message: "down".into() })
    }
}

#[test]
fn benzene_mass_from_both_sources() {
    for parallel in [false, true] {
        let mx = MixerStore::new(vec![pubchem(), wikidata()]).unwrap().with_parallel(parallel);
        let got = stream(&mx, &benzene_mass(), None);
        let want = vec![
            Statement::new(
                wd::item("Q_PUBCHEM_CID241"),
                Snak::Value(wd::property("P2067"), quantity("78.0469970703125", "Q28924753")),
            ),
            Statement::new(wd::item("Q2270"), Snak::Value(wd::property("P2067"), quantity("78.11", "Q483261"))),
        ];
        assert_eq!(got, want);
        assert_eq!(mx.count(&benzene_mass()).unwrap(), 2);
        assert_eq!(mx.backend(), "mixer");
    }
}

#[test]
fn needs_a_child() {
    assert!(matches!(MixerStore::new(vec![]).err().unwrap(), StoreError::Options(_)));
}

#[test]
fn limit_applies_after_merge() {
    let ds = Dataset::from_sexp(&fixture("wikidata.sexp")).unwrap();
    let mem: StoreHandle = Arc::new(MemoryStore::from_dataset(&ds));
    let mx = MixerStore::new(vec![mem.clone(), wikidata(), mem]).unwrap();
    let all = stream(&mx, &FilterPattern::any(), None);
    assert_eq!(all.len(), 7);
    assert_eq!(stream(&mx, &FilterPattern::any(), Some(3)), all[..3].to_vec());
}

#[test]
fn strict_and_lenient_failures() {
    let broken: StoreHandle = Arc::new(Broken);
    let p = FilterPattern::any().with_subject(wd::item("Q2270"));
    let nobel = Statement::new(wd::item("Q7286"), Snak::Value(wd::property("P166"), wd::item("Q38104").into()));
    for parallel in [false, true] {
        let strict = MixerStore::new(vec![wikidata(), broken.clone()]).unwrap().with_parallel(parallel);
        let items: Vec<_> = strict.filter(&p, None).unwrap().collect();
        assert_eq!(items.iter().filter(|r| r.is_ok()).count(), 4);
        match items.last().unwrap() {
            Err(StoreError::Child { index: 1, source }) => assert!(source.is_transport()),
            other => panic!("{other:?}"),
        }
        assert!(strict.get_annotations(&[nobel.clone()]).unwrap_err().is_transport());
        assert!(strict.contains(&nobel).unwrap());
        let q2270 = [Entity::Item(wd::item("Q2270"))];
        assert_eq!(strict.get_descriptor(&q2270, "en").unwrap()[0].1.label.as_ref().unwrap().content(), "benzene");
        assert!(strict.get_descriptor(&[Entity::Item(wd::item("Q1"))], "en").is_err());

        let lenient = MixerStore::new(vec![broken.clone(), wikidata()]).unwrap().with_parallel(parallel).with_lenient(true);
        assert_eq!(set(&lenient, &p).len(), 4);
        assert_eq!(lenient.get_annotations(&[nobel.clone()]).unwrap()[0].1.len(), 1);
    }
}

#[test]
fn annotations_union_and_provenance() {
    let ds = Dataset::from_sexp(&fixture("wikidata.sexp")).unwrap();
    let tag = |id: &str| ReferenceRecord::new([Snak::Value(wd::property("P248"), wd::item(id).into())]).unwrap();
    let a: StoreHandle =
        Arc::new(MemoryStore::from_dataset(&ds).with_options(StoreOptions::default().with_extra_reference(tag("Q101"))));
    let b: StoreHandle = Arc::new(
        RdfStore::rdf(Arc::new(ds.encode().unwrap()), StoreOptions::default().with_extra_reference(tag("Q102"))).unwrap(),
    );
    let mx = MixerStore::new(vec![a, b]).unwrap();
    let stmt = Statement::new(wd::item("Q7286"), Snak::Value(wd::property("P31"), wd::item("Q5").into()));
    let got = mx.get_annotations(&[stmt]).unwrap();
    let want: BTreeSet<_> = [
        AnnotationRecord::new([], [tag("Q101")], Rank::Normal),
        AnnotationRecord::new([], [tag("Q102")], Rank::Normal),
    ]
    .into();
    assert_eq!(got[0].1, want);
}

#[test]
fn contains_any_and_first_descriptor() {
    let mx = MixerStore::new(vec![pubchem(), wikidata()]).unwrap();
    let wd_stmt = Statement::new(wd::item("Q7286"), Snak::Value(wd::property("P31"), wd::item("Q5").into()));
    let pc_stmt = Statement::new(
        wd::item("Q_PUBCHEM_CID241"),
        Snak::Value(wd::property("P2067"), quantity("78.0469970703125", "Q28924753")),
    );
    let neither = Statement::new(wd::item("Q7286"), Snak::Value(wd::property("P31"), wd::item("Q6").into()));
    assert!(mx.contains(&wd_stmt).unwrap());
    assert!(mx.contains(&pc_stmt).unwrap());
    assert!(!mx.contains(&neither).unwrap());
    let ents = [Entity::Item(wd::item("Q_PUBCHEM_CID241")), Entity::Item(wd::item("Q7286")), Entity::Item(wd::item("Q9"))];
    let d = mx.get_descriptor(&ents, "en").unwrap();
    assert_eq!(d[0].1.label.as_ref().unwrap().content(), "benzene");
    assert_eq!(d[1].1.label.as_ref().unwrap().content(), "Marie Curie");
    assert!(d[2].1.is_empty());
}

/// Unit, idempotence, union and determinism over random children.
#[test]
fn mixer_laws() {
    let mut s = Sampler::new(99);
    for case in 0..120 {
        let (da, db) = (s.dataset(30), s.dataset(30));
        let a = Arc::new(MemoryStore::from_dataset(&da)) as StoreHandle;
        let b: StoreHandle = if case % 2 == 0 {
            Arc::new(RdfStore::rdf(Arc::new(db.encode().unwrap()), StoreOptions::default().with_page_size(4)).unwrap())
        } else {
            Arc::new(MemoryStore::from_dataset(&db))
        };
        let mut merged = da.clone();
        for (st, recs) in &db.records {
            merged.records.entry(st.clone()).or_default().extend(recs.iter().cloned());
        }
        let p = s.pattern(&merged);

        let unit = MixerStore::new(vec![a.clone()]).unwrap();
        assert_eq!(stream(&unit, &p, None), stream(a.as_ref(), &p, None), "unit {p:?}");

        let twice = MixerStore::new(vec![a.clone(), a.clone()]).unwrap();
        assert_eq!(stream(&twice, &p, None), stream(a.as_ref(), &p, None), "idempotence {p:?}");

        let both = MixerStore::new(vec![a.clone(), b.clone()]).unwrap();
        let mut union = set(a.as_ref(), &p);
        union.extend(set(b.as_ref(), &p));
        let seq = stream(&both, &p, None);
        assert_eq!(seq.len(), union.len(), "duplicates in {p:?}");
        assert_eq!(seq.iter().cloned().collect::<BTreeSet<_>>(), union, "union {p:?}");
        assert_eq!(both.count(&p).unwrap(), union.len());

        let par = MixerStore::new(vec![a.clone(), b.clone()]).unwrap().with_parallel(true);
        assert_eq!(stream(&par, &p, None), seq, "parallel {p:?}");
        assert_eq!(stream(&par, &p, Some(3)), stream(&both, &p, Some(3)));

        let stmts: Vec<Statement> = merged.statements().take(6).cloned().collect();
        assert_eq!(par.get_annotations(&stmts).unwrap(), both.get_annotations(&stmts).unwrap());
        for (st, recs) in both.get_annotations(&stmts).unwrap() {
            let mut want = a.get_annotations(&[st.clone()]).unwrap().remove(0).1;
            want.extend(b.get_annotations(&[st]).unwrap().remove(0).1);
            assert_eq!(recs, want);
        }
    }
}
