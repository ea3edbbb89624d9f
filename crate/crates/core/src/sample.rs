//! Datasets, and seeded random model objects for property tests and
//! benchmarks.
//!
//! Entity and property pools are small on purpose so that random patterns
//! hit random data often.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::codec::{encode_all, truthy_triple, CodecError, Ns};
use crate::graph::{Graph, Term, Triple};
use crate::sexpr::{self, Mode, Object, SexprError};
use crate::model::{
    wd, AnnotationRecord, Decimal, Descriptor, Entity, FilterPattern, Fingerprint, Iri, Item, Property, Quantity,
    Rank, ReferenceRecord, Snak, SnakKind, SnakMask, Statement, TextValue, TimeValue, Timestamp, Value,
};

const LANGS: [&str; 3] = ["en", "fr", "pt-br"];
const WORDS: [&str; 8] = ["benzene", "water", "\"quoted\"", "tab\there", "naïve", "Curie", "line\nbreak", "back\\slash"];

/// A dataset as a store sees it: statements with their annotation records,
/// and single-language descriptors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub records: BTreeMap<Statement, BTreeSet<AnnotationRecord>>,
    pub descriptors: Vec<(Entity, Descriptor)>,
}

impl Dataset {
    pub fn annotated(&self) -> impl Iterator<Item = (&Statement, &AnnotationRecord)> {
        self.records.iter().flat_map(|(s, recs)| recs.iter().map(move |r| (s, r)))
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.records.keys()
    }

    pub fn encode(&self) -> Result<Graph, CodecError> {
        encode_all(self.annotated(), self.descriptors.iter().map(|(e, d)| (e, d)))
    }

    /// Reads a fixture file: `Statement` forms (given a default annotation
    /// record), `AnnotatedStatement` forms and `EntityDescriptor` forms.
    pub fn from_sexp(text: &str) -> Result<Dataset, SexprError> {
        let mut ds = Dataset::default();
        for form in sexpr::read_all(text)? {
            let pos = form.position();
            match sexpr::read::object(&form)? {
                Object::Statement(s) => {
                    ds.records.entry(s).or_default().insert(AnnotationRecord::default());
                }
                Object::AnnotatedStatement(s, recs) => {
                    let entry = ds.records.entry(s).or_default();
                    if recs.is_empty() {
                        entry.insert(AnnotationRecord::default());
                    }
                    entry.extend(recs);
                }
                Object::EntityDescriptor(e, d) => ds.descriptors.push((e, d)),
                other => {
                    return Err(SexprError::Invalid {
                        msg: format!("fixture files hold statements and descriptors, not {other:?}"),
                        pos,
                    })
                }
            }
        }
        Ok(ds)
    }

    /// One form per line, readable by [`Dataset::from_sexp`].
    pub fn to_sexp(&self, mode: Mode) -> String {
        let mut out = String::new();
        for (s, recs) in &self.records {
            out.push_str(&sexpr::print(&Object::AnnotatedStatement(s.clone(), recs.clone()), mode));
            out.push('\n');
        }
        for (e, d) in &self.descriptors {
            out.push_str(&sexpr::print(&Object::EntityDescriptor(e.clone(), d.clone()), mode));
            out.push('\n');
        }
        out
    }
}

pub struct Sampler {
    rng: StdRng,
    items: u32,
    properties: u32,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: StdRng::seed_from_u64(seed), items: 10, properties: 6 }
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn item(&mut self) -> Item {
        wd::item(&format!("Q{}", self.rng.gen_range(1..=self.items)))
    }

    pub fn property(&mut self) -> Property {
        wd::property(&format!("P{}", self.rng.gen_range(1..=self.properties)))
    }

    /// Mostly items; now and then a property, which may also be a subject.
    pub fn entity(&mut self) -> Entity {
        if self.chance(0.85) {
            self.item().into()
        } else {
            self.property().into()
        }
    }

    pub fn decimal(&mut self) -> Decimal {
        let int: i64 = self.rng.gen_range(-2000..2000);
        let digits = self.rng.gen_range(0..4);
        let frac: u32 = self.rng.gen_range(0..10u32.pow(digits));
        let text = if digits == 0 { int.to_string() } else { format!("{int}.{frac:0w$}", w = digits as usize) };
        text.parse().expect("generated decimal")
    }

    pub fn quantity(&mut self) -> Quantity {
        let amount = self.decimal();
        let unit = self.chance(0.6).then(|| self.item());
        let (lower, upper) = if self.chance(0.5) {
            let lo = format!("{}", self.rng.gen_range(0..50));
            let hi = format!("{}", self.rng.gen_range(0..50));
            (Some(sub(&amount, &lo)), Some(add(&amount, &hi)))
        } else {
            (None, None)
        };
        let lower = lower.filter(|_| self.chance(0.9));
        Quantity::new(amount, unit, lower, upper).expect("bounds around the amount")
    }

    pub fn time(&mut self) -> TimeValue {
        let year = self.rng.gen_range(-3000..2100);
        let ts = Timestamp::new(
            year,
            self.rng.gen_range(1..=12),
            self.rng.gen_range(1..=28),
            self.rng.gen_range(0..24),
            self.rng.gen_range(0..60),
            self.rng.gen_range(0..60),
        )
        .expect("valid timestamp");
        let precision = *[7, 9, 10, 11, 11, 12, 14].choose(&mut self.rng).unwrap();
        let tz = *[0, 0, 60, -300].choose(&mut self.rng).unwrap();
        let cal = self.chance(0.7).then(|| wd::item(if self.chance(0.8) { "Q1985727" } else { "Q1985786" }));
        TimeValue::new(ts, precision, tz, cal).expect("valid precision")
    }

    pub fn text(&mut self) -> TextValue {
        let w = *WORDS.choose(&mut self.rng).unwrap();
        let lang = *LANGS.choose(&mut self.rng).unwrap();
        TextValue::new(w, lang).expect("non-empty tag")
    }

    pub fn string(&mut self) -> String {
        let w = *WORDS.choose(&mut self.rng).unwrap();
        format!("{w}{}", self.rng.gen_range(0..5))
    }

    pub fn iri(&mut self) -> Iri {
        Iri::new(format!("http://example.org/res/{}", self.rng.gen_range(0..6))).expect("valid IRI")
    }

    pub fn value(&mut self) -> Value {
        match self.rng.gen_range(0..8) {
            0..=2 => Value::Entity(self.entity()),
            3 => Value::Iri(self.iri()),
            4 => Value::Text(self.text()),
            5 => Value::String(self.string()),
            6 => Value::Quantity(self.quantity()),
            _ => Value::Time(self.time()),
        }
    }

    pub fn value_snak(&mut self) -> Snak {
        Snak::Value(self.property(), self.value())
    }

    pub fn snak(&mut self) -> Snak {
        let p = self.property();
        match self.rng.gen_range(0..10) {
            0 => Snak::SomeValue(p),
            1 => Snak::NoValue(p),
            _ => Snak::Value(p, self.value()),
        }
    }

    pub fn statement(&mut self) -> Statement {
        Statement::new(self.entity(), self.snak())
    }

    pub fn reference(&mut self) -> ReferenceRecord {
        let n = self.rng.gen_range(1..=3);
        ReferenceRecord::new((0..n).map(|_| self.snak()).collect::<Vec<_>>()).expect("non-empty")
    }

    pub fn rank(&mut self) -> Rank {
        *[Rank::Normal, Rank::Normal, Rank::Preferred, Rank::Deprecated].choose(&mut self.rng).unwrap()
    }

    /// An annotation record for `stmt`. A no-value main snak gets no
    /// no-value qualifier on its own property, since both would be written
    /// as the same `rdf:type wdno:P` triple.
    pub fn annotation(&mut self, stmt: &Statement) -> AnnotationRecord {
        let nq = self.rng.gen_range(0..4);
        let qualifiers: Vec<Snak> = (0..nq)
            .map(|_| self.snak())
            .filter(|q| !(matches!(q, Snak::NoValue(_)) && matches!(stmt.snak, Snak::NoValue(_)) && q.property() == stmt.snak.property()))
            .collect();
        let nr = self.rng.gen_range(0..3);
        let references: Vec<ReferenceRecord> = (0..nr).map(|_| self.reference()).collect();
        AnnotationRecord::new(qualifiers, references, self.rank())
    }

    pub fn descriptor(&mut self, lang: &str) -> Descriptor {
        let t = |s: &mut Self| TextValue::new(s.string(), lang).expect("non-empty tag");
        let label = self.chance(0.8).then(|| t(self));
        let description = self.chance(0.5).then(|| t(self));
        let n = self.rng.gen_range(0..3);
        let aliases: Vec<TextValue> = (0..n).map(|_| t(self)).collect();
        Descriptor::new(label, description, aliases)
    }

    /// Up to `max` statements, each with one to three annotation records.
    pub fn dataset(&mut self, max: usize) -> Dataset {
        let n = self.rng.gen_range(0..=max);
        let mut ds = Dataset::default();
        for _ in 0..n {
            let s = self.statement();
            let k = self.rng.gen_range(1..=3);
            let recs: BTreeSet<AnnotationRecord> = (0..k).map(|_| self.annotation(&s)).collect();
            ds.records.entry(s).or_default().extend(recs);
        }
        let mut described = BTreeSet::new();
        for _ in 0..self.rng.gen_range(0..6) {
            let e = self.entity();
            let lang = *LANGS.choose(&mut self.rng).unwrap();
            if described.insert((e.clone(), lang)) {
                let d = self.descriptor(lang);
                if !d.is_empty() {
                    ds.descriptors.push((e, d));
                }
            }
        }
        ds
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> Option<&'a T> {
        xs.choose(&mut self.rng)
    }

    /// A value snak that usually occurs in `ds`.
    fn data_snak(&mut self, ds: &Dataset) -> Snak {
        let snaks: Vec<&Snak> = ds.statements().map(|s| &s.snak).filter(|s| matches!(s, Snak::Value(..))).collect();
        match self.pick(&snaks) {
            Some(s) if self.rng.gen_bool(0.8) => (*s).clone(),
            _ => self.value_snak(),
        }
    }

    fn fingerprint(&mut self, ds: &Dataset, value_position: bool) -> Option<Fingerprint> {
        let subjects: Vec<&Entity> = ds.statements().map(|s| &s.subject).collect();
        let values: Vec<&Value> = ds.statements().filter_map(|s| s.snak.value()).collect();
        Some(match self.rng.gen_range(0..10) {
            0..=3 => return None,
            4..=5 if value_position => Fingerprint::value(match self.pick(&values) {
                Some(v) => (*v).clone(),
                None => self.value(),
            }),
            4..=6 => Fingerprint::Entity(match self.pick(&subjects) {
                Some(e) => (*e).clone(),
                None => self.entity(),
            }),
            7..=8 => Fingerprint::Snak(self.data_snak(ds)),
            _ => Fingerprint::snaks([self.data_snak(ds), self.data_snak(ds)]),
        })
    }

    /// A valid filter pattern biased toward the contents of `ds`.
    pub fn pattern(&mut self, ds: &Dataset) -> FilterPattern {
        let mut p = FilterPattern::any();
        if let Some(fp) = self.fingerprint(ds, false) {
            p = p.with_subject(fp);
        }
        if self.chance(0.6) {
            let props: Vec<&Property> = ds.statements().map(|s| s.snak.property()).collect();
            let prop = match self.pick(&props) {
                Some(p) if self.rng.gen_bool(0.85) => (*p).clone(),
                _ => self.property(),
            };
            p = p.with_property(prop);
        }
        match self.fingerprint(ds, true) {
            Some(fp) => p = p.with_value(fp),
            None if self.chance(0.3) => {
                let kinds = [SnakKind::Value, SnakKind::SomeValue, SnakKind::NoValue];
                let mask: SnakMask = kinds.into_iter().filter(|_| self.rng.gen_bool(0.5)).collect();
                if !mask.is_empty() {
                    p = p.with_snak_kinds(mask);
                }
            }
            None => {}
        }
        p
    }
}

impl Sampler {
    /// A SELECT query in the decodable subset, with constants drawn mostly
    /// from the truthy triples of `ds`.
    pub fn truthy_query(&mut self, ds: &Dataset) -> String {
        let triples: Vec<Triple> = ds.statements().filter_map(truthy_triple).collect();
        let fallback = || {
            Triple::new(wd::item("Q1").iri().clone(), Ns::Wdt.iri("P1"), Term::Iri(wd::item("Q2").iri().clone()))
        };
        let main = self.pick(&triples).cloned().unwrap_or_else(fallback);
        let other = self.pick(&triples).cloned().unwrap_or_else(fallback);
        let s = if self.chance(0.3) { format!("<{}>", other.subject) } else { "?s".to_string() };
        let p = if self.chance(0.7) { format!("<{}>", main.predicate) } else { "?p".to_string() };
        let all_constant = !s.starts_with('?') && !p.starts_with('?');
        let v = if !all_constant && self.chance(0.25) { main.object.to_string() } else { "?v".to_string() };
        let mut patterns = vec![format!("{s} {p} {v} .")];
        let vars: Vec<&str> = [&s, &v].into_iter().filter(|t| t.starts_with('?')).map(|t| t.as_str()).collect();
        if !vars.is_empty() {
            for _ in 0..self.rng.gen_range(0..=2) {
                let var = *self.pick(&vars).unwrap();
                let aux = self.pick(&triples).cloned().unwrap_or_else(fallback);
                patterns.push(format!("{var} <{}> {} .", aux.predicate, aux.object));
            }
        }
        let all: Vec<&str> = [&s, &p, &v].into_iter().filter(|t| t.starts_with('?')).map(|t| t.as_str()).collect();
        let mut projection: Vec<&str> = all.iter().copied().filter(|_| self.rng.gen_bool(0.7)).collect();
        if projection.is_empty() {
            projection.push(all[0]);
        }
        let distinct = if self.chance(0.3) { "DISTINCT " } else { "" };
        let mut q = format!("SELECT {distinct}{} WHERE {{ {} }}", projection.join(" "), patterns.join(" "));
        if self.chance(0.3) {
            q.push_str(&format!(" LIMIT {}", self.rng.gen_range(0..6)));
        }
        if self.chance(0.2) {
            q.push_str(&format!(" OFFSET {}", self.rng.gen_range(0..4)));
        }
        q
    }
}

fn add(a: &Decimal, b: &str) -> Decimal {
    shift(a, b, false)
}

fn sub(a: &Decimal, b: &str) -> Decimal {
    shift(a, b, true)
}

/// `a ± b` for a non-negative integer `b`, exact on the decimal text.
fn shift(a: &Decimal, b: &str, minus: bool) -> Decimal {
    let s = a.as_str();
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |rest| (true, rest));
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    // Work in units of 10^-len(frac) to stay exact.
    let scale = 10i64.pow(frac.len() as u32);
    let magnitude = int.parse::<i64>().expect("integer part") * scale + frac.parse::<i64>().unwrap_or(0);
    let value = if neg { -magnitude } else { magnitude };
    let offset = b.parse::<i64>().expect("integer offset") * scale;
    let total = if minus { value - offset } else { value + offset };
    let sign = if total < 0 { "-" } else { "" };
    let abs = total.unsigned_abs();
    let scale = scale as u64;
    let text = if frac.is_empty() {
        format!("{sign}{abs}")
    } else {
        format!("{sign}{}.{:0w$}", abs / scale, abs % scale, w = frac.len())
    };
    text.parse().expect("shifted decimal")
}
