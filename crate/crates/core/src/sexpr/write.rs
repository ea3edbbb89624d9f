use std::collections::BTreeSet;

use super::{Mode, Object, ToSexp};
use crate::codec::namespace::Ns;
use crate::model::{
    AnnotationRecord, Descriptor, Entity, FilterPattern, Fingerprint, Iri, Item, Property, Quantity, Rank,
    ReferenceRecord, Snak, SnakKind, SnakMask, Statement, TextValue, TimeValue, Value,
};

pub struct Printer {
    out: String,
    mode: Mode,
}

impl Printer {
    pub(crate) fn new(mode: Mode) -> Self {
        Printer { out: String::new(), mode }
    }

    pub(crate) fn finish(self) -> String {
        self.out
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn sep(&mut self) {
        if !self.out.is_empty() && !self.out.ends_with('(') {
            self.out.push(' ');
        }
    }

    pub fn open(&mut self, head: &str) {
        self.sep();
        self.out.push('(');
        self.out.push_str(head);
    }

    pub fn close(&mut self) {
        self.out.push(')');
    }

    pub fn symbol(&mut self, s: &str) {
        self.sep();
        self.out.push_str(s);
    }

    pub fn string(&mut self, s: &str) {
        self.sep();
        self.out.push('"');
        for c in s.chars() {
            match c {
                '"' => self.out.push_str("\\\""),
                '\\' => self.out.push_str("\\\\"),
                '\n' => self.out.push_str("\\n"),
                '\t' => self.out.push_str("\\t"),
                '\r' => self.out.push_str("\\r"),
                c if c.is_control() => self.out.push_str(&format!("\\u{:04X}", c as u32)),
                c => self.out.push(c),
            }
        }
        self.out.push('"');
    }

    fn compact_name(&self, iri: &Iri) -> Option<String> {
        if self.mode != Mode::Compact {
            return None;
        }
        Ns::compact(iri.as_str()).map(|(ns, local)| format!("{}:{}", ns.prefix(), local))
    }

    /// The argument of `Item`/`Property`: a prefixed name in compact mode
    /// when possible, else an `(IRI "…")` form.
    fn iri_arg(&mut self, iri: &Iri) {
        match self.compact_name(iri) {
            Some(name) => self.symbol(&name),
            None => iri.write_sexp(self),
        }
    }

    fn none_or<T: ToSexp>(&mut self, x: Option<&T>) {
        match x {
            Some(x) => x.write_sexp(self),
            None => self.symbol("None"),
        }
    }
}

impl ToSexp for Iri {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("IRI");
        match p.compact_name(self) {
            Some(name) => p.symbol(&name),
            None => p.string(self.as_str()),
        }
        p.close();
    }
}

impl ToSexp for Item {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Item");
        p.iri_arg(self.iri());
        p.close();
    }
}

impl ToSexp for Property {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Property");
        p.iri_arg(self.iri());
        p.close();
    }
}

impl ToSexp for Entity {
    fn write_sexp(&self, p: &mut Printer) {
        match self {
            Entity::Item(i) => i.write_sexp(p),
            Entity::Property(x) => x.write_sexp(p),
        }
    }
}

impl ToSexp for TextValue {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Text");
        p.string(self.content());
        p.string(self.language());
        p.close();
    }
}

impl ToSexp for Quantity {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Quantity");
        p.symbol(self.amount().as_str());
        let rest = [self.unit().is_some(), self.lower().is_some(), self.upper().is_some()];
        let n = rest.iter().rposition(|x| *x).map_or(0, |i| i + 1);
        if n >= 1 {
            p.none_or(self.unit());
        }
        for bound in [self.lower(), self.upper()].into_iter().take(n.saturating_sub(1)) {
            match bound {
                Some(d) => p.symbol(d.as_str()),
                None => p.symbol("None"),
            }
        }
        p.close();
    }
}

impl ToSexp for TimeValue {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Time");
        let ts = self.timestamp();
        if self.precision() <= TimeValue::DAY {
            p.symbol(&ts.to_date_string());
        } else {
            p.symbol(&ts.to_datetime_string());
        }
        p.symbol(&self.precision().to_string());
        p.symbol(&self.timezone().to_string());
        if let Some(cal) = self.calendar() {
            cal.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for Value {
    fn write_sexp(&self, p: &mut Printer) {
        match self {
            Value::Entity(e) => e.write_sexp(p),
            Value::Iri(i) => i.write_sexp(p),
            Value::Text(t) => t.write_sexp(p),
            Value::String(s) => {
                p.open("String");
                p.string(s);
                p.close();
            }
            Value::Quantity(q) => q.write_sexp(p),
            Value::Time(t) => t.write_sexp(p),
        }
    }
}

impl ToSexp for Snak {
    fn write_sexp(&self, p: &mut Printer) {
        match self {
            Snak::Value(prop, v) => {
                p.open("ValueSnak");
                prop.write_sexp(p);
                v.write_sexp(p);
            }
            Snak::SomeValue(prop) => {
                p.open("SomeValueSnak");
                prop.write_sexp(p);
            }
            Snak::NoValue(prop) => {
                p.open("NoValueSnak");
                prop.write_sexp(p);
            }
        }
        p.close();
    }
}

impl ToSexp for Statement {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Statement");
        self.subject.write_sexp(p);
        self.snak.write_sexp(p);
        p.close();
    }
}

impl ToSexp for ReferenceRecord {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("ReferenceRecord");
        for s in self.snaks() {
            s.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for BTreeSet<Snak> {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("SnakSet");
        for s in self {
            s.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for BTreeSet<ReferenceRecord> {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("ReferenceRecordSet");
        for r in self {
            r.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for BTreeSet<AnnotationRecord> {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("AnnotationRecordSet");
        for r in self {
            r.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for Rank {
    fn write_sexp(&self, p: &mut Printer) {
        p.symbol(match self {
            Rank::Preferred => "PreferredRank",
            Rank::Normal => "NormalRank",
            Rank::Deprecated => "DeprecatedRank",
        });
    }
}

impl ToSexp for AnnotationRecord {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("AnnotationRecord");
        self.qualifiers.write_sexp(p);
        self.references.write_sexp(p);
        self.rank.write_sexp(p);
        p.close();
    }
}

impl ToSexp for Descriptor {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("Descriptor");
        p.none_or(self.label.as_ref());
        p.none_or(self.description.as_ref());
        for a in self.aliases() {
            a.write_sexp(p);
        }
        p.close();
    }
}

impl ToSexp for Fingerprint {
    fn write_sexp(&self, p: &mut Printer) {
        match self {
            Fingerprint::Entity(e) => e.write_sexp(p),
            Fingerprint::Value(v) => v.write_sexp(p),
            Fingerprint::Snak(s) => s.write_sexp(p),
            Fingerprint::SnakSet(set) => set.write_sexp(p),
        }
    }
}

impl ToSexp for SnakMask {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("SnakMask");
        for k in self.kinds() {
            p.symbol(match k {
                SnakKind::Value => "ValueSnak",
                SnakKind::SomeValue => "SomeValueSnak",
                SnakKind::NoValue => "NoValueSnak",
            });
        }
        p.close();
    }
}

impl ToSexp for FilterPattern {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("FilterPattern");
        p.none_or(self.subject.as_ref());
        p.none_or(self.property.as_ref());
        p.none_or(self.value.as_ref());
        self.snak_kinds.write_sexp(p);
        p.close();
    }
}

/// One annotated statement, as in a fixture file.
impl ToSexp for (&Statement, &AnnotationRecord) {
    fn write_sexp(&self, p: &mut Printer) {
        p.open("AnnotatedStatement");
        self.0.write_sexp(p);
        self.1.write_sexp(p);
        p.close();
    }
}

impl ToSexp for Object {
    fn write_sexp(&self, p: &mut Printer) {
        match self {
            Object::Value(v) => v.write_sexp(p),
            Object::Snak(s) => s.write_sexp(p),
            Object::Statement(s) => s.write_sexp(p),
            Object::ReferenceRecord(r) => r.write_sexp(p),
            Object::SnakSet(s) => s.write_sexp(p),
            Object::ReferenceRecordSet(s) => s.write_sexp(p),
            Object::Rank(r) => r.write_sexp(p),
            Object::AnnotationRecord(a) => a.write_sexp(p),
            Object::AnnotationRecordSet(s) => s.write_sexp(p),
            Object::Descriptor(d) => d.write_sexp(p),
            Object::FilterPattern(f) => f.write_sexp(p),
            Object::SnakMask(m) => m.write_sexp(p),
            Object::AnnotatedStatement(s, recs) => {
                p.open("AnnotatedStatement");
                s.write_sexp(p);
                for r in recs {
                    r.write_sexp(p);
                }
                p.close();
            }
            Object::EntityDescriptor(e, d) => {
                p.open("EntityDescriptor");
                e.write_sexp(p);
                d.write_sexp(p);
                p.close();
            }
        }
    }
}
