//! Namespace table of the Wikidata RDF dialect (query-service variant).

use crate::model::{Entity, Iri, Item, Property};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ns {
    Wd,
    Wdt,
    P,
    Ps,
    Psv,
    Pq,
    Pqv,
    Pr,
    Prv,
    Wdno,
    Prov,
    Wikibase,
    Wds,
    Wdv,
    Wdref,
    Rdf,
    Rdfs,
    Schema,
    Skos,
    Xsd,
    Wdgenid,
}

impl Ns {
    pub const ALL: [Ns; 21] = [
        Ns::Wd,
        Ns::Wdt,
        Ns::P,
        Ns::Ps,
        Ns::Psv,
        Ns::Pq,
        Ns::Pqv,
        Ns::Pr,
        Ns::Prv,
        Ns::Wdno,
        Ns::Prov,
        Ns::Wikibase,
        Ns::Wds,
        Ns::Wdv,
        Ns::Wdref,
        Ns::Rdf,
        Ns::Rdfs,
        Ns::Schema,
        Ns::Skos,
        Ns::Xsd,
        Ns::Wdgenid,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Ns::Wd => "wd",
            Ns::Wdt => "wdt",
            Ns::P => "p",
            Ns::Ps => "ps",
            Ns::Psv => "psv",
            Ns::Pq => "pq",
            Ns::Pqv => "pqv",
            Ns::Pr => "pr",
            Ns::Prv => "prv",
            Ns::Wdno => "wdno",
            Ns::Prov => "prov",
            Ns::Wikibase => "wikibase",
            Ns::Wds => "wds",
            Ns::Wdv => "wdv",
            Ns::Wdref => "wdref",
            Ns::Rdf => "rdf",
            Ns::Rdfs => "rdfs",
            Ns::Schema => "schema",
            Ns::Skos => "skos",
            Ns::Xsd => "xsd",
            Ns::Wdgenid => "wdgenid",
        }
    }

    pub fn base(self) -> &'static str {
        match self {
            Ns::Wd => "http://www.wikidata.org/entity/",
            Ns::Wdt => "http://www.wikidata.org/prop/direct/",
            Ns::P => "http://www.wikidata.org/prop/",
            Ns::Ps => "http://www.wikidata.org/prop/statement/",
            Ns::Psv => "http://www.wikidata.org/prop/statement/value/",
            Ns::Pq => "http://www.wikidata.org/prop/qualifier/",
            Ns::Pqv => "http://www.wikidata.org/prop/qualifier/value/",
            Ns::Pr => "http://www.wikidata.org/prop/reference/",
            Ns::Prv => "http://www.wikidata.org/prop/reference/value/",
            Ns::Wdno => "http://www.wikidata.org/prop/novalue/",
            Ns::Prov => "http://www.w3.org/ns/prov#",
            Ns::Wikibase => "http://wikiba.se/ontology#",
            Ns::Wds => "http://www.wikidata.org/entity/statement/",
            Ns::Wdv => "http://www.wikidata.org/value/",
            Ns::Wdref => "http://www.wikidata.org/reference/",
            Ns::Rdf => "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
            Ns::Rdfs => "http://www.w3.org/2000/01/rdf-schema#",
            Ns::Schema => "http://schema.org/",
            Ns::Skos => "http://www.w3.org/2004/02/skos/core#",
            Ns::Xsd => "http://www.w3.org/2001/XMLSchema#",
            Ns::Wdgenid => "http://www.wikidata.org/.well-known/genid/",
        }
    }

    pub fn from_prefix(prefix: &str) -> Option<Ns> {
        Ns::ALL.into_iter().find(|ns| ns.prefix() == prefix)
    }

    /// `base + local`. Panics if the result is not a valid IRI, so `local`
    /// must be IRI-safe.
    pub fn iri(self, local: &str) -> Iri {
        Iri::new(format!("{}{}", self.base(), local)).expect("namespace IRI")
    }

    /// Longest namespace whose base prefixes `iri` with a local part free of
    /// `/` and `#`. Several bases nest (`p:` inside `ps:` inside `psv:`), so
    /// the local-part restriction picks the right one.
    pub fn split(iri: &str) -> Option<(Ns, &str)> {
        Ns::ALL
            .into_iter()
            .filter_map(|ns| {
                let local = iri.strip_prefix(ns.base())?;
                (!local.contains(['/', '#'])).then_some((ns, local))
            })
            .max_by_key(|(ns, _)| ns.base().len())
    }

    /// The local name of `iri` in this namespace.
    pub fn local(self, iri: &Iri) -> Option<&str> {
        match Ns::split(iri.as_str()) {
            Some((ns, local)) if ns == self => Some(local),
            _ => None,
        }
    }

    /// `prefix:local` form of `iri` when the local part is a plain name.
    pub fn compact(iri: &str) -> Option<(Ns, &str)> {
        let (ns, local) = Ns::split(iri)?;
        let plain = !local.is_empty()
            && local.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
            && !local.ends_with('.');
        plain.then_some((ns, local))
    }
}

/// Reads an entity off a `wd:` IRI: local names starting with `P` are
/// properties, everything else is an item.
pub fn entity_of(iri: &Iri) -> Option<Entity> {
    let local = Ns::Wd.local(iri)?;
    if local.is_empty() {
        return None;
    }
    Some(if local.starts_with('P') {
        Entity::Property(Property(iri.clone()))
    } else {
        Entity::Item(Item(iri.clone()))
    })
}

pub fn is_skolem(iri: &Iri) -> bool {
    iri.as_str().starts_with(Ns::Wdgenid.base()) || iri.as_str().starts_with("urn:skolem:")
}

/// Well-known IRIs of the Wikibase ontology.
pub mod wikibase {
    use super::Ns;
    use crate::model::{Iri, Rank};

    pub fn rank_iri(rank: Rank) -> Iri {
        Ns::Wikibase.iri(match rank {
            Rank::Preferred => "PreferredRank",
            Rank::Normal => "NormalRank",
            Rank::Deprecated => "DeprecatedRank",
        })
    }

    pub fn rank_of(iri: &Iri) -> Option<Rank> {
        match Ns::Wikibase.local(iri)? {
            "PreferredRank" => Some(Rank::Preferred),
            "NormalRank" => Some(Rank::Normal),
            "DeprecatedRank" => Some(Rank::Deprecated),
            _ => None,
        }
    }
}
