//! SPARQL 1.1 query results, JSON format.

use serde_json::{json, Map, Value as Json};

use super::{Literal, Solutions, Term};
use crate::codec::namespace::Ns;
use crate::model::Iri;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed SPARQL results: {0}")]
pub struct ResultsError(pub String);

fn term_json(t: &Term) -> Json {
    match t {
        Term::Iri(i) => json!({"type": "uri", "value": i.as_str()}),
        Term::Literal(l) => {
            let mut m = Map::new();
            m.insert("type".into(), "literal".into());
            m.insert("value".into(), l.lexical().into());
            if let Some(lang) = l.language() {
                m.insert("xml:lang".into(), lang.into());
            } else if !l.has_datatype(Ns::Xsd, "string") {
                m.insert("datatype".into(), l.datatype().as_str().into());
            }
            Json::Object(m)
        }
    }
}

pub fn to_json(s: &Solutions) -> Json {
    let bindings: Vec<Json> = s
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (v, cell) in s.variables.iter().zip(row) {
                if let Some(t) = cell {
                    m.insert(v.clone(), term_json(t));
                }
            }
            Json::Object(m)
        })
        .collect();
    json!({"head": {"vars": s.variables}, "results": {"bindings": bindings}})
}

pub fn to_string(s: &Solutions) -> String {
    to_json(s).to_string()
}

fn json_term(v: &Json) -> Result<Term, ResultsError> {
    let bad = |m: &str| ResultsError(format!("{m}: {v}"));
    let kind = v.get("type").and_then(Json::as_str).ok_or_else(|| bad("binding without type"))?;
    let value = v.get("value").and_then(Json::as_str).ok_or_else(|| bad("binding without value"))?;
    match kind {
        "uri" => Ok(Term::Iri(Iri::new(value).map_err(|e| ResultsError(e.to_string()))?)),
        "bnode" => Ok(Term::Iri(
            Iri::new(format!("urn:skolem:results:{value}")).map_err(|e| ResultsError(e.to_string()))?,
        )),
        "literal" | "typed-literal" => {
            if let Some(lang) = v.get("xml:lang").and_then(Json::as_str) {
                return Ok(Term::Literal(Literal::lang(value, lang)));
            }
            match v.get("datatype").and_then(Json::as_str) {
                Some(dt) => Ok(Term::Literal(Literal::typed(
                    value,
                    Iri::new(dt).map_err(|e| ResultsError(e.to_string()))?,
                ))),
                None => Ok(Term::Literal(Literal::string(value))),
            }
        }
        other => Err(bad(&format!("unknown term type {other:?}"))),
    }
}

pub fn from_json(doc: &Json) -> Result<Solutions, ResultsError> {
    let vars: Vec<String> = doc
        .pointer("/head/vars")
        .and_then(Json::as_array)
        .ok_or_else(|| ResultsError("missing head.vars".into()))?
        .iter()
        .map(|v| v.as_str().map(String::from).ok_or_else(|| ResultsError("non-string variable".into())))
        .collect::<Result<_, _>>()?;
    let bindings = doc
        .pointer("/results/bindings")
        .and_then(Json::as_array)
        .ok_or_else(|| ResultsError("missing results.bindings".into()))?;
    let mut rows = Vec::with_capacity(bindings.len());
    for b in bindings {
        let obj = b.as_object().ok_or_else(|| ResultsError("binding is not an object".into()))?;
        let row = vars.iter().map(|v| obj.get(v).map(json_term).transpose()).collect::<Result<_, _>>()?;
        rows.push(row);
    }
    Ok(Solutions { variables: vars, rows })
}

pub fn from_str(text: &str) -> Result<Solutions, ResultsError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| ResultsError(e.to_string()))?;
    from_json(&doc)
}
