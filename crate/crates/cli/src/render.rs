//! Output formats.
//!
//! `sexp` prints one compact S-expression per line, which reads back with
//! `sexpr::parse_many`. `json` prints one array, and `ntriples` prints the
//! Wikidata RDF encoding of the results.

use std::collections::BTreeSet;
use std::io::Write;

use kif_core::codec::encode_all;
use kif_core::graph::ntriples;
use kif_core::model::{AnnotationRecord, Descriptor, Entity, Statement};
use kif_core::sexpr::{self, Mode, Object};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Sexp,
    Json,
    Ntriples,
}

/// A statement, with its annotation records when they were asked for.
pub type Row = (Statement, Option<BTreeSet<AnnotationRecord>>);

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), source: e }
}

fn json_line(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, v).map_err(|e| io(e.into()))?;
    writeln!(out).map_err(io)
}

pub fn statements(out: &mut dyn Write, format: Format, rows: &[Row]) -> Result<(), CliError> {
    match format {
        Format::Sexp => {
            for (stmt, recs) in rows {
                let text = match recs {
                    Some(recs) => sexpr::print(&Object::AnnotatedStatement(stmt.clone(), recs.clone()), Mode::Compact),
                    None => sexpr::print(stmt, Mode::Compact),
                };
                writeln!(out, "{text}").map_err(io)?;
            }
            Ok(())
        }
        Format::Json => {
            let items = rows
                .iter()
                .map(|(stmt, recs)| {
                    let mut item = serde_json::json!({ "statement": stmt });
                    if let Some(recs) = recs {
                        item["annotations"] = serde_json::json!(recs);
                    }
                    item
                })
                .collect();
            json_line(out, &serde_json::Value::Array(items))
        }
        Format::Ntriples => {
            let default = BTreeSet::from([AnnotationRecord::default()]);
            let records = rows.iter().flat_map(|(stmt, recs)| {
                let recs = recs.as_ref().filter(|r| !r.is_empty()).unwrap_or(&default);
                recs.iter().map(move |r| (stmt, r))
            });
            let graph = encode_all(records, std::iter::empty())
                .map_err(|e| CliError::Data { path: "<results>".into(), message: e.to_string() })?;
            write!(out, "{}", ntriples::serialize(&graph)).map_err(io)
        }
    }
}

pub fn descriptors(out: &mut dyn Write, format: Format, rows: &[(Entity, Descriptor)]) -> Result<(), CliError> {
    match format {
        Format::Sexp => {
            for (e, d) in rows {
                let text = sexpr::print(&Object::EntityDescriptor(e.clone(), d.clone()), Mode::Compact);
                writeln!(out, "{text}").map_err(io)?;
            }
            Ok(())
        }
        Format::Json => {
            let items = rows.iter().map(|(e, d)| serde_json::json!({ "entity": e, "descriptor": d })).collect();
            json_line(out, &serde_json::Value::Array(items))
        }
        Format::Ntriples => {
            let graph = encode_all(std::iter::empty(), rows.iter().map(|(e, d)| (e, d)))
                .map_err(|e| CliError::Data { path: "<results>".into(), message: e.to_string() })?;
            write!(out, "{}", ntriples::serialize(&graph)).map_err(io)
        }
    }
}
