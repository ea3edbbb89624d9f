//! Building blocks of the `kif` command: store specifications, pattern
//! flags, output formats and the overhead benchmark.

pub mod bench;
pub mod render;
pub mod stores;

use kif_core::decoder::{AnswerError, DecodeError};
use kif_core::mapper::MapperError;
use kif_core::model::{FilterPattern, Fingerprint, PatternError, Property, Snak};
use kif_core::sexpr::{self, SexprError};
use kif_core::store::StoreError;

pub use stores::StoreSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{what}: {source}")]
    Sexpr { what: String, source: SexprError },
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Mapper(#[from] MapperError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Data { path: String, message: String },
}

impl From<AnswerError> for CliError {
    fn from(e: AnswerError) -> Self {
        match e {
            AnswerError::Decode(d) => CliError::Decode(d),
            AnswerError::Store(s) => CliError::Store(s),
        }
    }
}

impl CliError {
    /// 3 when an endpoint could not be used, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Store(e) if e.is_transport() => 3,
            _ => 2,
        }
    }

    pub fn sexpr(what: impl Into<String>, source: SexprError) -> Self {
        CliError::Sexpr { what: what.into(), source }
    }
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

/// The pattern flags of `filter`, `count` and `bench`, still as text.
#[derive(Clone, Debug, Default)]
pub struct PatternFlags {
    pub subject: Option<String>,
    pub property: Option<String>,
    pub value: Option<String>,
    pub subject_snak: Vec<String>,
    pub value_snak: Vec<String>,
    pub pattern: Option<String>,
}

fn snak_fingerprint(flag: &str, texts: &[String]) -> Result<Option<Fingerprint>, CliError> {
    let snaks = texts
        .iter()
        .map(|t| sexpr::parse_as::<Snak>(t).map_err(|e| CliError::sexpr(format!("--{flag}"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match snaks.len() {
        0 => None,
        1 => Some(Fingerprint::Snak(snaks.into_iter().next().unwrap())),
        _ => Some(Fingerprint::snaks(snaks)),
    })
}

impl PatternFlags {
    pub fn to_pattern(&self) -> Result<FilterPattern, CliError> {
        let mut p = match &self.pattern {
            Some(text) => sexpr::parse_as::<FilterPattern>(text).map_err(|e| CliError::sexpr("--pattern", e))?,
            None => FilterPattern::any(),
        };
        let conflict = |a: &str, b: &str| CliError::Usage(format!("--{a} and --{b} both constrain the same position"));
        if self.subject.is_some() && !self.subject_snak.is_empty() {
            return Err(conflict("subject", "subject-snak"));
        }
        if self.value.is_some() && !self.value_snak.is_empty() {
            return Err(conflict("value", "value-snak"));
        }
        if let Some(text) = &self.subject {
            p.subject = Some(sexpr::parse_entity_fingerprint(text).map_err(|e| CliError::sexpr("--subject", e))?);
        }
        if let Some(fp) = snak_fingerprint("subject-snak", &self.subject_snak)? {
            p.subject = Some(fp);
        }
        if let Some(text) = &self.property {
            let prop = sexpr::parse_as::<Property>(text).map_err(|e| CliError::sexpr("--property", e))?;
            p = p.with_property(prop);
        }
        if let Some(text) = &self.value {
            p = p.with_value(sexpr::parse_value_fingerprint(text).map_err(|e| CliError::sexpr("--value", e))?);
        }
        if let Some(fp) = snak_fingerprint("value-snak", &self.value_snak)? {
            p = p.with_value(fp);
        }
        p.validate()?;
        Ok(p)
    }
}
