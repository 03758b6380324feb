use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};
use wstar_core::io::{from_json, to_json, MetricConfigDocument, SetDocument};
use wstar_core::numerics::{Rational, SparseVec};
use wstar_core::poulsen::Variant;

/// Failure classes with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl From<wstar_core::Error> for CliError {
    fn from(e: wstar_core::Error) -> Self {
        match e {
            wstar_core::Error::Document(msg) => CliError::Parse(msg),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Everything a run depends on, echoed into its output.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_config: Option<MetricConfigDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polar_radius: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path]) -> Self {
        RunManifest {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            ..Default::default()
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_set(path: &Path) -> CliResult<SetDocument> {
    read_json(path)
}

pub fn read_metric_config(path: Option<&PathBuf>) -> CliResult<MetricConfigDocument> {
    match path {
        None => Ok(MetricConfigDocument::default()),
        Some(p) => read_json(p),
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<String> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Precondition(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, to_json(value))
        .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

/// `e<k>` for a basis functional, otherwise a JSON vector.
pub fn parse_direction(s: &str) -> Result<SparseVec, String> {
    if let Some(k) = s.strip_prefix('e') {
        return k
            .parse::<usize>()
            .map(SparseVec::basis)
            .map_err(|_| format!("bad basis shorthand {s:?}"));
    }
    from_json(s).map_err(|e| format!("bad direction {s:?}: {e}"))
}

/// `e<k>` when `v` is a basis vector, otherwise its JSON form.
pub fn shorthand(v: &SparseVec) -> String {
    match v.iter().collect::<Vec<_>>().as_slice() {
        [(k, c)] if **c == Rational::one() => format!("e{k}"),
        _ => serde_json::to_string(v).expect("vectors serialize"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_forms() {
        assert_eq!(parse_direction("e5").unwrap(), SparseVec::basis(5));
        assert_eq!(
            parse_direction(r#"[[0,"1/2"]]"#).unwrap(),
            SparseVec::scaled_basis(0, Rational::new(1, 2))
        );
        assert!(parse_direction("ex").is_err());
        assert_eq!(shorthand(&SparseVec::basis(1)), "e1");
        assert_eq!(
            shorthand(&SparseVec::scaled_basis(1, Rational::new(2, 1))),
            r#"[[1,"2/1"]]"#
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::from(wstar_core::Error::Document("x".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::from(wstar_core::Error::UnboundedInput).exit_code(),
            3
        );
        assert_eq!(CliError::Verification(String::new()).exit_code(), 1);
    }
}
