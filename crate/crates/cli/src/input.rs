//! File loading. Syntax and schema errors carry the file position.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use grotto::presheaf::PresheafDoc;
use grotto::{CategoryDoc, FiniteCategory, FunctorDoc, FunctorMap};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },
    #[error(transparent)]
    Domain(#[from] grotto::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn missing(flag: &str, verb: &str) -> CliError {
    CliError::Usage(format!("`{verb}` needs {flag}"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_json(path, &text)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let message = message.split(" at line ").next().unwrap_or(&message).to_string();
        CliError::Syntax { path: path.into(), line: e.line(), column: e.column(), message }
    })
}

pub fn load_site(path: &Path) -> CliResult<Arc<FiniteCategory>> {
    let doc: CategoryDoc = read_json(path)?;
    Ok(Arc::new(FiniteCategory::from_doc(&doc)?))
}

/// A category given inline or as a path relative to the referring file.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum SiteRef {
    Path(PathBuf),
    Inline(CategoryDoc),
}

impl SiteRef {
    fn resolve(&self, base: &Path) -> CliResult<Arc<FiniteCategory>> {
        match self {
            SiteRef::Path(p) => load_site(&base.parent().unwrap_or(Path::new(".")).join(p)),
            SiteRef::Inline(doc) => Ok(Arc::new(FiniteCategory::from_doc(doc)?)),
        }
    }
}

/// Functor file: the mapping tables plus its source and target categories.
#[derive(Deserialize)]
pub struct FunctorFile {
    pub source: Option<SiteRef>,
    pub target: Option<SiteRef>,
    #[serde(flatten)]
    pub map: FunctorDoc,
}

pub fn load_functor(path: &Path) -> CliResult<FunctorMap> {
    let file: FunctorFile = read_json(path)?;
    let (Some(source), Some(target)) = (&file.source, &file.target) else {
        return Err(CliError::Usage(format!("{}: a functor file names its `source` and `target` categories", path.display())));
    };
    Ok(FunctorMap::from_doc(source.resolve(path)?, target.resolve(path)?, &file.map)?)
}

/// Presheaf file, optionally marking a subpresheaf by listing its
/// elements per object.
#[derive(Deserialize)]
pub struct PresheafFile {
    #[serde(flatten)]
    pub presheaf: PresheafDoc,
    #[serde(default)]
    pub chosen: Option<BTreeMap<String, Vec<String>>>,
}
