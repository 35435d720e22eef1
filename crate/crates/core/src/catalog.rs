//! Resolution of ontology references (CURIEs and IRIs) to taxonomies.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::manchester::parse_taxonomy;
use crate::taxonomy::{default_taxonomy_shared, Taxonomy, TaxonomyError};

/// IRIs answered by the bundled taxonomy unless a mapping overrides them.
pub const BUNDLED_IRIS: &[&str] = &[
    "https://ontohub.org/meta/NeSyPatterns",
    "https://ontohub.org/meta/NeSyPatterns.omn",
    "http://ontohub.org/meta/NeSyPatterns",
    "http://ontohub.org/meta/NeSyPatterns.omn",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("cannot resolve ontology `{0}`")]
    Miss(String),
    #[error("undeclared prefix `{prefix}:` in `{reference}`")]
    UnknownPrefix { prefix: String, reference: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed catalog: {0}")]
    Malformed(String),
    #[error("fetching `{iri}` failed: {message}")]
    Fetch { iri: String, message: String },
    #[error("{origin}:{error}")]
    Ontology { origin: String, error: TaxonomyError },
}

impl CatalogError {
    /// Environment-level failures, as opposed to problems in ontology content.
    pub fn is_environmental(&self) -> bool {
        !matches!(self, CatalogError::Ontology { .. })
    }
}

/// A taxonomy obtained through a catalog, with warnings raised while reading it.
#[derive(Debug, Clone)]
pub struct LoadedOntology {
    pub iri: String,
    pub taxonomy: Arc<Taxonomy>,
    pub warnings: Vec<(String, Diagnostic)>,
}

/// Anything able to turn an ontology reference into a taxonomy.
pub trait OntologySource {
    fn load(&self, reference: &str) -> Result<LoadedOntology, CatalogError>;
}

pub type Fetcher = Arc<dyn Fn(&str) -> Result<String, String> + Send + Sync>;

#[derive(Clone, Default)]
pub struct Catalog {
    pub prefixes: BTreeMap<String, String>,
    pub mappings: BTreeMap<String, PathBuf>,
    pub allow_fetch: bool,
    fetcher: Option<Fetcher>,
}

impl fmt::Debug for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Catalog")
            .field("prefixes", &self.prefixes)
            .field("mappings", &self.mappings)
            .field("allow_fetch", &self.allow_fetch)
            .field("fetcher", &self.fetcher.is_some())
            .finish()
    }
}

impl Catalog {
    /// Catalog used when none is configured: knows the `ontohub` prefix.
    pub fn builtin() -> Self {
        let mut c = Catalog::default();
        c.prefixes.insert("ontohub".into(), "https://ontohub.org/meta/".into());
        c
    }

    /// Parses catalog JSON; relative mapping paths are taken relative to
    /// `base_dir`. Every mapped file must be readable.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, CatalogError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CatalogError::Malformed(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CatalogError::Malformed("top level must be an object".into()))?;
        let string_map = |key: &str| -> Result<BTreeMap<String, String>, CatalogError> {
            let Some(v) = obj.get(key) else {
                return Err(CatalogError::Malformed(format!("missing key `{key}`")));
            };
            let m = v
                .as_object()
                .ok_or_else(|| CatalogError::Malformed(format!("`{key}` must be an object")))?;
            m.iter()
                .map(|(k, v)| {
                    v.as_str()
                        .map(|s| (k.clone(), s.to_string()))
                        .ok_or_else(|| CatalogError::Malformed(format!("`{key}.{k}` must be a string")))
                })
                .collect()
        };
        let prefixes = string_map("prefixes")?;
        let mut mappings = BTreeMap::new();
        for (iri, path) in string_map("mappings")? {
            let path = base_dir.join(path);
            std::fs::File::open(&path).map_err(|e| CatalogError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            mappings.insert(iri, path);
        }
        let allow_fetch = match obj.get("allow_fetch") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(CatalogError::Malformed("`allow_fetch` must be a boolean".into())),
        };
        Ok(Catalog {
            prefixes,
            mappings,
            allow_fetch,
            fetcher: None,
        })
    }

    pub fn with_fetcher(mut self, fetcher: Fetcher) -> Self {
        self.fetcher = Some(fetcher);
        self
    }

    /// Expands a CURIE or IRI reference to a full IRI.
    pub fn expand(&self, reference: &str) -> Result<String, CatalogError> {
        if let Some(inner) = reference.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Ok(inner.to_string());
        }
        if reference.contains("://") || reference.starts_with("urn:") {
            return Ok(reference.to_string());
        }
        match reference.split_once(':') {
            Some((prefix, local)) => match self.prefixes.get(prefix) {
                Some(base) => Ok(format!("{base}{local}")),
                None => Err(CatalogError::UnknownPrefix {
                    prefix: prefix.to_string(),
                    reference: reference.to_string(),
                }),
            },
            None => Err(CatalogError::Miss(reference.to_string())),
        }
    }
}

fn parsed(origin: &str, iri: String, text: &str) -> Result<LoadedOntology, CatalogError> {
    let (taxonomy, warnings) = parse_taxonomy(text).map_err(|error| CatalogError::Ontology {
        origin: origin.to_string(),
        error,
    })?;
    Ok(LoadedOntology {
        iri,
        taxonomy: Arc::new(taxonomy),
        warnings: warnings.into_iter().map(|w| (origin.to_string(), w)).collect(),
    })
}

impl OntologySource for Catalog {
    fn load(&self, reference: &str) -> Result<LoadedOntology, CatalogError> {
        let iri = self.expand(reference)?;
        if let Some(path) = self.mappings.get(&iri) {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
                path: shown.clone(),
                message: e.to_string(),
            })?;
            return parsed(&shown, iri, &text);
        }
        if BUNDLED_IRIS.contains(&iri.as_str()) {
            return Ok(LoadedOntology {
                iri,
                taxonomy: default_taxonomy_shared(),
                warnings: Vec::new(),
            });
        }
        match &self.fetcher {
            Some(fetch) if self.allow_fetch => {
                let text = fetch(&iri).map_err(|message| CatalogError::Fetch {
                    iri: iri.clone(),
                    message,
                })?;
                parsed(&iri.clone(), iri, &text)
            }
            _ => Err(CatalogError::Miss(iri)),
        }
    }
}

/// Reads a catalog file.
pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    Catalog::from_json(&text, base)
}
