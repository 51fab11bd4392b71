//! Catalog of presentations, maps, contractions, embeddings, realizations,
//! Casimirs and symmetry tables, one TOML document per entry.

mod raw;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::hopf::{ContractionSpec, EmbeddingSpec, HopfError, HopfPresentation, RMatrixSpec, TwistMap};
use crate::ncalg::{EngineLimits, Relation, RelationTable};

pub use raw::ENV_CATALOG;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Presentation,
    Twist,
    Contraction,
    Embedding,
    Realization,
    Casimir,
    SymmetryTable,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Presentation,
        Kind::Twist,
        Kind::Contraction,
        Kind::Embedding,
        Kind::Realization,
        Kind::Casimir,
        Kind::SymmetryTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Presentation => "presentation",
            Kind::Twist => "twist",
            Kind::Contraction => "contraction",
            Kind::Embedding => "embedding",
            Kind::Realization => "realization",
            Kind::Casimir => "casimir",
            Kind::SymmetryTable => "symmetry_table",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("{}:{line}: {message}", file.display())]
    ValidationFailed { file: PathBuf, line: usize, message: String },
    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

/// Coordinates, derivatives, shifts and parameters allowed in operator
/// expressions.
pub const OPERATOR_SYMBOLS: [&str; 9] = ["x", "t", "dx", "dt", "Tx", "Tt", "sigma", "tau", "m"];

/// `Dx = (Tx - 1)/sigma`, `Dt = (Tt - 1)/tau`.
pub fn operator_macros() -> BTreeMap<String, Expr> {
    [("Dx", "(Tx - 1)/sigma"), ("Dt", "(Tt - 1)/tau")]
        .into_iter()
        .map(|(k, v)| (k.to_string(), parse(v).expect("builtin macro")))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimit {
    pub target: String,
    pub rename: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresentationDef {
    pub parameter: String,
    /// In PBW order.
    pub generators: Vec<String>,
    pub macros: BTreeMap<String, Expr>,
    pub brackets: Vec<Relation>,
    pub coproducts: BTreeMap<String, Expr>,
    /// An element whose integer powers are group-like.
    pub grouplike: Option<Expr>,
    pub rmatrix: Option<RMatrixSpec>,
    pub classical_limit: Option<ClassicalLimit>,
}

impl PresentationDef {
    pub fn table(&self, id: &str) -> RelationTable {
        RelationTable {
            name: id.to_string(),
            generators: self.generators.clone(),
            parameter: self.parameter.clone(),
            relations: self.brackets.clone(),
        }
    }

    pub fn build(&self, id: &str, limits: EngineLimits) -> Result<HopfPresentation, HopfError> {
        HopfPresentation::new(id, self.table(id), self.coproducts.clone(), self.rmatrix.clone(), limits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistDef {
    pub source: String,
    pub target: String,
    pub map: TwistMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionDef {
    pub source: String,
    pub target: String,
    pub spec: ContractionSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDef {
    pub sub: String,
    pub big: String,
    pub spec: EmbeddingSpec,
}

/// Which coordinate is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    Space,
    Time,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Continuum {
    /// Realization holding the classical vector fields.
    pub reference: String,
    /// Own generator → reference generator.
    pub rename: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub map: String,
    pub realization: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationDef {
    pub presentation: String,
    pub lattice: Lattice,
    pub macros: BTreeMap<String, Expr>,
    pub operators: BTreeMap<String, Expr>,
    pub continuum: Option<Continuum>,
    /// This realization is the image of another one under a twist map.
    pub derived_from: Option<Derivation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirDef {
    pub presentation: String,
    pub expr: Expr,
    /// Expected operator under each listed realization.
    pub realized: BTreeMap<String, Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryDef {
    pub realization: String,
    pub casimir: String,
    /// `[E, O] = Λ_O E` for every generator O.
    pub lambdas: BTreeMap<String, Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Definition {
    Presentation(PresentationDef),
    Twist(TwistDef),
    Contraction(ContractionDef),
    Embedding(EmbeddingDef),
    Realization(RealizationDef),
    Casimir(CasimirDef),
    SymmetryTable(SymmetryDef),
}

impl Definition {
    pub fn kind(&self) -> Kind {
        match self {
            Definition::Presentation(_) => Kind::Presentation,
            Definition::Twist(_) => Kind::Twist,
            Definition::Contraction(_) => Kind::Contraction,
            Definition::Embedding(_) => Kind::Embedding,
            Definition::Realization(_) => Kind::Realization,
            Definition::Casimir(_) => Kind::Casimir,
            Definition::SymmetryTable(_) => Kind::SymmetryTable,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: Kind,
    pub paper_label: String,
    pub source_text: String,
    pub definition: Definition,
    pub file: PathBuf,
    /// Line of each item (e.g. `bracket D,P`, `operator C`) in `file`.
    pub lines: BTreeMap<String, usize>,
}

impl PartialEq for CatalogEntry {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.kind == other.kind
            && self.paper_label == other.paper_label
            && self.source_text == other.source_text
            && self.definition == other.definition
    }
}

impl CatalogEntry {
    /// `file:line` of an item, falling back to the top of the file.
    pub fn location(&self, item: &str) -> String {
        format!("{}:{}", self.file.display(), self.lines.get(item).copied().unwrap_or(1))
    }
}

/// Immutable set of validated entries.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: BTreeMap<String, CatalogEntry>,
    pub warnings: Vec<String>,
}

impl Catalog {
    /// Resolution order: explicit path, `TWISTVERIFY_CATALOG`, `./catalog`,
    /// then the catalog shipped with the crate.
    pub fn locate(explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        if let Ok(p) = std::env::var(ENV_CATALOG) {
            return PathBuf::from(p);
        }
        let local = PathBuf::from("catalog");
        if local.is_dir() {
            return local;
        }
        Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog")
    }

    pub fn shipped() -> Result<Catalog, CatalogError> {
        Catalog::load_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog"))
    }

    /// Reads every `*.toml` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Catalog, CatalogError> {
        let io = |e: std::io::Error| CatalogError::Io {
            path: dir.to_path_buf(),
            message: e.to_string(),
        };
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        files.sort();
        let mut sources = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(|e| CatalogError::Io {
                path: f.clone(),
                message: e.to_string(),
            })?;
            sources.push((f, text));
        }
        Catalog::from_sources(sources)
    }

    /// Parses and validates a set of documents.
    pub fn from_sources(sources: Vec<(PathBuf, String)>) -> Result<Catalog, CatalogError> {
        let mut probes = Vec::new();
        for (file, text) in sources {
            let (id, kind) = raw::probe(&file, &text)?;
            probes.push((kind, id, file, text));
        }
        probes.sort_by(|a, b| (phase(a.0), &a.1).cmp(&(phase(b.0), &b.1)));
        let mut cat = Catalog::default();
        for (_, id, file, text) in probes {
            if let Some(prev) = cat.entries.get(&id) {
                return Err(CatalogError::ValidationFailed {
                    file,
                    line: 1,
                    message: format!("duplicate id `{id}` (first defined in {})", prev.file.display()),
                });
            }
            let entry = raw::parse_entry(&file, &text, &cat)?;
            cat.entries.insert(id, entry);
        }
        for e in cat.entries.values() {
            raw::check_references(e, &cat)?;
        }
        if cat.entries.is_empty() {
            cat.warnings.push("catalog is empty".to_string());
        }
        Ok(cat)
    }

    pub fn load(&self, id: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries.get(id).ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn list(&self, kind: Option<Kind>) -> Vec<&str> {
        self.entries
            .values()
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .map(|e| e.id.as_str())
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn presentation(&self, id: &str) -> Result<&PresentationDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Presentation(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Presentation)),
        }
    }

    pub fn twist(&self, id: &str) -> Result<&TwistDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Twist(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Twist)),
        }
    }

    pub fn contraction(&self, id: &str) -> Result<&ContractionDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Contraction(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Contraction)),
        }
    }

    pub fn embedding(&self, id: &str) -> Result<&EmbeddingDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Embedding(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Embedding)),
        }
    }

    pub fn realization(&self, id: &str) -> Result<&RealizationDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Realization(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Realization)),
        }
    }

    pub fn casimir(&self, id: &str) -> Result<&CasimirDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::Casimir(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::Casimir)),
        }
    }

    pub fn symmetry(&self, id: &str) -> Result<&SymmetryDef, CatalogError> {
        match &self.load(id)?.definition {
            Definition::SymmetryTable(p) => Ok(p),
            _ => Err(self.wrong_kind(id, Kind::SymmetryTable)),
        }
    }

    fn wrong_kind(&self, id: &str, want: Kind) -> CatalogError {
        let e = &self.entries[id];
        CatalogError::ValidationFailed {
            file: e.file.clone(),
            line: 1,
            message: format!("`{id}` is a {}, expected a {}", e.kind.name(), want.name()),
        }
    }

    /// Canonical TOML text of an entry; reparsing it gives an equal entry.
    pub fn serialize(&self, id: &str) -> Result<String, CatalogError> {
        Ok(raw::serialize(self.load(id)?))
    }

    /// Parses one document against the entries already in this catalog.
    pub fn parse_document(&self, file: &Path, text: &str) -> Result<CatalogEntry, CatalogError> {
        raw::parse_entry(file, text, self)
    }

    /// Replaces an entry with a re-parsed document, for corrupted-catalog
    /// experiments.
    pub fn with_document(&self, file: &Path, text: &str) -> Result<Catalog, CatalogError> {
        let e = self.parse_document(file, text)?;
        let mut out = self.clone();
        out.entries.insert(e.id.clone(), e);
        Ok(out)
    }
}

fn phase(k: Kind) -> u8 {
    match k {
        Kind::Presentation => 0,
        Kind::Twist | Kind::Contraction | Kind::Embedding | Kind::Realization => 1,
        Kind::Casimir => 2,
        Kind::SymmetryTable => 3,
    }
}

/// Symbols allowed in an expression over a presentation.
pub(crate) fn presentation_symbols(p: &PresentationDef) -> BTreeSet<String> {
    let mut s: BTreeSet<String> = p.generators.iter().cloned().collect();
    s.insert(p.parameter.clone());
    s
}

#[cfg(test)]
mod tests;
