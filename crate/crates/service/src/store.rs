use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use kinetiq::data::{build_registry, parse_dataset, DataError, Dataset, DomainOverrides, ParameterRegistry};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub playthroughs: usize,
    pub points: usize,
    pub districts: u32,
    pub level: u32,
    pub max_turn: u32,
    pub actions: Vec<String>,
}

impl DatasetSummary {
    fn of(ds: &Dataset) -> Self {
        DatasetSummary {
            playthroughs: ds.playthroughs().len(),
            points: ds.point_count(),
            districts: ds.district_count(),
            level: ds.level(),
            max_turn: ds.max_turn_index(),
            actions: ds.action_vocabulary().to_vec(),
        }
    }
}

/// A loaded dataset with its registry. Never mutated once stored.
#[derive(Debug)]
pub struct Entry {
    pub id: String,
    pub dataset: Dataset,
    pub registry: ParameterRegistry,
    pub summary: DatasetSummary,
}

/// Content address of an uploaded body.
pub fn dataset_id(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content-addressed dataset store, optionally mirrored to a directory as
/// `<id>.jsonl` files.
#[derive(Debug, Default)]
pub struct Store {
    entries: RwLock<BTreeMap<String, Arc<Entry>>>,
    dir: Option<PathBuf>,
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// A store persisted under `dir`, preloaded with the `.jsonl` files
    /// already there. Unreadable files are skipped with a warning.
    pub fn persistent(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let store = Store { entries: RwLock::default(), dir: Some(dir.clone()) };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for p in paths {
            match std::fs::read(&p).map_err(|e| e.to_string()).and_then(|b| store.build(&b).map_err(|e| e.to_string())) {
                Ok(entry) => {
                    store.entries.write().unwrap_or_else(|e| e.into_inner()).insert(entry.id.clone(), Arc::new(entry));
                }
                Err(e) => log::warn!("skipping {}: {e}", p.display()),
            }
        }
        Ok(store)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn build(&self, bytes: &[u8]) -> Result<Entry, DataError> {
        let text = std::str::from_utf8(bytes).map_err(|e| DataError::Json { line: 1, message: format!("not UTF-8: {e}") })?;
        let dataset = parse_dataset(text)?;
        let registry = build_registry(&dataset, &DomainOverrides::new())?;
        let summary = DatasetSummary::of(&dataset);
        Ok(Entry { id: dataset_id(bytes), dataset, registry, summary })
    }

    /// Parse and store `bytes`. Returns the entry and whether it was new.
    pub fn insert(&self, bytes: &[u8]) -> Result<(Arc<Entry>, bool), DataError> {
        if let Some(e) = self.get(&dataset_id(bytes)) {
            return Ok((e, false));
        }
        let entry = Arc::new(self.build(bytes)?);
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{}.jsonl", entry.id));
            if let Err(e) = std::fs::write(&path, bytes) {
                log::warn!("could not persist {}: {e}", path.display());
            }
        }
        let mut map = self.entries.write().unwrap_or_else(|e| e.into_inner());
        let stored = map.entry(entry.id.clone()).or_insert(entry).clone();
        Ok((stored, true))
    }

    pub fn get(&self, id: &str) -> Option<Arc<Entry>> {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    pub fn list(&self) -> Vec<Arc<Entry>> {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).values().cloned().collect()
    }
}
