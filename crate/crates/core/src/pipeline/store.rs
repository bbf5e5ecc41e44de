//! Committed scene versions, undo history and optional JSON persistence.
//!
//! Each scene has its own lock, held for the whole edit, so edits to one
//! scene run one after another while different scenes proceed in parallel.

use std::collections::{HashMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::llm::{LlmTransport, StrategyKind};
use crate::scene::{load_scene_file, save_scene, Scene, SchemaError};

use super::{execute_edit_with_progress, EditConfig, EditError, EditPlan, EditStage};

pub const DEFAULT_UNDO_DEPTH: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("no scene with id `{0}`")]
    NotFound(String),
    #[error("scene `{0}` already exists")]
    AlreadyExists(String),
    #[error("scene is at version {actual}, not {expected}")]
    VersionConflict { expected: u64, actual: u64 },
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("storage error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HistoryKind {
    Created,
    Edit { plan: Box<EditPlan> },
    Undo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub version: u64,
    #[serde(flatten)]
    pub kind: HistoryKind,
}

/// Something observers of a scene may want to hear about.
#[derive(Debug, Clone, PartialEq)]
pub enum StoreEvent {
    Progress { scene_id: String, stage: EditStage },
    /// `changed` lists objects that differ from the previous version.
    Updated { scene: Scene, version: u64, changed: Vec<String> },
}

fn changed_objects(before: &Scene, after: &Scene) -> Vec<String> {
    let mut names: Vec<String> = after
        .objects
        .iter()
        .filter(|o| before.object(&o.name) != Some(*o))
        .map(|o| o.name.clone())
        .collect();
    names.extend(
        before
            .objects
            .iter()
            .filter(|o| after.object(&o.name).is_none())
            .map(|o| o.name.clone()),
    );
    names
}

struct Slot {
    current: Scene,
    version: u64,
    undo: VecDeque<Scene>,
    history: Vec<HistoryEntry>,
}

pub struct SceneStore {
    slots: RwLock<HashMap<String, Arc<Mutex<Slot>>>>,
    undo_depth: usize,
    data_dir: Option<PathBuf>,
}

impl std::fmt::Debug for SceneStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SceneStore")
            .field("undo_depth", &self.undo_depth)
            .field("data_dir", &self.data_dir)
            .finish_non_exhaustive()
    }
}

impl Default for SceneStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

fn io_err(e: impl std::fmt::Display) -> StoreError {
    StoreError::Io(e.to_string())
}

impl SceneStore {
    pub fn in_memory() -> Self {
        Self {
            slots: RwLock::new(HashMap::new()),
            undo_depth: DEFAULT_UNDO_DEPTH,
            data_dir: None,
        }
    }

    pub fn with_undo_depth(mut self, depth: usize) -> Self {
        self.undo_depth = depth;
        self
    }

    /// Persists every committed version to `<dir>/<id>.json` and loads the
    /// scenes already there.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io_err)?;
        let store = Self {
            data_dir: Some(dir.clone()),
            ..Self::in_memory()
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let scene = load_scene_file(&path)?;
            store.insert_slot(scene)?;
        }
        Ok(store)
    }

    fn path_for(&self, id: &str) -> Option<PathBuf> {
        self.data_dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    fn persist(&self, scene: &Scene) -> Result<(), StoreError> {
        let Some(path) = self.path_for(&scene.id) else {
            return Ok(());
        };
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, save_scene(scene)).map_err(io_err)?;
        std::fs::rename(&tmp, &path).map_err(io_err)
    }

    fn insert_slot(&self, scene: Scene) -> Result<u64, StoreError> {
        let mut slots = self.slots.write().expect("store lock");
        if slots.contains_key(&scene.id) {
            return Err(StoreError::AlreadyExists(scene.id));
        }
        let slot = Slot {
            current: scene.clone(),
            version: 1,
            undo: VecDeque::new(),
            history: vec![HistoryEntry {
                version: 1,
                kind: HistoryKind::Created,
            }],
        };
        slots.insert(scene.id, Arc::new(Mutex::new(slot)));
        Ok(1)
    }

    pub fn insert(&self, scene: Scene) -> Result<u64, StoreError> {
        scene.validate()?;
        if scene.id.contains(['/', '\\']) || scene.id.starts_with('.') {
            return Err(StoreError::Schema(SchemaError {
                pointer: "/id".into(),
                message: "scene id must not contain path separators or start with a dot".into(),
            }));
        }
        let version = self.insert_slot(scene.clone())?;
        self.persist(&scene)?;
        Ok(version)
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, StoreError> {
        self.slots
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_owned()))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.slots.read().expect("store lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn get(&self, id: &str) -> Result<(Scene, u64), StoreError> {
        let slot = self.slot(id)?;
        let slot = slot.lock().expect("scene lock");
        Ok((slot.current.clone(), slot.version))
    }

    pub fn history(&self, id: &str) -> Result<Vec<HistoryEntry>, StoreError> {
        let slot = self.slot(id)?;
        let slot = slot.lock().expect("scene lock");
        Ok(slot.history.clone())
    }

    /// Runs an edit against the latest version and commits it. With
    /// `expected_version` set the edit is refused if another commit got in
    /// first.
    #[allow(clippy::too_many_arguments)]
    pub fn edit(
        &self,
        id: &str,
        raw_query: &str,
        strategy: StrategyKind,
        transport: &dyn LlmTransport,
        cfg: &EditConfig,
        expected_version: Option<u64>,
        events: &mut dyn FnMut(StoreEvent),
    ) -> Result<(Scene, u64, EditPlan), StoreError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().expect("scene lock");
        if let Some(expected) = expected_version {
            if expected != slot.version {
                return Err(StoreError::VersionConflict {
                    expected,
                    actual: slot.version,
                });
            }
        }
        // `Committed` is reported once the new version is actually stored
        let (edited, plan) = execute_edit_with_progress(&slot.current, raw_query, strategy, transport, cfg, &mut |stage| {
            if stage != EditStage::Committed {
                events(StoreEvent::Progress {
                    scene_id: id.to_owned(),
                    stage,
                })
            }
        })?;
        self.persist(&edited)?;
        let previous = std::mem::replace(&mut slot.current, edited.clone());
        slot.undo.push_back(previous);
        while slot.undo.len() > self.undo_depth {
            slot.undo.pop_front();
        }
        slot.version += 1;
        let version = slot.version;
        slot.history.push(HistoryEntry {
            version,
            kind: HistoryKind::Edit {
                plan: Box::new(plan.clone()),
            },
        });
        events(StoreEvent::Progress {
            scene_id: id.to_owned(),
            stage: EditStage::Committed,
        });
        let changed = changed_objects(slot.undo.back().expect("just pushed"), &edited);
        events(StoreEvent::Updated {
            scene: edited.clone(),
            version,
            changed,
        });
        Ok((edited, version, plan))
    }

    /// Restores the version before the last edit. The restored scene gets a
    /// new version number.
    pub fn undo(&self, id: &str) -> Result<(Scene, u64), StoreError> {
        self.undo_with_events(id, &mut |_| {})
    }

    /// Like [`SceneStore::undo`]; `events` hears about the restored version
    /// while the scene is still locked, so observers see commits in order.
    pub fn undo_with_events(&self, id: &str, events: &mut dyn FnMut(StoreEvent)) -> Result<(Scene, u64), StoreError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().expect("scene lock");
        let previous = slot.undo.pop_back().ok_or(StoreError::NothingToUndo)?;
        if let Err(e) = self.persist(&previous) {
            slot.undo.push_back(previous);
            return Err(e);
        }
        let changed = changed_objects(&slot.current, &previous);
        slot.current = previous.clone();
        slot.version += 1;
        let version = slot.version;
        slot.history.push(HistoryEntry {
            version,
            kind: HistoryKind::Undo,
        });
        events(StoreEvent::Updated {
            scene: previous.clone(),
            version,
            changed,
        });
        Ok((previous, version))
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }
}
