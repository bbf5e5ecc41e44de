//! Per-scene fan-out of stream messages.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use cgaedit_core::pipeline::{EditStage, StoreEvent};
use cgaedit_core::scene::{save_scene, Scene};
use serde::Serialize;
use serde_json::Value;
use tokio::sync::broadcast;

const CHANNEL_CAPACITY: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamMessage {
    SceneUpdate {
        version: u64,
        changed: Vec<String>,
        scene: Value,
    },
    EditProgress {
        stage: EditStage,
    },
}

pub fn scene_json(scene: &Scene) -> Value {
    serde_json::from_slice(&save_scene(scene)).expect("saved scenes are valid JSON")
}

impl StreamMessage {
    pub fn update(scene: &Scene, version: u64, changed: Vec<String>) -> Self {
        StreamMessage::SceneUpdate {
            version,
            changed,
            scene: scene_json(scene),
        }
    }

    pub fn from_event(event: StoreEvent) -> Self {
        match event {
            StoreEvent::Progress { stage, .. } => StreamMessage::EditProgress { stage },
            StoreEvent::Updated {
                scene,
                version,
                changed,
            } => Self::update(&scene, version, changed),
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("stream messages serialize")
    }
}

#[derive(Debug, Default)]
pub struct Hub {
    channels: Mutex<HashMap<String, broadcast::Sender<Arc<StreamMessage>>>>,
}

impl Hub {
    fn sender(&self, scene_id: &str) -> broadcast::Sender<Arc<StreamMessage>> {
        let mut channels = self.channels.lock().expect("hub lock");
        channels
            .entry(scene_id.to_owned())
            .or_insert_with(|| broadcast::channel(CHANNEL_CAPACITY).0)
            .clone()
    }

    pub fn subscribe(&self, scene_id: &str) -> broadcast::Receiver<Arc<StreamMessage>> {
        self.sender(scene_id).subscribe()
    }

    /// Nobody listening is fine.
    pub fn publish(&self, scene_id: &str, message: StreamMessage) {
        let _ = self.sender(scene_id).send(Arc::new(message));
    }
}
