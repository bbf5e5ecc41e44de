//! Template, prompt, parse, apply, repair, commit.

mod store;

pub use store::{HistoryEntry, HistoryKind, SceneStore, StoreError, StoreEvent, DEFAULT_UNDO_DEPTH};

use serde::{Deserialize, Serialize};

use crate::cga::{MotorDecomposition, Multivector};
use crate::collision::{resolve, Placement, ResolveError, ResolverConfig};
use crate::llm::{
    build_prompt, complete, CompletionError, LlmTransport, ObjectContext, Payload, PromptError, PromptStrategy,
    ResponseError, RetryPolicy, StrategyKind, TransportError,
};
use crate::scene::{apply_decomposition, Aabb, Scene, SchemaError};
use crate::templating::{template_query, TemplateError, TemplatedQuery};

/// Decompositions closer than this to the identity leave the object alone.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EditConfig {
    pub resolver: ResolverConfig,
    pub retry: RetryPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub variable: String,
    pub name: String,
    pub payload: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub motor: Option<Multivector>,
    pub decomposition: MotorDecomposition,
    pub moved: bool,
    pub before: Aabb,
    /// After the decomposition, before collision repair.
    pub applied: Aabb,
    pub after: Aabb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditPlan {
    pub query: TemplatedQuery,
    pub strategy: StrategyKind,
    pub prompt: String,
    pub raw_response: String,
    pub objects: Vec<PlanEntry>,
    pub placements: Vec<Placement>,
    pub buffer: f64,
    pub latency_s: f64,
    pub retries: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditStage {
    Templated,
    Prompted,
    Parsed,
    Resolved,
    Committed,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EditError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Completion(#[from] CompletionError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("edited scene is invalid: {0}")]
    InvalidResult(#[from] SchemaError),
}

impl EditError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            EditError::Template(TemplateError::UnknownObject(_)) => "unknown_object",
            EditError::Template(_) | EditError::Prompt(_) => "invalid_query",
            EditError::Completion(CompletionError::Transport { source, .. }) => match source {
                TransportError::MissingApiKey(_) => "missing_api_key",
                _ => "transport_error",
            },
            EditError::Completion(CompletionError::ExhaustedRetries { last_error, .. }) => match last_error {
                ResponseError::NotAVersor { .. } => "not_a_versor",
                ResponseError::NonRigidMatrix { .. } => "non_rigid_matrix",
                ResponseError::Expr { .. } | ResponseError::Schema(_) => "exhausted_retries",
            },
            EditError::Resolve(ResolveError::Unresolvable { .. }) => "unresolvable",
            EditError::Resolve(_) => "invalid_config",
            EditError::InvalidResult(_) => "invalid_result",
        }
    }

    /// Time spent talking to the model before the failure, if any.
    pub fn latency_s(&self) -> Option<f64> {
        match self {
            EditError::Completion(e) => Some(e.latency_s()),
            _ => None,
        }
    }
}

pub fn execute_edit(
    scene: &Scene,
    raw_query: &str,
    strategy: StrategyKind,
    transport: &dyn LlmTransport,
    cfg: &EditConfig,
) -> Result<(Scene, EditPlan), EditError> {
    execute_edit_with_progress(scene, raw_query, strategy, transport, cfg, &mut |_| {})
}

/// Runs one edit. `scene` is never modified; the edited copy is returned
/// together with the plan.
pub fn execute_edit_with_progress(
    scene: &Scene,
    raw_query: &str,
    strategy: StrategyKind,
    transport: &dyn LlmTransport,
    cfg: &EditConfig,
    progress: &mut dyn FnMut(EditStage),
) -> Result<(Scene, EditPlan), EditError> {
    cfg.resolver.validate()?;
    let query = template_query(raw_query, scene)?;
    progress(EditStage::Templated);

    let ctx = ObjectContext::from_query(&query, scene)?;
    let prompt = build_prompt(&PromptStrategy::builtin(strategy), &query, &ctx)?;
    progress(EditStage::Prompted);

    let response = complete(&prompt, strategy, &ctx, transport, cfg.retry)?;
    progress(EditStage::Parsed);

    let mut applied = scene.clone();
    let mut objects = Vec::with_capacity(response.parsed.entries.len());
    for entry in &response.parsed.entries {
        let name = query
            .object_name(&entry.variable)
            .expect("parser only accepts bound variables");
        let index = applied.index_of(name).expect("templating checked the name");
        let before = applied.objects[index].clone();
        let moved = !entry.decomposition.is_identity(IDENTITY_TOL);
        if moved {
            applied.objects[index] = apply_decomposition(&before, &entry.decomposition);
        }
        objects.push(PlanEntry {
            variable: entry.variable.clone(),
            name: name.to_owned(),
            payload: entry.payload.clone(),
            motor: entry.motor,
            decomposition: entry.decomposition,
            moved,
            before: before.bbox,
            applied: applied.objects[index].bbox,
            after: applied.objects[index].bbox,
        });
    }

    // repaired one at a time in query order
    let moved: Vec<&str> = query
        .bindings
        .iter()
        .map(|(_, n)| n.as_str())
        .filter(|n| objects.iter().any(|e| e.moved && e.name == *n))
        .collect();
    let resolution = resolve(&applied, &moved, &cfg.resolver)?;
    for entry in &mut objects {
        entry.after = resolution
            .scene
            .object(&entry.name)
            .expect("resolver keeps every object")
            .bbox;
    }
    progress(EditStage::Resolved);

    let edited = resolution.scene;
    edited.validate()?;
    progress(EditStage::Committed);

    let plan = EditPlan {
        query,
        strategy,
        prompt,
        raw_response: response.raw,
        objects,
        placements: resolution.placements,
        buffer: resolution.buffer,
        latency_s: response.latency_s,
        retries: response.retries_used,
    };
    Ok((edited, plan))
}
