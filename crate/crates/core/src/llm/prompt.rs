use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cga::Vec3;
use crate::scene::{Aabb, Scene};
use crate::templating::TemplatedQuery;

use super::StrategyKind;

/// Number of worked examples every strategy carries.
pub const EXAMPLE_COUNT: usize = 5;

const EXAMPLE_MARKER: &str = "### Example ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptStrategy {
    pub kind: StrategyKind,
    pub system_prompt: String,
    pub example_block: String,
    pub guidance_block: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("no context for variable `{0}`")]
    MissingContext(String),
    #[error("example block has {found} examples, expected {EXAMPLE_COUNT}")]
    ExampleCount { found: usize },
}

impl PromptStrategy {
    pub fn new(
        kind: StrategyKind,
        system_prompt: impl Into<String>,
        example_block: impl Into<String>,
        guidance_block: impl Into<String>,
    ) -> Result<Self, PromptError> {
        let strategy = Self {
            kind,
            system_prompt: strip_asset_header(&system_prompt.into()),
            example_block: strip_asset_header(&example_block.into()),
            guidance_block: strip_asset_header(&guidance_block.into()),
        };
        let found = strategy.example_count();
        if found != EXAMPLE_COUNT {
            return Err(PromptError::ExampleCount { found });
        }
        Ok(strategy)
    }

    /// The bundled prompt texts for `kind`.
    pub fn builtin(kind: StrategyKind) -> Self {
        let (system, examples, guidance) = match kind {
            StrategyKind::Cga => (
                include_str!("../../assets/prompts/cga/system.md"),
                include_str!("../../assets/prompts/cga/examples.md"),
                include_str!("../../assets/prompts/cga/guidance.md"),
            ),
            StrategyKind::Euclidean => (
                include_str!("../../assets/prompts/euclidean/system.md"),
                include_str!("../../assets/prompts/euclidean/examples.md"),
                include_str!("../../assets/prompts/euclidean/guidance.md"),
            ),
            StrategyKind::Omniverse => (
                include_str!("../../assets/prompts/omniverse/system.md"),
                include_str!("../../assets/prompts/omniverse/examples.md"),
                include_str!("../../assets/prompts/omniverse/guidance.md"),
            ),
        };
        Self::new(kind, system, examples, guidance).expect("bundled prompt assets are well formed")
    }

    pub fn example_count(&self) -> usize {
        self.example_block
            .lines()
            .filter(|l| l.starts_with(EXAMPLE_MARKER))
            .count()
    }
}

/// Drops the leading `<!-- prompt-asset ... -->` line of an asset file.
fn strip_asset_header(text: &str) -> String {
    let body = match text.strip_prefix("<!--") {
        Some(rest) => rest.split_once('\n').map_or("", |(_, tail)| tail),
        None => text,
    };
    body.trim().to_owned()
}

/// What the LLM is told about one query variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub variable: String,
    pub name: String,
    pub bbox: Aabb,
    /// Current orientation as Euler angles `[x, y, z]` in degrees.
    pub euler_degrees: [f64; 3],
}

impl ContextEntry {
    pub fn center(&self) -> Vec3 {
        self.bbox.center()
    }

    pub fn dimensions(&self) -> Vec3 {
        self.bbox.extents()
    }
}

/// Context restricted to the objects the query mentions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectContext {
    pub entries: Vec<ContextEntry>,
}

impl ObjectContext {
    pub fn from_query(query: &TemplatedQuery, scene: &Scene) -> Result<Self, PromptError> {
        let mut entries = Vec::with_capacity(query.bindings.len());
        for (variable, name) in &query.bindings {
            let obj = scene
                .object(name)
                .ok_or_else(|| PromptError::MissingContext(variable.clone()))?;
            let (roll, pitch, yaw) = obj.orientation.euler_angles();
            entries.push(ContextEntry {
                variable: variable.clone(),
                name: name.clone(),
                bbox: obj.bbox,
                euler_degrees: [roll.to_degrees(), pitch.to_degrees(), yaw.to_degrees()],
            });
        }
        Ok(Self { entries })
    }

    pub fn get(&self, variable: &str) -> Option<&ContextEntry> {
        self.entries.iter().find(|e| e.variable == variable)
    }
}

/// Six decimals, trailing zeros trimmed, no `-0`.
fn num(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_owned(),
        _ => s.to_owned(),
    }
}

fn triple(v: &Vec3) -> String {
    format!("({}, {}, {})", num(v.x), num(v.y), num(v.z))
}

fn output_instruction(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::Cga => {
            r#"Respond with JSON only, in the form {"objects": [{"name": "X1", "transformation": "<CGA expression>"}]}, one entry per variable."#
        }
        StrategyKind::Euclidean => {
            r#"Respond with JSON only, in the form {"objects": [{"name": "X1", "transformation": [[r11, r12, r13, tx], [r21, r22, r23, ty], [r31, r32, r33, tz], [0, 0, 0, 1]]}]}, one entry per variable."#
        }
        StrategyKind::Omniverse => {
            r#"Respond with JSON only, in the form {"objects": [{"name": "X1", "transformation": {"position": [x, y, z], "rotation": [x_deg, y_deg, z_deg]}}]}, one entry per variable."#
        }
    }
}

/// Assembles the full prompt. The output is a pure function of its inputs.
pub fn build_prompt(
    strategy: &PromptStrategy,
    query: &TemplatedQuery,
    ctx: &ObjectContext,
) -> Result<String, PromptError> {
    let mut out = String::new();
    out.push_str(&strategy.system_prompt);
    out.push_str("\n\n## Examples\n\n");
    out.push_str(&strategy.example_block);
    out.push_str("\n\n## Additional guidance\n\n");
    out.push_str(&strategy.guidance_block);
    out.push_str("\n\n## Objects\n\n");
    for variable in query.variables() {
        let entry = ctx
            .get(variable)
            .ok_or_else(|| PromptError::MissingContext(variable.to_owned()))?;
        match strategy.kind {
            StrategyKind::Cga | StrategyKind::Euclidean => {
                let _ = writeln!(
                    out,
                    "{variable}: min = {}, max = {}",
                    triple(&entry.bbox.min),
                    triple(&entry.bbox.max)
                );
            }
            StrategyKind::Omniverse => {
                let [rx, ry, rz] = entry.euler_degrees.map(num);
                let _ = writeln!(
                    out,
                    "{variable}: dimensions = {}, origin = {}, rotation = ({rx}, {ry}, {rz})",
                    triple(&entry.dimensions()),
                    triple(&entry.center()),
                );
            }
        }
    }
    let _ = write!(
        out,
        "\n## Task\n\nQuery: {}\n\n{}\n",
        query.template,
        output_instruction(strategy.kind)
    );
    Ok(out)
}

/// Pulls the templated query back out of a prompt built by [`build_prompt`].
pub fn query_line(prompt: &str) -> Option<&str> {
    prompt
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("Query: "))
}
