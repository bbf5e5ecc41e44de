use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::llm::{MockRule, StrategyKind};
use crate::scene::{load_scene_file, Scene};
use crate::templating::template_query;

use super::FixtureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Simple,
    Compositional,
    Fuzzy,
    CompositionalFuzzy,
    Hard,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Simple,
        Category::Compositional,
        Category::Fuzzy,
        Category::CompositionalFuzzy,
        Category::Hard,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Simple => "Simple",
            Category::Compositional => "Compositional",
            Category::Fuzzy => "Fuzzy",
            Category::CompositionalFuzzy => "Compositional-Fuzzy",
            Category::Hard => "Hard",
        }
    }
}

fn default_tolerance() -> f64 {
    1e-3
}

/// One condition the final scene must satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum OracleCheck {
    /// Box equals `min`/`max` per axis within `tolerance`.
    Exact {
        object: String,
        min: [f64; 3],
        max: [f64; 3],
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    /// Resting on the support's top face, footprint inside the support's.
    OnTopOf { object: String, support: String },
    /// Horizontal gap to `other` of at most `max_gap`.
    NextTo { object: String, other: String, max_gap: f64 },
}

impl OracleCheck {
    pub fn object(&self) -> &str {
        match self {
            OracleCheck::Exact { object, .. }
            | OracleCheck::OnTopOf { object, .. }
            | OracleCheck::NextTo { object, .. } => object,
        }
    }

    /// Objects the check looks at besides its subject.
    pub fn references(&self) -> Option<&str> {
        match self {
            OracleCheck::Exact { .. } => None,
            OracleCheck::OnTopOf { support, .. } => Some(support),
            OracleCheck::NextTo { other, .. } => Some(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryCase {
    pub id: String,
    pub scene: String,
    pub query: String,
    pub category: Category,
    pub variation: u32,
    pub oracle: Vec<OracleCheck>,
    /// Scripted replies per strategy for the mock transport.
    #[serde(default)]
    pub mock: BTreeMap<StrategyKind, MockRule>,
}

impl QueryCase {
    /// The oracle has to speak about exactly the objects the query names.
    pub fn validate(&self, scene: &Scene) -> Result<(), FixtureError> {
        let bad = |msg: String| FixtureError::Case {
            id: self.id.clone(),
            message: msg,
        };
        let q = template_query(&self.query, scene).map_err(|e| bad(e.to_string()))?;
        let queried: BTreeSet<&str> = q.bindings.iter().map(|(_, n)| n.as_str()).collect();
        let covered: BTreeSet<&str> = self.oracle.iter().map(OracleCheck::object).collect();
        if queried != covered {
            return Err(bad(format!(
                "oracle covers {covered:?} but the query names {queried:?}"
            )));
        }
        if let Some(r) = self.oracle.iter().filter_map(OracleCheck::references).find(|r| !queried.contains(r)) {
            return Err(bad(format!("oracle refers to `{r}`, which the query does not name")));
        }
        for check in &self.oracle {
            if let OracleCheck::Exact { tolerance, .. } | OracleCheck::NextTo { max_gap: tolerance, .. } = check {
                if !(tolerance.is_finite() && *tolerance >= 0.0) {
                    return Err(bad(format!("tolerance {tolerance} is not a nonnegative number")));
                }
            }
        }
        Ok(())
    }
}

/// Scenes and cases read from a suite directory:
///
/// ```text
/// <dir>/scenes/<id>.json     one scene each
/// <dir>/cases/*.json         a case or an array of cases each
/// <dir>/expected.json        optional hand-computed metrics
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub scenes: BTreeMap<String, Scene>,
    pub cases: Vec<QueryCase>,
    pub expected: Option<serde_json::Value>,
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, FixtureError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| FixtureError::Io {
            path: dir.to_owned(),
            message: e.to_string(),
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String, FixtureError> {
    std::fs::read_to_string(path).map_err(|e| FixtureError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<QueryCase>),
    One(Box<QueryCase>),
}

impl Suite {
    pub fn load(dir: &Path) -> Result<Self, FixtureError> {
        let mut scenes = BTreeMap::new();
        for path in json_files(&dir.join("scenes"))? {
            let scene = load_scene_file(&path).map_err(|e| FixtureError::Scene {
                path: path.clone(),
                message: e.to_string(),
            })?;
            scenes.insert(scene.id.clone(), scene);
        }
        let mut cases = Vec::new();
        for path in json_files(&dir.join("cases"))? {
            let parsed: OneOrMany = serde_json::from_str(&read(&path)?).map_err(|e| FixtureError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
            match parsed {
                OneOrMany::Many(v) => cases.extend(v),
                OneOrMany::One(c) => cases.push(*c),
            }
        }
        let expected_path = dir.join("expected.json");
        let expected = if expected_path.exists() {
            Some(
                serde_json::from_str(&read(&expected_path)?).map_err(|e| FixtureError::Io {
                    path: expected_path,
                    message: e.to_string(),
                })?,
            )
        } else {
            None
        };
        let suite = Self {
            scenes,
            cases,
            expected,
        };
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        let mut ids = BTreeSet::new();
        for case in &self.cases {
            if !ids.insert(case.id.as_str()) {
                return Err(FixtureError::Case {
                    id: case.id.clone(),
                    message: "duplicate case id".into(),
                });
            }
            let scene = self.scenes.get(&case.scene).ok_or_else(|| FixtureError::Case {
                id: case.id.clone(),
                message: format!("unknown scene `{}`", case.scene),
            })?;
            case.validate(scene)?;
        }
        Ok(())
    }
}
