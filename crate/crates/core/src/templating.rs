//! Replaces quoted object names with the variables `X1..Xn`.
//!
//! Names are enclosed in matching single or double quotes and matched
//! case-sensitively against the scene. Repeated names reuse their variable.

use serde::{Deserialize, Serialize};

use crate::scene::{Scene, SceneObject};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplatedQuery {
    pub original: String,
    pub template: String,
    /// `(variable, object name)` in first-occurrence order.
    pub bindings: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("query is empty")]
    Empty,
    #[error("unbalanced quotes in query")]
    UnbalancedQuotes,
    #[error("quote opened at byte {offset} is closed by a different quote character")]
    MismatchedQuotes { offset: usize },
    #[error("no object named `{0}` in the scene")]
    UnknownObject(String),
    #[error("variable `{0}` is not bound by the query")]
    UnknownVariable(String),
}

const QUOTES: [char; 2] = ['\'', '"'];

impl TemplatedQuery {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(v, _)| v.as_str())
    }

    pub fn object_name(&self, variable: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(v, _)| v == variable)
            .map(|(_, n)| n.as_str())
    }

    pub fn variable_for(&self, name: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(_, n)| n == name)
            .map(|(v, _)| v.as_str())
    }
}

pub fn template_query(raw: &str, scene: &Scene) -> Result<TemplatedQuery, TemplateError> {
    if raw.trim().is_empty() {
        return Err(TemplateError::Empty);
    }
    if raw.chars().filter(|c| QUOTES.contains(c)).count() % 2 == 1 {
        return Err(TemplateError::UnbalancedQuotes);
    }

    let mut template = String::with_capacity(raw.len());
    let mut bindings: Vec<(String, String)> = Vec::new();
    let mut rest = raw;
    let mut consumed = 0;
    while let Some(open) = rest.find(QUOTES) {
        let quote = rest[open..].chars().next().expect("found quote");
        let after = &rest[open + 1..];
        let close = after.find(QUOTES).ok_or(TemplateError::UnbalancedQuotes)?;
        if !after[close..].starts_with(quote) {
            return Err(TemplateError::MismatchedQuotes {
                offset: consumed + open,
            });
        }
        let name = &after[..close];
        if scene.object(name).is_none() {
            return Err(TemplateError::UnknownObject(name.to_owned()));
        }
        let variable = match bindings.iter().find(|(_, n)| n == name) {
            Some((v, _)) => v.clone(),
            None => {
                let v = format!("X{}", bindings.len() + 1);
                bindings.push((v.clone(), name.to_owned()));
                v
            }
        };
        template.push_str(&rest[..open]);
        template.push_str(&variable);
        let advance = open + 1 + close + 1;
        consumed += advance;
        rest = &rest[advance..];
    }
    template.push_str(rest);

    Ok(TemplatedQuery {
        original: raw.to_owned(),
        template,
        bindings,
    })
}

/// Resolves the variables of a response against the query bindings and the
/// live scene.
pub fn detemplate<'s, 'v>(
    query: &TemplatedQuery,
    variables: impl IntoIterator<Item = &'v str>,
    scene: &'s Scene,
) -> Result<Vec<(String, &'s SceneObject)>, TemplateError> {
    variables
        .into_iter()
        .map(|var| {
            let name = query
                .object_name(var)
                .ok_or_else(|| TemplateError::UnknownVariable(var.to_owned()))?;
            let obj = scene
                .object(name)
                .ok_or_else(|| TemplateError::UnknownObject(name.to_owned()))?;
            Ok((var.to_owned(), obj))
        })
        .collect()
}
