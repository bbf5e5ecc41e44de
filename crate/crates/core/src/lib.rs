//! Natural-language 3D scene editing driven by conformal geometric algebra.
//!
//! Queries name objects in quotes; the names are replaced by variables, an
//! LLM answers with one versor per variable, and the versors are decomposed
//! into translation, rotation and scale, applied to axis-aligned boxes and
//! repaired for collisions.

pub mod bench;
pub mod cga;
pub mod collision;
pub mod expr;
pub mod llm;
pub mod pipeline;
pub mod scene;
pub mod templating;
