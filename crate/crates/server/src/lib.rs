//! HTTP/WebSocket service and command line over `cgaedit-core`.

mod api;
pub mod cli;
mod error;
mod hub;

pub use api::{router, AppState, ServiceConfig, VERSION_HEADER};
pub use error::ApiError;
pub use hub::StreamMessage;
