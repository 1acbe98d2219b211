pub mod baseline;
pub mod candidates;
pub mod config;
pub mod error;
pub mod geometry;
pub mod pipeline;
pub mod report;
pub mod sampler;
pub mod scenario;
pub mod sequencer;
pub mod uncertainty;
pub mod visibility;

pub use error::{PlanError, Result};
