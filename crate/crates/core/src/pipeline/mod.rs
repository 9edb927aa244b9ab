//! Config model, op composition and the dataset walker.

pub mod compose;
pub mod config;
pub mod walk;

pub use compose::{compose, ComposeOutput};
pub use config::{AugConfig, MstiConfig, ScopeKind, SsemConfig, TsemConfig};
pub use walk::{walk_dataset, RunManifest, SampleRecord, WalkOptions, MANIFEST_FILE};
