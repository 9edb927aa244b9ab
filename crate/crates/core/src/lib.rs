//! Event-camera augmentation: count-based frame integration with
//! multi-scale variants, and saliency-guided spatial and temporal event
//! masking over sparse event streams.

pub mod error;
pub mod event;
pub mod format;
pub mod integrator;
pub mod pipeline;
pub mod saliency;
pub mod seed;
pub mod spatial_mask;
pub mod synth;
pub mod temporal_mask;

pub use error::{Error, Result};
pub use event::{Event, EventStream, FrameTensor, Polarity, PolarityEncoding, CHANNELS};
pub use format::{
    parse_binary_stream, parse_text_stream, read_frame_tensor, write_binary_stream,
    write_frame_tensor, write_text_stream, StreamFormat,
};
pub use integrator::{integrate, msti_variants, slice_stream, MstiSpec, MstiVariants, Scale, SlicePlan};
pub use pipeline::{compose, walk_dataset, AugConfig, ComposeOutput, RunManifest, WalkOptions};
pub use saliency::SaliencyRanking;
pub use spatial_mask::{
    apply_frame_mask, apply_frame_masks_per_slice, spatial_saliency, spatial_saliency_per_slice,
    ssem_filter_events, ssem_filter_events_per_slice, ssem_mask, PatchGrid, SpatialMask,
    DEFAULT_PATCH_SIZE,
};
pub use temporal_mask::{
    build_drop_plan, temporal_saliency, tsem_filter_events, DropScope, TemporalDropPlan,
};
