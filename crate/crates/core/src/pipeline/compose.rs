use crate::error::Result;
use crate::event::{EventStream, FrameTensor};
use crate::integrator::{integrate, msti_variants, slice_stream, MstiSpec, Scale};
use crate::pipeline::config::AugConfig;
use crate::seed::derive_seed;
use crate::spatial_mask::{
    spatial_saliency, spatial_saliency_per_slice, ssem_filter_events, ssem_filter_events_per_slice,
    ssem_mask, PatchGrid,
};
use crate::temporal_mask::{build_drop_plan, temporal_saliency, tsem_filter_events};

pub const OP_SSEM: &str = "ssem";
pub const OP_TSEM: &str = "tsem";
pub const OP_MSTI: &str = "msti";
pub const OP_INTEGRATE: &str = "integrate";

/// Sub-stream index of the TSEM generator under a sample seed.
const TSEM_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeOutput {
    /// The event-level result, present when SSEM or TSEM ran.
    pub stream: Option<EventStream>,
    /// One tensor per scale: three with MSTI, otherwise just the base.
    pub frames: Vec<(Scale, FrameTensor)>,
    pub ops: Vec<&'static str>,
}

/// Runs the enabled ops in the fixed order SSEM, TSEM, then integration
/// (multi-scale when MSTI is on). Event-level masks therefore always show
/// up in the integrated frames.
pub fn compose(stream: &EventStream, config: &AugConfig, sample_seed: u64) -> Result<ComposeOutput> {
    config.validate()?;
    let mut ops = Vec::new();
    let mut current = stream.clone();

    if config.ssem.enabled {
        current = apply_ssem(&current, config).map_err(|e| e.in_op(OP_SSEM))?;
        ops.push(OP_SSEM);
    }

    if config.tsem.enabled {
        current = apply_tsem(&current, config, derive_seed(sample_seed, TSEM_STREAM))
            .map_err(|e| e.in_op(OP_TSEM))?;
        ops.push(OP_TSEM);
    }

    let frames = if config.msti.enabled {
        let spec = MstiSpec::new(config.base_t, config.msti.n, config.msti.m)
            .map_err(|e| e.in_op(OP_MSTI))?;
        let v = msti_variants(&current, spec).map_err(|e| e.in_op(OP_MSTI))?;
        ops.push(OP_MSTI);
        vec![
            (Scale::ShortTerm, v.short_term),
            (Scale::Base, v.base),
            (Scale::LongTerm, v.long_term),
        ]
    } else {
        let frames = slice_stream(&current, config.base_t)
            .and_then(|plan| integrate(&current, &plan))
            .map_err(|e| e.in_op(OP_INTEGRATE))?;
        ops.push(OP_INTEGRATE);
        vec![(Scale::Base, frames)]
    };

    let event_level = config.ssem.enabled || config.tsem.enabled;
    Ok(ComposeOutput {
        stream: event_level.then_some(current),
        frames,
        ops,
    })
}

fn apply_ssem(stream: &EventStream, config: &AugConfig) -> Result<EventStream> {
    let grid = PatchGrid::for_stream(stream, config.ssem.patch_size)?;
    if config.ssem.per_frame {
        let plan = slice_stream(stream, config.base_t)?;
        let masks = spatial_saliency_per_slice(stream, &plan, &grid)?
            .iter()
            .map(|r| ssem_mask(&grid, r, config.ssem.r))
            .collect::<Result<Vec<_>>>()?;
        ssem_filter_events_per_slice(stream, &plan, &masks)
    } else {
        let ranking = spatial_saliency(stream, &grid)?;
        let mask = ssem_mask(&grid, &ranking, config.ssem.r)?;
        ssem_filter_events(stream, &mask)
    }
}

fn apply_tsem(stream: &EventStream, config: &AugConfig, seed: u64) -> Result<EventStream> {
    let plan = slice_stream(stream, config.base_t)?;
    let ranking = temporal_saliency(stream, &plan)?;
    let drop_plan = build_drop_plan(&ranking, config.tsem.p, config.tsem.drop_scope())?;
    tsem_filter_events(stream, &plan, &drop_plan, seed)
}
