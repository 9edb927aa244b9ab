use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use eventaug::pipeline::WalkOptions;
use eventaug::{
    apply_frame_mask, integrate, slice_stream, spatial_saliency, ssem_mask, temporal_saliency,
    walk_dataset, write_frame_tensor, AugConfig, EventStream, PatchGrid, PolarityEncoding,
    StreamFormat,
};

use crate::cli::{Format, SaliencyMode};

/// Exit 1 for usage and config problems, 2 for bad data.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<eventaug::Error> for CliError {
    fn from(e: eventaug::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if is_stdio(path) {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8]) -> CliResult {
    if is_stdio(path) {
        std::io::stdout().write_all(bytes)?;
        return Ok(());
    }
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Explicit format, then extension, then content sniffing.
fn input_format(path: &Path, explicit: Option<Format>, bytes: &[u8]) -> StreamFormat {
    explicit
        .map(Into::into)
        .or_else(|| StreamFormat::from_path(path))
        .unwrap_or(if bytes.starts_with(&eventaug::format::STREAM_MAGIC) {
            StreamFormat::Binary
        } else {
            StreamFormat::Text
        })
}

pub fn load_stream(
    path: &Path,
    from: Option<Format>,
    encoding: PolarityEncoding,
) -> CliResult<EventStream> {
    let bytes = read_input(path)?;
    let format = input_format(path, from, &bytes);
    format
        .decode(&bytes, encoding)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn augment(
    input: &Path,
    output: &Path,
    config_path: &Path,
    seed: Option<u64>,
    workers: usize,
) -> CliResult {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", config_path.display())))?;
    let config = AugConfig::parse(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut effective = config.clone();
    if let Some(s) = seed {
        effective.seed = s;
    }
    effective
        .validate_for_augment()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let options = WalkOptions {
        workers,
        seed_override: seed,
    };
    let manifest = walk_dataset(input, output, &config, &options)?;
    eprintln!(
        "processed {} file(s), {} error(s); manifest at {}",
        manifest.processed(),
        manifest.errored(),
        output.join(eventaug::pipeline::MANIFEST_FILE).display()
    );
    for r in manifest.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("  {}: {}", r.input, r.error.as_deref().unwrap_or_default());
    }
    Ok(())
}

pub struct IntegrateArgs<'a> {
    pub input: &'a Path,
    pub output: &'a Path,
    pub slices: usize,
    pub mask_rate: Option<f64>,
    pub patch_size: u16,
    pub from: Option<Format>,
    pub encoding: PolarityEncoding,
}

pub fn integrate_cmd(args: IntegrateArgs<'_>) -> CliResult {
    if let Some(r) = args.mask_rate {
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Usage(format!("--mask-rate {r} outside [0, 1]")));
        }
    }
    if args.patch_size == 0 {
        return Err(CliError::Usage("--patch-size must be at least 1".into()));
    }
    let stream = load_stream(args.input, args.from, args.encoding)?;
    let plan = slice_stream(&stream, args.slices)?;
    let mut frames = integrate(&stream, &plan)?;
    if let Some(rate) = args.mask_rate {
        let grid = PatchGrid::for_stream(&stream, args.patch_size)?;
        let ranking = spatial_saliency(&stream, &grid)?;
        let mask = ssem_mask(&grid, &ranking, rate)?;
        frames = apply_frame_mask(&frames, &mask)?;
    }
    write_output(args.output, &write_frame_tensor(&frames))
}

pub fn saliency_report(
    stream: &EventStream,
    mode: SaliencyMode,
    patch_size: u16,
    slices: usize,
) -> CliResult<String> {
    let mut out = String::new();
    match mode {
        SaliencyMode::Spatial => {
            if patch_size == 0 {
                return Err(CliError::Usage("--patch-size must be at least 1".into()));
            }
            let grid = PatchGrid::for_stream(stream, patch_size)?;
            let ranking = spatial_saliency(stream, &grid)?;
            for (i, (&d, rank)) in ranking.densities().iter().zip(ranking.ranks()).enumerate() {
                let (row, col) = grid.position(i);
                let _ = writeln!(out, "{i} {row} {col} {d} {rank}");
            }
        }
        SaliencyMode::Temporal => {
            let plan = slice_stream(stream, slices)?;
            let ranking = temporal_saliency(stream, &plan)?;
            let rows = plan.boundaries().iter().zip(ranking.densities()).zip(ranking.ranks());
            for (i, ((&(start, end), &d), rank)) in rows.enumerate() {
                let _ = writeln!(out, "{i} {start} {end} {d} {rank}");
            }
        }
    }
    Ok(out)
}

pub fn convert(
    input: &Path,
    output: &Path,
    from: Option<Format>,
    to: Option<Format>,
    encoding: PolarityEncoding,
) -> CliResult {
    let target: StreamFormat = match to.map(Into::into).or_else(|| StreamFormat::from_path(output)) {
        Some(f) => f,
        None => {
            return Err(CliError::Usage(format!(
                "cannot infer output format for {}; pass --to",
                output.display()
            )))
        }
    };
    let stream = load_stream(input, from, encoding)?;
    write_output(output, &target.encode(&stream))
}
