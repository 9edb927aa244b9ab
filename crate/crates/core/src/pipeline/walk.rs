//! Applies an augmentation config to every stream file under a directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::format::{write_binary_stream, write_frame_tensor, StreamFormat};
use crate::pipeline::compose::compose;
use crate::pipeline::config::AugConfig;
use crate::seed::path_seed;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Default)]
pub struct WalkOptions {
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    /// Replaces `config.seed` and is recorded as such in the manifest.
    pub seed_override: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Input path relative to the dataset root, `/`-separated.
    pub input: String,
    /// Output paths relative to the output root.
    pub outputs: Vec<String>,
    pub sub_seed: u64,
    pub ops: Vec<String>,
    pub events_before: Option<usize>,
    pub events_after: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: AugConfig,
    pub seed_override: Option<u64>,
    /// Sorted by input path.
    pub records: Vec<SampleRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ManifestLine {
    Run {
        config: AugConfig,
        seed_override: Option<u64>,
        processed: usize,
        errored: usize,
    },
    Sample(SampleRecord),
}

impl RunManifest {
    pub fn processed(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_none()).count()
    }

    pub fn errored(&self) -> usize {
        self.records.len() - self.processed()
    }

    /// One JSON object per line: a run header, then one line per sample.
    pub fn to_jsonl(&self) -> String {
        let header = ManifestLine::Run {
            config: self.config.clone(),
            seed_override: self.seed_override,
            processed: self.processed(),
            errored: self.errored(),
        };
        let mut out = serde_json::to_string(&header).expect("manifest serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(&ManifestLine::Sample(r.clone())).expect("manifest serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parsed: ManifestLine = serde_json::from_str(line)
                .map_err(|e| Error::Config(format!("manifest line {}: {e}", i + 1)))?;
            match parsed {
                ManifestLine::Run {
                    config,
                    seed_override,
                    ..
                } => header = Some((config, seed_override)),
                ManifestLine::Sample(r) => records.push(r),
            }
        }
        let (config, seed_override) =
            header.ok_or_else(|| Error::Config("manifest has no run header".into()))?;
        Ok(RunManifest {
            config,
            seed_override,
            records,
        })
    }
}

struct Job {
    path: PathBuf,
    relative: String,
    format: StreamFormat,
    /// Relative output paths: augmented stream (if any) first, then frames.
    stream_out: String,
    frame_outs: Vec<String>,
}

fn relative_string(path: &Path) -> String {
    path.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn output_names(relative: &Path, config: &AugConfig) -> (String, Vec<String>) {
    let stem = relative.with_extension("");
    let stem = relative_string(&stem);
    let scales: &[&str] = if config.msti.enabled {
        &["short", "base", "long"]
    } else {
        &["base"]
    };
    (
        format!("{stem}.aug.evst"),
        scales.iter().map(|s| format!("{stem}.{s}.evfr")).collect(),
    )
}

fn discover(input_dir: &Path, output_dir: &Path, config: &AugConfig) -> Result<Vec<Job>> {
    let skip = fs::canonicalize(output_dir).ok();
    let mut jobs = Vec::new();
    let walker = WalkDir::new(input_dir)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| match (&skip, fs::canonicalize(e.path())) {
            (Some(out), Ok(p)) => !p.starts_with(out),
            _ => true,
        });
    for entry in walker {
        let entry = entry.map_err(|e| Error::Io(e.into()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(format) = StreamFormat::from_path(entry.path()) else {
            continue;
        };
        let rel = entry
            .path()
            .strip_prefix(input_dir)
            .expect("walkdir yields paths under its root");
        let (stream_out, frame_outs) = output_names(rel, config);
        jobs.push(Job {
            path: entry.path().to_path_buf(),
            relative: relative_string(rel),
            format,
            stream_out,
            frame_outs,
        });
    }

    let mut owners: BTreeMap<&str, &str> = BTreeMap::new();
    for job in &jobs {
        for out in std::iter::once(&job.stream_out).chain(&job.frame_outs) {
            if owners.insert(out, &job.relative).is_some() {
                return Err(Error::OutputCollision(output_dir.join(out)));
            }
        }
    }
    Ok(jobs)
}

/// Processes every `.evt`/`.txt`/`.evst` file below `input_dir`, mirroring
/// the tree into `output_dir` and writing `manifest.jsonl` there.
///
/// Each sample's seed is derived from the master seed and its relative
/// path, so output bytes do not depend on worker count or walk order.
/// Unreadable or invalid samples become error records; output collisions
/// and write failures abort the run.
pub fn walk_dataset(
    input_dir: &Path,
    output_dir: &Path,
    config: &AugConfig,
    options: &WalkOptions,
) -> Result<RunManifest> {
    let mut config = config.clone();
    if let Some(seed) = options.seed_override {
        config.seed = seed;
    }
    config.validate_for_augment()?;
    if !input_dir.is_dir() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("input directory {} not found", input_dir.display()),
        )));
    }
    fs::create_dir_all(output_dir)?;
    let jobs = discover(input_dir, output_dir, &config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|job| process(job, output_dir, &config))
            .collect::<Result<Vec<_>>>()
    })?;

    let manifest = RunManifest {
        config,
        seed_override: options.seed_override,
        records,
    };
    let mut file = fs::File::create(output_dir.join(MANIFEST_FILE))?;
    file.write_all(manifest.to_jsonl().as_bytes())?;
    Ok(manifest)
}

fn process(job: &Job, output_dir: &Path, config: &AugConfig) -> Result<SampleRecord> {
    let sub_seed = path_seed(config.seed, &job.relative);
    let mut record = SampleRecord {
        input: job.relative.clone(),
        outputs: Vec::new(),
        sub_seed,
        ops: Vec::new(),
        events_before: None,
        events_after: None,
        error: None,
    };

    let stream = match fs::read(&job.path)
        .map_err(Error::from)
        .and_then(|bytes| job.format.decode(&bytes, config.polarity_encoding))
    {
        Ok(s) => s,
        Err(e) => {
            record.error = Some(e.to_string());
            return Ok(record);
        }
    };
    record.events_before = Some(stream.len());

    let out = match compose(&stream, config, sub_seed) {
        Ok(out) => out,
        Err(e) => {
            record.error = Some(e.to_string());
            return Ok(record);
        }
    };
    record.ops = out.ops.iter().map(|s| s.to_string()).collect();
    record.events_after = Some(out.stream.as_ref().map_or(stream.len(), |s| s.len()));

    let mut write = |rel: &str, bytes: Vec<u8>| -> Result<()> {
        let path = output_dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        record.outputs.push(rel.to_string());
        Ok(())
    };
    if let Some(s) = &out.stream {
        write(&job.stream_out, write_binary_stream(s))?;
    }
    for ((_, frames), rel) in out.frames.iter().zip(&job.frame_outs) {
        write(rel, write_frame_tensor(frames))?;
    }
    Ok(record)
}
