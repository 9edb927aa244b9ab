use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "eventaug", version, about = "Event-stream augmentation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    /// polarity written as -1 / 1
    NegOneOne,
    /// polarity written as 0 / 1
    ZeroOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SaliencyMode {
    Spatial,
    Temporal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment every stream file under a directory and write a manifest.
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// key = value config file
        #[arg(long)]
        config: PathBuf,
        /// Overrides `seed` from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Integrate a stream into a frame tensor file.
    Integrate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        slices: u32,
        /// Zero the most salient patches of the integrated frames.
        #[arg(long)]
        mask_rate: Option<f64>,
        #[arg(long, default_value_t = eventaug::DEFAULT_PATCH_SIZE)]
        patch_size: u16,
        #[arg(long, value_enum)]
        from: Option<Format>,
        #[arg(long, value_enum, default_value = "neg-one-one")]
        polarity_encoding: Encoding,
    },
    /// Print per-patch or per-slice event densities and their ranks.
    Saliency {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: SaliencyMode,
        #[arg(long, default_value_t = eventaug::DEFAULT_PATCH_SIZE)]
        patch_size: u16,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        slices: u32,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        from: Option<Format>,
        #[arg(long, value_enum, default_value = "neg-one-one")]
        polarity_encoding: Encoding,
    },
    /// Convert between text and binary stream formats (`-` for stdio).
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Input format; inferred from extension or content when omitted.
        #[arg(long, value_enum)]
        from: Option<Format>,
        /// Output format; inferred from extension when omitted.
        #[arg(long, value_enum)]
        to: Option<Format>,
        #[arg(long, value_enum, default_value = "neg-one-one")]
        polarity_encoding: Encoding,
    },
    /// Time each op and print one JSON record per op.
    Bench {
        /// Stream to benchmark; a synthetic stream is generated when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated op names, or `all`.
        #[arg(long, default_value = "all")]
        ops: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        repeat: u32,
        /// Size of the synthetic stream.
        #[arg(long, default_value_t = 1_000_000)]
        events: usize,
        #[arg(long, default_value_t = 10)]
        slices: usize,
    },
}

impl From<Encoding> for eventaug::PolarityEncoding {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::NegOneOne => eventaug::PolarityEncoding::NegOneOne,
            Encoding::ZeroOne => eventaug::PolarityEncoding::ZeroOne,
        }
    }
}

impl From<Format> for eventaug::StreamFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => eventaug::StreamFormat::Text,
            Format::Binary => eventaug::StreamFormat::Binary,
        }
    }
}
