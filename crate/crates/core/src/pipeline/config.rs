use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::PolarityEncoding;
use crate::integrator::MstiSpec;
use crate::spatial_mask::DEFAULT_PATCH_SIZE;
use crate::temporal_mask::DropScope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstiConfig {
    pub enabled: bool,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsemConfig {
    pub enabled: bool,
    pub r: f64,
    pub patch_size: u16,
    pub per_frame: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScopeKind {
    All,
    TopFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsemConfig {
    pub enabled: bool,
    pub p: f64,
    pub scope: ScopeKind,
    pub q: f64,
}

impl TsemConfig {
    pub fn drop_scope(&self) -> DropScope {
        match self.scope {
            ScopeKind::All => DropScope::AllSlices,
            ScopeKind::TopFraction => DropScope::TopFraction(self.q),
        }
    }
}

/// Every augmentation hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugConfig {
    pub base_t: usize,
    pub msti: MstiConfig,
    pub ssem: SsemConfig,
    pub tsem: TsemConfig,
    pub seed: u64,
    pub polarity_encoding: PolarityEncoding,
}

impl Default for AugConfig {
    fn default() -> Self {
        AugConfig {
            base_t: 10,
            msti: MstiConfig {
                enabled: false,
                n: MstiSpec::DEFAULT_FACTOR,
                m: MstiSpec::DEFAULT_FACTOR,
            },
            ssem: SsemConfig {
                enabled: false,
                r: 0.25,
                patch_size: DEFAULT_PATCH_SIZE,
                per_frame: false,
            },
            tsem: TsemConfig {
                enabled: false,
                p: 0.1,
                scope: ScopeKind::All,
                q: 0.5,
            },
            seed: 0,
            polarity_encoding: PolarityEncoding::NegOneOne,
        }
    }
}

impl AugConfig {
    /// Parses `key = value` lines on top of the defaults. `#` starts a
    /// comment; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = AugConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    /// Sets one field by its dotted key.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("invalid value `{v}` for `{key}`"))
        }
        match key {
            "base_t" => self.base_t = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "polarity_encoding" => {
                self.polarity_encoding = value.parse().map_err(|e: Error| e.to_string())?
            }
            "msti.enabled" => self.msti.enabled = num(key, value)?,
            "msti.n" => self.msti.n = num(key, value)?,
            "msti.m" => self.msti.m = num(key, value)?,
            "ssem.enabled" => self.ssem.enabled = num(key, value)?,
            "ssem.r" => self.ssem.r = num(key, value)?,
            "ssem.patch_size" => self.ssem.patch_size = num(key, value)?,
            "ssem.per_frame" => self.ssem.per_frame = num(key, value)?,
            "tsem.enabled" => self.tsem.enabled = num(key, value)?,
            "tsem.p" => self.tsem.p = num(key, value)?,
            "tsem.q" => self.tsem.q = num(key, value)?,
            "tsem.scope" => {
                self.tsem.scope = match value {
                    "all" | "all-slices" => ScopeKind::All,
                    "top-fraction" => ScopeKind::TopFraction,
                    other => return Err(format!("unknown tsem.scope `{other}`")),
                }
            }
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.base_t == 0 {
            return bad("base_t must be at least 1".into());
        }
        if self.msti.n == 0 || self.msti.m == 0 {
            return bad("msti.n and msti.m must be at least 1".into());
        }
        if self.msti.enabled && self.base_t < self.msti.m {
            return bad(format!("base_t = {} must be >= msti.m = {}", self.base_t, self.msti.m));
        }
        if !(0.0..=1.0).contains(&self.ssem.r) {
            return bad(format!("ssem.r = {} outside [0, 1]", self.ssem.r));
        }
        if self.ssem.patch_size == 0 {
            return bad("ssem.patch_size must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.tsem.p) {
            return bad(format!("tsem.p = {} outside [0, 1]", self.tsem.p));
        }
        if self.tsem.scope == ScopeKind::TopFraction && !(self.tsem.q > 0.0 && self.tsem.q <= 1.0) {
            return bad(format!("tsem.q = {} outside (0, 1]", self.tsem.q));
        }
        Ok(())
    }

    /// Validation for an `augment` run, which needs at least one op.
    pub fn validate_for_augment(&self) -> Result<()> {
        self.validate()?;
        if !(self.msti.enabled || self.ssem.enabled || self.tsem.enabled) {
            return Err(Error::Config("no augmentation enabled".into()));
        }
        Ok(())
    }

    /// Writes the config back in the key-value format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let scope = match self.tsem.scope {
            ScopeKind::All => "all",
            ScopeKind::TopFraction => "top-fraction",
        };
        let encoding = match self.polarity_encoding {
            PolarityEncoding::NegOneOne => "neg-one-one",
            PolarityEncoding::ZeroOne => "zero-one",
        };
        let _ = writeln!(out, "base_t = {}", self.base_t);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "polarity_encoding = {encoding}");
        let _ = writeln!(out, "msti.enabled = {}", self.msti.enabled);
        let _ = writeln!(out, "msti.n = {}", self.msti.n);
        let _ = writeln!(out, "msti.m = {}", self.msti.m);
        let _ = writeln!(out, "ssem.enabled = {}", self.ssem.enabled);
        let _ = writeln!(out, "ssem.r = {}", self.ssem.r);
        let _ = writeln!(out, "ssem.patch_size = {}", self.ssem.patch_size);
        let _ = writeln!(out, "ssem.per_frame = {}", self.ssem.per_frame);
        let _ = writeln!(out, "tsem.enabled = {}", self.tsem.enabled);
        let _ = writeln!(out, "tsem.p = {}", self.tsem.p);
        let _ = writeln!(out, "tsem.scope = {scope}");
        let _ = writeln!(out, "tsem.q = {}", self.tsem.q);
        out
    }
}
