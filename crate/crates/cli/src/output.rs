//! Output sinks, metadata sidecars and sign-vector parsing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use marginrcn::hardness::binomial::parse_rational;
use marginrcn::hardness::HypercubePoint;
use marginrcn::{SimulatorConfig, UnitVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::META_SCHEMA;

/// Writes `content` to `path`, or to `out` when `path` is `None` or `-`.
pub fn emit(path: Option<&Path>, content: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, content).map_err(|e| CliError::failure(format!("{}: {e}", p.display()))),
        _ => {
            out.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn meta_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Sidecar written next to every simulated dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema: String,
    pub config: SimulatorConfig,
    pub w_star: Vec<f64>,
    /// `"rejection"` or `"conditional"`.
    pub sampler: String,
}

impl DatasetMeta {
    pub fn new(config: SimulatorConfig, w_star: &UnitVector, rejection: bool) -> Self {
        DatasetMeta {
            schema: META_SCHEMA.to_string(),
            config,
            w_star: w_star.as_slice().to_vec(),
            sampler: if rejection { "rejection" } else { "conditional" }.to_string(),
        }
    }

    /// `Ok(None)` when no sidecar exists.
    pub fn read_for(data: &Path) -> CliResult<Option<Self>> {
        let p = meta_path(data);
        if !p.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p).map_err(|e| CliError::failure(format!("{}: {e}", p.display())))?;
        let meta: DatasetMeta =
            serde_json::from_str(&text).map_err(|e| CliError::format(format!("{}: {e}", p.display())))?;
        if meta.schema != META_SCHEMA {
            return Err(CliError::format(format!("{}: unsupported schema `{}`", p.display(), meta.schema)));
        }
        Ok(Some(meta))
    }
}

/// `+-+-` (also `+1 -1`, `1,-1` separated by commas or spaces).
pub fn parse_point(s: &str) -> CliResult<HypercubePoint> {
    let s = s.trim();
    let coords: Option<Vec<i8>> = if s.chars().all(|c| c == '+' || c == '-') {
        Some(s.chars().map(|c| if c == '+' { 1 } else { -1 }).collect())
    } else {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "1" | "+1" | "+" => Some(1),
                "-1" | "-" => Some(-1),
                _ => None,
            })
            .collect()
    };
    let coords = coords.ok_or_else(|| CliError::usage(format!("invalid sign vector `{s}`")))?;
    HypercubePoint::new(coords).map_err(Into::into)
}

pub fn format_point(p: &HypercubePoint) -> String {
    p.coords().iter().map(|&c| if c > 0 { '+' } else { '-' }).collect()
}

pub fn parse_eta(s: &str) -> CliResult<BigRational> {
    parse_rational(s).ok_or_else(|| CliError::usage(format!("invalid value for --eta: `{s}` is not a rational")))
}
