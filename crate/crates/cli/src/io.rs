use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use fuplab::generators::{gen_cantor, CantorSpec};
use fuplab::rational::{pow, qi};
use fuplab::regular_sets::affine_map;
use fuplab::{ClaimedSet, Error, RegularSetApprox, RegularityClaim};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit 2.
    Config { field: String, reason: String },
    /// A computation could not complete; exit 1.
    Failed(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl fmt::Display) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.to_string(),
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, reason } => write!(f, "config error at `{field}`: {reason}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attributes a library error to the config field it came from.
pub fn lib(field: &str, e: Error) -> CliError {
    match e {
        Error::InvalidParameter { name, reason } => CliError::config(format!("{field}.{name}"), reason),
        Error::EmptySet
        | Error::ResolutionTooCoarse { .. }
        | Error::PreconditionViolated { .. }
        | Error::GridTooCoarse { .. }
        | Error::DegeneratePhase { .. }
        | Error::SupportTouchesDiagonal { .. }
        | Error::PointOnSlit(_)
        | Error::EmptySupport
        | Error::RegularityPrecondition(_)
        | Error::DiskOverlap { .. } => CliError::config(field, e),
        other => CliError::Failed(other.to_string()),
    }
}

pub trait Ctx<T> {
    fn at(self, field: &str) -> CliResult<T>;
}

impl<T> Ctx<T> for fuplab::Result<T> {
    fn at(self, field: &str) -> CliResult<T> {
        self.map_err(|e| lib(field, e))
    }
}

/// A set argument after loading.
pub struct LoadedSet {
    pub set: RegularSetApprox,
    pub claim: Option<RegularityClaim>,
    pub cantor: Option<CantorSpec>,
}

impl LoadedSet {
    pub fn delta(&self) -> Option<f64> {
        self.claim.as_ref().map(|c| c.delta)
    }

    pub fn c_r(&self) -> Option<f64> {
        self.claim.as_ref().map(|c| c.c_r)
    }

    /// Cantor specs dilated by `L^k` onto integer frequencies; files as given.
    pub fn at_frequency_scale(self, field: &str) -> CliResult<Self> {
        let (Some(spec), Some(claim)) = (&self.cantor, &self.claim) else {
            return Ok(self);
        };
        let c = ClaimedSet::new(self.set.clone(), claim.clone());
        let d = affine_map(&c, qi(pow(spec.base, spec.depth)), qi(0)).at(field)?;
        Ok(LoadedSet {
            set: d.set,
            claim: Some(d.claim),
            cantor: self.cantor,
        })
    }
}

/// Parses `cantor:L:digits:k` or reads a set file, either a bare set or
/// `{set, claim}`.
pub fn load_set(field: &str, arg: &str) -> CliResult<LoadedSet> {
    if let Some(rest) = arg.strip_prefix("cantor:") {
        let (spec, depth) = rest
            .rsplit_once(':')
            .ok_or_else(|| CliError::config(field, format!("expected cantor:L:digits:k, got `{arg}`")))?;
        let depth: u32 = depth
            .parse()
            .map_err(|_| CliError::config(format!("{field}.depth"), format!("`{depth}` is not an integer")))?;
        let spec = CantorSpec::parse(spec, depth).at(field)?;
        let c = gen_cantor(&spec).at(field)?;
        return Ok(LoadedSet {
            set: c.set,
            claim: Some(c.claim),
            cantor: Some(spec),
        });
    }
    let v: Value = read_json(field, Path::new(arg))?;
    if v.get("set").is_some() {
        let c: ClaimedSet = serde_json::from_value(v).map_err(|e| CliError::config(field, e))?;
        Ok(LoadedSet {
            set: c.set,
            claim: Some(c.claim),
            cantor: None,
        })
    } else {
        let set: RegularSetApprox = serde_json::from_value(v).map_err(|e| CliError::config(field, e))?;
        Ok(LoadedSet {
            set,
            claim: None,
            cantor: None,
        })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(field: &str, path: &Path) -> CliResult<T> {
    let s = fs::read_to_string(path).map_err(|e| CliError::config(field, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| CliError::config(field, format!("{}: {e}", path.display())))
}

/// Parses `a,b` into two reals.
pub fn pair(field: &str, s: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some(&[a, b]) => Ok((a, b)),
        _ => Err(CliError::config(field, format!("expected `a,b`, got `{s}`"))),
    }
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => {
            fs::create_dir_all(p).map_err(|e| CliError::config("out", format!("{}: {e}", p.display())))
        }
        _ => Ok(()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    ensure_parent(path)?;
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::config("out", format!("{}: {e}", path.display())))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::config("out", format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::config("out", format!("{}: {e}", path.display())))
}

/// `dir/stem.ext` beside `path`.
pub fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.join("manifest.json"),
        _ => PathBuf::from("manifest.json"),
    }
}
