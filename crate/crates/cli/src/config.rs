//! Run configuration, its content hash and the artifact envelope.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use sepgeom::{Convention, Error, Result};

/// Everything that can change an artifact's contents.
///
/// The output directory and thread count are excluded: neither affects the
/// numbers, so runs differing only in them produce identical files.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub convention: Convention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub cluster_tol: f64,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: &str, out: PathBuf, threads: Option<usize>) -> Self {
        Self {
            command: command.to_owned(),
            convention: Convention::Bures,
            basis: None,
            metric: None,
            class: None,
            chart: None,
            dim: None,
            at: None,
            scenario: None,
            resolution: None,
            tol: None,
            cluster_tol: sepgeom::metrics::CLUSTER_TOL,
            out,
            threads,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidArgument(format!("--tol must lie in (0, 1), got {t}")));
            }
        }
        if self.cluster_tol.is_nan() || self.cluster_tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "--cluster-tol must be positive, got {}",
                self.cluster_tol
            )));
        }
        if let Some(r) = self.resolution {
            if r < 3 {
                return Err(Error::InvalidArgument(format!("--resolution must be at least 3, got {r}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    convention: Convention,
    config: &'a RunConfig,
    result: &'a T,
}

pub fn write_json<T: Serialize>(config: &RunConfig, name: &str, result: &T) -> Result<PathBuf> {
    let envelope = Envelope {
        tool: "sepgeom",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.hash(),
        convention: config.convention,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(std::io::Error::other)?;
    text.push('\n');
    let path = config.path(name);
    std::fs::write(&path, text)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// CSV with `#` metadata lines ahead of the header.
pub fn write_csv(config: &RunConfig, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
    let path = config.path(name);
    let mut buf = format!(
        "# tool=sepgeom version={}\n# config_hash={}\n# convention={}\n",
        env!("CARGO_PKG_VERSION"),
        config.hash(),
        config.convention.name()
    )
    .into_bytes();
    sepgeom::export::write_csv(&mut buf, header, rows)?;
    std::fs::write(&path, buf)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}
