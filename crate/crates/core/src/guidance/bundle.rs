use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FitError, FittedValue, PolicyCounts};
use crate::env::{EnvKind, TrajectoryRecord};

pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("bundle version {found} is not supported (expected {BUNDLE_VERSION})")]
    Version { found: u32 },
}

/// Fitted guidance on disk, tagged with the dataset it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidanceBundle {
    pub version: u32,
    pub env: EnvKind,
    /// SHA-256 of the dataset manifest the components were fitted on.
    pub manifest_sha256: String,
    pub value: FittedValue,
    pub policy: PolicyCounts,
}

impl GuidanceBundle {
    pub fn fit(records: &[TrajectoryRecord], manifest_sha256: String) -> Result<Self, BundleError> {
        let value = FittedValue::fit(records)?;
        Ok(GuidanceBundle {
            version: BUNDLE_VERSION,
            env: value.env(),
            manifest_sha256,
            policy: PolicyCounts::fit(records),
            value,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), BundleError> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, BundleError> {
        let b: GuidanceBundle = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if b.version != BUNDLE_VERSION {
            return Err(BundleError::Version { found: b.version });
        }
        Ok(b)
    }
}
