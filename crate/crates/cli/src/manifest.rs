use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn digest_file(path: &Path) -> std::io::Result<InputDigest> {
    let mut reader = BufReader::with_capacity(1 << 20, File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(InputDigest { path: path.display().to_string(), bytes, sha256: hex::encode(hasher.finalize()) })
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Serialize)]
pub struct StepRecord {
    pub name: String,
    pub status: StepStatus,
    pub rows: BTreeMap<String, u64>,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub steps: Vec<StepRecord>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub error: Option<CliError>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            inputs: Vec::new(),
            steps: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
            error: None,
        }
    }
}

/// Row counts collected while a step runs.
#[derive(Default)]
pub struct Rows(pub BTreeMap<String, u64>);

impl Rows {
    pub fn set(&mut self, key: &str, value: impl TryInto<u64>) {
        self.0.insert(key.to_string(), value.try_into().unwrap_or(u64::MAX));
    }
}

pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(Instant::now())
    }

    pub fn millis(&self) -> u128 {
        self.0.elapsed().as_millis()
    }
}
