//! Input hashes and parameter values attached to every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const TOOL: &str = "bobsled";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A file read into memory together with its hash.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn read_input(path: impl AsRef<Path>) -> Result<Input> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let sha256 = sha256_hex(&bytes);
    let text =
        String::from_utf8(bytes).map_err(|e| Error::parse(path, 0, format!("not UTF-8: {e}")))?;
    Ok(Input {
        path: path.to_path_buf(),
        text,
        sha256,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub parameters: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, input: &Input) {
        self.inputs.push(InputRecord {
            path: input.path.display().to_string(),
            sha256: input.sha256.clone(),
        });
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// `# ` prefixed lines for CSV and TOML outputs.
    pub fn comment_lines(&self) -> String {
        let mut out = format!(
            "# tool: {} {}\n# command: {}\n",
            self.tool, self.version, self.command
        );
        for i in &self.inputs {
            out += &format!("# input: {} sha256={}\n", i.path, i.sha256);
        }
        for (k, v) in &self.parameters {
            out += &format!("# param: {k}={v}\n");
        }
        out
    }
}
