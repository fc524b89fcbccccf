//! Writing `result.json`, `summary.csv` and the optional point exports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
pub struct RunRecord<'a, T: Serialize> {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: &'a RunConfig,
    pub result: T,
}

pub struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        Ok(Outputs { dir: dir.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))
    }

    pub fn record<T: Serialize>(&self, record: &RunRecord<'_, T>) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(record).expect("run records serialize");
        text.push('\n');
        self.write("result.json", &text)
    }
}

/// Minimal CSV writer; fields never contain separators or quotes.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

pub fn label<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x).expect("labels serialize") {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}
