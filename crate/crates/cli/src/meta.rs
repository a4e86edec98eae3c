use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use crate::csv::format_float;
use crate::CliError;

/// Ordered `key=value` record written next to each output file.
#[derive(Debug, Default, Clone)]
pub struct Meta {
    entries: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        let mut meta = Self::default();
        meta.text("tool", concat!("relacc ", env!("CARGO_PKG_VERSION")));
        meta.text("command", command);
        meta
    }

    pub fn text(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, format_float(value))
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.txt");
    PathBuf::from(name)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `contents` to `out` and `meta` (plus the output path) to its sidecar.
pub fn write_with_sidecar(out: &Path, contents: &str, meta: &Meta) -> Result<(), CliError> {
    write_file(out, contents)?;
    let mut meta = meta.clone();
    meta.text("out", out.display());
    write_file(&sidecar_path(out), &meta.render())
}
