//! CSV and JSON emission. Numbers use 17 significant digits in scientific
//! notation so files are byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Appends `suffix` to the full file name: `out.csv` → `out.csv.meta.json`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    write_text(path, &text)
}

/// Comma-joined row with a trailing newline.
pub fn row(out: &mut String, fields: impl IntoIterator<Item = String>) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&f);
    }
    out.push('\n');
}

pub fn header(out: &mut String, names: &[&str]) {
    let _ = writeln!(out, "{}", names.join(","));
}
