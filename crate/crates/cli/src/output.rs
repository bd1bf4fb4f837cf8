//! CSV tables and key-value reports.
//!
//! Every CSV file starts with a comment line naming the tool version and the
//! resolved seed, followed by optional further comment lines and the header row.
//! Reports are sectioned key-value text: the resolved configuration first, then
//! `[result...]` sections, so a report can be passed back with `--config`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{num, RunConfig};
use crate::error::{io_error, CliError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn stamp(seed: u64) -> String {
    format!("# rydyn {VERSION} seed={seed}")
}

/// A table of named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            comments: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, text: impl Into<String>) -> Self {
        self.comments.push(text.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    pub fn to_csv(&self, seed: u64) -> Result<String, CliError> {
        let mut out = stamp(seed);
        out.push('\n');
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    /// Numeric column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

/// Key-value results grouped in named sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn section(&mut self, name: &str) -> &mut Vec<(String, String)> {
        let name = if name.is_empty() {
            "result".to_string()
        } else {
            format!("result.{name}")
        };
        if let Some(i) = self.sections.iter().position(|(n, _)| *n == name) {
            return &mut self.sections[i].1;
        }
        self.sections.push((name, Vec::new()));
        &mut self.sections.last_mut().unwrap().1
    }

    pub fn put(&mut self, section: &str, key: &str, value: impl ToString) {
        self.section(section).push((key.to_string(), value.to_string()));
    }

    pub fn put_num(&mut self, section: &str, key: &str, value: f64) {
        self.put(section, key, num(value));
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let name = if section.is_empty() {
            "result".to_string()
        } else {
            format!("result.{section}")
        };
        self.sections
            .iter()
            .find(|(n, _)| *n == name)?
            .1
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, config: &RunConfig) -> String {
        let mut out = stamp(config.run.seed);
        out.push_str("\n# resolved configuration\n");
        out.push_str(&config.to_ini());
        for (name, kv) in &self.sections {
            let _ = writeln!(out, "[{name}]");
            for (k, v) in kv {
                let _ = writeln!(out, "{k} = {v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Output directory handling; every written path is recorded.
#[derive(Debug)]
pub struct Sink {
    pub directory: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(directory: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(directory).map_err(|e| io_error(directory, e))?;
        Ok(Sink {
            directory: directory.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.directory.join(name);
        fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn table(&mut self, name: &str, table: &Table, seed: u64) -> Result<PathBuf, CliError> {
        self.write(name, &table.to_csv(seed)?)
    }

    pub fn report(&mut self, name: &str, report: &Report, config: &RunConfig) -> Result<PathBuf, CliError> {
        self.write(name, &report.render(config))
    }
}
