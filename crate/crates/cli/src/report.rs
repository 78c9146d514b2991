//! Plain-text reports and CSV tables.
//!
//! A report is a list of `key = value` lines under a `# nullmem <command>`
//! heading. The only line that varies between identical runs is the
//! timestamp, and `--no-timestamp` drops it.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, timestamp: bool) -> Self {
        let mut lines = vec![format!("# nullmem {command} {}", env!("CARGO_PKG_VERSION"))];
        if timestamp {
            lines.push(format!("# generated {}", chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)));
        }
        Report { lines }
    }

    pub fn line(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.line(key, format_args!("{value:.17e}"))
    }

    pub fn list(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let v: Vec<String> = values.iter().map(|x| format!("{x:.17e}")).collect();
        self.line(key, format_args!("[{}]", v.join(", ")))
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        self.lines.push(String::new());
        self.lines.push(format!("[{name}]"));
        self
    }

    pub fn warnings(&mut self, w: &[String]) -> &mut Self {
        for s in w {
            self.lines.push(format!("warning = {s:?}"));
        }
        self
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.text()).map_err(|e| CliError::io(path, e))
    }
}

/// CSV with a one-line header of `name [unit]` columns.
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        let head: Vec<String> = columns
            .iter()
            .map(|(n, u)| if u.is_empty() { n.to_string() } else { format!("{n} [{u}]") })
            .collect();
        Csv { text: head.join(",") + "\n", width: columns.len() }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        let v: Vec<String> = values.iter().map(|x| format!("{x:.17e}")).collect();
        self.text.push_str(&v.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text).map_err(|e| CliError::io(path, e))
    }
}
