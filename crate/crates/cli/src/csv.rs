//! Plain CSV with `#` metadata lines.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

/// 17 significant digits, locale independent.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, line: impl Into<String>) {
        self.meta.push(line.into());
    }

    pub fn push(&mut self, row: &[f64]) {
        self.push_raw(row.iter().map(|&v| num(v)).collect());
    }

    /// A row whose cells are already formatted.
    pub fn push_raw(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "ragged CSV row");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.meta {
            let _ = writeln!(out, "# {m}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// Where a table goes: an explicit path, the directory in `RAIRY_OUT_DIR`, or stdout.
pub fn write(table: &CsvTable, out: Option<&PathBuf>, command: &str) -> io::Result<()> {
    let text = table.render();
    let path = match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(crate::OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{command}.csv"))),
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn render_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.meta("seed = 3");
        t.push(&[1.0, 2.0]);
        assert_eq!(t.render(), "# seed = 3\na,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
