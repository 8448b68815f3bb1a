//! Grid CSV files: `# key=value` header lines, one column header line, data rows.
//!
//! Values carry 12 significant digits; `NaN` marks a masked node.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct GridCsv {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// The defined print precision: 12 significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.11e}")
    }
}

/// `v` as it reads back after printing.
pub fn at_print_precision(v: f64) -> f64 {
    format_value(v).parse().expect("printed values parse")
}

impl GridCsv {
    pub fn new(columns: Vec<String>) -> Self {
        Self { meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Values of the last column.
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| *r.last().expect("rows are nonempty")).collect()
    }

    /// Values of the column named `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}").expect("write to string");
        }
        writeln!(out, "{}", self.columns.join(",")).expect("write to string");
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            writeln!(out, "{}", cells.join(",")).expect("write to string");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                if columns.is_some() {
                    return Err(format!("line {}: header comment after the column line", n + 1));
                }
                let (k, v) = rest.split_once('=').ok_or_else(|| format!("line {}: expected `# key=value`", n + 1))?;
                meta.push((k.to_string(), v.to_string()));
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row = line
                        .split(',')
                        .map(|c| c.parse::<f64>().map_err(|_| format!("line {}: bad number `{c}`", n + 1)))
                        .collect::<Result<Vec<_>, _>>()?;
                    if row.len() != cols.len() {
                        return Err(format!("line {}: {} cells for {} columns", n + 1, row.len(), cols.len()));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or("missing column header line")?;
        Ok(Self { meta, columns, rows })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|msg| CliError::Csv { path: path.to_path_buf(), msg })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.flush().map_err(|e| CliError::io(path, e))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = std::fs::metadata(path).map(|m| m.permissions().mode()).unwrap_or(0o644);
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(mode)).map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
