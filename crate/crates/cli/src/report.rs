//! CSV report model: a header, typed rows, and trailing comment lines.
//!
//! Rendering is the only place numbers become text, so every experiment
//! inherits the same guarantees: 12 significant digits, no NaN or infinity
//! ever written, comments last and `# `-prefixed.

use crate::error::CliError;
use std::io::Write;
use std::path::Path;

/// One CSV cell.
#[derive(Clone, Debug)]
pub enum Field {
    /// Free-form label; must not contain commas or newlines.
    Text(String),
    /// Finite float, rendered with 12 significant digits.
    Num(f64),
    /// Exact integer (path ids, level numbers, pass flags).
    Count(u128),
}

impl Field {
    pub fn text(s: impl Into<String>) -> Self {
        Field::Text(s.into())
    }

    pub fn pass(ok: bool) -> Self {
        Field::Count(u128::from(ok))
    }
}

/// Render a float with 12 significant digits. Scientific notation keeps the
/// digit count uniform across magnitudes.
pub fn format_num(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Clone, Debug)]
pub struct Report {
    header: String,
    rows: Vec<Vec<Field>>,
    comments: Vec<String>,
}

impl Report {
    pub fn new(header: impl Into<String>) -> Self {
        Report { header: header.into(), rows: Vec::new(), comments: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<Field>) {
        self.rows.push(row);
    }

    /// Queue a summary line; emitted after every data row as `# <text>`.
    pub fn push_comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    pub fn rows(&self) -> &[Vec<Field>] {
        &self.rows
    }

    /// The full CSV body. Fails with a numerical error if any cell is
    /// non-finite or any label would break the row structure.
    pub fn render(&self) -> Result<String, CliError> {
        let columns = self.header.split(',').count();
        let mut out = String::new();
        out.push_str(&self.header);
        out.push('\n');
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != columns {
                return Err(CliError::Numerical(format!(
                    "row {r} has {} fields, header promises {columns}",
                    row.len()
                )));
            }
            let mut first = true;
            for field in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match field {
                    Field::Text(s) => {
                        if s.contains(',') || s.contains('\n') {
                            return Err(CliError::Numerical(format!(
                                "label `{s}` would break the CSV row structure"
                            )));
                        }
                        out.push_str(s);
                    }
                    Field::Num(x) => {
                        if !x.is_finite() {
                            return Err(CliError::Numerical(format!(
                                "non-finite value {x} in row {r}; refusing to write it"
                            )));
                        }
                        out.push_str(&format_num(*x));
                    }
                    Field::Count(n) => out.push_str(&n.to_string()),
                }
            }
            out.push('\n');
        }
        for comment in &self.comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        Ok(out)
    }

    /// Write the rendered body to the file at `out`, or to stdout when no
    /// destination is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let body = self.render()?;
        match out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(body.as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
            }
        }
    }
}
