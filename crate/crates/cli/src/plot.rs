//! Whitespace-delimited column files for external plotting.

use crate::CliError;

/// One plot file: a `#` header naming the columns with units and the
/// generating config hash, then one row per point.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub title: String,
    /// (name, unit) per column.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotData {
    pub fn new(title: impl Into<String>, columns: &[(&str, &str)]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Renders a plot file. Empty data is an error and produces nothing.
pub fn emit_plot_data(data: &PlotData, config_hash: &str) -> Result<String, CliError> {
    if data.rows.is_empty() {
        return Err(CliError::EmptyResult(data.title.clone()));
    }
    let mut out = format!("# {}\n# config sha256 {config_hash}\n#", data.title);
    for (name, unit) in &data.columns {
        out.push_str(&format!(" {name}[{unit}]"));
    }
    out.push('\n');
    for row in &data.rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}
