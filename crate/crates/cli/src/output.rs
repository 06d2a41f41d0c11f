use crate::config::Format;

/// Column-named rows rendered as TSV or CSV under a `#` header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `# config=<hash>`, then `#` and the column names, then the rows.
    pub fn render(&self, config_hash: &str, format: Format) -> String {
        let sep = format.separator().to_string();
        let mut out = format!("# config={config_hash}\n#{}\n", self.columns.join(&sep));
        for row in &self.rows {
            out.push_str(&row.join(&sep));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    x.to_string()
}
