use std::fmt::Write;

/// Everything needed to reproduce an output file, written as a `#` header.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub master_seed: u64,
    pub child_seeds: Vec<u64>,
}

impl ExperimentManifest {
    pub fn new(command: &str, master_seed: u64) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            master_seed,
            child_seeds: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// Adds a marker naming the file's role, so sibling outputs differ.
    pub fn with_output(&self, role: &str) -> Self {
        self.clone().param("output", role)
    }

    pub fn header(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# sqw {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# command: {}", self.command).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "# master_seed: {}", self.master_seed).unwrap();
        let seeds: Vec<String> = self.child_seeds.iter().map(u64::to_string).collect();
        writeln!(out, "# child_seeds: {}", seeds.join(" ")).unwrap();
        out
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
