use std::fs;
use std::io;
use std::path::Path;

use serde_json::Value;

/// Fixed float format: 17 significant digits, so every value round-trips.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    header: &'static [&'static str],
    body: String,
}

impl Csv {
    pub fn new(header: &'static [&'static str]) -> Self {
        Csv {
            header,
            body: String::new(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        let cells: Vec<String> = values.iter().map(|&v| float(v)).collect();
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Files produced by a task, written only once the task has finished.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn csv(&mut self, name: &str, csv: &Csv) {
        self.files.push((name.to_string(), csv.render()));
    }

    pub fn json(&mut self, name: &str, value: &Value) {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
        text.push('\n');
        self.files.push((name.to_string(), text));
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, text) in &self.files {
            fs::write(dir.join(name), text)?;
        }
        Ok(())
    }
}
