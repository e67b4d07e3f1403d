use clap::ValueEnum;
use serde_json::Value;

use mrgrid::ErasurePattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// One command's result in all three output formats.
pub struct Emit {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    text: String,
}

impl Emit {
    /// `json` must be an object; the schema version is prepended to it.
    pub fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>, text: String) -> Self {
        let mut obj = serde_json::Map::new();
        obj.insert("schema".into(), Value::from(1));
        if let Value::Object(fields) = json {
            obj.extend(fields);
        }
        Emit {
            json: Value::Object(obj),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            text,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).unwrap() + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).unwrap();
                for r in &self.rows {
                    w.write_record(r).unwrap();
                }
                String::from_utf8(w.into_inner().unwrap()).unwrap()
            }
        }
    }
}

/// Cells as `r:c` joined by spaces, for a single CSV field.
pub fn cells_field(e: &ErasurePattern) -> String {
    e.cells().map(|(r, c)| format!("{r}:{c}")).collect::<Vec<_>>().join(" ")
}
