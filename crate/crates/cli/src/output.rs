//! Report objects and their JSON/CSV rendering.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Plot-ready rows, used as the CSV body when present.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        self.rows.push(row);
    }

    fn to_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.header
                            .iter()
                            .zip(r)
                            .map(|(k, v)| (k.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// One report object per invocation.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Map<String, Value>,
    pub table: Option<Table>,
    /// Set when a certified inequality failed.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut body = Map::new();
        body.insert("command".into(), Value::from(command));
        Report {
            body,
            table: None,
            failure: None,
        }
    }

    pub fn field(mut self, key: &str, value: impl serde::Serialize) -> Self {
        let v = serde_json::to_value(value).expect("report fields serialize");
        self.body.insert(key.into(), v);
        self
    }

    pub fn table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn fail_if(mut self, failed: bool, why: impl FnOnce() -> String) -> Self {
        if failed && self.failure.is_none() {
            self.failure = Some(why());
        }
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut body = self.body.clone();
                if let Some(t) = &self.table {
                    body.insert("rows".into(), t.to_value());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(body))
                    .map_err(|e| CliError::internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let csv_err = |e: csv::Error| CliError::internal(e.to_string());
                match &self.table {
                    Some(t) => {
                        w.write_record(&t.header).map_err(csv_err)?;
                        for r in &t.rows {
                            w.write_record(r.iter().map(cell)).map_err(csv_err)?;
                        }
                    }
                    None => {
                        let mut flat = Vec::new();
                        flatten("", &Value::Object(self.body.clone()), &mut flat);
                        w.write_record(flat.iter().map(|(k, _)| k)).map_err(csv_err)?;
                        w.write_record(flat.iter().map(|(_, v)| v)).map_err(csv_err)?;
                    }
                }
                let bytes = w.into_inner().map_err(|e| CliError::internal(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// Writes to stdout, or to `path` through a sibling temporary file and a rename.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("--output: {e}")))
        }
        Some(p) => {
            let name = p
                .file_name()
                .ok_or_else(|| CliError::usage("--output: path has no file name"))?;
            let mut tmp_name = name.to_os_string();
            tmp_name.push(".tmp");
            let tmp = p.with_file_name(tmp_name);
            fs::write(&tmp, text)
                .and_then(|_| fs::rename(&tmp, p))
                .map_err(|e| CliError::usage(format!("--output {}: {e}", p.display())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_wins() {
        let r = Report::new("x").fail_if(false, || "a".into()).fail_if(true, || "b".into()).fail_if(true, || "c".into());
        assert_eq!(r.failure.as_deref(), Some("b"));
    }

    #[test]
    fn csv_without_table_flattens_keys() {
        let r = Report::new("x").field("grid", serde_json::json!({"n": 4, "half_width": 1.0})).field("v", [1, 2]);
        let text = r.render(Format::Csv).unwrap();
        assert_eq!(text, "command,grid.half_width,grid.n,v\nx,1.0,4,1;2\n");
    }

    #[test]
    fn json_embeds_table_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.into(), Value::Null]);
        let v: Value = serde_json::from_str(&Report::new("x").table(t).render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["a"], 1);
        assert!(v["rows"][0]["b"].is_null());
    }

    #[test]
    fn emit_replaces_file_without_leftovers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        emit("one", Some(&p)).unwrap();
        emit("two", Some(&p)).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
