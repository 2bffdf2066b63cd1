//! Report emission in json, csv and text.

use std::fs;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::{Failure, GlobalOpts};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A header row and data rows.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub trait Report: Serialize {
    /// Row form for csv; reports without one are flattened to path,value.
    fn table(&self) -> Option<Table> {
        None
    }

    fn text(&self) -> Option<String> {
        None
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn flatten(v: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(x, &join(k), out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(x, &join(&i.to_string()), out)),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// Compact cell value: scalars as is, composites as JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Array(_) | Value::Object(_) => v.to_string(),
        other => scalar(other),
    }
}

fn to_csv(table: Table) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage("io", e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for r in &table.rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::usage("io", e.to_string()))
}

fn pairs<R: Report>(r: &R) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten(&serde_json::to_value(r).expect("report serializes"), "", &mut out);
    out
}

pub fn emit<R: Report>(g: &GlobalOpts, r: &R) -> Result<(), Failure> {
    let bytes = match g.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => to_csv(r.table().unwrap_or_else(|| Table {
            header: vec!["path".into(), "value".into()],
            rows: pairs(r).into_iter().map(|(k, v)| vec![k, v]).collect(),
        }))?,
        Format::Text => r
            .text()
            .unwrap_or_else(|| pairs(r).into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect())
            .into_bytes(),
    };
    match &g.out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::usage("io", e.to_string())),
    }
}
