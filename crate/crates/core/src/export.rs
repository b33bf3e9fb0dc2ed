//! Renders a schedule as JSON, CSV or a printable itinerary.
//!
//! CSV and text use 1-based course and table numbers. Without a names list,
//! points print as their 1-based couple number.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::design::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected json, csv or text)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{got} names given for {v} couples")]
    NameCount { got: usize, v: usize },
    #[error("course {course}, table {table} has no host")]
    Unhosted { course: usize, table: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub host: String,
    pub guests: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Course {
    pub number: usize,
    pub tables: Vec<Table>,
}

/// Per-course host and guest lists with display names resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExportedItinerary {
    pub names: Vec<String>,
    pub courses: Vec<Course>,
}

impl ExportedItinerary {
    pub fn new(s: &Schedule, names: Option<&[String]>) -> Result<Self, ExportError> {
        let names: Vec<String> = match names {
            Some(n) if n.len() != s.v => return Err(ExportError::NameCount { got: n.len(), v: s.v }),
            Some(n) => n.to_vec(),
            None => (1..=s.v).map(|i| i.to_string()).collect(),
        };
        let mut courses = Vec::with_capacity(s.classes.len());
        for (ci, class) in s.classes.iter().enumerate() {
            let mut tables = Vec::with_capacity(class.blocks.len());
            for (bi, b) in class.blocks.iter().enumerate() {
                let host = b.host.ok_or(ExportError::Unhosted {
                    course: ci + 1,
                    table: bi + 1,
                })?;
                tables.push(Table {
                    host: names[host as usize].clone(),
                    guests: b
                        .members
                        .iter()
                        .filter(|&&p| p != host)
                        .map(|&p| names[p as usize].clone())
                        .collect(),
                });
            }
            courses.push(Course {
                number: ci + 1,
                tables,
            });
        }
        Ok(ExportedItinerary { names, courses })
    }

    pub fn to_csv(&self, k: usize) -> Result<String, ExportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["course".to_string(), "block".into(), "host".into()];
        header.extend((1..k).map(|i| format!("guest{i}")));
        w.write_record(&header)?;
        for c in &self.courses {
            for (ti, t) in c.tables.iter().enumerate() {
                let mut row = vec![c.number.to_string(), (ti + 1).to_string(), t.host.clone()];
                row.extend(t.guests.iter().cloned());
                w.write_record(&row)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is built from strings"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.courses {
            let _ = writeln!(out, "Course {}", c.number);
            for (ti, t) in c.tables.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  table {}: host {} with guests {}",
                    ti + 1,
                    t.host,
                    t.guests.join(", ")
                );
            }
        }
        out
    }
}

pub fn export(s: &Schedule, format: Format, names: Option<&[String]>) -> Result<String, ExportError> {
    match format {
        Format::Json => {
            if let Some(n) = names.filter(|n| n.len() != s.v) {
                return Err(ExportError::NameCount { got: n.len(), v: s.v });
            }
            Ok(s.to_json_pretty())
        }
        Format::Csv => ExportedItinerary::new(s, names)?.to_csv(s.k),
        Format::Text => Ok(ExportedItinerary::new(s, names)?.to_text()),
    }
}
