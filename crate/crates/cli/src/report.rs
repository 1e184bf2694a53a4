use std::fmt;

use concordance_core::infer::TraceStep;
use concordance_core::FactUse;
use concordance_core::Inference;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// Ordered name/value pairs, serialized as a JSON object in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Fields(Vec<(String, String)>);

impl Fields {
    pub fn push(&mut self, name: impl Into<String>, value: impl ToString) {
        self.0.push((name.into(), value.to_string()));
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, String)> {
        self.0.iter()
    }
}

impl Serialize for Fields {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceLine {
    pub subject: String,
    pub claim: String,
    pub citations: Vec<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl TraceLine {
    pub fn new(subject: impl Into<String>, claim: impl Into<String>, citation: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            claim: claim.into(),
            citations: vec![citation.into()],
            detail: String::new(),
        }
    }

    fn from_step(step: &TraceStep, symbol: &str) -> Self {
        let op = match step.side {
            concordance_core::infer::Side::Lower => "≥",
            concordance_core::infer::Side::Upper => "≤",
        };
        Self {
            subject: step.knot.clone(),
            claim: format!("{symbol} {op} {}", step.value),
            citations: step.rules.iter().map(|r| r.to_string()).collect(),
            detail: step.detail.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a command prints: what was asked, what came out, why, and
/// which ledger facts it rests on.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub query: Fields,
    pub results: Fields,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
    pub trace: Vec<TraceLine>,
    pub provenance: Vec<FactUse>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            query: Fields::default(),
            results: Fields::default(),
            tables: Vec::new(),
            trace: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// Adds the trace and facts of an inference, labelling bounds with `symbol`.
    pub fn absorb(&mut self, inference: &Inference, symbol: &str) {
        self.trace
            .extend(inference.trace.iter().map(|s| TraceLine::from_step(s, symbol)));
        for f in &inference.facts {
            if !self.provenance.contains(f) {
                self.provenance.push(f.clone());
            }
        }
        self.provenance.sort();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.command)?;
        for (k, v) in self.query.iter() {
            writeln!(f, "  {k}: {v}")?;
        }
        writeln!(f, "results")?;
        for (k, v) in self.results.iter() {
            writeln!(f, "  {k} = {v}")?;
        }
        for t in &self.tables {
            writeln!(f, "{}", t.title)?;
            write_table(f, &t.columns, &t.rows)?;
        }
        if !self.trace.is_empty() {
            writeln!(f, "trace")?;
            for line in &self.trace {
                writeln!(f, "  {}: {}", line.subject, line.claim)?;
                for c in &line.citations {
                    writeln!(f, "      by {c}")?;
                }
                if !line.detail.is_empty() {
                    writeln!(f, "      ({})", line.detail)?;
                }
            }
        }
        if !self.provenance.is_empty() {
            writeln!(f, "provenance")?;
            for p in &self.provenance {
                writeln!(f, "  {} {} = {}: {}", p.knot, p.kind, p.value, p.provenance)?;
            }
        }
        Ok(())
    }
}

pub fn write_table(f: &mut impl fmt::Write, columns: &[String], rows: &[Vec<String>]) -> fmt::Result {
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain([columns[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |f: &mut dyn fmt::Write, cells: &[String]| -> fmt::Result {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        writeln!(f, "  {}", padded.join("  ").trim_end())
    };
    line(f, columns)?;
    for r in rows {
        line(f, r)?;
    }
    Ok(())
}
