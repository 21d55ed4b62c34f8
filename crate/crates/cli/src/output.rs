use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::{Failure, Format, GlobalArgs};

/// Rows with a header, used both for the summary and the CSV projection.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Self {
        Self { header: header.iter().map(S::to_string).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    fn write_csv(&self, path: &Path) -> Result<(), Failure> {
        let io = |e: csv::Error| Failure::Runtime(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    /// Some part stopped early; the result holds what was computed.
    Partial,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    status: Status,
    notes: &'a [String],
    result: &'a T,
}

/// Everything a command produces.
pub struct Report<'a, T> {
    pub result: &'a T,
    pub summary: Table,
    pub csv: Table,
    pub status: Status,
    pub notes: Vec<String>,
}

/// Writes the JSON envelope (always), the CSV projection (on request) and
/// prints the summary. A partial status turns into exit code 1.
pub fn emit<T: Serialize>(global: &GlobalArgs, cfg: &RunConfig, default_stem: &str, report: Report<'_, T>) -> Result<(), Failure> {
    let json_path = global.out.clone().unwrap_or_else(|| PathBuf::from(format!("{default_stem}.json")));
    let envelope = Envelope {
        tool: "weqlab",
        version: weqlab_core::VERSION,
        config: cfg,
        status: report.status,
        notes: &report.notes,
        result: report.result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(|e| Failure::Runtime(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    let io = |p: &Path, e: std::io::Error| Failure::Runtime(format!("cannot write {}: {e}", p.display()));
    File::create(&json_path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| io(&json_path, e))?;

    let csv_path = match (&global.csv, global.format) {
        (Some(p), _) => Some(p.clone()),
        (None, Format::Csv | Format::Both) => Some(json_path.with_extension("csv")),
        (None, Format::Json) => None,
    };
    if let Some(p) = &csv_path {
        report.csv.write_csv(p)?;
    }

    if !global.quiet {
        print!("{}", report.summary.render());
        for note in &report.notes {
            println!("note: {note}");
        }
        println!("wrote {}", json_path.display());
        if let Some(p) = &csv_path {
            println!("wrote {}", p.display());
        }
    }
    match report.status {
        Status::Complete => Ok(()),
        Status::Partial => Err(Failure::Runtime(format!(
            "partial results written to {}: {}",
            json_path.display(),
            report.notes.join("; ")
        ))),
    }
}
