//! Sweep report rows and their CSV / JSON emission.

use std::io::Write;

use poincare_core::poincare::VanishingReport;
use poincare_core::real::format_radius;
use poincare_core::CertifiedReal;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;

/// Significant digits of every printed midpoint.
pub const VALUE_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Nonzero,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub k: u32,
    #[serde(rename = "N")]
    pub level: u64,
    pub m: u64,
    /// First `n` with a certified nonzero coefficient.
    pub n_first: Option<u64>,
    pub value: String,
    pub radius: String,
    pub sign: String,
    pub precision: u32,
    pub status: Status,
}

impl Row {
    pub fn from_report(r: &VanishingReport) -> Self {
        let (value, radius, sign, precision) = match &r.witness {
            Some(w) => (
                format_value(&w.value),
                format_radius(w.value.rad()),
                w.sign.to_string(),
                w.precision,
            ),
            None => (String::new(), String::new(), "undetermined".into(), 0),
        };
        Row {
            k: r.k,
            level: r.level,
            m: r.m,
            n_first: r.first_nonzero_n,
            value,
            radius,
            sign,
            precision,
            status: if r.is_determined() {
                Status::Nonzero
            } else {
                Status::Undetermined
            },
        }
    }
}

pub fn format_value(x: &CertifiedReal) -> String {
    x.mid().to_string_radix(10, Some(VALUE_DIGITS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub nonzero: usize,
    pub undetermined: usize,
}

impl Summary {
    pub fn of(rows: &[Row]) -> Self {
        let nonzero = rows.iter().filter(|r| r.status == Status::Nonzero).count();
        Summary {
            rows: rows.len(),
            nonzero,
            undetermined: rows.len() - nonzero,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: SweepConfig,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: SweepConfig, rows: Vec<Row>) -> Self {
        let summary = Summary::of(&rows);
        Report {
            config,
            rows,
            summary,
        }
    }

    pub fn all_determined(&self) -> bool {
        self.summary.undetermined == 0
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        if self.rows.is_empty() {
            w.write_record([
                "k",
                "N",
                "m",
                "n_first",
                "value",
                "radius",
                "sign",
                "precision",
                "status",
            ])?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out).map_err(serde_json::Error::io)
    }
}

pub fn read_csv_rows<R: std::io::Read>(input: R) -> csv::Result<Vec<Row>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_json_rows(text: &str) -> serde_json::Result<Vec<Row>> {
    #[derive(Deserialize)]
    struct Doc {
        rows: Vec<Row>,
    }
    Ok(serde_json::from_str::<Doc>(text)?.rows)
}
