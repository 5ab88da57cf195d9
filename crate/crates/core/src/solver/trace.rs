use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "k,objective,stationarity,selected,gamma,tau_min,tau_max,elapsed_s,eps_total";

/// One row of the convergence log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    pub stationarity: f64,
    pub selected: usize,
    pub gamma: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub elapsed_s: f64,
    pub eps_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Converged,
    IterationCap,
    TimeBudget,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Converged => "converged",
            TerminationReason::IterationCap => "iteration-cap",
            TerminationReason::TimeBudget => "time-budget",
        }
    }
}

/// 17 significant digits, fixed layout.
fn fmt_float(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a String");
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
}

impl Trace {
    pub fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    fn row(rec: &IterationRecord, with_time: bool) -> String {
        let mut s = String::with_capacity(200);
        write!(s, "{},", rec.k).unwrap();
        fmt_float(&mut s, rec.objective);
        s.push(',');
        fmt_float(&mut s, rec.stationarity);
        write!(s, ",{},", rec.selected).unwrap();
        fmt_float(&mut s, rec.gamma);
        s.push(',');
        fmt_float(&mut s, rec.tau_min);
        s.push(',');
        fmt_float(&mut s, rec.tau_max);
        s.push(',');
        if with_time {
            fmt_float(&mut s, rec.elapsed_s);
        }
        s.push(',');
        fmt_float(&mut s, rec.eps_total);
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for rec in &self.records {
            writeln!(w, "{}", Self::row(rec, true))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }

    /// CSV with the `elapsed_s` column blanked, for run-to-run comparison.
    pub fn to_csv_without_time(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for rec in &self.records {
            out.push_str(&Self::row(rec, false));
            out.push('\n');
        }
        out
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != CSV_HEADER {
            return Err(Error::Parse {
                location: "line 1".into(),
                message: format!("unexpected trace header '{header}'"),
            });
        }
        let mut records = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let location = format!("line {}", idx + 2);
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(Error::Parse {
                    location,
                    message: format!("expected 9 fields, found {}", fields.len()),
                });
            }
            let f = |i: usize| -> Result<f64> {
                fields[i].parse::<f64>().map_err(|e| Error::Parse {
                    location: location.clone(),
                    message: format!("field {i}: {e}"),
                })
            };
            let u = |i: usize| -> Result<usize> {
                fields[i].parse::<usize>().map_err(|e| Error::Parse {
                    location: location.clone(),
                    message: format!("field {i}: {e}"),
                })
            };
            records.push(IterationRecord {
                k: u(0)?,
                objective: f(1)?,
                stationarity: f(2)?,
                selected: u(3)?,
                gamma: f(4)?,
                tau_min: f(5)?,
                tau_max: f(6)?,
                elapsed_s: f(7)?,
                eps_total: f(8)?,
            });
        }
        Ok(Self { records })
    }
}
