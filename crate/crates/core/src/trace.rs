//! Trace export.
//!
//! CSV has one row per iteration. Vector-valued columns are split per
//! coordinate and named after the variables, e.g. `llp_y` for a single
//! inner variable `y`. Empty cells mean "not computed"; `llp_value` holds
//! `infeasible` when the lower-level program had no feasible point. The
//! `status` column is filled on the last row only.
//!
//! JSON wraps the records with the run summary; see [`JsonTrace`].

use std::io::Write;

use serde::Serialize;

use crate::algorithms::{IterateRecord, RunResult, RunStatus, Variant};
use crate::error::{Error, Result};
use crate::gsip::GsipProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "json" => Ok(TraceFormat::Json),
            _ => Err(Error::Usage(format!("unknown trace format `{s}`"))),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_header(p: &GsipProblem) -> Vec<String> {
    let xs = p.x.names();
    let ys = p.y.names();
    let mut h = vec!["k".to_string()];
    h.extend(xs.iter().cloned());
    h.push("f_Lk".into());
    h.extend(ys.iter().map(|n| format!("llp_{n}")));
    h.push("llp_value".into());
    h.extend(ys.iter().map(|n| format!("aux_{n}")));
    h.push("aux_value".into());
    h.push("sip_value".into());
    h.extend(ys.iter().map(|n| format!("added_{n}")));
    h.push("Yset_size".into());
    h.push("status".into());
    h
}

fn push_point(row: &mut Vec<String>, point: Option<&[f64]>, dim: usize) {
    match point {
        Some(p) => row.extend(p.iter().map(|&v| fmt_real(v))),
        None => row.extend(std::iter::repeat(String::new()).take(dim)),
    }
}

fn csv_row(rec: &IterateRecord, ydim: usize, status: Option<RunStatus>) -> Vec<String> {
    let mut row = vec![rec.k.to_string()];
    row.extend(rec.x_k.iter().map(|&v| fmt_real(v)));
    row.push(fmt_real(rec.f_lk));

    let llp = rec.llp.as_ref();
    push_point(&mut row, llp.and_then(|l| l.y_k.as_deref()), ydim);
    row.push(match llp {
        Some(l) if l.infeasible => "infeasible".into(),
        Some(l) => l.value.map(fmt_real).unwrap_or_default(),
        None => String::new(),
    });

    let aux = rec.aux.as_ref();
    push_point(&mut row, aux.map(|a| a.y_tilde_k.as_slice()), ydim);
    row.push(aux.map(|a| fmt_real(a.value)).unwrap_or_default());

    row.push(rec.sip_llp.as_ref().map(|s| fmt_real(s.value)).unwrap_or_default());
    push_point(&mut row, rec.added_point.as_deref(), ydim);
    row.push(rec.yset_size_after.to_string());
    row.push(status.map(|s| s.to_string()).unwrap_or_default());
    row
}

pub fn write_csv<W: Write>(p: &GsipProblem, result: &RunResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Usage(format!("cannot write trace: {e}"));
    w.write_record(csv_header(p)).map_err(io)?;
    let last = result.trace.len().saturating_sub(1);
    for (i, rec) in result.trace.iter().enumerate() {
        let status = (i == last).then_some(result.status);
        w.write_record(csv_row(rec, p.y.dim(), status)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Usage(format!("cannot write trace: {e}")))?;
    Ok(())
}

pub fn to_csv_string(p: &GsipProblem, result: &RunResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(p, result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// JSON document written by `gsip run --format json`.
///
/// `final_lower_bound` is `null` when it is not finite, which happens when
/// the lower-bounding problem was found infeasible.
#[derive(Debug, Clone, Serialize)]
pub struct JsonTrace<'a> {
    pub problem: &'a str,
    pub variant: Variant,
    pub status: RunStatus,
    pub final_lower_bound: Option<f64>,
    pub trace: &'a [IterateRecord],
}

impl<'a> JsonTrace<'a> {
    pub fn new(p: &'a GsipProblem, variant: Variant, result: &'a RunResult) -> Self {
        Self {
            problem: &p.name,
            variant,
            status: result.status,
            final_lower_bound: result.final_lower_bound.is_finite().then_some(result.final_lower_bound),
            trace: &result.trace,
        }
    }
}

pub fn to_json_string(p: &GsipProblem, variant: Variant, result: &RunResult) -> Result<String> {
    serde_json::to_string_pretty(&JsonTrace::new(p, variant, result))
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Usage(format!("cannot encode trace: {e}")))
}
