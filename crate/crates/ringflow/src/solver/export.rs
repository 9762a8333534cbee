//! CSV and JSON writers for fields and wall traces.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryTrace;
use super::{Field, SolveReport};
use crate::error::Result;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub theta: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub theta: f64,
    pub normal_derivative: f64,
    pub curvature: f64,
    pub arclength_element: f64,
}

pub fn field_rows(field: &Field) -> Vec<FieldRow> {
    let mut rows = Vec::with_capacity(field.n_r() * field.n_theta());
    for m in 0..field.n_theta() {
        let t = field.geom.theta[m];
        for j in 0..field.n_r() {
            let r = field.radius(j, m);
            rows.push(FieldRow { theta: t, s: field.grid.s[j], x: r * t.cos(), y: r * t.sin(), u: field.u[(j, m)] });
        }
    }
    rows
}

pub fn write_field_csv<W: Write>(field: &Field, w: W) -> Result<()> {
    let mut wr = writer(w);
    for row in field_rows(field) {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(trace: &BoundaryTrace, w: W) -> Result<()> {
    let mut wr = writer(w);
    for m in 0..trace.theta.len() {
        wr.serialize(TraceRow {
            theta: trace.theta[m],
            normal_derivative: trace.normal_derivative[m],
            curvature: trace.curvature[m],
            arclength_element: trace.arclength_element[m],
        })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: std::io::Read>(r: R) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(r);
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn report_json(report: &SolveReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}
