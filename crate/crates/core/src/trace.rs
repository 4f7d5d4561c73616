//! Constellation-level optimizer traces and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::orbits::{ConstellationSpec, DesignVector};
use crate::search::SearchTrace;

pub const TRACE_HEADER: [&str; 5] = ["call_index", "rate_pairs_per_s", "best_so_far", "inclinations_deg", "counts"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub call_index: usize,
    pub design: DesignVector,
    pub spec: ConstellationSpec,
    pub rate: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizerTrace {
    pub rows: Vec<TraceRow>,
    pub completed: bool,
}

impl OptimizerTrace {
    /// Decodes every searched point into its design and integer spec.
    pub fn from_search(search: &SearchTrace, evaluator: &Evaluator, orbits: usize) -> Result<Self> {
        let rows = search
            .rows
            .iter()
            .map(|r| {
                let design = DesignVector::from_point(&r.point, orbits)?;
                let spec = evaluator.decode(&design)?;
                Ok(TraceRow { call_index: r.call_index, design, spec, rate: r.value, best_so_far: r.best_so_far })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, completed: search.completed })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The earliest row whose rate equals the final best-so-far.
    pub fn best(&self) -> Option<&TraceRow> {
        let last = self.rows.last()?.best_so_far;
        self.rows.iter().find(|r| r.rate == last)
    }

    pub fn first_best_call(&self) -> Option<usize> {
        self.best().map(|r| r.call_index)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.call_index.to_string(),
                r.rate.to_string(),
                r.best_so_far.to_string(),
                join(r.spec.inclinations().iter()),
                join(r.spec.counts().iter()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the CSV and re-reads it to confirm the running-max column.
    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        let rows = check_trace_csv(std::fs::File::open(path)?)?;
        if rows != self.rows.len() {
            return Err(Error::TraceCheck(format!("wrote {} rows, read back {rows}", self.rows.len())));
        }
        Ok(())
    }
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

/// Validates a trace CSV: header, contiguous call indices, and best_so_far
/// equal to the running max of the rate column. Returns the row count.
pub fn check_trace_csv<R: Read>(reader: R) -> Result<usize> {
    let mut r = csv::Reader::from_reader(reader);
    if r.headers()?.iter().ne(TRACE_HEADER) {
        return Err(Error::TraceCheck("unexpected trace header".into()));
    }
    let mut running = f64::NEG_INFINITY;
    let mut count = 0;
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<f64> {
            record
                .get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::TraceCheck(format!("row {}: unreadable column {}", i + 1, TRACE_HEADER[k])))
        };
        if field(0)? != (i + 1) as f64 {
            return Err(Error::TraceCheck(format!("row {}: call_index is not contiguous", i + 1)));
        }
        running = running.max(field(1)?);
        if field(2)? != running {
            return Err(Error::TraceCheck(format!("row {}: best_so_far is not the running max", i + 1)));
        }
        count += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::SimulationConfig;
    use crate::stations::population_stations;

    fn sample_trace() -> OptimizerTrace {
        let ev = Evaluator::new(
            population_stations().truncated(5),
            SimulationConfig { total_satellites: 10, sample_interval_s: 300.0, ..Default::default() },
        )
        .unwrap();
        let mut search = SearchTrace { completed: true, ..Default::default() };
        for (p, v) in [(vec![10.0, 20.0, 0.5], 3.5), (vec![30.0, 40.0, -0.5], 7.25), (vec![50.0, 60.0, 0.0], 7.25)] {
            search.push(p, v);
        }
        OptimizerTrace::from_search(&search, &ev, 2).unwrap()
    }

    #[test]
    fn csv_layout() {
        let t = sample_trace();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "call_index,rate_pairs_per_s,best_so_far,inclinations_deg,counts");
        assert_eq!(lines[1], "1,3.5,3.5,10;20,6;4");
        assert_eq!(lines.len(), 4);
        assert_eq!(check_trace_csv(text.as_bytes()).unwrap(), 3);
        assert_eq!(t.first_best_call(), Some(2));
    }

    #[test]
    fn check_rejects_broken_running_max() {
        let bad = "call_index,rate_pairs_per_s,best_so_far,inclinations_deg,counts\n1,3,3,10,10\n2,5,3,10,10\n";
        assert!(matches!(check_trace_csv(bad.as_bytes()), Err(Error::TraceCheck(_))));
        let gap = "call_index,rate_pairs_per_s,best_so_far,inclinations_deg,counts\n2,3,3,10,10\n";
        assert!(check_trace_csv(gap.as_bytes()).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        sample_trace().write_csv_file(&path).unwrap();
        assert_eq!(check_trace_csv(std::fs::File::open(&path).unwrap()).unwrap(), 3);
    }
}
