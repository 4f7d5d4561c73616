//! File writers for run artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qonstell::baselines::BaselineReport;
use qonstell::orbits::{build_constellation, subsatellite_point, ConstellationSpec};
use qonstell::scheduler::Schedule;
use qonstell::stations::GroundStationSet;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_timesteps(path: &Path, interval_s: f64, rates: &[f64]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t_index,t_s,rate_pairs_per_s")?;
    for (k, r) in rates.iter().enumerate() {
        writeln!(w, "{k},{},{r}", k as f64 * interval_s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_schedules(path: &Path, schedules: &[Schedule], stations: &GroundStationSet) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t_index,sat,ga,gb,rate_pairs_per_s")?;
    let id = |i: usize| stations.get(i).map_or("", |s| s.id.as_str());
    for s in schedules {
        for a in &s.assignments {
            let [ga, gb] = a.stations;
            writeln!(w, "{},{},{},{},{}", s.timestep_index, a.satellite_index, id(ga), id(gb), a.rate)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_baseline_csv(path: &Path, report: &BaselineReport) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "index,inclinations_deg,counts,mean_rate")?;
    for (i, e) in report.evaluations.iter().enumerate() {
        writeln!(w, "{},{},{},{}", i + 1, join(e.spec.inclinations()), join(e.spec.counts()), e.mean_rate)?;
    }
    w.flush()?;
    Ok(())
}

/// Sub-satellite tracks as GeoJSON: one LineString per satellite with
/// [lon, lat] points at `t = 0, step, ...` up to `duration_s`, plus a Point
/// per station.
pub fn track_geojson(
    spec: &ConstellationSpec,
    duration_s: f64,
    step_s: f64,
    stations: Option<&GroundStationSet>,
) -> Result<Value, CliError> {
    if !(step_s > 0.0 && duration_s >= 0.0 && duration_s.is_finite()) {
        return Err(CliError::Config(format!("bad duration {duration_s} / step {step_s}")));
    }
    let geometry = build_constellation(spec)?;
    let steps = (duration_s / step_s + 1e-9).floor() as usize;
    let mut tracks = vec![Vec::with_capacity(steps + 1); geometry.len()];
    let mut meta = vec![(0, 0); geometry.len()];
    for k in 0..=steps {
        for (i, sat) in geometry.propagate(k as f64 * step_s).iter().enumerate() {
            let (lat, lon) = subsatellite_point(&sat.position);
            tracks[i].push([lon, lat]);
            meta[i] = (sat.orbit_index, sat.phase_index);
        }
    }
    let mut features: Vec<Value> = tracks
        .into_iter()
        .zip(meta)
        .enumerate()
        .map(|(i, (coords, (orbit, phase)))| {
            json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {
                    "satellite": i,
                    "orbit_index": orbit,
                    "phase_index": phase,
                    "inclination_deg": spec.groups[orbit].inclination_deg,
                },
            })
        })
        .collect();
    for s in stations.map(|s| s.stations()).unwrap_or_default() {
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.longitude_deg, s.latitude_deg]},
            "properties": {"id": s.id},
        }));
    }
    Ok(json!({"type": "FeatureCollection", "features": features}))
}
