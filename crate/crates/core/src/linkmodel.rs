//! Station visibility and the dual-downlink pair-rate model.
//!
//! The default [`LinkModelParams`] model uses an inverse-square spreading
//! term relative to a reference range and an exponential airmass
//! extinction term:
//!
//! ```text
//! η = η_zenith · (r_ref / r)² · exp(-τ_z / sin(elevation)),  clamped to ≤ 1
//! ```
//!
//! A satellite delivers `R_source · η(g1) · η(g2)` pairs per second to a
//! station pair when both stations see it at or above the minimum elevation.
//! Other channel models plug in through [`LinkModel`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::{DEFAULT_ALTITUDE_KM, EARTH_RADIUS_KM};
use crate::stations::GroundStation;

pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub elevation_deg: f64,
    pub slant_range_km: f64,
    pub visible: bool,
}

/// Earth-fixed station position on the spherical Earth (altitude ignored).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationSite {
    pub position: [f64; 3],
    pub up: [f64; 3],
}

impl StationSite {
    pub fn new(station: &GroundStation) -> Self {
        let lat = station.latitude_deg.to_radians();
        let lon = station.longitude_deg.to_radians();
        let up = [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
        Self { position: up.map(|u| u * EARTH_RADIUS_KM), up }
    }

    pub fn geometry(&self, sat_position: &[f64; 3], min_elevation_deg: f64) -> LinkGeometry {
        let d = [
            sat_position[0] - self.position[0],
            sat_position[1] - self.position[1],
            sat_position[2] - self.position[2],
        ];
        let range = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let up_dot = d[0] * self.up[0] + d[1] * self.up[1] + d[2] * self.up[2];
        let elevation_deg = (up_dot / range).clamp(-1.0, 1.0).asin().to_degrees();
        LinkGeometry { elevation_deg, slant_range_km: range, visible: is_visible(elevation_deg, min_elevation_deg) }
    }
}

/// Closed threshold: exactly at the minimum elevation counts as visible.
pub fn is_visible(elevation_deg: f64, min_elevation_deg: f64) -> bool {
    elevation_deg >= min_elevation_deg
}

pub fn link_geometry(sat_position: &[f64; 3], station: &GroundStation, min_elevation_deg: f64) -> LinkGeometry {
    StationSite::new(station).geometry(sat_position, min_elevation_deg)
}

/// Slant range at elevation `e` for a circular orbit of altitude `h`.
pub fn slant_range_at_elevation(altitude_km: f64, elevation_deg: f64) -> f64 {
    let e = elevation_deg.to_radians();
    let ratio = (EARTH_RADIUS_KM + altitude_km) / EARTH_RADIUS_KM;
    EARTH_RADIUS_KM * ((ratio * ratio - e.cos().powi(2)).sqrt() - e.sin())
}

/// Earth central angle (degrees) of the visibility cone edge.
pub fn visibility_central_angle_deg(altitude_km: f64, min_elevation_deg: f64) -> f64 {
    let e = min_elevation_deg.to_radians();
    let ratio = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km);
    ((ratio * e.cos()).acos() - e).to_degrees()
}

pub trait LinkModel: Send + Sync {
    fn min_elevation_deg(&self) -> f64;

    /// Pairs per second emitted by the onboard source.
    fn source_pair_rate(&self) -> f64;

    /// Single-channel efficiency in [0, 1] for a visible link.
    fn efficiency(&self, geom: &LinkGeometry) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkModelParams {
    pub source_pair_rate: f64,
    pub eta_zenith: f64,
    pub zenith_optical_depth: f64,
    /// Defaults to the orbit altitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_range: Option<f64>,
    /// Defaults to the simulation's minimum elevation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_elevation: Option<f64>,
}

impl Default for LinkModelParams {
    fn default() -> Self {
        Self { source_pair_rate: 1e8, eta_zenith: 0.1, zenith_optical_depth: 0.5, reference_range: None, min_elevation: None }
    }
}

impl LinkModelParams {
    pub fn reference_range_km(&self) -> f64 {
        self.reference_range.unwrap_or(DEFAULT_ALTITUDE_KM)
    }

    /// Fills unset fields from the simulation setting.
    pub fn resolved(&self, altitude_km: f64, min_elevation_deg: f64) -> Self {
        Self {
            reference_range: Some(self.reference_range.unwrap_or(altitude_km)),
            min_elevation: Some(self.min_elevation.unwrap_or(min_elevation_deg)),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("link_model: {what}")));
        if !(self.source_pair_rate.is_finite() && self.source_pair_rate > 0.0) {
            return bad("source_pair_rate must be positive");
        }
        if !(self.eta_zenith > 0.0 && self.eta_zenith <= 1.0) {
            return bad("eta_zenith must lie in (0, 1]");
        }
        if !(self.zenith_optical_depth.is_finite() && self.zenith_optical_depth >= 0.0) {
            return bad("zenith_optical_depth must be non-negative");
        }
        if let Some(r) = self.reference_range {
            if !(r.is_finite() && r > 0.0) {
                return bad("reference_range must be positive");
            }
        }
        if let Some(e) = self.min_elevation {
            if !(0.0..90.0).contains(&e) {
                return bad("min_elevation must lie in [0, 90)");
            }
        }
        Ok(())
    }
}

impl LinkModel for LinkModelParams {
    fn min_elevation_deg(&self) -> f64 {
        self.min_elevation.unwrap_or(DEFAULT_MIN_ELEVATION_DEG)
    }

    fn source_pair_rate(&self) -> f64 {
        self.source_pair_rate
    }

    fn efficiency(&self, geom: &LinkGeometry) -> Result<f64> {
        channel_efficiency(geom, self)
    }
}

pub fn channel_efficiency(geom: &LinkGeometry, params: &LinkModelParams) -> Result<f64> {
    if !geom.visible {
        return Err(Error::NotVisible);
    }
    let spreading = (params.reference_range_km() / geom.slant_range_km).powi(2);
    let airmass = 1.0 / geom.elevation_deg.to_radians().sin();
    let eta = params.eta_zenith * spreading * (-params.zenith_optical_depth * airmass).exp();
    Ok(eta.min(1.0))
}

/// Dual-downlink rate; zero unless both stations see the satellite.
pub fn pair_rate(model: &dyn LinkModel, sat_position: &[f64; 3], g1: &GroundStation, g2: &GroundStation) -> f64 {
    let min_el = model.min_elevation_deg();
    let a = link_geometry(sat_position, g1, min_el);
    let b = link_geometry(sat_position, g2, min_el);
    match (model.efficiency(&a), model.efficiency(&b)) {
        (Ok(ea), Ok(eb)) => model.source_pair_rate() * (ea * eb),
        _ => 0.0,
    }
}
