//! Constellation parametrization and circular two-body propagation.
//!
//! A design is `D` inclinations plus `D - 1` additive log-ratio coordinates.
//! The coordinates decode to allocation fractions on the open simplex, which
//! round to integer satellite counts per orbit group. Each group flies in its
//! own circular plane; planes are staggered in RAAN by `360 / D` degrees and
//! satellites are evenly spaced in mean anomaly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;
pub const DEFAULT_ALTITUDE_KM: f64 = 550.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    inclinations: Vec<f64>,
    alr_coords: Vec<f64>,
}

impl DesignVector {
    pub fn new(inclinations: Vec<f64>, alr_coords: Vec<f64>) -> Result<Self> {
        if inclinations.is_empty() {
            return Err(Error::InvalidDesign("at least one inclination is required".into()));
        }
        if alr_coords.len() + 1 != inclinations.len() {
            return Err(Error::InvalidDesign(format!(
                "{} inclinations need {} ALR coordinates, got {}",
                inclinations.len(),
                inclinations.len() - 1,
                alr_coords.len()
            )));
        }
        if let Some(bad) = inclinations.iter().find(|t| !(0.0..=180.0).contains(*t)) {
            return Err(Error::InvalidDesign(format!("inclination {bad} outside [0, 180]")));
        }
        if alr_coords.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { inclinations, alr_coords })
    }

    /// Splits an optimizer point `(θ₁..θ_D, y₁..y_{D-1})`.
    pub fn from_point(point: &[f64], orbits: usize) -> Result<Self> {
        if orbits == 0 || point.len() != 2 * orbits - 1 {
            return Err(Error::InvalidDesign(format!("point of length {} does not fit {orbits} orbits", point.len())));
        }
        Self::new(point[..orbits].to_vec(), point[orbits..].to_vec())
    }

    pub fn to_point(&self) -> Vec<f64> {
        self.inclinations.iter().chain(&self.alr_coords).copied().collect()
    }

    pub fn orbits(&self) -> usize {
        self.inclinations.len()
    }

    pub fn inclinations(&self) -> &[f64] {
        &self.inclinations
    }

    pub fn alr_coords(&self) -> &[f64] {
        &self.alr_coords
    }
}

/// Fractions of the satellite budget per orbit; strictly positive, sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationFractions(Vec<f64>);

impl AllocationFractions {
    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::InvalidDesign("empty allocation".into()));
        }
        if fractions.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(index) = fractions.iter().position(|&x| x <= 0.0) {
            return Err(Error::ZeroComponent { index });
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDesign(format!("fractions sum to {sum}")));
        }
        Ok(Self(fractions))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Inverse additive log-ratio: `x_i = e^{y_i} / (1 + Σ e^{y_j})`, `x_D = 1 / (1 + Σ e^{y_j})`.
pub fn alr_inverse(y: &[f64]) -> Result<AllocationFractions> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    // Shift by the max exponent so large coordinates cannot overflow.
    let shift = y.iter().copied().fold(0.0f64, f64::max);
    let reference = (-shift).exp();
    let mut out: Vec<f64> = y.iter().map(|v| (v - shift).exp()).collect();
    let denom = reference + out.iter().sum::<f64>();
    for v in &mut out {
        *v /= denom;
    }
    out.push(reference / denom);
    Ok(AllocationFractions(out))
}

/// Additive log-ratio with the last component as reference: `y_i = ln(x_i / x_D)`.
pub fn alr_forward(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InvalidDesign("empty allocation".into()));
    }
    if let Some(index) = x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::ZeroComponent { index });
    }
    let reference = x[x.len() - 1];
    Ok(x[..x.len() - 1].iter().map(|v| (v / reference).ln()).collect())
}

/// Integer satellite counts `round(max(x_i · N, min_sats))`. Infeasible
/// allocations (counts not summing to `N`) are kept as-is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerAllocation {
    pub counts: Vec<u32>,
    pub total: u32,
}

impl IntegerAllocation {
    pub fn sum(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.sum() == self.total as u64
    }
}

pub fn allocate_integers(x: &AllocationFractions, total: u32, min_sats: u32) -> IntegerAllocation {
    let n = total as f64;
    let counts = x
        .as_slice()
        .iter()
        .map(|&f| (f * n).max(min_sats as f64).round() as u32)
        .collect();
    IntegerAllocation { counts, total }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitGroup {
    pub inclination_deg: f64,
    pub count: u32,
}

/// Orbit groups plus the intended satellite total.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSpec {
    pub altitude_km: f64,
    pub groups: Vec<OrbitGroup>,
    pub total: u32,
}

impl ConstellationSpec {
    /// A spec whose total is the sum of its counts (always feasible).
    pub fn from_groups(altitude_km: f64, groups: Vec<OrbitGroup>) -> Self {
        let total = groups.iter().map(|g| g.count).sum();
        Self { altitude_km, groups, total }
    }

    pub fn from_allocation(inclinations: &[f64], allocation: &IntegerAllocation, altitude_km: f64) -> Self {
        let groups = inclinations
            .iter()
            .zip(&allocation.counts)
            .map(|(&inclination_deg, &count)| OrbitGroup { inclination_deg, count })
            .collect();
        Self { altitude_km, groups, total: allocation.total }
    }

    pub fn satellite_count(&self) -> u64 {
        self.groups.iter().map(|g| g.count as u64).sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.satellite_count() == self.total as u64
    }

    pub fn inclinations(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.inclination_deg).collect()
    }

    pub fn counts(&self) -> Vec<u32> {
        self.groups.iter().map(|g| g.count).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_km.is_finite() && self.altitude_km > 0.0) {
            return Err(Error::Config(format!("altitude {} km must be positive", self.altitude_km)));
        }
        if let Some(g) = self.groups.iter().find(|g| !(0.0..=180.0).contains(&g.inclination_deg)) {
            return Err(Error::Config(format!("inclination {} outside [0, 180]", g.inclination_deg)));
        }
        Ok(())
    }

    pub fn ensure_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::InfeasibleSpec { sum: self.satellite_count(), total: self.total as u64 })
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRecord {
    altitude_km: f64,
    groups: Vec<OrbitGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total: Option<u32>,
}

// The interchange record only carries `total` when it differs from the sum.
impl Serialize for ConstellationSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRecord {
            altitude_km: self.altitude_km,
            groups: self.groups.clone(),
            total: (!self.is_feasible()).then_some(self.total),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConstellationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = SpecRecord::deserialize(d)?;
        let mut spec = ConstellationSpec::from_groups(rec.altitude_km, rec.groups);
        if let Some(total) = rec.total {
            spec.total = total;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteState {
    pub position: [f64; 3],
    pub orbit_index: usize,
    pub phase_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Plane {
    cos_raan: f64,
    sin_raan: f64,
    cos_inc: f64,
    sin_inc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Slot {
    plane: usize,
    orbit_index: usize,
    phase_index: usize,
    /// Argument of latitude at epoch, radians.
    phase0: f64,
}

/// Circular-orbit geometry ready for propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationGeometry {
    radius_km: f64,
    mean_motion: f64,
    earth_rotation: f64,
    planes: Vec<Plane>,
    slots: Vec<Slot>,
}

pub fn orbital_period_s(semi_major_axis_km: f64) -> f64 {
    TAU * (semi_major_axis_km.powi(3) / EARTH_MU_KM3_S2).sqrt()
}

pub fn build_constellation(spec: &ConstellationSpec) -> Result<ConstellationGeometry> {
    spec.validate()?;
    spec.ensure_feasible()?;
    let d = spec.groups.len();
    let radius_km = EARTH_RADIUS_KM + spec.altitude_km;
    let mut planes = Vec::with_capacity(d);
    let mut slots = Vec::new();
    for (g, group) in spec.groups.iter().enumerate() {
        let raan = TAU * g as f64 / d as f64;
        let inc = group.inclination_deg.to_radians();
        planes.push(Plane { cos_raan: raan.cos(), sin_raan: raan.sin(), cos_inc: inc.cos(), sin_inc: inc.sin() });
        for k in 0..group.count as usize {
            let phase0 = TAU * k as f64 / group.count as f64;
            slots.push(Slot { plane: g, orbit_index: g, phase_index: k, phase0 });
        }
    }
    Ok(ConstellationGeometry {
        radius_km,
        mean_motion: (EARTH_MU_KM3_S2 / radius_km.powi(3)).sqrt(),
        earth_rotation: EARTH_ROTATION_RAD_S,
        planes,
        slots,
    })
}

impl ConstellationGeometry {
    /// Overrides the Earth rotation rate (0 gives an inertial ground frame).
    pub fn with_earth_rotation(mut self, rad_per_s: f64) -> Self {
        self.earth_rotation = rad_per_s;
        self
    }

    /// Shifts every epoch phase by `delta_deg`.
    pub fn with_phase_offset(mut self, delta_deg: f64) -> Self {
        for s in &mut self.slots {
            s.phase0 += delta_deg.to_radians();
        }
        self
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn radius_km(&self) -> f64 {
        self.radius_km
    }

    pub fn period_s(&self) -> f64 {
        TAU / self.mean_motion
    }

    /// Epoch phases (degrees) of the satellites in orbit group `g`.
    pub fn epoch_phases_deg(&self, g: usize) -> Vec<f64> {
        self.slots.iter().filter(|s| s.orbit_index == g).map(|s| s.phase0.to_degrees()).collect()
    }

    /// Earth-fixed positions at `t` seconds after epoch. The Greenwich
    /// meridian is aligned with the inertial x-axis at epoch.
    pub fn propagate(&self, t: f64) -> Vec<SatelliteState> {
        let mut out = Vec::with_capacity(self.slots.len());
        self.propagate_into(t, &mut out);
        out
    }

    pub fn propagate_into(&self, t: f64, out: &mut Vec<SatelliteState>) {
        out.clear();
        let gst = self.earth_rotation * t;
        let (sin_g, cos_g) = gst.sin_cos();
        let advance = self.mean_motion * t;
        for slot in &self.slots {
            let p = &self.planes[slot.plane];
            let (su, cu) = (slot.phase0 + advance).sin_cos();
            let x = self.radius_km * (p.cos_raan * cu - p.sin_raan * su * p.cos_inc);
            let y = self.radius_km * (p.sin_raan * cu + p.cos_raan * su * p.cos_inc);
            let z = self.radius_km * su * p.sin_inc;
            out.push(SatelliteState {
                position: [cos_g * x + sin_g * y, -sin_g * x + cos_g * y, z],
                orbit_index: slot.orbit_index,
                phase_index: slot.phase_index,
            });
        }
    }
}

pub fn propagate(geometry: &ConstellationGeometry, t: f64) -> Vec<SatelliteState> {
    geometry.propagate(t)
}

/// Geocentric (latitude, longitude) in degrees of an Earth-fixed position.
pub fn subsatellite_point(position: &[f64; 3]) -> (f64, f64) {
    let [x, y, z] = *position;
    let lat = z.atan2(x.hypot(y)).to_degrees();
    let lon = y.atan2(x).to_degrees();
    (lat, lon)
}
