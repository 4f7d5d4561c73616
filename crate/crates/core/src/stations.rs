//! Ground stations: the data model, CSV ingestion, and the two placement
//! generators (bundled population list, seeded random-on-land).

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_CITIES: &str = include_str!("../data/cities_top100.csv");
const BUNDLED_LANDMASK: &str = include_str!("../data/landmask_1deg.txt");

/// Rejection-sampling draws allowed before a mask is declared degenerate.
pub const MAX_LAND_DRAWS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_m: f64,
}

impl GroundStation {
    /// Validates coordinates and normalizes longitude into [-180, 180).
    /// Returns `None` when latitude or longitude is out of range.
    pub fn new(id: impl Into<String>, latitude_deg: f64, longitude_deg: f64, altitude_m: f64) -> Option<Self> {
        if !latitude_deg.is_finite() || !longitude_deg.is_finite() || !altitude_m.is_finite() {
            return None;
        }
        if !(-90.0..=90.0).contains(&latitude_deg) || !(-180.0..=180.0).contains(&longitude_deg) {
            return None;
        }
        let longitude_deg = if longitude_deg >= 180.0 { longitude_deg - 360.0 } else { longitude_deg };
        Some(Self { id: id.into(), latitude_deg, longitude_deg, altitude_m })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    PopulationFile,
    RandomLand { seed: u64 },
    UserFile { path: PathBuf },
}

/// An ordered, id-unique list of stations.
///
/// Order is preserved from construction; scheduling tie-breaks use the
/// lexicographic rank of each id, precomputed here.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStationSet {
    stations: Vec<GroundStation>,
    provenance: Provenance,
    id_rank: Vec<u32>,
}

impl GroundStationSet {
    pub fn new(stations: Vec<GroundStation>, provenance: Provenance) -> Result<Self> {
        let mut order: Vec<usize> = (0..stations.len()).collect();
        order.sort_by(|&a, &b| stations[a].id.cmp(&stations[b].id));
        for w in order.windows(2) {
            if stations[w[0]].id == stations[w[1]].id {
                return Err(Error::DuplicateId(stations[w[0]].id.clone()));
            }
        }
        for (i, s) in stations.iter().enumerate() {
            if GroundStation::new(s.id.clone(), s.latitude_deg, s.longitude_deg, s.altitude_m).as_ref() != Some(s) {
                return Err(Error::OutOfRangeCoordinate { line: i + 2 });
            }
        }
        let mut id_rank = vec![0u32; stations.len()];
        for (rank, &idx) in order.iter().enumerate() {
            id_rank[idx] = rank as u32;
        }
        Ok(Self { stations, provenance, id_rank })
    }

    pub fn stations(&self) -> &[GroundStation] {
        &self.stations
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&GroundStation> {
        self.stations.get(index)
    }

    /// Lexicographic position of station `index`'s id within the set.
    pub fn id_rank(&self, index: usize) -> u32 {
        self.id_rank[index]
    }

    /// The first `n` stations, keeping provenance.
    pub fn truncated(&self, n: usize) -> Self {
        let stations = self.stations.iter().take(n).cloned().collect();
        Self::new(stations, self.provenance.clone()).expect("subset of a valid set is valid")
    }
}

#[derive(Debug, Deserialize)]
struct StationRow {
    id: String,
    lat_deg: f64,
    lon_deg: f64,
    alt_m: f64,
}

/// Parses the `id,lat_deg,lon_deg,alt_m` station CSV.
pub fn parse_stations<R: Read>(reader: R, provenance: Provenance) -> Result<GroundStationSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["id", "lat_deg", "lon_deg", "alt_m"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::MalformedRow { line: 1, reason: format!("expected header `{}`", expected.join(",")) });
    }
    let mut stations = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::MalformedRow { line, reason: e.to_string() })?;
        let row: StationRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::MalformedRow { line, reason: e.to_string() })?;
        if row.id.is_empty() {
            return Err(Error::MalformedRow { line, reason: "empty id".into() });
        }
        let station = GroundStation::new(row.id, row.lat_deg, row.lon_deg, row.alt_m)
            .ok_or(Error::OutOfRangeCoordinate { line })?;
        stations.push(station);
    }
    GroundStationSet::new(stations, provenance)
}

pub fn load_stations(path: impl AsRef<Path>) -> Result<GroundStationSet> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_stations(file, Provenance::UserFile { path: path.to_path_buf() })
}

pub fn save_stations<W: Write>(set: &GroundStationSet, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "lat_deg", "lon_deg", "alt_m"])?;
    for s in set.stations() {
        wtr.write_record([
            s.id.clone(),
            s.latitude_deg.to_string(),
            s.longitude_deg.to_string(),
            s.altitude_m.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// The bundled list of the 100 most populous cities, most populous first.
pub fn population_stations() -> GroundStationSet {
    parse_stations(BUNDLED_CITIES.as_bytes(), Provenance::PopulationFile).expect("bundled city list is valid")
}

/// Equirectangular boolean land grid. Row 0 is the northernmost band,
/// column 0 starts at longitude -180.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandMask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl LandMask {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::LandMask("empty file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "LANDMASK" || parts[1] != "v1" {
            return Err(Error::LandMask(format!("bad header `{header}`")));
        }
        let rows: usize = parts[2].parse().map_err(|_| Error::LandMask("bad row count".into()))?;
        let cols: usize = parts[3].parse().map_err(|_| Error::LandMask("bad column count".into()))?;
        if rows == 0 || cols == 0 {
            return Err(Error::LandMask("empty grid".into()));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for c in lines.flat_map(|l| l.chars()).filter(|c| !c.is_whitespace()) {
            match c {
                '0' => cells.push(false),
                '1' => cells.push(true),
                other => return Err(Error::LandMask(format!("unexpected character `{other}`"))),
            }
        }
        if cells.len() != rows * cols {
            return Err(Error::LandMask(format!("expected {} cells, found {}", rows * cols, cells.len())));
        }
        Ok(Self { rows, cols, cells })
    }

    /// The shipped 1 degree mask.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LANDMASK).expect("bundled land mask is valid")
    }

    pub fn uniform(rows: usize, cols: usize, land: bool) -> Self {
        Self { rows, cols, cells: vec![land; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn land_cells(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("LANDMASK v1 {} {}\n", self.rows, self.cols);
        for row in self.cells.chunks(self.cols) {
            out.extend(row.iter().map(|&c| if c { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

pub fn mask_is_land(mask: &LandMask, lat_deg: f64, lon_deg: f64) -> bool {
    let row = (((90.0 - lat_deg) / 180.0 * mask.rows as f64).floor() as isize).clamp(0, mask.rows as isize - 1);
    let col = ((lon_deg + 180.0) / 360.0 * mask.cols as f64).floor() as isize;
    let col = col.rem_euclid(mask.cols as isize);
    mask.cells[row as usize * mask.cols + col as usize]
}

/// Places `count` stations uniformly over the sphere, rejecting ocean cells.
pub fn generate_random_land(count: usize, seed: u64, mask: &LandMask) -> Result<GroundStationSet> {
    if count == 0 {
        return Err(Error::Config("station count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = count.to_string().len().max(3);
    let mut stations = Vec::with_capacity(count);
    let mut draws = 0u64;
    while stations.len() < count {
        if draws >= MAX_LAND_DRAWS {
            return Err(Error::ExhaustedSampling { draws });
        }
        draws += 1;
        let (lat, lon) = sample_sphere(&mut rng);
        if mask_is_land(mask, lat, lon) {
            let id = format!("land_{:0width$}", stations.len(), width = width);
            stations.push(GroundStation::new(id, lat, lon, 0.0).expect("sampled point is in range"));
        }
    }
    GroundStationSet::new(stations, Provenance::RandomLand { seed })
}

// lon uniform; lat = asin(u), u uniform in [-1, 1], gives uniform area density.
fn sample_sphere<R: Rng>(rng: &mut R) -> (f64, f64) {
    let lon = rng.random_range(-180.0..180.0);
    let z: f64 = rng.random_range(-1.0..=1.0);
    (z.asin().to_degrees(), lon)
}
