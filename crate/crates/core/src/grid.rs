//! Gridded temperature fields, global series and GDP trajectories, with the
//! on-disk formats used to exchange them.
//!
//! A grid is described by a JSON manifest:
//!
//! ```json
//! {"years":[1850,2100], "lats":[-45.0,45.0], "lons":[0.0,180.0],
//!  "base_period":[1850,1880], "payload":"tas.csv", "payload_format":"csv"}
//! ```
//!
//! The payload is either a CSV with the fixed column order
//! `year,month,lat,lon,value`, or a flat row-major little-endian `f32` array
//! ordered by (year, month, lat, lon). Optional keys: `kind` (`"anomaly"` or
//! `"pattern"`), `provenance`, and `masked_cells` (a list of `[lat, lon]`
//! pairs excluded from every average). Patterns carry twelve calendar-month
//! layers under the single pseudo-year 0.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regional::RiceRegion;
use crate::variant::Hemisphere;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Anomaly,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayloadFormat {
    #[serde(rename = "csv")]
    Csv,
    #[serde(rename = "f32le")]
    F32Le,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridMeta {
    pub kind: FieldKind,
    /// Inclusive reference period the anomalies are relative to.
    pub base_period: Option<(i32, i32)>,
    pub provenance: String,
}

/// Monthly temperature anomalies on a regular latitude-longitude grid.
///
/// Values are stored row-major by (year, month, lat, lon). The mask holds one
/// flag per (lat, lon) cell; `true` marks a valid cell.
#[derive(Debug, Clone)]
pub struct GridField {
    first_year: i32,
    last_year: i32,
    lats: Vec<f64>,
    lons: Vec<f64>,
    values: Vec<f64>,
    mask: Vec<bool>,
    meta: GridMeta,
}

impl GridField {
    /// Builds a field, rejecting anything that violates the grid invariants.
    /// Values of masked cells are replaced by NaN.
    pub fn new(
        years: (i32, i32),
        lats: Vec<f64>,
        lons: Vec<f64>,
        mut values: Vec<f64>,
        mask: Vec<bool>,
        meta: GridMeta,
    ) -> Result<Self> {
        let (first_year, last_year) = years;
        if last_year < first_year {
            return Err(Error::ShapeMismatch(format!("empty year range {first_year}..={last_year}")));
        }
        check_lats(&lats)?;
        check_lons(&lons)?;
        let n_cells = lats.len() * lons.len();
        if mask.len() != n_cells {
            return Err(Error::ShapeMismatch(format!(
                "mask has {} flags for {} cells",
                mask.len(),
                n_cells
            )));
        }
        let n_years = (last_year - first_year + 1) as usize;
        let expected = n_years * 12 * n_cells;
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} years x 12 months x {} lats x {} lons = {}",
                values.len(),
                n_years,
                lats.len(),
                lons.len(),
                expected
            )));
        }
        for (t, slice) in values.chunks_mut(n_cells).enumerate() {
            for (c, v) in slice.iter_mut().enumerate() {
                if !mask[c] {
                    *v = f64::NAN;
                } else if !v.is_finite() {
                    let (i, j) = (c / lons.len(), c % lons.len());
                    return Err(Error::NonFinite {
                        value: *v,
                        location: format!(
                            "year {} month {} lat {} lon {}",
                            first_year + (t / 12) as i32,
                            t % 12 + 1,
                            lats[i],
                            lons[j]
                        ),
                    });
                }
            }
        }
        Ok(GridField { first_year, last_year, lats, lons, values, mask, meta })
    }

    /// A field with every cell valid and every value equal to `f(year, month, lat, lon)`.
    pub fn from_fn(
        years: (i32, i32),
        lats: Vec<f64>,
        lons: Vec<f64>,
        meta: GridMeta,
        mut f: impl FnMut(i32, u8, f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::new();
        for y in years.0..=years.1 {
            for m in 1..=12u8 {
                for &lat in &lats {
                    for &lon in &lons {
                        values.push(f(y, m, lat, lon));
                    }
                }
            }
        }
        let mask = vec![true; lats.len() * lons.len()];
        GridField::new(years, lats, lons, values, mask, meta)
    }

    pub fn years(&self) -> (i32, i32) {
        (self.first_year, self.last_year)
    }

    pub fn n_years(&self) -> usize {
        (self.last_year - self.first_year + 1) as usize
    }

    pub fn lats(&self) -> &[f64] {
        &self.lats
    }

    pub fn lons(&self) -> &[f64] {
        &self.lons
    }

    pub fn n_cells(&self) -> usize {
        self.lats.len() * self.lons.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut GridMeta {
        &mut self.meta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values of every cell at one (year, month), or `None` outside the record.
    pub fn slice(&self, year: i32, month: u8) -> Option<&[f64]> {
        let t = self.time_index(year, month)?;
        let n = self.n_cells();
        Some(&self.values[t * n..(t + 1) * n])
    }

    pub fn value(&self, year: i32, month: u8, lat_idx: usize, lon_idx: usize) -> Option<f64> {
        self.slice(year, month)
            .and_then(|s| s.get(lat_idx * self.lons.len() + lon_idx).copied())
    }

    pub(crate) fn time_index(&self, year: i32, month: u8) -> Option<usize> {
        if year < self.first_year || year > self.last_year || !(1..=12).contains(&month) {
            return None;
        }
        Some((year - self.first_year) as usize * 12 + (month - 1) as usize)
    }

    /// Normalized cosine-latitude weight of every cell inside `hemisphere`;
    /// masked and out-of-domain cells weigh zero.
    pub fn cell_weights(&self, hemisphere: Hemisphere) -> Result<Vec<f64>> {
        cell_weights(&self.lats, &self.lons, &self.mask, hemisphere)
    }

    /// Field equality for round-trip checks: coordinates, mask, metadata and
    /// the bit patterns of every unmasked value.
    pub fn same_as(&self, other: &GridField) -> bool {
        self.years() == other.years()
            && bits_eq(&self.lats, &other.lats)
            && bits_eq(&self.lons, &other.lons)
            && self.mask == other.mask
            && self.meta == other.meta
            && self.values.iter().zip(&other.values).enumerate().all(|(k, (a, b))| {
                !self.mask[k % self.n_cells()] || a.to_bits() == b.to_bits()
            })
    }
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn check_lats(lats: &[f64]) -> Result<()> {
    if lats.is_empty() {
        return Err(Error::ShapeMismatch("no latitudes".into()));
    }
    if let Some(bad) = lats.iter().find(|l| !(-90.0..=90.0).contains(*l)) {
        return Err(Error::InvalidInput(format!("latitude {bad} outside [-90, 90]")));
    }
    if lats.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotone("latitudes".into()));
    }
    Ok(())
}

fn check_lons(lons: &[f64]) -> Result<()> {
    if lons.is_empty() {
        return Err(Error::ShapeMismatch("no longitudes".into()));
    }
    if let Some(bad) = lons.iter().find(|l| !(-180.0..360.0).contains(*l)) {
        return Err(Error::InvalidInput(format!("longitude {bad} outside [-180, 360)")));
    }
    if lons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotone("longitudes".into()));
    }
    Ok(())
}

/// Cosine-latitude weights for a set of latitude bands, normalized to sum to 1.
pub fn area_weights(lats: &[f64]) -> Result<Vec<f64>> {
    if lats.is_empty() {
        return Err(Error::InvalidInput("empty latitude vector".into()));
    }
    if let Some(bad) = lats.iter().find(|l| !(-90.0..=90.0).contains(*l)) {
        return Err(Error::InvalidInput(format!("latitude {bad} outside [-90, 90]")));
    }
    let raw: Vec<f64> = lats.iter().map(|l| l.to_radians().cos().max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidInput("latitudes carry no area".into()));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Per-cell weights on a lat-lon grid restricted to valid cells of a hemisphere.
pub fn cell_weights(
    lats: &[f64],
    lons: &[f64],
    mask: &[bool],
    hemisphere: Hemisphere,
) -> Result<Vec<f64>> {
    let nlon = lons.len();
    let mut weights: Vec<f64> = (0..lats.len() * nlon)
        .map(|c| {
            let lat = lats[c / nlon];
            if mask[c] && hemisphere.contains_lat(lat) {
                lat.to_radians().cos().max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllMasked);
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(weights)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    years: [i32; 2],
    lats: Vec<f64>,
    lons: Vec<f64>,
    base_period: Option<[i32; 2]>,
    payload: String,
    payload_format: PayloadFormat,
    #[serde(default)]
    kind: FieldKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    masked_cells: Vec<[f64; 2]>,
}

/// Loads and validates a grid described by a JSON manifest.
pub fn load_grid(manifest_path: impl AsRef<Path>) -> Result<GridField> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|source| Error::Manifest { path: manifest_path.to_path_buf(), source })?;
    check_lats(&manifest.lats)?;
    check_lons(&manifest.lons)?;
    let [first_year, last_year] = manifest.years;
    if last_year < first_year {
        return Err(Error::ShapeMismatch(format!("empty year range {first_year}..={last_year}")));
    }

    let nlat = manifest.lats.len();
    let nlon = manifest.lons.len();
    let lat_index = coordinate_index(&manifest.lats);
    let lon_index = coordinate_index(&manifest.lons);

    let mut mask = vec![true; nlat * nlon];
    for [lat, lon] in &manifest.masked_cells {
        let (Some(&i), Some(&j)) = (lat_index.get(&key(*lat)), lon_index.get(&key(*lon))) else {
            return Err(Error::ShapeMismatch(format!("masked cell ({lat}, {lon}) not on grid")));
        };
        mask[i * nlon + j] = false;
    }

    let payload = resolve(manifest_path, &manifest.payload);
    let n_years = (last_year - first_year + 1) as usize;
    let expected = n_years * 12 * nlat * nlon;
    let values = match manifest.payload_format {
        PayloadFormat::F32Le => {
            let bytes = fs::read(&payload).map_err(|e| Error::io(&payload, e))?;
            if bytes.len() != expected * 4 {
                return Err(Error::ShapeMismatch(format!(
                    "payload holds {} bytes, manifest declares {} f32 values",
                    bytes.len(),
                    expected
                )));
            }
            bytes
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
                .collect()
        }
        PayloadFormat::Csv => {
            let mut values = vec![f64::NAN; expected];
            let mut seen = vec![false; expected];
            let mut reader = csv_reader(&payload)?;
            check_header(&mut reader, &payload, &["year", "month", "lat", "lon", "value"])?;
            let mut rows = 0usize;
            for record in reader.records() {
                let record = record.map_err(|e| Error::parse(&payload, e.to_string()))?;
                let row = rows + 2;
                rows += 1;
                if record.len() != 5 {
                    return Err(Error::parse(&payload, format!("line {row}: expected 5 columns")));
                }
                let year: i32 = field(&record, 0, &payload, row)?;
                let month: u8 = field(&record, 1, &payload, row)?;
                let lat: f64 = field(&record, 2, &payload, row)?;
                let lon: f64 = field(&record, 3, &payload, row)?;
                let value: f64 = field(&record, 4, &payload, row)?;
                let i = *lat_index.get(&key(lat)).ok_or_else(|| {
                    Error::ShapeMismatch(format!("line {row}: latitude {lat} not declared in manifest"))
                })?;
                let j = *lon_index.get(&key(lon)).ok_or_else(|| {
                    Error::ShapeMismatch(format!("line {row}: longitude {lon} not declared in manifest"))
                })?;
                if year < first_year || year > last_year || !(1..=12).contains(&month) {
                    return Err(Error::ShapeMismatch(format!(
                        "line {row}: time {year}-{month:02} outside declared range"
                    )));
                }
                let t = (year - first_year) as usize * 12 + (month - 1) as usize;
                let k = (t * nlat + i) * nlon + j;
                if seen[k] {
                    return Err(Error::ShapeMismatch(format!("line {row}: duplicate entry")));
                }
                seen[k] = true;
                values[k] = value;
            }
            if rows != expected {
                return Err(Error::ShapeMismatch(format!(
                    "payload holds {rows} rows, manifest declares {expected}"
                )));
            }
            values
        }
    };

    let meta = GridMeta {
        kind: manifest.kind,
        base_period: manifest.base_period.map(|[a, b]| (a, b)),
        provenance: if manifest.provenance.is_empty() {
            format!("loaded from {}", manifest_path.display())
        } else {
            manifest.provenance
        },
    };
    GridField::new((first_year, last_year), manifest.lats, manifest.lons, values, mask, meta)
}

/// Writes `field` as a manifest plus a payload file next to it, named after
/// the manifest with a `.csv` or `.f32` extension.
pub fn save_grid(field: &GridField, manifest_path: impl AsRef<Path>, format: PayloadFormat) -> Result<()> {
    let manifest_path = manifest_path.as_ref();
    let ext = match format {
        PayloadFormat::Csv => "csv",
        PayloadFormat::F32Le => "f32",
    };
    let payload_path = manifest_path.with_extension(ext);
    let payload_name = payload_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::InvalidInput(format!("bad manifest path {}", manifest_path.display())))?
        .to_string();

    let nlon = field.lons.len();
    let masked_cells = field
        .mask
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(c, _)| [field.lats[c / nlon], field.lons[c % nlon]])
        .collect();
    let manifest = Manifest {
        years: [field.first_year, field.last_year],
        lats: field.lats.clone(),
        lons: field.lons.clone(),
        base_period: field.meta.base_period.map(|(a, b)| [a, b]),
        payload: payload_name,
        payload_format: format,
        kind: field.meta.kind,
        provenance: field.meta.provenance.clone(),
        masked_cells,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(manifest_path, json).map_err(|e| Error::io(manifest_path, e))?;

    match format {
        PayloadFormat::F32Le => {
            let bytes: Vec<u8> = field.values.iter().flat_map(|&v| (v as f32).to_le_bytes()).collect();
            fs::write(&payload_path, bytes).map_err(|e| Error::io(&payload_path, e))?;
        }
        PayloadFormat::Csv => {
            let mut out = String::with_capacity(field.values.len() * 24 + 32);
            out.push_str("year,month,lat,lon,value\n");
            let n = field.n_cells();
            for (t, slice) in field.values.chunks(n).enumerate() {
                let year = field.first_year + (t / 12) as i32;
                let month = t % 12 + 1;
                for (c, v) in slice.iter().enumerate() {
                    use std::fmt::Write as _;
                    let _ = writeln!(
                        out,
                        "{year},{month},{},{},{v}",
                        field.lats[c / nlon],
                        field.lons[c % nlon]
                    );
                }
            }
            fs::write(&payload_path, out).map_err(|e| Error::io(&payload_path, e))?;
        }
    }
    Ok(())
}

fn key(x: f64) -> u64 {
    // Normalizes -0.0 so that "0" and "-0" address the same coordinate.
    (x + 0.0).to_bits()
}

fn coordinate_index(coords: &[f64]) -> HashMap<u64, usize> {
    coords.iter().enumerate().map(|(i, &c)| (key(c), i)).collect()
}

fn resolve(manifest_path: &Path, payload: &str) -> PathBuf {
    let p = Path::new(payload);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// A trimming CSV reader that skips `#` comment lines.
pub fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(file))
}

fn header_names(reader: &mut csv::Reader<fs::File>, path: &Path) -> Result<Vec<String>> {
    let headers = reader.headers().map_err(|e| Error::parse(path, e.to_string()))?;
    Ok(headers.iter().map(|h| h.to_ascii_lowercase()).collect())
}

fn check_header(reader: &mut csv::Reader<fs::File>, path: &Path, expected: &[&str]) -> Result<()> {
    let names = header_names(reader, path)?;
    if names != expected {
        return Err(Error::parse(
            path,
            format!("header {:?}, expected {}", names, expected.join(",")),
        ));
    }
    Ok(())
}

fn field<T: FromStr>(record: &csv::StringRecord, idx: usize, path: &Path, row: usize) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::parse(path, format!("line {row}: cannot parse '{raw}' in column {}", idx + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Annual,
}

/// A gap-free global (or regional-mean) temperature anomaly series.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSeries {
    frequency: Frequency,
    start_year: i32,
    start_month: u8,
    values: Vec<f64>,
}

impl GlobalSeries {
    pub fn annual(start_year: i32, values: Vec<f64>) -> Result<Self> {
        Self::build(Frequency::Annual, start_year, 1, values)
    }

    pub fn monthly(start_year: i32, start_month: u8, values: Vec<f64>) -> Result<Self> {
        if !(1..=12).contains(&start_month) {
            return Err(Error::InvalidInput(format!("start month {start_month}")));
        }
        Self::build(Frequency::Monthly, start_year, start_month, values)
    }

    fn build(frequency: Frequency, start_year: i32, start_month: u8, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty series".into()));
        }
        let series = GlobalSeries { frequency, start_year, start_month, values };
        if let Some((year, month, v)) = series.iter().find(|(_, _, v)| !v.is_finite()) {
            return Err(Error::NonFinite { value: v, location: format_key(year, month) });
        }
        Ok(series)
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_year(&self) -> i32 {
        self.start_year
    }

    pub fn last_year(&self) -> i32 {
        self.key_at(self.values.len() - 1).0
    }

    /// (year, month) of entry `k`; month is `None` for annual series.
    pub fn key_at(&self, k: usize) -> (i32, Option<u8>) {
        match self.frequency {
            Frequency::Annual => (self.start_year + k as i32, None),
            Frequency::Monthly => {
                let m0 = (self.start_month - 1) as usize + k;
                (self.start_year + (m0 / 12) as i32, Some((m0 % 12) as u8 + 1))
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Option<u8>, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| {
            let (y, m) = self.key_at(k);
            (y, m, v)
        })
    }

    /// Value at `year` (annual series) or at `year`-`month` (monthly series).
    pub fn get(&self, year: i32, month: Option<u8>) -> Option<f64> {
        let k = match (self.frequency, month) {
            (Frequency::Annual, None) => year.checked_sub(self.start_year)?,
            (Frequency::Monthly, Some(m)) if (1..=12).contains(&m) => {
                (year - self.start_year) * 12 + m as i32 - self.start_month as i32
            }
            _ => return None,
        };
        usize::try_from(k).ok().and_then(|k| self.values.get(k).copied())
    }

    /// Annual means. Monthly series keep only calendar years with all twelve
    /// months present.
    pub fn to_annual(&self) -> Result<GlobalSeries> {
        match self.frequency {
            Frequency::Annual => Ok(self.clone()),
            Frequency::Monthly => {
                let skip = (13 - self.start_month as usize) % 12;
                let first = self.start_year + if skip > 0 { 1 } else { 0 };
                let means: Vec<f64> = self.values[skip.min(self.values.len())..]
                    .chunks_exact(12)
                    .map(|c| c.iter().sum::<f64>() / 12.0)
                    .collect();
                if means.is_empty() {
                    return Err(Error::Insufficient("monthly series holds no complete year".into()));
                }
                GlobalSeries::annual(first, means)
            }
        }
    }

    /// Returns the same series with `f` applied to each value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GlobalSeries> {
        Self::build(self.frequency, self.start_year, self.start_month, self.values.iter().map(|&v| f(v)).collect())
    }
}

fn format_key(year: i32, month: Option<u8>) -> String {
    match month {
        Some(m) => format!("{year}-{m:02}"),
        None => year.to_string(),
    }
}

/// Region a GDP trajectory refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GdpRegion {
    Global,
    Rice(RiceRegion),
}

impl fmt::Display for GdpRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GdpRegion::Global => f.write_str("GLOBAL"),
            GdpRegion::Rice(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for GdpRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("GLOBAL") || s.eq_ignore_ascii_case("WORLD") {
            Ok(GdpRegion::Global)
        } else {
            s.parse().map(GdpRegion::Rice)
        }
    }
}

/// GDP in billion US$2005 by year for one region.
#[derive(Debug, Clone, PartialEq)]
pub struct GdpTrajectory {
    region: GdpRegion,
    points: Vec<(i32, f64)>,
}

impl GdpTrajectory {
    pub fn new(region: GdpRegion, points: Vec<(i32, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput(format!("no GDP points for {region}")));
        }
        for w in points.windows(2) {
            if w[1].0 == w[0].0 {
                return Err(Error::DuplicateKey(format!("{region} {}", w[0].0)));
            }
            if w[1].0 < w[0].0 {
                return Err(Error::NonMonotone(format!("GDP years for {region}")));
            }
        }
        for &(year, value) in &points {
            if !value.is_finite() {
                return Err(Error::NonFinite { value, location: format!("GDP {region} {year}") });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveGdp { region: region.to_string(), year, value });
            }
        }
        Ok(GdpTrajectory { region, points })
    }

    /// A trajectory with the same value in every year of `years`.
    pub fn flat(region: GdpRegion, years: (i32, i32), value: f64) -> Result<Self> {
        Self::new(region, (years.0..=years.1).map(|y| (y, value)).collect())
    }

    pub fn region(&self) -> GdpRegion {
        self.region
    }

    pub fn points(&self) -> &[(i32, f64)] {
        &self.points
    }

    /// GDP at exactly `year`, if that year is a point of the trajectory.
    pub fn at(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.region, self.points.iter().map(|&(y, v)| (y, v * factor)).collect())
    }
}

pub type GdpSet = BTreeMap<GdpRegion, GdpTrajectory>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    GlobalTemp,
    Gdp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSeries {
    GlobalTemp(GlobalSeries),
    Gdp(GdpSet),
}

pub fn load_series(path: impl AsRef<Path>, kind: SeriesKind) -> Result<LoadedSeries> {
    match kind {
        SeriesKind::GlobalTemp => load_global_series(path).map(LoadedSeries::GlobalTemp),
        SeriesKind::Gdp => load_gdp(path).map(LoadedSeries::Gdp),
    }
}

/// Reads `year,value` (annual) or `year,month,value` (monthly) CSV.
pub fn load_global_series(path: impl AsRef<Path>) -> Result<GlobalSeries> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let names = header_names(&mut reader, path)?;
    let monthly = match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["year", "value"] => false,
        ["year", "month", "value"] => true,
        _ => {
            return Err(Error::parse(path, format!("header {names:?}, expected year[,month],value")));
        }
    };
    let mut entries: BTreeMap<(i32, u8), f64> = BTreeMap::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        let row = n + 2;
        let year: i32 = field(&record, 0, path, row)?;
        let (month, value) = if monthly {
            let m: u8 = field(&record, 1, path, row)?;
            if !(1..=12).contains(&m) {
                return Err(Error::parse(path, format!("line {row}: month {m}")));
            }
            (m, field(&record, 2, path, row)?)
        } else {
            (1, field(&record, 1, path, row)?)
        };
        if entries.insert((year, month), value).is_some() {
            let key = format_key(year, monthly.then_some(month));
            return Err(Error::DuplicateKey(key));
        }
    }
    let (&(y0, m0), _) = entries
        .iter()
        .next()
        .ok_or_else(|| Error::parse(path, "no data rows"))?;
    let mut expected = (y0, m0);
    let mut values = Vec::with_capacity(entries.len());
    for (&(y, m), &v) in &entries {
        if (y, m) != expected {
            let (ey, em) = expected;
            return Err(Error::Gap(format_key(ey, monthly.then_some(em))));
        }
        values.push(v);
        expected = if monthly {
            if m == 12 { (y + 1, 1) } else { (y, m + 1) }
        } else {
            (y + 1, 1)
        };
    }
    if monthly {
        GlobalSeries::monthly(y0, m0, values)
    } else {
        GlobalSeries::annual(y0, values)
    }
}

pub fn save_global_series(series: &GlobalSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    match series.frequency {
        Frequency::Annual => out.push_str("year,value\n"),
        Frequency::Monthly => out.push_str("year,month,value\n"),
    }
    for (y, m, v) in series.iter() {
        match m {
            Some(m) => out.push_str(&format!("{y},{m},{v}\n")),
            None => out.push_str(&format!("{y},{v}\n")),
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads `year,region,gdp` CSV into one trajectory per region.
pub fn load_gdp(path: impl AsRef<Path>) -> Result<GdpSet> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    check_header(&mut reader, path, &["year", "region", "gdp"])?;
    let mut by_region: BTreeMap<GdpRegion, BTreeMap<i32, f64>> = BTreeMap::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(path, e.to_string()))?;
        let row = n + 2;
        let year: i32 = field(&record, 0, path, row)?;
        let region: GdpRegion = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e: Error| Error::parse(path, format!("line {row}: {e}")))?;
        let gdp: f64 = field(&record, 2, path, row)?;
        if gdp <= 0.0 {
            return Err(Error::NonPositiveGdp { region: region.to_string(), year, value: gdp });
        }
        if by_region.entry(region).or_default().insert(year, gdp).is_some() {
            return Err(Error::DuplicateKey(format!("{region} {year}")));
        }
    }
    if by_region.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }
    by_region
        .into_iter()
        .map(|(region, points)| Ok((region, GdpTrajectory::new(region, points.into_iter().collect())?)))
        .collect()
}

pub fn save_gdp(set: &GdpSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = String::from("year,region,gdp\n");
    for traj in set.values() {
        for (y, v) in &traj.points {
            out.push_str(&format!("{y},{},{v}\n", traj.region));
        }
    }
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn single_cell_csv_loads() {
        let dir = tempfile::tempdir().unwrap();
        // A grid always carries all twelve calendar months.
        let mut rows = String::from("year,month,lat,lon,value\n");
        for m in 1..=12 {
            rows.push_str(&format!("2050,{m},0,0,2.5\n"));
        }
        write(dir.path(), "v.csv", &rows);
        let m = write(
            dir.path(),
            "m.json",
            r#"{"years":[2050,2050],"lats":[0],"lons":[0],"base_period":[1850,1880],"payload":"v.csv","payload_format":"csv"}"#,
        );
        let g = load_grid(&m).unwrap();
        assert_eq!(g.value(2050, 1, 0, 0), Some(2.5));
        assert_eq!(g.meta().base_period, Some((1850, 1880)));
        assert!(g.meta().provenance.contains("m.json"));
    }

    #[test]
    fn undeclared_latitude_is_shape_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = String::from("year,month,lat,lon,value\n");
        for m in 1..=12 {
            for lat in [-30, 0, 30] {
                rows.push_str(&format!("2000,{m},{lat},10,1.0\n"));
            }
        }
        write(dir.path(), "v.csv", &rows);
        let m = write(
            dir.path(),
            "m.json",
            r#"{"years":[2000,2000],"lats":[-30,30],"lons":[10],"base_period":null,"payload":"v.csv","payload_format":"csv"}"#,
        );
        assert!(matches!(load_grid(&m), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn binary_payload_length_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("v.f32"), vec![0u8; 12 * 4 * 3]).unwrap();
        let m = write(
            dir.path(),
            "m.json",
            r#"{"years":[2000,2000],"lats":[-30,30],"lons":[10],"base_period":null,"payload":"v.f32","payload_format":"f32le"}"#,
        );
        assert!(matches!(load_grid(&m), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn missing_payload_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(
            dir.path(),
            "m.json",
            r#"{"years":[2000,2000],"lats":[0],"lons":[0],"base_period":null,"payload":"nope.csv","payload_format":"csv"}"#,
        );
        assert!(matches!(load_grid(&m), Err(Error::Io { .. })));
        assert!(matches!(load_grid(dir.path().join("absent.json")), Err(Error::Io { .. })));
    }

    #[test]
    fn invariants_are_enforced_on_construction() {
        let meta = GridMeta::default();
        let nan = GridField::new((2000, 2000), vec![0.0], vec![0.0], vec![f64::NAN; 12], vec![true], meta.clone());
        assert!(matches!(nan, Err(Error::NonFinite { .. })));
        let masked = GridField::new((2000, 2000), vec![0.0], vec![0.0], vec![f64::NAN; 12], vec![false], meta.clone());
        assert!(masked.is_ok());
        let desc = GridField::new((2000, 2000), vec![10.0, 0.0], vec![0.0], vec![0.0; 24], vec![true; 2], meta.clone());
        assert!(matches!(desc, Err(Error::NonMonotone(_))));
        let short = GridField::new((2000, 2001), vec![0.0], vec![0.0], vec![0.0; 12], vec![true], meta);
        assert!(matches!(short, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn masked_cells_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let values: Vec<f64> = (0..24).map(|k| k as f64 * 0.1).collect();
        let field = GridField::new(
            (2000, 2000),
            vec![-10.0, 10.0],
            vec![5.0],
            values,
            vec![true, false],
            GridMeta { provenance: "test".into(), ..Default::default() },
        )
        .unwrap();
        for format in [PayloadFormat::Csv, PayloadFormat::F32Le] {
            let m = dir.path().join("out.json");
            save_grid(&field, &m, format).unwrap();
            let back = load_grid(&m).unwrap();
            assert_eq!(back.mask(), &[true, false]);
            if format == PayloadFormat::Csv {
                assert!(back.same_as(&field));
            }
        }
    }

    #[test]
    fn area_weight_examples() {
        assert_eq!(area_weights(&[0.0]).unwrap(), vec![1.0]);
        let w = area_weights(&[0.0, 60.0]).unwrap();
        assert_relative_eq!(w[0], 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(w[1], 1.0 / 3.0, max_relative = 1e-12);
        let w = area_weights(&[-45.0, 45.0]).unwrap();
        assert_eq!(w[0], w[1]);
        assert!(area_weights(&[]).is_err());
    }

    #[test]
    fn cell_weights_renormalize_over_mask_and_hemisphere() {
        let w = cell_weights(&[-30.0, 30.0], &[0.0, 90.0], &[true, true, false, true], Hemisphere::Global).unwrap();
        assert_eq!(w[2], 0.0);
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        let w = cell_weights(&[-30.0, 30.0], &[0.0], &[true, true], Hemisphere::South).unwrap();
        assert_eq!(w, vec![1.0, 0.0]);
        assert!(matches!(
            cell_weights(&[-30.0], &[0.0], &[true], Hemisphere::North),
            Err(Error::AllMasked)
        ));
    }

    #[test]
    fn annual_series_loads() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "g.csv", "year,value\n2020,1.0\n2021,1.1\n");
        let s = load_global_series(&p).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(2021, None), Some(1.1));
        assert_eq!(s.frequency(), Frequency::Annual);
    }

    #[test]
    fn monthly_gap_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = String::from("year,month,value\n");
        for m in (1..=12).filter(|&m| m != 7) {
            rows.push_str(&format!("2020,{m},0.5\n"));
        }
        let p = write(dir.path(), "g.csv", &rows);
        match load_global_series(&p) {
            Err(Error::Gap(at)) => assert_eq!(at, "2020-07"),
            other => panic!("expected gap, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "g.csv", "year,value\n2020,1.0\n2020,1.1\n");
        assert!(matches!(load_global_series(&p), Err(Error::DuplicateKey(_))));
    }

    #[test]
    fn monthly_to_annual_drops_partial_years() {
        let values: Vec<f64> = (0..28).map(|k| k as f64).collect();
        let s = GlobalSeries::monthly(2000, 7, values).unwrap();
        let a = s.to_annual().unwrap();
        assert_eq!(a.first_year(), 2001);
        assert_eq!(a.len(), 1);
        assert_relative_eq!(a.values()[0], (6..18).sum::<i32>() as f64 / 12.0);
        assert_eq!(s.get(2001, Some(1)), Some(6.0));
        assert_eq!(s.last_year(), 2002);
    }

    #[test]
    fn gdp_loads_global_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "gdp.csv", "year,region,gdp\n2020,GLOBAL,87270\n2020,INDIA,5000\n");
        let set = load_gdp(&p).unwrap();
        assert_eq!(set[&GdpRegion::Global].at(2020), Some(87_270.0));
        assert_eq!(set[&GdpRegion::Rice(RiceRegion::India)].at(2020), Some(5000.0));
        match load_series(&p, SeriesKind::Gdp).unwrap() {
            LoadedSeries::Gdp(s) => assert_eq!(s.len(), 2),
            _ => unreachable!(),
        }
    }

    #[test]
    fn gdp_must_be_positive() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "gdp.csv", "year,region,gdp\n2020,GLOBAL,0\n");
        assert!(matches!(load_gdp(&p), Err(Error::NonPositiveGdp { .. })));
        assert!(GdpTrajectory::new(GdpRegion::Global, vec![(2020, -1.0)]).is_err());
    }
}
