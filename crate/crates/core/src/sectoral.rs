//! Seasonal and monthly damage coefficients for fifteen impact sectors.
//!
//! Each sector's loss at the calibration warming is split over seasons by
//! activity weights, then spread over the three months of each season and
//! over the two hemispheres by their GDP shares. Seasons are hemisphere
//! dependent: northern winter (DJF) is southern summer.
//!
//! Coefficients are stored as loss fractions of GDP: positive values are
//! losses, negative values benefits (Time use).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::climatology::WarmingMoments;
use crate::damage::DamageParams;
use crate::error::{Error, Result};
use crate::variant::{Hemisphere, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    Agriculture,
    Forestry,
    Energy,
    Water,
    CoastalDefense,
    Dryland,
    Wetland,
    Ecosystem,
    Health,
    AirPollution,
    TimeUse,
    Settlements,
    Catastrophe,
    Migration,
    Amenity,
}

impl Sector {
    pub const ALL: [Sector; 15] = [
        Sector::Agriculture,
        Sector::Forestry,
        Sector::Energy,
        Sector::Water,
        Sector::CoastalDefense,
        Sector::Dryland,
        Sector::Wetland,
        Sector::Ecosystem,
        Sector::Health,
        Sector::AirPollution,
        Sector::TimeUse,
        Sector::Settlements,
        Sector::Catastrophe,
        Sector::Migration,
        Sector::Amenity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sector::Agriculture => "Agriculture",
            Sector::Forestry => "Forestry",
            Sector::Energy => "Energy",
            Sector::Water => "Water",
            Sector::CoastalDefense => "Coastal defense",
            Sector::Dryland => "Dryland",
            Sector::Wetland => "Wetland",
            Sector::Ecosystem => "Ecosystem",
            Sector::Health => "Health",
            Sector::AirPollution => "Air pollution",
            Sector::TimeUse => "Time use",
            Sector::Settlements => "Settlements",
            Sector::Catastrophe => "Catastrophe",
            Sector::Migration => "Migration",
            Sector::Amenity => "Amenity",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Sector::ALL
            .into_iter()
            .find(|sec| {
                sec.name().chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase() == norm
            })
            .ok_or_else(|| Error::InvalidInput(format!("unknown sector '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Winter,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Fall, Season::Winter];

    /// Season of calendar month `month` in `hemisphere`. The south is shifted
    /// by two seasons; the global domain follows the north.
    pub fn of_month(month: u8, hemisphere: Hemisphere) -> Season {
        let north = match month {
            3..=5 => Season::Spring,
            6..=8 => Season::Summer,
            9..=11 => Season::Fall,
            _ => Season::Winter,
        };
        match hemisphere {
            Hemisphere::South => north.opposite(),
            _ => north,
        }
    }

    pub fn opposite(self) -> Season {
        match self {
            Season::Spring => Season::Fall,
            Season::Summer => Season::Winter,
            Season::Fall => Season::Spring,
            Season::Winter => Season::Summer,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Fall => "fall",
            Season::Winter => "winter",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Source column of the built-in sectoral impact table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Study {
    Fankhauser,
    Berz,
    Tol,
    Nordhaus,
    #[default]
    Average,
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fankhauser" => Ok(Study::Fankhauser),
            "berz" => Ok(Study::Berz),
            "tol" => Ok(Study::Tol),
            "nordhaus" => Ok(Study::Nordhaus),
            "average" => Ok(Study::Average),
            other => Err(Error::InvalidInput(format!("unknown study '{other}'"))),
        }
    }
}

// Impact on GDP (%) at 2.5 C per sector: Fankhauser, Berz, Tol, Nordhaus, Average.
// Negative values are losses.
const IMPACTS: [[f64; 5]; 15] = [
    [-0.20, -0.19, -0.13, -0.13, -0.16],
    [-0.01, -0.02, -0.01, -0.01, -0.01],
    [-0.12, -0.11, -0.12, -0.12, -0.12],
    [-0.24, -0.23, -0.24, -0.24, -0.24],
    [0.00, -0.01, -0.08, -0.03, -0.03],
    [-0.07, -0.07, -0.09, -0.08, -0.08],
    [-0.16, -0.16, -0.17, -0.16, -0.16],
    [-0.21, -0.20, -0.19, -0.20, -0.20],
    [-0.26, -0.40, -0.77, -0.10, -0.38],
    [-0.08, -0.08, -0.08, -0.08, -0.08],
    [0.29, 0.29, 0.29, 0.29, 0.29],
    [-0.17, -0.17, -0.17, -0.17, -0.17],
    [-0.01, -0.01, -0.01, -1.02, -0.27],
    [-0.02, -0.02, -0.12, -0.07, -0.06],
    [-0.33, -0.33, -0.33, -0.33, -0.33],
];

// Spring, summer, fall, winter activity weights per sector.
const SEASON_WEIGHTS: [[f64; 4]; 15] = [
    [0.25, 0.5, 0.25, 0.0],
    [0.25, 0.5, 0.25, 0.0],
    [0.0, 0.5, 0.0, 0.5],
    [0.0, 1.0, 0.0, 0.0],
    [0.25, 0.25, 0.25, 0.25],
    [0.25, 0.25, 0.25, 0.25],
    [0.25, 0.25, 0.25, 0.25],
    [0.25, 0.25, 0.25, 0.25],
    [0.0, 0.5, 0.0, 0.5],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.5, 0.0, 0.5],
    [0.25, 0.25, 0.25, 0.25],
    [0.25, 0.25, 0.25, 0.25],
    [0.25, 0.25, 0.25, 0.25],
    [0.0, 0.5, 0.0, 0.5],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorRow {
    pub sector: Sector,
    /// Loss fraction of GDP at the calibration warming; negative for benefits.
    pub loss_at_c: f64,
    /// Spring, summer, fall, winter.
    pub season_weights: [f64; 4],
}

/// Per-sector losses at the calibration warming and their seasonal weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorCalibration {
    rows: Vec<SectorRow>,
}

impl SectorCalibration {
    /// Validates rows: every sector exactly once, weights in [0, 1] summing to 1.
    pub fn new(mut rows: Vec<SectorRow>) -> Result<Self> {
        rows.sort_by_key(|r| r.sector);
        if rows.len() != Sector::ALL.len() || rows.iter().zip(Sector::ALL).any(|(r, s)| r.sector != s) {
            return Err(Error::InvalidInput("calibration must list each of the 15 sectors once".into()));
        }
        for r in &rows {
            if !r.loss_at_c.is_finite() {
                return Err(Error::NonFinite { value: r.loss_at_c, location: format!("impact of {}", r.sector) });
            }
            if r.season_weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return Err(Error::InvalidInput(format!("{}: season weight outside [0, 1]", r.sector)));
            }
            let total: f64 = r.season_weights.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("{}: season weights sum to {total}", r.sector)));
            }
        }
        Ok(SectorCalibration { rows })
    }

    /// The built-in literature table for one study column.
    pub fn builtin(study: Study) -> Self {
        let col = match study {
            Study::Fankhauser => 0,
            Study::Berz => 1,
            Study::Tol => 2,
            Study::Nordhaus => 3,
            Study::Average => 4,
        };
        let rows = Sector::ALL
            .iter()
            .map(|&sector| SectorRow {
                sector,
                loss_at_c: -IMPACTS[sector.index()][col] / 100.0,
                season_weights: SEASON_WEIGHTS[sector.index()],
            })
            .collect();
        SectorCalibration::new(rows).expect("built-in table is valid")
    }

    /// Reads `sector,impact,spring,summer,fall,winter` where `impact` is the
    /// signed GDP impact in percent (negative = loss).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::parse(path, e.to_string()))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        if header != ["sector", "impact", "spring", "summer", "fall", "winter"] {
            return Err(Error::parse(path, "header must be sector,impact,spring,summer,fall,winter"));
        }
        let mut rows = Vec::new();
        for (n, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::parse(path, format!("line {}: bad number in column {}", n + 2, i + 1)))
            };
            let sector: Sector = rec.get(0).unwrap_or("").parse()?;
            rows.push(SectorRow {
                sector,
                loss_at_c: -num(1)? / 100.0,
                season_weights: [num(2)?, num(3)?, num(4)?, num(5)?],
            });
        }
        SectorCalibration::new(rows)
    }

    pub fn rows(&self) -> &[SectorRow] {
        &self.rows
    }

    pub fn row(&self, sector: Sector) -> &SectorRow {
        &self.rows[sector.index()]
    }

    /// Sum of sector losses at the calibration warming.
    pub fn total_loss(&self) -> f64 {
        self.rows.iter().map(|r| r.loss_at_c).sum()
    }

    /// The same table with every sector's loss set to zero except `keep`.
    pub fn only(&self, keep: Sector) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| SectorRow { loss_at_c: if r.sector == keep { r.loss_at_c } else { 0.0 }, ..*r })
            .collect();
        SectorCalibration { rows }
    }
}

impl Default for SectorCalibration {
    fn default() -> Self {
        SectorCalibration::builtin(Study::Average)
    }
}

/// Loss fraction at the calibration warming per sector and season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalCoefficients {
    coeff: Vec<[f64; 4]>,
}

impl SeasonalCoefficients {
    pub fn get(&self, sector: Sector, season: Season) -> f64 {
        self.coeff[sector.index()][season as usize]
    }

    pub fn season_total(&self, season: Season) -> f64 {
        self.coeff.iter().map(|c| c[season as usize]).sum()
    }

    pub fn total(&self) -> f64 {
        Season::ALL.iter().map(|&s| self.season_total(s)).sum()
    }
}

/// Seasonal coefficient of each sector: its season weight times its loss.
pub fn seasonal_params(cal: &SectorCalibration) -> Result<SeasonalCoefficients> {
    let mut coeff = Vec::with_capacity(cal.rows.len());
    for r in &cal.rows {
        let total: f64 = r.season_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("{}: season weights sum to {total}", r.sector)));
        }
        coeff.push(r.season_weights.map(|w| w * r.loss_at_c));
    }
    Ok(SeasonalCoefficients { coeff })
}

/// Share of global GDP produced in each hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdpWeights {
    pub north: f64,
    pub south: f64,
}

impl GdpWeights {
    pub const NORTH_GDP: f64 = 77_800.0;
    pub const SOUTH_GDP: f64 = 9_470.0;
    pub const GLOBAL_GDP: f64 = 87_270.0;

    pub fn new(north: f64, south: f64) -> Result<Self> {
        if !(north >= 0.0 && south >= 0.0) || !(north + south).is_finite() {
            return Err(Error::InvalidInput(format!("GDP weights {north}, {south}")));
        }
        Ok(GdpWeights { north, south })
    }

    /// Weights from absolute hemisphere GDP levels.
    pub fn from_gdp(north: f64, south: f64) -> Result<Self> {
        GdpWeights::new(north / (north + south), south / (north + south))
    }

    pub fn get(&self, hemisphere: Hemisphere) -> f64 {
        match hemisphere {
            Hemisphere::North => self.north,
            Hemisphere::South => self.south,
            Hemisphere::Global => self.north + self.south,
        }
    }
}

impl Default for GdpWeights {
    fn default() -> Self {
        GdpWeights {
            north: Self::NORTH_GDP / Self::GLOBAL_GDP,
            south: Self::SOUTH_GDP / Self::GLOBAL_GDP,
        }
    }
}

pub const HEMISPHERES: [Hemisphere; 2] = [Hemisphere::North, Hemisphere::South];

/// Loss fraction at the calibration warming per month, sector and hemisphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyCoefficients {
    /// Indexed [month - 1][sector][0 = north, 1 = south].
    coeff: Vec<Vec<[f64; 2]>>,
    pub gdp_weights: GdpWeights,
}

fn hemi_index(h: Hemisphere) -> usize {
    match h {
        Hemisphere::South => 1,
        _ => 0,
    }
}

impl MonthlyCoefficients {
    pub fn get(&self, month: u8, sector: Sector, hemisphere: Hemisphere) -> f64 {
        let row = self.coeff[month as usize - 1][sector.index()];
        match hemisphere {
            Hemisphere::Global => row[0] + row[1],
            h => row[hemi_index(h)],
        }
    }

    pub fn month_total(&self, month: u8) -> f64 {
        self.coeff[month as usize - 1].iter().map(|r| r[0] + r[1]).sum()
    }

    pub fn sector_total(&self, sector: Sector) -> f64 {
        self.coeff.iter().map(|m| m[sector.index()][0] + m[sector.index()][1]).sum()
    }

    pub fn total(&self) -> f64 {
        (1..=12).map(|m| self.month_total(m)).sum()
    }
}

/// Monthly coefficient for hemisphere h: GDP share of h times one third of
/// the seasonal coefficient of the season the month falls in for h.
pub fn monthly_params(seasonal: &SeasonalCoefficients, gdp_weights: GdpWeights) -> MonthlyCoefficients {
    let coeff = (1..=12u8)
        .map(|m| {
            Sector::ALL
                .iter()
                .map(|&s| {
                    HEMISPHERES.map(|h| gdp_weights.get(h) * seasonal.get(s, Season::of_month(m, h)) / 3.0)
                })
                .collect()
        })
        .collect();
    MonthlyCoefficients { coeff, gdp_weights }
}

/// Moments (or references) keyed by calendar month and hemisphere.
pub type MonthHemisphereMoments = BTreeMap<(u8, Hemisphere), WarmingMoments>;

/// Loss fractions of global GDP by month and sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorMonthLosses {
    pub variant: Variant,
    /// Indexed [month - 1][sector].
    pub loss: Vec<Vec<f64>>,
}

impl SectorMonthLosses {
    pub fn get(&self, month: u8, sector: Sector) -> f64 {
        self.loss[month as usize - 1][sector.index()]
    }

    pub fn sector_total(&self, sector: Sector) -> f64 {
        self.loss.iter().map(|m| m[sector.index()]).sum()
    }

    pub fn month_total(&self, month: u8) -> f64 {
        self.loss[month as usize - 1].iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.loss.iter().flatten().sum()
    }
}

/// Evaluates every (month, sector) damage from hemisphere-specific moments.
pub fn monthly_damage(
    coeffs: &MonthlyCoefficients,
    moments: &MonthHemisphereMoments,
    params: &DamageParams,
    references: &MonthHemisphereMoments,
) -> Result<SectorMonthLosses> {
    let variant = moments
        .values()
        .next()
        .map(|m| m.variant)
        .ok_or_else(|| Error::Insufficient("no monthly moments supplied".into()))?;
    let c2 = params.c * params.c;
    let mut excess = [[0.0f64; 2]; 12];
    for m in 1..=12u8 {
        for h in HEMISPHERES {
            let mo = moments
                .get(&(m, h))
                .ok_or_else(|| Error::Insufficient(format!("no moments for month {m} {h}")))?;
            let re = references
                .get(&(m, h))
                .ok_or_else(|| Error::Insufficient(format!("no reference for month {m} {h}")))?;
            for x in [mo, re] {
                if x.variant != variant {
                    return Err(Error::VariantMismatch { expected: variant, got: x.variant });
                }
            }
            excess[m as usize - 1][hemi_index(h)] = (mo.mean_sq - re.mean_sq) / c2;
        }
    }
    let loss = (1..=12u8)
        .map(|m| {
            let e = excess[m as usize - 1];
            Sector::ALL
                .iter()
                .map(|&s| {
                    coeffs.get(m, s, Hemisphere::North) * e[0] + coeffs.get(m, s, Hemisphere::South) * e[1]
                })
                .collect()
        })
        .collect();
    Ok(SectorMonthLosses { variant, loss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_table_totals() {
        let cal = SectorCalibration::default();
        // Table rows sum to 2.00; the published total is 2.01 after rounding.
        assert!((cal.total_loss() - 0.0201).abs() <= 0.0002 + 1e-12);
        assert_relative_eq!(cal.row(Sector::TimeUse).loss_at_c, -0.0029, max_relative = 1e-12);
        // Column row sums; the printed totals differ by up to 0.02 points.
        for (study, sum) in [
            (Study::Fankhauser, 0.0159),
            (Study::Berz, 0.0171),
            (Study::Tol, 0.0222),
            (Study::Nordhaus, 0.0245),
        ] {
            assert_relative_eq!(SectorCalibration::builtin(study).total_loss(), sum, max_relative = 1e-9);
        }
    }

    #[test]
    fn water_is_summer_only() {
        let s = seasonal_params(&SectorCalibration::default()).unwrap();
        assert_relative_eq!(s.get(Sector::Water, Season::Summer), 0.0024, max_relative = 1e-12);
        for season in [Season::Spring, Season::Fall, Season::Winter] {
            assert_eq!(s.get(Sector::Water, season), 0.0);
        }
    }

    #[test]
    fn time_use_winter_is_a_benefit() {
        let s = seasonal_params(&SectorCalibration::default()).unwrap();
        assert_relative_eq!(s.get(Sector::TimeUse, Season::Winter), -0.00145, max_relative = 1e-12);
    }

    #[test]
    fn season_totals_match_published_values() {
        let s = seasonal_params(&SectorCalibration::default()).unwrap();
        let expected = [0.0029, 0.0092, 0.0029, 0.0052];
        for (season, e) in Season::ALL.iter().zip(expected) {
            assert!((s.season_total(*season) - e).abs() <= 1e-4, "{season}: {}", s.season_total(*season));
        }
    }

    #[test]
    fn bad_weight_row_is_rejected() {
        let mut rows = SectorCalibration::default().rows().to_vec();
        rows[0].season_weights = [0.5, 0.5, 0.5, 0.0];
        assert!(SectorCalibration::new(rows).is_err());
        let cal = SectorCalibration {
            rows: vec![SectorRow { sector: Sector::Water, loss_at_c: 0.1, season_weights: [0.2, 0.2, 0.2, 0.2] }],
        };
        assert!(seasonal_params(&cal).is_err());
    }

    #[test]
    fn energy_january_north() {
        let m = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
        let expected = 77_800.0 / 87_270.0 / 3.0 * (0.5 * 0.0012);
        assert_relative_eq!(m.get(1, Sector::Energy, Hemisphere::North), expected, max_relative = 1e-12);
        assert!((m.get(1, Sector::Energy, Hemisphere::North) - 0.0001783).abs() < 5e-9);
    }

    #[test]
    fn monthly_coefficients_conserve_annual_total() {
        let cal = SectorCalibration::default();
        let m = monthly_params(&seasonal_params(&cal).unwrap(), GdpWeights::default());
        assert_relative_eq!(m.total(), cal.total_loss(), max_relative = 1e-9);
        for s in Sector::ALL {
            assert_relative_eq!(m.sector_total(s), cal.row(s).loss_at_c, max_relative = 1e-9, epsilon = 1e-18);
        }
    }

    #[test]
    fn north_only_weights_give_a_third_of_each_season() {
        let s = seasonal_params(&SectorCalibration::default()).unwrap();
        let m = monthly_params(&s, GdpWeights::new(1.0, 0.0).unwrap());
        let summer: f64 = [6, 7, 8].iter().map(|&mo| m.month_total(mo)).sum();
        assert_relative_eq!(summer, s.season_total(Season::Summer), max_relative = 1e-12);
        assert_relative_eq!(m.month_total(7), s.season_total(Season::Summer) / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn south_seasons_are_shifted() {
        assert_eq!(Season::of_month(1, Hemisphere::North), Season::Winter);
        assert_eq!(Season::of_month(1, Hemisphere::South), Season::Summer);
        assert_eq!(Season::of_month(4, Hemisphere::South), Season::Fall);
        assert_eq!(Season::of_month(10, Hemisphere::South), Season::Spring);
    }

    fn uniform(variant: Variant, mean: f64) -> MonthHemisphereMoments {
        let mut map = BTreeMap::new();
        for m in 1..=12 {
            for h in HEMISPHERES {
                map.insert((m, h), WarmingMoments::new(variant, mean, 0.0).unwrap());
            }
        }
        map
    }

    #[test]
    fn calibration_warming_everywhere_reproduces_total() {
        let m = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
        let losses = monthly_damage(&m, &uniform(Variant::None, 2.5), &DamageParams::default(), &uniform(Variant::None, 0.0)).unwrap();
        assert_relative_eq!(losses.total(), SectorCalibration::default().total_loss(), max_relative = 1e-12);
        let zero = monthly_damage(&m, &uniform(Variant::None, 0.0), &DamageParams::default(), &uniform(Variant::None, 0.0)).unwrap();
        assert!(zero.loss.iter().flatten().all(|l| *l == 0.0));
    }

    #[test]
    fn water_losses_follow_its_season() {
        let m = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
        let losses = monthly_damage(&m, &uniform(Variant::Stvar, 1.0), &DamageParams::default(), &uniform(Variant::Stvar, 0.0)).unwrap();
        for month in 1..=12u8 {
            let w = losses.get(month, Sector::Water);
            let active = matches!(month, 6..=8 | 12 | 1 | 2);
            assert_eq!(w > 0.0, active, "month {month}");
            if !active {
                assert_eq!(w, 0.0);
            }
        }
        assert!(losses.sector_total(Sector::TimeUse) < 0.0);
    }

    #[test]
    fn missing_or_mixed_moments_are_rejected() {
        let m = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
        let mut partial = uniform(Variant::Svar, 1.0);
        partial.remove(&(7, Hemisphere::South));
        let refs = uniform(Variant::Svar, 0.0);
        assert!(matches!(monthly_damage(&m, &partial, &DamageParams::default(), &refs), Err(Error::Insufficient(_))));
        let mut mixed = uniform(Variant::Svar, 1.0);
        mixed.insert((3, Hemisphere::North), WarmingMoments::zero(Variant::Tvar));
        assert!(matches!(monthly_damage(&m, &mixed, &DamageParams::default(), &refs), Err(Error::VariantMismatch { .. })));
    }

    #[test]
    fn sector_csv_override() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cal.csv");
        let mut text = String::from("sector,impact,spring,summer,fall,winter\n");
        for s in Sector::ALL {
            let impact = if s == Sector::Water { -0.5 } else { 0.0 };
            text.push_str(&format!("{},{impact},0.25,0.25,0.25,0.25\n", s.name()));
        }
        fs::write(&p, text).unwrap();
        let cal = SectorCalibration::from_csv(&p).unwrap();
        assert_relative_eq!(cal.total_loss(), 0.005, max_relative = 1e-12);
        assert_eq!("coastal defense".parse::<Sector>().unwrap(), Sector::CoastalDefense);
    }
}
