//! RICE regional damage functions.
//!
//! The original regional functions are `gamma*T + alpha*T^2` in percent of
//! regional GDP. They are refit to a pure quadratic by least squares over a
//! grid of warming levels, evaluated on warming moments like the global
//! function, and finally rescaled so that regional currency losses add up to
//! the global estimate.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::climatology::WarmingMoments;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RiceRegion {
    Us,
    Weu,
    Japan,
    Russia,
    Eurasia,
    China,
    India,
    Meast,
    Africa,
    Lam,
    Ohi,
    Oasia,
}

impl RiceRegion {
    pub const ALL: [RiceRegion; 12] = [
        RiceRegion::Us,
        RiceRegion::Weu,
        RiceRegion::Japan,
        RiceRegion::Russia,
        RiceRegion::Eurasia,
        RiceRegion::China,
        RiceRegion::India,
        RiceRegion::Meast,
        RiceRegion::Africa,
        RiceRegion::Lam,
        RiceRegion::Ohi,
        RiceRegion::Oasia,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RiceRegion::Us => "US",
            RiceRegion::Weu => "WEU",
            RiceRegion::Japan => "JAPAN",
            RiceRegion::Russia => "RUSSIA",
            RiceRegion::Eurasia => "EURASIA",
            RiceRegion::China => "CHINA",
            RiceRegion::India => "INDIA",
            RiceRegion::Meast => "MEAST",
            RiceRegion::Africa => "AFRICA",
            RiceRegion::Lam => "LAM",
            RiceRegion::Ohi => "OHI",
            RiceRegion::Oasia => "OASIA",
        }
    }
}

impl fmt::Display for RiceRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RiceRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let alias = match up.as_str() {
            "USA" => "US",
            "EU" => "WEU",
            "OTHASIA" => "OASIA",
            other => other,
        };
        RiceRegion::ALL
            .into_iter()
            .find(|r| r.code() == alias)
            .ok_or_else(|| Error::InvalidInput(format!("unknown region '{s}'")))
    }
}

/// Original (gamma, alpha) pairs in percent of regional GDP per degree and per squared degree.
const RICE_ORIGINAL: [(f64, f64); 12] = [
    (0.0, 0.1414),
    (0.0, 0.1591),
    (0.0, 0.1617),
    (0.0, 0.1151),
    (0.0, 0.1305),
    (0.0785, 0.1259),
    (0.4385, 0.1689),
    (0.278, 0.1586),
    (0.341, 0.1983),
    (0.0609, 0.1345),
    (0.0, 0.1564),
    (0.1755, 0.1734),
];

/// Integer warming levels 0..=6 degrees C used for the refit.
pub const DEFAULT_FIT_GRID: [f64; 7] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionalParams {
    pub region: RiceRegion,
    /// Linear coefficient, % of regional GDP per degree.
    pub gamma: f64,
    /// Quadratic coefficient, % of regional GDP per squared degree.
    pub alpha: f64,
    /// Quadratic-only refit of `gamma*T + alpha*T^2`.
    pub alpha_fit: Option<f64>,
}

impl RegionalParams {
    pub fn new(region: RiceRegion, gamma: f64, alpha: f64) -> Self {
        RegionalParams { region, gamma, alpha, alpha_fit: None }
    }

    /// Refits on `grid` and stores the result.
    pub fn fitted(mut self, grid: &[f64]) -> Result<Self> {
        self.alpha_fit = Some(fit_quadratic(self.gamma, self.alpha, grid)?);
        Ok(self)
    }
}

/// Least-squares `alpha'` minimizing `sum_T (gamma*T + alpha*T^2 - alpha'*T^2)^2`,
/// which closes to `alpha + gamma * sum T^3 / sum T^4`.
pub fn fit_quadratic(gamma: f64, alpha: f64, grid: &[f64]) -> Result<f64> {
    let (s3, s4) = grid.iter().fold((0.0, 0.0), |(s3, s4), &t| (s3 + t.powi(3), s4 + t.powi(4)));
    if s4 == 0.0 {
        return Err(Error::InvalidInput("fit grid has no nonzero warming level".into()));
    }
    Ok(alpha + gamma * s3 / s4)
}

/// The twelve regional functions, keyed by region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionalTable {
    params: BTreeMap<RiceRegion, RegionalParams>,
}

impl RegionalTable {
    pub fn new(params: impl IntoIterator<Item = RegionalParams>) -> Result<Self> {
        let params: BTreeMap<_, _> = params.into_iter().map(|p| (p.region, p)).collect();
        if params.len() != RiceRegion::ALL.len() {
            return Err(Error::InvalidInput(format!("{} of 12 regions supplied", params.len())));
        }
        Ok(RegionalTable { params })
    }

    /// Original RICE coefficients, not yet refit.
    pub fn rice() -> Self {
        RegionalTable::new(
            RiceRegion::ALL
                .iter()
                .zip(RICE_ORIGINAL)
                .map(|(&r, (g, a))| RegionalParams::new(r, g, a)),
        )
        .expect("built-in table is complete")
    }

    /// Reads `region,gamma,alpha` CSV.
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
        if header != ["region", "gamma", "alpha"] {
            return Err(Error::parse(path, "header must be region,gamma,alpha"));
        }
        let mut params = Vec::new();
        for (n, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::parse(path, format!("line {}: bad number in column {}", n + 2, i + 1)))
            };
            params.push(RegionalParams::new(rec.get(0).unwrap_or("").parse()?, num(1)?, num(2)?));
        }
        RegionalTable::new(params)
    }

    pub fn fitted(&self, grid: &[f64]) -> Result<Self> {
        RegionalTable::new(self.params.values().map(|p| p.fitted(grid)).collect::<Result<Vec<_>>>()?)
    }

    pub fn get(&self, region: RiceRegion) -> &RegionalParams {
        &self.params[&region]
    }

    pub fn iter(&self) -> impl Iterator<Item = &RegionalParams> {
        self.params.values()
    }
}

/// Loss as a fraction of regional GDP: `(alpha_fit / 100) * (mean_sq - reference.mean_sq)`.
pub fn regional_damage(params: &RegionalParams, moments: &WarmingMoments, reference: &WarmingMoments) -> Result<f64> {
    let alpha_fit = params
        .alpha_fit
        .ok_or_else(|| Error::InvalidInput(format!("{} has no quadratic refit", params.region)))?;
    if moments.variant != reference.variant {
        return Err(Error::VariantMismatch { expected: moments.variant, got: reference.variant });
    }
    Ok(alpha_fit / 100.0 * (moments.mean_sq - reference.mean_sq))
}

/// Rescales regional currency losses (`fraction * regional GDP`) so they sum
/// to the global currency loss; regional ratios are preserved.
pub fn harmonize_regions(
    regional_losses: &BTreeMap<RiceRegion, f64>,
    regional_gdp: &BTreeMap<RiceRegion, f64>,
    global_loss: f64,
    global_gdp: f64,
) -> Result<BTreeMap<RiceRegion, f64>> {
    let mut currency = BTreeMap::new();
    for r in RiceRegion::ALL {
        let loss = regional_losses
            .get(&r)
            .ok_or_else(|| Error::Insufficient(format!("no loss for region {r}")))?;
        let gdp = regional_gdp
            .get(&r)
            .ok_or_else(|| Error::Insufficient(format!("no GDP for region {r}")))?;
        currency.insert(r, loss * gdp);
    }
    let target = global_loss * global_gdp;
    let total: f64 = currency.values().sum();
    if total == 0.0 {
        if target == 0.0 {
            return Ok(currency);
        }
        return Err(Error::ZeroDenominator("regional losses sum to zero"));
    }
    let scale = target / total;
    Ok(currency.into_iter().map(|(r, v)| (r, v * scale)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variant::Variant;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_regions_are_unchanged() {
        assert_eq!(fit_quadratic(0.0, 0.1414, &DEFAULT_FIT_GRID).unwrap(), 0.1414);
    }

    #[test]
    fn china_and_india_refit() {
        let china = fit_quadratic(0.0785, 0.1259, &DEFAULT_FIT_GRID).unwrap();
        assert_relative_eq!(china, 0.1259 + 0.0785 * 441.0 / 2275.0, max_relative = 1e-14);
        assert!((china - 0.1411).abs() <= 5e-5);
        let india = fit_quadratic(0.4385, 0.1689, &DEFAULT_FIT_GRID).unwrap();
        assert!((india - 0.2539).abs() <= 5e-5);
    }

    #[test]
    fn all_zero_grid_fails() {
        assert!(fit_quadratic(0.1, 0.1, &[0.0, 0.0]).is_err());
        assert!(fit_quadratic(0.1, 0.1, &[]).is_err());
    }

    #[test]
    fn regional_damage_examples() {
        let table = RegionalTable::rice().fitted(&DEFAULT_FIT_GRID).unwrap();
        let one = WarmingMoments::new(Variant::None, 1.0, 0.0).unwrap();
        let zero = WarmingMoments::zero(Variant::None);
        let us = regional_damage(table.get(RiceRegion::Us), &one, &zero).unwrap();
        assert_relative_eq!(us, 0.001414, max_relative = 1e-12);
        assert_eq!(regional_damage(table.get(RiceRegion::Us), &zero, &zero).unwrap(), 0.0);

        let m = WarmingMoments::new(Variant::Stvar, 2.2, 0.7).unwrap();
        let z = WarmingMoments::zero(Variant::Stvar);
        let africa = regional_damage(table.get(RiceRegion::Africa), &m, &z).unwrap();
        let russia = regional_damage(table.get(RiceRegion::Russia), &m, &z).unwrap();
        let fit_africa = table.get(RiceRegion::Africa).alpha_fit.unwrap();
        assert_relative_eq!(africa / russia, fit_africa / 0.1151, max_relative = 1e-12);
        assert!((africa / russia - 0.2644 / 0.1151).abs() < 1e-3);
    }

    #[test]
    fn unfitted_params_are_rejected() {
        let z = WarmingMoments::zero(Variant::None);
        assert!(regional_damage(RegionalTable::rice().get(RiceRegion::Us), &z, &z).is_err());
    }

    fn equal(v: f64) -> BTreeMap<RiceRegion, f64> {
        RiceRegion::ALL.iter().map(|&r| (r, v)).collect()
    }

    #[test]
    fn harmonize_examples() {
        let gdp = equal(10.0);
        let same = harmonize_regions(&equal(0.01), &gdp, 0.01, 120.0).unwrap();
        assert!(same.values().all(|v| (v - 0.1).abs() < 1e-15));
        let halved = harmonize_regions(&equal(0.02), &gdp, 0.01, 120.0).unwrap();
        assert!(halved.values().all(|v| (v - 0.1).abs() < 1e-15));
        assert!(harmonize_regions(&equal(0.0), &gdp, 0.01, 120.0).is_err());
        assert!(harmonize_regions(&equal(0.0), &gdp, 0.0, 120.0).is_ok());
        let mut missing = equal(0.01);
        missing.remove(&RiceRegion::Lam);
        assert!(harmonize_regions(&missing, &gdp, 0.01, 120.0).is_err());
    }

    #[test]
    fn region_aliases_parse() {
        assert_eq!("USA".parse::<RiceRegion>().unwrap(), RiceRegion::Us);
        assert_eq!("othasia".parse::<RiceRegion>().unwrap(), RiceRegion::Oasia);
        assert!("Mars".parse::<RiceRegion>().is_err());
    }
}
