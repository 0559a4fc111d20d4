//! Social cost of carbon from a one-time 1 GtC pulse.
//!
//! The pulse raises global temperature by a three-exponential kernel. Each
//! year's marginal damage is the damage of the perturbed trajectory minus that
//! of the baseline, priced with GDP and discounted. Spatial and temporal
//! variants enter through [`MomentFactors`]: under pattern scaling the mean of
//! squared warming over any domain is `T^2` times a constant taken from the
//! pattern, so the perturbed moments follow analytically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::climatology::ScalingPattern;
use crate::damage::DamageParams;
use crate::economics::DiscountSpec;
use crate::error::{Error, Result};
use crate::grid::{GdpTrajectory, GlobalSeries};
use crate::regional::{harmonize_regions, RegionalTable, RiceRegion};
use crate::sectoral::{MonthlyCoefficients, Sector, HEMISPHERES};
use crate::variant::{Hemisphere, MonthSet, Variant};

/// Tonnes of carbon in the 1 GtC pulse.
pub const TONNES_PER_GTC: f64 = 1e9;
/// Converts a price per tonne of carbon to a price per tonne of CO2.
pub const TC_TO_TCO2: f64 = 12.0 / 44.0;
/// US$ per unit of the GDP inputs (billion US$2005).
pub const GDP_UNIT_BILLION: f64 = 1e9;

/// Temperature response to a carbon pulse:
/// `-(a1 + a2 + a3) + sum_i a_i * exp(-(t - t0) / tau_i)` in mK per GtC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseResponse {
    /// a1..a3 in mK per GtC.
    pub amplitudes: [f64; 3],
    /// tau1..tau3 in years.
    pub timescales: [f64; 3],
    /// Pulse year.
    pub t0: i32,
}

impl PulseResponse {
    pub fn new(amplitudes: [f64; 3], timescales: [f64; 3], t0: i32) -> Result<Self> {
        if timescales.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidInput(format!("pulse timescales {timescales:?} must be positive")));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput(format!("pulse amplitudes {amplitudes:?}")));
        }
        Ok(PulseResponse { amplitudes, timescales, t0 })
    }

    /// Illustrative kernel: warming peaks near 2.3 mK/GtC about a decade after
    /// the pulse and settles at 1.7 mK/GtC. Replace with fitted values for
    /// quantitative work.
    pub fn illustrative() -> Self {
        PulseResponse { amplitudes: [-2.2, -0.5, 1.0], timescales: [1.8, 6.0, 25.0], t0: 2020 }
    }

    pub fn zero(t0: i32) -> Self {
        PulseResponse { amplitudes: [0.0; 3], timescales: [1.0; 3], t0 }
    }

    /// Long-run response in K per GtC.
    pub fn asymptote(&self) -> f64 {
        -self.amplitudes.iter().sum::<f64>() * 1e-3
    }

    /// Response after `elapsed` years, in K per GtC.
    pub fn at_elapsed(&self, elapsed: f64) -> f64 {
        let decay: f64 = self
            .amplitudes
            .iter()
            .zip(&self.timescales)
            .map(|(a, tau)| a * (-elapsed / tau).exp())
            .sum();
        (decay - self.amplitudes.iter().sum::<f64>()) * 1e-3
    }
}

impl Default for PulseResponse {
    fn default() -> Self {
        PulseResponse::illustrative()
    }
}

/// Warming in year `t` per GtC emitted in the pulse year, in K.
pub fn pulse_response(t: i32, p: &PulseResponse) -> Result<f64> {
    if t < p.t0 {
        return Err(Error::InvalidInput(format!("year {t} precedes the pulse year {}", p.t0)));
    }
    Ok(p.at_elapsed((t - p.t0) as f64))
}

/// Ratio of the mean of squared warming to the squared global mean, per variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentFactors {
    pub none: f64,
    pub tvar: f64,
    pub svar: f64,
    pub stvar: f64,
}

impl MomentFactors {
    /// Spatially and seasonally uniform warming: every variant reduces to `T^2`.
    pub fn uniform() -> Self {
        MomentFactors { none: 1.0, tvar: 1.0, svar: 1.0, stvar: 1.0 }
    }

    /// Factors implied by `pattern` over `months` and `hemisphere`, with `w`
    /// the area weights and `p[m][c]` the slopes:
    ///
    /// - none: `(mean_m sum_c w p)^2`
    /// - tvar: `mean_m (sum_c w p)^2`
    /// - svar: `sum_c w (mean_m p)^2`
    /// - stvar: `mean_m sum_c w p^2`
    pub fn from_pattern(pattern: &ScalingPattern, months: MonthSet, hemisphere: Hemisphere) -> Result<Self> {
        let w = pattern.cell_weights(hemisphere)?;
        let nm = months.len() as f64;
        let mut cell_mean = vec![0.0; pattern.n_cells()];
        let mut spatial_means = Vec::with_capacity(months.len());
        let mut stvar = 0.0;
        for m in months.iter() {
            let layer = pattern.layer(m);
            let mut sm = 0.0;
            let mut sq = 0.0;
            for (c, (&p, &wc)) in layer.iter().zip(&w).enumerate() {
                if wc > 0.0 {
                    sm += wc * p;
                    sq += wc * p * p;
                    cell_mean[c] += p / nm;
                }
            }
            spatial_means.push(sm);
            stvar += sq / nm;
        }
        let overall = spatial_means.iter().sum::<f64>() / nm;
        let tvar = spatial_means.iter().map(|s| s * s).sum::<f64>() / nm;
        let svar = cell_mean.iter().zip(&w).filter(|(_, w)| **w > 0.0).map(|(p, w)| w * p * p).sum();
        Ok(MomentFactors { none: overall * overall, tvar, svar, stvar })
    }

    /// Ratios `mean_sq / mean_none^2` from moments of one year; 1 where the
    /// mean vanishes.
    pub fn from_moments(none_mean: f64, mean_sq: impl Fn(Variant) -> Option<f64>) -> Self {
        let t2 = none_mean * none_mean;
        let ratio = |v| match mean_sq(v) {
            Some(x) if t2 > 1e-12 => x / t2,
            _ => 1.0,
        };
        MomentFactors { none: 1.0, tvar: ratio(Variant::Tvar), svar: ratio(Variant::Svar), stvar: ratio(Variant::Stvar) }
    }

    pub fn get(&self, variant: Variant) -> f64 {
        match variant {
            Variant::None => self.none,
            Variant::Tvar => self.tvar,
            Variant::Svar => self.svar,
            Variant::Stvar => self.stvar,
        }
    }
}

/// Moment factors for every (month, hemisphere) pair of the monthly functions.
///
/// `none` and `svar` use the hemisphere's annual domain; `tvar` and `stvar`
/// restrict it to the month.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyFactors {
    factors: BTreeMap<(u8, Hemisphere), MomentFactors>,
}

impl MonthlyFactors {
    pub fn uniform() -> Self {
        let factors = (1..=12u8)
            .flat_map(|m| HEMISPHERES.map(|h| ((m, h), MomentFactors::uniform())))
            .collect();
        MonthlyFactors { factors }
    }

    pub fn from_pattern(pattern: &ScalingPattern) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for h in HEMISPHERES {
            let annual = MomentFactors::from_pattern(pattern, MonthSet::all(), h)?;
            for m in 1..=12u8 {
                let month = MomentFactors::from_pattern(pattern, MonthSet::single(m)?, h)?;
                factors.insert(
                    (m, h),
                    MomentFactors { none: annual.none, tvar: month.tvar, svar: annual.svar, stvar: month.stvar },
                );
            }
        }
        Ok(MonthlyFactors { factors })
    }

    pub fn get(&self, month: u8, hemisphere: Hemisphere) -> &MomentFactors {
        &self.factors[&(month, hemisphere)]
    }
}

/// Inputs shared by every SCC evaluation of a scenario.
#[derive(Debug, Clone)]
pub struct SccSetup<'a> {
    pub scenario: String,
    /// Baseline global mean warming; monthly series are reduced to annual means.
    pub baseline: &'a GlobalSeries,
    /// Annual global GDP.
    pub gdp: &'a GdpTrajectory,
    pub discount: DiscountSpec,
    /// Inclusive accounting horizon.
    pub horizon: (i32, i32),
    pub pulse: PulseResponse,
    /// US$ per unit of GDP input.
    pub gdp_unit: f64,
}

impl<'a> SccSetup<'a> {
    pub fn new(baseline: &'a GlobalSeries, gdp: &'a GdpTrajectory, discount: DiscountSpec, pulse: PulseResponse) -> Self {
        SccSetup {
            scenario: String::new(),
            baseline,
            gdp,
            discount,
            horizon: (pulse.t0, 2100),
            pulse,
            gdp_unit: GDP_UNIT_BILLION,
        }
    }

    /// Per-year baseline temperature, pulse increment and discounted GDP
    /// expressed in US$ per tonne of carbon of pulse.
    fn years(&self, perturbation: &dyn Fn(i32) -> Result<f64>) -> Result<Vec<YearTerms>> {
        let (start, end) = self.horizon;
        if end < start {
            return Err(Error::EmptyWindow);
        }
        let baseline = self.baseline.to_annual()?;
        (start..=end)
            .map(|year| {
                let temp = baseline
                    .get(year, None)
                    .ok_or_else(|| Error::Coverage { what: "baseline temperature".into(), year })?;
                let gdp = self.gdp.at(year).ok_or_else(|| Error::Coverage { what: "GDP".into(), year })?;
                let factor = self.discount.factor(year);
                if !(factor > 0.0 && factor.is_finite()) {
                    return Err(Error::InvalidInput(format!("discount factor {factor} in {year}")));
                }
                let dt = perturbation(year)?;
                Ok(YearTerms {
                    year,
                    dsq: (temp + dt) * (temp + dt) - temp * temp,
                    value: gdp * factor * self.gdp_unit / TONNES_PER_GTC * TC_TO_TCO2,
                })
            })
            .collect()
    }

    fn pulse_years(&self) -> Result<Vec<YearTerms>> {
        let pulse = self.pulse;
        self.years(&move |y| pulse_response(y, &pulse))
    }
}

struct YearTerms {
    year: i32,
    /// `(T + dT)^2 - T^2`.
    dsq: f64,
    /// Discounted GDP in US$ per tCO2 of pulse, per unit loss fraction.
    value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakdownKind {
    Sector,
    Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub kind: BreakdownKind,
    pub entries: Vec<(String, f64)>,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v).sum()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }
}

/// SCC in US$2005 per tonne of CO2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SccResult {
    pub value: f64,
    pub variant: Variant,
    pub discount_rate: f64,
    pub scenario: String,
    pub breakdown: Option<Breakdown>,
}

/// SCC with the global annual damage function.
pub fn scc(setup: &SccSetup<'_>, variant: Variant, params: &DamageParams, factors: &MomentFactors) -> Result<SccResult> {
    let terms = setup.pulse_years()?;
    Ok(global_result(setup, variant, params, factors, &terms))
}

/// SCC for an arbitrary temperature perturbation `dT(year)` per GtC instead of the pulse kernel.
pub fn scc_with_perturbation(
    setup: &SccSetup<'_>,
    variant: Variant,
    params: &DamageParams,
    factors: &MomentFactors,
    perturbation: impl Fn(i32) -> f64,
) -> Result<SccResult> {
    let terms = setup.years(&|y| Ok(perturbation(y)))?;
    Ok(global_result(setup, variant, params, factors, &terms))
}

/// SCC with a moment-factor path, one entry per horizon year.
pub fn scc_with_factor_path(
    setup: &SccSetup<'_>,
    variant: Variant,
    params: &DamageParams,
    factors: &BTreeMap<i32, MomentFactors>,
) -> Result<SccResult> {
    let terms = setup.pulse_years()?;
    let mut value = 0.0;
    for t in &terms {
        let k = factors
            .get(&t.year)
            .ok_or_else(|| Error::Coverage { what: "moment factors".into(), year: t.year })?
            .get(variant);
        value += params.alpha() * k * t.dsq * t.value;
    }
    Ok(SccResult {
        value,
        variant,
        discount_rate: setup.discount.rate,
        scenario: setup.scenario.clone(),
        breakdown: None,
    })
}

fn global_result(
    setup: &SccSetup<'_>,
    variant: Variant,
    params: &DamageParams,
    factors: &MomentFactors,
    terms: &[YearTerms],
) -> SccResult {
    let k = params.alpha() * factors.get(variant);
    let value = terms.iter().map(|t| k * t.dsq * t.value).sum();
    SccResult {
        value,
        variant,
        discount_rate: setup.discount.rate,
        scenario: setup.scenario.clone(),
        breakdown: None,
    }
}

/// Tables needed to split the SCC.
#[derive(Debug, Clone, Copy)]
pub enum BreakdownInputs<'a> {
    /// Monthly sectoral functions; the headline value is the sum over sectors.
    Sector { coeffs: &'a MonthlyCoefficients, factors: &'a MonthlyFactors },
    /// Refit regional functions harmonized to the global function; the
    /// headline value is the global SCC.
    Region {
        table: &'a RegionalTable,
        gdp: &'a BTreeMap<RiceRegion, GdpTrajectory>,
        factors: &'a MomentFactors,
    },
}

pub fn scc_breakdown(
    setup: &SccSetup<'_>,
    variant: Variant,
    params: &DamageParams,
    inputs: BreakdownInputs<'_>,
) -> Result<SccResult> {
    let terms = setup.pulse_years()?;
    match inputs {
        BreakdownInputs::Sector { coeffs, factors } => {
            let c2 = params.c * params.c;
            // Loss fraction per unit (T + dT)^2 - T^2, per sector.
            let per_sector: Vec<f64> = Sector::ALL
                .iter()
                .map(|&s| {
                    (1..=12u8)
                        .flat_map(|m| HEMISPHERES.map(move |h| (m, h)))
                        .map(|(m, h)| coeffs.get(m, s, h) * factors.get(m, h).get(variant) / c2)
                        .sum()
                })
                .collect();
            let scale: f64 = terms.iter().map(|t| t.dsq * t.value).sum();
            let entries: Vec<(String, f64)> = Sector::ALL
                .iter()
                .zip(&per_sector)
                .map(|(s, k)| (s.name().to_string(), k * scale))
                .collect();
            let value = entries.iter().map(|(_, v)| v).sum();
            Ok(SccResult {
                value,
                variant,
                discount_rate: setup.discount.rate,
                scenario: setup.scenario.clone(),
                breakdown: Some(Breakdown { kind: BreakdownKind::Sector, entries }),
            })
        }
        BreakdownInputs::Region { table, gdp, factors } => {
            let k = factors.get(variant);
            let mut totals: BTreeMap<RiceRegion, f64> = BTreeMap::new();
            for t in &terms {
                let global_gdp = setup.gdp.at(t.year).expect("checked in years()");
                let mut fractions = BTreeMap::new();
                let mut regional_gdp = BTreeMap::new();
                for p in table.iter() {
                    let alpha_fit = p
                        .alpha_fit
                        .ok_or_else(|| Error::InvalidInput(format!("{} has no quadratic refit", p.region)))?;
                    let g = gdp
                        .get(&p.region)
                        .and_then(|traj| traj.at(t.year))
                        .ok_or_else(|| Error::Coverage { what: format!("GDP for {}", p.region), year: t.year })?;
                    fractions.insert(p.region, alpha_fit / 100.0 * k * t.dsq);
                    regional_gdp.insert(p.region, g);
                }
                let global_fraction = params.alpha() * k * t.dsq;
                let scaled = harmonize_regions(&fractions, &regional_gdp, global_fraction, global_gdp)?;
                for (r, currency) in scaled {
                    *totals.entry(r).or_default() += currency / global_gdp * t.value;
                }
            }
            let headline = global_result(setup, variant, params, factors, &terms);
            let entries = totals.into_iter().map(|(r, v)| (r.code().to_string(), v)).collect();
            Ok(SccResult {
                breakdown: Some(Breakdown { kind: BreakdownKind::Region, entries }),
                ..headline
            })
        }
    }
}
