//! Signal extraction and reduction of temperature data to warming moments.
//!
//! Two procedures separate the climate signal from weather noise: pattern
//! scaling ([`fit_scaling_pattern`] / [`apply_pattern`]) and centered rolling
//! means ([`rolling_climatology`]). [`moments`] then reduces a series or a
//! field to the mean and mean of squares the damage functions consume.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cell_weights, FieldKind, Frequency, GlobalSeries, GridField, GridMeta};
use crate::variant::{Hemisphere, MonthSet, Variant};

/// Subtracts each cell's calendar-month mean over `base_start..=base_end`.
pub fn anomalize(field: &GridField, base_start: i32, base_end: i32) -> Result<GridField> {
    if base_end < base_start {
        return Err(Error::InvalidInput(format!(
            "base period {base_start}..={base_end} shorter than one year"
        )));
    }
    let (first, last) = field.years();
    if base_start < first || base_end > last {
        return Err(Error::OutOfRange {
            year: if base_start < first { base_start } else { base_end },
            start: first,
            end: last,
        });
    }
    let n = field.n_cells();
    let n_base = (base_end - base_start + 1) as f64;
    // Offsets from the first base year keep a constant field exactly zero.
    let mut baseline: Vec<f64> = (1..=12u8)
        .flat_map(|m| field.slice(base_start, m).expect("base inside record").to_vec())
        .collect();
    let mut offset = vec![0.0; 12 * n];
    for y in base_start + 1..=base_end {
        for m in 1..=12u8 {
            let slice = field.slice(y, m).expect("base inside record");
            let range = (m as usize - 1) * n..m as usize * n;
            let first = &baseline[range.clone()];
            offset[range].iter_mut().zip(slice.iter().zip(first)).for_each(|(o, (v, f))| *o += v - f);
        }
    }
    baseline.iter_mut().zip(&offset).for_each(|(b, o)| *b += o / n_base);

    let values: Vec<f64> = field
        .values()
        .par_chunks(n)
        .enumerate()
        .flat_map_iter(|(t, slice)| {
            let base = &baseline[(t % 12) * n..(t % 12 + 1) * n];
            slice.iter().zip(base).map(|(v, b)| v - b).collect::<Vec<_>>()
        })
        .collect();
    let mut meta = field.meta().clone();
    meta.base_period = Some((base_start, base_end));
    meta.provenance = format!("{}; anomaly vs {base_start}-{base_end}", meta.provenance);
    GridField::new(field.years(), field.lats().to_vec(), field.lons().to_vec(), values, field.mask().to_vec(), meta)
}

/// Area-weighted mean over the valid cells of `hemisphere` at every time step.
pub fn regional_mean(field: &GridField, hemisphere: Hemisphere, frequency: Frequency) -> Result<GlobalSeries> {
    let weights = field.cell_weights(hemisphere)?;
    let monthly: Vec<f64> = field
        .values()
        .chunks(field.n_cells())
        .map(|slice| weighted_sum(slice, &weights))
        .collect();
    let series = GlobalSeries::monthly(field.years().0, 1, monthly)?;
    match frequency {
        Frequency::Monthly => Ok(series),
        Frequency::Annual => series.to_annual(),
    }
}

/// Area-weighted global mean; annual values are the mean of the twelve monthly means.
pub fn global_mean(field: &GridField, frequency: Frequency) -> Result<GlobalSeries> {
    regional_mean(field, Hemisphere::Global, frequency)
}

fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
    values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| v * w)
        .sum()
}

/// Per-cell, per-calendar-month slopes of local on global warming.
#[derive(Debug, Clone)]
pub struct ScalingPattern {
    lats: Vec<f64>,
    lons: Vec<f64>,
    mask: Vec<bool>,
    /// Row-major by (month, lat, lon).
    slopes: Vec<f64>,
    residual_variance: Vec<f64>,
    base_period: Option<(i32, i32)>,
}

impl ScalingPattern {
    /// Builds a pattern from twelve layers of slopes ordered (month, lat, lon).
    pub fn new(lats: Vec<f64>, lons: Vec<f64>, mask: Vec<bool>, slopes: Vec<f64>) -> Result<Self> {
        let n = slopes.len();
        let field = GridField::new(
            (0, 0),
            lats,
            lons,
            slopes,
            mask,
            GridMeta { kind: FieldKind::Pattern, ..Default::default() },
        )?;
        Self::from_grid(&field).map(|mut p| {
            p.residual_variance = vec![f64::NAN; n];
            p
        })
    }

    /// Reads a pattern persisted as a grid with `kind: pattern`.
    pub fn from_grid(field: &GridField) -> Result<Self> {
        if field.meta().kind != FieldKind::Pattern || field.n_years() != 1 {
            return Err(Error::InvalidInput("grid is not a scaling pattern".into()));
        }
        Ok(ScalingPattern {
            lats: field.lats().to_vec(),
            lons: field.lons().to_vec(),
            mask: field.mask().to_vec(),
            slopes: field.values().to_vec(),
            residual_variance: vec![f64::NAN; field.values().len()],
            base_period: field.meta().base_period,
        })
    }

    /// The pattern as a twelve-layer grid under pseudo-year 0.
    pub fn to_grid(&self) -> GridField {
        GridField::new(
            (0, 0),
            self.lats.clone(),
            self.lons.clone(),
            self.slopes.clone(),
            self.mask.clone(),
            GridMeta {
                kind: FieldKind::Pattern,
                base_period: self.base_period,
                provenance: "scaling pattern".into(),
            },
        )
        .expect("pattern satisfies grid invariants")
    }

    pub fn lats(&self) -> &[f64] {
        &self.lats
    }

    pub fn lons(&self) -> &[f64] {
        &self.lons
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn n_cells(&self) -> usize {
        self.lats.len() * self.lons.len()
    }

    /// Slopes of every cell for calendar month `month` (1-based).
    pub fn layer(&self, month: u8) -> &[f64] {
        let n = self.n_cells();
        let m = month as usize - 1;
        &self.slopes[m * n..(m + 1) * n]
    }

    pub fn slope(&self, month: u8, lat_idx: usize, lon_idx: usize) -> f64 {
        self.layer(month)[lat_idx * self.lons.len() + lon_idx]
    }

    /// Residual variance of each cell-month regression; NaN when unknown.
    pub fn residual_variance(&self, month: u8) -> &[f64] {
        let n = self.n_cells();
        let m = month as usize - 1;
        &self.residual_variance[m * n..(m + 1) * n]
    }

    pub fn cell_weights(&self, hemisphere: Hemisphere) -> Result<Vec<f64>> {
        cell_weights(&self.lats, &self.lons, &self.mask, hemisphere)
    }

    /// Area-weighted mean of squared slopes over `months` and `hemisphere`.
    pub fn mean_square(&self, months: MonthSet, hemisphere: Hemisphere) -> Result<f64> {
        let w = self.cell_weights(hemisphere)?;
        let total: f64 = months
            .iter()
            .map(|m| {
                self.layer(m)
                    .iter()
                    .zip(&w)
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(p, w)| w * p * p)
                    .sum::<f64>()
            })
            .sum();
        Ok(total / months.len() as f64)
    }
}

/// Regresses every cell-month on global annual warming by OLS with intercept
/// and keeps the slope.
///
/// Monthly global series are reduced to annual means first. The regression
/// uses every year present in both inputs.
pub fn fit_scaling_pattern(field: &GridField, global: &GlobalSeries) -> Result<ScalingPattern> {
    let global = global.to_annual()?;
    let (f0, f1) = field.years();
    let start = f0.max(global.first_year());
    let end = f1.min(global.last_year());
    if end - start + 1 < 3 {
        return Err(Error::Insufficient(format!(
            "{} overlapping years, need at least 3",
            (end - start + 1).max(0)
        )));
    }
    let years: Vec<i32> = (start..=end).collect();
    let x: Vec<f64> = years.iter().map(|&y| global.get(y, None).expect("overlap")).collect();
    let n_obs = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / n_obs;
    let dx: Vec<f64> = x.iter().map(|v| v - x_mean).collect();
    let sxx: f64 = dx.iter().map(|d| d * d).sum();
    let scale = x.iter().map(|v| v * v).sum::<f64>();
    if sxx <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroVariance);
    }

    let n = field.n_cells();
    let mask = field.mask();
    let layers: Vec<(Vec<f64>, Vec<f64>)> = (1..=12u8)
        .into_par_iter()
        .map(|m| {
            let mut y_mean = vec![0.0; n];
            for &y in &years {
                let s = field.slice(y, m).expect("overlap");
                y_mean.iter_mut().zip(s).for_each(|(a, v)| *a += v);
            }
            y_mean.iter_mut().for_each(|a| *a /= n_obs);
            let mut sxy = vec![0.0; n];
            for (k, &y) in years.iter().enumerate() {
                let s = field.slice(y, m).expect("overlap");
                for c in 0..n {
                    sxy[c] += dx[k] * (s[c] - y_mean[c]);
                }
            }
            let slope: Vec<f64> = (0..n)
                .map(|c| if mask[c] { sxy[c] / sxx } else { f64::NAN })
                .collect();
            let mut ssr = vec![0.0; n];
            for (k, &y) in years.iter().enumerate() {
                let s = field.slice(y, m).expect("overlap");
                for c in 0..n {
                    let r = s[c] - y_mean[c] - slope[c] * dx[k];
                    ssr[c] += r * r;
                }
            }
            let resid = (0..n)
                .map(|c| if mask[c] { ssr[c] / (n_obs - 2.0) } else { f64::NAN })
                .collect();
            (slope, resid)
        })
        .collect();

    let mut slopes = Vec::with_capacity(12 * n);
    let mut residual_variance = Vec::with_capacity(12 * n);
    for (s, r) in layers {
        slopes.extend(s);
        residual_variance.extend(r);
    }
    Ok(ScalingPattern {
        lats: field.lats().to_vec(),
        lons: field.lons().to_vec(),
        mask: mask.to_vec(),
        slopes,
        residual_variance,
        base_period: field.meta().base_period,
    })
}

/// Projects a field as `global(year) * pattern[month, cell]` for `years`.
/// Monthly global series are reduced to annual means first.
pub fn apply_pattern(pattern: &ScalingPattern, global: &GlobalSeries, years: (i32, i32)) -> Result<GridField> {
    let global = global.to_annual()?;
    let n = pattern.n_cells();
    let mut values = Vec::with_capacity((years.1 - years.0 + 1).max(0) as usize * 12 * n);
    for y in years.0..=years.1 {
        let g = global.get(y, None).ok_or(Error::OutOfRange {
            year: y,
            start: global.first_year(),
            end: global.last_year(),
        })?;
        for m in 1..=12u8 {
            values.extend(pattern.layer(m).iter().map(|p| g * p));
        }
    }
    let meta = GridMeta {
        kind: FieldKind::Anomaly,
        base_period: pattern.base_period,
        provenance: "pattern-scaled projection".into(),
    };
    GridField::new(years, pattern.lats.clone(), pattern.lons.clone(), values, pattern.mask.clone(), meta)
}

fn check_window(window: usize, available: usize) -> Result<usize> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("rolling window {window} must be odd")));
    }
    if window > available {
        return Err(Error::Insufficient(format!(
            "window {window} longer than record of {available} years"
        )));
    }
    Ok(window / 2)
}

/// Data that can be smoothed with a centered rolling mean per calendar month.
pub trait RollingMean: Sized {
    /// Centered moving average over `window` years; years without a full
    /// window are trimmed from both ends.
    fn rolling_mean(&self, window: usize) -> Result<Self>;
}

impl RollingMean for GridField {
    fn rolling_mean(&self, window: usize) -> Result<Self> {
        let half = check_window(window, self.n_years())?;
        let n = self.n_cells();
        let (first, last) = self.years();
        let out_first = first + half as i32;
        let out_last = last - half as i32;
        let out_times = (out_last - out_first + 1) as usize * 12;
        let mut values = vec![0.0; out_times * n];
        let src = self.values();
        values.par_chunks_mut(n).enumerate().for_each(|(t, out)| {
            let (yk, mk) = (t / 12, t % 12);
            // Output year index yk + half in the source; window spans yk..=yk+2*half.
            for w in 0..window {
                let s = &src[((yk + w) * 12 + mk) * n..((yk + w) * 12 + mk + 1) * n];
                out.iter_mut().zip(s).for_each(|(o, v)| *o += v);
            }
            out.iter_mut().for_each(|o| *o /= window as f64);
        });
        let mut meta = self.meta().clone();
        meta.provenance = format!("{}; rolling mean {window}y", meta.provenance);
        GridField::new((out_first, out_last), self.lats().to_vec(), self.lons().to_vec(), values, self.mask().to_vec(), meta)
    }
}

impl RollingMean for GlobalSeries {
    fn rolling_mean(&self, window: usize) -> Result<Self> {
        let step = match self.frequency() {
            Frequency::Annual => 1,
            Frequency::Monthly => 12,
        };
        let years = self.len().div_ceil(step);
        let half = check_window(window, years)?;
        let span = 2 * half * step;
        if span >= self.len() {
            return Err(Error::Insufficient(format!("window {window} longer than record")));
        }
        let v = self.values();
        let out: Vec<f64> = (span / 2..self.len() - span / 2)
            .map(|k| (0..window).map(|w| v[k - span / 2 + w * step]).sum::<f64>() / window as f64)
            .collect();
        let (y, m) = self.key_at(span / 2);
        match m {
            None => GlobalSeries::annual(y, out),
            Some(m) => GlobalSeries::monthly(y, m, out),
        }
    }
}

/// Centered rolling climatology of a field or series (default window 31).
pub fn rolling_climatology<T: RollingMean>(data: &T, window: usize) -> Result<T> {
    data.rolling_mean(window)
}

pub const DEFAULT_WINDOW: usize = 31;

/// Mean, mean of squares and variance of warming over a declared domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarmingMoments {
    pub variant: Variant,
    pub hemisphere: Hemisphere,
    /// Inclusive year window averaged over.
    pub years: (i32, i32),
    pub months: MonthSet,
    pub mean: f64,
    pub mean_sq: f64,
    pub variance: f64,
}

impl WarmingMoments {
    /// Moments with the given mean and variance over a global, all-month,
    /// single-year domain. `variance` must be zero for [`Variant::None`].
    pub fn new(variant: Variant, mean: f64, variance: f64) -> Result<Self> {
        if !(mean.is_finite() && variance.is_finite()) || variance < 0.0 {
            return Err(Error::InvalidInput(format!("moments mean {mean} variance {variance}")));
        }
        if variant == Variant::None && variance != 0.0 {
            return Err(Error::InvalidInput("variant none requires zero variance".into()));
        }
        Ok(WarmingMoments {
            variant,
            hemisphere: Hemisphere::Global,
            years: (0, 0),
            months: MonthSet::all(),
            mean,
            mean_sq: mean * mean + variance,
            variance,
        })
    }

    /// All-zero moments, the neutral reference.
    pub fn zero(variant: Variant) -> Self {
        WarmingMoments::new(variant, 0.0, 0.0).expect("zero moments are valid")
    }

    /// Same statistics relabelled to another domain.
    pub fn with_domain(mut self, years: (i32, i32), months: MonthSet, hemisphere: Hemisphere) -> Self {
        self.years = years;
        self.months = months;
        self.hemisphere = hemisphere;
        self
    }

    /// Middle year of the averaging window.
    pub fn center_year(&self) -> i32 {
        self.years.0 + (self.years.1 - self.years.0) / 2
    }
}

/// Input a set of moments is computed from.
#[derive(Debug, Clone, Copy)]
pub enum MomentSource<'a> {
    /// A global or hemisphere-mean temperature series.
    Series(&'a GlobalSeries),
    /// A gridded field: the climatological signal for `svar`, the full field for `stvar`.
    /// `none` and `tvar` reduce it to its area-weighted mean series first.
    Field(&'a GridField),
}

/// The space-time domain a set of moments averages over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentWindow {
    pub years: (i32, i32),
    pub months: MonthSet,
    pub hemisphere: Hemisphere,
}

impl MomentWindow {
    pub fn new(years: (i32, i32), months: MonthSet, hemisphere: Hemisphere) -> Self {
        MomentWindow { years, months, hemisphere }
    }

    pub fn annual_global(years: (i32, i32)) -> Self {
        MomentWindow::new(years, MonthSet::all(), Hemisphere::Global)
    }
}

/// Weighted first and second moments, with the variance from a second pass.
fn weighted_moments(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let mean: f64 = samples.iter().map(|(x, w)| w * x).sum();
    let mean_sq: f64 = samples.iter().map(|(x, w)| w * x * x).sum();
    let variance: f64 = samples.iter().map(|(x, w)| w * (x - mean) * (x - mean)).sum();
    (mean, mean_sq, variance)
}

fn series_samples(series: &GlobalSeries, window: &MomentWindow) -> Result<Vec<f64>> {
    if series.frequency() == Frequency::Annual && !window.months.is_all() {
        return Err(Error::InvalidInput("annual series cannot be restricted to a month subset".into()));
    }
    let (y0, y1) = window.years;
    Ok(series
        .iter()
        .filter(|(y, m, _)| *y >= y0 && *y <= y1 && m.is_none_or(|m| window.months.contains(m)))
        .map(|(_, _, v)| v)
        .collect())
}

fn field_times(field: &GridField, window: &MomentWindow) -> Result<Vec<(i32, u8)>> {
    let (y0, y1) = window.years;
    let (f0, f1) = field.years();
    if y0 > y1 {
        return Err(Error::EmptyWindow);
    }
    if y0 < f0 || y1 > f1 {
        return Err(Error::OutOfRange { year: if y0 < f0 { y0 } else { y1 }, start: f0, end: f1 });
    }
    Ok((y0..=y1).flat_map(|y| window.months.iter().map(move |m| (y, m))).collect())
}

/// Reduces `source` to warming moments under `variant`.
///
/// - `none`: mean of the series over the window; variance forced to zero.
/// - `tvar`: time average of squared series values.
/// - `svar`: per-cell time mean first, then area-weighted average of squares.
/// - `stvar`: area- and time-weighted average of squared cell values.
pub fn moments(variant: Variant, source: MomentSource<'_>, window: &MomentWindow) -> Result<WarmingMoments> {
    let (mean, mean_sq, variance) = match (variant, source) {
        (Variant::None | Variant::Tvar, MomentSource::Series(series)) => {
            let samples = series_samples(series, window)?;
            temporal(variant, &samples)?
        }
        (Variant::None | Variant::Tvar, MomentSource::Field(field)) => {
            let weights = field.cell_weights(window.hemisphere)?;
            let samples: Vec<f64> = field_times(field, window)?
                .into_iter()
                .map(|(y, m)| weighted_sum(field.slice(y, m).expect("in range"), &weights))
                .collect();
            temporal(variant, &samples)?
        }
        (Variant::Svar, MomentSource::Field(field)) => {
            let weights = field.cell_weights(window.hemisphere)?;
            let times = field_times(field, window)?;
            let mut cell_mean = vec![0.0; field.n_cells()];
            for &(y, m) in &times {
                let s = field.slice(y, m).expect("in range");
                cell_mean.iter_mut().zip(s).zip(&weights).for_each(|((a, v), w)| {
                    if *w > 0.0 {
                        *a += v;
                    }
                });
            }
            let nt = times.len() as f64;
            let samples: Vec<(f64, f64)> = cell_mean
                .iter()
                .zip(&weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(a, &w)| (a / nt, w))
                .collect();
            weighted_moments(&samples)
        }
        (Variant::Stvar, MomentSource::Field(field)) => {
            let weights = field.cell_weights(window.hemisphere)?;
            let times = field_times(field, window)?;
            let nt = times.len() as f64;
            let mut samples = Vec::with_capacity(times.len() * field.n_cells());
            for (y, m) in times {
                let s = field.slice(y, m).expect("in range");
                samples.extend(s.iter().zip(&weights).filter(|(_, w)| **w > 0.0).map(|(&v, &w)| (v, w / nt)));
            }
            weighted_moments(&samples)
        }
        (variant, MomentSource::Series(_)) => {
            return Err(Error::InputMismatch { variant, input: "a series" });
        }
    };
    let variance = if variant == Variant::None { 0.0 } else { variance };
    let mean_sq = if variant == Variant::None { mean * mean } else { mean_sq };
    Ok(WarmingMoments {
        variant,
        hemisphere: window.hemisphere,
        years: window.years,
        months: window.months,
        mean,
        mean_sq,
        variance,
    })
}

fn temporal(variant: Variant, samples: &[f64]) -> Result<(f64, f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let w = 1.0 / samples.len() as f64;
    let weighted: Vec<(f64, f64)> = samples.iter().map(|&x| (x, w)).collect();
    let (mean, mean_sq, variance) = weighted_moments(&weighted);
    Ok(match variant {
        Variant::None => (mean, mean * mean, 0.0),
        _ => (mean, mean_sq, variance),
    })
}

/// Moments for each year of `years`, each averaged over the centered window
/// `year - half_window ..= year + half_window`.
pub fn rolling_moments(
    variant: Variant,
    source: MomentSource<'_>,
    years: (i32, i32),
    half_window: i32,
    months: MonthSet,
    hemisphere: Hemisphere,
) -> Result<Vec<WarmingMoments>> {
    if years.1 < years.0 || half_window < 0 {
        return Err(Error::EmptyWindow);
    }
    let (d0, d1) = match source {
        MomentSource::Series(s) => (s.first_year(), s.last_year()),
        MomentSource::Field(f) => f.years(),
    };
    (years.0..=years.1)
        .map(|y| {
            let win = (y - half_window, y + half_window);
            if win.0 < d0 || win.1 > d1 {
                return Err(Error::Coverage { what: format!("full {}-year window", 2 * half_window + 1), year: y });
            }
            let mut m = moments(variant, source, &MomentWindow::new(win, months, hemisphere))?;
            m.years = win;
            Ok(m)
        })
        .collect()
}
