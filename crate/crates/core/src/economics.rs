//! GDP trajectories, discounting and present values. Currency is billion US$2005.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GdpTrajectory;
use crate::variant::Variant;

/// Annual compounding from `base_year`; the base year's factor is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountSpec {
    pub rate: f64,
    pub base_year: i32,
}

impl DiscountSpec {
    pub const DEFAULT_RATES: [f64; 3] = [0.04, 0.03, 0.015];
    pub const BASE_YEAR: i32 = 2020;

    pub fn new(rate: f64, base_year: i32) -> Result<Self> {
        if !rate.is_finite() || rate <= -1.0 {
            return Err(Error::InvalidInput(format!("discount rate {rate} must exceed -1")));
        }
        Ok(DiscountSpec { rate, base_year })
    }

    pub fn factor(&self, year: i32) -> f64 {
        (1.0 + self.rate).powi(-(year - self.base_year))
    }
}

impl Default for DiscountSpec {
    fn default() -> Self {
        DiscountSpec { rate: 0.04, base_year: Self::BASE_YEAR }
    }
}

/// Piecewise-linear annual trajectory through the given points.
pub fn interpolate_gdp(points: &GdpTrajectory) -> Result<GdpTrajectory> {
    let pts = points.points();
    if pts.len() < 2 {
        return Err(Error::Insufficient("interpolation needs at least two points".into()));
    }
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let ((y0, v0), (y1, v1)) = (w[0], w[1]);
        let span = (y1 - y0) as f64;
        for y in y0..y1 {
            let t = (y - y0) as f64 / span;
            out.push((y, v0 + (v1 - v0) * t));
        }
    }
    out.push(*pts.last().expect("two points"));
    GdpTrajectory::new(points.region(), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvRow {
    pub year: i32,
    pub loss_fraction: f64,
    pub loss_currency: f64,
    pub pv_contribution: f64,
}

/// A discounted loss stream and its total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentValue {
    pub variant: Option<Variant>,
    pub discount: DiscountSpec,
    pub window: (i32, i32),
    pub rows: Vec<PvRow>,
    pub total: f64,
}

/// Sum over `window` of `loss(t) * GDP(t) / (1 + rate)^(t - base_year)`.
pub fn present_value(
    losses: &BTreeMap<i32, f64>,
    gdp: &GdpTrajectory,
    discount: DiscountSpec,
    window: (i32, i32),
) -> Result<PresentValue> {
    if window.1 < window.0 {
        return Err(Error::EmptyWindow);
    }
    let mut rows = Vec::with_capacity((window.1 - window.0 + 1) as usize);
    for year in window.0..=window.1 {
        let loss_fraction = *losses
            .get(&year)
            .ok_or_else(|| Error::Coverage { what: "loss".into(), year })?;
        let g = gdp.at(year).ok_or_else(|| Error::Coverage { what: "GDP".into(), year })?;
        let loss_currency = loss_fraction * g;
        rows.push(PvRow { year, loss_fraction, loss_currency, pv_contribution: loss_currency * discount.factor(year) });
    }
    let total = rows.iter().map(|r| r.pv_contribution).sum();
    Ok(PresentValue { variant: None, discount, window, rows, total })
}

impl PresentValue {
    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = Some(variant);
        self
    }
}

/// Damages avoided by a policy relative to a reference scenario.
pub fn avoided_losses(reference: &PresentValue, policy: &PresentValue) -> Result<f64> {
    if reference.variant != policy.variant {
        return Err(Error::MetadataMismatch(format!("variants {:?} vs {:?}", reference.variant, policy.variant)));
    }
    if reference.discount != policy.discount {
        return Err(Error::MetadataMismatch("discount specifications differ".into()));
    }
    if reference.window != policy.window {
        return Err(Error::MetadataMismatch("accumulation windows differ".into()));
    }
    Ok(reference.total - policy.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GdpRegion;
    use approx::assert_relative_eq;

    #[test]
    fn interpolation_examples() {
        let pts = GdpTrajectory::new(GdpRegion::Global, vec![(2020, 100.0), (2025, 110.0)]).unwrap();
        let a = interpolate_gdp(&pts).unwrap();
        assert_relative_eq!(a.at(2022).unwrap(), 104.0, max_relative = 1e-14);
        assert_eq!(a.at(2025), Some(110.0));
        assert_eq!(a.at(2020), Some(100.0));
        assert_eq!(a.points().len(), 6);
    }

    #[test]
    fn interpolation_needs_two_points() {
        let one = GdpTrajectory::new(GdpRegion::Global, vec![(2020, 100.0)]).unwrap();
        assert!(interpolate_gdp(&one).is_err());
        assert!(GdpTrajectory::new(GdpRegion::Global, vec![(2020, 100.0), (2020, 101.0)]).is_err());
    }

    #[test]
    fn two_year_present_value() {
        let gdp = GdpTrajectory::flat(GdpRegion::Global, (2020, 2021), 100.0).unwrap();
        let losses = BTreeMap::from([(2020, 0.01), (2021, 0.01)]);
        let pv = present_value(&losses, &gdp, DiscountSpec::new(0.04, 2020).unwrap(), (2020, 2021)).unwrap();
        assert_relative_eq!(pv.total, 1.0 + 1.0 / 1.04, max_relative = 1e-14);
        assert!((pv.total - 1.9615).abs() < 5e-5);
    }

    #[test]
    fn zero_losses_zero_value_and_coverage_gaps() {
        let gdp = GdpTrajectory::flat(GdpRegion::Global, (2020, 2030), 50.0).unwrap();
        let zeros: BTreeMap<i32, f64> = (2020..=2030).map(|y| (y, 0.0)).collect();
        assert_eq!(present_value(&zeros, &gdp, DiscountSpec::default(), (2020, 2030)).unwrap().total, 0.0);
        assert!(matches!(
            present_value(&zeros, &gdp, DiscountSpec::default(), (2020, 2031)),
            Err(Error::Coverage { year: 2031, .. })
        ));
    }

    #[test]
    fn discount_rate_must_exceed_minus_one() {
        assert!(DiscountSpec::new(-1.0, 2020).is_err());
        assert!(DiscountSpec::new(-0.5, 2020).is_ok());
    }

    #[test]
    fn avoided_loss_examples() {
        let gdp = GdpTrajectory::flat(GdpRegion::Global, (2020, 2020), 100.0).unwrap();
        let d = DiscountSpec::default();
        let pv = |l: f64| present_value(&BTreeMap::from([(2020, l)]), &gdp, d, (2020, 2020)).unwrap();
        assert_eq!(avoided_losses(&pv(1.0), &pv(1.0)).unwrap(), 0.0);
        assert_relative_eq!(avoided_losses(&pv(1.0), &pv(0.6)).unwrap(), 40.0, max_relative = 1e-12);
        let other = pv(0.6).with_variant(Variant::Svar);
        assert!(avoided_losses(&pv(1.0), &other).is_err());
    }
}
