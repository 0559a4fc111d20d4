//! The quadratic damage function evaluated on warming moments.
//!
//! Loss as a fraction of GDP is `alpha * E[dT^2]` with `alpha = a / C^2`.
//! With zero variance this is the familiar `alpha * mean^2`; admitting
//! variability adds `alpha * var`. The reference-period value is subtracted.

use serde::{Deserialize, Serialize};

use crate::climatology::WarmingMoments;
use crate::error::{Error, Result};
use crate::variant::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageParams {
    /// Loss fraction of GDP at the calibration warming.
    pub a: f64,
    /// Calibration warming in degrees C.
    pub c: f64,
    alpha: f64,
}

impl DamageParams {
    pub const DEFAULT_A: f64 = 0.0201;
    pub const DEFAULT_C: f64 = 2.5;

    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("damage parameters a={a}, C={c}")));
        }
        Ok(DamageParams { a, c, alpha: a / (c * c) })
    }

    /// Fraction of GDP lost per squared degree.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for DamageParams {
    fn default() -> Self {
        DamageParams::new(Self::DEFAULT_A, Self::DEFAULT_C).expect("defaults are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageResult {
    pub variant: Variant,
    /// Loss as a fraction of GDP, net of the reference value.
    pub loss: f64,
    pub year: i32,
    /// `alpha * reference.mean_sq`, the amount subtracted.
    pub reference_adjustment: f64,
}

fn check_compatible(moments: &WarmingMoments, reference: &WarmingMoments) -> Result<()> {
    if moments.variant != reference.variant {
        return Err(Error::VariantMismatch { expected: moments.variant, got: reference.variant });
    }
    if moments.hemisphere != reference.hemisphere || moments.months != reference.months {
        return Err(Error::MetadataMismatch(format!(
            "moments over {} months {} vs reference over {} months {}",
            moments.hemisphere, moments.months, reference.hemisphere, reference.months
        )));
    }
    Ok(())
}

/// Evaluates the damage function on `moments` net of `reference`.
pub fn damage(moments: &WarmingMoments, params: &DamageParams, reference: &WarmingMoments) -> Result<DamageResult> {
    check_compatible(moments, reference)?;
    let reference_adjustment = params.alpha * reference.mean_sq;
    Ok(DamageResult {
        variant: moments.variant,
        loss: params.alpha * (moments.mean_sq - reference.mean_sq),
        year: moments.center_year(),
        reference_adjustment,
    })
}

/// Shares of the S&Tvar-None gap due to spatial variation, temporal
/// variability and their interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub spatial: f64,
    pub temporal: f64,
    pub interaction: f64,
}

/// Splits the `stvar - none` gap. Signs propagate; only an exactly zero gap is an error.
pub fn decompose(none: f64, tvar: f64, svar: f64, stvar: f64) -> Result<Decomposition> {
    let gap = stvar - none;
    if gap == 0.0 {
        return Err(Error::ZeroDenominator("S&Tvar equals None"));
    }
    let spatial = (svar - none) / gap;
    let temporal = (tvar - none) / gap;
    Ok(Decomposition { spatial, temporal, interaction: 1.0 - spatial - temporal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn calibration_point_reproduces_a() {
        let p = DamageParams::default();
        let m = WarmingMoments::new(Variant::None, 2.5, 0.0).unwrap();
        let d = damage(&m, &p, &WarmingMoments::zero(Variant::None)).unwrap();
        assert_relative_eq!(d.loss, 0.0201, max_relative = 1e-14);
        assert_eq!(d.reference_adjustment, 0.0);
    }

    #[test]
    fn zero_warming_zero_loss() {
        let m = WarmingMoments::zero(Variant::Stvar);
        let d = damage(&m, &DamageParams::default(), &m).unwrap();
        assert_eq!(d.loss, 0.0);
    }

    #[test]
    fn one_three_example_losses() {
        let p = DamageParams::default();
        let st = WarmingMoments::new(Variant::Stvar, 2.0, 1.0).unwrap();
        let none = WarmingMoments::new(Variant::None, 2.0, 0.0).unwrap();
        let d_st = damage(&st, &p, &WarmingMoments::zero(Variant::Stvar)).unwrap();
        let d_none = damage(&none, &p, &WarmingMoments::zero(Variant::None)).unwrap();
        assert_relative_eq!(d_st.loss, 0.01608, max_relative = 1e-12);
        assert_relative_eq!(d_none.loss, 0.012864, max_relative = 1e-12);
    }

    #[test]
    fn reference_is_subtracted() {
        let p = DamageParams::default();
        let m = WarmingMoments::new(Variant::Tvar, 1.0, 0.5).unwrap();
        let r = WarmingMoments::new(Variant::Tvar, 0.0, 0.1).unwrap();
        let d = damage(&m, &p, &r).unwrap();
        assert_relative_eq!(d.loss, p.alpha() * 1.4, max_relative = 1e-12);
        assert_relative_eq!(d.reference_adjustment, p.alpha() * 0.1, max_relative = 1e-12);
    }

    #[test]
    fn variant_mismatch_is_rejected() {
        let m = WarmingMoments::zero(Variant::Svar);
        let r = WarmingMoments::zero(Variant::None);
        assert!(matches!(damage(&m, &DamageParams::default(), &r), Err(Error::VariantMismatch { .. })));
    }

    #[test]
    fn params_validate() {
        assert!(DamageParams::new(0.02, 0.0).is_err());
        assert!(DamageParams::new(0.02, -1.0).is_err());
        let p = DamageParams::new(0.0201, 2.5).unwrap();
        assert_eq!(p.alpha(), 0.0201 / 6.25);
    }

    #[test]
    fn decompose_table_row() {
        let d = decompose(0.0, 245.31, 34647.70, 47521.66).unwrap();
        assert!((d.spatial - 0.7291).abs() < 1e-4);
        assert!((d.temporal - 0.0052).abs() < 1e-4);
        assert!((d.interaction - 0.2657).abs() < 1e-4);
    }

    #[test]
    fn decompose_degenerate_cases() {
        let d = decompose(1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!((d.spatial, d.temporal, d.interaction), (0.0, 0.0, 1.0));
        assert!(matches!(decompose(1.0, 2.0, 3.0, 1.0), Err(Error::ZeroDenominator(_))));
        let neg = decompose(10.0, 9.0, 12.0, 8.0).unwrap();
        assert_relative_eq!(neg.spatial, -1.0);
        assert_relative_eq!(neg.temporal, 0.5);
    }
}
