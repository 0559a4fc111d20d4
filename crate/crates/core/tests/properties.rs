use std::collections::BTreeMap;

use climvar_core::climatology::{
    apply_pattern, fit_scaling_pattern, moments, rolling_climatology, MomentSource, MomentWindow, ScalingPattern,
    WarmingMoments,
};
use climvar_core::damage::{damage, decompose, DamageParams};
use climvar_core::economics::{interpolate_gdp, present_value, DiscountSpec};
use climvar_core::grid::{GdpRegion, GdpTrajectory, GlobalSeries, GridField, GridMeta};
use climvar_core::regional::{harmonize_regions, RiceRegion};
use climvar_core::sectoral::{monthly_params, seasonal_params, GdpWeights, SectorCalibration, Study};
use climvar_core::{Hemisphere, MonthSet, Variant};
use proptest::prelude::*;

const LATS: [f64; 3] = [-50.0, 5.0, 65.0];
const LONS: [f64; 2] = [0.0, 180.0];

fn field_from(years: usize, values: &[f64]) -> GridField {
    GridField::new(
        (2000, 2000 + years as i32 - 1),
        LATS.to_vec(),
        LONS.to_vec(),
        values.to_vec(),
        vec![true; 6],
        GridMeta::default(),
    )
    .unwrap()
}

fn field_strategy() -> impl Strategy<Value = GridField> {
    (1usize..4).prop_flat_map(|years| {
        prop::collection::vec(-5.0..8.0f64, years * 12 * 6).prop_map(move |v| field_from(years, &v))
    })
}

fn window_for(field: &GridField, hemisphere: Hemisphere) -> MomentWindow {
    MomentWindow::new(field.years(), MonthSet::all(), hemisphere)
}

fn hemisphere() -> impl Strategy<Value = Hemisphere> {
    prop_oneof![Just(Hemisphere::Global), Just(Hemisphere::North), Just(Hemisphere::South)]
}

proptest! {
    #[test]
    fn moments_obey_jensen_and_variance_identity(field in field_strategy(), h in hemisphere()) {
        for v in Variant::ALL {
            let m = moments(v, MomentSource::Field(&field), &window_for(&field, h)).unwrap();
            prop_assert!(m.variance >= 0.0);
            prop_assert!(m.mean_sq >= m.mean * m.mean * (1.0 - 1e-12));
            let scale = m.mean_sq.abs().max(1e-12);
            prop_assert!((m.mean_sq - (m.mean * m.mean + m.variance)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn stvar_damage_dominates_none(field in field_strategy()) {
        let p = DamageParams::default();
        let w = window_for(&field, Hemisphere::Global);
        let st = moments(Variant::Stvar, MomentSource::Field(&field), &w).unwrap();
        let none = moments(Variant::None, MomentSource::Field(&field), &w).unwrap();
        let d_st = damage(&st, &p, &WarmingMoments::zero(Variant::Stvar).with_domain(w.years, w.months, w.hemisphere)).unwrap();
        let d_none = damage(&none, &p, &WarmingMoments::zero(Variant::None).with_domain(w.years, w.months, w.hemisphere)).unwrap();
        prop_assert!(d_st.loss >= d_none.loss * (1.0 - 1e-12));
        prop_assert!((d_st.loss - p.alpha() * (st.mean * st.mean + st.variance)).abs() <= 1e-12 * d_st.loss.abs().max(1e-300));
    }

    #[test]
    fn damage_is_linear_in_a_and_monotone_in_mean_sq(
        a in 0.001..0.1f64, k in 0.1..10.0f64, mean in 0.0..6.0f64, var in 0.0..4.0f64, extra in 0.0..3.0f64,
    ) {
        let m = WarmingMoments::new(Variant::Stvar, mean, var).unwrap();
        let hi = WarmingMoments::new(Variant::Stvar, mean, var + extra).unwrap();
        let z = WarmingMoments::zero(Variant::Stvar);
        let base = damage(&m, &DamageParams::new(a, 2.5).unwrap(), &z).unwrap().loss;
        let scaled = damage(&m, &DamageParams::new(k * a, 2.5).unwrap(), &z).unwrap().loss;
        prop_assert!((scaled - k * base).abs() <= 1e-12 * scaled.abs().max(1e-300));
        prop_assert!(damage(&hi, &DamageParams::new(a, 2.5).unwrap(), &z).unwrap().loss >= base);
    }

    #[test]
    fn decomposition_shares_sum_to_one(none in -10.0..10.0f64, t in -10.0..10.0f64, s in -10.0..10.0f64, gap in 0.01..50.0f64) {
        let d = decompose(none, t, s, none + gap).unwrap();
        prop_assert!((d.spatial + d.temporal + d.interaction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rolling_mean_commutes_with_offset(values in prop::collection::vec(-3.0..3.0f64, 7 * 12 * 6), c in -10.0..10.0f64) {
        let f = field_from(7, &values);
        let shifted = field_from(7, &values.iter().map(|v| v + c).collect::<Vec<_>>());
        let a = rolling_climatology(&f, 5).unwrap();
        let b = rolling_climatology(&shifted, 5).unwrap();
        prop_assert_eq!(a.years(), (2002, 2004));
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x + c - y).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_recovers_every_cell_slope(
        slopes in prop::collection::vec(-3.0..3.0f64, 12 * 6),
        g in prop::collection::vec(-2.0..4.0f64, 5..20),
    ) {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        prop_assume!(g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() > 1e-3);
        let n = g.len();
        let global = GlobalSeries::annual(2000, g.clone()).unwrap();
        let mut values = Vec::with_capacity(n * 72);
        for x in &g {
            for s in &slopes {
                values.push(s * x);
            }
        }
        let field = field_from(n, &values);
        let p = fit_scaling_pattern(&field, &global).unwrap();
        for m in 1..=12u8 {
            for (c, got) in p.layer(m).iter().enumerate() {
                let want = slopes[(m as usize - 1) * 6 + c];
                prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pattern_scaling_identity(
        slopes in prop::collection::vec(-2.0..3.0f64, 12 * 6),
        g in prop::collection::vec(-1.0..6.0f64, 1..6),
        h in hemisphere(),
    ) {
        let pattern = ScalingPattern::new(LATS.to_vec(), LONS.to_vec(), vec![true; 6], slopes).unwrap();
        let global = GlobalSeries::annual(2030, g.clone()).unwrap();
        let field = apply_pattern(&pattern, &global, (2030, 2030 + g.len() as i32 - 1)).unwrap();
        let p_sq = pattern.mean_square(MonthSet::all(), h).unwrap();
        for (k, x) in g.iter().enumerate() {
            let y = 2030 + k as i32;
            let m = moments(Variant::Stvar, MomentSource::Field(&field), &MomentWindow::new((y, y), MonthSet::all(), h)).unwrap();
            let want = x * x * p_sq;
            prop_assert!((m.mean_sq - want).abs() <= 1e-9 * want.abs().max(1e-12));
        }
    }

    #[test]
    fn present_value_properties(
        losses in prop::collection::vec(0.0..0.2f64, 1..40),
        gdp in 10.0..1000.0f64,
        k in 0.1..5.0f64,
        r in 0.001..0.1f64,
    ) {
        let end = 2020 + losses.len() as i32 - 1;
        let g = GdpTrajectory::flat(GdpRegion::Global, (2020, end), gdp).unwrap();
        let map: BTreeMap<i32, f64> = losses.iter().enumerate().map(|(i, l)| (2020 + i as i32, *l)).collect();
        let scaled: BTreeMap<i32, f64> = map.iter().map(|(y, l)| (*y, l * k)).collect();
        let d = DiscountSpec::new(r, 2020).unwrap();
        let pv = present_value(&map, &g, d, (2020, end)).unwrap().total;
        let pv_k = present_value(&scaled, &g, d, (2020, end)).unwrap().total;
        prop_assert!((pv_k - k * pv).abs() <= 1e-12 * pv_k.abs().max(1e-300));
        let higher = present_value(&map, &g, DiscountSpec::new(r + 0.01, 2020).unwrap(), (2020, end)).unwrap().total;
        prop_assert!(higher <= pv);
        let undiscounted = present_value(&map, &g, DiscountSpec::new(0.0, 2020).unwrap(), (2020, end)).unwrap().total;
        let plain: f64 = losses.iter().map(|l| l * gdp).sum();
        prop_assert!((undiscounted - plain).abs() <= 1e-12 * plain.max(1e-300));
    }

    #[test]
    fn interpolation_stays_between_knots(v0 in 1.0..1e5f64, v1 in 1.0..1e5f64, span in 1i32..30) {
        let t = GdpTrajectory::new(GdpRegion::Global, vec![(2020, v0), (2020 + span, v1)]).unwrap();
        let a = interpolate_gdp(&t).unwrap();
        let (lo, hi) = (v0.min(v1), v0.max(v1));
        let mut prev = v0;
        for y in 2020..=2020 + span {
            let v = a.at(y).unwrap();
            prop_assert!(v >= lo * (1.0 - 1e-14) && v <= hi * (1.0 + 1e-14));
            let monotone = if v1 >= v0 { v >= prev - 1e-9 } else { v <= prev + 1e-9 };
            prop_assert!(monotone);
            prev = v;
        }
    }

    #[test]
    fn harmonization_preserves_ratios_and_total(
        fractions in prop::collection::vec(0.001..0.1f64, 12),
        gdps in prop::collection::vec(1.0..1e4f64, 12),
        global in 0.001..0.1f64,
    ) {
        let losses: BTreeMap<RiceRegion, f64> = RiceRegion::ALL.into_iter().zip(fractions.iter().copied()).collect();
        let gdp: BTreeMap<RiceRegion, f64> = RiceRegion::ALL.into_iter().zip(gdps.iter().copied()).collect();
        let world: f64 = gdps.iter().sum();
        let out = harmonize_regions(&losses, &gdp, global, world).unwrap();
        let total: f64 = out.values().sum();
        prop_assert!((total - global * world).abs() <= 1e-9 * global * world);
        let (a, b) = (RiceRegion::ALL[0], RiceRegion::ALL[7]);
        let before = losses[&a] * gdp[&a] / (losses[&b] * gdp[&b]);
        prop_assert!((out[&a] / out[&b] - before).abs() <= 1e-12 * before);
    }

    #[test]
    fn monthly_coefficients_conserve_any_weights(north in 0.01..1.0f64) {
        for study in [Study::Average, Study::Fankhauser, Study::Berz, Study::Tol, Study::Nordhaus] {
            let cal = SectorCalibration::builtin(study);
            let seasonal = seasonal_params(&cal).unwrap();
            let monthly = monthly_params(&seasonal, GdpWeights::new(north, 1.0 - north).unwrap());
            prop_assert!((monthly.total() - cal.total_loss()).abs() <= 1e-9 * cal.total_loss().abs());
        }
    }
}
