use std::collections::BTreeMap;

use approx::assert_relative_eq;
use climvar_core::climatology::{apply_pattern, moments, MomentSource, MomentWindow, ScalingPattern, WarmingMoments};
use climvar_core::damage::{damage, DamageParams};
use climvar_core::economics::{avoided_losses, present_value, DiscountSpec};
use climvar_core::grid::{GdpRegion, GdpTrajectory, GlobalSeries, GridField, GridMeta};
use climvar_core::regional::{RegionalTable, RiceRegion, DEFAULT_FIT_GRID};
use climvar_core::scc::{
    scc, scc_breakdown, BreakdownInputs, MomentFactors, MonthlyFactors, PulseResponse, SccSetup,
};
use climvar_core::sectoral::{
    monthly_damage, monthly_params, seasonal_params, GdpWeights, MonthHemisphereMoments, Sector, SectorCalibration,
    HEMISPHERES,
};
use climvar_core::{Hemisphere, MonthSet, Variant};

fn monthly_moments(field: &GridField, variant: Variant) -> MonthHemisphereMoments {
    let years = field.years();
    let mut out = BTreeMap::new();
    for m in 1..=12u8 {
        for h in HEMISPHERES {
            let months = match variant {
                Variant::None | Variant::Svar => MonthSet::all(),
                Variant::Tvar | Variant::Stvar => MonthSet::single(m).unwrap(),
            };
            let mo = moments(variant, MomentSource::Field(field), &MomentWindow::new(years, months, h)).unwrap();
            out.insert((m, h), mo);
        }
    }
    out
}

fn zeros(variant: Variant) -> MonthHemisphereMoments {
    (1..=12u8).flat_map(|m| HEMISPHERES.map(|h| ((m, h), WarmingMoments::zero(variant)))).collect()
}

#[test]
fn winter_warming_lowers_tvar_for_summer_sectors() {
    // Northern winter warms by 3 degrees, every other month by 1; the south warms uniformly.
    let field = GridField::from_fn((2080, 2080), vec![-45.0, 45.0], vec![0.0], GridMeta::default(), |_, m, lat, _| {
        if lat > 0.0 && matches!(m, 12 | 1 | 2) {
            3.0
        } else {
            1.0
        }
    })
    .unwrap();
    let coeffs = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
    let p = DamageParams::default();
    let tvar = monthly_damage(&coeffs, &monthly_moments(&field, Variant::Tvar), &p, &zeros(Variant::Tvar)).unwrap();
    let none = monthly_damage(&coeffs, &monthly_moments(&field, Variant::None), &p, &zeros(Variant::None)).unwrap();
    assert!(tvar.sector_total(Sector::Water) < none.sector_total(Sector::Water));
    assert!(tvar.sector_total(Sector::Energy) > none.sector_total(Sector::Energy));
}

#[test]
fn avoided_losses_grow_with_variability() {
    let slopes: Vec<f64> = (0..12 * 4).map(|k| 0.4 + 0.1 * (k % 7) as f64 + 0.05 * (k / 4) as f64).collect();
    let pattern = ScalingPattern::new(vec![-60.0, -10.0, 20.0, 70.0], vec![0.0], vec![true; 4], slopes).unwrap();
    let years = (2020, 2100);
    let reference = GlobalSeries::annual(2020, (0..81).map(|k| 1.2 + 0.045 * k as f64).collect()).unwrap();
    let policy = GlobalSeries::annual(2020, (0..81).map(|k| 1.2 + 0.01 * k as f64).collect()).unwrap();
    let gdp = GdpTrajectory::flat(GdpRegion::Global, years, 87270.0).unwrap();
    let p = DamageParams::default();
    let pv = |series: &GlobalSeries, variant: Variant| {
        let field = apply_pattern(&pattern, series, years).unwrap();
        let losses: BTreeMap<i32, f64> = (years.0..=years.1)
            .map(|y| {
                let m = moments(variant, MomentSource::Field(&field), &MomentWindow::annual_global((y, y))).unwrap();
                let r = WarmingMoments::zero(variant).with_domain((y, y), MonthSet::all(), Hemisphere::Global);
                (y, damage(&m, &p, &r).unwrap().loss)
            })
            .collect();
        present_value(&losses, &gdp, DiscountSpec::default(), years).unwrap().with_variant(variant)
    };
    let avoided = |v| avoided_losses(&pv(&reference, v), &pv(&policy, v)).unwrap();
    let (none, svar, stvar) = (avoided(Variant::None), avoided(Variant::Svar), avoided(Variant::Stvar));
    assert!(none > 0.0);
    assert!(stvar >= svar && svar >= none);
}

fn linear_setup<'a>(baseline: &'a GlobalSeries, gdp: &'a GdpTrajectory) -> SccSetup<'a> {
    let mut s = SccSetup::new(baseline, gdp, DiscountSpec::default(), PulseResponse::illustrative());
    s.horizon = (2020, 2100);
    s
}

fn linear_inputs() -> (GlobalSeries, GdpTrajectory) {
    let baseline = GlobalSeries::annual(2020, (0..81).map(|k| 4.0 * k as f64 / 80.0).collect()).unwrap();
    let gdp = GdpTrajectory::flat(GdpRegion::Global, (2020, 2100), 87270.0).unwrap();
    (baseline, gdp)
}

#[test]
fn sector_scc_follows_sector_signs() {
    let (baseline, gdp) = linear_inputs();
    let setup = linear_setup(&baseline, &gdp);
    let p = DamageParams::default();
    let factors = MonthlyFactors::uniform();
    let coeffs = monthly_params(&seasonal_params(&SectorCalibration::default()).unwrap(), GdpWeights::default());
    let r = scc_breakdown(&setup, Variant::Stvar, &p, BreakdownInputs::Sector { coeffs: &coeffs, factors: &factors })
        .unwrap();
    let b = r.breakdown.unwrap();
    assert_eq!(b.entries.len(), 15);
    assert!(b.get("Time use").unwrap() < 0.0);
    assert!(b.get("Health").unwrap() > 0.0);
    // Uniform warming: sector totals scale the global SCC by each sector's share of the calibration loss.
    let global = scc(&setup, Variant::Stvar, &p, &MomentFactors::uniform()).unwrap().value;
    let cal = SectorCalibration::default();
    assert_relative_eq!(r.value, global * cal.total_loss() / p.a, max_relative = 1e-9);

    let water = SectorCalibration::default().only(Sector::Water);
    let coeffs = monthly_params(&seasonal_params(&water).unwrap(), GdpWeights::default());
    let w = scc_breakdown(&setup, Variant::None, &p, BreakdownInputs::Sector { coeffs: &coeffs, factors: &factors })
        .unwrap();
    assert_relative_eq!(w.value, global * 0.0024 / p.a, max_relative = 1e-9);
}

#[test]
fn regional_scc_sums_to_global() {
    let (baseline, gdp) = linear_inputs();
    let setup = linear_setup(&baseline, &gdp);
    let p = DamageParams::default();
    let table = RegionalTable::rice().fitted(&DEFAULT_FIT_GRID).unwrap();
    let shares = [0.17, 0.16, 0.06, 0.03, 0.02, 0.14, 0.07, 0.04, 0.04, 0.08, 0.08, 0.11];
    let regional: BTreeMap<RiceRegion, GdpTrajectory> = RiceRegion::ALL
        .into_iter()
        .zip(shares)
        .map(|(r, s)| (r, GdpTrajectory::flat(GdpRegion::Rice(r), (2020, 2100), 87270.0 * s).unwrap()))
        .collect();
    let factors = MomentFactors { none: 1.0, tvar: 1.0, svar: 1.2, stvar: 1.3 };
    for v in Variant::ALL {
        let r = scc_breakdown(&setup, v, &p, BreakdownInputs::Region { table: &table, gdp: &regional, factors: &factors })
            .unwrap();
        let global = scc(&setup, v, &p, &factors).unwrap().value;
        assert_relative_eq!(r.value, global, max_relative = 1e-12);
        assert_relative_eq!(r.breakdown.unwrap().total(), global, max_relative = 1e-9);
    }
}
