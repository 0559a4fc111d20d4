//! One function per subcommand. Each loads its inputs, records what
//! determines its outputs, and writes tables.

use std::collections::BTreeMap;
use std::path::PathBuf;

use climvar_core::climatology::{anomalize, fit_scaling_pattern, rolling_climatology, ScalingPattern, DEFAULT_WINDOW};
use climvar_core::damage::{damage, decompose};
use climvar_core::economics::{avoided_losses, interpolate_gdp, present_value, DiscountSpec, PresentValue};
use climvar_core::grid::{
    load_gdp, load_global_series, load_grid, save_grid, Frequency, GdpRegion, GdpSet,
    GdpTrajectory, GlobalSeries, PayloadFormat,
};
use climvar_core::regional::{harmonize_regions, regional_damage, RegionalTable, RiceRegion, DEFAULT_FIT_GRID};
use climvar_core::scc::{
    scc, scc_breakdown, scc_with_factor_path, BreakdownInputs, MomentFactors, MonthlyFactors, SccSetup,
};
use climvar_core::sectoral::{
    monthly_damage, monthly_params, seasonal_params, GdpWeights, Season, Sector, SectorCalibration, HEMISPHERES,
};
use climvar_core::{Hemisphere, MonthSet, Variant};

use crate::config::{invalid, RunConfig};
use crate::output::{Cell, Provenance, Table, Writer};
use crate::sources::{self, cells, monthly_moments, obtain_rows, paired, MomentArgs, Role, Sources};

fn common(cfg: &RunConfig, p: &mut Provenance) {
    p.param("scenario", &cfg.scenario)
        .param("variants", cfg.variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("+"))
        .param("damage_a", cfg.damage.a)
        .param("damage_c", cfg.damage.c);
}

fn writer(cfg: &RunConfig, command: &'static str, p: &Provenance) -> anyhow::Result<Writer> {
    Writer::new(&cfg.out_dir, cfg.json, command, &cfg.scenario, p)
}

fn rate_label(rate: f64) -> String {
    climvar_core::fmt::g9(rate)
}

fn global_gdp(cfg: &RunConfig, p: &mut Provenance) -> anyhow::Result<(GdpTrajectory, GdpSet)> {
    let path = cfg.require("gdp", &cfg.inputs.gdp)?;
    p.file("gdp", &path)?;
    let set = load_gdp(&path)?;
    let global = set
        .get(&GdpRegion::Global)
        .ok_or_else(|| invalid(format!("{} has no GLOBAL rows", path.display())))?;
    let global = interpolate_if_sparse(global)?;
    Ok((global, set))
}

fn interpolate_if_sparse(t: &GdpTrajectory) -> anyhow::Result<GdpTrajectory> {
    if t.points().len() < 2 {
        return Ok(t.clone());
    }
    Ok(interpolate_gdp(t)?)
}

pub fn pattern(cfg: &RunConfig, base: Option<(i32, i32)>, format: PayloadFormat) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    p.param("base", base.map_or("none".into(), |(a, b)| format!("{a}-{b}")))
        .param("format", format!("{format:?}"));
    let grid_path = cfg.require("grid", &cfg.inputs.grid)?;
    let global_path = cfg.require("global", &cfg.inputs.global)?;
    p.file("grid", &grid_path)?.file("global", &global_path)?;
    let mut field = load_grid(&grid_path)?;
    if let Some((a, b)) = base {
        field = anomalize(&field, a, b)?;
    }
    let global = load_global_series(&global_path)?;
    let fitted = fit_scaling_pattern(&field, &global)?;

    let mut w = writer(cfg, "pattern", &p)?;
    let mut grid = fitted.to_grid();
    grid.meta_mut().provenance = format!("{} config_hash={}", crate::output::TOOL, w.hash());
    let manifest = w.dir().join("pattern.json");
    save_grid(&grid, &manifest, format)?;
    w.record(manifest);

    let mut t = Table::new("pattern_summary", &["month", "mean_slope", "mean_sq_slope", "mean_residual_variance"]);
    let weights = fitted.cell_weights(Hemisphere::Global)?;
    for m in 1..=12u8 {
        let layer = fitted.layer(m);
        let rv = fitted.residual_variance(m);
        let (mut mean, mut sq, mut var) = (0.0, 0.0, 0.0);
        for ((s, r), wc) in layer.iter().zip(rv).zip(&weights) {
            if *wc > 0.0 {
                mean += wc * s;
                sq += wc * s * s;
                var += wc * r;
            }
        }
        t.push(vec![m.into(), mean.into(), sq.into(), var.into()]);
    }
    w.write(&t)?;
    Ok(w)
}

pub fn climatology(cfg: &RunConfig, window: usize) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    p.param("window", window);
    match (&cfg.inputs.grid, &cfg.inputs.global) {
        (Some(g), _) => {
            p.file("grid", g)?;
            let mut smooth = rolling_climatology(&load_grid(g)?, window)?;
            let mut w = writer(cfg, "climatology", &p)?;
            smooth.meta_mut().provenance = format!("{} config_hash={}", crate::output::TOOL, w.hash());
            let manifest = w.dir().join("climatology.json");
            save_grid(&smooth, &manifest, PayloadFormat::Csv)?;
            w.record(manifest);
            let mut t = Table::new("climatology_range", &["first_year", "last_year", "window"]);
            let (a, b) = smooth.years();
            t.push(vec![a.into(), b.into(), (window as i32).into()]);
            w.write(&t)?;
            Ok(w)
        }
        (None, Some(s)) => {
            p.file("global", s)?;
            let smooth = rolling_climatology(&load_global_series(s)?, window)?;
            let mut w = writer(cfg, "climatology", &p)?;
            let mut t = match smooth.frequency() {
                Frequency::Annual => Table::new("climatology", &["year", "value"]),
                Frequency::Monthly => Table::new("climatology", &["year", "month", "value"]),
            };
            for (year, month, v) in smooth.iter() {
                let mut row: Vec<Cell> = vec![year.into()];
                row.extend(month.map(Cell::from));
                row.push(v.into());
                t.push(row);
            }
            w.write(&t)?;
            Ok(w)
        }
        (None, None) => Err(invalid("climatology needs --grid or --global")),
    }
}

pub fn moments(cfg: &RunConfig, args: &MomentArgs) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    args.record(&mut p);
    let src = Sources::load(cfg, args, &mut p)?;
    let rows = sources::compute_rows(cfg, args, &src)?;
    let mut w = writer(cfg, "moments", &p)?;
    w.write(&sources::moments_table(&rows))?;
    Ok(w)
}

pub fn damages(cfg: &RunConfig, args: &MomentArgs) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    let rows = obtain_rows(cfg, args, &mut p)?;
    let mut t = Table::new(
        "damages",
        &["year", "variant", "hemisphere", "months", "mean_sq", "reference_mean_sq", "loss"],
    );
    for (row, reference) in paired(&rows) {
        let d = damage(&row.moments, &cfg.damage, &reference)?;
        let mut c = cells(row);
        c.extend([row.moments.mean_sq.into(), reference.mean_sq.into(), d.loss.into()]);
        t.push(c);
    }
    let mut w = writer(cfg, "damages", &p)?;
    w.write(&t)?;
    Ok(w)
}

fn sector_calibration(cfg: &RunConfig, p: &mut Provenance) -> anyhow::Result<SectorCalibration> {
    match &cfg.inputs.sectors {
        Some(path) => {
            p.file("sectors", path)?;
            Ok(SectorCalibration::from_csv(path)?)
        }
        None => Ok(SectorCalibration::default()),
    }
}

pub fn sectors(cfg: &RunConfig, args: &MomentArgs, with_losses: bool) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    let cal = sector_calibration(cfg, &mut p)?;
    let seasonal = seasonal_params(&cal)?;
    let monthly = monthly_params(&seasonal, GdpWeights::default());

    let mut t_season = Table::new("sector_seasonal", &["sector", "loss_at_c", "spring", "summer", "fall", "winter"]);
    for row in cal.rows() {
        let mut c: Vec<Cell> = vec![row.sector.name().into(), row.loss_at_c.into()];
        c.extend(Season::ALL.iter().map(|&s| Cell::from(seasonal.get(row.sector, s))));
        t_season.push(c);
    }
    let mut t_totals = Table::new("season_totals", &["season", "coefficient"]);
    for s in Season::ALL {
        t_totals.push(vec![s.name().into(), seasonal.season_total(s).into()]);
    }
    t_totals.push(vec!["annual".into(), seasonal.total().into()]);
    let mut t_monthly = Table::new("monthly_coefficients", &["month", "sector", "nh", "sh"]);
    for m in 1..=12u8 {
        for s in Sector::ALL {
            t_monthly.push(vec![
                m.into(),
                s.name().into(),
                monthly.get(m, s, Hemisphere::North).into(),
                monthly.get(m, s, Hemisphere::South).into(),
            ]);
        }
    }

    let mut losses = None;
    if with_losses {
        args.record(&mut p);
        let src = Sources::load(cfg, args, &mut p)?;
        let years = args.years.unwrap_or_else(|| {
            let (a, b) = src.default_years();
            (a + args.half_window, b - args.half_window)
        });
        let mut t = Table::new("sector_losses", &["year", "variant", "month", "sector", "loss"]);
        for &variant in &cfg.variants {
            let reference = match args.reference {
                Some(r) => monthly_moments(&src, variant, r)?,
                None => (1..=12u8)
                    .flat_map(|m| HEMISPHERES.map(|h| ((m, h), climvar_core::climatology::WarmingMoments::zero(variant))))
                    .collect(),
            };
            for y in years.0..=years.1 {
                let mm = monthly_moments(&src, variant, (y - args.half_window, y + args.half_window))?;
                let l = monthly_damage(&monthly, &mm, &cfg.damage, &reference)?;
                for m in 1..=12u8 {
                    for s in Sector::ALL {
                        t.push(vec![y.into(), variant.as_str().into(), m.into(), s.name().into(), l.get(m, s).into()]);
                    }
                }
            }
        }
        losses = Some(t);
    }

    let mut w = writer(cfg, "sectors", &p)?;
    w.write(&t_season)?;
    w.write(&t_totals)?;
    w.write(&t_monthly)?;
    if let Some(t) = losses {
        w.write(&t)?;
    }
    Ok(w)
}

fn regional_table(cfg: &RunConfig, p: &mut Provenance) -> anyhow::Result<RegionalTable> {
    let table = match &cfg.inputs.regions {
        Some(path) => {
            p.file("regions", path)?;
            RegionalTable::from_csv(path)?
        }
        None => RegionalTable::rice(),
    };
    Ok(table.fitted(&DEFAULT_FIT_GRID)?)
}

fn regional_gdp(set: &GdpSet) -> anyhow::Result<Option<BTreeMap<RiceRegion, GdpTrajectory>>> {
    let mut out = BTreeMap::new();
    for r in RiceRegion::ALL {
        match set.get(&GdpRegion::Rice(r)) {
            Some(t) => {
                out.insert(r, interpolate_if_sparse(t)?);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

pub fn regions(cfg: &RunConfig, args: &MomentArgs, with_losses: bool) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    let table = regional_table(cfg, &mut p)?;
    let mut t_params = Table::new("regional_params", &["region", "gamma", "alpha", "alpha_fit"]);
    for r in table.iter() {
        t_params.push(vec![r.region.code().into(), r.gamma.into(), r.alpha.into(), r.alpha_fit.unwrap_or(f64::NAN).into()]);
    }

    let mut losses = None;
    if with_losses {
        let rows = obtain_rows(cfg, args, &mut p)?;
        let gdp = match &cfg.inputs.gdp {
            Some(_) => {
                let (global, set) = global_gdp(cfg, &mut p)?;
                regional_gdp(&set)?.map(|r| (global, r))
            }
            None => None,
        };
        let columns: &[&'static str] = if gdp.is_some() {
            &["year", "variant", "region", "loss_fraction", "loss_currency_harmonized"]
        } else {
            &["year", "variant", "region", "loss_fraction"]
        };
        let mut t = Table::new("regional_losses", columns);
        for (row, reference) in paired(&rows) {
            if row.moments.hemisphere != Hemisphere::Global || !row.moments.months.is_all() {
                continue;
            }
            let mut fractions = BTreeMap::new();
            for r in table.iter() {
                fractions.insert(r.region, regional_damage(r, &row.moments, &reference)?);
            }
            let harmonized = match &gdp {
                Some((global, regional)) => {
                    let year = row.year;
                    let g = global.at(year).ok_or_else(|| climvar_core::Error::Coverage { what: "GDP".into(), year })?;
                    let mut rg = BTreeMap::new();
                    for (r, traj) in regional {
                        rg.insert(*r, traj.at(year).ok_or_else(|| climvar_core::Error::Coverage {
                            what: format!("GDP for {r}"),
                            year,
                        })?);
                    }
                    let global_loss = damage(&row.moments, &cfg.damage, &reference)?.loss;
                    Some(harmonize_regions(&fractions, &rg, global_loss, g)?)
                }
                None => None,
            };
            for (r, f) in &fractions {
                let mut c: Vec<Cell> = vec![row.year.into(), row.moments.variant.as_str().into(), r.code().into(), (*f).into()];
                if let Some(h) = &harmonized {
                    c.push(h[r].into());
                }
                t.push(c);
            }
        }
        losses = Some(t);
    }

    let mut w = writer(cfg, "regions", &p)?;
    w.write(&t_params)?;
    if let Some(t) = losses {
        w.write(&t)?;
    }
    Ok(w)
}

fn loss_paths(cfg: &RunConfig, rows: &[sources::MomentRow]) -> anyhow::Result<BTreeMap<Variant, BTreeMap<i32, f64>>> {
    let mut out: BTreeMap<Variant, BTreeMap<i32, f64>> = BTreeMap::new();
    for (row, reference) in paired(rows) {
        if row.moments.hemisphere != Hemisphere::Global || !row.moments.months.is_all() {
            continue;
        }
        let d = damage(&row.moments, &cfg.damage, &reference)?;
        if out.entry(d.variant).or_default().insert(row.year, d.loss).is_some() {
            return Err(invalid(format!("two {} rows for {}", d.variant, row.year)));
        }
    }
    Ok(out)
}

pub fn pv(cfg: &RunConfig, args: &MomentArgs, horizon: (i32, i32), policy: Option<&PathBuf>) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    p.param("horizon", format!("{}-{}", horizon.0, horizon.1))
        .param("rates", cfg.rates.iter().map(|r| rate_label(*r)).collect::<Vec<_>>().join("+"))
        .param("base_year", cfg.base_year);
    let rows = obtain_rows(cfg, args, &mut p)?;
    let policy_rows = match policy {
        Some(path) => {
            p.file("policy", path)?;
            Some(sources::read_moments(path)?)
        }
        None => None,
    };
    let (gdp, _) = global_gdp(cfg, &mut p)?;
    let losses = loss_paths(cfg, &rows)?;
    let policy_losses = policy_rows.as_deref().map(|r| loss_paths(cfg, r)).transpose()?;

    let mut tables = Vec::new();
    let summary_cols: &[&'static str] =
        if policy_losses.is_some() { &["rate", "variant", "total", "policy_total", "avoided"] } else { &["rate", "variant", "total"] };
    let mut summary = Table::new("pv_summary", summary_cols);
    for &rate in &cfg.rates {
        let d = DiscountSpec::new(rate, cfg.base_year)?;
        let mut t = Table::new(
            format!("pv_rate_{}", rate_label(rate)),
            &["year", "variant", "loss_fraction", "loss_currency", "pv_contribution"],
        );
        for (&variant, path) in &losses {
            let v = present_value(path, &gdp, d, horizon)?.with_variant(variant);
            for r in &v.rows {
                t.push(vec![r.year.into(), variant.as_str().into(), r.loss_fraction.into(), r.loss_currency.into(), r.pv_contribution.into()]);
            }
            let mut c: Vec<Cell> = vec![rate.into(), variant.as_str().into(), v.total.into()];
            if let Some(pl) = &policy_losses {
                let path = pl.get(&variant).ok_or_else(|| invalid(format!("policy moments lack {variant}")))?;
                let pol: PresentValue = present_value(path, &gdp, d, horizon)?.with_variant(variant);
                c.push(pol.total.into());
                c.push(avoided_losses(&v, &pol)?.into());
            }
            summary.push(c);
        }
        tables.push(t);
    }
    let mut w = writer(cfg, "pv", &p)?;
    for t in &tables {
        w.write(t)?;
    }
    w.write(&summary)?;
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum By {
    Sector,
    Region,
}

pub struct SccOptions {
    pub horizon: (i32, i32),
    pub by: Option<By>,
    pub gdp_unit: f64,
}

pub fn scc_cmd(cfg: &RunConfig, opts: &SccOptions) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    common(cfg, &mut p);
    p.param("horizon", format!("{}-{}", opts.horizon.0, opts.horizon.1))
        .param("rates", cfg.rates.iter().map(|r| rate_label(*r)).collect::<Vec<_>>().join("+"))
        .param("base_year", cfg.base_year)
        .param("pulse", format!("{:?}", cfg.pulse))
        .param("gdp_unit", opts.gdp_unit)
        .param("by", format!("{:?}", opts.by));
    let (gdp, set) = global_gdp(cfg, &mut p)?;

    // Baseline temperature and moment factors, from a pattern or from moments.
    let pattern = match &cfg.inputs.pattern {
        Some(path) => {
            p.file("pattern", path)?;
            Some(ScalingPattern::from_grid(&load_grid(path)?)?)
        }
        None => None,
    };
    let mut factor_path = None;
    let baseline = match (&cfg.inputs.moments, &cfg.inputs.global) {
        (Some(path), _) => {
            if opts.by.is_some() {
                return Err(invalid("breakdowns take moment factors from --pattern, not --moments"));
            }
            p.file("moments", path)?;
            let rows = sources::read_moments(path)?;
            let scen: Vec<_> = rows
                .iter()
                .filter(|r| r.role == Role::Scenario && r.moments.hemisphere == Hemisphere::Global && r.moments.months.is_all())
                .collect();
            let mut by_year: BTreeMap<i32, BTreeMap<Variant, (f64, f64)>> = BTreeMap::new();
            for r in scen {
                by_year.entry(r.year).or_default().insert(r.moments.variant, (r.moments.mean, r.moments.mean_sq));
            }
            let mut temps = Vec::new();
            let mut path_map = BTreeMap::new();
            let first = *by_year.keys().next().ok_or_else(|| invalid("no scenario moments"))?;
            for (k, (year, vs)) in by_year.iter().enumerate() {
                if *year != first + k as i32 {
                    return Err(invalid(format!("moments skip a year before {year}")));
                }
                let (mean, _) = *vs.get(&Variant::None).ok_or_else(|| invalid(format!("no none moments for {year}")))?;
                temps.push(mean);
                path_map.insert(*year, MomentFactors::from_moments(mean, |v| vs.get(&v).map(|x| x.1)));
            }
            factor_path = Some(path_map);
            GlobalSeries::annual(first, temps)?
        }
        (None, Some(path)) => {
            p.file("global", path)?;
            load_global_series(path)?
        }
        (None, None) => return Err(invalid("scc needs --global or --moments")),
    };
    let factors = match &pattern {
        Some(pat) => MomentFactors::from_pattern(pat, MonthSet::all(), Hemisphere::Global)?,
        None => MomentFactors::uniform(),
    };

    let mut t = Table::new("scc", &["scenario", "rate", "variant", "scc_usd_per_tco2"]);
    let mut tb = Table::new("scc_breakdown", &["scenario", "rate", "variant", "kind", "label", "scc_usd_per_tco2"]);
    let monthly_factors = match (&pattern, opts.by) {
        (Some(pat), Some(By::Sector)) => Some(MonthlyFactors::from_pattern(pat)?),
        (None, Some(By::Sector)) => Some(MonthlyFactors::uniform()),
        _ => None,
    };
    let coeffs = match opts.by {
        Some(By::Sector) => {
            let cal = sector_calibration(cfg, &mut p)?;
            Some(monthly_params(&seasonal_params(&cal)?, GdpWeights::default()))
        }
        _ => None,
    };
    let region_inputs = match opts.by {
        Some(By::Region) => {
            let table = regional_table(cfg, &mut p)?;
            let rg = regional_gdp(&set)?.ok_or_else(|| invalid("regional breakdown needs GDP rows for all 12 regions"))?;
            Some((table, rg))
        }
        _ => None,
    };

    for &rate in &cfg.rates {
        let mut setup = SccSetup::new(&baseline, &gdp, DiscountSpec::new(rate, cfg.base_year)?, cfg.pulse);
        setup.scenario = cfg.scenario.clone();
        setup.horizon = opts.horizon;
        setup.gdp_unit = opts.gdp_unit;
        for &variant in &cfg.variants {
            let result = match (opts.by, &factor_path) {
                (None, Some(path)) => scc_with_factor_path(&setup, variant, &cfg.damage, path)?,
                (None, None) => scc(&setup, variant, &cfg.damage, &factors)?,
                (Some(By::Sector), _) => scc_breakdown(
                    &setup,
                    variant,
                    &cfg.damage,
                    BreakdownInputs::Sector {
                        coeffs: coeffs.as_ref().expect("built above"),
                        factors: monthly_factors.as_ref().expect("built above"),
                    },
                )?,
                (Some(By::Region), _) => {
                    let (table, rg) = region_inputs.as_ref().expect("built above");
                    scc_breakdown(&setup, variant, &cfg.damage, BreakdownInputs::Region { table, gdp: rg, factors: &factors })?
                }
            };
            t.push(vec![cfg.scenario.clone().into(), rate.into(), variant.as_str().into(), result.value.into()]);
            if let Some(b) = &result.breakdown {
                let kind = match opts.by {
                    Some(By::Sector) => "sector",
                    _ => "region",
                };
                for (label, v) in &b.entries {
                    tb.push(vec![
                        cfg.scenario.clone().into(),
                        rate.into(),
                        variant.as_str().into(),
                        kind.into(),
                        label.clone().into(),
                        (*v).into(),
                    ]);
                }
            }
        }
    }
    let mut w = writer(cfg, "scc", &p)?;
    w.write(&t)?;
    if opts.by.is_some() {
        w.write(&tb)?;
    }
    Ok(w)
}

pub fn decompose_cmd(cfg: &RunConfig, input: Option<&PathBuf>, values: &[f64]) -> anyhow::Result<Writer> {
    let mut p = Provenance::default();
    p.param("scenario", &cfg.scenario);
    let mut rows: Vec<(String, [f64; 4])> = Vec::new();
    if let Some(path) = input {
        p.file("input", path)?;
        let mut reader = climvar_core::grid::csv_reader(path)?;
        let headers = reader.headers()?.clone();
        let expected = ["label", "none", "tvar", "svar", "stvar"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(invalid(format!("{}: header must be {}", path.display(), expected.join(","))));
        }
        for (k, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| invalid(format!("{} row {}: {e}", path.display(), k + 1)))?;
            let mut v = [0.0; 4];
            for (i, slot) in v.iter_mut().enumerate() {
                *slot = rec[i + 1]
                    .parse()
                    .map_err(|_| invalid(format!("{} row {}: bad number '{}'", path.display(), k + 1, &rec[i + 1])))?;
            }
            rows.push((rec[0].to_string(), v));
        }
    }
    if !values.is_empty() {
        if values.len() != 4 {
            return Err(invalid("--values takes none,tvar,svar,stvar"));
        }
        p.param("values", values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        rows.push((cfg.scenario.clone(), [values[0], values[1], values[2], values[3]]));
    }
    if rows.is_empty() {
        return Err(invalid("decompose needs --input or --values"));
    }
    let mut t = Table::new("decompose", &["label", "spatial_pct", "temporal_pct", "interaction_pct"]);
    for (label, [n, tv, sv, st]) in rows {
        let d = decompose(n, tv, sv, st)?;
        t.push(vec![label.into(), (100.0 * d.spatial).into(), (100.0 * d.temporal).into(), (100.0 * d.interaction).into()]);
    }
    let mut w = writer(cfg, "decompose", &p)?;
    w.write(&t)?;
    Ok(w)
}

pub const DEFAULT_CLIMATOLOGY_WINDOW: usize = DEFAULT_WINDOW;

pub fn payload_format(s: &str) -> Result<PayloadFormat, String> {
    match s {
        "csv" => Ok(PayloadFormat::Csv),
        "f32le" => Ok(PayloadFormat::F32Le),
        other => Err(format!("unknown payload format '{other}'")),
    }
}
