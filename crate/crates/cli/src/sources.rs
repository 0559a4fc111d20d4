//! Turning input files into warming moments, and the moments CSV format.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use climvar_core::climatology::{
    apply_pattern, moments, rolling_climatology, rolling_moments, MomentSource, MomentWindow, ScalingPattern,
    WarmingMoments, DEFAULT_WINDOW,
};
use climvar_core::grid::{load_global_series, load_grid, GlobalSeries, GridField};
use climvar_core::sectoral::{MonthHemisphereMoments, HEMISPHERES};
use climvar_core::{Hemisphere, MonthSet, Variant};
use serde::Deserialize;

use crate::config::{invalid, parse_years, RunConfig};
use crate::output::{Cell, Provenance, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Use the supplied field or series as is
    Direct,
    /// Pattern scaling: the signal is the pattern times the global series
    Sp,
    /// Rolling climatology: the signal is the rolling mean of the field
    Rm,
}

#[derive(Debug, Clone, clap::Args)]
pub struct MomentArgs {
    /// How the climate signal is separated from variability
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    pub method: Method,
    /// Years to evaluate, e.g. 2020-2100
    #[arg(long, value_parser = parse_years)]
    pub years: Option<(i32, i32)>,
    /// Half-width of the averaging window around each year
    #[arg(long, default_value_t = 0)]
    pub half_window: i32,
    /// Calendar months, e.g. 12+1+2 or all
    #[arg(long, default_value = "all")]
    pub months: MonthSet,
    /// Spatial domain: GLOBAL, NH or SH
    #[arg(long, default_value = "GLOBAL")]
    pub hemisphere: Hemisphere,
    /// Reference period whose moments are subtracted, e.g. 1850-1880
    #[arg(long, value_parser = parse_years)]
    pub reference: Option<(i32, i32)>,
    /// Rolling-mean window in years for the rm method
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
}

impl MomentArgs {
    pub fn record(&self, p: &mut Provenance) {
        p.param("method", format!("{:?}", self.method).to_lowercase())
            .param("years", self.years.map_or("auto".into(), |(a, b)| format!("{a}-{b}")))
            .param("half_window", self.half_window)
            .param("months", self.months)
            .param("hemisphere", self.hemisphere)
            .param("reference", self.reference.map_or("none".into(), |(a, b)| format!("{a}-{b}")))
            .param("window", self.window);
    }
}

/// Loaded inputs and the derived signal field.
pub struct Sources {
    pub method: Method,
    pub field: Option<GridField>,
    pub series: Option<GlobalSeries>,
    pub signal: Option<GridField>,
}

impl Sources {
    pub fn load(cfg: &RunConfig, args: &MomentArgs, prov: &mut Provenance) -> anyhow::Result<Self> {
        let field = match &cfg.inputs.grid {
            Some(p) => {
                prov.file("grid", p)?;
                Some(load_grid(p)?)
            }
            None => None,
        };
        let series = match &cfg.inputs.global {
            Some(p) => {
                prov.file("global", p)?;
                Some(load_global_series(p)?)
            }
            None => None,
        };
        let signal = match args.method {
            Method::Direct => None,
            Method::Sp => {
                let pp = cfg.require("pattern", &cfg.inputs.pattern)?;
                prov.file("pattern", &pp)?;
                let pattern = ScalingPattern::from_grid(&load_grid(&pp)?)?;
                let g = series.as_ref().ok_or_else(|| invalid("the sp method needs --global"))?.to_annual()?;
                Some(apply_pattern(&pattern, &g, (g.first_year(), g.last_year()))?)
            }
            Method::Rm => {
                let f = field.as_ref().ok_or_else(|| invalid("the rm method needs --grid"))?;
                Some(rolling_climatology(f, args.window)?)
            }
        };
        if field.is_none() && series.is_none() {
            return Err(invalid("moments need --grid or --global"));
        }
        Ok(Sources { method: args.method, field, series, signal })
    }

    /// The input each variant is evaluated on.
    pub fn source(&self, variant: Variant, hemisphere: Hemisphere) -> anyhow::Result<MomentSource<'_>> {
        let field = self.field.as_ref().map(MomentSource::Field);
        let series = self.series.as_ref().map(MomentSource::Series);
        let signal = self.signal.as_ref().map(MomentSource::Field);
        let global_series = if hemisphere == Hemisphere::Global { series } else { None };
        let chosen = match (self.method, variant) {
            (Method::Direct, Variant::None | Variant::Tvar) => field.or(global_series),
            (Method::Direct, _) => field,
            (Method::Sp, Variant::None | Variant::Tvar) => global_series.or(signal),
            (Method::Sp, Variant::Svar) => signal,
            (Method::Sp, Variant::Stvar) => field.or(signal),
            (Method::Rm, Variant::None | Variant::Svar) => signal,
            (Method::Rm, _) => field,
        };
        chosen.ok_or_else(|| invalid(format!("no input suitable for {variant} over {hemisphere}")))
    }

    pub fn default_years(&self) -> (i32, i32) {
        match (&self.signal, &self.field, &self.series) {
            (Some(f), _, _) | (None, Some(f), _) => f.years(),
            (None, None, Some(s)) => (s.first_year(), s.last_year()),
            (None, None, None) => unreachable!("checked in load"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Scenario,
    Reference,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Scenario => "scenario",
            Role::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub role: Role,
    pub year: i32,
    pub moments: WarmingMoments,
}

fn reference_window(years: (i32, i32)) -> MomentWindow {
    MomentWindow::new(years, MonthSet::all(), Hemisphere::Global)
}

/// Per-year moments for every configured variant, plus reference rows.
pub fn compute_rows(cfg: &RunConfig, args: &MomentArgs, src: &Sources) -> anyhow::Result<Vec<MomentRow>> {
    let years = args.years.unwrap_or_else(|| {
        let (a, b) = src.default_years();
        (a + args.half_window, b - args.half_window)
    });
    let mut rows = Vec::new();
    for &variant in &cfg.variants {
        let source = src.source(variant, args.hemisphere)?;
        for m in rolling_moments(variant, source, years, args.half_window, args.months, args.hemisphere)? {
            rows.push(MomentRow { role: Role::Scenario, year: m.center_year(), moments: m });
        }
        if let Some(r) = args.reference {
            let w = MomentWindow { months: args.months, hemisphere: args.hemisphere, ..reference_window(r) };
            let m = moments(variant, source, &w)?;
            rows.push(MomentRow { role: Role::Reference, year: m.center_year(), moments: m });
        }
    }
    Ok(rows)
}

/// Moments for every (month, hemisphere) pair in the window around `year`:
/// none and svar over the hemisphere's full year, tvar and stvar over the month.
pub fn monthly_moments(
    src: &Sources,
    variant: Variant,
    years: (i32, i32),
) -> anyhow::Result<MonthHemisphereMoments> {
    let mut out = BTreeMap::new();
    for h in HEMISPHERES {
        let source = src.source(variant, h)?;
        for m in 1..=12u8 {
            let months = match variant {
                Variant::None | Variant::Svar => MonthSet::all(),
                Variant::Tvar | Variant::Stvar => MonthSet::single(m)?,
            };
            out.insert((m, h), moments(variant, source, &MomentWindow::new(years, months, h))?);
        }
    }
    Ok(out)
}

pub const MOMENT_COLUMNS: [&str; 10] =
    ["role", "year", "variant", "hemisphere", "months", "window_start", "window_end", "mean", "mean_sq", "variance"];

pub fn moments_table(rows: &[MomentRow]) -> Table {
    let mut t = Table::new("moments", &MOMENT_COLUMNS);
    for r in rows {
        let m = &r.moments;
        t.push(vec![
            r.role.as_str().into(),
            r.year.into(),
            m.variant.as_str().into(),
            m.hemisphere.to_string().into(),
            m.months.to_string().into(),
            m.years.0.into(),
            m.years.1.into(),
            m.mean.into(),
            m.mean_sq.into(),
            m.variance.into(),
        ]);
    }
    t
}

#[derive(Debug, Deserialize)]
struct RawRow {
    role: String,
    year: i32,
    variant: String,
    hemisphere: String,
    months: String,
    window_start: i32,
    window_end: i32,
    mean: f64,
    mean_sq: f64,
    variance: f64,
}

pub fn read_moments(path: &Path) -> anyhow::Result<Vec<MomentRow>> {
    let mut reader = climvar_core::grid::csv_reader(path)?;
    let mut rows = Vec::new();
    for (k, rec) in reader.deserialize::<RawRow>().enumerate() {
        let r = rec.map_err(|e| invalid(format!("{} row {}: {e}", path.display(), k + 1)))?;
        let role = match r.role.as_str() {
            "scenario" => Role::Scenario,
            "reference" => Role::Reference,
            other => return Err(invalid(format!("{}: unknown role '{other}'", path.display()))),
        };
        let bad = |what: &str| invalid(format!("{} row {}: bad {what}", path.display(), k + 1));
        let moments = WarmingMoments {
            variant: r.variant.parse().map_err(|_| bad("variant"))?,
            hemisphere: r.hemisphere.parse().map_err(|_| bad("hemisphere"))?,
            years: (r.window_start, r.window_end),
            months: r.months.parse().map_err(|_| bad("months"))?,
            mean: r.mean,
            mean_sq: r.mean_sq,
            variance: r.variance,
        };
        for x in [r.mean, r.mean_sq, r.variance] {
            if !x.is_finite() {
                return Err(bad("value"));
            }
        }
        rows.push(MomentRow { role, year: r.year, moments });
    }
    if rows.is_empty() {
        return Err(invalid(format!("{} holds no moments", path.display())));
    }
    Ok(rows)
}

/// Moments from `--moments` if given, otherwise computed from the inputs.
pub fn obtain_rows(cfg: &RunConfig, args: &MomentArgs, prov: &mut Provenance) -> anyhow::Result<Vec<MomentRow>> {
    match &cfg.inputs.moments {
        Some(p) => {
            prov.file("moments", p)?;
            let rows = read_moments(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(rows.into_iter().filter(|r| cfg.variants.contains(&r.moments.variant)).collect())
        }
        None => {
            args.record(prov);
            let src = Sources::load(cfg, args, prov)?;
            compute_rows(cfg, args, &src)
        }
    }
}

/// Scenario rows paired with the matching reference row (zero if absent).
pub fn paired(rows: &[MomentRow]) -> Vec<(&MomentRow, WarmingMoments)> {
    let refs: Vec<&MomentRow> = rows.iter().filter(|r| r.role == Role::Reference).collect();
    rows.iter()
        .filter(|r| r.role == Role::Scenario)
        .map(|r| {
            let m = &r.moments;
            let reference = refs
                .iter()
                .find(|x| x.moments.variant == m.variant && x.moments.hemisphere == m.hemisphere && x.moments.months == m.months)
                .map(|x| x.moments)
                .unwrap_or_else(|| WarmingMoments::zero(m.variant).with_domain((0, 0), m.months, m.hemisphere));
            (r, reference)
        })
        .collect()
}

pub fn cells(row: &MomentRow) -> Vec<Cell> {
    vec![
        row.year.into(),
        row.moments.variant.as_str().into(),
        row.moments.hemisphere.to_string().into(),
        row.moments.months.to_string().into(),
    ]
}
