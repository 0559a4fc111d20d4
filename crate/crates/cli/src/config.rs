//! Run configuration: a TOML file whose values are overridden by flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use climvar_core::damage::DamageParams;
use climvar_core::economics::DiscountSpec;
use climvar_core::scc::PulseResponse;
use climvar_core::Variant;
use serde::Deserialize;

/// A problem with the command line or configuration rather than with the computation.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub variants: Option<Vec<String>>,
    #[serde(default)]
    pub inputs: FileInputs,
    #[serde(default)]
    pub damage: FileDamage,
    #[serde(default)]
    pub discount: FileDiscount,
    #[serde(default)]
    pub pulse: FilePulse,
    #[serde(default)]
    pub output: FileOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileInputs {
    pub grid: Option<PathBuf>,
    pub global: Option<PathBuf>,
    pub pattern: Option<PathBuf>,
    pub gdp: Option<PathBuf>,
    pub moments: Option<PathBuf>,
    pub sectors: Option<PathBuf>,
    pub regions: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDamage {
    pub a: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDiscount {
    pub rates: Option<Vec<f64>>,
    pub base_year: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilePulse {
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub tau3: Option<f64>,
    pub t0: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOutput {
    pub dir: Option<PathBuf>,
    pub json: Option<bool>,
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Scenario label written into outputs
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Variants to evaluate (none, tvar, svar, stvar); repeat or comma-separate
    #[arg(long = "variant", global = true, value_delimiter = ',')]
    pub variants: Vec<String>,
    /// Gridded temperature manifest
    #[arg(long, global = true)]
    pub grid: Option<PathBuf>,
    /// Global mean temperature series CSV
    #[arg(long, global = true)]
    pub global: Option<PathBuf>,
    /// Scaling pattern manifest
    #[arg(long, global = true)]
    pub pattern: Option<PathBuf>,
    /// GDP CSV (year,region,gdp) in billion US$2005
    #[arg(long, global = true)]
    pub gdp: Option<PathBuf>,
    /// Moments CSV written by the moments command
    #[arg(long, global = true)]
    pub moments: Option<PathBuf>,
    /// Sector calibration override CSV
    #[arg(long, global = true)]
    pub sectors: Option<PathBuf>,
    /// Regional parameter override CSV
    #[arg(long, global = true)]
    pub regions: Option<PathBuf>,
    /// Damage at the calibration warming, as a fraction of GDP
    #[arg(long = "damage-a", global = true)]
    pub a: Option<f64>,
    /// Calibration warming in degrees C
    #[arg(long = "damage-c", global = true)]
    pub c: Option<f64>,
    /// Discount rates; repeat or comma-separate
    #[arg(long = "rate", global = true, value_delimiter = ',')]
    pub rates: Vec<f64>,
    /// Discounting base year
    #[arg(long, global = true)]
    pub base_year: Option<i32>,
    /// Pulse amplitudes a1,a2,a3 in mK/GtC
    #[arg(long = "pulse-a", global = true, value_delimiter = ',', num_args = 3)]
    pub pulse_a: Vec<f64>,
    /// Pulse timescales tau1,tau2,tau3 in years
    #[arg(long = "pulse-tau", global = true, value_delimiter = ',', num_args = 3)]
    pub pulse_tau: Vec<f64>,
    /// Pulse year
    #[arg(long = "pulse-year", global = true)]
    pub t0: Option<i32>,
    /// Output directory
    #[arg(long = "out", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Also write a JSON mirror of every table
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Clone)]
pub struct Inputs {
    pub grid: Option<PathBuf>,
    pub global: Option<PathBuf>,
    pub pattern: Option<PathBuf>,
    pub gdp: Option<PathBuf>,
    pub moments: Option<PathBuf>,
    pub sectors: Option<PathBuf>,
    pub regions: Option<PathBuf>,
}

impl Inputs {
    pub fn named(&self) -> [(&'static str, Option<&PathBuf>); 7] {
        [
            ("grid", self.grid.as_ref()),
            ("global", self.global.as_ref()),
            ("pattern", self.pattern.as_ref()),
            ("gdp", self.gdp.as_ref()),
            ("moments", self.moments.as_ref()),
            ("sectors", self.sectors.as_ref()),
            ("regions", self.regions.as_ref()),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub variants: Vec<Variant>,
    pub inputs: Inputs,
    pub damage: DamageParams,
    pub rates: Vec<f64>,
    pub base_year: i32,
    pub pulse: PulseResponse,
    pub out_dir: PathBuf,
    pub json: bool,
    pub threads: Option<usize>,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_absolute() { p } else { base.join(p) })
}

impl RunConfig {
    pub fn build(o: &Overrides) -> anyhow::Result<Self> {
        let (file, base) = match &o.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
                let file: FileConfig =
                    toml::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };

        let variant_names = if o.variants.is_empty() {
            file.variants.unwrap_or_else(|| Variant::ALL.iter().map(|v| v.to_string()).collect())
        } else {
            o.variants.clone()
        };
        let mut variants = Vec::new();
        for name in &variant_names {
            let v: Variant = name.parse().map_err(|_| invalid(format!("unknown variant '{name}'")))?;
            if !variants.contains(&v) {
                variants.push(v);
            }
        }
        if variants.is_empty() {
            return Err(invalid("variant set is empty"));
        }
        variants.sort();

        let fi = file.inputs;
        let pick = |flag: &Option<PathBuf>, from_file: Option<PathBuf>| flag.clone().or_else(|| resolve(&base, from_file));
        let inputs = Inputs {
            grid: pick(&o.grid, fi.grid),
            global: pick(&o.global, fi.global),
            pattern: pick(&o.pattern, fi.pattern),
            gdp: pick(&o.gdp, fi.gdp),
            moments: pick(&o.moments, fi.moments),
            sectors: pick(&o.sectors, fi.sectors),
            regions: pick(&o.regions, fi.regions),
        };
        for (name, path) in inputs.named() {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(invalid(format!("{name} input {} does not exist", p.display())));
                }
            }
        }

        let damage = DamageParams::new(
            o.a.or(file.damage.a).unwrap_or(DamageParams::DEFAULT_A),
            o.c.or(file.damage.c).unwrap_or(DamageParams::DEFAULT_C),
        )
        .map_err(|e| invalid(e.to_string()))?;

        let rates = if o.rates.is_empty() {
            file.discount.rates.unwrap_or_else(|| DiscountSpec::DEFAULT_RATES.to_vec())
        } else {
            o.rates.clone()
        };
        if rates.is_empty() {
            return Err(invalid("no discount rates"));
        }
        let base_year = o.base_year.or(file.discount.base_year).unwrap_or(DiscountSpec::BASE_YEAR);
        for &r in &rates {
            DiscountSpec::new(r, base_year).map_err(|e| invalid(e.to_string()))?;
        }

        let d = PulseResponse::illustrative();
        let fp = file.pulse;
        let amplitudes = if o.pulse_a.is_empty() {
            [fp.a1.unwrap_or(d.amplitudes[0]), fp.a2.unwrap_or(d.amplitudes[1]), fp.a3.unwrap_or(d.amplitudes[2])]
        } else {
            [o.pulse_a[0], o.pulse_a[1], o.pulse_a[2]]
        };
        let timescales = if o.pulse_tau.is_empty() {
            [fp.tau1.unwrap_or(d.timescales[0]), fp.tau2.unwrap_or(d.timescales[1]), fp.tau3.unwrap_or(d.timescales[2])]
        } else {
            [o.pulse_tau[0], o.pulse_tau[1], o.pulse_tau[2]]
        };
        let pulse = PulseResponse::new(amplitudes, timescales, o.t0.or(fp.t0).unwrap_or(d.t0))
            .map_err(|e| invalid(e.to_string()))?;

        if o.threads == Some(0) {
            return Err(invalid("--threads must be at least 1"));
        }

        Ok(RunConfig {
            scenario: o.scenario.clone().or(file.scenario).unwrap_or_else(|| "scenario".into()),
            variants,
            inputs,
            damage,
            rates,
            base_year,
            pulse,
            out_dir: o.out_dir.clone().or_else(|| resolve(&base, file.output.dir)).unwrap_or_else(|| "out".into()),
            json: o.json || file.output.json.unwrap_or(false),
            threads: o.threads,
        })
    }

    pub fn require(&self, name: &str, path: &Option<PathBuf>) -> anyhow::Result<PathBuf> {
        path.clone().ok_or_else(|| invalid(format!("this command needs --{name}")))
    }
}

/// Parses `2071-2100` or a single year.
pub fn parse_years(s: &str) -> Result<(i32, i32), String> {
    let parse = |x: &str| x.trim().parse::<i32>().map_err(|_| format!("bad year '{x}'"));
    // A leading minus belongs to the first year, so split at a later '-'.
    let split = s.split_once(':').or_else(|| s.char_indices().skip(1).find(|(_, c)| *c == '-').map(|(i, _)| (&s[..i], &s[i + 1..])));
    let (a, b) = match split {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let y = parse(s)?;
            (y, y)
        }
    };
    if b < a {
        return Err(format!("year range {s} is reversed"));
    }
    Ok((a, b))
}
