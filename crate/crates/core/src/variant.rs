use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which kinds of warming variability a damage evaluation admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Global mean only; variance restricted to zero.
    None,
    /// Temporal variability of the global mean.
    Tvar,
    /// Spatial variation of the climatological field.
    Svar,
    /// Spatial and temporal variability together.
    Stvar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::None, Variant::Tvar, Variant::Svar, Variant::Stvar];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::None => "none",
            Variant::Tvar => "tvar",
            Variant::Svar => "svar",
            Variant::Stvar => "stvar",
        }
    }

    pub fn is_spatial(self) -> bool {
        matches!(self, Variant::Svar | Variant::Stvar)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Variant::None),
            "tvar" => Ok(Variant::Tvar),
            "svar" => Ok(Variant::Svar),
            "stvar" | "s&tvar" => Ok(Variant::Stvar),
            other => Err(Error::InvalidInput(format!("unknown variant '{other}'"))),
        }
    }
}

/// Spatial averaging domain. Cells on the equator belong to the north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hemisphere {
    #[serde(rename = "GLOBAL")]
    Global,
    #[serde(rename = "NH")]
    North,
    #[serde(rename = "SH")]
    South,
}

impl Hemisphere {
    pub fn as_str(self) -> &'static str {
        match self {
            Hemisphere::Global => "GLOBAL",
            Hemisphere::North => "NH",
            Hemisphere::South => "SH",
        }
    }

    pub fn contains_lat(self, lat: f64) -> bool {
        match self {
            Hemisphere::Global => true,
            Hemisphere::North => lat >= 0.0,
            Hemisphere::South => lat < 0.0,
        }
    }
}

impl fmt::Display for Hemisphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Hemisphere {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "GLOBAL" => Ok(Hemisphere::Global),
            "NH" | "NORTH" => Ok(Hemisphere::North),
            "SH" | "SOUTH" => Ok(Hemisphere::South),
            other => Err(Error::InvalidInput(format!("unknown hemisphere '{other}'"))),
        }
    }
}

/// A subset of calendar months 1..=12.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthSet(u16);

impl MonthSet {
    const FULL: u16 = 0x0fff;

    pub const fn all() -> Self {
        MonthSet(Self::FULL)
    }

    pub fn single(month: u8) -> Result<Self, Error> {
        Self::from_months([month])
    }

    pub fn from_months(months: impl IntoIterator<Item = u8>) -> Result<Self, Error> {
        let mut bits = 0u16;
        for m in months {
            if !(1..=12).contains(&m) {
                return Err(Error::InvalidInput(format!("month {m} outside 1..=12")));
            }
            bits |= 1 << (m - 1);
        }
        if bits == 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(MonthSet(bits))
    }

    pub fn contains(self, month: u8) -> bool {
        (1..=12).contains(&month) && self.0 & (1 << (month - 1)) != 0
    }

    pub fn is_all(self) -> bool {
        self.0 == Self::FULL
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=12u8).filter(move |&m| self.contains(m))
    }
}

impl Default for MonthSet {
    fn default() -> Self {
        Self::all()
    }
}

impl fmt::Debug for MonthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonthSet({self})")
    }
}

/// Renders as `all` or a `+`-joined month list such as `12+1+2`.
impl fmt::Display for MonthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return f.write_str("all");
        }
        let parts: Vec<String> = self.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for MonthSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(MonthSet::all());
        }
        let months = s
            .split(['+', ','])
            .map(|p| {
                p.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::InvalidInput(format!("bad month '{p}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MonthSet::from_months(months)
    }
}

impl Serialize for MonthSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_set_round_trips_through_text() {
        let djf = MonthSet::from_months([12, 1, 2]).unwrap();
        assert_eq!(djf.to_string(), "1+2+12");
        assert_eq!("1+2+12".parse::<MonthSet>().unwrap(), djf);
        assert_eq!("all".parse::<MonthSet>().unwrap(), MonthSet::all());
        assert_eq!(MonthSet::all().len(), 12);
    }

    #[test]
    fn month_set_rejects_out_of_range() {
        assert!(MonthSet::single(0).is_err());
        assert!(MonthSet::single(13).is_err());
        assert!(MonthSet::from_months([]).is_err());
    }

    #[test]
    fn variant_parses_ampersand_label() {
        assert_eq!("S&Tvar".parse::<Variant>().unwrap(), Variant::Stvar);
        assert!("bogus".parse::<Variant>().is_err());
    }

    #[test]
    fn equator_belongs_to_north() {
        assert!(Hemisphere::North.contains_lat(0.0));
        assert!(!Hemisphere::South.contains_lat(0.0));
    }
}
