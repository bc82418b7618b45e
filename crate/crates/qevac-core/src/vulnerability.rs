//! Building typology classification, damage-state binning and casualty
//! rate lookup.
//!
//! The casualty rates themselves are configuration data, not algorithm:
//! the shipped default table is a transcription of severity-4 (killed)
//! rates in the spirit of the HAZUS earthquake manual and can be replaced
//! wholesale through the scenario configuration.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Construction-class label driving casualty rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Typology {
    Masonry,
    NonDesignedRc,
    LowDuctilityRc,
}

impl Typology {
    pub const ALL: [Typology; 3] =
        [Typology::Masonry, Typology::NonDesignedRc, Typology::LowDuctilityRc];

    fn idx(self) -> usize {
        match self {
            Typology::Masonry => 0,
            Typology::NonDesignedRc => 1,
            Typology::LowDuctilityRc => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "masonry" => Ok(Typology::Masonry),
            "non_designed_rc" => Ok(Typology::NonDesignedRc),
            "low_ductility_rc" => Ok(Typology::LowDuctilityRc),
            other => Err(Error::Config(format!("unknown typology `{other}`"))),
        }
    }
}

impl fmt::Display for Typology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Typology::Masonry => "masonry",
            Typology::NonDesignedRc => "non_designed_rc",
            Typology::LowDuctilityRc => "low_ductility_rc",
        })
    }
}

/// Five-level ordinal damage classification binned from mean damage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DamageState {
    None,
    Slight,
    Moderate,
    Extensive,
    Complete,
}

impl DamageState {
    pub const ALL: [DamageState; 5] = [
        DamageState::None,
        DamageState::Slight,
        DamageState::Moderate,
        DamageState::Extensive,
        DamageState::Complete,
    ];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DamageState::None),
            "slight" => Ok(DamageState::Slight),
            "moderate" => Ok(DamageState::Moderate),
            "extensive" => Ok(DamageState::Extensive),
            "complete" => Ok(DamageState::Complete),
            other => Err(Error::Config(format!("unknown damage state `{other}`"))),
        }
    }
}

impl fmt::Display for DamageState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DamageState::None => "none",
            DamageState::Slight => "slight",
            DamageState::Moderate => "moderate",
            DamageState::Extensive => "extensive",
            DamageState::Complete => "complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Indoor,
    Outdoor,
}

impl Setting {
    fn idx(self) -> usize {
        match self {
            Setting::Indoor => 0,
            Setting::Outdoor => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "indoor" => Ok(Setting::Indoor),
            "outdoor" => Ok(Setting::Outdoor),
            other => Err(Error::Config(format!("unknown setting `{other}`"))),
        }
    }
}

/// Typology from construction year and floor count:
/// pre-1950 low-rise is masonry, pre-1950 high-rise and 1950-2005 are
/// non-designed reinforced concrete, post-2005 is low-ductility
/// reinforced concrete.
pub fn classify_typology(year: i32, floors: u32) -> Typology {
    if year < 1950 {
        if floors < 4 {
            Typology::Masonry
        } else {
            Typology::NonDesignedRc
        }
    } else if year <= 2005 {
        Typology::NonDesignedRc
    } else {
        Typology::LowDuctilityRc
    }
}

/// Mean damage on the 0-4 scale mapped onto [0, 1].
pub fn normalize_mean_damage(mu_ds: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&mu_ds) {
        return Err(Error::Domain(format!("mean damage {mu_ds} outside [0, 4]")));
    }
    Ok(mu_ds / 4.0)
}

/// Nearest-integer binning of mean damage onto the five damage states.
pub fn bin_damage_state(mu_ds: f64) -> Result<DamageState> {
    if !(0.0..=4.0).contains(&mu_ds) {
        return Err(Error::Domain(format!("mean damage {mu_ds} outside [0, 4]")));
    }
    Ok(match mu_ds {
        v if v < 0.5 => DamageState::None,
        v if v < 1.5 => DamageState::Slight,
        v if v < 2.5 => DamageState::Moderate,
        v if v < 3.5 => DamageState::Extensive,
        _ => DamageState::Complete,
    })
}

/// Severity-4 casualty probabilities per (typology, damage state, setting).
///
/// Validated at load: exactly the 30 combinations, probabilities in
/// [0, 1], zero for the `none` state, and non-decreasing in damage state
/// for each (typology, setting). Lookups never fail after that.
#[derive(Debug, Clone, PartialEq)]
pub struct CasualtyTable {
    rates: [[[f64; 2]; 5]; 3],
}

const DEFAULT_CASUALTY_CSV: &str = include_str!("../assets/casualty_rates.csv");

impl CasualtyTable {
    pub fn rate(&self, t: Typology, ds: DamageState, setting: Setting) -> f64 {
        self.rates[t.idx()][ds.idx()][setting.idx()]
    }

    /// The shipped default transcription. Editable data, not ground truth.
    pub fn default_table() -> Self {
        Self::from_csv_str(DEFAULT_CASUALTY_CSV).expect("shipped casualty table is valid")
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_csv_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rates = [[[f64::NAN; 2]; 5]; 3];
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());

        let headers = reader
            .headers()
            .map_err(|e| Error::Config(format!("casualty table header: {e}")))?;
        let expected = ["typology", "damage_state", "setting", "rate"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Config(format!(
                "casualty table header must be `{}`",
                expected.join(",")
            )));
        }

        let mut seen = 0usize;
        for (line, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::Config(format!("casualty table row {}: {e}", line + 2)))?;
            if record.len() != 4 {
                return Err(Error::Config(format!(
                    "casualty table row {}: expected 4 fields",
                    line + 2
                )));
            }
            let t = Typology::parse(&record[0])?;
            let ds = DamageState::parse(&record[1])?;
            let setting = Setting::parse(&record[2])?;
            let rate: f64 = record[3]
                .parse()
                .map_err(|_| Error::Config(format!("bad rate `{}`", &record[3])))?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!(
                    "rate {rate} for ({t}, {ds}) outside [0, 1]"
                )));
            }
            let slot = &mut rates[t.idx()][ds.idx()][setting.idx()];
            if !slot.is_nan() {
                return Err(Error::Config(format!(
                    "duplicate casualty entry for ({t}, {ds}, {})",
                    &record[2]
                )));
            }
            *slot = rate;
            seen += 1;
        }

        if seen != 30 {
            return Err(Error::Config(format!(
                "casualty table must have exactly 30 rows (3 typologies x 5 states x 2 settings), got {seen}"
            )));
        }
        for t in Typology::ALL {
            for setting in [Setting::Indoor, Setting::Outdoor] {
                let mut prev = -1.0;
                for ds in DamageState::ALL {
                    let r = rates[t.idx()][ds.idx()][setting.idx()];
                    if r.is_nan() {
                        return Err(Error::Config(format!("missing entry for ({t}, {ds})")));
                    }
                    if r < prev {
                        return Err(Error::Config(format!(
                            "rates for ({t}) must be non-decreasing in damage state"
                        )));
                    }
                    prev = r;
                }
                if rates[t.idx()][DamageState::None.idx()][setting.idx()] != 0.0 {
                    return Err(Error::Config(format!(
                        "`none` damage state must have rate 0 for ({t})"
                    )));
                }
            }
        }

        Ok(Self { rates })
    }
}
