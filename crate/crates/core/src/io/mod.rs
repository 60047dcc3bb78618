//! File formats: condition files, wish grids, roster exports and weight
//! tables. Loaders are pure functions over text; warnings are sorted.

pub mod condition;
pub mod grid;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::ConstraintId;
use crate::error::{Error, Result};

pub use condition::{condition_to_toml, load_condition_file, missing_fields, SCHEMA_VERSION};
pub use grid::{export_roster, import_roster, load_wish_table, RosterFormat, StructuredRoster, SymbolMap};

/// A non-fatal finding while loading a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    /// Dotted key path, or `cell` for grid cells.
    pub field: String,
    pub message: String,
    /// Rules that read the field.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nurse: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
}

impl Warning {
    pub fn field(field: String, message: &str, constraints: Vec<ConstraintId>) -> Self {
        Warning { field, message: message.into(), constraints, nurse: None, date: None }
    }

    pub fn cell(nurse: &str, date: NaiveDate, message: &str) -> Self {
        Warning {
            field: "cell".into(),
            message: message.into(),
            constraints: vec![],
            nurse: Some(nurse.into()),
            date: Some(date),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.nurse, self.date) {
            (Some(n), Some(d)) => write!(f, "{n} {d}: {}", self.message)?,
            _ => write!(f, "{}: {}", self.field, self.message)?,
        }
        if !self.constraints.is_empty() {
            let ids: Vec<String> = self.constraints.iter().map(|c| c.to_string()).collect();
            write!(f, " (affects {})", ids.join(", "))?;
        }
        Ok(())
    }
}

/// Reads `"Sn-S-1" = 10` style weight overrides.
pub fn load_weight_table(text: &str) -> Result<BTreeMap<ConstraintId, i64>> {
    let raw: BTreeMap<String, i64> = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let id: ConstraintId = k.parse()?;
        if id.is_hard() {
            return Err(Error::WrongKind { id: k, expected: "soft", actual: "hard" });
        }
        if v < 0 {
            return Err(Error::Config(format!("weight for {id} is negative")));
        }
        out.insert(id, v);
    }
    Ok(out)
}

pub fn weight_table_to_toml(w: &BTreeMap<ConstraintId, i64>) -> String {
    w.iter().map(|(k, v)| format!("\"{k}\" = {v}\n")).collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_table_round_trips_and_rejects_hard_ids() {
        let w = load_weight_table("\"Sn-S-1\" = 10\n\"Sd-N-26\" = 3\n").unwrap();
        assert_eq!(w[&ConstraintId::night_soft(1)], 10);
        assert_eq!(load_weight_table(&weight_table_to_toml(&w)).unwrap(), w);
        assert!(load_weight_table("\"Hn-N-5\" = 1").is_err());
        assert!(load_weight_table("\"Sn-S-99\" = 1").is_err());
    }
}
