//! Wish tables and roster exports as a CSV grid (one row per nurse, one
//! column per window date) and as structured JSON carrying provenance.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::Warning;
use crate::catalog::ConstraintId;
use crate::domain::{Roster, ShiftSymbol, WardConfig};
use crate::error::{Error, Result};

/// Maps raw hospital codes onto the canonical alphabet. The canonical
/// glyphs, tokens and enum-style names are always understood.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolMap(pub BTreeMap<String, ShiftSymbol>);

impl SymbolMap {
    pub fn identity() -> Self {
        SymbolMap::default()
    }

    pub fn with(mut self, code: &str, sym: ShiftSymbol) -> Self {
        self.0.insert(code.to_string(), sym);
        self
    }

    /// Reads `"code" = "symbol"` pairs from TOML.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn lookup(&self, raw: &str) -> Option<ShiftSymbol> {
        let t = raw.trim();
        self.0.get(t).copied().or_else(|| ShiftSymbol::parse(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RosterFormat {
    GridCsv,
    StructuredJson,
}

impl FromStr for RosterFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "grid" | "grid_csv" => Ok(RosterFormat::GridCsv),
            "json" | "structured" | "structured_json" => Ok(RosterFormat::StructuredJson),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

/// Reads a wish grid. Unknown codes become 未 with a warning naming the
/// cell; empty cells become 未 silently, except in previous-month columns
/// where every cell should be filled.
pub fn load_wish_table(text: &str, cfg: &WardConfig, map: &SymbolMap) -> Result<(Roster, Vec<Warning>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let dates: Vec<NaiveDate> = header
        .iter()
        .skip(1)
        .map(|h| NaiveDate::parse_from_str(h.trim(), "%Y-%m-%d").map_err(|_| Error::Parse(format!("bad date header {h:?}"))))
        .collect::<Result<_>>()?;
    if dates.as_slice() != cfg.calendar.dates() {
        return Err(Error::Parse(format!(
            "date header covers {} .. {} ({} columns); the ward window is {} .. {} ({} columns)",
            dates.first().map(|d| d.to_string()).unwrap_or_default(),
            dates.last().map(|d| d.to_string()).unwrap_or_default(),
            dates.len(),
            cfg.calendar.date(0),
            cfg.calendar.date(cfg.calendar.len() - 1),
            cfg.calendar.len()
        )));
    }
    let mut roster = Roster::blank(cfg);
    let mut warnings = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let id = rec.get(0).unwrap_or("").trim().to_string();
        let n = cfg.nurse_index(&id)?;
        if !seen.insert(n) {
            return Err(Error::Parse(format!("duplicate row for nurse {id}")));
        }
        for (d, raw) in rec.iter().skip(1).enumerate() {
            let raw = raw.trim();
            let date = cfg.calendar.date(d);
            let sym = if raw.is_empty() {
                ShiftSymbol::Unset
            } else if let Some(s) = map.lookup(raw) {
                s
            } else {
                warnings.push(Warning::cell(&id, date, &format!("unknown shift code {raw:?}; cell left unset")));
                ShiftSymbol::Unset
            };
            roster.set_symbol(roster.cell_index(n, d), sym);
        }
    }
    for (n, nurse) in cfg.nurses.iter().enumerate() {
        if !seen.contains(&n) {
            warnings.push(Warning {
                field: format!("row {}", nurse.id),
                message: "no row for this nurse; all cells left unset".into(),
                constraints: vec![],
                nurse: Some(nurse.id.clone()),
                date: None,
            });
        }
        for d in cfg.calendar.prev_range() {
            if seen.contains(&n) && roster.get(n, d) == ShiftSymbol::Unset {
                let mut w = Warning::cell(&nurse.id, cfg.calendar.date(d), "previous-month cell is unset");
                w.constraints = vec![ConstraintId::night_hard(1), ConstraintId::day_hard(1)];
                warnings.push(w);
            }
        }
    }
    warnings.sort_by(|a, b| (&a.nurse, a.date).cmp(&(&b.nurse, b.date)));
    Ok((roster, warnings))
}

/// Structured export: the roster with provenance plus a schema version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredRoster {
    pub schema_version: u32,
    pub roster: Roster,
}

pub fn export_roster(roster: &Roster, format: RosterFormat) -> Result<String> {
    match format {
        RosterFormat::GridCsv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let mut head = vec!["nurse".to_string()];
            head.extend(roster.dates().iter().map(|d| d.to_string()));
            w.write_record(&head)?;
            for (n, id) in roster.nurses().iter().enumerate() {
                let mut row = vec![id.as_str()];
                row.extend(roster.row(n).iter().map(|s| s.glyph()));
                w.write_record(&row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
        RosterFormat::StructuredJson => {
            let doc = StructuredRoster { schema_version: 1, roster: roster.clone() };
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

/// Reads either export back; grid input goes through the identity map and
/// so carries default provenance.
pub fn import_roster(text: &str, format: RosterFormat, cfg: &WardConfig) -> Result<Roster> {
    match format {
        RosterFormat::GridCsv => {
            let (r, w) = load_wish_table(text, cfg, &SymbolMap::identity())?;
            match w.iter().find(|w| w.message.starts_with("unknown")) {
                Some(w) => Err(Error::Parse(w.to_string())),
                None => Ok(r),
            }
        }
        RosterFormat::StructuredJson => {
            let doc: StructuredRoster = serde_json::from_str(text)?;
            if doc.schema_version != 1 {
                return Err(Error::Parse(format!("unsupported schema_version {}", doc.schema_version)));
            }
            doc.roster.check_shape(cfg)?;
            Ok(doc.roster)
        }
    }
}
