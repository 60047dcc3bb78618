//! Nurse × date symbol matrix with per-cell provenance.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::calendar::CalendarWindow;
use super::symbol::{ShiftSymbol, SymbolSet};
use super::ward::{Stage, WardConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Wish,
    FixedPrevMonth,
    Solved(Stage),
    Edited,
    Postprocessed,
}

impl Provenance {
    pub fn is_solver_owned(self) -> bool {
        matches!(self, Provenance::Solved(_) | Provenance::Postprocessed)
    }
}

/// Always total: every (nurse, date) of the window holds exactly one symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roster {
    nurses: Vec<String>,
    dates: Vec<NaiveDate>,
    cells: Vec<ShiftSymbol>,
    provenance: Vec<Provenance>,
}

impl Roster {
    /// All cells 未; margin-before cells are marked as previous-month data.
    pub fn blank(cfg: &WardConfig) -> Self {
        Self::blank_for(cfg.nurses.iter().map(|n| n.id.clone()).collect(), &cfg.calendar)
    }

    pub fn blank_for(nurses: Vec<String>, cal: &CalendarWindow) -> Self {
        let nd = cal.len();
        let mut provenance = Vec::with_capacity(nurses.len() * nd);
        for _ in 0..nurses.len() {
            for d in 0..nd {
                provenance.push(if d < cal.first_target() {
                    Provenance::FixedPrevMonth
                } else {
                    Provenance::Wish
                });
            }
        }
        Roster {
            cells: vec![ShiftSymbol::Unset; nurses.len() * nd],
            nurses,
            dates: cal.dates().to_vec(),
            provenance,
        }
    }

    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    pub fn day_count(&self) -> usize {
        self.dates.len()
    }

    pub fn nurses(&self) -> &[String] {
        &self.nurses
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn cell_index(&self, nurse: usize, day: usize) -> usize {
        nurse * self.dates.len() + day
    }

    pub fn get(&self, nurse: usize, day: usize) -> ShiftSymbol {
        self.cells[nurse * self.dates.len() + day]
    }

    pub fn at(&self, cell: usize) -> ShiftSymbol {
        self.cells[cell]
    }

    pub fn is(&self, nurse: usize, day: usize, set: SymbolSet) -> bool {
        set.contains(self.get(nurse, day))
    }

    pub fn provenance(&self, nurse: usize, day: usize) -> Provenance {
        self.provenance[nurse * self.dates.len() + day]
    }

    pub fn set(&mut self, nurse: usize, day: usize, sym: ShiftSymbol, prov: Provenance) {
        let i = nurse * self.dates.len() + day;
        self.cells[i] = sym;
        self.provenance[i] = prov;
    }

    /// Overwrites a cell's symbol, keeping its provenance.
    pub fn set_symbol(&mut self, cell: usize, sym: ShiftSymbol) {
        self.cells[cell] = sym;
    }

    pub fn set_provenance(&mut self, nurse: usize, day: usize, prov: Provenance) {
        let i = nurse * self.dates.len() + day;
        self.provenance[i] = prov;
    }

    pub fn cells(&self) -> &[ShiftSymbol] {
        &self.cells
    }

    pub fn row(&self, nurse: usize) -> &[ShiftSymbol] {
        let nd = self.dates.len();
        &self.cells[nurse * nd..(nurse + 1) * nd]
    }

    pub fn nurse_position(&self, id: &str) -> Result<usize> {
        self.nurses.iter().position(|n| n == id).ok_or_else(|| Error::UnknownNurse(id.into()))
    }

    pub fn day_position(&self, date: NaiveDate) -> Result<usize> {
        self.dates.iter().position(|d| *d == date).ok_or(Error::DateOutsideWindow(date))
    }

    /// Checks that nurse ids and dates line up with the configuration.
    pub fn check_shape(&self, cfg: &WardConfig) -> Result<()> {
        let ids: Vec<&str> = cfg.nurses.iter().map(|n| n.id.as_str()).collect();
        let mine: Vec<&str> = self.nurses.iter().map(String::as_str).collect();
        if ids != mine {
            return Err(Error::Config("roster nurses do not match the ward configuration".into()));
        }
        if self.dates != cfg.calendar.dates() {
            return Err(Error::Config("roster dates do not match the calendar window".into()));
        }
        Ok(())
    }

    /// Builds a roster from nurse rows written as glyph or token strings
    /// separated by spaces. Convenient for tests and examples.
    pub fn from_rows(cfg: &WardConfig, rows: &[&str]) -> Result<Self> {
        let mut r = Roster::blank(cfg);
        if rows.len() != cfg.nurses.len() {
            return Err(Error::Config(format!("expected {} rows, got {}", cfg.nurses.len(), rows.len())));
        }
        for (n, row) in rows.iter().enumerate() {
            let syms: Vec<&str> = row.split_whitespace().collect();
            if syms.len() != r.day_count() {
                return Err(Error::Config(format!(
                    "row {n}: expected {} symbols, got {}",
                    r.day_count(),
                    syms.len()
                )));
            }
            for (d, s) in syms.iter().enumerate() {
                let p = r.provenance(n, d);
                r.set(n, d, s.parse()?, p);
            }
        }
        Ok(r)
    }

    /// Rows rendered as space-separated glyphs.
    pub fn render_rows(&self) -> Vec<String> {
        (0..self.nurses.len())
            .map(|n| self.row(n).iter().map(|s| s.glyph()).collect::<Vec<_>>().join(" "))
            .collect()
    }
}
