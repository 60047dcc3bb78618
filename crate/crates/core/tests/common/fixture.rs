//! Hand-built two-week wards. Target 2025-06-02 (Mon) .. 2025-06-15 (Sun):
//! window index 5 is the first target Monday, 10/11 and 17/18 are the
//! weekends, 0..=4 the previous-month tail, 19..=23 the following margin.

use std::collections::BTreeSet;

use chrono::{NaiveDate, Weekday};
use num_rational::Ratio;
use rostra::catalog::{CellRef, Penalty};
use rostra::domain::{CalendarWindow, DayClass, DayTable, Nurse, Roster, WardConfig};

pub const T: usize = 5;
pub const LEN: usize = 24;

pub fn p(n: i64) -> Penalty {
    Ratio::from_integer(n)
}

pub fn calendar(events: &[Weekday]) -> CalendarWindow {
    CalendarWindow::custom(NaiveDate::from_ymd_opt(2025, 6, 2).unwrap(), 14, &BTreeSet::new(), events).unwrap()
}

pub fn nurse(id: &str) -> Nurse {
    Nurse { group: Some(1), ..Nurse::new(id) }
}

pub fn ward(nurses: Vec<Nurse>) -> WardConfig {
    WardConfig::new(nurses, calendar(&[]))
}

pub fn plain(k: usize) -> WardConfig {
    ward((0..k).map(|i| nurse(&format!("n{i}"))).collect())
}

/// `fill` everywhere, then the space-separated symbols of each mark written
/// from its start index onwards.
pub fn row(fill: &str, marks: &[(usize, &str)]) -> String {
    let mut cells = vec![fill.to_string(); LEN];
    for (at, syms) in marks {
        for (k, s) in syms.split_whitespace().enumerate() {
            cells[at + k] = s.to_string();
        }
    }
    cells.join(" ")
}

pub fn roster(cfg: &WardConfig, rows: &[String]) -> Roster {
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    Roster::from_rows(cfg, &refs).unwrap()
}

pub fn mondays_only(v: u32) -> DayTable<Option<u32>> {
    let mut t = DayTable::unset();
    t.set(DayClass::Mon, Some(v));
    t
}

pub fn cell(cfg: &WardConfig, nurse: usize, day: usize) -> CellRef {
    CellRef { nurse: cfg.nurses[nurse].id.clone(), date: cfg.calendar.date(day) }
}
