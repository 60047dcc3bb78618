//! Date windows: five margin days before and after the target month, plus the
//! derived day subsets and sliding-window start sets used by the constraints.

use std::collections::BTreeSet;
use std::ops::Range;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of the previous-month tail and of the next-month head.
pub const MARGIN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayClass {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
    Holiday,
}

impl DayClass {
    pub const ALL: [DayClass; 8] = [
        DayClass::Mon,
        DayClass::Tue,
        DayClass::Wed,
        DayClass::Thu,
        DayClass::Fri,
        DayClass::Sat,
        DayClass::Sun,
        DayClass::Holiday,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of_weekday(w: Weekday) -> DayClass {
        DayClass::ALL[w.num_days_from_monday() as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeekdayClass {
    Weekday,
    WeekendHoliday,
}

/// Named sliding-window families. Each knows its length and which start
/// dates it admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowSet {
    /// Starts in the previous-month tail (length 5).
    PrevTail,
    /// Two day shifts, a longday or unset, then a night start (length 4).
    FiveRunWithNight,
    /// Five-on, one-off, four-on patterns involving nights (length 10).
    FiveOneFour,
    /// Five work days followed by a single off (length 7).
    FiveThenSingleOff,
    /// Nine days needing two offs.
    NineDayTwoOff,
    /// Six consecutive days.
    SixDay,
    /// Three day shifts before a longday (length 4).
    ThreeDayBeforeLong,
    /// Three consecutive day-band shifts.
    ThreeDay,
    /// Nine days holding at most two night starts.
    ThreeNights,
    /// Thirteen days holding at most three night starts.
    FourNights,
    /// Ten days holding at most three night starts (night-only staff).
    FourNightsOnly,
    /// Fourteen days holding at most three night starts.
    TwoWeekFourNights,
    /// Fourteen days that should hold a night start.
    IntervalUpper,
    /// Four days holding at most one night start.
    IntervalLower,
    /// Run-length cap windows of the given length.
    MaxRun(usize),
    /// Three-off candidate windows (length 4, start in the target month).
    TripleOffCandidate,
    /// Work, off, off, work (length 4, first off day in the target month).
    PairOff,
    /// Three offs (start in the target month).
    TripleOff,
    /// Forbidden sequence windows of the given length.
    Forbidden(usize),
    /// Off, day, off (the day cell in the target month).
    SingleDay,
}

impl WindowSet {
    pub fn len(self) -> usize {
        match self {
            WindowSet::PrevTail => 5,
            WindowSet::FiveRunWithNight => 4,
            WindowSet::FiveOneFour => 10,
            WindowSet::FiveThenSingleOff => 7,
            WindowSet::NineDayTwoOff => 9,
            WindowSet::SixDay => 6,
            WindowSet::ThreeDayBeforeLong => 4,
            WindowSet::ThreeDay => 3,
            WindowSet::ThreeNights => 9,
            WindowSet::FourNights => 13,
            WindowSet::FourNightsOnly => 10,
            WindowSet::TwoWeekFourNights => 14,
            WindowSet::IntervalUpper => 14,
            WindowSet::IntervalLower => 4,
            WindowSet::MaxRun(n) | WindowSet::Forbidden(n) => n,
            WindowSet::TripleOffCandidate => 4,
            WindowSet::PairOff => 4,
            WindowSet::TripleOff => 3,
            WindowSet::SingleDay => 3,
        }
    }

    /// Offset inside the window that must fall in the target month, for the
    /// pattern-count families. `None` means "window intersects the target".
    fn anchor(self) -> Option<usize> {
        match self {
            WindowSet::TripleOffCandidate | WindowSet::TripleOff => Some(0),
            WindowSet::PairOff | WindowSet::SingleDay => Some(1),
            _ => None,
        }
    }

    /// Families whose windows must end inside the target month. These reward
    /// the presence of something (a night, an off, an allowed successor), so an
    /// unknown next-month cell must not count against them; the month boundary
    /// is handled by dedicated rules instead.
    fn confined(self) -> bool {
        matches!(self, WindowSet::Forbidden(_) | WindowSet::IntervalUpper | WindowSet::NineDayTwoOff)
    }
}

/// Serializable description from which a [`CalendarWindow`] is rebuilt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalendarSpec {
    pub target_start: NaiveDate,
    pub target_len: usize,
    #[serde(default)]
    pub holidays: BTreeSet<NaiveDate>,
    #[serde(default)]
    pub event_weekdays: Vec<Weekday>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CalendarSpec", into = "CalendarSpec")]
pub struct CalendarWindow {
    spec: CalendarSpec,
    dates: Vec<NaiveDate>,
    holiday: Vec<bool>,
}

impl TryFrom<CalendarSpec> for CalendarWindow {
    type Error = Error;
    fn try_from(spec: CalendarSpec) -> Result<Self> {
        CalendarWindow::custom(spec.target_start, spec.target_len, &spec.holidays, &spec.event_weekdays)
    }
}

impl From<CalendarWindow> for CalendarSpec {
    fn from(c: CalendarWindow) -> CalendarSpec {
        c.spec
    }
}

/// Builds the window for a calendar month given as `YYYY-MM`.
pub fn build_calendar(
    year_month: &str,
    holidays: &[NaiveDate],
    event_weekdays: &[Weekday],
) -> Result<CalendarWindow> {
    let bad = || Error::MalformedMonth(year_month.to_string());
    let (y, m) = year_month.trim().split_once('-').ok_or_else(bad)?;
    let year: i32 = y.parse().map_err(|_| bad())?;
    let month: u32 = m.parse().map_err(|_| bad())?;
    let first = NaiveDate::from_ymd_opt(year, month, 1).ok_or_else(bad)?;
    let next = first.checked_add_months(chrono::Months::new(1)).ok_or_else(bad)?;
    let len = (next - first).num_days() as usize;
    let set: BTreeSet<NaiveDate> = holidays.iter().copied().collect();
    CalendarWindow::custom(first, len, &set, event_weekdays)
}

impl CalendarWindow {
    /// A window whose target period starts at `target_start` and lasts
    /// `target_len` days. Used for months and for short synthetic instances.
    pub fn custom(
        target_start: NaiveDate,
        target_len: usize,
        holidays: &BTreeSet<NaiveDate>,
        event_weekdays: &[Weekday],
    ) -> Result<Self> {
        if target_len == 0 {
            return Err(Error::Config("target period must contain at least one day".into()));
        }
        let first = target_start
            .checked_sub_days(Days::new(MARGIN as u64))
            .ok_or(Error::DateOutsideWindow(target_start))?;
        let total = target_len + 2 * MARGIN;
        let dates: Vec<NaiveDate> = (0..total).map(|i| first + Days::new(i as u64)).collect();
        for h in holidays {
            if !dates.contains(h) {
                return Err(Error::DateOutsideWindow(*h));
            }
        }
        let holiday = dates.iter().map(|d| holidays.contains(d)).collect();
        let mut ev: Vec<Weekday> = event_weekdays.to_vec();
        ev.sort_by_key(|w| w.num_days_from_monday());
        ev.dedup();
        Ok(CalendarWindow {
            spec: CalendarSpec {
                target_start,
                target_len,
                holidays: holidays.clone(),
                event_weekdays: ev,
            },
            dates,
            holiday,
        })
    }

    pub fn spec(&self) -> &CalendarSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn date(&self, i: usize) -> NaiveDate {
        self.dates[i]
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let off = (date - self.dates[0]).num_days();
        (off >= 0 && (off as usize) < self.dates.len()).then_some(off as usize)
    }

    pub fn target_len(&self) -> usize {
        self.spec.target_len
    }

    pub fn prev_range(&self) -> Range<usize> {
        0..MARGIN
    }

    pub fn target_range(&self) -> Range<usize> {
        MARGIN..MARGIN + self.spec.target_len
    }

    pub fn next_range(&self) -> Range<usize> {
        MARGIN + self.spec.target_len..self.len()
    }

    pub fn prev_days(&self) -> &[NaiveDate] {
        &self.dates[self.prev_range()]
    }

    pub fn target_days(&self) -> &[NaiveDate] {
        &self.dates[self.target_range()]
    }

    pub fn next_days(&self) -> &[NaiveDate] {
        &self.dates[self.next_range()]
    }

    pub fn is_target(&self, i: usize) -> bool {
        self.target_range().contains(&i)
    }

    /// d_1
    pub fn first_target(&self) -> usize {
        MARGIN
    }

    /// d_last
    pub fn last_target(&self) -> usize {
        MARGIN + self.spec.target_len - 1
    }

    /// d_{p,last}
    pub fn prev_last(&self) -> usize {
        MARGIN - 1
    }

    /// d_{n1}
    pub fn next_first(&self) -> usize {
        MARGIN + self.spec.target_len
    }

    /// d_{n2}
    pub fn next_second(&self) -> usize {
        MARGIN + self.spec.target_len + 1
    }

    pub fn is_holiday(&self, i: usize) -> bool {
        self.holiday[i]
    }

    pub fn weekday(&self, i: usize) -> Weekday {
        self.dates[i].weekday()
    }

    /// Day-of-week class with flagged holidays forming their own class.
    pub fn day_class(&self, i: usize) -> DayClass {
        if self.holiday[i] {
            DayClass::Holiday
        } else {
            DayClass::of_weekday(self.weekday(i))
        }
    }

    pub fn is_weekend_or_holiday(&self, i: usize) -> bool {
        self.holiday[i] || matches!(self.weekday(i), Weekday::Sat | Weekday::Sun)
    }

    pub fn weekday_class(&self, date: NaiveDate) -> Result<WeekdayClass> {
        let i = self.index_of(date).ok_or(Error::DateOutsideWindow(date))?;
        Ok(self.weekday_class_at(i))
    }

    pub fn weekday_class_at(&self, i: usize) -> WeekdayClass {
        if self.is_weekend_or_holiday(i) {
            WeekdayClass::WeekendHoliday
        } else {
            WeekdayClass::Weekday
        }
    }

    /// D_{t,off}: weekend and holiday dates of the target period.
    pub fn target_off_days(&self) -> Vec<usize> {
        self.target_range().filter(|&i| self.is_weekend_or_holiday(i)).collect()
    }

    /// D_fssm: Fridays through Mondays of the target period.
    pub fn fssm_days(&self) -> Vec<usize> {
        self.target_range()
            .filter(|&i| {
                matches!(self.weekday(i), Weekday::Fri | Weekday::Sat | Weekday::Sun | Weekday::Mon)
            })
            .collect()
    }

    /// D_sat: Saturdays of the target period, except a Saturday on its final day.
    pub fn saturdays(&self) -> Vec<usize> {
        self.target_range()
            .filter(|&i| self.weekday(i) == Weekday::Sat && i != self.last_target())
            .collect()
    }

    /// D_ope: target dates falling on an event weekday.
    pub fn event_days(&self) -> Vec<usize> {
        self.target_range()
            .filter(|&i| self.spec.event_weekdays.contains(&self.weekday(i)))
            .collect()
    }

    /// Start indices admitted by a window family. Every returned window lies
    /// inside D.
    pub fn window_starts(&self, set: WindowSet) -> Vec<usize> {
        let len = set.len();
        let total = self.len();
        if len == 0 || len > total {
            return Vec::new();
        }
        let last_start = total - len;
        if set == WindowSet::PrevTail {
            return self.prev_range().filter(|&d| d <= last_start).collect();
        }
        match set.anchor() {
            Some(a) => self
                .target_range()
                .filter(|&t| t >= a && t - a <= last_start)
                .map(|t| t - a)
                .collect(),
            None => {
                let lo = self.first_target().saturating_sub(len - 1);
                let hi = if set.confined() {
                    match (self.last_target() + 1).checked_sub(len) {
                        Some(h) => h,
                        None => return Vec::new(),
                    }
                } else {
                    self.last_target().min(last_start)
                };
                (lo..=hi).collect()
            }
        }
    }
}
