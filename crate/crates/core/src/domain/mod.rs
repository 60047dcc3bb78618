//! Shared model: shift alphabet, calendar windows, ward description, roster.

pub mod calendar;
pub mod roster;
pub mod symbol;
pub mod ward;

pub use calendar::{build_calendar, CalendarSpec, CalendarWindow, DayClass, WeekdayClass, WindowSet, MARGIN};
pub use roster::{Provenance, Roster};
pub use symbol::{ShiftSymbol, SymbolSet};
pub use ward::{
    BandStaffing, Bounds, DayTable, ForbiddenAssignment, ForbiddenPair, Multipliers, NightClass,
    NightPattern, Nurse, OffPreference, Pair, Sequence, SequenceRules, Stage, StaffCategory,
    Staffing, Team, Toggles, WardConfig, Weights, ALL_CATEGORIES, DEFAULT_PROBE_WEIGHT,
};
