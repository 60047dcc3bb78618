//! Constraint identifiers such as `Hn-N-5` or `Sd-S-17-cw`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::Stage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    /// Nurse constraint
    N,
    /// Shift constraint
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConstraintId {
    pub stage: Stage,
    pub kind: Kind,
    pub index: u8,
    /// Care-worker duplicate of a rookie staffing template.
    pub care_worker: bool,
}

/// Number of entries per (stage, kind).
pub fn family_size(stage: Stage, kind: Kind) -> u8 {
    match (stage, kind) {
        (Stage::Night, Kind::Hard) => 14,
        (Stage::Night, Kind::Soft) => 35,
        (Stage::Day, Kind::Hard) => 9,
        (Stage::Day, Kind::Soft) => 34,
    }
}

impl ConstraintId {
    pub const fn new(stage: Stage, kind: Kind, index: u8) -> Self {
        ConstraintId { stage, kind, index, care_worker: false }
    }

    pub const fn night_hard(i: u8) -> Self {
        Self::new(Stage::Night, Kind::Hard, i)
    }

    pub const fn night_soft(i: u8) -> Self {
        Self::new(Stage::Night, Kind::Soft, i)
    }

    pub const fn day_hard(i: u8) -> Self {
        Self::new(Stage::Day, Kind::Hard, i)
    }

    pub const fn day_soft(i: u8) -> Self {
        Self::new(Stage::Day, Kind::Soft, i)
    }

    pub const fn care_worker_variant(self) -> Self {
        ConstraintId { care_worker: true, ..self }
    }

    pub fn axis(self) -> Axis {
        let i = self.index;
        let shift = match (self.stage, self.kind) {
            (Stage::Night, Kind::Hard) => i >= 12,
            (Stage::Night, Kind::Soft) => i <= 20,
            (Stage::Day, Kind::Hard) => i >= 8,
            (Stage::Day, Kind::Soft) => i <= 21,
        };
        if shift {
            Axis::S
        } else {
            Axis::N
        }
    }

    pub fn is_hard(self) -> bool {
        self.kind == Kind::Hard
    }

    fn valid(self) -> bool {
        self.index >= 1
            && self.index <= family_size(self.stage, self.kind)
            && (!self.care_worker || (self.kind == Kind::Soft && matches!(self.index, 17 | 18)))
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            Kind::Hard => 'H',
            Kind::Soft => 'S',
        };
        let s = match self.stage {
            Stage::Night => 'n',
            Stage::Day => 'd',
        };
        let a = match self.axis() {
            Axis::N => 'N',
            Axis::S => 'S',
        };
        write!(f, "{k}{s}-{a}-{}", self.index)?;
        if self.care_worker {
            f.write_str("-cw")?;
        }
        Ok(())
    }
}

impl FromStr for ConstraintId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownConstraint(s.to_string());
        let t = s.trim();
        let (t, cw) = match t.strip_suffix("-cw") {
            Some(rest) => (rest, true),
            None => (t, false),
        };
        let mut parts = t.split('-');
        let head = parts.next().ok_or_else(bad)?;
        let axis = parts.next().ok_or_else(bad)?;
        let idx = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let mut hc = head.chars();
        let kind = match hc.next() {
            Some('H') => Kind::Hard,
            Some('S') => Kind::Soft,
            _ => return Err(bad()),
        };
        let stage = match hc.next() {
            Some('n') => Stage::Night,
            Some('d') => Stage::Day,
            _ => return Err(bad()),
        };
        if hc.next().is_some() {
            return Err(bad());
        }
        let index: u8 = idx.parse().map_err(|_| bad())?;
        let id = ConstraintId { stage, kind, index, care_worker: cw };
        if !id.valid() {
            return Err(bad());
        }
        let want = match id.axis() {
            Axis::N => "N",
            Axis::S => "S",
        };
        if axis != want {
            return Err(bad());
        }
        Ok(id)
    }
}

impl TryFrom<String> for ConstraintId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ConstraintId> for String {
    fn from(c: ConstraintId) -> String {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_round_trip() {
        for (stage, kind) in [
            (Stage::Night, Kind::Hard),
            (Stage::Night, Kind::Soft),
            (Stage::Day, Kind::Hard),
            (Stage::Day, Kind::Soft),
        ] {
            for i in 1..=family_size(stage, kind) {
                let id = ConstraintId::new(stage, kind, i);
                let back: ConstraintId = id.to_string().parse().unwrap();
                assert_eq!(back, id);
            }
        }
        assert_eq!(ConstraintId::night_hard(5).to_string(), "Hn-N-5");
        assert_eq!(ConstraintId::night_hard(12).to_string(), "Hn-S-12");
        assert_eq!(ConstraintId::day_soft(21).to_string(), "Sd-S-21");
        assert_eq!(ConstraintId::day_soft(22).to_string(), "Sd-N-22");
        assert_eq!(ConstraintId::day_hard(8).to_string(), "Hd-S-8");
        assert_eq!(ConstraintId::night_soft(17).care_worker_variant().to_string(), "Sn-S-17-cw");
    }

    #[test]
    fn rejects_unknown_ids() {
        for s in ["Hn-N-15", "Hn-S-5", "Sd-N-35", "Xn-N-1", "Hn-N-0", "Sn-N-30-cw", "Hn-N"] {
            assert!(s.parse::<ConstraintId>().is_err(), "{s}");
        }
    }
}
