//! The ten-symbol shift alphabet and bitmask sets over it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the ten canonical shift codes.
///
/// Serialized as an ASCII token; the parser also accepts the Japanese glyph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
#[repr(u8)]
pub enum ShiftSymbol {
    Day = 0,
    LongDay,
    Early,
    Late,
    NightIn,
    NightOut,
    Other,
    Off,
    SpecialOff,
    Unset,
}

use ShiftSymbol::*;

impl ShiftSymbol {
    pub const ALL: [ShiftSymbol; 10] = [
        Day, LongDay, Early, Late, NightIn, NightOut, Other, Off, SpecialOff, Unset,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn token(self) -> &'static str {
        match self {
            Day => "day",
            LongDay => "12h",
            Early => "early",
            Late => "late",
            NightIn => "in",
            NightOut => "out",
            Other => "other",
            Off => "off",
            SpecialOff => "special_off",
            Unset => "unset",
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            Day => "日",
            LongDay => "12h",
            Early => "早",
            Late => "遅",
            NightIn => "入",
            NightOut => "明",
            Other => "他",
            Off => "休",
            SpecialOff => "特休",
            Unset => "未",
        }
    }

    /// Accepts the ASCII token, the glyph, or the upper-case enum-style name.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        Self::ALL.into_iter().find(|sym| {
            sym.token() == t || sym.glyph() == t || sym.upper_name().eq_ignore_ascii_case(t)
        })
    }

    fn upper_name(self) -> &'static str {
        match self {
            Day => "DAY",
            LongDay => "LONGDAY",
            Early => "EARLY",
            Late => "LATE",
            NightIn => "NIGHT_IN",
            NightOut => "NIGHT_OUT",
            Other => "OTHER",
            Off => "OFF",
            SpecialOff => "SPECIAL_OFF",
            Unset => "UNSET",
        }
    }
}

impl fmt::Display for ShiftSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

impl FromStr for ShiftSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s).ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }
}

impl TryFrom<String> for ShiftSymbol {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ShiftSymbol> for String {
    fn from(s: ShiftSymbol) -> String {
        s.token().to_string()
    }
}

/// A subset of the alphabet as a 10-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolSet(u16);

const fn bits(syms: &[ShiftSymbol]) -> u16 {
    let mut m = 0u16;
    let mut i = 0;
    while i < syms.len() {
        m |= 1 << (syms[i] as u8);
        i += 1;
    }
    m
}

impl SymbolSet {
    pub const EMPTY: SymbolSet = SymbolSet(0);
    pub const ALL: SymbolSet = SymbolSet(0x3ff);
    /// S_off
    pub const OFF: SymbolSet = SymbolSet(bits(&[Off, SpecialOff]));
    /// S'_off
    pub const OFF_OR_UNSET: SymbolSet = SymbolSet(bits(&[Off, SpecialOff, Unset]));
    /// S_work
    pub const WORK: SymbolSet =
        SymbolSet(bits(&[Day, LongDay, Early, Late, NightIn, NightOut, Other]));
    /// S'_work
    pub const WORK_OR_UNSET: SymbolSet =
        SymbolSet(bits(&[Day, LongDay, Early, Late, NightIn, NightOut, Other, Unset]));
    /// S_day
    pub const DAY: SymbolSet = SymbolSet(bits(&[Day, LongDay, Early, Late, Other]));
    /// Symbols counted as day-band staffing.
    pub const DAY_BAND: SymbolSet = SymbolSet(bits(&[Day, LongDay, Early, Late]));
    /// Symbols counted as night-band staffing.
    pub const NIGHT_BAND: SymbolSet = SymbolSet(bits(&[NightIn]));
    /// Symbols the night stage may place in a free cell.
    pub const NIGHT_STAGE: SymbolSet = SymbolSet(bits(&[NightIn, NightOut, Off, Unset]));
    /// Symbols the day stage places in a free cell by default.
    pub const DAY_STAGE: SymbolSet = SymbolSet(bits(&[Day, Off]));
    /// Symbols a human may place between the two stages.
    pub const EDITABLE: SymbolSet = SymbolSet(bits(&[NightIn, NightOut, Off, SpecialOff, Unset]));
    /// Longday or unset: the cell before a night under the 12-hour pattern.
    pub const LONG_OR_UNSET: SymbolSet = SymbolSet(bits(&[LongDay, Unset]));

    pub const fn of(sym: ShiftSymbol) -> SymbolSet {
        SymbolSet(1 << (sym as u8))
    }

    pub fn from_symbols(syms: &[ShiftSymbol]) -> SymbolSet {
        SymbolSet(bits(syms))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, sym: ShiftSymbol) -> bool {
        self.0 & (1 << sym as u8) != 0
    }

    pub fn union(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 | other.0)
    }

    pub fn intersect(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 & other.0)
    }

    pub fn minus(self, other: SymbolSet) -> SymbolSet {
        SymbolSet(self.0 & !other.0)
    }

    pub fn with(self, sym: ShiftSymbol) -> SymbolSet {
        self.union(SymbolSet::of(sym))
    }

    pub fn without(self, sym: ShiftSymbol) -> SymbolSet {
        self.minus(SymbolSet::of(sym))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = ShiftSymbol> {
        ShiftSymbol::ALL.into_iter().filter(move |s| self.contains(*s))
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(s.glyph())?;
        }
        f.write_str("}")
    }
}

impl FromIterator<ShiftSymbol> for SymbolSet {
    fn from_iter<I: IntoIterator<Item = ShiftSymbol>>(iter: I) -> Self {
        iter.into_iter().fold(SymbolSet::EMPTY, |acc, s| acc.with(s))
    }
}
