//! Condition-settings files: a schema-versioned TOML document describing
//! the ward, checked for fields the enabled rules need but the file leaves
//! out.

use std::collections::BTreeSet;

use chrono::{NaiveDate, Weekday};
use serde::Deserialize;

use super::Warning;
use crate::catalog::eval::staffing_template;
use crate::catalog::{is_enabled, soft_ids, ConstraintId};
use crate::domain::{build_calendar, DayClass, Stage, StaffCategory, WardConfig};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Calendar keys accepted at the top level instead of a `[calendar]` table.
#[derive(Deserialize)]
struct MonthKeys {
    month: String,
    #[serde(default)]
    holidays: Vec<NaiveDate>,
    #[serde(default)]
    event_weekdays: Vec<Weekday>,
}

/// Parses a condition file. Unknown keys and fields the enabled rules need
/// but the file leaves unset come back as warnings; schema errors, dangling
/// nurse references and inverted bounds are errors.
pub fn load_condition_file(text: &str) -> Result<(WardConfig, Vec<Warning>)> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    match doc.remove("schema_version") {
        Some(toml::Value::Integer(v)) if v == SCHEMA_VERSION as i64 => {}
        Some(v) => return Err(Error::Parse(format!("unsupported schema_version {v}"))),
        None => return Err(Error::Parse("missing schema_version".into())),
    }
    if doc.contains_key("month") {
        if doc.contains_key("calendar") {
            return Err(Error::Parse("give either month or [calendar], not both".into()));
        }
        let mut keys = toml::Table::new();
        for k in ["month", "holidays", "event_weekdays"] {
            if let Some(v) = doc.remove(k) {
                keys.insert(k.into(), v);
            }
        }
        let m: MonthKeys = keys.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        let cal = build_calendar(&m.month, &m.holidays, &m.event_weekdays)?;
        let spec = toml::Value::try_from(cal.spec()).map_err(|e| Error::Parse(e.to_string()))?;
        doc.insert("calendar".into(), spec);
    }
    let mut warnings = Vec::new();
    let cfg: WardConfig = serde_ignored::deserialize(toml::Value::Table(doc), |path| {
        warnings.push(Warning::field(path.to_string(), "unknown key ignored", vec![]));
    })
    .map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    warnings.extend(missing_fields(&cfg));
    Ok((cfg, warnings))
}

/// Serializes a ward back into the condition-file form.
pub fn condition_to_toml(cfg: &WardConfig) -> Result<String> {
    let mut t = toml::Table::new();
    t.insert("schema_version".into(), toml::Value::Integer(SCHEMA_VERSION as i64));
    let body = toml::Value::try_from(cfg).map_err(|e| Error::Parse(e.to_string()))?;
    if let toml::Value::Table(b) = body {
        t.extend(b);
    }
    toml::to_string(&t).map_err(|e| Error::Parse(e.to_string()))
}

fn class_key(c: DayClass) -> &'static str {
    ["mon", "tue", "wed", "thu", "fri", "sat", "sun", "holiday"][c.index()]
}

/// Unset fields that enabled rules read, ordered by field name.
pub fn missing_fields(cfg: &WardConfig) -> Vec<Warning> {
    let mut out = Vec::new();
    let classes: BTreeSet<DayClass> = cfg.calendar.target_range().map(|d| cfg.calendar.day_class(d)).collect();
    for stage in [Stage::Night, Stage::Day] {
        let band = match stage {
            Stage::Night => "night",
            Stage::Day => "day",
        };
        // (category, lower) -> ids reading that table
        let mut users: Vec<(StaffCategory, bool, Vec<ConstraintId>)> = Vec::new();
        for id in soft_ids(stage, cfg) {
            let Some((cat, lower)) = staffing_template(id) else { continue };
            if !is_enabled(id, cfg) {
                continue;
            }
            match users.iter_mut().find(|u| u.0 == cat && u.1 == lower) {
                Some(u) => u.2.push(id),
                None => users.push((cat, lower, vec![id])),
            }
        }
        for (cat, lower, ids) in users {
            let populated = cfg.category_members(cat).iter().any(|(_, m)| !m.is_empty());
            let b = cfg.staffing.band(stage).get(cat);
            let table = if lower { &b.lb } else { &b.ub };
            // A category with no bounds at all is taken as unbounded, except
            // the whole-ward headcount which every ward needs.
            if !populated || (table.is_unset() && cat != StaffCategory::All) {
                continue;
            }
            let missing: Vec<&str> =
                table.missing().into_iter().filter(|c| classes.contains(c)).map(class_key).collect();
            if missing.is_empty() {
                continue;
            }
            let side = if lower { "lb" } else { "ub" };
            out.push(Warning::field(
                format!("staffing.{band}.{}.{side}", cat.key()),
                &format!("no value for {}", missing.join(", ")),
                ids,
            ));
        }
    }
    let grouped: Vec<ConstraintId> = [Stage::Night, Stage::Day]
        .into_iter()
        .flat_map(|s| soft_ids(s, cfg))
        .filter(|id| staffing_template(*id).is_some() && is_enabled(*id, cfg))
        .collect();
    for n in cfg.nurses.iter().filter(|n| n.group.is_none()) {
        out.push(Warning::field(
            format!("nurses.{}.group", n.id),
            "no group; the nurse is left out of every staffing count",
            grouped.clone(),
        ));
    }
    if cfg.weekly_off.is_none() && cfg.nurses.iter().any(|n| n.weekly_off.is_none()) {
        let ids = [ConstraintId::night_soft(23), ConstraintId::day_soft(24), ConstraintId::day_soft(25)]
            .into_iter()
            .filter(|id| is_enabled(*id, cfg))
            .collect();
        out.push(Warning::field(
            "weekly_off".into(),
            &format!(
                "not set; using the {} weekend and holiday dates of the month",
                cfg.calendar.target_off_days().len()
            ),
            ids,
        ));
    }
    out.sort_by(|a, b| a.field.cmp(&b.field));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"
schema_version = 1
month = "2025-06"
holidays = []
weekly_off = 9
night_pattern = "TWELVE_HOUR"

[[nurses]]
id = "n1"
group = 1

[[nurses]]
id = "n2"
group = 2

[staffing.night.all]
lb = { weekday = 1, weekend = 1 }
ub = 2

[staffing.day.all]
lb = { weekday = 1, weekend = 0 }
ub = 2
"#;

    #[test]
    fn golden_file_loads_without_warnings() {
        let (cfg, w) = load_condition_file(GOLDEN).unwrap();
        assert!(w.is_empty(), "{w:?}");
        assert_eq!(cfg.nurses.len(), 2);
        assert_eq!(cfg.calendar.target_len(), 30);
    }

    #[test]
    fn missing_weekend_night_lower_bound_names_its_rule() {
        let text = GOLDEN.replace("lb = { weekday = 1, weekend = 1 }", "lb = { weekday = 1 }");
        let (_, w) = load_condition_file(&text).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].field, "staffing.night.all.lb");
        assert!(w[0].message.contains("sat") && w[0].message.contains("sun"));
        assert_eq!(w[0].constraints, vec![ConstraintId::night_soft(1)]);
    }

    #[test]
    fn inverted_bounds_are_an_error_echoing_both_values() {
        let text = GOLDEN.replace("lb = { weekday = 1, weekend = 1 }\nub = 2", "lb = 5\nub = 3");
        match load_condition_file(&text) {
            Err(Error::BoundOrder { lb: 5, ub: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_nurse_reference_is_an_error() {
        let text = format!("{GOLDEN}\n[[pairs]]\nn1 = \"n1\"\nn2 = \"ghost\"\ns1 = \"in\"\ns2 = \"in\"\nmin = 1\n");
        assert!(matches!(load_condition_file(&text), Err(Error::UnknownNurse(_))));
    }

    #[test]
    fn unknown_keys_warn_and_version_is_required() {
        let (_, w) = load_condition_file(&format!("{GOLDEN}\n[extra]\nx = 1\n")).unwrap();
        assert_eq!(w[0].field, "extra");
        assert!(load_condition_file(&GOLDEN.replace("schema_version = 1", "")).is_err());
    }

    #[test]
    fn condition_file_round_trips() {
        let (cfg, _) = load_condition_file(GOLDEN).unwrap();
        let text = condition_to_toml(&cfg).unwrap();
        let (back, _) = load_condition_file(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
