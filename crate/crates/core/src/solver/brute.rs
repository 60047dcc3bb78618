//! Exhaustive search for tiny wards, using only the direct evaluator. Each
//! nurse's rows are enumerated and pruned by that nurse's own hard rules
//! (checked on a one-nurse copy of the ward); the product of the surviving
//! rows is then checked and scored in full.

use crate::catalog::{check_hard, evaluate_stage, hard_ids, stage_is_feasible, Penalty};
use crate::domain::{Provenance, Roster, ShiftSymbol, Stage, WardConfig};
use crate::encoder::free_mask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BruteOptimum {
    pub roster: Roster,
    pub objective: Penalty,
    /// Full rosters scored.
    pub combinations: u64,
}

const ROW_CAP: u64 = 1 << 18;

/// Rows of one nurse that break none of that nurse's hard rules.
fn nurse_rows(stage: Stage, cfg: &WardConfig, wishes: &Roster, free: &[bool], n: usize) -> Result<Vec<Vec<ShiftSymbol>>> {
    let nd = cfg.calendar.len();
    let alphabet: Vec<ShiftSymbol> = cfg.stage_alphabet(stage).iter().collect();
    let open: Vec<usize> = (0..nd).filter(|&d| free[n * nd + d]).collect();
    let total = (alphabet.len() as u64).checked_pow(open.len() as u32).unwrap_or(u64::MAX);
    if total > ROW_CAP {
        return Err(Error::Config(format!("{total} rows for nurse {} exceed the enumeration cap", cfg.nurses[n].id)));
    }
    let mut solo = cfg.clone();
    solo.nurses = vec![cfg.nurses[n].clone()];
    solo.pairs.clear();
    solo.forbidden_pairs.clear();
    solo.forbidden_assignments.retain(|f| f.nurse == cfg.nurses[n].id);
    let id = cfg.nurses[n].id.clone();
    let ids = hard_ids(stage, &solo);
    let mut row = Roster::blank(&solo);
    for d in 0..nd {
        row.set(0, d, wishes.get(n, d), wishes.provenance(n, d));
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; open.len()];
    for _ in 0..total {
        for (i, &d) in open.iter().enumerate() {
            row.set(0, d, alphabet[digits[i]], Provenance::Solved(stage));
        }
        let mut ok = true;
        for &h in &ids {
            if check_hard(h, &row, &solo)?.records().iter().any(|r| r.nurse.as_deref() == Some(id.as_str())) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(row.row(0).to_vec());
        }
        for x in digits.iter_mut() {
            *x += 1;
            if *x < alphabet.len() {
                break;
            }
            *x = 0;
        }
    }
    Ok(out)
}

/// Minimum soft objective over every hard-feasible completion of the free
/// cells, or `None` when there is none. Ties keep the first roster in
/// enumeration order. Fails when more than `cap` rosters would be scored.
pub fn brute_force(stage: Stage, cfg: &WardConfig, wishes: &Roster, cap: u64) -> Result<Option<BruteOptimum>> {
    cfg.validate()?;
    wishes.check_shape(cfg)?;
    let free = free_mask(stage, wishes, cfg);
    let nd = cfg.calendar.len();
    let mut rows = Vec::new();
    let mut product = 1u64;
    for n in 0..cfg.nurses.len() {
        let r = nurse_rows(stage, cfg, wishes, &free, n)?;
        if r.is_empty() {
            return Ok(None);
        }
        product = product.saturating_mul(r.len() as u64);
        if product > cap {
            return Err(Error::Config(format!("more than {cap} candidate rosters")));
        }
        rows.push(r);
    }
    let mut roster = wishes.clone();
    let mut pick = vec![0usize; rows.len()];
    let mut best: Option<(Penalty, Roster)> = None;
    for _ in 0..product {
        for (n, &k) in pick.iter().enumerate() {
            for d in 0..nd {
                if free[n * nd + d] {
                    roster.set(n, d, rows[n][k][d], Provenance::Solved(stage));
                }
            }
        }
        if stage_is_feasible(stage, &roster, cfg)? {
            let obj = evaluate_stage(stage, &roster, cfg)?.objective;
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, roster.clone()));
            }
        }
        for (n, x) in pick.iter_mut().enumerate() {
            *x += 1;
            if *x < rows[n].len() {
                break;
            }
            *x = 0;
        }
    }
    Ok(best.map(|(objective, roster)| BruteOptimum { roster, objective, combinations: product }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use num_traits::Zero;

    #[test]
    fn finds_a_roster_no_worse_than_all_unset() {
        let cfg = synth::random_ward(11, 2, 4);
        let w = synth::random_wishes(&cfg, 11, 0.3);
        let opt = brute_force(Stage::Night, &cfg, &w, 100_000).unwrap();
        if stage_is_feasible(Stage::Night, &w, &cfg).unwrap() {
            let base = evaluate_stage(Stage::Night, &w, &cfg).unwrap().objective;
            let opt = opt.expect("the unset completion is feasible");
            assert!(opt.objective <= base);
            assert!(opt.objective >= Penalty::zero());
        }
    }
}
