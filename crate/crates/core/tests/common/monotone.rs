//! Re-solving after pinning cells of the night optimum.

use rand::seq::IndexedRandom;
use rand::Rng;
use rostra::catalog::Penalty;
use rostra::domain::{Provenance, Roster, ShiftSymbol, Stage, WardConfig};
use rostra::encoder::free_mask;
use rostra::solver::{solve_exact, ExactOptions};
use rostra::synth;

pub struct MonotoneOutcome {
    pub seed: u64,
    pub optimum: Penalty,
    /// Objective with nothing pinned, solved a second time.
    pub unperturbed: Penalty,
    /// Objective with cells pinned to the optimum's own values.
    pub pinned_to_optimum: Penalty,
    /// Objectives after pinning random different values, feasible ones only.
    pub perturbed: Vec<Penalty>,
}

impl MonotoneOutcome {
    pub fn holds(&self) -> bool {
        self.unperturbed == self.optimum
            && self.pinned_to_optimum == self.optimum
            && self.perturbed.iter().all(|&z| z >= self.optimum)
    }
}

fn solve(cfg: &WardConfig, w: &Roster) -> Option<(Penalty, Roster)> {
    let sol = solve_exact(Stage::Night, cfg, w, &ExactOptions::with_time(60.0)).expect("exact solve");
    match (sol.report.objective, sol.roster) {
        (Some(z), Some(r)) if sol.report.hard_violations == 0 => Some((z, r)),
        _ => None,
    }
}

/// `None` when the ward has no hard-feasible night roster.
pub fn check_ward(seed: u64) -> Option<MonotoneOutcome> {
    let cfg = synth::random_ward(seed, 3 + (seed % 2) as usize, 7);
    let wishes = synth::random_wishes(&cfg, seed, 0.25);
    let (optimum, best) = solve(&cfg, &wishes)?;
    let (unperturbed, _) = solve(&cfg, &wishes)?;
    let free: Vec<usize> = free_mask(Stage::Night, &wishes, &cfg).iter().enumerate().filter(|(_, f)| **f).map(|(c, _)| c).collect();
    let nd = cfg.calendar.len();
    let mut rng = synth::rng(seed ^ 0xed17);

    let mut same = wishes.clone();
    for &c in free.choose_multiple(&mut rng, 4) {
        let s = best.at(c);
        if s != ShiftSymbol::Unset {
            same.set(c / nd, c % nd, s, Provenance::Edited);
        }
    }
    let pinned_to_optimum = solve(&cfg, &same).map(|(z, _)| z).unwrap_or(Penalty::from_integer(-1));

    let alphabet = [ShiftSymbol::NightIn, ShiftSymbol::NightOut, ShiftSymbol::Off];
    let mut perturbed = Vec::new();
    for _ in 0..6 {
        let mut edited = wishes.clone();
        let k = rng.random_range(1..=3);
        for &c in free.choose_multiple(&mut rng, k) {
            let s = *alphabet.choose(&mut rng).unwrap();
            edited.set(c / nd, c % nd, s, Provenance::Edited);
        }
        // only edits that leave a hard-feasible roster count
        if let Some((z, _)) = solve(&cfg, &edited) {
            perturbed.push(z);
        }
    }
    Some(MonotoneOutcome { seed, optimum, unperturbed, pinned_to_optimum, perturbed })
}

/// The first `wards` seeds with a feasible night stage.
pub fn run(wards: usize) -> Vec<MonotoneOutcome> {
    (0..).filter_map(check_ward).take(wards).collect()
}
